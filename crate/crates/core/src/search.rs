//! Maximal operator norms of submatrices and the coefficient profiles built
//! from them.
//!
//! For a matrix `U` and sizes `n, m`, `‖Û^(n,m)‖` is the largest operator
//! norm over all `n x m` submatrices. Three profiles are derived from it:
//!
//! * `s_k = max_{n+m=k+1} ‖Û^(n,m)‖` for `k = 1..N`,
//! * `R_k = ((1 + s_k)/2)^2`,
//! * for `L` unitaries concatenated into an `N x LN` matrix, `S_k` is the
//!   largest squared norm of a `(k+1)`-column submatrix, `k = 0..LN-1`.
//!
//! Maxima are exact (certified) when the number of index pairs fits the
//! enumeration budget; otherwise a multi-restart local search returns an
//! honest lower bound together with a witness that reproduces it.

use std::cmp::Ordering;
use std::io::Write;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::haar::RngStream;
use crate::matrix::{block_hs_sq, block_norm, unitarity_defect, ComplexMatrix, IndexSet, C64};

pub const DEFAULT_MAX_ENUMERATIONS: u64 = 2_000_000;
pub const DEFAULT_RESTARTS: usize = 64;
pub const DEFAULT_MAX_SWAPS: usize = 500;

/// Unitarity tolerance for inputs of the multi-measurement profile.
pub const UNITARY_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct SearchBudget {
    /// Index pairs `(I, J)` that may be visited exhaustively.
    pub max_enumerations: u64,
    pub restarts: usize,
    pub max_swaps: usize,
    pub rng: RngStream,
}

impl SearchBudget {
    pub fn new(rng: RngStream) -> Self {
        Self {
            max_enumerations: DEFAULT_MAX_ENUMERATIONS,
            restarts: DEFAULT_RESTARTS,
            max_swaps: DEFAULT_MAX_SWAPS,
            rng,
        }
    }

    /// Budget under which every search is exhaustive.
    pub fn exhaustive(rng: RngStream) -> Self {
        Self { max_enumerations: u64::MAX, ..Self::new(rng) }
    }

    fn validate(&self) -> Result<()> {
        if self.max_enumerations == 0 || self.restarts == 0 {
            return invalid("search budget needs max_enumerations >= 1 and restarts >= 1");
        }
        Ok(())
    }

    fn with_rng(&self, rng: RngStream) -> Self {
        Self { rng, ..self.clone() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchResult {
    pub value: f64,
    pub witness_rows: IndexSet,
    pub witness_cols: IndexSet,
    pub certified: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProfileKind {
    /// `s_k`, indexed from 1.
    S,
    /// `R_k = ((1 + s_k)/2)^2`, indexed from 1.
    R,
    /// Multi-measurement `S_k`, indexed from 0.
    Multi,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProfileEntry {
    pub value: f64,
    pub certified: bool,
    /// Winning `(n, m)` split; `None` for entries fixed in closed form.
    pub split: Option<(usize, usize)>,
    pub witness_rows: Vec<usize>,
    pub witness_cols: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormProfile {
    kind: ProfileKind,
    dim: usize,
    measurements: usize,
    entries: Vec<ProfileEntry>,
}

impl NormProfile {
    /// Assembles a profile from raw values, e.g. ones computed elsewhere.
    /// Monotonicity is not enforced here; consumers reject decreasing
    /// profiles.
    pub fn from_values(kind: ProfileKind, dim: usize, measurements: usize, values: &[f64], certified: bool) -> Result<Self> {
        let expected = match kind {
            ProfileKind::S | ProfileKind::R => dim,
            ProfileKind::Multi => dim * measurements,
        };
        if values.len() != expected || dim == 0 {
            return invalid(format!("{kind:?} profile for N={dim}, L={measurements} needs {expected} values"));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return invalid("profile values must be finite and nonnegative");
        }
        let entries = values
            .iter()
            .map(|&value| ProfileEntry { value, certified, split: None, witness_rows: vec![], witness_cols: vec![] })
            .collect();
        Ok(Self { kind, dim, measurements, entries })
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn measurements(&self) -> usize {
        self.measurements
    }

    /// Index of the first entry (1 for `s` and `R`, 0 for `S`).
    pub fn first_index(&self) -> usize {
        match self.kind {
            ProfileKind::Multi => 0,
            _ => 1,
        }
    }

    pub fn entries(&self) -> &[ProfileEntry] {
        &self.entries
    }

    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.value).collect()
    }

    /// Value at index `k` in the profile's own indexing.
    pub fn value(&self, k: usize) -> f64 {
        self.entries[k - self.first_index()].value
    }

    pub fn is_certified(&self) -> bool {
        self.entries.iter().all(|e| e.certified)
    }

    /// CSV dump: `k,value,certified,split_n,split_m,witness_rows,witness_cols`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["k", "value", "certified", "split_n", "split_m", "witness_rows", "witness_cols"])?;
        let join = |v: &[usize]| v.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(";");
        for (offset, e) in self.entries.iter().enumerate() {
            let (sn, sm) = e.split.map(|(a, b)| (a.to_string(), b.to_string())).unwrap_or_default();
            w.write_record([
                (offset + self.first_index()).to_string(),
                e.value.to_string(),
                e.certified.to_string(),
                sn,
                sm,
                join(&e.witness_rows),
                join(&e.witness_cols),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
        if acc == u128::MAX {
            return acc;
        }
    }
    acc
}

/// `‖Û^(n,m)‖`: exhaustive when `C(rows,n)·C(cols,m)` fits the budget,
/// local search otherwise. Vector-shaped blocks (`n == 1` or `m == 1`) are
/// always solved exactly by sorting.
pub fn max_submatrix_norm(u: &ComplexMatrix, n: usize, m: usize, budget: &SearchBudget) -> Result<SearchResult> {
    max_submatrix_norm_seeded(u, n, m, budget, &[])
}

fn max_submatrix_norm_seeded(
    u: &ComplexMatrix,
    n: usize,
    m: usize,
    budget: &SearchBudget,
    seeds: &[Candidate],
) -> Result<SearchResult> {
    budget.validate()?;
    if n == 0 || m == 0 || n > u.rows() || m > u.cols() {
        return invalid(format!("block size {n}x{m} does not fit a {}x{} matrix", u.rows(), u.cols()));
    }
    let best = if m == 1 {
        column_vector_max(u, n)
    } else if n == 1 {
        row_vector_max(u, m)
    } else if binomial(u.rows(), n).saturating_mul(binomial(u.cols(), m)) <= budget.max_enumerations as u128 {
        exhaustive_max(u, n, m)
    } else {
        heuristic_max(u, n, m, budget, seeds)
    };
    Ok(best.into_result(u))
}

/// Exact `‖Û^(n,1)‖`: per column, the best `n`-subvector holds the `n`
/// largest moduli.
pub fn max_column_subvector_norm(u: &ComplexMatrix, n: usize) -> Result<SearchResult> {
    if n == 0 || n > u.rows() {
        return invalid(format!("subvector length {n} does not fit {} rows", u.rows()));
    }
    Ok(column_vector_max(u, n).into_result(u))
}

/// Row analogue of [`max_column_subvector_norm`], i.e. `‖Û^(1,m)‖`.
pub fn max_row_subvector_norm(u: &ComplexMatrix, m: usize) -> Result<SearchResult> {
    if m == 0 || m > u.cols() {
        return invalid(format!("subvector length {m} does not fit {} columns", u.cols()));
    }
    Ok(row_vector_max(u, m).into_result(u))
}

/// `‖Û^(n,1)‖` for every `n = 1..rows` at once (entry `n-1`).
pub fn column_subvector_norms(u: &ComplexMatrix) -> Vec<f64> {
    let mut best = vec![0.0f64; u.rows()];
    for j in 0..u.cols() {
        let mut sq: Vec<f64> = (0..u.rows()).map(|i| u.get(i, j).norm_sqr()).collect();
        sq.sort_by(|a, b| b.total_cmp(a));
        let mut acc = 0.0;
        for (k, s) in sq.iter().enumerate() {
            acc += s;
            best[k] = best[k].max(acc);
        }
    }
    best.into_iter().map(f64::sqrt).collect()
}

pub fn s_profile(u: &ComplexMatrix, budget: &SearchBudget) -> Result<NormProfile> {
    budget.validate()?;
    if !u.is_square() {
        return invalid(format!("s-profile needs a square matrix, got {}x{}", u.rows(), u.cols()));
    }
    let dim = u.rows();
    let mut entries = Vec::with_capacity(dim);
    // previous[n-1] holds the winner of split (n, k-n) at level k-1.
    let mut previous: Vec<Candidate> = Vec::new();
    for k in 1..=dim {
        let level: Vec<(Candidate, bool)> = (1..=k)
            .into_par_iter()
            .map(|n| {
                let m = k + 1 - n;
                let mut seeds = Vec::new();
                if n >= 2 {
                    if let Some(c) = previous.get(n - 2) {
                        seeds.push(c.extend_rows(u));
                    }
                }
                if m >= 2 {
                    if let Some(c) = previous.get(n - 1) {
                        seeds.push(c.extend_cols(u));
                    }
                }
                let split_budget = budget.with_rng(budget.rng.child(k as u64).child(n as u64));
                let r = max_submatrix_norm_seeded(u, n, m, &split_budget, &seeds)
                    .expect("split sizes are within range");
                let certified = r.certified;
                (Candidate::from_result(r), certified)
            })
            .collect();
        let mut best: Option<(usize, &Candidate)> = None;
        for (idx, (c, _)) in level.iter().enumerate() {
            if best.is_none_or(|(_, b)| c.beats(b)) {
                best = Some((idx, c));
            }
        }
        let (idx, winner) = best.expect("at least one split");
        entries.push(ProfileEntry {
            value: winner.value,
            certified: level.iter().all(|(_, cert)| *cert),
            split: Some((idx + 1, k - idx)),
            witness_rows: winner.rows.clone(),
            witness_cols: winner.cols.clone(),
        });
        previous = level.into_iter().map(|(c, _)| c).collect();
    }
    Ok(NormProfile { kind: ProfileKind::S, dim, measurements: 1, entries })
}

pub fn r_profile(s: &NormProfile) -> Result<NormProfile> {
    if s.kind != ProfileKind::S {
        return invalid(format!("R-profile is built from an s-profile, got {:?}", s.kind));
    }
    let entries = s
        .entries
        .iter()
        .map(|e| ProfileEntry { value: (0.5 * (1.0 + e.value)).powi(2), ..e.clone() })
        .collect();
    Ok(NormProfile { kind: ProfileKind::R, dim: s.dim, measurements: 1, entries })
}

/// `S_k` for the column concatenation of `us`. `S_0 = 1` holds for any
/// unitaries because every column is a unit vector.
pub fn multi_measurement_profile(us: &[ComplexMatrix], budget: &SearchBudget) -> Result<NormProfile> {
    budget.validate()?;
    if us.len() < 2 {
        return invalid(format!("multi-measurement profile needs at least 2 unitaries, got {}", us.len()));
    }
    let dim = us[0].rows();
    for (i, u) in us.iter().enumerate() {
        if !u.is_square() || u.rows() != dim {
            return invalid(format!("unitary {i} is {}x{}, expected {dim}x{dim}", u.rows(), u.cols()));
        }
        let defect = unitarity_defect(u)?;
        if defect > UNITARY_TOLERANCE {
            return invalid(format!("matrix {i} is not unitary (defect {defect:e})"));
        }
    }
    let cat = ComplexMatrix::hconcat(us)?;
    let total = cat.cols();
    let all_rows: Vec<usize> = (0..dim).collect();
    let mut entries = vec![ProfileEntry {
        value: 1.0,
        certified: true,
        split: None,
        witness_rows: all_rows.clone(),
        witness_cols: vec![0],
    }];
    let mut previous = Candidate { value: 1.0, rows: all_rows, cols: vec![0] };
    for k in 1..total {
        let seeds = [previous.extend_cols(&cat)];
        let split_budget = budget.with_rng(budget.rng.child(k as u64));
        let r = max_submatrix_norm_seeded(&cat, dim, k + 1, &split_budget, &seeds)?;
        let certified = r.certified;
        let c = Candidate::from_result(r);
        entries.push(ProfileEntry {
            value: c.value * c.value,
            certified,
            split: Some((dim, k + 1)),
            witness_rows: c.rows.clone(),
            witness_cols: c.cols.clone(),
        });
        previous = c;
    }
    Ok(NormProfile { kind: ProfileKind::Multi, dim, measurements: us.len(), entries })
}

#[derive(Clone, Debug, PartialEq)]
struct Candidate {
    value: f64,
    rows: Vec<usize>,
    cols: Vec<usize>,
}

impl Candidate {
    fn evaluate(u: &ComplexMatrix, rows: Vec<usize>, cols: Vec<usize>) -> Self {
        Self { value: block_norm(u, &rows, &cols), rows, cols }
    }

    fn from_result(r: SearchResult) -> Self {
        Self { value: r.value, rows: r.witness_rows.members().to_vec(), cols: r.witness_cols.members().to_vec() }
    }

    /// Larger value wins; equal values go to the lexicographically smaller
    /// `(rows, cols)`.
    fn beats(&self, other: &Candidate) -> bool {
        match self.value.total_cmp(&other.value) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => (&self.rows, &self.cols) < (&other.rows, &other.cols),
        }
    }

    fn into_result(self, u: &ComplexMatrix, certified: bool) -> SearchResult {
        SearchResult {
            value: self.value,
            witness_rows: IndexSet::from_sorted_unchecked(u.rows(), self.rows),
            witness_cols: IndexSet::from_sorted_unchecked(u.cols(), self.cols),
            certified,
        }
    }

    /// Adds the row with the largest mass on the current columns; the norm
    /// cannot decrease.
    fn extend_rows(&self, u: &ComplexMatrix) -> Candidate {
        let pick = (0..u.rows())
            .filter(|i| !self.rows.contains(i))
            .max_by(|&a, &b| {
                block_hs_sq(u, &[a], &self.cols)
                    .total_cmp(&block_hs_sq(u, &[b], &self.cols))
                    .then(b.cmp(&a))
            });
        let mut rows = self.rows.clone();
        if let Some(i) = pick {
            rows.push(i);
            rows.sort_unstable();
        }
        Candidate::evaluate(u, rows, self.cols.clone())
    }

    fn extend_cols(&self, u: &ComplexMatrix) -> Candidate {
        let pick = (0..u.cols())
            .filter(|j| !self.cols.contains(j))
            .max_by(|&a, &b| {
                block_hs_sq(u, &self.rows, &[a])
                    .total_cmp(&block_hs_sq(u, &self.rows, &[b]))
                    .then(b.cmp(&a))
            });
        let mut cols = self.cols.clone();
        if let Some(j) = pick {
            cols.push(j);
            cols.sort_unstable();
        }
        Candidate::evaluate(u, self.rows.clone(), cols)
    }
}

/// Outcome of a search before it is packaged with certification.
struct Found {
    best: Candidate,
    certified: bool,
}

impl Found {
    fn into_result(self, u: &ComplexMatrix) -> SearchResult {
        self.best.into_result(u, self.certified)
    }
}

/// Indices of the `k` largest scores, ties to the smaller index, sorted.
fn top_indices(scores: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    idx.truncate(k);
    idx.sort_unstable();
    idx
}

fn column_vector_max(u: &ComplexMatrix, n: usize) -> Found {
    let mut best: Option<Candidate> = None;
    for j in 0..u.cols() {
        let sq: Vec<f64> = (0..u.rows()).map(|i| u.get(i, j).norm_sqr()).collect();
        let rows = top_indices(&sq, n);
        let value = block_norm(u, &rows, &[j]);
        let c = Candidate { value, rows, cols: vec![j] };
        if best.as_ref().is_none_or(|b| c.beats(b)) {
            best = Some(c);
        }
    }
    Found { best: best.expect("matrix has a column"), certified: true }
}

fn row_vector_max(u: &ComplexMatrix, m: usize) -> Found {
    let mut best: Option<Candidate> = None;
    for i in 0..u.rows() {
        let sq: Vec<f64> = u.row(i).iter().map(|z| z.norm_sqr()).collect();
        let cols = top_indices(&sq, m);
        let value = block_norm(u, &[i], &cols);
        let c = Candidate { value, rows: vec![i], cols };
        if best.as_ref().is_none_or(|b| c.beats(b)) {
            best = Some(c);
        }
    }
    Found { best: best.expect("matrix has a row"), certified: true }
}

/// Advances `combo` to the next `k`-combination of `0..n` in lexicographic
/// order; returns false after the last one.
fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if combo[i] < n - k + i {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Calls `f` on every `k`-combination of `0..n` whose first element is
/// `first`, in lexicographic order.
fn for_each_combination_from(n: usize, k: usize, first: usize, mut f: impl FnMut(&[usize])) {
    if k == 0 || first + k > n {
        return;
    }
    let mut tail: Vec<usize> = (first + 1..first + k).collect();
    loop {
        let mut combo = Vec::with_capacity(k);
        combo.push(first);
        combo.extend_from_slice(&tail);
        f(&combo);
        if tail.is_empty() || !next_combination_offset(&mut tail, first + 1, n) {
            return;
        }
    }
}

/// `next_combination` over the index range `lo..n`.
fn next_combination_offset(combo: &mut [usize], lo: usize, n: usize) -> bool {
    for c in combo.iter_mut() {
        *c -= lo;
    }
    let more = next_combination(combo, n - lo);
    for c in combo.iter_mut() {
        *c += lo;
    }
    more
}

/// Exhaustive maximum with Hilbert–Schmidt pruning: a block whose HS norm
/// is strictly below the incumbent cannot reach it, since `σ_max <= ‖·‖_HS`.
fn exhaustive_max(u: &ComplexMatrix, n: usize, m: usize) -> Found {
    let incumbent = AtomicU64::new(0f64.to_bits());
    let per_first: Vec<Option<Candidate>> = (0..=u.rows() - n)
        .into_par_iter()
        .map(|first| {
            let mut local: Option<Candidate> = None;
            for_each_combination_from(u.rows(), n, first, |rows| {
                let colsq: Vec<f64> = (0..u.cols())
                    .map(|j| rows.iter().map(|&i| u.get(i, j).norm_sqr()).sum())
                    .collect();
                let mut cols: Vec<usize> = (0..m).collect();
                loop {
                    let hs_sq: f64 = cols.iter().map(|&j| colsq[j]).sum();
                    let bound = f64::from_bits(incumbent.load(AtomicOrdering::Relaxed));
                    if hs_sq >= bound * bound * (1.0 - 1e-12) {
                        let value = block_norm(u, rows, &cols);
                        let improves = match &local {
                            None => true,
                            Some(b) => value > b.value,
                        };
                        if improves {
                            local = Some(Candidate { value, rows: rows.to_vec(), cols: cols.clone() });
                            incumbent.fetch_max(value.to_bits(), AtomicOrdering::Relaxed);
                        }
                    }
                    if !next_combination(&mut cols, u.cols()) {
                        break;
                    }
                }
            });
            local
        })
        .collect();
    let mut best: Option<Candidate> = None;
    for c in per_first.into_iter().flatten() {
        if best.as_ref().is_none_or(|b| c.beats(b)) {
            best = Some(c);
        }
    }
    Found { best: best.expect("at least one block"), certified: true }
}

fn heuristic_max(u: &ComplexMatrix, n: usize, m: usize, budget: &SearchBudget, seeds: &[Candidate]) -> Found {
    let mut starts: Vec<(Vec<usize>, Vec<usize>)> = seeds.iter().map(|c| (c.rows.clone(), c.cols.clone())).collect();
    starts.push(greedy_start(u, n, m));
    for r in 1..budget.restarts {
        let mut g = budget.rng.child(r as u64).generator();
        starts.push((g.subset(u.rows(), n), g.subset(u.cols(), m)));
    }
    let found: Vec<Candidate> = starts
        .into_par_iter()
        .map(|(rows, cols)| local_search(u, rows, cols, budget.max_swaps))
        .collect();
    let mut best: Option<Candidate> = None;
    for c in found {
        if best.as_ref().is_none_or(|b| c.beats(b)) {
            best = Some(c);
        }
    }
    Found { best: best.expect("at least one start"), certified: false }
}

/// Rows: the largest entries of the column holding the largest modulus.
/// Columns: the largest mass on those rows.
fn greedy_start(u: &ComplexMatrix, n: usize, m: usize) -> (Vec<usize>, Vec<usize>) {
    let (mut bj, mut bv) = (0, -1.0);
    for i in 0..u.rows() {
        for (j, z) in u.row(i).iter().enumerate() {
            if z.norm_sqr() > bv {
                (bj, bv) = (j, z.norm_sqr());
            }
        }
    }
    let colsq: Vec<f64> = (0..u.rows()).map(|i| u.get(i, bj).norm_sqr()).collect();
    let rows = top_indices(&colsq, n);
    let mass: Vec<f64> = (0..u.cols()).map(|j| rows.iter().map(|&i| u.get(i, j).norm_sqr()).sum()).collect();
    (rows, top_indices(&mass, m))
}

/// Right singular vector estimate of `u(rows, cols)` by power iteration.
fn top_right_vector(u: &ComplexMatrix, rows: &[usize], cols: &[usize], start: Option<Vec<C64>>) -> Vec<C64> {
    let m = cols.len();
    let mut x = start.unwrap_or_else(|| {
        // mass on each column is a positive, deterministic start
        cols.iter().map(|&j| C64::new(block_hs_sq(u, rows, &[j]).sqrt() + 1e-3, 0.0)).collect()
    });
    normalize(&mut x);
    let mut y = vec![C64::new(0.0, 0.0); rows.len()];
    let mut last = 0.0;
    for _ in 0..60 {
        for (yi, &i) in y.iter_mut().zip(rows) {
            let r = u.row(i);
            *yi = cols.iter().zip(&x).map(|(&j, xj)| r[j] * xj).sum();
        }
        let mut next = vec![C64::new(0.0, 0.0); m];
        for (yi, &i) in y.iter().zip(rows) {
            let r = u.row(i);
            for (nx, &j) in next.iter_mut().zip(cols) {
                *nx += r[j].conj() * yi;
            }
        }
        let lambda = normalize(&mut next);
        x = next;
        if lambda == 0.0 || (lambda - last).abs() <= 1e-10 * lambda {
            break;
        }
        last = lambda;
    }
    x
}

fn normalize(v: &mut [C64]) -> f64 {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n > 0.0 {
        for z in v.iter_mut() {
            *z /= n;
        }
    }
    n
}

/// Alternating ascent followed by steepest-ascent single swaps.
///
/// Alternation: with `v` the top right singular vector of the current
/// block, the best rows for `v` are those with the largest `|(U v)_i|`;
/// symmetrically for columns given the left vector. Each half-step cannot
/// decrease the block norm. The swap phase then tries every single row or
/// column replacement with exact norms and applies the best improving one.
fn local_search(u: &ComplexMatrix, rows: Vec<usize>, cols: Vec<usize>, max_swaps: usize) -> Candidate {
    let (n, m) = (rows.len(), cols.len());
    let mut cur = Candidate::evaluate(u, rows, cols);
    let mut swaps = 0;
    loop {
        let mut v = top_right_vector(u, &cur.rows, &cur.cols, None);
        for _ in 0..100 {
            let w: Vec<C64> = (0..u.rows())
                .map(|i| {
                    let r = u.row(i);
                    cur.cols.iter().zip(&v).map(|(&j, vj)| r[j] * vj).sum()
                })
                .collect();
            let new_rows = top_indices(&w.iter().map(|z| z.norm_sqr()).collect::<Vec<_>>(), n);
            let mut left: Vec<C64> = new_rows.iter().map(|&i| w[i]).collect();
            if normalize(&mut left) == 0.0 {
                break;
            }
            let z: Vec<C64> = (0..u.cols())
                .map(|j| new_rows.iter().zip(&left).map(|(&i, li)| li.conj() * u.get(i, j)).sum())
                .collect();
            let new_cols = top_indices(&z.iter().map(|x| x.norm_sqr()).collect::<Vec<_>>(), m);
            if new_rows == cur.rows && new_cols == cur.cols {
                break;
            }
            let next = Candidate::evaluate(u, new_rows, new_cols);
            if next.value <= cur.value * (1.0 + 1e-14) {
                break;
            }
            let start: Vec<C64> = next.cols.iter().map(|&j| z[j].conj()).collect();
            cur = next;
            v = top_right_vector(u, &cur.rows, &cur.cols, Some(start));
        }
        if swaps >= max_swaps {
            return cur;
        }
        match best_swap(u, &cur) {
            Some(next) => {
                cur = next;
                swaps += 1;
            }
            None => return cur,
        }
    }
}

fn best_swap(u: &ComplexMatrix, cur: &Candidate) -> Option<Candidate> {
    let threshold = cur.value * (1.0 + 1e-13);
    let mut best: Option<Candidate> = None;
    let mut consider = |c: Candidate| {
        if c.value > threshold && best.as_ref().is_none_or(|b| c.beats(b)) {
            best = Some(c);
        }
    };
    for pos in 0..cur.rows.len() {
        for i in (0..u.rows()).filter(|i| !cur.rows.contains(i)) {
            let mut rows = cur.rows.clone();
            rows[pos] = i;
            rows.sort_unstable();
            consider(Candidate::evaluate(u, rows, cur.cols.clone()));
        }
    }
    for pos in 0..cur.cols.len() {
        for j in (0..u.cols()).filter(|j| !cur.cols.contains(j)) {
            let mut cols = cur.cols.clone();
            cols[pos] = j;
            cols.sort_unstable();
            consider(Candidate::evaluate(u, cur.rows.clone(), cols));
        }
    }
    best
}

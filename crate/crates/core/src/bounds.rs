//! Shannon entropy, majorization, and the entropic lower bounds evaluated on
//! concrete unitaries and norm profiles.
//!
//! All entropies use the natural logarithm; divide by `ln 2` for bits.
//!
//! For measurement bases related by a unitary `U` (`U_ij = ⟨a_i|b_j⟩`) and a
//! state `ψ` with outcome distributions `p`, `q`:
//!
//! * `B_MU = -ln c²`, `c = max |U_ij|`,
//! * `B_CP = B_MU + (1/2 - c/2) ln(c²/c₂²)`, `c₂` the second largest modulus,
//! * `H(Q)` with `Q = (R_1, R_2 - R_1, ...)`, since `p ⊗ q ≺ Q`,
//! * `H(s_1, s_2 - s_1, ...)`, since `p ⊕ q ≺ (1, s_1, s_2 - s_1, ...)`,
//! * for `L` bases, `-Σ (S_i - S_{i-1}) ln(S_i - S_{i-1})` with `S_{LN} = L`.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::haar::PureState;
use crate::matrix::ComplexMatrix;
use crate::search::{r_profile, NormProfile, ProfileKind};

pub const DEFAULT_MAJORIZATION_TOL: f64 = 1e-9;
/// Allowed gap between the weight sum and the declared mass.
pub const MASS_TOLERANCE: f64 = 1e-8;
/// Negative weights down to this size are rounding noise and become 0.
pub const NEGATIVE_CLAMP: f64 = 1e-12;

/// Nonnegative weights with a declared total (1 for a distribution, `L` for
/// an `L`-fold direct sum).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbVector {
    weights: Vec<f64>,
    mass: f64,
}

impl ProbVector {
    pub fn new(weights: Vec<f64>, declared_mass: f64) -> Result<Self> {
        if !(declared_mass.is_finite() && declared_mass > 0.0) {
            return invalid(format!("declared mass {declared_mass} must be positive"));
        }
        let weights = clamp_weights(weights)?;
        let total: f64 = weights.iter().sum();
        if (total - declared_mass).abs() > MASS_TOLERANCE {
            return invalid(format!("weights sum to {total}, declared mass is {declared_mass}"));
        }
        Ok(Self { weights, mass: declared_mass })
    }

    pub fn distribution(weights: Vec<f64>) -> Result<Self> {
        Self::new(weights, 1.0)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn sorted_desc(&self) -> Vec<f64> {
        let mut w = self.weights.clone();
        w.sort_by(|a, b| b.total_cmp(a));
        w
    }
}

fn clamp_weights(mut weights: Vec<f64>) -> Result<Vec<f64>> {
    for w in &mut weights {
        if !w.is_finite() {
            return invalid("weights must be finite");
        }
        if *w < 0.0 {
            if *w < -NEGATIVE_CLAMP {
                return invalid(format!("negative weight {w}"));
            }
            *w = 0.0;
        }
    }
    Ok(weights)
}

pub fn shannon_entropy(v: &ProbVector) -> f64 {
    entropy_unchecked(v.weights())
}

/// Entropy of raw weights, with the same clamping rule as [`ProbVector`].
pub fn entropy(weights: &[f64]) -> Result<f64> {
    Ok(entropy_unchecked(&clamp_weights(weights.to_vec())?))
}

fn entropy_unchecked(w: &[f64]) -> f64 {
    -w.iter().filter(|&&x| x > 0.0).map(|&x| x * x.ln()).sum::<f64>()
}

/// Outcome distribution `p_j = |⟨u_j|ψ⟩|²` for the basis formed by the
/// columns `u_j` of `u`.
pub fn measurement_distribution(u: &ComplexMatrix, psi: &PureState) -> Result<ProbVector> {
    if !u.is_square() || u.rows() != psi.dim() {
        return invalid(format!("{}x{} basis cannot measure a state of dimension {}", u.rows(), u.cols(), psi.dim()));
    }
    let amps = psi.amplitudes();
    let mut p = vec![0.0f64; u.cols()];
    let mut acc = vec![crate::C64::new(0.0, 0.0); u.cols()];
    for (i, a) in amps.iter().enumerate() {
        for (s, uij) in acc.iter_mut().zip(u.row(i)) {
            *s += uij.conj() * a;
        }
    }
    for (pj, s) in p.iter_mut().zip(&acc) {
        *pj = s.norm_sqr();
    }
    ProbVector::distribution(p)
}

/// `(c, c₂)`: the two largest entry moduli, counted over all entries, so
/// `c₂ = c` when the maximum is attained twice.
pub fn largest_two_moduli(u: &ComplexMatrix) -> Result<(f64, f64)> {
    if u.entries().len() < 2 {
        return invalid("a second largest modulus needs at least two entries");
    }
    let (mut c, mut c2) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for z in u.entries() {
        let a = z.norm();
        if a > c {
            c2 = c;
            c = a;
        } else if a > c2 {
            c2 = a;
        }
    }
    Ok((c, c2))
}

fn max_modulus(u: &ComplexMatrix) -> f64 {
    u.entries().iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `-ln c²`. The input is assumed unitary; only squareness is checked.
pub fn maassen_uffink(u: &ComplexMatrix) -> Result<f64> {
    if !u.is_square() {
        return invalid("Maassen–Uffink bound needs a square matrix");
    }
    let c = max_modulus(u);
    if c == 0.0 {
        return Err(Error::Numerical("zero matrix has no finite bound".into()));
    }
    Ok(-(c * c).ln())
}

/// `-ln c² + (1/2 - c/2) ln(c²/c₂²)`, requires `N ≥ 2`.
pub fn coles_piani(u: &ComplexMatrix) -> Result<f64> {
    if !u.is_square() || u.rows() < 2 {
        return invalid("Coles–Piani bound needs a square matrix with N >= 2");
    }
    let (c, c2) = largest_two_moduli(u)?;
    if c2 == 0.0 {
        return Err(Error::Numerical("second largest modulus is zero".into()));
    }
    Ok(-(c * c).ln() + (0.5 - 0.5 * c) * (c * c / (c2 * c2)).ln())
}

/// Successive differences of `values` starting from `start`, with rounding
/// negatives clamped; a genuine decrease is an error.
fn increments(values: &[f64], start: f64) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(values.len());
    let mut prev = start;
    for (k, &v) in values.iter().enumerate() {
        let d = v - prev;
        if d < -NEGATIVE_CLAMP {
            return invalid(format!("profile decreases at position {k} by {}", -d));
        }
        out.push(d.max(0.0));
        prev = v;
    }
    Ok(out)
}

fn expect_kind(p: &NormProfile, kind: ProfileKind) -> Result<()> {
    if p.kind() != kind {
        return invalid(format!("expected a {kind:?} profile, got {:?}", p.kind()));
    }
    Ok(())
}

/// `Q = (R_1, R_2 - R_1, ..., R_N - R_{N-1})`.
pub fn tensor_majorizer(r: &NormProfile) -> Result<ProbVector> {
    expect_kind(r, ProfileKind::R)?;
    let q = increments(&r.values(), 0.0)?;
    let mass = q.iter().sum();
    ProbVector::new(q, mass)
}

/// `(1, s_1, s_2 - s_1, ..., s_N - s_{N-1})`, which majorizes `p ⊕ q`.
pub fn direct_sum_majorizer(s: &NormProfile) -> Result<ProbVector> {
    expect_kind(s, ProfileKind::S)?;
    let mut v = vec![1.0];
    v.extend(increments(&s.values(), 0.0)?);
    let mass = v.iter().sum();
    ProbVector::new(v, mass)
}

/// `(S_0, S_1 - S_0, ..., L - S_{LN-1})`, which majorizes the direct sum of
/// all `L` outcome distributions.
pub fn multi_majorizer(s: &NormProfile) -> Result<ProbVector> {
    expect_kind(s, ProfileKind::Multi)?;
    let l = s.measurements() as f64;
    let mut values = s.values();
    values.push(l);
    let mut v = vec![values[0]];
    v.extend(increments(&values[1..], values[0])?);
    ProbVector::new(v, l)
}

/// `H(Q)` from an `R`-profile.
pub fn tensor_majorization_bound(r: &NormProfile) -> Result<f64> {
    Ok(shannon_entropy(&tensor_majorizer(r)?))
}

/// `H(s_1, s_2 - s_1, ..., s_N - s_{N-1})` from an `s`-profile.
pub fn strong_direct_sum_bound(s: &NormProfile) -> Result<f64> {
    expect_kind(s, ProfileKind::S)?;
    entropy(&increments(&s.values(), 0.0)?)
}

/// `-Σ_{i=1}^{LN} (S_i - S_{i-1}) ln(S_i - S_{i-1})` with `S_{LN} = L`.
pub fn multi_measurement_bound(s: &NormProfile) -> Result<f64> {
    // S_0 = 1 contributes 1·ln 1 = 0, so the full majorizer has the same entropy.
    Ok(shannon_entropy(&multi_majorizer(s)?))
}

/// `x ≺ y`: every partial sum of `x↓` is at most that of `y↓` plus `tol`,
/// and the totals agree within `tol`. Shorter vectors are padded with zeros.
pub fn is_majorized(x: &ProbVector, y: &ProbVector, tol: f64) -> Result<bool> {
    if (x.mass() - y.mass()).abs() > MASS_TOLERANCE {
        return invalid(format!("cannot compare masses {} and {}", x.mass(), y.mass()));
    }
    let (xs, ys) = (x.sorted_desc(), y.sorted_desc());
    let len = xs.len().max(ys.len());
    let (mut sx, mut sy) = (0.0, 0.0);
    for i in 0..len {
        sx += xs.get(i).copied().unwrap_or(0.0);
        sy += ys.get(i).copied().unwrap_or(0.0);
        if sx > sy + tol {
            return Ok(false);
        }
    }
    Ok((sx - sy).abs() <= tol)
}

pub fn direct_sum(vs: &[ProbVector]) -> Result<ProbVector> {
    if vs.is_empty() {
        return invalid("direct sum of no vectors");
    }
    let weights = vs.iter().flat_map(|v| v.weights().iter().copied()).collect();
    ProbVector::new(weights, vs.iter().map(|v| v.mass()).sum())
}

pub fn tensor_product(x: &ProbVector, y: &ProbVector) -> ProbVector {
    let weights = x.weights().iter().flat_map(|a| y.weights().iter().map(move |b| a * b)).collect();
    ProbVector { weights, mass: x.mass() * y.mass() }
}

/// Every lower bound for one measurement setting, optionally paired with
/// the minimizer's upper value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub b_mu: f64,
    pub b_cp: f64,
    pub h_q: f64,
    pub strong: f64,
    pub multi: Option<f64>,
    pub min_upper: Option<f64>,
    pub c: f64,
    pub c2: f64,
}

impl BoundReport {
    /// Bounds for the pair (standard basis, columns of `u`) from its
    /// `s`-profile.
    pub fn for_pair(u: &ComplexMatrix, s: &NormProfile) -> Result<Self> {
        expect_kind(s, ProfileKind::S)?;
        let (c, c2) = largest_two_moduli(u)?;
        Ok(Self {
            b_mu: maassen_uffink(u)?,
            b_cp: coles_piani(u)?,
            h_q: tensor_majorization_bound(&r_profile(s)?)?,
            strong: strong_direct_sum_bound(s)?,
            multi: None,
            min_upper: None,
            c,
            c2,
        })
    }

    /// `(name, value)` of every lower bound present.
    pub fn lower_bounds(&self) -> Vec<(&'static str, f64)> {
        let mut out = vec![("b_mu", self.b_mu), ("b_cp", self.b_cp), ("h_q", self.h_q), ("strong", self.strong)];
        if let Some(m) = self.multi {
            out.push(("multi", m));
        }
        out
    }

    /// Names of bounds exceeding the upper value by more than `tol`.
    pub fn violations(&self, tol: f64) -> Vec<&'static str> {
        match self.min_upper {
            None => vec![],
            Some(up) => self.lower_bounds().into_iter().filter(|(_, b)| *b > up + tol).map(|(n, _)| n).collect(),
        }
    }
}

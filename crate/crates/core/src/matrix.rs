//! Dense complex matrices, index sets, operator norms and unitarity checks.
//!
//! Entries are stored row-major. Every constructor rejects non-finite
//! entries, so all operations downstream may assume a valid matrix.

use std::fmt::Write as _;
use std::path::Path;

use faer::{Mat, Side};

use crate::error::{invalid, Error, Result};

pub type C64 = num_complex::Complex64;

/// Largest Gram dimension for which singular values come from the
/// Hermitian eigenproblem of `m†m` (or `mm†`) instead of a full SVD.
pub const GRAM_EIGEN_MAX_DIM: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return invalid(format!("matrix shape {rows}x{cols} has a zero dimension"));
        }
        if data.len() != rows * cols {
            return invalid(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            ));
        }
        if let Some(pos) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return invalid(format!(
                "non-finite entry at ({}, {})",
                pos / cols,
                pos % cols
            ));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::new(rows, cols, data)
    }

    /// Caller guarantees shape and finiteness.
    pub(crate) fn from_parts(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn identity(n: usize) -> Self {
        assert!(n >= 1, "identity of dimension 0");
        let mut data = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            data[i * n + i] = C64::new(1.0, 0.0);
        }
        Self::from_parts(n, n, data)
    }

    /// Unitary discrete Fourier matrix, `F_jk = exp(2πi jk/n) / √n`.
    pub fn fourier(n: usize) -> Self {
        assert!(n >= 1, "Fourier matrix of dimension 0");
        let scale = 1.0 / (n as f64).sqrt();
        let mut data = Vec::with_capacity(n * n);
        for j in 0..n {
            for k in 0..n {
                let phase = 2.0 * std::f64::consts::PI * ((j * k) % n) as f64 / n as f64;
                data.push(C64::from_polar(scale, phase));
            }
        }
        Self::from_parts(n, n, data)
    }

    pub fn diagonal(diag: &[C64]) -> Result<Self> {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { diag[i] } else { C64::new(0.0, 0.0) })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.cols + j]
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).conj());
            }
        }
        Self::from_parts(self.cols, self.rows, data)
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j));
            }
        }
        Self::from_parts(self.cols, self.rows, data)
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Result<Self> {
        if self.cols != other.rows {
            return invalid(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            ));
        }
        let mut data = vec![C64::new(0.0, 0.0); self.rows * other.cols];
        for i in 0..self.rows {
            let out = &mut data[i * other.cols..(i + 1) * other.cols];
            for (k, a) in self.row(i).iter().enumerate() {
                for (o, b) in out.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(Self::from_parts(self.rows, other.cols, data))
    }

    /// Hilbert–Schmidt (Frobenius) norm.
    pub fn hs_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Column-wise concatenation `[m_1 | m_2 | ...]`.
    pub fn hconcat(blocks: &[ComplexMatrix]) -> Result<Self> {
        let Some(first) = blocks.first() else {
            return invalid("cannot concatenate an empty list of matrices");
        };
        let rows = first.rows;
        if blocks.iter().any(|b| b.rows != rows) {
            return invalid("concatenated matrices must share the row count");
        }
        let cols: usize = blocks.iter().map(|b| b.cols).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for b in blocks {
                data.extend_from_slice(b.row(i));
            }
        }
        Ok(Self::from_parts(rows, cols, data))
    }

    pub(crate) fn to_faer(&self) -> Mat<C64> {
        Mat::from_fn(self.rows, self.cols, |i, j| self.get(i, j))
    }

    pub(crate) fn from_faer(m: faer::MatRef<'_, C64>) -> Result<Self> {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }

    /// Text form: a header line `"rows cols"`, then one line per row of
    /// `re+imj` entries separated by single spaces, 17 significant digits.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.rows, self.cols);
        for i in 0..self.rows {
            for (j, z) in self.row(i).iter().enumerate() {
                if j > 0 {
                    out.push(' ');
                }
                write!(out, "{:.16e}{:+.16e}j", z.re, z.im).unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::InvalidInput("empty matrix file".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::InvalidInput(format!("bad header {header:?}: {e}")))?;
        let [rows, cols] = dims[..] else {
            return invalid(format!("header must be \"rows cols\", got {header:?}"));
        };
        let mut data = Vec::with_capacity(rows * cols);
        for (i, line) in lines.enumerate() {
            let before = data.len();
            for token in line.split(' ').filter(|t| !t.is_empty()) {
                data.push(parse_complex(token)?);
            }
            if data.len() - before != cols {
                return invalid(format!("row {i} has {} entries, expected {cols}", data.len() - before));
            }
        }
        Self::new(rows, cols, data)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }
}

fn parse_complex(token: &str) -> Result<C64> {
    let bad = || Error::InvalidInput(format!("malformed complex entry {token:?}"));
    let body = token.strip_suffix('j').ok_or_else(bad)?;
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'))
        .ok_or_else(bad)?;
    let re: f64 = body[..split].parse().map_err(|_| bad())?;
    let im: f64 = body[split..].parse().map_err(|_| bad())?;
    Ok(C64::new(re, im))
}

/// Nonempty, strictly increasing subset of `{0, …, universe-1}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IndexSet {
    universe: usize,
    members: Vec<usize>,
}

impl IndexSet {
    pub fn new(universe: usize, members: Vec<usize>) -> Result<Self> {
        if members.is_empty() {
            return invalid("index set must be nonempty");
        }
        if members.windows(2).any(|w| w[0] >= w[1]) {
            return invalid(format!("index set {members:?} is not strictly increasing"));
        }
        if members[members.len() - 1] >= universe {
            return invalid(format!("index set {members:?} exceeds universe {universe}"));
        }
        Ok(Self { universe, members })
    }

    pub fn full(universe: usize) -> Self {
        assert!(universe >= 1);
        Self { universe, members: (0..universe).collect() }
    }

    pub(crate) fn from_sorted_unchecked(universe: usize, members: Vec<usize>) -> Self {
        debug_assert!(Self::new(universe, members.clone()).is_ok());
        Self { universe, members }
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.binary_search(&i).is_ok()
    }
}

/// Singular values in nonincreasing order.
#[derive(Clone, Debug, PartialEq)]
pub struct SingularSpectrum {
    values: Vec<f64>,
}

impl SingularSpectrum {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn largest(&self) -> f64 {
        self.values[0]
    }
}

/// Largest singular value.
pub fn operator_norm(m: &ComplexMatrix) -> f64 {
    let rows: Vec<usize> = (0..m.rows).collect();
    let cols: Vec<usize> = (0..m.cols).collect();
    block_norm(m, &rows, &cols)
}

pub fn submatrix(m: &ComplexMatrix, rows: &IndexSet, cols: &IndexSet) -> Result<ComplexMatrix> {
    if rows.members().last().is_some_and(|&i| i >= m.rows) {
        return invalid(format!("row set {:?} does not fit {} rows", rows.members(), m.rows));
    }
    if cols.members().last().is_some_and(|&j| j >= m.cols) {
        return invalid(format!("column set {:?} does not fit {} columns", cols.members(), m.cols));
    }
    let mut data = Vec::with_capacity(rows.len() * cols.len());
    for &i in rows.members() {
        for &j in cols.members() {
            data.push(m.get(i, j));
        }
    }
    Ok(ComplexMatrix::from_parts(rows.len(), cols.len(), data))
}

/// Hilbert–Schmidt norm of `m†m − 1`.
pub fn unitarity_defect(m: &ComplexMatrix) -> Result<f64> {
    if !m.is_square() {
        return invalid(format!("unitarity needs a square matrix, got {}x{}", m.rows, m.cols));
    }
    let n = m.rows;
    let mut acc = 0.0;
    for a in 0..n {
        for b in 0..n {
            let mut g = C64::new(0.0, 0.0);
            for i in 0..n {
                g += m.get(i, a).conj() * m.get(i, b);
            }
            if a == b {
                g -= 1.0;
            }
            acc += g.norm_sqr();
        }
    }
    Ok(acc.sqrt())
}

pub fn singular_spectrum(m: &ComplexMatrix) -> SingularSpectrum {
    let k = m.rows.min(m.cols);
    let mut values = if k <= GRAM_EIGEN_MAX_DIM {
        let rows: Vec<usize> = (0..m.rows).collect();
        let cols: Vec<usize> = (0..m.cols).collect();
        let (gram, dim) = block_gram(m, &rows, &cols);
        hermitian_eigenvalues(&gram, dim)
            .into_iter()
            .map(|l| l.max(0.0).sqrt())
            .collect::<Vec<_>>()
    } else {
        m.to_faer()
            .singular_values()
            .expect("SVD failed to converge on a finite matrix")
    };
    values.sort_by(|a, b| b.total_cmp(a));
    SingularSpectrum { values }
}

/// Gram matrix of the block `m(rows, cols)` on its smaller side, row-major.
pub(crate) fn block_gram(m: &ComplexMatrix, rows: &[usize], cols: &[usize]) -> (Vec<C64>, usize) {
    let zero = C64::new(0.0, 0.0);
    if cols.len() <= rows.len() {
        let k = cols.len();
        let mut g = vec![zero; k * k];
        for &i in rows {
            let r = m.row(i);
            for a in 0..k {
                let ca = r[cols[a]].conj();
                for b in a..k {
                    g[a * k + b] += ca * r[cols[b]];
                }
            }
        }
        mirror_upper(&mut g, k);
        (g, k)
    } else {
        let k = rows.len();
        let mut g = vec![zero; k * k];
        for a in 0..k {
            let ra = m.row(rows[a]);
            for b in a..k {
                let rb = m.row(rows[b]);
                let mut s = zero;
                for &j in cols {
                    s += ra[j] * rb[j].conj();
                }
                g[a * k + b] = s;
            }
        }
        mirror_upper(&mut g, k);
        (g, k)
    }
}

fn mirror_upper(g: &mut [C64], k: usize) {
    for a in 0..k {
        g[a * k + a].im = 0.0;
        for b in 0..a {
            g[a * k + b] = g[b * k + a].conj();
        }
    }
}

/// Operator norm of `m(rows, cols)` without materializing the block.
pub(crate) fn block_norm(m: &ComplexMatrix, rows: &[usize], cols: &[usize]) -> f64 {
    if rows.len().min(cols.len()) > GRAM_EIGEN_MAX_DIM {
        let sub = ComplexMatrix::from_parts(
            rows.len(),
            cols.len(),
            rows.iter().flat_map(|&i| cols.iter().map(move |&j| m.get(i, j))).collect(),
        );
        return sub
            .to_faer()
            .singular_values()
            .expect("SVD failed to converge on a finite matrix")[0];
    }
    let (g, k) = block_gram(m, rows, cols);
    hermitian_max_eigenvalue(&g, k).max(0.0).sqrt()
}

/// Squared Hilbert–Schmidt norm of `m(rows, cols)`.
pub(crate) fn block_hs_sq(m: &ComplexMatrix, rows: &[usize], cols: &[usize]) -> f64 {
    rows.iter()
        .map(|&i| {
            let r = m.row(i);
            cols.iter().map(|&j| r[j].norm_sqr()).sum::<f64>()
        })
        .sum()
}

pub(crate) fn hermitian_max_eigenvalue(g: &[C64], k: usize) -> f64 {
    match k {
        1 => g[0].re,
        2 => {
            let (a, d) = (g[0].re, g[3].re);
            let half = 0.5 * (a - d);
            0.5 * (a + d) + half.hypot(g[1].norm())
        }
        _ => *hermitian_eigenvalues(g, k).last().unwrap(),
    }
}

/// Eigenvalues of a Hermitian row-major matrix, nondecreasing.
pub(crate) fn hermitian_eigenvalues(g: &[C64], k: usize) -> Vec<f64> {
    match k {
        1 => vec![g[0].re],
        2 => {
            let (a, d) = (g[0].re, g[3].re);
            let mid = 0.5 * (a + d);
            let rad = (0.5 * (a - d)).hypot(g[1].norm());
            vec![mid - rad, mid + rad]
        }
        _ => Mat::from_fn(k, k, |i, j| g[i * k + j])
            .self_adjoint_eigenvalues(Side::Lower)
            .expect("Hermitian eigensolver failed on a finite matrix"),
    }
}

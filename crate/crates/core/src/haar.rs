//! Reproducible sampling of Haar unitaries, Ginibre matrices and uniformly
//! random pure states.
//!
//! Randomness is addressed rather than consumed: an [`RngStream`] is a root
//! seed plus a path of integers (experiment, trial, draw, ...). The path is
//! hashed with SHA-256 into the key of a ChaCha8 generator, so any stream
//! can be regenerated in isolation, in any order, on any number of threads.

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{invalid, Result};
use crate::matrix::{ComplexMatrix, C64};

/// Recorded in run headers so archived seeds stay interpretable.
pub const GAUSSIAN_METHOD: &str =
    "sha256(root_seed,path)->chacha8; complex normal via Box-Muller: sqrt(-ln u1)*exp(2*pi*i*u2), u=(k+1)/2^53";

const STREAM_DOMAIN: &[u8] = b"eur-lab/rng-stream/v1";

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub root_seed: u64,
    pub path: Vec<u64>,
}

impl RngStream {
    pub fn new(root_seed: u64, path: impl Into<Vec<u64>>) -> Self {
        Self { root_seed, path: path.into() }
    }

    /// The stream one level below this one.
    pub fn child(&self, index: u64) -> Self {
        let mut path = self.path.clone();
        path.push(index);
        Self { root_seed: self.root_seed, path }
    }

    pub fn generator(&self) -> StreamRng {
        let mut hasher = Sha256::new();
        hasher.update(STREAM_DOMAIN);
        hasher.update(self.root_seed.to_le_bytes());
        hasher.update((self.path.len() as u64).to_le_bytes());
        for p in &self.path {
            hasher.update(p.to_le_bytes());
        }
        let digest = hasher.finalize();
        let mut key = [0u8; 32];
        key.copy_from_slice(&digest[..]);
        StreamRng { inner: ChaCha8Rng::from_seed(key) }
    }
}

/// Generator bound to one stream.
pub struct StreamRng {
    inner: ChaCha8Rng,
}

impl StreamRng {
    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on (0, 1], 53-bit resolution.
    pub fn uniform_open0(&mut self) -> f64 {
        ((self.inner.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform index in `0..n` (rejection sampling, no modulo bias).
    pub fn index(&mut self, n: usize) -> usize {
        assert!(n > 0);
        let n = n as u64;
        let zone = u64::MAX - (u64::MAX % n);
        loop {
            let x = self.inner.next_u64();
            if x < zone {
                return (x % n) as usize;
            }
        }
    }

    /// Standard complex Gaussian: independent real and imaginary parts with
    /// mean 0 and variance 1/2, so `E|z|^2 = 1` and `|z|^2 ~ Exp(1)`.
    pub fn complex_normal(&mut self) -> C64 {
        let u1 = self.uniform_open0();
        let u2 = self.uniform_open0();
        C64::from_polar((-u1.ln()).sqrt(), 2.0 * std::f64::consts::PI * u2)
    }

    /// Uniformly random `k`-subset of `0..n`, sorted.
    pub fn subset(&mut self, n: usize, k: usize) -> Vec<usize> {
        assert!(k <= n);
        let mut pool: Vec<usize> = (0..n).collect();
        for i in 0..k {
            let j = i + self.index(n - i);
            pool.swap(i, j);
        }
        let mut out = pool[..k].to_vec();
        out.sort_unstable();
        out
    }
}

/// Unit vector in `C^N`.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
}

impl PureState {
    pub const NORM_TOLERANCE: f64 = 1e-10;

    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return invalid("pure state must have dimension at least 1");
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return invalid("pure state has non-finite amplitudes");
        }
        let norm = norm(&amplitudes);
        if (norm - 1.0).abs() > Self::NORM_TOLERANCE {
            return invalid(format!("pure state has norm {norm}, expected 1"));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(mut amplitudes: Vec<C64>) -> Result<Self> {
        let n = norm(&amplitudes);
        if !(n.is_finite() && n > 0.0) {
            return invalid("cannot normalize a zero or non-finite vector");
        }
        for z in &mut amplitudes {
            *z /= n;
        }
        Self::new(amplitudes)
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return invalid(format!("basis index {index} out of range for dimension {dim}"));
        }
        let mut v = vec![C64::new(0.0, 0.0); dim];
        v[index] = C64::new(1.0, 0.0);
        Self::new(v)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }
}

pub(crate) fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn sample_ginibre(stream: &RngStream, rows: usize, cols: usize) -> Result<ComplexMatrix> {
    if rows == 0 || cols == 0 {
        return invalid(format!("Ginibre shape {rows}x{cols} has a zero dimension"));
    }
    let mut rng = stream.generator();
    let data = (0..rows * cols).map(|_| rng.complex_normal()).collect();
    ComplexMatrix::new(rows, cols, data)
}

/// Haar-distributed `n x n` unitary: QR of a Ginibre draw with the phases
/// of the triangular factor's diagonal moved into `Q`, which makes the
/// law exactly invariant.
pub fn sample_haar_unitary(stream: &RngStream, n: usize) -> Result<ComplexMatrix> {
    if n == 0 {
        return invalid("Haar unitary of dimension 0");
    }
    let g = sample_ginibre(stream, n, n)?.to_faer();
    let qr = g.qr();
    let r = qr.R();
    let mut q = qr.compute_Q();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    ComplexMatrix::from_faer(q.as_ref())
}

/// Uniform on the unit sphere of `C^n` (a normalized Ginibre column).
pub fn sample_pure_state(stream: &RngStream, n: usize) -> Result<PureState> {
    if n == 0 {
        return invalid("pure state of dimension 0");
    }
    let mut rng = stream.generator();
    PureState::normalized((0..n).map(|_| rng.complex_normal()).collect())
}

//! Upper values for `min_ψ Σ_i H(p^(ψ,i))` by projected gradient descent on
//! the unit sphere.
//!
//! The returned value is the entropy sum at an explicit state, so it is a
//! rigorous upper bound on the minimum; global optimality is not claimed.

use rayon::prelude::*;

use crate::bounds::{measurement_distribution, shannon_entropy};
use crate::error::{invalid, Result};
use crate::haar::{norm, sample_pure_state, PureState, RngStream};
use crate::matrix::{unitarity_defect, ComplexMatrix, C64};

/// `ln p` is evaluated at `max(p, LOG_FLOOR)`, i.e. never below about -690.
pub const LOG_FLOOR: f64 = 1e-300;
/// Probabilities below this mark the gradient as a clamped subgradient.
pub const SMOOTH_FLOOR: f64 = 1e-12;
pub const ARMIJO: f64 = 1e-4;
/// Iterations over which the value must drop by `tol_value`.
pub const STALL_WINDOW: usize = 20;
const MIN_STEP: f64 = 1e-18;

#[derive(Clone, Debug)]
pub struct MinimizeOptions {
    pub restarts: usize,
    pub max_iterations: usize,
    pub step_init: f64,
    pub tol_gradient: f64,
    pub tol_value: f64,
    pub rng: RngStream,
    pub include_basis_states: bool,
}

impl MinimizeOptions {
    pub fn new(rng: RngStream) -> Self {
        Self {
            restarts: 32,
            max_iterations: 1000,
            step_init: 0.5,
            tol_gradient: 1e-10,
            tol_value: 1e-9,
            rng,
            include_basis_states: true,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return invalid("minimizer needs at least one restart");
        }
        if !(self.tol_gradient > 0.0 && self.tol_value > 0.0 && self.step_init > 0.0) {
            return invalid("minimizer tolerances and initial step must be positive");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MinimizeResult {
    /// Entropy sum at `state`; an upper value on the minimum.
    pub value: f64,
    pub state: PureState,
    pub iterations_used: usize,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EntropyGradient {
    /// Tangent-space gradient (orthogonal to `ψ`).
    pub vector: Vec<C64>,
    /// Some probability fell below the smooth range and `ln p` was clamped.
    pub clamped: bool,
}

fn check_inputs(us: &[ComplexMatrix], dim: usize) -> Result<()> {
    if us.is_empty() {
        return invalid("need at least one measurement");
    }
    for (i, u) in us.iter().enumerate() {
        if !u.is_square() || u.rows() != dim {
            return invalid(format!("measurement {i} is {}x{}, expected {dim}x{dim}", u.rows(), u.cols()));
        }
    }
    Ok(())
}

/// `F(ψ) = Σ_i H(p^(ψ,i))`.
pub fn entropy_sum(us: &[ComplexMatrix], psi: &PureState) -> Result<f64> {
    check_inputs(us, psi.dim())?;
    us.iter().map(|u| measurement_distribution(u, psi).map(|p| shannon_entropy(&p))).sum()
}

/// Overlaps `⟨u_j|ψ⟩` for all columns of `u`.
fn overlaps(u: &ComplexMatrix, psi: &[C64]) -> Vec<C64> {
    let mut a = vec![C64::new(0.0, 0.0); u.cols()];
    for (i, x) in psi.iter().enumerate() {
        for (aj, uij) in a.iter_mut().zip(u.row(i)) {
            *aj += uij.conj() * x;
        }
    }
    a
}

/// Unnormalized entropy sum, used during the descent where `ψ` is kept
/// normalized by construction.
fn value_at(us: &[ComplexMatrix], psi: &[C64]) -> f64 {
    let mut total = 0.0;
    for u in us {
        for a in overlaps(u, psi) {
            let p = a.norm_sqr();
            if p > 0.0 {
                total -= p * p.ln();
            }
        }
    }
    total
}

fn gradient_at(us: &[ComplexMatrix], psi: &[C64]) -> EntropyGradient {
    let n = psi.len();
    let mut g = vec![C64::new(0.0, 0.0); n];
    let mut clamped = false;
    for u in us {
        let a = overlaps(u, psi);
        // coefficient of column j: -2 (1 + ln p_j) ⟨u_j|ψ⟩
        let coef: Vec<C64> = a
            .iter()
            .map(|aj| {
                let p = aj.norm_sqr();
                clamped |= p < SMOOTH_FLOOR;
                aj * (-2.0 * (1.0 + p.max(LOG_FLOOR).ln()))
            })
            .collect();
        for (gi, i) in g.iter_mut().zip(0..n) {
            *gi += u.row(i).iter().zip(&coef).map(|(uij, c)| uij * c).sum::<C64>();
        }
    }
    let overlap: C64 = psi.iter().zip(&g).map(|(x, y)| x.conj() * y).sum();
    for (gi, x) in g.iter_mut().zip(psi) {
        *gi -= overlap * x;
    }
    EntropyGradient { vector: g, clamped }
}

/// Gradient of `F` with respect to the real coordinates of `ψ` (packed as a
/// complex vector), projected onto the tangent space at `ψ`.
pub fn entropy_gradient(us: &[ComplexMatrix], psi: &PureState) -> Result<EntropyGradient> {
    check_inputs(us, psi.dim())?;
    Ok(gradient_at(us, psi.amplitudes()))
}

struct Descent {
    value: f64,
    state: Vec<C64>,
    iterations: usize,
    converged: bool,
}

fn descend(us: &[ComplexMatrix], start: Vec<C64>, opts: &MinimizeOptions) -> Descent {
    let mut psi = start;
    let mut f = value_at(us, &psi);
    let mut history = vec![f];
    for it in 0..opts.max_iterations {
        let g = gradient_at(us, &psi).vector;
        let gn2: f64 = g.iter().map(|z| z.norm_sqr()).sum();
        if gn2.sqrt() <= opts.tol_gradient {
            return Descent { value: f, state: psi, iterations: it, converged: true };
        }
        let mut t = opts.step_init;
        let accepted = loop {
            let mut cand: Vec<C64> = psi.iter().zip(&g).map(|(x, d)| x - d * t).collect();
            let nc = norm(&cand);
            for z in &mut cand {
                *z /= nc;
            }
            let fc = value_at(us, &cand);
            if fc <= f - ARMIJO * t * gn2 {
                break Some((cand, fc));
            }
            t *= 0.5;
            if t < MIN_STEP {
                break None;
            }
        };
        match accepted {
            Some((cand, fc)) => {
                psi = cand;
                f = fc;
            }
            None => return Descent { value: f, state: psi, iterations: it + 1, converged: true },
        }
        history.push(f);
        if history.len() > STALL_WINDOW && history[history.len() - 1 - STALL_WINDOW] - f <= opts.tol_value {
            return Descent { value: f, state: psi, iterations: it + 1, converged: true };
        }
    }
    Descent { value: f, state: psi, iterations: opts.max_iterations, converged: false }
}

/// Multi-restart descent from random states and, optionally, from every
/// basis vector of every measurement. Restarts run in parallel; the best
/// value wins with ties broken by start order.
pub fn minimize_entropy_sum(us: &[ComplexMatrix], opts: &MinimizeOptions) -> Result<MinimizeResult> {
    opts.validate()?;
    let dim = us.first().map(|u| u.rows()).unwrap_or(0);
    check_inputs(us, dim)?;
    for (i, u) in us.iter().enumerate() {
        let d = unitarity_defect(u)?;
        if d > crate::search::UNITARY_TOLERANCE {
            return invalid(format!("measurement {i} is not unitary (defect {d:e})"));
        }
    }
    let mut starts: Vec<Vec<C64>> = (0..opts.restarts)
        .map(|r| sample_pure_state(&opts.rng.child(r as u64), dim).map(PureState::into_amplitudes))
        .collect::<Result<_>>()?;
    if opts.include_basis_states {
        for u in us {
            for j in 0..dim {
                starts.push(u.column(j));
            }
        }
    }
    let runs: Vec<Descent> = starts.into_par_iter().map(|s| descend(us, s, opts)).collect();
    let best = runs
        .into_iter()
        .reduce(|best, d| if d.value < best.value { d } else { best })
        .expect("at least one start");
    let state = PureState::normalized(best.state)?;
    // certificate: the reported value is recomputed at the returned state
    let value = entropy_sum(us, &state)?;
    Ok(MinimizeResult { value, state, iterations_used: best.iterations, converged: best.converged })
}

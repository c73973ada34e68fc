//! One trial of each registered suite.

use super::{Experiment, ExperimentConfig, Stat};
use crate::asymptotics::{one_column_scale, sk_envelope};
use crate::bounds::{coles_piani, largest_two_moduli, maassen_uffink, measurement_distribution, multi_measurement_bound, shannon_entropy, BoundReport};
use crate::error::Result;
use crate::haar::{sample_haar_unitary, sample_pure_state, RngStream};
use crate::matrix::ComplexMatrix;
use crate::minimizer::{minimize_entropy_sum, MinimizeOptions};
use crate::search::{binomial, column_subvector_norms, max_submatrix_norm, multi_measurement_profile, s_profile, SearchBudget};

/// Tolerance for counting a lower bound above the minimizer value.
pub(crate) const VIOLATION_TOL: f64 = 1e-6;

/// Fixed blocks measured by `fixed-block-law`.
pub(crate) const FIXED_BLOCKS: [(usize, usize); 4] = [(1, 1), (1, 2), (2, 1), (2, 2)];
/// Blocks whose spread `concentration` records.
pub(crate) const CONCENTRATION_BLOCKS: [(usize, usize); 3] = [(1, 1), (1, 4), (2, 2)];
/// Subvector lengths for `harmonic`, clipped to `N - 1`.
pub(crate) const HARMONIC_LENGTHS: [usize; 3] = [1, 4, 16];
/// Relative band for `one-column-law`.
pub(crate) const ONE_COLUMN_BAND: (f64, f64) = (0.8, 1.2);

pub(crate) fn min_dim(e: Experiment) -> usize {
    match e {
        Experiment::MuAsymptotics | Experiment::CpAsymptotics => 3,
        Experiment::HqCeiling => 4,
        Experiment::Jones => 1,
        Experiment::Concentration => 4,
        _ => 2,
    }
}

fn budget(cfg: &ExperimentConfig, rng: RngStream) -> SearchBudget {
    SearchBudget { max_enumerations: cfg.enum_budget, restarts: cfg.restarts, max_swaps: cfg.max_swaps, rng }
}

fn fits(cfg: &ExperimentConfig, rows: usize, n: usize, cols: usize, m: usize) -> bool {
    n == 1 || m == 1 || binomial(rows, n).saturating_mul(binomial(cols, m)) <= cfg.enum_budget as u128
}

/// Whether every search the suite performs at dimension `n` is exhaustive.
pub(crate) fn certifiable(cfg: &ExperimentConfig, n: usize) -> bool {
    match cfg.experiment {
        Experiment::FixedBlockLaw => FIXED_BLOCKS.iter().all(|&(a, b)| a > n || b > n || fits(cfg, n, a, n, b)),
        Experiment::MultiMeasurement => (2..=cfg.l * n).all(|k1| fits(cfg, n, n, cfg.l * n, k1)),
        _ => (2..=n).all(|a| (2..=n + 1 - a).all(|b| fits(cfg, n, a, n, b))),
    }
}

fn minimizer(us: &[ComplexMatrix], rng: RngStream) -> Result<f64> {
    Ok(minimize_entropy_sum(us, &MinimizeOptions::new(rng))?.value)
}

pub(crate) fn run(cfg: &ExperimentConfig, n: usize, stream: RngStream) -> Result<Vec<Stat>> {
    let unitary = || sample_haar_unitary(&stream.child(0), n);
    let search_rng = stream.child(1);
    let minimizer_rng = stream.child(2);
    let mut out = Vec::new();
    match cfg.experiment {
        Experiment::MuAsymptotics => {
            let u = unitary()?;
            out.push(Stat::exact("b_mu", maassen_uffink(&u)?));
        }
        Experiment::CpAsymptotics => {
            let u = unitary()?;
            let (c, c2) = largest_two_moduli(&u)?;
            out.push(Stat::exact("b_cp", coles_piani(&u)?));
            out.push(Stat::exact("c", c));
            out.push(Stat::exact("c2", c2));
        }
        Experiment::HqCeiling => {
            let u = unitary()?;
            let s = s_profile(&u, &budget(cfg, search_rng))?;
            let report = BoundReport::for_pair(&u, &s)?;
            out.push(Stat::flagged("h_q", report.h_q, s.is_certified()));
        }
        Experiment::Harmonic => {
            // A Haar column is a uniformly random unit vector.
            let psi = sample_pure_state(&stream.child(0), n)?;
            let mut sq: Vec<f64> = psi.amplitudes().iter().map(|a| a.norm_sqr()).collect();
            sq.sort_by(|a, b| b.total_cmp(a));
            let mut lengths: Vec<usize> = HARMONIC_LENGTHS.iter().copied().filter(|&l| l < n).collect();
            lengths.push(n - 1);
            lengths.dedup();
            for l in lengths {
                out.push(Stat::exact(format!("sq_norm_n{l}"), sq[..l].iter().sum()));
            }
        }
        Experiment::OneColumnLaw => {
            let u = unitary()?;
            let norms = column_subvector_norms(&u);
            let mut in_band = true;
            for (i, &v) in norms.iter().enumerate() {
                let ratio = v / one_column_scale(i as u64 + 1, n as u64)?;
                in_band &= ratio >= ONE_COLUMN_BAND.0 && ratio <= ONE_COLUMN_BAND.1;
                out.push(Stat::exact(format!("norm_n{}", i + 1), v));
            }
            out.push(Stat::exact("in_band", f64::from(u8::from(in_band))));
        }
        Experiment::FixedBlockLaw | Experiment::Concentration => {
            let u = unitary()?;
            let blocks: &[(usize, usize)] =
                if cfg.experiment == Experiment::FixedBlockLaw { &FIXED_BLOCKS } else { &CONCENTRATION_BLOCKS };
            for (idx, &(a, b)) in blocks.iter().enumerate() {
                if a > n || b > n {
                    continue;
                }
                let r = max_submatrix_norm(&u, a, b, &budget(cfg, search_rng.child(idx as u64)))?;
                out.push(Stat::flagged(format!("norm_{a}x{b}"), r.value, r.certified));
            }
        }
        Experiment::SkEnvelope => {
            let u = unitary()?;
            let s = s_profile(&u, &budget(cfg, search_rng))?;
            let mut violations = 0usize;
            for (i, e) in s.entries().iter().enumerate() {
                let k = i + 1;
                if e.value > sk_envelope(k as u64, n as u64)? {
                    violations += 1;
                }
                out.push(Stat::flagged(format!("s_{k}"), e.value, e.certified));
            }
            out.push(Stat::flagged("violations", violations as f64, s.is_certified()));
        }
        Experiment::BoundDuel => {
            let u = unitary()?;
            let s = s_profile(&u, &budget(cfg, search_rng))?;
            let cert = s.is_certified();
            let mut report = BoundReport::for_pair(&u, &s)?;
            let upper = minimizer(&[ComplexMatrix::identity(n), u], minimizer_rng)?;
            report.min_upper = Some(upper);
            out.push(Stat::exact("b_mu", report.b_mu));
            out.push(Stat::exact("b_cp", report.b_cp));
            out.push(Stat::flagged("h_q", report.h_q, cert));
            out.push(Stat::flagged("strong", report.strong, cert));
            out.push(Stat::exact("min_upper", upper));
            out.push(Stat::exact("ln_n_minus_upper", (n as f64).ln() - upper));
            out.push(Stat::flagged("violations", report.violations(VIOLATION_TOL).len() as f64, cert));
        }
        Experiment::MultiMeasurement => {
            let l = cfg.l;
            let mut us = vec![ComplexMatrix::identity(n)];
            for i in 1..l {
                us.push(sample_haar_unitary(&stream.child(0).child(i as u64), n)?);
            }
            let s = multi_measurement_profile(&us, &budget(cfg, search_rng))?;
            let cert = s.is_certified();
            let bound = multi_measurement_bound(&s)?;
            let upper = minimizer(&us, minimizer_rng)?;
            // Smallest constant for which the envelope covers every sqrt(S_k).
            let mut cg_required = 0.0f64;
            for (k, e) in s.entries().iter().enumerate() {
                let excess = (e.value.sqrt() - 1.0).max(0.0);
                let k1 = (k + 1) as f64;
                let scale = k1 / n as f64 * (std::f64::consts::E * (n * l) as f64 / k1).ln();
                cg_required = cg_required.max(excess * excess / scale);
            }
            let lf = l as f64;
            out.push(Stat::flagged("multi_bound", bound, cert));
            out.push(Stat::exact("min_upper", upper));
            out.push(Stat::flagged("bound_per_measurement", bound / lf, cert));
            out.push(Stat::exact("avg_entropy", upper / lf));
            out.push(Stat::exact("reference", (lf - 1.0) / lf * (n as f64).ln()));
            out.push(Stat::flagged("violations", f64::from(u8::from(bound > upper + VIOLATION_TOL)), cert));
            out.push(Stat::flagged("cg_required", cg_required, cert));
        }
        Experiment::Jones => {
            let psi = sample_pure_state(&stream.child(0), n)?;
            let p = measurement_distribution(&ComplexMatrix::identity(n), &psi)?;
            out.push(Stat::exact("entropy", shannon_entropy(&p)));
        }
    }
    Ok(out)
}

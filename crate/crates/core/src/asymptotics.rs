//! Closed-form predictions and numerical constants for the large-`N`
//! behaviour of Haar unitaries: harmonic and digamma formulas, norm scaling
//! laws, the `s_k` envelope, and the explicit probability vector `r` whose
//! entropy gives the `ln N - 3.49` lower bound.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::bounds::ProbVector;
use crate::error::{invalid, Error, Result};
use crate::quadrature::integrate;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
/// Constant in the high-probability envelope of `s_k`.
pub const C_F: f64 = 4.18;
/// Proven gap in `min_ψ (H(p) + H(q)) ≥ ln N - C_A`.
pub const C_A: f64 = 3.49;
/// Best known upper gap: typical minima sit below `ln N - 0.42`.
pub const SANDWICH_UPPER_GAP: f64 = 0.42;
/// Splits with `k + 1 ≤ N / D` are covered by the expectation bound.
pub const D_SPLIT: f64 = 4.175;
/// Upper limit of the integral bounding the entropy gap (just above `x*`).
pub const GAP_INTEGRAL_UPPER: f64 = 0.052;
/// Reference values the computed constants are checked against.
pub const XSTAR_REFERENCE: f64 = 0.051;
pub const GAP_INTEGRAL_REFERENCE: f64 = 3.488;
pub const EPSILON_REFERENCE: f64 = 0.039;
pub const OBJECTIVE_MIN_REFERENCE: f64 = 4.172;

/// Above this, harmonic numbers use the asymptotic expansion.
pub const HARMONIC_EXACT_MAX: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NamedConstant {
    pub name: &'static str,
    pub symbol: &'static str,
    pub value: f64,
    pub location: &'static str,
}

/// Every named constant with a short description of where it enters.
pub fn constants_table() -> Vec<NamedConstant> {
    vec![
        NamedConstant { name: "euler_gamma", symbol: "γ", value: EULER_GAMMA, location: "harmonic numbers and digamma, Ψ(N+1) = H_N - γ" },
        NamedConstant { name: "c_f", symbol: "C_f", value: C_F, location: "high-probability envelope of the s_k coefficients" },
        NamedConstant { name: "c_a", symbol: "C_a", value: C_A, location: "entropy-sum lower bound ln N - C_a for random bases" },
        NamedConstant { name: "sandwich_upper_gap", symbol: "0.42", value: SANDWICH_UPPER_GAP, location: "upper side of the sandwich relation for the minimal entropy sum" },
        NamedConstant { name: "d_split", symbol: "D", value: D_SPLIT, location: "range k+1 <= N/D of the per-split expectation bound" },
        NamedConstant { name: "gap_integral_upper", symbol: "0.052", value: GAP_INTEGRAL_UPPER, location: "upper limit of the integral bounding limsup A_N" },
        NamedConstant { name: "xstar_reference", symbol: "x*", value: XSTAR_REFERENCE, location: "root of C_f x (1 + ln(2/x)) = 1, limit of N_0/N" },
        NamedConstant { name: "gap_integral_reference", symbol: "lim A", value: GAP_INTEGRAL_REFERENCE, location: "value of the integral bounding limsup A_N" },
        NamedConstant { name: "epsilon_reference", symbol: "ε", value: EPSILON_REFERENCE, location: "net parameter minimizing the expectation-bound objective" },
        NamedConstant { name: "objective_min_reference", symbol: "4.172", value: OBJECTIVE_MIN_REFERENCE, location: "minimum of the expectation-bound objective at D = 4.175" },
    ]
}

pub fn constants_json() -> serde_json::Value {
    serde_json::json!({ "schema": 1, "constants": constants_table() })
}

/// A formula evaluated at concrete arguments, with the constants it used.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsymptoticPrediction {
    pub name: String,
    pub formula_value: f64,
    pub constants_used: BTreeMap<String, f64>,
}

impl AsymptoticPrediction {
    pub fn new(name: impl Into<String>, formula_value: f64, constants_used: &[(&str, f64)]) -> Result<Self> {
        let name = name.into();
        if !formula_value.is_finite() {
            return Err(Error::Numerical(format!("prediction {name} is not finite")));
        }
        let constants_used = constants_used.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        Ok(Self { name, formula_value, constants_used })
    }
}

fn need(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        invalid(msg())
    }
}

fn harmonic_asymptotic(m: f64) -> f64 {
    // next term is 1/(120 m^4) < 1e-25 for m > 1e6
    m.ln() + EULER_GAMMA + 0.5 / m - 1.0 / (12.0 * m * m)
}

fn harmonic_exact(m: u64) -> f64 {
    // smallest terms first
    (1..=m).rev().map(|j| 1.0 / j as f64).sum()
}

/// `H_m = Σ_{j≤m} 1/j`; summed exactly up to 10⁶, asymptotic beyond with
/// error below 1e-12.
pub fn harmonic_number(m: u64) -> Result<f64> {
    need(m >= 1, || "harmonic number needs m >= 1".into())?;
    Ok(if m <= HARMONIC_EXACT_MAX { harmonic_exact(m) } else { harmonic_asymptotic(m as f64) })
}

/// `H_b - H_a` for `a ≤ b`, without cancellation when both are summed.
fn harmonic_difference(a: u64, b: u64) -> Result<f64> {
    if b <= HARMONIC_EXACT_MAX {
        Ok((a + 1..=b).rev().map(|j| 1.0 / j as f64).sum())
    } else {
        let ha = if a == 0 { 0.0 } else { harmonic_number(a)? };
        Ok(harmonic_number(b)? - ha)
    }
}

/// Mean of the largest squared norm of an `n`-subvector of one Haar column,
/// `(n/N)(1 + H_N - H_n)`.
pub fn expected_subvector_norm_sq(n: u64, dim: u64) -> Result<f64> {
    need(n >= 1 && n <= dim, || format!("need 1 <= n <= N, got n={n}, N={dim}"))?;
    Ok(n as f64 / dim as f64 * (1.0 + harmonic_difference(n, dim)?))
}

/// Mean of the `m`-th largest squared modulus of a Haar column,
/// `(1/N)(H_N - H_{m-1})`.
pub fn expected_ordered_modulus_sq(m: u64, dim: u64) -> Result<f64> {
    need(m >= 1 && m <= dim, || format!("need 1 <= m <= N, got m={m}, N={dim}"))?;
    Ok(harmonic_difference(m - 1, dim)? / dim as f64)
}

/// `Ψ(z)` for `z > 0` by upward recurrence to `z ≥ 10` and the asymptotic
/// series; absolute error below 1e-13.
pub fn digamma(z: f64) -> Result<f64> {
    need(z.is_finite() && z > 0.0, || format!("digamma needs a positive argument, got {z}"))?;
    let (mut x, mut acc) = (z, 0.0);
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let x2 = 1.0 / (x * x);
    let series = x2 * (1.0 / 12.0 - x2 * (1.0 / 120.0 - x2 * (1.0 / 252.0 - x2 * (1.0 / 240.0 - x2 / 132.0))));
    Ok(acc + x.ln() - 0.5 / x - series)
}

/// Mean entropy of the outcome distribution of a uniformly random pure
/// state, `Ψ(N+1) - Ψ(2)` (equal to `H_N - 1`).
pub fn jones_mean_entropy(dim: u64) -> Result<f64> {
    need(dim >= 1, || "dimension must be at least 1".into())?;
    Ok(digamma(dim as f64 + 1.0)? - digamma(2.0)?)
}

/// Typical size of the largest entry modulus, `√(2 ln N / N)`.
pub fn jiang_scale(dim: u64) -> Result<f64> {
    need(dim >= 2, || "scale needs N >= 2".into())?;
    let n = dim as f64;
    Ok((2.0 * n.ln() / n).sqrt())
}

/// Typical `‖Û^(n,m)‖` for fixed `n, m`: `√((n+m) ln N / N)`.
pub fn fixed_block_scale(n: u64, m: u64, dim: u64) -> Result<f64> {
    need(dim >= 2 && n >= 1 && m >= 1 && n <= dim && m <= dim, || format!("bad block {n}x{m} for N={dim}"))?;
    let d = dim as f64;
    Ok(((n + m) as f64 * d.ln() / d).sqrt())
}

/// Typical `‖Û^(n,1)‖`: `√(((n+1)/N)(1 + ln(N/n)))`.
pub fn one_column_scale(n: u64, dim: u64) -> Result<f64> {
    need(dim >= 2 && n >= 1 && n <= dim, || format!("bad subvector length {n} for N={dim}"))?;
    let (n, d) = (n as f64, dim as f64);
    Ok(((n + 1.0) / d * (1.0 + (d / n).ln())).sqrt())
}

/// High-probability envelope `√(C_f ((k+1)/N)(1 + ln(2N/(k+1))))` for `s_k`.
pub fn sk_envelope(k: u64, dim: u64) -> Result<f64> {
    need(k >= 1 && k <= dim, || format!("need 1 <= k <= N, got k={k}, N={dim}"))?;
    let (k1, d) = ((k + 1) as f64, dim as f64);
    Ok((C_F * k1 / d * (1.0 + (2.0 * d / k1).ln())).sqrt())
}

/// `C_f x (1 + ln(2/x)) - 1`, increasing on (0, 2).
pub fn xstar_residual(x: f64) -> f64 {
    C_F * x * (1.0 + (2.0 / x).ln()) - 1.0
}

/// Root `x*` of `C_f x (1 + ln(2/x)) = 1` on (0, 1) by bisection.
pub fn solve_xstar() -> f64 {
    let (mut lo, mut hi) = (1e-12, 1.0);
    while hi - lo > 1e-15 {
        let mid = 0.5 * (lo + hi);
        if xstar_residual(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `g(x) = √C_f ln(2/x) / (2 √(x ln(2e/x)))`, the continuum limit of
/// `N r_i` at `x = i/N`.
pub fn gap_density(x: f64) -> f64 {
    C_F.sqrt() * (2.0 / x).ln() / (2.0 * (x * (1.0 + (2.0 / x).ln())).sqrt())
}

/// `g(x) ln g(x)`, the integrand bounding the entropy gap.
pub fn gap_integrand(x: f64) -> f64 {
    let g = gap_density(x);
    g * g.ln()
}

/// `∫_0^{0.052} g ln g dx` with requested absolute tolerance.
pub fn gap_integral_with_tol(tol: f64) -> Result<f64> {
    // x = t², dx = 2t dt removes the 1/√x singularity; a log factor remains
    let upper = GAP_INTEGRAL_UPPER.sqrt();
    let q = integrate(|t| if t > 0.0 { 2.0 * t * gap_integrand(t * t) } else { 0.0 }, 0.0, upper, tol, 10_000)?;
    Ok(q.value)
}

/// The integral bounding `limsup A_N`, about 3.488.
pub fn gap_integral() -> Result<f64> {
    gap_integral_with_tol(1e-6)
}

/// The probability vector `r` together with its cutoff `N_0`.
#[derive(Clone, Debug, PartialEq)]
pub struct RVector {
    pub probabilities: ProbVector,
    /// Index of the last coordinate given by the closed form; the remainder
    /// follows it. Zero when `m_1 > 1` and the construction degenerates.
    pub cutoff: usize,
}

/// `m_1 = √(C_f (2/N)(1 + ln N))`.
pub fn r_vector_head(dim: u64) -> f64 {
    let d = dim as f64;
    (C_F * 2.0 / d * (1.0 + d.ln())).sqrt()
}

/// `r_i = (1/N) √C_f ln(2N/i) / (2 √((i/N)(ln(2N/i) + 1)))` for `i ≥ 2`.
pub fn r_vector_term(i: u64, dim: u64) -> f64 {
    gap_density(i as f64 / dim as f64) / dim as f64
}

/// Builds `r = (m_1, r_2, ..., r_{N_0}, remainder)`, where `N_0` is the
/// largest index with `m_1 + r_2 + ... + r_{N_0} ≤ 1`.
///
/// For small `N` (about `N < 41`) already `m_1 > 1`; no such index exists and
/// the trivial vector `(1)` is returned, whose entropy 0 is still a valid
/// lower bound.
pub fn r_vector_construction(dim: u64) -> Result<RVector> {
    need(dim >= 4, || format!("r-vector needs N >= 4, got {dim}"))?;
    let m1 = r_vector_head(dim);
    if m1 > 1.0 {
        return Ok(RVector { probabilities: ProbVector::distribution(vec![1.0])?, cutoff: 0 });
    }
    let mut r = vec![m1];
    let mut sum = m1;
    for i in 2..=dim {
        let t = r_vector_term(i, dim);
        if sum + t > 1.0 {
            break;
        }
        sum += t;
        r.push(t);
    }
    let cutoff = r.len();
    r.push((1.0 - sum).max(0.0));
    Ok(RVector { probabilities: ProbVector::distribution(r)?, cutoff })
}

pub fn r_vector(dim: u64) -> Result<ProbVector> {
    Ok(r_vector_construction(dim)?.probabilities)
}

/// `(1/(1-2ε-ε²)²)(1 + 2 ln(1 + 2/ε) / ln(2eD))` for `0 < ε < 1/3`.
pub fn expectation_bound_objective(eps: f64, d: f64) -> Result<f64> {
    need(eps > 0.0 && eps < 1.0 / 3.0, || format!("ε must lie in (0, 1/3), got {eps}"))?;
    need(d > 0.0 && d.is_finite(), || format!("D must be positive, got {d}"))?;
    let shrink = 1.0 - 2.0 * eps - eps * eps;
    Ok((1.0 + 2.0 * (1.0 + 2.0 / eps).ln() / (2.0 * std::f64::consts::E * d).ln()) / (shrink * shrink))
}

/// Golden-section minimum of the objective over `(0, 1/3)` at `D = 4.175`;
/// returns `(ε, value)`.
pub fn minimize_expectation_bound_objective() -> (f64, f64) {
    let f = |e: f64| expectation_bound_objective(e, D_SPLIT).expect("ε stays inside (0, 1/3)");
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (1e-9, 1.0 / 3.0 - 1e-9);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > 1e-12 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let eps = 0.5 * (a + b);
    (eps, f(eps))
}

/// Expectation bound for one split size `k + 1 ≤ N/D` with net parameter
/// `ε`: `(1/(1-2ε-ε²)) √(2/(2N-1)) √((k+1) ln(2eN/(k+1)) + 2(k+1) ln(1+2/ε))`.
pub fn split_expectation_bound(k: u64, dim: u64, eps: f64) -> Result<f64> {
    need(k >= 1 && k <= dim, || format!("need 1 <= k <= N, got k={k}, N={dim}"))?;
    need(eps > 0.0 && eps < 1.0 / 3.0, || format!("ε must lie in (0, 1/3), got {eps}"))?;
    let (k1, d) = ((k + 1) as f64, dim as f64);
    let inner = k1 * (2.0 * std::f64::consts::E * d / k1).ln() + 2.0 * k1 * (1.0 + 2.0 / eps).ln();
    Ok((2.0 / (2.0 * d - 1.0)).sqrt() * inner.sqrt() / (1.0 - 2.0 * eps - eps * eps))
}

/// Envelope `1 + √(c_g ((k+1)/N) ln(eNL/(k+1)))` for `√S_k` with a
/// caller-chosen constant `c_g`.
pub fn multi_envelope(k: u64, dim: u64, l: u64, c_g: f64) -> Result<f64> {
    need(l >= 2 && dim >= 1 && k < l * dim, || format!("need L >= 2 and 0 <= k < LN, got k={k}, N={dim}, L={l}"))?;
    need(c_g >= 0.0 && c_g.is_finite(), || format!("c_g must be nonnegative, got {c_g}"))?;
    let (k1, d) = ((k + 1) as f64, dim as f64);
    Ok(1.0 + (c_g * k1 / d * (std::f64::consts::E * d * l as f64 / k1).ln()).sqrt())
}

/// Typical Maassen–Uffink value for Haar unitaries, `ln N - ln ln N - ln 2`.
pub fn mu_asymptote(dim: u64) -> Result<f64> {
    need(dim >= 3, || "asymptote needs N >= 3".into())?;
    let n = dim as f64;
    Ok(n.ln() - n.ln().ln() - std::f64::consts::LN_2)
}

/// Upper envelope for Coles–Piani, `ln N - ln ln N - (1/2) ln 2`.
pub fn cp_asymptote(dim: u64) -> Result<f64> {
    need(dim >= 3, || "asymptote needs N >= 3".into())?;
    let n = dim as f64;
    Ok(n.ln() - n.ln().ln() - 0.5 * std::f64::consts::LN_2)
}

/// Ceiling `(3/4) ln(N-1) + H(1/4, 3/4)` on `H(Q)`, valid for `N ≥ 4`.
pub fn hq_ceiling(dim: u64) -> Result<f64> {
    need(dim >= 4, || "ceiling needs N >= 4".into())?;
    Ok(0.75 * (dim as f64 - 1.0).ln() + 0.25 * 4f64.ln() + 0.75 * (4.0f64 / 3.0).ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::shannon_entropy;
    use approx::assert_relative_eq;

    #[test]
    fn harmonic_examples() {
        assert_eq!(harmonic_number(1).unwrap(), 1.0);
        assert_relative_eq!(harmonic_number(3).unwrap(), 11.0 / 6.0, epsilon = 1e-15);
        assert!(harmonic_number(0).is_err());
        let exact = harmonic_exact(1_000_000);
        assert!((harmonic_asymptotic(1e6) - exact).abs() < 1e-12);
        let next = harmonic_exact(1_000_001);
        assert!((harmonic_number(1_000_001).unwrap() - next).abs() < 1e-12);
    }

    #[test]
    fn subvector_means() {
        assert_relative_eq!(expected_subvector_norm_sq(5, 5).unwrap(), 1.0, epsilon = 1e-15);
        assert_relative_eq!(expected_subvector_norm_sq(1, 3).unwrap(), 11.0 / 18.0, epsilon = 1e-15);
        assert_relative_eq!(expected_subvector_norm_sq(2, 3).unwrap(), 16.0 / 18.0, epsilon = 1e-15);
        assert_relative_eq!(expected_ordered_modulus_sq(2, 3).unwrap(), 5.0 / 18.0, epsilon = 1e-15);
        assert_relative_eq!(expected_ordered_modulus_sq(3, 3).unwrap(), 2.0 / 18.0, epsilon = 1e-15);
        assert!(expected_subvector_norm_sq(0, 3).is_err());
        assert!(expected_subvector_norm_sq(4, 3).is_err());
    }

    #[test]
    fn digamma_values() {
        assert!((digamma(2.0).unwrap() - (1.0 - EULER_GAMMA)).abs() < 1e-12);
        assert!((digamma(1.0).unwrap() + EULER_GAMMA).abs() < 1e-12);
        assert!((digamma(0.5).unwrap() - (-EULER_GAMMA - 2.0 * std::f64::consts::LN_2)).abs() < 1e-12);
        assert!(digamma(0.0).is_err());
        assert!(digamma(-1.0).is_err());
        assert_eq!(jones_mean_entropy(1).unwrap().abs() < 1e-14, true);
        assert!((jones_mean_entropy(16).unwrap() - 2.380_728_993_228_993).abs() < 1e-12);
        for n in [2u64, 7, 64, 1000, 123_456] {
            assert!((jones_mean_entropy(n).unwrap() - (harmonic_number(n).unwrap() - 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn scale_examples() {
        for n in [2u64, 10, 1000] {
            assert_relative_eq!(jiang_scale(n).unwrap(), fixed_block_scale(1, 1, n).unwrap(), epsilon = 1e-15);
            assert_relative_eq!(one_column_scale(n, n).unwrap(), ((n + 1) as f64 / n as f64).sqrt(), epsilon = 1e-15);
        }
        assert!((fixed_block_scale(2, 3, 10_000).unwrap() - 0.067_86).abs() < 1e-5);
        assert!(jiang_scale(1).is_err());
        assert!(one_column_scale(0, 4).is_err());
    }

    #[test]
    fn envelope_examples() {
        // √(4.18 · 0.02 · (1 + ln 100)) by hand
        assert!((sk_envelope(1, 100).unwrap() - 0.684_538).abs() < 1e-5);
        assert!((sk_envelope(100, 100).unwrap() - 2.66).abs() < 0.01);
        for n in [1u64, 2, 10, 1000, 100_000] {
            assert!(sk_envelope(n, n).unwrap() > 1.0);
        }
        assert!(sk_envelope(0, 4).is_err());
    }

    #[test]
    fn xstar_root() {
        let x = solve_xstar();
        assert!(xstar_residual(x).abs() <= 1e-9);
        assert!((0.050..=0.052).contains(&x));
        assert!((xstar_residual(0.051) + 1.0 - 0.995).abs() < 1e-3);
    }

    #[test]
    fn gap_integral_value() {
        let v = gap_integral().unwrap();
        assert!((v - GAP_INTEGRAL_REFERENCE).abs() < 0.01, "{v}");
        let tighter = gap_integral_with_tol(5e-7).unwrap();
        assert!((v - tighter).abs() < 1e-4);
        for i in 1..=520 {
            assert!(gap_integrand(i as f64 * 1e-4) > 0.0);
        }
    }

    #[test]
    fn r_vector_construction_properties() {
        let mut gaps = vec![];
        for n in [1000u64, 10_000, 100_000, 1_000_000] {
            let rv = r_vector_construction(n).unwrap();
            let w = rv.probabilities.weights();
            assert!((w.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            assert_eq!(w.len(), rv.cutoff + 1);
            assert_eq!(w[0], r_vector_head(n));
            assert!(w[rv.cutoff] <= (C_F * (n as f64).ln() / n as f64).sqrt());
            gaps.push((n as f64).ln() - shannon_entropy(&rv.probabilities));
        }
        // the gap approaches the integral from above
        assert!(gaps.windows(2).all(|g| g[1] < g[0]));
        assert!(gaps[3] <= C_A && gaps[3] > GAP_INTEGRAL_REFERENCE - 0.01);
        let rv = r_vector_construction(100_000).unwrap();
        assert!(rv.cutoff as f64 / 1e5 <= solve_xstar() + 0.01);
        assert!(r_vector(3).is_err());
        assert_eq!(r_vector(10).unwrap().weights(), &[1.0]);
    }

    #[test]
    fn expectation_objective() {
        let (eps, val) = minimize_expectation_bound_objective();
        assert!((val - OBJECTIVE_MIN_REFERENCE).abs() < 0.005, "{val}");
        assert!((eps - EPSILON_REFERENCE).abs() < 0.003, "{eps}");
        assert!(expectation_bound_objective(0.3, D_SPLIT).unwrap() > expectation_bound_objective(0.039, D_SPLIT).unwrap());
        assert!(expectation_bound_objective(0.0, D_SPLIT).is_err());
        assert!(expectation_bound_objective(0.34, D_SPLIT).is_err());
    }

    #[test]
    fn envelope_dominates_split_bound() {
        let (eps, _) = minimize_expectation_bound_objective();
        for n in [100u64, 1000, 10_000] {
            let kmax = (n as f64 / D_SPLIT).floor() as u64 - 1;
            for k in 1..=kmax {
                assert!(sk_envelope(k, n).unwrap() >= split_expectation_bound(k, n, eps).unwrap(), "N={n} k={k}");
            }
        }
    }

    #[test]
    fn multi_envelope_examples() {
        assert!(multi_envelope(0, 8, 2, 1.0).unwrap() >= 1.0);
        assert!(multi_envelope(3, 8, 2, 2.0).unwrap() >= multi_envelope(3, 8, 2, 1.0).unwrap());
        assert!(multi_envelope(16, 8, 2, 1.0).is_err());
        assert!(multi_envelope(0, 8, 1, 1.0).is_err());
    }

    #[test]
    fn prediction_constructor() {
        let p = AsymptoticPrediction::new("mu", mu_asymptote(1024).unwrap(), &[("γ", EULER_GAMMA)]).unwrap();
        assert_eq!(p.constants_used["γ"], EULER_GAMMA);
        assert!(AsymptoticPrediction::new("bad", f64::NAN, &[]).is_err());
        let table = constants_json();
        assert_eq!(table["schema"], 1);
        assert!(table["constants"].as_array().unwrap().len() >= 8);
    }

    #[test]
    fn hq_ceiling_value() {
        let h = 0.25 * 4f64.ln() + 0.75 * (4.0f64 / 3.0).ln();
        assert_relative_eq!(hq_ceiling(4).unwrap(), 0.75 * 3f64.ln() + h, epsilon = 1e-15);
        assert!(hq_ceiling(3).is_err());
    }
}

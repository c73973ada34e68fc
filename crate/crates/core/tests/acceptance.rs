//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Set `ACCEPTANCE_ONLY=1,4,9` to run a subset.

mod common;

use std::collections::BTreeMap;
use std::time::Instant;

use eur_lab::asymptotics::{
    digamma, gap_integral, minimize_expectation_bound_objective, r_vector, solve_xstar, EULER_GAMMA,
};
use eur_lab::bounds::measurement_distribution;
use eur_lab::experiments::{run_experiment, summarize, Experiment, ExperimentConfig, ExperimentRecord};
use eur_lab::haar::{sample_pure_state, PureState, RngStream};
use eur_lab::minimizer::{entropy_gradient, entropy_sum};
use eur_lab::search::{
    column_subvector_norms, max_submatrix_norm, multi_measurement_profile, r_profile, s_profile, SearchBudget,
};
use eur_lab::{ComplexMatrix, C64};

type Outcome = Result<(bool, String), String>;

fn config(e: Experiment, dims: &[usize], trials: usize) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(e);
    c.dims = dims.to_vec();
    c.trials = trials;
    c.seed = 2024;
    c
}

fn run(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRecord>, String> {
    run_experiment(cfg).map_err(|e| e.to_string())
}

/// Values per (N, trial) keyed by statistic.
fn by_trial(records: &[ExperimentRecord]) -> BTreeMap<(usize, usize), BTreeMap<String, (f64, bool)>> {
    let mut out: BTreeMap<_, BTreeMap<_, _>> = BTreeMap::new();
    for r in records {
        out.entry((r.n, r.trial)).or_default().insert(r.statistic.clone(), (r.value, r.certified));
    }
    out
}

fn harmonic(n: u64) -> f64 {
    (1..=n).map(|j| 1.0 / j as f64).sum()
}

fn mean_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn bound_validity() -> Outcome {
    let recs = run(&config(Experiment::BoundDuel, &[3, 4, 5, 6], 200))?;
    let mut violations = 0;
    let mut worst = f64::NEG_INFINITY;
    let mut uncertified = 0;
    for stats in by_trial(&recs).values() {
        let upper = stats["min_upper"].0;
        for name in ["b_mu", "b_cp", "h_q", "strong"] {
            let (b, cert) = stats[name];
            uncertified += usize::from(!cert);
            worst = worst.max(b - upper);
            violations += usize::from(b > upper + 1e-6);
        }
    }
    let mut cfg = config(Experiment::MultiMeasurement, &[3], 50);
    cfg.l = 3;
    for stats in by_trial(&run(&cfg)?).values() {
        let (b, cert) = stats["multi_bound"];
        uncertified += usize::from(!cert);
        worst = worst.max(b - stats["min_upper"].0);
        violations += usize::from(b > stats["min_upper"].0 + 1e-6);
    }
    Ok((
        violations == 0 && uncertified == 0,
        format!("{violations} violations, {uncertified} uncertified, max(bound - upper) = {worst:.3e}"),
    ))
}

fn oracle_equivalence() -> Outcome {
    let mut worst = 0.0f64;
    let mut track = |a: f64, b: f64| worst = worst.max((a - b).abs());
    let budget = |i: u64| SearchBudget::exhaustive(RngStream::new(77, vec![i]));
    let shapes: [(usize, usize); 10] = [(2, 2), (2, 3), (2, 4), (3, 2), (4, 2), (3, 1), (4, 1), (5, 1), (6, 1), (6, 1)];
    for i in 0..50u64 {
        let (n, l) = shapes[i as usize % shapes.len()];
        let us: Vec<ComplexMatrix> = (0..l.max(2)).map(|j| common::haar(31, &[i, j as u64], n)).collect();
        let u = &us[1];
        let s = s_profile(u, &budget(i)).map_err(|e| e.to_string())?;
        let slow = common::s_profile(u);
        let r = r_profile(&s).map_err(|e| e.to_string())?;
        for ((a, b), rk) in s.values().iter().zip(&slow).zip(r.values()) {
            track(*a, *b);
            track(rk, ((1.0 + b) / 2.0).powi(2));
        }
        for a in 1..=n {
            for b in 1..=n {
                let v = max_submatrix_norm(u, a, b, &budget(i)).map_err(|e| e.to_string())?.value;
                track(v, common::max_block(u, a, b));
            }
            track(column_subvector_norms(u)[a - 1], common::max_block(u, a, 1));
        }
        if l >= 2 {
            let mut ms = vec![ComplexMatrix::identity(n)];
            ms.extend(us[1..l].iter().cloned());
            let fast = multi_measurement_profile(&ms, &budget(i)).map_err(|e| e.to_string())?;
            for (a, b) in fast.values().iter().zip(common::multi_profile(&ms)) {
                track(*a, b);
            }
        }
    }
    Ok((worst <= 1e-10, format!("max deviation {worst:.3e} over 50 instances")))
}

/// Partial sums of the descending rearrangement.
fn partial_sums(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(|a, b| b.total_cmp(a));
    s.iter()
        .scan(0.0, |acc, x| {
            *acc += x;
            Some(*acc)
        })
        .collect()
}

fn majorization_chains() -> Outcome {
    let budget = |i: u64| SearchBudget::exhaustive(RngStream::new(78, vec![i]));
    let mut checks = 0usize;
    let mut failures = 0usize;
    for i in 0..50u64 {
        let n = 2 + (i as usize % 5);
        let u = common::haar(32, &[i], n);
        let id = ComplexMatrix::identity(n);
        let s = s_profile(&u, &budget(i)).map_err(|e| e.to_string())?.values();
        let q_cumulative: Vec<f64> = s.iter().map(|v| ((1.0 + v) / 2.0).powi(2)).collect();
        let third = common::haar(32, &[i, 1], n);
        let us = [id.clone(), u.clone(), third];
        let multi = multi_measurement_profile(&us, &budget(i)).map_err(|e| e.to_string())?.values();
        for t in 0..1000u64 {
            let psi = sample_pure_state(&RngStream::new(33, vec![i, t]), n).map_err(|e| e.to_string())?;
            let dists: Vec<Vec<f64>> =
                us.iter().map(|m| measurement_distribution(m, &psi).unwrap().weights().to_vec()).collect();
            let (p, q) = (&dists[0], &dists[1]);
            // p ⊗ q against the cumulative sums R_k of Q
            let tensor: Vec<f64> = p.iter().flat_map(|a| q.iter().map(move |b| a * b)).collect();
            for (k, ps) in partial_sums(&tensor).iter().enumerate() {
                let cap = q_cumulative.get(k).copied().unwrap_or(1.0);
                checks += 1;
                failures += usize::from(*ps > cap + 1e-9);
            }
            // p ⊕ q: k-th partial sum at most 1 + s_{k-1}
            let sum: Vec<f64> = p.iter().chain(q).copied().collect();
            for (k, ps) in partial_sums(&sum).iter().enumerate() {
                let prev = if k == 0 { 0.0 } else { s.get(k - 1).copied().unwrap_or(1.0) };
                checks += 1;
                failures += usize::from(*ps > 1.0 + prev + 1e-9);
            }
            // ⊕ of all three: k-th partial sum at most S_{k-1}
            let all: Vec<f64> = dists.concat();
            for (k, ps) in partial_sums(&all).iter().enumerate() {
                checks += 1;
                failures += usize::from(*ps > multi[k] + 1e-9);
            }
        }
    }
    Ok((failures == 0, format!("{failures} of {checks} partial-sum checks violated")))
}

fn harmonic_law() -> Outcome {
    let recs = run(&config(Experiment::Harmonic, &[64], 10_000))?;
    let mut ok = true;
    let mut parts = Vec::new();
    for n in [1u64, 4, 16, 63] {
        let v: Vec<f64> = recs.iter().filter(|r| r.statistic == format!("sq_norm_n{n}")).map(|r| r.value).collect();
        if v.len() != 10_000 {
            return Err(format!("expected 10000 values for n={n}, got {}", v.len()));
        }
        let (mean, se) = mean_se(&v);
        let th = n as f64 / 64.0 * (1.0 + harmonic(64) - harmonic(n));
        ok &= (mean - th).abs() <= 3.0 * se;
        parts.push(format!("n={n}: {:.2} SE", (mean - th).abs() / se));
    }
    let summary = summarize(&recs).map_err(|e| e.to_string())?;
    ok &= summary.passed();
    Ok((ok, parts.join(", ")))
}

fn jones_formula() -> Outcome {
    let recs = run(&config(Experiment::Jones, &[64], 10_000))?;
    let v: Vec<f64> = recs.iter().map(|r| r.value).collect();
    let (mean, se) = mean_se(&v);
    // Ψ(65) - Ψ(2) = H_64 - 1
    let th = harmonic(64) - 1.0;
    Ok(((mean - th).abs() <= 3.0 * se, format!("mean {mean:.5} vs {th:.5}, {:.2} SE", (mean - th).abs() / se)))
}

fn mu_asymptote() -> Outcome {
    let predicted = |n: f64| n.ln() - n.ln().ln() - 2f64.ln();
    let mut gaps = Vec::new();
    let mut at_1024 = f64::NAN;
    // 4096 is sampled with fewer trials: one QR of that size takes ~25 s on one core.
    for (n, trials) in [(256usize, 200usize), (1024, 200), (4096, 8)] {
        let recs = run(&config(Experiment::MuAsymptotics, &[n], trials))?;
        let signed = median(recs.iter().map(|r| r.value).collect()) - predicted(n as f64);
        if n == 1024 {
            at_1024 = signed.abs();
        }
        gaps.push((n, signed));
    }
    let inversions = gaps.windows(2).filter(|w| w[1].1.abs() > w[0].1.abs()).count();
    let detail = gaps.iter().map(|(n, g)| format!("N={n}: {g:+.4}")).collect::<Vec<_>>().join(", ");
    Ok((at_1024 <= 0.35 && inversions <= 1, format!("median - predicted: {detail}; {inversions} inversion(s) of |gap|")))
}

fn hq_ceiling() -> Outcome {
    let ceiling = |n: f64| 0.75 * (n - 1.0).ln() + 0.25 * 4f64.ln() + 0.75 * (4.0f64 / 3.0).ln();
    let recs = run(&config(Experiment::HqCeiling, &[4, 5, 6], 200))?;
    let mut excess = f64::NEG_INFINITY;
    let mut uncertified = 0;
    for r in &recs {
        excess = excess.max(r.value - ceiling(r.n as f64));
        uncertified += usize::from(!r.certified);
    }
    let mut heur = config(Experiment::HqCeiling, &[32], 5);
    heur.restarts = 1;
    heur.max_swaps = 0;
    let h32 = run(&heur)?;
    let max32 = h32.iter().map(|r| r.value).fold(f64::NEG_INFINITY, f64::max);
    Ok((
        excess <= 1e-9 && uncertified == 0,
        format!(
            "exact N=4..6: max(H(Q) - ceiling) = {excess:.4}; heuristic N=32 (reported): max H(Q) {max32:.4} vs ceiling {:.4}",
            ceiling(32.0)
        ),
    ))
}

fn constants() -> Outcome {
    let xstar = solve_xstar();
    let integral = gap_integral().map_err(|e| e.to_string())?;
    let (eps, value) = minimize_expectation_bound_objective();
    let psi2 = digamma(2.0).map_err(|e| e.to_string())?;
    let ok = (0.050..=0.052).contains(&xstar)
        && (integral - 3.488).abs() <= 0.01
        && (value - 4.172).abs() <= 0.005
        && (eps - 0.039).abs() <= 0.003
        && (psi2 - (1.0 - EULER_GAMMA)).abs() <= 1e-12;
    Ok((ok, format!("x* = {xstar:.5}, integral = {integral:.5}, min {value:.5} at ε = {eps:.5}, Ψ(2) = {psi2:.15}")))
}

fn r_vector_bound() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in [1_000u64, 10_000, 100_000, 1_000_000] {
        let r = r_vector(n).map_err(|e| e.to_string())?;
        let w = r.weights();
        let mass: f64 = w.iter().sum();
        let h: f64 = -w.iter().filter(|&&x| x > 0.0).map(|x| x * x.ln()).sum::<f64>();
        let gap = (n as f64).ln() - h;
        let pass = gap <= 3.49 && (mass - 1.0).abs() <= 1e-12;
        ok &= pass;
        parts.push(format!("N={n}: gap {gap:.4}{}", if pass { "" } else { " (exceeds 3.49)" }));
    }
    Ok((ok, parts.join(", ")))
}

fn envelope_domination() -> Outcome {
    let mut cfg = config(Experiment::SkEnvelope, &[64], 100);
    cfg.restarts = 1;
    cfg.max_swaps = 0;
    let recs = run(&cfg)?;
    let mut violations = 0;
    let mut margin = f64::INFINITY;
    for r in recs.iter().filter(|r| r.statistic.starts_with("s_")) {
        let k1 = r.statistic[2..].parse::<f64>().map_err(|e| e.to_string())? + 1.0;
        let env = (4.18 * k1 / 64.0 * (1.0 + (128.0 / k1).ln())).sqrt();
        margin = margin.min(env - r.value);
        violations += usize::from(r.value > env);
    }
    Ok((violations == 0, format!("{violations} violations over 100 draws, smallest margin {margin:.4}")))
}

fn one_column_law() -> Outcome {
    let recs = run(&config(Experiment::OneColumnLaw, &[256], 100))?;
    let nf = 256.0f64;
    let mut inside = 0;
    let mut trials = 0;
    for stats in by_trial(&recs).values() {
        trials += 1;
        let all = (1..=256usize).all(|n| {
            let x = n as f64;
            let ratio = stats[&format!("norm_n{n}")].0 / ((x + 1.0) / nf * (1.0 + (nf / x).ln())).sqrt();
            (0.8..=1.2).contains(&ratio)
        });
        inside += usize::from(all);
    }
    let frac = inside as f64 / trials as f64;
    Ok((frac >= 0.9, format!("{inside}/{trials} trials inside [0.8, 1.2] for every n")))
}

fn value_columns(cfg: &ExperimentConfig) -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut c = cfg.clone();
    c.output_dir = Some(dir.path().to_path_buf());
    run(&c)?;
    let text = std::fs::read_to_string(dir.path().join(format!("{}.csv", cfg.experiment.name()))).map_err(|e| e.to_string())?;
    // everything but the trailing wall-time column
    Ok(text.lines().map(|l| l.rsplit_once(',').map_or(l, |(head, _)| head)).collect::<Vec<_>>().join("\n"))
}

fn determinism() -> Outcome {
    let mut multi = config(Experiment::MultiMeasurement, &[3], 6);
    multi.l = 3;
    // a tiny enumeration budget sends every split through the randomized local search
    let mut sk = config(Experiment::SkEnvelope, &[16], 4);
    sk.enum_budget = 1_000;
    sk.restarts = 4;
    sk.max_swaps = 20;
    let suites = [config(Experiment::BoundDuel, &[4, 5], 8), multi, sk, config(Experiment::Concentration, &[16], 6)];
    let mut mismatches = Vec::new();
    for base in suites {
        let runs: Vec<String> = [1usize, 4, 1]
            .into_iter()
            .map(|w| {
                let mut c = base.clone();
                c.workers = w;
                value_columns(&c)
            })
            .collect::<Result<_, _>>()?;
        if runs[0] != runs[1] || runs[0] != runs[2] {
            mismatches.push(base.experiment.name());
        }
    }
    Ok((mismatches.is_empty(), format!("value columns differing: {mismatches:?} (workers 1, 4, and a rerun)")))
}

fn gradient_check() -> Outcome {
    let h = 1e-6;
    let mut worst = 0.0f64;
    let mut clamped = 0;
    for i in 0..100u64 {
        let n = if i % 2 == 0 { 3 } else { 8 };
        let us = [ComplexMatrix::identity(n), common::haar(41, &[i], n)];
        let psi = sample_pure_state(&RngStream::new(42, vec![i]), n).map_err(|e| e.to_string())?;
        let g = entropy_gradient(&us, &psi).map_err(|e| e.to_string())?;
        clamped += usize::from(g.clamped);
        let f = |dir: usize, imag: bool, t: f64| {
            let mut a = psi.amplitudes().to_vec();
            a[dir] += if imag { C64::new(0.0, t) } else { C64::new(t, 0.0) };
            entropy_sum(&us, &PureState::normalized(a).unwrap()).unwrap()
        };
        let mut diff = 0.0;
        let mut norm = 0.0;
        for dir in 0..n {
            let fd = C64::new(
                (f(dir, false, h) - f(dir, false, -h)) / (2.0 * h),
                (f(dir, true, h) - f(dir, true, -h)) / (2.0 * h),
            );
            diff += (fd - g.vector[dir]).norm_sqr();
            norm += g.vector[dir].norm_sqr();
        }
        worst = worst.max(diff.sqrt() / norm.sqrt().max(1e-12));
    }
    Ok((worst <= 1e-4 && clamped == 0, format!("max relative error {worst:.3e} over 100 points")))
}

fn multi_average() -> Outcome {
    let mut parts = Vec::new();
    let mut failures = 0;
    let mut uncertified = 0;
    for l in [2usize, 3, 4] {
        let mut cfg = config(Experiment::MultiMeasurement, &[4], 50);
        cfg.l = l;
        let recs = run(&cfg)?;
        let mut per_bound = Vec::new();
        for stats in by_trial(&recs).values() {
            let (bound, cert) = stats["bound_per_measurement"];
            uncertified += usize::from(!cert);
            failures += usize::from(stats["avg_entropy"].0 < bound - 1e-6);
            per_bound.push(bound);
        }
        let reference = (l as f64 - 1.0) / l as f64 * 4f64.ln();
        parts.push(format!("L={l}: mean bound/L {:.4} vs (L-1)/L ln N {reference:.4}", mean_se(&per_bound).0));
    }
    Ok((failures == 0 && uncertified == 0, format!("{failures} failures; {}", parts.join(", "))))
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome); 14] = [
        (1, "bound validity", bound_validity),
        (2, "oracle equivalence", oracle_equivalence),
        (3, "majorization chains", majorization_chains),
        (4, "harmonic law", harmonic_law),
        (5, "random-state entropy", jones_formula),
        (6, "Maassen-Uffink asymptote", mu_asymptote),
        (7, "H(Q) ceiling", hq_ceiling),
        (8, "closed-form constants", constants),
        (9, "r-vector entropy bound", r_vector_bound),
        (10, "s_k envelope domination", envelope_domination),
        (11, "one-column law", one_column_law),
        (12, "determinism", determinism),
        (13, "gradient check", gradient_check),
        (14, "multi-measurement average", multi_average),
    ];
    let only: Option<Vec<u32>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let mut failed = Vec::new();
    for (id, name, check) in criteria {
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        let start = Instant::now();
        let (pass, detail) = check().unwrap_or_else(|e| (false, format!("error: {e}")));
        let secs = start.elapsed().as_secs_f64();
        println!("{} criterion {id:>2} ({name}) [{secs:.1}s]: {detail}", if pass { "PASS" } else { "FAIL" });
        if !pass {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}

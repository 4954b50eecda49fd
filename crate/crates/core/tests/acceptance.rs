//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Run with `cargo test -p covsel-core --test acceptance`.

mod support;

use std::time::{Duration, Instant};

use covsel_core::covariance::{
    empirical_covariances, population_covariances, projector, CovarianceSuite, Dataset,
    PopulationModel, VariableSubset, POPULATION_ZERO_TOL,
};
use covsel_core::io::{parse_dataset_csv, write_dataset_csv};
use covsel_core::selection::{order_permutation, PenaltyArg, PenaltySchedule, PsiScale};
use covsel_core::simulation::{
    convergence_probe, run_records, run_replication, run_study, sample_dataset, summarize,
    SimulationConfig,
};
use covsel_core::criterion;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use support::{direct_covariances, direct_criterion, mask_labels, to_rows, ZERO_PATTERN_TABLE};

const TRUE_SET: [usize; 3] = [1, 4, 7];

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn timed(budget: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut o = f();
    let elapsed = start.elapsed();
    if elapsed > budget {
        o.passed = false;
    }
    o.detail = format!("{} [{:.2?} of {:?}]", o.detail, elapsed, budget);
    o
}

/// 1. Exhaustive zero pattern of the population criterion.
fn zero_pattern_exhaustive() -> Outcome {
    let suite = population_covariances(&PopulationModel::default_design());
    let mut worst_zero = 0.0_f64;
    let mut worst_rel = 0.0_f64;
    let mut smallest_positive = f64::INFINITY;
    let mut violations = Vec::new();
    for &(mask, pinned) in ZERO_PATTERN_TABLE.iter() {
        let labels = mask_labels(mask, 7);
        let k = VariableSubset::new(labels.iter().copied(), 7).unwrap();
        let xi = criterion(&suite, &k).unwrap();
        if k.is_superset_of(&TRUE_SET) {
            worst_zero = worst_zero.max(xi);
            if xi > POPULATION_ZERO_TOL {
                violations.push(format!("{labels:?}: {xi:e} not zero"));
            }
        } else {
            smallest_positive = smallest_positive.min(xi);
            worst_rel = worst_rel.max((xi - pinned).abs() / pinned);
            if xi <= POPULATION_ZERO_TOL || xi < pinned * (1.0 - 1e-9) {
                violations.push(format!("{labels:?}: {xi} below pinned {pinned}"));
            }
        }
    }
    outcome(
        violations.is_empty(),
        format!(
            "127 subsets; max xi on supersets of {{1,4,7}} = {worst_zero:.2e}; \
             min xi elsewhere = {smallest_positive:.6}; max rel. dev. from pinned = {worst_rel:.1e}{}",
            if violations.is_empty() {
                String::new()
            } else {
                format!("; violations: {violations:?}")
            }
        ),
    )
}

/// 2. Correct-selection rate at desk scale.
fn consistency_rates() -> Outcome {
    let cfg = SimulationConfig {
        sample_sizes: vec![50, 2000],
        replications: 200,
        ..SimulationConfig::default()
    };
    let s = run_study(&cfg).unwrap();
    let r50 = s.row(50).unwrap().correct_rate;
    let r2000 = s.row(2000).unwrap().correct_rate;
    outcome(
        r2000 >= 0.95 && r2000 > r50,
        format!("correct-selection rate n=50: {r50:.3}, n=2000: {r2000:.3} (need >= 0.95 and > n=50)"),
    )
}

/// 3. Boundedness of sqrt(n) xi_hat on a superset of the relevant set and
/// convergence of xi_hat when a relevant variable is dropped.
fn boundedness_probe() -> Outcome {
    let model = PopulationModel::default_design();
    let grid = [250, 1000, 4000];
    let truth = VariableSubset::new(TRUE_SET, 7).unwrap();
    let t = convergence_probe(&model, &truth, &grid, 50, 11).unwrap();
    let scaled: Vec<f64> = t.rows.iter().map(|r| r.median_sqrt_n_criterion).collect();
    let ratio = scaled.iter().cloned().fold(f64::MIN, f64::max)
        / scaled.iter().cloned().fold(f64::MAX, f64::min);

    let k1 = VariableSubset::leave_one_out(7, 1).unwrap();
    let t1 = convergence_probe(&model, &k1, &[4000], 50, 12).unwrap();
    let rel = (t1.rows[0].median_criterion - t1.population_criterion).abs() / t1.population_criterion;
    outcome(
        ratio < 3.0 && rel <= 0.10,
        format!(
            "median sqrt(n) xi_hat{{1,4,7}} at n=250/1000/4000: {:.4}/{:.4}/{:.4} (max/min {ratio:.3} < 3); \
             K=I-{{1}} at n=4000: median {:.4} vs population {:.4} (rel. {rel:.4} <= 0.10)",
            scaled[0], scaled[1], scaled[2], t1.rows[0].median_criterion, t1.population_criterion
        ),
    )
}

/// 4. Prediction error against the analytic noise floor, and vanishing
/// excess error of the selected model over the oracle model.
fn prediction_error_floor() -> Outcome {
    let cfg = SimulationConfig {
        sample_sizes: vec![100, 500, 2000, 4000],
        replications: 200,
        ..SimulationConfig::default()
    };
    let s = run_study(&cfg).unwrap();
    let floor = 2.5;
    let oracle = s.row(4000).unwrap().mean_oracle_error;
    let a = (oracle - floor).abs() / floor <= 0.05;
    let ex: Vec<f64> = [100, 500, 2000]
        .iter()
        .map(|&n| s.row(n).unwrap().mean_excess_error)
        .collect();
    let b = ex[0] > ex[1] && ex[1] > ex[2];
    let reference_n500 = 1.009e-6;
    let observed_n500 = s.row(500).unwrap().mean_pred_error;
    outcome(
        a && b,
        format!(
            "(a) oracle error at n=4000: {oracle:.4} vs floor {floor} (rel. {:.4} <= 0.05); \
             (b) mean excess at n=100/500/2000: {:.3e}/{:.3e}/{:.3e} strictly decreasing; \
             target n=500 value {reference_n500:e} vs observed {observed_n500:.4} (below the floor, not reproducible)",
            (oracle - floor).abs() / floor,
            ex[0],
            ex[1],
            ex[2]
        ),
    )
}

fn random_spd(rng: &mut ChaCha8Rng, p: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(p, p, |_, _| rng.random_range(-1.0..1.0));
    &a * a.transpose() + DMatrix::identity(p, p) * 0.1
}

fn random_dataset(rng: &mut ChaCha8Rng, n: usize, p: usize, q: usize) -> Dataset {
    let x = DMatrix::from_fn(n, p, |_, _| rng.random_range(-1.0..1.0));
    let y = DMatrix::from_fn(n, q, |_, _| rng.random_range(-1.0..1.0));
    Dataset::new(x, y).unwrap()
}

/// 5. Invariants as quantified per module.
fn property_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut failures: Vec<String> = Vec::new();

    // projector idempotence in the V1 metric
    let mut worst_idem = 0.0_f64;
    for _ in 0..300 {
        let p = rng.random_range(2..=8);
        let v1 = random_spd(&mut rng, p);
        let mask = rng.random_range(1..(1u64 << p));
        let k = VariableSubset::from_mask(mask, p).unwrap();
        let pi = projector(&v1, &k).unwrap();
        let lhs = (&pi * &v1 * &pi - &pi).norm() / (1.0 + pi.norm());
        worst_idem = worst_idem.max(lhs);
    }
    if worst_idem > 1e-8 {
        failures.push(format!("projector idempotence {worst_idem:e}"));
    }

    // full-set annihilation
    let mut worst_full = 0.0_f64;
    for _ in 0..300 {
        let p = rng.random_range(2..=8);
        let q = rng.random_range(1..=5);
        let n = rng.random_range(p + 2..=60);
        let suite = empirical_covariances(&random_dataset(&mut rng, n, p, q)).unwrap();
        worst_full = worst_full.max(criterion(&suite, &VariableSubset::full(p).unwrap()).unwrap());
    }
    if worst_full > 1e-10 {
        failures.push(format!("full-set criterion {worst_full:e}"));
    }

    // permutation validity and tie rule
    for _ in 0..500 {
        let p = rng.random_range(1..=12);
        let phi: Vec<f64> = (0..p).map(|_| rng.random_range(0..4) as f64 * 0.25).collect();
        let perm = order_permutation(&phi);
        let mut sorted = perm.clone();
        sorted.sort_unstable();
        let valid = sorted == (1..=p).collect::<Vec<_>>();
        let ordered = perm.windows(2).all(|w| {
            let (a, b) = (phi[w[0] - 1], phi[w[1] - 1]);
            a > b || (a == b && w[0] < w[1])
        });
        if !(valid && ordered) {
            failures.push(format!("order_permutation({phi:?}) = {perm:?}"));
            break;
        }
    }

    // seed determinism
    let cfg = SimulationConfig {
        sample_sizes: vec![60, 150],
        replications: 20,
        ..SimulationConfig::default()
    };
    if run_replication(&cfg, 150, 7).unwrap() != run_replication(&cfg, 150, 7).unwrap() {
        failures.push("run_replication not deterministic".into());
    }
    let par = run_records(&cfg).unwrap();
    let seq = run_records(&SimulationConfig {
        parallel: false,
        ..cfg.clone()
    })
    .unwrap();
    if par != seq || par != run_records(&cfg).unwrap() {
        failures.push("run_records not bitwise reproducible".into());
    }

    // study merge
    let whole = SimulationConfig {
        sample_sizes: vec![100],
        replications: 200,
        ..SimulationConfig::default()
    };
    let first = SimulationConfig {
        replications: 100,
        ..whole.clone()
    };
    let second = SimulationConfig {
        replications: 100,
        first_replication: 100,
        ..whole.clone()
    };
    let mut merged = run_records(&second).unwrap();
    merged.extend(run_records(&first).unwrap());
    if summarize(&merged).unwrap() != run_study(&whole).unwrap() {
        failures.push("split study does not merge to the whole".into());
    }

    // CSV round trip
    let dir = tempfile::tempdir().unwrap();
    let model = PopulationModel::default_design();
    for seed in 0..5 {
        let d = sample_dataset(&model, 50 + seed as usize, seed).unwrap();
        let path = dir.path().join(format!("d{seed}.csv"));
        write_dataset_csv(&path, &d).unwrap();
        let back = parse_dataset_csv(&path, 7, 5, false).unwrap();
        let dev = (back.x() - d.x()).amax().max((back.y() - d.y()).amax());
        if dev > 1e-15 {
            failures.push(format!("CSV round trip deviation {dev:e}"));
        }
    }

    outcome(
        failures.is_empty(),
        format!(
            "idempotence max {worst_idem:.1e} (<= 1e-8), full-set max {worst_full:.1e} (<= 1e-10), \
             permutation/tie rule, seed determinism, study merge, CSV round trip{}",
            if failures.is_empty() {
                String::new()
            } else {
                format!("; failures: {failures:?}")
            }
        ),
    )
}

/// 6. Library criterion against explicit sums and Gauss-Jordan inverses.
fn small_instance_brute_force() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0_f64;
    let mut checked = 0usize;
    for _ in 0..100 {
        let p = rng.random_range(1..=4);
        let q = rng.random_range(1..=3);
        let n = rng.random_range(p + 2..=50);
        let data = random_dataset(&mut rng, n, p, q);
        let suite: CovarianceSuite = empirical_covariances(&data).unwrap();
        let (v1, v12) = direct_covariances(&to_rows(data.x()), &to_rows(data.y()));
        for mask in 1u32..(1 << p) {
            let labels = mask_labels(mask, p);
            let k = VariableSubset::new(labels.iter().copied(), p).unwrap();
            let lib = criterion(&suite, &k).unwrap();
            let direct = direct_criterion(&v1, &v12, &labels);
            worst = worst.max((lib - direct).abs());
            checked += 1;
        }
    }
    outcome(
        worst <= 1e-10,
        format!("100 instances, {checked} subsets; max |library - direct| = {worst:.2e} (<= 1e-10)"),
    )
}

/// Not a criterion: correct-selection rates of the estimator with the
/// unsquared prefix criterion and the label penalty argument, for contrast.
fn literal_form_rates() -> String {
    let pen = PenaltySchedule::default()
        .with_psi_scale(PsiScale::Norm)
        .with_penalty_arg(PenaltyArg::Label);
    let cfg = SimulationConfig {
        sample_sizes: vec![50, 2000],
        replications: 200,
        pen,
        ..SimulationConfig::default()
    };
    let s = run_study(&cfg).unwrap();
    format!(
        "INFO psi_scale=norm, penalty_arg=label: correct-selection rate n=50: {:.3}, n=2000: {:.3}",
        s.row(50).unwrap().correct_rate,
        s.row(2000).unwrap().correct_rate
    )
}

fn main() {
    // the harness is invoked with libtest flags such as --list; ignore them
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let criteria: Vec<(&str, Duration, fn() -> Outcome)> = vec![
        ("1 population criterion zero pattern", Duration::from_secs(1), zero_pattern_exhaustive),
        ("2 selection consistency", Duration::from_secs(120), consistency_rates),
        ("3 sqrt(n) boundedness probe", Duration::from_secs(120), boundedness_probe),
        ("4 prediction error floor", Duration::from_secs(120), prediction_error_floor),
        ("5 property suite", Duration::from_secs(60), property_suite),
        ("6 small-instance brute force", Duration::from_secs(60), small_instance_brute_force),
    ];
    let mut failed = 0;
    for (name, budget, f) in criteria {
        let o = timed(budget, f);
        println!("{} criterion {name}: {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
        if !o.passed {
            failed += 1;
        }
    }
    println!("{}", literal_form_rates());
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}

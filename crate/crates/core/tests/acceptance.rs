//! Acceptance suite. Runs every criterion at its stated tolerance, prints one
//! PASS/FAIL line per criterion and exits non-zero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use rayon::prelude::*;
use stable_limits::coefficients::TestFunction;
use stable_limits::diagnostics::{hill_estimate, ks_two_sample, KsLevel};
use stable_limits::harness::{
    rows_to_csv, run_convergence_experiment, stream, ExperimentConfig, Quantity, Regime,
    StreamPurpose,
};
use stable_limits::heavy_tail_model::ScalingConstants;
use stable_limits::partial_sum_engine::{build_functional_paths, functional_values_at};
use stable_limits::prelimit_characteristics::{
    ca_family_check, kernel_expectation, vague_check, PreLimitCoefficients, PreLimitKernel,
};
use stable_limits::stable_limit_sim::{
    uniform_grid, CharGaps, LevySimulator, LimitCoefficients, LimitPathConfig,
};
use stable_limits::{FunctionalF, TailLaw, TruncationFn};

const SEEDS: [u64; 10] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10];
const REPLICATES: usize = 4000;

struct Outcome {
    pass: bool,
    detail: String,
}

fn vague_identity() -> Outcome {
    let started = Instant::now();
    let grid: Vec<f64> = (0..=95).map(|i| 0.5 + i as f64 * 0.1).collect();
    let mut worst_vague = 0.0f64;
    for alpha in [0.5, 1.0, 1.5] {
        let law = TailLaw::new(alpha, 0.7).unwrap();
        for n in [100usize, 10_000] {
            let k = PreLimitKernel::new(law, n, TruncationFn::taper()).unwrap();
            worst_vague = worst_vague.max(vague_check(&k, &law.limit_measure(), &grid).unwrap());
        }
    }
    let law = TailLaw::new(1.0, 0.5).unwrap();
    let k = PreLimitKernel::new(law, 10_000, TruncationFn::taper()).unwrap();
    let family = ca_family_check(&k, &law.limit_measure(), &[1.0, 2.0]).unwrap();
    let worst_family = family.iter().map(|(_, d)| *d).fold(0.0, f64::max);
    // Reference: ∫ g_1 dρ = ln 2 at α = 1.
    let g1 = kernel_expectation(&k, &TestFunction::Ga(1.0), 1.0).unwrap();
    let ln2_gap = (g1 - std::f64::consts::LN_2).abs();
    let secs = started.elapsed().as_secs_f64();
    Outcome {
        pass: worst_vague <= 1e-12 && worst_family <= 1e-8 && ln2_gap <= 1e-8 && secs < 1.0,
        detail: format!(
            "max vague gap {worst_vague:.2e} (<= 1e-12), max g_a gap {worst_family:.2e} (<= 1e-8), \
             |∫g1 - ln2| {ln2_gap:.2e}, {secs:.3} s (< 1 s)"
        ),
    }
}

fn experiment(alpha: f64, regime: Regime, seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        experiment_id: "acceptance".into(),
        alpha,
        p: 0.7,
        n_values: vec![5000],
        replicate_count: REPLICATES,
        regime,
        delta: 1e-4,
        eval_times: vec![0.5, 1.0],
        master_seed: seed,
        ks_level: KsLevel::P01,
        char_paths: 1,
        char_grid: 10,
        ..ExperimentConfig::default()
    }
}

/// `(quantity, t) ↦ KS statistics` over the ten seeds.
fn seed_sweep(alpha: f64, regime: Regime) -> Vec<Vec<(Quantity, f64, f64, bool)>> {
    SEEDS
        .iter()
        .map(|&seed| {
            run_convergence_experiment(&experiment(alpha, regime, seed))
                .unwrap()
                .rows
                .into_iter()
                .map(|r| (r.quantity, r.t, r.ks_stat, r.pass))
                .collect()
        })
        .collect()
}

fn tally(sweep: &[Vec<(Quantity, f64, f64, bool)>], quantity: Quantity, t: f64) -> (usize, f64) {
    let mut passes = 0;
    let mut worst = 0.0f64;
    for rows in sweep {
        let (_, _, stat, pass) = rows
            .iter()
            .find(|(q, s, _, _)| *q == quantity && *s == t)
            .copied()
            .expect("row present");
        passes += pass as usize;
        worst = worst.max(stat);
    }
    (passes, worst)
}

fn threshold() -> f64 {
    KsLevel::P01.threshold(REPLICATES, REPLICATES)
}

fn marginal(sweep: &[Vec<(Quantity, f64, f64, bool)>]) -> Outcome {
    let (passes, worst) = tally(sweep, Quantity::S, 1.0);
    Outcome {
        pass: passes >= 9,
        detail: format!(
            "S_n(1) vs Z(1), n=5000: {passes}/10 seeds below {:.4} (worst KS {worst:.4})",
            threshold()
        ),
    }
}

fn functional(sweep: &[Vec<(Quantity, f64, f64, bool)>]) -> Outcome {
    let (p1, w1) = tally(sweep, Quantity::Y, 1.0);
    let (p05, w05) = tally(sweep, Quantity::Y, 0.5);
    Outcome {
        pass: p1 >= 9 && p05 >= 9,
        detail: format!(
            "Y_n vs ∫sin(Z-)dZ, n=5000: t=1 {p1}/10 (worst {w1:.4}), t=0.5 {p05}/10 (worst {w05:.4}), threshold {:.4}",
            threshold()
        ),
    }
}

fn truncated_regime() -> Outcome {
    let sweep = seed_sweep(1.2, Regime::Theorem2 { epsilon: 0.1 });
    let (passes, worst) = tally(&sweep, Quantity::Y, 1.0);
    Outcome {
        pass: passes >= 9,
        detail: format!(
            "alpha=1.2, eps=0.1: Y_n^eps(1) vs ∫sin(Z^eps-)dZ^eps {passes}/10 seeds below {:.4} (worst KS {worst:.4})",
            threshold()
        ),
    }
}

fn characteristic_gaps(law: &TailLaw, n: usize, paths: usize) -> CharGaps {
    let (h, f) = (TruncationFn::taper(), FunctionalF::sine());
    let grid = uniform_grid(50);
    let kernel = PreLimitKernel::new(*law, n, h).unwrap();
    let pre = PreLimitCoefficients::new(&kernel, &f).unwrap();
    let lim = LimitCoefficients::new(&law.limit_measure(), &h, &f).unwrap();
    let gaps: Vec<CharGaps> = (0..paths)
        .into_par_iter()
        .map(|j| {
            let samples = law.sample_n(
                n,
                &mut stream(55, n as u64, j as u64, StreamPurpose::PreLimit),
            );
            let (s_path, _) = build_functional_paths(&samples, &kernel.sc, &f).unwrap();
            let a = pre.characteristics(&samples, &grid).unwrap();
            let b = lim.characteristics(&s_path, &grid).unwrap();
            a.sup_gaps(&b).unwrap()
        })
        .collect();
    let m = paths as f64;
    gaps.iter().fold(CharGaps::default(), |acc, g| CharGaps {
        b1: acc.b1 + g.b1 / m,
        c11: acc.c11 + g.c11 / m,
        c12: acc.c12 + g.c12 / m,
        c22: acc.c22 + g.c22 / m,
    })
}

fn characteristics_convergence() -> Outcome {
    let law = TailLaw::new(0.8, 0.7).unwrap();
    let small = characteristic_gaps(&law, 100, 100);
    let large = characteristic_gaps(&law, 10_000, 100);
    let ratio = |a: f64, b: f64| a / b;
    let (rb, r11, r22) = (
        ratio(small.b1, large.b1),
        ratio(small.c11, large.c11),
        ratio(small.c22, large.c22),
    );
    Outcome {
        pass: rb >= 2.0 && r11 >= 2.0 && r22 >= 2.0,
        detail: format!(
            "mean sup gap n=1e2 -> 1e4: B1 {:.2e} -> {:.2e} (x{rb:.1}), C11 {:.2e} -> {:.2e} (x{r11:.1}), \
             C22 {:.2e} -> {:.2e} (x{r22:.1}); need x2 each",
            small.b1, large.b1, small.c11, large.c11, small.c22, large.c22
        ),
    }
}

fn limit_equivalence() -> Outcome {
    let (n, alpha) = (100_000usize, 0.8);
    let law = TailLaw::new(alpha, 0.7).unwrap();
    let h = TruncationFn::taper();
    let sc = ScalingConstants::for_law(&law, n, &h).unwrap();
    let sim = LevySimulator::new(&law.limit_measure(), &LimitPathConfig::direct(1e-4), &h).unwrap();
    let mut passes = 0;
    let mut worst = 0.0f64;
    for &seed in &SEEDS {
        let prelimit: Vec<f64> = (0..REPLICATES)
            .into_par_iter()
            .map(|j| {
                let mut rng = stream(seed, n as u64, j as u64, StreamPurpose::PreLimit);
                (0..n).map(|_| law.sample(&mut rng) / sc.b_n - sc.c_n).sum()
            })
            .collect();
        let limit: Vec<f64> = (0..REPLICATES)
            .into_par_iter()
            .map(|j| {
                let mut rng = stream(seed, n as u64, j as u64, StreamPurpose::Limit);
                sim.simulate(&mut rng).terminal()
            })
            .collect();
        let ks = ks_two_sample(&prelimit, &limit, KsLevel::P01).unwrap();
        passes += ks.pass as usize;
        worst = worst.max(ks.statistic);
    }
    Outcome {
        pass: passes >= 9,
        detail: format!(
            "S_n(1), n=1e5 vs Z(1): {passes}/10 seeds below {:.4} (worst KS {worst:.4})",
            threshold()
        ),
    }
}

fn centering_sensitivity() -> Outcome {
    let (n, alpha) = (10_000usize, 0.5);
    let law = TailLaw::new(alpha, 1.0).unwrap();
    let f = FunctionalF::sine();
    let sc = ScalingConstants::for_law(&law, n, &TruncationFn::taper()).unwrap();
    let terminal_y = |seed: u64, purpose: StreamPurpose, centering: f64| -> Vec<f64> {
        (0..REPLICATES)
            .into_par_iter()
            .map(|j| {
                let samples = law.sample_n(n, &mut stream(seed, n as u64, j as u64, purpose));
                functional_values_at(&samples, |x| x / sc.b_n - centering, &f, &[1.0])[0].1
            })
            .collect()
    };
    let mut fails = 0;
    let mut weakest = f64::INFINITY;
    for &seed in &SEEDS {
        let centered = terminal_y(seed, StreamPurpose::PreLimit, sc.c_n);
        let dropped = terminal_y(seed, StreamPurpose::Uncentered, 0.0);
        let ks = ks_two_sample(&centered, &dropped, KsLevel::P01).unwrap();
        fails += (!ks.pass) as usize;
        weakest = weakest.min(ks.statistic);
    }
    Outcome {
        pass: fails >= 9,
        detail: format!(
            "p=1, alpha=0.5, n=1e4, c_n={:.4}: KS(centered, uncentered Y_n(1)) fails in {fails}/10 seeds \
             (smallest KS {weakest:.4} vs threshold {:.4})",
            sc.c_n,
            threshold()
        ),
    }
}

fn determinism() -> Outcome {
    let cfg = ExperimentConfig {
        experiment_id: "determinism".into(),
        alpha: 1.3,
        p: 0.6,
        n_values: vec![64, 500],
        replicate_count: 300,
        regime: Regime::Theorem2 { epsilon: 0.2 },
        eval_times: vec![0.25, 0.5, 1.0],
        master_seed: 2024,
        char_paths: 8,
        char_grid: 20,
        ..ExperimentConfig::default()
    };
    let csv_with = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| rows_to_csv(&run_convergence_experiment(&cfg).unwrap().rows))
    };
    let runs = [csv_with(1), csv_with(1), csv_with(2), csv_with(7)];
    let identical = runs.iter().all(|r| r.as_bytes() == runs[0].as_bytes());
    Outcome {
        pass: identical,
        detail: format!(
            "4 runs (threads 1, 1, 2, 7), {} bytes each: {}",
            runs[0].len(),
            if identical {
                "byte-identical"
            } else {
                "DIFFER"
            }
        ),
    }
}

fn estimator_sanity() -> Outcome {
    let (n, k) = (100_000usize, 1000usize);
    let mut hill_ok = true;
    let mut hill_summary = Vec::new();
    for alpha in [0.5, 0.8, 1.2] {
        let law = TailLaw::new(alpha, 0.7).unwrap();
        let within = SEEDS
            .iter()
            .filter(|&&seed| {
                let samples = law.sample_n(n, &mut stream(seed, n as u64, 0, StreamPurpose::Hill));
                let est = hill_estimate(&samples, k).unwrap();
                (est - alpha).abs() / alpha <= 0.10
            })
            .count();
        hill_ok &= within >= 9;
        hill_summary.push(format!("alpha={alpha}: {within}/10"));
    }
    let law = TailLaw::new(0.8, 0.7).unwrap();
    let trials = 200usize;
    let passes = (0..trials)
        .into_par_iter()
        .filter(|&j| {
            let a = law.sample_n(
                2000,
                &mut stream(77, 2000, j as u64, StreamPurpose::PreLimit),
            );
            let b = law.sample_n(2000, &mut stream(77, 2000, j as u64, StreamPurpose::Limit));
            ks_two_sample(&a, &b, KsLevel::P01).unwrap().pass
        })
        .count();
    let rate = passes as f64 / trials as f64;
    Outcome {
        pass: hill_ok && rate >= 0.97,
        detail: format!(
            "Hill within 10% [{}] (need >= 9/10 each); KS null pass rate {rate:.3} over {trials} trials (need >= 0.97)",
            hill_summary.join(", ")
        ),
    }
}

fn main() -> ExitCode {
    let mut all = true;
    let mut report = |id: usize, name: &str, run: &mut dyn FnMut() -> Outcome| {
        let started = Instant::now();
        let outcome = run();
        all &= outcome.pass;
        println!(
            "criterion {id} [{name}]: {} - {} ({:.1} s)",
            if outcome.pass { "PASS" } else { "FAIL" },
            outcome.detail,
            started.elapsed().as_secs_f64()
        );
    };
    report(1, "vague convergence identity", &mut vague_identity);
    let sweep = std::cell::OnceCell::new();
    let sweep = || sweep.get_or_init(|| seed_sweep(0.8, Regime::Theorem1));
    report(2, "marginal weak convergence", &mut || marginal(sweep()));
    report(
        3,
        "functional weak convergence",
        &mut || functional(sweep()),
    );
    report(4, "truncated regime", &mut truncated_regime);
    report(
        5,
        "characteristics convergence",
        &mut characteristics_convergence,
    );
    report(6, "limit construction equivalence", &mut limit_equivalence);
    report(7, "centering sensitivity", &mut centering_sensitivity);
    report(8, "determinism", &mut determinism);
    report(9, "estimator sanity", &mut estimator_sanity);
    if all {
        println!("acceptance: all criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: FAILURES above");
        ExitCode::FAILURE
    }
}

//! Seeded, replicate-parallel convergence experiments.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, Regime};
use super::report::{ExperimentReport, Quantity, ReportRow};
use super::seeds::{stream, StreamPurpose};
use crate::diagnostics::{default_ecf_grid, ecf_distance, hill_estimate, ks_two_sample};
use crate::error::Result;
use crate::heavy_tail_model::ScalingConstants;
use crate::partial_sum_engine::{build_functional_paths, functional_values_at, TruncatedScaling};
use crate::prelimit_characteristics::{
    vague_check, vague_grid_floor, PreLimitCoefficients, PreLimitKernel,
};
use crate::stable_limit_sim::{
    euler_integral_with, uniform_grid, CharGaps, LevySimulator, LimitCoefficients,
};

/// Draws of `(S, Y)` at one evaluation time, pre-limit and limit side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSlice {
    pub t: f64,
    pub prelimit_s: Vec<f64>,
    pub prelimit_y: Vec<f64>,
    pub limit_s: Vec<f64>,
    pub limit_y: Vec<f64>,
}

/// Everything simulated for one sample size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawBlock {
    pub n: usize,
    pub b_n: f64,
    /// Centering subtracted from each summand (`c_n`, or `c_eps` when truncated).
    pub centering: f64,
    pub slices: Vec<TimeSlice>,
    /// Mean over paths of the characteristic gaps up to each evaluation time.
    pub char_gaps: Vec<CharGaps>,
    pub vague_sup: f64,
    pub hill_alpha: f64,
}

/// Raw simulation output; the report is a pure function of it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawResults {
    pub config: ExperimentConfig,
    pub blocks: Vec<RawBlock>,
}

struct ReplicateOutcome {
    prelimit: Vec<(f64, f64)>,
    limit: Vec<(f64, f64)>,
    gaps: Option<Vec<CharGaps>>,
}

/// Sample size and tail-sample rank used for the Hill check at `n`.
pub fn hill_design(n: usize) -> (usize, usize) {
    let m = n.max(10_000);
    (m, (m / 100).clamp(10, 1000))
}

/// Deterministic points added to the Euler grid so a drifting limit path is
/// sampled between its (possibly sparse) jumps.
const EULER_MESH: usize = 4096;

fn simulate_block(cfg: &ExperimentConfig, n: usize) -> Result<RawBlock> {
    let law = cfg.law()?;
    let h = cfg.truncation();
    let f = cfg.functional()?;
    let rho = law.limit_measure();
    let sc = ScalingConstants::for_law(&law, n, &h)?;
    let truncated = match cfg.regime {
        Regime::Theorem1 => None,
        Regime::Theorem2 { epsilon } => Some(TruncatedScaling::for_law(
            &law,
            n,
            &h,
            epsilon,
            cfg.indicator,
        )?),
    };
    let simulator = LevySimulator::new(&rho, &cfg.limit_config(), &h)?;

    let kernel = PreLimitKernel {
        law,
        sc,
        h,
        kernel_law: Default::default(),
    };
    let pre_coeffs = PreLimitCoefficients::new(&kernel, &f)?;
    let lim_coeffs = LimitCoefficients::new(&rho, &h, &f)?;
    let mut char_grid = uniform_grid(cfg.char_grid);
    char_grid.extend_from_slice(&cfg.eval_times);
    char_grid.sort_by(f64::total_cmp);
    char_grid.dedup();

    let times = &cfg.eval_times;
    let mut euler_grid = uniform_grid(EULER_MESH);
    euler_grid.extend_from_slice(times);
    let outcomes = (0..cfg.replicate_count)
        .into_par_iter()
        .map(|j| -> Result<ReplicateOutcome> {
            let mut rng = stream(cfg.master_seed, n as u64, j as u64, StreamPurpose::PreLimit);
            let samples = law.sample_n(n, &mut rng);
            let prelimit = match &truncated {
                None => functional_values_at(&samples, |x| x / sc.b_n - sc.c_n, &f, times),
                Some(ts) => functional_values_at(&samples, |x| ts.summand(x), &f, times),
            };

            let mut rng = stream(cfg.master_seed, n as u64, j as u64, StreamPurpose::Limit);
            let z = simulator.simulate(&mut rng);
            let mesh: &[f64] = if z.drift() != 0.0 { &euler_grid } else { times };
            let y = euler_integral_with(&z, |x| f.eval(x), mesh)?;
            let limit = times
                .iter()
                .map(|&t| (z.value_at(t), y.value_at(t)))
                .collect();

            let gaps = if j < cfg.char_paths {
                let (s_path, _) = build_functional_paths(&samples, &sc, &f)?;
                let pre = pre_coeffs.characteristics(&samples, &char_grid)?;
                let lim = lim_coeffs.characteristics(&s_path, &char_grid)?;
                Some(
                    times
                        .iter()
                        .map(|&t| pre.sup_gaps_until(&lim, t))
                        .collect::<Result<Vec<_>>>()?,
                )
            } else {
                None
            };
            Ok(ReplicateOutcome {
                prelimit,
                limit,
                gaps,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let slices = times
        .iter()
        .enumerate()
        .map(|(k, &t)| TimeSlice {
            t,
            prelimit_s: outcomes.iter().map(|o| o.prelimit[k].0).collect(),
            prelimit_y: outcomes.iter().map(|o| o.prelimit[k].1).collect(),
            limit_s: outcomes.iter().map(|o| o.limit[k].0).collect(),
            limit_y: outcomes.iter().map(|o| o.limit[k].1).collect(),
        })
        .collect();

    let mut char_gaps = vec![CharGaps::default(); times.len()];
    let mut paths = 0usize;
    for gaps in outcomes.iter().filter_map(|o| o.gaps.as_ref()) {
        paths += 1;
        for (acc, g) in char_gaps.iter_mut().zip(gaps) {
            acc.b1 += g.b1;
            acc.c11 += g.c11;
            acc.c12 += g.c12;
            acc.c22 += g.c22;
        }
    }
    for acc in &mut char_gaps {
        let m = paths as f64;
        *acc = CharGaps {
            b1: acc.b1 / m,
            c11: acc.c11 / m,
            c12: acc.c12 / m,
            c22: acc.c22 / m,
        };
    }

    let floor = vague_grid_floor(&kernel);
    let vague_grid: Vec<f64> = (0..100)
        .map(|i| floor * (10.0 / floor).powf(i as f64 / 99.0))
        .collect();
    let vague_sup = vague_check(&kernel, &rho, &vague_grid)?;

    let (hill_size, hill_k) = hill_design(n);
    let mut rng = stream(cfg.master_seed, n as u64, 0, StreamPurpose::Hill);
    let hill_alpha = hill_estimate(&law.sample_n(hill_size, &mut rng), hill_k)?;

    Ok(RawBlock {
        n,
        b_n: sc.b_n,
        centering: truncated.map_or(sc.c_n, |ts| ts.c_eps),
        slices,
        char_gaps,
        vague_sup,
        hill_alpha,
    })
}

/// Simulates every `n` of the config. Replicate `j` at size `n` draws only
/// from streams keyed by `(master_seed, n, j)`, so the output does not depend
/// on the thread count.
pub fn simulate_experiment(cfg: &ExperimentConfig) -> Result<RawResults> {
    cfg.validate()?;
    let blocks = cfg
        .n_values
        .iter()
        .map(|&n| simulate_block(cfg, n))
        .collect::<Result<Vec<_>>>()?;
    Ok(RawResults {
        config: cfg.clone(),
        blocks,
    })
}

/// KS and ECF comparisons of `S`, `Y` and `S + Y` at each `(n, t)`.
pub fn build_report(raw: &RawResults) -> Result<ExperimentReport> {
    let cfg = &raw.config;
    let ecf_grid = default_ecf_grid();
    let mut rows = Vec::new();
    for block in &raw.blocks {
        for (slice, gaps) in block.slices.iter().zip(&block.char_gaps) {
            let pair = |s: &[f64], y: &[f64]| -> Vec<f64> {
                s.iter().zip(y).map(|(a, b)| a + b).collect()
            };
            let comparisons = [
                (Quantity::S, slice.prelimit_s.clone(), slice.limit_s.clone()),
                (Quantity::Y, slice.prelimit_y.clone(), slice.limit_y.clone()),
                (
                    Quantity::PairSum,
                    pair(&slice.prelimit_s, &slice.prelimit_y),
                    pair(&slice.limit_s, &slice.limit_y),
                ),
            ];
            for (quantity, pre, lim) in comparisons {
                let ks = ks_two_sample(&pre, &lim, cfg.ks_level)?;
                rows.push(ReportRow {
                    experiment_id: cfg.experiment_id.clone(),
                    n: block.n,
                    t: slice.t,
                    quantity,
                    ks_stat: ks.statistic,
                    ks_threshold: ks.threshold,
                    pass: ks.pass,
                    ecf_dist: ecf_distance(&pre, &lim, &ecf_grid)?,
                    b1_gap: gaps.b1,
                    c11_gap: gaps.c11,
                    c22_gap: gaps.c22,
                    vague_sup: block.vague_sup,
                    hill_alpha: block.hill_alpha,
                    seed: cfg.master_seed,
                });
            }
        }
    }
    Ok(ExperimentReport {
        config: cfg.clone(),
        rows,
    })
}

pub fn run_convergence_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    build_report(&simulate_experiment(cfg)?)
}

/// Path of the stored raw results for an experiment in `dir`.
pub fn raw_results_path(dir: &Path, experiment_id: &str) -> PathBuf {
    dir.join(format!("{experiment_id}.raw.json"))
}

pub fn write_raw_results(raw: &RawResults, dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = raw_results_path(dir, &raw.config.experiment_id);
    fs::write(&path, serde_json::to_string(raw)?)?;
    Ok(path)
}

pub fn read_raw_results(path: &Path) -> Result<RawResults> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

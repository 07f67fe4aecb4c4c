use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use stable_limits::harness::{self, report, OutputFormat};
use stable_limits::prelimit_characteristics::{
    ca_family_check, vague_check, vague_grid_floor, PreLimitCoefficients, PreLimitKernel,
};
use stable_limits::stable_limit_sim::{uniform_grid, CharGaps, LimitCoefficients};
use stable_limits::{partial_sum_engine, ExperimentConfig, TailLaw};

#[derive(Parser, Debug)]
#[command(
    name = "stable-limits",
    version,
    about = "Heavy-tailed partial-sum functionals against their stable limits"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalOpts {
    /// Experiment config file (flat `key = value`).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; affects speed only, never results.
    #[arg(long, global = true, env = "STABLE_LIMITS_THREADS")]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dump draws of the heavy-tailed law.
    Sample {
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        /// Divide each draw by b_n and subtract c_n for this n.
        #[arg(long)]
        scaled_n: Option<usize>,
    },
    /// Compare the scaled tail measure with the limit Lévy measure.
    VagueCheck {
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        n: Vec<usize>,
        #[arg(long, default_value_t = 10.0)]
        x_max: f64,
        #[arg(long, default_value_t = 100)]
        points: usize,
        /// `g_a` parameters for the integral check.
        #[arg(long, value_delimiter = ',', default_value = "1,2")]
        a: Vec<f64>,
    },
    /// Mean gaps between pre-limit and limit characteristics along realized paths.
    Chars {
        #[arg(long, default_value_t = 100)]
        paths: usize,
    },
    /// Run the full convergence experiment described by `--config`.
    Experiment,
    /// Re-emit a report from stored raw results.
    Report {
        /// Raw results file written by `experiment`.
        #[arg(long)]
        raw: PathBuf,
        /// Output directory (defaults to the one recorded in the results).
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
}

fn load_config(global: &GlobalOpts) -> Result<ExperimentConfig> {
    let mut cfg = match &global.config {
        Some(path) => ExperimentConfig::from_file(path)
            .with_context(|| format!("reading {}", path.display()))?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = global.seed {
        cfg.master_seed = seed;
    }
    Ok(cfg)
}

fn require_config(global: &GlobalOpts) -> Result<ExperimentConfig> {
    if global.config.is_none() {
        return Err(
            stable_limits::Error::Config("this command needs --config <path>".into()).into(),
        );
    }
    load_config(global)
}

fn print_table(
    format: Format,
    header: &[&str],
    rows: &[Vec<String>],
    json_rows: Vec<serde_json::Value>,
) -> Result<()> {
    let mut out = io::stdout().lock();
    match format {
        Format::Csv => {
            writeln!(out, "{}", header.join(","))?;
            for r in rows {
                writeln!(out, "{}", r.join(","))?;
            }
        }
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&json_rows)?)?,
    }
    Ok(())
}

fn cmd_sample(
    global: &GlobalOpts,
    alpha: Option<f64>,
    p: Option<f64>,
    count: usize,
    scaled_n: Option<usize>,
) -> Result<()> {
    let cfg = load_config(global)?;
    let law = TailLaw::new(alpha.unwrap_or(cfg.alpha), p.unwrap_or(cfg.p))?;
    let mut rng = harness::stream(cfg.master_seed, 0, 0, harness::StreamPurpose::PreLimit);
    let mut draws = law.sample_n(count, &mut rng);
    if let Some(n) = scaled_n {
        let sc = stable_limits::ScalingConstants::for_law(&law, n, &cfg.truncation())?;
        draws.iter_mut().for_each(|x| *x = *x / sc.b_n - sc.c_n);
    }
    let rows: Vec<Vec<String>> = draws
        .iter()
        .enumerate()
        .map(|(i, x)| vec![i.to_string(), report::format_float(*x)])
        .collect();
    let json_rows = draws
        .iter()
        .enumerate()
        .map(|(i, x)| json!({"index": i, "x": x}))
        .collect();
    print_table(global.format, &["index", "x"], &rows, json_rows)
}

fn cmd_vague(
    global: &GlobalOpts,
    alpha: Option<f64>,
    p: Option<f64>,
    ns: &[usize],
    x_max: f64,
    points: usize,
    a: &[f64],
) -> Result<()> {
    let cfg = load_config(global)?;
    let law = TailLaw::new(alpha.unwrap_or(cfg.alpha), p.unwrap_or(cfg.p))?;
    let ns = if ns.is_empty() {
        cfg.n_values.clone()
    } else {
        ns.to_vec()
    };
    let rho = law.limit_measure();
    let mut rows = Vec::new();
    let mut json_rows = Vec::new();
    for &n in &ns {
        let kernel = PreLimitKernel::new(law, n, cfg.truncation())?;
        let floor = vague_grid_floor(&kernel);
        let m = points.max(2);
        let grid: Vec<f64> = (0..m)
            .map(|i| floor + (x_max - floor) * i as f64 / (m - 1) as f64)
            .collect();
        let sup = vague_check(&kernel, &rho, &grid)?;
        let family = ca_family_check(&kernel, &rho, a)?;
        for (a, d) in &family {
            rows.push(vec![
                n.to_string(),
                report::format_float(sup),
                report::format_float(*a),
                report::format_float(*d),
            ]);
            json_rows.push(json!({"n": n, "vague_sup": sup, "a": a, "ga_discrepancy": d}));
        }
    }
    print_table(
        global.format,
        &["n", "vague_sup", "a", "ga_discrepancy"],
        &rows,
        json_rows,
    )
}

fn cmd_chars(global: &GlobalOpts, paths: usize) -> Result<()> {
    let cfg = require_config(global)?;
    let law = cfg.law()?;
    let (h, f) = (cfg.truncation(), cfg.functional()?);
    let grid = uniform_grid(cfg.char_grid);
    let limit = LimitCoefficients::new(&law.limit_measure(), &h, &f)?;
    let mut rows = Vec::new();
    let mut json_rows = Vec::new();
    for &n in &cfg.n_values {
        let kernel = PreLimitKernel::new(law, n, h)?;
        let pre = PreLimitCoefficients::new(&kernel, &f)?;
        let mut mean = CharGaps::default();
        for j in 0..paths {
            let mut rng = harness::stream(
                cfg.master_seed,
                n as u64,
                j as u64,
                harness::StreamPurpose::PreLimit,
            );
            let samples = law.sample_n(n, &mut rng);
            let (s_path, _) = partial_sum_engine::build_functional_paths(&samples, &kernel.sc, &f)?;
            let g = pre
                .characteristics(&samples, &grid)?
                .sup_gaps(&limit.characteristics(&s_path, &grid)?)?;
            mean.b1 += g.b1 / paths as f64;
            mean.c11 += g.c11 / paths as f64;
            mean.c12 += g.c12 / paths as f64;
            mean.c22 += g.c22 / paths as f64;
        }
        rows.push(
            std::iter::once(n.to_string())
                .chain([mean.b1, mean.c11, mean.c12, mean.c22].map(report::format_float))
                .collect(),
        );
        json_rows.push(json!({"n": n, "b1_gap": mean.b1, "c11_gap": mean.c11, "c12_gap": mean.c12, "c22_gap": mean.c22}));
    }
    print_table(
        global.format,
        &["n", "b1_gap", "c11_gap", "c12_gap", "c22_gap"],
        &rows,
        json_rows,
    )
}

fn cmd_experiment(global: &GlobalOpts) -> Result<()> {
    let cfg = require_config(global)?;
    let started = Instant::now();
    let raw = harness::simulate_experiment(&cfg)?;
    let report = harness::build_report(&raw)?;
    let raw_path = harness::write_raw_results(&raw, &cfg.output_dir)?;
    let path = harness::emit_report(&report, global.format.into(), &cfg.output_dir)?;
    let passed = report.rows.iter().filter(|r| r.pass).count();
    eprintln!(
        "{}: {passed}/{} comparisons pass, {:.1}s",
        cfg.experiment_id,
        report.rows.len(),
        started.elapsed().as_secs_f64()
    );
    println!("{}", path.display());
    println!("{}", raw_path.display());
    Ok(())
}

fn cmd_report(global: &GlobalOpts, raw: &Path, output_dir: Option<&Path>) -> Result<()> {
    let raw = harness::read_raw_results(raw)?;
    let report = harness::build_report(&raw)?;
    let dir = output_dir.unwrap_or(&raw.config.output_dir);
    let path = harness::emit_report(&report, global.format.into(), dir)?;
    println!("{}", path.display());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    if let Some(threads) = cli.global.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("configuring worker threads")?;
    }
    let g = &cli.global;
    match &cli.command {
        Command::Sample {
            alpha,
            p,
            count,
            scaled_n,
        } => cmd_sample(g, *alpha, *p, *count, *scaled_n),
        Command::VagueCheck {
            alpha,
            p,
            n,
            x_max,
            points,
            a,
        } => cmd_vague(g, *alpha, *p, n, *x_max, *points, a),
        Command::Chars { paths } => cmd_chars(g, *paths),
        Command::Experiment => cmd_experiment(g),
        Command::Report { raw, output_dir } => cmd_report(g, raw, output_dir.as_deref()),
    }
}

/// 1 config, 2 numerical, 3 I/O.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<stable_limits::Error>() {
            return e.exit_code() as u8;
        }
        if cause.downcast_ref::<io::Error>().is_some()
            || cause.downcast_ref::<serde_json::Error>().is_some()
        {
            return 3;
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let mut message = e.to_string();
            for cause in e.chain().skip(1) {
                let text = cause.to_string();
                if !message.contains(&text) {
                    message = format!("{message}: {text}");
                }
            }
            eprintln!("error: {message}");
            ExitCode::from(exit_code(&e))
        }
    }
}

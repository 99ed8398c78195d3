use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use levybar::estimator::{estimate_from_ensemble, EstimateOptions};
use levybar::experiment::csv::{fmt_float, CsvWriter};
use levybar::experiment::{emit_figures, run_experiment, write_experiment, ExperimentConfig, Figure};
use levybar::{
    path_from_increments, simulate_increments, IncrementSeries, OracleResult, QuasiEnsemble,
    SamplingScheme, StepPath,
};

#[derive(Parser)]
#[command(name = "levybar", version, about = "Optimal dividend barrier estimation from one observed surplus path")]
struct Cli {
    /// Experiment configuration file (flat `key = value`); the reference design when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Overrides `master_seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Overrides `output_dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Refine each grid argmax over exact breakpoints.
    #[arg(long, global = true)]
    refine: bool,

    /// Worker threads (defaults to the number of CPUs). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one observed path and write `path.csv` (k, t, value).
    Simulate {
        /// Step size; defaults to the first entry of `h_list`.
        #[arg(long)]
        h: Option<f64>,
    },
    /// Estimate the barrier from a path CSV or a freshly simulated path.
    Estimate {
        /// Path CSV with `t` and `value` columns on a regular grid.
        #[arg(long)]
        path: Option<PathBuf>,
        /// Ensemble size; defaults to the first entry of `alpha_list`.
        #[arg(long)]
        alpha: Option<usize>,
        /// Step size for a simulated path; defaults to the first entry of `h_list`.
        #[arg(long)]
        h: Option<f64>,
    },
    /// Print the Lundberg roots and optimal barrier; write the value table `oracle.csv`.
    Oracle,
    /// Run every (alpha, h) cell and write `table1.csv` and `estimates.csv`.
    Experiment,
    /// Write figure data as CSV.
    Figures {
        /// Comma-separated subset of: paths, quasi, valuecurves, contrast, boxplot.
        #[arg(long, value_delimiter = ',')]
        which: Vec<String>,
    },
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::from_file(path)
            .with_context(|| format!("reading config {}", path.display()))?,
        None => ExperimentConfig::reference(),
    };
    if let Some(seed) = cli.seed {
        cfg.master_seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    }
    cfg.refine |= cli.refine;
    Ok(cfg)
}

fn scheme_for(cfg: &ExperimentConfig, h: Option<f64>) -> Result<SamplingScheme> {
    let h = h.unwrap_or(cfg.h_list[0]);
    Ok(SamplingScheme::from_horizon(cfg.horizon, h)?)
}

/// Reads a path CSV with `t` and `value` columns.
fn read_path(file: &Path) -> Result<StepPath> {
    let text = fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().context("empty path file")?.split(',').map(str::trim).collect();
    let column = |name: &str| {
        header
            .iter()
            .position(|h| *h == name)
            .with_context(|| format!("path file has no `{name}` column"))
    };
    let (t_col, v_col) = (column("t")?, column("value")?);

    let mut times = Vec::new();
    let mut values = Vec::new();
    for (i, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parse = |col: usize| -> Result<f64> {
            let field = fields.get(col).with_context(|| format!("line {}: missing field", i + 2))?;
            field.parse().with_context(|| format!("line {}: bad number {field:?}", i + 2))
        };
        times.push(parse(t_col)?);
        values.push(parse(v_col)?);
    }
    if values.len() < 2 {
        bail!("path file needs at least two grid points");
    }
    let h = times[1] - times[0];
    let n = values.len() - 1;
    for (k, t) in times.iter().enumerate() {
        if (t - times[0] - k as f64 * h).abs() > 1e-9 * (1.0 + t.abs()) {
            bail!("grid times are not equally spaced at row {}", k + 2);
        }
    }
    Ok(StepPath::from_values(values, SamplingScheme::new(h, n)?)?)
}

fn simulate(cfg: &ExperimentConfig, h: Option<f64>) -> Result<()> {
    let scheme = scheme_for(cfg, h)?;
    let inc = simulate_increments(&cfg.model, scheme, cfg.master_seed);
    let path = path_from_increments(cfg.model.u(), &inc);
    fs::create_dir_all(&cfg.output_dir)?;
    let file = cfg.output_dir.join("path.csv");
    let mut out = CsvWriter::create(&file, &["k", "t", "value"])?;
    for (k, v) in path.values().iter().enumerate() {
        out.row(&[k.to_string(), fmt_float(scheme.time(k)), fmt_float(*v)])?;
    }
    out.finish()?;
    println!("wrote {}", file.display());
    Ok(())
}

fn estimate(cfg: &ExperimentConfig, path: Option<&Path>, alpha: Option<usize>, h: Option<f64>) -> Result<()> {
    let (u0, inc): (f64, IncrementSeries) = match path {
        Some(file) => {
            let observed = read_path(file)?;
            (observed.u0(), observed.increments())
        }
        None => {
            let scheme = scheme_for(cfg, h)?;
            (cfg.model.u(), simulate_increments(&cfg.model, scheme, cfg.master_seed))
        }
    };
    let alpha = alpha.unwrap_or(cfg.alpha_list[0]);
    let ensemble = QuasiEnsemble::new(u0, &inc, alpha, cfg.master_seed);
    let est = estimate_from_ensemble(
        &ensemble,
        &cfg.grid.points(),
        cfg.r,
        EstimateOptions { refine: cfg.refine },
    )?;
    for w in &est.diagnostics.warnings {
        eprintln!("warning: {w}");
    }

    fs::create_dir_all(&cfg.output_dir)?;
    let file = cfg.output_dir.join("contrast.csv");
    let mut out = CsvWriter::create(&file, &["theta", "mean_value"])?;
    for (t, v) in est.curve.thetas.iter().zip(&est.curve.values) {
        out.row(&[fmt_float(*t), fmt_float(*v)])?;
    }
    out.finish()?;

    let d = &est.diagnostics;
    println!("theta_hat = {}", fmt_float(est.theta_hat));
    println!("grid_theta = {}", fmt_float(est.grid_theta));
    println!("contrast_max = {}", fmt_float(est.contrast_max));
    println!("alpha = {}, h = {}, n = {}, seed = {}", d.alpha, fmt_float(d.h), d.n, d.seed);
    println!("wrote {}", file.display());
    Ok(())
}

fn oracle(cfg: &ExperimentConfig) -> Result<()> {
    let oracle = OracleResult::new(&cfg.model, cfg.r)?;
    let roots = oracle.roots.roots();
    println!(
        "roots = {}, {}, {}",
        fmt_float(roots[0]),
        fmt_float(roots[1]),
        fmt_float(roots[2])
    );
    println!("b_star = {}", fmt_float(oracle.b_star));
    println!(
        "value_at_b_star = {}",
        fmt_float(oracle.value_at(cfg.model.u().min(oracle.b_star), oracle.b_star)?)
    );

    fs::create_dir_all(&cfg.output_dir)?;
    let file = cfg.output_dir.join("oracle.csv");
    let mut out = CsvWriter::create(&file, &["b", "value"])?;
    for b in cfg.grid.points() {
        out.row(&[fmt_float(b), fmt_float(oracle.value_at(cfg.model.u(), b)?)])?;
    }
    out.finish()?;
    println!("wrote {}", file.display());
    Ok(())
}

fn experiment(cfg: &ExperimentConfig) -> Result<()> {
    let output = run_experiment(cfg)?;
    write_experiment(&output, &cfg.output_dir)?;
    println!("alpha,h,B,mean,std,bias,mse");
    for r in &output.reports {
        println!(
            "{},{},{},{:.3},{:.3},{:.2},{:.2}",
            r.alpha, r.h, r.replications, r.mean, r.std, r.bias, r.mse
        );
    }
    println!("wrote {}", cfg.output_dir.display());
    Ok(())
}

fn figures(cfg: &ExperimentConfig, which: &[String]) -> Result<()> {
    let figures: Vec<Figure> = if which.is_empty() {
        Figure::ALL.to_vec()
    } else {
        which.iter().map(|w| w.parse()).collect::<Result<_, _>>()?
    };
    for file in emit_figures(cfg, &figures)? {
        println!("wrote {}", file.display());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let cfg = load_config(&cli)?;
    match &cli.command {
        Command::Simulate { h } => simulate(&cfg, *h),
        Command::Estimate { path, alpha, h } => estimate(&cfg, path.as_deref(), *alpha, *h),
        Command::Oracle => oracle(&cfg),
        Command::Experiment => experiment(&cfg),
        Command::Figures { which } => figures(&cfg, which),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

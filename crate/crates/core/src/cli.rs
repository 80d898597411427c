//! `doa` command line: simulate, estimate, bench, decompose.

use crate::bench::{self, ExperimentConfig, MethodSpec};
use crate::error::{DoaError, Result};
use crate::estimators::{self, Method, MethodParams};
use crate::io::{self, DecomposeInput, ScenarioFile};
use crate::signal_sim::{simulate, toeplitz};
use crate::spectrum::{noise_split_decompose, vandermonde_decompose, DEFAULT_RANK_TOL};
use clap::{Args, Parser, Subcommand};
use std::ffi::OsString;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_UNCONVERGED: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "doa", version, about = "Sparse DOA and line spectral estimation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct Overrides {
    /// Model order K.
    #[arg(long, conflicts_with = "auto_order")]
    order: Option<usize>,
    /// Pick K from the eigen-gap.
    #[arg(long)]
    auto_order: bool,
    /// Residual bound η.
    #[arg(long)]
    eta: Option<f64>,
    /// Regularization weight λ.
    #[arg(long)]
    lambda: Option<f64>,
}

impl Overrides {
    fn apply(&self, p: &mut MethodParams) {
        if let Some(k) = self.order {
            p.order = Some(k);
            p.auto_order = false;
        }
        if self.auto_order {
            p.auto_order = true;
            p.order = None;
        }
        if self.eta.is_some() {
            p.eta = self.eta;
        }
        if self.lambda.is_some() {
            p.lambda = self.lambda;
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw snapshots for a scenario; writes snapshots.csv and truth.json.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one estimator on a simulate output directory; writes spectrum.json.
    Estimate {
        /// Directory holding snapshots.csv and truth.json (the geometry is read from the latter).
        input: PathBuf,
        #[arg(long)]
        method: String,
        /// Method parameters as JSON.
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
        #[arg(long)]
        out: PathBuf,
    },
    /// Monte-Carlo sweep; writes results.csv, timings.csv and summary.json.
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<usize>,
        /// Restrict the sweep to this method.
        #[arg(long)]
        method: Option<String>,
        #[command(flatten)]
        overrides: Overrides,
        #[arg(long)]
        out: PathBuf,
    },
    /// Vandermonde decomposition of the Toeplitz matrix built from a supplied u; writes spectrum.json.
    Decompose {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn exit_code(e: &DoaError) -> i32 {
    match e {
        DoaError::Config(_)
        | DoaError::Json(_)
        | DoaError::UnsupportedGeometry(_)
        | DoaError::InvalidGeometry(_)
        | DoaError::InvalidScenario(_)
        | DoaError::NotRedundancy(_)
        | DoaError::Dimension(_) => EXIT_CONFIG,
        _ => EXIT_FAILURE,
    }
}

fn simulate_cmd(config: &Path, seed: Option<u64>, out: &Path) -> Result<i32> {
    let mut file: ScenarioFile = io::read_json(config)?;
    if let Some(s) = seed {
        file.scenario.seed = s;
    }
    let sim = simulate(&file.scenario, &file.geometry)?;
    std::fs::create_dir_all(out)?;
    io::write_snapshots(&out.join(io::SNAPSHOTS_FILE), sim.y.as_ref())?;
    io::write_json(&out.join(io::TRUTH_FILE), &file)?;
    eprintln!(
        "wrote {}×{} snapshots to {}",
        sim.y.nrows(),
        sim.y.ncols(),
        out.display()
    );
    Ok(EXIT_OK)
}

fn estimate_cmd(
    input: &Path,
    method: &str,
    config: Option<&Path>,
    overrides: &Overrides,
    out: &Path,
) -> Result<i32> {
    let method: Method = method.parse()?;
    let mut params: MethodParams = match config {
        Some(p) => io::read_json(p)?,
        None => MethodParams::default(),
    };
    overrides.apply(&mut params);
    let truth: ScenarioFile = io::read_json(&input.join(io::TRUTH_FILE))?;
    let y = io::read_snapshots(&input.join(io::SNAPSHOTS_FILE))?;
    let rep = estimators::estimate(method, y.as_ref(), &truth.geometry, &params)?;
    std::fs::create_dir_all(out)?;
    io::write_json(&out.join(io::SPECTRUM_FILE), &rep)?;
    if !rep.converged {
        eprintln!("{method}: solver did not converge after {} iterations", rep.iterations);
        return Ok(EXIT_UNCONVERGED);
    }
    eprintln!("{method}: {} components", rep.freqs.len());
    Ok(EXIT_OK)
}

fn bench_cmd(
    config: &Path,
    seed: Option<u64>,
    trials: Option<usize>,
    method: Option<&str>,
    overrides: &Overrides,
    out: &Path,
) -> Result<i32> {
    let mut cfg: ExperimentConfig = io::read_json(config)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(t) = trials {
        cfg.trials = t;
    }
    if let Some(name) = method {
        let m: Method = name.parse()?;
        let spec = cfg
            .methods
            .iter()
            .find(|s| s.name == m)
            .cloned()
            .unwrap_or(MethodSpec {
                name: m,
                params: MethodParams::default(),
            });
        cfg.methods = vec![spec];
    }
    for spec in cfg.methods.iter_mut() {
        overrides.apply(&mut spec.params);
    }
    let res = bench::run_experiment(&cfg)?;
    bench::write_outputs(&res, out)?;
    eprintln!("{} rows written to {}", res.rows.len(), out.display());
    Ok(EXIT_OK)
}

fn decompose_cmd(config: &Path, order: Option<usize>, out: &Path) -> Result<i32> {
    let input: DecomposeInput = io::read_json(config)?;
    let u = input.u();
    if u.is_empty() {
        return Err(DoaError::Config("u must be nonempty".into()));
    }
    let t = toeplitz(&u);
    let tol = input.rank_tol.unwrap_or(DEFAULT_RANK_TOL);
    let mut spec = if input.noise_split {
        noise_split_decompose(t.as_ref(), tol)?
    } else {
        vandermonde_decompose(t.as_ref(), tol)?
    };
    if let Some(k) = order {
        spec = spec.strongest(k);
    }
    let spec = spec.sorted();
    std::fs::create_dir_all(out)?;
    io::write_json(&out.join(io::SPECTRUM_FILE), &spec)?;
    eprintln!("{} components", spec.len());
    Ok(EXIT_OK)
}

/// Parses `args` (program name first) and runs the subcommand; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let res = match &cli.command {
        Command::Simulate { config, seed, out } => simulate_cmd(config, *seed, out),
        Command::Estimate {
            input,
            method,
            config,
            overrides,
            out,
        } => estimate_cmd(input, method, config.as_deref(), overrides, out),
        Command::Bench {
            config,
            seed,
            trials,
            method,
            overrides,
            out,
        } => bench_cmd(config, *seed, *trials, method.as_deref(), overrides, out),
        Command::Decompose { config, order, out } => decompose_cmd(config, *order, out),
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

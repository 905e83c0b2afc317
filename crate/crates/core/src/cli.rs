//! Command-line front end.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use thiserror::Error;

use crate::config::{parse_config, ConfigError, ExperimentConfig, ReferenceChoice};
use crate::estimates::{sup_bound_report, space_lipschitz_report, time_holder_report};
use crate::grid::cells_to_cover;
use crate::harness::{instability_demo, refine_study, Reference};
use crate::oracle::OracleSolution;
use crate::scheme::{solve_region, Field, FieldRegion};
use crate::weak::{field_for_bumps, sbp_report, weak_residual, ResidualMode};

#[derive(Debug, Parser)]
#[command(name = "rdlab", version, about = "Finite-difference lab for scalar reaction-diffusion equations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Write the solution field on the configured window.
    Solve(CommonArgs),
    /// Check the sup, space-Lipschitz and time-Holder bounds.
    Estimates(CommonArgs),
    /// Weak residuals and summation-by-parts checks for each configured bump.
    Weak(CommonArgs),
    /// Mesh-refinement study.
    Converge(CommonArgs),
    /// Growth of the alternating mode for alpha > 1/2.
    UnstableDemo(CommonArgs),
    /// Everything the config enables.
    All(CommonArgs),
}

#[derive(Debug, Clone, PartialEq, Eq, clap::Args)]
pub struct CommonArgs {
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,
    /// Output directory, overriding `output.dir`.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Permit alpha > 1/2 on the main grid.
    #[arg(long)]
    pub allow_unstable: bool,
}

impl Command {
    pub fn args(&self) -> &CommonArgs {
        match self {
            Command::Solve(a)
            | Command::Estimates(a)
            | Command::Weak(a)
            | Command::Converge(a)
            | Command::UnstableDemo(a)
            | Command::All(a) => a,
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Lab(#[from] crate::error::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
}

/// Files written and the names of the checks that failed.
#[derive(Debug, Default)]
pub struct RunSummary {
    pub written: Vec<PathBuf>,
    pub failures: Vec<String>,
}

struct Output {
    dir: PathBuf,
    summary: RunSummary,
}

impl Output {
    fn create(&mut self, name: &str) -> Result<(PathBuf, BufWriter<File>), CliError> {
        let path = self.dir.join(name);
        let f = File::create(&path).map_err(|source| CliError::Io { path: path.clone(), source })?;
        self.summary.written.push(path.clone());
        Ok((path, BufWriter::new(f)))
    }

    fn write_with<F>(&mut self, name: &str, body: F) -> Result<(), CliError>
    where
        F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
    {
        let (path, mut w) = self.create(name)?;
        body(&mut w).and_then(|_| w.flush()).map_err(|source| CliError::Io { path, source })
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        self.write_with(name, |w| {
            serde_json::to_writer_pretty(&mut *w, value).map_err(std::io::Error::from)?;
            writeln!(w)
        })
    }

    fn fail(&mut self, check: impl Into<String>) {
        self.summary.failures.push(check.into());
    }
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    Ok(parse_config(&text)?)
}

/// Run one command. Check failures are reported in the summary; everything
/// else (bad config, IO, numerical breakdown) is an error.
pub fn run(command: Command) -> Result<RunSummary, CliError> {
    let args = command.args();
    let config = load_config(&args.config)?;
    let dir = match (&args.out, &config.output.dir) {
        (Some(p), _) => p.clone(),
        (None, Some(d)) => d.clone(),
        (None, None) => PathBuf::from("out"),
    };
    fs::create_dir_all(&dir).map_err(|source| CliError::Io { path: dir.clone(), source })?;
    let mut out = Output { dir, summary: RunSummary::default() };
    let allow = args.allow_unstable;
    match command {
        Command::Solve(_) => run_solve(&config, allow, &mut out)?,
        Command::Estimates(_) => run_estimates(&config, allow, &mut out)?,
        Command::Weak(_) => run_weak(&config, allow, &mut out)?,
        Command::Converge(_) => run_converge(&config, &mut out)?,
        Command::UnstableDemo(_) => run_unstable(&config, &mut out)?,
        Command::All(_) => {
            run_solve(&config, allow, &mut out)?;
            run_estimates(&config, allow, &mut out)?;
            if !config.bumps.is_empty() {
                run_weak(&config, allow, &mut out)?;
            }
            if config.converge.is_some() {
                run_converge(&config, &mut out)?;
            }
            if config.unstable.is_some() {
                run_unstable(&config, &mut out)?;
            }
        }
    }
    Ok(out.summary)
}

fn window_field(config: &ExperimentConfig, allow: bool) -> Result<Field, CliError> {
    let spec = config.grid_spec(allow)?;
    config.problem.check_declared_bounds(&spec)?;
    let keep = cells_to_cover(config.grid.x_window, spec.dx);
    let top = cells_to_cover(config.grid.t_final, spec.dt);
    Ok(solve_region(&spec, &config.problem, FieldRegion { half_width: keep, top_level: top })?)
}

fn run_solve(config: &ExperimentConfig, allow: bool, out: &mut Output) -> Result<(), CliError> {
    let field = window_field(config, allow)?;
    let (ls, cs) = (config.output.level_stride, config.output.column_stride);
    out.write_with("field.csv", |w| field.write_csv(w, ls, cs))
}

fn run_estimates(config: &ExperimentConfig, allow: bool, out: &mut Output) -> Result<(), CliError> {
    let field = window_field(config, allow)?;
    let p = &config.problem;
    let reports = [
        ("sup_bound.json", sup_bound_report(&field, p)),
        ("space_lipschitz.json", space_lipschitz_report(&field, p)),
        ("time_holder.json", time_holder_report(&field, p, config.tbar)?),
    ];
    for (name, report) in reports {
        if !report.pass {
            out.fail(format!("{} (worst margin {:e})", report.estimate_name, report.worst_margin));
        }
        out.json(name, &report)?;
    }
    Ok(())
}

fn run_weak(config: &ExperimentConfig, allow: bool, out: &mut Output) -> Result<(), CliError> {
    if config.bumps.is_empty() {
        return Err(CliError::Usage("weak: the config defines no testfn.bump.<label> entries".into()));
    }
    let bumps: Vec<_> = config.bumps.iter().map(|(_, phi)| *phi).collect();
    let field = field_for_bumps(&config.problem, config.grid.dx, config.grid.dt, &bumps, allow)?;
    for (label, phi) in &config.bumps {
        let exact = weak_residual(&field, &config.problem, phi, ResidualMode::ExactDerivatives)?;
        out.json(&format!("weak_{label}_exact.json"), &exact)?;
        let fd = weak_residual(&field, &config.problem, phi, ResidualMode::FiniteDifferences)?;
        out.json(&format!("weak_{label}_fd.json"), &fd)?;
        let sbp = sbp_report(&field, phi)?;
        if !sbp.pass {
            out.fail(format!("sbp_{label} (gap {:e} > {:e})", sbp.gap, sbp.bound));
        }
        out.json(&format!("sbp_{label}.json"), &sbp)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct StudyJson<'a> {
    reference: &'a str,
    alpha: f64,
    #[serde(flatten)]
    study: &'a crate::harness::StudyResult,
    order_range: Option<(f64, f64)>,
    pass: bool,
}

fn run_converge(config: &ExperimentConfig, out: &mut Output) -> Result<(), CliError> {
    let c = config
        .converge
        .as_ref()
        .ok_or_else(|| CliError::Usage("converge: the config has no converge.dx_list".into()))?;
    let p = &config.problem;
    let (reference, name) = match c.reference {
        ReferenceChoice::Oracle => {
            let oracle = OracleSolution::for_problem(&p.initial, &p.reaction, p.diffusion).ok_or_else(|| {
                CliError::Usage(format!(
                    "converge: no oracle for reaction `{}`; use converge.reference = finest",
                    p.reaction.name
                ))
            })?;
            (Reference::Oracle(oracle), "oracle")
        }
        ReferenceChoice::Finest => (Reference::FinestMesh, "finest"),
    };
    let study = refine_study(p, &c.dx_list, c.alpha, c.window, &reference)?;
    let pass = match (c.order_range, study.observed_orders.last()) {
        (Some((lo, hi)), Some(&q)) => q >= lo && q <= hi,
        (Some(_), None) => false,
        (None, _) => true,
    };
    if !pass {
        out.fail(format!("convergence order {:?} outside {:?}", study.observed_orders.last(), c.order_range));
    }
    if config.output.csv {
        out.write_with("study.csv", |w| study.write_csv(w))?;
    }
    if config.output.json {
        let body = StudyJson { reference: name, alpha: c.alpha, study: &study, order_range: c.order_range, pass };
        out.json("study.json", &body)?;
    }
    Ok(())
}

fn run_unstable(config: &ExperimentConfig, out: &mut Output) -> Result<(), CliError> {
    let u = config
        .unstable
        .ok_or_else(|| CliError::Usage("unstable-demo: the config has no unstable.alpha".into()))?;
    let demo = instability_demo(u.alpha, u.steps, u.epsilon)?;
    if config.output.csv {
        out.write_with("amplitudes.csv", |w| demo.write_csv(w))?;
    }
    if config.output.json {
        out.json("amplitudes.json", &demo)?;
    }
    Ok(())
}

/// Parse arguments, run, and map the outcome to an exit code:
/// 0 all checks pass, 1 a check failed, 2 usage, config or IO error.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Ok(v) = std::env::var("RDLAB_THREADS") {
        match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => {
                // a pool that is already built keeps its size
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("rdlab: RDLAB_THREADS must be a positive integer, got `{v}`");
                return 2;
            }
        }
    }
    match run(cli.command) {
        Ok(summary) => {
            for p in &summary.written {
                println!("wrote {}", p.display());
            }
            if summary.failures.is_empty() {
                0
            } else {
                for f in &summary.failures {
                    eprintln!("rdlab: check failed: {f}");
                }
                1
            }
        }
        Err(e) => {
            eprintln!("rdlab: {e}");
            2
        }
    }
}

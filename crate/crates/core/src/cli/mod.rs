//! Command-line front end: reference runs, parameter sweeps and the steady
//! manufactured-solution report.
//!
//! Exit codes: `0` pass, `1` solver or tolerance failure, `2` usage or I/O
//! error.

pub mod config;
pub mod run;

use std::io::Write;
use std::path::PathBuf;

use clap::Parser;

use config::{GaussianSign, InitialSpec, Overrides, ProblemKind};
use run::SweepParam;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Solver(#[from] crate::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Solver(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "stgirm",
    about = "Space-time boundary integral solver for 1D diffusion, checked against spectral exact solutions",
    after_help = "M is fixed per run. For long final times a coarser M tends to stabilize the \
                  Neumann march; there is no automatic adaptation."
)]
struct Args {
    /// dirichlet, neumann or steady
    #[arg(long)]
    problem: Option<ProblemKind>,
    #[arg(long)]
    nu: Option<f64>,
    /// Half-length of the domain [-L, L]
    #[arg(long = "L")]
    half_length: Option<f64>,
    /// Final time
    #[arg(long = "T")]
    final_time: Option<f64>,
    /// Number of space cells
    #[arg(long = "M")]
    cells: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    /// Spectral oracle mode count
    #[arg(long)]
    modes: Option<usize>,
    /// Comma-separated snapshot times
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    snapshots: Option<Vec<f64>>,
    /// paper-gaussian, single-mode, constant:<v> or file:<path>
    #[arg(long)]
    initial: Option<InitialSpec>,
    /// Sign of the Gaussian exponent: minus (decaying) or plus
    #[arg(long = "gaussian-sign")]
    gaussian_sign: Option<GaussianSign>,
    /// Pass threshold on the relative max-norm error
    #[arg(long)]
    tol: Option<f64>,
    /// CSV output path (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
    /// key=value file; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
    /// Print the resolved configuration and exit
    #[arg(long = "print-config")]
    print_config: bool,
    /// Sweep one parameter: --sweep <dt|M|modes> <v1,v2,...>
    #[arg(long, num_args = 2, value_names = ["PARAM", "VALUES"])]
    sweep: Option<Vec<String>>,
}

impl Args {
    fn overrides(&self) -> Overrides {
        Overrides {
            problem: self.problem,
            nu: self.nu,
            half_length: self.half_length,
            final_time: self.final_time,
            cells: self.cells,
            dt: self.dt,
            modes: self.modes,
            snapshots: self.snapshots.clone(),
            initial: self.initial.clone(),
            gaussian_sign: self.gaussian_sign,
            tol: self.tol,
            out: self.out.clone(),
        }
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string())),
    }
}

fn execute(args: Args) -> Result<i32, CliError> {
    let file = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            Overrides::parse(&text)?
        }
        None => Overrides::default(),
    };
    let cfg = args.overrides().over(file).resolve();
    cfg.validate()?;
    if args.print_config {
        print!("{}", cfg.to_config_string());
        return Ok(0);
    }

    if let Some(sw) = &args.sweep {
        let param: SweepParam = sw[0].parse().map_err(CliError::Usage)?;
        let values = config::parse_list("sweep", &sw[1])?;
        let table = run::sweep(&cfg, param, &values)?;
        emit(&cfg.out, &table)?;
        return Ok(0);
    }

    if cfg.problem == ProblemKind::Steady {
        let report = run::run_steady(&cfg)?;
        emit(&cfg.out, &report.csv)?;
        for (field, n, err) in &report.rows {
            eprintln!("steady {field:>10} elements={n:<4} max_abs_err={err:.3e}");
        }
        eprintln!(
            "steady gates (finest mesh): x1 <= {:e}, x1^2-x2^2 <= {:e}: {}",
            run::STEADY_TOLERANCES[0],
            run::STEADY_TOLERANCES[1],
            if report.passes { "PASS" } else { "FAIL" }
        );
        return Ok(if report.passes { 0 } else { 1 });
    }

    let report = run::run_unsteady(&cfg)?;
    emit(&cfg.out, &report.csv)?;
    for s in &report.snapshots {
        eprintln!("t={:<8} max_rel_err={:.3e} l2_rel_err={:.3e}", s.t, s.max_rel, s.l2_rel);
    }
    eprintln!("wall time {:.1} ms", report.wall_ms);
    if cfg.problem == ProblemKind::Neumann && cfg.dt > run::NEUMANN_REFERENCE_DT {
        eprintln!(
            "note: Neumann marching is sensitive to the time step; dt = {} exceeds the reference {}. \
             Errors grow with dt (see --sweep dt).",
            cfg.dt,
            run::NEUMANN_REFERENCE_DT
        );
    }
    let pass = report.passes(cfg.tol);
    eprintln!("{} (tol {:e})", if pass { "PASS" } else { "FAIL" }, cfg.tol);
    Ok(if pass { 0 } else { 1 })
}

/// Parses `args` (including the program name) and runs; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

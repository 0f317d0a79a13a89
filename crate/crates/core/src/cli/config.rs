//! Run configuration: per-problem defaults, a line-oriented `key=value`
//! file format, and flag overrides on top.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use super::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    Dirichlet,
    Neumann,
    Steady,
}

impl FromStr for ProblemKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "dirichlet" => Ok(Self::Dirichlet),
            "neumann" => Ok(Self::Neumann),
            "steady" => Ok(Self::Steady),
            _ => Err(format!("unknown problem '{s}' (expected dirichlet, neumann or steady)")),
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Dirichlet => "dirichlet",
            Self::Neumann => "neumann",
            Self::Steady => "steady",
        })
    }
}

/// Initial profile selector.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialSpec {
    /// `exp(∓(x/(L/8))²)`, sign chosen by [`GaussianSign`].
    Gaussian,
    /// Lowest eigenmode of the problem's boundary condition.
    SingleMode,
    Constant(f64),
    /// Two columns `x C0` (whitespace or comma separated), linearly
    /// interpolated; must cover `[-L, L]`.
    File(PathBuf),
}

impl FromStr for InitialSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "paper-gaussian" {
            Ok(Self::Gaussian)
        } else if s == "single-mode" {
            Ok(Self::SingleMode)
        } else if let Some(v) = s.strip_prefix("constant:") {
            v.parse().map(Self::Constant).map_err(|_| format!("bad constant initial value '{v}'"))
        } else if let Some(p) = s.strip_prefix("file:") {
            if p.is_empty() {
                Err("file: needs a path".into())
            } else {
                Ok(Self::File(PathBuf::from(p)))
            }
        } else {
            Err(format!("unknown initial profile '{s}' (expected paper-gaussian, single-mode, constant:<v> or file:<path>)"))
        }
    }
}

impl fmt::Display for InitialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Gaussian => f.write_str("paper-gaussian"),
            Self::SingleMode => f.write_str("single-mode"),
            Self::Constant(v) => write!(f, "constant:{v}"),
            Self::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaussianSign {
    Minus,
    Plus,
}

impl FromStr for GaussianSign {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "minus" => Ok(Self::Minus),
            "plus" => Ok(Self::Plus),
            _ => Err(format!("unknown gaussian sign '{s}' (expected minus or plus)")),
        }
    }
}

impl fmt::Display for GaussianSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Minus => "minus",
            Self::Plus => "plus",
        })
    }
}

/// A fully resolved run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: ProblemKind,
    pub nu: f64,
    pub half_length: f64,
    pub final_time: f64,
    pub cells: usize,
    pub dt: f64,
    pub modes: usize,
    pub snapshots: Vec<f64>,
    pub initial: InitialSpec,
    pub gaussian_sign: GaussianSign,
    pub tol: f64,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    /// The reference experiment settings for `problem`.
    pub fn defaults(problem: ProblemKind) -> Self {
        let (cells, dt) = match problem {
            ProblemKind::Neumann => (161, 0.005),
            _ => (41, 0.0625),
        };
        Self {
            problem,
            nu: 0.05,
            half_length: 1.0,
            final_time: 1.0,
            cells,
            dt,
            modes: crate::oracle::DEFAULT_MODES,
            snapshots: vec![0.25, 0.5, 1.0],
            initial: InitialSpec::Gaussian,
            gaussian_sign: GaussianSign::Minus,
            tol: 5e-2,
            out: None,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let positive = [("nu", self.nu), ("L", self.half_length), ("T", self.final_time), ("dt", self.dt), ("tol", self.tol)];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(CliError::Usage(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if self.cells < 2 {
            return Err(CliError::Usage(format!("M must be at least 2, got {}", self.cells)));
        }
        if self.modes < 1 {
            return Err(CliError::Usage("modes must be at least 1".into()));
        }
        if self.problem != ProblemKind::Steady {
            if self.snapshots.is_empty() {
                return Err(CliError::Usage("at least one snapshot time is required".into()));
            }
            let mut last = 0.0;
            for &t in &self.snapshots {
                if !(t > last && t <= self.final_time) {
                    return Err(CliError::Usage(format!(
                        "snapshot times must be increasing within (0, T = {}], got {t}",
                        self.final_time
                    )));
                }
                last = t;
            }
        }
        Ok(())
    }

    /// The `key=value` form read back by [`Overrides::parse`].
    pub fn to_config_string(&self) -> String {
        let snaps: Vec<String> = self.snapshots.iter().map(|t| t.to_string()).collect();
        let mut s = format!(
            "problem={}\nnu={}\nL={}\nT={}\nM={}\ndt={}\nmodes={}\nsnapshots={}\ninitial={}\ngaussian-sign={}\ntol={}\n",
            self.problem,
            self.nu,
            self.half_length,
            self.final_time,
            self.cells,
            self.dt,
            self.modes,
            snaps.join(","),
            self.initial,
            self.gaussian_sign,
            self.tol
        );
        if let Some(out) = &self.out {
            s.push_str(&format!("out={}\n", out.display()));
        }
        s
    }
}

/// Partially specified settings from a file or the command line.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub problem: Option<ProblemKind>,
    pub nu: Option<f64>,
    pub half_length: Option<f64>,
    pub final_time: Option<f64>,
    pub cells: Option<usize>,
    pub dt: Option<f64>,
    pub modes: Option<usize>,
    pub snapshots: Option<Vec<f64>>,
    pub initial: Option<InitialSpec>,
    pub gaussian_sign: Option<GaussianSign>,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
}

fn parse_value<T: FromStr>(key: &str, v: &str) -> Result<T, CliError> {
    v.parse().map_err(|_| CliError::Usage(format!("bad value '{v}' for {key}")))
}

pub(crate) fn parse_list(key: &str, v: &str) -> Result<Vec<f64>, CliError> {
    v.split(',').map(|s| parse_value(key, s.trim())).collect()
}

impl Overrides {
    /// Parses `key=value` lines; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut o = Self::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Usage(format!("config line {}: expected key=value", n + 1)));
            };
            let (key, value) = (key.trim(), value.trim());
            let usage = |e: String| CliError::Usage(format!("config line {}: {e}", n + 1));
            match key {
                "problem" => o.problem = Some(value.parse().map_err(usage)?),
                "nu" => o.nu = Some(parse_value(key, value)?),
                "L" => o.half_length = Some(parse_value(key, value)?),
                "T" => o.final_time = Some(parse_value(key, value)?),
                "M" => o.cells = Some(parse_value(key, value)?),
                "dt" => o.dt = Some(parse_value(key, value)?),
                "modes" => o.modes = Some(parse_value(key, value)?),
                "snapshots" => o.snapshots = Some(parse_list(key, value)?),
                "initial" => o.initial = Some(value.parse().map_err(usage)?),
                "gaussian-sign" => o.gaussian_sign = Some(value.parse().map_err(usage)?),
                "tol" => o.tol = Some(parse_value(key, value)?),
                "out" => o.out = Some(PathBuf::from(value)),
                _ => return Err(CliError::Usage(format!("config line {}: unknown key '{key}'", n + 1))),
            }
        }
        Ok(o)
    }

    /// Fields set in `self` win over those in `base`.
    pub fn over(self, base: Overrides) -> Overrides {
        Overrides {
            problem: self.problem.or(base.problem),
            nu: self.nu.or(base.nu),
            half_length: self.half_length.or(base.half_length),
            final_time: self.final_time.or(base.final_time),
            cells: self.cells.or(base.cells),
            dt: self.dt.or(base.dt),
            modes: self.modes.or(base.modes),
            snapshots: self.snapshots.or(base.snapshots),
            initial: self.initial.or(base.initial),
            gaussian_sign: self.gaussian_sign.or(base.gaussian_sign),
            tol: self.tol.or(base.tol),
            out: self.out.or(base.out),
        }
    }

    /// Fills unset fields from the defaults of the chosen problem
    /// (Dirichlet when none is given).
    pub fn resolve(self) -> RunConfig {
        let d = RunConfig::defaults(self.problem.unwrap_or(ProblemKind::Dirichlet));
        RunConfig {
            problem: d.problem,
            nu: self.nu.unwrap_or(d.nu),
            half_length: self.half_length.unwrap_or(d.half_length),
            final_time: self.final_time.unwrap_or(d.final_time),
            cells: self.cells.unwrap_or(d.cells),
            dt: self.dt.unwrap_or(d.dt),
            modes: self.modes.unwrap_or(d.modes),
            snapshots: self.snapshots.unwrap_or(d.snapshots),
            initial: self.initial.unwrap_or(d.initial),
            gaussian_sign: self.gaussian_sign.unwrap_or(d.gaussian_sign),
            tol: self.tol.unwrap_or(d.tol),
            out: self.out.or(d.out),
        }
    }
}

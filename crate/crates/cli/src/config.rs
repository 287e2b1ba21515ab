use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const DEFAULT_DIMS: [usize; 3] = [1, 2, 3];
pub const DEFAULT_LAMBDAS: [f64; 4] = [-2.0, -1.0, -0.5, -0.3];
pub const DEFAULT_MUS: [f64; 4] = [-1.0, 0.0, 1.0, 2.0];
pub const DEFAULT_SAMPLES: usize = 20;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_FD_TOL: f64 = 1e-5;
pub const SEED_ENV: &str = "SCHROGEO_SEED";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Bargmann,
    SchrodingerEq,
    LieAlgebra,
    Group,
    Homogeneous,
    Boundary,
    Axioms,
    Einstein,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Bargmann => "bargmann",
            Suite::SchrodingerEq => "schrodinger-eq",
            Suite::LieAlgebra => "lie-algebra",
            Suite::Group => "group",
            Suite::Homogeneous => "homogeneous",
            Suite::Boundary => "boundary",
            Suite::Axioms => "axioms",
            Suite::Einstein => "einstein",
            Suite::All => "all",
        }
    }

    /// Suites that build M̂_λ and therefore need λ < 0.
    pub fn needs_bulk(self) -> bool {
        matches!(
            self,
            Suite::Homogeneous | Suite::Axioms | Suite::Einstein | Suite::All
        )
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Text,
}

#[derive(Debug, Parser)]
#[command(
    name = "schrogeo",
    version,
    about = "Verify the geometry of Schrodinger manifolds numerically"
)]
pub struct Cli {
    /// Suite to run
    #[arg(value_enum)]
    pub suite: Option<Suite>,
    /// Same as the positional suite
    #[arg(long = "suite", value_enum, conflicts_with = "suite")]
    pub suite_flag: Option<Suite>,
    /// Spatial dimension d (repeatable)
    #[arg(long = "dim")]
    pub dims: Vec<usize>,
    /// λ < 0 (repeatable)
    #[arg(long = "lambda", allow_negative_numbers = true)]
    pub lambdas: Vec<f64>,
    /// μ (repeatable)
    #[arg(long = "mu", allow_negative_numbers = true)]
    pub mus: Vec<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Overrides SCHROGEO_SEED
    #[arg(long)]
    pub seed: Option<u64>,
    /// Tolerance of the checks whose default bound is 1e-8
    #[arg(long)]
    pub tol: Option<f64>,
    /// Tolerance of finite-difference cross-checks
    #[arg(long = "fd-tol")]
    pub fd_tol: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// JSON file with any of: dims, lambdas, mus, samples, seed, tol, fd_tol, format
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Write the report here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub dims: Option<Vec<usize>>,
    pub lambdas: Option<Vec<f64>>,
    pub mus: Option<Vec<f64>>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub fd_tol: Option<f64>,
    pub format: Option<Format>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }
}

/// Fully resolved run parameters; part of the JSON report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub suite: Suite,
    pub dims: Vec<usize>,
    pub lambdas: Vec<f64>,
    pub mus: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    pub fd_tol: f64,
    #[serde(skip)]
    pub format: Format,
}

fn pick<T: Clone>(flag: &[T], file: Option<Vec<T>>, default: Vec<T>) -> Vec<T> {
    if flag.is_empty() {
        file.unwrap_or(default)
    } else {
        flag.to_vec()
    }
}

impl RunConfig {
    pub fn defaults(suite: Suite) -> Self {
        Self {
            suite,
            dims: DEFAULT_DIMS.to_vec(),
            lambdas: DEFAULT_LAMBDAS.to_vec(),
            mus: DEFAULT_MUS.to_vec(),
            samples: DEFAULT_SAMPLES,
            seed: DEFAULT_SEED,
            tol: DEFAULT_TOL,
            fd_tol: DEFAULT_FD_TOL,
            format: Format::Json,
        }
    }

    /// Flags over the environment seed over the config file over defaults.
    pub fn resolve(cli: &Cli, env_seed: Option<&str>) -> Result<Self, CliError> {
        let suite = cli
            .suite
            .or(cli.suite_flag)
            .ok_or_else(|| CliError::Usage("missing suite; see --help".into()))?;
        let file = match &cli.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let env_seed = env_seed
            .map(|s| {
                s.trim().parse::<u64>().map_err(|_| {
                    CliError::Config(format!("{SEED_ENV} must be an unsigned integer, got {s:?}"))
                })
            })
            .transpose()?;
        let mut c = Self::defaults(suite);
        c.dims = pick(&cli.dims, file.dims, c.dims);
        c.lambdas = pick(&cli.lambdas, file.lambdas, c.lambdas);
        c.mus = pick(&cli.mus, file.mus, c.mus);
        c.samples = cli.samples.or(file.samples).unwrap_or(c.samples);
        c.seed = cli.seed.or(env_seed).or(file.seed).unwrap_or(c.seed);
        c.tol = cli.tol.or(file.tol).unwrap_or(c.tol);
        c.fd_tol = cli.fd_tol.or(file.fd_tol).unwrap_or(c.fd_tol);
        c.format = cli.format.or(file.format).unwrap_or_default();
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.dims.is_empty() || self.lambdas.is_empty() || self.mus.is_empty() {
            return bad("dims, lambdas and mus must be non-empty".into());
        }
        if let Some(d) = self.dims.iter().find(|d| **d == 0) {
            return bad(format!("dimension must be at least 1, got {d}"));
        }
        if self.samples == 0 {
            return bad("samples must be at least 1".into());
        }
        for (name, v) in [("tol", self.tol), ("fd_tol", self.fd_tol)] {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("{name} must be positive and finite, got {v}"));
            }
        }
        if let Some(m) = self.mus.iter().find(|m| !m.is_finite()) {
            return bad(format!("mu must be finite, got {m}"));
        }
        if self.suite.needs_bulk() {
            if let Some(l) = self.lambdas.iter().find(|l| !(l.is_finite() && **l < 0.0)) {
                return bad(format!(
                    "suite {} needs lambda < 0, got {l}",
                    self.suite.name()
                ));
            }
        }
        Ok(())
    }
}

//! Run configuration: a JSON file merged with command-line flags, flags
//! winning.

use qflow::numerics::GridSpec;
use qflow::verifier::Suite;
use qflow::{Grid, QflowError, QuantumState, StateSpec, Tolerances};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

/// Failure classes; each maps to one exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad input before or while setting up a run (exit 2).
    Config(String),
    /// A computation failed (exit 1).
    Run(QflowError),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Run(e) => write!(f, "computation failed: {e}"),
        }
    }
}

impl From<QflowError> for CliError {
    fn from(e: QflowError) -> Self {
        match e {
            QflowError::InvalidState(_) | QflowError::InvalidGrid(_) | QflowError::Unsupported(_) => {
                CliError::Config(e.to_string())
            }
            other => CliError::Run(other),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// A state given either as shorthand (`hydrogen:1s`) or as a JSON spec.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum StateArg {
    Shorthand(String),
    Spec(StateSpec),
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub json_path: Option<PathBuf>,
    #[serde(default)]
    pub csv_dir: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub state: Option<StateArg>,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub t_samples: Vec<f64>,
    /// Names from the verifier's suite registry.
    #[serde(default)]
    pub suites: Vec<Suite>,
    /// Per-key tolerance overrides.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<RunConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn state(&self) -> CliResult<QuantumState> {
        let spec = match &self.state {
            None => return Err(CliError::Config("no state given (use --state)".into())),
            Some(StateArg::Shorthand(s)) => StateSpec::parse(s)?,
            Some(StateArg::Spec(s)) => s.clone(),
        };
        Ok(QuantumState::new(spec)?)
    }

    /// The configured grid, or the state's own probe grid.
    pub fn grid_for(&self, state: &QuantumState) -> CliResult<Grid> {
        match &self.grid {
            Some(spec) => Ok(Grid::from_spec(spec)?),
            None => Ok(state.verification_grid()),
        }
    }

    pub fn times(&self) -> Vec<f64> {
        if self.t_samples.is_empty() {
            vec![0.0]
        } else {
            self.t_samples.clone()
        }
    }

    /// Defaults with overrides applied, then scaled by `QFLOW_TOL_SCALE`.
    pub fn tolerances(&self) -> CliResult<Tolerances> {
        let t = Tolerances::default().with_overrides(&self.tolerances).map_err(CliError::Config)?;
        Ok(t.scaled(Tolerances::env_scale()))
    }
}

/// `reference`, `verification`, a JSON grid spec, or
/// `spherical:r_min:r_max:nr:ntheta:nphi`.
pub fn parse_grid(s: &str) -> CliResult<GridSpec> {
    let s = s.trim();
    if s.starts_with('{') {
        return serde_json::from_str(s).map_err(|e| CliError::Config(format!("grid: {e}")));
    }
    let bad = || CliError::Config(format!("unrecognized grid '{s}'"));
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        ["reference"] => Ok(GridSpec::Reference),
        ["verification"] => Ok(GridSpec::Verification),
        ["spherical", r0, r1, nr, nt, np] => Ok(GridSpec::Spherical {
            r_min: r0.parse().map_err(|_| bad())?,
            r_max: r1.parse().map_err(|_| bad())?,
            nr: nr.parse().map_err(|_| bad())?,
            ntheta: nt.parse().map_err(|_| bad())?,
            nphi: np.parse().map_err(|_| bad())?,
        }),
        _ => Err(bad()),
    }
}

/// `KEY=VALUE`.
pub fn parse_tolerance(s: &str) -> CliResult<(String, f64)> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("tolerance override must be KEY=VALUE, got '{s}'")))?;
    let v: f64 = v
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("tolerance '{k}' is not a number")))?;
    Ok((k.trim().to_string(), v))
}

/// Three comma-separated coordinates.
pub fn parse_point(s: &str) -> CliResult<[f64; 3]> {
    let v: Vec<f64> = s
        .split(',')
        .map(|c| c.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Config(format!("point must be x,y,z, got '{s}'")))?;
    <[f64; 3]>::try_from(v).map_err(|_| CliError::Config(format!("point must have three coordinates, got '{s}'")))
}

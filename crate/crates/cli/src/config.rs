//! Flat `key=value` run configuration.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

/// Highest partition order accepted without `acknowledge_depth=true`.
pub const DEPTH_CAP: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Rigid,
    Arnold,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    /// Seeded random maps.
    Random,
    /// Every stage is the identity.
    Identity,
    /// Cancellation only: displacements of alternating sign.
    Alternating,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub family: Family,
    /// Rotation parameter; `None` tunes the map to the golden mean.
    pub omega: Option<f64>,
    /// Continued fraction depth used for tuning and partitions.
    pub depth: usize,
    pub grid_points: usize,
    pub refine: usize,
    pub eps_guard: f64,
    pub seed: u64,
    pub suite: Suite,
    pub count: usize,
    pub stages: usize,
    pub delta: f64,
    pub q: f64,
    pub d1_samples: usize,
    pub lambda: usize,
    pub kappa_min: usize,
    pub kappa_max: usize,
    pub k: usize,
    pub max_fit_residual: f64,
    pub acknowledge_depth: bool,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            family: Family::Arnold,
            omega: None,
            depth: 14,
            grid_points: 4096,
            refine: 64,
            eps_guard: poincare::interval::DEFAULT_EPS_GUARD,
            seed: 0,
            suite: Suite::Random,
            count: 100,
            stages: 8,
            delta: 0.2,
            q: 8.0,
            d1_samples: poincare::composition::D1_SAMPLES,
            lambda: 3,
            kappa_min: 4,
            kappa_max: 9,
            k: 4,
            max_fit_residual: poincare::experiments::DEFAULT_FIT_RESIDUAL,
            acknowledge_depth: false,
            out: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("line {line}: expected key=value")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: invalid value `{value}` for `{key}`")]
    Value { line: usize, key: String, value: String },
    #[error("line {line}: duplicate key `{key}`")]
    Duplicate { line: usize, key: String },
    #[error("{0}")]
    Invalid(String),
}

fn parse<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T, ConfigError> {
    value.parse().map_err(|_| ConfigError::Value {
        line,
        key: key.to_string(),
        value: value.to_string(),
    })
}

impl FromStr for Family {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "rigid" => Ok(Self::Rigid),
            "arnold" => Ok(Self::Arnold),
            _ => Err(()),
        }
    }
}

impl FromStr for Suite {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "random" => Ok(Self::Random),
            "identity" => Ok(Self::Identity),
            "alternating" => Ok(Self::Alternating),
            _ => Err(()),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Rigid => "rigid",
            Self::Arnold => "arnold",
        })
    }
}

impl RunConfig {
    /// Parses `key=value` lines; `#` starts a comment, blank lines are skipped.
    pub fn parse_str(text: &str) -> Result<Self, ConfigError> {
        let mut c = Self::default();
        let mut seen: Vec<String> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or(ConfigError::Syntax { line })?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() {
                return Err(ConfigError::Syntax { line });
            }
            if seen.iter().any(|k| k == key) {
                return Err(ConfigError::Duplicate {
                    line,
                    key: key.to_string(),
                });
            }
            seen.push(key.to_string());
            match key {
                "family" => c.family = parse(line, key, value)?,
                "omega" => c.omega = Some(parse(line, key, value)?),
                "depth" => c.depth = parse(line, key, value)?,
                "grid_points" => c.grid_points = parse(line, key, value)?,
                "refine" => c.refine = parse(line, key, value)?,
                "eps_guard" => c.eps_guard = parse(line, key, value)?,
                "seed" => c.seed = parse(line, key, value)?,
                "suite" => c.suite = parse(line, key, value)?,
                "count" => c.count = parse(line, key, value)?,
                "stages" => c.stages = parse(line, key, value)?,
                "delta" => c.delta = parse(line, key, value)?,
                "q" => c.q = parse(line, key, value)?,
                "d1_samples" => c.d1_samples = parse(line, key, value)?,
                "lambda" => c.lambda = parse(line, key, value)?,
                "kappa_min" => c.kappa_min = parse(line, key, value)?,
                "kappa_max" => c.kappa_max = parse(line, key, value)?,
                "k" => c.k = parse(line, key, value)?,
                "max_fit_residual" => c.max_fit_residual = parse(line, key, value)?,
                "acknowledge_depth" => c.acknowledge_depth = parse(line, key, value)?,
                "out" => c.out = Some(PathBuf::from(value)),
                _ => {
                    return Err(ConfigError::UnknownKey {
                        line,
                        key: key.to_string(),
                    })
                }
            }
        }
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse_str(&text)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let fail = |m: &str| Err(ConfigError::Invalid(m.to_string()));
        if self.grid_points < 2 {
            return fail("grid_points must be at least 2");
        }
        if !(self.eps_guard > 0.0 && self.eps_guard < 0.5) {
            return fail("eps_guard must lie in (0, 0.5)");
        }
        if self.kappa_min > self.kappa_max {
            return fail("kappa_min exceeds kappa_max");
        }
        if !(self.q >= 0.0) {
            return fail("q must be non-negative");
        }
        if self.k == 0 {
            return fail("k must be at least 1");
        }
        Ok(())
    }

    pub fn grid(&self) -> poincare::grid::GridSpec {
        poincare::grid::GridSpec {
            points: self.grid_points,
            refine: self.refine,
            eps_guard: self.eps_guard,
        }
    }
}

use std::path::{Path, PathBuf};

use bbf_core::kernels::Cutoff;
use bbf_core::lie::LieAlgebra;
use bbf_core::quad::Tolerance;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed config: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("unknown suite {0:?}")]
    UnknownSuite(String),
    #[error("BBF_THREADS must be a positive integer, got {0:?}")]
    Threads(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CutoffConfig {
    pub plateau: f64,
    pub support: f64,
    pub order: u32,
}

impl Default for CutoffConfig {
    fn default() -> Self {
        CutoffConfig { plateau: 0.5, support: 1.0, order: 5 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceConfig {
    pub abs: f64,
    pub rel: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig { abs: 1e-11, rel: 1e-9 }
    }
}

/// Run configuration. Every field has a default, so `{}` is a valid config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub suite: Option<String>,
    /// builtin name (sl2, heisenberg3, affine2, abelianN) or a path to a structure-constant file
    pub algebra: String,
    pub cutoff: CutoffConfig,
    /// largest word length for the truncated differential checks
    pub truncation: u32,
    /// ε schedule override for the limit suites, strictly decreasing
    pub eps: Option<Vec<f64>>,
    /// L override for the boundary limit
    pub l: Option<f64>,
    pub tolerance: ToleranceConfig,
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            suite: None,
            algebra: "sl2".into(),
            cutoff: CutoffConfig::default(),
            truncation: 4,
            eps: None,
            l: None,
            tolerance: ToleranceConfig::default(),
            output: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let c: RunConfig = serde_json::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: &str| Err(ConfigError::Invalid(m.into()));
        let t = &self.tolerance;
        if !(t.abs.is_finite() && t.abs > 0.0 && t.rel.is_finite() && t.rel > 0.0) {
            return bad("tolerances must be positive and finite");
        }
        if self.truncation > 6 {
            return bad("truncation above 6 is not supported");
        }
        if let Some(eps) = &self.eps {
            if eps.len() < 2 || eps.iter().any(|e| !(e.is_finite() && *e > 0.0)) || eps.windows(2).any(|w| w[1] >= w[0]) {
                return bad("eps must hold at least two positive, strictly decreasing values");
            }
        }
        if let Some(l) = self.l {
            if !(l.is_finite() && l > 0.0) {
                return bad("l must be positive");
            }
        }
        self.cutoff()?;
        Ok(())
    }

    pub fn cutoff(&self) -> Result<Cutoff, ConfigError> {
        let c = &self.cutoff;
        Cutoff::new(c.plateau, c.support, c.order).map_err(|e| ConfigError::Invalid(format!("cutoff: {e}")))
    }

    pub fn tolerance(&self) -> Tolerance {
        Tolerance::new(self.tolerance.abs, self.tolerance.rel)
    }

    pub fn algebra(&self) -> Result<LieAlgebra, ConfigError> {
        if let Some(l) = LieAlgebra::builtin(&self.algebra) {
            return Ok(l);
        }
        let path = Path::new(&self.algebra);
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
        let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("custom");
        LieAlgebra::parse(name, &text).map_err(|e| ConfigError::Invalid(format!("algebra {}: {e}", path.display())))
    }

    /// sha256 of the canonical JSON (struct field order, output dir excluded).
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output = None;
        let bytes = serde_json::to_vec(&c).expect("config serializes");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Reads BBF_THREADS; `None` when unset.
pub fn threads_from_env() -> Result<Option<usize>, ConfigError> {
    match std::env::var("BBF_THREADS") {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(ConfigError::Threads(s)),
        },
    }
}

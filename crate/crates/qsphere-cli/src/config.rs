//! Run configuration: builtin defaults, the `QS_DEPTH` environment
//! override for the default depth, an optional JSON config file, and
//! command-line flags — applied in that order, later sources winning.

use std::path::Path;

use serde::{Deserialize, Serialize};

use qsphere_core::coeffq::QMode;

use crate::json::{parse_qmode, qmode_text};
use crate::{CliError, CliResult};

/// Environment variable consulted for the *default* bound of iterated
/// computations (descent depth). Explicit `--depth` flags and config-file
/// values always win over it.
pub const DEPTH_ENV: &str = "QS_DEPTH";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputMode {
    Text,
    Json,
}

/// Fully resolved run configuration.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub n: u32,
    pub qmode: QMode,
    pub gaussian: bool,
    pub depth: u64,
    pub schema_bound: usize,
    pub output: OutputMode,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> RunConfig {
        RunConfig {
            n: 1,
            qmode: QMode::Symbolic,
            gaussian: true,
            depth: 4,
            schema_bound: 3,
            output: OutputMode::Text,
            seed: 0,
        }
    }
}

/// On-disk shape of `--config`: every field optional.
#[derive(Serialize, Deserialize, Clone, Debug, Default, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfigDto {
    pub n: Option<u32>,
    pub q: Option<String>,
    pub gaussian: Option<bool>,
    pub depth: Option<u64>,
    pub schema_bound: Option<usize>,
    pub output: Option<String>,
    pub seed: Option<u64>,
}

impl RunConfig {
    /// Builtin defaults with the environment override applied.
    pub fn base() -> CliResult<RunConfig> {
        let mut cfg = RunConfig::default();
        if let Ok(v) = std::env::var(DEPTH_ENV) {
            let depth: u64 = v.trim().parse().map_err(|_| {
                CliError::Usage(format!("{DEPTH_ENV} must be a positive integer, got {v:?}"))
            })?;
            if depth == 0 {
                return Err(CliError::Usage(format!("{DEPTH_ENV} must be at least 1")));
            }
            cfg.depth = depth;
        }
        Ok(cfg)
    }

    /// Overlays the given partial configuration, validating each field.
    pub fn apply(&mut self, dto: &RunConfigDto) -> CliResult<()> {
        if let Some(n) = dto.n {
            self.n = n;
        }
        if let Some(q) = &dto.q {
            self.qmode = parse_qmode(q)?;
        }
        if let Some(g) = dto.gaussian {
            self.gaussian = g;
        }
        if let Some(d) = dto.depth {
            if d == 0 {
                return Err(CliError::Usage("depth must be at least 1".to_string()));
            }
            self.depth = d;
        }
        if let Some(b) = dto.schema_bound {
            if b == 0 {
                return Err(CliError::Usage(
                    "schema_bound must be at least 1".to_string(),
                ));
            }
            self.schema_bound = b;
        }
        if let Some(o) = &dto.output {
            self.output = match o.as_str() {
                "text" => OutputMode::Text,
                "json" => OutputMode::Json,
                other => {
                    return Err(CliError::Usage(format!(
                        "output must be \"text\" or \"json\", got {other:?}"
                    )))
                }
            };
        }
        if let Some(s) = dto.seed {
            self.seed = s;
        }
        Ok(())
    }

    pub fn q_text(&self) -> String {
        qmode_text(&self.qmode)
    }
}

/// Reads and deserializes a JSON config file; unknown fields are rejected.
pub fn read_config_file(path: &Path) -> CliResult<RunConfigDto> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

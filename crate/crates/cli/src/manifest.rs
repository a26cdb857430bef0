use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, CliResult};

/// Record of one invocation, written next to its outputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, Value>,
    pub seed: u64,
    /// RFC 3339; absent under `--deterministic`.
    pub started: Option<String>,
    pub finished: Option<String>,
    pub outputs: Vec<PathBuf>,
    pub version: String,
}

impl RunManifest {
    pub fn new(command: &str, seed: u64, deterministic: bool) -> Self {
        Self {
            command: command.into(),
            parameters: BTreeMap::new(),
            seed,
            started: (!deterministic).then(now),
            finished: None,
            outputs: Vec::new(),
            version: env!("CARGO_PKG_VERSION").into(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        let v = serde_json::to_value(value).expect("parameters serialize");
        self.parameters.insert(key.into(), v);
        self
    }

    pub fn output(&mut self, path: &Path) {
        self.outputs.push(path.to_path_buf());
    }

    /// Every listed output must exist and be non-empty.
    pub fn check_outputs(&self) -> CliResult<()> {
        for p in &self.outputs {
            let len = fs::metadata(p).map_err(|e| io_error(p, e))?.len();
            if len == 0 {
                return Err(CliError::usage(format!("{} was written empty", p.display())));
            }
        }
        Ok(())
    }

    /// Stamps the finish time, checks outputs and writes the manifest to `path`.
    pub fn finish(mut self, path: &Path) -> CliResult<Self> {
        self.check_outputs()?;
        if self.started.is_some() {
            self.finished = Some(now());
        }
        let mut text = serde_json::to_string_pretty(&self).expect("manifest serializes");
        text.push('\n');
        fs::write(path, text).map_err(|e| io_error(path, e))?;
        Ok(self)
    }
}

pub(crate) fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

pub(crate) fn io_error(path: &Path, source: std::io::Error) -> CliError {
    CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

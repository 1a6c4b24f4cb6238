use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::args::OutputArgs;
use crate::CliError;

/// Record of one invocation. Feeding it back through `--config` reproduces
/// the run: only `parameters` is read on the way in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub command: Vec<String>,
    pub subcommand: String,
    pub parameters: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub outputs: Vec<String>,
    pub notes: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn new(command: Vec<String>) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            command,
            subcommand: String::new(),
            parameters: Value::Null,
            seed: None,
            outputs: Vec::new(),
            notes: BTreeMap::new(),
        }
    }

    /// Writes the manifest to `--manifest`, `<output>.manifest.json`, or as a
    /// single `# manifest ` line on stderr.
    pub(crate) fn finish(&self, out: &OutputArgs, stderr: &mut dyn Write) -> Result<(), CliError> {
        let target = out.manifest.clone().or_else(|| {
            out.output.as_ref().map(|p| {
                let mut s = p.clone().into_os_string();
                s.push(".manifest.json");
                PathBuf::from(s)
            })
        });
        match target {
            Some(path) => {
                let mut text = serde_json::to_string_pretty(self)
                    .map_err(|e| CliError::Usage(e.to_string()))?;
                text.push('\n');
                fs::write(path, text)?;
            }
            None => {
                let text =
                    serde_json::to_string(self).map_err(|e| CliError::Usage(e.to_string()))?;
                writeln!(stderr, "# manifest {text}")?;
            }
        }
        Ok(())
    }
}

//! Run manifests written next to every output file.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct RunManifest<'a, P: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: &'a str,
    /// The command line as invoked.
    pub argv: Vec<String>,
    pub parameters: &'a P,
    pub seed: Option<u64>,
    pub artifacts: Vec<PathBuf>,
}

impl<'a, P: Serialize> RunManifest<'a, P> {
    pub fn new(subcommand: &'a str, parameters: &'a P, seed: Option<u64>) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            subcommand,
            argv: std::env::args().collect(),
            parameters,
            seed,
            artifacts: Vec::new(),
        }
    }

    /// Writes `<artifact>.manifest.json` beside each artifact.
    pub fn write(&self) -> pcp_core::Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        for artifact in &self.artifacts {
            fs::write(manifest_path(artifact), &text)?;
        }
        Ok(())
    }
}

pub fn manifest_path(artifact: &Path) -> PathBuf {
    let mut name = artifact.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    artifact.with_file_name(name)
}

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::error::CliError;
use crate::io::{sha256_hex, write_file};
use crate::json;

#[derive(Debug, Serialize)]
pub struct FileDigest {
    pub path: PathBuf,
    pub sha256: String,
}

/// Record of one command run: what was read, what was written, how long it took.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: Vec<FileDigest>,
    pub config_digest: Option<String>,
    pub outputs: Vec<FileDigest>,
    pub wall_time: f64,
    #[serde(skip)]
    started: Option<Instant>,
}

impl RunReport {
    pub fn start(command: &str) -> Self {
        RunReport {
            command: command.to_owned(),
            inputs: Vec::new(),
            config_digest: None,
            outputs: Vec::new(),
            wall_time: 0.0,
            started: Some(Instant::now()),
        }
    }

    pub fn input(&mut self, path: &Path, bytes: &[u8]) {
        self.inputs.push(FileDigest { path: path.to_owned(), sha256: sha256_hex(bytes) });
    }

    pub fn config(&mut self, bytes: &[u8]) {
        self.config_digest = Some(sha256_hex(bytes));
    }

    pub fn output(&mut self, path: &Path, bytes: &[u8]) {
        self.outputs.push(FileDigest { path: path.to_owned(), sha256: sha256_hex(bytes) });
    }

    pub fn finish(mut self, path: &Path) -> Result<(), CliError> {
        self.wall_time = self.started.map_or(0.0, |s| s.elapsed().as_secs_f64());
        write_file(path, json::to_string(&self)?.as_bytes())
    }
}

//! Output directory with the provenance header shared by every file.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use qcomb_core::io::Header;
use serde::Serialize;

use crate::error::CliError;

pub const TOOL_VERSION: &str = concat!("qcomb ", env!("CARGO_PKG_VERSION"));

pub struct Output {
    dir: PathBuf,
    config_hash: String,
    written: Vec<PathBuf>,
}

#[derive(Serialize)]
struct Stamped<'a, T: Serialize> {
    config_hash: &'a str,
    tool_version: &'a str,
    #[serde(flatten)]
    payload: &'a T,
}

impl Output {
    pub fn create(dir: &Path, config_hash: String) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), config_hash, written: Vec::new() })
    }

    pub fn header(&self) -> Header {
        Header::new().with("config_hash", &self.config_hash).with("tool_version", TOOL_VERSION)
    }

    /// Writes a text file through `body`, which receives the common header.
    pub fn text(
        &mut self,
        name: &str,
        body: impl FnOnce(&mut BufWriter<File>, Header) -> qcomb_core::Result<()>,
    ) -> Result<(), CliError> {
        let path = self.dir.join(name);
        let mut w = BufWriter::new(File::create(&path)?);
        body(&mut w, self.header())?;
        w.flush()?;
        self.written.push(path);
        Ok(())
    }

    /// JSON object with `config_hash` and `tool_version` ahead of the payload
    /// fields.
    pub fn json<T: Serialize>(&mut self, name: &str, payload: &T) -> Result<(), CliError> {
        let v = Stamped { config_hash: &self.config_hash, tool_version: TOOL_VERSION, payload };
        let mut text = serde_json::to_string_pretty(&v).map_err(|e| CliError::Validation(e.to_string()))?;
        text.push('\n');
        let path = self.dir.join(name);
        std::fs::write(&path, text)?;
        self.written.push(path);
        Ok(())
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }
}

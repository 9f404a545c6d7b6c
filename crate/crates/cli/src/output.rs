use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

use crate::error::{CliError, Result};

/// Output directory that writes files atomically and records each one.
#[derive(Debug)]
pub struct OutputDir {
    dir: PathBuf,
    manifest: Vec<PathBuf>,
}

impl OutputDir {
    pub fn create(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Write {
            path: dir.to_path_buf(),
            source,
        })?;
        Ok(OutputDir {
            dir: dir.to_path_buf(),
            manifest: Vec::new(),
        })
    }

    /// Writes `name` through a temporary file in the same directory, then
    /// renames it into place.
    pub fn write<F>(&mut self, name: &str, body: F) -> Result<PathBuf>
    where
        F: FnOnce(&mut dyn Write) -> svfractal_core::Result<()>,
    {
        let path = self.dir.join(name);
        let io_err = |source| CliError::Write {
            path: path.clone(),
            source,
        };
        let tmp = NamedTempFile::new_in(&self.dir).map_err(io_err)?;
        {
            let mut w = BufWriter::new(tmp.as_file());
            body(&mut w)?;
            w.flush().map_err(io_err)?;
        }
        tmp.persist(&path).map_err(|e| io_err(e.error))?;
        self.manifest.push(path.clone());
        Ok(path)
    }

    pub fn into_manifest(self) -> Vec<PathBuf> {
        self.manifest
    }
}

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{CliError, CliResult, FileContext};

/// Output directory, created on first use.
pub struct OutDir {
    root: PathBuf,
}

impl OutDir {
    pub fn new(root: PathBuf) -> CliResult<Self> {
        std::fs::create_dir_all(&root).for_file(&root)?;
        Ok(OutDir { root })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    /// Writes through `f`, attaching the file name to any failure.
    pub fn write<F>(&self, name: &str, f: F) -> CliResult<PathBuf>
    where
        F: FnOnce(&mut BufWriter<File>) -> su2_tomography::Result<()>,
    {
        let path = self.path(name);
        let file = File::create(&path).for_file(&path)?;
        let mut w = BufWriter::new(file);
        f(&mut w).for_file(&path)?;
        w.flush().for_file(&path)?;
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> CliResult<PathBuf> {
        self.write(name, |w| {
            serde_json::to_writer_pretty(&mut *w, value)?;
            writeln!(w)?;
            Ok(())
        })
    }
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path).for_file(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::io(path, e))
}

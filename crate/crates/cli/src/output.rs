//! Output directory that records every file it writes.

use polyliouville::grid::GridField;
use polyliouville::report::{self, Cell};
use serde::Serialize;
use serde_json::Value;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

pub struct Output {
    dir: PathBuf,
    digits: usize,
    files: Vec<String>,
}

impl Output {
    pub fn new(dir: &Path, digits: usize) -> std::io::Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), digits, files: Vec::new() })
    }

    pub fn files(&self) -> &[String] {
        &self.files
    }

    fn create(&mut self, name: &str) -> polyliouville::Result<BufWriter<File>> {
        let f = File::create(self.dir.join(name))?;
        if !self.files.iter().any(|n| n == name) {
            self.files.push(name.to_string());
        }
        Ok(BufWriter::new(f))
    }

    pub fn rounded(&self, value: &impl Serialize) -> Value {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        report::round_json(&v, self.digits)
    }

    pub fn json(&mut self, name: &str, value: &impl Serialize) -> polyliouville::Result<()> {
        let v = self.rounded(value);
        let mut w = self.create(name)?;
        serde_json::to_writer_pretty(&mut w, &v).map_err(|e| polyliouville::Error::Io(e.to_string()))?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }

    /// Unrounded JSON, for documents that echo configuration.
    pub fn json_exact(&mut self, name: &str, value: &Value) -> polyliouville::Result<()> {
        let mut w = self.create(name)?;
        serde_json::to_writer_pretty(&mut w, value).map_err(|e| polyliouville::Error::Io(e.to_string()))?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }

    pub fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<Cell>]) -> polyliouville::Result<()> {
        let digits = self.digits;
        let mut w = self.create(name)?;
        report::write_csv(&mut w, header, rows, digits)?;
        w.flush()?;
        Ok(())
    }

    pub fn grid(&mut self, name: &str, field: &GridField) -> polyliouville::Result<()> {
        let digits = self.digits;
        let mut w = self.create(name)?;
        field.write_csv_rounded(&mut w, digits)?;
        w.flush()?;
        Ok(())
    }

    pub fn with_writer(
        &mut self,
        name: &str,
        f: impl FnOnce(&mut BufWriter<File>, usize) -> polyliouville::Result<()>,
    ) -> polyliouville::Result<()> {
        let digits = self.digits;
        let mut w = self.create(name)?;
        f(&mut w, digits)?;
        w.flush()?;
        Ok(())
    }
}

//! Artifacts: CSV tables at 17 significant digits and a JSON summary.

use serde_json::Value;
use std::path::{Path, PathBuf};

/// Marker on the first line of every regenerated golden file.
pub const PROVENANCE: &str = "# invsq regen-golden";

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    F(f64),
    I(i64),
    S(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::F(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::I(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::I(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::S(v.to_string())
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::S(v.to_string())
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::F(v) => fmt_f64(*v),
            Cell::I(v) => v.to_string(),
            Cell::S(s) => s.clone(),
        }
    }
}

/// 17 significant digits in scientific notation; round-trips every f64.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

/// A CSV table. Column names carry units in brackets: [1] is dimensionless,
/// [x0^k] a power of the length unit.
#[derive(Clone, Debug)]
pub struct Table {
    pub file: String,
    pub comments: Vec<String>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(file: impl Into<String>, columns: &[&'static str]) -> Self {
        Table { file: file.into(), comments: Vec::new(), columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_bytes(&self) -> std::io::Result<Vec<u8>> {
        let mut out = Vec::new();
        for c in &self.comments {
            out.extend_from_slice(format!("# {c}\n").as_bytes());
        }
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(&self.columns)?;
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::render))?;
        }
        w.flush()?;
        drop(w);
        Ok(out)
    }
}

/// Everything a command produces; written only after the command succeeded.
#[derive(Clone, Debug, Default)]
pub struct Artifacts {
    pub summary: Value,
    pub tables: Vec<Table>,
}

impl Artifacts {
    pub fn summary(summary: Value) -> Self {
        Artifacts { summary, tables: Vec::new() }
    }

    /// Write tables and `<stem>.json` into `dir`; returns the paths written.
    pub fn write(&self, dir: &Path, stem: &str, guard_golden: bool) -> std::io::Result<Vec<PathBuf>> {
        let mut staged = Vec::new();
        for t in &self.tables {
            staged.push((dir.join(&t.file), t.to_bytes()?));
        }
        let mut json = serde_json::to_vec_pretty(&self.summary)?;
        json.push(b'\n');
        staged.push((dir.join(format!("{stem}.json")), json));
        if guard_golden {
            for (path, _) in &staged {
                refuse_foreign_file(path)?;
            }
        }
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for (path, bytes) in staged {
            std::fs::write(&path, bytes)?;
            written.push(path);
        }
        Ok(written)
    }
}

/// Golden regeneration only replaces files it wrote itself.
fn refuse_foreign_file(path: &Path) -> std::io::Result<()> {
    if path.extension().is_some_and(|e| e == "json") || !path.exists() {
        return Ok(());
    }
    let text = std::fs::read_to_string(path)?;
    if text.starts_with(PROVENANCE) {
        return Ok(());
    }
    Err(std::io::Error::new(
        std::io::ErrorKind::AlreadyExists,
        format!("{} exists and was not produced by regen-golden; refusing to overwrite", path.display()),
    ))
}

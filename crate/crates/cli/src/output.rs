//! Deterministic file emission: fixed-width float formatting, atomic writes.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

/// Floats with 17 significant digits; non-finite values as `nan`/`inf`/`-inf`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

pub enum Cell {
    F(f64),
    I(i64),
    S(String),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::F(x) => fmt_f64(*x),
            Cell::I(i) => i.to_string(),
            Cell::S(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::F(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::F)
    }
}

pub struct Table {
    header: Vec<&'static str>,
    body: String,
    rows: usize,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), body: String::new(), rows: 0 }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "row width");
        let line: Vec<String> = row.iter().map(Cell::render).collect();
        self.body.push_str(&line.join(","));
        self.body.push('\n');
        self.rows += 1;
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn render(&self) -> String {
        format!("{}\n{}", self.header.join(","), self.body)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct Emitted {
    pub file: String,
    pub sha256: String,
    pub bytes: usize,
}

/// Collects output files in memory so nothing is written if the run fails midway.
#[derive(Default)]
pub struct Outputs {
    files: Vec<(String, Vec<u8>)>,
}

impl Outputs {
    pub fn add(&mut self, name: &str, content: String) {
        self.files.push((name.to_string(), content.into_bytes()));
    }

    pub fn write_all(&self, dir: &Path) -> std::io::Result<Vec<Emitted>> {
        std::fs::create_dir_all(dir)?;
        let mut out = Vec::new();
        for (name, bytes) in &self.files {
            let path: PathBuf = dir.join(name);
            write_atomic(&path, bytes)?;
            out.push(Emitted { file: name.clone(), sha256: sha256_hex(bytes), bytes: bytes.len() });
        }
        Ok(out)
    }
}

//! Output directory bookkeeping: every file goes through `Artifacts` so the
//! run manifest can list it with its SHA-256 digest.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use pdelab_core::costs::MachineDescriptor;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::Format;
use crate::CliError;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
    /// Content depends on wall-clock measurements and differs between reruns.
    pub contains_timings: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: serde_json::Value,
    pub machine: MachineDescriptor,
    pub seeds: BTreeMap<String, u64>,
    pub timings: BTreeMap<String, f64>,
    pub files: Vec<FileEntry>,
}

/// Column-oriented table written as CSV or as a JSON array of row objects.
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v:?}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Num(v) => serde_json::json!(v),
            Cell::Int(v) => serde_json::json!(v),
            Cell::Text(s) => serde_json::json!(s),
        }
    }
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn with_columns(columns: Vec<String>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.columns).map_err(io_csv)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv)).map_err(io_csv)?;
        }
        w.into_inner().map_err(|e| CliError::Io(e.to_string()))
    }

    pub fn to_json(&self) -> Result<Vec<u8>, CliError> {
        let rows: Vec<serde_json::Map<String, serde_json::Value>> = self
            .rows
            .iter()
            .map(|row| {
                self.columns
                    .iter()
                    .cloned()
                    .zip(row.iter().map(Cell::json))
                    .collect()
            })
            .collect();
        pretty(&rows)
    }
}

fn io_csv(e: csv::Error) -> CliError {
    CliError::Io(e.to_string())
}

pub fn pretty<T: Serialize + ?Sized>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub struct Artifacts {
    dir: PathBuf,
    format: Format,
    files: Vec<FileEntry>,
}

impl Artifacts {
    pub fn create(dir: &Path, format: Format) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            format,
            files: Vec::new(),
        })
    }

    pub fn write_bytes(&mut self, name: &str, bytes: &[u8], timings: bool) -> Result<(), CliError> {
        let path = self.dir.join(name);
        std::fs::write(&path, bytes)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
        self.files.push(FileEntry {
            path: name.to_string(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len() as u64,
            contains_timings: timings,
        });
        Ok(())
    }

    pub fn write_json<T: Serialize + ?Sized>(
        &mut self,
        name: &str,
        value: &T,
        timings: bool,
    ) -> Result<(), CliError> {
        self.write_bytes(name, &pretty(value)?, timings)
    }

    /// Always CSV regardless of the selected format.
    pub fn write_csv(&mut self, name: &str, table: &Table) -> Result<(), CliError> {
        self.write_bytes(name, &table.to_csv()?, false)
    }

    /// Plot series in the selected format; `stem` gets the extension.
    pub fn write_series(&mut self, stem: &str, table: &Table) -> Result<(), CliError> {
        match self.format {
            Format::Csv => self.write_bytes(&format!("{stem}.csv"), &table.to_csv()?, false),
            Format::Json => self.write_bytes(&format!("{stem}.json"), &table.to_json()?, false),
        }
    }

    /// Writes the manifest last; it lists every file written before it.
    pub fn finish(self, mut manifest: RunManifest) -> Result<PathBuf, CliError> {
        manifest.files = self.files;
        let path = self.dir.join(MANIFEST_FILE);
        std::fs::write(&path, pretty(&manifest)?)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
        Ok(path)
    }
}

pub fn read_manifest(dir: &Path) -> Result<RunManifest, CliError> {
    let path = dir.join(MANIFEST_FILE);
    let text = std::fs::read_to_string(&path).map_err(|e| {
        CliError::MissingInput(format!("no run manifest at {}: {e}", path.display()))
    })?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("malformed manifest {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_uses_newlines_and_round_trip_floats() {
        let mut t = Table::new(&["x", "y", "provenance"]);
        t.push(vec![
            Cell::Num(0.1),
            Cell::Num(1e-20),
            Cell::Text("fdm".into()),
        ]);
        t.push(vec![
            Cell::Num(1.0),
            Cell::Num(-2.5),
            Cell::Text("fdm".into()),
        ]);
        let text = String::from_utf8(t.to_csv().unwrap()).unwrap();
        assert_eq!(text, "x,y,provenance\n0.1,1e-20,fdm\n1.0,-2.5,fdm\n");
        assert!(!text.contains('\r'));
    }

    #[test]
    fn json_table_is_row_objects() {
        let mut t = Table::new(&["epoch", "loss"]);
        t.push(vec![Cell::Int(1), Cell::Num(0.3333333333333333)]);
        let v: serde_json::Value = serde_json::from_slice(&t.to_json().unwrap()).unwrap();
        assert_eq!(
            v,
            serde_json::json!([{"epoch": 1, "loss": 0.3333333333333333}])
        );
    }

    #[test]
    fn digest_is_sha256() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}

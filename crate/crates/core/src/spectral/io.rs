use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::field::Field;
use super::grid::TorusGrid;
use crate::error::{Error, Result};

/// JSON sidecar written next to a raw field file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldHeader {
    pub name: String,
    pub units: String,
    pub dimension: usize,
    pub points_per_axis: usize,
    pub axis_length: f64,
    pub dtype: String,
    pub byte_order: String,
    pub layout: String,
    #[serde(default)]
    pub time: Option<f64>,
}

fn sidecar_path(bin: &Path) -> PathBuf {
    bin.with_extension("json")
}

/// Writes `<stem>.bin` (little-endian f64, row-major, last axis fastest) and
/// `<stem>.json`. Returns the path of the binary file.
pub fn write_field(dir: &Path, stem: &str, field: &Field, time: Option<f64>) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let bin = dir.join(format!("{stem}.bin"));
    let mut bytes = Vec::with_capacity(8 * field.data().len());
    for v in field.data() {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(&bin, bytes).map_err(|e| Error::io(&bin, e))?;
    let g = field.grid();
    let header = FieldHeader {
        name: stem.to_string(),
        units: field.units().to_string(),
        dimension: g.dim(),
        points_per_axis: g.n(),
        axis_length: 2.0 * std::f64::consts::PI,
        dtype: "f64".into(),
        byte_order: "little".into(),
        layout: "row-major".into(),
        time,
    };
    let side = sidecar_path(&bin);
    let text = serde_json::to_string_pretty(&header)?;
    fs::write(&side, text).map_err(|e| Error::io(&side, e))?;
    Ok(bin)
}

/// Reads a field written by [`write_field`], validating it against the sidecar.
pub fn read_field(bin: &Path) -> Result<(FieldHeader, Field)> {
    let side = sidecar_path(bin);
    let text = fs::read_to_string(&side).map_err(|e| Error::io(&side, e))?;
    let header: FieldHeader = serde_json::from_str(&text)?;
    if header.dtype != "f64" || header.byte_order != "little" || header.layout != "row-major" {
        return Err(Error::Config(format!(
            "{}: unsupported encoding {}/{}/{}",
            side.display(),
            header.dtype,
            header.byte_order,
            header.layout
        )));
    }
    let grid = TorusGrid::new(header.dimension, header.points_per_axis)?;
    let bytes = fs::read(bin).map_err(|e| Error::io(bin, e))?;
    if bytes.len() != 8 * grid.len() {
        return Err(Error::Mismatch(format!(
            "{}: {} bytes, expected {}",
            bin.display(),
            bytes.len(),
            8 * grid.len()
        )));
    }
    let data = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    let field = Field::new(&grid, data, header.units.clone())?;
    Ok((header, field))
}

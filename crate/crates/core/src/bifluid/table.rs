//! Tabulation of the change of variables over a density grid.

use std::io::Write;

use serde::Serialize;

use super::system::BiFluidSystem;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TableRow {
    pub rho: f64,
    #[serde(rename = "Z")]
    pub z: f64,
    pub rho_plus: f64,
    pub a_frac: f64,
    #[serde(rename = "P")]
    pub pressure: f64,
}

/// One row per `(ρ, Z)` in the tensor grid, `ρ` varying slowest.
pub fn bifluid_table(sys: &BiFluidSystem, rhos: &[f64], zs: &[f64]) -> Result<Vec<TableRow>> {
    let mut rows = Vec::with_capacity(rhos.len() * zs.len());
    for &rho in rhos {
        for &z in zs {
            let ph = sys.recover_phases(rho, z)?;
            rows.push(TableRow {
                rho,
                z,
                rho_plus: ph.rho_plus,
                a_frac: ph.a_frac,
                pressure: sys.plus().pressure(ph.rho_plus),
            });
        }
    }
    Ok(rows)
}

pub fn write_table<W: Write>(rows: &[TableRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| crate::error::Error::io("<table output>", e))?;
    Ok(())
}

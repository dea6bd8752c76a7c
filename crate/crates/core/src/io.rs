//! CSV exchange of sampled interfaces.
//!
//! Graphs use two columns `s_or_x, alpha_or_eta` on the uniform grid
//! `x_j = 2πj/n`. Curves add a third column `beta`; rows are samples of a
//! closed curve at uniform values of an arbitrary parameter and are
//! resampled to arc length on load.

use std::f64::consts::TAU;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{ArcCurve, GraphInterface};

pub const GRAPH_HEADER: [&str; 2] = ["s_or_x", "alpha_or_eta"];
pub const CURVE_HEADER: [&str; 3] = ["s_or_x", "alpha_or_eta", "beta"];

fn read_rows(reader: impl Read, columns: usize) -> Result<Vec<Vec<f64>>> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let mut rows = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        if rec.len() < columns {
            return Err(Error::InvalidInput(format!(
                "row {}: expected {columns} columns, found {}",
                line + 2,
                rec.len()
            )));
        }
        let row = (0..columns)
            .map(|c| {
                rec[c].parse::<f64>().map_err(|e| {
                    Error::InvalidInput(format!("row {}, column {}: {e} ({:?})", line + 2, c + 1, &rec[c]))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

pub fn read_graph(reader: impl Read) -> Result<GraphInterface> {
    let rows = read_rows(reader, 2)?;
    let n = rows.len();
    for (j, row) in rows.iter().enumerate() {
        let expected = TAU * j as f64 / n as f64;
        if (row[0] - expected).abs() > 1e-9 * TAU {
            return Err(Error::InvalidInput(format!(
                "graph samples must lie on the uniform grid: row {} has x = {}, expected {expected}",
                j + 2,
                row[0]
            )));
        }
    }
    GraphInterface::new(rows.into_iter().map(|r| r[1]).collect())
}

/// Curve samples resampled onto as many arc-length nodes as rows.
pub fn read_curve(reader: impl Read) -> Result<ArcCurve> {
    read_curve_onto(reader, None)
}

/// Curve samples resampled onto `n_out` arc-length nodes (default: one per row).
///
/// Inputs with strongly varying speed need more rows than output nodes.
pub fn read_curve_onto(reader: impl Read, n_out: Option<usize>) -> Result<ArcCurve> {
    let rows = read_rows(reader, 3)?;
    if rows.len() < 4 {
        return Err(Error::InvalidInput("a curve needs at least 4 samples".into()));
    }
    let alpha: Vec<f64> = rows.iter().map(|r| r[1]).collect();
    let beta: Vec<f64> = rows.iter().map(|r| r[2]).collect();
    let n = alpha.len();
    // One more parameter step closes the curve; its horizontal advance is the
    // winding number times the period.
    let step = alpha[1] - alpha[0];
    let winding = ((alpha[n - 1] - alpha[0] + step) / TAU).round() as i32;
    ArcCurve::reparametrize(&alpha, &beta, winding, n_out.unwrap_or(n))
}

pub fn write_graph(graph: &GraphInterface, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(GRAPH_HEADER)?;
    for (x, e) in graph.x_grid().iter().zip(graph.samples()) {
        w.write_record([x.to_string(), e.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_curve(curve: &ArcCurve, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CURVE_HEADER)?;
    for ((s, a), b) in curve.s_grid().iter().zip(curve.alpha()).zip(curve.beta()) {
        w.write_record([s.to_string(), a.to_string(), b.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_graph(path: &Path) -> Result<GraphInterface> {
    read_graph(std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?)
}

pub fn load_curve(path: &Path) -> Result<ArcCurve> {
    load_curve_onto(path, None)
}

pub fn load_curve_onto(path: &Path, n_out: Option<usize>) -> Result<ArcCurve> {
    read_curve_onto(std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?, n_out)
}

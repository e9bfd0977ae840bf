//! Surface export for plotting and meshing tools.

use std::fmt::Write as _;
use std::path::Path;

use pwf_core::flow::FlowState;

use crate::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Obj,
    CsvGrid,
}

/// Wavefront OBJ: `N^2` vertices in grid order and `N^2` quads that wrap
/// around both periods, so the mesh is a closed torus (`V - E + F = 0`).
pub fn to_obj(state: &FlowState) -> Result<String> {
    let m = state.m();
    if m != 3 {
        return Err(CliError::UnsupportedAmbientDim { m });
    }
    let n = state.n();
    let phi = &state.phi.phi;
    let mut out = String::new();
    for i in 0..state.grid.len() {
        writeln!(out, "v {:.16e} {:.16e} {:.16e}", phi[0][i], phi[1][i], phi[2][i]).unwrap();
    }
    // OBJ indices are 1-based.
    let id = |i1: usize, i2: usize| (i1 % n) * n + (i2 % n) + 1;
    for i1 in 0..n {
        for i2 in 0..n {
            writeln!(
                out,
                "f {} {} {} {}",
                id(i1, i2),
                id(i1 + 1, i2),
                id(i1 + 1, i2 + 1),
                id(i1, i2 + 1)
            )
            .unwrap();
        }
    }
    Ok(out)
}

/// Header `x1,x2,phi_1..phi_m`, one row per node, 17 significant digits.
pub fn to_csv_grid(state: &FlowState) -> String {
    let m = state.m();
    let mut out = String::from("x1,x2");
    for c in 1..=m {
        write!(out, ",phi_{c}").unwrap();
    }
    out.push('\n');
    for i in 0..state.grid.len() {
        let x = state.grid.node(i);
        write!(out, "{:.16e},{:.16e}", x[0], x[1]).unwrap();
        for comp in &state.phi.phi {
            write!(out, ",{:.16e}", comp[i]).unwrap();
        }
        out.push('\n');
    }
    out
}

/// Reads the `phi_*` columns of a csv_grid export, component-major.
pub fn read_csv_grid(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut lines = text.lines();
    let head = lines
        .next()
        .ok_or_else(|| CliError::BadParameters("empty csv_grid".into()))?;
    let m = head.split(',').count().saturating_sub(2);
    let mut phi = vec![Vec::new(); m];
    for (row, line) in lines.enumerate() {
        let vals: Vec<&str> = line.split(',').collect();
        if vals.len() != m + 2 {
            return Err(CliError::BadParameters(format!("row {} has {} columns", row + 1, vals.len())));
        }
        for c in 0..m {
            let v = vals[c + 2]
                .parse()
                .map_err(|_| CliError::BadParameters(format!("row {}: bad number", row + 1)))?;
            phi[c].push(v);
        }
    }
    Ok(phi)
}

pub fn export_surface(state: &FlowState, path: &Path, format: Format) -> Result<()> {
    let text = match format {
        Format::Obj => to_obj(state)?,
        Format::CsvGrid => to_csv_grid(state),
    };
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

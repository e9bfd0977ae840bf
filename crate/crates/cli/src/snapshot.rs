//! Binary state snapshots.
//!
//! Layout, all little-endian: the magic `PWFL`, `version: u32`, `n: u32`,
//! `m: u32`, `a: f64`, `b: f64`, `t: f64`, followed by `m * n^2` complex
//! spectral coefficients as `(re, im)` pairs of `f64`, component by component,
//! in the grid's FFT order.

use std::path::Path;

use num_complex::Complex64;
use pwf_core::flow::FlowState;
use pwf_core::geometry::ImmersionField;
use pwf_core::grid::{FlatModulus, Grid};

use crate::{CliError, Result};

pub const MAGIC: &[u8; 4] = b"PWFL";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 3 * 4 + 3 * 8;

pub fn encode(state: &FlowState) -> Vec<u8> {
    let grid = &state.grid;
    let m = state.m();
    let modulus = state.modulus();
    let mut out = Vec::with_capacity(HEADER_LEN + 16 * m * grid.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(grid.n() as u32).to_le_bytes());
    out.extend_from_slice(&(m as u32).to_le_bytes());
    for v in [modulus.a, modulus.b, state.t] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for comp in &state.phi.phi {
        for z in grid.forward_real(comp) {
            out.extend_from_slice(&z.re.to_le_bytes());
            out.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, len: usize, what: &str) -> Result<&[u8]> {
        if self.bytes.len() - self.pos < len {
            return Err(CliError::BadParameters(format!(
                "snapshot truncated at byte {} while reading {what} ({} bytes present)",
                self.pos,
                self.bytes.len()
            )));
        }
        let s = &self.bytes[self.pos..self.pos + len];
        self.pos += len;
        Ok(s)
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn f64(&mut self, what: &str) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }
}

pub fn decode(bytes: &[u8]) -> Result<FlowState> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4, "magic")? != MAGIC {
        return Err(CliError::BadParameters("not a PWFL snapshot (bad magic at byte 0)".into()));
    }
    let version = r.u32("version")?;
    if version != VERSION {
        return Err(CliError::BadParameters(format!(
            "snapshot version {version} is not supported (byte 4)"
        )));
    }
    let n = r.u32("n")? as usize;
    let m = r.u32("m")? as usize;
    let (a, b, t) = (r.f64("a")?, r.f64("b")?, r.f64("t")?);
    let grid = Grid::new(n, FlatModulus::new(a, b)?)?;
    let mut phi = Vec::with_capacity(m);
    for c in 0..m {
        let mut coeffs = Vec::with_capacity(grid.len());
        for _ in 0..grid.len() {
            let re = r.f64(&format!("coefficient of component {c}"))?;
            let im = r.f64(&format!("coefficient of component {c}"))?;
            coeffs.push(Complex64::new(re, im));
        }
        phi.push(grid.inverse_real(&coeffs));
    }
    if r.pos != bytes.len() {
        return Err(CliError::BadParameters(format!(
            "{} trailing bytes after byte {}",
            bytes.len() - r.pos,
            r.pos
        )));
    }
    let mut state = FlowState::new(ImmersionField::new(phi)?, grid)?;
    state.t = t;
    Ok(state)
}

pub fn write(state: &FlowState, path: &Path) -> Result<()> {
    std::fs::write(path, encode(state)).map_err(|e| CliError::io(path, e))
}

pub fn read(path: &Path) -> Result<FlowState> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    decode(&bytes)
}

/// Whether a file starts with the snapshot magic.
pub fn is_snapshot(path: &Path) -> bool {
    use std::io::Read;
    let mut head = [0u8; 4];
    std::fs::File::open(path)
        .and_then(|mut f| f.read_exact(&mut head))
        .map(|_| &head == MAGIC)
        .unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use pwf_core::surfaces;

    #[test]
    fn round_trip_preserves_the_state() {
        let s = surfaces::revolution(16, 1.6).unwrap();
        let back = decode(&encode(&s)).unwrap();
        assert_eq!(back.modulus(), s.modulus());
        assert_eq!(back.n(), 16);
        for (x, y) in back.phi.phi.iter().zip(&s.phi.phi) {
            for (p, q) in x.iter().zip(y) {
                assert!((p - q).abs() < 1e-14);
            }
        }
        // Re-encoding a decoded state reproduces the coefficients to round-off.
        assert_eq!(encode(&back).len(), encode(&s).len());
    }

    #[test]
    fn truncation_reports_the_offset() {
        let bytes = encode(&surfaces::clifford(8).unwrap());
        let cut = &bytes[..HEADER_LEN + 20];
        match decode(cut) {
            Err(CliError::BadParameters(msg)) => {
                assert!(msg.contains(&format!("byte {}", HEADER_LEN + 16)), "{msg}")
            }
            other => panic!("{other:?}"),
        }
        assert!(decode(b"PWF").is_err());
        assert!(decode(b"XXXX").is_err());
    }
}

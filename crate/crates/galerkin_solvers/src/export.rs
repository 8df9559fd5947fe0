//! Trajectory export: CSV and a compact little-endian binary record.
//!
//! Binary layout: `b"GLKT"`, `u32` version, `u8` model code, `u8` hash length, hash
//! bytes, `u32` cutoff, `u64` row count, `u64` mode count, then rows `[t, c_0, ...]`
//! of `f64`.

use mode_algebra::{lattice_modes, ModelKind};
use std::io::{Read, Write};

use crate::{SolverError, Trajectory};

const MAGIC: &[u8; 4] = b"GLKT";
const VERSION: u32 = 1;

fn model_code(m: ModelKind) -> u8 {
    match m {
        ModelKind::Rd => 0,
        ModelKind::Nse2d => 1,
        ModelKind::Boussinesq => 2,
        ModelKind::Euler3d => 3,
    }
}

fn model_from_code(c: u8) -> Option<ModelKind> {
    [ModelKind::Rd, ModelKind::Nse2d, ModelKind::Boussinesq, ModelKind::Euler3d].get(c as usize).copied()
}

fn io(e: std::io::Error) -> SolverError {
    SolverError::Io(e.to_string())
}

pub fn write_csv<W: Write>(tr: &Trajectory, mut w: W) -> Result<(), SolverError> {
    let modes = lattice_modes(tr.model, tr.cutoff);
    let mut header = String::from("time");
    for m in &modes {
        header.push_str(&format!(",\"{m}\""));
    }
    writeln!(w, "{header}").map_err(io)?;
    for (t, s) in tr.times.iter().zip(&tr.states) {
        let mut line = format!("{t:.16e}");
        for c in &s.coeffs {
            line.push_str(&format!(",{c:.16e}"));
        }
        writeln!(w, "{line}").map_err(io)?;
    }
    Ok(())
}

pub fn write_binary<W: Write>(tr: &Trajectory, mut w: W) -> Result<(), SolverError> {
    let n_modes = tr.states.first().map(|s| s.coeffs.len()).unwrap_or(0);
    let hash = tr.params_hash.as_bytes();
    if hash.len() > 255 {
        return Err(SolverError::Format("params hash longer than 255 bytes".into()));
    }
    w.write_all(MAGIC).map_err(io)?;
    w.write_all(&VERSION.to_le_bytes()).map_err(io)?;
    w.write_all(&[model_code(tr.model), hash.len() as u8]).map_err(io)?;
    w.write_all(hash).map_err(io)?;
    w.write_all(&tr.cutoff.to_le_bytes()).map_err(io)?;
    w.write_all(&(tr.times.len() as u64).to_le_bytes()).map_err(io)?;
    w.write_all(&(n_modes as u64).to_le_bytes()).map_err(io)?;
    for (t, s) in tr.times.iter().zip(&tr.states) {
        w.write_all(&t.to_le_bytes()).map_err(io)?;
        for c in &s.coeffs {
            w.write_all(&c.to_le_bytes()).map_err(io)?;
        }
    }
    Ok(())
}

/// Decoded binary record.
#[derive(Clone, Debug, PartialEq)]
pub struct BinaryRecord {
    pub model: ModelKind,
    pub params_hash: String,
    pub cutoff: u32,
    pub times: Vec<f64>,
    /// Row-major `times.len() x n_modes`.
    pub coeffs: Vec<Vec<f64>>,
}

pub fn read_binary<R: Read>(mut r: R) -> Result<BinaryRecord, SolverError> {
    let bad = |s: &str| SolverError::Format(s.to_string());
    let mut b4 = [0u8; 4];
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b4).map_err(io)?;
    if &b4 != MAGIC {
        return Err(bad("not a trajectory record"));
    }
    r.read_exact(&mut b4).map_err(io)?;
    if u32::from_le_bytes(b4) != VERSION {
        return Err(bad("unsupported version"));
    }
    let mut b2 = [0u8; 2];
    r.read_exact(&mut b2).map_err(io)?;
    let model = model_from_code(b2[0]).ok_or_else(|| bad("unknown model code"))?;
    let mut hash = vec![0u8; b2[1] as usize];
    r.read_exact(&mut hash).map_err(io)?;
    let params_hash = String::from_utf8(hash).map_err(|_| bad("hash is not utf-8"))?;
    r.read_exact(&mut b4).map_err(io)?;
    let cutoff = u32::from_le_bytes(b4);
    r.read_exact(&mut b8).map_err(io)?;
    let rows = u64::from_le_bytes(b8) as usize;
    r.read_exact(&mut b8).map_err(io)?;
    let cols = u64::from_le_bytes(b8) as usize;
    let mut times = Vec::with_capacity(rows);
    let mut coeffs = Vec::with_capacity(rows);
    let mut next = |r: &mut R| -> Result<f64, SolverError> {
        r.read_exact(&mut b8).map_err(io)?;
        Ok(f64::from_le_bytes(b8))
    };
    for _ in 0..rows {
        times.push(next(&mut r)?);
        coeffs.push((0..cols).map(|_| next(&mut r)).collect::<Result<Vec<_>, _>>()?);
    }
    Ok(BinaryRecord { model, params_hash, cutoff, times, coeffs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{ModelParams, NoisePath, Solver};

    fn sample() -> Trajectory {
        let s = Solver::new(ModelParams::nse2d(2, 0.1, &[[1, 0]])).unwrap();
        let mut u = s.zero();
        u.coeffs[0] = 0.3;
        u.coeffs[5] = -1.0;
        s.trajectory(&u, &NoisePath::linear(&[1.0, 0.5], 0.01), 0.01).unwrap()
    }

    #[test]
    fn binary_round_trip_is_bit_exact() {
        let tr = sample();
        let mut buf = Vec::new();
        write_binary(&tr, &mut buf).unwrap();
        let rec = read_binary(buf.as_slice()).unwrap();
        assert_eq!(rec.params_hash, tr.params_hash);
        assert_eq!(rec.times, tr.times);
        for (row, s) in rec.coeffs.iter().zip(&tr.states) {
            assert_eq!(row, &s.coeffs);
        }
    }

    #[test]
    fn csv_has_one_column_per_mode() {
        let tr = sample();
        let mut buf = Vec::new();
        write_csv(&tr, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert!(lines.next().unwrap().starts_with("time,\"xi:cos(0,1)\""));
        let row: Vec<f64> = lines.next().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(row.len(), 1 + tr.states[0].coeffs.len());
        assert_eq!(&row[1..], tr.states[0].coeffs.as_slice());
    }
}

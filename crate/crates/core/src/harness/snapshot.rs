//! Binary snapshots: `"YDVL"`, u32 version, u32 n, f64 t, u32 field count,
//! length-prefixed UTF-8 names, then the samples of each field as
//! little-endian doubles, row-major with x₁ fastest.

use std::fs;
use std::path::Path;

use crate::dynamics::FluidState;
use crate::error::HarnessError;
use crate::field::{ScalarField, VectorField};
use crate::grid::Grid;

pub const MAGIC: &[u8; 4] = b"YDVL";
pub const VERSION: u32 = 1;
pub const FIELD_NAMES: [&str; 8] = ["rho", "u1", "u2", "eta", "x1", "x2", "pi", "omega"];

pub fn encode_snapshot(s: &FluidState) -> Vec<u8> {
    let n = s.grid().n();
    let fields: [&ScalarField; 8] =
        [&s.rho, &s.u.x, &s.u.y, &s.eta, &s.x_field.x, &s.x_field.y, &s.pi, &s.omega];
    let mut out = Vec::with_capacity(64 + 8 * 8 * n * n);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(n as u32).to_le_bytes());
    out.extend_from_slice(&s.t.to_le_bytes());
    out.extend_from_slice(&(FIELD_NAMES.len() as u32).to_le_bytes());
    for name in FIELD_NAMES {
        out.extend_from_slice(&(name.len() as u32).to_le_bytes());
        out.extend_from_slice(name.as_bytes());
    }
    for f in fields {
        for v in f.values() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

pub fn write_snapshot(s: &FluidState, path: &Path) -> Result<(), HarnessError> {
    fs::write(path, encode_snapshot(s))?;
    Ok(())
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, k: usize) -> Result<&'a [u8], HarnessError> {
        let end = self.pos.checked_add(k).filter(|&e| e <= self.buf.len()).ok_or_else(|| {
            HarnessError::Format(format!("truncated at byte {} (wanted {k} more)", self.pos))
        })?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32, HarnessError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64, HarnessError> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

/// Decodes a snapshot; with `expected` set, a different grid is a mismatch.
pub fn decode_snapshot(buf: &[u8], expected: Option<&Grid>) -> Result<FluidState, HarnessError> {
    let mut c = Cursor { buf, pos: 0 };
    if c.take(4)? != MAGIC {
        return Err(HarnessError::Format("bad magic".into()));
    }
    let version = c.u32()?;
    if version != VERSION {
        return Err(HarnessError::Format(format!("unsupported version {version}")));
    }
    let n = c.u32()? as usize;
    if let Some(g) = expected {
        if g.n() != n {
            return Err(HarnessError::GridMismatch { expected: g.n(), found: n });
        }
    }
    let grid = match expected {
        Some(g) => g.clone(),
        None => Grid::new(n).map_err(|e| HarnessError::Format(e.to_string()))?,
    };
    let t = c.f64()?;
    let count = c.u32()? as usize;
    let mut names = Vec::with_capacity(count.min(64));
    for _ in 0..count {
        let len = c.u32()? as usize;
        let raw = c.take(len)?;
        let name = std::str::from_utf8(raw)
            .map_err(|_| HarnessError::Format("field name is not UTF-8".into()))?;
        names.push(name.to_string());
    }
    let mut fields = Vec::with_capacity(count.min(64));
    for _ in 0..count {
        let bytes = c.take(8 * n * n)?;
        let values = bytes.chunks_exact(8).map(|b| f64::from_le_bytes(b.try_into().unwrap())).collect();
        fields.push(ScalarField::new(&grid, values));
    }
    if c.pos != buf.len() {
        return Err(HarnessError::Format(format!("{} trailing bytes", buf.len() - c.pos)));
    }
    let get = |name: &str| -> Result<ScalarField, HarnessError> {
        let i = names
            .iter()
            .position(|m| m == name)
            .ok_or_else(|| HarnessError::Format(format!("missing field '{name}'")))?;
        Ok(fields[i].clone())
    };
    Ok(FluidState {
        t,
        rho: get("rho")?,
        u: VectorField::new(get("u1")?, get("u2")?),
        eta: get("eta")?,
        x_field: VectorField::new(get("x1")?, get("x2")?),
        pi: get("pi")?,
        omega: get("omega")?,
    })
}

pub fn read_snapshot(path: &Path, expected: Option<&Grid>) -> Result<FluidState, HarnessError> {
    decode_snapshot(&fs::read(path)?, expected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pressure::PressureSolver;

    fn state(n: usize) -> FluidState {
        let g = Grid::new(n).unwrap();
        let rho = ScalarField::from_fn(&g, |x, y| 2.0 + 0.5 * x.sin() * y.cos());
        let u = VectorField::from_fn(&g, |x, y| x.cos() * y.sin(), |x, y| -x.sin() * y.cos());
        let mut s = FluidState::initial(rho, u, &PressureSolver::default()).unwrap();
        s.t = 0.375;
        s
    }

    #[test]
    fn roundtrip_is_bitwise() {
        let s = state(16);
        let back = decode_snapshot(&encode_snapshot(&s), None).unwrap();
        assert_eq!(back.t.to_bits(), s.t.to_bits());
        for (a, b) in [(&back.rho, &s.rho), (&back.eta, &s.eta), (&back.pi, &s.pi), (&back.u.y, &s.u.y)] {
            assert!(a.values().iter().zip(b.values()).all(|(x, y)| x.to_bits() == y.to_bits()));
        }
    }

    #[test]
    fn truncated_and_bad_magic() {
        let bytes = encode_snapshot(&state(8));
        assert!(matches!(decode_snapshot(&bytes[..bytes.len() - 3], None), Err(HarnessError::Format(_))));
        assert!(matches!(decode_snapshot(&bytes[..10], None), Err(HarnessError::Format(_))));
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(decode_snapshot(&bad, None), Err(HarnessError::Format(_))));
        let mut ver = bytes;
        ver[4] = 2;
        assert!(matches!(decode_snapshot(&ver, None), Err(HarnessError::Format(_))));
    }

    #[test]
    fn grid_mismatch() {
        let bytes = encode_snapshot(&state(16));
        let g = Grid::new(8).unwrap();
        assert!(matches!(
            decode_snapshot(&bytes, Some(&g)),
            Err(HarnessError::GridMismatch { expected: 8, found: 16 })
        ));
    }
}

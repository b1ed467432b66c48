//! Binary state snapshots.
//!
//! Layout: the 8-byte magic `MLSPIN1\0`, then little-endian `f64`s: `L`, `N`,
//! `q`, `p`, `π` (three each), then `A` and `Π`, each component-major with
//! nodes in x-fastest order.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::grid::{GridSpec, ScalarField, VectorField3};
use crate::hamiltonian::State;
use crate::Vec3;

pub const MAGIC: &[u8; 8] = b"MLSPIN1\0";

pub fn write_snapshot(w: &mut impl Write, y: &State) -> Result<()> {
    let g = y.grid();
    let mut buf = Vec::with_capacity(8 * (11 + 6 * g.node_count()) + MAGIC.len());
    buf.extend_from_slice(MAGIC);
    let header = [g.len(), g.n() as f64, y.q.x, y.q.y, y.q.z, y.p.x, y.p.y, y.p.z, y.pi.x, y.pi.y, y.pi.z];
    for v in header {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    for field in [&y.a, &y.pi_a] {
        for c in field.components() {
            for v in c.values() {
                buf.extend_from_slice(&v.to_le_bytes());
            }
        }
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_snapshot(r: &mut impl Read) -> Result<State> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() < MAGIC.len() || &bytes[..MAGIC.len()] != MAGIC {
        return Err(Error::Snapshot("bad magic".into()));
    }
    let body = &bytes[MAGIC.len()..];
    if body.len() % 8 != 0 || body.len() < 8 * 11 {
        return Err(Error::Snapshot("truncated header".into()));
    }
    let vals: Vec<f64> = body.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
    let (len, nf) = (vals[0], vals[1]);
    if !(nf.fract() == 0.0 && nf > 0.0 && nf < 1e6) {
        return Err(Error::Snapshot(format!("invalid N = {nf}")));
    }
    let g = GridSpec::new(len, nf as usize).map_err(|e| Error::Snapshot(e.to_string()))?;
    let nodes = g.node_count();
    if vals.len() != 11 + 6 * nodes {
        return Err(Error::Snapshot(format!("expected {} values, found {}", 11 + 6 * nodes, vals.len())));
    }
    let v3 = |i: usize| Vec3::new(vals[i], vals[i + 1], vals[i + 2]);
    let field = |start: usize| -> Result<VectorField3> {
        let comp = |j: usize| ScalarField::from_values(g, vals[start + j * nodes..start + (j + 1) * nodes].to_vec());
        VectorField3::from_components([comp(0)?, comp(1)?, comp(2)?])
    };
    Ok(State { a: field(11)?, pi_a: field(11 + 3 * nodes)?, q: v3(2), p: v3(5), pi: v3(8) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> State {
        let g = GridSpec::new(6.0, 8).unwrap();
        let mut y = State::zeros(g);
        y.a = VectorField3::from_fn(g, |x| Vec3::new(x.x, x.y * 2.0, -x.z));
        y.pi_a = VectorField3::from_fn(g, |x| Vec3::new(1.0, x.x * x.y, 0.5));
        y.q = Vec3::new(0.1, 0.2, 0.3);
        y.p = Vec3::new(-1.0, 0.0, 1e-300);
        y.pi = Vec3::new(f64::MAX, -0.0, 7.0);
        y
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let y = sample();
        let mut buf = Vec::new();
        write_snapshot(&mut buf, &y).unwrap();
        let back = read_snapshot(&mut buf.as_slice()).unwrap();
        assert_eq!(back, y);
        assert_eq!(back.pi.y.to_bits(), (-0.0f64).to_bits());
    }

    #[test]
    fn layout() {
        let y = sample();
        let mut buf = Vec::new();
        write_snapshot(&mut buf, &y).unwrap();
        assert_eq!(&buf[..8], b"MLSPIN1\0");
        let f = |i: usize| f64::from_le_bytes(buf[8 + 8 * i..16 + 8 * i].try_into().unwrap());
        assert_eq!((f(0), f(1), f(2), f(5), f(10)), (6.0, 8.0, 0.1, -1.0, 7.0));
        // A_x at node 1 (x-fastest), then A_y at node 0
        assert_eq!(f(11 + 1), y.a[0][1]);
        assert_eq!(f(11 + 512), y.a[1][0]);
        assert_eq!(f(11 + 3 * 512 + 2), y.pi_a[0][2]);
        assert_eq!(buf.len(), 8 + 8 * (11 + 6 * 512));
    }

    #[test]
    fn rejects_corrupt_input() {
        let y = sample();
        let mut buf = Vec::new();
        write_snapshot(&mut buf, &y).unwrap();
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(read_snapshot(&mut bad.as_slice()), Err(Error::Snapshot(_))));
        let short = &buf[..buf.len() - 8];
        assert!(matches!(read_snapshot(&mut &short[..]), Err(Error::Snapshot(_))));
        assert!(read_snapshot(&mut &buf[..20]).is_err());
    }
}

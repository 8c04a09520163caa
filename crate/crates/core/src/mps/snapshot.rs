//! Binary snapshot format.
//!
//! Layout (little-endian): magic `CTNMPS01`, `n: u64`, `n - 1` bond
//! dimensions as `u64`, `center: u64`, then every site tensor in row-major
//! `(left, physical, right)` order as `(re: f64, im: f64)` pairs.

use std::io::{Read, Write};

use num_complex::Complex64 as C64;

use super::{Mps, Tensor, TruncationPolicy};
use crate::error::{CtnError, Result};

const MAGIC: &[u8; 8] = b"CTNMPS01";

fn write_u64(w: &mut impl Write, v: u64) -> Result<()> {
    w.write_all(&v.to_le_bytes()).map_err(|e| CtnError::io("writing snapshot", e))
}

fn read_u64(r: &mut impl Read) -> Result<u64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf).map_err(|e| CtnError::io("reading snapshot", e))?;
    Ok(u64::from_le_bytes(buf))
}

fn read_f64(r: &mut impl Read) -> Result<f64> {
    Ok(f64::from_bits(read_u64(r)?))
}

impl Mps {
    pub fn write_snapshot(&self, w: &mut impl Write) -> Result<()> {
        w.write_all(MAGIC).map_err(|e| CtnError::io("writing snapshot", e))?;
        write_u64(w, self.n as u64)?;
        for chi in self.bond_dims() {
            write_u64(w, chi as u64)?;
        }
        write_u64(w, self.center as u64)?;
        for t in &self.tensors {
            for a in &t.data {
                write_u64(w, a.re.to_bits())?;
                write_u64(w, a.im.to_bits())?;
            }
        }
        Ok(())
    }

    pub fn read_snapshot(r: &mut impl Read) -> Result<Mps> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic).map_err(|e| CtnError::io("reading snapshot", e))?;
        if &magic != MAGIC {
            return Err(CtnError::Parse { pos: 0, msg: "not an MPS snapshot".into() });
        }
        let n = read_u64(r)? as usize;
        if n == 0 {
            return Err(CtnError::Parse { pos: 8, msg: "snapshot with zero sites".into() });
        }
        let mut dims = vec![1usize; n + 1];
        for d in dims.iter_mut().take(n).skip(1) {
            *d = read_u64(r)? as usize;
        }
        let center = read_u64(r)? as usize;
        if center >= n {
            return Err(CtnError::SiteOutOfRange { site: center, n });
        }
        let mut tensors = Vec::with_capacity(n);
        for i in 0..n {
            let (dl, dr) = (dims[i], dims[i + 1]);
            let mut data = Vec::with_capacity(dl * 2 * dr);
            for _ in 0..dl * 2 * dr {
                let re = read_f64(r)?;
                let im = read_f64(r)?;
                data.push(C64::new(re, im));
            }
            tensors.push(Tensor { dl, dr, data });
        }
        Ok(Mps {
            n,
            tensors,
            center,
            trunc: TruncationPolicy::exact(),
            discarded: vec![0.0; n - 1],
            total_discarded: 0.0,
        })
    }
}

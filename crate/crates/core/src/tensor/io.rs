//! Two-part tensor container: a length-prefixed JSON header followed by the
//! raw little-endian f64 entry payload in lexicographic order.
//!
//! Layout: [u32 LE header length][header JSON][N^p × 8 bytes LE f64].
//! Preferred persistence is provenance-only (regenerate from the seed); this
//! format exists for tensors whose entries cannot be regenerated.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{CouplingTensor, Provenance};
use crate::error::{Error, Result};
use crate::scalar::{cast, to_f64, Scalar};

#[derive(Serialize, Deserialize)]
struct TensorHeader {
    order: usize,
    dim: usize,
    is_symmetric: bool,
    provenance: Option<Provenance>,
}

pub fn save_tensor<T: Scalar>(tensor: &CouplingTensor<T>, path: impl AsRef<Path>) -> Result<()> {
    let header = TensorHeader {
        order: tensor.order(),
        dim: tensor.dim(),
        is_symmetric: tensor.is_symmetric(),
        provenance: tensor.provenance().cloned(),
    };
    let header_bytes = serde_json::to_vec(&header)?;
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&(header_bytes.len() as u32).to_le_bytes())?;
    w.write_all(&header_bytes)?;
    for &e in tensor.entries() {
        w.write_all(&to_f64(e).to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_tensor<T: Scalar>(path: impl AsRef<Path>) -> Result<CouplingTensor<T>> {
    let mut r = BufReader::new(File::open(path)?);
    let mut len_bytes = [0u8; 4];
    r.read_exact(&mut len_bytes)?;
    let header_len = u32::from_le_bytes(len_bytes) as usize;
    let mut header_bytes = vec![0u8; header_len];
    r.read_exact(&mut header_bytes)?;
    let header: TensorHeader = serde_json::from_slice(&header_bytes)?;

    let total = (header.dim as u128)
        .checked_pow(header.order as u32)
        .ok_or_else(|| Error::MalformedFile("entry count overflows".into()))?
        as usize;
    let mut entries = Vec::with_capacity(total);
    let mut buf = [0u8; 8];
    for _ in 0..total {
        r.read_exact(&mut buf)
            .map_err(|_| Error::MalformedFile("entry payload shorter than header claims".into()))?;
        entries.push(cast::<T>(f64::from_le_bytes(buf)));
    }
    if r.read(&mut buf)? != 0 {
        return Err(Error::MalformedFile("trailing bytes after entry payload".into()));
    }
    let tensor = CouplingTensor::from_entries(header.order, header.dim, entries, false)?
        .with_provenance(header.provenance);
    Ok(if header.is_symmetric {
        tensor.mark_symmetric()
    } else {
        tensor
    })
}

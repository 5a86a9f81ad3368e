//! Named-tensor segment codec shared by checkpoints.
//!
//! A segment is a sequence of records, each:
//!
//! ```text
//! name_len: u64 LE | name: UTF-8 bytes | rank: u64 LE
//! dims: rank x u64 LE | data: prod(dims) x f64 LE
//! ```
//!
//! `f64` payloads are written with `to_le_bytes`, so a round trip reproduces
//! every entry bit-exactly (including signed zeros and NaN payloads).

use std::io::{Read, Write};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct NamedTensor {
    pub name: String,
    pub dims: Vec<u64>,
    pub data: Vec<f64>,
}

impl NamedTensor {
    pub fn new(name: impl Into<String>, dims: Vec<u64>, data: Vec<f64>) -> Self {
        NamedTensor { name: name.into(), dims, data }
    }

    pub fn vector(name: impl Into<String>, data: Vec<f64>) -> Self {
        let dims = vec![data.len() as u64];
        NamedTensor { name: name.into(), dims, data }
    }

    pub fn element_count(&self) -> u64 {
        self.dims.iter().product()
    }
}

/// Writes one record; `offset` tracks the running byte position.
pub fn write_tensor<W: Write>(w: &mut W, tensor: &NamedTensor, offset: &mut u64) -> Result<()> {
    if tensor.element_count() != tensor.data.len() as u64 {
        return Err(Error::config(format!(
            "tensor '{}' dims {:?} do not match data length {}",
            tensor.name,
            tensor.dims,
            tensor.data.len()
        )));
    }
    let name = tensor.name.as_bytes();
    w.write_all(&(name.len() as u64).to_le_bytes())?;
    w.write_all(name)?;
    w.write_all(&(tensor.dims.len() as u64).to_le_bytes())?;
    for d in &tensor.dims {
        w.write_all(&d.to_le_bytes())?;
    }
    for x in &tensor.data {
        w.write_all(&x.to_le_bytes())?;
    }
    *offset += 8 + name.len() as u64 + 8 + 8 * tensor.dims.len() as u64 + 8 * tensor.data.len() as u64;
    Ok(())
}

fn read_exact_at<R: Read>(r: &mut R, buf: &mut [u8], offset: &mut u64, what: &str) -> Result<()> {
    r.read_exact(buf).map_err(|e| Error::Checkpoint {
        offset: *offset,
        msg: format!("truncated while reading {what}: {e}"),
    })?;
    *offset += buf.len() as u64;
    Ok(())
}

fn read_u64<R: Read>(r: &mut R, offset: &mut u64, what: &str) -> Result<u64> {
    let mut buf = [0u8; 8];
    read_exact_at(r, &mut buf, offset, what)?;
    Ok(u64::from_le_bytes(buf))
}

/// Reads one record. `offset` must hold the reader's current byte position
/// and is advanced; errors carry the offset of the failing field.
pub fn read_tensor<R: Read>(r: &mut R, offset: &mut u64) -> Result<NamedTensor> {
    let name_len = read_u64(r, offset, "tensor name length")?;
    if name_len > 4096 {
        return Err(Error::Checkpoint {
            offset: *offset - 8,
            msg: format!("implausible tensor name length {name_len}"),
        });
    }
    let mut name_buf = vec![0u8; name_len as usize];
    read_exact_at(r, &mut name_buf, offset, "tensor name")?;
    let name = String::from_utf8(name_buf).map_err(|e| Error::Checkpoint {
        offset: *offset - name_len,
        msg: format!("tensor name is not UTF-8: {e}"),
    })?;

    let rank = read_u64(r, offset, "tensor rank")?;
    if rank > 8 {
        return Err(Error::Checkpoint {
            offset: *offset - 8,
            msg: format!("implausible tensor rank {rank}"),
        });
    }
    let mut dims = Vec::with_capacity(rank as usize);
    for _ in 0..rank {
        dims.push(read_u64(r, offset, "tensor dim")?);
    }
    let count: u64 = dims.iter().product();
    if count > (1 << 32) {
        return Err(Error::Checkpoint {
            offset: *offset,
            msg: format!("implausible tensor element count {count}"),
        });
    }
    let mut data = Vec::with_capacity(count as usize);
    let mut buf = [0u8; 8];
    for _ in 0..count {
        read_exact_at(r, &mut buf, offset, "tensor data")?;
        data.push(f64::from_le_bytes(buf));
    }
    Ok(NamedTensor { name, dims, data })
}

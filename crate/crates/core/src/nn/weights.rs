//! Binary container for named float arrays.
//!
//! Layout: magic `TGSM`, format version (u32 LE), array count (u32 LE), then
//! per entry: name length (u32 LE), UTF-8 name, rank (u32 LE), dims (u64 LE
//! each), payload (f64 LE each). Round-trips are bit-exact.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use thiserror::Error;

pub const MAGIC: [u8; 4] = *b"TGSM";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum WeightsError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("bad magic bytes (expected TGSM)")]
    BadMagic,
    #[error("unsupported format version {0}")]
    BadVersion(u32),
    #[error("array name is not valid UTF-8")]
    BadName,
    #[error("dims of '{name}' multiply to {expected} but payload declares {got}")]
    DimMismatch { name: String, expected: u64, got: u64 },
    #[error("missing array '{0}' in container")]
    Missing(String),
    #[error("array '{name}' has dims {got:?}, expected {expected:?}")]
    ShapeMismatch { name: String, expected: Vec<u64>, got: Vec<u64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedArray {
    pub name: String,
    pub dims: Vec<u64>,
    pub data: Vec<f64>,
}

impl NamedArray {
    pub fn new(name: impl Into<String>, dims: Vec<u64>, data: Vec<f64>) -> Self {
        let arr = NamedArray { name: name.into(), dims, data };
        debug_assert_eq!(arr.dims.iter().product::<u64>(), arr.data.len() as u64);
        arr
    }

    /// Convenience for a single scalar payload.
    pub fn scalar(name: impl Into<String>, value: f64) -> Self {
        NamedArray::new(name, vec![1], vec![value])
    }

    /// Stores a u64 bit-exactly by reinterpreting it as an f64 payload.
    pub fn scalar_bits(name: impl Into<String>, value: u64) -> Self {
        NamedArray::new(name, vec![1], vec![f64::from_bits(value)])
    }
}

pub fn save(path: &Path, arrays: &[NamedArray]) -> Result<(), WeightsError> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&MAGIC)?;
    w.write_all(&FORMAT_VERSION.to_le_bytes())?;
    w.write_all(&(arrays.len() as u32).to_le_bytes())?;
    for arr in arrays {
        let name = arr.name.as_bytes();
        w.write_all(&(name.len() as u32).to_le_bytes())?;
        w.write_all(name)?;
        w.write_all(&(arr.dims.len() as u32).to_le_bytes())?;
        for &d in &arr.dims {
            w.write_all(&d.to_le_bytes())?;
        }
        for &v in &arr.data {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn load(path: &Path) -> Result<Vec<NamedArray>, WeightsError> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if magic != MAGIC {
        return Err(WeightsError::BadMagic);
    }
    let version = read_u32(&mut r)?;
    if version != FORMAT_VERSION {
        return Err(WeightsError::BadVersion(version));
    }
    let count = read_u32(&mut r)? as usize;
    let mut arrays = Vec::with_capacity(count);
    for _ in 0..count {
        let name_len = read_u32(&mut r)? as usize;
        let mut name_buf = vec![0u8; name_len];
        r.read_exact(&mut name_buf)?;
        let name = String::from_utf8(name_buf).map_err(|_| WeightsError::BadName)?;
        let rank = read_u32(&mut r)? as usize;
        let mut dims = Vec::with_capacity(rank);
        for _ in 0..rank {
            dims.push(read_u64(&mut r)?);
        }
        let len = dims.iter().product::<u64>() as usize;
        let mut data = Vec::with_capacity(len);
        let mut buf = [0u8; 8];
        for _ in 0..len {
            r.read_exact(&mut buf)?;
            data.push(f64::from_le_bytes(buf));
        }
        arrays.push(NamedArray { name, dims, data });
    }
    Ok(arrays)
}

fn read_u32(r: &mut impl Read) -> io::Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

fn read_u64(r: &mut impl Read) -> io::Result<u64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(u64::from_le_bytes(buf))
}

/// Lookup helper over a loaded container.
pub struct ArrayMap {
    arrays: Vec<NamedArray>,
}

impl ArrayMap {
    pub fn new(arrays: Vec<NamedArray>) -> Self {
        ArrayMap { arrays }
    }

    pub fn get(&self, name: &str) -> Result<&NamedArray, WeightsError> {
        self.arrays
            .iter()
            .find(|a| a.name == name)
            .ok_or_else(|| WeightsError::Missing(name.to_string()))
    }

    /// Fetch with a shape check; errors describe the mismatch field by field.
    pub fn get_shaped(&self, name: &str, dims: &[u64]) -> Result<&NamedArray, WeightsError> {
        let arr = self.get(name)?;
        if arr.dims != dims {
            return Err(WeightsError::ShapeMismatch {
                name: name.to_string(),
                expected: dims.to_vec(),
                got: arr.dims.clone(),
            });
        }
        Ok(arr)
    }

    pub fn scalar(&self, name: &str) -> Result<f64, WeightsError> {
        Ok(self.get_shaped(name, &[1])?.data[0])
    }

    pub fn scalar_bits(&self, name: &str) -> Result<u64, WeightsError> {
        Ok(self.get_shaped(name, &[1])?.data[0].to_bits())
    }
}

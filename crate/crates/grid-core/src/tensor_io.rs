use std::path::Path;

use num_complex::Complex64;

use crate::error::GridError;
use crate::image::Image;
use crate::kspace::ComplexGrid;

// On-disk layout, little-endian:
//   bytes  0..4   magic "CQRT"
//   bytes  4..8   dtype u32: 1 = float32 real, 2 = float32 complex (re, im)
//   bytes  8..12  ndim  u32, always 2
//   bytes 12..28  dims, two u64 (height, width)
//   bytes 28..    payload, row-major float32
const MAGIC: &[u8; 4] = b"CQRT";
const DTYPE_REAL: u32 = 1;
const DTYPE_COMPLEX: u32 = 2;
const HEADER_LEN: usize = 28;

/// A grid as stored on disk: real or complex float32.
#[derive(Debug, Clone, PartialEq)]
pub enum Tensor {
    Real(Image),
    Complex(ComplexGrid),
}

pub fn save_tensor(path: &Path, tensor: &Tensor) -> Result<(), GridError> {
    let bytes = match tensor {
        Tensor::Real(img) => encode(
            DTYPE_REAL,
            img.height(),
            img.width(),
            img.data().iter().map(|&v| v as f32),
        ),
        Tensor::Complex(grid) => encode(
            DTYPE_COMPLEX,
            grid.height(),
            grid.width(),
            grid.data()
                .iter()
                .flat_map(|v| [v.re as f32, v.im as f32]),
        ),
    };
    std::fs::write(path, bytes).map_err(|source| GridError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_tensor(path: &Path) -> Result<Tensor, GridError> {
    let bytes = std::fs::read(path).map_err(|source| GridError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    decode(path, &bytes)
}

pub fn save_image(path: &Path, img: &Image) -> Result<(), GridError> {
    save_tensor(path, &Tensor::Real(img.clone()))
}

pub fn save_complex(path: &Path, grid: &ComplexGrid) -> Result<(), GridError> {
    save_tensor(path, &Tensor::Complex(grid.clone()))
}

/// Loads a tensor that must be real-valued.
pub fn load_image(path: &Path) -> Result<Image, GridError> {
    match load_tensor(path)? {
        Tensor::Real(img) => Ok(img),
        Tensor::Complex(_) => Err(GridError::Format {
            path: path.to_path_buf(),
            offset: 4,
            reason: "expected real dtype 1, found complex".into(),
        }),
    }
}

/// Loads a tensor that must be complex-valued.
pub fn load_complex(path: &Path) -> Result<ComplexGrid, GridError> {
    match load_tensor(path)? {
        Tensor::Complex(grid) => Ok(grid),
        Tensor::Real(_) => Err(GridError::Format {
            path: path.to_path_buf(),
            offset: 4,
            reason: "expected complex dtype 2, found real".into(),
        }),
    }
}

fn encode(dtype: u32, height: usize, width: usize, values: impl Iterator<Item = f32>) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&dtype.to_le_bytes());
    out.extend_from_slice(&2u32.to_le_bytes());
    out.extend_from_slice(&(height as u64).to_le_bytes());
    out.extend_from_slice(&(width as u64).to_le_bytes());
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

fn decode(path: &Path, bytes: &[u8]) -> Result<Tensor, GridError> {
    let fail = |offset: u64, reason: String| GridError::Format {
        path: path.to_path_buf(),
        offset,
        reason,
    };

    if bytes.len() < HEADER_LEN {
        return Err(fail(
            bytes.len() as u64,
            format!("truncated header: {} of {HEADER_LEN} bytes", bytes.len()),
        ));
    }
    if &bytes[0..4] != MAGIC {
        return Err(fail(0, format!("bad magic {:?}", &bytes[0..4])));
    }
    let dtype = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if dtype != DTYPE_REAL && dtype != DTYPE_COMPLEX {
        return Err(fail(4, format!("unknown dtype tag {dtype}")));
    }
    let ndim = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
    if ndim != 2 {
        return Err(fail(8, format!("unsupported ndim {ndim}, expected 2")));
    }
    let height = u64::from_le_bytes(bytes[12..20].try_into().unwrap());
    let width = u64::from_le_bytes(bytes[20..28].try_into().unwrap());
    if height == 0 || width == 0 {
        return Err(fail(12, format!("zero dimension {height}x{width}")));
    }
    let elems = height
        .checked_mul(width)
        .filter(|&n| usize::try_from(n).is_ok())
        .ok_or_else(|| fail(12, format!("dimension overflow {height}x{width}")))? as usize;
    let scalars_per_elem = if dtype == DTYPE_COMPLEX { 2 } else { 1 };
    let payload_len = elems
        .checked_mul(scalars_per_elem)
        .and_then(|n| n.checked_mul(4))
        .ok_or_else(|| fail(12, format!("dimension overflow {height}x{width}")))?;

    let payload = &bytes[HEADER_LEN..];
    if payload.len() < payload_len {
        return Err(fail(
            bytes.len() as u64,
            format!(
                "truncated payload: expected {payload_len} bytes, found {}",
                payload.len()
            ),
        ));
    }
    if payload.len() > payload_len {
        return Err(fail(
            (HEADER_LEN + payload_len) as u64,
            format!("{} trailing bytes", payload.len() - payload_len),
        ));
    }

    let scalars: Vec<f64> = payload
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
        .collect();
    let (h, w) = (height as usize, width as usize);
    if dtype == DTYPE_REAL {
        Ok(Tensor::Real(Image::new(h, w, scalars)?))
    } else {
        let data: Vec<Complex64> = scalars
            .chunks_exact(2)
            .map(|p| Complex64::new(p[0], p[1]))
            .collect();
        Ok(Tensor::Complex(ComplexGrid::new(h, w, data)?))
    }
}

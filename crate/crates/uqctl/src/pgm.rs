use std::path::Path;

use grid_core::Image;

use crate::error::{io_data, CliError};

/// Writes an 8-bit binary PGM (P5), windowing [lo, hi] linearly onto
/// [0, 255] with clipping and round-half-up.
pub fn export_pgm(img: &Image, path: &Path, lo: f64, hi: f64) -> Result<(), CliError> {
    if hi.is_nan() || lo.is_nan() || hi <= lo {
        return Err(CliError::Config(format!(
            "pgm window must have hi > lo, got [{lo}, {hi}]"
        )));
    }
    let (h, w) = (img.height(), img.width());
    let mut bytes = Vec::with_capacity(32 + h * w);
    bytes.extend_from_slice(format!("P5\n{w} {h}\n255\n").as_bytes());
    for r in 0..h {
        for c in 0..w {
            let t = ((img[(r, c)] - lo) / (hi - lo)).clamp(0.0, 1.0);
            bytes.push((t * 255.0 + 0.5).floor() as u8);
        }
    }
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| io_data(parent, e))?;
    }
    std::fs::write(path, bytes).map_err(|e| io_data(path, e))
}

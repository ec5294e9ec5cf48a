use grid_core::Image;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ellipse::Ellipse;
use crate::error::SimError;

/// The ten-ellipse head phantom with the softened intensity table
/// (1.0 / -0.8 / -0.2 / 0.1), so the clipped sum stays in [0, 1] with
/// visible soft-tissue contrast.
pub fn default_head_phantom() -> Vec<Ellipse> {
    let deg = std::f64::consts::PI / 180.0;
    let table: [(f64, f64, f64, f64, f64, f64); 10] = [
        (0.0, 0.0, 0.69, 0.92, 0.0, 1.0),
        (0.0, -0.0184, 0.6624, 0.8740, 0.0, -0.8),
        (0.22, 0.0, 0.11, 0.31, -18.0 * deg, -0.2),
        (-0.22, 0.0, 0.16, 0.41, 18.0 * deg, -0.2),
        (0.0, 0.35, 0.21, 0.25, 0.0, 0.1),
        (0.0, 0.1, 0.046, 0.046, 0.0, 0.1),
        (0.0, -0.1, 0.046, 0.046, 0.0, 0.1),
        (-0.08, -0.605, 0.046, 0.023, 0.0, 0.1),
        (0.0, -0.606, 0.023, 0.023, 0.0, 0.1),
        (0.06, -0.605, 0.023, 0.046, 0.0, 0.1),
    ];
    table
        .into_iter()
        .map(|(cx, cy, a, b, phi, delta)| {
            Ellipse::new(cx, cy, a, b, phi, delta).expect("static table is valid")
        })
        .collect()
}

/// Rasterizes the summed ellipse deltas at pixel centers and clips to [0, 1].
/// Pixel (row, col) samples the scene at x = (2*col+1)/W - 1,
/// y = (2*row+1)/H - 1.
pub fn shepp_logan(height: usize, width: usize, ellipses: &[Ellipse]) -> Result<Image, SimError> {
    if height == 0 || width == 0 || !height.is_power_of_two() || !width.is_power_of_two() {
        return Err(SimError::Parameter(format!(
            "phantom dimensions must be positive powers of two, got {height}x{width}"
        )));
    }
    if ellipses.is_empty() {
        return Err(SimError::Parameter("ellipse list is empty".into()));
    }
    let mut img = Image::zeros(height, width);
    for row in 0..height {
        let y = (2 * row + 1) as f64 / height as f64 - 1.0;
        for col in 0..width {
            let x = (2 * col + 1) as f64 / width as f64 - 1.0;
            let mut v = 0.0;
            for e in ellipses {
                if e.contains(x, y) {
                    v += e.intensity_delta();
                }
            }
            img.set(row, col, v.clamp(0.0, 1.0));
        }
    }
    Ok(img)
}

/// Adds the lesion delta plus seeded uniform texture (within ±10% of the
/// delta) to every covered pixel. Modified pixels are floored at zero so
/// magnitudes stay physical; a zero delta leaves the image untouched.
pub fn inject_lesion(img: &Image, lesion: &Ellipse, seed: u64) -> Result<Image, SimError> {
    let (cx, cy) = lesion.center();
    let (hx, hy) = lesion.bounding_half_extents();
    if cx.abs() + hx > 1.0 || cy.abs() + hy > 1.0 {
        return Err(SimError::Parameter(format!(
            "lesion support [{:.3}, {:.3}] x [{:.3}, {:.3}] exceeds the image frame",
            cx - hx,
            cx + hx,
            cy - hy,
            cy + hy
        )));
    }
    let delta = lesion.intensity_delta();
    if delta == 0.0 {
        return Ok(img.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = img.clone();
    let (h, w) = (img.height(), img.width());
    for row in 0..h {
        let y = (2 * row + 1) as f64 / h as f64 - 1.0;
        for col in 0..w {
            let x = (2 * col + 1) as f64 / w as f64 - 1.0;
            if lesion.contains(x, y) {
                let texture = 0.1 * delta * (2.0 * rng.random::<f64>() - 1.0);
                let v = (out.get(row, col) + delta + texture).max(0.0);
                out.set(row, col, v);
            }
        }
    }
    Ok(out)
}

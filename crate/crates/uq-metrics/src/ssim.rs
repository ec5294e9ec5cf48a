use grid_core::Image;

use crate::error::MetricsError;
use crate::maps::check_shape;

pub const DEFAULT_SSIM_WINDOW: usize = 7;
pub const DEFAULT_SSIM_K1: f64 = 0.01;
pub const DEFAULT_SSIM_K2: f64 = 0.03;

/// Mean local structural similarity over dense uniform windows fully inside
/// the image. The dynamic range is taken from the reference `y`; local
/// variances and covariance use the sample (n-1) normalization, matching the
/// common single-scale reporting convention.
pub fn ssim(x: &Image, y: &Image, window: usize, k1: f64, k2: f64) -> Result<f64, MetricsError> {
    check_shape("y", x, y)?;
    let (h, w) = (x.height(), x.width());
    if window < 2 || window > h || window > w {
        return Err(MetricsError::Parameter(format!(
            "window {window} must lie in [2, min({h}, {w})]"
        )));
    }
    if !(k1 > 0.0 && k2 > 0.0) {
        return Err(MetricsError::Parameter(format!(
            "stabilizers must be positive, got k1={k1}, k2={k2}"
        )));
    }
    let range = y.max_value() - y.min_value();
    if range <= 0.0 {
        return Err(MetricsError::Degenerate(
            "reference image has zero dynamic range".into(),
        ));
    }
    let c1 = (k1 * range) * (k1 * range);
    let c2 = (k2 * range) * (k2 * range);
    let np = (window * window) as f64;
    let bessel = np / (np - 1.0);

    let mut total = 0.0;
    let mut count = 0usize;
    for r0 in 0..=(h - window) {
        for c0 in 0..=(w - window) {
            let mut sx = 0.0;
            let mut sy = 0.0;
            let mut sxx = 0.0;
            let mut syy = 0.0;
            let mut sxy = 0.0;
            for r in r0..r0 + window {
                for c in c0..c0 + window {
                    let a = x[(r, c)];
                    let b = y[(r, c)];
                    sx += a;
                    sy += b;
                    sxx += a * a;
                    syy += b * b;
                    sxy += a * b;
                }
            }
            let mx = sx / np;
            let my = sy / np;
            let vx = (sxx / np - mx * mx) * bessel;
            let vy = (syy / np - my * my) * bessel;
            let cxy = (sxy / np - mx * my) * bessel;
            let num = (2.0 * mx * my + c1) * (2.0 * cxy + c2);
            let den = (mx * mx + my * my + c1) * (vx + vy + c2);
            total += num / den;
            count += 1;
        }
    }
    Ok(total / count as f64)
}

pub fn ssim_default(x: &Image, y: &Image) -> Result<f64, MetricsError> {
    ssim(x, y, DEFAULT_SSIM_WINDOW, DEFAULT_SSIM_K1, DEFAULT_SSIM_K2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn noisy(base: &Image, std: f64, seed: u64) -> Image {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = base
            .data()
            .iter()
            .map(|v| v + std * (2.0 * rng.random::<f64>() - 1.0))
            .collect();
        Image::new(base.height(), base.width(), data).unwrap()
    }

    fn ramp(h: usize, w: usize) -> Image {
        Image::new(h, w, (0..h * w).map(|i| i as f64 / (h * w) as f64).collect()).unwrap()
    }

    #[test]
    fn identical_images_score_one() {
        let x = ramp(12, 12);
        assert!((ssim_default(&x, &x).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn score_decreases_with_noise() {
        let y = ramp(24, 24);
        let s1 = ssim_default(&noisy(&y, 0.05, 1), &y).unwrap();
        let s2 = ssim_default(&noisy(&y, 0.15, 2), &y).unwrap();
        let s3 = ssim_default(&noisy(&y, 0.40, 3), &y).unwrap();
        assert!(s1 < 1.0);
        assert!(s1 > s2 && s2 > s3, "{s1} {s2} {s3}");
    }

    #[test]
    fn parameter_and_degenerate_errors() {
        let x = ramp(4, 4);
        assert!(matches!(
            ssim(&x, &x, 7, 0.01, 0.03),
            Err(MetricsError::Parameter(_))
        ));
        assert!(matches!(
            ssim(&x, &x, 1, 0.01, 0.03),
            Err(MetricsError::Parameter(_))
        ));
        let flat = Image::zeros(8, 8);
        assert!(matches!(
            ssim_default(&ramp(8, 8), &flat),
            Err(MetricsError::Degenerate(_))
        ));
    }
}

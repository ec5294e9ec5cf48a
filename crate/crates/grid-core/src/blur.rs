use crate::error::GridError;
use crate::image::Image;

/// Separable Gaussian smoothing with truncation radius ceil(3*sigma) and
/// reflecting boundaries (edge sample repeated: d c b a | a b c d | d c b a).
/// The kernel is renormalized after truncation, so constants pass through
/// unchanged and interior-supported mass is preserved.
pub fn gaussian_blur(img: &Image, sigma: f64) -> Result<Image, GridError> {
    if sigma.is_nan() || sigma <= 0.0 {
        return Err(GridError::InvalidSigma(sigma));
    }
    let kernel = gaussian_kernel(sigma);
    let radius = (kernel.len() / 2) as isize;
    let (h, w) = (img.height(), img.width());

    let mut horizontal = Image::zeros(h, w);
    for row in 0..h {
        for col in 0..w {
            let mut acc = 0.0;
            for (tap, weight) in kernel.iter().enumerate() {
                let src = reflect(col as isize + tap as isize - radius, w);
                acc += weight * img.get(row, src);
            }
            horizontal.set(row, col, acc);
        }
    }

    let mut out = Image::zeros(h, w);
    for row in 0..h {
        for col in 0..w {
            let mut acc = 0.0;
            for (tap, weight) in kernel.iter().enumerate() {
                let src = reflect(row as isize + tap as isize - radius, h);
                acc += weight * horizontal.get(src, col);
            }
            out.set(row, col, acc);
        }
    }
    Ok(out)
}

fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let radius = (3.0 * sigma).ceil() as isize;
    let mut taps: Vec<f64> = (-radius..=radius)
        .map(|i| (-((i * i) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = taps.iter().sum();
    for t in &mut taps {
        *t /= sum;
    }
    taps
}

fn reflect(mut i: isize, n: usize) -> usize {
    let n = n as isize;
    loop {
        if i < 0 {
            i = -i - 1;
        } else if i >= n {
            i = 2 * n - 1 - i;
        } else {
            return i as usize;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_is_normalized_and_symmetric() {
        for &sigma in &[0.5, 1.0, 2.0, 3.7] {
            let k = gaussian_kernel(sigma);
            assert_eq!(k.len(), 2 * (3.0f64 * sigma).ceil() as usize + 1);
            assert!((k.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            for i in 0..k.len() / 2 {
                assert_eq!(k[i], k[k.len() - 1 - i]);
            }
        }
    }

    #[test]
    fn reflect_repeats_edge_sample() {
        assert_eq!(reflect(-1, 4), 0);
        assert_eq!(reflect(-2, 4), 1);
        assert_eq!(reflect(4, 4), 3);
        assert_eq!(reflect(5, 4), 2);
        assert_eq!(reflect(2, 4), 2);
    }

    #[test]
    fn rejects_non_positive_sigma() {
        let img = Image::zeros(4, 4);
        assert!(matches!(
            gaussian_blur(&img, 0.0),
            Err(GridError::InvalidSigma(_))
        ));
        assert!(matches!(
            gaussian_blur(&img, -1.0),
            Err(GridError::InvalidSigma(_))
        ));
        assert!(gaussian_blur(&img, f64::NAN).is_err());
    }

    #[test]
    fn constant_image_is_fixed_point() {
        let img = Image::new(8, 8, vec![3.25; 64]).unwrap();
        let blurred = gaussian_blur(&img, 2.0).unwrap();
        for &v in blurred.data() {
            assert!((v - 3.25).abs() < 1e-12);
        }
    }
}

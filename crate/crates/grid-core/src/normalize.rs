use crate::image::Image;

/// Standardizes to mean 0 and population standard deviation 1. Inputs whose
/// std falls below 1e-12 (blank slices) map to all zeros instead of blowing
/// up the division.
pub fn normalize_zero_mean_unit_std(img: &Image) -> Image {
    let n = img.len() as f64;
    let mean = img.sum() / n;
    let var = img
        .data()
        .iter()
        .map(|&v| {
            let d = v - mean;
            d * d
        })
        .sum::<f64>()
        / n;
    let std = var.sqrt();
    if std < 1e-12 {
        return Image::zeros(img.height(), img.width());
    }
    img.map(|v| (v - mean) / std)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_image_maps_to_zeros() {
        let img = Image::new(2, 2, vec![5.0; 4]).unwrap();
        assert_eq!(normalize_zero_mean_unit_std(&img).data(), &[0.0; 4]);
    }

    #[test]
    fn output_moments_are_standardized() {
        let img = Image::new(2, 3, vec![1.0, -2.0, 4.5, 0.25, 9.0, -1.0]).unwrap();
        let out = normalize_zero_mean_unit_std(&img);
        let n = out.len() as f64;
        let mean = out.sum() / n;
        let var = out.data().iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        assert!(mean.abs() < 1e-9);
        assert!((var - 1.0).abs() < 1e-9);
    }
}

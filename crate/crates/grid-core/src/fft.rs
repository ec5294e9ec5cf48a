use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use crate::error::GridError;
use crate::kspace::{ComplexGrid, KSpace};

/// Unitary 2-D DFT: 1/sqrt(N) scaling per axis, so energy is preserved and
/// `ifft2` is the exact inverse. Dimensions must be powers of two.
pub fn fft2(grid: &ComplexGrid) -> Result<KSpace, GridError> {
    transform(grid, FftDirection::Forward)
}

/// Inverse of [`fft2`] under the same normalization.
pub fn ifft2(k: &KSpace) -> Result<ComplexGrid, GridError> {
    transform(k, FftDirection::Inverse)
}

fn transform(grid: &ComplexGrid, direction: FftDirection) -> Result<ComplexGrid, GridError> {
    let (h, w) = (grid.height(), grid.width());
    if !h.is_power_of_two() || !w.is_power_of_two() {
        return Err(GridError::DimensionNotPowerOfTwo {
            height: h,
            width: w,
        });
    }

    let mut planner = FftPlanner::<f64>::new();
    let row_fft = planner.plan_fft(w, direction);
    let col_fft = planner.plan_fft(h, direction);

    let mut data = grid.data().to_vec();
    for row in data.chunks_exact_mut(w) {
        row_fft.process(row);
    }
    let mut t = transpose(&data, h, w);
    for col in t.chunks_exact_mut(h) {
        col_fft.process(col);
    }
    let mut out = transpose(&t, w, h);

    let scale = 1.0 / ((h as f64) * (w as f64)).sqrt();
    for v in &mut out {
        *v *= scale;
    }
    ComplexGrid::new(h, w, out)
}

fn transpose(data: &[Complex64], rows: usize, cols: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); data.len()];
    for r in 0..rows {
        for c in 0..cols {
            out[c * rows + r] = data[r * cols + c];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::Image;

    #[test]
    fn rejects_non_power_of_two() {
        let grid = ComplexGrid::zeros(6, 8);
        assert!(matches!(
            fft2(&grid),
            Err(GridError::DimensionNotPowerOfTwo { height: 6, width: 8 })
        ));
    }

    #[test]
    fn constant_image_has_dc_only_spectrum() {
        let c = 0.75;
        let n = 16;
        let img = Image::new(n, n, vec![c; n * n]).unwrap();
        let k = fft2(&ComplexGrid::from_real(&img)).unwrap();
        // Unitary scaling puts c*N in the DC bin of an N x N constant.
        assert!((k.get(0, 0) - Complex64::new(c * n as f64, 0.0)).norm() < 1e-12);
        for r in 0..n {
            for col in 0..n {
                if (r, col) != (0, 0) {
                    assert!(k.get(r, col).norm() < 1e-12, "energy outside DC bin");
                }
            }
        }
    }

    #[test]
    fn all_zero_kspace_gives_all_zero_image() {
        let img = ifft2(&ComplexGrid::zeros(8, 8)).unwrap();
        assert!(img.data().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn one_by_one_grid_is_identity() {
        let g = ComplexGrid::new(1, 1, vec![Complex64::new(2.0, -3.0)]).unwrap();
        let k = fft2(&g).unwrap();
        assert_eq!(k.get(0, 0), Complex64::new(2.0, -3.0));
    }
}

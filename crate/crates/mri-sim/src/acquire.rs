use grid_core::{fft2, ifft2, ComplexGrid, Image, KSpace};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::SimError;
use crate::mask::SamplingMask;

/// Everything produced for one synthetic scan.
#[derive(Debug, Clone)]
pub struct AcquisitionRecord {
    pub ground_truth: Image,
    pub kspace_full: KSpace,
    pub kspace_masked: KSpace,
    pub mask: SamplingMask,
    pub recon: Image,
    pub noise_std: f64,
    pub seed: u64,
}

/// fft2 of the image plus i.i.d. complex Gaussian noise, `noise_std` per
/// real/imag component. Deterministic per seed.
pub fn simulate_kspace(img: &Image, noise_std: f64, seed: u64) -> Result<KSpace, SimError> {
    if noise_std.is_nan() || noise_std < 0.0 {
        return Err(SimError::Parameter(format!(
            "noise_std must be non-negative, got {noise_std}"
        )));
    }
    let mut k = fft2(&ComplexGrid::from_real(img))?;
    if noise_std > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, noise_std).expect("positive std");
        for v in k.data_mut() {
            *v += Complex64::new(normal.sample(&mut rng), normal.sample(&mut rng));
        }
    }
    Ok(k)
}

/// Zeroes dropped lines, copies kept lines bit for bit. Mask indices are in
/// the centered ordering (DC at num_lines/2); k-space columns are in the
/// FFT's DC-at-zero layout, so column c is governed by mask line
/// (c + W/2) mod W.
pub fn apply_mask(k: &KSpace, mask: &SamplingMask) -> Result<KSpace, SimError> {
    let w = k.width();
    if mask.num_lines() != w {
        return Err(SimError::DimensionMismatch {
            mask_lines: mask.num_lines(),
            kspace_width: w,
        });
    }
    let mut out = k.clone();
    for c in 0..w {
        let centered = (c + w / 2) % w;
        if !mask.is_kept(centered) {
            for r in 0..k.height() {
                out.set(r, c, Complex64::new(0.0, 0.0));
            }
        }
    }
    Ok(out)
}

/// Magnitude of the inverse transform of zero-filled k-space.
pub fn zero_filled_recon(k_masked: &KSpace) -> Result<Image, SimError> {
    Ok(ifft2(k_masked)?.magnitude())
}

/// Full forward pipeline for one case: noisy k-space, undersampling,
/// zero-filled reconstruction.
pub fn acquire(
    ground_truth: &Image,
    mask: &SamplingMask,
    noise_std: f64,
    seed: u64,
) -> Result<AcquisitionRecord, SimError> {
    let kspace_full = simulate_kspace(ground_truth, noise_std, seed)?;
    let kspace_masked = apply_mask(&kspace_full, mask)?;
    let recon = zero_filled_recon(&kspace_masked)?;
    Ok(AcquisitionRecord {
        ground_truth: ground_truth.clone(),
        kspace_full,
        kspace_masked,
        mask: mask.clone(),
        recon,
        noise_std,
        seed,
    })
}

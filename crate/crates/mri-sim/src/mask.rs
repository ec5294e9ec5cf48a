use grid_core::Image;

use crate::error::SimError;

/// Cartesian phase-encode sampling pattern over `num_lines` k-space lines.
///
/// Line indices use the centered spectral ordering (DC at `num_lines / 2`),
/// so the ACS block [acs_lo, acs_hi] covers the lowest frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingMask {
    num_lines: usize,
    keep: Vec<bool>,
    acs_lo: usize,
    acs_hi: usize,
    acceleration: f64,
    acs_fraction: f64,
}

/// Builds an equispaced mask: a centered contiguous ACS block of
/// round(num_lines * acs_fraction) lines, plus evenly strided lines over the
/// non-ACS candidates until round(num_lines / acceleration) lines are kept.
/// `offset` shifts the stride phase; rounding is half-away-from-zero.
pub fn make_cartesian_mask(
    num_lines: usize,
    acceleration: f64,
    acs_fraction: f64,
    offset: i64,
) -> Result<SamplingMask, SimError> {
    if num_lines == 0 {
        return Err(SimError::Parameter("num_lines must be positive".into()));
    }
    if !acceleration.is_finite() || acceleration < 1.0 {
        return Err(SimError::Parameter(format!(
            "acceleration must be >= 1, got {acceleration}"
        )));
    }
    if acs_fraction.is_nan() || acs_fraction <= 0.0 || acs_fraction > 1.0 {
        return Err(SimError::Parameter(format!(
            "acs_fraction must lie in (0, 1], got {acs_fraction}"
        )));
    }

    let budget = (num_lines as f64 / acceleration).round() as usize;
    let acs_lines = (num_lines as f64 * acs_fraction).round() as usize;
    if acs_lines == 0 {
        return Err(SimError::Parameter(format!(
            "acs_fraction {acs_fraction} rounds to zero ACS lines at {num_lines} lines"
        )));
    }
    if acs_lines > budget {
        return Err(SimError::AcsBudget {
            acs_lines,
            budget,
            num_lines,
            acceleration,
            acs_fraction,
        });
    }

    let acs_lo = (num_lines - acs_lines) / 2;
    let acs_hi = acs_lo + acs_lines - 1;
    let mut keep = vec![false; num_lines];
    for k in keep.iter_mut().take(acs_hi + 1).skip(acs_lo) {
        *k = true;
    }

    let extra = budget - acs_lines;
    if extra > 0 {
        let candidates: Vec<usize> = (0..num_lines)
            .filter(|&i| i < acs_lo || i > acs_hi)
            .collect();
        // stride >= 1 because budget <= num_lines, so the floors are distinct.
        let stride = candidates.len() as f64 / extra as f64;
        let phase = (offset as f64).rem_euclid(stride);
        for k in 0..extra {
            let idx = ((phase + k as f64 * stride).floor() as usize).min(candidates.len() - 1);
            keep[candidates[idx]] = true;
        }
    }

    Ok(SamplingMask {
        num_lines,
        keep,
        acs_lo,
        acs_hi,
        acceleration,
        acs_fraction,
    })
}

impl SamplingMask {
    /// Unvalidated constructor for synthetic patterns in tests and tools.
    #[doc(hidden)]
    pub fn from_parts(
        keep: Vec<bool>,
        acs_lo: usize,
        acs_hi: usize,
        acceleration: f64,
        acs_fraction: f64,
    ) -> Self {
        Self {
            num_lines: keep.len(),
            keep,
            acs_lo,
            acs_hi,
            acceleration,
            acs_fraction,
        }
    }

    pub fn num_lines(&self) -> usize {
        self.num_lines
    }

    #[inline]
    pub fn is_kept(&self, line: usize) -> bool {
        self.keep[line]
    }

    pub fn kept_count(&self) -> usize {
        self.keep.iter().filter(|&&k| k).count()
    }

    pub fn acs_bounds(&self) -> (usize, usize) {
        (self.acs_lo, self.acs_hi)
    }

    pub fn acceleration(&self) -> f64 {
        self.acceleration
    }

    pub fn acs_fraction(&self) -> f64 {
        self.acs_fraction
    }

    /// 1 x num_lines image of 0/1 flags, the on-disk mask representation.
    pub fn to_row_image(&self) -> Image {
        let data = self.keep.iter().map(|&k| if k { 1.0 } else { 0.0 }).collect();
        Image::new(1, self.num_lines, data).expect("mask row is well-formed")
    }
}

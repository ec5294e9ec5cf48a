use num_complex::Complex64;

use crate::error::GridError;
use crate::image::Image;

/// Dense complex-valued grid, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexGrid {
    height: usize,
    width: usize,
    data: Vec<Complex64>,
}

/// Frequency-domain view of an image; same layout as any complex grid.
pub type KSpace = ComplexGrid;

impl ComplexGrid {
    pub fn new(height: usize, width: usize, data: Vec<Complex64>) -> Result<Self, GridError> {
        if height == 0 || width == 0 {
            return Err(GridError::InvalidDimensions { height, width });
        }
        let expected = height * width;
        if data.len() != expected {
            return Err(GridError::LengthMismatch {
                height,
                width,
                expected,
                actual: data.len(),
            });
        }
        if let Some(index) = data
            .iter()
            .position(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(GridError::NonFinite { index });
        }
        Ok(Self {
            height,
            width,
            data,
        })
    }

    pub fn zeros(height: usize, width: usize) -> Self {
        assert!(height > 0 && width > 0, "grid dimensions must be positive");
        Self {
            height,
            width,
            data: vec![Complex64::new(0.0, 0.0); height * width],
        }
    }

    /// Lifts a real image into the complex plane (zero imaginary part).
    pub fn from_real(img: &Image) -> Self {
        Self {
            height: img.height(),
            width: img.width(),
            data: img.data().iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        }
    }

    /// Pointwise modulus, the usual magnitude view of a complex image.
    pub fn magnitude(&self) -> Image {
        let data = self.data.iter().map(|v| v.norm()).collect();
        Image::new(self.height, self.width, data).expect("modulus of a finite grid is finite")
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        debug_assert!(row < self.height && col < self.width);
        self.data[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        debug_assert!(row < self.height && col < self.width);
        self.data[row * self.width + col] = value;
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    /// Sum of squared moduli; with the unitary FFT this is preserved across
    /// domains (Parseval).
    pub fn energy(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum()
    }
}

//! Numerical substrate for the uncertainty pipeline: dense real and complex
//! grids, unitary 2-D Fourier transforms, Gaussian smoothing, zero-mean
//! unit-std normalization, and a bit-exact binary tensor format.
//!
//! Everything here is a pure function of its inputs; values can be shared
//! freely across threads and callers may parallelize over independent grids.

mod blur;
mod error;
mod fft;
mod image;
mod kspace;
mod normalize;
mod tensor_io;

pub use blur::gaussian_blur;
pub use error::GridError;
pub use fft::{fft2, ifft2};
pub use image::Image;
pub use kspace::{ComplexGrid, KSpace};
pub use normalize::normalize_zero_mean_unit_std;
pub use tensor_io::{
    load_complex, load_image, load_tensor, save_complex, save_image, save_tensor, Tensor,
};

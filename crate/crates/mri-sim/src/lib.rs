//! Synthetic acquisition pipeline: ellipse phantoms with optional lesions,
//! Cartesian undersampling masks with a centered ACS block, noisy k-space
//! simulation, and a zero-filled reconstructor standing in for a learned
//! reconstruction network.
//!
//! Every function is deterministic given its inputs and seed, so dataset
//! generation can be parallelized across cases.

mod acquire;
mod dataset;
mod ellipse;
mod error;
mod mask;
mod phantom;

pub use acquire::{acquire, apply_mask, simulate_kspace, zero_filled_recon, AcquisitionRecord};
pub use dataset::{read_case, write_case, CaseData, CaseMeta};
pub use ellipse::Ellipse;
pub use error::SimError;
pub use mask::{make_cartesian_mask, SamplingMask};
pub use phantom::{default_head_phantom, inject_lesion, shepp_logan};

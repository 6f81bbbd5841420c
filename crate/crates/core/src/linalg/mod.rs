//! Small dense kernels: thin QR, Jacobi SVD, Gaussian sampling,
//! orthonormalization and the spectral norm of implicit operators.

mod qr;
mod rng;
mod spectral;
mod svd;

pub use qr::{orthonormalize, thin_qr, QrResult};
pub use rng::{derive_seed, gaussian_matrix, Rng};
pub use spectral::{
    spectral_norm_implicit, SpectralEstimate, DEFAULT_POWER_MAX_ITER, DEFAULT_POWER_TOL,
};
pub use svd::{svd_small, SvdResult, MAX_SWEEPS};

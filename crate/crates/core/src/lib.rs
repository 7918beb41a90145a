//! Mixed quantum states attached to curves with densities on the quantized
//! two-sphere, and the tools to compare them.
//!
//! The Hilbert space at level `k` is the space of homogeneous polynomials of
//! degree `k` in two variables, with orthonormal monomial basis
//! `e_l = sqrt((k+1) C(k,l) / 2pi) Z1^(k-l) Z2^l`. Points of the sphere are
//! read in the stereographic chart from the north pole,
//! `z = (x1 + i x2) / (1 - x3)`, and the area element is
//! `|dz ^ dzbar| = 2 dx dy`, so the Fubini–Study area of the sphere is `2pi`.
//! With these conventions `<e_l, e_l> = 1`.
//!
//! Modules:
//! - [`hermitian`]: eigendecomposition, PSD square roots, unitary exponentials,
//!   trace norm, Loewner order.
//! - [`sphere`]: coherent projectors, equator/meridian/rotated-circle states,
//!   states of general curves, the SU(2) rotation.
//! - [`toeplitz`]: Berezin–Toeplitz operators, Gaussian symbols, exact
//!   Egorov conjugation, the fidelity upper-bound chain.
//! - [`metrics`]: fidelity, sub- and super-fidelity, purity, expectations.
//! - [`asymptotics`]: principal angles and the semiclassical predictors.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod asymptotics;
pub mod error;
pub mod hermitian;
pub mod metrics;
pub mod random;
pub mod special;
pub mod sphere;
pub mod toeplitz;

pub use error::{Error, Result};
pub use hermitian::{CMatrix, HermitianOperator};
pub use sphere::Level;

#[cfg(test)]
pub(crate) mod testing {
    use crate::hermitian::{CMatrix, HermitianOperator};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    pub fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    pub fn random_hermitian(r: &mut ChaCha8Rng, dim: usize) -> HermitianOperator {
        crate::random::hermitian(r, dim)
    }

    pub fn random_psd(r: &mut ChaCha8Rng, dim: usize, rank: usize) -> HermitianOperator {
        crate::random::psd(r, dim, rank)
    }

    pub fn random_unitary(r: &mut ChaCha8Rng, dim: usize) -> CMatrix {
        crate::random::unitary(r, dim)
    }

    pub fn random_density(r: &mut ChaCha8Rng, dim: usize, rank: usize) -> HermitianOperator {
        crate::random::density(r, dim, rank)
    }
}

//! Seeded random test matrices.
//!
//! Generic over any [`RngCore`]; entries are uniform on `[-1, 1)`, which is
//! enough for property checks (no Haar-measure claims are made).

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand_core::RngCore;

use crate::hermitian::{CMatrix, HermitianOperator};

pub fn uniform<R: RngCore>(rng: &mut R) -> f64 {
    // 53 random mantissa bits mapped to [-1, 1)
    let bits = rng.next_u64() >> 11;
    (bits as f64) * (2.0 / (1u64 << 53) as f64) - 1.0
}

pub fn complex_matrix<R: RngCore>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(uniform(rng), uniform(rng))
    })
}

pub fn real_matrix<R: RngCore>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| uniform(rng))
}

pub fn hermitian<R: RngCore>(rng: &mut R, dim: usize) -> HermitianOperator {
    let a = complex_matrix(rng, dim, dim);
    HermitianOperator::new(&a + a.adjoint()).expect("finite by construction")
}

/// `A A^*` with `A` of shape `dim x rank`.
pub fn psd<R: RngCore>(rng: &mut R, dim: usize, rank: usize) -> HermitianOperator {
    let a = complex_matrix(rng, dim, rank.max(1));
    HermitianOperator::new(&a * a.adjoint()).expect("finite by construction")
}

/// Trace-one PSD matrix of the given rank.
pub fn density<R: RngCore>(rng: &mut R, dim: usize, rank: usize) -> HermitianOperator {
    let p = psd(rng, dim, rank);
    let t = p.trace();
    p.scaled(1.0 / t)
}

pub fn unitary<R: RngCore>(rng: &mut R, dim: usize) -> CMatrix {
    complex_matrix(rng, dim, dim).qr().q()
}

pub fn orthogonal<R: RngCore>(rng: &mut R, dim: usize) -> DMatrix<f64> {
    real_matrix(rng, dim, dim).qr().q()
}

/// Random symmetric positive definite matrix, `B B^T + I`.
pub fn spd<R: RngCore>(rng: &mut R, dim: usize) -> DMatrix<f64> {
    let b = real_matrix(rng, dim, dim);
    &b * b.transpose() + DMatrix::identity(dim, dim)
}

/// Orthonormal basis of a random Lagrangian subspace of `R^{2n}` with the
/// standard form `omega(x, y) = x^T Omega y`, `Omega = [[0, I], [-I, 0]]`.
///
/// Symplectic Gram–Schmidt: each new vector is drawn at random, then
/// projected off the previous vectors and off their images `Omega^T e_i`,
/// which makes it both orthogonal and `omega`-orthogonal to them.
pub fn lagrangian_basis<R: RngCore>(rng: &mut R, n: usize) -> Vec<DVector<f64>> {
    let omega = crate::asymptotics::standard_symplectic_form(n);
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(n);
    while basis.len() < n {
        let mut v = DVector::from_fn(2 * n, |_, _| uniform(rng));
        let mut constraints: Vec<DVector<f64>> = Vec::with_capacity(2 * basis.len());
        for e in &basis {
            constraints.push(e.clone());
            constraints.push(omega.transpose() * e);
        }
        // orthonormalize the constraint directions, then project them out twice
        let mut ortho: Vec<DVector<f64>> = Vec::new();
        for c in constraints {
            let mut w = c;
            for q in &ortho {
                let d = q.dot(&w);
                w -= q * d;
            }
            let norm = w.norm();
            if norm > 1e-12 {
                ortho.push(w / norm);
            }
        }
        for _ in 0..2 {
            for q in &ortho {
                let d = q.dot(&v);
                v -= q * d;
            }
        }
        let norm = v.norm();
        if norm > 1e-6 {
            basis.push(v / norm);
        }
    }
    basis
}

//! Scalar comparisons between states.
//!
//! [`fidelity`] accepts any PSD operators, including the unnormalized
//! Toeplitz operators of the fidelity bound. The trace-based bounds
//! [`sub_fidelity`] and [`super_fidelity`] require trace-one inputs.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::hermitian::{default_clamp, same_dim, CMatrix, HermitianOperator};

/// Allowed deviation of `Tr rho` from 1 for functions that need states.
pub const TRACE_TOLERANCE: f64 = 1e-8;

/// Radicand values in `[-RADICAND_CLAMP, 0)` are treated as zero.
pub const RADICAND_CLAMP: f64 = 1e-12;

fn require_state(rho: &HermitianOperator) -> Result<()> {
    let trace = rho.trace();
    if (trace - 1.0).abs() > TRACE_TOLERANCE {
        return Err(Error::InvalidTrace { trace });
    }
    Ok(())
}

/// `F(rho, eta) = (Tr sqrt(sqrt(rho) eta sqrt(rho)))^2`, evaluated as the
/// squared sum of singular values of `sqrt(rho) sqrt(eta)`.
pub fn fidelity(rho: &HermitianOperator, eta: &HermitianOperator) -> Result<f64> {
    same_dim(rho.dim(), eta.dim())?;
    if rho.is_diagonal() && eta.is_diagonal() {
        let (a, b) = (rho.diagonal(), eta.diagonal());
        for v in [&a, &b] {
            let clamp = default_clamp(v.len(), v);
            if let Some(&eigenvalue) = v.iter().find(|&&x| x < -clamp) {
                return Err(Error::NotPsd { eigenvalue, clamp });
            }
        }
        let s: f64 = a
            .iter()
            .zip(&b)
            .map(|(x, y)| libm::sqrt(x.max(0.0) * y.max(0.0)))
            .sum();
        return Ok(s * s);
    }
    // F = ||sqrt(rho) sqrt(eta)||_Tr^2; the nuclear norm is Lipschitz in its
    // argument, unlike the square root of the product's null eigenvalues.
    let a = crate::hermitian::sqrt_psd(rho, None)?;
    let b = crate::hermitian::sqrt_psd(eta, None)?;
    let s = crate::hermitian::trace_norm(&(a.matrix() * b.matrix()))?;
    Ok(s * s)
}

/// `F(diag(a), U diag(b) U^*) = ||diag(sqrt a) U diag(sqrt b)||_Tr^2`.
///
/// Covers every pair of the form (state, rotated state) without a square
/// root of a dense matrix.
pub fn fidelity_diagonal_conjugated(a: &[f64], u: &CMatrix, b: &[f64]) -> Result<f64> {
    same_dim(a.len(), b.len())?;
    same_dim(a.len(), u.nrows())?;
    same_dim(u.nrows(), u.ncols())?;
    let mut roots = [Vec::new(), Vec::new()];
    for (slot, v) in roots.iter_mut().zip([a, b]) {
        let clamp = default_clamp(v.len(), v);
        if let Some(&eigenvalue) = v.iter().find(|&&x| x < -clamp) {
            return Err(Error::NotPsd { eigenvalue, clamp });
        }
        *slot = v
            .iter()
            .map(|&x| if x <= clamp { 0.0 } else { libm::sqrt(x) })
            .collect();
    }
    let m = CMatrix::from_fn(a.len(), a.len(), |i, j| {
        u[(i, j)] * (roots[0][i] * roots[1][j])
    });
    let s = crate::hermitian::trace_norm(&m)?;
    Ok(s * s)
}

/// `Tr(A B)` for Hermitian `A`, `B`.
pub fn trace_product(a: &HermitianOperator, b: &HermitianOperator) -> Result<f64> {
    Ok(trace_product_with_scale(a, b)?.0)
}

/// `Tr(A B)` and the sum of the absolute values of its terms.
fn trace_product_with_scale(a: &HermitianOperator, b: &HermitianOperator) -> Result<(f64, f64)> {
    same_dim(a.dim(), b.dim())?;
    let (a, b) = (a.matrix(), b.matrix());
    let n = a.nrows();
    let (mut s, mut scale) = (0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let term = a[(i, j)] * b[(j, i)];
            s += term.re;
            scale += term.norm();
        }
    }
    Ok((s, scale))
}

fn trace_product_sq_with_scale(a: &HermitianOperator, b: &HermitianOperator) -> Result<(f64, f64)> {
    same_dim(a.dim(), b.dim())?;
    let p = a.matrix() * b.matrix();
    let n = p.nrows();
    let (mut s, mut scale) = (0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let term = p[(i, j)] * p[(j, i)];
            s += term.re;
            scale += term.norm();
        }
    }
    Ok((s, scale))
}

/// `Tr((A B)^2)`.
pub fn trace_product_sq(a: &HermitianOperator, b: &HermitianOperator) -> Result<f64> {
    Ok(trace_product_sq_with_scale(a, b)?.0)
}

/// `E = Tr(rho eta) + sqrt(2) sqrt(Tr(rho eta)^2 - Tr((rho eta)^2))`.
///
/// The radicand is a difference of two nearly equal sums when the states
/// nearly commute; values below the roundoff level of those sums are set to
/// zero, and values below `-RADICAND_CLAMP` are an error.
pub fn sub_fidelity(rho: &HermitianOperator, eta: &HermitianOperator) -> Result<f64> {
    require_state(rho)?;
    require_state(eta)?;
    let (t, t_scale) = trace_product_with_scale(rho, eta)?;
    let (t2, t2_scale) = trace_product_sq_with_scale(rho, eta)?;
    let radicand = t * t - t2;
    if radicand < -RADICAND_CLAMP {
        return Err(Error::NegativeRadicand { radicand });
    }
    let n = rho.dim() as f64;
    let noise = 16.0 * n * f64::EPSILON * (t2_scale + 2.0 * t.abs() * t_scale);
    let radicand = if radicand <= noise { 0.0 } else { radicand };
    Ok(t + core::f64::consts::SQRT_2 * libm::sqrt(radicand))
}

/// `G = Tr(rho eta) + sqrt((1 - Tr rho^2)(1 - Tr eta^2))`.
pub fn super_fidelity(rho: &HermitianOperator, eta: &HermitianOperator) -> Result<f64> {
    require_state(rho)?;
    require_state(eta)?;
    let t = trace_product(rho, eta)?;
    let (pa, pb) = (purity(rho), purity(eta));
    for p in [pa, pb] {
        if p > 1.0 + 1e-10 {
            return Err(Error::PurityAboveOne { purity: p });
        }
    }
    Ok(t + libm::sqrt(((1.0 - pa) * (1.0 - pb)).max(0.0)))
}

/// `Tr rho^2`, the squared Frobenius norm of a Hermitian matrix.
pub fn purity(rho: &HermitianOperator) -> f64 {
    rho.matrix().iter().map(|z| z.norm_sqr()).sum()
}

/// `Tr(T rho)`.
pub fn expectation(rho: &HermitianOperator, t: &HermitianOperator) -> Result<f64> {
    trace_product(t, rho)
}

/// `Tr(T^2 rho) - Tr(T rho)^2`.
pub fn variance(rho: &HermitianOperator, t: &HermitianOperator) -> Result<f64> {
    let mean = expectation(rho, t)?;
    let sq = HermitianOperator::new(t.matrix() * t.matrix())?;
    Ok(trace_product(&sq, rho)? - mean * mean)
}

/// All metrics of one pair of states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricReport {
    pub fidelity: f64,
    pub sub_fidelity: f64,
    pub super_fidelity: f64,
    pub trace_product: f64,
    pub trace_product_sq: f64,
    pub purity_a: f64,
    pub purity_b: f64,
}

impl MetricReport {
    pub fn compute(rho: &HermitianOperator, eta: &HermitianOperator) -> Result<Self> {
        Ok(MetricReport {
            fidelity: fidelity(rho, eta)?,
            sub_fidelity: sub_fidelity(rho, eta)?,
            super_fidelity: super_fidelity(rho, eta)?,
            trace_product: trace_product(rho, eta)?,
            trace_product_sq: trace_product_sq(rho, eta)?,
            purity_a: purity(rho),
            purity_b: purity(eta),
        })
    }

    /// `E <= F <= G <= 1` up to `slack`.
    pub fn is_sandwiched(&self, slack: f64) -> bool {
        self.sub_fidelity <= self.fidelity + slack
            && self.fidelity <= self.super_fidelity + slack
            && self.super_fidelity <= 1.0 + slack
            && self.sub_fidelity >= -slack
    }
}

//! The equator state and its rotations at one level, set up once per `k`.

use lagfid_core::hermitian::{CMatrix, HermitianOperator};
use lagfid_core::metrics::{
    fidelity_diagonal_conjugated, purity, sub_fidelity, super_fidelity, trace_product,
    trace_product_sq,
};
use lagfid_core::sphere::{equator_state, Level, RotationFamily};
use lagfid_core::Result;

pub struct CirclePair {
    family: RotationFamily,
    equator: HermitianOperator,
    weights: Vec<f64>,
    roots: Vec<f64>,
}

/// Comparison of `rho_{k,1}` with `rho_{k,2}^alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairMetrics {
    pub trace: f64,
    pub trace_sq: f64,
    pub sub_fidelity: f64,
    pub super_fidelity: f64,
    pub purity: f64,
    pub fidelity: Option<f64>,
}

impl CirclePair {
    pub fn new(k: usize) -> Result<Self> {
        let level = Level::new(k)?;
        let equator = equator_state(level);
        let weights = equator.diagonal();
        let roots = weights.iter().map(|w| w.max(0.0).sqrt()).collect();
        Ok(CirclePair {
            family: RotationFamily::new(level),
            equator,
            weights,
            roots,
        })
    }

    pub fn level(&self) -> Level {
        self.family.level()
    }

    pub fn family(&self) -> &RotationFamily {
        &self.family
    }

    pub fn equator(&self) -> &HermitianOperator {
        &self.equator
    }

    /// Diagonal of the equator state, `2^-k C(k,m)`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `U(alpha) rho_1 U(alpha)^*`, formed as `W W^*` with `W = U sqrt(rho_1)`.
    pub fn rotated_with(&self, u: &CMatrix) -> Result<HermitianOperator> {
        let mut w = u.clone();
        for (j, &r) in self.roots.iter().enumerate() {
            w.column_mut(j).iter_mut().for_each(|z| *z *= r);
        }
        HermitianOperator::new(&w * w.adjoint())
    }

    pub fn rotated(&self, alpha: f64) -> Result<HermitianOperator> {
        self.rotated_with(&self.family.operator(alpha))
    }

    /// All comparison quantities at one angle; the fidelity, which needs a
    /// singular value decomposition, only when asked for.
    pub fn metrics(&self, alpha: f64, with_fidelity: bool) -> Result<PairMetrics> {
        let u = self.family.operator(alpha);
        let rotated = self.rotated_with(&u)?;
        let fidelity = if with_fidelity {
            Some(fidelity_diagonal_conjugated(
                &self.weights,
                &u,
                &self.weights,
            )?)
        } else {
            None
        };
        Ok(PairMetrics {
            trace: trace_product(&self.equator, &rotated)?,
            trace_sq: trace_product_sq(&self.equator, &rotated)?,
            sub_fidelity: sub_fidelity(&self.equator, &rotated)?,
            super_fidelity: super_fidelity(&self.equator, &rotated)?,
            purity: purity(&self.equator),
            fidelity,
        })
    }

    pub fn fidelity(&self, alpha: f64) -> Result<f64> {
        let u = self.family.operator(alpha);
        fidelity_diagonal_conjugated(&self.weights, &u, &self.weights)
    }
}

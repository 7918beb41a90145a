use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not positive semidefinite within tolerance (eigenvalue {eigenvalue:e}, clamp {clamp:e})")]
    NotPsd { eigenvalue: f64, clamp: f64 },

    #[error("generator is not skew-Hermitian (defect {defect:e})")]
    NotSkewHermitian { defect: f64 },

    #[error("trace is not 1 (got {trace})")]
    InvalidTrace { trace: f64 },

    #[error("purity {purity} exceeds 1")]
    PurityAboveOne { purity: f64 },

    #[error("sub-fidelity radicand is negative ({radicand:e})")]
    NegativeRadicand { radicand: f64 },

    #[error("weight integrates to {integral}, expected 1")]
    WeightNotNormalized { integral: f64 },

    #[error("curve leaves the chart (non-finite point at t = {t})")]
    CurveAtInfinity { t: f64 },

    #[error("{nodes} quadrature nodes requested, at least {required} needed")]
    TooFewNodes { nodes: usize, required: usize },

    #[error("poisson cutoff {cutoff} too small, tail mass about {tail_mass:e}")]
    CutoffTooSmall { cutoff: usize, tail_mass: f64 },

    #[error("index {index} out of range 0..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("symbol evaluated to a non-finite value at x3 = {x3}")]
    NonFiniteSymbol { x3: f64 },

    #[error("basis is rank deficient")]
    RankDeficient,

    #[error("metric is not symmetric positive definite")]
    MetricNotPositive,

    #[error("subspace is not Lagrangian (max |omega(e_i, e_j)| = {defect:e})")]
    NotLagrangian { defect: f64 },

    #[error("subspaces are not complementary")]
    NotComplementary,

    #[error("parameter `{name}` = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
}

pub type Result<T> = core::result::Result<T, Error>;

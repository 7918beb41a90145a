//! Dense Hermitian and positive semidefinite linear algebra.
//!
//! Every matrix function goes through a full Hermitian eigendecomposition.
//! Operators that are exactly diagonal (equator states, radial Toeplitz
//! operators) skip the decomposition.

use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// A dense Hermitian matrix.
///
/// Construction symmetrizes the input, `A <- (A + A^*)/2`, and keeps the
/// entrywise defect `max |A - A^*|` that was removed so quadrature noise
/// stays visible.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: CMatrix,
    herm_defect: f64,
    diagonal: bool,
}

impl HermitianOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let (rows, cols) = matrix.shape();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        check_finite(&matrix)?;
        let mut defect: f64 = 0.0;
        let mut sym = matrix;
        for j in 0..cols {
            for i in 0..=j {
                let a = sym[(i, j)];
                let b = sym[(j, i)].conj();
                defect = defect.max((a - b).norm());
                let avg = (a + b) * 0.5;
                sym[(i, j)] = avg;
                sym[(j, i)] = avg.conj();
            }
            sym[(j, j)].im = 0.0;
        }
        let diagonal = is_diagonal(&sym);
        Ok(HermitianOperator {
            matrix: sym,
            herm_defect: defect,
            diagonal,
        })
    }

    /// Diagonal operator with real entries.
    pub fn from_diagonal(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = CMatrix::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = Complex64::new(v, 0.0);
        }
        HermitianOperator {
            matrix: m,
            herm_defect: 0.0,
            diagonal: true,
        }
    }

    /// Real symmetric matrix given in row-major order.
    pub fn from_real(n: usize, row_major: &[f64]) -> Result<Self> {
        let m = CMatrix::from_fn(n, n, |i, j| Complex64::new(row_major[i * n + j], 0.0));
        Self::new(m)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&alloc::vec![1.0; n])
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_diagonal(&alloc::vec![0.0; n])
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn herm_defect(&self) -> f64 {
        self.herm_defect
    }

    pub fn is_diagonal(&self) -> bool {
        self.diagonal
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).collect()
    }

    pub fn trace(&self) -> f64 {
        self.diagonal().iter().sum()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.matrix.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Spectral norm, the largest |eigenvalue|.
    pub fn op_norm(&self) -> f64 {
        let eig = eig_hermitian(self);
        eig.values
            .iter()
            .fold(0.0_f64, |m: f64, v: &f64| m.max(v.abs()))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        HermitianOperator {
            matrix: &self.matrix * Complex64::new(factor, 0.0),
            herm_defect: self.herm_defect * factor.abs(),
            diagonal: self.diagonal,
        }
    }

    /// `self - other`.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        same_dim(self.dim(), other.dim())?;
        Self::new(&self.matrix - &other.matrix)
    }

    /// `U A U^*` for a square `U` of matching size.
    pub fn conjugate_by(&self, u: &CMatrix) -> Result<Self> {
        same_dim(self.dim(), u.nrows())?;
        let m = u * &self.matrix * u.adjoint();
        Self::new(m)
    }

    /// Largest entrywise deviation `max |A_ij - B_ij|`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.matrix
            .iter()
            .zip(other.matrix.iter())
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }
}

fn is_diagonal(m: &CMatrix) -> bool {
    let n = m.nrows();
    (0..n).all(|j| (0..n).all(|i| i == j || m[(i, j)] == Complex64::new(0.0, 0.0)))
}

fn check_finite(m: &CMatrix) -> Result<()> {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let z = m[(i, j)];
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
    }
    Ok(())
}

pub(crate) fn same_dim(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::DimensionMismatch { left, right });
    }
    Ok(())
}

/// Eigenvalues in ascending order with the matching unitary eigenvector matrix.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl Eigen {
    /// `V diag(f(lambda)) V^*`.
    pub fn apply<F: Fn(f64) -> f64>(&self, f: F) -> CMatrix {
        let mut scaled = self.vectors.clone();
        for (j, &l) in self.values.iter().enumerate() {
            let s = Complex64::new(f(l), 0.0);
            scaled.column_mut(j).iter_mut().for_each(|z| *z *= s);
        }
        scaled * self.vectors.adjoint()
    }
}

/// Hermitian eigendecomposition `A = V diag(lambda) V^*`, eigenvalues ascending.
pub fn eig_hermitian(a: &HermitianOperator) -> Eigen {
    let n = a.dim();
    let (values, vectors) = if a.diagonal {
        (a.diagonal(), CMatrix::identity(n, n))
    } else {
        let e = a.matrix.clone().symmetric_eigen();
        (e.eigenvalues.iter().copied().collect(), e.eigenvectors)
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let sorted: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    let vecs = CMatrix::from_fn(n, n, |r, c| vectors[(r, order[c])]);
    Eigen {
        values: sorted,
        vectors: vecs,
    }
}

/// Default negative-eigenvalue clamp, `dim * eps * max|lambda|`.
pub fn default_clamp(dim: usize, values: &[f64]) -> f64 {
    let max_abs = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    dim as f64 * f64::EPSILON * max_abs
}

/// Square root of a positive semidefinite operator.
///
/// Eigenvalues in `[-clamp, clamp]` are treated as zero, so roundoff in the
/// null space does not grow to `sqrt(eps)`; anything below `-clamp` is an
/// error carrying the offending eigenvalue. `None` selects [`default_clamp`].
pub fn sqrt_psd(a: &HermitianOperator, clamp: Option<f64>) -> Result<HermitianOperator> {
    let n = a.dim();
    if a.diagonal {
        let d = a.diagonal();
        let clamp = clamp.unwrap_or_else(|| default_clamp(n, &d));
        let mut out = Vec::with_capacity(n);
        for v in d {
            if v < -clamp {
                return Err(Error::NotPsd {
                    eigenvalue: v,
                    clamp,
                });
            }
            out.push(if v <= clamp { 0.0 } else { libm::sqrt(v) });
        }
        return Ok(HermitianOperator::from_diagonal(&out));
    }
    let eig = eig_hermitian(a);
    let clamp = clamp.unwrap_or_else(|| default_clamp(n, &eig.values));
    if let Some(&lowest) = eig.values.first() {
        if lowest < -clamp {
            return Err(Error::NotPsd {
                eigenvalue: lowest,
                clamp,
            });
        }
    }
    HermitianOperator::new(eig.apply(|l| if l <= clamp { 0.0 } else { libm::sqrt(l) }))
}

/// `exp(t G)` for skew-Hermitian `G`, through the eigendecomposition of `iG`.
pub fn unitary_exp(generator: &CMatrix, t: f64) -> Result<CMatrix> {
    let (rows, cols) = generator.shape();
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }
    check_finite(generator)?;
    let mut defect: f64 = 0.0;
    for j in 0..cols {
        for i in 0..rows {
            defect = defect.max((generator[(i, j)] + generator[(j, i)].conj()).norm());
        }
    }
    if defect > 1e-12 {
        return Err(Error::NotSkewHermitian { defect });
    }
    // G = -i H with H = iG Hermitian, so exp(tG) = V diag(exp(-i t lambda)) V^*.
    let h = HermitianOperator::new(generator * Complex64::new(0.0, 1.0))?;
    let eig = eig_hermitian(&h);
    let mut scaled = eig.vectors.clone();
    for (j, &l) in eig.values.iter().enumerate() {
        let phase = Complex64::new(libm::cos(t * l), -libm::sin(t * l));
        scaled.column_mut(j).iter_mut().for_each(|z| *z *= phase);
    }
    Ok(scaled * eig.vectors.adjoint())
}

/// Sum of singular values.
pub fn trace_norm(a: &CMatrix) -> Result<f64> {
    check_finite(a)?;
    let svd = a.clone().svd(false, false);
    Ok(svd.singular_values.iter().sum())
}

/// Outcome of a Loewner-order comparison `A <= B`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoewnerCheck {
    pub holds: bool,
    /// Smallest eigenvalue of `B - A`.
    pub min_eigenvalue: f64,
}

/// Tests `A <= B` up to `slack`: true iff `lambda_min(B - A) >= -slack`.
pub fn loewner_leq(
    a: &HermitianOperator,
    b: &HermitianOperator,
    slack: f64,
) -> Result<LoewnerCheck> {
    let diff = b.sub(a)?;
    let eig = eig_hermitian(&diff);
    let min_eigenvalue = eig.values.first().copied().unwrap_or(0.0);
    Ok(LoewnerCheck {
        holds: min_eigenvalue >= -slack,
        min_eigenvalue,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::{random_hermitian, random_psd, random_unitary, rng};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn frob(m: &CMatrix) -> f64 {
        m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    #[test]
    fn constructor_symmetrizes_and_records_defect() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0), c(2.0), c(2.5), c(3.0)]);
        let h = HermitianOperator::new(m).unwrap();
        assert_relative_eq!(h.herm_defect(), 0.5);
        assert_eq!(h.matrix()[(0, 1)], c(2.25));
        assert_eq!(h.matrix()[(1, 0)], c(2.25));
    }

    #[test]
    fn constructor_rejects_bad_input() {
        let m = CMatrix::from_element(2, 3, c(0.0));
        assert!(matches!(
            HermitianOperator::new(m),
            Err(Error::NotSquare { .. })
        ));
        let mut m = CMatrix::identity(2, 2);
        m[(1, 0)] = c(f64::NAN);
        assert!(matches!(
            HermitianOperator::new(m),
            Err(Error::NonFinite { row: 1, col: 0 })
        ));
    }

    #[test]
    fn eig_of_identity_and_diagonal() {
        let e = eig_hermitian(&HermitianOperator::identity(3));
        assert_eq!(e.values, [1.0, 1.0, 1.0]);
        assert_eq!(e.vectors, CMatrix::identity(3, 3));

        let e = eig_hermitian(&HermitianOperator::from_diagonal(&[3.0, 1.0, 2.0]));
        assert_eq!(e.values, [1.0, 2.0, 3.0]);
        // non-diagonal route on the same operator
        let dense =
            HermitianOperator::from_real(3, &[3.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 2.0 + 0.0])
                .unwrap();
        assert_eq!(eig_hermitian(&dense).values, [1.0, 2.0, 3.0]);
    }

    #[test]
    fn eig_reconstructs_random_hermitian() {
        let mut r = rng(11);
        let a = random_hermitian(&mut r, 8);
        let e = eig_hermitian(&a);
        let rec = e.apply(|l| l);
        let norm = a.op_norm();
        assert!(frob(&(rec - a.matrix())) <= 1e-10 * norm);
        let gram = e.vectors.adjoint() * &e.vectors;
        assert!(frob(&(gram - CMatrix::identity(8, 8))) <= 1e-10);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn sqrt_examples() {
        let r = sqrt_psd(&HermitianOperator::from_diagonal(&[4.0, 9.0]), None).unwrap();
        assert_eq!(r.diagonal(), [2.0, 3.0]);
        let z = sqrt_psd(&HermitianOperator::zeros(3), None).unwrap();
        assert_eq!(z.max_abs_entry(), 0.0);

        // rank-1 projector is its own square root
        let u = [c(0.6), Complex64::new(0.0, 0.8)];
        let p = CMatrix::from_fn(2, 2, |i, j| u[i] * u[j].conj());
        let root = sqrt_psd(&HermitianOperator::new(p.clone()).unwrap(), None).unwrap();
        assert!(frob(&(root.matrix() - &p)) < 1e-12);
    }

    #[test]
    fn sqrt_rejects_negative_eigenvalue() {
        let a = HermitianOperator::from_diagonal(&[1.0, -0.5]);
        match sqrt_psd(&a, None) {
            Err(Error::NotPsd { eigenvalue, .. }) => assert_eq!(eigenvalue, -0.5),
            other => panic!("unexpected {other:?}"),
        }
        // inside an explicit clamp the eigenvalue is zeroed
        let r = sqrt_psd(&a, Some(0.6)).unwrap();
        assert_eq!(r.diagonal(), [1.0, 0.0]);
    }

    #[test]
    fn unitary_exp_examples() {
        let zero = CMatrix::zeros(4, 4);
        let u = unitary_exp(&zero, 2.7).unwrap();
        assert!(frob(&(u - CMatrix::identity(4, 4))) < 1e-14);

        let g = CMatrix::from_row_slice(2, 2, &[c(0.0), c(-0.5), c(0.5), c(0.0)]);
        let u = unitary_exp(&g, core::f64::consts::PI).unwrap();
        let expected = CMatrix::from_row_slice(2, 2, &[c(0.0), c(-1.0), c(1.0), c(0.0)]);
        assert!(frob(&(u - expected)) < 1e-14);
    }

    #[test]
    fn unitary_exp_random_generator_is_unitary() {
        let mut r = rng(5);
        let h = random_hermitian(&mut r, 10);
        let g = h.matrix() * Complex64::new(0.0, 1.0);
        let u = unitary_exp(&g, 1.0).unwrap();
        let defect = frob(&(u.adjoint() * &u - CMatrix::identity(10, 10)));
        assert!(defect <= 1e-10, "defect {defect}");
    }

    #[test]
    fn unitary_exp_rejects_non_skew() {
        let g = CMatrix::identity(2, 2);
        assert!(matches!(
            unitary_exp(&g, 1.0),
            Err(Error::NotSkewHermitian { .. })
        ));
    }

    #[test]
    fn trace_norm_examples() {
        let d = HermitianOperator::from_diagonal(&[1.0, -2.0, 3.0]);
        assert_relative_eq!(trace_norm(d.matrix()).unwrap(), 6.0, epsilon = 1e-12);
        let mut r = rng(3);
        let u = random_unitary(&mut r, 7);
        assert_relative_eq!(trace_norm(&u).unwrap(), 7.0, epsilon = 1e-10);
    }

    #[test]
    fn trace_norm_matches_sqrt_of_gram() {
        let mut r = rng(8);
        let a = random_unitary(&mut r, 6) * random_hermitian(&mut r, 6).matrix();
        let gram = HermitianOperator::new(a.adjoint() * &a).unwrap();
        let oracle = sqrt_psd(&gram, None).unwrap().trace();
        assert_relative_eq!(trace_norm(&a).unwrap(), oracle, max_relative = 1e-10);
    }

    #[test]
    fn loewner_examples() {
        let z = HermitianOperator::zeros(2);
        let i = HermitianOperator::identity(2);
        let r = loewner_leq(&z, &i, 0.0).unwrap();
        assert!(r.holds);
        assert_eq!(r.min_eigenvalue, 1.0);
        let r = loewner_leq(&i, &z, 0.0).unwrap();
        assert!(!r.holds);
        assert_eq!(r.min_eigenvalue, -1.0);
        let a = HermitianOperator::from_diagonal(&[1.0, 3.0]);
        let b = HermitianOperator::from_diagonal(&[2.0, 2.0]);
        assert!(!loewner_leq(&a, &b, 0.0).unwrap().holds);
        assert!(!loewner_leq(&b, &a, 0.0).unwrap().holds);
        assert!(matches!(
            loewner_leq(&a, &HermitianOperator::zeros(3), 0.0),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn sqrt_squares_back(seed in any::<u64>(), dim in 1usize..=64) {
            let mut r = rng(seed);
            let a = random_psd(&mut r, dim, dim / 2 + 1);
            let root = sqrt_psd(&a, None).unwrap();
            let sq = root.matrix() * root.matrix();
            let norm = a.op_norm().max(f64::MIN_POSITIVE);
            prop_assert!(frob(&(sq - a.matrix())) <= 1e-9 * norm);
            prop_assert!(eig_hermitian(&root).values[0] >= -1e-12 * norm);
        }

        #[test]
        fn exp_group_law(seed in any::<u64>(), s in -2.0f64..2.0, t in -2.0f64..2.0) {
            let mut r = rng(seed);
            let g = random_hermitian(&mut r, 6).matrix() * Complex64::new(0.0, 1.0);
            let lhs = unitary_exp(&g, s).unwrap() * unitary_exp(&g, t).unwrap();
            let rhs = unitary_exp(&g, s + t).unwrap();
            prop_assert!(frob(&(lhs - rhs)) <= 1e-10);
        }

        #[test]
        fn trace_norm_unitary_invariance(seed in any::<u64>()) {
            let mut r = rng(seed);
            let a = random_hermitian(&mut r, 5).matrix() * random_unitary(&mut r, 5);
            let u = random_unitary(&mut r, 5);
            let v = random_unitary(&mut r, 5);
            let t0 = trace_norm(&a).unwrap();
            let t1 = trace_norm(&(&u * &a * &v)).unwrap();
            prop_assert!((t0 - t1).abs() <= 1e-10 * t0.max(1.0));
        }

        #[test]
        fn loewner_antisymmetry(seed in any::<u64>()) {
            let mut r = rng(seed);
            let a = random_hermitian(&mut r, 4);
            let b = if seed % 2 == 0 { a.clone() } else { random_hermitian(&mut r, 4) };
            let ab = loewner_leq(&a, &b, 0.0).unwrap().holds;
            let ba = loewner_leq(&b, &a, 0.0).unwrap().holds;
            if ab && ba {
                prop_assert!(frob(&(a.matrix() - b.matrix())) <= 1e-10);
            }
        }
    }
}

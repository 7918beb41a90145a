//! Principal angles between subspaces and the leading-order predictions for
//! overlaps of states supported on transversally intersecting Lagrangians.
//!
//! Every predictor is a closed-form evaluation from [`LagrangianPairData`]:
//! the principal angles and density products at each intersection point, and
//! the integrals `int f_i sigma_i` of the two densities.

use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand_core::RngCore;

use crate::error::{Error, Result};
use crate::toeplitz::check_alpha;

/// `Omega = [[0, I_n], [-I_n, 0]]`, so that `omega(x, y) = x^T Omega y`.
pub fn standard_symplectic_form(n: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        omega[(i, n + i)] = 1.0;
        omega[(n + i, i)] = -1.0;
    }
    omega
}

/// `J = Omega^T`, compatible with [`standard_symplectic_form`]: `omega(x, J y) = x^T y`.
pub fn standard_complex_structure(n: usize) -> DMatrix<f64> {
    standard_symplectic_form(n).transpose()
}

/// A basis orthonormalized for the metric `M = L L^T`, stored twice: in the
/// whitened coordinates `L^T x` and in the original coordinates.
struct MetricBasis {
    whitened: DMatrix<f64>,
    original: DMatrix<f64>,
}

fn stack(vectors: &[DVector<f64>], ambient: usize) -> Result<DMatrix<f64>> {
    if vectors.is_empty() {
        return Err(Error::RankDeficient);
    }
    for v in vectors {
        if v.len() != ambient {
            return Err(Error::DimensionMismatch {
                left: ambient,
                right: v.len(),
            });
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite { row: 0, col: 0 });
        }
    }
    Ok(DMatrix::from_columns(vectors))
}

fn cholesky(metric: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !metric.is_square() {
        return Err(Error::NotSquare {
            rows: metric.nrows(),
            cols: metric.ncols(),
        });
    }
    let asym = (metric - metric.transpose()).abs().max();
    if asym > 1e-10 * metric.abs().max().max(1.0) {
        return Err(Error::MetricNotPositive);
    }
    let sym = (metric + metric.transpose()) * 0.5;
    sym.cholesky()
        .map(|c| c.l())
        .ok_or(Error::MetricNotPositive)
}

fn orthonormalize(vectors: &[DVector<f64>], l: &DMatrix<f64>) -> Result<MetricBasis> {
    let ambient = l.nrows();
    let a = stack(vectors, ambient)?;
    if a.ncols() > ambient {
        return Err(Error::RankDeficient);
    }
    let w = l.transpose() * a;
    let qr = w.qr();
    let r = qr.r();
    let scale = r.diagonal().abs().max();
    if scale == 0.0 || r.diagonal().iter().any(|d| d.abs() <= 1e-12 * scale) {
        return Err(Error::RankDeficient);
    }
    let whitened = qr.q();
    let original = l
        .transpose()
        .solve_upper_triangular(&whitened)
        .ok_or(Error::MetricNotPositive)?;
    Ok(MetricBasis { whitened, original })
}

/// Angles from orthonormal (Euclidean) bases, cosines from the cross Gram
/// matrix and sines from the residual of the projection; each angle is read
/// off whichever of the two is better conditioned.
fn angles_from_orthonormal(qe: &DMatrix<f64>, qf: &DMatrix<f64>) -> Vec<f64> {
    let (big, small) = if qe.ncols() >= qf.ncols() {
        (qe, qf)
    } else {
        (qf, qe)
    };
    let cross = big.transpose() * small;
    let mut cosines: Vec<f64> = cross
        .singular_values()
        .iter()
        .map(|s| s.clamp(0.0, 1.0))
        .collect();
    cosines.sort_by(|a, b| b.total_cmp(a));
    let residual = small - big * &cross;
    let mut sines: Vec<f64> = residual
        .singular_values()
        .iter()
        .map(|s| s.clamp(0.0, 1.0))
        .collect();
    sines.sort_by(f64::total_cmp);
    cosines
        .iter()
        .zip(&sines)
        .map(|(&c, &s)| {
            if c > core::f64::consts::FRAC_1_SQRT_2 {
                libm::asin(s)
            } else {
                libm::acos(c)
            }
        })
        .collect()
}

/// Principal angles `theta_1 <= ... <= theta_m` between `span(e)` and
/// `span(f)` for the inner product `(x|y) = x^T M y`, `m = min(dim E, dim F)`.
pub fn principal_angles(
    e: &[DVector<f64>],
    f: &[DVector<f64>],
    metric: &DMatrix<f64>,
) -> Result<Vec<f64>> {
    let l = cholesky(metric)?;
    let be = orthonormalize(e, &l)?;
    let bf = orthonormalize(f, &l)?;
    Ok(angles_from_orthonormal(&be.whitened, &bf.whitened))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SinDetIdentity {
    /// `det(I - G^T G)` for the cross Gram matrix `G` of orthonormal bases.
    pub lhs: f64,
    /// `prod sin^2 theta_l`.
    pub rhs: f64,
    /// `lhs` recomputed after rotating both orthonormal bases at random.
    pub rebased_lhs: f64,
    pub angles: Vec<f64>,
}

/// Both sides of `det(I - G^T G) = prod sin^2 theta_l` for subspaces of equal
/// dimension.
pub fn sin_det_identity<R: RngCore>(
    e: &[DVector<f64>],
    f: &[DVector<f64>],
    metric: &DMatrix<f64>,
    rng: &mut R,
) -> Result<SinDetIdentity> {
    if e.len() != f.len() {
        return Err(Error::DimensionMismatch {
            left: e.len(),
            right: f.len(),
        });
    }
    let n = e.len();
    let l = cholesky(metric)?;
    let qe = orthonormalize(e, &l)?.whitened;
    let qf = orthonormalize(f, &l)?.whitened;
    let det = |a: &DMatrix<f64>, b: &DMatrix<f64>| {
        let g = a.transpose() * b;
        (DMatrix::identity(n, n) - g.transpose() * g).determinant()
    };
    let angles = angles_from_orthonormal(&qe, &qf);
    let rhs = angles
        .iter()
        .map(|t| libm::pow(libm::sin(*t), 2.0))
        .product();
    let oe = crate::random::orthogonal(rng, n);
    let of = crate::random::orthogonal(rng, n);
    Ok(SinDetIdentity {
        lhs: det(&qe, &qf),
        rhs,
        rebased_lhs: det(&(&qe * oe), &(&qf * of)),
        angles,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticDetIdentity {
    /// `det(I + Xi^T Xi)` with `Xi_pq = omega(e_p, f_q)`.
    pub lhs: f64,
    /// `prod (1 + sin^2 theta_l)`.
    pub rhs: f64,
    pub angles: Vec<f64>,
}

/// Both sides of `det(I + Xi^T Xi) = prod (1 + sin^2 theta_l)` for two
/// complementary Lagrangian subspaces, angles taken for `(x|y) = omega(x, J y)`.
pub fn symplectic_det_identity(
    e: &[DVector<f64>],
    f: &[DVector<f64>],
    omega: &DMatrix<f64>,
    j: &DMatrix<f64>,
) -> Result<SymplecticDetIdentity> {
    let ambient = omega.nrows();
    if !omega.is_square() || j.shape() != omega.shape() {
        return Err(Error::NotSquare {
            rows: j.nrows(),
            cols: j.ncols(),
        });
    }
    if !ambient.is_multiple_of(2) || e.len() * 2 != ambient || f.len() * 2 != ambient {
        return Err(Error::DimensionMismatch {
            left: ambient,
            right: e.len() + f.len(),
        });
    }
    let metric = omega * j;
    let l = cholesky(&metric)?;
    let be = orthonormalize(e, &l)?;
    let bf = orthonormalize(f, &l)?;
    for b in [&be.original, &bf.original] {
        let defect = (b.transpose() * omega * b).abs().max();
        if defect > 1e-10 {
            return Err(Error::NotLagrangian { defect });
        }
    }
    let joint = DMatrix::from_columns(
        &be.whitened
            .column_iter()
            .chain(bf.whitened.column_iter())
            .map(|c| c.into_owned())
            .collect::<Vec<_>>(),
    );
    let smallest = joint
        .singular_values()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if smallest < 1e-10 {
        return Err(Error::NotComplementary);
    }
    let n = e.len();
    let xi = be.original.transpose() * omega * &bf.original;
    let lhs = (DMatrix::identity(n, n) + xi.transpose() * xi).determinant();
    let angles = angles_from_orthonormal(&be.whitened, &bf.whitened);
    let rhs = angles
        .iter()
        .map(|t| 1.0 + libm::pow(libm::sin(*t), 2.0))
        .product();
    Ok(SymplecticDetIdentity { lhs, rhs, angles })
}

/// One transverse intersection point: principal angles (ascending, in
/// `(0, pi/2]`) and the density product `f_1(m) f_2(m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntersectionDatum {
    angles: Vec<f64>,
    density_product: f64,
}

impl IntersectionDatum {
    pub fn new(angles: Vec<f64>, density_product: f64) -> Result<Self> {
        if angles.is_empty() {
            return Err(Error::RankDeficient);
        }
        for &t in &angles {
            if !(t > 0.0 && t <= PI / 2.0 + 1e-12) {
                return Err(Error::OutOfRange {
                    name: "principal angle",
                    value: t,
                    range: "0 < theta <= pi/2",
                });
            }
        }
        if angles.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::OutOfRange {
                name: "principal angle",
                value: f64::NAN,
                range: "angles sorted ascending",
            });
        }
        if !(density_product > 0.0 && density_product.is_finite()) {
            return Err(Error::OutOfRange {
                name: "density product",
                value: density_product,
                range: "> 0",
            });
        }
        Ok(IntersectionDatum {
            angles,
            density_product,
        })
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn density_product(&self) -> f64 {
        self.density_product
    }

    fn sin_product(&self) -> f64 {
        self.angles.iter().map(|t| libm::sin(*t)).product()
    }

    fn metaplectic_product(&self) -> f64 {
        self.angles
            .iter()
            .map(|t| {
                let s = libm::sin(*t);
                s * libm::sqrt(1.0 + s * s)
            })
            .product()
    }

    fn inv_sqrt_product(&self) -> f64 {
        self.angles
            .iter()
            .map(|t| {
                let s = libm::sin(*t);
                1.0 / libm::sqrt(1.0 + s * s)
            })
            .product()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianPairData {
    /// Half-dimension of the ambient manifold (dimension of each Lagrangian).
    pub n: usize,
    /// Intersection points; empty for disjoint supports.
    pub points: Vec<IntersectionDatum>,
    /// `(int f_1 sigma_1, int f_2 sigma_2)`.
    pub f_integrals: (f64, f64),
}

fn semiclassical_scale(k: usize, power: f64) -> f64 {
    libm::pow(2.0 * PI / k as f64, power)
}

/// `(2pi/k)^n sum_nu (sigma_1,sigma_2)_nu / prod_l sin theta_l`; zero when
/// the supports do not meet.
pub fn predicted_trace(data: &LagrangianPairData, k: usize) -> f64 {
    let c1: f64 = data
        .points
        .iter()
        .map(|p| p.density_product / p.sin_product())
        .sum();
    semiclassical_scale(k, data.n as f64) * c1
}

/// `(2pi/k)^{2n} sum_nu (sigma_1,sigma_2)_nu^2 / prod_l sin theta_l sqrt(1 + sin^2 theta_l)`.
pub fn predicted_trace_sq(data: &LagrangianPairData, k: usize) -> f64 {
    let s: f64 = data
        .points
        .iter()
        .map(|p| p.density_product * p.density_product / p.metaplectic_product())
        .sum();
    semiclassical_scale(k, 2.0 * data.n as f64) * s
}

/// The three constants of the sub-fidelity expansion.
pub fn subfidelity_constants(data: &LagrangianPairData) -> (f64, f64, f64) {
    let a: Vec<f64> = data
        .points
        .iter()
        .map(|p| p.density_product / p.sin_product())
        .collect();
    let c1: f64 = a.iter().sum();
    let c2 = c1 * c1 - a.iter().map(|x| x * x).sum::<f64>();
    let c3 = data
        .points
        .iter()
        .zip(&a)
        .map(|(p, &ai)| p.density_product * ai * (1.0 / p.sin_product() - p.inv_sqrt_product()))
        .sum();
    (c1, c2.max(0.0), c3)
}

/// `(2pi/k)^n (C_1 + sqrt(2 (C_2 + C_3)))`.
pub fn predicted_subfidelity(data: &LagrangianPairData, k: usize) -> f64 {
    let (c1, c2, c3) = subfidelity_constants(data);
    semiclassical_scale(k, data.n as f64) * (c1 + libm::sqrt(2.0 * (c2 + c3)))
}

/// `1 - (1/2)(2pi/k)^{n/2} (int f_1 sigma_1 + int f_2 sigma_2)`.
pub fn predicted_superfidelity(data: &LagrangianPairData, k: usize) -> f64 {
    let (a, b) = data.f_integrals;
    1.0 - 0.5 * semiclassical_scale(k, 0.5 * data.n as f64) * (a + b)
}

/// `(2pi/k)^{d/2} int f sigma` for a state on a `d`-dimensional submanifold.
pub fn predicted_purity(d: usize, f_integral: f64, k: usize) -> f64 {
    semiclassical_scale(k, 0.5 * d as f64) * f_integral
}

/// Density product at each intersection of the equator and its rotation.
pub const SPHERE_DENSITY_PRODUCT: f64 = 1.0 / (2.0 * PI * PI);

/// `int f sigma` for the uniform density on a great circle.
pub const SPHERE_F_INTEGRAL: f64 = 1.0 / (PI * core::f64::consts::SQRT_2);

/// The equator and its rotation by `alpha` meet at `(0, +-1, 0)` with
/// principal angle `alpha` at both points.
pub fn sphere_intersection_data(alpha: f64) -> Result<LagrangianPairData> {
    if !(alpha > 0.0 && alpha <= PI / 2.0 + 1e-12) {
        return Err(Error::OutOfRange {
            name: "alpha",
            value: alpha,
            range: "0 < alpha <= pi/2",
        });
    }
    let alpha = alpha.min(PI / 2.0);
    let point = IntersectionDatum::new(alpha_vec(alpha), SPHERE_DENSITY_PRODUCT)?;
    Ok(LagrangianPairData {
        n: 1,
        points: alloc::vec![point.clone(), point],
        f_integrals: (SPHERE_F_INTEGRAL, SPHERE_F_INTEGRAL),
    })
}

fn alpha_vec(alpha: f64) -> Vec<f64> {
    alloc::vec![alpha]
}

/// `(2 / (pi sin a)) (1 + sqrt(2 - sin a / sqrt(1 + sin^2 a)))`, the limit of
/// `k E(rho_{k,1}, rho_{k,2}^a)`.
pub fn sphere_subfidelity_constant(alpha: f64) -> f64 {
    let s = libm::sin(alpha);
    2.0 / (PI * s) * (1.0 + libm::sqrt(2.0 - s / libm::sqrt(1.0 + s * s)))
}

/// Leading term `16 k^(3 delta - 1) / (pi sin^2 alpha)` of the upper bound on
/// `F(rho_{k,1}, rho_{k,2}^alpha)`.
pub fn predicted_fidelity_bound(k: usize, alpha: f64, delta: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(delta > 0.0 && delta <= 0.5) {
        return Err(Error::OutOfRange {
            name: "delta",
            value: delta,
            range: "0 < delta <= 1/2",
        });
    }
    let s = libm::sin(alpha);
    Ok(16.0 * libm::pow(k as f64, 3.0 * delta - 1.0) / (PI * s * s))
}

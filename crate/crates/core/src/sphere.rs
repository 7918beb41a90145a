//! Exact quantization of the sphere at level `k`.
//!
//! All matrices are written in the orthonormal monomial basis `(e_l)`,
//! `l = 0..=k`, with the conventions described at the crate root. A point of
//! the sphere with height `x3` and azimuth `phi` has stereographic
//! coordinate `z` with `|z|^2 / (1 + |z|^2) = (1 + x3) / 2` and
//! `arg z = phi`, which lets every coherent state be written without the
//! chart (the north pole is the point mass on `e_k`).

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hermitian::{eig_hermitian, CMatrix, Eigen, HermitianOperator};
use crate::special::{binomial_pmf, ln_binomial};

/// Quantization level `k >= 1`; the Hilbert space has dimension `k + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Level(usize);

impl Level {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::OutOfRange {
                name: "k",
                value: 0.0,
                range: "k >= 1",
            });
        }
        Ok(Level(k))
    }

    pub fn k(self) -> usize {
        self.0
    }

    pub fn dim(self) -> usize {
        self.0 + 1
    }
}

/// A point of the unit sphere in `R^3`.
pub type Point3 = [f64; 3];

/// Inverse stereographic projection from the north pole.
pub fn point_from_chart(z: Complex64) -> Point3 {
    let r2 = z.norm_sqr();
    let d = 1.0 + r2;
    [2.0 * z.re / d, 2.0 * z.im / d, (r2 - 1.0) / d]
}

/// Stereographic coordinate of `x`; `None` at the north pole.
pub fn chart_from_point(x: Point3) -> Option<Complex64> {
    let d = 1.0 - x[2];
    if d <= 0.0 {
        return None;
    }
    Some(Complex64::new(x[0] / d, x[1] / d))
}

/// Rotation of angle `gamma` about the `x2` axis,
/// `R_gamma(x) = (x1 cos g - x3 sin g, x2, x1 sin g + x3 cos g)`.
///
/// With this orientation `U(a) T(f) U(a)^* = T(f o R_{-a})` for the
/// rotation operator `U(a) = exp(a G)` of [`rotation_operator`].
pub fn rotate_about_x2(gamma: f64, x: Point3) -> Point3 {
    let (s, c) = (libm::sin(gamma), libm::cos(gamma));
    [x[0] * c - x[2] * s, x[1], x[0] * s + x[2] * c]
}

/// Unit coherent vector at `x`, components
/// `sqrt(C(k,m) p^m (1-p)^(k-m)) e^{-i m phi}` with `p = (1 + x3)/2`.
pub fn coherent_vector_at(level: Level, x: Point3) -> DVector<Complex64> {
    let p = (0.5 * (1.0 + x[2])).clamp(0.0, 1.0);
    let phi = libm::atan2(x[1], x[0]);
    let amp = binomial_pmf(level.k(), p);
    DVector::from_fn(level.dim(), |m, _| {
        let a = libm::sqrt(amp[m]);
        let t = -(m as f64) * phi;
        Complex64::new(a * libm::cos(t), a * libm::sin(t))
    })
}

/// Coherent vector in the chart, evaluated in log space so large `|z|` and
/// large `k` do not overflow.
pub fn coherent_vector(level: Level, z: Complex64) -> DVector<Complex64> {
    let k = level.k();
    let r2 = z.norm_sqr();
    if r2 == 0.0 {
        let mut v = DVector::zeros(level.dim());
        v[0] = Complex64::new(1.0, 0.0);
        return v;
    }
    // ln p = ln|z|^2 - ln(1+|z|^2), ln(1-p) = -ln(1+|z|^2)
    let l1 = libm::log1p(r2);
    let lp = libm::log(r2) - l1;
    let lq = -l1;
    let phi = z.arg();
    DVector::from_fn(level.dim(), |m, _| {
        let la = 0.5 * (ln_binomial(k, m) + m as f64 * lp + (k - m) as f64 * lq);
        let a = libm::exp(la);
        let t = -(m as f64) * phi;
        Complex64::new(a * libm::cos(t), a * libm::sin(t))
    })
}

fn outer(v: &DVector<Complex64>) -> CMatrix {
    v * v.adjoint()
}

/// Coherent projector `P_k^z` with entries
/// `<P e_l, e_m> = sqrt(C(k,l) C(k,m)) z^l zbar^m / (1 + |z|^2)^k`.
pub fn coherent_projector(level: Level, z: Complex64) -> HermitianOperator {
    HermitianOperator::new(outer(&coherent_vector(level, z))).expect("finite by construction")
}

/// Coherent projector at the north pole, `e_k e_k^*`.
pub fn north_pole_projector(level: Level) -> HermitianOperator {
    let mut d = alloc::vec![0.0; level.dim()];
    d[level.k()] = 1.0;
    HermitianOperator::from_diagonal(&d)
}

/// Coherent projector at any point of the sphere, poles included.
pub fn coherent_projector_at(level: Level, x: Point3) -> HermitianOperator {
    HermitianOperator::new(outer(&coherent_vector_at(level, x))).expect("finite by construction")
}

/// State of the equator with uniform density: `2^-k diag(C(k,0), ..., C(k,k))`.
pub fn equator_state(level: Level) -> HermitianOperator {
    let mut w = binomial_pmf(level.k(), 0.5);
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= s);
    HermitianOperator::from_diagonal(&w)
}

/// `I_{k,p} = int_R y^{2p} (1 + y^2)^{-(k+1)} dy = (pi / 4^k) C(2k,k) C(k,p) / C(2k,2p)`.
pub fn beta_integral(k: usize, p: usize) -> Result<f64> {
    if p > k {
        return Err(Error::IndexOutOfRange { index: p, max: k });
    }
    let ln = ln_binomial(2 * k, k) - k as f64 * libm::log(4.0) + ln_binomial(k, p)
        - ln_binomial(2 * k, 2 * p);
    Ok(PI * libm::exp(ln))
}

/// State of the meridian `{x1 = 0}` with density `dy / (pi (1 + y^2))` in the
/// chart `z = iy`.
///
/// Entry `(l, m)` vanishes when `l + m` is odd; otherwise, with
/// `p = (l + m)/2` and `q = (l - m)/2`, it equals
/// `(-1)^q 4^-k C(2k,k) C(k,p) sqrt(C(k,l) C(k,m)) / C(2k,2p)`.
pub fn meridian_state(level: Level) -> HermitianOperator {
    let k = level.k();
    let n = level.dim();
    let base = ln_binomial(2 * k, k) - k as f64 * libm::log(4.0);
    let mut m = DMatrix::<f64>::zeros(n, n);
    for l in 0..n {
        for j in (l % 2..n).step_by(2) {
            let p = (l + j) / 2;
            let ln = base + ln_binomial(k, p) + 0.5 * (ln_binomial(k, l) + ln_binomial(k, j))
                - ln_binomial(2 * k, 2 * p);
            let q = (l as isize - j as isize) / 2;
            let sign = if q.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            m[(l, j)] = sign * libm::exp(ln);
        }
    }
    HermitianOperator::new(m.map(|x| Complex64::new(x, 0.0))).expect("finite by construction")
}

/// Image of the generator of rotations about `x2` under the derived
/// representation:
/// `G e_l = (1/2) sqrt((l+1)(k-l)) e_{l+1} - (1/2) sqrt(l(k-l+1)) e_{l-1}`.
pub fn su2_generator(level: Level) -> DMatrix<f64> {
    let k = level.k();
    let n = level.dim();
    let mut g = DMatrix::zeros(n, n);
    for l in 0..k {
        let v = 0.5 * libm::sqrt(((l + 1) * (k - l)) as f64);
        g[(l + 1, l)] = v;
        g[(l, l + 1)] = -v;
    }
    g
}

/// Rotation operators `U(a) = exp(a G)` at one level, sharing a single
/// eigendecomposition of `iG`.
#[derive(Debug, Clone)]
pub struct RotationFamily {
    level: Level,
    eigen: Eigen,
}

impl RotationFamily {
    pub fn new(level: Level) -> Self {
        let g = su2_generator(level);
        let ig = g.map(|x| Complex64::new(0.0, x));
        let h = HermitianOperator::new(ig).expect("iG is Hermitian");
        RotationFamily {
            level,
            eigen: eig_hermitian(&h),
        }
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn operator(&self, alpha: f64) -> CMatrix {
        let mut scaled = self.eigen.vectors.clone();
        for (j, &l) in self.eigen.values.iter().enumerate() {
            let phase = Complex64::new(libm::cos(alpha * l), -libm::sin(alpha * l));
            scaled.column_mut(j).iter_mut().for_each(|z| *z *= phase);
        }
        scaled * self.eigen.vectors.adjoint()
    }

    /// `U(a) T U(a)^*`.
    pub fn conjugate(&self, t: &HermitianOperator, alpha: f64) -> HermitianOperator {
        t.conjugate_by(&self.operator(alpha))
            .expect("dimensions agree within one level")
    }
}

/// `U_k(a) = exp(a G)`, the rotation by `a` about the `x2` axis.
pub fn rotation_operator(level: Level, alpha: f64) -> CMatrix {
    RotationFamily::new(level).operator(alpha)
}

/// State of the equator rotated by `a` about `x2`: `U(a) rho_1 U(a)^*`.
pub fn rotated_circle_state(level: Level, alpha: f64) -> HermitianOperator {
    RotationFamily::new(level).conjugate(&equator_state(level), alpha)
}

type ChartFn = Box<dyn Fn(f64) -> Complex64 + Send + Sync>;
type WeightFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// A closed curve `t -> z(t)`, `t in [0, 1)`, in the stereographic chart,
/// with a probability density `w(t) dt`.
///
/// Integrals over the curve use the periodic rectangle rule at the midpoints
/// `t_j = (j + 1/2) / N`.
pub struct CurveWithDensity {
    chart_point: ChartFn,
    weight: WeightFn,
    nodes: usize,
}

impl core::fmt::Debug for CurveWithDensity {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("CurveWithDensity")
            .field("nodes", &self.nodes)
            .finish_non_exhaustive()
    }
}

impl CurveWithDensity {
    /// Checks finiteness and non-negativity at every node, and that the
    /// weight integrates to 1 within `1e-10`.
    pub fn new<Z, W>(chart_point: Z, weight: W, nodes: usize) -> Result<Self>
    where
        Z: Fn(f64) -> Complex64 + Send + Sync + 'static,
        W: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let curve = CurveWithDensity {
            chart_point: Box::new(chart_point),
            weight: Box::new(weight),
            nodes,
        };
        let integral = curve.validate()?;
        if (integral - 1.0).abs() > 1e-10 {
            return Err(Error::WeightNotNormalized { integral });
        }
        Ok(curve)
    }

    /// Like [`CurveWithDensity::new`] but divides the weight by its
    /// quadrature integral first.
    pub fn normalized<Z, W>(chart_point: Z, weight: W, nodes: usize) -> Result<Self>
    where
        Z: Fn(f64) -> Complex64 + Send + Sync + 'static,
        W: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let raw = CurveWithDensity {
            chart_point: Box::new(|_| Complex64::new(0.0, 0.0)),
            weight: Box::new(weight),
            nodes,
        };
        let integral = raw.weight_integral();
        if !(integral > 0.0 && integral.is_finite()) {
            return Err(Error::WeightNotNormalized { integral });
        }
        let w = raw.weight;
        Self::new(chart_point, move |t| w(t) / integral, nodes)
    }

    /// Circle `|z| = r` with uniform density; `r = 1` is the equator.
    pub fn circle(radius: f64, nodes: usize) -> Result<Self> {
        Self::new(
            move |t| Complex64::from_polar(radius, 2.0 * PI * t),
            |_| 1.0,
            nodes,
        )
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn node(&self, j: usize) -> f64 {
        (j as f64 + 0.5) / self.nodes as f64
    }

    pub fn point(&self, t: f64) -> Complex64 {
        (self.chart_point)(t)
    }

    pub fn weight(&self, t: f64) -> f64 {
        (self.weight)(t)
    }

    pub fn weight_integral(&self) -> f64 {
        let h = 1.0 / self.nodes as f64;
        (0..self.nodes)
            .map(|j| (self.weight)(self.node(j)) * h)
            .sum()
    }

    fn validate(&self) -> Result<f64> {
        if self.nodes == 0 {
            return Err(Error::TooFewNodes {
                nodes: 0,
                required: 1,
            });
        }
        for j in 0..self.nodes {
            let t = self.node(j);
            let z = (self.chart_point)(t);
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::CurveAtInfinity { t });
            }
            let w = (self.weight)(t);
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::WeightNotNormalized { integral: w });
            }
        }
        Ok(self.weight_integral())
    }
}

/// Minimum node count for [`state_from_curve`] at this level.
pub fn required_curve_nodes(level: Level) -> usize {
    64.max(8 * level.k())
}

/// `rho = int P_k^{z(t)} w(t) dt` by the periodic rectangle rule.
pub fn state_from_curve(level: Level, curve: &CurveWithDensity) -> Result<HermitianOperator> {
    let required = required_curve_nodes(level);
    if curve.nodes < required {
        return Err(Error::TooFewNodes {
            nodes: curve.nodes,
            required,
        });
    }
    let n = level.dim();
    let h = 1.0 / curve.nodes as f64;
    let mut acc = CMatrix::zeros(n, n);
    for j in 0..curve.nodes {
        let t = curve.node(j);
        let w = curve.weight(t) * h;
        if w == 0.0 {
            continue;
        }
        let v = coherent_vector(level, curve.point(t));
        acc.gerc(Complex64::new(w, 0.0), &v, &v, Complex64::new(1.0, 0.0));
    }
    HermitianOperator::new(acc)
}

/// Diagonal of the Bargmann-space circle state: Poisson weights
/// `k^l e^-k / l!` for `l = 0..=cutoff`.
pub fn bargmann_poisson_state(k: usize, cutoff: usize) -> Result<Vec<f64>> {
    let kf = k as f64;
    let weights: Vec<f64> = (0..=cutoff)
        .map(|l| {
            let ln = if k == 0 {
                if l == 0 {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            } else {
                l as f64 * libm::log(kf) - kf - crate::special::ln_factorial(l)
            };
            libm::exp(ln)
        })
        .collect();
    if (cutoff as f64) < kf + 10.0 * libm::sqrt(kf) {
        let tail_mass = (1.0 - weights.iter().sum::<f64>()).max(0.0);
        return Err(Error::CutoffTooSmall { cutoff, tail_mass });
    }
    Ok(weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::loewner_leq;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn lv(k: usize) -> Level {
        Level::new(k).unwrap()
    }

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn level_rejects_zero() {
        assert!(Level::new(0).is_err());
        assert_eq!(lv(7).dim(), 8);
    }

    #[test]
    fn chart_round_trip() {
        let z = Complex64::new(0.3, -2.0);
        let x = point_from_chart(z);
        assert_relative_eq!(
            x[0] * x[0] + x[1] * x[1] + x[2] * x[2],
            1.0,
            epsilon = 1e-15
        );
        let back = chart_from_point(x).unwrap();
        assert!((back - z).norm() < 1e-14);
        assert!(chart_from_point([0.0, 0.0, 1.0]).is_none());
        // the unit circle is the equator
        assert!(point_from_chart(Complex64::new(0.0, 1.0))[2].abs() < 1e-16);
    }

    #[test]
    fn coherent_projector_south_pole() {
        let p = coherent_projector(lv(5), c(0.0));
        let mut expected = alloc::vec![0.0; 6];
        expected[0] = 1.0;
        assert_eq!(p, HermitianOperator::from_diagonal(&expected));
    }

    #[test]
    fn coherent_projector_k1_z1() {
        let p = coherent_projector(lv(1), c(1.0));
        for z in p.matrix().iter() {
            assert!((z - c(0.5)).norm() < 1e-15);
        }
        let sq = p.matrix() * p.matrix();
        assert!((sq - p.matrix()).iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn coherent_projector_phase_convention() {
        // <P e_l, e_m> = sqrt(C C) z^l zbar^m / (1+|z|^2)^k, row m, column l
        let z = Complex64::new(0.4, 0.7);
        let p = coherent_projector(lv(3), z);
        let (l, m) = (2usize, 1usize);
        let expected = z.powu(l as u32) * z.conj().powu(m as u32) * libm::sqrt(3.0 * 3.0)
            / libm::pow(1.0 + z.norm_sqr(), 3.0);
        assert!((p.matrix()[(m, l)] - expected).norm() < 1e-15);
    }

    #[test]
    fn coherent_projector_large_k_normalized() {
        let p = coherent_projector(lv(200), Complex64::new(3.0, 4.0));
        assert_relative_eq!(p.trace(), 1.0, epsilon = 1e-12);
        let p = coherent_projector(lv(1500), Complex64::new(1e3, -2e2));
        assert_relative_eq!(p.trace(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn chart_free_coherent_vector_agrees_and_covers_poles() {
        let z = Complex64::new(-0.8, 1.3);
        let a = coherent_projector(lv(12), z);
        let b = coherent_projector_at(lv(12), point_from_chart(z));
        assert!(a.max_abs_diff(&b) < 1e-13);
        let north = coherent_projector_at(lv(4), [0.0, 0.0, 1.0]);
        assert_eq!(north.max_abs_diff(&north_pole_projector(lv(4))), 0.0);
    }

    #[test]
    fn equator_state_examples() {
        assert_eq!(equator_state(lv(2)).diagonal(), [0.25, 0.5, 0.25]);
        assert_eq!(equator_state(lv(1)).diagonal(), [0.5, 0.5]);
        let w = equator_state(lv(10)).diagonal();
        let purity: f64 = w.iter().map(|x| x * x).sum();
        // 4^-10 C(20,10) = 184756 / 1048576
        assert_relative_eq!(purity, 184756.0 / 1048576.0, max_relative = 1e-14);
    }

    /// Adaptive-free oracle: substitute y = tan(s) and use a fine Gauss rule
    /// on (-pi/2, pi/2), where the integrand becomes a trigonometric polynomial.
    fn beta_oracle(k: usize, p: usize) -> f64 {
        let rule = crate::special::GaussLegendre::new(200);
        rule.integrate(|x| {
            let s = 0.5 * PI * x;
            let y = libm::tan(s);
            let jac = 0.5 * PI * (1.0 + y * y);
            libm::pow(y, 2.0 * p as f64) * libm::pow(1.0 + y * y, -(k as f64 + 1.0)) * jac
        })
    }

    #[test]
    fn beta_integral_matches_quadrature() {
        assert_relative_eq!(beta_oracle(1, 0), PI / 2.0, max_relative = 1e-13);
        assert_relative_eq!(beta_oracle(1, 1), PI / 2.0, max_relative = 1e-13);
        assert_relative_eq!(beta_integral(1, 0).unwrap(), PI / 2.0, max_relative = 1e-14);
        assert_relative_eq!(beta_integral(1, 1).unwrap(), PI / 2.0, max_relative = 1e-14);
        for k in 1..=12 {
            for p in 0..=k {
                assert_relative_eq!(
                    beta_integral(k, p).unwrap(),
                    beta_oracle(k, p),
                    max_relative = 1e-12
                );
            }
        }
        assert!(beta_integral(3, 4).is_err());
    }

    #[test]
    fn beta_integral_symmetry() {
        for p in 0..=7 {
            assert_relative_eq!(
                beta_integral(7, p).unwrap(),
                beta_integral(7, 7 - p).unwrap(),
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn meridian_state_examples() {
        let m1 = meridian_state(lv(1));
        assert!(m1.max_abs_diff(&HermitianOperator::from_diagonal(&[0.5, 0.5])) < 1e-15);
        let m2 = meridian_state(lv(2));
        let expected = HermitianOperator::from_real(
            3,
            &[
                3.0 / 8.0,
                0.0,
                -1.0 / 8.0,
                0.0,
                0.25,
                0.0,
                -1.0 / 8.0,
                0.0,
                3.0 / 8.0,
            ],
        )
        .unwrap();
        assert!(m2.max_abs_diff(&expected) < 1e-15);
        assert_relative_eq!(
            meridian_state(lv(3)).diagonal()[1],
            3.0 / 16.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn meridian_state_parity_zeros() {
        let m = meridian_state(lv(9));
        for l in 0..10 {
            for j in 0..10 {
                if (l + j) % 2 == 1 {
                    assert_eq!(m.matrix()[(l, j)], c(0.0));
                }
            }
        }
    }

    #[test]
    fn meridian_state_from_the_curve_itself() {
        // z = i tan(pi (t - 1/2)) carries dy / (pi (1 + y^2)) to dt
        let level = lv(10);
        let curve = CurveWithDensity::new(
            |t| Complex64::new(0.0, libm::tan(PI * (t - 0.5))),
            |_| 1.0,
            256,
        )
        .unwrap();
        let rho = state_from_curve(level, &curve).unwrap();
        assert!(rho.max_abs_diff(&meridian_state(level)) < 1e-12);
    }

    #[test]
    fn generator_examples() {
        let g = su2_generator(lv(1));
        assert_eq!(g, DMatrix::from_row_slice(2, 2, &[0.0, -0.5, 0.5, 0.0]));
        let g = su2_generator(lv(2));
        let s = libm::sqrt(2.0) / 2.0;
        let expected = DMatrix::from_row_slice(3, 3, &[0.0, -s, 0.0, s, 0.0, -s, 0.0, s, 0.0]);
        assert!((g.clone() - expected).abs().max() < 1e-15);
        assert_eq!(g.transpose(), -g);
        let fam = RotationFamily::new(lv(2));
        let vals = &fam.eigen.values;
        for (v, e) in vals.iter().zip([-1.0, 0.0, 1.0]) {
            assert!((v - e).abs() < 1e-14);
        }
    }

    #[test]
    fn rotation_operator_basics() {
        let u = rotation_operator(lv(6), 0.0);
        assert!((u - CMatrix::identity(7, 7))
            .iter()
            .all(|z| z.norm() < 1e-14));
        let fam = RotationFamily::new(lv(10));
        let lhs = fam.operator(0.4) * fam.operator(0.9);
        let rhs = fam.operator(1.3);
        assert!((lhs - rhs).iter().all(|z| z.norm() < 1e-10));
        let u = fam.operator(1.1);
        let gram = u.adjoint() * &u;
        assert!((gram - CMatrix::identity(11, 11))
            .iter()
            .all(|z| z.norm() < 1e-10));
    }

    #[test]
    fn quarter_turn_maps_equator_to_meridian() {
        for k in [1usize, 2, 5, 17, 40] {
            let rotated = rotated_circle_state(lv(k), PI / 2.0);
            assert!(
                rotated.max_abs_diff(&meridian_state(lv(k))) < 1e-10,
                "k = {k}"
            );
            let other = rotated_circle_state(lv(k), -PI / 2.0);
            assert!(other.max_abs_diff(&meridian_state(lv(k))) < 1e-10);
        }
        let r0 = rotated_circle_state(lv(6), 0.0);
        assert!(r0.max_abs_diff(&equator_state(lv(6))) < 1e-14);
    }

    #[test]
    fn rotated_state_keeps_binomial_spectrum() {
        let level = lv(8);
        let eq = equator_state(level);
        let mut spectrum = eq.diagonal();
        spectrum.sort_by(f64::total_cmp);
        for alpha in [0.3, 1.0, 2.2] {
            let r = rotated_circle_state(level, alpha);
            let e = eig_hermitian(&r);
            for (a, b) in e.values.iter().zip(&spectrum) {
                assert!((a - b).abs() < 1e-13);
            }
            assert_relative_eq!(r.trace(), 1.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn equator_commutes_with_x3_rotations() {
        let eq = equator_state(lv(9));
        let d = CMatrix::from_fn(10, 10, |i, j| {
            if i == j {
                Complex64::from_polar(1.0, 0.37 * i as f64)
            } else {
                c(0.0)
            }
        });
        assert!(eq.conjugate_by(&d).unwrap().max_abs_diff(&eq) < 1e-15);
    }

    #[test]
    fn unit_circle_reproduces_equator() {
        for k in [1usize, 7, 40] {
            let level = lv(k);
            let curve = CurveWithDensity::circle(1.0, required_curve_nodes(level)).unwrap();
            let rho = state_from_curve(level, &curve).unwrap();
            assert!(rho.max_abs_diff(&equator_state(level)) < 1e-12);
        }
    }

    #[test]
    fn curve_quadrature_converges_spectrally() {
        // off-center circle, not a trigonometric polynomial of low degree
        let level = lv(6);
        let make = |n| {
            CurveWithDensity::normalized(
                |t| Complex64::new(0.4, 0.1) + Complex64::from_polar(0.9, 2.0 * PI * t),
                |t| 1.0 + 0.5 * libm::cos(2.0 * PI * t),
                n,
            )
            .unwrap()
        };
        let reference = state_from_curve(level, &make(2048)).unwrap();
        let mut previous = f64::INFINITY;
        for n in [64usize, 128] {
            let err = state_from_curve(level, &make(n))
                .unwrap()
                .max_abs_diff(&reference);
            assert!(
                err * 10.0 <= previous || err < 1e-14,
                "n = {n}: {err} vs {previous}"
            );
            previous = err;
        }
    }

    #[test]
    fn narrow_bump_approaches_coherent_projector() {
        let level = lv(5);
        let center = 0.25;
        let bump = |kappa: f64| {
            CurveWithDensity::normalized(
                |t| Complex64::from_polar(1.0, 2.0 * PI * t),
                move |t| libm::exp(kappa * (libm::cos(2.0 * PI * (t - center)) - 1.0)),
                4096,
            )
            .unwrap()
        };
        let target = coherent_projector(level, Complex64::new(0.0, 1.0));
        let wide = state_from_curve(level, &bump(50.0))
            .unwrap()
            .max_abs_diff(&target);
        let narrow = state_from_curve(level, &bump(5000.0))
            .unwrap()
            .max_abs_diff(&target);
        assert!(narrow < wide / 10.0);
        assert!(narrow < 1e-2);
    }

    #[test]
    fn latitude_circle_is_a_state_away_from_equator() {
        let level = lv(20);
        let curve = CurveWithDensity::circle(2.0, required_curve_nodes(level)).unwrap();
        let rho = state_from_curve(level, &curve).unwrap();
        assert_relative_eq!(rho.trace(), 1.0, epsilon = 1e-10);
        let z = HermitianOperator::zeros(level.dim());
        assert!(loewner_leq(&z, &rho, 1e-12).unwrap().holds);
    }

    #[test]
    fn curve_validation_errors() {
        let bad = CurveWithDensity::new(|t| Complex64::from_polar(1.0, 2.0 * PI * t), |_| 2.0, 64);
        match bad {
            Err(Error::WeightNotNormalized { integral }) => assert_relative_eq!(integral, 2.0),
            other => panic!("unexpected {other:?}"),
        }
        let at_pole = CurveWithDensity::new(|_| Complex64::new(f64::INFINITY, 0.0), |_| 1.0, 64);
        assert!(matches!(at_pole, Err(Error::CurveAtInfinity { .. })));
        let few = CurveWithDensity::circle(1.0, 32).unwrap();
        assert!(matches!(
            state_from_curve(lv(3), &few),
            Err(Error::TooFewNodes {
                nodes: 32,
                required: 64
            })
        ));
    }

    #[test]
    fn poisson_weights() {
        let w = bargmann_poisson_state(1, 20).unwrap();
        assert_relative_eq!(w[0], libm::exp(-1.0), epsilon = 1e-15);
        let w = bargmann_poisson_state(4, 40).unwrap();
        let argmax = (0..w.len()).max_by(|&a, &b| w[a].total_cmp(&w[b])).unwrap();
        // mode is shared by l = 3 and l = 4; max_by returns the last maximum
        assert_eq!(argmax, 4);
        let s: f64 = bargmann_poisson_state(30, 100).unwrap().iter().sum();
        assert!((1.0 - 1e-8..=1.0 + 1e-14).contains(&s));
        assert!(w.iter().all(|&x| x > 0.0));
        match bargmann_poisson_state(100, 110) {
            Err(Error::CutoffTooSmall { tail_mass, .. }) => assert!(tail_mass > 0.1),
            other => panic!("unexpected {other:?}"),
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn coherent_projectors_are_rank_one(k in 1usize..=100, re in -5.0f64..5.0, im in -5.0f64..5.0) {
            let p = coherent_projector(lv(k), Complex64::new(re, im));
            let sq = p.matrix() * p.matrix();
            prop_assert!((sq - p.matrix()).iter().all(|z| z.norm() < 1e-10));
            prop_assert!((p.trace() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn rotated_states_keep_purity(alpha in -3.2f64..3.2) {
            let level = lv(12);
            let r = rotated_circle_state(level, alpha);
            let e = equator_state(level);
            let pr: f64 = (r.matrix() * r.matrix()).trace().re;
            let pe: f64 = e.diagonal().iter().map(|x| x * x).sum();
            prop_assert!((pr - pe).abs() < 1e-13);
            prop_assert!((r.trace() - 1.0).abs() < 1e-13);
        }
    }
}

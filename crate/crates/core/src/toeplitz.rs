//! Berezin–Toeplitz operators `T_k(f)` on the quantized sphere.
//!
//! `T_k(f) = ((k+1)/2pi) int f(x) P_k^x dmu(x)`, where `dmu = (1/2) du dphi`
//! in the coordinates `u = x3`, `phi = arg(x1 + i x2)`. Radial symbols give
//! diagonal operators and are integrated with a one-dimensional Gauss–Legendre
//! rule; general symbols use Gauss–Legendre in `u` and the trapezoid rule in
//! `phi`, followed by a discrete Fourier transform in `phi` that is exact for
//! the azimuthal modes `|n| <= k` when the node count is at least `2k + 4`.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hermitian::{CMatrix, HermitianOperator};
use crate::metrics::fidelity_diagonal_conjugated;
use crate::special::{binomial_pmf, GaussLegendre};
use crate::sphere::{equator_state, rotate_about_x2, Level, Point3, RotationFamily};

type RadialFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type GeneralFn = Arc<dyn Fn(Point3) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum SymbolKind {
    /// Function of `x3` alone.
    Radial(RadialFn),
    General(GeneralFn),
}

/// A real function on the sphere together with optional quadrature node
/// counts; `None` selects the defaults of [`default_radial_nodes`] and
/// [`default_azimuth_nodes`].
#[derive(Clone)]
pub struct SphereSymbol {
    pub kind: SymbolKind,
    pub quad_radial_nodes: Option<usize>,
    pub quad_azimuth_nodes: Option<usize>,
}

impl core::fmt::Debug for SphereSymbol {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let kind = match self.kind {
            SymbolKind::Radial(_) => "radial",
            SymbolKind::General(_) => "general",
        };
        f.debug_struct("SphereSymbol")
            .field("kind", &kind)
            .field("quad_radial_nodes", &self.quad_radial_nodes)
            .field("quad_azimuth_nodes", &self.quad_azimuth_nodes)
            .finish()
    }
}

impl SphereSymbol {
    pub fn radial<G: Fn(f64) -> f64 + Send + Sync + 'static>(g: G) -> Self {
        SphereSymbol {
            kind: SymbolKind::Radial(Arc::new(g)),
            quad_radial_nodes: None,
            quad_azimuth_nodes: None,
        }
    }

    pub fn general<F: Fn(Point3) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        SphereSymbol {
            kind: SymbolKind::General(Arc::new(f)),
            quad_radial_nodes: None,
            quad_azimuth_nodes: None,
        }
    }

    pub fn with_radial_nodes(mut self, nodes: usize) -> Self {
        self.quad_radial_nodes = Some(nodes);
        self
    }

    pub fn with_azimuth_nodes(mut self, nodes: usize) -> Self {
        self.quad_azimuth_nodes = Some(nodes);
        self
    }

    pub fn is_radial(&self) -> bool {
        matches!(self.kind, SymbolKind::Radial(_))
    }

    pub fn eval(&self, x: Point3) -> f64 {
        match &self.kind {
            SymbolKind::Radial(g) => g(x[2]),
            SymbolKind::General(f) => f(x),
        }
    }

    /// The same symbol viewed as a general function on the sphere.
    pub fn as_general(&self) -> GeneralFn {
        match &self.kind {
            SymbolKind::Radial(g) => {
                let g = g.clone();
                Arc::new(move |x: Point3| g(x[2]))
            }
            SymbolKind::General(f) => f.clone(),
        }
    }

    /// `f o R_{-alpha}`, the symbol whose Toeplitz operator is
    /// `U(alpha) T_k(f) U(alpha)^*`. Node counts are kept.
    pub fn rotated(&self, alpha: f64) -> Self {
        let f = self.as_general();
        SphereSymbol {
            kind: SymbolKind::General(Arc::new(move |x| f(rotate_about_x2(-alpha, x)))),
            quad_radial_nodes: self.quad_radial_nodes,
            quad_azimuth_nodes: self.quad_azimuth_nodes,
        }
    }

    /// Pointwise product of two symbols; radial when both are.
    pub fn product(&self, other: &SphereSymbol) -> Self {
        let nodes = |a: Option<usize>, b: Option<usize>| match (a, b) {
            (Some(x), Some(y)) => Some(x.max(y)),
            (x, y) => x.or(y),
        };
        let kind = match (&self.kind, &other.kind) {
            (SymbolKind::Radial(a), SymbolKind::Radial(b)) => {
                let (a, b) = (a.clone(), b.clone());
                SymbolKind::Radial(Arc::new(move |t| a(t) * b(t)))
            }
            _ => {
                let (a, b) = (self.as_general(), other.as_general());
                SymbolKind::General(Arc::new(move |x| a(x) * b(x)))
            }
        };
        SphereSymbol {
            kind,
            quad_radial_nodes: nodes(self.quad_radial_nodes, other.quad_radial_nodes),
            quad_azimuth_nodes: nodes(self.quad_azimuth_nodes, other.quad_azimuth_nodes),
        }
    }
}

pub fn default_radial_nodes(level: Level) -> usize {
    200.max(2 * level.k() + 20)
}

pub fn min_azimuth_nodes(level: Level) -> usize {
    2 * level.k() + 4
}

/// Even node count with headroom above the aliasing limit `2k + 4`.
pub fn default_azimuth_nodes(level: Level) -> usize {
    let n = (2 * level.k() + 4).max(256);
    n + n % 2
}

fn point(u: f64, phi: f64) -> Point3 {
    let r = libm::sqrt((1.0 - u * u).max(0.0));
    [r * libm::cos(phi), r * libm::sin(phi), u]
}

/// Diagonal of `T_k(g)` for a radial symbol:
/// `((k+1)/2) int_{-1}^{1} C(k,l) a^l (1-a)^(k-l) g(x) dx` with `a = (1+x)/2`.
fn radial_diagonal(level: Level, g: &dyn Fn(f64) -> f64, nodes: usize) -> Result<Vec<f64>> {
    let rule = GaussLegendre::new(nodes);
    let mut diag = vec![0.0; level.dim()];
    let half = 0.5 * (level.k() + 1) as f64;
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        let gx = g(x);
        if !gx.is_finite() {
            return Err(Error::NonFiniteSymbol { x3: x });
        }
        if gx == 0.0 {
            continue;
        }
        let pmf = binomial_pmf(level.k(), 0.5 * (1.0 + x));
        for (d, p) in diag.iter_mut().zip(pmf) {
            *d += w * p * gx;
        }
    }
    diag.iter_mut().for_each(|d| *d *= half);
    Ok(diag)
}

/// `T_k(g)` for a radial symbol; the result is diagonal.
pub fn toeplitz_radial(level: Level, symbol: &SphereSymbol) -> Result<HermitianOperator> {
    let SymbolKind::Radial(g) = &symbol.kind else {
        return toeplitz_general(level, symbol);
    };
    let nodes = symbol
        .quad_radial_nodes
        .unwrap_or_else(|| default_radial_nodes(level));
    Ok(HermitianOperator::from_diagonal(&radial_diagonal(
        level,
        g.as_ref(),
        nodes,
    )?))
}

/// Radial Toeplitz operator together with the largest change of a diagonal
/// entry when the node count is doubled.
pub fn toeplitz_radial_checked(
    level: Level,
    symbol: &SphereSymbol,
) -> Result<(HermitianOperator, f64)> {
    let SymbolKind::Radial(g) = &symbol.kind else {
        return Err(Error::OutOfRange {
            name: "symbol",
            value: f64::NAN,
            range: "radial symbols only",
        });
    };
    let nodes = symbol
        .quad_radial_nodes
        .unwrap_or_else(|| default_radial_nodes(level));
    let coarse = radial_diagonal(level, g.as_ref(), nodes)?;
    let fine = radial_diagonal(level, g.as_ref(), 2 * nodes)?;
    let change = coarse
        .iter()
        .zip(&fine)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok((HermitianOperator::from_diagonal(&fine), change))
}

/// `T_k(f)` for any symbol by two-dimensional quadrature.
pub fn toeplitz_general(level: Level, symbol: &SphereSymbol) -> Result<HermitianOperator> {
    let k = level.k();
    let n = level.dim();
    let n_u = symbol
        .quad_radial_nodes
        .unwrap_or_else(|| default_radial_nodes(level));
    let n_phi = symbol
        .quad_azimuth_nodes
        .unwrap_or_else(|| default_azimuth_nodes(level));
    if n_phi < min_azimuth_nodes(level) {
        return Err(Error::TooFewNodes {
            nodes: n_phi,
            required: min_azimuth_nodes(level),
        });
    }
    let f = symbol.as_general();
    let rule = GaussLegendre::new(n_u);
    let h = 2.0 * PI / n_phi as f64;
    let twiddle: Vec<Complex64> = (0..n_phi)
        .map(|j| Complex64::from_polar(1.0, h * j as f64))
        .collect();

    let mut samples = vec![0.0; n_phi];
    let mut modes = vec![Complex64::new(0.0, 0.0); k + 1];
    let mut acc = CMatrix::zeros(n, n);
    for (&u, &w) in rule.nodes.iter().zip(&rule.weights) {
        for (j, s) in samples.iter_mut().enumerate() {
            let v = f(point(u, h * j as f64));
            if !v.is_finite() {
                return Err(Error::NonFiniteSymbol { x3: u });
            }
            *s = v;
        }
        // F_d = int f e^{i d phi} dphi for d = 0..=k; negative d are conjugates
        for (d, slot) in modes.iter_mut().enumerate() {
            let mut sum = Complex64::new(0.0, 0.0);
            let mut idx = 0usize;
            for &s in &samples {
                sum += twiddle[idx] * s;
                idx += d;
                if idx >= n_phi {
                    idx -= n_phi;
                }
            }
            *slot = sum * h;
        }
        let amp: Vec<f64> = binomial_pmf(k, 0.5 * (1.0 + u))
            .into_iter()
            .map(libm::sqrt)
            .collect();
        for m in 0..n {
            if amp[m] == 0.0 {
                continue;
            }
            for l in m..n {
                let c = w * amp[l] * amp[m];
                if c == 0.0 {
                    continue;
                }
                acc[(m, l)] += modes[l - m] * c;
            }
        }
    }
    let scale = (k + 1) as f64 / (4.0 * PI);
    for m in 0..n {
        for l in m..n {
            let v = acc[(m, l)] * scale;
            acc[(m, l)] = v;
            acc[(l, m)] = v.conj();
        }
    }
    HermitianOperator::new(acc)
}

/// `int_{S^2} f dmu` with total mass `2pi`, by Gauss–Legendre in `u` and the
/// trapezoid rule in `phi`.
pub fn sphere_integral(
    f: &dyn Fn(Point3) -> f64,
    radial_nodes: usize,
    azimuth_nodes: usize,
) -> f64 {
    let rule = GaussLegendre::new(radial_nodes);
    let h = 2.0 * PI / azimuth_nodes as f64;
    let mut total = 0.0;
    for (&u, &w) in rule.nodes.iter().zip(&rule.weights) {
        let ring: f64 = (0..azimuth_nodes).map(|j| f(point(u, h * j as f64))).sum();
        total += w * ring * h;
    }
    0.5 * total
}

/// Parameters of the Gaussian bump around the equator,
/// `f(x) = lambda exp(-c (k+1)^(1 - 2 delta) x3^2)` with
/// `lambda = sqrt(2 (2c + 1) / pi)`. `delta = 0` is the symbol `f_k^c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianSymbolParams {
    pub c: f64,
    pub delta: f64,
    pub level: Level,
}

impl GaussianSymbolParams {
    pub fn new(level: Level, c: f64, delta: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::OutOfRange {
                name: "c",
                value: c,
                range: "c > 0",
            });
        }
        if !(0.0..=0.5).contains(&delta) {
            return Err(Error::OutOfRange {
                name: "delta",
                value: delta,
                range: "0 <= delta <= 1/2",
            });
        }
        Ok(GaussianSymbolParams { c, delta, level })
    }

    pub fn amplitude(&self) -> f64 {
        libm::sqrt(2.0 * (2.0 * self.c + 1.0) / PI)
    }

    /// `tau = c (k+1)^(1 - 2 delta)`.
    pub fn exponent(&self) -> f64 {
        self.c * libm::pow((self.level.k() + 1) as f64, 1.0 - 2.0 * self.delta)
    }

    /// Node counts that resolve the bump and its rotations: the Gaussian
    /// has width `tau^-1/2` and azimuthal bandwidth of a few `sqrt(tau)`.
    pub fn quadrature_nodes(&self) -> (usize, usize) {
        let k = self.level.k() as f64;
        let s = libm::sqrt(self.exponent());
        let radial = libm::ceil(2.0 * k + 20.0 + 16.0 * s) as usize;
        let azimuth = libm::ceil(2.0 * k + 64.0 + 16.0 * s) as usize;
        (
            radial.max(default_radial_nodes(self.level)),
            (azimuth + azimuth % 2).max(default_azimuth_nodes(self.level)),
        )
    }
}

pub fn gaussian_symbol(params: GaussianSymbolParams) -> SphereSymbol {
    let lambda = params.amplitude();
    let tau = params.exponent();
    let (radial, azimuth) = params.quadrature_nodes();
    SphereSymbol::radial(move |x3| lambda * libm::exp(-tau * x3 * x3))
        .with_radial_nodes(radial)
        .with_azimuth_nodes(azimuth)
}

/// `U(alpha) T U(alpha)^*`; for `T = T_k(f)` this is `T_k(f o R_{-alpha})`.
pub fn egorov_conjugate(
    level: Level,
    t: &HermitianOperator,
    alpha: f64,
) -> Result<HermitianOperator> {
    crate::hermitian::same_dim(level.dim(), t.dim())?;
    Ok(RotationFamily::new(level).conjugate(t, alpha))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DominationReport {
    /// `min_l (T_k(f_k^c)_ll / sqrt(k+1) - 2^-k C(k,l))`.
    pub margin: f64,
    pub holds: bool,
    /// `c >= 2`, the range where the inequality is asserted to hold.
    pub in_claimed_regime: bool,
}

/// Compares `rho_{k,1}` with `T_k(f_k^c) / sqrt(k+1)`; both are diagonal.
pub fn domination_check(level: Level, c: f64) -> Result<DominationReport> {
    let params = GaussianSymbolParams::new(level, c, 0.0)?;
    let t = toeplitz_radial(level, &gaussian_symbol(params))?;
    let scale = 1.0 / libm::sqrt(level.dim() as f64);
    let margin = t
        .diagonal()
        .iter()
        .zip(equator_state(level).diagonal())
        .map(|(a, b)| a * scale - b)
        .fold(f64::INFINITY, f64::min);
    Ok(DominationReport {
        margin,
        holds: margin >= -1e-12,
        in_claimed_regime: c >= 2.0,
    })
}

/// Diagonal of `T_k(f_k^c)`.
pub fn gaussian_toeplitz_diagonal(level: Level, c: f64) -> Result<Vec<f64>> {
    let params = GaussianSymbolParams::new(level, c, 0.0)?;
    Ok(toeplitz_radial(level, &gaussian_symbol(params))?.diagonal())
}

/// `F(T_k(f_k^c), U(alpha) T_k(f_k^c) U(alpha)^*) / (k+1)`, an upper bound for
/// `F(rho_{k,1}, rho_{k,2}^alpha)` when `c >= 2`.
pub fn fidelity_upper_bound(level: Level, alpha: f64, c: f64) -> Result<f64> {
    let diag = gaussian_toeplitz_diagonal(level, c)?;
    fidelity_upper_bound_in(&RotationFamily::new(level), &diag, alpha)
}

/// [`fidelity_upper_bound`] with the rotation family and the Toeplitz
/// diagonal supplied, for sweeps over `alpha`.
pub fn fidelity_upper_bound_in(
    family: &RotationFamily,
    toeplitz_diag: &[f64],
    alpha: f64,
) -> Result<f64> {
    let u = family.operator(alpha);
    let f = fidelity_diagonal_conjugated(toeplitz_diag, &u, toeplitz_diag)?;
    Ok(f / family.level().dim() as f64)
}

/// Smallest angle accepted by the `1/sin(alpha)` predictors.
pub const MIN_ALPHA: f64 = 0.1;

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if !(MIN_ALPHA..=PI / 2.0 + 1e-12).contains(&alpha) {
        return Err(Error::OutOfRange {
            name: "alpha",
            value: alpha,
            range: "0.1 <= alpha <= pi/2",
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceNormEstimate {
    pub numeric: f64,
    pub predictor: f64,
}

impl TraceNormEstimate {
    pub fn ratio(&self) -> f64 {
        self.numeric / self.predictor
    }
}

fn sqrt_product_symbol(
    level: Level,
    alpha: f64,
    c: f64,
    delta: f64,
) -> Result<(SphereSymbol, f64)> {
    check_alpha(alpha)?;
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::OutOfRange {
            name: "delta",
            value: delta,
            range: "0 < delta < 1/2",
        });
    }
    let params = GaussianSymbolParams::new(level, c, delta)?;
    let f = gaussian_symbol(params);
    let g = f.rotated(alpha);
    let (ff, gg) = (f.as_general(), g.as_general());
    let mut s = SphereSymbol::general(move |x| libm::sqrt(ff(x) * gg(x)));
    s.quad_radial_nodes = f.quad_radial_nodes;
    s.quad_azimuth_nodes = f.quad_azimuth_nodes;
    Ok((s, params.exponent()))
}

fn trace_norm_predictor(level: Level, alpha: f64, c: f64, delta: f64) -> f64 {
    2.0 * libm::pow(level.k() as f64, 2.0 * delta) / (libm::sqrt(c * PI) * libm::sin(alpha))
}

/// `||T_k(sqrt(f g))||_Tr` for `f = f_k^{c,delta}` and `g = f o R_{-alpha}`,
/// with the stationary-phase predictor `2 k^(2 delta) / (sqrt(c pi) sin alpha)`.
///
/// The symbol is positive, so the trace norm is the trace
/// `((k+1)/2pi) int sqrt(f g) dmu`, evaluated without forming the matrix.
pub fn trace_norm_sqrt_product(
    level: Level,
    alpha: f64,
    c: f64,
    delta: f64,
) -> Result<TraceNormEstimate> {
    let (symbol, tau) = sqrt_product_symbol(level, alpha, c, delta)?;
    let f = symbol.as_general();
    let nodes = 400 + libm::ceil(32.0 * libm::sqrt(tau)) as usize;
    let integral = sphere_integral(f.as_ref(), nodes, nodes + nodes % 2);
    Ok(TraceNormEstimate {
        numeric: (level.k() + 1) as f64 / (2.0 * PI) * integral,
        predictor: trace_norm_predictor(level, alpha, c, delta),
    })
}

/// Same quantity through the full matrix `T_k(sqrt(f g))` and its singular
/// values; quadratic in memory, intended for moderate `k`.
pub fn trace_norm_sqrt_product_dense(
    level: Level,
    alpha: f64,
    c: f64,
    delta: f64,
) -> Result<TraceNormEstimate> {
    let (symbol, _) = sqrt_product_symbol(level, alpha, c, delta)?;
    let t = toeplitz_general(level, &symbol)?;
    Ok(TraceNormEstimate {
        numeric: crate::hermitian::trace_norm(t.matrix())?,
        predictor: trace_norm_predictor(level, alpha, c, delta),
    })
}

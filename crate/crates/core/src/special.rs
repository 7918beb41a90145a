//! Log-space combinatorics and Gauss–Legendre rules.
//!
//! Binomial coefficients overflow `f64` around `C(1030, 515)`, and central
//! ones such as `C(2k, k)` already do near `k = 510`, so every combinatorial
//! factor is carried as a logarithm and exponentiated only once per entry.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

/// `ln(n!)`.
pub fn ln_factorial(n: usize) -> f64 {
    match n {
        0 | 1 => 0.0,
        _ => libm::lgamma(n as f64 + 1.0),
    }
}

/// `ln C(n, k)`; `-inf` when `k > n`.
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    if k == 0 || k == n {
        return 0.0;
    }
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// `C(n, k)` as a float, through the log.
pub fn binomial(n: usize, k: usize) -> f64 {
    libm::exp(ln_binomial(n, k))
}

/// Binomial probabilities `C(k, l) p^l (1-p)^(k-l)` for `l = 0..=k`.
///
/// Endpoints `p = 0` and `p = 1` give the point masses exactly.
pub fn binomial_pmf(k: usize, p: f64) -> Vec<f64> {
    let mut out = vec![0.0; k + 1];
    if p <= 0.0 {
        out[0] = 1.0;
        return out;
    }
    if p >= 1.0 {
        out[k] = 1.0;
        return out;
    }
    let (lp, lq) = (libm::log(p), libm::log1p(-p));
    for (l, slot) in out.iter_mut().enumerate() {
        *slot = libm::exp(ln_binomial(k, l) + l as f64 * lp + (k - l) as f64 * lq);
    }
    out
}

/// Gauss–Legendre rule on `[-1, 1]`: nodes ascending, with their weights.
///
/// Nodes are Newton-polished roots of `P_n` from the Tricomi initial guess;
/// the rule integrates polynomials of degree `2n - 1` exactly.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // i-th largest root
            let theta = PI * (i as f64 + 0.75) / (nf + 0.5);
            let mut x = libm::cos(theta) * (1.0 - (nf - 1.0) / (8.0 * nf * nf * nf));
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                    let (_, d) = legendre_with_derivative(n, x);
                    dp = d;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[n - 1 - i] = x;
            weights[n - 1 - i] = w;
            nodes[i] = -x;
            weights[i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let nf = n as f64;
    let d = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn exact_binomial(n: u64, k: u64) -> u128 {
        let mut acc: u128 = 1;
        for i in 0..k as u128 {
            acc = acc * (n as u128 - i) / (i + 1);
        }
        acc
    }

    #[test]
    fn binomials_match_integer_arithmetic() {
        for n in 0..=120u64 {
            for k in 0..=n {
                let exact = exact_binomial(n, k) as f64;
                assert_relative_eq!(
                    binomial(n as usize, k as usize),
                    exact,
                    max_relative = 1e-12
                );
            }
        }
    }

    #[test]
    fn central_binomial_survives_overflow_range() {
        let l = ln_binomial(2000, 1000);
        assert!(l.is_finite());
        // Stirling: ln C(2n,n) ~ 2n ln 2 - ln(pi n)/2
        let stirling = 2000.0 * core::f64::consts::LN_2 - 0.5 * libm::log(PI * 1000.0);
        assert!((l - stirling).abs() < 1e-3);
    }

    #[test]
    fn pmf_sums_to_one() {
        for &p in &[0.0, 0.2, 0.5, 0.93, 1.0] {
            let s: f64 = binomial_pmf(700, p).iter().sum();
            assert_relative_eq!(s, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn gauss_legendre_small_rules() {
        let r = GaussLegendre::new(2);
        assert_relative_eq!(r.nodes[1], 1.0 / libm::sqrt(3.0), epsilon = 1e-15);
        assert_relative_eq!(r.weights[0], 1.0, epsilon = 1e-15);
        let r = GaussLegendre::new(3);
        assert_relative_eq!(r.nodes[2], libm::sqrt(0.6), epsilon = 1e-15);
        assert_relative_eq!(r.weights[1], 8.0 / 9.0, epsilon = 1e-15);
    }

    #[test]
    fn gauss_legendre_polynomial_exactness() {
        for &n in &[5usize, 40, 257, 1000] {
            let r = GaussLegendre::new(n);
            assert_relative_eq!(r.weights.iter().sum::<f64>(), 2.0, epsilon = 1e-12);
            let d = 2 * n - 2;
            let got = r.integrate(|x| libm::pow(x, d as f64));
            assert_relative_eq!(got, 2.0 / (d as f64 + 1.0), max_relative = 1e-11);
            assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn gauss_legendre_smooth_integrand() {
        let r = GaussLegendre::new(60);
        let got = r.integrate(|x| libm::exp(-30.0 * x * x));
        let exact = libm::sqrt(PI / 30.0) * libm::erf(libm::sqrt(30.0));
        assert_relative_eq!(got, exact, max_relative = 1e-13);
    }
}

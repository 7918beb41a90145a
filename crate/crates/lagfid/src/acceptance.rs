//! The acceptance suite: nineteen checks, each reduced to one measured number
//! compared with a pinned tolerance.
//!
//! Criteria 1 to 10 are exact identities evaluated at roundoff tolerances.
//! Criteria 11 to 19 compare finite-`k` numerics with semiclassical limits;
//! their tolerances are calibrations and are listed in the README together
//! with the values measured here.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, PI};
use std::time::Instant;

use lagfid_core::asymptotics::{
    sin_det_identity, standard_complex_structure, standard_symplectic_form, symplectic_det_identity,
};
use lagfid_core::metrics::{trace_product, MetricReport};
use lagfid_core::random;
use lagfid_core::sphere::{
    equator_state, meridian_state, required_curve_nodes, rotated_circle_state, state_from_curve,
    CurveWithDensity, Level,
};
use lagfid_core::toeplitz::{
    domination_check, gaussian_symbol, toeplitz_general, toeplitz_radial, trace_norm_sqrt_product,
    GaussianSymbolParams, SphereSymbol,
};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{AlphaSpec, Command, ExperimentConfig, Profile};
use crate::experiments::{self, central_binomial_ratio, Outcome};
use crate::pair::CirclePair;
use crate::table::Table;

#[derive(Debug, Clone, PartialEq)]
pub struct Criterion {
    pub id: u8,
    pub title: &'static str,
    /// The quantity compared with `tolerance`.
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
    /// Why the pinned tolerance cannot be met at the pinned parameters.
    pub known_deviation: Option<&'static str>,
}

impl Criterion {
    pub fn line(&self) -> String {
        let mut s = format!(
            "{} criterion {:>2}: {} | measured {:.6e}, tolerance {:.1e} | {} [{:.1} s]",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.measured,
            self.tolerance,
            self.detail,
            self.seconds
        );
        if let (false, Some(why)) = (self.passed, self.known_deviation) {
            s.push_str(&format!("\n     known deviation: {why}"));
        }
        s
    }

    /// Failed without a documented reason.
    pub fn unexpected_failure(&self) -> bool {
        !self.passed && self.known_deviation.is_none()
    }
}

/// `measured <= tolerance` passes.
fn at_most(
    id: u8,
    title: &'static str,
    measured: f64,
    tolerance: f64,
    detail: String,
) -> Criterion {
    Criterion {
        id,
        title,
        measured,
        tolerance,
        passed: measured <= tolerance,
        detail,
        seconds: 0.0,
        known_deviation: None,
    }
}

fn level(k: usize) -> Level {
    Level::new(k).expect("k is positive")
}

fn exact_binomial(n: u32, r: u32) -> u128 {
    let r = r.min(n - r);
    (0..r).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Unit traces of the equator and meridian states, and the integer identity
/// `sum_m C(2m,m) C(2(k-m),k-m) = 4^k` behind the meridian trace.
pub fn criterion_1() -> Criterion {
    let mut worst: f64 = 0.0;
    let mut identity_holds = true;
    for k in 1..=60u32 {
        let lv = level(k as usize);
        worst = worst.max((equator_state(lv).trace() - 1.0).abs());
        worst = worst.max((meridian_state(lv).trace() - 1.0).abs());
        let sum: u128 = (0..=k)
            .map(|m| exact_binomial(2 * m, m) * exact_binomial(2 * (k - m), k - m))
            .sum();
        identity_holds &= sum == 1u128 << (2 * k);
    }
    let mut c = at_most(
        1,
        "unit traces, k <= 60",
        worst,
        1e-12,
        format!("integer identity exact: {identity_holds}"),
    );
    c.passed &= identity_holds;
    c
}

pub fn criterion_2() -> Criterion {
    let worst = (1..=60u32)
        .map(|k| {
            let p = lagfid_core::metrics::purity(&equator_state(level(k as usize)));
            let exact = exact_binomial(2 * k, k) as f64 / 4f64.powi(k as i32);
            (p - exact).abs() / exact
        })
        .fold(0.0, f64::max);
    let alt = (1..=60)
        .map(|k| {
            (central_binomial_ratio(k) * 4f64.powi(k as i32)
                / exact_binomial(2 * k as u32, k as u32) as f64
                - 1.0)
                .abs()
        })
        .fold(0.0, f64::max);
    at_most(
        2,
        "purity = 4^-k C(2k,k), k <= 60 (relative)",
        worst,
        1e-12,
        format!("product form agrees to {alt:.1e}"),
    )
}

pub fn criterion_3() -> Criterion {
    let worst = (1..=40usize)
        .into_par_iter()
        .map(|k| {
            let lv = level(k);
            let curve =
                CurveWithDensity::circle(1.0, required_curve_nodes(lv)).expect("valid circle");
            let rho = state_from_curve(lv, &curve).expect("enough nodes");
            rho.max_abs_diff(&equator_state(lv))
        })
        .reduce(|| 0.0, f64::max);
    at_most(
        3,
        "curve quadrature of the unit circle = equator state, k <= 40",
        worst,
        1e-8,
        "entrywise".into(),
    )
}

pub fn criterion_4() -> Criterion {
    let worst = (1..=40usize)
        .into_par_iter()
        .map(|k| {
            let lv = level(k);
            rotated_circle_state(lv, FRAC_PI_2).max_abs_diff(&meridian_state(lv))
        })
        .reduce(|| 0.0, f64::max);
    at_most(
        4,
        "equator rotated by pi/2 = meridian closed form, k <= 40",
        worst,
        1e-8,
        "entrywise".into(),
    )
}

pub fn criterion_5() -> Criterion {
    let mut config = ExperimentConfig::with_defaults(Command::EgorovCheck, Profile::Full);
    config.k_min = 1;
    config.k_max = 40;
    config.k_step = 1;
    config.alpha = AlphaSpec::List(vec![FRAC_PI_6, FRAC_PI_4, FRAC_PI_3, FRAC_PI_2]);
    config.c = vec![2.0, 10.0];
    let out = experiments::run(&config).expect("egorov experiment runs");
    let worst = out
        .table
        .column_f64("residual")
        .unwrap()
        .into_iter()
        .fold(0.0, f64::max);
    at_most(
        5,
        "U T_k(f) U^* = T_k(f o R_-alpha), Gaussian c in {2,10}, k <= 40",
        worst,
        1e-6,
        format!("{} operators, operator norm", out.table.rows.len()),
    )
}

pub fn criterion_6() -> Criterion {
    let tau_of = |k: usize| GaussianSymbolParams::new(level(k), 4.0, 0.0).unwrap();
    let worst = (1..=60usize)
        .into_par_iter()
        .map(|k| {
            let lv = level(k);
            let scale = (k + 1) as f64 / (2.0 * PI);
            let params = tau_of(k);
            let (lambda, tau) = (params.amplitude(), params.exponent());
            let cases: [(SphereSymbol, f64); 4] = [
                (SphereSymbol::radial(|_| 1.0), 2.0 * PI),
                (SphereSymbol::radial(|u| u * u), 2.0 * PI / 3.0),
                (
                    SphereSymbol::general(|x| x[0] * x[0] + x[1] * x[1]),
                    4.0 * PI / 3.0,
                ),
                (
                    gaussian_symbol(params),
                    PI * lambda * (PI / tau).sqrt() * libm::erf(tau.sqrt()),
                ),
            ];
            cases
                .iter()
                .map(|(symbol, integral)| {
                    let t = if symbol.is_radial() {
                        toeplitz_radial(lv, symbol)
                    } else {
                        toeplitz_general(lv, symbol)
                    }
                    .expect("toeplitz operator");
                    let want = scale * integral;
                    (t.trace() - want).abs() / want
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    at_most(
        6,
        "Tr T_k(f) = (k+1)/(2 pi) int f, four symbols, k <= 60 (relative)",
        worst,
        1e-8,
        "symbols 1, x3^2, x1^2+x2^2, Gaussian c = 4".into(),
    )
}

pub fn criterion_7() -> Criterion {
    let margin = (1..=200usize)
        .into_par_iter()
        .map(|k| {
            domination_check(level(k), 2.0)
                .expect("domination check")
                .margin
        })
        .reduce(|| f64::INFINITY, f64::min);
    let mut c = at_most(
        7,
        "rho_1 <= T_k(f_k^2) / sqrt(k+1), k <= 200",
        -margin,
        1e-12,
        format!("smallest margin {margin:.3e}; measured is -margin"),
    );
    c.passed = margin >= -1e-12;
    c
}

pub fn criterion_8() -> Criterion {
    let slack = 1e-9;
    let mut violations = 0usize;
    let mut worst: f64 = f64::NEG_INFINITY;
    let mut pairs = 0usize;
    for (i, &dim) in [2usize, 5, 10, 40].iter().enumerate() {
        let reports: Vec<MetricReport> = (0..200u64)
            .into_par_iter()
            .map(|j| {
                let mut rng = ChaCha8Rng::seed_from_u64(1000 * i as u64 + j);
                let rank_a = 1 + (rng.next_u32() as usize) % dim;
                let rank_b = 1 + (rng.next_u32() as usize) % dim;
                let a = random::density(&mut rng, dim, rank_a);
                let b = random::density(&mut rng, dim, rank_b);
                MetricReport::compute(&a, &b).expect("metrics of random states")
            })
            .collect();
        for r in reports {
            pairs += 1;
            worst = worst
                .max(r.sub_fidelity - r.fidelity)
                .max(r.fidelity - r.super_fidelity);
            violations += usize::from(!r.is_sandwiched(slack));
        }
    }
    let alphas = [FRAC_PI_6, FRAC_PI_4, FRAC_PI_3, FRAC_PI_2];
    let sphere: Vec<(f64, bool)> = (1..=60usize)
        .into_par_iter()
        .flat_map_iter(|k| {
            let pair = CirclePair::new(k).expect("pair");
            alphas
                .iter()
                .map(|&a| {
                    let m = pair.metrics(a, true).expect("metrics");
                    let f = m.fidelity.unwrap();
                    let excess = (m.sub_fidelity - f).max(f - m.super_fidelity);
                    (excess, excess <= slack)
                })
                .collect::<Vec<_>>()
        })
        .collect();
    for (excess, ok) in sphere {
        pairs += 1;
        worst = worst.max(excess);
        violations += usize::from(!ok);
    }
    let mut c = at_most(
        8,
        "E <= F <= G on random and sphere pairs",
        worst,
        slack,
        format!("{violations} violations in {pairs} pairs; measured is the largest excess"),
    );
    c.passed = violations == 0;
    c
}

pub fn criterion_9() -> Criterion {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    let mut sin_pairs = 0;
    while sin_pairs < 100 {
        let ambient = 2 + (rng.next_u32() as usize) % 7;
        let p = 1 + (rng.next_u32() as usize) % ambient;
        let metric = random::spd(&mut rng, ambient);
        let basis = |rng: &mut ChaCha8Rng| {
            (0..p)
                .map(|_| random::real_matrix(rng, ambient, 1).column(0).into_owned())
                .collect::<Vec<_>>()
        };
        let e = basis(&mut rng);
        let f = basis(&mut rng);
        if let Ok(id) = sin_det_identity(&e, &f, &metric, &mut rng) {
            worst = worst
                .max((id.lhs - id.rhs).abs())
                .max((id.rebased_lhs - id.lhs).abs());
            sin_pairs += 1;
        }
    }
    let mut symplectic_pairs = 0;
    while symplectic_pairs < 100 {
        let n = 1 + (rng.next_u32() as usize) % 4;
        let omega = standard_symplectic_form(n);
        let j = standard_complex_structure(n);
        let e = random::lagrangian_basis(&mut rng, n);
        let f = random::lagrangian_basis(&mut rng, n);
        if let Ok(id) = symplectic_det_identity(&e, &f, &omega, &j) {
            worst = worst.max((id.lhs - id.rhs).abs());
            symplectic_pairs += 1;
        }
    }
    at_most(
        9,
        "det(I - G^T G) = prod sin^2 and det(I + Xi^T Xi) = prod (1 + sin^2)",
        worst,
        1e-10,
        format!("{sin_pairs} + {symplectic_pairs} subspace pairs, ambient dimension <= 8"),
    )
}

pub fn criterion_10() -> Criterion {
    let mut config = ExperimentConfig::with_defaults(Command::FidBtoCompare, Profile::Full);
    config.k_min = 1;
    config.k_max = 60;
    config.alpha = AlphaSpec::List(vec![FRAC_PI_2, FRAC_PI_4]);
    config.c = vec![2.0, 10.0, 50.0];
    let out = experiments::run(&config).expect("comparison runs");
    let f = out.table.column_f64("fidelity").unwrap();
    let b = out.table.column_f64("bound").unwrap();
    let worst = f
        .iter()
        .zip(&b)
        .map(|(f, b)| f - b)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut c = at_most(
        10,
        "F(rho_1, rho_2^alpha) <= F(T_k(f), T_k(f o R)) / (k+1), c in {2,10,50}, k <= 60",
        worst,
        1e-9,
        format!("{} rows; measured is the largest F - bound", f.len()),
    );
    c.passed = worst <= 1e-9;
    c
}

fn single_point(command: Command, k: usize, alpha: f64) -> Outcome {
    let mut config = ExperimentConfig::with_defaults(command, Profile::Fast);
    config.k_min = k;
    config.k_max = k;
    config.alpha = AlphaSpec::Single(alpha);
    experiments::run(&config).expect("single-point experiment runs")
}

fn first(out: &Outcome, column: &str) -> f64 {
    out.table.column_f64(column).unwrap()[0]
}

pub fn criterion_11() -> Criterion {
    let out = single_point(Command::TraceOrtho, 50, FRAC_PI_2);
    let (v, p) = (first(&out, "k_trace"), first(&out, "predictor"));
    at_most(
        11,
        "k Tr(rho_1 rho_2) -> 2/pi at k = 50 (relative)",
        (v - p).abs() / p,
        0.05,
        format!("k Tr = {v:.6}, limit {p:.6}"),
    )
}

pub fn criterion_12() -> Criterion {
    let out = single_point(Command::TraceAngle, 100, FRAC_PI_4);
    let (v, p) = (first(&out, "k_trace"), first(&out, "predictor"));
    at_most(
        12,
        "k Tr(rho_1 rho_2^{pi/4}) -> 2 sqrt2/pi at k = 100 (relative)",
        (v - p).abs() / p,
        0.05,
        format!("k Tr = {v:.6}, limit {p:.6}"),
    )
}

pub fn criterion_13() -> Criterion {
    let out = single_point(Command::SubfidOrtho, 50, FRAC_PI_2);
    let (v, p) = (first(&out, "k_sub_fidelity"), first(&out, "predictor"));
    at_most(
        13,
        "k E(rho_1, rho_2) -> 1.3604912 at k = 50 (relative)",
        (v - p).abs() / p,
        0.05,
        format!("k E = {v:.6}, limit {p:.7}"),
    )
}

pub fn criterion_14() -> Criterion {
    let out = single_point(Command::PurityCheck, 100, FRAC_PI_2);
    let v = first(&out, "sqrt_pi_k_purity");
    at_most(
        14,
        "sqrt(pi k) Tr(rho_1^2) -> 1 at k = 100",
        (v - 1.0).abs(),
        0.02,
        format!("value {v:.6}"),
    )
}

/// Next-order form of `sqrt(pi k) (1 - G)` at `alpha = pi/2`.
///
/// With equal purities `1 - G = Tr(rho_1^2) - Tr(rho_1 rho_2)`, so
/// `sqrt(pi k) (1 - G) = 1 - 2 / sqrt(pi k) + O(1/k)`.
pub fn super_fidelity_next_order(k: usize) -> f64 {
    1.0 - 2.0 / (PI * k as f64).sqrt()
}

pub const CRITERION_15_DEVIATION: &str =
    "1 - G = Tr(rho_1^2) - Tr(rho_1 rho_2) exactly, and the second term \
     contributes -2/sqrt(pi k) = -11.3% at k = 100; the 5% band is first reached near k = 520";

pub fn criterion_15() -> Criterion {
    let k = 100;
    let out = single_point(Command::PurityCheck, k, FRAC_PI_2);
    let v = first(&out, "sqrt_pi_k_one_minus_super");
    let next = super_fidelity_next_order(k);
    let mut c = at_most(
        15,
        "sqrt(pi k) (1 - G(rho_1, rho_2)) -> 1 at k = 100",
        (v - 1.0).abs(),
        0.05,
        format!(
            "value {v:.6}; next-order form 1 - 2/sqrt(pi k) = {next:.6}, off by {:.2e}",
            (v - next).abs()
        ),
    );
    c.known_deviation = Some(CRITERION_15_DEVIATION);
    c
}

pub fn criterion_16(profile: Profile) -> Criterion {
    let mut config = ExperimentConfig::with_defaults(Command::SubfidAlphaSweep, profile);
    config.alpha = AlphaSpec::Grid {
        start: experiments::SWEEP_CHECK_MIN_ALPHA,
        end: FRAC_PI_2,
        count: if profile == Profile::Full { 40 } else { 20 },
    };
    let out = experiments::run(&config).expect("sweep runs");
    let errors = out.table.column_f64("relative_error").unwrap();
    let alphas = out.table.column_f64("alpha").unwrap();
    let (worst, at) =
        errors.iter().zip(&alphas).fold(
            (0.0, 0.0),
            |(w, a), (&e, &x)| if e > w { (e, x) } else { (w, a) },
        );
    at_most(
        16,
        "k E against its limit over alpha in [0.3, pi/2] (relative)",
        worst,
        0.10,
        format!(
            "k = {}, {} angles, worst at alpha = {at:.4}",
            config.k_min,
            errors.len()
        ),
    )
}

pub fn criterion_17() -> Criterion {
    let est = trace_norm_sqrt_product(level(400), FRAC_PI_2, 4.0, 0.25).expect("trace norm");
    at_most(
        17,
        "trace norm / stationary-phase predictor at (delta, c, alpha, k) = (0.25, 4, pi/2, 400)",
        (est.ratio() - 1.0).abs(),
        0.10,
        format!(
            "numeric {:.6}, predictor {:.6}, ratio {:.6}",
            est.numeric,
            est.predictor,
            est.ratio()
        ),
    )
}

pub fn criterion_18() -> Criterion {
    let delta: f64 = 0.15;
    let worst = (50..=200usize)
        .into_par_iter()
        .map(|k| {
            let f = CirclePair::new(k)
                .and_then(|p| p.fidelity(FRAC_PI_2))
                .expect("fidelity");
            let kf = k as f64 * f;
            kf / (16.0 / PI * (k as f64).powf(3.0 * delta))
        })
        .reduce(|| 0.0, f64::max);
    at_most(
        18,
        "max over 50 <= k <= 200 of k F / (16 k^(3 delta) / pi), delta = 0.15",
        worst,
        1.0,
        "alpha = pi/2".into(),
    )
}

/// Least-squares slope of `y` against `x`.
pub fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

pub fn criterion_19() -> Criterion {
    let ks: Vec<usize> = (10..=40).collect();
    let logs: Vec<f64> = ks
        .par_iter()
        .map(|&k| {
            let lv = level(k);
            let curve =
                CurveWithDensity::circle(2.0, required_curve_nodes(lv)).expect("valid circle");
            let latitude = state_from_curve(lv, &curve).expect("enough nodes");
            trace_product(&latitude, &equator_state(lv))
                .expect("same level")
                .ln()
        })
        .collect();
    let x: Vec<f64> = ks.iter().map(|&k| k as f64).collect();
    let s = slope(&x, &logs);
    let monotone = logs.windows(2).all(|w| w[1] < w[0]);
    let mut c = at_most(
        19,
        "log Tr(rho_lat rho_eq) slope over 10 <= k <= 40, latitude |z| = 2",
        s,
        -0.05,
        format!("strictly decreasing: {monotone}"),
    );
    c.passed &= monotone;
    c
}

/// Runs all criteria in order; the angle sweep uses `profile`.
pub fn run_all(profile: Profile) -> Vec<Criterion> {
    let jobs: Vec<Box<dyn Fn() -> Criterion>> = vec![
        Box::new(criterion_1),
        Box::new(criterion_2),
        Box::new(criterion_3),
        Box::new(criterion_4),
        Box::new(criterion_5),
        Box::new(criterion_6),
        Box::new(criterion_7),
        Box::new(criterion_8),
        Box::new(criterion_9),
        Box::new(criterion_10),
        Box::new(criterion_11),
        Box::new(criterion_12),
        Box::new(criterion_13),
        Box::new(criterion_14),
        Box::new(criterion_15),
        Box::new(move || criterion_16(profile)),
        Box::new(criterion_17),
        Box::new(criterion_18),
        Box::new(criterion_19),
    ];
    jobs.iter()
        .map(|job| {
            let start = Instant::now();
            let mut c = job();
            c.seconds = start.elapsed().as_secs_f64();
            c
        })
        .collect()
}

/// Tabulates criteria as an experiment outcome.
pub fn outcome(criteria: &[Criterion]) -> Outcome {
    let mut table = Table::new(vec![
        "id",
        "criterion",
        "measured",
        "tolerance",
        "passed",
        "known_deviation",
    ]);
    for c in criteria {
        table.push(vec![
            (c.id as usize).into(),
            c.title.into(),
            c.measured.into(),
            c.tolerance.into(),
            c.passed.into(),
            c.known_deviation.is_some().into(),
        ]);
    }
    let checks = criteria
        .iter()
        .map(|c| experiments::Check {
            name: format!("criterion {}: {}", c.id, c.title),
            passed: c.passed,
            detail: c.detail.clone(),
            known_deviation: c.known_deviation.map(str::to_string),
        })
        .collect();
    Outcome {
        table,
        checks,
        notes: Vec::new(),
    }
}

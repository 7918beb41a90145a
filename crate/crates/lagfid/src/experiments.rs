//! One function per command. Each produces a [`Table`] with one row per grid
//! point and, where a tolerance is pinned, a list of [`Check`]s.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use lagfid_core::asymptotics::{
    predicted_fidelity_bound, predicted_purity, predicted_subfidelity, predicted_superfidelity,
    predicted_trace, sphere_intersection_data, sphere_subfidelity_constant, SPHERE_F_INTEGRAL,
};
use lagfid_core::hermitian::HermitianOperator;
use lagfid_core::metrics::{fidelity_diagonal_conjugated, sub_fidelity, trace_product};
use lagfid_core::sphere::Level;
use lagfid_core::toeplitz::{
    gaussian_symbol, toeplitz_general, toeplitz_radial, trace_norm_sqrt_product,
    GaussianSymbolParams, SphereSymbol,
};
use rayon::prelude::*;

use crate::config::{Command, ExperimentConfig};
use crate::error::Result;
use crate::fit::fit_inverse_sin_sq;
use crate::pair::CirclePair;
use crate::table::{Table, Value};

/// A pass/fail comparison against a pinned tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    /// Documented reason a failure is expected at these parameters.
    pub known_deviation: Option<String>,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
            known_deviation: None,
        }
    }

    pub fn unexpected_failure(&self) -> bool {
        !self.passed && self.known_deviation.is_none()
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub table: Table,
    pub checks: Vec<Check>,
    /// Diagnostics without a pass/fail verdict.
    pub notes: Vec<String>,
}

impl Outcome {
    fn new(table: Table) -> Self {
        Outcome {
            table,
            checks: Vec::new(),
            notes: Vec::new(),
        }
    }

    /// No check failed without a documented deviation.
    pub fn all_passed(&self) -> bool {
        !self.checks.iter().any(Check::unexpected_failure)
    }
}

/// Runs one experiment. The acceptance command is handled by
/// [`crate::acceptance`], not here.
pub fn run(config: &ExperimentConfig) -> Result<Outcome> {
    config.validate()?;
    match config.command {
        Command::TraceOrtho | Command::TraceAngle => trace(config),
        Command::SubfidOrtho | Command::SubfidAngle => subfidelity(config),
        Command::SubfidAlphaSweep => subfidelity_sweep(config),
        Command::FidBtoCompare => toeplitz_comparison(config),
        Command::FidAlphaSweep => fidelity_sweep(config),
        Command::FidVsSubfid => fidelity_vs_subfidelity(config),
        Command::PurityCheck => purity(config),
        Command::EgorovCheck => egorov(config),
        Command::BoundChain => bound_chain(config),
        Command::TraceNormCheck => trace_norm(config),
        Command::Acceptance => Ok(crate::acceptance::outcome(&crate::acceptance::run_all(
            config.profile,
        ))),
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12
}

fn relative_error(value: f64, target: f64) -> f64 {
    (value - target).abs() / target.abs()
}

/// Evaluates `row` on every `(k, alpha)` pair, in parallel, returning rows
/// in grid order. The per-`k` setup is shared by all angles.
fn per_k_alpha<F>(config: &ExperimentConfig, row: F) -> Result<Vec<Vec<Value>>>
where
    F: Fn(&CirclePair, usize, f64) -> Result<Vec<Vec<Value>>> + Sync,
{
    let alphas = config.alpha_values();
    let blocks: Vec<Result<Vec<Vec<Value>>>> = config
        .k_values()
        .into_par_iter()
        .map(|k| {
            let pair = CirclePair::new(k)?;
            let per_alpha: Vec<Result<Vec<Vec<Value>>>> =
                alphas.par_iter().map(|&a| row(&pair, k, a)).collect();
            let mut rows = Vec::new();
            for r in per_alpha {
                rows.extend(r?);
            }
            Ok(rows)
        })
        .collect();
    let mut rows = Vec::new();
    for b in blocks {
        rows.extend(b?);
    }
    Ok(rows)
}

fn fill(table: &mut Table, rows: Vec<Vec<Value>>) {
    for r in rows {
        table.push(r);
    }
}

fn value(table: &Table, row: usize, column: &str) -> f64 {
    let i = table.column_index(column).expect("column exists");
    table.rows[row][i].as_f64().expect("numeric column")
}

fn rows_where<'a>(
    table: &'a Table,
    pred: impl Fn(&dyn Fn(&str) -> f64) -> bool + 'a,
) -> Vec<usize> {
    (0..table.rows.len())
        .filter(|&r| pred(&|c| value(table, r, c)))
        .collect()
}

fn trace(config: &ExperimentConfig) -> Result<Outcome> {
    let mut table = Table::new(vec!["k", "alpha", "trace", "k_trace", "predictor"]);
    let rows = per_k_alpha(config, |pair, k, a| {
        let t = trace_product(pair.equator(), &pair.rotated(a)?)?;
        let predictor = k as f64 * predicted_trace(&sphere_intersection_data(a)?, k);
        Ok(vec![vec![
            k.into(),
            a.into(),
            t.into(),
            (k as f64 * t).into(),
            predictor.into(),
        ]])
    })?;
    fill(&mut table, rows);
    let mut out = Outcome::new(table);
    for (alpha, k, label) in [
        (FRAC_PI_2, 50.0, "k Tr at alpha = pi/2, k = 50"),
        (FRAC_PI_4, 100.0, "k Tr at alpha = pi/4, k = 100"),
    ] {
        for r in rows_where(&out.table, |v| close(v("alpha"), alpha) && v("k") == k) {
            let err = relative_error(
                value(&out.table, r, "k_trace"),
                value(&out.table, r, "predictor"),
            );
            out.checks.push(Check::new(
                label,
                err <= 0.05,
                format!("relative error {err:.4e} (tolerance 5e-2)"),
            ));
        }
    }
    Ok(out)
}

fn subfidelity(config: &ExperimentConfig) -> Result<Outcome> {
    let mut table = Table::new(vec![
        "k",
        "alpha",
        "sub_fidelity",
        "leading_term",
        "k_sub_fidelity",
        "predictor",
    ]);
    let rows = per_k_alpha(config, |pair, k, a| {
        let e = sub_fidelity(pair.equator(), &pair.rotated(a)?)?;
        let leading = predicted_subfidelity(&sphere_intersection_data(a)?, k);
        Ok(vec![vec![
            k.into(),
            a.into(),
            e.into(),
            leading.into(),
            (k as f64 * e).into(),
            sphere_subfidelity_constant(a).into(),
        ]])
    })?;
    fill(&mut table, rows);
    let mut out = Outcome::new(table);
    for r in rows_where(&out.table, |v| {
        close(v("alpha"), FRAC_PI_2) && v("k") == 50.0
    }) {
        let err = relative_error(
            value(&out.table, r, "k_sub_fidelity"),
            value(&out.table, r, "predictor"),
        );
        out.checks.push(Check::new(
            "k E at alpha = pi/2, k = 50",
            err <= 0.05,
            format!("relative error {err:.4e} (tolerance 5e-2)"),
        ));
    }
    Ok(out)
}

/// Smallest `k` at which the angle sweep of `k E` is held to 10%.
pub const SWEEP_CHECK_MIN_K: usize = 200;
/// Smallest angle included in the sweep check.
pub const SWEEP_CHECK_MIN_ALPHA: f64 = 0.3;

fn subfidelity_sweep(config: &ExperimentConfig) -> Result<Outcome> {
    let mut table = Table::new(vec![
        "k",
        "alpha",
        "sub_fidelity",
        "k_sub_fidelity",
        "predictor",
        "relative_error",
    ]);
    let rows = per_k_alpha(config, |pair, k, a| {
        let e = sub_fidelity(pair.equator(), &pair.rotated(a)?)?;
        let ke = k as f64 * e;
        let predictor = sphere_subfidelity_constant(a);
        Ok(vec![vec![
            k.into(),
            a.into(),
            e.into(),
            ke.into(),
            predictor.into(),
            relative_error(ke, predictor).into(),
        ]])
    })?;
    fill(&mut table, rows);
    let mut out = Outcome::new(table);
    let selected = rows_where(&out.table, |v| {
        v("k") >= SWEEP_CHECK_MIN_K as f64 && v("alpha") >= SWEEP_CHECK_MIN_ALPHA - 1e-12
    });
    if !selected.is_empty() {
        let worst = selected
            .iter()
            .map(|&r| value(&out.table, r, "relative_error"))
            .fold(0.0, f64::max);
        out.checks.push(Check::new(
            format!("k E against its limit for alpha >= {SWEEP_CHECK_MIN_ALPHA}, k >= {SWEEP_CHECK_MIN_K}"),
            worst <= 0.10,
            format!("worst relative error {worst:.4e} over {} rows (tolerance 1e-1)", selected.len()),
        ));
    }
    Ok(out)
}

/// `T_k(f_k^c)` with the configured quadrature overrides.
fn gaussian_symbol_for(
    config: &ExperimentConfig,
    level: Level,
    c: f64,
    delta: f64,
) -> Result<SphereSymbol> {
    let mut symbol = gaussian_symbol(GaussianSymbolParams::new(level, c, delta)?);
    if let Some(n) = config.quad_radial {
        symbol = symbol.with_radial_nodes(n);
    }
    if let Some(n) = config.quad_azimuth {
        symbol = symbol.with_azimuth_nodes(n);
    }
    Ok(symbol)
}

fn gaussian_diagonal(config: &ExperimentConfig, level: Level, c: f64) -> Result<Vec<f64>> {
    Ok(toeplitz_radial(level, &gaussian_symbol_for(config, level, c, 0.0)?)?.diagonal())
}

const BOUND_SLACK: f64 = 1e-9;

fn toeplitz_comparison(config: &ExperimentConfig) -> Result<Outcome> {
    let mut table = Table::new(vec![
        "k",
        "alpha",
        "c",
        "fidelity",
        "k_fidelity",
        "predictor",
        "bound",
        "bound_holds",
    ]);
    let cs = config.c.clone();
    let rows = per_k_alpha(config, |pair, k, a| {
        let level = pair.level();
        let u = pair.family().operator(a);
        let f = fidelity_diagonal_conjugated(pair.weights(), &u, pair.weights())?;
        let mut rows = Vec::new();
        for &c in &cs {
            let diag = gaussian_diagonal(config, level, c)?;
            let ft = fidelity_diagonal_conjugated(&diag, &u, &diag)?;
            let bound = ft / level.dim() as f64;
            rows.push(vec![
                k.into(),
                a.into(),
                c.into(),
                f.into(),
                (k as f64 * f).into(),
                ft.into(),
                bound.into(),
                (f <= bound + BOUND_SLACK).into(),
            ]);
        }
        Ok(rows)
    })?;
    fill(&mut table, rows);
    let mut out = Outcome::new(table);
    let claimed = rows_where(&out.table, |v| v("c") >= 2.0);
    if !claimed.is_empty() {
        let violations = claimed
            .iter()
            .filter(|&&r| {
                value(&out.table, r, "fidelity") > value(&out.table, r, "bound") + BOUND_SLACK
            })
            .count();
        out.checks.push(Check::new(
            "F(rho_1, rho_2) <= F(T_k(f), T_k(f o R)) / (k+1) for c >= 2",
            violations == 0,
            format!(
                "{violations} violations in {} rows (slack 1e-9)",
                claimed.len()
            ),
        ));
    }
    Ok(out)
}

fn fidelity_sweep(config: &ExperimentConfig) -> Result<Outcome> {
    let raw = per_k_alpha(config, |pair, k, a| {
        let f = pair.fidelity(a)?;
        Ok(vec![vec![
            k.into(),
            a.into(),
            f.into(),
            (k as f64 * f).into(),
        ]])
    })?;
    let mut table = Table::new(vec![
        "k",
        "alpha",
        "fidelity",
        "k_fidelity",
        "fit_c",
        "predictor",
        "residual",
    ]);
    let mut notes = Vec::new();
    for k in config.k_values() {
        let block: Vec<&Vec<Value>> = raw.iter().filter(|r| r[0] == Value::from(k)).collect();
        let pairs: Vec<(f64, f64)> = block
            .iter()
            .map(|r| (r[1].as_f64().unwrap(), r[3].as_f64().unwrap()))
            .collect();
        let fit = fit_inverse_sin_sq(&pairs)?;
        for (r, residual) in block.iter().zip(&fit.residuals) {
            let a = r[1].as_f64().unwrap();
            let mut row = (*r).clone();
            row.push(fit.c.into());
            row.push((fit.c / (a.sin() * a.sin())).into());
            row.push((*residual).into());
            table.push(row);
        }
        notes.push(format!(
            "k = {k}: C = k F at pi/2 = {:.6}, k F sin^2(alpha) spans an interval of width {:.6}",
            fit.c,
            fit.band()
        ));
    }
    let mut out = Outcome::new(table);
    out.notes = notes;
    Ok(out)
}

const SANDWICH_SLACK: f64 = 1e-9;

fn fidelity_vs_subfidelity(config: &ExperimentConfig) -> Result<Outcome> {
    let mut table = Table::new(vec![
        "k",
        "alpha",
        "fidelity",
        "sub_fidelity",
        "super_fidelity",
        "k_fidelity",
        "k_sub_fidelity",
        "predictor",
        "sandwiched",
    ]);
    let rows = per_k_alpha(config, |pair, k, a| {
        let m = pair.metrics(a, true)?;
        let f = m.fidelity.expect("requested");
        let ok = m.sub_fidelity <= f + SANDWICH_SLACK && f <= m.super_fidelity + SANDWICH_SLACK;
        Ok(vec![vec![
            k.into(),
            a.into(),
            f.into(),
            m.sub_fidelity.into(),
            m.super_fidelity.into(),
            (k as f64 * f).into(),
            (k as f64 * m.sub_fidelity).into(),
            sphere_subfidelity_constant(a).into(),
            ok.into(),
        ]])
    })?;
    fill(&mut table, rows);
    let mut out = Outcome::new(table);
    let i = out.table.column_index("sandwiched").unwrap();
    let violations = out
        .table
        .rows
        .iter()
        .filter(|r| r[i] == Value::Bool(false))
        .count();
    out.checks.push(Check::new(
        "E <= F <= G",
        violations == 0,
        format!(
            "{violations} violations in {} rows (slack 1e-9)",
            out.table.rows.len()
        ),
    ));
    Ok(out)
}

/// `4^-k C(2k, k)` as the product `prod_j (2j - 1) / (2j)`.
pub fn central_binomial_ratio(k: usize) -> f64 {
    (1..=k).fold(1.0, |p, j| p * (2 * j - 1) as f64 / (2 * j) as f64)
}

fn purity(config: &ExperimentConfig) -> Result<Outcome> {
    let mut table = Table::new(vec![
        "k",
        "alpha",
        "purity",
        "exact_purity",
        "sqrt_pi_k_purity",
        "predictor",
        "super_fidelity",
        "sqrt_pi_k_one_minus_super",
        "super_predictor",
    ]);
    let rows = per_k_alpha(config, |pair, k, a| {
        let m = pair.metrics(a, false)?;
        let s = (PI * k as f64).sqrt();
        Ok(vec![vec![
            k.into(),
            a.into(),
            m.purity.into(),
            central_binomial_ratio(k).into(),
            (s * m.purity).into(),
            predicted_purity(1, SPHERE_F_INTEGRAL, k).into(),
            m.super_fidelity.into(),
            (s * (1.0 - m.super_fidelity)).into(),
            predicted_superfidelity(&sphere_intersection_data(a)?, k).into(),
        ]])
    })?;
    fill(&mut table, rows);
    let mut out = Outcome::new(table);
    let small = rows_where(&out.table, |v| v("k") <= 60.0);
    if !small.is_empty() {
        let worst = small
            .iter()
            .map(|&r| {
                relative_error(
                    value(&out.table, r, "purity"),
                    value(&out.table, r, "exact_purity"),
                )
            })
            .fold(0.0, f64::max);
        out.checks.push(Check::new(
            "Tr(rho^2) = 4^-k C(2k,k) for k <= 60",
            worst <= 1e-12,
            format!("worst relative error {worst:.3e} (tolerance 1e-12)"),
        ));
    }
    for r in rows_where(&out.table, |v| v("k") == 100.0) {
        let dev = (value(&out.table, r, "sqrt_pi_k_purity") - 1.0).abs();
        out.checks.push(Check::new(
            "sqrt(pi k) Tr(rho^2) at k = 100",
            dev <= 0.02,
            format!("|value - 1| = {dev:.4e} (tolerance 2e-2)"),
        ));
    }
    Ok(out)
}

const EGOROV_TOLERANCE: f64 = 1e-6;

fn egorov(config: &ExperimentConfig) -> Result<Outcome> {
    let mut table = Table::new(vec!["k", "alpha", "c", "residual", "predictor"]);
    let cs = config.c.clone();
    let alphas = config.alpha_values();
    let blocks: Vec<Result<Vec<Vec<Value>>>> = config
        .k_values()
        .into_par_iter()
        .map(|k| {
            let pair = CirclePair::new(k)?;
            let level = pair.level();
            let mut rows = Vec::new();
            for &a in &alphas {
                for &c in &cs {
                    let symbol = gaussian_symbol_for(config, level, c, 0.0)?;
                    let t = toeplitz_radial(level, &symbol)?;
                    let lhs = pair.family().conjugate(&t, a);
                    let rhs: HermitianOperator = toeplitz_general(level, &symbol.rotated(a))?;
                    let residual = lhs.sub(&rhs)?.op_norm();
                    rows.push(vec![
                        k.into(),
                        a.into(),
                        c.into(),
                        residual.into(),
                        0.0.into(),
                    ]);
                }
            }
            Ok(rows)
        })
        .collect();
    for b in blocks {
        fill(&mut table, b?);
    }
    let mut out = Outcome::new(table);
    let worst = out
        .table
        .column_f64("residual")
        .unwrap()
        .into_iter()
        .fold(0.0, f64::max);
    out.checks.push(Check::new(
        "||U T_k(f) U^* - T_k(f o R_{-alpha})||_op",
        worst <= EGOROV_TOLERANCE,
        format!("worst residual {worst:.3e} (tolerance 1e-6)"),
    ));
    Ok(out)
}

/// Largest `k` of the boundedness check on `k F` at `alpha = pi/2`.
pub const BOUNDEDNESS_K: (usize, usize) = (50, 200);

fn bound_chain(config: &ExperimentConfig) -> Result<Outcome> {
    let mut table = Table::new(vec![
        "k",
        "alpha",
        "c",
        "delta",
        "fidelity",
        "k_fidelity",
        "domination_margin",
        "toeplitz_bound",
        "predictor",
        "toeplitz_bound_holds",
        "predictor_holds",
    ]);
    let cs = config.c.clone();
    let delta = config.delta;
    let alphas = config.alpha_values();
    let blocks: Vec<Result<Vec<Vec<Value>>>> = config
        .k_values()
        .into_par_iter()
        .map(|k| {
            let pair = CirclePair::new(k)?;
            let level = pair.level();
            let scale = 1.0 / (level.dim() as f64).sqrt();
            let mut per_c = Vec::new();
            for &c in &cs {
                let diag = gaussian_diagonal(config, level, c)?;
                let margin = diag
                    .iter()
                    .zip(pair.weights())
                    .map(|(t, w)| t * scale - w)
                    .fold(f64::INFINITY, f64::min);
                per_c.push((c, diag, margin));
            }
            let mut rows = Vec::new();
            for &a in &alphas {
                let u = pair.family().operator(a);
                let f = fidelity_diagonal_conjugated(pair.weights(), &u, pair.weights())?;
                let theorem = predicted_fidelity_bound(k, a, delta)?;
                for (c, diag, margin) in &per_c {
                    let bound = fidelity_diagonal_conjugated(diag, &u, diag)? / level.dim() as f64;
                    rows.push(vec![
                        k.into(),
                        a.into(),
                        (*c).into(),
                        delta.into(),
                        f.into(),
                        (k as f64 * f).into(),
                        (*margin).into(),
                        bound.into(),
                        theorem.into(),
                        (f <= bound + BOUND_SLACK).into(),
                        (f <= theorem).into(),
                    ]);
                }
            }
            Ok(rows)
        })
        .collect();
    for b in blocks {
        fill(&mut table, b?);
    }
    let mut out = Outcome::new(table);
    let claimed = rows_where(&out.table, |v| v("c") >= 2.0);
    if !claimed.is_empty() {
        let worst = claimed
            .iter()
            .map(|&r| value(&out.table, r, "domination_margin"))
            .fold(f64::INFINITY, f64::min);
        out.checks.push(Check::new(
            "rho_1 <= T_k(f_k^c) / sqrt(k+1) for c >= 2",
            worst >= -1e-12,
            format!("smallest margin {worst:.3e} (tolerance -1e-12)"),
        ));
        let violations = claimed
            .iter()
            .filter(|&&r| {
                value(&out.table, r, "fidelity")
                    > value(&out.table, r, "toeplitz_bound") + BOUND_SLACK
            })
            .count();
        out.checks.push(Check::new(
            "F(rho_1, rho_2) <= F(T_k(f), T_k(f o R)) / (k+1) for c >= 2",
            violations == 0,
            format!(
                "{violations} violations in {} rows (slack 1e-9)",
                claimed.len()
            ),
        ));
    }
    let (lo, hi) = BOUNDEDNESS_K;
    let window = rows_where(&out.table, |v| {
        close(v("alpha"), FRAC_PI_2) && v("k") >= lo as f64 && v("k") <= hi as f64
    });
    if !window.is_empty() {
        let worst = window
            .iter()
            .map(|&r| value(&out.table, r, "fidelity") / value(&out.table, r, "predictor"))
            .fold(0.0, f64::max);
        out.checks.push(Check::new(
            format!("k F <= 16 k^(3 delta) / pi at alpha = pi/2, {lo} <= k <= {hi}"),
            worst <= 1.0,
            format!("largest F / bound {worst:.4e}"),
        ));
    }
    Ok(out)
}

fn trace_norm(config: &ExperimentConfig) -> Result<Outcome> {
    let mut table = Table::new(vec![
        "k",
        "alpha",
        "c",
        "delta",
        "numeric",
        "predictor",
        "ratio",
    ]);
    let mut grid = Vec::new();
    for k in config.k_values() {
        for a in config.alpha_values() {
            for &c in &config.c {
                grid.push((k, a, c));
            }
        }
    }
    let delta = config.delta;
    let rows: Vec<Result<Vec<Value>>> = grid
        .par_iter()
        .map(|&(k, a, c)| {
            let est = trace_norm_sqrt_product(Level::new(k)?, a, c, delta)?;
            Ok(vec![
                k.into(),
                a.into(),
                c.into(),
                delta.into(),
                est.numeric.into(),
                est.predictor.into(),
                est.ratio().into(),
            ])
        })
        .collect();
    for r in rows {
        table.push(r?);
    }
    let mut out = Outcome::new(table);
    for r in rows_where(&out.table, |v| {
        v("k") == 400.0 && close(v("alpha"), FRAC_PI_2) && v("c") == 4.0 && close(v("delta"), 0.25)
    }) {
        let dev = (value(&out.table, r, "ratio") - 1.0).abs();
        out.checks.push(Check::new(
            "trace norm / stationary-phase predictor at k = 400",
            dev <= 0.10,
            format!("|ratio - 1| = {dev:.4e} (tolerance 1e-1)"),
        ));
    }
    Ok(out)
}

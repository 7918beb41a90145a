//! The `C / sin^2 a` model of the rescaled fidelity.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct InverseSinSqFit {
    /// The value at `a = pi/2`.
    pub c: f64,
    /// `value(a) sin^2(a) - C`, one per input row.
    pub residuals: Vec<f64>,
}

impl InverseSinSqFit {
    /// Width of the interval spanned by `value(a) sin^2(a)` over all rows.
    pub fn band(&self) -> f64 {
        let lo = self.residuals.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self
            .residuals
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        (hi - lo).max(0.0)
    }
}

/// Reads `C` off the row at `a = pi/2` and scores every row against `C / sin^2 a`.
pub fn fit_inverse_sin_sq(rows: &[(f64, f64)]) -> Result<InverseSinSqFit> {
    let right = std::f64::consts::FRAC_PI_2;
    let c = rows
        .iter()
        .find(|(a, _)| (a - right).abs() <= 1e-12)
        .map(|&(_, v)| v)
        .ok_or(Error::MissingRightAngle)?;
    let residuals = rows
        .iter()
        .map(|&(a, v)| {
            let s = a.sin();
            v * s * s - c
        })
        .collect();
    Ok(InverseSinSqFit { c, residuals })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn grid() -> Vec<f64> {
        (0..=10)
            .map(|i| 0.2 + (FRAC_PI_2 - 0.2) * i as f64 / 10.0)
            .collect()
    }

    #[test]
    fn exact_model_has_zero_residuals() {
        let rows: Vec<_> = grid()
            .into_iter()
            .map(|a| (a, 3.0 / a.sin().powi(2)))
            .collect();
        let fit = fit_inverse_sin_sq(&rows).unwrap();
        assert!((fit.c - 3.0).abs() < 1e-15);
        assert!(fit.residuals.iter().all(|r| r.abs() < 1e-13));
        assert!(fit.band() < 1e-13);
    }

    #[test]
    fn constant_rows_expose_the_wrong_model() {
        let rows: Vec<_> = grid().into_iter().map(|a| (a, 5.0)).collect();
        let fit = fit_inverse_sin_sq(&rows).unwrap();
        assert_eq!(fit.c, 5.0);
        for (r, (a, _)) in fit.residuals.iter().zip(&rows) {
            assert!((r - 5.0 * (a.sin().powi(2) - 1.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn missing_right_angle() {
        assert!(matches!(
            fit_inverse_sin_sq(&[(0.5, 1.0), (1.0, 2.0)]),
            Err(Error::MissingRightAngle)
        ));
    }
}

//! Rate functions I_r(x) = sup_β (βx − F_r(β)).

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::free_energy::{DirectionalModel, Truncation};
use crate::transfer::check_bias;

/// Bracket half-width for the optimal β.
pub const BETA_MAX: f64 = 50.0;
/// Bisection steps; the bracket shrinks to 100·2⁻⁸⁰.
pub const BISECTION_STEPS: usize = 80;

/// A point of the rate function.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RatePoint {
    pub x: f64,
    /// I_r(x), possibly infinite.
    pub rate: f64,
    /// The β attaining the supremum, when finite.
    pub eta: Option<f64>,
    /// True when x lies beyond F′(±β_max) and η was capped at the bracket end.
    pub capped: bool,
}

/// I_r(x) by bisection on F′, which is increasing.
pub fn rate_function(model: &DirectionalModel, r: f64, x: f64, tol: f64) -> Result<RatePoint> {
    check_bias(r)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance {tol} must be positive")));
    }
    if !x.is_finite() || x.abs() >= 1.0 {
        return Ok(RatePoint {
            x,
            rate: f64::INFINITY,
            eta: None,
            capped: false,
        });
    }
    let trunc = Truncation::Tolerance((tol * 1e-3).max(1e-15));
    let slope = |b: f64| model.derivative(r, b, trunc);
    let free = |b: f64| -> Result<f64> {
        match model.evaluate(r, b, trunc) {
            Ok(f) => Ok(f.value),
            Err(Error::ToleranceTooTight { best_effort, .. }) => Ok(best_effort.value),
            Err(e) => Err(e),
        }
    };
    let (mut lo, mut hi) = (-BETA_MAX, BETA_MAX);
    let (slope_lo, slope_hi) = (slope(lo)?, slope(hi)?);
    if !slope_lo.is_finite() || !slope_hi.is_finite() || slope_lo > slope_hi {
        return Err(Error::BracketFailure {
            x,
            lo,
            hi,
            slope_lo,
            slope_hi,
        });
    }
    let chord = |eta: f64| -> Result<RatePoint> {
        Ok(RatePoint {
            x,
            rate: (eta * x - free(eta)?).max(0.0),
            eta: Some(eta),
            capped: true,
        })
    };
    if x <= slope_lo {
        return chord(lo);
    }
    if x >= slope_hi {
        return chord(hi);
    }
    let mut eta = 0.5 * (lo + hi);
    for _ in 0..BISECTION_STEPS {
        eta = 0.5 * (lo + hi);
        let s = slope(eta)?;
        if (s - x).abs() < tol * 1e-3 {
            break;
        }
        if s < x {
            lo = eta;
        } else {
            hi = eta;
        }
    }
    let rate = eta * x - free(eta)?;
    Ok(RatePoint {
        x,
        rate: rate.max(0.0),
        eta: Some(eta),
        capped: false,
    })
}

/// [`rate_function`] on every point of `x_grid`, in order.
pub fn rate_curve(
    model: &DirectionalModel,
    r: f64,
    x_grid: &[f64],
    tol: f64,
) -> Result<Vec<RatePoint>> {
    x_grid
        .par_iter()
        .map(|&x| rate_function(model, r, x, tol))
        .collect()
}

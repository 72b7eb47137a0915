//! Closed-form CMSE/MSE upper bounds for the finite Poisson model.
//!
//! Both bounds share the bracket
//! `d R^2/(d+2) + E[R_hat^2] - (2 d R/(d+1)) e^{-(d-1) E(R)/2} E[R_hat]`,
//! scaled by `1/n` (conditional) or `2/(lambda V_d(R))` (unconditional).

use serde::{Deserialize, Serialize};

use super::moments::MomentEstimates;
use crate::error::{Error, Result};
use crate::geometry::ball_volume;
use crate::num::{real, Real};

/// A bound value with the standard error propagated from the Monte Carlo
/// moment estimates (conservative: moment correlations are ignored).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundValue<T> {
    pub value: T,
    pub stderr: T,
}

fn bracket<T: Real>(
    d: usize,
    radius: T,
    e_at_radius: T,
    moments: &MomentEstimates<T>,
) -> Result<(T, T)> {
    if d < 2 {
        return Err(Error::UnsupportedDimension(d));
    }
    if !(radius > T::zero() && e_at_radius >= T::zero()) {
        return Err(Error::invalid("radius and AOA variance must be positive"));
    }
    let df = real::<T>(d as f64);
    let lead = df / (df + real::<T>(2.0)) * radius * radius;
    let cross_coef = real::<T>(2.0) * df * radius / (df + T::one())
        * (-(df - T::one()) / real::<T>(2.0) * e_at_radius).exp();
    let value = lead + moments.m2 - cross_coef * moments.m1;
    let stderr = (moments.stderr_m2 * moments.stderr_m2
        + cross_coef * cross_coef * moments.stderr_m1 * moments.stderr_m1)
        .sqrt();
    Ok((value, stderr))
}

/// Conditional-MSE upper bound for `n` sensors in the ball of radius
/// `radius`, with the AOA variance evaluated at the window radius.
pub fn cmse_bound<T: Real>(
    n: usize,
    d: usize,
    radius: T,
    e_at_radius: T,
    moments: &MomentEstimates<T>,
) -> Result<BoundValue<T>> {
    if n == 0 {
        return Err(Error::invalid(
            "conditional bound needs n >= 1 (CMSE(0) is 0 by convention)",
        ));
    }
    let (value, stderr) = bracket(d, radius, e_at_radius, moments)?;
    let nf = real::<T>(n as f64);
    Ok(BoundValue {
        value: value / nf,
        stderr: stderr / nf,
    })
}

/// Unconditional-MSE upper bound at sensor density `lambda`.
pub fn mse_bound<T: Real>(
    lambda: T,
    d: usize,
    radius: T,
    e_at_radius: T,
    moments: &MomentEstimates<T>,
) -> Result<BoundValue<T>> {
    if !(lambda.is_finite() && lambda > T::zero()) {
        return Err(Error::invalid("density must be positive"));
    }
    let (value, stderr) = bracket(d, radius, e_at_radius, moments)?;
    let prefactor = real::<T>(2.0) / (lambda * ball_volume(d, radius)?);
    Ok(BoundValue {
        value: prefactor * value,
        stderr: prefactor * stderr,
    })
}

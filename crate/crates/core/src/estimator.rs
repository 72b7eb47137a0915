//! The localization pipeline: log-linear RSS calibration, per-sensor distance
//! and position estimates, and their fusion into the target estimate.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{path_loss, sample_shadowing, ChannelParams, Observation};
use crate::error::{Error, Result};
use crate::geometry::CartesianPoint;
use crate::num::{as_f64, real, Real};
use crate::pointproc::sample_uniform_in_ball;

/// Least-squares fit of `ln P = alpha + gamma ln R` on calibration data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationFit<T> {
    pub alpha_hat: T,
    pub gamma_hat: T,
    pub n_cal: usize,
    pub residual_var: T,
}

impl<T: Real> CalibrationFit<T> {
    /// The population parameters `alpha = -beta ln K - sigma^2/beta`,
    /// `gamma = -beta`; handy as an idealized calibration.
    pub fn exact(params: &ChannelParams<T>) -> Self {
        CalibrationFit {
            alpha_hat: -params.beta * params.k.ln() - params.sigma * params.sigma / params.beta,
            gamma_hat: -params.beta,
            n_cal: 0,
            residual_var: params.sigma * params.sigma,
        }
    }
}

/// Draw `m` calibration pairs `(P, R_true)`: ranges from the radial density
/// `d r^{d-1} / R^d` on `(0, R]` (the in-ball deployment law), RSS from the
/// channel model.
pub fn generate_calibration_data<T: Real, R: Rng + ?Sized>(
    m: usize,
    radius: T,
    params: &ChannelParams<T>,
    d: usize,
    rng: &mut R,
) -> Result<Vec<(T, T)>> {
    if m < 2 {
        return Err(Error::invalid("calibration needs at least two samples"));
    }
    if d < 2 {
        return Err(Error::UnsupportedDimension(d));
    }
    let mut pairs = Vec::with_capacity(m);
    for _ in 0..m {
        let r_true = sample_uniform_in_ball::<T, R>(d, radius, rng).norm();
        let s = sample_shadowing(params.sigma, params.beta, rng);
        pairs.push((path_loss(r_true, params)? * s, r_true));
    }
    Ok(pairs)
}

/// Ordinary least squares of `ln P` on `ln R`.
pub fn calibrate<T: Real>(pairs: &[(T, T)]) -> Result<CalibrationFit<T>> {
    if pairs.len() < 2 {
        return Err(Error::invalid("calibration needs at least two samples"));
    }
    for &(p, r) in pairs {
        if !(p > T::zero() && r > T::zero() && p.is_finite() && r.is_finite()) {
            return Err(Error::invalid("calibration pairs must be positive"));
        }
    }
    let n = real::<T>(pairs.len() as f64);
    let xs: Vec<T> = pairs.iter().map(|&(_, r)| r.ln()).collect();
    let ys: Vec<T> = pairs.iter().map(|&(p, _)| p.ln()).collect();
    let mean_x = xs.iter().fold(T::zero(), |a, &b| a + b) / n;
    let mean_y = ys.iter().fold(T::zero(), |a, &b| a + b) / n;
    let sxx = xs
        .iter()
        .fold(T::zero(), |a, &x| a + (x - mean_x) * (x - mean_x));
    if !(sxx > T::zero()) {
        return Err(Error::SingularFit);
    }
    let sxy = xs
        .iter()
        .zip(&ys)
        .fold(T::zero(), |a, (&x, &y)| a + (x - mean_x) * (y - mean_y));
    let gamma_hat = sxy / sxx;
    if !(gamma_hat < T::zero()) {
        return Err(Error::CalibrationFailed {
            gamma_hat: as_f64(gamma_hat),
        });
    }
    let alpha_hat = mean_y - gamma_hat * mean_x;
    let residual_var = if pairs.len() > 2 {
        let sse = xs.iter().zip(&ys).fold(T::zero(), |a, (&x, &y)| {
            let e = y - alpha_hat - gamma_hat * x;
            a + e * e
        });
        sse / real::<T>((pairs.len() - 2) as f64)
    } else {
        T::zero()
    };
    Ok(CalibrationFit {
        alpha_hat,
        gamma_hat,
        n_cal: pairs.len(),
        residual_var,
    })
}

/// Distance estimate `exp((ln P - alpha_hat) / gamma_hat)`; non-increasing in
/// the RSS since `gamma_hat < 0`.
pub fn estimate_distance<T: Real>(rss: T, fit: &CalibrationFit<T>) -> Result<T> {
    if !(rss.is_finite() && rss > T::zero()) {
        return Err(Error::invalid("RSS must be positive"));
    }
    Ok(((rss.ln() - fit.alpha_hat) / fit.gamma_hat).exp())
}

/// Project the estimated distance from the sensor along the measured AOAs.
pub fn individual_estimate<T: Real>(
    sensor: &CartesianPoint<T>,
    r_hat: T,
    angles: &[T],
) -> Result<CartesianPoint<T>> {
    let d = sensor.dim();
    if angles.len() != d - 1 {
        return Err(Error::invalid(format!(
            "need {} angles for a {d}-dimensional sensor, got {}",
            d - 1,
            angles.len()
        )));
    }
    if !(r_hat.is_finite() && r_hat > T::zero()) {
        return Err(Error::invalid("distance estimate must be positive"));
    }
    let mut coords = Vec::with_capacity(d);
    let mut sin_prod = T::one();
    for k in 0..d - 1 {
        coords.push(sensor.coords[k] + r_hat * angles[k].cos() * sin_prod);
        sin_prod *= angles[k].sin();
    }
    // for the last axis the azimuth contributes its sine, not cosine:
    // sin_prod already includes sin(azimuth) after the loop above
    coords.push(sensor.coords[d - 1] + r_hat * sin_prod);
    Ok(CartesianPoint { coords })
}

/// The fused target estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetEstimate<T> {
    pub coords: CartesianPoint<T>,
    pub n_used: usize,
    /// Individual estimates, retained on request.
    pub per_sensor: Option<Vec<CartesianPoint<T>>>,
}

/// Coordinate-wise arithmetic mean of the individual estimates.
pub fn fuse<T: Real>(individual: Vec<CartesianPoint<T>>) -> Result<TargetEstimate<T>> {
    let Some(first) = individual.first() else {
        return Err(Error::NoSensors);
    };
    let d = first.dim();
    let mut sums = vec![T::zero(); d];
    for est in &individual {
        for (s, &c) in sums.iter_mut().zip(&est.coords) {
            *s += c;
        }
    }
    let n = real::<T>(individual.len() as f64);
    Ok(TargetEstimate {
        coords: CartesianPoint {
            coords: sums.into_iter().map(|s| s / n).collect(),
        },
        n_used: individual.len(),
        per_sensor: None,
    })
}

fn localize_impl<T: Real>(
    observations: &[Observation<T>],
    fit: &CalibrationFit<T>,
    keep_individual: bool,
) -> Result<TargetEstimate<T>> {
    if observations.is_empty() {
        return Err(Error::NoSensors);
    }
    let mut individual = Vec::with_capacity(observations.len());
    for obs in observations {
        let r_hat = estimate_distance(obs.rss, fit)?;
        individual.push(individual_estimate(&obs.sensor, r_hat, &obs.angles)?);
    }
    let mut fused = fuse(individual.clone())?;
    if keep_individual {
        fused.per_sensor = Some(individual);
    }
    Ok(fused)
}

/// Run the full pipeline: distance estimate, individual projection, fusion.
pub fn localize<T: Real>(
    observations: &[Observation<T>],
    fit: &CalibrationFit<T>,
) -> Result<TargetEstimate<T>> {
    localize_impl(observations, fit, false)
}

/// As [`localize`] but retaining the per-sensor estimates.
pub fn localize_detailed<T: Real>(
    observations: &[Observation<T>],
    fit: &CalibrationFit<T>,
) -> Result<TargetEstimate<T>> {
    localize_impl(observations, fit, true)
}

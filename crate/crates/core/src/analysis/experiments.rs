//! Monte Carlo CMSE/MSE experiments over the deployment models.
//!
//! Replicas are embarrassingly parallel: replica `k` draws from the ChaCha
//! stream `(master_seed, k)` and results are reduced in replica order, so a
//! run is bit-identical for any thread count.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bounds::{cmse_bound, mse_bound};
use super::moments::MomentEstimates;
use super::stats::{mean_stderr, McEstimate};
use crate::channel::{aoa_variance, observe, ChannelParams};
use crate::error::{Error, Result};
use crate::estimator::{calibrate, generate_calibration_data, localize, CalibrationFit};
use crate::geometry::CartesianPoint;
use crate::num::{real, Real};
use crate::pointproc::{sample_model, sample_ppp_conditional, ProcessModel};
use crate::rng::replica_rng;

/// Whether replicas share one calibration fit (the default: calibration data
/// precede the experiment) or refit from fresh data per replica.
#[derive(Debug, Clone, Copy)]
pub enum CalibrationScheme<'a, T> {
    Fixed(&'a CalibrationFit<T>),
    PerReplica { samples: usize },
}

impl<T: Real> CalibrationScheme<'_, T> {
    fn resolve<R: Rng + ?Sized>(
        &self,
        radius: T,
        d: usize,
        params: &ChannelParams<T>,
        rng: &mut R,
    ) -> Result<CalibrationFit<T>> {
        match self {
            CalibrationScheme::Fixed(fit) => Ok((*fit).clone()),
            CalibrationScheme::PerReplica { samples } => {
                let pairs = generate_calibration_data(*samples, radius, params, d, rng)?;
                calibrate(&pairs)
            }
        }
    }
}

fn squared_norm<T: Real>(p: &CartesianPoint<T>) -> T {
    p.coords.iter().fold(T::zero(), |a, &c| a + c * c)
}

/// Fused target estimates from `reps` conditional-PPP scenes of exactly `n`
/// sensors each.
pub fn conditional_replicas<T: Real>(
    n: usize,
    radius: T,
    d: usize,
    params: &ChannelParams<T>,
    calibration: CalibrationScheme<'_, T>,
    reps: usize,
    master_seed: u64,
) -> Result<Vec<CartesianPoint<T>>> {
    if n == 0 {
        return Err(Error::invalid("conditional experiment needs n >= 1"));
    }
    if reps < 2 {
        return Err(Error::invalid("need at least two replicas"));
    }
    (0..reps)
        .into_par_iter()
        .map(|k| {
            let mut rng = replica_rng(master_seed, k as u64);
            let fit = calibration.resolve(radius, d, params, &mut rng)?;
            let pattern = sample_ppp_conditional(n, radius, d, &mut rng)?;
            let obs = observe(&pattern, params, &mut rng)?;
            Ok(localize(&obs, &fit)?.coords)
        })
        .collect()
}

/// Fused target estimates from `reps` scenes drawn from `model`; `None`
/// marks an empty pattern (which contributes zero squared error by the
/// CMSE(0) = 0 convention).
pub fn model_replicas<T: Real>(
    model: &ProcessModel<T>,
    radius: T,
    d: usize,
    params: &ChannelParams<T>,
    calibration: CalibrationScheme<'_, T>,
    reps: usize,
    master_seed: u64,
) -> Result<Vec<Option<CartesianPoint<T>>>> {
    if reps < 2 {
        return Err(Error::invalid("need at least two replicas"));
    }
    model.validate(d)?;
    (0..reps)
        .into_par_iter()
        .map(|k| {
            let mut rng = replica_rng(master_seed, k as u64);
            let fit = calibration.resolve(radius, d, params, &mut rng)?;
            let pattern = sample_model(model, radius, d, &mut rng)?;
            if pattern.is_empty() {
                return Ok(None);
            }
            let obs = observe(&pattern, params, &mut rng)?;
            Ok(Some(localize(&obs, &fit)?.coords))
        })
        .collect()
}

/// Empirical conditional MSE: mean squared error of the fused estimate over
/// `reps` scenes with exactly `n` sensors.
pub fn mc_cmse<T: Real>(
    n: usize,
    radius: T,
    d: usize,
    params: &ChannelParams<T>,
    calibration: CalibrationScheme<'_, T>,
    reps: usize,
    master_seed: u64,
) -> Result<McEstimate<T>> {
    let estimates = conditional_replicas(n, radius, d, params, calibration, reps, master_seed)?;
    let squares: Vec<T> = estimates.iter().map(squared_norm).collect();
    Ok(mean_stderr(&squares))
}

/// Empirical unconditional MSE over `reps` scenes of `model`; empty patterns
/// contribute zero.
pub fn mc_mse<T: Real>(
    model: &ProcessModel<T>,
    radius: T,
    d: usize,
    params: &ChannelParams<T>,
    calibration: CalibrationScheme<'_, T>,
    reps: usize,
    master_seed: u64,
) -> Result<McEstimate<T>> {
    let estimates = model_replicas(model, radius, d, params, calibration, reps, master_seed)?;
    let squares: Vec<T> = estimates
        .iter()
        .map(|e| e.as_ref().map_or(T::zero(), squared_norm))
        .collect();
    Ok(mean_stderr(&squares))
}

/// One grid of a CMSE or MSE sweep with the matching bound column.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentResult<T> {
    pub grid: Vec<T>,
    pub empirical: Vec<T>,
    pub stderr: Vec<T>,
    pub bound: Vec<T>,
    pub bound_stderr: Vec<T>,
    pub reps: usize,
    pub seed: u64,
    pub model: String,
}

impl<T: Real> ExperimentResult<T> {
    pub fn validate(&self) -> Result<()> {
        let n = self.grid.len();
        if self.empirical.len() != n
            || self.stderr.len() != n
            || self.bound.len() != n
            || self.bound_stderr.len() != n
        {
            return Err(Error::invalid("ragged experiment columns"));
        }
        if self.reps < 1 {
            return Err(Error::invalid("reps must be at least 1"));
        }
        for w in self.grid.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::invalid("grid must be strictly increasing"));
            }
        }
        if self.stderr.iter().any(|&s| s < T::zero()) {
            return Err(Error::invalid("negative standard error"));
        }
        Ok(())
    }
}

/// CMSE sweep over a sensor-count grid (conditional sampling exists only for
/// the PPP), with Theorem-style bounds from the supplied moments.
#[allow(clippy::too_many_arguments)]
pub fn cmse_experiment<T: Real>(
    n_grid: &[usize],
    radius: T,
    d: usize,
    params: &ChannelParams<T>,
    calibration: CalibrationScheme<'_, T>,
    moments: &MomentEstimates<T>,
    reps: usize,
    master_seed: u64,
) -> Result<ExperimentResult<T>> {
    let e_at_radius = aoa_variance(radius, &params.aoa)?;
    let mut result = ExperimentResult {
        grid: n_grid.iter().map(|&n| real::<T>(n as f64)).collect(),
        empirical: Vec::new(),
        stderr: Vec::new(),
        bound: Vec::new(),
        bound_stderr: Vec::new(),
        reps,
        seed: master_seed,
        model: "ppp_conditional".to_string(),
    };
    for (i, &n) in n_grid.iter().enumerate() {
        let est = mc_cmse(
            n,
            radius,
            d,
            params,
            calibration,
            reps,
            master_seed.wrapping_add(i as u64 * 0x9e37_79b9),
        )?;
        let b = cmse_bound(n, d, radius, e_at_radius, moments)?;
        result.empirical.push(est.mean);
        result.stderr.push(est.stderr);
        result.bound.push(b.value);
        result.bound_stderr.push(b.stderr);
    }
    result.validate()?;
    Ok(result)
}

/// MSE sweep over a density grid: the model is re-parametrized to each target
/// intensity, the bound is the PPP bound at that intensity.
#[allow(clippy::too_many_arguments)]
pub fn mse_experiment<T: Real>(
    base_model: &ProcessModel<T>,
    lambda_grid: &[T],
    radius: T,
    d: usize,
    params: &ChannelParams<T>,
    calibration: CalibrationScheme<'_, T>,
    moments: &MomentEstimates<T>,
    reps: usize,
    master_seed: u64,
) -> Result<ExperimentResult<T>> {
    let e_at_radius = aoa_variance(radius, &params.aoa)?;
    let mut result = ExperimentResult {
        grid: lambda_grid.to_vec(),
        empirical: Vec::new(),
        stderr: Vec::new(),
        bound: Vec::new(),
        bound_stderr: Vec::new(),
        reps,
        seed: master_seed,
        model: base_model.name().to_string(),
    };
    for (i, &lambda) in lambda_grid.iter().enumerate() {
        let model = base_model.with_intensity(lambda, d)?;
        let est = mc_mse(
            &model,
            radius,
            d,
            params,
            calibration,
            reps,
            master_seed.wrapping_add(i as u64 * 0x9e37_79b9),
        )?;
        let b = mse_bound(lambda, d, radius, e_at_radius, moments)?;
        result.empirical.push(est.mean);
        result.stderr.push(est.stderr);
        result.bound.push(b.value);
        result.bound_stderr.push(b.stderr);
    }
    result.validate()?;
    Ok(result)
}

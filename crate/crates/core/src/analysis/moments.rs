//! Monte Carlo estimation of the distance-estimator moments E[R_hat] and
//! E[R_hat^2] that enter the error bounds.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::stats::mean_stderr;
use crate::channel::{path_loss, sample_shadowing, ChannelParams};
use crate::error::{Error, Result};
use crate::estimator::{estimate_distance, CalibrationFit};
use crate::num::{real, Real};

/// First and second moments of the per-sensor distance estimate under the
/// in-ball radial law, with standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimates<T> {
    pub m1: T,
    pub m2: T,
    pub stderr_m1: T,
    pub stderr_m2: T,
    pub n_mc: usize,
}

/// Sample `R ~ d r^{d-1}/R^d`, apply the channel and the calibrated distance
/// estimator, and return the sample moments of `R_hat`.
pub fn rhat_moments<T: Real, R: Rng + ?Sized>(
    params: &ChannelParams<T>,
    fit: &CalibrationFit<T>,
    radius: T,
    d: usize,
    n_mc: usize,
    rng: &mut R,
) -> Result<MomentEstimates<T>> {
    if n_mc < 1000 {
        return Err(Error::invalid("moment estimation needs n_mc >= 1000"));
    }
    if d < 2 {
        return Err(Error::UnsupportedDimension(d));
    }
    if !(radius > T::zero()) {
        return Err(Error::invalid("radius must be positive"));
    }
    let inv_d = 1.0 / d as f64;
    let mut r_hats = Vec::with_capacity(n_mc);
    let mut squares = Vec::with_capacity(n_mc);
    for _ in 0..n_mc {
        let u: f64 = loop {
            let u = rng.random::<f64>();
            if u > 0.0 {
                break u;
            }
        };
        let r_true = radius * real::<T>(u.powf(inv_d));
        let s = sample_shadowing(params.sigma, params.beta, rng);
        let r_hat = estimate_distance(path_loss(r_true, params)? * s, fit)?;
        r_hats.push(r_hat);
        squares.push(r_hat * r_hat);
    }
    let first = mean_stderr(&r_hats);
    let second = mean_stderr(&squares);
    Ok(MomentEstimates {
        m1: first.mean,
        m2: second.mean,
        stderr_m1: first.stderr,
        stderr_m2: second.stderr,
        n_mc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::replica_rng;

    /// Closed-form moments for the exact calibration: `R_hat = R e^{-sigma
    /// Z/beta}`, so `m1 = (dR/(d+1)) e^{sigma^2/(2 beta^2)}` and
    /// `m2 = (dR^2/(d+2)) e^{2 sigma^2/beta^2}`.
    fn closed_form(d: f64, radius: f64, sigma: f64, beta: f64) -> (f64, f64) {
        let m1 = d * radius / (d + 1.0) * (sigma * sigma / (2.0 * beta * beta)).exp();
        let m2 = d * radius * radius / (d + 2.0) * (2.0 * sigma * sigma / (beta * beta)).exp();
        (m1, m2)
    }

    /// The closed form itself is checked against brute-force quadrature over
    /// the (r, z) density before being used as an oracle anywhere else.
    #[test]
    fn closed_form_oracle_agrees_with_quadrature() {
        let (d, radius, sigma, beta) = (2.0, 30.0, 2.763102, 3.52);
        let (m1c, m2c) = closed_form(d, radius, sigma, beta);

        // E[R e^{-sigma Z/beta}] = (int r * d r^{d-1}/R^d dr)(int e^{-sigma
        // z/beta} phi(z) dz), evaluated by midpoint sums
        let steps = 20_000;
        let mut radial1 = 0.0;
        let mut radial2 = 0.0;
        for k in 0..steps {
            let r = (k as f64 + 0.5) / steps as f64 * radius;
            let w = d * r.powf(d - 1.0) / radius.powf(d) * (radius / steps as f64);
            radial1 += r * w;
            radial2 += r * r * w;
        }
        let mut lognorm1 = 0.0;
        let mut lognorm2 = 0.0;
        for k in 0..steps {
            let z = -12.0 + (k as f64 + 0.5) * 24.0 / steps as f64;
            let phi = (-z * z / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
            let w = phi * 24.0 / steps as f64;
            lognorm1 += (-sigma * z / beta).exp() * w;
            lognorm2 += (-2.0 * sigma * z / beta).exp() * w;
        }
        assert!((radial1 * lognorm1 - m1c).abs() < 1e-4 * m1c);
        assert!((radial2 * lognorm2 - m2c).abs() < 1e-4 * m2c);
    }

    #[test]
    fn moments_with_exact_calibration_no_shadowing() {
        let params = ChannelParams::urban_default(0.0).unwrap();
        let fit = CalibrationFit::exact(&params);
        let mut rng = replica_rng(81, 0);
        let m = rhat_moments(&params, &fit, 30.0, 2, 200_000, &mut rng).unwrap();
        // R_hat = R exactly: m1 -> 20, m2 -> 450
        assert!((m.m1 - 20.0).abs() < 4.0 * m.stderr_m1, "{:?}", m);
        assert!((m.m2 - 450.0).abs() < 4.0 * m.stderr_m2, "{:?}", m);
        assert!(m.m2 >= m.m1 * m.m1);
    }

    #[test]
    fn moments_with_shadowing_match_lognormal_oracle() {
        let params = ChannelParams::urban_default(12.0).unwrap();
        let fit = CalibrationFit::exact(&params);
        let mut rng = replica_rng(82, 0);
        let m = rhat_moments(&params, &fit, 30.0, 2, 400_000, &mut rng).unwrap();
        let (m1c, m2c) = closed_form(2.0, 30.0, params.sigma, 3.52);
        assert!((m.m1 - m1c).abs() < 4.0 * m.stderr_m1, "{:?} vs {m1c}", m);
        assert!((m.m2 - m2c).abs() < 4.0 * m.stderr_m2, "{:?} vs {m2c}", m);
    }

    #[test]
    fn stderr_shrinks_with_sample_size() {
        let params = ChannelParams::urban_default(12.0).unwrap();
        let fit = CalibrationFit::exact(&params);
        let mut rng = replica_rng(83, 0);
        let small = rhat_moments(&params, &fit, 30.0, 2, 20_000, &mut rng).unwrap();
        let mut rng = replica_rng(83, 1);
        let large = rhat_moments(&params, &fit, 30.0, 2, 40_000, &mut rng).unwrap();
        let ratio = large.stderr_m1 / small.stderr_m1;
        assert!((ratio - 1.0 / 2.0f64.sqrt()).abs() < 0.1, "ratio {ratio}");
    }

    #[test]
    fn rejects_tiny_sample_budgets() {
        let params = ChannelParams::urban_default(12.0).unwrap();
        let fit = CalibrationFit::exact(&params);
        let mut rng = replica_rng(84, 0);
        assert!(rhat_moments(&params, &fit, 30.0, 2, 999, &mut rng).is_err());
    }
}

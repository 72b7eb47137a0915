//! Signal propagation: power-law path loss, log-normal shadowing,
//! distance-dependent Gaussian AOA noise, and the observable process.

use rand::Rng;
use rand_distr::Distribution;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{cart_to_hyper, CartesianPoint, HypersphericalCoord};
use crate::num::{real, Real};
use crate::pointproc::PointPattern;

/// Logistic AOA-variance profile `E(r)` (rad^2), non-decreasing in distance
/// and bounded in `(tau_min, tau_max)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AoaVarianceParams<T> {
    pub tau_min: T,
    pub tau_max: T,
    /// Logistic slope (km^-1).
    pub slope: T,
    /// Logistic midpoint (km).
    pub midpoint: T,
}

impl<T: Real> AoaVarianceParams<T> {
    pub fn new(tau_min: T, tau_max: T, slope: T, midpoint: T) -> Result<Self> {
        if !(tau_min.is_finite() && tau_min > T::zero()) {
            return Err(Error::invalid("tau_min must be positive"));
        }
        if !(tau_max.is_finite() && tau_max > tau_min) {
            return Err(Error::invalid("tau_max must exceed tau_min"));
        }
        if !(slope.is_finite() && slope > T::zero()) {
            return Err(Error::invalid("AOA slope must be positive"));
        }
        if !midpoint.is_finite() {
            return Err(Error::invalid("AOA midpoint must be finite"));
        }
        Ok(AoaVarianceParams {
            tau_min,
            tau_max,
            slope,
            midpoint,
        })
    }
}

/// Propagation parameters: `loss(r) = (K r)^-beta`, multiplicative log-normal
/// shadowing of linear-scale strength `sigma`, and the AOA variance profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams<T> {
    /// Path-loss scale (km^-1).
    pub k: T,
    /// Path-loss exponent; must exceed 2 for the shadowing model.
    pub beta: T,
    /// Shadowing standard deviation on the linear scale (dimensionless).
    pub sigma: T,
    pub aoa: AoaVarianceParams<T>,
}

impl<T: Real> ChannelParams<T> {
    pub fn new(k: T, beta: T, sigma: T, aoa: AoaVarianceParams<T>) -> Result<Self> {
        if !(k.is_finite() && k > T::zero()) {
            return Err(Error::invalid("path-loss scale K must be positive"));
        }
        if !(beta.is_finite() && beta > real::<T>(2.0)) {
            return Err(Error::invalid("path-loss exponent beta must exceed 2"));
        }
        if !(sigma.is_finite() && sigma >= T::zero()) {
            return Err(Error::invalid("shadowing sigma must be non-negative"));
        }
        Ok(ChannelParams { k, beta, sigma, aoa })
    }

    /// COST-Hata-style urban parameter set (K = 4250 km^-1, beta = 3.52)
    /// with the logistic AOA profile tau in [pi/90, pi/12], slope 0.05,
    /// midpoint 25 km. Shadowing given in dB.
    pub fn urban_default(sigma_db: T) -> Result<Self> {
        ChannelParams::new(
            real::<T>(4250.0),
            real::<T>(3.52),
            sigma_from_db(sigma_db)?,
            AoaVarianceParams::new(
                T::PI() / real::<T>(90.0),
                T::PI() / real::<T>(12.0),
                real::<T>(0.05),
                real::<T>(25.0),
            )?,
        )
    }

    /// Same parameters with a different shadowing strength.
    pub fn with_sigma(&self, sigma: T) -> Result<Self> {
        ChannelParams::new(self.k, self.beta, sigma, self.aoa.clone())
    }
}

/// One sensor's measurement tuple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation<T> {
    pub sensor: CartesianPoint<T>,
    /// Received signal strength `P > 0`.
    pub rss: T,
    /// Inverse RSS `N = 1/P`, the quantity the convergence theory is stated in.
    pub inverse_rss: T,
    /// Measured angles, elevations first, azimuth last (raw, unwrapped).
    pub angles: Vec<T>,
}

/// Deterministic path loss `(K r)^-beta`.
pub fn path_loss<T: Real>(r: T, params: &ChannelParams<T>) -> Result<T> {
    if !(r.is_finite() && r > T::zero()) {
        return Err(Error::invalid("path loss needs a positive distance"));
    }
    Ok((params.k * r).powf(-params.beta))
}

/// Signal gain `g(r) = 1/loss(r) = (K r)^beta`, the noiseless inverse RSS.
pub fn signal_gain<T: Real>(r: T, params: &ChannelParams<T>) -> Result<T> {
    path_loss(r, params).map(|p| T::one() / p)
}

/// Convert a dB shadowing spread to the linear scale: `sigma_dB/10 * ln 10`.
pub fn sigma_from_db<T: Real>(sigma_db: T) -> Result<T> {
    if !(sigma_db.is_finite() && sigma_db >= T::zero()) {
        return Err(Error::invalid("sigma_dB must be non-negative"));
    }
    Ok(sigma_db / real::<T>(10.0) * real::<T>(10.0).ln())
}

/// One draw of the shadowing factor `S = exp(-sigma^2/beta + sigma Z)`.
/// Exactly 1 when `sigma = 0`.
pub fn sample_shadowing<T: Real, R: Rng + ?Sized>(sigma: T, beta: T, rng: &mut R) -> T {
    let z: f64 = rand_distr::StandardNormal.sample(rng);
    (sigma * real::<T>(z) - sigma * sigma / beta).exp()
}

/// AOA variance at distance `r`:
/// `tau_min + (tau_max - tau_min) / (1 + exp(-a (r - r0)))`.
pub fn aoa_variance<T: Real>(r: T, params: &AoaVarianceParams<T>) -> Result<T> {
    if !(r.is_finite() && r >= T::zero()) {
        return Err(Error::invalid("AOA variance needs a non-negative distance"));
    }
    let logistic = T::one() / (T::one() + (-params.slope * (r - params.midpoint)).exp());
    Ok(params.tau_min + (params.tau_max - params.tau_min) * logistic)
}

/// Noisy AOA vector for a sensor at hyperspherical position `h`: each
/// elevation is `N(pi - psi_j, variance)`, the azimuth `N(psi_az - pi,
/// variance)`, mutually independent. Values are raw Gaussian draws (the
/// estimator only uses their trigonometric projections, so no wrapping).
pub fn sample_aoa<T: Real, R: Rng + ?Sized>(
    h: &HypersphericalCoord<T>,
    variance: T,
    rng: &mut R,
) -> Result<Vec<T>> {
    if !(variance.is_finite() && variance > T::zero()) {
        return Err(Error::invalid("AOA variance must be positive"));
    }
    let sd = variance.sqrt();
    let mut draw = |mean: T| {
        let z: f64 = rand_distr::StandardNormal.sample(rng);
        mean + sd * real::<T>(z)
    };
    let mut angles = Vec::with_capacity(h.dim() - 1);
    for &psi in &h.elevations {
        angles.push(draw(T::PI() - psi));
    }
    angles.push(draw(h.azimuth - T::PI()));
    Ok(angles)
}

/// Generate the observable process for a pattern: per sensor, RSS
/// `P = loss(R) * S` with i.i.d. shadowing, inverse RSS, and noisy AOAs with
/// variance `E(R)` evaluated at the true distance.
pub fn observe<T: Real, R: Rng + ?Sized>(
    pattern: &PointPattern<T>,
    params: &ChannelParams<T>,
    rng: &mut R,
) -> Result<Vec<Observation<T>>> {
    let mut observations = Vec::with_capacity(pattern.len());
    for sensor in &pattern.points {
        let h = cart_to_hyper(sensor)?; // origin sensors are rejected here
        let shadowing = sample_shadowing(params.sigma, params.beta, rng);
        let rss = path_loss(h.r, params)? * shadowing;
        let variance = aoa_variance(h.r, &params.aoa)?;
        let angles = sample_aoa(&h, variance, rng)?;
        observations.push(Observation {
            sensor: sensor.clone(),
            rss,
            inverse_rss: T::one() / rss,
            angles,
        });
    }
    Ok(observations)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointproc::{sample_ppp_conditional, PointPattern, Provenance};
    use crate::rng::replica_rng;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::f64::consts::PI;

    fn params(sigma_db: f64) -> ChannelParams<f64> {
        ChannelParams::urban_default(sigma_db).unwrap()
    }

    #[test]
    fn path_loss_power_law() {
        let p = params(12.0);
        assert_abs_diff_eq!(path_loss(1.0 / 4250.0, &p).unwrap(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(
            path_loss(1.0, &p).unwrap(),
            4250.0f64.powf(-3.52),
            max_relative = 1e-14
        );
        // doubling the distance scales by 2^-beta
        let ratio = path_loss(2.0, &p).unwrap() / path_loss(1.0, &p).unwrap();
        assert_relative_eq!(ratio, 2.0f64.powf(-3.52), max_relative = 1e-13);
        assert!(path_loss(0.0, &p).is_err());
    }

    #[test]
    fn db_conversion() {
        assert_abs_diff_eq!(sigma_from_db(12.0).unwrap(), 2.763102, epsilon = 1e-6);
        assert_abs_diff_eq!(sigma_from_db(0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(sigma_from_db(10.0).unwrap(), 10.0f64.ln(), epsilon = 1e-15);
        assert!(sigma_from_db(-1.0).is_err());
    }

    #[test]
    fn shadowing_with_zero_sigma_is_one() {
        let mut rng = replica_rng(41, 0);
        for _ in 0..100 {
            assert_eq!(sample_shadowing(0.0, 3.52, &mut rng), 1.0);
        }
    }

    #[test]
    fn shadowing_mean_matches_lognormal_identity() {
        // E[S] = exp(-sigma^2/beta + sigma^2/2)
        let (sigma, beta) = (2.763102, 3.52);
        let mut rng = replica_rng(42, 0);
        let n = 1_000_000;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..n {
            let s = sample_shadowing(sigma, beta, &mut rng);
            sum += s;
            sumsq += s * s;
        }
        let mean = sum / n as f64;
        let var = sumsq / n as f64 - mean * mean;
        let stderr = (var / n as f64).sqrt();
        let expected = (-sigma * sigma / beta + sigma * sigma / 2.0).exp();
        assert!(
            (mean - expected).abs() < 4.0 * stderr,
            "mean {mean} vs {expected} +- {stderr}"
        );
    }

    #[test]
    fn log_shadowing_is_gaussian() {
        let (sigma, beta) = (1.0, 3.52);
        let mut rng = replica_rng(43, 0);
        let mut xs: Vec<f64> = (0..20_000)
            .map(|_| sample_shadowing(sigma, beta, &mut rng).ln())
            .collect();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mu = -sigma * sigma / beta;
        let n = xs.len() as f64;
        let mut d_stat: f64 = 0.0;
        for (i, &x) in xs.iter().enumerate() {
            let z = (x - mu) / sigma;
            let f = 0.5 * (1.0 + erf_approx(z / 2.0f64.sqrt()));
            d_stat = d_stat.max(((i + 1) as f64 / n - f).abs()).max((f - i as f64 / n).abs());
        }
        assert!(d_stat < 1.628 / n.sqrt(), "KS {d_stat}");
    }

    // Abramowitz-Stegun 7.1.26, max error ~1.5e-7; plenty for a KS check
    fn erf_approx(x: f64) -> f64 {
        let sign = x.signum();
        let x = x.abs();
        let t = 1.0 / (1.0 + 0.3275911 * x);
        let y = 1.0
            - (((((1.061405429 * t - 1.453152027) * t) + 1.421413741) * t - 0.284496736) * t
                + 0.254829592)
                * t
                * (-x * x).exp();
        sign * y
    }

    #[test]
    fn aoa_variance_profile() {
        let p = params(12.0);

        // midpoint value (tau_min + tau_max)/2 ~ 0.148353 with these params
        let mid = aoa_variance(25.0, &p.aoa).unwrap();
        assert_abs_diff_eq!(mid, (PI / 90.0 + PI / 12.0) / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(mid, 0.148353, epsilon = 1e-6);

        // saturates at tau_max
        assert_relative_eq!(
            aoa_variance(1e6, &p.aoa).unwrap(),
            PI / 12.0,
            max_relative = 1e-12
        );

        // value at zero
        let at_zero = aoa_variance(0.0, &p.aoa).unwrap();
        let expected = PI / 90.0 + (PI / 12.0 - PI / 90.0) / (1.0 + (0.05f64 * 25.0).exp());
        assert_abs_diff_eq!(at_zero, expected, epsilon = 1e-14);

        // monotone non-decreasing on a grid
        let mut last = 0.0;
        for k in 0..100 {
            let v = aoa_variance(k as f64, &p.aoa).unwrap();
            assert!(v >= last && v > PI / 90.0 && v < PI / 12.0);
            last = v;
        }
    }

    #[test]
    fn aoa_trig_moments() {
        // E[cos Theta | psi] = -e^{-E/2} cos psi for the azimuth,
        // E[sin Theta | psi] = -e^{-E/2} sin psi
        let variance = 0.15;
        let psi = 1.1;
        let h = HypersphericalCoord::new(1.0, vec![], psi).unwrap();
        let mut rng = replica_rng(44, 0);
        let n = 1_000_000;
        let (mut c_sum, mut s_sum, mut c_sq, mut s_sq) = (0.0, 0.0, 0.0, 0.0);
        for _ in 0..n {
            let th = sample_aoa(&h, variance, &mut rng).unwrap()[0];
            c_sum += th.cos();
            s_sum += th.sin();
            c_sq += th.cos() * th.cos();
            s_sq += th.sin() * th.sin();
        }
        let damp = (-variance / 2.0f64).exp();
        let (c_mean, s_mean) = (c_sum / n as f64, s_sum / n as f64);
        let c_se = ((c_sq / n as f64 - c_mean * c_mean) / n as f64).sqrt();
        let s_se = ((s_sq / n as f64 - s_mean * s_mean) / n as f64).sqrt();
        assert!((c_mean + damp * psi.cos()).abs() < 4.0 * c_se);
        assert!((s_mean + damp * psi.sin()).abs() < 4.0 * s_se);
    }

    #[test]
    fn elevation_aoa_mean_reflects_angle() {
        // elevations have mean pi - psi, so E[sin] = +e^{-E/2} sin psi
        let variance = 0.1;
        let psi = 0.6;
        let h = HypersphericalCoord::new(2.0, vec![psi], 0.3).unwrap();
        let mut rng = replica_rng(45, 0);
        let n = 200_000;
        let mut s_sum = 0.0;
        for _ in 0..n {
            let angles = sample_aoa(&h, variance, &mut rng).unwrap();
            s_sum += angles[0].sin();
        }
        let expected = (-variance / 2.0f64).exp() * psi.sin();
        assert!((s_sum / n as f64 - expected).abs() < 0.005);
    }

    #[test]
    fn observe_noiseless_inverse_rss() {
        let p = params(0.0);
        let mut rng = replica_rng(46, 0);
        let pattern = sample_ppp_conditional(50, 30.0, 2, &mut rng).unwrap();
        let obs = observe(&pattern, &p, &mut rng).unwrap();
        for (o, sensor) in obs.iter().zip(&pattern.points) {
            let r = sensor.norm();
            assert_relative_eq!(
                o.inverse_rss,
                (4250.0 * r).powf(3.52),
                max_relative = 1e-12
            );
            assert_relative_eq!(o.rss * o.inverse_rss, 1.0, max_relative = 1e-14);
        }
    }

    #[test]
    fn observe_rejects_sensor_at_origin() {
        let p = params(12.0);
        let pattern = PointPattern {
            dimension: 2,
            window_radius: 1.0,
            points: vec![CartesianPoint::new(vec![0.0, 0.0]).unwrap()],
            provenance: Provenance::ConditionalPpp { count: 1 },
            seed: None,
        };
        let mut rng = replica_rng(47, 0);
        assert!(matches!(
            observe(&pattern, &p, &mut rng).unwrap_err(),
            Error::ZeroVector
        ));
    }

    #[test]
    fn observe_recovers_path_loss_slope() {
        // regressing ln P on ln R over shadowed observations recovers -beta
        let p = params(12.0);
        let mut rng = replica_rng(48, 0);
        let pattern = sample_ppp_conditional(40_000, 30.0, 2, &mut rng).unwrap();
        let obs = observe(&pattern, &p, &mut rng).unwrap();
        let xs: Vec<f64> = pattern.points.iter().map(|s| s.norm().ln()).collect();
        let ys: Vec<f64> = obs.iter().map(|o| o.rss.ln()).collect();
        let n = xs.len() as f64;
        let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        let slope = sxy / sxx;
        assert!((slope + 3.52).abs() < 0.05, "slope {slope}");
    }

    #[test]
    fn deterministic_given_seed() {
        let p = params(12.0);
        let mut rng = replica_rng(49, 0);
        let pattern = sample_ppp_conditional(20, 30.0, 2, &mut rng).unwrap();
        let a = observe(&pattern, &p, &mut replica_rng(50, 1)).unwrap();
        let b = observe(&pattern, &p, &mut replica_rng(50, 1)).unwrap();
        assert_eq!(a, b);
    }
}

//! Empirical Laplace functionals of the observable process, used as a
//! convergence diagnostic: two models whose observable processes approach the
//! same law must produce matching values for every probe.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::{mean_stderr, McEstimate};
use crate::channel::{observe, ChannelParams, Observation};
use crate::error::{Error, Result};
use crate::num::{real, Real};
use crate::pointproc::{sample_model, ProcessModel};
use crate::rng::replica_rng;

/// A smooth, compactly supported test function: the product of trapezoidal
/// bumps on the inverse-RSS axis and on each angle axis.
///
/// `shoulder` is the linear ramp width as a fraction of each box's
/// half-width (0 gives an indicator, 1 a triangle); the diagnostic theory
/// needs continuous test functions, so keep it positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaplaceProbe<T> {
    /// Support on the inverse-RSS axis, `0 < lo < hi`.
    pub rss_box: (T, T),
    /// Support per angle coordinate (elevations first, azimuth last).
    pub angle_boxes: Vec<(T, T)>,
    /// Ramp fraction in `[0, 1]`.
    pub shoulder: T,
    /// Peak value of the bump; zero makes the probe trivial (`L = 1`).
    pub amplitude: T,
}

impl<T: Real> LaplaceProbe<T> {
    pub fn validate(&self, d: usize) -> Result<()> {
        let (lo, hi) = self.rss_box;
        if !(lo.is_finite() && hi.is_finite() && T::zero() < lo && lo < hi) {
            return Err(Error::invalid("inverse-RSS box must satisfy 0 < lo < hi"));
        }
        if self.angle_boxes.len() != d - 1 {
            return Err(Error::invalid(format!(
                "need {} angle boxes in dimension {d}",
                d - 1
            )));
        }
        for &(a, b) in &self.angle_boxes {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(Error::invalid("degenerate angle box"));
            }
        }
        if !(self.shoulder >= T::zero() && self.shoulder <= T::one()) {
            return Err(Error::invalid("shoulder fraction must lie in [0, 1]"));
        }
        if !(self.amplitude.is_finite() && self.amplitude >= T::zero()) {
            return Err(Error::invalid("amplitude must be non-negative"));
        }
        Ok(())
    }

    /// A probe that typically captures a handful of strong-signal sensors:
    /// inverse-RSS between the noiseless values at `radius/60` and
    /// `radius/30`, azimuths in `[-pi, 0]`, elevations in `[0, pi]`.
    pub fn default_for(params: &ChannelParams<T>, radius: T, d: usize) -> Result<Self> {
        let g = |r: T| crate::channel::signal_gain(r, params);
        let lo = g(radius / real::<T>(60.0))?;
        let hi = g(radius / real::<T>(30.0))?;
        let mut angle_boxes = vec![(T::zero(), T::PI()); d.saturating_sub(2)];
        angle_boxes.push((-T::PI(), T::zero()));
        let probe = LaplaceProbe {
            rss_box: (lo, hi),
            angle_boxes,
            shoulder: real::<T>(0.1),
            amplitude: T::one(),
        };
        probe.validate(d)?;
        Ok(probe)
    }

    fn bump(x: T, lo: T, hi: T, shoulder: T) -> T {
        if x <= lo || x >= hi {
            return T::zero();
        }
        let w = shoulder * (hi - lo) / real::<T>(2.0);
        if w == T::zero() {
            return T::one();
        }
        let up = (x - lo) / w;
        let down = (hi - x) / w;
        up.min(down).min(T::one())
    }

    /// Evaluate the test function at one observation.
    pub fn value(&self, obs: &Observation<T>) -> T {
        let mut v = Self::bump(
            obs.inverse_rss,
            self.rss_box.0,
            self.rss_box.1,
            self.shoulder,
        );
        if v == T::zero() {
            return T::zero();
        }
        for (&theta, &(a, b)) in obs.angles.iter().zip(&self.angle_boxes) {
            v *= Self::bump(theta, a, b, self.shoulder);
            if v == T::zero() {
                return T::zero();
            }
        }
        self.amplitude * v
    }
}

/// Monte Carlo estimate of `E[exp(-sum_i q(N_i, Theta_i))]` for `model`'s
/// observable process at shadowing strength `sigma` (overriding the one in
/// `params`). Values lie in `(0, 1]`.
#[allow(clippy::too_many_arguments)]
pub fn empirical_laplace<T: Real>(
    model: &ProcessModel<T>,
    sigma: T,
    probe: &LaplaceProbe<T>,
    radius: T,
    d: usize,
    params: &ChannelParams<T>,
    reps: usize,
    master_seed: u64,
) -> Result<McEstimate<T>> {
    if reps < 100 {
        return Err(Error::invalid("Laplace diagnostic needs reps >= 100"));
    }
    probe.validate(d)?;
    model.validate(d)?;
    let channel = params.with_sigma(sigma)?;
    let values: Vec<T> = (0..reps)
        .into_par_iter()
        .map(|k| {
            let mut rng = replica_rng(master_seed, k as u64);
            let pattern = sample_model(model, radius, d, &mut rng)?;
            let obs = observe(&pattern, &channel, &mut rng)?;
            let total = obs
                .iter()
                .map(|o| probe.value(o))
                .fold(T::zero(), |a, b| a + b);
            Ok((-total).exp())
        })
        .collect::<Result<_>>()?;
    Ok(mean_stderr(&values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::stats::joint_stderr;

    fn params() -> ChannelParams<f64> {
        ChannelParams::urban_default(12.0).unwrap()
    }

    #[test]
    fn trivial_probe_gives_exactly_one() {
        let p = params();
        let mut probe = LaplaceProbe::default_for(&p, 10.0, 2).unwrap();
        probe.amplitude = 0.0;
        let model = ProcessModel::Ppp { lambda: 1.0 };
        let est = empirical_laplace(&model, p.sigma, &probe, 10.0, 2, &p, 100, 1).unwrap();
        assert_eq!(est.mean, 1.0);
        assert_eq!(est.stderr, 0.0);
    }

    #[test]
    fn laplace_values_stay_in_unit_interval() {
        let p = params();
        let probe = LaplaceProbe::default_for(&p, 10.0, 2).unwrap();
        let model = ProcessModel::Ppp { lambda: 1.0 };
        let est = empirical_laplace(&model, p.sigma, &probe, 10.0, 2, &p, 300, 2).unwrap();
        assert!(est.mean > 0.0 && est.mean <= 1.0, "{est:?}");
        // the default probe should actually see points
        assert!(est.mean < 0.999, "probe saw nothing: {est:?}");
    }

    #[test]
    fn same_law_produces_matching_values() {
        let p = params();
        let probe = LaplaceProbe::default_for(&p, 10.0, 2).unwrap();
        let model = ProcessModel::Ppp { lambda: 1.0 };
        let a = empirical_laplace(&model, p.sigma, &probe, 10.0, 2, &p, 800, 3).unwrap();
        let b = empirical_laplace(&model, p.sigma, &probe, 10.0, 2, &p, 800, 4).unwrap();
        let gap = (a.mean - b.mean).abs();
        assert!(
            gap < 4.0 * joint_stderr(a.stderr, b.stderr),
            "gap {gap}, se {} {}",
            a.stderr,
            b.stderr
        );
    }

    #[test]
    fn bump_is_continuous_and_supported_on_box() {
        let probe = LaplaceProbe {
            rss_box: (1.0, 3.0),
            angle_boxes: vec![(-1.0, 1.0)],
            shoulder: 0.5,
            amplitude: 2.0,
        };
        probe.validate(2).unwrap();
        let obs = |n: f64, t: f64| Observation {
            sensor: crate::geometry::CartesianPoint::new(vec![1.0, 0.0]).unwrap(),
            rss: 1.0 / n,
            inverse_rss: n,
            angles: vec![t],
        };
        assert_eq!(probe.value(&obs(0.9, 0.0)), 0.0);
        assert_eq!(probe.value(&obs(3.1, 0.0)), 0.0);
        assert_eq!(probe.value(&obs(2.0, 2.0)), 0.0);
        assert!((probe.value(&obs(2.0, 0.0)) - 2.0).abs() < 1e-12);
        // halfway up the shoulder
        let quarter = probe.value(&obs(1.25, 0.0));
        assert!((quarter - 1.0).abs() < 1e-12, "{quarter}");
    }

    #[test]
    fn probe_validation_rejects_nonsense() {
        let mut probe = LaplaceProbe {
            rss_box: (0.0, 1.0),
            angle_boxes: vec![(-1.0, 1.0)],
            shoulder: 0.1,
            amplitude: 1.0,
        };
        assert!(probe.validate(2).is_err());
        probe.rss_box = (1.0, 2.0);
        assert!(probe.validate(3).is_err()); // missing elevation box
        probe.shoulder = 1.5;
        assert!(probe.validate(2).is_err());
    }
}

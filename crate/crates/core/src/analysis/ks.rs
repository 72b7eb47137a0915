//! Two-sample Kolmogorov-Smirnov distance between strongest-signal
//! statistics, the marginal-law counterpart of the Laplace diagnostic.

use rayon::prelude::*;

use crate::channel::{observe, ChannelParams};
use crate::error::{Error, Result};
use crate::num::{real, Real};
use crate::pointproc::{sample_model, ProcessModel};
use crate::rng::replica_rng;

/// Two-sample KS statistic `sup |F_x - F_y|`.
pub fn two_sample_ks<T: Real>(xs: &[T], ys: &[T]) -> Result<T> {
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::invalid("KS needs non-empty samples"));
    }
    let mut xs = xs.to_vec();
    let mut ys = ys.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).expect("no NaN in KS input"));
    ys.sort_by(|a, b| a.partial_cmp(b).expect("no NaN in KS input"));
    let (n, m) = (xs.len(), ys.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = T::zero();
    while i < n || j < m {
        let v = match (xs.get(i), ys.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => break,
        };
        while i < n && xs[i] == v {
            i += 1;
        }
        while j < m && ys[j] == v {
            j += 1;
        }
        let fx = real::<T>(i as f64 / n as f64);
        let fy = real::<T>(j as f64 / m as f64);
        d = d.max((fx - fy).abs());
    }
    Ok(d)
}

/// Asymptotic two-sample critical value at level `alpha`:
/// `sqrt(-ln(alpha/2)/2) * sqrt((n+m)/(n m))`.
pub fn ks_critical<T: Real>(n: usize, m: usize, alpha: T) -> T {
    let c = (-(alpha / real::<T>(2.0)).ln() / real::<T>(2.0)).sqrt();
    c * (real::<T>((n + m) as f64) / real::<T>((n * m) as f64)).sqrt()
}

/// Per-replica minimum inverse RSS (the strongest-signal statistic) of a
/// model's observable process. Replicas with empty patterns are skipped.
#[allow(clippy::too_many_arguments)]
pub fn min_inverse_rss_sample<T: Real>(
    model: &ProcessModel<T>,
    sigma: T,
    radius: T,
    d: usize,
    params: &ChannelParams<T>,
    reps: usize,
    master_seed: u64,
    stream_offset: u64,
) -> Result<Vec<T>> {
    model.validate(d)?;
    let channel = params.with_sigma(sigma)?;
    let mins: Vec<Option<T>> = (0..reps)
        .into_par_iter()
        .map(|k| {
            let mut rng = replica_rng(master_seed, stream_offset + k as u64);
            let pattern = sample_model(model, radius, d, &mut rng)?;
            if pattern.is_empty() {
                return Ok(None);
            }
            let obs = observe(&pattern, &channel, &mut rng)?;
            Ok(obs
                .iter()
                .map(|o| o.inverse_rss)
                .fold(None, |acc: Option<T>, v| {
                    Some(acc.map_or(v, |a| a.min(v)))
                }))
        })
        .collect::<Result<_>>()?;
    Ok(mins.into_iter().flatten().collect())
}

/// KS distance between the strongest-signal distributions of two models at
/// shadowing strength `sigma`; the models draw from disjoint stream ranges
/// of the same master seed.
#[allow(clippy::too_many_arguments)]
pub fn ks_min_inverse_rss<T: Real>(
    model_a: &ProcessModel<T>,
    model_b: &ProcessModel<T>,
    sigma: T,
    radius: T,
    d: usize,
    params: &ChannelParams<T>,
    reps: usize,
    master_seed: u64,
) -> Result<T> {
    if reps < 500 {
        return Err(Error::invalid("KS diagnostic needs reps >= 500"));
    }
    let a = min_inverse_rss_sample(model_a, sigma, radius, d, params, reps, master_seed, 0)?;
    let b = min_inverse_rss_sample(
        model_b,
        sigma,
        radius,
        d,
        params,
        reps,
        master_seed,
        reps as u64,
    )?;
    two_sample_ks(&a, &b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn ks_of_identical_samples_is_zero() {
        let xs = vec![1.0, 2.0, 3.0, 4.0];
        let ys = vec![2.0, 1.0, 4.0, 3.0];
        assert_abs_diff_eq!(two_sample_ks(&xs, &ys).unwrap(), 0.0);
    }

    #[test]
    fn ks_known_small_cases() {
        let xs = vec![1.0, 1.0, 4.0, 4.0];
        let ys = vec![1.0, 1.0, 1.0, 4.0];
        assert_abs_diff_eq!(two_sample_ks(&xs, &ys).unwrap(), 0.25);

        let xs = vec![0.42, 0.24, 0.86, 0.85, 0.82, 0.82, 0.25, 0.78, 0.13, 0.27];
        let ys = vec![0.24, 0.27, 0.87, 0.29, 0.57, 0.44, 0.5, 0.0, 0.56, 0.03];
        assert_abs_diff_eq!(two_sample_ks(&xs, &ys).unwrap(), 0.4);

        // disjoint supports: maximal distance
        assert_abs_diff_eq!(
            two_sample_ks(&[1.0, 2.0], &[5.0, 6.0, 7.0]).unwrap(),
            1.0
        );
    }

    #[test]
    fn critical_value_formula() {
        // c(0.01) ~ 1.6276
        let crit = ks_critical::<f64>(1000, 1000, 0.01);
        assert_abs_diff_eq!(crit, 1.6276 * (2.0f64 / 1000.0).sqrt(), epsilon = 1e-4);
    }

    #[test]
    fn same_model_stays_below_critical_value() {
        let params = ChannelParams::urban_default(12.0).unwrap();
        let model = ProcessModel::Ppp { lambda: 1.0 };
        let mut below = 0;
        let runs = 12;
        for run in 0..runs {
            let ks = ks_min_inverse_rss(
                &model,
                &model,
                params.sigma,
                10.0,
                2,
                &params,
                500,
                1000 + run,
            )
            .unwrap();
            if ks < ks_critical(500, 500, 0.01) {
                below += 1;
            }
        }
        assert!(below * 100 >= runs * 95, "{below}/{runs} below critical");
    }

    #[test]
    fn different_intensities_are_distinguishable() {
        let params = ChannelParams::urban_default(12.0).unwrap();
        let a = ProcessModel::Ppp { lambda: 1.0 };
        let b = ProcessModel::Ppp { lambda: 5.0 };
        let ks = ks_min_inverse_rss(&a, &b, params.sigma, 10.0, 2, &params, 500, 42).unwrap();
        assert!(
            ks > ks_critical(500, 500, 0.01),
            "KS {ks} should reject equal laws"
        );
    }
}

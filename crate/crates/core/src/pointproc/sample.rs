//! Exact samplers for the deployment models, restricted to a ball.
//!
//! Thinning- and cluster-based models are built in a buffered ball and
//! clipped to the target window, so boundary interactions are unbiased:
//! Matern parents get a `rho_c` buffer, cluster parents `rho_c` (MCP) or
//! `6 sigma_c` (TCP, truncating less than 1e-8 of the daughter mass).

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Gamma, Poisson};

use super::grid::NeighborGrid;
use super::{PointPattern, ProcessModel, Provenance};
use crate::error::{Error, Result};
use crate::geometry::{ball_volume, CartesianPoint};
use crate::num::{as_f64, real, Real};
use crate::rng::seeded_rng;

/// Gaussian-tail truncation for Thomas cluster parents, in units of sigma_c.
const TCP_BUFFER_SIGMAS: f64 = 6.0;

fn check_window<T: Real>(radius: T, d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::UnsupportedDimension(d));
    }
    if !(radius.is_finite() && radius > T::zero()) {
        return Err(Error::invalid("window radius must be positive"));
    }
    Ok(())
}

fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    Poisson::new(mean).expect("positive Poisson mean").sample(rng) as usize
}

/// One point uniform in the d-ball of radius `radius`: a normalized Gaussian
/// direction scaled by `radius * U^(1/d)`.
pub fn sample_uniform_in_ball<T: Real, R: Rng + ?Sized>(
    d: usize,
    radius: T,
    rng: &mut R,
) -> CartesianPoint<T> {
    let direction: Vec<f64> = loop {
        let v: Vec<f64> = (0..d)
            .map(|_| rand_distr::StandardNormal.sample(rng))
            .collect();
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            break v.iter().map(|x| x / norm).collect();
        }
    };
    let u: f64 = loop {
        let u = rng.random::<f64>();
        if u > 0.0 {
            break u;
        }
    };
    let scale = radius * real::<T>(u.powf(1.0 / d as f64));
    CartesianPoint {
        coords: direction.into_iter().map(|c| scale * real::<T>(c)).collect(),
    }
}

fn uniform_points_in_ball<T: Real, R: Rng + ?Sized>(
    n: usize,
    d: usize,
    radius: T,
    rng: &mut R,
) -> Vec<CartesianPoint<T>> {
    (0..n).map(|_| sample_uniform_in_ball(d, radius, rng)).collect()
}

/// Homogeneous PPP on the ball: Poisson(lambda V_d(R)) points, i.i.d. uniform.
pub fn sample_ppp<T: Real, R: Rng + ?Sized>(
    lambda: T,
    radius: T,
    d: usize,
    rng: &mut R,
) -> Result<PointPattern<T>> {
    check_window(radius, d)?;
    let model = ProcessModel::Ppp { lambda };
    model.validate(d)?;
    let mean = as_f64(lambda * ball_volume(d, radius)?);
    let n = poisson_count(mean, rng);
    Ok(PointPattern {
        dimension: d,
        window_radius: radius,
        points: uniform_points_in_ball(n, d, radius, rng),
        provenance: Provenance::Model(model),
        seed: None,
    })
}

/// PPP conditioned on its count: exactly `n` i.i.d. uniform points.
pub fn sample_ppp_conditional<T: Real, R: Rng + ?Sized>(
    n: usize,
    radius: T,
    d: usize,
    rng: &mut R,
) -> Result<PointPattern<T>> {
    check_window(radius, d)?;
    if n == 0 {
        return Err(Error::invalid("conditional sample needs n >= 1"));
    }
    Ok(PointPattern {
        dimension: d,
        window_radius: radius,
        points: uniform_points_in_ball(n, d, radius, rng),
        provenance: Provenance::ConditionalPpp { count: n },
        seed: None,
    })
}

enum MaternKind {
    TypeI,
    TypeII,
}

fn sample_matern<T: Real, R: Rng + ?Sized>(
    kind: MaternKind,
    lambda_p: T,
    rho_c: T,
    radius: T,
    d: usize,
    rng: &mut R,
) -> Result<PointPattern<T>> {
    check_window(radius, d)?;
    let buffered = radius + rho_c;
    let mean = as_f64(lambda_p * ball_volume(d, buffered)?);
    let n_parents = poisson_count(mean, rng);
    let parents = uniform_points_in_ball(n_parents, d, buffered, rng);
    let ages: Vec<f64> = match kind {
        MaternKind::TypeI => Vec::new(),
        MaternKind::TypeII => (0..n_parents).map(|_| rng.random::<f64>()).collect(),
    };

    let grid = NeighborGrid::build(&parents, as_f64(rho_c), as_f64(buffered), d);
    let mut points = Vec::new();
    for (i, p) in parents.iter().enumerate() {
        let mut keep = true;
        grid.for_each_candidate(p, |j| {
            if j == i || !keep {
                return;
            }
            if parents[j].distance_to(p) <= rho_c {
                keep = match kind {
                    MaternKind::TypeI => false,
                    // smallest age wins; ties (probability zero) break by index
                    MaternKind::TypeII => (ages[i], i) < (ages[j], j),
                };
            }
        });
        if keep && p.norm() <= radius {
            points.push(p.clone());
        }
    }

    Ok(PointPattern {
        dimension: d,
        window_radius: radius,
        points,
        provenance: Provenance::Model(match kind {
            MaternKind::TypeI => ProcessModel::MaternI { lambda_p, rho_c },
            MaternKind::TypeII => ProcessModel::MaternII { lambda_p, rho_c },
        }),
        seed: None,
    })
}

/// Matern Type I hardcore process (dependent thinning of a parent PPP).
pub fn sample_matern_i<T: Real, R: Rng + ?Sized>(
    lambda_p: T,
    rho_c: T,
    radius: T,
    d: usize,
    rng: &mut R,
) -> Result<PointPattern<T>> {
    ProcessModel::MaternI { lambda_p, rho_c }.validate(d)?;
    sample_matern(MaternKind::TypeI, lambda_p, rho_c, radius, d, rng)
}

/// Matern Type II hardcore process (age-mark thinning of a parent PPP).
pub fn sample_matern_ii<T: Real, R: Rng + ?Sized>(
    lambda_p: T,
    rho_c: T,
    radius: T,
    d: usize,
    rng: &mut R,
) -> Result<PointPattern<T>> {
    ProcessModel::MaternII { lambda_p, rho_c }.validate(d)?;
    sample_matern(MaternKind::TypeII, lambda_p, rho_c, radius, d, rng)
}

fn sample_cluster<T: Real, R: Rng + ?Sized>(
    model: ProcessModel<T>,
    radius: T,
    d: usize,
    rng: &mut R,
) -> Result<PointPattern<T>> {
    check_window(radius, d)?;
    model.validate(d)?;
    let (lambda_p, c_bar, buffer) = match model {
        ProcessModel::Mcp {
            lambda_p,
            c_bar,
            rho_c,
        } => (lambda_p, c_bar, rho_c),
        ProcessModel::Tcp {
            lambda_p,
            c_bar,
            sigma_c,
        } => (lambda_p, c_bar, real::<T>(TCP_BUFFER_SIGMAS) * sigma_c),
        _ => unreachable!("sample_cluster only handles MCP/TCP"),
    };
    let buffered = radius + buffer;
    let n_parents = poisson_count(as_f64(lambda_p * ball_volume(d, buffered)?), rng);
    let parents = uniform_points_in_ball::<T, R>(n_parents, d, buffered, rng);

    let mut points = Vec::new();
    for parent in &parents {
        let k = poisson_count(as_f64(c_bar), rng);
        for _ in 0..k {
            let offset: Vec<T> = match model {
                ProcessModel::Mcp { rho_c, .. } => {
                    sample_uniform_in_ball::<T, R>(d, rho_c, rng).coords
                }
                ProcessModel::Tcp { sigma_c, .. } => (0..d)
                    .map(|_| sigma_c * real::<T>(rand_distr::StandardNormal.sample(rng)))
                    .collect(),
                _ => unreachable!(),
            };
            let daughter = CartesianPoint {
                coords: parent
                    .coords
                    .iter()
                    .zip(&offset)
                    .map(|(&p, &o)| p + o)
                    .collect(),
            };
            if daughter.norm() <= radius {
                points.push(daughter);
            }
        }
    }

    Ok(PointPattern {
        dimension: d,
        window_radius: radius,
        points,
        provenance: Provenance::Model(model),
        seed: None,
    })
}

/// Matern cluster process: daughters only, uniform in a ball around each
/// parent.
pub fn sample_matern_cluster<T: Real, R: Rng + ?Sized>(
    lambda_p: T,
    c_bar: T,
    rho_c: T,
    radius: T,
    d: usize,
    rng: &mut R,
) -> Result<PointPattern<T>> {
    sample_cluster(
        ProcessModel::Mcp {
            lambda_p,
            c_bar,
            rho_c,
        },
        radius,
        d,
        rng,
    )
}

/// Thomas cluster process: daughters only, isotropic Gaussian scatter.
pub fn sample_thomas<T: Real, R: Rng + ?Sized>(
    lambda_p: T,
    c_bar: T,
    sigma_c: T,
    radius: T,
    d: usize,
    rng: &mut R,
) -> Result<PointPattern<T>> {
    sample_cluster(
        ProcessModel::Tcp {
            lambda_p,
            c_bar,
            sigma_c,
        },
        radius,
        d,
        rng,
    )
}

/// Smallest index beyond which Kostlan radii land outside the disc with
/// probability below 1e-8, certified by the Chernoff bound
/// `P(Gamma(i,1) <= x) <= exp(i - x - i ln(i/x))` for `i > x`.
fn kostlan_truncation(x: f64) -> u64 {
    let tol_ln = 1e-8f64.ln();
    let bound_ln = |i: f64| i - x - i * (i / x).ln();
    let mut lo = x.ceil() + 1.0;
    if bound_ln(lo) <= tol_ln {
        return lo as u64;
    }
    let mut hi = (x + 10.0 * x.sqrt().max(3.0)).ceil() + 10.0;
    while bound_ln(hi) > tol_ln {
        hi = hi * 1.5 + 10.0;
    }
    while hi - lo > 1.0 {
        let mid = ((lo + hi) / 2.0).floor();
        if bound_ln(mid) <= tol_ln {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi as u64
}

/// alpha-Ginibre process on the disc via the Kostlan representation: squared
/// radii `Gamma(i, alpha/(pi lambda))`, i.i.d. uniform angles, independent
/// alpha-thinning, clipped to the disc. Planar only.
pub fn sample_alpha_ginibre<T: Real, R: Rng + ?Sized>(
    alpha: T,
    lambda: T,
    radius: T,
    rng: &mut R,
) -> Result<PointPattern<T>> {
    let model = ProcessModel::AlphaGinibre { alpha, lambda };
    model.validate(2)?;
    check_window(radius, 2)?;

    let a = as_f64(alpha);
    let l = as_f64(lambda);
    let r = as_f64(radius);
    let scale = a / (PI * l);
    let r2_max = r * r;
    let m = kostlan_truncation(r2_max / scale);

    let mut points = Vec::new();
    for i in 1..=m {
        let r2: f64 = Gamma::new(i as f64, scale)
            .expect("valid gamma parameters")
            .sample(rng);
        let retained = rng.random::<f64>() < a;
        if retained && r2 <= r2_max {
            let phi = rng.random::<f64>() * 2.0 * PI;
            let rad = r2.sqrt();
            points.push(CartesianPoint {
                coords: vec![real::<T>(rad * phi.cos()), real::<T>(rad * phi.sin())],
            });
        }
    }

    Ok(PointPattern {
        dimension: 2,
        window_radius: radius,
        points,
        provenance: Provenance::Model(model),
        seed: None,
    })
}

/// Dispatch on the model tag.
pub fn sample_model<T: Real, R: Rng + ?Sized>(
    model: &ProcessModel<T>,
    radius: T,
    d: usize,
    rng: &mut R,
) -> Result<PointPattern<T>> {
    match *model {
        ProcessModel::Ppp { lambda } => sample_ppp(lambda, radius, d, rng),
        ProcessModel::MaternI { lambda_p, rho_c } => {
            sample_matern_i(lambda_p, rho_c, radius, d, rng)
        }
        ProcessModel::MaternII { lambda_p, rho_c } => {
            sample_matern_ii(lambda_p, rho_c, radius, d, rng)
        }
        ProcessModel::Mcp {
            lambda_p,
            c_bar,
            rho_c,
        } => sample_matern_cluster(lambda_p, c_bar, rho_c, radius, d, rng),
        ProcessModel::Tcp {
            lambda_p,
            c_bar,
            sigma_c,
        } => sample_thomas(lambda_p, c_bar, sigma_c, radius, d, rng),
        ProcessModel::AlphaGinibre { alpha, lambda } => {
            if d != 2 {
                return Err(Error::UnsupportedDimension(d));
            }
            sample_alpha_ginibre(alpha, lambda, radius, rng)
        }
    }
}

/// Seeded variant that records the seed on the pattern.
pub fn sample_model_seeded<T: Real>(
    model: &ProcessModel<T>,
    radius: T,
    d: usize,
    seed: u64,
) -> Result<PointPattern<T>> {
    let mut rng = seeded_rng(seed);
    let mut pattern = sample_model(model, radius, d, &mut rng)?;
    pattern.seed = Some(seed);
    Ok(pattern)
}

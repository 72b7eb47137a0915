//! Deployment models: samplers restricted to a ball, stationary intensities,
//! pair correlation functions, and the short-range-dependency integral.

mod estimate;
mod grid;
mod paircorr;
mod sample;

pub use estimate::{estimate_pair_correlation, PairCorrelationEstimate};
pub use paircorr::{pair_correlation, srd_integral};
pub use sample::{
    sample_alpha_ginibre, sample_matern_cluster, sample_matern_i, sample_matern_ii, sample_model,
    sample_model_seeded, sample_ppp, sample_ppp_conditional, sample_thomas, sample_uniform_in_ball,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ball_volume, CartesianPoint};
use crate::num::{as_f64, Real};

/// The six deployment models and their parameters.
///
/// Intensities are points per km^d; radii and scatter scales are km.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ProcessModel<T> {
    /// Homogeneous Poisson point process.
    Ppp { lambda: T },
    /// Matern Type I hardcore: delete every parent with a neighbour within
    /// `rho_c`.
    MaternI { lambda_p: T, rho_c: T },
    /// Matern Type II hardcore: keep a parent iff it has the smallest age
    /// among its neighbours within `rho_c`.
    MaternII { lambda_p: T, rho_c: T },
    /// Matern cluster process: Poisson(`c_bar`) daughters uniform in a ball
    /// of radius `rho_c` around each parent.
    Mcp { lambda_p: T, c_bar: T, rho_c: T },
    /// Thomas cluster process: Poisson(`c_bar`) daughters scattered with an
    /// isotropic normal of scale `sigma_c` around each parent.
    Tcp { lambda_p: T, c_bar: T, sigma_c: T },
    /// alpha-Ginibre determinantal process (planar only), sampled through the
    /// Kostlan radial representation plus independent alpha-thinning.
    AlphaGinibre { alpha: T, lambda: T },
}

impl<T: Real> ProcessModel<T> {
    /// Short tag used in file output.
    pub fn name(&self) -> &'static str {
        match self {
            ProcessModel::Ppp { .. } => "ppp",
            ProcessModel::MaternI { .. } => "matern1",
            ProcessModel::MaternII { .. } => "matern2",
            ProcessModel::Mcp { .. } => "mcp",
            ProcessModel::Tcp { .. } => "tcp",
            ProcessModel::AlphaGinibre { .. } => "ginibre",
        }
    }

    /// Check parameter positivity and dimension restrictions.
    pub fn validate(&self, d: usize) -> Result<()> {
        if d < 2 {
            return Err(Error::UnsupportedDimension(d));
        }
        let pos = |x: T, what: &str| {
            if x.is_finite() && x > T::zero() {
                Ok(())
            } else {
                Err(Error::invalid(format!("{what} must be positive")))
            }
        };
        match *self {
            ProcessModel::Ppp { lambda } => pos(lambda, "lambda"),
            ProcessModel::MaternI { lambda_p, rho_c } | ProcessModel::MaternII { lambda_p, rho_c } => {
                pos(lambda_p, "lambda_p")?;
                pos(rho_c, "rho_c")
            }
            ProcessModel::Mcp {
                lambda_p,
                c_bar,
                rho_c,
            } => {
                pos(lambda_p, "lambda_p")?;
                pos(c_bar, "c_bar")?;
                pos(rho_c, "rho_c")
            }
            ProcessModel::Tcp {
                lambda_p,
                c_bar,
                sigma_c,
            } => {
                pos(lambda_p, "lambda_p")?;
                pos(c_bar, "c_bar")?;
                pos(sigma_c, "sigma_c")
            }
            ProcessModel::AlphaGinibre { alpha, lambda } => {
                if d != 2 {
                    return Err(Error::UnsupportedDimension(d));
                }
                pos(lambda, "lambda")?;
                if alpha > T::zero() && alpha <= T::one() {
                    Ok(())
                } else {
                    Err(Error::invalid("alpha must lie in (0, 1]"))
                }
            }
        }
    }

    /// Re-parametrize the model so its stationary intensity equals `target`,
    /// keeping the interaction structure: PPP and Ginibre set `lambda`
    /// directly, Matern II inverts its intensity formula for the parent
    /// intensity, and the cluster models adjust the mean cluster size at a
    /// fixed parent intensity. Matern I has no standard matching rule and is
    /// rejected.
    pub fn with_intensity(&self, target: T, d: usize) -> Result<Self> {
        if !(target.is_finite() && target > T::zero()) {
            return Err(Error::invalid("target intensity must be positive"));
        }
        Ok(match *self {
            ProcessModel::Ppp { .. } => ProcessModel::Ppp { lambda: target },
            ProcessModel::MaternII { rho_c, .. } => ProcessModel::MaternII {
                lambda_p: match_matern_ii_parent(target, rho_c, d)?,
                rho_c,
            },
            ProcessModel::Mcp {
                lambda_p, rho_c, ..
            } => ProcessModel::Mcp {
                lambda_p,
                c_bar: target / lambda_p,
                rho_c,
            },
            ProcessModel::Tcp {
                lambda_p, sigma_c, ..
            } => ProcessModel::Tcp {
                lambda_p,
                c_bar: target / lambda_p,
                sigma_c,
            },
            ProcessModel::AlphaGinibre { alpha, .. } => ProcessModel::AlphaGinibre {
                alpha,
                lambda: target,
            },
            ProcessModel::MaternI { .. } => {
                return Err(Error::invalid(
                    "no intensity matching rule for Matern I; choose lambda_p directly",
                ))
            }
        })
    }

    /// Stationary intensity of the model in dimension `d`.
    pub fn effective_intensity(&self, d: usize) -> Result<T> {
        self.validate(d)?;
        Ok(match *self {
            ProcessModel::Ppp { lambda } => lambda,
            ProcessModel::MaternI { lambda_p, rho_c } => {
                let v = ball_volume(d, rho_c)?;
                lambda_p * (-lambda_p * v).exp()
            }
            ProcessModel::MaternII { lambda_p, rho_c } => {
                let v = ball_volume(d, rho_c)?;
                (T::one() - (-lambda_p * v).exp()) / v
            }
            ProcessModel::Mcp {
                lambda_p, c_bar, ..
            }
            | ProcessModel::Tcp {
                lambda_p, c_bar, ..
            } => lambda_p * c_bar,
            ProcessModel::AlphaGinibre { lambda, .. } => lambda,
        })
    }
}

/// Invert the Matern II intensity formula: the parent intensity whose type-II
/// thinning yields `target_lambda`. Errors when the target is at or above the
/// saturation bound `1/V_d(rho_c)`.
pub fn match_matern_ii_parent<T: Real>(target_lambda: T, rho_c: T, d: usize) -> Result<T> {
    if !(target_lambda.is_finite() && target_lambda > T::zero()) {
        return Err(Error::invalid("target intensity must be positive"));
    }
    let v = ball_volume(d, rho_c)?;
    if !(rho_c > T::zero()) {
        return Err(Error::invalid("rho_c must be positive"));
    }
    let tv = target_lambda * v;
    if tv >= T::one() {
        return Err(Error::InfeasibleDensity {
            target: as_f64(target_lambda),
            saturation: as_f64(T::one() / v),
        });
    }
    Ok(-(T::one() - tv).ln() / v)
}

/// How a pattern was produced: one of the deployment models, or a Poisson
/// pattern conditioned on its point count.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance<T> {
    Model(ProcessModel<T>),
    ConditionalPpp { count: usize },
}

/// A finite point configuration inside the observation ball.
#[derive(Debug, Clone)]
pub struct PointPattern<T> {
    pub dimension: usize,
    /// Radius of the observation ball (km).
    pub window_radius: T,
    pub points: Vec<CartesianPoint<T>>,
    pub provenance: Provenance<T>,
    /// Master seed, when the pattern came from a seeded entry point.
    pub seed: Option<u64>,
}

impl<T: Real> PointPattern<T> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Minimum pairwise distance, or `None` for patterns with fewer than two
    /// points. Quadratic; intended for validation.
    pub fn min_pairwise_distance(&self) -> Option<T> {
        if self.points.len() < 2 {
            return None;
        }
        let mut best = T::infinity();
        for i in 0..self.points.len() {
            for j in i + 1..self.points.len() {
                let dist = self.points[i].distance_to(&self.points[j]);
                if dist < best {
                    best = dist;
                }
            }
        }
        Some(best)
    }
}

//! Closed-form pair correlation functions and the short-range-dependency
//! integral `int_0^inf |h(r) - 1| r^{d-1} dr`.

use super::ProcessModel;
use crate::error::{Error, Result};
use crate::num::{as_f64, real, Real};
use crate::quad::integrate_segments;
use crate::geometry::{ball_volume, lens_volume, union_volume};

/// Stationary isotropic pair correlation `h_SI(r)` of the model.
///
/// `r = 0` is accepted where the formula extends by continuity.
pub fn pair_correlation<T: Real>(model: &ProcessModel<T>, d: usize, r: T) -> Result<T> {
    model.validate(d)?;
    if !(r.is_finite() && r >= T::zero()) {
        return Err(Error::invalid("pair distance must be non-negative"));
    }
    let two = real::<T>(2.0);
    Ok(match *model {
        ProcessModel::Ppp { .. } => T::one(),
        ProcessModel::MaternI { lambda_p, rho_c } => {
            if r <= rho_c {
                T::zero()
            } else if r >= two * rho_c {
                T::one()
            } else {
                (lambda_p * lens_volume(d, rho_c, r)?).exp()
            }
        }
        ProcessModel::MaternII { lambda_p, rho_c } => {
            if r <= rho_c {
                T::zero()
            } else if r >= two * rho_c {
                // analytic limit of the formula once the balls stop overlapping
                T::one()
            } else {
                let v = ball_volume(d, rho_c)?;
                let vu = union_volume(d, rho_c, r)?;
                let lam2 = model.effective_intensity(d)?;
                let ev = T::one() - (-lambda_p * v).exp();
                let evu = T::one() - (-lambda_p * vu).exp();
                (two * vu * ev - two * v * evu) / (lam2 * lam2 * v * vu * (vu - v))
            }
        }
        ProcessModel::Mcp {
            lambda_p, rho_c, ..
        } => {
            let v = ball_volume(d, rho_c)?;
            T::one() + lens_volume(d, rho_c, r)? / (lambda_p * v * v)
        }
        ProcessModel::Tcp {
            lambda_p, sigma_c, ..
        } => {
            let four = real::<T>(4.0);
            let scatter = four * T::PI() * sigma_c * sigma_c;
            let denom = lambda_p * scatter.powf(real::<T>(d as f64 / 2.0));
            T::one() + (-(r * r) / (four * sigma_c * sigma_c)).exp() / denom
        }
        ProcessModel::AlphaGinibre { alpha, lambda } => {
            T::one() - (-T::PI() * lambda * r * r / alpha).exp()
        }
    })
}

/// Integration cut points covering the support of `|h - 1|`, with kinks of
/// the closed forms placed on segment boundaries. `None` means the integral
/// is identically zero.
fn srd_cuts<T: Real>(model: &ProcessModel<T>, _d: usize) -> Option<Vec<T>> {
    let two = real::<T>(2.0);
    match *model {
        ProcessModel::Ppp { .. } => None,
        ProcessModel::MaternI { rho_c, .. } | ProcessModel::MaternII { rho_c, .. } => {
            Some(vec![T::zero(), rho_c, two * rho_c])
        }
        ProcessModel::Mcp { rho_c, .. } => Some(vec![T::zero(), rho_c, two * rho_c]),
        // Gaussian-type tails: truncate where exp(-(r/s)^2-style) < 1e-110
        ProcessModel::Tcp { sigma_c, .. } => {
            let edge = real::<T>(16.0) * sigma_c;
            Some(vec![T::zero(), edge / two, edge])
        }
        ProcessModel::AlphaGinibre { alpha, lambda } => {
            let s = (alpha / (T::PI() * lambda)).sqrt();
            let edge = real::<T>(16.0) * s;
            Some(vec![T::zero(), edge / two, edge])
        }
    }
}

/// `int_0^inf |h_SI(r) - 1| r^{d-1} dr`, the quantity whose finiteness is the
/// short-range-dependency condition. Evaluated by adaptive quadrature over
/// the model's interaction range (`h == 1` beyond it, exactly or to below
/// 1e-100).
pub fn srd_integral<T: Real>(model: &ProcessModel<T>, d: usize) -> Result<T> {
    model.validate(d)?;
    let Some(cuts) = srd_cuts(model, d) else {
        return Ok(T::zero());
    };
    let integrand = |r: T| {
        let h = pair_correlation(model, d, r).expect("validated model");
        (h - T::one()).abs() * r.powi(d as i32 - 1)
    };
    // absolute tolerance scaled to the integration range
    let span = *cuts.last().expect("non-empty cuts");
    let tol = real::<T>(1e-12) * span.powi(d as i32).max(T::one());
    integrate_segments(integrand, &cuts, tol)
}

/// Convenience: `as_f64` of the SRD integral, used by reporting code.
pub fn srd_integral_f64<T: Real>(model: &ProcessModel<T>, d: usize) -> Result<f64> {
    srd_integral(model, d).map(as_f64)
}

//! d-dimensional coordinate transforms and ball/lens/union volumes.
//!
//! Positions are Cartesian vectors in km. The hyperspherical representation
//! `(r, psi_1, ..., psi_{d-1})` follows the convention that the first `d-2`
//! angles (elevations) lie in `[0, pi]` and the last (azimuth) in `[0, 2*pi)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{real, Real};

/// A sensor or target location in Cartesian coordinates (km).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CartesianPoint<T> {
    pub coords: Vec<T>,
}

impl<T: Real> CartesianPoint<T> {
    /// Build a point, checking that the dimension is at least 2 and all
    /// coordinates are finite.
    pub fn new(coords: Vec<T>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::UnsupportedDimension(coords.len()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("non-finite coordinate"));
        }
        Ok(CartesianPoint { coords })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Euclidean norm (distance to the origin).
    pub fn norm(&self) -> T {
        self.coords
            .iter()
            .fold(T::zero(), |acc, &c| acc + c * c)
            .sqrt()
    }

    pub fn distance_to(&self, other: &Self) -> T {
        self.coords
            .iter()
            .zip(&other.coords)
            .fold(T::zero(), |acc, (&a, &b)| acc + (a - b) * (a - b))
            .sqrt()
    }
}

/// Hyperspherical coordinates of a non-origin point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypersphericalCoord<T> {
    /// Radial distance, strictly positive (km).
    pub r: T,
    /// The `d-2` elevation angles, each in `[0, pi]` (rad).
    pub elevations: Vec<T>,
    /// Azimuthal angle in `[0, 2*pi)` (rad).
    pub azimuth: T,
}

impl<T: Real> HypersphericalCoord<T> {
    pub fn new(r: T, elevations: Vec<T>, azimuth: T) -> Result<Self> {
        if !(r.is_finite() && r > T::zero()) {
            return Err(Error::invalid("radial coordinate must be positive"));
        }
        let pi = T::PI();
        if elevations.iter().any(|&e| !(e >= T::zero() && e <= pi)) {
            return Err(Error::invalid("elevation angle outside [0, pi]"));
        }
        let two_pi = pi + pi;
        if !(azimuth >= T::zero() && azimuth < two_pi) {
            return Err(Error::invalid("azimuth outside [0, 2*pi)"));
        }
        Ok(HypersphericalCoord {
            r,
            elevations,
            azimuth,
        })
    }

    pub fn dim(&self) -> usize {
        self.elevations.len() + 2
    }
}

/// Forward transform: Cartesian to hyperspherical.
///
/// Angles use the full-quadrant arctangent, so elevations land in `[0, pi]`
/// and the azimuth in `[0, 2*pi)`. When the last two coordinates are both
/// zero the azimuth is taken to be 0.
pub fn cart_to_hyper<T: Real>(p: &CartesianPoint<T>) -> Result<HypersphericalCoord<T>> {
    let d = p.dim();
    if d < 2 {
        return Err(Error::UnsupportedDimension(d));
    }
    if p.coords.iter().any(|c| !c.is_finite()) {
        return Err(Error::invalid("non-finite coordinate"));
    }

    // tail[j] = sqrt(x_j^2 + ... + x_{d-1}^2), accumulated back to front.
    let mut tail = vec![T::zero(); d + 1];
    for j in (0..d).rev() {
        tail[j] = tail[j + 1] + p.coords[j] * p.coords[j];
    }
    let tail: Vec<T> = tail.into_iter().map(|s| s.sqrt()).collect();

    let r = tail[0];
    if r == T::zero() {
        return Err(Error::ZeroVector);
    }

    let mut elevations = Vec::with_capacity(d - 2);
    for j in 0..d - 2 {
        // atan2(non-negative, x) lies in [0, pi].
        elevations.push(tail[j + 1].atan2(p.coords[j]));
    }

    let mut azimuth = p.coords[d - 1].atan2(p.coords[d - 2]);
    let two_pi = T::PI() + T::PI();
    if azimuth < T::zero() {
        azimuth += two_pi;
    }
    if azimuth >= two_pi || azimuth == T::zero() {
        azimuth = T::zero(); // normalizes -0.0 and the wrap-around boundary
    }

    Ok(HypersphericalCoord {
        r,
        elevations,
        azimuth,
    })
}

/// Inverse transform: hyperspherical back to Cartesian.
pub fn hyper_to_cart<T: Real>(h: &HypersphericalCoord<T>) -> CartesianPoint<T> {
    let d = h.dim();
    let mut coords = Vec::with_capacity(d);
    let mut sin_prod = T::one();
    for &psi in &h.elevations {
        coords.push(h.r * psi.cos() * sin_prod);
        sin_prod *= psi.sin();
    }
    coords.push(h.r * h.azimuth.cos() * sin_prod);
    coords.push(h.r * h.azimuth.sin() * sin_prod);
    CartesianPoint { coords }
}

/// Gamma(m/2) for integer m >= 1, computed exactly by the recursion
/// Gamma(x+1) = x * Gamma(x) from Gamma(1/2) = sqrt(pi) and Gamma(1) = 1.
fn gamma_half<T: Real>(mut m: usize) -> T {
    let mut acc = T::one();
    while m > 2 {
        m -= 2;
        acc *= real::<T>(m as f64 / 2.0);
    }
    if m == 1 {
        acc * T::PI().sqrt()
    } else {
        acc
    }
}

/// Volume of the d-dimensional ball of radius `r`:
/// `pi^{d/2} r^d / Gamma(d/2 + 1)`.
pub fn ball_volume<T: Real>(d: usize, r: T) -> Result<T> {
    if d < 1 {
        return Err(Error::UnsupportedDimension(d));
    }
    if !(r.is_finite() && r >= T::zero()) {
        return Err(Error::invalid("ball radius must be non-negative"));
    }
    let mut num = T::PI().powi((d / 2) as i32);
    if d % 2 == 1 {
        num *= T::PI().sqrt();
    }
    Ok(num / gamma_half::<T>(d + 2) * r.powi(d as i32))
}

fn check_lens_args<T: Real>(rho_c: T, rho: T) -> Result<()> {
    if !(rho_c.is_finite() && rho_c > T::zero()) {
        return Err(Error::invalid("hardcore/cluster radius must be positive"));
    }
    if !(rho.is_finite() && rho >= T::zero()) {
        return Err(Error::invalid("midpoint distance must be non-negative"));
    }
    Ok(())
}

/// Intersection volume of two d-balls of radius `rho_c` whose centres are
/// `rho` apart. Closed forms exist for d in {2, 3}; other dimensions are an
/// unsupported-dimension error. Zero when `rho >= 2 * rho_c`.
pub fn lens_volume<T: Real>(d: usize, rho_c: T, rho: T) -> Result<T> {
    if d != 2 && d != 3 {
        return Err(Error::UnsupportedDimension(d));
    }
    check_lens_args(rho_c, rho)?;
    let two = real::<T>(2.0);
    if rho >= two * rho_c {
        return Ok(T::zero());
    }
    match d {
        2 => {
            let half = rho / (two * rho_c);
            let chord = (real::<T>(4.0) * rho_c * rho_c - rho * rho).max(T::zero());
            Ok(two * rho_c * rho_c * half.acos() - rho / two * chord.sqrt())
        }
        _ => {
            let a = real::<T>(4.0) * T::PI() * rho_c.powi(3) / real::<T>(3.0);
            let t = rho / rho_c;
            Ok(a * (T::one() - real::<T>(0.75) * t + t.powi(3) / real::<T>(16.0)))
        }
    }
}

/// Union volume of the same two balls: `2 V_d(rho_c) - A_d(rho_c, rho)`.
pub fn union_volume<T: Real>(d: usize, rho_c: T, rho: T) -> Result<T> {
    let lens = lens_volume(d, rho_c, rho)?;
    Ok(real::<T>(2.0) * ball_volume(d, rho_c)? - lens)
}

//! Adaptive Simpson quadrature for the short-range-dependency integrals.

use crate::error::{Error, Result};
use crate::num::{real, Real};

const MAX_DEPTH: u32 = 60;

fn simpson<T: Real, F: Fn(T) -> T>(f: &F, a: T, fa: T, b: T, fb: T) -> (T, T, T) {
    let m = (a + b) / real::<T>(2.0);
    let fm = f(m);
    let h = (b - a) / real::<T>(6.0);
    (m, fm, h * (fa + real::<T>(4.0) * fm + fb))
}

#[allow(clippy::too_many_arguments)]
fn adapt<T: Real, F: Fn(T) -> T>(
    f: &F,
    a: T,
    fa: T,
    b: T,
    fb: T,
    whole: T,
    m: T,
    fm: T,
    tol: T,
    depth: u32,
) -> Result<T> {
    let (lm, flm, left) = simpson(f, a, fa, m, fm);
    let (rm, frm, right) = simpson(f, m, fm, b, fb);
    let delta = left + right - whole;
    if delta.abs() <= real::<T>(15.0) * tol {
        return Ok(left + right + delta / real::<T>(15.0));
    }
    if depth >= MAX_DEPTH {
        return Err(Error::Quadrature(format!(
            "max depth reached on [{a}, {b}] with residual {delta:e}"
        )));
    }
    let half_tol = tol / real::<T>(2.0);
    let l = adapt(f, a, fa, m, fm, left, lm, flm, half_tol, depth + 1)?;
    let r = adapt(f, m, fm, b, fb, right, rm, frm, half_tol, depth + 1)?;
    Ok(l + r)
}

/// Integrate `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, tol: T) -> Result<T> {
    if !(a.is_finite() && b.is_finite()) || b < a {
        return Err(Error::invalid("bad integration interval"));
    }
    if a == b {
        return Ok(T::zero());
    }
    let fa = f(a);
    let fb = f(b);
    let (m, fm, whole) = simpson(&f, a, fa, b, fb);
    adapt(&f, a, fa, b, fb, whole, m, fm, tol, 0)
}

/// Integrate `f` over a sequence of contiguous segments (used to keep kinks
/// at segment boundaries away from the adaptive refinement).
pub fn integrate_segments<T: Real, F: Fn(T) -> T>(f: F, cuts: &[T], tol: T) -> Result<T> {
    let mut total = T::zero();
    for w in cuts.windows(2) {
        total += integrate(&f, w[0], w[1], tol)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate(|x: f64| x * x * x, 0.0, 2.0, 1e-12).unwrap();
        assert_abs_diff_eq!(v, 4.0, epsilon = 1e-12);
    }

    #[test]
    fn gaussian_tail_integral() {
        // int_0^inf r e^{-r^2/(4 s^2)} dr = 2 s^2
        let s = 0.3f64;
        let v = integrate(|r: f64| r * (-r * r / (4.0 * s * s)).exp(), 0.0, 16.0 * s, 1e-13)
            .unwrap();
        assert_abs_diff_eq!(v, 2.0 * s * s, epsilon = 1e-10);
    }

    #[test]
    fn segments_handle_kinks() {
        let f = |x: f64| if x < 1.0 { 1.0 } else { (PI * x).sin().abs() };
        let direct = integrate_segments(f, &[0.0, 1.0, 2.0], 1e-12).unwrap();
        assert_abs_diff_eq!(direct, 1.0 + 2.0 / PI, epsilon = 1e-9);
    }
}

//! Small statistics helpers shared by the Monte Carlo experiments.

use serde::{Deserialize, Serialize};

use crate::num::{real, Real};

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate<T> {
    pub mean: T,
    pub stderr: T,
    pub reps: usize,
}

/// Pairwise (cascade) summation: reproducible given the input order, with
/// error growth O(log n) instead of O(n).
pub fn pairwise_sum<T: Real>(xs: &[T]) -> T {
    match xs.len() {
        0 => T::zero(),
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let (a, b) = xs.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// Sample mean and standard error of the mean.
pub fn mean_stderr<T: Real>(xs: &[T]) -> McEstimate<T> {
    let n = xs.len();
    if n == 0 {
        return McEstimate {
            mean: T::nan(),
            stderr: T::nan(),
            reps: 0,
        };
    }
    let nf = real::<T>(n as f64);
    let mean = pairwise_sum(xs) / nf;
    if n == 1 {
        return McEstimate {
            mean,
            stderr: T::zero(),
            reps: 1,
        };
    }
    let sq: Vec<T> = xs.iter().map(|&x| (x - mean) * (x - mean)).collect();
    let var = pairwise_sum(&sq) / (nf - T::one());
    McEstimate {
        mean,
        stderr: (var / nf).sqrt(),
        reps: n,
    }
}

/// Standard error of a difference of two independent estimates.
pub fn joint_stderr<T: Real>(a: T, b: T) -> T {
    (a * a + b * b).sqrt()
}

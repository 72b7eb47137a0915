//! Ring estimator for the pair correlation function, with border-method edge
//! correction: ring centres are restricted to the window eroded by the ring's
//! outer radius, so every counted ring lies fully inside the window.

use super::grid::NeighborGrid;
use super::PointPattern;
use crate::error::{Error, Result};
use crate::geometry::ball_volume;
use crate::num::{as_f64, real, Real};

/// Empirical pair correlation at one grid distance.
#[derive(Debug, Clone)]
pub struct PairCorrelationEstimate<T> {
    pub r: T,
    /// Ring `[lo, hi)` actually counted; the estimate is the ring-averaged
    /// pair correlation, so compare against closed forms averaged the same way.
    pub ring: (T, T),
    pub h: T,
    pub stderr: T,
    /// Patterns that contributed (had at least one eligible centre).
    pub n_patterns: usize,
}

/// Estimate `h_SI` on `r_grid` from replicate patterns of one model.
///
/// Each pattern is self-normalized by its own intensity estimate; the
/// returned mean and standard error are across patterns.
pub fn estimate_pair_correlation<T: Real>(
    patterns: &[PointPattern<T>],
    r_grid: &[T],
) -> Result<Vec<PairCorrelationEstimate<T>>> {
    let Some(first) = patterns.first() else {
        return Err(Error::invalid("need at least one pattern"));
    };
    let d = first.dimension;
    let radius = first.window_radius;
    if patterns
        .iter()
        .any(|p| p.dimension != d || p.window_radius != radius)
    {
        return Err(Error::invalid("patterns must share dimension and window"));
    }
    if r_grid.is_empty() {
        return Err(Error::invalid("empty distance grid"));
    }
    let half_window = radius / real::<T>(2.0);
    for w in r_grid.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::invalid("distance grid must be strictly increasing"));
        }
    }
    if r_grid[0] <= T::zero() || *r_grid.last().unwrap() >= half_window {
        return Err(Error::invalid(
            "grid distances must be positive and below R/2",
        ));
    }

    // ring width: the grid spacing, capped so the innermost ring stays positive
    let mut width = r_grid[0];
    for w in r_grid.windows(2) {
        width = width.min(w[1] - w[0]);
    }
    let rings: Vec<(T, T)> = r_grid
        .iter()
        .map(|&r| (r - width / real::<T>(2.0), r + width / real::<T>(2.0)))
        .collect();
    let ring_volumes: Vec<T> = rings
        .iter()
        .map(|&(lo, hi)| Ok(ball_volume(d, hi)? - ball_volume(d, lo)?))
        .collect::<Result<_>>()?;
    let window_volume = ball_volume(d, radius)?;
    let max_hi = rings.last().unwrap().1;

    // per-pattern estimates per ring
    let mut per_ring: Vec<Vec<T>> = vec![Vec::with_capacity(patterns.len()); rings.len()];
    for pattern in patterns {
        if pattern.len() < 2 {
            continue;
        }
        let lambda_hat = real::<T>(pattern.len() as f64) / window_volume;
        let norms: Vec<T> = pattern.points.iter().map(|p| p.norm()).collect();
        let grid = NeighborGrid::build(&pattern.points, as_f64(max_hi), as_f64(radius), d);

        let mut counts = vec![0u64; rings.len()];
        let mut centres = vec![0u64; rings.len()];
        for (k, &(_, hi)) in rings.iter().enumerate() {
            centres[k] = norms.iter().filter(|&&n| n <= radius - hi).count() as u64;
        }
        for (i, p) in pattern.points.iter().enumerate() {
            grid.for_each_candidate(p, |j| {
                if j == i {
                    return;
                }
                let dist = pattern.points[j].distance_to(p);
                for (k, &(lo, hi)) in rings.iter().enumerate() {
                    if norms[i] <= radius - hi && dist >= lo && dist < hi {
                        counts[k] += 1;
                    }
                }
            });
        }
        for k in 0..rings.len() {
            if centres[k] == 0 {
                continue;
            }
            let mean_count = real::<T>(counts[k] as f64) / real::<T>(centres[k] as f64);
            per_ring[k].push(mean_count / (lambda_hat * ring_volumes[k]));
        }
    }

    let mut out = Vec::with_capacity(rings.len());
    for (k, values) in per_ring.iter().enumerate() {
        if values.is_empty() {
            return Err(Error::invalid(format!(
                "no pattern contributed at grid distance {}",
                as_f64(r_grid[k])
            )));
        }
        let n = real::<T>(values.len() as f64);
        let mean = values.iter().fold(T::zero(), |a, &b| a + b) / n;
        let var = if values.len() > 1 {
            values
                .iter()
                .fold(T::zero(), |a, &b| a + (b - mean) * (b - mean))
                / (n - T::one())
        } else {
            T::zero()
        };
        out.push(PairCorrelationEstimate {
            r: r_grid[k],
            ring: rings[k],
            h: mean,
            stderr: (var / n).sqrt(),
            n_patterns: values.len(),
        });
    }
    Ok(out)
}

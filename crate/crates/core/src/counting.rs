//! Pair statistics over level sums.
//!
//! For a window s/2^n, `p_count` is the number of ordered pairs of distinct
//! deduplicated normalized level-n sums within the window, and `t_count` is
//! the number of values with at least one close neighbor. On a sorted list
//! the nearest neighbor is adjacent, so `t_count` is a single gap pass and
//! `p_count` a two-pointer pass; both are linear in the number of values.

use rayon::prelude::*;
use serde::Serialize;

use crate::base::BaseValue;
use crate::enumeration::enumerate_sums;
use crate::error::{Error, Result};
use crate::tolerance::ToleranceConfig;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct PairStats {
    pub beta: f64,
    pub n: u32,
    pub s: f64,
    /// Ordered close pairs; even, since (a, b) and (b, a) both count.
    pub p_count: u64,
    /// Values with at least one close neighbor. Never exceeds p_count.
    pub t_count: u64,
    /// p_count / 2^n.
    pub density: f64,
}

/// Both counting statistics for one (β, s, n).
///
/// The window comparison |a - b| <= s/2^n is inclusive with measure_tol
/// slack when s > 0, so boundary ties are stable; s = 0 keeps the window
/// empty (deduplicated values are pairwise distinct).
pub fn pair_statistics(
    beta: &BaseValue,
    s: f64,
    n: u32,
    tol: &ToleranceConfig,
) -> Result<PairStats> {
    if !s.is_finite() || s < 0.0 {
        return Err(Error::domain(format!(
            "pair window scale must be finite and nonnegative, got {s}"
        )));
    }
    let sums = enumerate_sums(beta, n, true, tol)?;
    let values = sums.values();
    let window = if s > 0.0 {
        s / (n as f64).exp2() + tol.measure_tol
    } else {
        0.0
    };

    let mut unordered = 0u64;
    let mut left = 0usize;
    for i in 0..values.len() {
        while values[i] - values[left] > window {
            left += 1;
        }
        unordered += (i - left) as u64;
    }
    let p_count = 2 * unordered;

    let mut t_count = 0u64;
    for i in 0..values.len() {
        let close_prev = i > 0 && values[i] - values[i - 1] <= window;
        let close_next = i + 1 < values.len() && values[i + 1] - values[i] <= window;
        if close_prev || close_next {
            t_count += 1;
        }
    }
    debug_assert!(t_count <= p_count);

    Ok(PairStats {
        beta: beta.value(),
        n,
        s,
        p_count,
        t_count,
        density: p_count as f64 / sums.word_count() as f64,
    })
}

/// Ordered close-pair count; see `pair_statistics`.
pub fn count_close_pairs(
    beta: &BaseValue,
    s: f64,
    n: u32,
    tol: &ToleranceConfig,
) -> Result<PairStats> {
    pair_statistics(beta, s, n, tol)
}

/// Close-neighbor point count; see `pair_statistics`.
pub fn count_crowded_points(
    beta: &BaseValue,
    s: f64,
    n: u32,
    tol: &ToleranceConfig,
) -> Result<PairStats> {
    pair_statistics(beta, s, n, tol)
}

#[derive(Clone, Debug, Serialize)]
pub struct GridScanResult {
    pub lo: f64,
    pub hi: f64,
    pub grid_size: u32,
    pub s: f64,
    pub n: u32,
    pub per_beta: Vec<PairStats>,
    pub mean_density: f64,
    /// mean_density / s, the empirical linear-bound constant.
    pub fitted_c: f64,
    /// Share of grid bases where at least half of all 2^n words have a
    /// close neighbor.
    pub crowded_fraction: f64,
}

/// Pair statistics across a midpoint grid of bases in (lo, hi).
///
/// Grid point i sits at lo + (hi - lo)(i + 1/2)/grid_size, so the scan
/// behaves like a midpoint-rule integral over the base interval. Grid
/// points evaluate independently (and in parallel); the reduction is in
/// ascending base order regardless of worker count.
pub fn grid_scan(
    lo: f64,
    hi: f64,
    grid_size: u32,
    s: f64,
    n: u32,
    tol: &ToleranceConfig,
) -> Result<GridScanResult> {
    if !(lo.is_finite() && hi.is_finite()) || lo <= 1.0 || hi > 2.0 || lo >= hi {
        return Err(Error::domain(format!(
            "grid interval must satisfy 1 < lo < hi <= 2, got ({lo}, {hi})"
        )));
    }
    if grid_size < 2 {
        return Err(Error::domain(format!(
            "grid needs at least 2 points, got {grid_size}"
        )));
    }
    if n == 0 {
        return Err(Error::domain("grid scan requires n >= 1"));
    }
    if !s.is_finite() || s <= 0.0 {
        return Err(Error::domain(format!(
            "grid scan requires a positive window scale, got {s}"
        )));
    }

    let step = (hi - lo) / grid_size as f64;
    let per_beta: Vec<PairStats> = (0..grid_size)
        .into_par_iter()
        .map(|i| {
            let beta = BaseValue::new(lo + step * (i as f64 + 0.5))?;
            pair_statistics(&beta, s, n, tol)
        })
        .collect::<Result<_>>()?;

    let g = grid_size as f64;
    let mean_density = per_beta.iter().map(|p| p.density).sum::<f64>() / g;
    let crowded_threshold = 1u64 << (n - 1);
    let crowded = per_beta
        .iter()
        .filter(|p| p.t_count >= crowded_threshold)
        .count();

    Ok(GridScanResult {
        lo,
        hi,
        grid_size,
        s,
        n,
        per_beta,
        mean_density,
        fitted_c: mean_density / s,
        crowded_fraction: crowded as f64 / g,
    })
}

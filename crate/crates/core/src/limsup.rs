//! Finite-stage truncations of the limsup approximation sets: per-stage
//! interval unions, coverage curves, membership probes, bad-set
//! indicators, and a box-counting dimension estimator.
//!
//! A stage-n set places a window of width Ψ(n) at every level-n sum; the
//! union over a stage window [m, N] is the finite-stage stand-in for the
//! limsup set. Everything downstream (coverage fractions, membership,
//! box counts) is computed from those canonical interval unions, so all
//! results are deterministic for fixed inputs regardless of thread count:
//! stages are built in parallel but always combined in stage order.

use rayon::prelude::*;
use serde::Serialize;

use crate::base::BaseValue;
use crate::enumeration::{enumerate_sums_capped, DEFAULT_LEVEL_CAP};
use crate::error::{Error, Result};
use crate::interval::IntervalSet;
use crate::rate::{RateFunction, RateSequence};
use crate::tolerance::ToleranceConfig;

/// Box-count grids finer than 2^-40 would push interval endpoints past
/// f64's exact-integer range when scaled.
pub const MAX_SCALE_EXPONENT: u32 = 40;

/// How windows are anchored to the level-n sums.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SetVariant {
    /// [a, a + Ψ(n)] at raw sums; domain [0, 1/(β-1)].
    OneSided,
    /// [a, a + Ψ(n)] at (β-1)-scaled sums; domain [0, 1].
    Normalized,
    /// [a - Ψ(n), a + Ψ(n)] at raw sums; domain [0, 1/(β-1)].
    TwoSided,
}

impl SetVariant {
    fn uses_normalized_sums(self) -> bool {
        matches!(self, SetVariant::Normalized)
    }

    fn is_two_sided(self) -> bool {
        matches!(self, SetVariant::TwoSided)
    }

    /// Right endpoint of the variant's domain; the left is always 0.
    pub fn domain_max(self, beta: &BaseValue) -> f64 {
        if self.uses_normalized_sums() {
            1.0
        } else {
            beta.domain_max()
        }
    }
}

/// Inclusive stage range [first, last] for union and membership scans.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct StageWindow {
    first: u32,
    last: u32,
}

impl StageWindow {
    pub fn new(first: u32, last: u32) -> Result<Self> {
        if first == 0 || first > last || last > DEFAULT_LEVEL_CAP {
            return Err(Error::domain(format!(
                "stage window must satisfy 1 <= first <= last <= {DEFAULT_LEVEL_CAP}, got [{first}, {last}]"
            )));
        }
        Ok(StageWindow { first, last })
    }

    pub fn first(&self) -> u32 {
        self.first
    }

    pub fn last(&self) -> u32 {
        self.last
    }

    pub fn stages(&self) -> std::ops::RangeInclusive<u32> {
        self.first..=self.last
    }
}

/// The stage-n set: a window at every level-n sum, clipped to the
/// variant's domain and merged into canonical form.
pub fn stage_intervals(
    beta: &BaseValue,
    psi: &RateFunction,
    variant: SetVariant,
    n: u32,
    tol: &ToleranceConfig,
) -> Result<IntervalSet> {
    if n == 0 {
        return Err(Error::domain("stages start at n = 1"));
    }
    let width = psi.eval(n)?;
    let sums = enumerate_sums_capped(
        beta,
        n,
        variant.uses_normalized_sums(),
        tol,
        DEFAULT_LEVEL_CAP,
        false,
    )?;
    let domain_hi = variant.domain_max(beta);
    let left = if variant.is_two_sided() { width } else { 0.0 };

    let values = sums.values();
    let mut pairs = Vec::with_capacity(values.len());
    for &a in values {
        let lo = (a - left).max(0.0);
        let hi = (a + width).min(domain_hi);
        pairs.push((lo, hi));
    }
    // Anchors are sorted and the window offsets are constant, so the
    // clipped left endpoints are already nondecreasing.
    Ok(IntervalSet::from_sorted(pairs))
}

/// Union of the stage sets over a stage window. Stages are constructed in
/// parallel; the union is folded in stage order.
pub fn limsup_union(
    beta: &BaseValue,
    psi: &RateFunction,
    variant: SetVariant,
    window: StageWindow,
    tol: &ToleranceConfig,
) -> Result<IntervalSet> {
    let sets = stage_sets(beta, psi, variant, window, tol)?;
    let mut union = IntervalSet::empty();
    for set in &sets {
        union = union.union(set);
    }
    Ok(union)
}

fn stage_sets(
    beta: &BaseValue,
    psi: &RateFunction,
    variant: SetVariant,
    window: StageWindow,
    tol: &ToleranceConfig,
) -> Result<Vec<IntervalSet>> {
    window
        .stages()
        .collect::<Vec<u32>>()
        .into_par_iter()
        .map(|n| stage_intervals(beta, psi, variant, n, tol))
        .collect()
}

/// One row of a coverage curve.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct StageCoverage {
    pub n: u32,
    /// Intervals in this stage's canonical set.
    pub interval_count: usize,
    /// Measure of this stage's set alone.
    pub stage_measure: f64,
    /// Measure of the union of stages first..=n.
    pub cumulative_measure: f64,
    /// cumulative_measure over the domain length.
    pub coverage_fraction: f64,
}

/// Coverage of the variant domain by the union of stage sets.
#[derive(Clone, Debug, Serialize)]
pub struct CoverageReport {
    pub beta: f64,
    pub psi: String,
    pub variant: SetVariant,
    pub window: StageWindow,
    pub domain_length: f64,
    pub stages: Vec<StageCoverage>,
    /// Measure of the full window union.
    pub window_measure: f64,
    /// window_measure / domain_length, in [0, 1].
    pub coverage_fraction: f64,
}

pub fn coverage(
    beta: &BaseValue,
    psi: &RateFunction,
    variant: SetVariant,
    window: StageWindow,
    tol: &ToleranceConfig,
) -> Result<CoverageReport> {
    let sets = stage_sets(beta, psi, variant, window, tol)?;
    let domain_length = variant.domain_max(beta);

    let mut stages = Vec::with_capacity(sets.len());
    let mut running = IntervalSet::empty();
    for (set, n) in sets.iter().zip(window.stages()) {
        running = running.union(set);
        let cumulative = running.measure();
        stages.push(StageCoverage {
            n,
            interval_count: set.count(),
            stage_measure: set.measure(),
            cumulative_measure: cumulative,
            coverage_fraction: cumulative / domain_length,
        });
    }

    let window_measure = running.measure();
    Ok(CoverageReport {
        beta: beta.value(),
        psi: psi.describe(),
        variant,
        window,
        domain_length,
        stages,
        window_measure,
        coverage_fraction: window_measure / domain_length,
    })
}

/// A stage that placed an anchor within reach of x.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct StageHit {
    pub n: u32,
    /// The smallest in-window anchor at that stage.
    pub anchor: f64,
}

/// Which stages in the window reach x.
#[derive(Clone, Debug, Serialize)]
pub struct MembershipReport {
    pub x: f64,
    pub beta: f64,
    pub psi: String,
    pub variant: SetVariant,
    pub window: StageWindow,
    pub hits: Vec<StageHit>,
    /// Some stage reaches x.
    pub hit_any: bool,
    /// Every stage in the window reaches x.
    pub hit_all: bool,
}

/// Probes each stage n in the window for an anchor a with
/// 0 <= x - a <= Ψ(n) (two-sided variants allow |x - a| <= Ψ(n)),
/// tolerance-widened by measure_tol. Binary search on the sorted sums.
pub fn membership(
    x: f64,
    beta: &BaseValue,
    psi: &RateFunction,
    variant: SetVariant,
    window: StageWindow,
    tol: &ToleranceConfig,
) -> Result<MembershipReport> {
    let domain_hi = variant.domain_max(beta);
    if !x.is_finite() || x < -tol.measure_tol || x > domain_hi + tol.measure_tol {
        return Err(Error::domain(format!(
            "x = {x} lies outside the variant domain [0, {domain_hi}]"
        )));
    }

    let mut hits = Vec::new();
    for n in window.stages() {
        let width = psi.eval(n)?;
        let sums = enumerate_sums_capped(
            beta,
            n,
            variant.uses_normalized_sums(),
            tol,
            DEFAULT_LEVEL_CAP,
            false,
        )?;
        let values = sums.values();
        let anchor_lo = x - width - tol.measure_tol;
        let anchor_hi = if variant.is_two_sided() {
            x + width + tol.measure_tol
        } else {
            x + tol.measure_tol
        };
        let idx = values.partition_point(|&v| v < anchor_lo);
        if idx < values.len() && values[idx] <= anchor_hi {
            hits.push(StageHit {
                n,
                anchor: values[idx],
            });
        }
    }

    let total = window.stages().count();
    Ok(MembershipReport {
        x,
        beta: beta.value(),
        psi: psi.describe(),
        variant,
        window,
        hit_any: !hits.is_empty(),
        hit_all: hits.len() == total,
        hits,
    })
}

/// True when x in [0, 1] escapes every stage n in the window for the
/// normalized sets with Ψ(n) = ω(n)·2^{-n}: the finite-stage indicator of
/// the badly-approximable set for the rate ω.
pub fn bad_indicator(
    x: f64,
    beta: &BaseValue,
    omega: &RateSequence,
    window: StageWindow,
    tol: &ToleranceConfig,
) -> Result<bool> {
    let psi = RateFunction::scaled(omega.clone());
    let report = membership(x, beta, &psi, SetVariant::Normalized, window, tol)?;
    Ok(!report.hit_any)
}

/// Occupied dyadic boxes [j 2^{-k}, (j+1) 2^{-k}) touched by the set, with
/// the grid aligned at 0. Closed intervals: a box touched only at its left
/// edge still counts.
pub fn count_boxes(set: &IntervalSet, scale_exponent: u32) -> Result<u64> {
    if scale_exponent > MAX_SCALE_EXPONENT {
        return Err(Error::domain(format!(
            "scale exponent {scale_exponent} exceeds the supported maximum {MAX_SCALE_EXPONENT}"
        )));
    }
    let scale = (scale_exponent as f64).exp2();
    let mut count = 0u64;
    let mut last: Option<i128> = None;
    for &(lo, hi) in set.intervals() {
        let mut jlo = (lo * scale).floor() as i128;
        let jhi = (hi * scale).floor() as i128;
        if let Some(l) = last {
            if jlo <= l {
                jlo = l + 1;
            }
        }
        if jhi >= jlo {
            count += (jhi - jlo + 1) as u64;
            last = Some(jhi);
        }
    }
    Ok(count)
}

/// Box-count dimension fit for the one-sided union with Ψ(n) = 2^{-αn}.
#[derive(Clone, Debug, Serialize)]
pub struct DimensionEstimate {
    pub beta: f64,
    pub alpha: f64,
    pub depth: u32,
    /// Grid exponents k (boxes of side 2^{-k}).
    pub scale_exponents: Vec<u32>,
    pub counts: Vec<u64>,
    /// Least-squares slope of log2(count) against k.
    pub slope: f64,
    /// The theoretical dimension 1/α the slope is compared against.
    pub target: f64,
}

/// Fits the box-count slope of the one-sided construction with Ψ = power(α)
/// over dyadic grids 2^{-k}, k in [scale_lo, scale_hi].
///
/// Each grid is counted against the stage whose window width matches the box
/// side, n(k) = round(k/α). Coarser stages have positive total measure and
/// would drag the slope toward 1 on a fine grid, while deeper stages sprinkle
/// anchors into nearly every box; the matched stage is the one whose geometry
/// the grid actually resolves, and its count grows like the anchor count
/// 2^{k/α}.
///
/// Grids finer than the construction can resolve are rejected: stage-N
/// windows have width 2^{-Nα}, so k must stay at or below N·α.
pub fn box_dimension(
    beta: &BaseValue,
    alpha: f64,
    depth: u32,
    scale_lo: u32,
    scale_hi: u32,
    tol: &ToleranceConfig,
) -> Result<DimensionEstimate> {
    let psi = RateFunction::power(alpha)?;
    if scale_lo == 0 || scale_hi <= scale_lo {
        return Err(Error::domain(
            "dimension fit needs at least two scales with 1 <= scale_lo < scale_hi",
        ));
    }
    if scale_hi > MAX_SCALE_EXPONENT {
        return Err(Error::domain(format!(
            "scale exponent {scale_hi} exceeds the supported maximum {MAX_SCALE_EXPONENT}"
        )));
    }
    if (scale_hi as f64) > (depth as f64) * alpha {
        return Err(Error::range(format!(
            "grid 2^-{scale_hi} is finer than the depth-{depth} construction resolves (k must stay <= {})",
            (depth as f64) * alpha
        )));
    }
    let scale_exponents: Vec<u32> = (scale_lo..=scale_hi).collect();
    let mut counts = Vec::with_capacity(scale_exponents.len());
    let mut cached: Option<(u32, IntervalSet)> = None;
    for &k in &scale_exponents {
        let stage = ((k as f64 / alpha).round() as u32).clamp(1, depth);
        let hit = matches!(&cached, Some((n, _)) if *n == stage);
        if !hit {
            let set = stage_intervals(beta, &psi, SetVariant::OneSided, stage, tol)?;
            cached = Some((stage, set));
        }
        counts.push(count_boxes(&cached.as_ref().unwrap().1, k)?);
    }

    let xs: Vec<f64> = scale_exponents.iter().map(|&k| k as f64).collect();
    let ys: Vec<f64> = counts.iter().map(|&c| (c as f64).log2()).collect();
    let slope = least_squares_slope(&xs, &ys);

    Ok(DimensionEstimate {
        beta: beta.value(),
        alpha,
        depth,
        scale_exponents,
        counts,
        slope,
        target: 1.0 / alpha,
    })
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean_x: f64 = xs.iter().sum::<f64>() / n;
    let mean_y: f64 = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        num += (x - mean_x) * (y - mean_y);
        den += (x - mean_x) * (x - mean_x);
    }
    num / den
}

/// Excess of the one-sided union over its intersection with the two-sided
/// union: zero (up to rounding) because every one-sided window sits inside
/// the corresponding two-sided one.
pub fn inclusion_excess(
    beta: &BaseValue,
    psi: &RateFunction,
    window: StageWindow,
    tol: &ToleranceConfig,
) -> Result<f64> {
    let one = limsup_union(beta, psi, SetVariant::OneSided, window, tol)?;
    let two = limsup_union(beta, psi, SetVariant::TwoSided, window, tol)?;
    Ok(one.measure() - one.intersection(&two).measure())
}

//! Level-sum enumeration.
//!
//! The level-n sums of a base β are the 2^n values Σ ε_i β^{-i} over binary
//! digit words (ε_1, …, ε_n). Enumerating them naively costs 2^n full
//! evaluations; instead the sorted list is grown one level at a time:
//!
//! ```text
//! S_0 = {0},    S_k = merge(S_{k-1}, S_{k-1} + c β^{-k})
//! ```
//!
//! where c is (β - 1) for normalized sums and 1 for raw sums. Both merge
//! inputs are sorted, so each level is a linear two-pointer pass, and values
//! within `dedup_tol` of the last kept value collapse on the fly. At bases
//! with algebraic collisions (e.g. the golden ratio) this keeps the list far
//! below 2^n. Deduplication compares against the last *emitted* value, so a
//! chain of values each within tolerance of its neighbor collapses to its
//! first element.
//!
//! Memory: values are plain f64, so the default cap of n = 24 keeps a full
//! collision-free enumeration (16M values plus one merge buffer) within a
//! few hundred MB. Multiplicities are only tracked on request; the density
//! histograms need them, nothing else does.

use crate::base::BaseValue;
use crate::error::{Error, Result};
use crate::tolerance::ToleranceConfig;

/// Default cap on the enumeration level, a memory guard.
pub const DEFAULT_LEVEL_CAP: u32 = 24;

/// Sorted deduplicated level-n sums for one base.
#[derive(Clone, Debug)]
pub struct LevelSums {
    beta: f64,
    n: u32,
    normalized: bool,
    values: Vec<f64>,
    multiplicities: Option<Vec<u64>>,
}

impl LevelSums {
    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn level(&self) -> u32 {
        self.n
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Sorted strictly increasing values; consecutive gaps exceed dedup_tol
    /// by construction.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Digit-word multiplicities aligned with `values`, when tracked.
    pub fn multiplicities(&self) -> Option<&[u64]> {
        self.multiplicities.as_deref()
    }

    /// Number of distinct values after deduplication.
    pub fn distinct_count(&self) -> usize {
        self.values.len()
    }

    /// Number of digit words, 2^n.
    pub fn word_count(&self) -> u64 {
        1u64 << self.n
    }

    /// Smallest gap between consecutive distinct values.
    pub fn min_gap(&self) -> Result<f64> {
        if self.values.len() < 2 {
            return Err(Error::domain(
                "min gap needs at least two distinct values; n = 0 is degenerate",
            ));
        }
        let mut best = f64::INFINITY;
        for w in self.values.windows(2) {
            let gap = w[1] - w[0];
            if gap < best {
                best = gap;
            }
        }
        Ok(best)
    }
}

/// Enumerates sorted deduplicated level-n sums under the default cap.
pub fn enumerate_sums(
    beta: &BaseValue,
    n: u32,
    normalized: bool,
    tol: &ToleranceConfig,
) -> Result<LevelSums> {
    enumerate_sums_capped(beta, n, normalized, tol, DEFAULT_LEVEL_CAP, false)
}

/// Same enumeration, tracking how many digit words land on each value.
pub fn enumerate_sums_with_multiplicity(
    beta: &BaseValue,
    n: u32,
    normalized: bool,
    tol: &ToleranceConfig,
) -> Result<LevelSums> {
    enumerate_sums_capped(beta, n, normalized, tol, DEFAULT_LEVEL_CAP, true)
}

/// Enumeration with an explicit level cap.
pub fn enumerate_sums_capped(
    beta: &BaseValue,
    n: u32,
    normalized: bool,
    tol: &ToleranceConfig,
    cap: u32,
    with_multiplicity: bool,
) -> Result<LevelSums> {
    if n > cap {
        return Err(Error::resource(format!(
            "level {n} exceeds the enumeration cap {cap}"
        )));
    }
    if n >= 63 {
        return Err(Error::resource("level must stay below 63 for word counting"));
    }
    let b = beta.value();
    let scale = if normalized { b - 1.0 } else { 1.0 };

    let mut values = vec![0.0f64];
    let mut mults = if with_multiplicity { vec![1u64] } else { Vec::new() };
    let mut power = 1.0f64;
    for _ in 0..n {
        power /= b;
        let shift = scale * power;
        let len = values.len();
        let mut next_values: Vec<f64> = Vec::with_capacity(len * 2);
        let mut next_mults: Vec<u64> = Vec::with_capacity(if with_multiplicity { len * 2 } else { 0 });
        let (mut i, mut j) = (0usize, 0usize);
        while i < len || j < len {
            let plain = if i < len { values[i] } else { f64::INFINITY };
            let shifted = if j < len { values[j] + shift } else { f64::INFINITY };
            let (cand, src) = if plain <= shifted {
                i += 1;
                (plain, i - 1)
            } else {
                j += 1;
                (shifted, j - 1)
            };
            let mult = if with_multiplicity { mults[src] } else { 0 };
            match next_values.last() {
                Some(&last) if cand - last <= tol.dedup_tol => {
                    if with_multiplicity {
                        *next_mults.last_mut().unwrap() += mult;
                    }
                }
                _ => {
                    next_values.push(cand);
                    if with_multiplicity {
                        next_mults.push(mult);
                    }
                }
            }
        }
        values = next_values;
        mults = next_mults;
    }

    Ok(LevelSums {
        beta: b,
        n,
        normalized,
        values,
        multiplicities: if with_multiplicity { Some(mults) } else { None },
    })
}

/// Number of distinct level-n sums.
pub fn distinct_count(
    beta: &BaseValue,
    n: u32,
    normalized: bool,
    tol: &ToleranceConfig,
) -> Result<usize> {
    Ok(enumerate_sums(beta, n, normalized, tol)?.distinct_count())
}

/// Smallest gap between consecutive distinct level-n sums, n >= 1.
pub fn min_gap(
    beta: &BaseValue,
    n: u32,
    normalized: bool,
    tol: &ToleranceConfig,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("min gap is undefined at n = 0"));
    }
    enumerate_sums(beta, n, normalized, tol)?.min_gap()
}

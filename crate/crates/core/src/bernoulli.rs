//! Density histograms for the distribution of level-n sums under fair
//! digit draws: the level-n approximation of the Bernoulli convolution.
//!
//! Histograms live on [0, 1] in normalized coordinates. Each level-n sum
//! owns a window of width β^{-n}; values are placed at the window center
//! u = s + β^{-n}/2, so the digit-complement reflection s ↦ (1-β^{-n})-s
//! becomes u ↦ 1-u. The exact method exploits that: every level-(n-1)
//! value contributes its digit-0 child at bin b and the mirrored digit-1
//! complement partner at bin B-1-b, which makes bin-reversal symmetry and
//! mass conservation exact in integer counts, not just up to rounding.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::base::BaseValue;
use crate::enumeration::{enumerate_sums_with_multiplicity, DEFAULT_LEVEL_CAP};
use crate::error::{Error, Result};
use crate::tolerance::ToleranceConfig;

pub const MAX_BINS: u32 = 1 << 20;

/// Samples per Monte Carlo shard; each shard runs its own RNG stream so
/// the reduction is order-independent and thread-count-independent.
const MC_SHARD: u64 = 65536;

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HistogramMethod {
    Exact { level: u32 },
    MonteCarlo { level: u32, samples: u64, seed: u64 },
}

/// A probability histogram over [0, 1] in normalized sum coordinates.
#[derive(Clone, Debug, Serialize)]
pub struct DensityHistogram {
    beta: f64,
    bins: u32,
    weights: Vec<f64>,
    method: HistogramMethod,
}

impl DensityHistogram {
    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn bins(&self) -> u32 {
        self.bins
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn method(&self) -> &HistogramMethod {
        &self.method
    }

    /// Largest weight rescaled to density units: max weight × bins.
    pub fn sup_density(&self) -> f64 {
        let max = self.weights.iter().copied().fold(0.0f64, f64::max);
        max * self.bins as f64
    }

    /// Regroups into `new_bins` by summing whole groups of adjacent bins;
    /// exact when the group sums are dyadic, as for the exact method.
    pub fn coarsen(&self, new_bins: u32) -> Result<DensityHistogram> {
        if new_bins < 2 || self.bins % new_bins != 0 {
            return Err(Error::domain(format!(
                "cannot coarsen {} bins into {new_bins}",
                self.bins
            )));
        }
        let group = (self.bins / new_bins) as usize;
        let weights = self
            .weights
            .chunks(group)
            .map(|chunk| chunk.iter().sum())
            .collect();
        Ok(DensityHistogram {
            beta: self.beta,
            bins: new_bins,
            weights,
            method: self.method.clone(),
        })
    }
}

/// Half the total absolute weight difference; requires equal bin counts.
pub fn total_variation(a: &DensityHistogram, b: &DensityHistogram) -> Result<f64> {
    if a.bins != b.bins {
        return Err(Error::domain(format!(
            "total variation needs matching bin counts, got {} and {}",
            a.bins, b.bins
        )));
    }
    Ok(a.weights
        .iter()
        .zip(&b.weights)
        .map(|(x, y)| (x - y).abs())
        .sum::<f64>()
        * 0.5)
}

fn validate_bins(bins: u32) -> Result<()> {
    if bins < 2 || bins > MAX_BINS {
        return Err(Error::domain(format!(
            "bin count must lie in 2..={MAX_BINS}, got {bins}"
        )));
    }
    Ok(())
}

fn place(u: f64, bins: u32) -> usize {
    // Half-open bins [k/B, (k+1)/B), last bin closed via the clamp.
    ((u * bins as f64).floor() as i64).clamp(0, bins as i64 - 1) as usize
}

/// Exact level-n histogram: all 2^n digit words, weight 2^{-n} each.
pub fn exact_histogram(
    beta: &BaseValue,
    n: u32,
    bins: u32,
    tol: &ToleranceConfig,
) -> Result<DensityHistogram> {
    validate_bins(bins)?;
    if n > DEFAULT_LEVEL_CAP {
        return Err(Error::resource(format!(
            "level {n} exceeds the enumeration cap {DEFAULT_LEVEL_CAP}"
        )));
    }
    let b = beta.value();
    if n == 0 {
        // The empty word is its own reflection partner: its cell is the
        // whole domain, so the cell center sits on the midline and the
        // mass splits across the central mirrored pair (a single bin when
        // `bins` is odd).
        let mut weights = vec![0.0; bins as usize];
        let bin = place(0.5, bins);
        weights[bin] += 0.5;
        weights[bins as usize - 1 - bin] += 0.5;
        return Ok(DensityHistogram {
            beta: b,
            bins,
            weights,
            method: HistogramMethod::Exact { level: 0 },
        });
    }
    let mut counts = vec![0u64; bins as usize];
    {
        let parents = enumerate_sums_with_multiplicity(beta, n - 1, true, tol)?;
        let mults = parents
            .multiplicities()
            .expect("multiplicity tracking requested");
        let half_window = b.powi(-(n as i32)) / 2.0;
        for (&parent, &m) in parents.values().iter().zip(mults) {
            let u = parent / b + half_window;
            let bin = place(u, bins);
            counts[bin] += m;
            counts[bins as usize - 1 - bin] += m;
        }
    }

    let total = 1u64 << n;
    debug_assert_eq!(counts.iter().sum::<u64>(), total);
    let weights = counts.iter().map(|&c| c as f64 / total as f64).collect();
    Ok(DensityHistogram {
        beta: b,
        bins,
        weights,
        method: HistogramMethod::Exact { level: n },
    })
}

/// Monte Carlo level-n histogram from iid fair digit words. Deterministic
/// for a fixed seed: sample j belongs to shard j / 65536, and each shard
/// draws from its own RNG stream (seed, shard index).
pub fn mc_histogram(
    beta: &BaseValue,
    n: u32,
    samples: u64,
    seed: u64,
    bins: u32,
) -> Result<DensityHistogram> {
    validate_bins(bins)?;
    if n >= 64 {
        return Err(Error::resource("level must stay below 64 for word sampling"));
    }
    if samples == 0 {
        return Err(Error::domain("need at least one sample"));
    }
    let b = beta.value();

    let counts = if n == 0 {
        // Every sample is the empty word, whose shifted placement is the
        // cell center 0.5. Whole samples cannot split across the midline
        // the way the exact method's mass does, so an even bin count puts
        // them all in the right-of-center bin.
        let mut counts = vec![0u64; bins as usize];
        counts[place(0.5, bins)] = samples;
        counts
    } else {
        let mut powers = Vec::with_capacity(n as usize);
        let mut power = 1.0f64;
        for _ in 0..n {
            power /= b;
            powers.push((b - 1.0) * power);
        }
        let half_window = b.powi(-(n as i32)) / 2.0;
        let mask = (1u64 << n) - 1;
        let shard_count = samples.div_ceil(MC_SHARD);

        (0..shard_count)
            .into_par_iter()
            .map(|shard| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(shard);
                let lo = shard * MC_SHARD;
                let len = MC_SHARD.min(samples - lo);
                let mut local = vec![0u64; bins as usize];
                for _ in 0..len {
                    let word = rng.next_u64() & mask;
                    let mut s = 0.0;
                    for (i, p) in powers.iter().enumerate() {
                        if (word >> i) & 1 == 1 {
                            s += p;
                        }
                    }
                    local[place(s + half_window, bins)] += 1;
                }
                local
            })
            .reduce(
                || vec![0u64; bins as usize],
                |mut acc, local| {
                    for (a, l) in acc.iter_mut().zip(&local) {
                        *a += l;
                    }
                    acc
                },
            )
    };

    debug_assert_eq!(counts.iter().sum::<u64>(), samples);
    let weights = counts.iter().map(|&c| c as f64 / samples as f64).collect();
    Ok(DensityHistogram {
        beta: b,
        bins,
        weights,
        method: HistogramMethod::MonteCarlo {
            level: n,
            samples,
            seed,
        },
    })
}

use serde::Serialize;

use crate::error::{Error, Result};

/// Shared numeric tolerances.
///
/// Every operation that compares reals takes these explicitly instead of
/// baking magic constants into call sites:
///
/// * `dedup_tol` — absolute tolerance under which two level sums are
///   considered the same value during enumeration.
/// * `root_margin` — margin around the unit circle inside which a conjugate
///   modulus is treated as undecidable rather than classified.
/// * `measure_tol` — slack for interval membership, digit selection, and
///   measure comparisons.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ToleranceConfig {
    pub dedup_tol: f64,
    pub root_margin: f64,
    pub measure_tol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            dedup_tol: 1e-12,
            root_margin: 1e-6,
            measure_tol: 1e-9,
        }
    }
}

impl ToleranceConfig {
    /// Builds a config, rejecting non-finite or non-positive entries.
    pub fn new(dedup_tol: f64, root_margin: f64, measure_tol: f64) -> Result<Self> {
        for (name, v) in [
            ("dedup_tol", dedup_tol),
            ("root_margin", root_margin),
            ("measure_tol", measure_tol),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::domain(format!(
                    "{name} must be finite and positive, got {v}"
                )));
            }
        }
        Ok(ToleranceConfig {
            dedup_tol,
            root_margin,
            measure_tol,
        })
    }
}

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rate::RateFunction;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesVerdict {
    Convergent,
    Divergent,
    /// The finite partial sum carries no verdict for this rate kind.
    Indeterminate,
}

#[derive(Clone, Debug, Serialize)]
pub struct SeriesReport {
    pub verdict: SeriesVerdict,
    pub s: f64,
    pub terms: u32,
    pub partial_sum: f64,
}

/// Classifies Σ_n 2^n Ψ(n)^s.
///
/// For the power kind the terms are 2^{n(1 - αs)}, an exact geometric
/// series: divergent iff s <= 1/α. For the zero rate every term vanishes.
/// No other kind gets a verdict from finitely many terms, so the report is
/// indeterminate and carries the partial sum over the first `terms` stages
/// for inspection. Table rates shorter than `terms` are summed to their
/// horizon.
pub fn classify_series(psi: &RateFunction, s: f64, terms: u32) -> Result<SeriesReport> {
    if !s.is_finite() || s <= 0.0 {
        return Err(Error::domain(format!("series exponent must satisfy s > 0, got {s}")));
    }
    let effective_terms = match psi.horizon() {
        Some(h) => terms.min(h),
        None => terms,
    };
    let mut partial_sum = 0.0;
    for n in 1..=effective_terms {
        partial_sum += (n as f64).exp2() * psi.eval(n)?.powf(s);
    }
    let verdict = match psi {
        RateFunction::Power { alpha } => {
            if s <= 1.0 / alpha {
                SeriesVerdict::Divergent
            } else {
                SeriesVerdict::Convergent
            }
        }
        RateFunction::Zero => SeriesVerdict::Convergent,
        _ => SeriesVerdict::Indeterminate,
    };
    Ok(SeriesReport {
        verdict,
        s,
        terms: effective_terms,
        partial_sum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rate::RateSequence;

    #[test]
    fn power_boundary_is_divergent() {
        // At s = 1/α every term is exactly 1.
        let psi = RateFunction::power(2.0).unwrap();
        let r = classify_series(&psi, 0.5, 40).unwrap();
        assert_eq!(r.verdict, SeriesVerdict::Divergent);
        assert!((r.partial_sum - 40.0).abs() < 1e-9);
    }

    #[test]
    fn power_above_boundary_converges() {
        let psi = RateFunction::power(2.0).unwrap();
        let r = classify_series(&psi, 0.55, 60).unwrap();
        assert_eq!(r.verdict, SeriesVerdict::Convergent);
        // Geometric with ratio 2^{1 - 1.1} = 2^{-0.1}.
        let ratio: f64 = (-0.1f64).exp2();
        let closed = ratio * (1.0 - ratio.powi(60)) / (1.0 - ratio);
        assert!((r.partial_sum - closed).abs() < 1e-9 * closed);
    }

    #[test]
    fn power_verdict_matches_exact_fraction_boundary() {
        // s computed as 1/α must land on the divergent side for α = 1.5 and 3.
        for alpha in [1.5, 2.0, 3.0] {
            let psi = RateFunction::power(alpha).unwrap();
            let at = classify_series(&psi, 1.0 / alpha, 10).unwrap();
            assert_eq!(at.verdict, SeriesVerdict::Divergent, "alpha = {alpha}");
            let above = classify_series(&psi, 1.0 / alpha + 0.05, 10).unwrap();
            assert_eq!(above.verdict, SeriesVerdict::Convergent, "alpha = {alpha}");
        }
    }

    #[test]
    fn scaled_rate_is_indeterminate() {
        let psi = RateFunction::scaled(RateSequence::log());
        let r = classify_series(&psi, 1.0, 30).unwrap();
        assert_eq!(r.verdict, SeriesVerdict::Indeterminate);
        // At s = 1 the terms are ω_n, so the partial sum is Σ max(ln n, 1).
        let expected: f64 = (1..=30).map(|n| (n as f64).ln().max(1.0)).sum();
        assert!((r.partial_sum - expected).abs() < 1e-9);
    }

    #[test]
    fn zero_rate_converges() {
        let r = classify_series(&RateFunction::Zero, 0.5, 10).unwrap();
        assert_eq!(r.verdict, SeriesVerdict::Convergent);
        assert_eq!(r.partial_sum, 0.0);
    }

    #[test]
    fn table_rate_sums_to_horizon() {
        let psi = RateFunction::table(vec![0.5, 0.25]).unwrap();
        let r = classify_series(&psi, 1.0, 10).unwrap();
        assert_eq!(r.terms, 2);
        assert!((r.partial_sum - (2.0 * 0.5 + 4.0 * 0.25)).abs() < 1e-15);
        assert_eq!(r.verdict, SeriesVerdict::Indeterminate);
    }

    #[test]
    fn rejects_nonpositive_exponent() {
        let psi = RateFunction::power(2.0).unwrap();
        assert!(classify_series(&psi, 0.0, 5).is_err());
        assert!(classify_series(&psi, -1.0, 5).is_err());
    }
}

use serde::Serialize;

use crate::error::{Error, Result};

/// Growth weight sequence ω used to modulate 2^{-n} rates and to measure
/// growing regularity.
#[derive(Clone, Debug, Serialize)]
pub struct RateSequence {
    kind: RateSequenceKind,
    horizon: u32,
}

#[derive(Clone, Debug, Serialize)]
pub enum RateSequenceKind {
    /// max(ln n, 1); the floor keeps early terms positive.
    Log,
    /// ω_n = n.
    Linear,
    /// ω_n = c for a fixed c > 0.
    Constant(f64),
    /// Explicit positive entries, ω_n = table[n-1].
    Table(Vec<f64>),
}

impl RateSequence {
    pub fn log() -> Self {
        RateSequence {
            kind: RateSequenceKind::Log,
            horizon: u32::MAX,
        }
    }

    pub fn linear() -> Self {
        RateSequence {
            kind: RateSequenceKind::Linear,
            horizon: u32::MAX,
        }
    }

    pub fn constant(c: f64) -> Result<Self> {
        if !c.is_finite() || c <= 0.0 {
            return Err(Error::domain(format!(
                "constant rate sequence requires c > 0, got {c}"
            )));
        }
        Ok(RateSequence {
            kind: RateSequenceKind::Constant(c),
            horizon: u32::MAX,
        })
    }

    pub fn table(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("table rate sequence must be nonempty"));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite() || **v <= 0.0) {
            return Err(Error::domain(format!(
                "table rate sequence entries must be positive, got {bad}"
            )));
        }
        let horizon = values.len() as u32;
        Ok(RateSequence {
            kind: RateSequenceKind::Table(values),
            horizon,
        })
    }

    /// Largest n the sequence is defined for.
    pub fn horizon(&self) -> u32 {
        self.horizon
    }

    pub fn eval(&self, n: u32) -> Result<f64> {
        if n == 0 {
            return Err(Error::domain("rate sequences are indexed from n = 1"));
        }
        if n > self.horizon {
            return Err(Error::range(format!(
                "index {n} exceeds sequence horizon {}",
                self.horizon
            )));
        }
        Ok(match &self.kind {
            RateSequenceKind::Log => (n as f64).ln().max(1.0),
            RateSequenceKind::Linear => n as f64,
            RateSequenceKind::Constant(c) => *c,
            RateSequenceKind::Table(values) => values[n as usize - 1],
        })
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            RateSequenceKind::Log => "log".to_string(),
            RateSequenceKind::Linear => "linear".to_string(),
            RateSequenceKind::Constant(c) => format!("const:{c}"),
            RateSequenceKind::Table(values) => format!("table[{}]", values.len()),
        }
    }
}

/// Approximation rate Ψ evaluated at integer stages n >= 1.
#[derive(Clone, Debug, Serialize)]
pub enum RateFunction {
    /// Ψ(n) = 2^{-nα} for α > 1.
    Power { alpha: f64 },
    /// Ψ(n) = ω_n 2^{-n}.
    Scaled { omega: RateSequence },
    /// Ψ(n) = β^{-n}; the stage intervals then match the prefix windows.
    Geometric { beta: f64 },
    /// Explicit nonnegative entries, Ψ(n) = table[n-1].
    Table { values: Vec<f64> },
    /// Ψ ≡ 0; stages degenerate to the anchor points themselves.
    Zero,
}

impl RateFunction {
    pub fn power(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 1.0 {
            return Err(Error::domain(format!(
                "power rate requires alpha > 1, got {alpha}"
            )));
        }
        Ok(RateFunction::Power { alpha })
    }

    pub fn scaled(omega: RateSequence) -> Self {
        RateFunction::Scaled { omega }
    }

    pub fn geometric(beta: &crate::base::BaseValue) -> Self {
        RateFunction::Geometric { beta: beta.value() }
    }

    pub fn table(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("table rate must be nonempty"));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::domain(format!(
                "table rate entries must be nonnegative, got {bad}"
            )));
        }
        Ok(RateFunction::Table { values })
    }

    pub fn eval(&self, n: u32) -> Result<f64> {
        if n == 0 {
            return Err(Error::domain("rates are indexed from n = 1"));
        }
        match self {
            RateFunction::Power { alpha } => Ok((-(n as f64) * alpha).exp2()),
            RateFunction::Scaled { omega } => Ok(omega.eval(n)? * (-(n as f64)).exp2()),
            RateFunction::Geometric { beta } => Ok(beta.powi(-(n as i32))),
            RateFunction::Table { values } => {
                if n as usize > values.len() {
                    Err(Error::range(format!(
                        "index {n} exceeds table length {}",
                        values.len()
                    )))
                } else {
                    Ok(values[n as usize - 1])
                }
            }
            RateFunction::Zero => Ok(0.0),
        }
    }

    /// Largest stage this rate can be evaluated at, if bounded.
    pub fn horizon(&self) -> Option<u32> {
        match self {
            RateFunction::Scaled { omega } if omega.horizon() != u32::MAX => Some(omega.horizon()),
            RateFunction::Table { values } => Some(values.len() as u32),
            _ => None,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            RateFunction::Power { alpha } => format!("power({alpha})"),
            RateFunction::Scaled { omega } => format!("scaled({})", omega.describe()),
            RateFunction::Geometric { beta } => format!("geometric({beta})"),
            RateFunction::Table { values } => format!("table[{}]", values.len()),
            RateFunction::Zero => "zero".to_string(),
        }
    }
}

/// Empirical growing-regularity constant: the largest ratio ω(n)/ω(n+m)
/// over 1 <= n <= N. Small values mean ω grows; a nonincreasing ω pushes
/// the maximum above 1.
pub fn growing_regularity_profile(omega: &RateSequence, m: u32, n_max: u32) -> Result<f64> {
    if m == 0 || n_max == 0 {
        return Err(Error::domain("growing regularity requires m >= 1 and N >= 1"));
    }
    if n_max.saturating_add(m) > omega.horizon() {
        return Err(Error::range(format!(
            "N + m = {} exceeds sequence horizon {}",
            n_max as u64 + m as u64,
            omega.horizon()
        )));
    }
    let mut best = f64::NEG_INFINITY;
    for n in 1..=n_max {
        let ratio = omega.eval(n)? / omega.eval(n + m)?;
        if ratio > best {
            best = ratio;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_rate_is_exact_dyadic() {
        let psi = RateFunction::power(2.0).unwrap();
        assert_eq!(psi.eval(3).unwrap(), 0.015625);
    }

    #[test]
    fn scaled_log_matches_independent_evaluation() {
        // ln 8 = 3 ln 2, evaluated without calling ln on 8.
        let psi = RateFunction::scaled(RateSequence::log());
        let expected = 3.0 * std::f64::consts::LN_2 / 256.0;
        assert!((psi.eval(8).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn log_sequence_floors_at_one() {
        let omega = RateSequence::log();
        assert_eq!(omega.eval(1).unwrap(), 1.0);
        assert_eq!(omega.eval(2).unwrap(), 1.0); // ln 2 < 1
        assert!((omega.eval(3).unwrap() - 3.0_f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn power_rate_strictly_decreasing() {
        let psi = RateFunction::power(1.5).unwrap();
        let mut prev = f64::INFINITY;
        for n in 1..80 {
            let v = psi.eval(n).unwrap();
            assert!(v < prev, "power rate must strictly decrease at n = {n}");
            prev = v;
        }
    }

    #[test]
    fn table_rate_range_error_past_end() {
        let psi = RateFunction::table(vec![0.1, 0.2]).unwrap();
        assert_eq!(psi.eval(2).unwrap(), 0.2);
        assert!(matches!(psi.eval(3), Err(Error::Range(_))));
    }

    #[test]
    fn zero_rate() {
        assert_eq!(RateFunction::Zero.eval(7).unwrap(), 0.0);
    }

    #[test]
    fn index_zero_rejected() {
        assert!(RateFunction::power(2.0).unwrap().eval(0).is_err());
        assert!(RateSequence::linear().eval(0).is_err());
    }

    #[test]
    fn regularity_linear_attains_tail_ratio() {
        // n/(n+3) increases in n, so the max sits at n = 50.
        let k = growing_regularity_profile(&RateSequence::linear(), 3, 50).unwrap();
        assert!((k - 50.0 / 53.0).abs() < 1e-15);
    }

    #[test]
    fn regularity_oscillating_table() {
        let omega = RateSequence::table(vec![2.0, 1.0, 2.0, 1.0, 2.0]).unwrap();
        let k = growing_regularity_profile(&omega, 1, 4).unwrap();
        assert_eq!(k, 2.0);
    }

    #[test]
    fn regularity_horizon_guard() {
        let omega = RateSequence::table(vec![1.0, 1.0, 1.0]).unwrap();
        assert!(matches!(
            growing_regularity_profile(&omega, 1, 3),
            Err(Error::Range(_))
        ));
        assert!(growing_regularity_profile(&omega, 1, 2).is_ok());
    }

    #[test]
    fn constant_sequence_requires_positive() {
        assert!(RateSequence::constant(0.0).is_err());
        assert!(RateSequence::constant(5.0).is_ok());
    }
}

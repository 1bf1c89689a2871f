use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::IntegerPolynomial;

/// How a base value was obtained. Polynomial provenance keeps the defining
/// polynomial and the index of the chosen root among the real roots of the
/// polynomial inside (1, 2), sorted ascending.
#[derive(Clone, Debug, Serialize)]
pub enum Provenance {
    Literal,
    PolynomialRoot {
        polynomial: IntegerPolynomial,
        root_index: usize,
    },
}

/// A base for binary expansions, strictly inside (1, 2).
///
/// The admissible interval for raw expansions in this base is
/// [0, 1/(value-1)]; normalized quantities rescale by (value - 1) into
/// [0, 1].
#[derive(Clone, Debug, Serialize)]
pub struct BaseValue {
    value: f64,
    provenance: Provenance,
}

impl BaseValue {
    /// A literal base. Must lie strictly inside (1, 2).
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() || value <= 1.0 || value >= 2.0 {
            return Err(Error::domain(format!(
                "base must lie strictly inside (1, 2), got {value}"
            )));
        }
        Ok(BaseValue {
            value,
            provenance: Provenance::Literal,
        })
    }

    /// A base carrying polynomial provenance. The value must sit within
    /// 1e-9 of a true root, measured by the backward error |p(v)|/|p'(v)|:
    /// a raw residual bound is unattainable in doubles once the derivative
    /// at the root is large (the multinacci family beyond order ~20 has
    /// |p'| of order k·2^k there).
    pub fn with_provenance(value: f64, polynomial: IntegerPolynomial, root_index: usize) -> Result<Self> {
        let base = BaseValue::new(value)?;
        let residual = polynomial.eval(value).abs();
        let scale = polynomial.derivative_eval(value).abs().max(1.0);
        if residual >= 1e-9 * scale {
            return Err(Error::domain(format!(
                "value {value} is not a root of {polynomial} (residual {residual:.3e})"
            )));
        }
        Ok(BaseValue {
            value: base.value,
            provenance: Provenance::PolynomialRoot {
                polynomial,
                root_index,
            },
        })
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Right endpoint 1/(value - 1) of the admissible interval.
    pub fn domain_max(&self) -> f64 {
        1.0 / (self.value - 1.0)
    }
}

impl std::fmt::Display for BaseValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.value)
    }
}

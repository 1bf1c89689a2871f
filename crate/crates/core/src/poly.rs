use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Univariate polynomial with integer coefficients, leading coefficient
/// first. `[1, 0, -2]` is x^2 - 2.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntegerPolynomial {
    coefficients: Vec<i64>,
}

impl IntegerPolynomial {
    /// Builds a polynomial from coefficients, leading first. The leading
    /// coefficient must be nonzero and the degree at least 1.
    pub fn new(coefficients: Vec<i64>) -> Result<Self> {
        if coefficients.len() < 2 {
            return Err(Error::domain("polynomial degree must be at least 1"));
        }
        if coefficients[0] == 0 {
            return Err(Error::domain("leading coefficient must be nonzero"));
        }
        Ok(IntegerPolynomial { coefficients })
    }

    pub fn coefficients(&self) -> &[i64] {
        &self.coefficients
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn is_monic(&self) -> bool {
        self.coefficients[0] == 1
    }

    pub fn constant_term(&self) -> i64 {
        *self.coefficients.last().unwrap()
    }

    pub fn eval(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for &c in &self.coefficients {
            acc = acc * x + c as f64;
        }
        acc
    }

    pub fn derivative_eval(&self, x: f64) -> f64 {
        let n = self.degree();
        let mut acc = 0.0;
        for (i, &c) in self.coefficients.iter().take(n).enumerate() {
            acc = acc * x + (n - i) as f64 * c as f64;
        }
        acc
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in &self.coefficients {
            acc = acc * z + Complex64::new(c as f64, 0.0);
        }
        acc
    }

    pub fn derivative_eval_complex(&self, z: Complex64) -> Complex64 {
        let n = self.degree();
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, &c) in self.coefficients.iter().take(n).enumerate() {
            let k = (n - i) as f64;
            acc = acc * z + Complex64::new(k * c as f64, 0.0);
        }
        acc
    }

    /// Exact evaluation at an integer, `None` on i128 overflow.
    pub fn eval_exact(&self, x: i128) -> Option<i128> {
        let mut acc: i128 = 0;
        for &c in &self.coefficients {
            acc = acc.checked_mul(x)?.checked_add(c as i128)?;
        }
        Some(acc)
    }

    /// The multinacci pattern x^{k+1} - x^k - ... - x - 1 for order k >= 1.
    pub fn multinacci(k: u32) -> Self {
        let mut coefficients = vec![-1i64; k as usize + 2];
        coefficients[0] = 1;
        IntegerPolynomial { coefficients }
    }

    /// `Some(k)` when the coefficients match the multinacci pattern exactly.
    pub fn multinacci_order(&self) -> Option<u32> {
        if self.degree() < 2 || self.coefficients[0] != 1 {
            return None;
        }
        if self.coefficients[1..].iter().all(|&c| c == -1) {
            Some(self.degree() as u32 - 1)
        } else {
            None
        }
    }
}

impl std::fmt::Display for IntegerPolynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let n = self.degree();
        let mut first = true;
        for (i, &c) in self.coefficients.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let power = n - i;
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
                first = false;
            } else if c < 0 {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let a = c.unsigned_abs();
            match power {
                0 => write!(f, "{a}")?,
                1 => {
                    if a == 1 {
                        write!(f, "x")?
                    } else {
                        write!(f, "{a}x")?
                    }
                }
                _ => {
                    if a == 1 {
                        write!(f, "x^{power}")?
                    } else {
                        write!(f, "{a}x^{power}")?
                    }
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

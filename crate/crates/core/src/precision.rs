//! Working-precision context shared by every extended-precision routine.
//!
//! All multiple-precision values are [`rug::Float`]s. A [`PrecisionContext`]
//! fixes the mantissa width used for intermediate results and the tolerance
//! that iterative procedures aim for.

use rug::float::Constant;
use rug::Float;

use crate::error::{Error, Result};

/// Mantissa width and target tolerance for a computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecisionContext {
    mantissa_bits: u32,
    target_tolerance: f64,
}

impl PrecisionContext {
    pub const DOUBLE_BITS: u32 = 53;

    /// Context with the default tolerance `2^-(bits-8)`.
    pub fn new(mantissa_bits: u32) -> Result<Self> {
        if mantissa_bits < Self::DOUBLE_BITS {
            return Err(Error::domain(format!(
                "mantissa_bits must be >= 53, got {mantissa_bits}"
            )));
        }
        let tol = 2f64.powi(-(mantissa_bits as i32 - 8));
        Self::with_tolerance(mantissa_bits, tol)
    }

    pub fn with_tolerance(mantissa_bits: u32, target_tolerance: f64) -> Result<Self> {
        if mantissa_bits < Self::DOUBLE_BITS {
            return Err(Error::domain(format!(
                "mantissa_bits must be >= 53, got {mantissa_bits}"
            )));
        }
        if !(target_tolerance > 0.0) || !target_tolerance.is_finite() {
            return Err(Error::domain(format!(
                "target_tolerance must be positive and finite, got {target_tolerance}"
            )));
        }
        // The tolerance must be resolvable at this width.
        let eps = 2f64.powi(-(mantissa_bits as i32));
        if target_tolerance < eps {
            return Err(Error::domain(format!(
                "target_tolerance {target_tolerance:e} is below the unit roundoff {eps:e}"
            )));
        }
        Ok(Self {
            mantissa_bits,
            target_tolerance,
        })
    }

    /// IEEE double width.
    pub fn double() -> Self {
        Self::new(Self::DOUBLE_BITS).expect("53 bits is valid")
    }

    pub fn mantissa_bits(&self) -> u32 {
        self.mantissa_bits
    }

    pub fn target_tolerance(&self) -> f64 {
        self.target_tolerance
    }

    /// Same tolerance policy with `extra` guard bits.
    pub fn widened(&self, extra: u32) -> Self {
        let bits = self.mantissa_bits + extra;
        Self {
            mantissa_bits: bits,
            target_tolerance: self.target_tolerance,
        }
    }

    /// Unit roundoff `2^-bits`.
    pub fn epsilon(&self) -> f64 {
        2f64.powi(-(self.mantissa_bits as i32))
    }

    pub fn float(&self, v: f64) -> Float {
        Float::with_val(self.mantissa_bits, v)
    }

    pub fn zero(&self) -> Float {
        Float::new(self.mantissa_bits)
    }

    pub fn one(&self) -> Float {
        Float::with_val(self.mantissa_bits, 1)
    }

    pub fn pi(&self) -> Float {
        Float::with_val(self.mantissa_bits, Constant::Pi)
    }

    pub fn euler_gamma(&self) -> Float {
        Float::with_val(self.mantissa_bits, Constant::Euler)
    }

    pub fn ln2(&self) -> Float {
        Float::with_val(self.mantissa_bits, Constant::Log2)
    }

    /// Re-round a value to this context's width.
    pub fn round(&self, v: &Float) -> Float {
        Float::with_val(self.mantissa_bits, v)
    }

    /// Tolerance as a `Float` (avoids f64 underflow concerns at high widths).
    pub fn tolerance_float(&self) -> Float {
        self.float(self.target_tolerance)
    }
}

impl Default for PrecisionContext {
    fn default() -> Self {
        Self::double()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_narrow_mantissa() {
        assert!(PrecisionContext::new(52).is_err());
        assert!(PrecisionContext::new(53).is_ok());
    }

    #[test]
    fn rejects_unrepresentable_tolerance() {
        assert!(PrecisionContext::with_tolerance(53, 1e-20).is_err());
        assert!(PrecisionContext::with_tolerance(53, 0.0).is_err());
        assert!(PrecisionContext::with_tolerance(256, 1e-70).is_ok());
    }

    #[test]
    fn default_tolerance_tracks_width() {
        let c = PrecisionContext::new(256).unwrap();
        assert!(c.target_tolerance() < 1e-70);
        assert_eq!(c.float(0.5).prec(), 256);
    }
}

use rug::Float;
use serde::Serialize;

/// Outcome of checking one identity or equation at one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub equation_id: String,
    pub inputs: Vec<(String, f64)>,
    /// |LHS − RHS|
    pub residual: f64,
    /// Largest absolute additive term on either side.
    pub scale: f64,
    /// residual / scale (0 when both vanish).
    pub relative: f64,
}

impl ResidualReport {
    pub(crate) fn from_terms(
        equation_id: &str,
        inputs: Vec<(String, f64)>,
        lhs: &[Float],
        rhs: &[Float],
        prec: u32,
    ) -> Self {
        let sum = |v: &[Float]| v.iter().fold(Float::new(prec), |acc, x| acc + x);
        let diff = Float::with_val(prec, sum(lhs) - sum(rhs)).abs();
        let scale = lhs
            .iter()
            .chain(rhs)
            .map(|x| Float::with_val(prec, x.abs_ref()))
            .fold(Float::new(prec), |a, b| if b > a { b } else { a });
        let relative = if scale.is_zero() {
            if diff.is_zero() { 0.0 } else { f64::INFINITY }
        } else {
            Float::with_val(prec, &diff / &scale).to_f64()
        };
        Self {
            equation_id: equation_id.to_string(),
            inputs,
            residual: diff.to_f64(),
            scale: scale.to_f64(),
            relative,
        }
    }

    pub(crate) fn from_difference(equation_id: &str, inputs: Vec<(String, f64)>, a: &Float, b: &Float, prec: u32) -> Self {
        Self::from_terms(equation_id, inputs, std::slice::from_ref(a), std::slice::from_ref(b), prec)
    }
}

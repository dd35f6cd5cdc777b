//! Central finite differences at a precision-scaled step.

use rug::Float;

use crate::error::Result;
use crate::precision::PrecisionContext;

/// Value and first three derivatives of `f` at `x` from a five-point stencil
/// with step h = x·2^{−⌊bits/5⌋}.
///
/// The first two derivatives are fourth-order accurate, the third second-order.
pub fn five_point(
    f: impl Fn(&Float) -> Result<Float>,
    x: &Float,
    ctx: &PrecisionContext,
) -> Result<[Float; 4]> {
    let p = ctx.mantissa_bits();
    let h = Float::with_val(p, x.abs_ref()) >> (p / 5) as i32;
    let at = |k: i32| -> Result<Float> { f(&(Float::with_val(p, &h * k) + x)) };
    let fm2 = at(-2)?;
    let fm1 = at(-1)?;
    let f0 = f(x)?;
    let fp1 = at(1)?;
    let fp2 = at(2)?;
    let d1 = (Float::with_val(p, &fm2 - &fp2) + Float::with_val(p, &fp1 - &fm1) * 8u32)
        / Float::with_val(p, &h * 12u32);
    let h2 = Float::with_val(p, h.square_ref());
    let d2 = (Float::with_val(p, &fp1 + &fm1) * 16u32
        - Float::with_val(p, &fp2 + &fm2)
        - Float::with_val(p, &f0 * 30u32))
        / Float::with_val(p, &h2 * 12u32);
    let h3 = Float::with_val(p, &h2 * &h);
    let d3 = (Float::with_val(p, &fp2 - &fm2) - Float::with_val(p, &fp1 - &fm1) * 2u32)
        / Float::with_val(p, &h3 * 2u32);
    Ok([f0, d1, d2, d3])
}

/// (σ, σ′, σ″) for σ(x) = x f′(x), from the stencil output of [`five_point`].
pub fn log_derivative_sigma(d: &[Float; 4], x: &Float) -> (Float, Float, Float) {
    let p = d[0].prec();
    let sigma = Float::with_val(p, x * &d[1]);
    let s1 = Float::with_val(p, x * &d[2]) + &d[1];
    let s2 = Float::with_val(p, x * &d[3]) + Float::with_val(p, &d[2] * 2u32);
    (sigma, s1, s2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivatives_of_exponential() {
        let c = PrecisionContext::new(256).unwrap();
        let x = c.float(0.7);
        let d = five_point(|y| Ok(Float::with_val(256, y.exp_ref())), &x, &c).unwrap();
        let e = x.clone().exp();
        for (k, v) in d.iter().enumerate() {
            let tol = if k == 3 { 1e-25 } else { 1e-40 };
            assert!(Float::with_val(256, v - &e).abs() < tol, "k={k}");
        }
    }
}

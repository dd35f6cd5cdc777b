use rug::float::Constant;
use rug::Float;

use super::gamma::log_gamma;
use crate::error::{Error, Result};
use crate::precision::PrecisionContext;

/// J_α(x) and J_α′(x) for α > −1, x ≥ 0.
///
/// Ascending series with enough guard bits to absorb its cancellation; the
/// Hankel asymptotic expansion takes over once its smallest term is below the
/// working precision.
pub fn bessel_j(alpha: &Float, x: &Float, ctx: &PrecisionContext) -> Result<(Float, Float)> {
    if !(alpha.is_finite() && *alpha > -1) {
        return Err(Error::domain(format!("bessel_j requires alpha > -1, got {alpha}")));
    }
    if x.is_nan() || *x < 0 || x.is_infinite() {
        return Err(Error::domain(format!("bessel_j requires finite x >= 0, got {x}")));
    }
    let bits = ctx.mantissa_bits();
    if x.is_zero() {
        return Ok(origin_limits(alpha, bits));
    }
    let xf = x.to_f64();
    if use_asymptotic(xf, bits) {
        let (j, d) = hankel(alpha, x, bits + 16);
        return Ok((ctx.round(&j), ctx.round(&d)));
    }
    let (j, d) = ascending(alpha, x, bits)?;
    Ok((ctx.round(&j), ctx.round(&d)))
}

fn origin_limits(alpha: &Float, bits: u32) -> (Float, Float) {
    let zero = Float::new(bits);
    let inf = Float::with_val(bits, rug::float::Special::Infinity);
    if alpha.is_zero() {
        (Float::with_val(bits, 1), zero)
    } else if *alpha < 0 {
        (inf.clone(), -inf)
    } else if *alpha == 1 {
        (zero, Float::with_val(bits, 0.5))
    } else if *alpha < 1 {
        (zero, inf)
    } else {
        (zero.clone(), zero)
    }
}

fn use_asymptotic(x: f64, bits: u32) -> bool {
    // smallest Hankel term ~ e^{−2x}
    2.0 * x * std::f64::consts::LOG2_E > (bits + 24) as f64
}

fn ascending(alpha: &Float, x: &Float, bits: u32) -> Result<(Float, Float)> {
    let guard = (x.to_f64() * std::f64::consts::LOG2_E).ceil() as u32 + 24;
    let p = bits + guard;
    let wctx = PrecisionContext::new(p)?;
    let alpha = Float::with_val(p, alpha);
    let x = Float::with_val(p, x);
    let half_x = Float::with_val(p, &x / 2u32);
    let q = -Float::with_val(p, &half_x * &half_x);
    // t_0 = (x/2)^α / Γ(α+1)
    let lg = log_gamma(&Float::with_val(p, &alpha + 1u32), &wctx)?;
    let mut term = (Float::with_val(p, half_x.ln_ref()) * &alpha - lg).exp();
    let mut sum = term.clone();
    let mut dsum = Float::with_val(p, &term * &alpha);
    let cutoff = p as i32 + 8;
    for k in 1u32..1_000_000 {
        term *= &q;
        term /= Float::with_val(p, &alpha + k) * k;
        sum += &term;
        dsum += Float::with_val(p, &alpha + 2 * k) * &term;
        if term.is_zero() || (term.get_exp().unwrap_or(i32::MIN) < sum.get_exp().unwrap_or(0) - cutoff && k as f64 > x.to_f64()) {
            break;
        }
    }
    let d = dsum / &x;
    Ok((sum, d))
}

/// Hankel expansion of J_α and J_{α+1}; derivative from J′ = (α/x)J_α − J_{α+1}.
fn hankel(alpha: &Float, x: &Float, p: u32) -> (Float, Float) {
    let alpha = Float::with_val(p, alpha);
    let x = Float::with_val(p, x);
    let j0 = hankel_value(&alpha, &x, p);
    let j1 = hankel_value(&Float::with_val(p, &alpha + 1u32), &x, p);
    let d = Float::with_val(p, &alpha / &x) * &j0 - j1;
    (j0, d)
}

fn hankel_value(nu: &Float, x: &Float, p: u32) -> Float {
    let pi = Float::with_val(p, Constant::Pi);
    let mu = Float::with_val(p, nu * nu) * 4u32;
    let eight_x = Float::with_val(p, x * 8u32);
    // a_k = Π_{i=1..k} (μ − (2i−1)²) / (k! (8x)^k)
    let mut pp = Float::with_val(p, 1);
    let mut qq = Float::new(p);
    let mut a = Float::with_val(p, 1);
    let mut prev_abs = Float::with_val(p, rug::float::Special::Infinity);
    for k in 1u32..100_000 {
        let odd = 2 * k - 1;
        a *= Float::with_val(p, &mu - odd * odd);
        a /= Float::with_val(p, &eight_x * k);
        let mag = Float::with_val(p, a.abs_ref());
        if mag >= prev_abs || a.is_zero() {
            break;
        }
        prev_abs = mag;
        // P takes even k with sign (−1)^{k/2}; Q takes odd k with sign (−1)^{(k−1)/2}
        match k % 4 {
            0 => pp += &a,
            1 => qq += &a,
            2 => pp -= &a,
            _ => qq -= &a,
        }
    }
    let omega = Float::with_val(p, x - Float::with_val(p, nu * &pi) / 2u32) - Float::with_val(p, &pi / 4u32);
    let (s, c) = omega.sin_cos(Float::new(p));
    let amp = Float::with_val(p, Float::with_val(p, 2u32) / (pi * x)).sqrt();
    amp * (pp * c - qq * s)
}

/// J_{1/2}(x) = √(2/(πx)) sin x and its derivative.
#[cfg(test)]
fn half_order_closed_form(x: &Float, p: u32) -> (Float, Float) {
    let pi = Float::with_val(p, Constant::Pi);
    let amp = Float::with_val(p, Float::with_val(p, 2u32) / (pi * x)).sqrt();
    let (s, c) = Float::with_val(p, x).sin_cos(Float::new(p));
    let j = Float::with_val(p, &amp * &s);
    let d = amp * c - Float::with_val(p, &j / x) / 2u32;
    (j, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_values() {
        let c = PrecisionContext::new(64).unwrap();
        let (j, d) = bessel_j(&c.float(0.0), &c.float(0.0), &c).unwrap();
        assert_eq!(j, 1);
        assert_eq!(d, 0);
        let (j, d) = bessel_j(&c.float(1.0), &c.float(0.0), &c).unwrap();
        assert_eq!(j, 0);
        assert_eq!(d, 0.5);
    }

    #[test]
    fn half_order_matches_closed_form() {
        let c = PrecisionContext::new(128).unwrap();
        for &x in &[0.01, 0.7, 3.0, 12.0, 25.0] {
            let (j, d) = bessel_j(&c.float(0.5), &c.float(x), &c).unwrap();
            let (je, de) = half_order_closed_form(&c.float(x), 128);
            assert!(Float::with_val(128, &j - &je).abs() < 1e-34, "x={x}");
            assert!(Float::with_val(128, &d - &de).abs() < 1e-34, "x={x}");
        }
    }

    #[test]
    fn asymptotic_and_series_agree_near_crossover() {
        let p = 53;
        let a = Float::with_val(p + 40, 0.3);
        let x = Float::with_val(p + 40, 30.0);
        let (ja, da) = hankel(&a, &x, p + 40);
        let (js, ds) = ascending(&a, &x, p + 40).unwrap();
        assert!(Float::with_val(p, &ja - &js).abs() < 1e-20);
        assert!(Float::with_val(p, &da - &ds).abs() < 1e-20);
    }

    #[test]
    fn rejects_order_at_or_below_minus_one() {
        let c = PrecisionContext::double();
        assert!(bessel_j(&c.float(-1.0), &c.float(1.0), &c).is_err());
    }
}

use rug::ops::Pow;
use rug::Float;

use crate::error::{Error, Result};
use crate::precision::PrecisionContext;

const GUARD: u32 = 24;

/// log Γ(z) for z > 0.
pub fn log_gamma(z: &Float, ctx: &PrecisionContext) -> Result<Float> {
    if !(z.is_finite() && *z > 0) {
        return Err(Error::domain(format!("log_gamma requires z > 0, got {z}")));
    }
    Ok(Float::with_val(ctx.mantissa_bits(), z.ln_gamma_ref()))
}

/// log B(a, b) = log Γ(a) + log Γ(b) − log Γ(a+b).
pub fn log_beta(a: &Float, b: &Float, ctx: &PrecisionContext) -> Result<Float> {
    let w = ctx.widened(GUARD);
    let ab = Float::with_val(w.mantissa_bits(), a + b);
    let v = log_gamma(a, &w)? + log_gamma(b, &w)? - log_gamma(&ab, &w)?;
    Ok(ctx.round(&v))
}

/// Upper incomplete Gamma Γ(a, x) = ∫_x^∞ u^{a−1} e^{−u} du.
pub fn gamma_upper(a: &Float, x: &Float, ctx: &PrecisionContext) -> Result<Float> {
    if !(a.is_finite() && *a > 0) {
        return Err(Error::domain(format!("gamma_upper requires a > 0, got {a}")));
    }
    if x.is_nan() || *x < 0 {
        return Err(Error::domain(format!("gamma_upper requires x >= 0, got {x}")));
    }
    let w = ctx.widened(GUARD);
    let p = w.mantissa_bits();
    if x.is_zero() {
        return Ok(ctx.round(&log_gamma(a, &w)?.exp()));
    }
    if x.is_infinite() {
        return Ok(ctx.zero());
    }
    let a = Float::with_val(p, a);
    let x = Float::with_val(p, x);
    let ap1 = Float::with_val(p, &a + 1u32);
    let v = if x <= ap1 {
        // Γ(a) − γ(a,x) with γ from its power series.
        let lower = lower_series(&a, &x, p);
        let full = log_gamma(&a, &w)?.exp();
        full - lower
    } else {
        upper_continued_fraction(&a, &x, p)?
    };
    Ok(ctx.round(&v))
}

/// γ(a,x) = x^a e^{−x} Σ_k x^k / (a (a+1) ... (a+k)).
fn lower_series(a: &Float, x: &Float, p: u32) -> Float {
    let mut term = Float::with_val(p, 1) / a;
    let mut sum = term.clone();
    let mut denom = a.clone();
    for _ in 0..100_000 {
        denom += 1u32;
        term *= x;
        term /= &denom;
        sum += &term;
        if term.is_zero() || term.clone().abs() < sum.clone().abs() >> (p as i32 + 4) {
            break;
        }
    }
    let pref = Float::with_val(p, x.ln_ref()) * a - x;
    sum * pref.exp()
}

/// Modified Lentz evaluation of the Legendre continued fraction for Γ(a,x), x > a+1.
fn upper_continued_fraction(a: &Float, x: &Float, p: u32) -> Result<Float> {
    let tiny = Float::with_val(p, 1) >> (p as i32 * 2);
    let mut b = Float::with_val(p, x + 1u32) - a;
    let mut c = Float::with_val(p, 1) / &tiny;
    let mut d = Float::with_val(p, 1) / &b;
    let mut h = d.clone();
    let stop = Float::with_val(p, 1) >> (p as i32 - 2);
    for i in 1..200_000u32 {
        let an = Float::with_val(p, a - i) * i;
        b += 2u32;
        d = Float::with_val(p, &an * &d) + &b;
        if d.clone().abs() < tiny {
            d = tiny.clone();
        }
        c = Float::with_val(p, &an / &c) + &b;
        if c.clone().abs() < tiny {
            c = tiny.clone();
        }
        d.recip_mut();
        let delta = Float::with_val(p, &d * &c);
        h *= &delta;
        if (delta - 1u32).abs() < stop {
            let pref = Float::with_val(p, x.ln_ref()) * a - x;
            return Ok(h * pref.exp());
        }
    }
    Err(Error::Convergence {
        what: "incomplete gamma continued fraction".into(),
        best: h.to_f64(),
        error_bound: f64::NAN,
    })
}

/// ∫_t^1 x^{a−1} (1−x)^{b−1} dx.
pub fn beta_incomplete(a: &Float, b: &Float, t: &Float, ctx: &PrecisionContext) -> Result<Float> {
    if !(a.is_finite() && *a > 0 && b.is_finite() && *b > 0) {
        return Err(Error::domain(format!(
            "beta_incomplete requires a, b > 0, got a={a}, b={b}"
        )));
    }
    if t.is_nan() || *t < 0 || *t > 1 {
        return Err(Error::domain(format!("beta_incomplete requires t in [0,1], got {t}")));
    }
    let w = ctx.widened(GUARD);
    let p = w.mantissa_bits();
    if *t == 1 {
        return Ok(ctx.zero());
    }
    let complete = || -> Result<Float> { Ok(log_beta(a, b, &w)?.exp()) };
    if t.is_zero() {
        return Ok(ctx.round(&complete()?));
    }
    let one_minus_t = Float::with_val(p, 1u32 - t);
    let half = Float::with_val(p, 0.5);
    let v = if one_minus_t <= half {
        // ∫_t^1 = B_{1−t}(b, a)
        beta_lower_series(b, a, &one_minus_t, p)
    } else {
        complete()? - beta_lower_series(a, b, t, p)
    };
    Ok(ctx.round(&v))
}

/// B_x(p,q) = ∫_0^x u^{p−1}(1−u)^{q−1} du = x^p Σ_k (1−q)_k x^k / (k! (p+k)), 0 ≤ x ≤ 1/2.
fn beta_lower_series(pp: &Float, q: &Float, x: &Float, prec: u32) -> Float {
    let mut coeff = Float::with_val(prec, 1);
    let mut sum = Float::with_val(prec, 1) / pp;
    let one_minus_q = Float::with_val(prec, 1u32 - q);
    for k in 0..1_000_000u32 {
        // coeff_{k+1} = coeff_k (1−q+k) x / (k+1)
        coeff *= Float::with_val(prec, &one_minus_q + k);
        if coeff.is_zero() {
            break;
        }
        coeff *= x;
        coeff /= k + 1;
        let term = Float::with_val(prec, &coeff / Float::with_val(prec, pp + (k + 1)));
        sum += &term;
        if term.abs() < sum.clone().abs() >> (prec as i32 + 4) {
            break;
        }
    }
    let xp = Float::with_val(prec, x.pow(pp));
    sum * xp
}

//! Constant terms of the log-probability expansions.

use rug::Float;

use crate::error::{Error, Result};
use crate::precision::PrecisionContext;
use crate::quadrature::integrate_adaptive;
use crate::specfun::{log_barnes_g, log_gamma, zeta_prime_minus_one};

fn log_two_pi(ctx: &PrecisionContext) -> Float {
    let p = ctx.mantissa_bits();
    Float::with_val(p, ctx.pi() * 2u32).ln()
}

/// c₁(α) = log G(α+1) − (α/2) log 2π.
pub fn constant_c1(alpha: f64, ctx: &PrecisionContext) -> Result<Float> {
    if !(alpha > -1.0) || !alpha.is_finite() {
        return Err(Error::domain(format!("c1 needs alpha > -1, got {alpha}")));
    }
    let g = log_barnes_g(&ctx.float(alpha + 1.0), ctx)?;
    Ok(g - log_two_pi(ctx) * (alpha / 2.0))
}

/// c₂(α, β) = log[G(α+1) G²(β+1) / (2π)^{(α+β)/2}] + β(β−1)/2 − (β+½) log Γ(β).
pub fn constant_c2(alpha: f64, beta: f64, ctx: &PrecisionContext) -> Result<Float> {
    if !(alpha > -1.0) || !alpha.is_finite() {
        return Err(Error::domain(format!("c2 needs alpha > -1, got {alpha}")));
    }
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::domain(format!("c2 needs beta > 0, got {beta}")));
    }
    let ga = log_barnes_g(&ctx.float(alpha + 1.0), ctx)?;
    let gb = log_barnes_g(&ctx.float(beta + 1.0), ctx)?;
    let lg = log_gamma(&ctx.float(beta), ctx)?;
    let mut c = ga + gb * 2u32 - log_two_pi(ctx) * ((alpha + beta) / 2.0);
    c += beta * (beta - 1.0) / 2.0;
    c -= lg * (beta + 0.5);
    Ok(c)
}

/// log 2/12 + 3ζ′(−1).
pub fn widom_dyson(ctx: &PrecisionContext) -> Float {
    let p = ctx.mantissa_bits();
    Float::with_val(p, ctx.ln2() / 12u32) + zeta_prime_minus_one(ctx) * 3u32
}

/// Constant of the symmetric Jacobi gap expansion:
/// log[G(½)²√π] + log[G⁴(β+1)/(2π)^β] + β(β−1) − (2β+1) log Γ(β).
pub fn symjue_constant(beta: f64, ctx: &PrecisionContext) -> Result<Float> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::domain(format!("symmetric Jacobi constant needs beta > 0, got {beta}")));
    }
    let p = ctx.mantissa_bits();
    let g_half = log_barnes_g(&ctx.float(0.5), ctx)?;
    let gb = log_barnes_g(&ctx.float(beta + 1.0), ctx)?;
    let lg = log_gamma(&ctx.float(beta), ctx)?;
    let log_sqrt_pi = Float::with_val(p, ctx.pi().ln()) / 2u32;
    let mut c = g_half * 2u32 + log_sqrt_pi;
    c += gb * 4u32 - log_two_pi(ctx) * beta;
    c += beta * (beta - 1.0);
    c -= lg * (2.0 * beta + 1.0);
    Ok(c)
}

/// log Γ(β) + β − (β−½) log β − ½ log 2π.
fn binet_closed_form(beta: f64, ctx: &PrecisionContext) -> Result<Float> {
    let p = ctx.mantissa_bits();
    let b = ctx.float(beta);
    let lb = Float::with_val(p, b.ln_ref());
    Ok(log_gamma(&b, ctx)? + beta - lb * (beta - 0.5) - log_two_pi(ctx) / 2u32)
}

/// ½ − 1/t + 1/(eᵗ − 1), evaluated with enough extra bits to absorb the
/// cancellation near t = 0.
fn binet_kernel(t: &Float, p: u32) -> Float {
    if t.is_zero() {
        return Float::new(p);
    }
    let lost = (-t.get_exp().unwrap_or(0)).max(0) as u32 * 2;
    let q = p + lost + 16;
    let t = Float::with_val(q, t);
    let em1 = Float::with_val(q, t.exp_m1_ref());
    let v = Float::with_val(q, 0.5f64) - Float::with_val(q, 1u32 / &t) + Float::with_val(q, 1u32 / &em1);
    Float::with_val(p, v)
}

/// ∫₀^∞ (½ − 1/t + 1/(eᵗ−1)) e^{−βt}/t dt by adaptive quadrature.
pub fn binet_integral(beta: f64, ctx: &PrecisionContext) -> Result<Float> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::domain(format!("Binet integral needs beta > 0, got {beta}")));
    }
    let p = ctx.mantissa_bits();
    let b = ctx.float(beta);
    let f = move |t: &Float| -> Float {
        if t.is_zero() || t.is_infinite() {
            return Float::new(p);
        }
        let decay = Float::with_val(p, -Float::with_val(p, &b * t)).exp();
        binet_kernel(t, p) * decay / t
    };
    let tol = ctx.target_tolerance().max(1e-30);
    integrate_adaptive(&f, &ctx.zero(), &Float::with_val(p, rug::float::Special::Infinity), tol, ctx)
}

/// f(β+1) − f(β) from its closed form, checked against the Binet integral.
pub fn binet_f_difference(beta: f64, ctx: &PrecisionContext) -> Result<Float> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::domain(format!("binet_f_difference needs beta > 0, got {beta}")));
    }
    let closed = binet_closed_form(beta, ctx)?;
    let integral = binet_integral(beta, ctx)?;
    let gap = Float::with_val(ctx.mantissa_bits(), &closed - &integral).abs().to_f64();
    if gap > 1e-10 {
        return Err(Error::Consistency(format!(
            "Binet closed form {} vs integral {} differ by {gap:e}",
            closed.to_f64(),
            integral.to_f64()
        )));
    }
    Ok(closed)
}

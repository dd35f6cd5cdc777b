//! Quantities derived from finite-n determinants and recurrences.

use rug::Float;

use super::stieltjes::{eval_monic, stieltjes_recurrence, stieltjes_recurrence_with_order};
use super::{hankel_log_det, log_det_at_zero_gap, Route, WeightSpec};
use crate::diff::{five_point, log_derivative_sigma};
use crate::error::{Error, Result};
use crate::precision::PrecisionContext;
use crate::report::ResidualReport;

fn consistency_tolerance(ctx: &PrecisionContext) -> f64 {
    ctx.target_tolerance().max(2f64.powi(-((ctx.mantissa_bits() / 2) as i32)))
}

fn shifted(w: &WeightSpec, d_alpha: f64, d_beta: f64) -> WeightSpec {
    match w {
        WeightSpec::DeformedLaguerre { alpha, t } => WeightSpec::DeformedLaguerre { alpha: alpha + d_alpha, t: t.clone() },
        WeightSpec::DeformedJacobi { alpha, beta, t } => WeightSpec::DeformedJacobi {
            alpha: alpha + d_alpha,
            beta: beta + d_beta,
            t: t.clone(),
        },
        other => other.clone(),
    }
}

/// P_n(z) at z ∈ {0, 1} from the recurrence table only.
pub fn pn_at_point_recurrence(w: &WeightSpec, n: usize, z: u8, ctx: &PrecisionContext) -> Result<Float> {
    check_point(w, z)?;
    let table = stieltjes_recurrence(w, n, ctx)?;
    eval_monic(&table, n, &ctx.float(z as f64))
}

fn check_point(w: &WeightSpec, z: u8) -> Result<()> {
    match (w, z) {
        (WeightSpec::DeformedLaguerre { .. }, 0) | (WeightSpec::DeformedJacobi { .. }, 0 | 1) => Ok(()),
        _ => Err(Error::Argument(format!(
            "P_n(z) is available at z=0 for Laguerre/Jacobi weights and z=1 for Jacobi, got z={z} for {w:?}"
        ))),
    }
}

/// P_n(z) at z ∈ {0, 1}, from the recurrence and checked against
/// (−1)^n D_n(α+1)/D_n(α) (z = 0) or D_n(β+1)/D_n(β) (z = 1).
pub fn pn_at_point(w: &WeightSpec, n: usize, z: u8, ctx: &PrecisionContext) -> Result<Float> {
    let rec = pn_at_point_recurrence(w, n, z, ctx)?;
    let ratio = pn_determinant_ratio(w, n, z, ctx)?;
    let p = ctx.mantissa_bits();
    let rel = Float::with_val(p, &rec - &ratio).abs() / Float::with_val(p, ratio.abs_ref());
    if rel > consistency_tolerance(ctx) {
        return Err(Error::Consistency(format!(
            "P_{n}({z}) recurrence {} vs determinant ratio {} (relative {:e})",
            rec.to_f64(),
            ratio.to_f64(),
            rel.to_f64()
        )));
    }
    Ok(rec)
}

/// The determinant-ratio route for P_n(0) or P_n(1).
pub fn pn_determinant_ratio(w: &WeightSpec, n: usize, z: u8, ctx: &PrecisionContext) -> Result<Float> {
    check_point(w, z)?;
    let raised = if z == 0 { shifted(w, 1.0, 0.0) } else { shifted(w, 0.0, 1.0) };
    let log_ratio = hankel_log_det(&raised, n, ctx)?.log_det - hankel_log_det(w, n, ctx)?.log_det;
    let v = log_ratio.exp();
    Ok(if z == 0 && n % 2 == 1 { -v } else { v })
}

fn laguerre_parts(w: &WeightSpec) -> Result<(f64, &Float)> {
    match w {
        WeightSpec::DeformedLaguerre { alpha, t } => Ok((*alpha, t)),
        _ => Err(Error::Argument("this quantity is defined for the deformed Laguerre weight".into())),
    }
}

fn rn_with_order(alpha: f64, t: &Float, n: usize, m: usize, ctx: &PrecisionContext) -> Result<Float> {
    let p = ctx.mantissa_bits();
    let w = WeightSpec::DeformedLaguerre { alpha, t: t.clone() };
    let table = stieltjes_recurrence_with_order(&w, n + 1, m, ctx)?;
    let pn = eval_monic(&table, n, t)?;
    let ta = Float::with_val(p, rug::ops::Pow::pow(t, &Float::with_val(p, alpha)));
    let e = Float::with_val(p, -t).exp();
    Ok(Float::with_val(p, pn.square_ref()) * ta * e / &table.h[n])
}

/// R_n(t) = P_n(t)² t^α e^{−t} / h_n for the deformed Laguerre weight.
pub fn rn_quantity(w: &WeightSpec, n: usize, ctx: &PrecisionContext) -> Result<Float> {
    let (alpha, t) = laguerre_parts(w)?;
    if !(*t > 0) {
        return Err(Error::domain("rn_quantity requires t > 0"));
    }
    let table = stieltjes_recurrence(&WeightSpec::DeformedLaguerre { alpha, t: t.clone() }, n + 1, ctx)?;
    rn_with_order(alpha, t, n, table.quad_order, ctx)
}

/// R_n and its first two t-derivatives.
pub fn rn_derivatives(w: &WeightSpec, n: usize, ctx: &PrecisionContext) -> Result<[Float; 4]> {
    let (alpha, t) = laguerre_parts(w)?;
    if !(*t > 0) {
        return Err(Error::domain("rn_derivatives requires t > 0"));
    }
    let m = stieltjes_recurrence(&WeightSpec::DeformedLaguerre { alpha, t: t.clone() }, n + 1, ctx)?.quad_order;
    five_point(|x| rn_with_order(alpha, x, n, m, ctx), &Float::with_val(ctx.mantissa_bits(), t), ctx)
}

/// H_n(t) = t d/dt log P from its expression in R_n, R_n′; checked against a
/// direct finite difference of log P.
pub fn hn_quantity(w: &WeightSpec, n: usize, ctx: &PrecisionContext) -> Result<Float> {
    let (alpha, t) = laguerre_parts(w)?;
    if !(*t > 0) {
        return Err(Error::domain("hn_quantity requires t > 0"));
    }
    let p = ctx.mantissa_bits();
    let t = Float::with_val(p, t);
    let h = if alpha == 0.0 {
        // The weight is a translate of e^{−x}: R_n ≡ 1 and log P = −nt.
        -Float::with_val(p, &t * n as u32)
    } else {
        let d = rn_derivatives(w, n, ctx)?;
        let (r, r1) = (&d[0], &d[1]);
        let one_minus = Float::with_val(p, 1u32 - r);
        if Float::with_val(p, r.abs_ref()) < 1e-12 || Float::with_val(p, one_minus.abs_ref()) < 1e-12 {
            return Err(Error::Singularity(format!("R_n = {} is at a pole of the H_n formula", r.to_f64())));
        }
        let t2 = Float::with_val(p, t.square_ref());
        let a = Float::with_val(p, r1.square_ref()) * &t2 / (Float::with_val(p, r * &one_minus) * -4i32);
        let b = Float::with_val(p, &t2 * r) * &one_minus / 4u32;
        let c = Float::with_val(p, &t * r) * (n as f64 + alpha / 2.0);
        let dd = Float::with_val(p, r / &one_minus) * (alpha * alpha / 4.0);
        a + b - c + dd
    };
    let direct = finite_log_det_derivatives(w, n, Route::Auto, ctx)?;
    let direct_h = Float::with_val(p, &t * &direct[1]);
    let scale = Float::with_val(p, h.abs_ref()).max(&Float::with_val(p, 1));
    let gap = Float::with_val(p, &h - &direct_h).abs() / scale;
    if gap > 1e-6 {
        return Err(Error::Consistency(format!(
            "H_n from R_n ({}) disagrees with t d/dt log P ({})",
            h.to_f64(),
            direct_h.to_f64()
        )));
    }
    Ok(h)
}

/// log D_n and its first three derivatives in the gap parameter, by central
/// differences at fixed discretization.
pub fn finite_log_det_derivatives(w: &WeightSpec, n: usize, route: Route, ctx: &PrecisionContext) -> Result<[Float; 4]> {
    let g = w.gap();
    if !(*g > 0) {
        return Err(Error::domain("derivatives in the gap parameter require a positive gap"));
    }
    let p = ctx.mantissa_bits();
    let x = Float::with_val(p, g);
    match route.resolve(n) {
        Route::Moments => five_point(|y| Ok(hankel_log_det(&w.with_gap(y.clone()), n, ctx)?.log_det), &x, ctx),
        _ => {
            let m = stieltjes_recurrence(w, n, ctx)?.quad_order;
            five_point(
                |y| Ok(stieltjes_recurrence_with_order(&w.with_gap(y.clone()), n, m, ctx)?.log_det(n)),
                &x,
                ctx,
            )
        }
    }
}

/// σ_n(a) = a d/da log P(a, n) for the Gaussian weight, with two derivatives.
pub fn gue_sigma_n(a: &Float, n: usize, ctx: &PrecisionContext) -> Result<(Float, Float, Float)> {
    if !(*a > 0) {
        return Err(Error::domain("gue_sigma_n requires a > 0"));
    }
    let w = WeightSpec::GapHermite { a: a.clone() };
    let d = finite_log_det_derivatives(&w, n, Route::Auto, ctx)?;
    Ok(log_derivative_sigma(&d, &Float::with_val(ctx.mantissa_bits(), a)))
}

/// Which even ensemble [`doubling_check`] splits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DoublingFamily {
    Gue,
    SymJacobi { beta: f64 },
}

/// |log D_n(a) − log D̃ − log D̂|: the even-weight determinant against the two
/// half-interval determinants with x^{∓1/2} factors on [a², ·).
///
/// The left side comes from the recurrence of the full even weight, the right
/// side from moment determinants, so the two are computed independently.
pub fn doubling_check(family: DoublingFamily, a: &Float, n: usize, ctx: &PrecisionContext) -> Result<ResidualReport> {
    if n < 2 {
        return Err(Error::domain("doubling_check requires n >= 2"));
    }
    let p = ctx.mantissa_bits();
    let a = Float::with_val(p, a);
    let a2 = Float::with_val(p, a.square_ref());
    let (full, tilde, hat, id) = match family {
        DoublingFamily::Gue => (
            WeightSpec::GapHermite { a: a.clone() }.validated()?,
            WeightSpec::DeformedLaguerre { alpha: -0.5, t: a2.clone() },
            WeightSpec::DeformedLaguerre { alpha: 0.5, t: a2 },
            "gue_doubling",
        ),
        DoublingFamily::SymJacobi { beta } => (
            WeightSpec::GapSymmetricJacobi { beta, a: a.clone() }.validated()?,
            WeightSpec::DeformedJacobi { alpha: -0.5, beta, t: a2.clone() },
            WeightSpec::DeformedJacobi { alpha: 0.5, beta, t: a2 },
            "symjue_doubling",
        ),
    };
    let lhs = if a.is_zero() {
        log_det_at_zero_gap(&full, n, ctx)?
    } else {
        stieltjes_recurrence(&full, n, ctx)?.log_det(n)
    };
    let k_tilde = n.div_ceil(2);
    let k_hat = n / 2;
    let rhs = hankel_log_det(&tilde, k_tilde, ctx)?.log_det + hankel_log_det(&hat, k_hat, ctx)?.log_det;
    let mut inputs = vec![("a".to_string(), a.to_f64()), ("n".to_string(), n as f64)];
    if let DoublingFamily::SymJacobi { beta } = family {
        inputs.push(("beta".to_string(), beta));
    }
    Ok(ResidualReport::from_difference(id, inputs, &lhs, &rhs, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orthopoly::log_det;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(192).unwrap()
    }

    #[test]
    fn laguerre_pn_at_zero_without_gap() {
        let c = ctx();
        for (n, alpha) in [(1usize, 0.5), (3, 1.25), (5, 0.0)] {
            let w = WeightSpec::laguerre(alpha, 0.0).unwrap();
            let got = pn_at_point(&w, n, 0, &c).unwrap().to_f64();
            // (−1)^n Γ(n+α+1)/Γ(α+1), built as a product
            let mut want = if n % 2 == 1 { -1.0 } else { 1.0 };
            for k in 1..=n {
                want *= k as f64 + alpha;
            }
            assert!((got - want).abs() < 1e-12 * want.abs(), "n={n} {got} {want}");
        }
    }

    #[test]
    fn recurrence_and_moments_agree_with_gap() {
        let c = ctx();
        let w = WeightSpec::jacobi(0.5, 1.5, 0.3).unwrap();
        let a = log_det(&w, 5, Route::Moments, &c).unwrap().to_f64();
        let b = log_det(&w, 5, Route::Recurrence, &c).unwrap().to_f64();
        assert!((a - b).abs() < 1e-12 * a.abs().max(1.0), "{a} {b}");
        let w = WeightSpec::hermite(0.7).unwrap();
        let a = log_det(&w, 6, Route::Moments, &c).unwrap().to_f64();
        let b = log_det(&w, 6, Route::Recurrence, &c).unwrap().to_f64();
        assert!((a - b).abs() < 1e-12 * a.abs().max(1.0), "{a} {b}");
    }

    #[test]
    fn jacobi_pn_at_one() {
        let c = ctx();
        let w = WeightSpec::jacobi(0.5, 2.0, 0.2).unwrap();
        let v = pn_at_point(&w, 4, 1, &c).unwrap();
        assert!(v > 0);
    }

    #[test]
    fn translate_weight_gives_linear_h() {
        let c = ctx();
        let w = WeightSpec::laguerre(0.0, 1.5).unwrap();
        let h = hn_quantity(&w, 3, &c).unwrap().to_f64();
        assert!((h + 4.5).abs() < 1e-12);
        let r = rn_quantity(&w, 3, &c).unwrap().to_f64();
        assert!((r - 1.0).abs() < 1e-12, "{r}");
    }

    #[test]
    fn hn_matches_log_derivative() {
        let c = ctx();
        let w = WeightSpec::laguerre(1.5, 2.0).unwrap();
        hn_quantity(&w, 3, &c).unwrap();
    }

    #[test]
    fn doubling_identities_hold() {
        let c = ctx();
        let a = c.float(0.6);
        for n in [2usize, 3, 4] {
            let r = doubling_check(DoublingFamily::Gue, &a, n, &c).unwrap();
            assert!(r.relative < 1e-20, "gue n={n} {r:?}");
            let r = doubling_check(DoublingFamily::SymJacobi { beta: 1.0 }, &a, n, &c).unwrap();
            assert!(r.relative < 1e-20, "symjue n={n} {r:?}");
        }
    }

    #[test]
    fn high_degree_recurrence_reaches_the_bulk() {
        // P_n² x^α e^{−x} carries mass out to x ≈ 4n; a short cutoff shows up as a
        // disagreement between the two routes at this size
        let c = PrecisionContext::new(256).unwrap();
        let n = 200;
        let w = WeightSpec::laguerre(0.5, 25.0 / 800.0).unwrap();
        let r = pn_at_point_recurrence(&w, n, 0, &c).unwrap();
        let w1 = WeightSpec::laguerre(1.5, 25.0 / 800.0).unwrap();
        let ratio = log_det(&w1, n, Route::Recurrence, &c).unwrap() - log_det(&w, n, Route::Recurrence, &c).unwrap();
        let d = (r.abs().ln() - ratio).abs().to_f64();
        assert!(d < 1e-15, "{d}");
    }
}

//! Dyson Coulomb-fluid approximations: equilibrium supports and densities,
//! the S₁/S₂ approximations of P_n at the hard edges, and the table of
//! integrals they are built from.

use std::f64::consts::PI;

use rug::Float;

use crate::error::{Error, Result};
use crate::precision::PrecisionContext;
use crate::quadrature::integrate_adaptive;
use crate::report::ResidualReport;
use crate::specfun::log_gamma;

/// Which fluid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ensemble {
    Lue { alpha: f64, n: usize },
    Jue { alpha: f64, beta: f64, n: usize },
}

/// Single-interval support [t, b] of the equilibrium density.
///
/// `offset` keeps the digits that the endpoint itself would lose:
/// b − (4n+2α+t) for LUE and 1 − b for JUE.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluidSupport {
    pub lower: f64,
    pub upper: f64,
    pub offset: f64,
    pub ensemble: Ensemble,
}

fn check_lue(t: f64, alpha: f64, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::domain("n must be at least 1"));
    }
    if !(alpha > -1.0) || !alpha.is_finite() {
        return Err(Error::domain(format!("alpha must be > -1, got {alpha}")));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::domain(format!("t must be >= 0, got {t}")));
    }
    Ok(())
}

fn check_jue(t: f64, alpha: f64, beta: f64, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::domain("n must be at least 1"));
    }
    if !(alpha > -1.0) || !alpha.is_finite() {
        return Err(Error::domain(format!("alpha must be > -1, got {alpha}")));
    }
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::domain(format!("beta must be > 0, got {beta}")));
    }
    if !(0.0..1.0).contains(&t) {
        return Err(Error::domain(format!("t must lie in [0, 1), got {t}")));
    }
    Ok(())
}

/// Bracketed Newton for an increasing function on [lo, hi] with f(lo) < 0 < f(hi).
fn safeguarded_newton(f: impl Fn(f64) -> (f64, f64), mut lo: f64, mut hi: f64, seed: f64) -> Option<f64> {
    let mut x = seed.clamp(lo, hi);
    for _ in 0..200 {
        let (v, dv) = f(x);
        if v == 0.0 {
            return Some(x);
        }
        if v < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - v / dv;
        let next = if dv.is_finite() && dv != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= 1e-16 * x.abs().max(f64::MIN_POSITIVE) || hi - lo <= 4.0 * f64::EPSILON * hi.abs() {
            return Some(next);
        }
        x = next;
    }
    Some(x)
}

/// Upper endpoint b of the LUE fluid on [t, b].
///
/// The normalization b − 4n − 2α − t + 2α√(t/b) = 0 has one root b > t; it
/// lies below 4n+2α+t for α > 0 and above it for α < 0.
pub fn lue_support(t: f64, alpha: f64, n: usize) -> Result<FluidSupport> {
    check_lue(t, alpha, n)?;
    let base = 4.0 * n as f64 + 2.0 * alpha + t;
    let ensemble = Ensemble::Lue { alpha, n };
    if alpha == 0.0 || t == 0.0 {
        return Ok(FluidSupport { lower: t, upper: base, offset: 0.0, ensemble });
    }
    // unknown d = b − base, normalization d + 2α√(t/(base+d)) = 0
    let g = |d: f64| {
        let b = base + d;
        let r = (t / b).sqrt();
        (d + 2.0 * alpha * r, 1.0 - alpha * r / b)
    };
    let reach = 2.0 * alpha.abs() * (t / t.max(base - 2.0 * alpha.abs())).sqrt() + 1.0;
    let (lo, hi) = if alpha > 0.0 { (t - base, 0.0) } else { (0.0, reach) };
    if !(g(lo).0 < 0.0 && g(hi).0 > 0.0) {
        return Err(Error::ModelDomain(format!("no admissible LUE endpoint for t={t}, alpha={alpha}, n={n}")));
    }
    let seed = -alpha * (t / n as f64).sqrt();
    let d = safeguarded_newton(g, lo, hi, seed)
        .ok_or_else(|| Error::ModelDomain("LUE endpoint iteration failed".into()))?;
    Ok(FluidSupport { lower: t, upper: base + d, offset: d, ensemble })
}

/// b alone; see [`lue_support`].
pub fn lue_endpoint(t: f64, alpha: f64, n: usize) -> Result<f64> {
    Ok(lue_support(t, alpha, n)?.upper)
}

/// Large-n expansion of the LUE endpoint: through n^{−3} in t, or with
/// t = s/(4n) through n^{−3} in s when `scaled` (then `t_or_s` is s).
pub fn lue_endpoint_series(t_or_s: f64, alpha: f64, n: usize, scaled: bool) -> Result<f64> {
    check_lue(t_or_s, alpha, n)?;
    let nf = n as f64;
    let a = alpha;
    if scaled {
        let s = t_or_s;
        let rs = s.sqrt();
        return Ok(4.0 * nf + 2.0 * a
            + (s / 4.0 - a / 2.0 * rs) / nf
            + a * a / 8.0 * rs / (nf * nf)
            + (a / 64.0 * s * rs - a * a / 32.0 * s - 3.0 * a.powi(3) / 64.0 * rs) / nf.powi(3));
    }
    let t = t_or_s;
    let rt = t.sqrt();
    let rn = nf.sqrt();
    Ok(4.0 * nf + 2.0 * a + t - a * rt / rn
        + (a * t * rt + 2.0 * a * a * rt) / (8.0 * nf * rn)
        - a * a * t / (8.0 * nf * nf)
        - 3.0 / 128.0 * (a * t * t * rt + 4.0 * a * a * t * rt + 4.0 * a.powi(3) * rt) / (nf * nf * rn)
        + (a * a * t * t + 2.0 * a.powi(3) * t) / (16.0 * nf.powi(3)))
}

/// Relative residual of b(b − 2(2n+α) − t)² = 4α²t at the computed support.
pub fn lue_cubic_residual(sup: &FluidSupport) -> Result<ResidualReport> {
    let Ensemble::Lue { alpha, n } = sup.ensemble else {
        return Err(Error::Argument("not an LUE support".into()));
    };
    let p = 128;
    let b = Float::with_val(p, sup.upper);
    // b − 2(2n+α) − t is the stored offset
    let d = Float::with_val(p, sup.offset);
    let lhs = b * Float::with_val(p, d.square_ref());
    let rhs = Float::with_val(p, 4.0 * alpha * alpha) * sup.lower;
    Ok(ResidualReport::from_difference(
        "lue_cubic",
        vec![("t".into(), sup.lower), ("alpha".into(), alpha), ("n".into(), n as f64)],
        &lhs,
        &rhs,
        p,
    ))
}

/// √(tb) > α: the sufficient condition for ρ > 0 on (t, b).
pub fn lue_density_positive(sup: &FluidSupport) -> bool {
    match sup.ensemble {
        Ensemble::Lue { alpha, .. } => (sup.lower * sup.upper).sqrt() > alpha,
        Ensemble::Jue { alpha, beta, .. } => {
            let (t, b) = (sup.lower, sup.upper);
            beta * (t * b).sqrt() > alpha * ((1.0 - t) * sup.offset).sqrt()
        }
    }
}

/// ρ(x) = (1/2π)√((b−x)/(x−t)) (1 − (α/x)√(t/b)).
pub fn lue_density(x: f64, t: f64, alpha: f64, n: usize) -> Result<f64> {
    density(&lue_support(t, alpha, n)?, x)
}

/// Equilibrium density on a computed support.
pub fn density(sup: &FluidSupport, x: f64) -> Result<f64> {
    let (t, b) = (sup.lower, sup.upper);
    if !(x > t && x < b) {
        return Err(Error::domain(format!("x = {x} lies outside ({t}, {b})")));
    }
    let root = ((b - x) / (x - t)).sqrt() / (2.0 * PI);
    Ok(match sup.ensemble {
        Ensemble::Lue { alpha, .. } => root * (1.0 - alpha / x * (t / b).sqrt()),
        Ensemble::Jue { alpha, beta, .. } => {
            root * (-alpha / x * (t / b).sqrt() + beta / (1.0 - x) * ((1.0 - t) / sup.offset).sqrt())
        }
    })
}

/// ∫_t^b ρ(x) dx by adaptive quadrature.
pub fn density_mass(sup: &FluidSupport, ctx: &PrecisionContext) -> Result<f64> {
    let p = ctx.mantissa_bits();
    let (t, b) = (ctx.float(sup.lower), ctx.float(sup.upper));
    let one_minus_b = ctx.float(sup.offset);
    let ens = sup.ensemble;
    let two_pi = Float::with_val(p, ctx.pi() * 2u32);
    let tb = Float::with_val(p, &t / &b).sqrt();
    let f = |x: &Float| -> Float {
        let (bx, xt) = (Float::with_val(p, &b - x), Float::with_val(p, x - &t));
        if !(bx > 0 && xt > 0) {
            return Float::new(p);
        }
        let root = (bx / xt).sqrt() / &two_pi;
        let factor = match ens {
            Ensemble::Lue { alpha, .. } => 1u32 - Float::with_val(p, &tb * alpha) / x,
            Ensemble::Jue { alpha, beta, .. } => {
                let one_minus_x = Float::with_val(p, 1u32 - x);
                let jt = (Float::with_val(p, 1u32 - &t) / &one_minus_b).sqrt();
                Float::with_val(p, &jt * beta) / one_minus_x - Float::with_val(p, &tb * alpha) / x
            }
        };
        root * factor
    };
    Ok(integrate_adaptive(&f, &t, &b, 1e-12, ctx)?.to_f64())
}

/// Upper endpoint of the JUE fluid on [t, b], b < 1.
///
/// Solves 2n+α+β = α√(t/b) + β√((1−t)/(1−b)) for c = 1 − b.
pub fn jue_support(t: f64, alpha: f64, beta: f64, n: usize) -> Result<FluidSupport> {
    check_jue(t, alpha, beta, n)?;
    let big = 2.0 * n as f64 + alpha + beta;
    let ensemble = Ensemble::Jue { alpha, beta, n };
    // F(c) decreases from +∞ at c = 0 to −2n at c = 1 − t; negate it for the solver
    let f = |c: f64| {
        let b = 1.0 - c;
        let ra = (t / b).sqrt();
        let rb = ((1.0 - t) / c).sqrt();
        let v = alpha * ra + beta * rb - big;
        let dv = alpha * ra / (2.0 * b) - beta * rb / (2.0 * c);
        (-v, -dv)
    };
    if t == 0.0 {
        let c = beta * beta / (big * big);
        return Ok(FluidSupport { lower: 0.0, upper: 1.0 - c, offset: c, ensemble });
    }
    let (lo, hi) = (f64::MIN_POSITIVE.sqrt(), 1.0 - t);
    if !(f(lo).0 < 0.0 && f(hi).0 > 0.0) {
        return Err(Error::ModelDomain(format!(
            "no JUE endpoint in (t, 1) for t={t}, alpha={alpha}, beta={beta}, n={n}"
        )));
    }
    let seed = beta * beta * (1.0 - t) / (big * big);
    let c = safeguarded_newton(f, lo, hi, seed).ok_or_else(|| Error::ModelDomain("JUE endpoint iteration failed".into()))?;
    Ok(FluidSupport { lower: t, upper: 1.0 - c, offset: c, ensemble })
}

/// b alone; see [`jue_support`].
pub fn jue_endpoint(t: f64, alpha: f64, beta: f64, n: usize) -> Result<f64> {
    Ok(jue_support(t, alpha, beta, n)?.upper)
}

/// Relative residual of the degree-four equation for b at the computed support.
pub fn jue_quartic_residual(sup: &FluidSupport) -> Result<ResidualReport> {
    let Ensemble::Jue { alpha, beta, n } = sup.ensemble else {
        return Err(Error::Argument("not a JUE support".into()));
    };
    let p = 128;
    let f = |v: f64| Float::with_val(p, v);
    let t = f(sup.lower);
    let c = f(sup.offset);
    let b = Float::with_val(p, 1u32 - &c);
    let one_minus_t = Float::with_val(p, 1u32 - &t);
    let big2 = f((2.0 * n as f64 + alpha + beta).powi(2));
    let parts = [
        big2 * Float::with_val(p, &b * &c),
        Float::with_val(p, &t * &c) * (alpha * alpha),
        Float::with_val(p, &one_minus_t * &b) * (beta * beta),
    ];
    let inner = Float::with_val(p, &parts[0] - &parts[1]) - &parts[2];
    let lhs = Float::with_val(p, inner.square_ref());
    let rhs = Float::with_val(p, &t * &one_minus_t) * Float::with_val(p, &b * &c) * (4.0 * alpha * alpha * beta * beta);
    let mut report = ResidualReport::from_difference(
        "jue_quartic",
        vec![
            ("t".into(), sup.lower),
            ("alpha".into(), alpha),
            ("beta".into(), beta),
            ("n".into(), n as f64),
        ],
        &lhs,
        &rhs,
        p,
    );
    // the left side is a square: measure against the square of its largest inner term
    let big = parts.iter().map(|x| x.to_f64().abs()).fold(0.0, f64::max);
    report.scale = report.scale.max(big * big);
    report.relative = if report.scale > 0.0 { report.residual / report.scale } else { 0.0 };
    Ok(report)
}

/// Which form of the P_n approximation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApproxForm {
    /// e^{−S₁−S₂} at the fluid endpoint b.
    Fluid,
    /// The large-n form at fixed t.
    Leading,
    /// The double-scaled form in s = 4nt (LUE) or s = 4n²t (JUE).
    Scaled,
}

/// log|P_n(z)| at z ∈ {0, 1} from the Coulomb fluid. The sign of P_n(0) is (−1)^n.
pub fn approx_pn(ensemble: Ensemble, point: u8, t: f64, form: ApproxForm) -> Result<f64> {
    let quarter = |x: f64| x.powf(0.25) + x.powf(-0.25);
    match (ensemble, point) {
        (Ensemble::Lue { alpha, n }, 0) => {
            check_lue(t, alpha, n)?;
            if t <= 0.0 {
                return Err(Error::domain("the LUE approximation needs t > 0"));
            }
            let nf = n as f64;
            Ok(match form {
                ApproxForm::Fluid => {
                    let b = lue_endpoint(t, alpha, n)?;
                    let q = quarter(b / t);
                    (0.5 * q).ln() - (nf + alpha) * 4f64.ln() + 2.0 * nf * (b.sqrt() + t.sqrt()).ln() + 2.0 * alpha * q.ln()
                        - ((b.sqrt() - t.sqrt()) / 2.0).powi(2)
                }
                ApproxForm::Leading => {
                    (-alpha / 2.0 - 0.25) * (4.0 * t).ln() + (nf + alpha / 2.0 + 0.25) * nf.ln() - nf + (4.0 * nf * t).sqrt()
                }
                ApproxForm::Scaled => {
                    let s = 4.0 * nf * t;
                    (-alpha / 2.0 - 0.25) * s.ln() + (nf + alpha + 0.5) * nf.ln() - nf + s.sqrt()
                }
            })
        }
        (Ensemble::Jue { alpha, beta, n }, 0) => {
            check_jue(t, alpha, beta, n)?;
            if t <= 0.0 {
                return Err(Error::domain("the JUE approximation at 0 needs t > 0"));
            }
            let nf = n as f64;
            let l2 = 2f64.ln();
            Ok(match form {
                ApproxForm::Fluid => {
                    let sup = jue_support(t, alpha, beta, n)?;
                    let (b, c) = (sup.upper, sup.offset);
                    let cross = 1.0 - ((t * b).sqrt() - ((1.0 - t) * c).sqrt()).powi(2);
                    (0.5 * quarter(b / t)).ln() - (2.0 * nf + 2.0 * alpha + beta) * l2
                        + (2.0 * nf + 2.0 * alpha + beta) * (t.sqrt() + b.sqrt()).ln()
                        - alpha / 2.0 * (t * b).ln()
                        - beta / 2.0 * cross.ln()
                        + beta * ((1.0 - t).sqrt() + c.sqrt()).ln()
                }
                ApproxForm::Leading => {
                    -(2.0 * nf + 2.0 * alpha + beta + 1.0) * l2
                        + (t.powf(-0.25) + t.powf(0.25)).ln()
                        + (2.0 * nf + 2.0 * alpha + beta) * (1.0 + t.sqrt()).ln()
                        - alpha / 2.0 * t.ln()
                }
                ApproxForm::Scaled => {
                    let s = 4.0 * nf * nf * t;
                    -(2.0 * nf + alpha + beta + 0.5) * l2 + s.sqrt() - (alpha / 2.0 + 0.25) * s.ln() + (alpha + 0.5) * nf.ln()
                }
            })
        }
        (Ensemble::Jue { alpha, beta, n }, 1) => {
            check_jue(t, alpha, beta, n)?;
            let nf = n as f64;
            let l2 = 2f64.ln();
            Ok(match form {
                ApproxForm::Fluid => {
                    let sup = jue_support(t, alpha, beta, n)?;
                    let (b, c) = (sup.upper, sup.offset);
                    let cross = 1.0 - ((t * b).sqrt() - ((1.0 - t) * c).sqrt()).powi(2);
                    (0.5 * quarter(c / (1.0 - t))).ln() - (2.0 * nf + alpha + 2.0 * beta) * l2
                        + (2.0 * nf + alpha + 2.0 * beta) * ((1.0 - t).sqrt() + c.sqrt()).ln()
                        + alpha * (t.sqrt() + b.sqrt()).ln()
                        - alpha / 2.0 * cross.ln()
                        - beta / 2.0 * ((1.0 - t) * c).ln()
                }
                ApproxForm::Leading | ApproxForm::Scaled => {
                    let mut v = -(2.0 * nf + alpha + beta + 0.5) * l2 + (beta + 0.5) * nf.ln() - (beta + 0.5) * beta.ln() + beta;
                    if form == ApproxForm::Leading {
                        v += nf * (1.0 - t).ln() + alpha * (1.0 + t.sqrt()).ln();
                    }
                    v
                }
            })
        }
        (Ensemble::Lue { .. }, _) => Err(Error::Argument("the LUE approximation is available at point 0 only".into())),
        _ => Err(Error::Argument(format!("point must be 0 or 1, got {point}"))),
    }
}

/// log(Γ(1+α)/√(2π)) + √s − (α/2 + ¼) log s, the large-n limit of
/// log|P_n(0; s/4n, α)| − log|P_n(0; 0, α)| for large s.
pub fn lue_ratio_limit(alpha: f64, s: f64, ctx: &PrecisionContext) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::domain("s must be positive"));
    }
    let lg = log_gamma(&ctx.float(1.0 + alpha), ctx)?.to_f64();
    Ok(lg - 0.5 * (2.0 * PI).ln() + s.sqrt() - (alpha / 2.0 + 0.25) * s.ln())
}

/// Number of tabulated integrals.
pub const IDENTITY_COUNT: usize = 11;

/// Integrals ∫_a^b g(x) dx/√((b−x)(x−a)) with their closed forms, 0 < a < b.
/// Identities 5, 6, 7, 10 and 11 also need b < 1.
pub fn identity_needs_b_below_one(id: usize) -> bool {
    matches!(id, 5 | 6 | 7 | 10 | 11)
}

fn identity_integrand(id: usize, x: &Float) -> Float {
    let p = x.prec();
    let one_minus = Float::with_val(p, 1u32 - x);
    match id {
        1 => Float::with_val(p, 1u32),
        2 => x.clone(),
        3 => Float::with_val(p, x.recip_ref()),
        4 => Float::with_val(p, x.square_ref()).recip(),
        5 => one_minus.recip(),
        6 => one_minus.ln(),
        7 => one_minus.ln() / x,
        8 => Float::with_val(p, x.ln_ref()),
        9 => Float::with_val(p, x.ln_ref()) / x,
        10 => Float::with_val(p, x.ln_ref()) / -one_minus,
        11 => Float::with_val(p, one_minus.ln_ref()) / -one_minus,
        _ => unreachable!("identity id checked by caller"),
    }
}

fn identity_closed_form(id: usize, a: &Float, b: &Float, ctx: &PrecisionContext) -> Float {
    let p = ctx.mantissa_bits();
    let pi = ctx.pi();
    let sa = Float::with_val(p, a.sqrt_ref());
    let sb = Float::with_val(p, b.sqrt_ref());
    let ab = Float::with_val(p, a * b);
    let sab = Float::with_val(p, ab.sqrt_ref());
    let ca = Float::with_val(p, 1u32 - a);
    let cb = Float::with_val(p, 1u32 - b);
    let sca = Float::with_val(p, ca.sqrt_ref());
    let scb = Float::with_val(p, cb.sqrt_ref());
    let scab = Float::with_val(p, &sca * &scb);
    // 1 − (√(ab) − √((1−a)(1−b)))²
    let cross = 1u32 - Float::with_val(p, Float::with_val(p, &sab - &scab).square_ref());
    let apb = Float::with_val(p, a + b);
    let sum_s = Float::with_val(p, &sa + &sb);
    let sum_c = Float::with_val(p, &sca + &scb);
    match id {
        1 => pi,
        2 => apb * pi / 2u32,
        3 => pi / sab,
        4 => apb * pi / (Float::with_val(p, &ab * &sab) * 2u32),
        5 => pi / scab,
        6 => (sum_c / 2u32).ln() * pi * 2u32,
        7 => (cross / Float::with_val(p, sum_s.square_ref())).ln() * pi / sab,
        8 => (sum_s / 2u32).ln() * pi * 2u32,
        9 => (Float::with_val(p, &sab * 2u32) / sum_s).ln() * pi * 2u32 / sab,
        10 => (Float::with_val(p, sum_c.square_ref()) / cross).ln() * pi / scab,
        11 => {
            let inner = Float::with_val(p, sca.recip_ref()) / 2u32 + Float::with_val(p, scb.recip_ref()) / 2u32;
            inner.ln() * pi * 2u32 / scab
        }
        _ => unreachable!("identity id checked by caller"),
    }
}

/// |quadrature − closed form| for identity `id` (1..=11) on (a, b).
pub fn appendix_identity_check(id: usize, a: f64, b: f64, ctx: &PrecisionContext) -> Result<ResidualReport> {
    if !(1..=IDENTITY_COUNT).contains(&id) {
        return Err(Error::Argument(format!("identity id must be in 1..={IDENTITY_COUNT}, got {id}")));
    }
    if !(a > 0.0 && a < b) || !b.is_finite() {
        return Err(Error::domain(format!("identities need 0 < a < b, got a={a}, b={b}")));
    }
    if identity_needs_b_below_one(id) && !(b < 1.0) {
        return Err(Error::domain(format!("identity {id} needs b < 1, got {b}")));
    }
    let p = ctx.mantissa_bits();
    let (fa, fb) = (ctx.float(a), ctx.float(b));
    let f = |x: &Float| -> Float {
        let w = Float::with_val(p, &fb - x) * Float::with_val(p, x - &fa);
        if !(w > 0) {
            return Float::new(p);
        }
        identity_integrand(id, x) / w.sqrt()
    };
    let closed = identity_closed_form(id, &fa, &fb, ctx);
    let tol = ctx.target_tolerance().max(1e-14) * closed.to_f64().abs().max(1.0);
    let quad = integrate_adaptive(&f, &fa, &fb, tol, ctx)?;
    Ok(ResidualReport::from_difference(
        &format!("appendix_{id}"),
        vec![("a".into(), a), ("b".into(), b)],
        &quad,
        &closed,
        p,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lue_endpoint_closed_cases() {
        assert_eq!(lue_endpoint(0.0, 0.7, 5).unwrap(), 4.0 * 5.0 + 1.4);
        assert_eq!(lue_endpoint(0.3, 0.0, 5).unwrap(), 20.3);
        let s = lue_support(0.1, 0.5, 10).unwrap();
        assert!(s.upper < 40.0 + 1.0 + 0.1);
        assert!(lue_cubic_residual(&s).unwrap().relative < 1e-12);
        let s = lue_support(0.1, -0.5, 10).unwrap();
        assert!(s.upper > 40.0 - 1.0 + 0.1);
        assert!(lue_cubic_residual(&s).unwrap().relative < 1e-12);
    }

    #[test]
    fn lue_endpoint_matches_expansion() {
        let (t, a, n) = (0.1, 0.5, 10usize);
        let b = lue_endpoint(t, a, n).unwrap();
        let series = lue_endpoint_series(t, a, n, false).unwrap();
        let nf = n as f64;
        // size of the last printed term
        let next = (a * a * t * t + 2.0 * a.powi(3) * t) / (16.0 * nf.powi(3));
        assert!((b - series).abs() < next.abs().max(1e-12), "{b} {series}");
        assert_eq!(lue_endpoint_series(0.4, 0.0, 7, false).unwrap(), 28.4);
    }

    #[test]
    fn jue_endpoint_at_zero_gap() {
        let (a, b, n) = (0.5, 1.5, 6usize);
        let big = 2.0 * n as f64 + a + b;
        let s = jue_support(0.0, a, b, n).unwrap();
        assert!((s.offset - b * b / (big * big)).abs() < 1e-15);
        let s = jue_support(0.3, a, b, n).unwrap();
        assert!(jue_quartic_residual(&s).unwrap().relative < 1e-12);
    }

    #[test]
    fn density_mass_is_n() {
        let c = PrecisionContext::new(64).unwrap();
        let s = lue_support(0.2, 0.5, 8).unwrap();
        assert!((density_mass(&s, &c).unwrap() - 8.0).abs() < 1e-8);
        let s = jue_support(0.2, 0.5, 1.0, 6).unwrap();
        assert!((density_mass(&s, &c).unwrap() - 6.0).abs() < 1e-8);
    }

    #[test]
    fn identities_on_sample_interval() {
        let c = PrecisionContext::new(64).unwrap();
        for id in 1..=IDENTITY_COUNT {
            let r = appendix_identity_check(id, 0.2, 0.9, &c).unwrap();
            assert!(r.residual < 1e-10, "id={id} {r:?}");
        }
        assert!(appendix_identity_check(5, 0.2, 1.5, &c).is_err());
        assert!(appendix_identity_check(12, 0.2, 0.5, &c).is_err());
    }

    #[test]
    fn approximations_agree_in_their_regimes() {
        // LUE: the forms coincide when t = s/4n; at fixed t they differ by about e^{−t/2}
        let n = 4000;
        let e = Ensemble::Lue { alpha: 0.5, n };
        let t = 25.0 / (4.0 * n as f64);
        let f = approx_pn(e, 0, t, ApproxForm::Fluid).unwrap();
        let l = approx_pn(e, 0, t, ApproxForm::Leading).unwrap();
        let s = approx_pn(e, 0, t, ApproxForm::Scaled).unwrap();
        assert!((f - l).abs() < 1e-3 && (f - s).abs() < 1e-3, "{f} {l} {s}");
        let f = approx_pn(e, 0, 0.3, ApproxForm::Fluid).unwrap();
        let l = approx_pn(e, 0, 0.3, ApproxForm::Leading).unwrap();
        assert!((f - l + 0.15).abs() < 1e-2, "{f} {l}");
        let e = Ensemble::Jue { alpha: 0.5, beta: 1.0, n: 4000 };
        let f = approx_pn(e, 1, 0.3, ApproxForm::Fluid).unwrap();
        let l = approx_pn(e, 1, 0.3, ApproxForm::Leading).unwrap();
        assert!((f - l).abs() < 1e-2, "{f} {l}");
        let f = approx_pn(e, 0, 0.3, ApproxForm::Fluid).unwrap();
        let l = approx_pn(e, 0, 0.3, ApproxForm::Leading).unwrap();
        assert!((f - l).abs() < 1e-2, "{f} {l}");
    }
}

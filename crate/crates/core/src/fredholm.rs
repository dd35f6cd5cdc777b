//! Fredholm determinants det(I − K) of the sine and Bessel kernels by Nyström
//! discretization on Gauss–Legendre nodes.

use rayon::prelude::*;
use rug::Float;

use crate::diff::{five_point, log_derivative_sigma};
use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigenvalues, Matrix};
use crate::precision::PrecisionContext;
use crate::quadrature::{gauss_legendre, map_rule};
use crate::specfun::bessel_j;

/// Smallest and largest Nyström orders tried by [`log_det_converged`].
pub const MIN_ORDER: usize = 16;
pub const MAX_ORDER: usize = 1024;

/// Which integrable kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelKind {
    /// sin(x−y)/(π(x−y)) on (−b, b).
    Sine,
    /// The hard-edge Bessel kernel of order α on (0, s).
    Bessel { alpha: f64 },
}

impl KernelKind {
    /// Look a kernel up by its registry name.
    pub fn from_name(name: &str, alpha: Option<f64>) -> Result<Self> {
        match (name, alpha) {
            ("sine", _) => Ok(KernelKind::Sine),
            ("bessel", Some(alpha)) => Ok(KernelKind::Bessel { alpha }),
            ("bessel", None) => Err(Error::Argument("the bessel kernel needs --alpha".into())),
            _ => Err(Error::Argument(format!(
                "unknown kernel '{name}' (known: {})",
                KERNEL_NAMES.join(", ")
            ))),
        }
    }

    pub fn kernel(&self) -> Box<dyn Kernel> {
        match *self {
            KernelKind::Sine => Box::new(SineKernel),
            KernelKind::Bessel { alpha } => Box::new(BesselKernel { alpha }),
        }
    }

    /// The interval that an endpoint stands for: (−b, b) or (0, s).
    pub fn interval(&self, endpoint: &Float) -> (Float, Float) {
        match self {
            KernelKind::Sine => (Float::with_val(endpoint.prec(), -endpoint), endpoint.clone()),
            KernelKind::Bessel { .. } => (Float::new(endpoint.prec()), endpoint.clone()),
        }
    }
}

pub const KERNEL_NAMES: &[&str] = &["sine", "bessel"];

/// Integral operator discretized on a quadrature rule.
pub trait Kernel: Send + Sync {
    fn id(&self) -> &'static str;

    /// Symmetrized Nyström matrix √w_i K(x_i, x_j) √w_j for `spec`.
    fn nystrom(&self, spec: &KernelSpec) -> Result<Matrix>;
}

/// A kernel with an interval and a quadrature order.
#[derive(Debug, Clone)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub lo: Float,
    pub hi: Float,
    pub quad_order: usize,
    pub ctx: PrecisionContext,
}

impl KernelSpec {
    pub fn new(kind: KernelKind, lo: Float, hi: Float, quad_order: usize, ctx: &PrecisionContext) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return Err(Error::domain("kernel interval must be finite with lo <= hi"));
        }
        if quad_order < 4 {
            return Err(Error::domain("quadrature order must be at least 4"));
        }
        if let KernelKind::Bessel { alpha } = kind {
            if !(alpha > -1.0) || !alpha.is_finite() {
                return Err(Error::domain(format!("Bessel kernel needs alpha > -1, got {alpha}")));
            }
            if lo < 0 {
                return Err(Error::domain("Bessel kernel lives on the positive half-line"));
            }
        }
        let p = ctx.mantissa_bits();
        Ok(Self {
            kind,
            lo: Float::with_val(p, lo),
            hi: Float::with_val(p, hi),
            quad_order,
            ctx: ctx.clone(),
        })
    }

    /// Spec for the interval an endpoint stands for.
    pub fn for_endpoint(kind: KernelKind, endpoint: &Float, quad_order: usize, ctx: &PrecisionContext) -> Result<Self> {
        if !(*endpoint >= 0) {
            return Err(Error::domain("endpoint must be non-negative"));
        }
        let (lo, hi) = kind.interval(&Float::with_val(ctx.mantissa_bits(), endpoint));
        Self::new(kind, lo, hi, quad_order, ctx)
    }
}

fn assemble(m: usize, p: u32, entry: impl Fn(usize, usize) -> Float + Sync) -> Matrix {
    let mut a: Matrix = (0..m)
        .into_par_iter()
        .map(|i| (0..m).map(|j| if j < i { Float::new(p) } else { entry(i, j) }).collect())
        .collect();
    for i in 0..m {
        for j in 0..i {
            a[i][j] = a[j][i].clone();
        }
    }
    a
}

struct SineKernel;

impl Kernel for SineKernel {
    fn id(&self) -> &'static str {
        "sine"
    }

    fn nystrom(&self, spec: &KernelSpec) -> Result<Matrix> {
        let ctx = &spec.ctx;
        let p = ctx.mantissa_bits();
        let rule = map_rule(&*gauss_legendre(spec.quad_order, ctx)?, &spec.lo, &spec.hi)?;
        let pi = ctx.pi();
        let sw: Vec<Float> = rule.weights.iter().map(|w| Float::with_val(p, w.sqrt_ref())).collect();
        let x = &rule.nodes;
        Ok(assemble(rule.order, p, |i, j| {
            let k = if i == j {
                Float::with_val(p, 1u32) / &pi
            } else {
                let d = Float::with_val(p, &x[i] - &x[j]);
                Float::with_val(p, d.sin_ref()) / (d * &pi)
            };
            k * &sw[i] * &sw[j]
        }))
    }
}

struct BesselKernel {
    alpha: f64,
}

/// K(u², v²) in the variable u = √x for u ≠ v.
fn bessel_off_diagonal(u: &Float, ju: &Float, dju: &Float, v: &Float, jv: &Float, djv: &Float, p: u32) -> Float {
    let num = Float::with_val(p, ju * v) * djv - Float::with_val(p, jv * u) * dju;
    let den = (Float::with_val(p, u.square_ref()) - Float::with_val(p, v.square_ref())) * 2u32;
    num / den
}

/// K(x, x) with x = u²: ¼[J_α′(u)² + (1 − α²/u²) J_α(u)²].
fn bessel_diagonal(alpha: &Float, u: &Float, j: &Float, dj: &Float, p: u32) -> Float {
    let ratio = Float::with_val(p, alpha / u);
    let factor = 1u32 - Float::with_val(p, ratio.square_ref());
    (Float::with_val(p, dj.square_ref()) + factor * Float::with_val(p, j.square_ref())) / 4u32
}

/// |K(x,x) − ½[K(x,x+ε) + K(x,x−ε)]| for the Bessel kernel, ε = x·2^{−bits/3}.
pub fn bessel_diagonal_defect(alpha: f64, x: f64, ctx: &PrecisionContext) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain("diagonal check needs x > 0"));
    }
    let p = ctx.mantissa_bits();
    let a = ctx.float(alpha);
    let x = ctx.float(x);
    let u = Float::with_val(p, x.sqrt_ref());
    let (j, dj) = bessel_j(&a, &u, ctx)?;
    let diag = bessel_diagonal(&a, &u, &j, &dj, p);
    let eps = Float::with_val(p, &x >> (p / 3) as i32);
    let mut avg = Float::new(p);
    for sign in [1i32, -1] {
        let y = Float::with_val(p, &eps * sign) + &x;
        let v = y.sqrt();
        let (jv, djv) = bessel_j(&a, &v, ctx)?;
        avg += bessel_off_diagonal(&u, &j, &dj, &v, &jv, &djv, p);
    }
    avg /= 2u32;
    Ok(Float::with_val(p, diag - avg).abs().to_f64())
}

impl Kernel for BesselKernel {
    fn id(&self) -> &'static str {
        "bessel"
    }

    fn nystrom(&self, spec: &KernelSpec) -> Result<Matrix> {
        let ctx = &spec.ctx;
        let p = ctx.mantissa_bits();
        let alpha = ctx.float(self.alpha);
        let ulo = Float::with_val(p, spec.lo.sqrt_ref());
        let uhi = Float::with_val(p, spec.hi.sqrt_ref());
        let rule = map_rule(&*gauss_legendre(spec.quad_order, ctx)?, &ulo, &uhi)?;
        let u = &rule.nodes;
        let jd: Vec<(Float, Float)> = u
            .par_iter()
            .map(|ui| bessel_j(&alpha, ui, ctx))
            .collect::<Result<_>>()?;
        // dx = 2u du
        let sw: Vec<Float> = u
            .iter()
            .zip(&rule.weights)
            .map(|(ui, wi)| (Float::with_val(p, ui * wi) * 2u32).sqrt())
            .collect();
        Ok(assemble(rule.order, p, |i, j| {
            let k = if i == j {
                bessel_diagonal(&alpha, &u[i], &jd[i].0, &jd[i].1, p)
            } else {
                bessel_off_diagonal(&u[i], &jd[i].0, &jd[i].1, &u[j], &jd[j].0, &jd[j].1, p)
            };
            k * &sw[i] * &sw[j]
        }))
    }
}

/// log det(I − K) = Σ log(1 − λ_k) over the Nyström eigenvalues.
pub fn log_det(spec: &KernelSpec) -> Result<Float> {
    let p = spec.ctx.mantissa_bits();
    if spec.lo == spec.hi {
        return Ok(Float::new(p));
    }
    let m = spec.kind.kernel().nystrom(spec)?;
    let eig = symmetric_eigenvalues(&m, p)?;
    let mut total = Float::new(p);
    for lam in &eig {
        let one_minus = Float::with_val(p, 1u32 - lam);
        if one_minus <= 0 {
            return Err(Error::precision(
                format!("Fredholm determinant (eigenvalue {} >= 1)", lam.to_f64()),
                p * 2,
            ));
        }
        total += one_minus.ln();
    }
    Ok(total)
}

/// One row of the convergence trace.
#[derive(Debug, Clone)]
pub struct ConvergenceStep {
    pub quad_order: usize,
    pub value: Float,
    /// |value − previous value|, or None on the first row.
    pub difference: Option<f64>,
}

/// Result of [`log_det_converged`].
#[derive(Debug, Clone)]
pub struct Converged {
    pub value: Float,
    pub achieved_error: f64,
    pub quad_order: usize,
    pub trace: Vec<ConvergenceStep>,
}

/// Double the Nyström order from [`MIN_ORDER`] until successive values
/// differ by less than `tol`.
pub fn log_det_converged(kind: KernelKind, endpoint: &Float, tol: f64, ctx: &PrecisionContext) -> Result<Converged> {
    log_det_traced(kind, endpoint, tol, ctx).1
}

/// As [`log_det_converged`], also handing back the rows computed so far when
/// the doubling fails.
pub fn log_det_traced(
    kind: KernelKind,
    endpoint: &Float,
    tol: f64,
    ctx: &PrecisionContext,
) -> (Vec<ConvergenceStep>, Result<Converged>) {
    let mut trace: Vec<ConvergenceStep> = Vec::new();
    if !(tol > 0.0) {
        return (trace, Err(Error::domain("tolerance must be positive")));
    }
    if endpoint.is_zero() {
        // empty interval: det = 1 exactly
        let step = ConvergenceStep { quad_order: 0, value: ctx.zero(), difference: None };
        trace.push(step);
        let done = Converged { value: ctx.zero(), achieved_error: 0.0, quad_order: 0, trace: trace.clone() };
        return (trace, Ok(done));
    }
    if !(*endpoint > 0) || endpoint.is_infinite() {
        let e = Error::domain(format!("endpoint must be finite and non-negative, got {}", endpoint.to_f64()));
        return (trace, Err(e));
    }
    let mut m = MIN_ORDER;
    while m <= MAX_ORDER {
        let value = match KernelSpec::for_endpoint(kind, endpoint, m, ctx).and_then(|spec| log_det(&spec)) {
            Ok(v) => v,
            // an eigenvalue pushed past 1 by discretization error; refine unless out of orders
            Err(e @ Error::PrecisionInsufficient { .. }) => {
                if m * 2 > MAX_ORDER {
                    return (trace, Err(e));
                }
                m *= 2;
                continue;
            }
            Err(e) => return (trace, Err(e)),
        };
        let difference = trace
            .last()
            .map(|prev| Float::with_val(ctx.mantissa_bits(), &value - &prev.value).abs().to_f64());
        trace.push(ConvergenceStep { quad_order: m, value: value.clone(), difference });
        if let Some(d) = difference {
            if d < tol {
                let done = Converged { value, achieved_error: d, quad_order: m, trace: trace.clone() };
                return (trace, Ok(done));
            }
            // resolved down to roundoff: more nodes cannot reach a tolerance below it
            let floor = 64.0 * ctx.epsilon() * value.to_f64().abs().max(1.0);
            if d <= floor {
                let bits = (-tol.log2()).ceil() as u32 + 32;
                let what = format!("Nyström log det at tolerance {tol:e} (stalled at {d:e})");
                return (trace, Err(Error::precision(what, bits.max(ctx.mantissa_bits() + 32))));
            }
        }
        m *= 2;
    }
    let err = match trace.last() {
        None => Error::precision(format!("Nyström log det at endpoint {}", endpoint.to_f64()), 2 * ctx.mantissa_bits()),
        Some(last) => Error::Convergence {
            what: format!("Nyström log det for {kind:?} at endpoint {}", endpoint.to_f64()),
            best: last.value.to_f64(),
            error_bound: last.difference.unwrap_or(f64::INFINITY),
        },
    };
    (trace, Err(err))
}

/// σ and its first two derivatives for the log determinant.
///
/// For the Bessel kernel σ(s) = s d/ds log det on (0, s). For the sine kernel
/// the variable is τ = 2b and σ(τ) = τ d/dτ log det on (−b, b).
pub fn scaled_sigma(kind: KernelKind, endpoint: &Float, ctx: &PrecisionContext) -> Result<(Float, Float, Float)> {
    if !(*endpoint > 0) {
        return Err(Error::domain("scaled_sigma needs a positive endpoint"));
    }
    let p = ctx.mantissa_bits();
    // the stencil needs the determinant converged well past the step error
    let tol = ctx.target_tolerance().max(2f64.powi(-(p as i32) * 3 / 4));
    let m = log_det_converged(kind, endpoint, tol, ctx)?.quad_order;
    let x = Float::with_val(p, endpoint);
    let d = five_point(|y| log_det(&KernelSpec::for_endpoint(kind, y, m, ctx)?), &x, ctx)?;
    Ok(match kind {
        KernelKind::Bessel { .. } => log_derivative_sigma(&d, &x),
        KernelKind::Sine => {
            // τ = 2b: τ d/dτ = b d/db, d/dτ = ½ d/db
            let (sigma, s1, s2) = log_derivative_sigma(&d, &x);
            (sigma, s1 / 2u32, s2 / 4u32)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(128).unwrap()
    }

    fn ld(kind: KernelKind, e: f64, m: usize) -> f64 {
        let c = ctx();
        log_det(&KernelSpec::for_endpoint(kind, &c.float(e), m, &c).unwrap())
            .unwrap()
            .to_f64()
    }

    #[test]
    fn empty_interval() {
        assert_eq!(ld(KernelKind::Sine, 0.0, 16), 0.0);
        assert_eq!(ld(KernelKind::Bessel { alpha: 0.5 }, 0.0, 16), 0.0);
    }

    #[test]
    fn small_interval_trace() {
        let b = 1e-4;
        let v = ld(KernelKind::Sine, b, 16);
        let want = (1.0 - 2.0 * b / std::f64::consts::PI).ln();
        assert!((v - want).abs() < 1e-8, "{v} {want}");
    }

    #[test]
    fn diagonal_limit() {
        let c = ctx();
        for alpha in [-0.5, 0.0, 0.5, 1.0, 2.5] {
            for x in [0.01, 1.0, 7.0, 30.0] {
                let d = bessel_diagonal_defect(alpha, x, &c).unwrap();
                assert!(d < 1e-12, "alpha={alpha} x={x} defect={d}");
            }
        }
    }

    #[test]
    fn sine_translation_invariance() {
        let c = ctx();
        let b = c.float(1.2);
        let centred = log_det(&KernelSpec::for_endpoint(KernelKind::Sine, &b, 32, &c).unwrap()).unwrap();
        let shifted = KernelSpec::new(KernelKind::Sine, c.float(0.3 - 1.2), c.float(0.3 + 1.2), 32, &c).unwrap();
        let v = log_det(&shifted).unwrap();
        assert!((centred.to_f64() - v.to_f64()).abs() < 1e-25);
    }

    #[test]
    fn convergence_within_budget() {
        let c = ctx();
        let r = log_det_converged(KernelKind::Sine, &c.float(2.0), 1e-12, &c).unwrap();
        assert!(r.quad_order <= 128);
        let r = log_det_converged(KernelKind::Bessel { alpha: 0.5 }, &c.float(4.0), 1e-12, &c).unwrap();
        assert!(r.quad_order <= 128);
    }

    #[test]
    fn tolerance_below_roundoff_stops_early() {
        let c = ctx();
        let (trace, r) = log_det_traced(KernelKind::Sine, &c.float(1.0), 1e-300, &c);
        assert!(matches!(r, Err(Error::PrecisionInsufficient { .. })), "{r:?}");
        assert!(trace.last().unwrap().quad_order <= 256);
    }

    #[test]
    fn bessel_half_orders_multiply_to_sine() {
        let b = 1.5;
        let sine = ld(KernelKind::Sine, b, 64);
        let split = ld(KernelKind::Bessel { alpha: -0.5 }, b * b, 64) + ld(KernelKind::Bessel { alpha: 0.5 }, b * b, 64);
        assert!((sine - split).abs() < 1e-10, "{sine} {split}");
    }

    #[test]
    fn rejects_bad_specs() {
        let c = ctx();
        assert!(KernelSpec::new(KernelKind::Sine, c.float(1.0), c.float(0.0), 16, &c).is_err());
        assert!(KernelSpec::new(KernelKind::Sine, c.float(0.0), c.float(1.0), 3, &c).is_err());
        assert!(KernelSpec::new(KernelKind::Bessel { alpha: -1.0 }, c.float(0.0), c.float(1.0), 8, &c).is_err());
        assert!(KernelKind::from_name("airy", None).is_err());
    }
}

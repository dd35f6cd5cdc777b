//! σ-form and second-order ODE residuals, one registered evaluator per equation.

use rug::Float;

use crate::error::{Error, Result};
use crate::report::ResidualReport;

/// Named real inputs for a residual evaluation.
#[derive(Debug, Clone, Default)]
pub struct Point {
    values: Vec<(String, Float)>,
}

impl Point {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, v: impl Into<Float>) -> Self {
        self.set(name, v);
        self
    }

    pub fn set(&mut self, name: &str, v: impl Into<Float>) {
        let v = v.into();
        match self.values.iter_mut().find(|(k, _)| k == name) {
            Some(slot) => slot.1 = v,
            None => self.values.push((name.to_string(), v)),
        }
    }

    pub fn get(&self, name: &str) -> Result<&Float> {
        self.values
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| v)
            .ok_or_else(|| Error::Argument(format!("missing input '{name}'")))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.values.iter().any(|(k, _)| k == name)
    }

    /// Largest precision among the inputs, at least 53.
    pub fn precision(&self) -> u32 {
        self.values.iter().map(|(_, v)| v.prec()).max().unwrap_or(53).max(53)
    }

    pub fn summary(&self) -> Vec<(String, f64)> {
        self.values.iter().map(|(k, v)| (k.clone(), v.to_f64())).collect()
    }
}

/// One equation: its inputs and its additive terms on each side.
pub trait SigmaEquation: Send + Sync {
    fn id(&self) -> &'static str;

    fn inputs(&self) -> &'static [&'static str];

    /// (LHS terms, RHS terms) at the point.
    fn terms(&self, pt: &Point, p: u32) -> Result<(Vec<Float>, Vec<Float>)>;
}

fn f<T>(p: u32, v: T) -> Float
where
    Float: rug::Assign<T>,
{
    Float::with_val(p, v)
}

fn get(pt: &Point, name: &str, p: u32) -> Result<Float> {
    Ok(Float::with_val(p, pt.get(name)?))
}

fn sq(x: &Float) -> Float {
    Float::with_val(x.prec(), x.square_ref())
}

fn pole_guard(r: &Float) -> Result<()> {
    let p = r.prec();
    if Float::with_val(p, r.abs_ref()) < 1e-12 || Float::with_val(p, r - 1u32).abs() < 1e-12 {
        return Err(Error::Singularity(format!("R = {} is within 1e-12 of a pole", r.to_f64())));
    }
    Ok(())
}

struct GueDifference;

impl SigmaEquation for GueDifference {
    fn id(&self) -> &'static str {
        "gue_difference"
    }
    fn inputs(&self) -> &'static [&'static str] {
        &["sigma_prev", "sigma", "sigma_next", "a", "n"]
    }
    fn terms(&self, pt: &Point, p: u32) -> Result<(Vec<Float>, Vec<Float>)> {
        let sm = get(pt, "sigma_prev", p)?;
        let s = get(pt, "sigma", p)?;
        let sp = get(pt, "sigma_next", p)?;
        let a = get(pt, "a", p)?;
        let n = get(pt, "n", p)?;
        let a2 = sq(&a);
        let two_a2 = f(p, &a2 * 2u32);
        let x = f(p, &sm - &s);
        let y = f(p, &s - &sp);
        let four_n_a2 = f(p, &a2 * &n) * 4u32;
        let inner = f(p, &x - &two_a2) * &y + &four_n_a2;
        let first = f(p, &x * f(p, &y - &two_a2)) * inner;
        let second = sq(&a2) * 8u32 * (f(p, &n * &y) + &s);
        let lhs = sq(&(first - second));
        let rhs = f(p, &x * &y)
            * sq(&f(p, &x - &two_a2))
            * sq(&f(p, &y - &two_a2))
            * (f(p, &x * &y) + f(p, &four_n_a2 * 2u32));
        Ok((vec![lhs], vec![rhs]))
    }
}

struct GueOde;

impl SigmaEquation for GueOde {
    fn id(&self) -> &'static str {
        "gue_ode"
    }
    fn inputs(&self) -> &'static [&'static str] {
        &["sigma", "sigma1", "sigma2", "a", "n"]
    }
    fn terms(&self, pt: &Point, p: u32) -> Result<(Vec<Float>, Vec<Float>)> {
        let s = get(pt, "sigma", p)?;
        let s1 = get(pt, "sigma1", p)?;
        let s2 = get(pt, "sigma2", p)?;
        let a = get(pt, "a", p)?;
        let n = get(pt, "n", p)?;
        let a2 = sq(&a);
        let a4 = sq(&a2);
        let as1_s = f(p, &a * &s1) - &s;
        let w = f(p, &as1_s - &a4);
        let first = f(p, &a2 * &s2)
            + f(p, &s + f(p, &a2 * &n) * 2u32) * &w * 4u32
            - f(p, &a4 * 4u32);
        let second = f(p, &a4 * sq(&s2))
            - f(p, &a2 * &s2) * &as1_s * 4u32
            + f(p, &w * sq(&f(p, &as1_s - &s))) * 4u32;
        let lhs = first * second * 16u32;
        let inner = sq(&s1) + f(p, &n * &as1_s) * 8u32 - f(p, &a2 * 4u32);
        let rhs = sq(&(f(p, &a2 * sq(&s2)) + inner * &w * 4u32 - f(p, &a4 * &a2) * 16u32));
        Ok((vec![lhs], vec![rhs]))
    }
}

struct Jmms;

impl SigmaEquation for Jmms {
    fn id(&self) -> &'static str {
        "jmms"
    }
    fn inputs(&self) -> &'static [&'static str] {
        &["sigma", "sigma1", "sigma2", "tau"]
    }
    fn terms(&self, pt: &Point, p: u32) -> Result<(Vec<Float>, Vec<Float>)> {
        let s = get(pt, "sigma", p)?;
        let s1 = get(pt, "sigma1", p)?;
        let s2 = get(pt, "sigma2", p)?;
        let tau = get(pt, "tau", p)?;
        let lhs = sq(&f(p, &tau * &s2));
        let u = f(p, &s - f(p, &tau * &s1));
        let rhs = f(p, &u - sq(&s1)) * &u * -4i32;
        Ok((vec![lhs], vec![rhs]))
    }
}

struct RnOde;

impl SigmaEquation for RnOde {
    fn id(&self) -> &'static str {
        "rn_ode"
    }
    fn inputs(&self) -> &'static [&'static str] {
        &["r", "r1", "r2", "t", "n", "alpha"]
    }
    fn terms(&self, pt: &Point, p: u32) -> Result<(Vec<Float>, Vec<Float>)> {
        let r = get(pt, "r", p)?;
        let r1 = get(pt, "r1", p)?;
        let r2 = get(pt, "r2", p)?;
        let t = get(pt, "t", p)?;
        let n = get(pt, "n", p)?;
        let alpha = get(pt, "alpha", p)?;
        pole_guard(&r)?;
        let rm1 = f(p, &r - 1u32);
        let r1sq = sq(&r1);
        let c = f(p, f(p, &n * 2u32) + &alpha + 1u32) / &t;
        let rhs = vec![
            f(p, &r1sq / &rm1) / 2u32,
            f(p, &r1sq / &r) / 2u32,
            -f(p, &r1 / &t),
            f(p, &r * sq(&r)),
            f(p, &c - 1.5f64) * sq(&r),
            -(f(p, &c - 0.5f64) * &r),
            -(sq(&alpha) / f(p, sq(&t) * 2u32) * f(p, &r / &rm1)),
        ];
        Ok((vec![r2], rhs))
    }
}

struct PvSigma;

impl SigmaEquation for PvSigma {
    fn id(&self) -> &'static str {
        "pv_sigma"
    }
    fn inputs(&self) -> &'static [&'static str] {
        &["h", "h1", "h2", "t", "n", "alpha"]
    }
    fn terms(&self, pt: &Point, p: u32) -> Result<(Vec<Float>, Vec<Float>)> {
        let h = get(pt, "h", p)?;
        let h1 = get(pt, "h1", p)?;
        let h2 = get(pt, "h2", p)?;
        let t = get(pt, "t", p)?;
        let n = get(pt, "n", p)?;
        let alpha = get(pt, "alpha", p)?;
        let lhs = sq(&f(p, &t * &h2));
        let nn = f(p, &n * f(p, &n + &alpha));
        let first = sq(&h1) * 4u32 * (f(p, &h - &nn) - f(p, &t * &h1));
        let coef = f(p, &n * 2u32) + &alpha - &t;
        let second = sq(&(coef * &h1 + &h));
        Ok((vec![lhs], vec![first, second]))
    }
}

struct ROde;

impl SigmaEquation for ROde {
    fn id(&self) -> &'static str {
        "r_ode"
    }
    fn inputs(&self) -> &'static [&'static str] {
        &["r", "r1", "r2", "s", "alpha"]
    }
    fn terms(&self, pt: &Point, p: u32) -> Result<(Vec<Float>, Vec<Float>)> {
        let r = get(pt, "r", p)?;
        let r1 = get(pt, "r1", p)?;
        let r2 = get(pt, "r2", p)?;
        let s = get(pt, "s", p)?;
        let alpha = get(pt, "alpha", p)?;
        pole_guard(&r)?;
        let rm1 = f(p, &r - 1u32);
        let r1sq = sq(&r1);
        let rhs = vec![
            f(p, &r1sq / &rm1) / 2u32,
            f(p, &r1sq / &r) / 2u32,
            -f(p, &r1 / &s),
            f(p, &r * &rm1) / f(p, &s * 2u32),
            -(sq(&alpha) / f(p, sq(&s) * 2u32) * f(p, &r / &rm1)),
        ];
        Ok((vec![r2], rhs))
    }
}

struct PiiiSigma;

impl SigmaEquation for PiiiSigma {
    fn id(&self) -> &'static str {
        "piii_sigma"
    }
    fn inputs(&self) -> &'static [&'static str] {
        &["sigma", "sigma1", "sigma2", "s", "alpha"]
    }
    fn terms(&self, pt: &Point, p: u32) -> Result<(Vec<Float>, Vec<Float>)> {
        let sg = get(pt, "sigma", p)?;
        let s1 = get(pt, "sigma1", p)?;
        let s2 = get(pt, "sigma2", p)?;
        let s = get(pt, "s", p)?;
        let alpha = get(pt, "alpha", p)?;
        let lhs = vec![
            sq(&f(p, &s * &s2)),
            f(p, &s1 * f(p, f(p, &s1 * 4u32) + 1u32)) * (f(p, &s * &s1) - &sg),
            -(sq(&alpha) * sq(&s1)),
        ];
        Ok((lhs, vec![]))
    }
}

struct PviSigma;

impl SigmaEquation for PviSigma {
    fn id(&self) -> &'static str {
        "pvi_sigma"
    }
    fn inputs(&self) -> &'static [&'static str] {
        &["sigma", "sigma1", "sigma2", "t", "nu1", "nu2", "nu3", "nu4"]
    }
    fn terms(&self, pt: &Point, p: u32) -> Result<(Vec<Float>, Vec<Float>)> {
        let sg = get(pt, "sigma", p)?;
        let s1 = get(pt, "sigma1", p)?;
        let s2 = get(pt, "sigma2", p)?;
        let t = get(pt, "t", p)?;
        let nu = ["nu1", "nu2", "nu3", "nu4"]
            .iter()
            .map(|k| get(pt, k, p))
            .collect::<Result<Vec<_>>>()?;
        let tt = f(p, &t * f(p, &t - 1u32));
        let first = f(p, &s1 * sq(&f(p, &tt * &s2)));
        let nu_prod = f(p, &nu[0] * &nu[1]) * &nu[2] * &nu[3];
        let inner = f(p, &s1 * f(p, f(p, &t * &s1) - &sg)) * 2u32 - sq(&s1) - nu_prod;
        let second = sq(&inner);
        let mut rhs = Float::with_val(p, 1u32);
        for v in &nu {
            rhs *= sq(v) + &s1;
        }
        Ok((vec![first, second], vec![rhs]))
    }
}

static EQUATIONS: &[&dyn SigmaEquation] = &[
    &GueDifference,
    &GueOde,
    &Jmms,
    &RnOde,
    &PvSigma,
    &ROde,
    &PiiiSigma,
    &PviSigma,
];

/// All registered equations.
pub fn equations() -> &'static [&'static dyn SigmaEquation] {
    EQUATIONS
}

/// Look an equation up by id (case-insensitive).
pub fn equation(id: &str) -> Result<&'static dyn SigmaEquation> {
    let key = id.to_ascii_lowercase();
    EQUATIONS.iter().copied().find(|e| e.id() == key).ok_or_else(|| {
        let known: Vec<_> = EQUATIONS.iter().map(|e| e.id()).collect();
        Error::Argument(format!("unknown equation '{id}' (known: {})", known.join(", ")))
    })
}

/// |LHS − RHS| of the named equation at `pt`, scaled by its largest term.
pub fn residual(eq: &str, pt: &Point) -> Result<ResidualReport> {
    let e = equation(eq)?;
    let p = pt.precision();
    for name in e.inputs() {
        pt.get(name)?;
    }
    let (lhs, rhs) = e.terms(pt, p)?;
    Ok(ResidualReport::from_terms(e.id(), pt.summary(), &lhs, &rhs, p))
}

/// ν₁..ν₄ of the Jacobi σ-form for (n, α, β).
pub fn pvi_parameters(n: usize, alpha: f64, beta: f64) -> [f64; 4] {
    let big = (2.0 * n as f64 + alpha + beta) / 2.0;
    [(alpha + beta) / 2.0, (beta - alpha) / 2.0, big, big]
}

/// d₁, d₂ in σ_n(t) = t(t−1) d/dt log D_n + d₁t + d₂.
pub fn pvi_shift(n: usize, alpha: f64, beta: f64) -> (f64, f64) {
    let n = n as f64;
    let d1 = -(2.0 * n + alpha + beta).powi(2) / 4.0;
    let d2 = (2.0 * n * (n + alpha + beta) + beta * (alpha + beta)) / 4.0;
    (d1, d2)
}

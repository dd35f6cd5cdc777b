//! Gauss–Legendre rules at arbitrary precision and an adaptive integrator.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use rug::float::Constant;
use rug::{Assign, Float};

use crate::error::{Error, Result};
use crate::precision::PrecisionContext;

/// Nodes and positive weights of an interpolatory rule on `(lo, hi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadRule {
    pub nodes: Vec<Float>,
    pub weights: Vec<Float>,
    pub order: usize,
    pub lo: Float,
    pub hi: Float,
}

impl QuadRule {
    /// Σ w_i f(x_i), summed pairwise.
    pub fn apply(&self, f: impl Fn(&Float) -> Float) -> Float {
        let prec = self.lo.prec();
        let terms: Vec<Float> = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| Float::with_val(prec, f(x) * w))
            .collect();
        pairwise_sum(&terms, prec)
    }
}

fn gl_cache() -> &'static Mutex<HashMap<(usize, u32), Arc<QuadRule>>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u32), Arc<QuadRule>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// m-point Gauss–Legendre rule on (−1, 1) at the context precision.
pub fn gauss_legendre(m: usize, ctx: &PrecisionContext) -> Result<Arc<QuadRule>> {
    if m == 0 {
        return Err(Error::domain("gauss_legendre requires m >= 1"));
    }
    let key = (m, ctx.mantissa_bits());
    if let Some(r) = gl_cache().lock().expect("cache poisoned").get(&key) {
        return Ok(r.clone());
    }
    let rule = Arc::new(compute_gauss_legendre(m, ctx.mantissa_bits()));
    Ok(gl_cache()
        .lock()
        .expect("cache poisoned")
        .entry(key)
        .or_insert(rule)
        .clone())
}

/// (P_m(x), P_m′(x)) by the three-term recurrence.
fn legendre_f64(m: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=m {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn legendre_mp(m: usize, x: &Float, p: u32) -> (Float, Float) {
    let mut p0 = Float::with_val(p, 1);
    let mut p1 = x.clone();
    let mut tmp = Float::new(p);
    for k in 2..=m {
        tmp.assign(&p1 * x);
        tmp *= (2 * k - 1) as u32;
        tmp -= Float::with_val(p, &p0 * (k - 1) as u32);
        tmp /= k as u32;
        std::mem::swap(&mut p0, &mut p1);
        std::mem::swap(&mut p1, &mut tmp);
    }
    let num = Float::with_val(p, x * &p1) - &p0;
    let den = Float::with_val(p, x * x) - 1u32;
    let d = num * m as u32 / den;
    (p1, d)
}

fn compute_gauss_legendre(m: usize, bits: u32) -> QuadRule {
    let p = bits + 16;
    let half = m / 2;
    let mut pos_nodes = Vec::with_capacity(half + 1);
    let mut pos_weights = Vec::with_capacity(half + 1);
    let eps = Float::with_val(p, 1) >> (bits as i32 + 4);
    for i in 0..m.div_ceil(2) {
        // i-th largest root
        let theta = std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5);
        let mut xf = theta.cos();
        for _ in 0..100 {
            let (v, d) = legendre_f64(m, xf);
            let dx = v / d;
            xf -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let mut x = Float::with_val(p, xf);
        if m % 2 == 1 && i == m / 2 {
            x = Float::new(p);
        } else {
            for _ in 0..64 {
                let (v, d) = legendre_mp(m, &x, p);
                let dx = v / &d;
                x -= &dx;
                if dx.abs() < eps {
                    break;
                }
            }
        }
        let (_, d) = legendre_mp(m, &x, p);
        let one_minus = Float::with_val(p, 1u32 - Float::with_val(p, &x * &x));
        let w = Float::with_val(p, 2u32) / (one_minus * Float::with_val(p, &d * &d));
        pos_nodes.push(x);
        pos_weights.push(w);
    }
    let mut nodes = Vec::with_capacity(m);
    let mut weights = Vec::with_capacity(m);
    // ascending order: negatives of the largest roots first
    for i in 0..half {
        nodes.push(Float::with_val(bits, -&pos_nodes[i]));
        weights.push(Float::with_val(bits, &pos_weights[i]));
    }
    if m % 2 == 1 {
        nodes.push(Float::new(bits));
        weights.push(Float::with_val(bits, &pos_weights[half]));
    }
    for i in (0..half).rev() {
        nodes.push(Float::with_val(bits, &pos_nodes[i]));
        weights.push(Float::with_val(bits, &pos_weights[i]));
    }
    QuadRule {
        nodes,
        weights,
        order: m,
        lo: Float::with_val(bits, -1),
        hi: Float::with_val(bits, 1),
    }
}

/// Affine image of `rule` on `(lo, hi)`.
pub fn map_rule(rule: &QuadRule, lo: &Float, hi: &Float) -> Result<QuadRule> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::domain(format!("map_rule requires finite lo < hi, got ({lo}, {hi})")));
    }
    let p = rule.lo.prec().max(lo.prec());
    let scale = Float::with_val(p, rule.hi.clone() - &rule.lo);
    let jac = Float::with_val(p, hi - lo) / &scale;
    let nodes = rule
        .nodes
        .iter()
        .map(|x| Float::with_val(p, x - &rule.lo) * &jac + lo)
        .collect();
    let weights = rule.weights.iter().map(|w| Float::with_val(p, w * &jac)).collect();
    Ok(QuadRule {
        nodes,
        weights,
        order: rule.order,
        lo: Float::with_val(p, lo),
        hi: Float::with_val(p, hi),
    })
}

/// Deterministic pairwise summation.
pub(crate) fn pairwise_sum(terms: &[Float], prec: u32) -> Float {
    match terms.len() {
        0 => Float::new(prec),
        1 => Float::with_val(prec, &terms[0]),
        n => {
            let (a, b) = terms.split_at(n / 2);
            pairwise_sum(a, prec) + pairwise_sum(b, prec)
        }
    }
}

/// Panel budget for [`integrate_adaptive`].
pub const PANEL_BUDGET: usize = 1 << 12;
const BASE_ORDER: usize = 20;

struct Panel {
    a: Float,
    b: Float,
    value: Float,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive Gauss–Legendre integration of `f` over `(lo, hi)`.
///
/// The interval is first mapped to u ∈ (0,1) by x = lo + (hi−lo)·sin²(πu/2)
/// (or x = lo + y/(1−y), y = sin²(πu/2), when `hi` is +∞), which makes
/// (x−lo)^γ and (hi−x)^γ endpoint behaviour smooth for γ = −1/2. Panels in u are
/// bisected where |I_{2m} − I_m| is largest until the summed estimate is
/// below `tol` (absolute).
pub fn integrate_adaptive(
    f: &(dyn Fn(&Float) -> Float + Sync),
    lo: &Float,
    hi: &Float,
    tol: f64,
    ctx: &PrecisionContext,
) -> Result<Float> {
    if !(tol > 0.0) {
        return Err(Error::domain("integrate_adaptive requires tol > 0"));
    }
    if !lo.is_finite() || hi.is_nan() || (hi.is_infinite() && hi.is_sign_negative()) || lo >= hi {
        return Err(Error::domain(format!("integrate_adaptive requires finite lo < hi, got ({lo}, {hi})")));
    }
    let p = ctx.mantissa_bits();
    let lo = Float::with_val(p, lo);
    let infinite = hi.is_infinite();
    let hi = Float::with_val(p, hi);
    let len = Float::with_val(p, &hi - &lo);
    let half_pi = Float::with_val(p, Constant::Pi) / 2u32;

    let g = |u: &Float| -> Float {
        let (s, c) = Float::with_val(p, u * &half_pi).sin_cos(Float::new(p));
        let s2 = Float::with_val(p, &s * &s);
        // d(sin²(πu/2))/du = (π/2)·2 sin cos
        let dy = Float::with_val(p, &s * &c) * &half_pi * 2u32;
        if infinite {
            let c2 = Float::with_val(p, &c * &c);
            if c2.is_zero() {
                return Float::new(p);
            }
            let x = Float::with_val(p, &s2 / &c2) + &lo;
            let jac = dy / Float::with_val(p, &c2 * &c2);
            let fx = f(&x);
            if jac.is_zero() { Float::new(p) } else { fx * jac }
        } else {
            let x = Float::with_val(p, &len * &s2) + &lo;
            let jac = dy * &len;
            if jac.is_zero() {
                return Float::new(p);
            }
            f(&x) * jac
        }
    };

    let low = gauss_legendre(BASE_ORDER, ctx)?;
    let high = gauss_legendre(2 * BASE_ORDER, ctx)?;
    let eval = |a: &Float, b: &Float| -> Result<(Float, f64)> {
        let r1 = map_rule(&low, a, b)?;
        let r2 = map_rule(&high, a, b)?;
        let i1 = r1.apply(&g);
        let i2 = r2.apply(&g);
        let err = Float::with_val(53, &i2 - &i1).abs().to_f64();
        if !i2.is_finite() {
            return Err(Error::domain("integrand is not finite at a quadrature node"));
        }
        Ok((i2, err))
    };

    let mut heap = BinaryHeap::new();
    let mut total_err = 0.0;
    let initial = 4;
    for k in 0..initial {
        let a = Float::with_val(p, k) / initial as u32;
        let b = Float::with_val(p, k + 1) / initial as u32;
        let (value, error) = eval(&a, &b)?;
        total_err += error;
        heap.push(Panel { a, b, value, error });
    }
    while total_err > tol {
        if heap.len() >= PANEL_BUDGET {
            let (best, _) = collect(heap, p);
            return Err(Error::Convergence {
                what: "adaptive quadrature".into(),
                best: best.to_f64(),
                error_bound: total_err,
            });
        }
        let worst = heap.pop().expect("non-empty");
        total_err -= worst.error;
        let mid = Float::with_val(p, &worst.a + &worst.b) / 2u32;
        let (v1, e1) = eval(&worst.a, &mid)?;
        let (v2, e2) = eval(&mid, &worst.b)?;
        total_err += e1 + e2;
        heap.push(Panel { a: worst.a, b: mid.clone(), value: v1, error: e1 });
        heap.push(Panel { a: mid, b: worst.b, value: v2, error: e2 });
        if heap.len() % 64 == 0 {
            // guard against drift of the running error sum
            total_err = heap.iter().map(|q| q.error).sum();
        }
    }
    Ok(collect(heap, p).0)
}

fn collect(heap: BinaryHeap<Panel>, p: u32) -> (Float, usize) {
    let mut panels = heap.into_vec();
    panels.sort_by(|x, y| x.a.partial_cmp(&y.a).unwrap_or(Ordering::Equal));
    let n = panels.len();
    let values: Vec<Float> = panels.into_iter().map(|q| q.value).collect();
    (pairwise_sum(&values, p), n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_rules() {
        let c = PrecisionContext::new(128).unwrap();
        let r1 = gauss_legendre(1, &c).unwrap();
        assert_eq!(r1.nodes[0], 0);
        assert_eq!(r1.weights[0], 2);
        let r2 = gauss_legendre(2, &c).unwrap();
        let third = Float::with_val(128, 3).sqrt().recip();
        assert!(Float::with_val(128, &r2.nodes[1] - &third).abs() < 1e-36);
        assert!(Float::with_val(128, &r2.weights[0] - 1u32).abs() < 1e-36);
    }

    #[test]
    fn monomial_exactness() {
        let c = PrecisionContext::new(128).unwrap();
        let r = gauss_legendre(20, &c).unwrap();
        for k in 0..40u32 {
            let v = r.apply(|x| Float::with_val(128, rug::ops::Pow::pow(x, k)));
            let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            assert!((v.to_f64() - exact).abs() < 1e-14, "k={k}");
        }
        let total: Float = pairwise_sum(&r.weights, 128);
        assert!(Float::with_val(128, total - 2u32).abs() < 1e-35);
    }

    #[test]
    fn mapped_rule() {
        let c = PrecisionContext::new(64).unwrap();
        let r = gauss_legendre(2, &c).unwrap();
        let m = map_rule(&r, &c.float(0.0), &c.float(1.0)).unwrap();
        let v = m.apply(|x| x.clone());
        assert!((v.to_f64() - 0.5).abs() < 1e-18);
        assert!(map_rule(&r, &c.float(1.0), &c.float(1.0)).is_err());
    }

    #[test]
    fn exponential_on_half_line() {
        let c = PrecisionContext::new(64).unwrap();
        let inf = Float::with_val(64, rug::float::Special::Infinity);
        let v = integrate_adaptive(&|x: &Float| Float::with_val(64, -x).exp(), &c.float(0.0), &inf, 1e-15, &c)
            .unwrap();
        assert!((v.to_f64() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn arcsine_weight() {
        let c = PrecisionContext::new(64).unwrap();
        let (a, b) = (0.2, 0.9);
        let f = move |x: &Float| {
            let q = Float::with_val(64, b - x.clone()) * Float::with_val(64, x - a);
            q.sqrt().recip()
        };
        let v = integrate_adaptive(&f, &c.float(a), &c.float(b), 1e-12, &c).unwrap();
        assert!((v.to_f64() - std::f64::consts::PI).abs() < 1e-11);
    }

    #[test]
    fn budget_exhaustion_reports_estimate() {
        let c = PrecisionContext::double();
        // non-integrable at 0
        let f = |x: &Float| Float::with_val(53, x.clone().recip());
        match integrate_adaptive(&f, &c.float(0.0), &c.float(1.0), 1e-10, &c) {
            Err(Error::Convergence { .. }) | Err(Error::Domain(_)) => {}
            other => panic!("unexpected {other:?}"),
        }
    }
}

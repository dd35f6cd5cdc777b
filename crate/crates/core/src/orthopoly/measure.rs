//! Composite Gauss–Legendre discretization of a weight on its support.

use rug::ops::Pow;
use rug::Float;

use super::WeightSpec;
use crate::error::Result;
use crate::precision::PrecisionContext;
use crate::quadrature::{gauss_legendre, map_rule};

/// Discrete measure Σ w_i δ_{x_i}. For even weights only x_i > 0 is stored and
/// each weight already counts both mirror points.
pub(crate) struct DiscreteMeasure {
    pub x: Vec<Float>,
    pub w: Vec<Float>,
    pub even: bool,
}

const GRADING_RATIO: f64 = 0.15;
const MAX_GRADED_PANELS: usize = 600;

/// Work variable u with x = map(u) and density (weight × Jacobian) in u.
struct Substitution {
    lower: Float,
    upper: Float,
    /// Singular point of the density at or below `lower`, with its exponent.
    left_singularity: Option<(Float, f64)>,
    /// Singular point at or above `upper`, with its exponent.
    right_singularity: Option<(Float, f64)>,
    panel_width: f64,
}

fn is_nonnegative_integer(v: f64) -> bool {
    v >= 0.0 && v.fract() == 0.0
}

/// u where u^{k} e^{−u²} has dropped by `drop` (natural log) below its peak.
fn gaussian_tail_cutoff(k: f64, drop: f64) -> f64 {
    let g = |u: f64| k * u.ln() - u * u;
    let peak = (k / 2.0).sqrt().max(1.0);
    let target = g(peak) - drop;
    let mut hi = peak + 1.0;
    while g(hi) > target {
        hi *= 1.5;
    }
    let mut lo = peak;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > target { lo = mid } else { hi = mid }
    }
    hi
}

impl Substitution {
    fn for_weight(w: &WeightSpec, degree: usize, p: u32) -> Self {
        let drop = p as f64 * std::f64::consts::LN_2 + 30.0;
        match w {
            WeightSpec::DeformedLaguerre { alpha, t } => {
                let gamma = 2.0 * alpha + 1.0;
                // x^{2n+1} is u^{4n+2} in the work variable
                let k = 4.0 * degree as f64 + 2.0 + gamma.max(0.0);
                let cut = gaussian_tail_cutoff(k.max(1.0), drop);
                let lower = Float::with_val(p, t.sqrt_ref());
                let sing = (!is_nonnegative_integer(gamma)).then(|| (Float::new(p), gamma));
                Self {
                    upper: Float::with_val(p, cut).max(&(Float::with_val(p, &lower + 1u32))),
                    lower,
                    left_singularity: sing,
                    right_singularity: None,
                    panel_width: 1.0,
                }
            }
            WeightSpec::DeformedJacobi { alpha, beta, t } => {
                let one_minus_t = Float::with_val(p, 1u32 - t);
                let upper = one_minus_t.sqrt();
                let gamma_left = 2.0 * beta + 1.0;
                Self {
                    lower: Float::new(p),
                    upper,
                    left_singularity: (!is_nonnegative_integer(gamma_left)).then(|| (Float::new(p), gamma_left)),
                    right_singularity: (!is_nonnegative_integer(*alpha)).then(|| (Float::with_val(p, 1), *alpha)),
                    panel_width: 0.5,
                }
            }
            WeightSpec::GapHermite { a } => {
                let k = 2.0 * degree as f64 + 1.0;
                let cut = gaussian_tail_cutoff(k, drop);
                let lower = Float::with_val(p, a);
                Self {
                    upper: Float::with_val(p, cut).max(&(Float::with_val(p, &lower + 1u32))),
                    lower,
                    left_singularity: None,
                    right_singularity: None,
                    panel_width: 1.0,
                }
            }
            WeightSpec::GapSymmetricJacobi { beta, a } => {
                let one_minus_a = Float::with_val(p, 1u32 - a);
                let gamma_left = 2.0 * beta + 1.0;
                Self {
                    lower: Float::new(p),
                    upper: one_minus_a.sqrt(),
                    left_singularity: (!is_nonnegative_integer(gamma_left)).then(|| (Float::new(p), gamma_left)),
                    right_singularity: (!is_nonnegative_integer(*beta))
                        .then(|| (Float::with_val(p, 2).sqrt(), *beta)),
                    panel_width: 0.5,
                }
            }
        }
    }

    /// Panel breakpoints in u, geometrically graded toward nearby singularities.
    fn breakpoints(&self, p: u32) -> Vec<Float> {
        let len = Float::with_val(p, &self.upper - &self.lower).to_f64();
        let panels = ((len / self.panel_width).ceil() as usize).max(2);
        let width = Float::with_val(p, &self.upper - &self.lower) / panels as u32;
        let mut pts: Vec<Float> = (0..=panels)
            .map(|i| Float::with_val(p, &width * i as u32) + &self.lower)
            .collect();
        let bits = p as f64;
        if let Some((s, gamma)) = &self.left_singularity {
            let anchor = pts[1].clone();
            let graded = graded_points(s, &anchor, &self.lower, *gamma, bits, p);
            let mut out = vec![pts[0].clone()];
            out.extend(graded.into_iter().rev());
            out.extend(pts.drain(1..));
            pts = out;
        }
        if let Some((s, gamma)) = &self.right_singularity {
            let last = pts.len() - 1;
            let anchor = pts[last - 1].clone();
            // mirror: distances measured from s downward
            let neg = |v: &Float| Float::with_val(p, -v);
            let graded = graded_points(&neg(s), &neg(&anchor), &neg(&self.upper), *gamma, bits, p);
            let tail = pts.pop().expect("non-empty");
            pts.extend(graded.into_iter().map(|v| neg(&v)));
            pts.push(tail);
        }
        pts
    }
}

/// Points s + (anchor − s)σ^j strictly between `end` and `anchor` (for an
/// interior singularity) or down to a negligible panel when s = end.
fn graded_points(s: &Float, anchor: &Float, end: &Float, gamma: f64, bits: f64, p: u32) -> Vec<Float> {
    let span = Float::with_val(p, anchor - s);
    let gap = Float::with_val(p, end - s);
    let mut out = Vec::new();
    let max_j = if gap.is_zero() {
        let decay = (gamma + 1.0).max(0.05) * (1.0 / GRADING_RATIO).ln();
        ((bits * std::f64::consts::LN_2 + 10.0) / decay).ceil() as usize
    } else {
        MAX_GRADED_PANELS
    };
    let ratio = Float::with_val(p, GRADING_RATIO);
    let mut scale = ratio.clone();
    for _ in 0..max_j.min(MAX_GRADED_PANELS) {
        let pt = Float::with_val(p, &span * &scale) + s;
        if pt <= *end {
            break;
        }
        // stop once the remaining gap is comparable to the panel width
        let dist = Float::with_val(p, &pt - end);
        out.push(pt);
        if !gap.is_zero() && dist < Float::with_val(p, &gap * 2u32) {
            break;
        }
        scale *= &ratio;
    }
    out
}

fn density(w: &WeightSpec, u: &Float, p: u32) -> (Float, Float) {
    match w {
        WeightSpec::DeformedLaguerre { alpha, .. } => {
            // x = u², dx = 2u du
            let x = Float::with_val(p, u.square_ref());
            let g = Float::with_val(p, 2.0 * alpha + 1.0);
            let d = Float::with_val(p, u.pow(&g)) * Float::with_val(p, -&x).exp() * 2u32;
            (x, d)
        }
        WeightSpec::DeformedJacobi { alpha, beta, .. } => {
            // x = 1 − v², (1−x)^β = v^{2β}, dx = 2v dv
            let v2 = Float::with_val(p, u.square_ref());
            let x = Float::with_val(p, 1u32 - &v2);
            let g = Float::with_val(p, 2.0 * beta + 1.0);
            let xa = Float::with_val(p, (&x).pow(&Float::with_val(p, *alpha)));
            let d = Float::with_val(p, u.pow(&g)) * xa * 2u32;
            (x, d)
        }
        WeightSpec::GapHermite { .. } => {
            let x = u.clone();
            let d = Float::with_val(p, -Float::with_val(p, u.square_ref())).exp();
            (x, d * 2u32)
        }
        WeightSpec::GapSymmetricJacobi { beta, .. } => {
            // x = 1 − v², 1 − x² = v²(2 − v²), dx = 2v dv
            let v2 = Float::with_val(p, u.square_ref());
            let x = Float::with_val(p, 1u32 - &v2);
            let other = Float::with_val(p, 2u32 - &v2);
            let b = Float::with_val(p, *beta);
            let g = Float::with_val(p, 2.0 * beta + 1.0);
            let d = Float::with_val(p, u.pow(&g)) * Float::with_val(p, other.pow(&b)) * 2u32;
            (x, d * 2u32)
        }
    }
}

/// Discretize `w` for polynomials up to degree `2·degree + 1` with m-point panels.
pub(crate) fn discretize(w: &WeightSpec, degree: usize, m: usize, ctx: &PrecisionContext) -> Result<DiscreteMeasure> {
    let p = ctx.mantissa_bits();
    let sub = Substitution::for_weight(w, degree, p);
    let pts = sub.breakpoints(p);
    let rule = gauss_legendre(m, ctx)?;
    let mut x = Vec::with_capacity(m * pts.len());
    let mut wt = Vec::with_capacity(m * pts.len());
    for pair in pts.windows(2) {
        if pair[0] >= pair[1] {
            continue;
        }
        let r = map_rule(&rule, &pair[0], &pair[1])?;
        for (u, gw) in r.nodes.iter().zip(&r.weights) {
            let (xi, d) = density(w, u, p);
            if d.is_zero() {
                continue;
            }
            x.push(xi);
            wt.push(d * gw);
        }
    }
    Ok(DiscreteMeasure { x, w: wt, even: w.is_even() })
}

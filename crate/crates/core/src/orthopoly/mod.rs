//! Finite-n engine: moments, Hankel determinants and recurrence coefficients
//! of deformed classical weights, and the probabilities built from them.

mod measure;
mod quantities;
mod stieltjes;

use rug::Float;

use crate::error::{Error, Result};
use crate::linalg::cholesky_log_det;
use crate::precision::PrecisionContext;
use crate::specfun::{beta_incomplete, gamma_upper, log_barnes_g, log_gamma};

pub use quantities::{
    doubling_check, finite_log_det_derivatives, gue_sigma_n, hn_quantity, pn_at_point,
    pn_at_point_recurrence, pn_determinant_ratio, rn_derivatives, rn_quantity, DoublingFamily,
};
pub use stieltjes::{eval_monic, stieltjes_recurrence, stieltjes_recurrence_with_order, RecurrenceTable};

/// A classical weight restricted to a gap-dependent support.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightSpec {
    /// x^α e^{−x} on [t, ∞).
    DeformedLaguerre { alpha: f64, t: Float },
    /// x^α (1−x)^β on [t, 1].
    DeformedJacobi { alpha: f64, beta: f64, t: Float },
    /// e^{−x²} on ℝ ∖ (−a, a).
    GapHermite { a: Float },
    /// (1−x²)^β on [−1, 1] ∖ (−a, a).
    GapSymmetricJacobi { beta: f64, a: Float },
}

fn check_exponent(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > -1.0) {
        return Err(Error::domain(format!("{name} must be > -1, got {v}")));
    }
    Ok(())
}

impl WeightSpec {
    pub fn laguerre(alpha: f64, t: f64) -> Result<Self> {
        Self::DeformedLaguerre { alpha, t: Float::with_val(53, t) }.validated()
    }

    pub fn jacobi(alpha: f64, beta: f64, t: f64) -> Result<Self> {
        Self::DeformedJacobi { alpha, beta, t: Float::with_val(53, t) }.validated()
    }

    pub fn hermite(a: f64) -> Result<Self> {
        Self::GapHermite { a: Float::with_val(53, a) }.validated()
    }

    pub fn symmetric_jacobi(beta: f64, a: f64) -> Result<Self> {
        Self::GapSymmetricJacobi { beta, a: Float::with_val(53, a) }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        let g = self.gap().clone();
        if !g.is_finite() || g < 0 {
            return Err(Error::domain(format!("gap parameter must be finite and >= 0, got {g}")));
        }
        match &self {
            Self::DeformedLaguerre { alpha, .. } => check_exponent("alpha", *alpha)?,
            Self::DeformedJacobi { alpha, beta, .. } => {
                check_exponent("alpha", *alpha)?;
                check_exponent("beta", *beta)?;
                if g >= 1 {
                    return Err(Error::domain(format!("Jacobi gap t must be < 1, got {g}")));
                }
            }
            Self::GapHermite { .. } => {}
            Self::GapSymmetricJacobi { beta, .. } => {
                check_exponent("beta", *beta)?;
                if g >= 1 {
                    return Err(Error::domain(format!("symmetric Jacobi gap a must be < 1, got {g}")));
                }
            }
        }
        Ok(self)
    }

    /// The gap parameter (t or a).
    pub fn gap(&self) -> &Float {
        match self {
            Self::DeformedLaguerre { t, .. } | Self::DeformedJacobi { t, .. } => t,
            Self::GapHermite { a } | Self::GapSymmetricJacobi { a, .. } => a,
        }
    }

    /// Same family with a different gap parameter.
    pub fn with_gap(&self, g: Float) -> Self {
        match self {
            Self::DeformedLaguerre { alpha, .. } => Self::DeformedLaguerre { alpha: *alpha, t: g },
            Self::DeformedJacobi { alpha, beta, .. } => Self::DeformedJacobi { alpha: *alpha, beta: *beta, t: g },
            Self::GapHermite { .. } => Self::GapHermite { a: g },
            Self::GapSymmetricJacobi { beta, .. } => Self::GapSymmetricJacobi { beta: *beta, a: g },
        }
    }

    pub fn is_even(&self) -> bool {
        matches!(self, Self::GapHermite { .. } | Self::GapSymmetricJacobi { .. })
    }
}

/// μ_0, …, μ_{count−1}.
pub fn moments(w: &WeightSpec, count: usize, ctx: &PrecisionContext) -> Result<Vec<Float>> {
    if count == 0 {
        return Err(Error::domain("moments requires count >= 1"));
    }
    let p = ctx.mantissa_bits();
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let v = match w {
            WeightSpec::DeformedLaguerre { alpha, t } => {
                gamma_upper(&(Float::with_val(p, *alpha) + (k as u32 + 1)), &Float::with_val(p, t), ctx)?
            }
            WeightSpec::DeformedJacobi { alpha, beta, t } => beta_incomplete(
                &(Float::with_val(p, *alpha) + (k as u32 + 1)),
                &(Float::with_val(p, *beta) + 1u32),
                &Float::with_val(p, t),
                ctx,
            )?,
            // 2∫_a^∞ x^{2j} e^{−x²} dx = Γ(j+1/2, a²)
            WeightSpec::GapHermite { a } => {
                if k % 2 == 1 {
                    Float::new(p)
                } else {
                    let a2 = Float::with_val(p, a.square_ref());
                    gamma_upper(&(Float::with_val(p, 0.5) + (k as u32 / 2)), &a2, ctx)?
                }
            }
            // 2∫_a^1 x^{2j}(1−x²)^β dx = ∫_{a²}^1 y^{j−1/2}(1−y)^β dy
            WeightSpec::GapSymmetricJacobi { beta, a } => {
                if k % 2 == 1 {
                    Float::new(p)
                } else {
                    let a2 = Float::with_val(p, a.square_ref());
                    beta_incomplete(
                        &(Float::with_val(p, 0.5) + (k as u32 / 2)),
                        &(Float::with_val(p, *beta) + 1u32),
                        &a2,
                        ctx,
                    )?
                }
            }
        };
        out.push(v);
    }
    Ok(out)
}

/// log det (μ_{i+j})_{i,j<n} and the data it was computed from.
#[derive(Debug, Clone, PartialEq)]
pub struct HankelResult {
    pub weight: WeightSpec,
    pub n: usize,
    pub log_det: Float,
    pub ctx: PrecisionContext,
}

/// Mantissa width suggested for moment-determinant work at size n.
pub fn recommended_bits(n: usize) -> u32 {
    53 + (3.5 * (n * n) as f64).ceil() as u32
}

/// Hankel determinant of the moment matrix via Cholesky at context precision.
pub fn hankel_log_det(w: &WeightSpec, n: usize, ctx: &PrecisionContext) -> Result<HankelResult> {
    if n == 0 {
        return Err(Error::domain("hankel_log_det requires n >= 1"));
    }
    let mu = moments(w, 2 * n - 1, ctx)?;
    let a: Vec<Vec<Float>> = (0..n).map(|i| (0..n).map(|j| mu[i + j].clone()).collect()).collect();
    let log_det = cholesky_log_det(&a, ctx.mantissa_bits(), "moment Hankel determinant").map_err(|e| match e {
        Error::PrecisionInsufficient { what, suggested_bits } => Error::PrecisionInsufficient {
            what,
            suggested_bits: suggested_bits.max(recommended_bits(n)),
        },
        other => other,
    })?;
    Ok(HankelResult { weight: w.clone(), n, log_det, ctx: *ctx })
}

fn sum_log_gamma(args: impl Iterator<Item = Float>, ctx: &PrecisionContext) -> Result<Float> {
    let mut s = ctx.zero();
    for a in args {
        s += log_gamma(&a, ctx)?;
    }
    Ok(s)
}

fn laguerre_d0(alpha: f64, n: usize, ctx: &PrecisionContext) -> Result<Float> {
    let p = ctx.mantissa_bits();
    sum_log_gamma(
        (0..n).flat_map(|j| [Float::with_val(p, j + 1), Float::with_val(p, alpha) + (j as u32 + 1)]),
        ctx,
    )
}

fn jacobi_d0(alpha: f64, beta: f64, n: usize, ctx: &PrecisionContext) -> Result<Float> {
    let p = ctx.mantissa_bits();
    let num = sum_log_gamma(
        (0..n).flat_map(|j| {
            [
                Float::with_val(p, j + 1),
                Float::with_val(p, alpha) + (j as u32 + 1),
                Float::with_val(p, beta) + (j as u32 + 1),
            ]
        }),
        ctx,
    )?;
    let den = sum_log_gamma(
        (0..n).map(|j| Float::with_val(p, alpha + beta) + ((n + j) as u32 + 1)),
        ctx,
    )?;
    Ok(num - den)
}

/// log D_n at zero gap from the classical closed forms.
pub fn log_det_at_zero_gap(w: &WeightSpec, n: usize, ctx: &PrecisionContext) -> Result<Float> {
    let p = ctx.mantissa_bits();
    match w {
        WeightSpec::DeformedLaguerre { alpha, .. } => laguerre_d0(*alpha, n, ctx),
        WeightSpec::DeformedJacobi { alpha, beta, .. } => jacobi_d0(*alpha, *beta, n, ctx),
        WeightSpec::GapHermite { .. } => {
            // (2π)^{n/2} 2^{−n²/2} G(n+1)
            let two_pi = ctx.pi() * 2u32;
            let v = Float::with_val(p, two_pi.ln()) * n as u32 / 2u32
                - Float::with_val(p, ctx.ln2() * (n * n) as u32) / 2u32
                + log_barnes_g(&Float::with_val(p, n + 1), ctx)?;
            Ok(v)
        }
        WeightSpec::GapSymmetricJacobi { beta, .. } => {
            let (k_even, k_odd) = (n.div_ceil(2), n / 2);
            let mut v = jacobi_d0(-0.5, *beta, k_even, ctx)?;
            if k_odd > 0 {
                v += jacobi_d0(0.5, *beta, k_odd, ctx)?;
            }
            Ok(v)
        }
    }
}

/// How log D_n at a nonzero gap is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// Moments for n ≤ 12, recurrence coefficients beyond.
    Auto,
    /// Cholesky of the moment matrix.
    Moments,
    /// Σ log h_k from discretized Stieltjes.
    Recurrence,
}

pub(crate) const AUTO_MOMENT_LIMIT: usize = 12;

impl Route {
    pub(crate) fn resolve(self, n: usize) -> Route {
        match self {
            Route::Auto if n <= AUTO_MOMENT_LIMIT => Route::Moments,
            Route::Auto => Route::Recurrence,
            r => r,
        }
    }
}

/// log D_n(gap) by the chosen route.
pub fn log_det(w: &WeightSpec, n: usize, route: Route, ctx: &PrecisionContext) -> Result<Float> {
    match route.resolve(n) {
        Route::Moments => Ok(hankel_log_det(w, n, ctx)?.log_det),
        _ => Ok(stieltjes_recurrence(w, n, ctx)?.log_det(n)),
    }
}

/// log P = log D_n(gap) − log D_n(0).
pub fn finite_probability(w: &WeightSpec, n: usize, ctx: &PrecisionContext) -> Result<Float> {
    finite_probability_by(w, n, Route::Auto, ctx)
}

pub fn finite_probability_by(w: &WeightSpec, n: usize, route: Route, ctx: &PrecisionContext) -> Result<Float> {
    if n == 0 {
        return Err(Error::domain("finite_probability requires n >= 1"));
    }
    if w.gap().is_zero() {
        return Ok(ctx.zero());
    }
    Ok(log_det(w, n, route, ctx)? - log_det_at_zero_gap(w, n, ctx)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classical_moments() {
        let c = PrecisionContext::new(128).unwrap();
        let m = moments(&WeightSpec::laguerre(0.0, 0.0).unwrap(), 6, &c).unwrap();
        for (k, v) in m.iter().enumerate() {
            let f: f64 = (1..=k).map(|x| x as f64).product();
            assert!((v.to_f64() - f).abs() < 1e-12 * f);
        }
        let m = moments(&WeightSpec::jacobi(0.0, 0.0, 0.0).unwrap(), 6, &c).unwrap();
        for (k, v) in m.iter().enumerate() {
            assert!((v.to_f64() - 1.0 / (k as f64 + 1.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn small_laguerre_determinants() {
        let c = PrecisionContext::new(128).unwrap();
        let w = WeightSpec::laguerre(0.0, 0.7).unwrap();
        assert!((hankel_log_det(&w, 1, &c).unwrap().log_det.to_f64() + 0.7).abs() < 1e-30);
        assert!((hankel_log_det(&w, 2, &c).unwrap().log_det.to_f64() + 1.4).abs() < 1e-30);
        assert!((finite_probability(&w, 2, &c).unwrap().to_f64() + 1.4).abs() < 1e-30);
    }

    #[test]
    fn zero_gap_closed_forms_match_moments() {
        let c = PrecisionContext::new(256).unwrap();
        for w in [
            WeightSpec::laguerre(0.5, 0.0).unwrap(),
            WeightSpec::jacobi(0.5, 1.5, 0.0).unwrap(),
            WeightSpec::hermite(0.0).unwrap(),
            WeightSpec::symmetric_jacobi(1.0, 0.0).unwrap(),
        ] {
            for n in 1..=5 {
                let a = hankel_log_det(&w, n, &c).unwrap().log_det;
                let b = log_det_at_zero_gap(&w, n, &c).unwrap();
                assert!(Float::with_val(256, &a - &b).abs() < 1e-60, "{w:?} n={n}");
            }
        }
    }

    #[test]
    fn rejects_invalid_weights() {
        assert!(WeightSpec::laguerre(-1.0, 0.1).is_err());
        assert!(WeightSpec::jacobi(0.0, 1.0, 1.0).is_err());
        assert!(WeightSpec::hermite(-0.1).is_err());
    }
}

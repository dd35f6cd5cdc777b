//! Transport of a σ(s) seed along the hard-edge σ-form.
//!
//! The σ-form is quadratic in σ″. The seed picks the root nearest the series
//! prediction; after that the equation is integrated in its differentiated,
//! third-order form
//!
//!   2s²σ‴ = −[2sσ″ + (8σ′+1)(sσ′−σ) + sσ′(4σ′+1) − 2α²σ′],
//!
//! so the branch is carried continuously by σ″ itself. The state is the
//! deviation u = σ + s/4 from the α = 0 solution, which keeps that solution
//! exact in floating point. Perturbations of the
//! solution behave like e^{±2√s}; long transports amplify seed errors by the
//! corresponding exponential.

use rug::Float;

use super::series::{AsymptoticSeries, SeriesKind};
use crate::error::{Error, Result};
use crate::precision::PrecisionContext;

/// Where the transport ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transported {
    pub sigma: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub steps: usize,
}

const MAX_STEPS: usize = 2_000_000;

/// Both roots of the σ-form for σ″ at (s, σ, σ′), or an error when the seed
/// is not consistent with the equation.
pub fn sigma2_roots(alpha: f64, s: f64, sigma: f64, sigma1: f64, ctx: &PrecisionContext) -> Result<(Float, Float)> {
    let p = ctx.mantissa_bits();
    let (s, sg, s1) = (ctx.float(s), ctx.float(sigma), ctx.float(sigma1));
    // (sσ″)² = α²σ′² − σ′(4σ′+1)(sσ′−σ)
    let a2 = ctx.float(alpha * alpha);
    let s1sq = Float::with_val(p, s1.square_ref());
    let q = a2 * &s1sq - Float::with_val(p, &s1 * (Float::with_val(p, &s1 * 4u32) + 1u32)) * (Float::with_val(p, &s * &s1) - &sg);
    let scale = Float::with_val(p, s1sq.abs_ref()).max(&Float::with_val(p, sg.abs_ref()));
    let q = if q < 0 {
        if Float::with_val(p, -&q) > Float::with_val(p, &scale * 1e-10) {
            return Err(Error::Transport(format!(
                "seed (s={}, σ={}, σ′={}) has no real σ″ (discriminant {})",
                s.to_f64(),
                sg.to_f64(),
                s1.to_f64(),
                q.to_f64()
            )));
        }
        Float::new(p)
    } else {
        q
    };
    let r = q.sqrt() / &s;
    Ok((Float::with_val(p, &r), -r))
}

/// Third-order form in u = σ + s/4.
fn rhs(alpha: f64, s: f64, y: [f64; 3]) -> [f64; 3] {
    let [u, u1, u2] = y;
    let a2 = alpha * alpha;
    let bracket = 2.0 * s * u2 + (8.0 * u1 - 1.0) * (s * u1 - u) + s * u1 * (4.0 * u1 - 1.0) - 2.0 * a2 * u1 + a2 / 2.0;
    [u1, u2, -bracket / (2.0 * s * s)]
}

// Dormand–Prince 5(4)
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn integrate(alpha: f64, s0: f64, y0: [f64; 3], s1: f64, tol: f64) -> Result<([f64; 3], usize)> {
    let span = s1 - s0;
    let dir = span.signum();
    let mut s = s0;
    let mut y = y0;
    let mut h = dir * (span.abs() * 1e-3).max(1e-6 * s0.abs());
    let mut steps = 0usize;
    while (s1 - s) * dir > 0.0 {
        if steps >= MAX_STEPS {
            return Err(Error::Convergence {
                what: "σ-form transport".into(),
                best: y[0],
                error_bound: f64::INFINITY,
            });
        }
        if (s + h - s1) * dir > 0.0 {
            h = s1 - s;
        }
        let mut k = [[0.0f64; 3]; 7];
        for i in 0..7 {
            let mut yi = y;
            for (j, kj) in k.iter().enumerate().take(i) {
                for c in 0..3 {
                    yi[c] += h * A[i][j] * kj[c];
                }
            }
            k[i] = rhs(alpha, s + C[i] * h, yi);
        }
        let mut y5 = y;
        let mut err = 0.0f64;
        for c in 0..3 {
            let mut d5 = 0.0;
            let mut d4 = 0.0;
            for i in 0..7 {
                d5 += B5[i] * k[i][c];
                d4 += B4[i] * k[i][c];
            }
            y5[c] += h * d5;
            let sc = tol + tol * y[c].abs().max(y5[c].abs());
            err = err.max((h * (d5 - d4)).abs() / sc);
        }
        if !err.is_finite() {
            return Err(Error::Stiffness(format!("non-finite state near s = {s}")));
        }
        if err <= 1.0 {
            s += h;
            y = y5;
            steps += 1;
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
        if h.abs() < 1e-13 * s.abs().max(1.0) {
            return Err(Error::Stiffness(format!("step size underflow at s = {s}")));
        }
    }
    Ok((y, steps))
}

/// Transport (σ, σ′) from `s_start` to `s_end` along the equation `eq`.
///
/// Only `piii_sigma` is supported.
#[allow(clippy::too_many_arguments)]
pub fn ode_transport(
    eq: &str,
    alpha: f64,
    s_start: f64,
    sigma_start: f64,
    sigma1_start: f64,
    s_end: f64,
    tol: f64,
    ctx: &PrecisionContext,
) -> Result<Transported> {
    if eq != "piii_sigma" {
        return Err(Error::Capability(format!("transport is implemented for piii_sigma only, not '{eq}'")));
    }
    if !(s_start > 0.0 && s_end > 0.0) || !s_start.is_finite() || !s_end.is_finite() {
        return Err(Error::domain("transport endpoints must be positive and finite"));
    }
    if !(tol > 0.0) {
        return Err(Error::domain("tolerance must be positive"));
    }
    if !(alpha > -1.0) {
        return Err(Error::domain("alpha must be > -1"));
    }
    let (up, down) = sigma2_roots(alpha, s_start, sigma_start, sigma1_start, ctx)?;
    let series = AsymptoticSeries::new(SeriesKind::SigmaOfS { alpha }, 6, ctx)?;
    let hint = series.derivatives(&ctx.float(s_start))?[2].to_f64();
    let (u, d) = (up.to_f64(), down.to_f64());
    let (du, dd) = ((u - hint).abs(), (d - hint).abs());
    if (du - dd).abs() <= tol * hint.abs().max(1.0) && (u - d).abs() > tol * hint.abs().max(1.0) {
        return Err(Error::Transport(format!(
            "both σ″ roots ({u}, {d}) are equally close to the series value {hint}"
        )));
    }
    let sigma2 = if du <= dd { u } else { d };
    if s_start == s_end {
        return Ok(Transported { sigma: sigma_start, sigma1: sigma1_start, sigma2, steps: 0 });
    }
    let u0 = [sigma_start + s_start / 4.0, sigma1_start + 0.25, sigma2];
    let (y, steps) = integrate(alpha, s_start, u0, s_end, tol)?;
    Ok(Transported {
        sigma: y[0] - s_end / 4.0,
        sigma1: y[1] - 0.25,
        sigma2: y[2],
        steps,
    })
}

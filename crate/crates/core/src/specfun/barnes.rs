use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use rug::{Float, Integer, Rational};

use super::gamma::log_gamma;
use crate::error::{Error, Result};
use crate::precision::PrecisionContext;

const GUARD: u32 = 32;

/// log G(z) for z > 0, G the Barnes G-function.
///
/// The argument is shifted so that z = 1 + w with w in [−1/2, 1/2), where the
/// Taylor series of log G(1+w) in ζ(k) converges like 2^{−k}.
pub fn log_barnes_g(z: &Float, ctx: &PrecisionContext) -> Result<Float> {
    if !(z.is_finite() && *z > 0) {
        return Err(Error::domain(format!("log_barnes_g requires z > 0, got {z}")));
    }
    let w = ctx.widened(GUARD + shift_guard(z));
    let p = w.mantissa_bits();
    let mut z = Float::with_val(p, z);
    let mut acc = Float::new(p);
    let lo = Float::with_val(p, 0.5);
    let hi = Float::with_val(p, 1.5);
    // G(z+1) = Γ(z) G(z)
    while z >= hi {
        z -= 1u32;
        acc += log_gamma(&z, &w)?;
    }
    while z < lo {
        acc -= log_gamma(&z, &w)?;
        z += 1u32;
    }
    let v = acc + log_g_one_plus(&Float::with_val(p, &z - 1u32), p);
    Ok(ctx.round(&v))
}

fn shift_guard(z: &Float) -> u32 {
    // The recurrence sums log Γ values of size ~ z log z; keep absolute accuracy.
    let zf = z.to_f64().max(2.0);
    (zf * zf.ln()).log2().max(0.0).ceil() as u32 + 4
}

/// log G(1+w), |w| ≤ 1/2.
fn log_g_one_plus(w: &Float, p: u32) -> Float {
    let two_pi = Float::with_val(p, rug::float::Constant::Pi) * 2u32;
    let euler = Float::with_val(p, rug::float::Constant::Euler);
    let w2 = Float::with_val(p, w * w);
    let mut sum = Float::with_val(p, two_pi.ln() * w) / 2u32;
    sum -= Float::with_val(p, (euler + 1u32) * &w2 + w) / 2u32;
    let mut wpow = Float::with_val(p, &w2 * w); // w^{k+1} with k = 2
    let cutoff = -(p as i32) - 8;
    for k in 2u32..(4 * p + 64) {
        if wpow.is_zero() {
            break;
        }
        let zk = Float::with_val(p, Float::zeta_u(k));
        let mut term = Float::with_val(p, &zk * &wpow) / (k + 1);
        if k % 2 == 1 {
            term = -term;
        }
        let small = term.is_zero() || term.get_exp().unwrap_or(i32::MIN) < cutoff;
        sum += term;
        if small {
            break;
        }
        wpow *= w;
    }
    sum
}

fn zeta_cache() -> &'static Mutex<HashMap<u32, Float>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Float>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// ζ′(−1) = 1/12 − log A, with Glaisher's constant A from Euler–Maclaurin
/// summation of k log k. Cached per mantissa width.
pub fn zeta_prime_minus_one(ctx: &PrecisionContext) -> Float {
    let bits = ctx.mantissa_bits();
    if let Some(v) = zeta_cache().lock().expect("cache poisoned").get(&bits) {
        return v.clone();
    }
    let v = ctx.round(&compute_zeta_prime_minus_one(bits + GUARD));
    zeta_cache()
        .lock()
        .expect("cache poisoned")
        .entry(bits)
        .or_insert(v)
        .clone()
}

fn compute_zeta_prime_minus_one(p: u32) -> Float {
    let n = (p / 4).max(16);
    let nf = Float::with_val(p, n);
    let mut s = Float::new(p);
    for k in 2..=n {
        let kf = Float::with_val(p, k);
        s += Float::with_val(p, kf.ln_ref()) * k;
    }
    let ln_n = Float::with_val(p, nf.ln_ref());
    let n2 = Float::with_val(p, &nf * &nf);
    // log A = S_N − (N²/2 + N/2 + 1/12) log N + N²/4 + Σ_{j≥2} B_{2j} / (2j(2j−1)(2j−2) N^{2j−2})
    let poly = Float::with_val(p, &n2 / 2u32) + Float::with_val(p, &nf / 2u32) + Float::with_val(p, 1) / 12u32;
    let mut log_a = s - poly * &ln_n + Float::with_val(p, &n2 / 4u32);
    let bern = bernoulli_even(p as usize / 4 + 16);
    let cutoff = -(p as i32) - 8;
    let mut npow = n2.clone(); // N^{2j−2} at j = 2
    for j in 2..bern.len() {
        let b2j = &bern[j];
        let m = 2 * j as u64;
        let denom = Integer::from(m) * (m - 1) * (m - 2);
        let coef = Float::with_val(p, b2j) / Float::with_val(p, &denom);
        let term = coef / &npow;
        let small = term.is_zero() || term.get_exp().unwrap_or(i32::MIN) < cutoff;
        log_a += term;
        if small {
            break;
        }
        npow *= &n2;
    }
    Float::with_val(p, 1) / 12u32 - log_a
}

/// B_0, B_2, B_4, ... as exact rationals (index j holds B_{2j}).
fn bernoulli_even(count: usize) -> Vec<Rational> {
    let max_m = 2 * count;
    let mut b: Vec<Rational> = Vec::with_capacity(max_m + 1);
    b.push(Rational::from(1));
    for m in 1..=max_m {
        if m > 1 && m % 2 == 1 {
            b.push(Rational::new());
            continue;
        }
        let mut acc = Rational::new();
        let mut binom = Integer::from(1); // C(m+1, 0)
        for (k, bk) in b.iter().enumerate().take(m) {
            if *bk.numer() != 0 {
                acc += Rational::from(&binom * bk.numer()) / bk.denom().clone();
            }
            binom *= (m + 1 - k) as u64;
            binom /= (k + 1) as u64;
        }
        b.push(-acc / Rational::from(m as u64 + 1));
    }
    b.into_iter().step_by(2).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_values() {
        let b = bernoulli_even(6);
        assert_eq!(b[1], Rational::from((1, 6)));
        assert_eq!(b[2], Rational::from((-1, 30)));
        assert_eq!(b[3], Rational::from((1, 42)));
        assert_eq!(b[5], Rational::from((5, 66)));
    }

    #[test]
    fn zeta_prime_double() {
        let c = PrecisionContext::double();
        let v = zeta_prime_minus_one(&c).to_f64();
        assert!((v + 0.165_421_143_700_450_9).abs() < 1e-15, "{v}");
    }

    #[test]
    fn zeta_prime_high_precision_is_stable_across_widths() {
        let a = zeta_prime_minus_one(&PrecisionContext::new(256).unwrap());
        let b = zeta_prime_minus_one(&PrecisionContext::new(320).unwrap());
        let d = Float::with_val(320, &a - &b).abs();
        assert!(d < Float::with_val(64, 1) >> 240);
    }
}

use rug::Float;

use super::measure::{discretize, DiscreteMeasure};
use super::WeightSpec;
use crate::error::{Error, Result};
use crate::precision::PrecisionContext;

/// Three-term recurrence data for the monic polynomials of a weight:
/// z P_k = P_{k+1} + α_k P_k + β_k P_{k−1}.
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceTable {
    pub weight: WeightSpec,
    pub max_degree: usize,
    /// α_k, k = 0..n−1.
    pub alpha: Vec<Float>,
    /// β_k, k = 0..n−1; β_0 holds μ_0.
    pub beta: Vec<Float>,
    /// h_k = ∫ P_k² w, k = 0..n−1.
    pub h: Vec<Float>,
    /// Sub-leading coefficients p_k of P_k, k = 0..n; p_0 = 0, p_{k+1} = p_k − α_k.
    pub p: Vec<Float>,
    /// Panel order of the discretization that produced the table.
    pub quad_order: usize,
}

impl RecurrenceTable {
    /// log D_k = Σ_{j<k} log h_j.
    pub fn log_det(&self, k: usize) -> Float {
        let prec = self.h[0].prec();
        self.h[..k].iter().fold(Float::new(prec), |s, h| s + Float::with_val(prec, h.ln_ref()))
    }
}

fn run_stieltjes(meas: &DiscreteMeasure, n: usize, p: u32) -> Result<(Vec<Float>, Vec<Float>, Vec<Float>)> {
    let len = meas.x.len();
    let mut prev = vec![Float::new(p); len];
    let mut cur = vec![Float::with_val(p, 1); len];
    let mut alpha = Vec::with_capacity(n);
    let mut beta = Vec::with_capacity(n);
    let mut h = Vec::with_capacity(n);
    let mut sq = Float::new(p);
    let mut tmp = Float::new(p);
    for k in 0..n {
        let mut hk = Float::new(p);
        let mut xk = Float::new(p);
        for i in 0..len {
            use rug::Assign;
            sq.assign(cur[i].square_ref());
            sq *= &meas.w[i];
            hk += &sq;
            if !meas.even {
                tmp.assign(&sq * &meas.x[i]);
                xk += &tmp;
            }
        }
        if !(hk > 0) {
            return Err(Error::PrecisionInsufficient {
                what: format!("recurrence norm h_{k}"),
                suggested_bits: 2 * p,
            });
        }
        let ak = if meas.even { Float::new(p) } else { xk / &hk };
        let bk = if k == 0 { hk.clone() } else { Float::with_val(p, &hk / &h[k - 1]) };
        if k + 1 < n {
            for i in 0..len {
                use rug::Assign;
                // next = (x − α_k) cur − β_k prev
                tmp.assign(&meas.x[i] - &ak);
                tmp *= &cur[i];
                if k > 0 {
                    let bp = Float::with_val(p, &bk * &prev[i]);
                    tmp -= bp;
                }
                std::mem::swap(&mut prev[i], &mut cur[i]);
                cur[i].assign(&tmp);
            }
        }
        alpha.push(ak);
        beta.push(bk);
        h.push(hk);
    }
    Ok((alpha, beta, h))
}

fn build_table(w: &WeightSpec, n: usize, m: usize, alpha: Vec<Float>, beta: Vec<Float>, h: Vec<Float>, prec: u32) -> RecurrenceTable {
    let mut pk = vec![Float::new(prec)];
    for a in &alpha {
        let next = Float::with_val(prec, pk.last().expect("non-empty") - a);
        pk.push(next);
    }
    RecurrenceTable { weight: w.clone(), max_degree: n, alpha, beta, h, p: pk, quad_order: m }
}

/// Recurrence table up to degree n from a fixed panel order m.
pub fn stieltjes_recurrence_with_order(w: &WeightSpec, n: usize, m: usize, ctx: &PrecisionContext) -> Result<RecurrenceTable> {
    if n == 0 {
        return Err(Error::domain("stieltjes_recurrence requires n >= 1"));
    }
    let p = ctx.mantissa_bits();
    let meas = discretize(w, n, m, ctx)?;
    let (a, b, h) = run_stieltjes(&meas, n, p)?;
    Ok(build_table(w, n, m, a, b, h, p))
}

/// Agreement level demanded between successive panel orders.
pub(crate) fn stability_tolerance(ctx: &PrecisionContext) -> f64 {
    let floor = 2f64.powi(-((ctx.mantissa_bits() * 7 / 8) as i32));
    ctx.target_tolerance().max(floor)
}

const MAX_ORDER: usize = 1024;

/// Discretized Stieltjes procedure: the panel order is doubled until every
/// α_k and β_k agrees with the previous order to the stability tolerance.
pub fn stieltjes_recurrence(w: &WeightSpec, n: usize, ctx: &PrecisionContext) -> Result<RecurrenceTable> {
    let p = ctx.mantissa_bits();
    let tol = Float::with_val(p, stability_tolerance(ctx));
    let mut m = 16usize;
    let mut prev = stieltjes_recurrence_with_order(w, n, m, ctx)?;
    let mut last_diff = f64::INFINITY;
    while m < MAX_ORDER {
        m *= 2;
        let next = stieltjes_recurrence_with_order(w, n, m, ctx)?;
        let mut worst = Float::new(p);
        for k in 0..n {
            let scale = Float::with_val(p, next.alpha[k].abs_ref())
                + Float::with_val(p, next.beta[k].abs_ref()).sqrt();
            let da = Float::with_val(p, &next.alpha[k] - &prev.alpha[k]).abs() / &scale;
            let db = Float::with_val(p, &next.beta[k] - &prev.beta[k]).abs() / Float::with_val(p, next.beta[k].abs_ref());
            worst = worst.max(&da).max(&db);
        }
        last_diff = worst.to_f64();
        if worst <= tol {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Convergence {
        what: "discretized Stieltjes procedure".into(),
        best: prev.log_det(n).to_f64(),
        error_bound: last_diff,
    })
}

/// P_k(x) by forward recurrence.
pub fn eval_monic(table: &RecurrenceTable, k: usize, x: &Float) -> Result<Float> {
    if k > table.max_degree {
        return Err(Error::Argument(format!(
            "degree {k} exceeds table max_degree {}",
            table.max_degree
        )));
    }
    let p = table.h[0].prec();
    let mut prev = Float::new(p);
    let mut cur = Float::with_val(p, 1);
    for j in 0..k {
        let mut next = Float::with_val(p, x - &table.alpha[j]) * &cur;
        if j > 0 {
            next -= Float::with_val(p, &table.beta[j] * &prev);
        }
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

//! Dense symmetric linear algebra at arbitrary precision.

use rug::{Assign, Float};

use crate::error::{Error, Result};

pub(crate) type Matrix = Vec<Vec<Float>>;

/// log det of a symmetric positive definite matrix by Cholesky factorization.
/// A non-positive pivot means the working precision cannot resolve the matrix.
pub(crate) fn cholesky_log_det(a: &Matrix, prec: u32, what: &str) -> Result<Float> {
    let n = a.len();
    let mut l: Matrix = vec![vec![Float::new(prec); n]; n];
    let mut log_det = Float::new(prec);
    let mut acc = Float::new(prec);
    for j in 0..n {
        acc.assign(&a[j][j]);
        for k in 0..j {
            acc -= Float::with_val(prec, l[j][k].square_ref());
        }
        if !(acc > 0) {
            return Err(Error::PrecisionInsufficient {
                what: what.to_string(),
                suggested_bits: prec * 2,
            });
        }
        log_det += Float::with_val(prec, acc.ln_ref());
        let d = Float::with_val(prec, acc.sqrt_ref());
        for i in j + 1..n {
            acc.assign(&a[i][j]);
            for k in 0..j {
                acc -= Float::with_val(prec, &l[i][k] * &l[j][k]);
            }
            l[i][j] = Float::with_val(prec, &acc / &d);
        }
        l[j][j] = d;
    }
    Ok(log_det)
}

/// Eigenvalues of a real symmetric matrix (ascending), by Householder
/// reduction to tridiagonal form followed by implicit QL with Wilkinson shifts.
pub(crate) fn symmetric_eigenvalues(a: &Matrix, prec: u32) -> Result<Vec<Float>> {
    let n = a.len();
    let mut a = a.clone();
    let mut d = vec![Float::new(prec); n];
    let mut e = vec![Float::new(prec); n];
    householder_tridiagonal(&mut a, &mut d, &mut e, prec);
    implicit_ql(&mut d, &mut e, prec)?;
    d.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
    Ok(d)
}

/// On exit `d` holds the diagonal and `e[1..]` the sub-diagonal.
fn householder_tridiagonal(a: &mut Matrix, d: &mut [Float], e: &mut [Float], prec: u32) {
    let n = a.len();
    let mut v = vec![Float::new(prec); n];
    let mut pv = vec![Float::new(prec); n];
    for k in 0..n.saturating_sub(2) {
        // x = a[k+1.., k]
        let mut norm2 = Float::new(prec);
        for i in k + 1..n {
            norm2 += Float::with_val(prec, a[i][k].square_ref());
        }
        if norm2.is_zero() {
            e[k + 1] = Float::new(prec);
            continue;
        }
        let norm = Float::with_val(prec, norm2.sqrt_ref());
        let alpha = if a[k + 1][k] > 0 { -norm.clone() } else { norm.clone() };
        // v = x − alpha e1, H = I − 2 v vᵀ / (vᵀv)
        for i in k + 1..n {
            v[i].assign(&a[i][k]);
        }
        v[k + 1] -= &alpha;
        let mut vtv = Float::new(prec);
        for vi in v.iter().take(n).skip(k + 1) {
            vtv += Float::with_val(prec, vi.square_ref());
        }
        let beta = Float::with_val(prec, 2u32) / &vtv;
        // p = beta A v on the trailing block
        for i in k + 1..n {
            let mut s = Float::new(prec);
            for j in k + 1..n {
                s += Float::with_val(prec, &a[i][j] * &v[j]);
            }
            pv[i] = s * &beta;
        }
        let mut vtp = Float::new(prec);
        for i in k + 1..n {
            vtp += Float::with_val(prec, &v[i] * &pv[i]);
        }
        let kk = Float::with_val(prec, &vtp * &beta) / 2u32;
        // q = p − K v ; A ← A − v qᵀ − q vᵀ
        for i in k + 1..n {
            let t = Float::with_val(prec, &kk * &v[i]);
            pv[i] -= t;
        }
        for i in k + 1..n {
            for j in k + 1..=i {
                let upd = Float::with_val(prec, &v[i] * &pv[j]) + Float::with_val(prec, &pv[i] * &v[j]);
                a[i][j] -= upd;
                if i != j {
                    let val = a[i][j].clone();
                    a[j][i] = val;
                }
            }
        }
        e[k + 1] = alpha.clone();
        a[k + 1][k] = alpha.clone();
        a[k][k + 1] = alpha;
        for i in k + 2..n {
            a[i][k] = Float::new(prec);
            a[k][i] = Float::new(prec);
        }
    }
    for i in 0..n {
        d[i].assign(&a[i][i]);
    }
    if n >= 2 {
        e[n - 1].assign(&a[n - 1][n - 2]);
    }
    e[0] = Float::new(prec);
}

fn pythag(a: &Float, b: &Float, prec: u32) -> Float {
    Float::with_val(prec, a.hypot_ref(b))
}

fn implicit_ql(d: &mut [Float], e: &mut [Float], prec: u32) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    for i in 1..n {
        let v = e[i].clone();
        e[i - 1] = v;
    }
    e[n - 1] = Float::new(prec);
    let one = Float::with_val(prec, 1);
    // off-diagonals below ε‖T‖ count as zero: tiny eigenvalues then need no
    // relative accuracy, only absolute
    let mut norm = Float::new(prec);
    for i in 0..n {
        let row = Float::with_val(prec, d[i].abs_ref()) + Float::with_val(prec, e[i].abs_ref());
        if row > norm {
            norm = row;
        }
    }
    let floor = norm >> (prec as i32);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = Float::with_val(prec, d[m].abs_ref()) + Float::with_val(prec, d[m + 1].abs_ref());
                let sum = Float::with_val(prec, e[m].abs_ref()) + &dd;
                if sum == dd || Float::with_val(prec, e[m].abs_ref()) <= floor {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::Convergence {
                    what: "symmetric eigenvalue iteration".into(),
                    best: d[l].to_f64(),
                    error_bound: e[l].to_f64().abs(),
                });
            }
            let mut g = Float::with_val(prec, &d[l + 1] - &d[l]) / Float::with_val(prec, &e[l] * 2u32);
            let mut r = pythag(&g, &one, prec);
            let sign_r = if g >= 0 { r.clone() } else { -r.clone() };
            g = Float::with_val(prec, &d[m] - &d[l]) + Float::with_val(prec, &e[l] / Float::with_val(prec, &g + &sign_r));
            let mut s = Float::with_val(prec, 1);
            let mut c = Float::with_val(prec, 1);
            let mut p = Float::new(prec);
            let mut i = m;
            let mut early = false;
            while i > l {
                i -= 1;
                let f = Float::with_val(prec, &s * &e[i]);
                let b = Float::with_val(prec, &c * &e[i]);
                r = pythag(&f, &g, prec);
                e[i + 1] = r.clone();
                if r.is_zero() {
                    d[i + 1] -= &p;
                    e[m] = Float::new(prec);
                    early = true;
                    break;
                }
                s = Float::with_val(prec, &f / &r);
                c = Float::with_val(prec, &g / &r);
                g = Float::with_val(prec, &d[i + 1] - &p);
                r = Float::with_val(prec, &d[i] - &g) * &s + Float::with_val(prec, &c * &b) * 2u32;
                p = Float::with_val(prec, &s * &r);
                d[i + 1] = Float::with_val(prec, &g + &p);
                g = Float::with_val(prec, &c * &r) - &b;
            }
            if early {
                continue;
            }
            d[l] -= &p;
            e[l] = g;
            e[m] = Float::new(prec);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hilbert_like(n: usize, prec: u32) -> Matrix {
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| Float::with_val(prec, 1) / (i + j + 1) as u32 + if i == j { 1 } else { 0 })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn eigenvalues_reproduce_trace_and_log_det() {
        let prec = 128;
        let a = hilbert_like(9, prec);
        let ev = symmetric_eigenvalues(&a, prec).unwrap();
        let trace: Float = (0..9).map(|i| a[i][i].clone()).fold(Float::new(prec), |s, x| s + x);
        let ev_sum = ev.iter().fold(Float::new(prec), |s, x| s + x);
        assert!(Float::with_val(prec, &trace - &ev_sum).abs() < 1e-30);
        let ld = cholesky_log_det(&a, prec, "test").unwrap();
        let ev_ld = ev.iter().fold(Float::new(prec), |s, x| s + Float::with_val(prec, x.ln_ref()));
        assert!(Float::with_val(prec, &ld - &ev_ld).abs() < 1e-30);
    }

    #[test]
    fn diagonal_and_tiny_matrices() {
        let prec = 64;
        let a = vec![vec![Float::with_val(prec, 3)]];
        assert_eq!(symmetric_eigenvalues(&a, prec).unwrap()[0], 3);
        let b = vec![
            vec![Float::with_val(prec, 2), Float::with_val(prec, 1)],
            vec![Float::with_val(prec, 1), Float::with_val(prec, 2)],
        ];
        let ev = symmetric_eigenvalues(&b, prec).unwrap();
        assert!((ev[0].to_f64() - 1.0).abs() < 1e-17);
        assert!((ev[1].to_f64() - 3.0).abs() < 1e-17);
    }

    #[test]
    fn indefinite_matrix_is_rejected_by_cholesky() {
        let prec = 64;
        let b = vec![
            vec![Float::with_val(prec, 1), Float::with_val(prec, 2)],
            vec![Float::with_val(prec, 2), Float::with_val(prec, 1)],
        ];
        assert!(matches!(
            cholesky_log_det(&b, prec, "x"),
            Err(Error::PrecisionInsufficient { .. })
        ));
    }
}

//! Large-argument expansions with exact rational coefficients in α.

use rug::{Float, Rational};

use super::constants::{constant_c1, constant_c2, symjue_constant, widom_dyson};
use crate::error::{Error, Result};
use crate::precision::PrecisionContext;

/// α-polynomial Σ (num/den) α^k, listed as (k, num, den).
type Poly = &'static [(u32, i64, u64)];

const R_TAIL: &[Poly] = &[
    &[(1, -1, 1)],
    &[],
    &[(1, -1, 8)],
    &[(2, -1, 4)],
    &[(3, -3, 8), (1, -27, 128)],
    &[(4, -1, 2), (2, -9, 8)],
    &[(5, -5, 8), (3, -225, 64), (1, -1125, 1024)],
    &[(6, -3, 4), (4, -135, 16), (2, -81, 8)],
];

const SIGMA_TAIL: &[Poly] = &[
    &[(1, -1, 16)],
    &[(2, -1, 16)],
    &[(3, -1, 16), (1, -9, 256)],
    &[(4, -1, 16), (2, -9, 64)],
    &[(5, -1, 16), (3, -45, 128), (1, -225, 2048)],
    &[(6, -1, 16), (4, -45, 64), (2, -27, 32)],
];

const LOGP_TAIL: &[Poly] = &[
    &[(1, 1, 8)],
    &[(2, 1, 16)],
    &[(3, 1, 24), (1, 3, 128)],
    &[(4, 1, 32), (2, 9, 128)],
    &[(5, 1, 40), (3, 9, 64), (1, 45, 1024)],
    &[(6, 1, 48), (4, 15, 64), (2, 9, 32)],
];

/// Coefficients of b^{−1}, …, b^{−6}.
const GAUSS_TAIL: &[Poly] = &[&[], &[(0, 1, 32)], &[], &[(0, 5, 128)], &[], &[(0, 131, 768)]];

/// Which expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SeriesKind {
    /// R(s) of the hard-edge Laguerre limit.
    ROfS { alpha: f64 },
    /// σ(s) = s d/ds log P(s, α).
    SigmaOfS { alpha: f64 },
    /// log P(s, α), hard-edge Laguerre.
    LogPLue { alpha: f64 },
    /// log P(s, α, β), hard-edge Jacobi.
    LogPJue { alpha: f64, beta: f64 },
    /// log P(b), sine-kernel gap (−b, b).
    LogPGue,
    /// log P(b, β), symmetric Jacobi gap (−b/n, b/n).
    LogPSymJue { beta: f64 },
}

pub const SERIES_NAMES: &[&str] = &["r_of_s", "sigma_of_s", "lue", "jue", "gue", "symjue"];

impl SeriesKind {
    /// Look a series up by name; α and β are required where the series uses them.
    pub fn from_name(name: &str, alpha: Option<f64>, beta: Option<f64>) -> Result<Self> {
        let need = |v: Option<f64>, what: &str| {
            v.ok_or_else(|| Error::Argument(format!("series '{name}' needs --{what}")))
        };
        Ok(match name {
            "r_of_s" => SeriesKind::ROfS { alpha: need(alpha, "alpha")? },
            "sigma_of_s" => SeriesKind::SigmaOfS { alpha: need(alpha, "alpha")? },
            "lue" => SeriesKind::LogPLue { alpha: need(alpha, "alpha")? },
            "jue" => SeriesKind::LogPJue {
                alpha: need(alpha, "alpha")?,
                beta: need(beta, "beta")?,
            },
            "gue" => SeriesKind::LogPGue,
            "symjue" => SeriesKind::LogPSymJue { beta: need(beta, "beta")? },
            _ => {
                return Err(Error::Argument(format!(
                    "unknown series '{name}' (known: {})",
                    SERIES_NAMES.join(", ")
                )))
            }
        })
    }

    /// Largest tabulated truncation order J.
    pub fn max_order(&self) -> usize {
        self.tail_table().len()
    }

    fn tail_table(&self) -> &'static [Poly] {
        match self {
            SeriesKind::ROfS { .. } => R_TAIL,
            SeriesKind::SigmaOfS { .. } => SIGMA_TAIL,
            SeriesKind::LogPLue { .. } | SeriesKind::LogPJue { .. } => LOGP_TAIL,
            SeriesKind::LogPGue | SeriesKind::LogPSymJue { .. } => GAUSS_TAIL,
        }
    }

    /// Tail powers are x^{−j/2} (hard edge) or b^{−j} (bulk).
    fn tail_exponent(&self, j: usize) -> Rational {
        match self {
            SeriesKind::LogPGue | SeriesKind::LogPSymJue { .. } => Rational::from(-(j as i64)),
            _ => Rational::from((-(j as i64), 2)),
        }
    }

    fn alpha(&self) -> Rational {
        let a = match *self {
            SeriesKind::ROfS { alpha }
            | SeriesKind::SigmaOfS { alpha }
            | SeriesKind::LogPLue { alpha }
            | SeriesKind::LogPJue { alpha, .. } => alpha,
            _ => 0.0,
        };
        Rational::from_f64(a).expect("finite α")
    }

    fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::domain(what.to_string()));
        match *self {
            SeriesKind::ROfS { alpha } | SeriesKind::SigmaOfS { alpha } | SeriesKind::LogPLue { alpha } => {
                if !(alpha > -1.0) || !alpha.is_finite() {
                    return bad("alpha must be finite and > -1");
                }
            }
            SeriesKind::LogPJue { alpha, beta } => {
                if !(alpha > -1.0) || !alpha.is_finite() || !(beta > 0.0) || !beta.is_finite() {
                    return bad("need alpha > -1 and beta > 0");
                }
            }
            SeriesKind::LogPSymJue { beta } => {
                if !(beta > 0.0) || !beta.is_finite() {
                    return bad("beta must be finite and > 0");
                }
            }
            SeriesKind::LogPGue => {}
        }
        Ok(())
    }
}

/// The shape of one term.
#[derive(Debug, Clone, PartialEq)]
pub enum TermShape {
    /// c·x^e for a rational exponent e.
    Power(Rational),
    /// c·log x.
    Log,
}

impl TermShape {
    pub fn label(&self, var: &str) -> String {
        match self {
            TermShape::Log => format!("log {var}"),
            TermShape::Power(e) if *e == 0 => "const".to_string(),
            TermShape::Power(e) if *e == 1 => var.to_string(),
            TermShape::Power(e) => format!("{var}^{e}"),
        }
    }
}

/// One coefficient: exact when it is a rational function of α, otherwise the
/// constant term evaluated at context precision.
#[derive(Debug, Clone)]
pub enum Coefficient {
    Exact(Rational),
    Constant(Float),
}

impl Coefficient {
    pub fn to_float(&self, p: u32) -> Float {
        match self {
            Coefficient::Exact(q) => Float::with_val(p, q),
            Coefficient::Constant(c) => Float::with_val(p, c),
        }
    }
}

/// A truncated expansion: leading terms plus J tail terms.
#[derive(Debug, Clone)]
pub struct AsymptoticSeries {
    pub kind: SeriesKind,
    pub truncation_order: usize,
    pub terms: Vec<(TermShape, Coefficient)>,
    ctx: PrecisionContext,
}

fn poly_value(poly: Poly, alpha: &Rational) -> Rational {
    let mut acc = Rational::new();
    for &(k, num, den) in poly {
        let mut term = Rational::from((num, den));
        for _ in 0..k {
            term *= alpha;
        }
        acc += term;
    }
    acc
}

impl AsymptoticSeries {
    pub fn new(kind: SeriesKind, truncation_order: usize, ctx: &PrecisionContext) -> Result<Self> {
        kind.validate()?;
        if truncation_order > kind.max_order() {
            return Err(Error::Capability(format!(
                "{kind:?} is tabulated through order {}, asked for {truncation_order}",
                kind.max_order()
            )));
        }
        let a = kind.alpha();
        let q = |x: Rational| Coefficient::Exact(x);
        let pow = |n: i64, d: u64| TermShape::Power(Rational::from((n, d)));
        let a2 = Rational::from(a.square_ref());
        let mut terms = match kind {
            SeriesKind::ROfS { .. } => vec![(pow(0, 1), q(Rational::from(1)))],
            SeriesKind::SigmaOfS { .. } => vec![
                (pow(1, 1), q(Rational::from((-1, 4)))),
                (pow(1, 2), q(Rational::from(&a / 2u32))),
                (pow(0, 1), q(-Rational::from(&a2 / 4u32))),
            ],
            SeriesKind::LogPLue { alpha } | SeriesKind::LogPJue { alpha, .. } => {
                let c = match kind {
                    SeriesKind::LogPJue { beta, .. } => constant_c2(alpha, beta, ctx)?,
                    _ => constant_c1(alpha, ctx)?,
                };
                vec![
                    (pow(1, 1), q(Rational::from((-1, 4)))),
                    (pow(1, 2), q(a.clone())),
                    (TermShape::Log, q(-Rational::from(&a2 / 4u32))),
                    (pow(0, 1), Coefficient::Constant(c)),
                ]
            }
            SeriesKind::LogPGue | SeriesKind::LogPSymJue { .. } => {
                let c = match kind {
                    SeriesKind::LogPSymJue { beta } => symjue_constant(beta, ctx)?,
                    _ => widom_dyson(ctx),
                };
                vec![
                    (pow(2, 1), q(Rational::from((-1, 2)))),
                    (TermShape::Log, q(Rational::from((-1, 4)))),
                    (pow(0, 1), Coefficient::Constant(c)),
                ]
            }
        };
        for (j, poly) in kind.tail_table().iter().enumerate().take(truncation_order) {
            terms.push((TermShape::Power(kind.tail_exponent(j + 1)), q(poly_value(poly, &a))));
        }
        Ok(Self { kind, truncation_order, terms, ctx: ctx.clone() })
    }

    /// Exact tail coefficient of x^{−j/2} (or b^{−j}), 1 ≤ j ≤ J.
    pub fn tail_coefficient(&self, j: usize) -> Option<Rational> {
        let e = self.kind.tail_exponent(j);
        self.terms.iter().find_map(|(shape, c)| match (shape, c) {
            (TermShape::Power(x), Coefficient::Exact(q)) if *x == e && j >= 1 => Some(q.clone()),
            _ => None,
        })
    }

    /// Each term's value at x, in storage order.
    pub fn term_values(&self, x: &Float) -> Result<Vec<(TermShape, Float)>> {
        let p = self.ctx.mantissa_bits();
        if !(*x > 0) {
            return Err(Error::domain("series are evaluated at x > 0"));
        }
        let x = Float::with_val(p, x);
        let lx = Float::with_val(p, x.ln_ref());
        Ok(self
            .terms
            .iter()
            .map(|(shape, c)| {
                let c = c.to_float(p);
                let v = match shape {
                    TermShape::Log => c * &lx,
                    TermShape::Power(e) => {
                        let e = Float::with_val(p, e);
                        c * Float::with_val(p, Float::with_val(p, &lx * &e).exp_ref())
                    }
                };
                (shape.clone(), v)
            })
            .collect())
    }

    pub fn eval(&self, x: &Float) -> Result<Float> {
        let p = self.ctx.mantissa_bits();
        Ok(self.term_values(x)?.into_iter().fold(Float::new(p), |acc, (_, v)| acc + v))
    }

    /// Value, first and second derivative of the truncated series.
    pub fn derivatives(&self, x: &Float) -> Result<[Float; 3]> {
        let p = self.ctx.mantissa_bits();
        let x = Float::with_val(p, x);
        let mut out = [Float::new(p), Float::new(p), Float::new(p)];
        for ((shape, v), (_, coeff)) in self.term_values(&x)?.into_iter().zip(&self.terms) {
            match &shape {
                TermShape::Log => {
                    let c = coeff.to_float(p);
                    out[1] += Float::with_val(p, &c / &x);
                    out[2] -= c / Float::with_val(p, x.square_ref());
                }
                TermShape::Power(e) => {
                    let e = Float::with_val(p, e);
                    let d1 = Float::with_val(p, &v * &e) / &x;
                    let d2 = Float::with_val(p, &d1 * Float::with_val(p, &e - 1u32)) / &x;
                    out[1] += d1;
                    out[2] += d2;
                }
            }
            out[0] += v;
        }
        Ok(out)
    }

    /// Name of the expansion variable.
    pub fn variable(&self) -> &'static str {
        match self.kind {
            SeriesKind::LogPGue | SeriesKind::LogPSymJue { .. } => "b",
            _ => "s",
        }
    }
}

/// Evaluate a truncated expansion at x.
pub fn series_eval(kind: SeriesKind, truncation_order: usize, x: &Float, ctx: &PrecisionContext) -> Result<Float> {
    AsymptoticSeries::new(kind, truncation_order, ctx)?.eval(x)
}

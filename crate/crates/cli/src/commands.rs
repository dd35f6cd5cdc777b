use gapprob::coulomb::{self, appendix_identity_check};
use gapprob::diff::{five_point, log_derivative_sigma};
use gapprob::fredholm::{log_det_converged, log_det_traced, scaled_sigma, KernelKind};
use gapprob::orthopoly::{
    doubling_check, finite_log_det_derivatives, finite_probability_by, gue_sigma_n, rn_derivatives,
    DoublingFamily, Route, WeightSpec,
};
use gapprob::painleve::{
    binet_f_difference, binet_integral, constant_c1, constant_c2, equation, pvi_parameters,
    pvi_shift, residual, symjue_constant, widom_dyson, AsymptoticSeries, Point, SeriesKind,
    TermShape,
};
use gapprob::{Error, PrecisionContext, Result};
use rayon::prelude::*;
use rug::Float;

use crate::table::{Cell, Table};

/// Expand "0.1,0.2" style lists where each item may also be `lo:hi:count`.
pub fn parse_grid(items: &[String]) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for item in items {
        let parts: Vec<&str> = item.split(':').collect();
        let num = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Argument(format!("not a number: '{s}'")))
        };
        match parts.as_slice() {
            [v] => out.push(num(v)?),
            [lo, hi, count] => {
                let (lo, hi) = (num(lo)?, num(hi)?);
                let count: usize = count
                    .trim()
                    .parse()
                    .map_err(|_| Error::Argument(format!("bad count in '{item}'")))?;
                if count < 2 {
                    return Err(Error::Argument(format!(
                        "a range needs at least 2 points: '{item}'"
                    )));
                }
                out.extend((0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64));
            }
            _ => {
                return Err(Error::Argument(format!(
                    "grid items are numbers or lo:hi:count, got '{item}'"
                )))
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum FiniteEnsemble {
    Lue,
    Jue,
    Gue,
    Symjue,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum RouteArg {
    Auto,
    Moments,
    Recurrence,
}

impl From<RouteArg> for Route {
    fn from(r: RouteArg) -> Self {
        match r {
            RouteArg::Auto => Route::Auto,
            RouteArg::Moments => Route::Moments,
            RouteArg::Recurrence => Route::Recurrence,
        }
    }
}

/// Rows (t or a, log P, P) over the grid.
pub fn finite(
    ensemble: FiniteEnsemble,
    alpha: f64,
    beta: f64,
    n: usize,
    grid: &[f64],
    route: Route,
    ctx: &PrecisionContext,
) -> Result<Table> {
    let var = match ensemble {
        FiniteEnsemble::Lue | FiniteEnsemble::Jue => "t",
        FiniteEnsemble::Gue | FiniteEnsemble::Symjue => "a",
    };
    let weight = |x: f64| match ensemble {
        FiniteEnsemble::Lue => WeightSpec::laguerre(alpha, x),
        FiniteEnsemble::Jue => WeightSpec::jacobi(alpha, beta, x),
        FiniteEnsemble::Gue => WeightSpec::hermite(x),
        FiniteEnsemble::Symjue => WeightSpec::symmetric_jacobi(beta, x),
    };
    // every weight is validated before any work starts
    let weights = grid
        .iter()
        .map(|&x| weight(x))
        .collect::<Result<Vec<_>>>()?;
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    let rows = weights
        .par_iter()
        .map(|w| finite_probability_by(w, n, route, ctx))
        .collect::<Result<Vec<_>>>()?;
    let mut t = Table::new(&[var, "log_p", "p"]);
    for (x, lp) in grid.iter().zip(rows) {
        let p = Float::with_val(ctx.mantissa_bits(), lp.exp_ref());
        t.rows
            .push(vec![Cell::Real(*x), Cell::big(lp), Cell::big(p)]);
    }
    Ok(t)
}

/// Series value with one column per term.
pub fn asympt(
    kind: SeriesKind,
    order: Option<usize>,
    grid: &[f64],
    ctx: &PrecisionContext,
) -> Result<Table> {
    let order = order.unwrap_or(kind.max_order());
    let series = AsymptoticSeries::new(kind, order, ctx)?;
    let var = series.variable();
    let labels: Vec<String> = series
        .terms
        .iter()
        .map(|(shape, _)| format!("term {}", shape.label(var)))
        .collect();
    let rows = grid
        .par_iter()
        .map(|&x| {
            let xf = ctx.float(x);
            Ok((series.term_values(&xf)?, series.eval(&xf)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut cols = vec![var.to_string(), "value".into()];
    cols.extend(labels);
    let mut t = Table {
        columns: cols,
        rows: Vec::new(),
    };
    for (x, (terms, value)) in grid.iter().zip(rows) {
        let mut row = vec![Cell::Real(*x), Cell::big(value)];
        row.extend(terms.into_iter().map(|(_, v)| Cell::big(v)));
        t.rows.push(row);
    }
    Ok(t)
}

/// A failed Fredholm run keeps the rows it produced.
pub struct TraceFailure {
    pub partial: Table,
    pub error: Error,
}

/// Convergence trace (m, value, difference) for every endpoint.
pub fn fredholm(
    kind: KernelKind,
    grid: &[f64],
    tol: f64,
    check_product: bool,
    ctx: &PrecisionContext,
) -> std::result::Result<Table, TraceFailure> {
    let var = match kind {
        KernelKind::Sine => "b",
        KernelKind::Bessel { .. } => "s",
    };
    let mut cols = vec![var, "m", "log_det", "difference", "converged"];
    if check_product {
        cols.extend(["bessel_minus_half", "bessel_plus_half", "product_residual"]);
    }
    let mut table = Table::new(&cols);
    if check_product && kind != KernelKind::Sine {
        return Err(TraceFailure {
            partial: table,
            error: Error::Argument("--check-product applies to the sine kernel".into()),
        });
    }
    let runs: Vec<_> = grid
        .par_iter()
        .map(|&x| {
            let (trace, result) = log_det_traced(kind, &ctx.float(x), tol, ctx);
            let product = match (&result, check_product) {
                (Ok(done), true) => Some(product_check(x, &done.value, tol, ctx)),
                _ => None,
            };
            (x, trace, result, product)
        })
        .collect();
    for (x, trace, result, product) in runs {
        let last = trace.len();
        for (i, step) in trace.into_iter().enumerate() {
            let converged = result.is_ok() && i + 1 == last;
            let mut row = vec![
                Cell::Real(x),
                Cell::Int(step.quad_order as i64),
                Cell::big(step.value),
                step.difference.map_or(Cell::Empty, Cell::Real),
                Cell::Bool(converged),
            ];
            if check_product {
                match (&product, converged) {
                    (Some(Ok((m, p, r))), true) => {
                        row.extend([Cell::big(m.clone()), Cell::big(p.clone()), Cell::Real(*r)])
                    }
                    _ => row.extend([Cell::Empty, Cell::Empty, Cell::Empty]),
                }
            }
            table.rows.push(row);
        }
        if let Err(error) = result {
            return Err(TraceFailure {
                partial: table,
                error,
            });
        }
        if let Some(Err(error)) = product {
            return Err(TraceFailure {
                partial: table,
                error,
            });
        }
    }
    Ok(table)
}

fn product_check(
    b: f64,
    sine: &Float,
    tol: f64,
    ctx: &PrecisionContext,
) -> Result<(Float, Float, f64)> {
    let s = ctx.float(b * b);
    let m = log_det_converged(KernelKind::Bessel { alpha: -0.5 }, &s, tol, ctx)?.value;
    let p = log_det_converged(KernelKind::Bessel { alpha: 0.5 }, &s, tol, ctx)?.value;
    let r = Float::with_val(ctx.mantissa_bits(), sine - &m) - &p;
    Ok((m, p, r.abs().to_f64()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Source {
    Finite,
    Fredholm,
    Series,
}

/// Named parameters for `residual`.
#[derive(Debug, Clone, Default)]
pub struct ResidualParams {
    pub n: Option<usize>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub t: Option<f64>,
    pub a: Option<f64>,
    pub s: Option<f64>,
    pub tau: Option<f64>,
    pub order: Option<usize>,
}

fn need<T: Copy>(v: Option<T>, flag: &str, eq: &str) -> Result<T> {
    v.ok_or_else(|| Error::Argument(format!("--{flag} is required for {eq}")))
}

fn sigma_point(sigma: (Float, Float, Float)) -> Point {
    Point::new()
        .with("sigma", sigma.0)
        .with("sigma1", sigma.1)
        .with("sigma2", sigma.2)
}

/// Assemble the inputs of `eq` from `source` and evaluate its residual.
pub fn residual_point(
    eq: &str,
    source: Source,
    prm: &ResidualParams,
    ctx: &PrecisionContext,
) -> Result<Point> {
    let id = equation(eq)?.id();
    let p = ctx.mantissa_bits();
    let f = |v: f64| ctx.float(v);
    let unsupported =
        || Error::Capability(format!("{id} has no inputs from the {} source", format!("{source:?}").to_lowercase()));
    match (id, source) {
        ("pv_sigma", Source::Finite) => {
            let (n, alpha, t) = (
                need(prm.n, "n", id)?,
                prm.alpha.unwrap_or(0.0),
                need(prm.t, "t", id)?,
            );
            let d =
                finite_log_det_derivatives(&WeightSpec::laguerre(alpha, t)?, n, Route::Auto, ctx)?;
            let (h, h1, h2) = log_derivative_sigma(&d, &f(t));
            Ok(Point::new()
                .with("h", h)
                .with("h1", h1)
                .with("h2", h2)
                .with("t", f(t))
                .with("n", f(n as f64))
                .with("alpha", f(alpha)))
        }
        ("rn_ode", Source::Finite) => {
            let (n, alpha, t) = (
                need(prm.n, "n", id)?,
                prm.alpha.unwrap_or(0.0),
                need(prm.t, "t", id)?,
            );
            let [r, r1, r2, _] = rn_derivatives(&WeightSpec::laguerre(alpha, t)?, n, ctx)?;
            Ok(Point::new()
                .with("r", r)
                .with("r1", r1)
                .with("r2", r2)
                .with("t", f(t))
                .with("n", f(n as f64))
                .with("alpha", f(alpha)))
        }
        ("pvi_sigma", Source::Finite) => {
            let n = need(prm.n, "n", id)?;
            let (alpha, beta, t) = (
                prm.alpha.unwrap_or(0.0),
                prm.beta.unwrap_or(1.0),
                need(prm.t, "t", id)?,
            );
            let [_, d1, d2, d3] = finite_log_det_derivatives(
                &WeightSpec::jacobi(alpha, beta, t)?,
                n,
                Route::Auto,
                ctx,
            )?;
            let (k1, k2) = pvi_shift(n, alpha, beta);
            let tf = f(t);
            let tt = Float::with_val(p, &tf * Float::with_val(p, &tf - 1u32));
            let lin = Float::with_val(p, &tf * 2u32) - 1u32;
            let sigma = Float::with_val(p, &tt * &d1) + Float::with_val(p, &tf * k1) + k2;
            let sigma1 = Float::with_val(p, &lin * &d1) + Float::with_val(p, &tt * &d2) + k1;
            let sigma2 = Float::with_val(p, &d1 * 2u32)
                + Float::with_val(p, &lin * &d2) * 2u32
                + Float::with_val(p, &tt * &d3);
            let nu = pvi_parameters(n, alpha, beta);
            Ok(sigma_point((sigma, sigma1, sigma2))
                .with("t", tf)
                .with("nu1", f(nu[0]))
                .with("nu2", f(nu[1]))
                .with("nu3", f(nu[2]))
                .with("nu4", f(nu[3])))
        }
        ("gue_ode", Source::Finite) => {
            let (n, a) = (need(prm.n, "n", id)?, need(prm.a, "a", id)?);
            Ok(sigma_point(gue_sigma_n(&f(a), n, ctx)?)
                .with("a", f(a))
                .with("n", f(n as f64)))
        }
        ("gue_difference", Source::Finite) => {
            let (n, a) = (need(prm.n, "n", id)?, need(prm.a, "a", id)?);
            if n == 0 {
                return Err(Error::Domain("gue_difference needs n ≥ 1".into()));
            }
            let sig = |k: usize| -> Result<Float> {
                if k == 0 {
                    Ok(ctx.zero())
                } else {
                    Ok(gue_sigma_n(&f(a), k, ctx)?.0)
                }
            };
            Ok(Point::new()
                .with("sigma_prev", sig(n - 1)?)
                .with("sigma", sig(n)?)
                .with("sigma_next", sig(n + 1)?)
                .with("a", f(a))
                .with("n", f(n as f64)))
        }
        ("piii_sigma", Source::Finite) => {
            // hard-edge scaling of the Laguerre ensemble, t = s/(4n)
            let (n, alpha, s) = (
                need(prm.n, "n", id)?,
                prm.alpha.unwrap_or(0.0),
                need(prm.s, "s", id)?,
            );
            let scale = 4.0 * n as f64;
            let t = s / scale;
            let d =
                finite_log_det_derivatives(&WeightSpec::laguerre(alpha, t)?, n, Route::Auto, ctx)?;
            let (g, gt, gtt) = log_derivative_sigma(&d, &f(t));
            Ok(sigma_point((g, gt / scale, gtt / (scale * scale)))
                .with("s", f(s))
                .with("alpha", f(alpha)))
        }
        ("piii_sigma", Source::Fredholm) => {
            let (alpha, s) = (prm.alpha.unwrap_or(0.0), need(prm.s, "s", id)?);
            let sg = scaled_sigma(KernelKind::Bessel { alpha }, &f(s), ctx)?;
            Ok(sigma_point(sg).with("s", f(s)).with("alpha", f(alpha)))
        }
        ("jmms", Source::Fredholm) => {
            let tau = need(prm.tau, "tau", id)?;
            let sg = if tau == 0.0 {
                small_tau_sigma(ctx)
            } else {
                scaled_sigma(KernelKind::Sine, &f(tau / 2.0), ctx)?
            };
            Ok(sigma_point(sg).with("tau", f(tau)))
        }
        ("piii_sigma", Source::Series) | ("r_ode", Source::Series) => {
            let (alpha, s) = (prm.alpha.unwrap_or(0.0), need(prm.s, "s", id)?);
            let kind = if id == "piii_sigma" {
                SeriesKind::SigmaOfS { alpha }
            } else {
                SeriesKind::ROfS { alpha }
            };
            let series = AsymptoticSeries::new(kind, prm.order.unwrap_or(kind.max_order()), ctx)?;
            let [v, v1, v2] = series.derivatives(&f(s))?;
            let pt = if id == "piii_sigma" {
                sigma_point((v, v1, v2))
            } else {
                Point::new().with("r", v).with("r1", v1).with("r2", v2)
            };
            Ok(pt.with("s", f(s)).with("alpha", f(alpha)))
        }
        ("jmms", Source::Series) => {
            let tau = need(prm.tau, "tau", id)?;
            if tau == 0.0 {
                return Ok(sigma_point(small_tau_sigma(ctx)).with("tau", f(0.0)));
            }
            // σ(τ) = b d/db log P with b = τ/2, from the large-gap expansion
            let series = AsymptoticSeries::new(
                SeriesKind::LogPGue,
                prm.order.unwrap_or(SeriesKind::LogPGue.max_order()),
                ctx,
            )?;
            let b = f(tau / 2.0);
            let d = five_point(|x| series.eval(x), &b, ctx)?;
            let (g, g1, g2) = log_derivative_sigma(&d, &b);
            Ok(sigma_point((g, g1 / 2u32, g2 / 4u32)).with("tau", f(tau)))
        }
        _ => Err(unsupported()),
    }
}

/// σ, σ′, σ″ of the sine-kernel determinant at τ = 0: σ = −τ/π − τ²/π² + O(τ³).
fn small_tau_sigma(ctx: &PrecisionContext) -> (Float, Float, Float) {
    let p = ctx.mantissa_bits();
    let pi = ctx.pi();
    let s1 = -Float::with_val(p, pi.recip_ref());
    let s2 = -(Float::with_val(p, pi.square_ref()).recip() * 2u32);
    (ctx.zero(), s1, s2)
}

pub fn residual_table(
    eq: &str,
    source: Source,
    prm: &ResidualParams,
    ctx: &PrecisionContext,
) -> Result<Table> {
    let pt = residual_point(eq, source, prm, ctx)?;
    let r = residual(eq, &pt)?;
    let inputs = r
        .inputs
        .iter()
        .map(|(k, v)| format!("{k}={}", crate::table::format_real(*v)))
        .collect::<Vec<_>>()
        .join(";");
    let mut t = Table::new(&[
        "equation", "source", "inputs", "residual", "scale", "relative",
    ]);
    t.rows.push(vec![
        Cell::Text(r.equation_id),
        Cell::Text(format!("{source:?}").to_lowercase()),
        Cell::Text(inputs),
        Cell::Real(r.residual),
        Cell::Real(r.scale),
        Cell::Real(r.relative),
    ]);
    Ok(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Identities,
    Constants,
    Doubling,
    All,
}

struct Item {
    suite: &'static str,
    name: String,
    value: f64,
    tolerance: f64,
}

impl Item {
    fn new(suite: &'static str, name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            suite,
            name: name.into(),
            value,
            tolerance,
        }
    }
}

fn identities(bits: u32) -> Result<Vec<Item>> {
    let c = PrecisionContext::new(bits.max(64))?;
    let mut out = Vec::new();
    for (a, b) in [(0.1, 0.5), (0.2, 0.9)] {
        for id in 1..=coulomb::IDENTITY_COUNT {
            if coulomb::identity_needs_b_below_one(id) && b >= 1.0 {
                continue;
            }
            let r = appendix_identity_check(id, a, b, &c)?;
            out.push(Item::new(
                "identities",
                format!("integral {id} on ({a}, {b})"),
                r.residual,
                1e-9,
            ));
        }
    }
    Ok(out)
}

fn constants(bits: u32) -> Result<Vec<Item>> {
    let c = PrecisionContext::new(bits.max(192))?;
    let p = c.mantissa_bits();
    let gap = |a: &Float, b: &Float| Float::with_val(p, a - b).abs().to_f64();
    let wd = widom_dyson(&c);
    let barnes = constant_c1(-0.5, &c)? + constant_c1(0.5, &c)?;
    // third route: the sine-kernel determinant at b = 8 with the printed tail removed
    let b = 8.0;
    let bf = c.float(b);
    let ld = log_det_converged(KernelKind::Sine, &bf, 1e-12, &c)?.value;
    let tail = AsymptoticSeries::new(SeriesKind::LogPGue, 6, &c)?
        .term_values(&bf)?
        .into_iter()
        .filter(|(shape, _)| matches!(shape, TermShape::Power(e) if *e < 0))
        .fold(Float::new(p), |acc, (_, v)| acc + v);
    let fitted = Float::with_val(p, &ld + b * b / 2.0) + b.ln() / 4.0 - tail;
    let mut out = vec![
        Item::new(
            "constants",
            "widom_dyson: log 2/12 + 3ζ′(−1) vs c1(−½) + c1(½)",
            gap(&wd, &barnes),
            1e-30,
        ),
        Item::new(
            "constants",
            "widom_dyson: log 2/12 + 3ζ′(−1) vs sine-kernel fit at b = 8",
            gap(&wd, &fitted),
            1e-4,
        ),
    ];
    for beta in [0.5, 1.0, 2.0] {
        let s = symjue_constant(beta, &c)?;
        let sum = constant_c2(-0.5, beta, &c)? + constant_c2(0.5, beta, &c)?;
        out.push(Item::new(
            "constants",
            format!("symmetric Jacobi constant = c2(−½, β) + c2(½, β), β = {beta}"),
            gap(&s, &sum),
            1e-30,
        ));
        let (quad, closed) = (binet_integral(beta, &c)?, binet_f_difference(beta, &c)?);
        out.push(Item::new(
            "constants",
            format!("Binet integral by quadrature vs log-gamma form, β = {beta}"),
            gap(&quad, &closed),
            1e-25,
        ));
    }
    Ok(out)
}

fn doubling(bits: u32) -> Result<Vec<Item>> {
    let c = PrecisionContext::new(bits.max(256))?;
    let mut jobs = Vec::new();
    for a in [0.3, 0.6] {
        for n in 2..=10 {
            jobs.push(("gue", DoublingFamily::Gue, a, n));
            jobs.push(("symjue β=1", DoublingFamily::SymJacobi { beta: 1.0 }, a, n));
        }
    }
    jobs.par_iter()
        .map(|&(label, fam, a, n)| {
            let r = doubling_check(fam, &c.float(a), n, &c)?;
            Ok(Item::new(
                "doubling",
                format!("{label} a = {a} n = {n}"),
                r.residual,
                1e-8,
            ))
        })
        .collect()
}

/// Run the suite; the flag says whether every item passed.
pub fn verify(suite: Suite, bits: u32) -> Result<(Table, bool)> {
    let mut items = Vec::new();
    if matches!(suite, Suite::Identities | Suite::All) {
        items.extend(identities(bits)?);
    }
    if matches!(suite, Suite::Constants | Suite::All) {
        items.extend(constants(bits)?);
    }
    if matches!(suite, Suite::Doubling | Suite::All) {
        items.extend(doubling(bits)?);
    }
    let mut t = Table::new(&["suite", "item", "value", "tolerance", "status"]);
    let mut all = true;
    for it in items {
        let ok = it.value <= it.tolerance;
        all &= ok;
        t.rows.push(vec![
            Cell::Text(it.suite.into()),
            Cell::Text(it.name),
            Cell::Real(it.value),
            Cell::Real(it.tolerance),
            Cell::Text(if ok { "PASS" } else { "FAIL" }.into()),
        ]);
    }
    Ok((t, all))
}

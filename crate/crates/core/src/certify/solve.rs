use serde::Serialize;

use crate::calculus::{strict_derivative, DiffConfig};
use crate::error::{Error, Result};
use crate::func::{eval, FuncExpr};
use crate::padic::{Padic, Valuation};

/// One iterate of the contraction `g(x) = x − (f(x) − c)/Df(a)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolveStep {
    pub iterate: Padic,
    /// `v(f(x_i) − c)`, capped at the working precision.
    pub residual_valuation: i64,
    /// `v(x_(i+1) − x_i)`; absent for the final iterate.
    pub step_valuation: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolveReport {
    pub start: Padic,
    pub target: Padic,
    pub derivative: Padic,
    /// `e` with `|Df(a)| = p^(−e)`.
    pub e: i64,
    /// The iterates stay in `B(a, radius)`.
    pub radius: i64,
    pub tol_exponent: i64,
    pub z: Padic,
    /// `v(f(z) − c)` re-evaluated independently of the iteration.
    pub residual_valuation: i64,
    /// The root is determined modulo `p^root_precision`.
    pub root_precision: i64,
    pub iterations: usize,
    pub log: Vec<SolveStep>,
}

fn capped_val(x: &Padic, cap: i64) -> i64 {
    match x.valuation() {
        Valuation::Finite(v) => v.min(cap),
        Valuation::Infinity => x.abs_precision().unwrap_or(cap).min(cap),
    }
}

/// Points of `B(a, r)` on which the contraction estimate is spot-checked.
const SPOT_POINTS: u64 = 16;

/// Checks `v(f(x) − f(y) − Df·(x − y)) > e + v(x − y)` on a grid of
/// `B(a, r)`, i.e. `|g(x) − g(y)| < |x − y|`.
fn check_contraction(f: &FuncExpr, a: &Padic, df: &Padic, e: i64, r: i64, w: i64) -> Result<()> {
    let p = a.prime();
    let n = (p as u64).pow(2).min(SPOT_POINTS);
    let step = Padic::from_integer(1, p, w)?.shift(r);
    let mut pts = Vec::with_capacity(n as usize);
    for t in 0..n {
        let x = a
            .add(&step.mul(&Padic::from_integer(t, p, w)?)?)?
            .representative(w);
        let fx = eval(f, &x, w)?;
        pts.push((x, fx));
    }
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let dx = pts[i].0.sub(&pts[j].0)?;
            let vx = dx.valuation().finite().expect("distinct grid points");
            let dev = pts[i].1.sub(&pts[j].1)?.sub(&df.mul(&dx)?)?;
            if capped_val(&dev, e + vx + 1) <= e + vx {
                return Err(Error::NotAContraction(format!(
                    "|g(x) − g(y)| ≥ |x − y| at x = {}, y = {}",
                    pts[i].0.to_compact_string(),
                    pts[j].0.to_compact_string()
                )));
            }
        }
    }
    Ok(())
}

/// Solves `f(z) = c` near `a` by iterating `g(x) = x − (f(x) − c)/Df_a`.
///
/// The working ball is `B(a, r)` with `r = v(c − f(a)) − e`, so that `c` lies
/// in `B(f(a), e + r)`. The contraction estimate is spot-checked on that ball
/// first; during the iteration every iterate must stay in the ball and the
/// step valuations must strictly increase.
pub fn local_solve(
    f: &FuncExpr,
    a: &Padic,
    df_a: &Padic,
    c: &Padic,
    tol_exponent: i64,
    max_iter: usize,
) -> Result<SolveReport> {
    let e = df_a.valuation().finite().ok_or(Error::ZeroDerivative)?;
    let va = a.valuation().finite().unwrap_or(0);
    let w = tol_exponent.abs() + 2 * e.abs() + 2 * va.abs() + 16;
    let cap = w;
    let a = a.representative(w);
    let df = df_a.representative(w);
    let fa = eval(f, &a, w)?;
    let d0 = capped_val(&fa.sub(c)?, cap);
    let radius = d0 - e;
    if d0 < tol_exponent {
        check_contraction(f, &a, &df, e, radius, w)?;
    }
    let mut x = a.clone();
    let mut fx = fa;
    let mut log = Vec::new();
    let mut last_step: Option<i64> = None;
    loop {
        let res = fx.sub(c)?;
        let rv = capped_val(&res, cap);
        if rv >= tol_exponent {
            log.push(SolveStep {
                iterate: x.clone(),
                residual_valuation: rv,
                step_valuation: None,
            });
            break;
        }
        if res.is_zero() {
            return Err(Error::InsufficientPrecision(format!(
                "residual known only mod p^{rv}, tolerance p^{tol_exponent}"
            )));
        }
        if log.len() >= max_iter {
            return Err(Error::MaxIterExceeded(max_iter));
        }
        let next = x.sub(&res.div(&df)?)?.representative(w);
        let sv = capped_val(&next.sub(&x)?, cap);
        if last_step.is_some_and(|prev| sv <= prev) {
            return Err(Error::NotAContraction(format!(
                "step valuation {sv} did not increase past {}",
                last_step.unwrap()
            )));
        }
        if capped_val(&next.sub(&a)?, cap) < radius {
            return Err(Error::NotAContraction(format!(
                "iterate {} left B(a, {radius})",
                next.to_compact_string()
            )));
        }
        log.push(SolveStep {
            iterate: x.clone(),
            residual_valuation: rv,
            step_valuation: Some(sv),
        });
        last_step = Some(sv);
        fx = eval(f, &next, w)?;
        x = next;
    }
    let check = capped_val(&eval(f, &x, w)?.sub(c)?, cap);
    if check < tol_exponent {
        return Err(Error::NotAContraction(format!(
            "re-evaluated residual has valuation {check} < {tol_exponent}"
        )));
    }
    Ok(SolveReport {
        start: a,
        target: c.clone(),
        derivative: df_a.clone(),
        e,
        radius,
        tol_exponent,
        root_precision: tol_exponent - e,
        iterations: log.len() - 1,
        residual_valuation: check,
        z: x,
        log,
    })
}

/// [`local_solve`] with `Df(a)` taken from the strict-derivative estimate.
pub fn local_solve_estimated(
    f: &FuncExpr,
    a: &Padic,
    c: &Padic,
    tol_exponent: i64,
    max_iter: usize,
    cfg: &DiffConfig,
) -> Result<SolveReport> {
    let est = strict_derivative(f, a, cfg)?;
    match est.verdict.converged_value() {
        Some(v) if !v.is_zero() => local_solve(f, a, v, c, tol_exponent, max_iter),
        Some(_) => Err(Error::ZeroDerivative),
        None => Err(Error::InsufficientPrecision(format!(
            "no converged derivative at {} ({})",
            a.to_compact_string(),
            est.verdict.name()
        ))),
    }
}

use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use super::solve::local_solve;
use super::CertifyOptions;
use crate::calculus::{strict_derivative, DiffConfig, DiffEstimate};
use crate::error::{Error, Result};
use crate::func::{eval, FuncExpr};
use crate::padic::{Ball, DigitTable, Padic};

/// Strict-derivative reading at one point of the ball.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PointDerivative {
    pub point: Padic,
    pub verdict: String,
    pub value: Option<Padic>,
    /// `v(Df)`; absent when the estimate did not converge or converged to 0.
    pub valuation: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckA {
    pub pass: bool,
    pub bijective_onto_ball: bool,
    pub injective: bool,
    pub input_count: usize,
    pub image_count: usize,
    pub image_ball: Option<Ball>,
    pub solve_witnesses: usize,
    pub solve_failures: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckB {
    pub pass: bool,
    pub center: DiffEstimate,
    pub spots: Vec<PointDerivative>,
    /// Which point supplied `e`: the center, or a spot point when the center
    /// estimate is zero or did not converge.
    pub e_source: Option<Padic>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckC {
    pub pass: bool,
    pub constant_norm: bool,
    pub valuations: Vec<Option<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairWitness {
    pub x: Padic,
    pub y: Padic,
    /// `v(x − y)`.
    pub input_valuation: i64,
    /// `v(f(x) − f(y))`, capped at `e + k`.
    pub image_valuation: i64,
    /// `e + v(x − y)`.
    pub expected: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckD {
    pub pass: bool,
    pub isometry_scaled: bool,
    pub pairs_checked: u64,
    pub violations: u64,
    /// The violating pair farthest from the expected valuation.
    pub counterexample: Option<PairWitness>,
}

/// Exhaustive finite-precision certificate for the Jacobian property of `f`
/// on a ball: (a) bijection onto a ball, (b) strict differentiability,
/// (c) constant `|Df|`, (d) `v(f(x) − f(y)) = e + v(x − y)` for all pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JacobianCertificate {
    pub ball: Ball,
    pub k: i64,
    /// `|Df| = p^(−e)`.
    pub e: Option<i64>,
    pub abs_df: Option<String>,
    pub pass: bool,
    pub exhaustive: bool,
    pub check_a: CheckA,
    pub check_b: CheckB,
    pub check_c: CheckC,
    pub check_d: CheckD,
}

/// The scale window of `cfg` moved inside a ball of radius `r`.
pub(crate) fn config_for_ball(cfg: &DiffConfig, r: i64) -> DiffConfig {
    let j0 = cfg.j0.max(r);
    DiffConfig {
        j0,
        jmax: j0 + (cfg.jmax - cfg.j0),
        ..cfg.clone()
    }
}

/// Spot points `c + t·p^r` (`t = 1..min(p − 1, 3)`) and `c + p^(r+1)`.
pub(crate) fn spot_points(ball: &Ball, rel: i64) -> Result<Vec<Padic>> {
    let p = ball.prime();
    let c = ball.center_point(rel);
    let mut out = Vec::new();
    for t in 1..=(p as i64 - 1).min(3) {
        out.push(c.add(&Padic::from_integer(t, p, rel)?.shift(ball.radius()))?);
    }
    out.push(c.add(&Padic::from_integer(1, p, rel)?.shift(ball.radius() + 1))?);
    Ok(out)
}

pub(crate) fn point_derivative(est: &DiffEstimate) -> PointDerivative {
    let value = est.verdict.converged_value().cloned();
    PointDerivative {
        point: est.point.clone(),
        verdict: est.verdict.name().to_string(),
        valuation: value.as_ref().and_then(|v| v.valuation().finite()),
        value,
    }
}

/// Errors that disqualify a single point rather than the whole run.
pub(crate) fn is_pointwise_failure(e: &Error) -> bool {
    e.is_domain_error()
        || matches!(
            e,
            Error::GuardUndecidableAtPrecision(_)
                | Error::InsufficientPrecision(_)
                | Error::PrecisionExhausted(_)
                | Error::HenselConditionFailed(_)
        )
}

/// Derivative readings at the center and spot points; errors at a point
/// become an `Undetermined` reading.
pub(crate) struct Readings {
    pub center: DiffEstimate,
    pub all: Vec<PointDerivative>,
}

pub(crate) fn derivative_readings(f: &FuncExpr, ball: &Ball, cfg: &DiffConfig) -> Result<Readings> {
    let cfg = config_for_ball(cfg, ball.radius());
    let rel = ball.radius().abs() + 8;
    let mut points = vec![ball.center_point(rel)];
    points.extend(spot_points(ball, rel)?);
    let ests: Vec<Result<DiffEstimate>> = points
        .par_iter()
        .map(|a| strict_derivative(f, a, &cfg))
        .collect();
    let mut all = Vec::with_capacity(points.len());
    let mut center = None;
    for (a, est) in points.iter().zip(ests) {
        let reading = match est {
            Ok(est) => {
                let r = point_derivative(&est);
                if center.is_none() {
                    center = Some(est);
                }
                r
            }
            Err(e) if is_pointwise_failure(&e) => PointDerivative {
                point: a.clone(),
                verdict: format!("Undetermined: {e}"),
                value: None,
                valuation: None,
            },
            Err(e) => return Err(e),
        };
        all.push(reading);
    }
    let center = center.ok_or_else(|| {
        Error::OutOfDomain(format!(
            "no derivative estimate on {ball}: {}",
            all[0].verdict
        ))
    })?;
    Ok(Readings { center, all })
}

/// Evaluates `f` on every residue of `ball` mod `p^k`, at exact representatives.
pub(crate) fn residue_values(
    f: &FuncExpr,
    ball: &Ball,
    k: i64,
    budget: u64,
    rel: i64,
) -> Result<(Vec<Padic>, Vec<Padic>)> {
    let inputs = ball.enumerate(k, budget)?;
    let values = inputs
        .par_iter()
        .map(|x| eval(f, &x.representative(rel), rel))
        .collect::<Result<Vec<_>>>()?;
    Ok((inputs, values))
}

fn check_pairs(
    inputs: &DigitTable,
    values: &DigitTable,
    e: Option<i64>,
) -> (u64, Option<(usize, usize, i64, i64)>) {
    let n = inputs.len();
    let hi = values.hi();
    // per row: (violations, best |excess|, j, vx, vf)
    let rows: Vec<(u64, Option<(i64, usize, i64, i64)>)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut count = 0u64;
            let mut best: Option<(i64, usize, i64, i64)> = None;
            for j in i + 1..n {
                let vx = inputs.val_diff(i, j);
                let vf = values.val_diff(i, j);
                let excess = match e {
                    Some(e) => (vf - (e + vx)).abs(),
                    // a vanishing derivative predicts equal values
                    None => hi - vf,
                };
                if excess != 0 {
                    count += 1;
                    if best.is_none_or(|b| excess > b.0) {
                        best = Some((excess, j, vx, vf));
                    }
                }
            }
            (count, best)
        })
        .collect();
    let mut total = 0;
    let mut witness: Option<(i64, usize, usize, i64, i64)> = None;
    for (i, (c, best)) in rows.into_iter().enumerate() {
        total += c;
        if let Some((ex, j, vx, vf)) = best {
            if witness.is_none_or(|w| ex > w.0) {
                witness = Some((ex, i, j, vx, vf));
            }
        }
    }
    (total, witness.map(|(_, i, j, vx, vf)| (i, j, vx, vf)))
}

fn norm_string(p: u32, e: i64) -> String {
    format!("{p}^{}", -e)
}

/// Surjectivity witnesses: solves `f(z) = c` from `anchor` for one target per
/// residue class of the image ball mod `p^(e + r + min(k − r, 2))`.
pub(crate) fn surjectivity_witnesses(
    f: &FuncExpr,
    ball: &Ball,
    k: i64,
    e: i64,
    anchor: &Padic,
    df: &Padic,
    image: &Ball,
) -> Vec<Result<()>> {
    let depth = (k - ball.radius()).min(2);
    let targets = match image.enumerate(image.radius() + depth, 1 << 16) {
        Ok(t) => t,
        Err(err) => return vec![Err(err)],
    };
    let rel = (e + k).abs() + 8;
    targets
        .par_iter()
        .map(|c| {
            let c = c.representative(rel);
            let r = local_solve(f, anchor, df, &c, e + k, 64)?;
            if !ball.contains(&r.z)? {
                return Err(Error::NotAContraction(format!(
                    "solution {} for target {} lies outside {ball}",
                    r.z.to_compact_string(),
                    c.to_compact_string()
                )));
            }
            Ok(())
        })
        .collect()
}

/// Certifies the Jacobian property of `f` on `ball` by exhaustive enumeration
/// of residues mod `p^k`. Failures are reported inside the certificate.
pub fn certify_jacobian(f: &FuncExpr, ball: &Ball, k: i64) -> Result<JacobianCertificate> {
    certify_jacobian_with(f, ball, k, &CertifyOptions::default())
}

pub fn certify_jacobian_with(
    f: &FuncExpr,
    ball: &Ball,
    k: i64,
    opts: &CertifyOptions,
) -> Result<JacobianCertificate> {
    let p = ball.prime();
    if k <= ball.radius() {
        return Err(Error::InvalidArgument(format!(
            "precision {k} must exceed the ball radius {}",
            ball.radius()
        )));
    }
    let count = ball.residue_count(k);
    if count.is_none_or(|c| c > opts.budget as u128) {
        return Err(Error::BudgetExceeded {
            needed: format!("{p}^{}", k - ball.radius()),
            cap: opts.budget,
        });
    }

    // (b) and (c)
    let readings = derivative_readings(f, ball, &opts.diff)?;
    let valuations: Vec<Option<i64>> = readings.all.iter().map(|r| r.valuation).collect();
    let source = readings.all.iter().position(|r| r.valuation.is_some());
    let e = source.and_then(|i| readings.all[i].valuation);
    let check_b = CheckB {
        pass: readings.all.iter().all(|r| r.value.is_some()),
        center: readings.center.clone(),
        spots: readings.all[1..].to_vec(),
        e_source: source.map(|i| readings.all[i].point.clone()),
    };
    let constant_norm = e.is_some() && valuations.iter().all(|v| *v == e);
    let check_c = CheckC {
        pass: constant_norm,
        constant_norm,
        valuations,
    };

    // (d)
    let rel = k.abs() + e.unwrap_or(0).abs() + ball.radius().abs() + 16;
    let (inputs, values) = residue_values(f, ball, k, opts.budget, rel)?;
    let in_table = DigitTable::build(&inputs, Some(k))?;
    let cap = e.map(|e| e + k);
    let val_table = DigitTable::build(&values, cap)?;
    if let Some(c) = cap {
        if val_table.hi() < c {
            return Err(Error::InsufficientPrecision(format!(
                "values known only mod p^{}, p^{c} needed",
                val_table.hi()
            )));
        }
    }
    let n = inputs.len() as u64;
    let (violations, witness) = check_pairs(&in_table, &val_table, e);
    let isometry_scaled = e.is_some() && violations == 0;
    let check_d = CheckD {
        pass: isometry_scaled,
        isometry_scaled,
        pairs_checked: n * n.saturating_sub(1) / 2,
        violations,
        counterexample: witness.map(|(i, j, vx, vf)| PairWitness {
            x: inputs[i].clone(),
            y: inputs[j].clone(),
            input_valuation: vx,
            image_valuation: vf,
            expected: e.map(|e| e + vx),
        }),
    };

    // (a)
    let distinct: HashSet<&[u8]> = (0..values.len()).map(|i| val_table.row(i)).collect();
    let image_count = distinct.len();
    let injective = image_count == inputs.len();
    let (mut bijective, mut image_ball) = (false, None);
    let mut solve_witnesses = 0;
    let mut solve_failures = Vec::new();
    if let Some(e) = e {
        let r = ball.radius();
        // inputs[0] is the center residue
        let in_ball = (1..values.len()).all(|i| val_table.val_diff(0, i) >= e + r);
        if in_ball {
            image_ball = Some(Ball::new(&values[0], e + r)?);
        }
        bijective = in_ball && injective;
        if bijective {
            let i = source.expect("e has a source");
            let anchor = &readings.all[i].point;
            let df = readings.all[i].value.as_ref().expect("converged");
            let image = image_ball.as_ref().expect("set above");
            for res in surjectivity_witnesses(f, ball, k, e, anchor, df, image) {
                solve_witnesses += 1;
                if let Err(err) = res {
                    solve_failures.push(err.to_string());
                }
            }
        }
    }
    let check_a = CheckA {
        pass: bijective && solve_failures.is_empty(),
        bijective_onto_ball: bijective,
        injective,
        input_count: inputs.len(),
        image_count,
        image_ball,
        solve_witnesses,
        solve_failures,
    };

    Ok(JacobianCertificate {
        ball: ball.clone(),
        k,
        e,
        abs_df: e.map(|e| norm_string(p, e)),
        pass: check_a.pass && check_b.pass && check_c.pass && check_d.pass,
        exhaustive: true,
        check_a,
        check_b,
        check_c,
        check_d,
    })
}

/// The image `f(B)` as a ball `B(f(c), e + r)`, after checks (b)–(d) and the
/// surjectivity witnesses.
pub fn local_image_ball(f: &FuncExpr, ball: &Ball, k: i64) -> Result<Ball> {
    local_image_ball_with(f, ball, k, &CertifyOptions::default())
}

pub fn local_image_ball_with(
    f: &FuncExpr,
    ball: &Ball,
    k: i64,
    opts: &CertifyOptions,
) -> Result<Ball> {
    let cert = certify_jacobian_with(f, ball, k, opts)?;
    if !(cert.check_b.pass && cert.check_c.pass && cert.check_d.pass) {
        return Err(Error::NotAContraction(format!(
            "checks (b)-(d) fail on {ball} at precision {k}"
        )));
    }
    let e = cert.e.expect("check (c) passed");
    let image = cert
        .check_a
        .image_ball
        .clone()
        .ok_or_else(|| Error::NotAContraction(format!("image of {ball} is not a ball")))?;
    let i = cert.check_b.e_source.as_ref().expect("check (c) passed");
    let df = std::iter::once(point_derivative(&cert.check_b.center))
        .chain(cert.check_b.spots.iter().cloned())
        .find(|r| &r.point == i)
        .and_then(|r| r.value)
        .expect("source converged");
    for res in surjectivity_witnesses(f, ball, k, e, i, &df, &image) {
        res?;
    }
    Ok(image)
}

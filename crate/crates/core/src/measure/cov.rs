use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use super::haar::{ball_measure, MeasureValue};
use crate::certify::{depth_cap, test_ball, BallTest, CertifyOptions, CERTIFICATION_MARGIN};
use crate::error::{Error, Result};
use crate::func::{image_map, FuncExpr};
use crate::padic::{Ball, Padic};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecomposedBall {
    pub ball: Ball,
    /// `|Df| = p^(−e)` on the ball.
    pub e: i64,
}

/// Disjoint balls covering a domain at scale `k`, sorted by kind.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BallDecomposition {
    pub domain: Ball,
    pub k: i64,
    /// Constant `|Df|` and the scaled-isometry check hold.
    pub certified: Vec<DecomposedBall>,
    /// `f` is constant, or every derivative reading converged to 0.
    pub flat: Vec<Ball>,
    /// Neither, at the finest radius.
    pub uncovered: Vec<Ball>,
}

enum Piece {
    Certified(DecomposedBall),
    Flat(Ball),
    Uncovered(Ball),
}

fn decompose_rec(
    f: &FuncExpr,
    ball: &Ball,
    k: i64,
    cap: i64,
    opts: &CertifyOptions,
) -> Result<Vec<Piece>> {
    match test_ball(f, ball, k + CERTIFICATION_MARGIN, opts, false)? {
        BallTest::Certified(e) => Ok(vec![Piece::Certified(DecomposedBall {
            ball: ball.clone(),
            e,
        })]),
        BallTest::Constant | BallTest::Failed(_, true) => Ok(vec![Piece::Flat(ball.clone())]),
        BallTest::Failed(_, false) if ball.radius() < cap => {
            let parts: Vec<Vec<Piece>> = ball
                .children()
                .par_iter()
                .map(|b| decompose_rec(f, b, k, cap, opts))
                .collect::<Result<_>>()?;
            Ok(parts.into_iter().flatten().collect())
        }
        BallTest::Failed(_, false) => Ok(vec![Piece::Uncovered(ball.clone())]),
    }
}

/// Covers `domain` by disjoint balls on which `|Df|` is constant and the
/// scaled-isometry check holds, refining down to radius `min(r + 6, k − 1)`.
/// Each ball is checked on its residues mod `p^(k + 2)`.
pub fn decompose_by_df(f: &FuncExpr, domain: &Ball, k: i64) -> Result<BallDecomposition> {
    decompose_by_df_with(f, domain, k, &CertifyOptions::default())
}

pub fn decompose_by_df_with(
    f: &FuncExpr,
    domain: &Ball,
    k: i64,
    opts: &CertifyOptions,
) -> Result<BallDecomposition> {
    if k <= domain.radius() {
        return Err(Error::InvalidArgument(format!(
            "scale {k} must exceed the domain radius {}",
            domain.radius()
        )));
    }
    let mut out = BallDecomposition {
        domain: domain.clone(),
        k,
        certified: Vec::new(),
        flat: Vec::new(),
        uncovered: Vec::new(),
    };
    for piece in decompose_rec(f, domain, k, depth_cap(domain.radius(), k), opts)? {
        match piece {
            Piece::Certified(b) => out.certified.push(b),
            Piece::Flat(b) => out.flat.push(b),
            Piece::Uncovered(b) => out.uncovered.push(b),
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Integral {
    /// `Σ p^(−e_i)·μ(B_i)` over the certified balls; flat balls add 0.
    pub value: MeasureValue,
    pub certified_measure: MeasureValue,
    pub flat_measure: MeasureValue,
    /// Measure of the part of the domain left out of the sum.
    pub uncovered_measure: MeasureValue,
    pub decomposition: BallDecomposition,
}

/// `∫_X |Df(x)| |dx|` over the decomposition of `X` at scale `k`.
pub fn integrate_abs_df(f: &FuncExpr, domain: &Ball, k: i64) -> Result<Integral> {
    integrate_abs_df_with(f, domain, k, &CertifyOptions::default())
}

pub fn integrate_abs_df_with(
    f: &FuncExpr,
    domain: &Ball,
    k: i64,
    opts: &CertifyOptions,
) -> Result<Integral> {
    let d = decompose_by_df_with(f, domain, k, opts)?;
    let p = domain.prime();
    Ok(Integral {
        value: d
            .certified
            .iter()
            .map(|b| ball_measure(&b.ball).scale(&MeasureValue::p_power(p, b.e)))
            .sum(),
        certified_measure: d.certified.iter().map(|b| ball_measure(&b.ball)).sum(),
        flat_measure: d.flat.iter().map(ball_measure).sum(),
        uncovered_measure: d.uncovered.iter().map(ball_measure).sum(),
        decomposition: d,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChangeOfVariables {
    pub domain: Ball,
    pub k_in: i64,
    pub k_out: i64,
    pub inputs: usize,
    pub image_count: usize,
    /// Measure of the image residues mod `p^k_out`.
    pub lhs: MeasureValue,
    /// `∫_X |Df|` at scale `k_in`.
    pub rhs: MeasureValue,
    pub difference: MeasureValue,
    pub uncovered_measure: MeasureValue,
    pub decomposition: BallDecomposition,
}

/// Compares `μ(f(X))`, measured on image residues mod `p^k_out`, with
/// `∫_X |Df|` at scale `k_in`. `f` must be injective on the residues mod
/// `p^k_in`.
pub fn verify_change_of_variables(
    f: &FuncExpr,
    domain: &Ball,
    k_in: i64,
    k_out: i64,
) -> Result<ChangeOfVariables> {
    verify_change_of_variables_with(f, domain, k_in, k_out, &CertifyOptions::default())
}

pub fn verify_change_of_variables_with(
    f: &FuncExpr,
    domain: &Ball,
    k_in: i64,
    k_out: i64,
    opts: &CertifyOptions,
) -> Result<ChangeOfVariables> {
    let pairs = image_map(f, domain, k_in, k_out, opts.budget)?;
    let mut seen: HashMap<&Padic, &Padic> = HashMap::with_capacity(pairs.len());
    for (x, y) in &pairs {
        if let Some(first) = seen.insert(y, x) {
            return Err(Error::NotInjectiveAtScale(format!(
                "{} and {} both map to {} mod p^{k_out}",
                first.to_compact_string(),
                x.to_compact_string(),
                y.to_compact_string()
            )));
        }
    }
    let lhs = MeasureValue::p_power(domain.prime(), k_out).scale(&MeasureValue(
        num_rational::BigRational::from_integer(pairs.len().into()),
    ));
    let integral = integrate_abs_df_with(f, domain, k_in, opts)?;
    Ok(ChangeOfVariables {
        domain: domain.clone(),
        k_in,
        k_out,
        inputs: pairs.len(),
        image_count: seen.len(),
        difference: lhs.minus(&integral.value),
        lhs,
        rhs: integral.value,
        uncovered_measure: integral.uncovered_measure,
        decomposition: integral.decomposition,
    })
}

use rayon::prelude::*;
use serde::Serialize;

use super::jacobian::{
    certify_jacobian_with, config_for_ball, is_pointwise_failure, residue_values,
};
use super::CertifyOptions;
use crate::calculus::{classify_point, DiffConfig};
use crate::error::{Error, Result};
use crate::func::FuncExpr;
use crate::padic::{Ball, DigitTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Tag {
    /// Value-constant at the certification precision.
    U,
    /// Passes the Jacobian certificate with `|Df| ≠ 0`.
    V,
    /// Neither, at the finest allowed radius.
    I,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartitionEntry {
    pub ball: Ball,
    pub tag: Tag,
    /// `|Df| = p^(−e)` on V balls.
    pub e: Option<i64>,
    /// For I balls: the failure reason and the center's point class.
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DomainPartition {
    pub domain: Ball,
    pub k: i64,
    pub n: u32,
    /// Every ball is certified on its residues mod `p^certification_precision`.
    pub certification_precision: i64,
    pub entries: Vec<PartitionEntry>,
}

impl DomainPartition {
    pub fn balls_with(&self, tag: Tag) -> impl Iterator<Item = &PartitionEntry> {
        self.entries.iter().filter(move |e| e.tag == tag)
    }
}

/// Extra digits beyond the finest radius used when certifying a ball.
pub const CERTIFICATION_MARGIN: i64 = 2;

/// Default limit on how far below the domain radius the subdivision goes.
pub const DEFAULT_DEPTH: i64 = 6;

/// Outcome of testing one ball.
pub(crate) enum BallTest {
    Constant,
    Certified(i64),
    /// The reason it is neither, and whether every derivative reading on the
    /// ball converged to 0.
    Failed(String, bool),
}

pub(crate) fn test_ball(
    f: &FuncExpr,
    ball: &Ball,
    kc: i64,
    opts: &CertifyOptions,
    with_image: bool,
) -> Result<BallTest> {
    let rel = kc.abs() + ball.radius().abs() + 16;
    let values = match residue_values(f, ball, kc, opts.budget, rel) {
        Ok((_, v)) => v,
        Err(e) if is_pointwise_failure(&e) => return Ok(BallTest::Failed(e.to_string(), false)),
        Err(e) => return Err(e),
    };
    let table = DigitTable::build(&values, None)?;
    if (1..values.len()).all(|i| table.val_diff(0, i) >= table.hi()) {
        return Ok(BallTest::Constant);
    }
    let cert = match certify_jacobian_with(f, ball, kc, opts) {
        Ok(c) => c,
        Err(e) if is_pointwise_failure(&e) => return Ok(BallTest::Failed(e.to_string(), false)),
        Err(e) => return Err(e),
    };
    let pass = if with_image {
        cert.pass
    } else {
        cert.check_b.pass && cert.check_c.pass && cert.check_d.pass
    };
    let flat = std::iter::once(cert.check_b.center.verdict.converged_value())
        .chain(cert.check_b.spots.iter().map(|s| s.value.as_ref()))
        .all(|v| v.is_some_and(|v| v.is_zero()));
    Ok(match cert.e {
        Some(e) if pass => BallTest::Certified(e),
        _ => BallTest::Failed(failed_checks(&cert), flat),
    })
}

fn failed_checks(cert: &super::JacobianCertificate) -> String {
    let mut out = Vec::new();
    for (name, ok) in [
        ("a", cert.check_a.pass),
        ("b", cert.check_b.pass),
        ("c", cert.check_c.pass),
        ("d", cert.check_d.pass),
    ] {
        if !ok {
            out.push(name);
        }
    }
    format!("check(s) {} failed", out.join(","))
}

/// The finest subdivision radius for a domain of radius `r` at scale `k`.
pub(crate) fn depth_cap(r: i64, k: i64) -> i64 {
    (r + DEFAULT_DEPTH).min(k - 1)
}

fn small_config(r: i64) -> DiffConfig {
    config_for_ball(
        &DiffConfig {
            j0: 1,
            jmax: 5,
            s: 3,
            budget: 2_000,
            samples: 12,
            seed: 0,
        },
        r,
    )
}

fn partition_rec(
    f: &FuncExpr,
    ball: &Ball,
    k: i64,
    n: u32,
    cap: i64,
    opts: &CertifyOptions,
) -> Result<Vec<PartitionEntry>> {
    let kc = k + CERTIFICATION_MARGIN;
    let reason = match test_ball(f, ball, kc, opts, true)? {
        BallTest::Constant => {
            return Ok(vec![PartitionEntry {
                ball: ball.clone(),
                tag: Tag::U,
                e: None,
                note: None,
            }])
        }
        BallTest::Certified(e) => {
            return Ok(vec![PartitionEntry {
                ball: ball.clone(),
                tag: Tag::V,
                e: Some(e),
                note: None,
            }])
        }
        BallTest::Failed(reason, _) => reason,
    };
    if ball.radius() < cap {
        let parts: Vec<Vec<PartitionEntry>> = ball
            .children()
            .par_iter()
            .map(|b| partition_rec(f, b, k, n, cap, opts))
            .collect::<Result<_>>()?;
        return Ok(parts.into_iter().flatten().collect());
    }
    let center = ball.center_point(ball.radius().abs() + 8);
    let class = match classify_point(f, &center, n, &small_config(ball.radius())) {
        Ok(c) => c.name().to_string(),
        Err(e) => e.to_string(),
    };
    Ok(vec![PartitionEntry {
        ball: ball.clone(),
        tag: Tag::I,
        e: None,
        note: Some(format!("{reason}; center class {class}")),
    }])
}

/// Splits `domain` into disjoint balls tagged U, V or I.
///
/// A ball is tested on its residues mod `p^(k + 2)`; balls that are neither
/// constant nor certified are split into their `p` children down to radius
/// `min(r + 6, k − 1)`, below which they are tagged I.
pub fn partition_domain(f: &FuncExpr, domain: &Ball, k: i64, n: u32) -> Result<DomainPartition> {
    partition_domain_with(f, domain, k, n, &CertifyOptions::default())
}

pub fn partition_domain_with(
    f: &FuncExpr,
    domain: &Ball,
    k: i64,
    n: u32,
    opts: &CertifyOptions,
) -> Result<DomainPartition> {
    if k <= domain.radius() {
        return Err(Error::InvalidArgument(format!(
            "scale {k} must exceed the domain radius {}",
            domain.radius()
        )));
    }
    let cap = depth_cap(domain.radius(), k);
    let entries = partition_rec(f, domain, k, n, cap, opts)?;
    Ok(DomainPartition {
        domain: domain.clone(),
        k,
        n,
        certification_precision: k + CERTIFICATION_MARGIN,
        entries,
    })
}

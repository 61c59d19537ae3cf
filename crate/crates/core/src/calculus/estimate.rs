use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cosets::{cached_table, CosetLabel};
use crate::error::{Error, Result};
use crate::func::{eval, FuncExpr};
use crate::padic::{Padic, Valuation};

/// Scale window and sampling policy for derivative estimates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffConfig {
    /// First scale: the coarsest ball is `B(a, j0)`.
    pub j0: i64,
    /// Last scale.
    pub jmax: i64,
    /// Agreement required for convergence: quotients must agree mod `p^s`.
    pub s: i64,
    /// Maximum number of quotients evaluated exhaustively per estimate.
    pub budget: u64,
    /// Points drawn per scale when the exhaustive count exceeds the budget.
    pub samples: usize,
    pub seed: u64,
}

impl Default for DiffConfig {
    fn default() -> Self {
        DiffConfig {
            j0: 1,
            jmax: 12,
            s: 6,
            budget: 1_000_000,
            samples: 48,
            seed: 0,
        }
    }
}

impl DiffConfig {
    fn validate(&self) -> Result<()> {
        if self.jmax < self.j0 + 1 {
            return Err(Error::InvalidArgument(format!(
                "need at least two scales, got j0 = {}, jmax = {}",
                self.j0, self.jmax
            )));
        }
        if self.s < 1 {
            return Err(Error::InvalidArgument("s must be at least 1".into()));
        }
        if self.samples < 2 {
            return Err(Error::InvalidArgument(
                "at least two samples per scale are needed".into(),
            ));
        }
        Ok(())
    }

    fn scales(&self) -> Vec<i64> {
        (self.j0..=self.jmax).collect()
    }

    fn rng(&self, j: i64, stream: u64) -> ChaCha8Rng {
        let mixed = self
            .seed
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add((j as u64).wrapping_mul(0xBF58_476D_1CE4_E5B9))
            .wrapping_add(stream.wrapping_mul(0x94D0_49BB_1331_11EB));
        ChaCha8Rng::seed_from_u64(mixed)
    }
}

/// Quotient statistics at one scale.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScaleSummary {
    pub scale: i64,
    pub points: usize,
    pub quotients: usize,
    pub exhaustive: bool,
    /// The first quotient at this scale; the others are compared to it.
    pub reference: Padic,
    /// Smallest valuation among quotients known to be nonzero; the cap when
    /// every quotient vanishes to its known digits.
    pub min_valuation: i64,
    /// Every quotient agrees with the reference mod `p^spread`.
    pub spread: i64,
    /// Agreement of this reference with the previous scale's.
    pub cross_agreement: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DirectionValue {
    pub lambda: String,
    pub value: Padic,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict")]
pub enum Verdict {
    Converged { value: Padic },
    Unbounded,
    DirectionalDisagreement { values: Vec<DirectionValue> },
    Undetermined { reason: String },
}

impl Verdict {
    pub fn converged_value(&self) -> Option<&Padic> {
        match self {
            Verdict::Converged { value } => Some(value),
            _ => None,
        }
    }

    pub fn is_unbounded(&self) -> bool {
        matches!(self, Verdict::Unbounded)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Converged { .. } => "Converged",
            Verdict::Unbounded => "Unbounded",
            Verdict::DirectionalDisagreement { .. } => "DirectionalDisagreement",
            Verdict::Undetermined { .. } => "Undetermined",
        }
    }
}

/// A multi-scale difference-quotient record.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiffEstimate {
    pub point: Padic,
    /// The coset direction for directional estimates.
    pub direction: Option<CosetLabel>,
    pub j0: i64,
    pub jmax: i64,
    pub s: i64,
    pub seed: u64,
    pub exhaustive: bool,
    pub scales: Vec<ScaleSummary>,
    pub certified_scale: i64,
    pub verdict: Verdict,
}

/// Directional estimates along every coset of `P_n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DirectionalReport {
    pub point: Padic,
    pub n: u32,
    pub estimates: Vec<DiffEstimate>,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "class")]
pub enum PointClass {
    Differentiable {
        value: Padic,
        report: DirectionalReport,
    },
    InS {
        n: u32,
        report: DirectionalReport,
    },
    InT {
        n: u32,
        report: DirectionalReport,
    },
    Undetermined {
        reason: String,
        report: DirectionalReport,
    },
}

impl PointClass {
    pub fn name(&self) -> &'static str {
        match self {
            PointClass::Differentiable { .. } => "Differentiable",
            PointClass::InS { .. } => "InS",
            PointClass::InT { .. } => "InT",
            PointClass::Undetermined { .. } => "Undetermined",
        }
    }

    pub fn report(&self) -> &DirectionalReport {
        match self {
            PointClass::Differentiable { report, .. }
            | PointClass::InS { report, .. }
            | PointClass::InT { report, .. }
            | PointClass::Undetermined { report, .. } => report,
        }
    }
}

/// `(f(x) − f(y)) / (x − y)` at the precision the inputs justify.
pub fn difference_quotient(f: &FuncExpr, x: &Padic, y: &Padic, rel: i64) -> Result<Padic> {
    let dx = x.sub(y)?;
    if dx.is_zero() {
        return Err(Error::IndistinguishableAtPrecision);
    }
    eval(f, x, rel)?.sub(&eval(f, y, rel)?)?.div(&dx)
}

/// Valuation of `x`, or the bound it is known to exceed, capped at `cap`.
fn lower_val(x: &Padic, cap: i64) -> i64 {
    match x.valuation() {
        Valuation::Finite(v) => v.min(cap),
        Valuation::Infinity => x.abs_precision().unwrap_or(cap).min(cap),
    }
}

fn valuation_of(x: &Padic) -> i64 {
    x.valuation().finite().expect("increments are nonzero")
}

/// Statistics of quotients `Δf/Δx` against the first one.
fn summarize(pairs: &[(Padic, Padic)], cap: i64) -> Result<(Padic, i64, i64)> {
    let (df0, dx0) = &pairs[0];
    let reference = df0.div(dx0)?;
    let mut min_val = cap;
    let mut spread = cap;
    for (df, dx) in pairs {
        let vx = valuation_of(dx);
        if let Valuation::Finite(vf) = df.valuation() {
            min_val = min_val.min(vf - vx);
        }
        let dev = df.sub(&reference.mul(dx)?)?;
        spread = spread.min(lower_val(&dev, cap + vx) - vx);
    }
    Ok((reference, min_val, spread))
}

/// Distinct indices in `[0, count)`: all of them, or `samples` drawn at random.
fn choose(count: u64, exhaustive: bool, samples: usize, rng: &mut ChaCha8Rng) -> Vec<u64> {
    if exhaustive || count <= samples as u64 {
        return (0..count).collect();
    }
    let mut idx: Vec<u64> = rand::seq::index::sample(rng, count as usize, samples)
        .into_iter()
        .map(|i| i as u64)
        .collect();
    idx.sort_unstable();
    idx
}

fn is_undecidable(e: &Error) -> bool {
    matches!(e, Error::GuardUndecidableAtPrecision(_))
}

fn working_precision(cfg: &DiffConfig, a: &Padic, n: i64) -> i64 {
    let va = a.valuation().finite().unwrap_or(0).abs();
    2 * (n * cfg.jmax + cfg.s) + 16 + 2 * va
}

fn point_rep(a: &Padic, w: i64) -> Padic {
    a.representative(w)
}

fn finish(
    point: &Padic,
    direction: Option<CosetLabel>,
    cfg: &DiffConfig,
    exhaustive: bool,
    outcome: std::result::Result<Vec<ScaleSummary>, String>,
    cap: i64,
) -> Result<DiffEstimate> {
    let mut est = DiffEstimate {
        point: point.clone(),
        direction,
        j0: cfg.j0,
        jmax: cfg.jmax,
        s: cfg.s,
        seed: cfg.seed,
        exhaustive,
        scales: Vec::new(),
        certified_scale: 0,
        verdict: Verdict::Undetermined {
            reason: String::new(),
        },
    };
    let mut scales = match outcome {
        Ok(s) => s,
        Err(reason) => {
            est.verdict = Verdict::Undetermined { reason };
            return Ok(est);
        }
    };
    for i in 1..scales.len() {
        let d = scales[i].reference.sub(&scales[i - 1].reference)?;
        scales[i].cross_agreement = Some(lower_val(&d, cap));
    }
    let n = scales.len();
    let last = &scales[n - 1];
    let prev = &scales[n - 2];
    let certified = last
        .spread
        .min(prev.spread)
        .min(last.cross_agreement.unwrap_or(cap));
    est.certified_scale = certified;
    let mv: Vec<i64> = scales.iter().map(|s| s.min_valuation).collect();
    let unbounded = n >= 3 && mv[n - 3] > mv[n - 2] && mv[n - 2] > mv[n - 1];
    est.verdict = if unbounded {
        Verdict::Unbounded
    } else if certified >= cfg.s {
        Verdict::Converged {
            value: last.reference.truncate(certified),
        }
    } else {
        Verdict::Undetermined {
            reason: format!(
                "quotients at the last two scales agree only mod p^{certified}, p^{} required",
                cfg.s
            ),
        }
    };
    est.scales = scales;
    Ok(est)
}

/// Collects per-scale results; guard-undecidable points turn into a reason
/// string, other errors propagate.
fn gather(
    results: Vec<Result<ScaleSummary>>,
) -> Result<std::result::Result<Vec<ScaleSummary>, String>> {
    let mut out = Vec::with_capacity(results.len());
    for r in results {
        match r {
            Ok(s) => out.push(s),
            Err(e) if is_undecidable(&e) => return Ok(Err(e.to_string())),
            Err(e) => return Err(e),
        }
    }
    Ok(Ok(out))
}

/// Estimates the strict derivative `Df(a)` from quotients over pairs of
/// residues of `B(a, j)` mod `p^(j+s)`, for each scale `j`.
pub fn strict_derivative(f: &FuncExpr, a: &Padic, cfg: &DiffConfig) -> Result<DiffEstimate> {
    cfg.validate()?;
    let p = a.prime();
    let w = working_precision(cfg, a, 1);
    let cap = w;
    let a_rep = point_rep(a, w);
    let per_scale = (p as u64).checked_pow(cfg.s as u32);
    let scales = cfg.scales();
    let exhaustive = per_scale
        .and_then(|c| c.checked_mul(c.saturating_sub(1)))
        .map(|pairs| pairs / 2 * scales.len() as u64 <= cfg.budget)
        .unwrap_or(false);
    let count = per_scale.unwrap_or(u64::MAX);

    let results: Vec<Result<ScaleSummary>> = scales
        .par_iter()
        .map(|&j| {
            let mut rng = cfg.rng(j, 0);
            let ts = choose(count, exhaustive, cfg.samples, &mut rng);
            let step = Padic::from_integer(1, p, w)?.shift(j);
            let mut xs = Vec::with_capacity(ts.len());
            for &t in &ts {
                let x = a_rep.add(&step.mul(&Padic::from_integer(t, p, w)?)?)?;
                xs.push(x.representative(w));
            }
            let ys: Vec<Padic> = xs.iter().map(|x| eval(f, x, w)).collect::<Result<_>>()?;
            let mut pairs = Vec::with_capacity(xs.len() * (xs.len() - 1) / 2);
            for i in 0..xs.len() {
                for k in i + 1..xs.len() {
                    pairs.push((ys[i].sub(&ys[k])?, xs[i].sub(&xs[k])?));
                }
            }
            let (reference, min_valuation, spread) = summarize(&pairs, cap)?;
            Ok(ScaleSummary {
                scale: j,
                points: xs.len(),
                quotients: pairs.len(),
                exhaustive: xs.len() as u64 == count,
                reference,
                min_valuation,
                spread,
                cross_agreement: None,
            })
        })
        .collect();
    finish(a, None, cfg, exhaustive, gather(results)?, cap)
}

/// The `i`-th positive integer prime to `p`.
fn nth_unit(i: u64, p: u64) -> u64 {
    i + i / (p - 1) + 1
}

/// Estimates the directional derivative along the coset `λ P_n` from
/// quotients `(f(a + t) − f(a)) / t` with `t = λ·u^n·p^(n·j)`, `u` a unit
/// residue mod `p^s`.
pub fn directional_derivative(
    f: &FuncExpr,
    a: &Padic,
    n: u32,
    label: &CosetLabel,
    cfg: &DiffConfig,
) -> Result<DiffEstimate> {
    cfg.validate()?;
    let p = a.prime();
    if label.prime != p || label.n != n {
        return Err(Error::InvalidArgument(format!(
            "direction belongs to (p, n) = ({}, {}), not ({p}, {n})",
            label.prime, label.n
        )));
    }
    let w = working_precision(cfg, a, n as i64 + 1);
    let cap = w;
    let a_rep = point_rep(a, w);
    let fa = match eval(f, &a_rep, w) {
        Ok(v) => v,
        Err(e) if is_undecidable(&e) => {
            return finish(a, Some(*label), cfg, false, Err(e.to_string()), cap)
        }
        Err(e) => return Err(e),
    };
    let lambda = Padic::from_integer(label.lambda(), p, w)?;
    let units = (p as u64)
        .checked_pow(cfg.s as u32)
        .map(|q| q - q / p as u64)
        .unwrap_or(u64::MAX);
    let scales = cfg.scales();
    let exhaustive = units
        .checked_mul(scales.len() as u64)
        .is_some_and(|c| c <= cfg.budget);

    let results: Vec<Result<ScaleSummary>> = scales
        .par_iter()
        .map(|&j| {
            let mut rng = cfg.rng(j, 1 + label.index as u64);
            let idx = choose(units, exhaustive, cfg.samples, &mut rng);
            let mut pairs = Vec::with_capacity(idx.len());
            for &i in &idx {
                let u = Padic::from_integer(BigInt::from(nth_unit(i, p as u64)), p, w)?;
                let t = lambda.mul(&u.pow(n as i64)?)?.shift(n as i64 * j);
                let x = a_rep.add(&t)?.representative(w);
                let fx = eval(f, &x, w)?;
                pairs.push((fx.sub(&fa)?, t));
            }
            let (reference, min_valuation, spread) = summarize(&pairs, cap)?;
            Ok(ScaleSummary {
                scale: j,
                points: idx.len(),
                quotients: pairs.len(),
                exhaustive: idx.len() as u64 == units,
                reference,
                min_valuation,
                spread,
                cross_agreement: None,
            })
        })
        .collect();
    finish(a, Some(*label), cfg, exhaustive, gather(results)?, cap)
}

fn directional_report(
    f: &FuncExpr,
    a: &Padic,
    n: u32,
    cfg: &DiffConfig,
) -> Result<DirectionalReport> {
    let table = cached_table(a.prime(), n)?;
    let estimates: Vec<DiffEstimate> = table
        .labels()
        .iter()
        .map(|l| directional_derivative(f, a, n, l, cfg))
        .collect::<Result<_>>()?;
    Ok(DirectionalReport {
        point: a.clone(),
        n,
        estimates,
        verdict: Verdict::Undetermined {
            reason: String::new(),
        },
    })
}

/// Sorts a point into Differentiable, `S_n` (two directions converge to
/// different values) or `T_n` (some direction is unbounded).
pub fn classify_point(f: &FuncExpr, a: &Padic, n: u32, cfg: &DiffConfig) -> Result<PointClass> {
    let mut report = directional_report(f, a, n, cfg)?;
    let converged: Vec<DirectionValue> = report
        .estimates
        .iter()
        .filter_map(|e| {
            e.verdict.converged_value().map(|v| DirectionValue {
                lambda: e.direction.expect("directional").lambda().to_string(),
                value: v.clone(),
            })
        })
        .collect();
    if report.estimates.iter().any(|e| e.verdict.is_unbounded()) {
        report.verdict = Verdict::Unbounded;
        return Ok(PointClass::InT { n, report });
    }
    let mut disagree = false;
    for i in 0..converged.len() {
        for k in i + 1..converged.len() {
            if !converged[i]
                .value
                .congruent_mod(&converged[k].value, cfg.s)?
            {
                disagree = true;
            }
        }
    }
    if disagree {
        report.verdict = Verdict::DirectionalDisagreement { values: converged };
        return Ok(PointClass::InS { n, report });
    }
    if converged.len() == report.estimates.len() {
        let scale = report
            .estimates
            .iter()
            .map(|e| e.certified_scale)
            .min()
            .unwrap_or(cfg.s);
        let value = converged[0].value.truncate(scale);
        report.verdict = Verdict::Converged {
            value: value.clone(),
        };
        return Ok(PointClass::Differentiable { value, report });
    }
    let reason = report
        .estimates
        .iter()
        .find_map(|e| match &e.verdict {
            Verdict::Undetermined { reason } => Some(reason.clone()),
            _ => None,
        })
        .unwrap_or_default();
    report.verdict = Verdict::Undetermined {
        reason: reason.clone(),
    };
    Ok(PointClass::Undetermined { reason, report })
}

/// Finite-scale reading of "all directional quotients are bounded": false
/// exactly when some coset direction is unbounded.
pub fn bounded_quotients(f: &FuncExpr, a: &Padic, n: u32, cfg: &DiffConfig) -> Result<bool> {
    let report = directional_report(f, a, n, cfg)?;
    Ok(!report.estimates.iter().any(|e| e.verdict.is_unbounded()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func::parse_expr;

    fn int(n: i64, p: u32) -> Padic {
        Padic::from_integer(n, p, 10).unwrap()
    }

    fn quick() -> DiffConfig {
        DiffConfig {
            budget: 20_000,
            samples: 24,
            ..DiffConfig::default()
        }
    }

    #[test]
    fn quotient_examples() {
        let f = parse_expr("x^2", 5).unwrap();
        let q = difference_quotient(&f, &int(1, 5), &int(6, 5), 10).unwrap();
        assert!(q.agrees_with(&int(7, 5)).unwrap());
        let c = parse_expr("3", 5).unwrap();
        assert!(difference_quotient(&c, &int(1, 5), &int(6, 5), 10)
            .unwrap()
            .is_zero());
        let g = parse_expr("spread2(x)", 3).unwrap();
        let q = difference_quotient(&g, &Padic::exact_zero(3), &int(27, 3), 10).unwrap();
        assert_eq!(q.valuation(), Valuation::Finite(3));
        assert_eq!(
            difference_quotient(&f, &int(1, 5), &int(1, 5), 10),
            Err(Error::IndistinguishableAtPrecision)
        );
    }

    #[test]
    fn cube_at_one() {
        let f = parse_expr("x^3", 7).unwrap();
        let est = strict_derivative(&f, &int(1, 7), &quick()).unwrap();
        let v = est.verdict.converged_value().expect("converged");
        assert!(v.congruent_mod(&int(3, 7), 6).unwrap());
    }

    #[test]
    fn digit_spread_has_zero_derivative() {
        let g = parse_expr("spread2(x)", 3).unwrap();
        for a in [0, 1, 5, 17] {
            let est = strict_derivative(&g, &int(a, 3), &quick()).unwrap();
            let v = est.verdict.converged_value().expect("converged");
            assert!(v.is_zero(), "{v}");
        }
    }

    #[test]
    fn reciprocal_at_p() {
        let f = parse_expr("1/x", 5).unwrap();
        let est = strict_derivative(&f, &int(5, 5), &quick()).unwrap();
        let v = est.verdict.converged_value().expect("converged");
        assert_eq!(v.valuation(), Valuation::Finite(-2));
        let want = Padic::from_rational(-1, 25, 5, 12).unwrap();
        assert!(v.congruent_mod(&want, 6).unwrap());
    }

    #[test]
    fn coset_piecewise_is_in_s2() {
        let f = parse_expr("cases{coset(2,1): x; else: 2*x}", 5).unwrap();
        let a = Padic::exact_zero(5);
        let class = classify_point(&f, &a, 2, &quick()).unwrap();
        assert_eq!(class.name(), "InS");
        let report = class.report();
        for e in &report.estimates {
            let v = e.verdict.converged_value().unwrap();
            let want = if e.direction.unwrap().index == 0 {
                1
            } else {
                2
            };
            assert!(v.congruent_mod(&int(want, 5), 6).unwrap());
        }
    }

    #[test]
    fn square_root_on_squares_is_in_t2() {
        let f = parse_expr("cases{coset(2,1): root2(x); else: 0}", 5).unwrap();
        let a = Padic::exact_zero(5);
        let class = classify_point(&f, &a, 2, &quick()).unwrap();
        assert_eq!(class.name(), "InT");
        assert!(!bounded_quotients(&f, &a, 2, &quick()).unwrap());
        let g = parse_expr("x^3 - x", 5).unwrap();
        assert!(bounded_quotients(&g, &a, 2, &quick()).unwrap());
    }

    #[test]
    fn smooth_points_are_differentiable() {
        let f = parse_expr("x^2", 7).unwrap();
        let class = classify_point(&f, &int(3, 7), 2, &quick()).unwrap();
        match class {
            PointClass::Differentiable { value, .. } => {
                assert!(value.congruent_mod(&int(6, 7), 6).unwrap())
            }
            other => panic!("{}", other.name()),
        }
    }

    #[test]
    fn imprecise_points_use_their_representative() {
        let f = parse_expr("cases{val(0): x; else: 2*x}", 5).unwrap();
        let est = strict_derivative(&f, &Padic::zero_mod(5, 2), &quick()).unwrap();
        let v = est.verdict.converged_value().expect("converged");
        assert!(v.congruent_mod(&int(2, 5), 6).unwrap());
    }

    #[test]
    fn deterministic_under_seed() {
        let f = parse_expr("x^3 + 2*x", 7).unwrap();
        let a = int(2, 7);
        let e1 = strict_derivative(&f, &a, &quick()).unwrap();
        let e2 = strict_derivative(&f, &a, &quick()).unwrap();
        assert_eq!(
            serde_json::to_string(&e1).unwrap(),
            serde_json::to_string(&e2).unwrap()
        );
    }
}

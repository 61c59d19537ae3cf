use super::expr::{Case, FuncExpr, Guard, RootBranch};
use crate::cosets::cached_table;
use crate::error::{Error, Result};
use crate::padic::{rational_valuation, Padic, Valuation};

/// Evaluates `f` at `x`. Constants enter with `rel` relative digits; the
/// precision of the result is whatever the operations justify.
pub fn eval(f: &FuncExpr, x: &Padic, rel: i64) -> Result<Padic> {
    let p = x.prime();
    match f {
        FuncExpr::RationalConst { num, den } => {
            Padic::from_rational(num.clone(), den.clone(), p, rel)
        }
        FuncExpr::Var => Ok(x.clone()),
        FuncExpr::Add(a, b) => eval(a, x, rel)?.add(&eval(b, x, rel)?),
        FuncExpr::Sub(a, b) => eval(a, x, rel)?.sub(&eval(b, x, rel)?),
        FuncExpr::Mul(a, b) => eval(a, x, rel)?.mul(&eval(b, x, rel)?),
        FuncExpr::Div(a, b) => {
            let num = eval(a, x, rel)?;
            let den = eval(b, x, rel)?;
            check_nonzero(&den)?;
            num.div(&den)
        }
        FuncExpr::IntPow(a, e) => {
            let base = eval(a, x, rel)?;
            if *e < 0 {
                check_nonzero(&base)?;
            }
            base.pow(*e)
        }
        FuncExpr::Compose(outer, inner) => eval(outer, &eval(inner, x, rel)?, rel),
        FuncExpr::Piecewise(cases) => eval(select_case(cases, x)?, x, rel),
        FuncExpr::DigitSpread { d } => digit_spread(x, *d),
        FuncExpr::NthRootBranch { n, branch } => {
            let table = cached_table(p, *n)?;
            let branch = match branch {
                RootBranch::Principal => None,
                RootBranch::Residue(r) => Some(*r),
            };
            if x.is_zero() {
                return if x.is_exact_zero() {
                    Ok(x.clone())
                } else {
                    Err(Error::InsufficientPrecision(format!(
                        "root of {x}, which is not known to be nonzero"
                    )))
                };
            }
            table.nth_root(x, branch)
        }
    }
}

fn check_nonzero(d: &Padic) -> Result<()> {
    if d.is_exact_zero() {
        return Err(Error::DivisionByZero);
    }
    if d.is_zero() {
        return Err(Error::InsufficientPrecision(format!(
            "denominator {d} is not known to be nonzero"
        )));
    }
    Ok(())
}

/// The digit-spreading map `Σ a_i p^i ↦ Σ a_i p^(d·i)`.
///
/// An input known mod `p^A` gives an output known mod `p^(d·A)`: digits of
/// the output strictly between the images of known digits are zero.
pub fn digit_spread(x: &Padic, d: u32) -> Result<Padic> {
    if d < 1 {
        return Err(Error::InvalidArgument(
            "spread factor must be at least 1".into(),
        ));
    }
    let p = x.prime();
    let d = d as i64;
    let Valuation::Finite(v) = x.valuation() else {
        return Ok(match x.abs_precision() {
            None => x.clone(),
            Some(a) => Padic::zero_mod(p, d * a),
        });
    };
    let mut unit = num_bigint::BigInt::from(0);
    let pd = num_bigint::BigInt::from(p).pow(d as u32);
    for digit in x.digits().iter().rev() {
        unit = unit * &pd + *digit as u32;
    }
    Padic::from_unit(p, d * v, &unit, d * x.rel_precision().expect("nonzero"))
}

/// Decides a guard at `x`.
pub fn guard_holds(g: &Guard, x: &Padic) -> Result<bool> {
    let p = x.prime();
    let undecidable =
        |why: String| Error::GuardUndecidableAtPrecision(format!("{g} at {x}: {why}"));
    match g {
        Guard::Otherwise => Ok(false),
        Guard::CosetIs { n, lambda } => {
            if x.is_exact_zero() {
                return Ok(false);
            }
            if x.is_zero() {
                return Err(undecidable("point not known to be nonzero".into()));
            }
            let table = cached_table(p, *n)?;
            let target = table.label_of_rational(&lambda.num, &lambda.den)?;
            match table.classify(x) {
                Ok(label) => Ok(label.index == target.index),
                Err(Error::InsufficientPrecision(why)) => Err(undecidable(why)),
                Err(e) => Err(e),
            }
        }
        Guard::ValuationIn(set) => match x.valuation() {
            Valuation::Finite(v) => Ok(set.contains(v)),
            Valuation::Infinity => match x.abs_precision() {
                None => Ok(false),
                Some(a) => match set {
                    crate::func::ValuationSet::Set(s) if s.iter().all(|&v| v < a) => Ok(false),
                    _ => Err(undecidable(format!("valuation is at least {a}"))),
                },
            },
        },
        Guard::InBall { center, radius } => {
            let vc = rational_valuation(&center.num, &center.den, p)
                .finite()
                .unwrap_or(*radius);
            let rel = (radius - vc).max(1) + 8;
            let c = Padic::from_rational(center.num.clone(), center.den.clone(), p, rel)?;
            let diff = x.sub(&c)?;
            match diff.valuation() {
                Valuation::Finite(v) => Ok(v >= *radius),
                Valuation::Infinity => match diff.abs_precision() {
                    Some(a) if a < *radius => Err(undecidable(format!("point known mod p^{a}"))),
                    _ => Ok(true),
                },
            }
        }
    }
}

/// The branch of a piecewise definition that applies at `x`.
pub fn select_case<'a>(cases: &'a [Case], x: &Padic) -> Result<&'a FuncExpr> {
    let mut hit: Option<&FuncExpr> = None;
    let mut fallback: Option<&FuncExpr> = None;
    for case in cases {
        if case.guard == Guard::Otherwise {
            fallback.get_or_insert(&case.expr);
            continue;
        }
        if guard_holds(&case.guard, x)? {
            if hit.is_some() {
                return Err(Error::InvalidArgument(format!(
                    "overlapping guards at {}",
                    x.to_compact_string()
                )));
            }
            hit = Some(&case.expr);
        }
    }
    hit.or(fallback)
        .ok_or_else(|| Error::OutOfDomain(format!("no guard applies at {}", x.to_compact_string())))
}

use num_bigint::BigInt;
use num_rational::BigRational;

use super::expr::{Case, FuncExpr};
use crate::error::{Error, Result};

/// Symbolic derivative with respect to `x`.
///
/// Piecewise definitions are differentiated branch by branch, so the result
/// is valid on the interior of each guard region. An n-th root `y` has
/// derivative `y / (n·x)`.
pub fn symbolic_derivative(f: &FuncExpr) -> Result<FuncExpr> {
    Ok(match f {
        FuncExpr::RationalConst { .. } => FuncExpr::int(0),
        FuncExpr::Var => FuncExpr::int(1),
        FuncExpr::Add(a, b) => FuncExpr::add(symbolic_derivative(a)?, symbolic_derivative(b)?),
        FuncExpr::Sub(a, b) => FuncExpr::sub(symbolic_derivative(a)?, symbolic_derivative(b)?),
        FuncExpr::Mul(a, b) => FuncExpr::add(
            FuncExpr::mul(symbolic_derivative(a)?, (**b).clone()),
            FuncExpr::mul((**a).clone(), symbolic_derivative(b)?),
        ),
        FuncExpr::Div(a, b) => {
            let da = symbolic_derivative(a)?;
            let db = symbolic_derivative(b)?;
            if db
                .as_constant()
                .is_some_and(|c| c == BigRational::from_integer(0.into()))
            {
                FuncExpr::div(da, (**b).clone())
            } else {
                FuncExpr::div(
                    FuncExpr::sub(
                        FuncExpr::mul(da, (**b).clone()),
                        FuncExpr::mul((**a).clone(), db),
                    ),
                    FuncExpr::pow((**b).clone(), 2),
                )
            }
        }
        FuncExpr::IntPow(a, e) => FuncExpr::mul(
            FuncExpr::mul(FuncExpr::int(*e), FuncExpr::pow((**a).clone(), e - 1)),
            symbolic_derivative(a)?,
        ),
        FuncExpr::Compose(outer, inner) => FuncExpr::mul(
            FuncExpr::compose(symbolic_derivative(outer)?, (**inner).clone()),
            symbolic_derivative(inner)?,
        ),
        FuncExpr::Piecewise(cases) => FuncExpr::Piecewise(
            cases
                .iter()
                .map(|c| {
                    Ok(Case {
                        guard: c.guard.clone(),
                        expr: symbolic_derivative(&c.expr)?,
                    })
                })
                .collect::<Result<_>>()?,
        ),
        FuncExpr::DigitSpread { d } => {
            return Err(Error::UnsupportedExpression(format!(
                "spread{d} has no symbolic derivative"
            )))
        }
        FuncExpr::NthRootBranch { n, .. } => FuncExpr::div(
            f.clone(),
            FuncExpr::mul(FuncExpr::int(BigInt::from(*n)), FuncExpr::Var),
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func::{eval, parse_expr};
    use crate::padic::Padic;

    fn d(s: &str) -> String {
        symbolic_derivative(&parse_expr(s, 5).unwrap())
            .unwrap()
            .to_string()
    }

    #[test]
    fn examples() {
        assert_eq!(d("x^2"), "2*x");
        assert_eq!(d("1/x"), "-1/x^2");
        assert_eq!(d("3*x + 1"), "3");
        assert!(symbolic_derivative(&parse_expr("spread2(x)", 3).unwrap()).is_err());
    }

    #[test]
    fn root_derivative_matches_half_inverse_root() {
        // d/dx sqrt(1 + x) = 1 / (2 sqrt(1 + x)), checked at x = 7 over ℚ_7
        let p = 7;
        let f = parse_expr("root2(1 + x)", p).unwrap();
        let df = symbolic_derivative(&f).unwrap();
        let x = Padic::from_integer(7, p, 10).unwrap();
        let got = eval(&df, &x, 10).unwrap();
        let root = eval(&f, &x, 10).unwrap();
        let want = root.mul_int(2).inv().unwrap();
        assert!(got.congruent_mod(&want, 6).unwrap());
        // finite difference between nearby points agrees to the step size
        let y = Padic::from_integer(7 + 7i64.pow(5), p, 10).unwrap();
        let q = eval(&f, &y, 10)
            .unwrap()
            .sub(&root)
            .unwrap()
            .div(&y.sub(&x).unwrap())
            .unwrap();
        assert!(q.congruent_mod(&want, 4).unwrap());
    }
}

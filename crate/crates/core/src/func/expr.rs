use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// Integers serialize as JSON numbers when they fit in an `i64`, and as
/// decimal strings otherwise; both forms are accepted on input.
pub(crate) mod int_serde {
    use num_bigint::BigInt;
    use num_traits::ToPrimitive;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(n: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        match n.to_i64() {
            Some(v) => s.serialize_i64(v),
            None => s.serialize_str(&n.to_string()),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(v) => Ok(BigInt::from(v)),
            Raw::Str(s) => s.trim().parse().map_err(de::Error::custom),
        }
    }
}

/// A rational number `num/den` as it appears in function specifications.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rational {
    #[serde(with = "int_serde")]
    pub num: BigInt,
    #[serde(with = "int_serde", default = "one")]
    pub den: BigInt,
}

fn one() -> BigInt {
    BigInt::one()
}

impl Rational {
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Rational {
        Rational::from_big(&BigRational::new(num.into(), den.into()))
    }

    pub fn from_big(q: &BigRational) -> Rational {
        Rational {
            num: q.numer().clone(),
            den: q.denom().clone(),
        }
    }

    pub fn to_big(&self) -> BigRational {
        BigRational::new(self.num.clone(), self.den.clone())
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// A set of valuations: an explicit finite list or a congruence class.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ValuationSet {
    Set(Vec<i64>),
    Congruence { modulus: i64, residue: i64 },
}

impl ValuationSet {
    pub fn contains(&self, v: i64) -> bool {
        match self {
            ValuationSet::Set(s) => s.contains(&v),
            ValuationSet::Congruence { modulus, residue } => {
                v.rem_euclid(*modulus) == residue.rem_euclid(*modulus)
            }
        }
    }
}

/// A condition on the argument of a piecewise definition.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Guard {
    /// `x ∈ λ P_n`.
    CosetIs { n: u32, lambda: Rational },
    /// `x ≠ 0` and `v(x)` lies in the set.
    ValuationIn(ValuationSet),
    /// `v(x − center) ≥ radius`.
    InBall { center: Rational, radius: i64 },
    /// Fires when no other guard does.
    Otherwise,
}

/// Which n-th root a [`FuncExpr::NthRootBranch`] picks.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RootBranch {
    /// The root whose unit part has the smallest residue mod `p^m`.
    Principal,
    /// The root whose unit part is congruent to the given residue mod `p^m`.
    Residue(u64),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Case {
    pub guard: Guard,
    pub expr: FuncExpr,
}

/// A p-adic function of one variable `x`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FuncExpr {
    RationalConst {
        #[serde(with = "int_serde")]
        num: BigInt,
        #[serde(with = "int_serde", default = "one")]
        den: BigInt,
    },
    Var,
    Add(Box<FuncExpr>, Box<FuncExpr>),
    Sub(Box<FuncExpr>, Box<FuncExpr>),
    Mul(Box<FuncExpr>, Box<FuncExpr>),
    Div(Box<FuncExpr>, Box<FuncExpr>),
    IntPow(Box<FuncExpr>, i64),
    /// `outer(inner(x))`.
    Compose(Box<FuncExpr>, Box<FuncExpr>),
    Piecewise(Vec<Case>),
    /// `Σ a_i p^i ↦ Σ a_i p^(d·i)`, applied to `x`.
    DigitSpread {
        d: u32,
    },
    /// An n-th root of `x` on a fixed branch.
    NthRootBranch {
        n: u32,
        branch: RootBranch,
    },
}

impl FuncExpr {
    pub fn constant(q: &BigRational) -> FuncExpr {
        FuncExpr::RationalConst {
            num: q.numer().clone(),
            den: q.denom().clone(),
        }
    }

    pub fn int(n: impl Into<BigInt>) -> FuncExpr {
        FuncExpr::RationalConst {
            num: n.into(),
            den: BigInt::one(),
        }
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        match self {
            FuncExpr::RationalConst { num, den } => {
                Some(BigRational::new(num.clone(), den.clone()))
            }
            _ => None,
        }
    }

    fn is_const(&self, v: i64) -> bool {
        self.as_constant() == Some(BigRational::from_integer(v.into()))
    }

    // Smart constructors with light constant folding.

    pub fn add(a: FuncExpr, b: FuncExpr) -> FuncExpr {
        match (a.as_constant(), b.as_constant()) {
            (Some(x), Some(y)) => FuncExpr::constant(&(x + y)),
            _ if a.is_const(0) => b,
            _ if b.is_const(0) => a,
            _ => FuncExpr::Add(Box::new(a), Box::new(b)),
        }
    }

    pub fn sub(a: FuncExpr, b: FuncExpr) -> FuncExpr {
        match (a.as_constant(), b.as_constant()) {
            (Some(x), Some(y)) => FuncExpr::constant(&(x - y)),
            _ if b.is_const(0) => a,
            _ if a.is_const(0) => FuncExpr::neg(b),
            _ => FuncExpr::Sub(Box::new(a), Box::new(b)),
        }
    }

    pub fn neg(a: FuncExpr) -> FuncExpr {
        match a.as_constant() {
            Some(x) => FuncExpr::constant(&-x),
            None => FuncExpr::Mul(Box::new(FuncExpr::int(-1)), Box::new(a)),
        }
    }

    pub fn mul(a: FuncExpr, b: FuncExpr) -> FuncExpr {
        match (a.as_constant(), b.as_constant()) {
            (Some(x), Some(y)) => FuncExpr::constant(&(x * y)),
            _ if a.is_const(0) || b.is_const(0) => FuncExpr::int(0),
            _ if a.is_const(1) => b,
            _ if b.is_const(1) => a,
            _ => FuncExpr::Mul(Box::new(a), Box::new(b)),
        }
    }

    pub fn div(a: FuncExpr, b: FuncExpr) -> FuncExpr {
        match (a.as_constant(), b.as_constant()) {
            (Some(x), Some(y)) if !y.is_zero() => FuncExpr::constant(&(x / y)),
            _ if b.is_const(1) => a,
            _ => FuncExpr::Div(Box::new(a), Box::new(b)),
        }
    }

    pub fn pow(a: FuncExpr, e: i64) -> FuncExpr {
        match (e, a.as_constant()) {
            (0, _) => FuncExpr::int(1),
            (1, _) => a,
            (_, Some(x)) if e > 0 || !x.is_zero() => {
                FuncExpr::constant(&num_traits::pow::Pow::pow(&x, e as i32))
            }
            _ => FuncExpr::IntPow(Box::new(a), e),
        }
    }

    pub fn compose(outer: FuncExpr, inner: FuncExpr) -> FuncExpr {
        match (&outer, &inner) {
            (FuncExpr::RationalConst { .. }, _) => outer,
            (FuncExpr::Var, _) => inner,
            (_, FuncExpr::Var) => outer,
            _ => FuncExpr::Compose(Box::new(outer), Box::new(inner)),
        }
    }

    /// Whether the expression avoids [`FuncExpr::DigitSpread`].
    pub fn is_arithmetic(&self) -> bool {
        match self {
            FuncExpr::DigitSpread { .. } => false,
            FuncExpr::RationalConst { .. } | FuncExpr::Var | FuncExpr::NthRootBranch { .. } => true,
            FuncExpr::Add(a, b)
            | FuncExpr::Sub(a, b)
            | FuncExpr::Mul(a, b)
            | FuncExpr::Div(a, b)
            | FuncExpr::Compose(a, b) => a.is_arithmetic() && b.is_arithmetic(),
            FuncExpr::IntPow(a, _) => a.is_arithmetic(),
            FuncExpr::Piecewise(cases) => cases.iter().all(|c| c.expr.is_arithmetic()),
        }
    }

    /// Whether the expression is free of guards, roots and digit maps.
    pub fn is_rational_function(&self) -> bool {
        match self {
            FuncExpr::RationalConst { .. } | FuncExpr::Var => true,
            FuncExpr::Add(a, b)
            | FuncExpr::Sub(a, b)
            | FuncExpr::Mul(a, b)
            | FuncExpr::Div(a, b)
            | FuncExpr::Compose(a, b) => a.is_rational_function() && b.is_rational_function(),
            FuncExpr::IntPow(a, _) => a.is_rational_function(),
            _ => false,
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            FuncExpr::Add(..) | FuncExpr::Sub(..) => 1,
            FuncExpr::Mul(..) | FuncExpr::Div(..) => 2,
            FuncExpr::IntPow(..) => 3,
            FuncExpr::RationalConst { num, den } if num.is_negative() || !den.is_one() => 2,
            _ => 4,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "(")?;
            self.fmt_at(f, 0)?;
            return write!(f, ")");
        }
        match self {
            FuncExpr::RationalConst { num, den } => {
                if den.is_one() {
                    write!(f, "{num}")
                } else {
                    write!(f, "{num}/{den}")
                }
            }
            FuncExpr::Var => write!(f, "x"),
            FuncExpr::Add(a, b) => {
                a.fmt_at(f, 1)?;
                write!(f, " + ")?;
                b.fmt_at(f, 2)
            }
            FuncExpr::Sub(a, b) => {
                a.fmt_at(f, 1)?;
                write!(f, " - ")?;
                b.fmt_at(f, 2)
            }
            FuncExpr::Mul(a, b) => {
                a.fmt_at(f, 2)?;
                write!(f, "*")?;
                b.fmt_at(f, 3)
            }
            FuncExpr::Div(a, b) => {
                a.fmt_at(f, 2)?;
                write!(f, "/")?;
                b.fmt_at(f, 3)
            }
            FuncExpr::IntPow(a, e) => {
                a.fmt_at(f, 4)?;
                if *e < 0 {
                    write!(f, "^({e})")
                } else {
                    write!(f, "^{e}")
                }
            }
            FuncExpr::Compose(outer, inner) => match outer.as_ref() {
                FuncExpr::DigitSpread { .. } | FuncExpr::NthRootBranch { .. } => {
                    outer.fmt_leaf(f)?;
                    write!(f, "(")?;
                    inner.fmt_at(f, 0)?;
                    write!(f, ")")
                }
                _ => {
                    write!(f, "compose(")?;
                    outer.fmt_at(f, 0)?;
                    write!(f, ", ")?;
                    inner.fmt_at(f, 0)?;
                    write!(f, ")")
                }
            },
            FuncExpr::Piecewise(cases) => {
                write!(f, "cases{{")?;
                for (i, c) in cases.iter().enumerate() {
                    if i > 0 {
                        write!(f, "; ")?;
                    }
                    write!(f, "{}: ", c.guard)?;
                    c.expr.fmt_at(f, 0)?;
                }
                write!(f, "}}")
            }
            FuncExpr::DigitSpread { .. } | FuncExpr::NthRootBranch { .. } => {
                self.fmt_leaf(f)?;
                write!(f, "(x)")
            }
        }
    }

    fn fmt_leaf(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FuncExpr::DigitSpread { d } => write!(f, "spread{d}"),
            FuncExpr::NthRootBranch { n, branch } => match branch {
                RootBranch::Principal => write!(f, "root{n}"),
                RootBranch::Residue(r) => write!(f, "root{n}[{r}]"),
            },
            _ => unreachable!("not a leaf function"),
        }
    }
}

/// Prints the compact expression syntax accepted by the parser.
impl fmt::Display for FuncExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Guard::CosetIs { n, lambda } => write!(f, "coset({n},{lambda})"),
            Guard::ValuationIn(ValuationSet::Set(s)) => {
                let items: Vec<String> = s.iter().map(i64::to_string).collect();
                write!(f, "val({})", items.join(","))
            }
            Guard::ValuationIn(ValuationSet::Congruence { modulus, residue }) => {
                write!(f, "valmod({modulus},{residue})")
            }
            Guard::InBall { center, radius } => write!(f, "ball({center},{radius})"),
            Guard::Otherwise => write!(f, "else"),
        }
    }
}

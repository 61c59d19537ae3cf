use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// p-adic valuation of an element: a finite integer, or `+∞` for zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub enum Valuation {
    Finite(i64),
    Infinity,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == Valuation::Infinity
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinity => write!(f, "+inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) enum Repr {
    /// Known to be `≡ 0 mod p^abs`; `None` is an exact zero.
    Zero { abs: Option<i64> },
    /// `unit · p^val`, with the unit known modulo `p^rel`.
    Nonzero { val: i64, unit: BigInt, rel: i64 },
}

/// An element of ℚ_p known to finite precision.
///
/// Nonzero values carry a valuation `v`, a unit `u` with `0 < u < p^N` and
/// `p ∤ u`, and the relative precision `N`: the value is `u·p^v + O(p^(v+N))`.
/// A value all of whose known digits vanish is a [`Padic`] zero that remembers
/// the power of `p` it is known to be divisible by. Only zeros constructed
/// from an exact input (the integer `0`) are exact.
///
/// Equality, ordering and hashing are structural: two values compare equal
/// iff they have the same prime, digits and precision.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Padic {
    prime: u32,
    repr: Repr,
}

pub(crate) fn pow_p(p: u32, e: i64) -> BigInt {
    debug_assert!(e >= 0);
    BigInt::from(p).pow(e as u32)
}

/// Splits `m ≠ 0` as `p^k · m'` with `p ∤ m'`.
pub(crate) fn split_p(m: &BigInt, p: u32) -> (i64, BigInt) {
    debug_assert!(!m.is_zero());
    let pb = BigInt::from(p);
    let mut k = 0;
    let mut cur = m.clone();
    loop {
        let (q, r) = cur.div_rem(&pb);
        if !r.is_zero() {
            return (k, cur);
        }
        cur = q;
        k += 1;
    }
}

fn min_abs(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => Some(x.min(y)),
    }
}

pub(crate) fn mod_inverse(u: &BigInt, modulus: &BigInt) -> Option<BigInt> {
    if modulus.is_one() {
        return Some(BigInt::zero());
    }
    let ext = u.extended_gcd(modulus);
    if !ext.gcd.is_one() {
        return None;
    }
    Some(ext.x.mod_floor(modulus))
}

impl Padic {
    pub fn exact_zero(prime: u32) -> Padic {
        Padic {
            prime,
            repr: Repr::Zero { abs: None },
        }
    }

    /// The value known only to be divisible by `p^abs`.
    pub fn zero_mod(prime: u32, abs: i64) -> Padic {
        Padic {
            prime,
            repr: Repr::Zero { abs: Some(abs) },
        }
    }

    /// Builds `m · p^v` known modulo `p^abs`.
    pub fn from_scaled(prime: u32, m: &BigInt, v: i64, abs: i64) -> Padic {
        if abs <= v {
            return Padic::zero_mod(prime, abs);
        }
        let modulus = pow_p(prime, abs - v);
        let m = m.mod_floor(&modulus);
        if m.is_zero() {
            return Padic::zero_mod(prime, abs);
        }
        let (k, unit) = split_p(&m, prime);
        let val = v + k;
        Padic {
            prime,
            repr: Repr::Nonzero {
                val,
                unit,
                rel: abs - val,
            },
        }
    }

    /// Builds `unit · p^val` with `rel` known digits. The unit must be prime to p.
    pub fn from_unit(prime: u32, val: i64, unit: &BigInt, rel: i64) -> Result<Padic> {
        if rel < 1 {
            return Err(Error::InvalidArgument(format!(
                "relative precision must be at least 1, got {rel}"
            )));
        }
        let u = unit.mod_floor(&pow_p(prime, rel));
        if (&u % prime).is_zero() {
            return Err(Error::InvalidArgument(format!(
                "unit {unit} is divisible by {prime}"
            )));
        }
        Ok(Padic {
            prime,
            repr: Repr::Nonzero { val, unit: u, rel },
        })
    }

    /// The image of `a/b` in ℚ_p with `rel_prec` known unit digits. The
    /// integer `0` maps to an exact zero.
    pub fn from_rational(
        a: impl Into<BigInt>,
        b: impl Into<BigInt>,
        prime: u32,
        rel_prec: i64,
    ) -> Result<Padic> {
        let a = a.into();
        let b = b.into();
        if b.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if rel_prec < 1 {
            return Err(Error::InvalidArgument(format!(
                "relative precision must be at least 1, got {rel_prec}"
            )));
        }
        if a.is_zero() {
            return Ok(Padic::exact_zero(prime));
        }
        let (va, ua) = split_p(&a, prime);
        let (vb, ub) = split_p(&b, prime);
        let modulus = pow_p(prime, rel_prec);
        let inv = mod_inverse(&ub.mod_floor(&modulus), &modulus).ok_or(Error::DivisionByZero)?;
        let unit = (ua * inv).mod_floor(&modulus);
        Ok(Padic {
            prime,
            repr: Repr::Nonzero {
                val: va - vb,
                unit,
                rel: rel_prec,
            },
        })
    }

    pub fn from_integer(n: impl Into<BigInt>, prime: u32, rel_prec: i64) -> Result<Padic> {
        Padic::from_rational(n, 1, prime, rel_prec)
    }

    /// The residue class of the integer `t` modulo `p^k`.
    pub fn from_residue(prime: u32, t: &BigInt, k: i64) -> Padic {
        Padic::from_scaled(prime, t, 0, k)
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    pub fn valuation(&self) -> Valuation {
        match &self.repr {
            Repr::Zero { .. } => Valuation::Infinity,
            Repr::Nonzero { val, .. } => Valuation::Finite(*val),
        }
    }

    /// Absolute precision `M` such that the value is known modulo `p^M`;
    /// `None` for an exact zero.
    pub fn abs_precision(&self) -> Option<i64> {
        match &self.repr {
            Repr::Zero { abs } => *abs,
            Repr::Nonzero { val, rel, .. } => Some(val + rel),
        }
    }

    /// Number of known unit digits, `None` for zeros.
    pub fn rel_precision(&self) -> Option<i64> {
        match &self.repr {
            Repr::Zero { .. } => None,
            Repr::Nonzero { rel, .. } => Some(*rel),
        }
    }

    pub fn unit(&self) -> Option<&BigInt> {
        match &self.repr {
            Repr::Zero { .. } => None,
            Repr::Nonzero { unit, .. } => Some(unit),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero { .. })
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero { abs: None })
    }

    /// True for elements of ℤ_p (nonnegative valuation).
    pub fn is_integral(&self) -> bool {
        match &self.repr {
            Repr::Zero { .. } => true,
            Repr::Nonzero { val, .. } => *val >= 0,
        }
    }

    /// Unit digits `d_0 .. d_{N-1}` (empty for zeros).
    pub fn digits(&self) -> Vec<u8> {
        match &self.repr {
            Repr::Zero { .. } => Vec::new(),
            Repr::Nonzero { unit, rel, .. } => {
                let mut d = unit.magnitude().to_radix_le(self.prime);
                d.resize(*rel as usize, 0);
                d
            }
        }
    }

    /// Digits at the positions `lo..hi` of the p-adic expansion. Requires
    /// the value to be known modulo `p^hi` and to have valuation `≥ lo`.
    pub fn digits_window(&self, lo: i64, hi: i64) -> Result<Vec<u8>> {
        let width = (hi - lo).max(0) as usize;
        match &self.repr {
            Repr::Zero { abs } => {
                if let Some(a) = abs {
                    if *a < hi {
                        return Err(Error::PrecisionExhausted(format!(
                            "zero known mod p^{a}, digits up to p^{hi} requested"
                        )));
                    }
                }
                Ok(vec![0; width])
            }
            Repr::Nonzero { val, rel, .. } => {
                if val + rel < hi {
                    return Err(Error::PrecisionExhausted(format!(
                        "value known mod p^{}, digits up to p^{hi} requested",
                        val + rel
                    )));
                }
                if *val < lo {
                    return Err(Error::InvalidArgument(format!(
                        "valuation {val} below window start {lo}"
                    )));
                }
                let mut out = vec![0u8; width];
                let digits = self.digits();
                for (i, d) in digits.iter().enumerate() {
                    let pos = val + i as i64;
                    if pos >= hi {
                        break;
                    }
                    out[(pos - lo) as usize] = *d;
                }
                Ok(out)
            }
        }
    }

    fn check_prime(&self, other: &Padic) -> Result<()> {
        if self.prime != other.prime {
            return Err(Error::PrimeMismatch(self.prime, other.prime));
        }
        Ok(())
    }

    pub fn add(&self, other: &Padic) -> Result<Padic> {
        self.check_prime(other)?;
        let p = self.prime;
        let abs = min_abs(self.abs_precision(), other.abs_precision());
        let terms: Vec<(&BigInt, i64)> = [&self.repr, &other.repr]
            .into_iter()
            .filter_map(|r| match r {
                Repr::Nonzero { val, unit, .. } => Some((unit, *val)),
                Repr::Zero { .. } => None,
            })
            .collect();
        let Some(abs) = abs else {
            // both exact zeros
            return Ok(Padic::exact_zero(p));
        };
        let Some(lo) = terms.iter().map(|t| t.1).min() else {
            return Ok(Padic::zero_mod(p, abs));
        };
        if abs <= lo {
            return Ok(Padic::zero_mod(p, abs));
        }
        let mut m = BigInt::zero();
        for (u, v) in terms {
            m += u * pow_p(p, v - lo);
        }
        Ok(Padic::from_scaled(p, &m, lo, abs))
    }

    pub fn neg(&self) -> Padic {
        match &self.repr {
            Repr::Zero { .. } => self.clone(),
            Repr::Nonzero { val, unit, rel } => Padic {
                prime: self.prime,
                repr: Repr::Nonzero {
                    val: *val,
                    unit: pow_p(self.prime, *rel) - unit,
                    rel: *rel,
                },
            },
        }
    }

    pub fn sub(&self, other: &Padic) -> Result<Padic> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Padic) -> Result<Padic> {
        self.check_prime(other)?;
        let p = self.prime;
        Ok(match (&self.repr, &other.repr) {
            (Repr::Zero { abs: a }, Repr::Zero { abs: b }) => match (a, b) {
                (Some(a), Some(b)) => Padic::zero_mod(p, a + b),
                _ => Padic::exact_zero(p),
            },
            (Repr::Zero { abs }, Repr::Nonzero { val, .. })
            | (Repr::Nonzero { val, .. }, Repr::Zero { abs }) => match abs {
                Some(a) => Padic::zero_mod(p, a + val),
                None => Padic::exact_zero(p),
            },
            (
                Repr::Nonzero {
                    val: v1,
                    unit: u1,
                    rel: r1,
                },
                Repr::Nonzero {
                    val: v2,
                    unit: u2,
                    rel: r2,
                },
            ) => {
                let rel = *r1.min(r2);
                let unit = (u1 * u2).mod_floor(&pow_p(p, rel));
                Padic {
                    prime: p,
                    repr: Repr::Nonzero {
                        val: v1 + v2,
                        unit,
                        rel,
                    },
                }
            }
        })
    }

    pub fn inv(&self) -> Result<Padic> {
        match &self.repr {
            Repr::Zero { .. } => Err(Error::DivisionByZero),
            Repr::Nonzero { val, unit, rel } => {
                let modulus = pow_p(self.prime, *rel);
                let inv = mod_inverse(unit, &modulus).ok_or(Error::DivisionByZero)?;
                Ok(Padic {
                    prime: self.prime,
                    repr: Repr::Nonzero {
                        val: -val,
                        unit: inv,
                        rel: *rel,
                    },
                })
            }
        }
    }

    pub fn div(&self, other: &Padic) -> Result<Padic> {
        self.check_prime(other)?;
        let Repr::Nonzero { val: vy, .. } = &other.repr else {
            return Err(Error::DivisionByZero);
        };
        match &self.repr {
            Repr::Zero { abs: Some(a) } => Ok(Padic::zero_mod(self.prime, a - vy)),
            Repr::Zero { abs: None } => Ok(Padic::exact_zero(self.prime)),
            Repr::Nonzero { .. } => self.mul(&other.inv()?),
        }
    }

    /// Integer power. Negative exponents divide, and fail on zero.
    pub fn pow(&self, e: i64) -> Result<Padic> {
        if e < 0 {
            return self.inv()?.pow(-e);
        }
        if e == 0 {
            let rel = match &self.repr {
                Repr::Nonzero { rel, .. } => *rel,
                Repr::Zero { abs } => abs.unwrap_or(64).max(1),
            };
            return Padic::from_integer(1, self.prime, rel);
        }
        let mut base = self.clone();
        let mut acc: Option<Padic> = None;
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base)?,
                });
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc.expect("positive exponent"))
    }

    /// Multiplies by an integer without losing precision.
    pub fn mul_int(&self, n: i64) -> Padic {
        if n == 0 {
            return Padic::exact_zero(self.prime);
        }
        let (k, u) = split_p(&BigInt::from(n), self.prime);
        match &self.repr {
            Repr::Zero { .. } => self.shift(k),
            Repr::Nonzero { val, unit, rel } => Padic {
                prime: self.prime,
                repr: Repr::Nonzero {
                    val: val + k,
                    unit: (unit * u).mod_floor(&pow_p(self.prime, *rel)),
                    rel: *rel,
                },
            },
        }
    }

    /// Multiplies by `p^k` (exact shift of the valuation).
    pub fn shift(&self, k: i64) -> Padic {
        let repr = match &self.repr {
            Repr::Zero { abs } => Repr::Zero {
                abs: abs.map(|a| a + k),
            },
            Repr::Nonzero { val, unit, rel } => Repr::Nonzero {
                val: val + k,
                unit: unit.clone(),
                rel: *rel,
            },
        };
        Padic {
            prime: self.prime,
            repr,
        }
    }

    /// Forgets every digit at or above `p^abs`.
    pub fn truncate(&self, abs: i64) -> Padic {
        match &self.repr {
            Repr::Zero { abs: a } => Padic {
                prime: self.prime,
                repr: Repr::Zero {
                    abs: min_abs(*a, Some(abs)),
                },
            },
            Repr::Nonzero { val, unit, rel } => {
                if abs <= *val {
                    return Padic::zero_mod(self.prime, abs);
                }
                let new_rel = (*rel).min(abs - val);
                Padic {
                    prime: self.prime,
                    repr: Repr::Nonzero {
                        val: *val,
                        unit: unit.mod_floor(&pow_p(self.prime, new_rel)),
                        rel: new_rel,
                    },
                }
            }
        }
    }

    /// Treats the known digits as an exact value and pads it with zero digits
    /// up to `rel` relative digits. Zeros become the exact zero.
    ///
    /// This is how a finite residue is promoted to a concrete sample point.
    pub fn representative(&self, rel: i64) -> Padic {
        match &self.repr {
            Repr::Zero { .. } => Padic::exact_zero(self.prime),
            Repr::Nonzero { val, unit, rel: r } => Padic {
                prime: self.prime,
                repr: Repr::Nonzero {
                    val: *val,
                    unit: unit.clone(),
                    rel: (*r).max(rel),
                },
            },
        }
    }

    /// The canonical representative as an exact rational `num / p^den_exp`
    /// (`den_exp = 0` for integral values), with `0 ≤ num < p^(abs + den_exp)`.
    pub fn to_rational_parts(&self) -> (BigInt, i64) {
        match &self.repr {
            Repr::Zero { .. } => (BigInt::zero(), 0),
            Repr::Nonzero { val, unit, .. } => {
                if *val >= 0 {
                    (unit * pow_p(self.prime, *val), 0)
                } else {
                    (unit.clone(), -val)
                }
            }
        }
    }

    /// The canonical integer representative in `[0, p^abs)`, for integral values.
    pub fn to_integer(&self) -> Option<BigInt> {
        let (n, d) = self.to_rational_parts();
        (d == 0).then_some(n)
    }

    /// Valuation of `self − other`, failing when the difference vanishes to
    /// all known digits.
    pub fn val_diff(&self, other: &Padic) -> Result<i64> {
        let d = self.sub(other)?;
        match d.valuation() {
            Valuation::Finite(v) => Ok(v),
            Valuation::Infinity => Err(Error::IndistinguishableAtPrecision),
        }
    }

    /// Whether `self ≡ other` to the common known precision.
    pub fn agrees_with(&self, other: &Padic) -> Result<bool> {
        Ok(self.sub(other)?.is_zero())
    }

    /// Whether `self ≡ other (mod p^k)`. Requires both to be known mod `p^k`.
    pub fn congruent_mod(&self, other: &Padic, k: i64) -> Result<bool> {
        let d = self.sub(other)?;
        match d.valuation() {
            Valuation::Finite(v) => Ok(v >= k),
            Valuation::Infinity => match d.abs_precision() {
                Some(a) if a < k => Err(Error::PrecisionExhausted(format!(
                    "difference known only mod p^{a}, congruence mod p^{k} requested"
                ))),
                _ => Ok(true),
            },
        }
    }
}

/// p-adic valuation of a nonzero rational `a/b`.
pub fn rational_valuation(a: &BigInt, b: &BigInt, p: u32) -> Valuation {
    if a.is_zero() {
        return Valuation::Infinity;
    }
    Valuation::Finite(split_p(a, p).0 - split_p(b, p).0)
}

/// Shorthand for the valuation of an element.
pub fn val(x: &Padic) -> Valuation {
    x.valuation()
}

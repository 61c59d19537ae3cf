//! Canonical text form of [`Padic`] values.
//!
//! ```text
//! p^v * (d0 + d1*p + d2*p^2 + ... + d_{N-1}*p^{N-1}) + O(p^{v+N})
//! ```
//!
//! Digits are written in base 10 with `0 ≤ d_i < p` and `d0 ≠ 0`. A value
//! known to be divisible by `p^M` prints as `O(p^M)`, and the exact zero as
//! `0`. The printer and parser round-trip bit-exactly.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;

use super::number::{pow_p, Padic};
use crate::error::{Error, Result};

impl fmt::Display for Padic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.prime();
        if self.is_exact_zero() {
            return write!(f, "0");
        }
        let abs = self.abs_precision().expect("inexact");
        let Some(v) = self.valuation().finite() else {
            return write!(f, "O({p}^{abs})");
        };
        write!(f, "{p}^{v} * (")?;
        for (i, d) in self.digits().iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            match i {
                0 => write!(f, "{d}")?,
                1 => write!(f, "{d}*{p}")?,
                _ => write!(f, "{d}*{p}^{i}")?,
            }
        }
        write!(f, ") + O({p}^{abs})")
    }
}

impl Padic {
    /// Short form used in reports: the canonical representative followed by
    /// the error term, e.g. `10 + O(5^8)` or `7/25 + O(5^2)`.
    pub fn to_compact_string(&self) -> String {
        let p = self.prime();
        if self.is_exact_zero() {
            return "0".to_string();
        }
        let abs = self.abs_precision().expect("inexact");
        if self.is_zero() {
            return format!("O({p}^{abs})");
        }
        let (num, den_exp) = self.to_rational_parts();
        if den_exp == 0 {
            format!("{num} + O({p}^{abs})")
        } else {
            format!("{num}/{} + O({p}^{abs})", pow_p(p, den_exp))
        }
    }
}

impl serde::Serialize for Padic {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Padic", 6)?;
        st.serialize_field("prime", &self.prime())?;
        st.serialize_field("text", &self.to_string())?;
        st.serialize_field("compact", &self.to_compact_string())?;
        st.serialize_field("valuation", &self.valuation().finite())?;
        st.serialize_field("abs_precision", &self.abs_precision())?;
        st.serialize_field("digits", &self.digits())?;
        st.end()
    }
}

fn parse_err(s: &str, why: &str) -> Error {
    Error::Parse(format!("{why} in p-adic literal `{s}`"))
}

/// Parses `p^e` and returns `(p, e)`.
fn parse_power(s: &str, whole: &str) -> Result<(u32, i64)> {
    let (base, exp) = s
        .split_once('^')
        .ok_or_else(|| parse_err(whole, "expected `p^e`"))?;
    let base: u32 = base.parse().map_err(|_| parse_err(whole, "bad prime"))?;
    let exp: i64 = exp.parse().map_err(|_| parse_err(whole, "bad exponent"))?;
    Ok((base, exp))
}

/// Parses the canonical form printed by [`Padic`]'s `Display`.
pub fn parse_canonical(input: &str) -> Result<Padic> {
    let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    if s == "0" {
        return Err(parse_err(
            input,
            "the exact zero carries no prime; use Padic::exact_zero",
        ));
    }
    if let Some(inner) = s.strip_prefix("O(").and_then(|r| r.strip_suffix(')')) {
        let (p, abs) = parse_power(inner, input)?;
        return Ok(Padic::zero_mod(p, abs));
    }
    let (head, rest) = s
        .split_once("*(")
        .ok_or_else(|| parse_err(input, "expected `p^v * (`"))?;
    let (p, v) = parse_power(head, input)?;
    let (body, tail) = rest
        .split_once(")+O(")
        .ok_or_else(|| parse_err(input, "expected `) + O(`"))?;
    let tail = tail
        .strip_suffix(')')
        .ok_or_else(|| parse_err(input, "unterminated error term"))?;
    let (p2, abs) = parse_power(tail, input)?;
    if p2 != p {
        return Err(parse_err(input, "prime differs in error term"));
    }
    let mut digits = Vec::new();
    for (i, term) in body.split('+').enumerate() {
        let (d, power) = match term.split_once('*') {
            None => (term, None),
            Some((d, pw)) => (d, Some(pw)),
        };
        let d: u32 = d.parse().map_err(|_| parse_err(input, "bad digit"))?;
        if d >= p {
            return Err(parse_err(input, "digit out of range"));
        }
        let expected = match i {
            0 => None,
            1 => Some(p.to_string()),
            _ => Some(format!("{p}^{i}")),
        };
        if power.map(str::to_string) != expected {
            return Err(parse_err(input, "digit terms out of order"));
        }
        digits.push(d);
    }
    if digits.first().copied().unwrap_or(0) == 0 {
        return Err(parse_err(input, "leading digit must be nonzero"));
    }
    let n = digits.len() as i64;
    if abs != v + n {
        return Err(parse_err(input, "error term does not match digit count"));
    }
    let mut unit = BigInt::zero();
    for d in digits.iter().rev() {
        unit = unit * p + d;
    }
    Padic::from_unit(p, v, &unit, n)
}

impl FromStr for Padic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Padic> {
        parse_canonical(s)
    }
}

/// Parses a point given on a command line or in a test corpus, for prime `p`
/// at relative precision `rel`. Accepts the canonical form, the compact form
/// (`n + O(p^M)`, `n/d + O(p^M)`), and plain rationals (`7`, `-3`, `1/5`).
pub fn parse_point(input: &str, p: u32, rel: i64) -> Result<Padic> {
    let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    if s.contains("*(") || s.starts_with("O(") {
        let x = parse_canonical(&s)?;
        if x.prime() != p {
            return Err(Error::PrimeMismatch(x.prime(), p));
        }
        return Ok(x);
    }
    if let Some((value, err)) = s.split_once("+O(") {
        let err = err
            .strip_suffix(')')
            .ok_or_else(|| parse_err(input, "unterminated error term"))?;
        let (p2, abs) = parse_power(err, input)?;
        if p2 != p {
            return Err(Error::PrimeMismatch(p2, p));
        }
        let (a, b) = parse_rational(value).ok_or_else(|| parse_err(input, "bad value"))?;
        let x = Padic::from_rational(a, b, p, abs.max(1) + 64)?;
        return Ok(x.truncate(abs));
    }
    let (a, b) = parse_rational(&s).ok_or_else(|| parse_err(input, "bad rational"))?;
    Padic::from_rational(a, b, p, rel)
}

/// Parses `a` or `a/b` with integer `a`, `b`.
pub fn parse_rational(s: &str) -> Option<(BigInt, BigInt)> {
    let s = s.trim();
    match s.split_once('/') {
        None => Some((s.parse().ok()?, BigInt::from(1))),
        Some((a, b)) => {
            let b: BigInt = b.trim().parse().ok()?;
            if b.is_zero() {
                return None;
            }
            Some((a.trim().parse().ok()?, b))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prints_canonical_form() {
        let x = Padic::from_integer(10, 5, 3).unwrap(); // 2*5, digits 2,0,0
        assert_eq!(x.to_string(), "5^1 * (2 + 0*5 + 0*5^2) + O(5^4)");
        let y = Padic::from_rational(7, 25, 5, 2).unwrap();
        assert_eq!(y.to_string(), "5^-2 * (2 + 1*5) + O(5^0)");
        assert_eq!(Padic::zero_mod(3, 4).to_string(), "O(3^4)");
        assert_eq!(Padic::exact_zero(3).to_string(), "0");
    }

    #[test]
    fn parses_its_own_output() {
        for s in [
            "5^1 * (2 + 0*5 + 1*5^2) + O(5^4)",
            "3^0 * (1) + O(3^1)",
            "7^-3 * (6 + 6*7 + 0*7^2 + 1*7^3) + O(7^1)",
            "O(2^5)",
        ] {
            let x: Padic = s.parse().unwrap();
            assert_eq!(x.to_string(), s);
        }
    }

    #[test]
    fn rejects_malformed_literals() {
        for s in [
            "5^1 * (0 + 1*5) + O(5^3)",
            "5^1 * (2 + 7*5) + O(5^3)",
            "5^1 * (2 + 1*5) + O(5^4)",
            "5^1 * (2 + 1*5^2) + O(5^3)",
            "5^1 * (2 + 1*5) + O(7^3)",
            "hello",
        ] {
            assert!(s.parse::<Padic>().is_err(), "{s}");
        }
    }

    #[test]
    fn compact_form() {
        let x = Padic::from_integer(10, 5, 7).unwrap();
        assert_eq!(x.to_compact_string(), "10 + O(5^8)");
        let y = Padic::from_rational(7, 25, 5, 2).unwrap();
        assert_eq!(y.to_compact_string(), "7/25 + O(5^0)");
    }

    #[test]
    fn points() {
        let x = parse_point("1/3", 5, 3).unwrap();
        assert_eq!(x.unit().unwrap(), &BigInt::from(42));
        let y = parse_point("10 + O(5^8)", 5, 3).unwrap();
        assert_eq!(y.abs_precision(), Some(8));
        assert_eq!(y.to_compact_string(), "10 + O(5^8)");
        assert!(parse_point("0", 5, 3).unwrap().is_exact_zero());
        assert!(parse_point("1/0", 5, 3).is_err());
    }
}

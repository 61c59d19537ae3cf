use std::collections::HashSet;
use std::fmt;
use std::ops::Add;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::padic::{Ball, Padic};

/// An exact Haar measure, normalized so that `μ(ℤ_p) = 1`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MeasureValue(pub BigRational);

impl MeasureValue {
    pub fn zero() -> MeasureValue {
        MeasureValue(BigRational::zero())
    }

    pub fn one() -> MeasureValue {
        MeasureValue(BigRational::one())
    }

    /// `p^(−e)`.
    pub fn p_power(p: u32, e: i64) -> MeasureValue {
        let base = BigInt::from(p).pow(e.unsigned_abs() as u32);
        MeasureValue(if e >= 0 {
            BigRational::new(BigInt::one(), base)
        } else {
            BigRational::from_integer(base)
        })
    }

    pub fn from_ratio(num: i64, den: i64) -> MeasureValue {
        MeasureValue(BigRational::new(num.into(), den.into()))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn scale(&self, by: &MeasureValue) -> MeasureValue {
        MeasureValue(&self.0 * &by.0)
    }

    /// Signed difference, for reporting discrepancies.
    pub fn minus(&self, other: &MeasureValue) -> MeasureValue {
        MeasureValue(&self.0 - &other.0)
    }
}

impl Add for MeasureValue {
    type Output = MeasureValue;
    fn add(self, rhs: MeasureValue) -> MeasureValue {
        MeasureValue(self.0 + rhs.0)
    }
}

impl std::iter::Sum for MeasureValue {
    fn sum<I: Iterator<Item = MeasureValue>>(iter: I) -> MeasureValue {
        iter.fold(MeasureValue::zero(), Add::add)
    }
}

impl fmt::Display for MeasureValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl serde::Serialize for MeasureValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `μ(B) = p^(−r)` for the ball `{v(x − c) ≥ r}`.
pub fn ball_measure(ball: &Ball) -> MeasureValue {
    MeasureValue::p_power(ball.prime(), ball.radius())
}

/// `|S|·p^(−k)` for a set of residues mod `p^k` (duplicates counted once).
pub fn residue_set_measure(prime: u32, k: i64, residues: &[Padic]) -> MeasureValue {
    let distinct: HashSet<Padic> = residues.iter().map(|r| r.truncate(k)).collect();
    MeasureValue(
        BigRational::from_integer(BigInt::from(distinct.len())) * MeasureValue::p_power(prime, k).0,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balls() {
        assert_eq!(ball_measure(&Ball::integers(7)), MeasureValue::one());
        let b = Ball::from_rational_center(1, 1, 5, 1).unwrap();
        assert_eq!(ball_measure(&b), MeasureValue::from_ratio(1, 5));
        let b = Ball::from_rational_center(0, 1, 3, -2).unwrap();
        assert_eq!(ball_measure(&b), MeasureValue::from_ratio(9, 1));
        assert_eq!(ball_measure(&b).to_string(), "9");
    }

    #[test]
    fn residue_sets() {
        let all: Vec<Padic> = (0..25)
            .map(|n| Padic::from_residue(5, &BigInt::from(n), 2))
            .collect();
        assert_eq!(residue_set_measure(5, 2, &all), MeasureValue::one());
        assert_eq!(residue_set_measure(5, 2, &[]), MeasureValue::zero());
        let squares: Vec<Padic> = (1..25)
            .filter(|u| u % 5 != 0)
            .map(|u| Padic::from_residue(5, &BigInt::from(u * u % 25), 2))
            .collect();
        assert_eq!(
            residue_set_measure(5, 2, &squares),
            MeasureValue::from_ratio(2, 5)
        );
    }
}

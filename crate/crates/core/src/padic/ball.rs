use std::fmt;

use num_bigint::BigInt;

use super::number::{pow_p, Padic, Valuation};
use crate::error::{Error, Result};

/// Default cap on the number of residues a single enumeration may produce.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1_000_000;

/// The closed valuation ball `{x : v(x − center) ≥ radius}`.
///
/// The center is stored reduced modulo `p^radius`, so two balls are equal
/// exactly when their primes, radii and reduced centers agree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ball {
    prime: u32,
    radius: i64,
    center: Padic,
}

/// How two balls of the same prime sit relative to each other.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum BallRelation {
    Disjoint,
    Equal,
    /// The first ball is strictly inside the second.
    Inside,
    /// The first ball strictly contains the second.
    Contains,
}

impl Ball {
    pub fn new(center: &Padic, radius: i64) -> Result<Ball> {
        if let Some(a) = center.abs_precision() {
            if a < radius {
                return Err(Error::InsufficientPrecision(format!(
                    "ball center known mod p^{a}, radius {radius} requested"
                )));
            }
        }
        Ok(Ball {
            prime: center.prime(),
            radius,
            center: center.truncate(radius),
        })
    }

    /// The valuation ring ℤ_p.
    pub fn integers(prime: u32) -> Ball {
        Ball {
            prime,
            radius: 0,
            center: Padic::zero_mod(prime, 0),
        }
    }

    pub fn from_rational_center(
        a: impl Into<BigInt>,
        b: impl Into<BigInt>,
        prime: u32,
        radius: i64,
    ) -> Result<Ball> {
        // enough digits to reach p^radius from any valuation
        let a = a.into();
        let b = b.into();
        let v = super::number::rational_valuation(&a, &b, prime)
            .finite()
            .unwrap_or(radius);
        let rel = (radius - v).max(1);
        Ball::new(&Padic::from_rational(a, b, prime, rel)?, radius)
    }

    /// Converts the open ball `{|x − c| < p^(−k)}` to its closed form
    /// `{v(x − c) ≥ k + 1}` (the value group is discrete).
    pub fn from_open(center: &Padic, k: i64) -> Result<Ball> {
        Ball::new(center, k + 1)
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    pub fn radius(&self) -> i64 {
        self.radius
    }

    /// The center reduced modulo `p^radius`.
    pub fn center(&self) -> &Padic {
        &self.center
    }

    /// The canonical center as an exact point with `rel` padding digits.
    pub fn center_point(&self, rel: i64) -> Padic {
        self.center.representative(rel)
    }

    pub fn contains(&self, x: &Padic) -> Result<bool> {
        if x.prime() != self.prime {
            return Err(Error::PrimeMismatch(x.prime(), self.prime));
        }
        if let Some(a) = x.abs_precision() {
            if a < self.radius {
                return Err(Error::InsufficientPrecision(format!(
                    "point known mod p^{a}, ball radius is {}",
                    self.radius
                )));
            }
        }
        let d = x.sub(&self.center)?;
        Ok(match d.valuation() {
            Valuation::Finite(v) => v >= self.radius,
            Valuation::Infinity => true,
        })
    }

    /// Ultrametric dichotomy: two balls are nested or disjoint.
    pub fn relation(&self, other: &Ball) -> Result<BallRelation> {
        if self.prime != other.prime {
            return Err(Error::PrimeMismatch(self.prime, other.prime));
        }
        let (small, big) = if self.radius >= other.radius {
            (self, other)
        } else {
            (other, self)
        };
        if !big.contains(&small.center)? {
            return Ok(BallRelation::Disjoint);
        }
        Ok(if self.radius == other.radius {
            BallRelation::Equal
        } else if self.radius > other.radius {
            BallRelation::Inside
        } else {
            BallRelation::Contains
        })
    }

    pub fn is_subset_of(&self, other: &Ball) -> Result<bool> {
        Ok(matches!(
            self.relation(other)?,
            BallRelation::Equal | BallRelation::Inside
        ))
    }

    /// Number of residues of this ball modulo `p^k`, or `None` on overflow.
    pub fn residue_count(&self, k: i64) -> Option<u128> {
        if k < self.radius {
            return None;
        }
        (self.prime as u128).checked_pow(u32::try_from(k - self.radius).ok()?)
    }

    fn check_budget(&self, k: i64, cap: u64) -> Result<u64> {
        if k < self.radius {
            return Err(Error::InvalidArgument(format!(
                "enumeration precision {k} below ball radius {}",
                self.radius
            )));
        }
        match self.residue_count(k) {
            Some(n) if n <= cap as u128 => Ok(n as u64),
            _ => Err(Error::BudgetExceeded {
                needed: format!("{}^{}", self.prime, k - self.radius),
                cap,
            }),
        }
    }

    /// All residues of the ball modulo `p^k`, each known exactly to `p^k`,
    /// in increasing order of their digits above the radius.
    pub fn enumerate(&self, k: i64, cap: u64) -> Result<Vec<Padic>> {
        let n = self.check_budget(k, cap)?;
        let vc = self.center.valuation().finite().unwrap_or(k);
        let c = self.center.representative((k - vc).max(1));
        (0..n)
            .map(|t| {
                let step = Padic::from_scaled(self.prime, &BigInt::from(t), self.radius, k);
                Ok(c.add(&step)?.truncate(k))
            })
            .collect()
    }

    /// Like [`Ball::enumerate`], but every residue is promoted to an exact
    /// sample point with at least `rel` relative digits.
    pub fn sample_points(&self, k: i64, cap: u64, rel: i64) -> Result<Vec<Padic>> {
        Ok(self
            .enumerate(k, cap)?
            .into_iter()
            .map(|x| x.representative(rel))
            .collect())
    }

    /// The `p` balls of radius `radius + 1` partitioning this one.
    pub fn children(&self) -> Vec<Ball> {
        self.sub_balls(self.radius + 1, u64::MAX)
            .expect("p children always fit")
    }

    /// The partition of this ball into balls of the given (larger) radius.
    pub fn sub_balls(&self, radius: i64, cap: u64) -> Result<Vec<Ball>> {
        Ok(self
            .enumerate(radius, cap)?
            .into_iter()
            .map(|c| Ball {
                prime: self.prime,
                radius,
                center: c,
            })
            .collect())
    }

    /// Image of the ball under `x ↦ c·x` for a nonzero constant `c`.
    pub fn scaled(&self, c: &Padic) -> Result<Ball> {
        let e = c.valuation().finite().ok_or(Error::DivisionByZero)?;
        let vc = self.center.valuation().finite().unwrap_or(self.radius);
        let rel = (self.radius - vc).max(1) + 2;
        let center = self.center_point(rel).mul(&c.representative(rel))?;
        Ball::new(&center, self.radius + e)
    }

    /// Short form `c:r` with the canonical center as a rational.
    pub fn to_short_string(&self) -> String {
        let (num, den) = self.center.to_rational_parts();
        if den == 0 {
            format!("{num}:{}", self.radius)
        } else {
            format!("{num}/{}:{}", pow_p(self.prime, den), self.radius)
        }
    }

    /// Parses `c:r` where `c` is an integer or rational.
    pub fn parse_short(s: &str, prime: u32) -> Result<Ball> {
        let (c, r) = s
            .rsplit_once(':')
            .ok_or_else(|| Error::Parse(format!("ball `{s}` must look like center:radius")))?;
        let r: i64 = r
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad ball radius in `{s}`")))?;
        let (a, b) = super::text::parse_rational(c)
            .ok_or_else(|| Error::Parse(format!("bad ball center in `{s}`")))?;
        Ball::from_rational_center(a, b, prime, r)
    }
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "B({}, r={})",
            self.to_short_string().rsplit_once(':').unwrap().0,
            self.radius
        )
    }
}

impl serde::Serialize for Ball {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Ball", 3)?;
        st.serialize_field("prime", &self.prime)?;
        st.serialize_field(
            "center",
            &self.to_short_string().rsplit_once(':').unwrap().0,
        )?;
        st.serialize_field("radius", &self.radius)?;
        st.end()
    }
}

/// The smallest ball containing both `x` and `y`: `B(x, v(x − y))`.
pub fn smallest_ball_containing(x: &Padic, y: &Padic) -> Result<Ball> {
    let r = x.val_diff(y)?;
    Ball::new(x, r)
}

/// Whether `z` lies between `x` and `y`, i.e. in the smallest ball containing
/// both.
pub fn between(z: &Padic, x: &Padic, y: &Padic) -> Result<bool> {
    let d = x.val_diff(y)?;
    let zx = z.sub(x)?;
    match zx.valuation() {
        Valuation::Finite(v) => Ok(v >= d),
        Valuation::Infinity => match zx.abs_precision() {
            Some(a) if a < d => Err(Error::IndistinguishableAtPrecision),
            _ => Ok(true),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(n: i64, p: u32) -> Padic {
        Padic::from_integer(n, p, 8).unwrap()
    }

    fn residues(b: &Ball, k: i64) -> Vec<BigInt> {
        b.enumerate(k, 1000)
            .unwrap()
            .iter()
            .map(|x| x.to_integer().unwrap())
            .collect()
    }

    #[test]
    fn between_examples() {
        let p = 3;
        assert!(between(&int(1, p), &int(1, p), &int(10, p)).unwrap());
        assert!(!between(&int(4, p), &int(1, p), &int(10, p)).unwrap());
        assert!(between(&int(10, p), &int(1, p), &int(4, p)).unwrap());
    }

    #[test]
    fn smallest_ball_examples() {
        let p = 5;
        let b = smallest_ball_containing(&int(1, p), &int(6, p)).unwrap();
        assert_eq!(b, Ball::from_rational_center(1, 1, p, 1).unwrap());
        let b = smallest_ball_containing(&int(1, p), &int(2, p)).unwrap();
        assert_eq!(b.radius(), 0);
        let b = smallest_ball_containing(&int(3, p), &int(128, p)).unwrap();
        assert_eq!(b, Ball::from_rational_center(3, 1, p, 3).unwrap());
        assert_eq!(
            smallest_ball_containing(&int(3, p), &int(3, p)),
            Err(Error::IndistinguishableAtPrecision)
        );
    }

    #[test]
    fn enumeration_examples() {
        let b = Ball::integers(3);
        assert_eq!(residues(&b, 1), vec![0.into(), 1.into(), 2.into()]);
        let b = Ball::from_rational_center(1, 1, 3, 1).unwrap();
        assert_eq!(residues(&b, 2), vec![1.into(), 4.into(), 7.into()]);
        let b = Ball::from_rational_center(1, 1, 2, 2).unwrap();
        assert_eq!(residues(&b, 3), vec![1.into(), 5.into()]);
    }

    #[test]
    fn enumeration_budget() {
        let b = Ball::integers(7);
        assert!(matches!(
            b.enumerate(8, 1000),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn canonical_centers() {
        let a = Ball::from_rational_center(1, 1, 5, 1).unwrap();
        let b = Ball::from_rational_center(26, 1, 5, 1).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.relation(&b).unwrap(), BallRelation::Equal);
        let c = Ball::from_rational_center(6, 1, 5, 2).unwrap();
        assert_eq!(c.relation(&a).unwrap(), BallRelation::Inside);
        assert_eq!(a.relation(&c).unwrap(), BallRelation::Contains);
        let d = Ball::from_rational_center(2, 1, 5, 1).unwrap();
        assert_eq!(a.relation(&d).unwrap(), BallRelation::Disjoint);
    }

    #[test]
    fn negative_radius_balls() {
        let b = Ball::from_rational_center(0, 1, 3, -2).unwrap();
        let pts = b.enumerate(0, 100).unwrap();
        assert_eq!(pts.len(), 9);
        assert!(pts.iter().all(|x| b.contains(x).unwrap()));
        // 1/9 lies in the ball around 0, 1/27 does not
        let b9 = Ball::from_rational_center(1, 9, 3, -2).unwrap();
        assert_eq!(b9, b);
        let b27 = Ball::from_rational_center(1, 27, 3, -2).unwrap();
        assert_eq!(b27.to_short_string(), "1/27:-2");
        assert_eq!(b27.relation(&b).unwrap(), BallRelation::Disjoint);
    }

    #[test]
    fn open_ball_conversion() {
        let b = Ball::from_open(&int(0, 5), 0).unwrap();
        assert_eq!(b.radius(), 1);
    }

    #[test]
    fn short_form_roundtrip() {
        let b = Ball::parse_short("1:1", 7).unwrap();
        assert_eq!(b.to_short_string(), "1:1");
        assert_eq!(Ball::parse_short("8:1", 7).unwrap(), b);
    }
}

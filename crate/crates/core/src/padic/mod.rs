//! Exact arithmetic on elements of ℚ_p at finite precision, ultrametric
//! balls, and residue enumeration.

mod ball;
mod digits;
mod number;
mod text;

pub use ball::{between, smallest_ball_containing, Ball, BallRelation, DEFAULT_ENUMERATION_CAP};
pub use digits::DigitTable;
pub use number::{rational_valuation, val, Padic, Valuation};
pub use text::{parse_canonical, parse_point, parse_rational};

/// Trial-division primality test, enough for the primes used at desk scale.
pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// `v_p(n)` for a nonzero integer.
pub fn vp_int(n: i64, p: u32) -> u32 {
    assert!(n != 0, "valuation of zero");
    let mut n = n.unsigned_abs();
    let mut v = 0;
    while n.is_multiple_of(p as u64) {
        n /= p as u64;
        v += 1;
    }
    v
}

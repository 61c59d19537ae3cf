use serde::Serialize;

use super::eval::eval;
use super::expr::FuncExpr;
use crate::error::{Error, Result};
use crate::padic::{Ball, Padic};

/// The residues mod `p^k_out` hit by `f` on the residues of a ball mod `p^k_in`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ImageSet {
    pub prime: u32,
    pub k_in: i64,
    pub k_out: i64,
    /// Number of input residues.
    pub inputs: usize,
    /// Distinct output residues, sorted.
    #[serde(skip)]
    pub residues: Vec<Padic>,
    pub count: usize,
}

/// Pairs each residue of `ball` mod `p^k_in` with `f` of it reduced mod
/// `p^k_out`. Inputs are known only to `p^k_in`.
///
/// Fails with `PrecisionInsufficientForImage` when some value is not
/// determined modulo `p^k_out` by its input residue.
pub fn image_map(
    f: &FuncExpr,
    ball: &Ball,
    k_in: i64,
    k_out: i64,
    cap: u64,
) -> Result<Vec<(Padic, Padic)>> {
    let inputs = ball.enumerate(k_in, cap)?;
    let rel = k_out.abs() + k_in.abs() + 16;
    inputs
        .into_iter()
        .map(|x| {
            let y = eval(f, &x, rel)?;
            if let Some(a) = y.abs_precision() {
                if a < k_out {
                    return Err(Error::PrecisionInsufficientForImage(format!(
                        "f({}) is known only mod p^{a}, p^{k_out} requested",
                        x.to_compact_string()
                    )));
                }
            }
            let y = y.truncate(k_out);
            Ok((x, y))
        })
        .collect()
}

/// The distinct residues of [`image_map`].
pub fn image_residues(
    f: &FuncExpr,
    ball: &Ball,
    k_in: i64,
    k_out: i64,
    cap: u64,
) -> Result<ImageSet> {
    let pairs = image_map(f, ball, k_in, k_out, cap)?;
    let inputs = pairs.len();
    let mut residues: Vec<Padic> = pairs.into_iter().map(|(_, y)| y).collect();
    residues.sort();
    residues.dedup();
    Ok(ImageSet {
        prime: ball.prime(),
        k_in,
        k_out,
        inputs,
        count: residues.len(),
        residues,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func::parse_expr;
    use num_bigint::BigInt;

    fn ints(s: &ImageSet) -> Vec<BigInt> {
        let mut v: Vec<BigInt> = s.residues.iter().map(|r| r.to_integer().unwrap()).collect();
        v.sort();
        v
    }

    #[test]
    fn identity_on_z3() {
        let f = parse_expr("x", 3).unwrap();
        let s = image_residues(&f, &Ball::integers(3), 2, 2, 1000).unwrap();
        assert_eq!(ints(&s), (0..9).map(BigInt::from).collect::<Vec<_>>());
    }

    #[test]
    fn squares_on_one_plus_5z5() {
        let f = parse_expr("x^2", 5).unwrap();
        let b = Ball::from_rational_center(1, 1, 5, 1).unwrap();
        let s = image_residues(&f, &b, 3, 3, 1000).unwrap();
        let want: Vec<BigInt> = (0..125).filter(|r| r % 5 == 1).map(BigInt::from).collect();
        assert_eq!(ints(&s), want);
    }

    #[test]
    fn digit_spread_image() {
        let f = parse_expr("spread2(x)", 3).unwrap();
        let s = image_residues(&f, &Ball::integers(3), 2, 4, 1000).unwrap();
        let mut want: Vec<BigInt> = (0..3)
            .flat_map(|a0| (0..3).map(move |a1| BigInt::from(a0 + 9 * a1)))
            .collect();
        want.sort();
        assert_eq!(ints(&s), want);
        assert!(matches!(
            image_residues(&f, &Ball::integers(3), 2, 5, 1000),
            Err(Error::PrecisionInsufficientForImage(_))
        ));
    }
}

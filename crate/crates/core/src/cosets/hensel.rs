use crate::error::{Error, Result};
use crate::padic::{Padic, Valuation};

/// A polynomial in one variable with p-adic coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    prime: u32,
    coeffs: Vec<Padic>,
}

impl Poly {
    pub fn new(coeffs: Vec<Padic>) -> Result<Poly> {
        let prime = coeffs
            .first()
            .ok_or_else(|| Error::InvalidArgument("polynomial needs a coefficient".into()))?
            .prime();
        if let Some(c) = coeffs.iter().find(|c| c.prime() != prime) {
            return Err(Error::PrimeMismatch(c.prime(), prime));
        }
        Ok(Poly { prime, coeffs })
    }

    /// Integer coefficients, lowest degree first, each known to `rel` digits.
    /// Zero coefficients are exact.
    pub fn from_integers(coeffs: &[i64], prime: u32, rel: i64) -> Result<Poly> {
        Poly::new(
            coeffs
                .iter()
                .map(|&c| Padic::from_integer(c, prime, rel))
                .collect::<Result<_>>()?,
        )
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    pub fn coeffs(&self) -> &[Padic] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: &Padic) -> Result<Padic> {
        let mut acc = Padic::exact_zero(self.prime);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x)?.add(c)?;
        }
        Ok(acc)
    }

    pub fn derivative(&self) -> Poly {
        let coeffs: Vec<Padic> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.mul_int(i as i64))
            .collect();
        if coeffs.is_empty() {
            return Poly {
                prime: self.prime,
                coeffs: vec![Padic::exact_zero(self.prime)],
            };
        }
        Poly {
            prime: self.prime,
            coeffs,
        }
    }

    fn representatives(&self, rel: i64) -> Poly {
        Poly {
            prime: self.prime,
            coeffs: self.coeffs.iter().map(|c| c.representative(rel)).collect(),
        }
    }
}

fn known_at_least(x: &Padic, k: i64) -> bool {
    match x.valuation() {
        Valuation::Finite(v) => v >= k,
        Valuation::Infinity => x.abs_precision().is_none_or(|a| a >= k),
    }
}

/// Newton–Hensel lifting of an approximate root.
///
/// Requires `v(f(x0)) > 2e` with `e = v(f'(x0))`. Returns the unique root `z`
/// of `f` with `v(z − x0) > e`, known modulo `p^(target + e)`, or less if the
/// coefficients themselves are not known that far.
pub fn hensel_lift(f: &Poly, x0: &Padic, target: i64) -> Result<Padic> {
    if x0.prime() != f.prime() {
        return Err(Error::PrimeMismatch(x0.prime(), f.prime()));
    }
    let df = f.derivative();
    let fx = f.eval(x0)?;
    let dfx = df.eval(x0)?;
    let e = match dfx.valuation() {
        Valuation::Finite(e) => e,
        Valuation::Infinity => {
            return Err(Error::HenselConditionFailed(format!(
                "f'(x0) vanishes to all known digits ({dfx})"
            )))
        }
    };
    if !known_at_least(&fx, 2 * e + 1) {
        return Err(Error::HenselConditionFailed(format!(
            "v(f(x0)) = {} but v(f'(x0)) = {e}",
            fx.valuation()
        )));
    }

    let goal = target + 2 * e;
    let vx = x0.valuation().finite().unwrap_or(0).min(0);
    let low = f
        .coeffs
        .iter()
        .enumerate()
        .filter_map(|(i, c)| c.valuation().finite().map(|v| v + i as i64 * vx))
        .min()
        .unwrap_or(0)
        .min(0);
    let rel = goal - low + e + 8;
    let fr = f.representatives(rel);
    let dfr = fr.derivative();

    let mut z = x0.representative(rel);
    let mut reached = false;
    for _ in 0..256 {
        let fz = fr.eval(&z)?;
        if known_at_least(&fz, goal) {
            if fz.is_zero() && fz.abs_precision().is_some_and(|a| a < goal) {
                return Err(Error::PrecisionExhausted(format!(
                    "f(z) known only mod p^{}",
                    fz.abs_precision().unwrap_or(goal)
                )));
            }
            reached = true;
            break;
        }
        let step = fz.div(&dfr.eval(&z)?)?;
        z = z.sub(&step)?.representative(rel);
    }
    if !reached {
        return Err(Error::PrecisionExhausted(
            "Newton iteration did not settle".into(),
        ));
    }
    match z.sub(x0)?.valuation() {
        Valuation::Finite(v) if v <= e => {
            return Err(Error::PrecisionExhausted(format!(
                "lift left the ball v(z - x0) > {e}"
            )))
        }
        _ => {}
    }

    // precision the coefficients justify
    let vz = z.valuation().finite().unwrap_or(target + e);
    let coeff_limit = f
        .coeffs
        .iter()
        .enumerate()
        .filter_map(|(i, c)| c.abs_precision().map(|a| a + i as i64 * vz))
        .min();
    let abs = match coeff_limit {
        Some(c) => (target + e).min(c - e),
        None => target + e,
    };
    if abs <= e {
        return Err(Error::PrecisionExhausted(format!(
            "coefficients known too coarsely to separate roots (root known mod p^{abs})"
        )));
    }
    Ok(z.truncate(abs))
}

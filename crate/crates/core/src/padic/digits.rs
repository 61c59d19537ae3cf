use super::number::{Padic, Valuation};
use crate::error::{Error, Result};

/// Digit expansions of a family of values over a common window `[lo, hi)`.
///
/// Comparing rows gives `v(a − b)` for every pair in the family without
/// further big-integer arithmetic: it is `lo` plus the first index where the
/// rows differ, or at least `hi` when they agree on the whole window.
#[derive(Clone, Debug)]
pub struct DigitTable {
    prime: u32,
    lo: i64,
    hi: i64,
    width: usize,
    digits: Vec<u8>,
}

impl DigitTable {
    /// Builds the table. The window starts at the least valuation in the
    /// family and ends at the least absolute precision, further capped by
    /// `hi_cap` when given.
    pub fn build(values: &[Padic], hi_cap: Option<i64>) -> Result<DigitTable> {
        let prime = values.first().map(Padic::prime).unwrap_or(2);
        if let Some(bad) = values.iter().find(|v| v.prime() != prime) {
            return Err(Error::PrimeMismatch(bad.prime(), prime));
        }
        let mut hi = values
            .iter()
            .filter_map(Padic::abs_precision)
            .min()
            .unwrap_or(i64::MAX);
        if let Some(c) = hi_cap {
            hi = hi.min(c);
        }
        if hi == i64::MAX {
            // every value is an exact zero
            hi = 0;
        }
        let lo = values
            .iter()
            .filter_map(|v| v.valuation().finite())
            .min()
            .unwrap_or(hi)
            .min(hi);
        let width = (hi - lo) as usize;
        let mut digits = Vec::with_capacity(width * values.len());
        for v in values {
            if v.valuation() >= Valuation::Finite(hi) {
                digits.extend(std::iter::repeat_n(0, width));
            } else {
                digits.extend(v.truncate(hi).digits_window(lo, hi)?);
            }
        }
        Ok(DigitTable {
            prime,
            lo,
            hi,
            width,
            digits,
        })
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    pub fn len(&self) -> usize {
        if self.width == 0 {
            0
        } else {
            self.digits.len() / self.width
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Lower end of the window.
    pub fn lo(&self) -> i64 {
        self.lo
    }

    /// Upper end of the window: differences are only resolved below `p^hi`.
    pub fn hi(&self) -> i64 {
        self.hi
    }

    pub fn row(&self, i: usize) -> &[u8] {
        &self.digits[i * self.width..(i + 1) * self.width]
    }

    /// `v(a_i − a_j)`, capped at `hi` (returned when the rows agree).
    pub fn val_diff(&self, i: usize, j: usize) -> i64 {
        if self.width == 0 {
            return self.hi;
        }
        // digits of a − b agree with those of a and b up to the first difference
        match self
            .row(i)
            .iter()
            .zip(self.row(j))
            .position(|(a, b)| a != b)
        {
            Some(k) => self.lo + k as i64,
            None => self.hi,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_valuations_match_subtraction() {
        let p = 3;
        let vals: Vec<Padic> = [1i64, 4, 10, 28, 0, 5]
            .iter()
            .map(|&n| Padic::from_integer(n, p, 6).unwrap().truncate(6))
            .collect();
        let t = DigitTable::build(&vals, None).unwrap();
        assert_eq!(t.hi(), 6);
        for i in 0..vals.len() {
            for j in 0..vals.len() {
                let d = vals[i].sub(&vals[j]).unwrap();
                let expect = d.valuation().finite().unwrap_or(6).min(6);
                assert_eq!(t.val_diff(i, j), expect, "{i} {j}");
            }
        }
    }

    #[test]
    fn negative_valuations() {
        let p = 5;
        let vals = vec![
            Padic::from_rational(1, 25, p, 4).unwrap(),
            Padic::from_rational(6, 25, p, 4).unwrap(),
        ];
        let t = DigitTable::build(&vals, None).unwrap();
        assert_eq!(t.lo(), -2);
        assert_eq!(t.val_diff(0, 1), -1);
    }
}

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::jacobian::residue_values;
use super::CertifyOptions;
use crate::error::Result;
use crate::func::FuncExpr;
use crate::padic::{Ball, DigitTable, Padic};

/// Which form of the triple condition to check.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum MonotoneMode {
    /// `v(x − z) > v(x − y)` implies `v(f(x) − f(z)) > v(f(x) − f(y))`.
    #[default]
    Strict,
    /// `v(x − z) ≥ v(x − y)` implies `v(f(x) − f(z)) ≥ v(f(x) − f(y))`.
    Weak,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TripleWitness {
    pub x: Padic,
    pub y: Padic,
    pub z: Padic,
    /// `v(x − y)` and `v(x − z)`; `z = x` shows as the enumeration precision.
    pub input_valuations: (i64, i64),
    /// `v(f(x) − f(y))` and `v(f(x) − f(z))`, capped at the value precision.
    pub image_valuations: (i64, i64),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonotonicityCertificate {
    pub ball: Ball,
    pub k: i64,
    pub mode: MonotoneMode,
    pub pass: bool,
    pub points: usize,
    /// Precision to which image valuations are resolved.
    pub value_precision: i64,
    pub witness: Option<TripleWitness>,
}

#[derive(Clone, Copy)]
struct Level {
    min: (i64, usize),
    max: (i64, usize),
}

/// First violating `(y, z)` for the base point `x`, scanning levels
/// `v(x − y)` upward.
fn violation_at(
    x: usize,
    inputs: &DigitTable,
    values: &DigitTable,
    mode: MonotoneMode,
) -> Option<(usize, usize)> {
    let lo = inputs.lo();
    let width = (inputs.hi() - lo + 1) as usize;
    let mut levels: Vec<Option<Level>> = vec![None; width];
    for w in 0..inputs.len() {
        let l = (inputs.val_diff(x, w) - lo) as usize;
        let fv = values.val_diff(x, w);
        let slot = &mut levels[l];
        match slot {
            None => {
                *slot = Some(Level {
                    min: (fv, w),
                    max: (fv, w),
                })
            }
            Some(s) => {
                if fv < s.min.0 {
                    s.min = (fv, w);
                }
                if fv > s.max.0 {
                    s.max = (fv, w);
                }
            }
        }
    }
    // suffix minima over strictly deeper levels
    let mut deeper: Vec<Option<(i64, usize)>> = vec![None; width];
    let mut acc: Option<(i64, usize)> = None;
    for l in (0..width).rev() {
        deeper[l] = acc;
        if let Some(s) = levels[l] {
            if acc.is_none_or(|a| s.min.0 <= a.0) {
                acc = Some(s.min);
            }
        }
    }
    for l in 0..width {
        let Some(s) = levels[l] else { continue };
        if mode == MonotoneMode::Weak && s.min.0 < s.max.0 {
            return Some((s.max.1, s.min.1));
        }
        if let Some(d) = deeper[l] {
            let bad = match mode {
                MonotoneMode::Strict => s.max.0 >= d.0,
                MonotoneMode::Weak => s.max.0 > d.0,
            };
            if bad {
                return Some((s.max.1, d.1));
            }
        }
    }
    None
}

/// Checks the monotonicity triple condition on all residues of `ball` mod
/// `p^k` (the base point `x` ranges over the residues; `z = x` is allowed).
pub fn certify_monotone(f: &FuncExpr, ball: &Ball, k: i64) -> Result<MonotonicityCertificate> {
    certify_monotone_with(f, ball, k, MonotoneMode::Strict, &CertifyOptions::default())
}

pub fn certify_monotone_with(
    f: &FuncExpr,
    ball: &Ball,
    k: i64,
    mode: MonotoneMode,
    opts: &CertifyOptions,
) -> Result<MonotonicityCertificate> {
    let rel = 2 * k.abs() + ball.radius().abs() + 16;
    let (inputs, values) = residue_values(f, ball, k, opts.budget, rel)?;
    let in_table = DigitTable::build(&inputs, Some(k))?;
    let val_table = DigitTable::build(&values, None)?;
    let found = (0..inputs.len())
        .into_par_iter()
        .find_map_first(|x| violation_at(x, &in_table, &val_table, mode).map(|(y, z)| (x, y, z)));
    let witness = found.map(|(x, y, z)| TripleWitness {
        x: inputs[x].clone(),
        y: inputs[y].clone(),
        z: inputs[z].clone(),
        input_valuations: (in_table.val_diff(x, y), in_table.val_diff(x, z)),
        image_valuations: (val_table.val_diff(x, y), val_table.val_diff(x, z)),
    });
    Ok(MonotonicityCertificate {
        ball: ball.clone(),
        k,
        mode,
        pass: witness.is_none(),
        points: inputs.len(),
        value_precision: val_table.hi(),
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func::parse_expr;
    use crate::padic::Valuation;

    fn v(x: &Padic, y: &Padic) -> i64 {
        match x.sub(y).unwrap().valuation() {
            Valuation::Finite(v) => v,
            Valuation::Infinity => i64::MAX,
        }
    }

    /// Direct triple loop over exact integer representatives.
    fn brute(f: &str, p: u32, c: i64, r: i64, k: i64, mode: MonotoneMode) -> bool {
        let f = parse_expr(f, p).unwrap();
        let b = Ball::from_rational_center(c, 1, p, r).unwrap();
        let xs: Vec<Padic> = b.sample_points(k, 10_000, 20).unwrap();
        let fs: Vec<Padic> = xs
            .iter()
            .map(|x| crate::func::eval(&f, x, 40).unwrap())
            .collect();
        let vx = |i: usize, j: usize| if i == j { k } else { v(&xs[i], &xs[j]).min(k) };
        let vf = |i: usize, j: usize| v(&fs[i], &fs[j]).min(30);
        for x in 0..xs.len() {
            for y in 0..xs.len() {
                for z in 0..xs.len() {
                    let ok = match mode {
                        MonotoneMode::Strict => vx(x, z) <= vx(x, y) || vf(x, z) > vf(x, y),
                        MonotoneMode::Weak => vx(x, z) < vx(x, y) || vf(x, z) >= vf(x, y),
                    };
                    if !ok {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn run(f: &str, p: u32, c: i64, r: i64, k: i64, mode: MonotoneMode) -> MonotonicityCertificate {
        let f = parse_expr(f, p).unwrap();
        let b = Ball::from_rational_center(c, 1, p, r).unwrap();
        certify_monotone_with(&f, &b, k, mode, &CertifyOptions::default()).unwrap()
    }

    #[test]
    fn translation_passes() {
        assert!(
            certify_monotone(&parse_expr("x + 3", 5).unwrap(), &Ball::integers(5), 3)
                .unwrap()
                .pass
        );
    }

    #[test]
    fn square_on_z7_fails_with_opposite_points() {
        let f = parse_expr("x^2", 7).unwrap();
        let c = certify_monotone(&f, &Ball::integers(7), 3).unwrap();
        assert!(!c.pass);
        let w = c.witness.unwrap();
        assert!(
            w.x.add(&w.y).unwrap().truncate(3).is_zero(),
            "{} {}",
            w.x,
            w.y
        );
        let b = Ball::from_rational_center(1, 1, 7, 1).unwrap();
        assert!(certify_monotone(&f, &b, 4).unwrap().pass);
    }

    #[test]
    fn constants_pass_only_the_weak_form() {
        let c = run("4", 3, 0, 0, 3, MonotoneMode::Strict);
        assert!(!c.pass);
        assert!(run("4", 3, 0, 0, 3, MonotoneMode::Weak).pass);
    }

    #[test]
    fn agrees_with_triple_loop() {
        let cases = [
            ("x^2", 3, 0, 0, 3),
            ("x^2", 5, 1, 1, 3),
            ("x^3 + 2*x", 3, 0, 0, 3),
            ("spread2(x)", 3, 0, 0, 3),
            ("cases{val(0): 1; else: x}", 3, 0, 0, 3),
            ("1/x", 5, 2, 1, 3),
            ("7", 5, 0, 0, 2),
        ];
        for (f, p, c, r, k) in cases {
            for mode in [MonotoneMode::Strict, MonotoneMode::Weak] {
                assert_eq!(
                    run(f, p, c, r, k, mode).pass,
                    brute(f, p, c, r, k, mode),
                    "{f} p={p} {mode:?}"
                );
            }
        }
    }
}

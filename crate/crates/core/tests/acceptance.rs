//! Acceptance criteria. Each criterion prints one PASS or FAIL line; the
//! process exits nonzero if any criterion fails.
//!
//! Expected values come from brute-force oracles in this file (integer
//! arithmetic and exhaustive residue enumeration), not from the library.

use std::collections::HashSet;
use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigInt;
use padic_analysis::calculus::{strict_derivative, DiffConfig};
use padic_analysis::certify::{
    certify_jacobian, certify_monotone, certify_monotone_with, local_solve, partition_domain,
    CertifyOptions, MonotoneMode, Tag,
};
use padic_analysis::cosets::{build_coset_table, hensel_exponent, is_nth_power};
use padic_analysis::func::{eval, image_map, parse_expr, symbolic_derivative};
use padic_analysis::measure::{
    ball_measure, residue_set_measure, verify_change_of_variables, MeasureValue,
};
use padic_analysis::padic::BallRelation;
use padic_analysis::{Ball, Padic};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn lib<T>(r: padic_analysis::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

// ---------------------------------------------------------------- oracles

fn ipow(p: u32, e: u32) -> i128 {
    (p as i128).pow(e)
}

/// `v_p(n)` for a nonzero integer.
fn vp(mut n: i128, p: u32) -> i64 {
    assert!(n != 0);
    let p = p as i128;
    let mut k = 0;
    while n % p == 0 {
        n /= p;
        k += 1;
    }
    k
}

/// `v_p(n)`, or `cap` when `p^cap` divides `n`.
fn vp_capped(n: i128, p: u32, cap: i64) -> i64 {
    if n == 0 {
        cap
    } else {
        vp(n, p).min(cap)
    }
}

fn poly_eval(c: &[i64], x: i128) -> i128 {
    c.iter().rev().fold(0, |acc, &ci| acc * x + ci as i128)
}

fn poly_deriv(c: &[i64]) -> Vec<i64> {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(i, &ci)| i as i64 * ci)
        .collect()
}

fn poly_text(c: &[i64]) -> String {
    c.iter()
        .enumerate()
        .map(|(i, ci)| format!("({ci})*x^{i}"))
        .collect::<Vec<_>>()
        .join(" + ")
}

fn modpow(b: i128, mut e: u128, m: i128) -> i128 {
    let mut acc = 1 % m;
    let mut b = b.rem_euclid(m);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

/// The integer representative of an integral p-adic point.
fn to_int(x: &Padic) -> i128 {
    let (num, den_exp) = x.to_rational_parts();
    assert_eq!(den_exp, 0, "integral point expected");
    i128::try_from(num).expect("fits in i128")
}

fn int_padic(n: i128, p: u32, rel: i64) -> Padic {
    Padic::from_integer(BigInt::from(n), p, rel).unwrap()
}

/// `n`-th powers of units modulo `p^k`.
fn nth_power_residues(p: u32, n: u32, k: u32) -> HashSet<i128> {
    let m = ipow(p, k);
    (1..m)
        .filter(|w| w % p as i128 != 0)
        .map(|w| modpow(w, n as u128, m))
        .collect()
}

/// Base-p digits of `x ∈ [0, p^k)` moved from position i to position d·i.
fn spread_int(mut x: i128, p: u32, d: u32) -> i128 {
    let mut out = 0;
    let mut i = 0;
    while x > 0 {
        out += (x % p as i128) * ipow(p, d * i);
        x /= p as i128;
        i += 1;
    }
    out
}

// ---------------------------------------------------------------- criteria

/// Strict derivative of random rational functions agrees with the symbolic
/// derivative and with a hand-applied quotient rule, mod p^6.
fn derivative_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let cfg = DiffConfig::default();
    let (mut funcs, mut points) = (0, 0);
    while funcs < 21 {
        let p = [3u32, 5, 7][funcs % 3];
        let num: Vec<i64> = (0..=rng.gen_range(1..=5))
            .map(|_| rng.gen_range(-9..=9))
            .collect();
        let den: Vec<i64> = (0..=rng.gen_range(0..=5))
            .map(|_| rng.gen_range(-9..=9))
            .collect();
        // interior points: the denominator is a unit there, so no pole in B(a, 1)
        let mut pts = Vec::new();
        for _ in 0..2_000 {
            let a: i128 = rng.gen_range(-300..=300);
            if poly_eval(&den, a) % p as i128 != 0 && !pts.contains(&a) {
                pts.push(a);
            }
            if pts.len() == 10 {
                break;
            }
        }
        if pts.len() < 10 {
            continue;
        }
        let text = format!("({}) / ({})", poly_text(&num), poly_text(&den));
        let f = lib(parse_expr(&text, p))?;
        let df = lib(symbolic_derivative(&f))?;
        for &a in &pts {
            let pa = int_padic(a, p, 40);
            let est = lib(strict_derivative(&f, &pa, &cfg))?;
            let got = est
                .verdict
                .converged_value()
                .ok_or_else(|| format!("{text} at {a} (p={p}): {}", est.verdict.name()))?;
            let (n, d) = (poly_eval(&num, a), poly_eval(&den, a));
            let (n1, d1) = (
                poly_eval(&poly_deriv(&num), a),
                poly_eval(&poly_deriv(&den), a),
            );
            let oracle = lib(Padic::from_rational(
                BigInt::from(n1 * d - n * d1),
                BigInt::from(d * d),
                p,
                20,
            ))?;
            let symbolic = lib(eval(&df, &pa, 20))?;
            ensure!(
                lib(got.congruent_mod(&oracle, 6))?,
                "{text} at {a} (p={p}): {got} vs {oracle}"
            );
            ensure!(
                lib(symbolic.congruent_mod(&oracle, 6))?,
                "symbolic {text} at {a}"
            );
            points += 1;
        }
        funcs += 1;
    }
    let secs = start.elapsed().as_secs_f64();
    ensure!(secs < 60.0, "took {secs:.1}s");
    Ok(format!(
        "{funcs} functions, {points} points, all Converged and equal mod p^6, {secs:.1}s"
    ))
}

/// Digit spreading at p = 3: zero derivative, injective, image measure 3^-k.
fn pathological_function() -> Outcome {
    let p = 3;
    let f = lib(parse_expr("spread2(x)", p))?;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let cfg = DiffConfig::default();
    for _ in 0..50 {
        let a: i128 = rng.gen_range(-100_000..100_000);
        let est = lib(strict_derivative(&f, &int_padic(a, p, 30), &cfg))?;
        let zero = est.verdict.converged_value().map(Padic::is_zero);
        ensure!(zero == Some(true), "Dg({a}) = {:?}", est.verdict);
    }
    let z3 = Ball::integers(p);
    let pairs = lib(image_map(&f, &z3, 4, 8, u64::MAX))?;
    let mut seen = HashSet::new();
    for (x, y) in &pairs {
        let want = spread_int(to_int(x).rem_euclid(81), p, 2);
        ensure!(to_int(y) == want, "g({x}) = {y}, expected {want}");
        seen.insert(want);
    }
    ensure!(
        pairs.len() == 81 && seen.len() == 81,
        "not injective mod 3^4"
    );
    let mut measures = Vec::new();
    for k in 2..=4 {
        let pairs = lib(image_map(&f, &z3, k, 2 * k, u64::MAX))?;
        let ys: Vec<Padic> = pairs.into_iter().map(|(_, y)| y).collect();
        let mu = residue_set_measure(p, 2 * k, &ys);
        // 3^k distinct residues mod 3^(2k)
        let oracle: HashSet<i128> = (0..ipow(p, k as u32))
            .map(|x| spread_int(x, p, 2))
            .collect();
        ensure!(oracle.len() as i128 == ipow(p, k as u32), "oracle count");
        ensure!(mu == MeasureValue::p_power(p, k), "k={k}: measure {mu}");
        measures.push(mu.to_string());
    }
    Ok(format!(
        "Converged(0) at 50 points, injective mod 3^4, image measures {}",
        measures.join(", ")
    ))
}

/// `v(f(x) − f(y)) = e + v(x − y)` for every pair of residues mod p^k in the ball.
fn isometry_oracle(coeffs: &[i64], p: u32, center: i128, r: u32, k: u32, e: i64) -> bool {
    let pts: Vec<i128> = (0..ipow(p, k - r))
        .map(|t| center + t * ipow(p, r))
        .collect();
    pts.iter().enumerate().all(|(i, &x)| {
        pts[i + 1..]
            .iter()
            .all(|&y| vp(poly_eval(coeffs, x) - poly_eval(coeffs, y), p) == e + vp(x - y, p))
    })
}

fn ljp_case(
    text: &str,
    coeffs: &[i64],
    p: u32,
    pass_centers: &[i128],
    fail_k: i64,
) -> Result<String, String> {
    let f = lib(parse_expr(text, p))?;
    for &c in pass_centers {
        let ball = lib(Ball::from_rational_center(BigInt::from(c), 1, p, 1))?;
        let cert = lib(certify_jacobian(&f, &ball, 5))?;
        ensure!(
            cert.pass
                && cert.check_a.pass
                && cert.check_b.pass
                && cert.check_c.pass
                && cert.check_d.pass,
            "{text} on B({c}, 1) mod {p}^5 did not pass"
        );
        let e = vp(poly_eval(&poly_deriv(coeffs), c), p);
        ensure!(cert.e == Some(e), "{text}: e = {:?}, oracle {e}", cert.e);
        ensure!(
            isometry_oracle(coeffs, p, c, 1, 3, e),
            "oracle disagrees on B({c}, 1)"
        );
    }
    let cert = lib(certify_jacobian(&f, &Ball::integers(p), fail_k))?;
    ensure!(!cert.check_d.pass, "{text} passed (d) on Z_{p}");
    let w = cert
        .check_d
        .counterexample
        .as_ref()
        .ok_or("no witness pair")?;
    let (x, y) = (to_int(&w.x), to_int(&w.y));
    let e = cert.e.ok_or("no e on Z_p")?;
    let image_val = vp_capped(poly_eval(coeffs, x) - poly_eval(coeffs, y), p, e + fail_k);
    ensure!(
        image_val != e + vp(x - y, p),
        "witness ({x}, {y}) is not a violation"
    );
    ensure!(
        w.image_valuation == image_val,
        "witness image valuation {}",
        w.image_valuation
    );
    Ok(format!(
        "{text} p={p}: witness ({x}, {y}) v(f(x)-f(y))={image_val} vs {}",
        e + vp(x - y, p)
    ))
}

/// Jacobian certificates pass on small balls and fail check (d) on ℤ_p.
fn jacobian_certificates() -> Outcome {
    // x² identifies x and −x, so (d) must fail on ℤ_7
    ensure!(
        poly_eval(&[0, 0, 1], 3) == poly_eval(&[0, 0, 1], -3),
        "oracle"
    );
    let sq = ljp_case("x^2", &[0, 0, 1], 7, &[1], 4)?;
    let cube = ljp_case("x^3", &[0, 0, 0, 1], 5, &[1, 2, 3, 4], 4)?;
    Ok(format!("{sq}; {cube}"))
}

/// Contraction solver on random polynomial instances, checked against an
/// exhaustive root search mod p^5.
fn contraction_solver() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut done = 0;
    let mut max_iter = 0;
    while done < 20 {
        let p = [3u32, 5, 7][done % 3];
        let coeffs: Vec<i64> = (0..=rng.gen_range(2..=4))
            .map(|_| rng.gen_range(-9..=9))
            .collect();
        let a: i128 = rng.gen_range(0..ipow(p, 3));
        let da = poly_eval(&poly_deriv(&coeffs), a);
        if da == 0 || vp(da, p) > 1 {
            continue;
        }
        let e = vp(da, p);
        let t: i128 = loop {
            let t = rng.gen_range(1..ipow(p, 2));
            if t % p as i128 != 0 {
                break t;
            }
        };
        let c = poly_eval(&coeffs, a) + ipow(p, 2 * e as u32 + 1) * t;
        let f = lib(parse_expr(&poly_text(&coeffs), p))?;
        let pa = int_padic(a, p, 40);
        let df = int_padic(da, p, 40);
        let r = lib(local_solve(&f, &pa, &df, &int_padic(c, p, 40), 20, 40))?;
        ensure!(
            r.residual_valuation >= 20,
            "residual {}",
            r.residual_valuation
        );
        ensure!(r.iterations <= 40, "{} iterations", r.iterations);
        let steps: Vec<i64> = r.log.iter().filter_map(|s| s.step_valuation).collect();
        ensure!(steps.windows(2).all(|w| w[0] < w[1]), "steps {steps:?}");
        // the unique residue w mod p^5 in B(a, e+1) with v(f(w) − c) ≥ e + 5
        let m = ipow(p, 5);
        let step = ipow(p, e as u32 + 1);
        let roots: Vec<i128> = (0..m / step)
            .map(|s| (a % step) + s * step)
            .filter(|&w| vp_capped(poly_eval(&coeffs, w) - c, p, 99) >= e + 5)
            .collect();
        ensure!(roots.len() == 1, "brute force found {roots:?}");
        let z = to_int(&r.z.truncate(5)).rem_euclid(m);
        ensure!(z == roots[0], "z = {z}, brute force {}", roots[0]);
        max_iter = max_iter.max(r.iterations);
        done += 1;
    }
    Ok(format!(
        "20 instances, v(f(z) - c) >= 20 within {max_iter} iterations, roots match mod p^5"
    ))
}

/// Coset classification against exhaustive n-th power enumeration.
fn coset_tables() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut sizes = Vec::new();
    for p in [3u32, 5, 7, 2] {
        for n in [2u32, 3, 4] {
            let v = vp(n as i128, p);
            let table = lib(build_coset_table(p, n))?;
            ensure!(hensel_exponent(p, n) == 2 * v + 1, "m for ({p}, {n})");
            let k = (2 * v + 4) as u32;
            let modulus = ipow(p, k);
            let phi = modulus - modulus / p as i128;
            let powers = nth_power_residues(p, n, k);
            let same_coset = |v1: i64, u1: i128, v2: i64, u2: i128| {
                let inv = modpow(u2, (phi - 1) as u128, modulus);
                (v1 - v2).rem_euclid(n as i64) == 0 && powers.contains(&(u1 * inv % modulus))
            };
            // coset count and pairwise distinct representatives
            let count = n as usize * (phi as usize / powers.len());
            ensure!(
                table.len() == count,
                "|Λ_{n}| = {} for p={p}, oracle {count}",
                table.len()
            );
            let reps = table.reps();
            for (i, a) in reps.iter().enumerate() {
                for b in &reps[i + 1..] {
                    ensure!(
                        !same_coset(a.valuation, a.unit as i128, b.valuation, b.unit as i128),
                        "representatives share a coset"
                    );
                }
            }
            if n == 2 {
                let want = if p == 2 { 8 } else { 4 };
                ensure!(table.len() == want, "|Λ_2| = {} for p={p}", table.len());
                sizes.push(format!("p={p}:{}", table.len()));
            }
            for _ in 0..1_000 {
                let val = rng.gen_range(-4..=4);
                let u = loop {
                    let u = rng.gen_range(1..modulus);
                    if u % p as i128 != 0 {
                        break u;
                    }
                };
                let x = lib(Padic::from_unit(p, val, &BigInt::from(u), k as i64 + 2))?;
                let label = lib(table.classify(&x))?;
                ensure!(
                    same_coset(val, u, label.valuation, label.unit as i128),
                    "({p}, {n}): {x} labelled {}",
                    label.lambda()
                );
            }
            // 1 + p^m ℤ_p consists of n-th powers, checked mod p^(m+3)
            let m = table.hensel_m() as u32;
            let high = nth_power_residues(p, n, m + 3);
            for t in 0..ipow(p, 3) {
                let u = 1 + ipow(p, m) * t;
                ensure!(high.contains(&u), "1 + {p}^{m}·{t} is not an {n}-th power");
                ensure!(
                    lib(is_nth_power(&int_padic(u, p, m as i64 + 3), n))?,
                    "is_nth_power({u})"
                );
            }
        }
    }
    Ok(format!(
        "12 tables agree on 1000 elements each; |Λ_2|: {}",
        sizes.join(" ")
    ))
}

/// Exact equality of the image measure and the integral of |Df|.
fn change_of_variables() -> Outcome {
    // (p, f, center, radius, k_in, k_out, exponent of the expected p^-exp)
    let cases: [(u32, &str, i64, i64, i64, i64, i64); 12] = [
        (5, "x^2", 1, 1, 3, 3, 1),
        (7, "x^2", 1, 1, 3, 3, 1),
        (3, "x^2", 1, 1, 3, 3, 1),
        (5, "5*x", 0, 0, 2, 3, 1),
        (3, "3*x", 0, 0, 3, 4, 1),
        (7, "7*x", 0, 0, 2, 3, 1),
        (7, "x", 0, 0, 2, 2, 0),
        (5, "2*x + 1", 0, 0, 3, 3, 0),
        (5, "x^3", 1, 1, 3, 3, 1),
        (7, "1/x", 1, 1, 3, 3, 1),
        (3, "x^3 + x", 0, 0, 3, 3, 0),
        (5, "25*x", 0, 0, 2, 4, 2),
    ];
    for (p, text, c, r, k_in, k_out, exp) in cases {
        let f = lib(parse_expr(text, p))?;
        let ball = lib(Ball::from_rational_center(c, 1, p, r))?;
        let cov = lib(verify_change_of_variables(&f, &ball, k_in, k_out))?;
        let want = MeasureValue::p_power(p, exp);
        ensure!(
            cov.image_count == cov.inputs,
            "{text}: not bijective at this scale"
        );
        ensure!(
            cov.uncovered_measure.is_zero(),
            "{text}: uncovered {}",
            cov.uncovered_measure
        );
        ensure!(
            cov.lhs == want && cov.rhs == want && cov.difference.is_zero(),
            "{text} p={p}: lhs {} rhs {} expected {want}",
            cov.lhs,
            cov.rhs
        );
    }
    Ok(format!(
        "{} cases, lhs = rhs exactly (x^2 on 1+pZ_p and p*x on Z_p both 1/p)",
        cases.len()
    ))
}

fn overlaps(a: &Ball, b: &Ball) -> Result<bool, String> {
    Ok(lib(a.relation(b))? != BallRelation::Disjoint)
}

/// U/V/I partitions: disjoint cover, certified V and U balls, no demotion.
fn monotone_partition() -> Outcome {
    let k = 3;
    let mut summary = Vec::new();
    for p in [3u32, 5] {
        let z = Ball::integers(p);
        let units: Vec<Ball> = (1..p as i64)
            .map(|u| Ball::from_rational_center(u, 1, p, 1).unwrap())
            .collect();
        let mut corpus: Vec<(&str, Ball)> = vec![
            ("2", z.clone()),
            ("-1/3", z.clone()),
            ("3*x + 1", z.clone()),
            ("2*x - 5", z.clone()),
            ("x^2", z.clone()),
            ("cases{coset(2,1): x; else: 2*x}", z.clone()),
        ];
        corpus.extend(units.iter().map(|b| ("1/x", b.clone())));
        let (mut nu, mut nv, mut ni) = (0, 0, 0);
        for (text, domain) in &corpus {
            let f = lib(parse_expr(text, p))?;
            let part = lib(partition_domain(&f, domain, k, 2))?;
            let kc = part.certification_precision;
            let entries = &part.entries;
            let mut total = MeasureValue::zero();
            for (i, a) in entries.iter().enumerate() {
                ensure!(
                    lib(a.ball.is_subset_of(domain))?,
                    "{text}: {} escapes",
                    a.ball
                );
                for b in &entries[i + 1..] {
                    ensure!(
                        !overlaps(&a.ball, &b.ball)?,
                        "{text}: {} meets {}",
                        a.ball,
                        b.ball
                    );
                }
                total = [total, ball_measure(&a.ball)].into_iter().sum();
            }
            ensure!(
                total == ball_measure(domain),
                "{text}: cover has measure {total}"
            );
            for entry in entries {
                match entry.tag {
                    Tag::V => {
                        let cert = lib(certify_monotone(&f, &entry.ball, kc))?;
                        ensure!(
                            cert.pass,
                            "{text} p={p}: V ball {} not monotone",
                            entry.ball
                        );
                        nv += 1;
                    }
                    Tag::U => {
                        let xs = lib(entry.ball.sample_points(kc, u64::MAX, 30))?;
                        let ys: Vec<Padic> = xs
                            .iter()
                            .map(|x| eval(&f, x, 30))
                            .collect::<Result<_, _>>()
                            .map_err(|e| e.to_string())?;
                        for y in &ys[1..] {
                            ensure!(
                                lib(y.sub(&ys[0]))?.is_zero(),
                                "{text}: U ball {} not constant",
                                entry.ball
                            );
                        }
                        nu += 1;
                    }
                    Tag::I => ni += 1,
                }
            }
            let finer = lib(partition_domain(&f, domain, k + 1, 2))?;
            for v in part.balls_with(Tag::V) {
                for g in &finer.entries {
                    if overlaps(&v.ball, &g.ball)? {
                        ensure!(
                            g.tag == Tag::V,
                            "{text}: V ball {} demoted to {:?} at k+1",
                            v.ball,
                            g.tag
                        );
                    }
                }
            }
        }
        summary.push(format!(
            "p={p}: {} functions, U={nu} V={nv} I={ni}",
            corpus.len()
        ));
    }
    Ok(summary.join("; "))
}

/// Between-constancy on balls passing either monotonicity check.
fn monotone_constant() -> Outcome {
    let k = 3;
    let opts = CertifyOptions::default();
    let (mut balls, mut nontrivial) = (0, 0);
    for p in [3u32, 5] {
        let texts = [
            "2",
            "x",
            "x^2",
            "3*x + 1",
            "cases{ball(0,1): 2; else: x}",
            "cases{ball(1,1): 1; ball(2,2): 4; else: x^3}",
        ];
        let mut domains = vec![Ball::integers(p)];
        for r in 1..=2 {
            domains.extend(lib(Ball::integers(p).sub_balls(r, u64::MAX))?);
        }
        for text in texts {
            let f = lib(parse_expr(text, p))?;
            for ball in &domains {
                for mode in [MonotoneMode::Strict, MonotoneMode::Weak] {
                    let cert = lib(certify_monotone_with(&f, ball, k, mode, &opts))?;
                    if !cert.pass {
                        continue;
                    }
                    balls += 1;
                    let prec = cert.value_precision;
                    let xs: Vec<i128> = lib(ball.enumerate(k, u64::MAX))?
                        .iter()
                        .map(|x| to_int(&x.representative(k + 1)))
                        .collect();
                    let ys: Vec<Padic> = xs
                        .iter()
                        .map(|&x| eval(&f, &int_padic(x, p, 30), 30).map(|y| y.truncate(prec)))
                        .collect::<Result<_, _>>()
                        .map_err(|e| e.to_string())?;
                    for i in 0..xs.len() {
                        for j in i + 1..xs.len() {
                            if ys[i] != ys[j] {
                                continue;
                            }
                            nontrivial += 1;
                            let d = vp(xs[i] - xs[j], p);
                            for (z, yz) in xs.iter().zip(&ys) {
                                // z lies between x and y when |z − x| ≤ |x − y|
                                let between = *z == xs[i] || vp(z - xs[i], p) >= d;
                                ensure!(
                                    !between || *yz == ys[i],
                                    "{text} on {ball}: f({z}) differs between {} and {}",
                                    xs[i],
                                    xs[j]
                                );
                            }
                        }
                    }
                }
            }
        }
    }
    ensure!(nontrivial > 0, "no equal-value pairs were exercised");
    Ok(format!("{balls} passing (ball, mode) pairs, {nontrivial} equal-value pairs, all between-constant mod p^3"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("derivative oracle agreement", derivative_oracle),
        (
            "pathological digit-spreading function",
            pathological_function,
        ),
        ("Jacobian certificates", jacobian_certificates),
        ("contraction solver", contraction_solver),
        ("coset tables", coset_tables),
        ("change of variables", change_of_variables),
        ("monotone partition", monotone_partition),
        ("monotone implies between-constancy", monotone_constant),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {}. {name} ({secs:.1}s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}. {name} ({secs:.1}s): {why}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::hensel::{hensel_lift, Poly};
use crate::error::{Error, Result};
use crate::padic::{vp_int, Padic, Valuation, DEFAULT_ENUMERATION_CAP};

/// Exponent `m = 2·v_p(n) + 1`, for which `1 + p^m ℤ_p` consists of n-th powers.
pub fn hensel_exponent(p: u32, n: u32) -> i64 {
    assert!(n >= 1, "n must be positive");
    2 * vp_int(n as i64, p) as i64 + 1
}

/// One representative `λ = p^valuation · unit` of a coset of `P_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct CosetRep {
    pub valuation: i64,
    pub unit: u64,
}

/// The coset `λ P_n` containing a point, as an index into the table's
/// representative list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub struct CosetLabel {
    pub prime: u32,
    pub n: u32,
    pub index: usize,
    pub valuation: i64,
    pub unit: u64,
}

impl CosetLabel {
    /// The representative `λ` as an integer.
    pub fn lambda(&self) -> BigInt {
        BigInt::from(self.prime).pow(self.valuation as u32) * self.unit
    }
}

/// Representatives of `ℚ_p^× / P_n`, with the n-th power residues mod `p^m`.
#[derive(Clone, Debug)]
pub struct CosetTable {
    prime: u32,
    n: u32,
    hensel_m: i64,
    modulus: u64,
    unit_reps: Vec<u64>,
    /// Unit class index of each residue mod `p^m`; `u32::MAX` for non-units.
    class_of: Vec<u32>,
    /// n-th roots mod `p^m` of each n-th power residue, ascending.
    roots: HashMap<u64, Vec<u64>>,
}

fn pow_mod(b: u64, mut e: u64, m: u64) -> u64 {
    let m = m as u128;
    let mut acc = 1u128 % m;
    let mut b = b as u128 % m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc as u64
}

/// Builds the table for `(p, n)` by classifying every unit residue mod `p^m`.
pub fn build_coset_table(p: u32, n: u32) -> Result<CosetTable> {
    build_coset_table_with_cap(p, n, DEFAULT_ENUMERATION_CAP)
}

pub fn build_coset_table_with_cap(p: u32, n: u32, cap: u64) -> Result<CosetTable> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if !crate::padic::is_prime(p) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    let m = hensel_exponent(p, n);
    let modulus = (p as u64)
        .checked_pow(m as u32)
        .filter(|&q| q <= cap)
        .ok_or_else(|| Error::BudgetExceeded {
            needed: format!("{p}^{m}"),
            cap,
        })?;
    let is_unit = |u: u64| !u.is_multiple_of(p as u64);
    let mut roots: HashMap<u64, Vec<u64>> = HashMap::new();
    for w in (1..modulus).filter(|&w| is_unit(w)) {
        roots
            .entry(pow_mod(w, n as u64, modulus))
            .or_default()
            .push(w);
    }
    let powers: Vec<u64> = {
        let mut v: Vec<u64> = roots.keys().copied().collect();
        v.sort_unstable();
        v
    };
    let mut class_of = vec![u32::MAX; modulus as usize];
    let mut unit_reps = Vec::new();
    for u in 1..modulus {
        if !is_unit(u) || class_of[u as usize] != u32::MAX {
            continue;
        }
        let j = unit_reps.len() as u32;
        unit_reps.push(u);
        for &h in &powers {
            let c = (u as u128 * h as u128 % modulus as u128) as usize;
            class_of[c] = j;
        }
    }
    Ok(CosetTable {
        prime: p,
        n,
        hensel_m: m,
        modulus,
        unit_reps,
        class_of,
        roots,
    })
}

static CACHE: OnceLock<Mutex<HashMap<(u32, u32), Arc<CosetTable>>>> = OnceLock::new();

/// Shared, lazily built table for `(p, n)`.
pub fn cached_table(p: u32, n: u32) -> Result<Arc<CosetTable>> {
    let cache = CACHE.get_or_init(Default::default);
    if let Some(t) = cache.lock().expect("cache poisoned").get(&(p, n)) {
        return Ok(t.clone());
    }
    let t = Arc::new(build_coset_table(p, n)?);
    cache
        .lock()
        .expect("cache poisoned")
        .insert((p, n), t.clone());
    Ok(t)
}

/// Valuation and unit residue mod `p^m` of a nonzero point.
fn split_point(x: &Padic, m: i64, modulus: u64) -> Result<(i64, u64)> {
    let v = match x.valuation() {
        Valuation::Finite(v) => v,
        Valuation::Infinity if x.is_exact_zero() => {
            return Err(Error::InvalidArgument("0 lies in no coset".into()))
        }
        Valuation::Infinity => {
            return Err(Error::InsufficientPrecision(format!(
                "{x} is not known to be nonzero"
            )))
        }
    };
    let rel = x.rel_precision().unwrap_or(0);
    if rel < m {
        return Err(Error::InsufficientPrecision(format!(
            "{m} unit digits needed, {rel} known"
        )));
    }
    let u = x.unit().expect("nonzero") % modulus;
    Ok((v, u.to_u64().expect("residue fits")))
}

impl CosetTable {
    pub fn prime(&self) -> u32 {
        self.prime
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn hensel_m(&self) -> i64 {
        self.hensel_m
    }

    /// `|Λ_n|`, the index of `P_n` in `ℚ_p^×`.
    pub fn len(&self) -> usize {
        self.n as usize * self.unit_reps.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Unit class representatives `u_j`, smallest positive integers first.
    pub fn unit_reps(&self) -> &[u64] {
        &self.unit_reps
    }

    /// `Λ_n` ordered by valuation, then unit.
    pub fn reps(&self) -> Vec<CosetRep> {
        (0..self.n as i64)
            .flat_map(|i| {
                self.unit_reps.iter().map(move |&u| CosetRep {
                    valuation: i,
                    unit: u,
                })
            })
            .collect()
    }

    pub fn label(&self, index: usize) -> Result<CosetLabel> {
        if index >= self.len() {
            return Err(Error::InvalidArgument(format!(
                "coset index {index} out of range (|Λ| = {})",
                self.len()
            )));
        }
        let k = self.unit_reps.len();
        Ok(CosetLabel {
            prime: self.prime,
            n: self.n,
            index,
            valuation: (index / k) as i64,
            unit: self.unit_reps[index % k],
        })
    }

    pub fn labels(&self) -> Vec<CosetLabel> {
        (0..self.len())
            .map(|i| self.label(i).expect("in range"))
            .collect()
    }

    /// The label whose representative is `λ = a/b`, if `λ` is one of the
    /// table's representatives or lies in the same coset as one.
    pub fn label_of_rational(&self, a: &BigInt, b: &BigInt) -> Result<CosetLabel> {
        let x = Padic::from_rational(a.clone(), b.clone(), self.prime, self.hensel_m.max(1))?;
        self.classify(&x)
    }

    /// The unique `λ ∈ Λ_n` with `x ∈ λ P_n`.
    pub fn classify(&self, x: &Padic) -> Result<CosetLabel> {
        if x.prime() != self.prime {
            return Err(Error::PrimeMismatch(x.prime(), self.prime));
        }
        let (v, u) = split_point(x, self.hensel_m, self.modulus)?;
        let i = v.rem_euclid(self.n as i64) as usize;
        let j = self.class_of[u as usize] as usize;
        self.label(i * self.unit_reps.len() + j)
    }

    /// n-th roots modulo `p^m` of a unit residue, ascending.
    pub fn roots_mod(&self, u: u64) -> &[u64] {
        self.roots
            .get(&(u % self.modulus))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// An n-th root of `x`, on the branch whose unit part is `≡ branch mod p^m`,
    /// or on the branch with the smallest such residue when `branch` is `None`.
    ///
    /// The result is known to `rel(x) − v_p(n)` relative digits.
    pub fn nth_root(&self, x: &Padic, branch: Option<u64>) -> Result<Padic> {
        let p = self.prime;
        let n = self.n as i64;
        let (v, u) = split_point(x, self.hensel_m, self.modulus)?;
        if v.rem_euclid(n) != 0 {
            return Err(Error::OutOfDomain(format!(
                "valuation {v} of {} is not divisible by {n}",
                x.to_compact_string()
            )));
        }
        let e = vp_int(n, p) as i64;
        let rel = x.rel_precision().expect("nonzero");
        if rel < self.hensel_m + e {
            return Err(Error::InsufficientPrecision(format!(
                "{} unit digits needed for an n-th root, {rel} known",
                self.hensel_m + e
            )));
        }
        let unit = Padic::from_unit(p, 0, x.unit().expect("nonzero"), rel)?;
        let mut coeffs = vec![unit.neg()];
        coeffs.extend((1..n).map(|_| Padic::exact_zero(p)));
        coeffs.push(Padic::from_integer(1, p, rel + 2 * e + 4)?);
        let f = Poly::new(coeffs)?;
        let candidates: Vec<u64> = match branch {
            Some(r) => vec![r % self.modulus],
            None => self.roots_mod(u).to_vec(),
        };
        for r in candidates {
            if !self.roots_mod(u).contains(&r) {
                continue;
            }
            let w0 = Padic::from_integer(r, p, rel)?;
            let w = hensel_lift(&f, &w0, rel - 2 * e)?;
            // a residue may lift to a root lying in another residue class
            if w.congruent_mod(&w0, self.hensel_m)? {
                return Ok(w.shift(v / n));
            }
        }
        Err(Error::OutOfDomain(format!(
            "{} has no {n}-th root{}",
            x.to_compact_string(),
            branch
                .map(|r| format!(" ≡ {r} mod {}", self.modulus))
                .unwrap_or_default()
        )))
    }
}

impl serde::Serialize for CosetTable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let reps: Vec<String> = self
            .labels()
            .iter()
            .map(|l| l.lambda().to_string())
            .collect();
        let reps: Vec<serde_json::Value> = reps
            .into_iter()
            .map(|r| match r.parse::<u64>() {
                Ok(v) => serde_json::Value::from(v),
                Err(_) => serde_json::Value::from(r),
            })
            .collect();
        let mut st = s.serialize_struct("CosetTable", 5)?;
        st.serialize_field("prime", &self.prime)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("m", &self.hensel_m)?;
        st.serialize_field("index", &self.len())?;
        st.serialize_field("representatives", &reps)?;
        st.end()
    }
}

/// Classifies `x` using the shared table for `(p, n)`.
pub fn classify(x: &Padic, table: &CosetTable) -> Result<CosetLabel> {
    table.classify(x)
}

/// Whether `x` is a nonzero n-th power: `n | v(x)` and the unit part has an
/// n-th root mod `p^m` that Hensel-lifts.
pub fn is_nth_power(x: &Padic, n: u32) -> Result<bool> {
    let p = x.prime();
    let table = cached_table(p, n)?;
    let (v, u) = split_point(x, table.hensel_m, table.modulus)?;
    if v.rem_euclid(n as i64) != 0 {
        return Ok(false);
    }
    let Some(&w) = table.roots_mod(u).first() else {
        return Ok(false);
    };
    let rel = x.rel_precision().expect("nonzero");
    let unit = Padic::from_unit(p, 0, x.unit().expect("nonzero"), rel)?;
    let mut coeffs = vec![unit.neg()];
    coeffs.extend((1..n).map(|_| Padic::exact_zero(p)));
    coeffs.push(Padic::from_integer(1, p, rel + 8)?);
    let f = Poly::new(coeffs)?;
    hensel_lift(&f, &Padic::from_integer(w, p, rel)?, 1)?;
    Ok(true)
}

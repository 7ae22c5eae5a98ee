//! Bernoulli numbers, divisor power sums, and the constant term
//! `a_0(G*_k) = -(1 - p^(k-1)) B_k / (2k)` of the p-adic Eisenstein series.
//!
//! The constant term has two routes:
//! - exact: `B_k` from the cache, then reduction (weights within the budget);
//! - reduced: replace `k` by a small `k0 ≡ k mod (p-1)p^m` and use the Kummer
//!   congruence for `(1 - p^(k-1)) B_k / k`. On the branch `k ≡ 0 mod (p-1)`
//!   that quantity has the pole term `(1 - 1/p)/k`, which is carried exactly
//!   while the remainder is reduced.

use std::sync::RwLock;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{
    check_odd_prime, p_power_rat, pow_p, reduce_scaled_unchecked, vp_int, vp_rat, Rat, Residue,
    ScaledResidue, Valuation,
};
use crate::{Error, Result};

pub const DEFAULT_BUDGET: usize = 4000;

/// Exact Bernoulli numbers up to a configurable index budget.
///
/// Readers share the table; extending it takes the write lock.
#[derive(Debug)]
pub struct BernoulliCache {
    budget: usize,
    // table[j] = B_{2j}
    table: RwLock<Vec<Rat>>,
}

impl Default for BernoulliCache {
    fn default() -> Self {
        BernoulliCache::new(DEFAULT_BUDGET)
    }
}

impl BernoulliCache {
    pub fn new(budget: usize) -> BernoulliCache {
        BernoulliCache {
            budget,
            table: RwLock::new(vec![Rat::one()]),
        }
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn within_budget(&self, k: &BigInt) -> bool {
        k.to_usize().is_some_and(|k| k <= self.budget)
    }

    /// `B_k` with `B_1 = -1/2`.
    pub fn bernoulli_exact(&self, k: usize) -> Result<Rat> {
        if k > self.budget {
            return Err(Error::Budget {
                k: BigUint::from(k),
                budget: self.budget,
            });
        }
        match k {
            0 => return Ok(Rat::one()),
            1 => return Ok(Rat::new(BigInt::from(-1), BigInt::from(2))),
            _ if k % 2 == 1 => return Ok(Rat::zero()),
            _ => {}
        }
        let j = k / 2;
        {
            let table = self.table.read().expect("bernoulli table poisoned");
            if let Some(b) = table.get(j) {
                return Ok(b.clone());
            }
        }
        let mut table = self.table.write().expect("bernoulli table poisoned");
        if table.len() <= j {
            let have = table.len() - 1;
            let target = j.max((2 * have).min(self.budget / 2));
            *table = even_bernoulli_table(target);
        }
        Ok(table[j].clone())
    }
}

/// `[B_0, B_2, ..., B_2n]` from the tangent numbers
/// `B_2i = (-1)^(i-1) 2i T_i / (4^i (4^i - 1))`.
fn even_bernoulli_table(n: usize) -> Vec<Rat> {
    let mut t = vec![BigUint::zero(); n + 1];
    if n >= 1 {
        t[1] = BigUint::one();
    }
    for j in 2..=n {
        t[j] = &t[j - 1] * (j - 1);
    }
    for k in 2..=n {
        for j in k..=n {
            t[j] = &t[j - 1] * (j - k) + &t[j] * (j - k + 2);
        }
    }
    let mut out = Vec::with_capacity(n + 1);
    out.push(Rat::one());
    for (i, ti) in t.iter().enumerate().skip(1) {
        let four = BigInt::one() << (2 * i);
        let den = &four * (&four - 1u32);
        let num = BigInt::from(ti.clone()) * (2 * i);
        let b = Rat::new(num, den);
        out.push(if i % 2 == 1 { b } else { -b });
    }
    out
}

fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// `sum_{d | n} d^e`, skipping multiples of `exclude` when given.
pub fn sigma_pow(e: u32, n: u64, exclude: Option<u64>) -> BigUint {
    divisors(n)
        .into_iter()
        .filter(|d| exclude.is_none_or(|p| d % p != 0))
        .map(|d| num_traits::pow(BigUint::from(d), e as usize))
        .sum()
}

/// `sigma_pow` reduced mod `p^prec`, by modular exponentiation per divisor.
pub fn sigma_pow_mod(e: &BigUint, n: u64, p: u64, prec: u32, exclude_p: bool) -> Residue {
    let m = pow_p(p, prec);
    let total: BigUint = divisors(n)
        .into_iter()
        .filter(|d| !exclude_p || d % p != 0)
        .map(|d| BigUint::from(d).modpow(e, &m))
        .sum();
    Residue::new(&BigInt::from(total), p, prec)
}

/// Which route produced a constant term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum A0Strategy {
    Exact,
    Reduced { k0: u64, modulus: BigUint },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct A0Value {
    pub value: ScaledResidue,
    pub strategy: A0Strategy,
}

fn check_weight(k: &BigInt) -> Result<()> {
    if k.is_odd() || *k < BigInt::from(4) {
        return Err(Error::InvalidArgument(format!(
            "weight {k} must be an even integer >= 4"
        )));
    }
    Ok(())
}

fn check_prec(prec: u32) -> Result<()> {
    if prec == 0 {
        return Err(Error::InvalidArgument("precision must be at least 1".into()));
    }
    Ok(())
}

/// `(1 - p^(k-1)) B_k / k`, exactly.
fn kummer_quantity(k: usize, p: u64, cache: &BernoulliCache) -> Result<Rat> {
    let b = cache.bernoulli_exact(k)?;
    let euler = Rat::one() - p_power_rat(p, k as i64 - 1);
    Ok(euler * b / Rat::from_integer(BigInt::from(k)))
}

fn pole_term(k: &BigInt, p: u64) -> Rat {
    (Rat::one() - p_power_rat(p, -1)) / Rat::from_integer(k.clone())
}

/// `a_0(G*_k)` for `k` within the Bernoulli budget.
pub fn a0_star_exact(k: u64, p: u64, prec: u32, cache: &BernoulliCache) -> Result<ScaledResidue> {
    check_odd_prime(p)?;
    check_prec(prec)?;
    check_weight(&BigInt::from(k))?;
    // (1 - p^(k-1)) is a unit; reduce it separately to keep the rationals small
    let b = cache.bernoulli_exact(k as usize)?;
    let base = reduce_scaled_unchecked(&(-b / Rat::from_integer(BigInt::from(2 * k))), p, prec);
    let euler = &Residue::one(p, prec) - &Residue::new(&BigInt::from(pow_p(p, (k - 1).min(prec as u64) as u32)), p, prec);
    Ok(base.times_unit(&euler))
}

/// `a_0(G*_k)` from the representative `k0 ≡ k mod (p-1)`.
///
/// With `m = v_p(k - k0)` the reduced quantity is known modulo `p^(m+1)`.
/// Returns `None` when those digits do not determine the valuation and
/// `prec` unit digits.
pub fn a0_star_with_representative(
    k: &BigInt,
    k0: u64,
    p: u64,
    prec: u32,
    cache: &BernoulliCache,
) -> Result<Option<ScaledResidue>> {
    check_odd_prime(p)?;
    check_prec(prec)?;
    check_weight(k)?;
    let k0_big = BigInt::from(k0);
    check_weight(&k0_big)?;
    let diff = k - &k0_big;
    if !(&diff % BigInt::from(p - 1)).is_zero() {
        return Err(Error::WrongBranch {
            k: k0_big,
            l: (k.mod_floor(&BigInt::from(p - 1))).to_u64().expect("small"),
            modulus: p - 1,
        });
    }
    let reduced = kummer_quantity(k0 as usize, p, cache)?;
    let pole = k0.is_multiple_of(p - 1);
    let approx = if pole {
        pole_term(k, p) + reduced - pole_term(&k0_big, p)
    } else {
        reduced
    };
    let a0 = -approx / Rat::from_integer(BigInt::from(2));
    let known = match vp_int(&diff, p) {
        Valuation::Infinite => return Ok(Some(reduce_scaled_unchecked(&a0, p, prec))),
        Valuation::Finite(m) => m + 1,
    };
    match vp_rat(&a0, p) {
        Valuation::Finite(v) if v + prec as i64 <= known => {
            Ok(Some(reduce_scaled_unchecked(&a0, p, prec)))
        }
        _ => Ok(None),
    }
}

/// Strategy B: least representative `k0 >= 4` modulo `(p-1)p^m`, raising `m`
/// until the result is certified to `prec` unit digits.
pub fn a0_star_reduced(
    k: &BigInt,
    p: u64,
    prec: u32,
    cache: &BernoulliCache,
) -> Result<A0Value> {
    check_odd_prime(p)?;
    check_prec(prec)?;
    check_weight(k)?;
    let mut m = prec - 1;
    loop {
        let modulus = BigUint::from(p - 1) * pow_p(p, m);
        let modulus_int = BigInt::from(modulus.clone());
        let k0: BigInt = (k - BigInt::from(4)).mod_floor(&modulus_int) + 4;
        let k0 = match k0.to_u64() {
            Some(k0) if k0 as usize <= cache.budget() => k0,
            _ => {
                return Err(Error::PrecisionUnattainable {
                    k: k.clone(),
                    p,
                    modulus,
                    budget: cache.budget(),
                })
            }
        };
        if let Some(value) = a0_star_with_representative(k, k0, p, prec, cache)? {
            return Ok(A0Value {
                value,
                strategy: A0Strategy::Reduced { k0, modulus },
            });
        }
        m += 1;
    }
}

/// `a_0(G*_k) = -(1 - p^(k-1)) B_k / (2k)` to `prec` unit digits, exact
/// when `k` is within the budget and reduced otherwise.
pub fn a0_star(k: &BigInt, p: u64, prec: u32, cache: &BernoulliCache) -> Result<A0Value> {
    match k.to_u64() {
        Some(small) if cache.within_budget(k) => Ok(A0Value {
            value: a0_star_exact(small, p, prec, cache)?,
            strategy: A0Strategy::Exact,
        }),
        _ => a0_star_reduced(k, p, prec, cache),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regularity {
    Regular,
    Irregular,
    /// `k ≡ 0 mod (p-1)`: the representative range `{2, ..., p-3}` has no member.
    NotApplicable,
}

/// Whether `p` divides the numerator of `B_j`, `j` the representative of `k`
/// in `{2, 4, ..., p-3}`.
pub fn is_regular(k: &BigInt, p: u64, cache: &BernoulliCache) -> Result<Regularity> {
    check_odd_prime(p)?;
    if k.is_odd() {
        return Err(Error::InvalidArgument(format!("weight {k} must be even")));
    }
    let j = k.mod_floor(&BigInt::from(p - 1)).to_usize().expect("small");
    if j == 0 {
        return Ok(Regularity::NotApplicable);
    }
    let b = cache.bernoulli_exact(j)?;
    if (b.numer().abs() % BigInt::from(p)).is_zero() {
        Ok(Regularity::Irregular)
    } else {
        Ok(Regularity::Regular)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_integer::binomial;

    fn q(n: i64, d: i64) -> Rat {
        Rat::new(BigInt::from(n), BigInt::from(d))
    }

    /// `sum_{j=0}^{k} C(k+1, j) B_j = 0` solved for `B_k`, all indices up to `n`.
    fn recurrence_oracle(n: usize) -> Vec<Rat> {
        let mut b: Vec<Rat> = vec![Rat::one()];
        for k in 1..=n {
            let s: Rat = (0..k)
                .map(|j| Rat::from_integer(binomial(BigInt::from(k + 1), BigInt::from(j))) * &b[j])
                .sum();
            b.push(-s / Rat::from_integer(BigInt::from(k + 1)));
        }
        b
    }

    #[test]
    fn bernoulli_examples() {
        let c = BernoulliCache::default();
        assert_eq!(c.bernoulli_exact(0).unwrap(), q(1, 1));
        assert_eq!(c.bernoulli_exact(1).unwrap(), q(-1, 2));
        assert_eq!(c.bernoulli_exact(4).unwrap(), q(-1, 30));
        assert_eq!(c.bernoulli_exact(12).unwrap(), q(-691, 2730));
        assert_eq!(c.bernoulli_exact(7).unwrap(), q(0, 1));
    }

    #[test]
    fn cache_matches_recurrence_oracle() {
        let oracle = recurrence_oracle(120);
        let c = BernoulliCache::new(200);
        for (k, b) in oracle.iter().enumerate() {
            assert_eq!(&c.bernoulli_exact(k).unwrap(), b, "B_{k}");
        }
    }

    #[test]
    fn over_budget_is_an_error() {
        let c = BernoulliCache::new(10);
        assert!(matches!(c.bernoulli_exact(12), Err(Error::Budget { .. })));
    }

    #[test]
    fn von_staudt_clausen() {
        let c = BernoulliCache::new(400);
        for p in [3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
            for k in (2..=400).step_by(2).filter(|k| k % (p as usize - 1) == 0) {
                let b = c.bernoulli_exact(k).unwrap();
                assert_eq!(vp_rat(&b, p), Valuation::Finite(-1), "p={p} k={k}");
            }
        }
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma_pow(3, 6, None), BigUint::from(252u32));
        assert_eq!(sigma_pow(3, 6, Some(3)), BigUint::from(9u32));
        assert_eq!(sigma_pow(17, 1, Some(5)), BigUint::one());
        assert_eq!(sigma_pow_mod(&BigUint::from(5u32), 2, 5, 2, true).value(), &BigUint::from(8u32));
        let expected = (BigUint::one() + BigUint::from(2u32).pow(345)) % BigUint::from(49u32);
        assert_eq!(sigma_pow_mod(&BigUint::from(345u32), 2, 7, 2, true).value(), &expected);
        assert!(sigma_pow_mod(&BigUint::from(99u32), 1, 7, 3, false) == Residue::one(7, 3));
    }

    #[test]
    fn sigma_mod_agrees_with_exact() {
        for (e, n, p) in [(7u32, 36u64, 3u64), (11, 50, 5), (30, 49, 7), (3, 121, 11)] {
            for exclude in [false, true] {
                let exact = sigma_pow(e, n, exclude.then_some(p));
                let m = sigma_pow_mod(&BigUint::from(e), n, p, 3, exclude);
                assert_eq!(Residue::new(&BigInt::from(exact), p, 3), m);
            }
        }
    }

    #[test]
    fn a0_star_examples() {
        let c = BernoulliCache::default();
        // (1 - 5^5) * (-B_6/12) = 781/126, which is 6 mod 25
        let v = a0_star_exact(6, 5, 2, &c).unwrap();
        assert_eq!((v.val(), v.unit().clone()), (Valuation::Finite(0), BigUint::from(6u32)));
        let v = a0_star_exact(4, 5, 2, &c).unwrap();
        assert_eq!((v.val(), v.unit().clone()), (Valuation::Finite(-1), BigUint::from(12u32)));
        let a = a0_star_exact(346, 7, 2, &c).unwrap();
        let b = a0_star_reduced(&BigInt::from(346), 7, 2, &c).unwrap();
        assert_eq!(a, b.value);
        assert!(matches!(b.strategy, A0Strategy::Reduced { k0, .. } if k0 < 346));
    }

    #[test]
    fn reduced_strategy_reports_unattainable_modulus() {
        let c = BernoulliCache::new(50);
        let err = a0_star_reduced(&BigInt::from(10_000_006), 101, 3, &c).unwrap_err();
        assert!(matches!(err, Error::PrecisionUnattainable { p: 101, .. }));
    }

    #[test]
    fn representative_must_share_the_branch() {
        let c = BernoulliCache::default();
        let err = a0_star_with_representative(&BigInt::from(10), 8, 5, 2, &c).unwrap_err();
        assert!(matches!(err, Error::WrongBranch { .. }));
    }

    #[test]
    fn kummer_congruence_away_from_the_pole() {
        let c = BernoulliCache::new(700);
        let prec = 8;
        for p in [5u64, 7, 11] {
            // away from the pole X(k) is p-integral, so residues mod p^8 suffice
            let x: Vec<Option<Residue>> = (0..=700usize)
                .map(|k| {
                    (k >= 4 && k % 2 == 0 && k % (p as usize - 1) != 0)
                        .then(|| Residue::from_rat(&kummer_quantity(k, p, &c).unwrap(), p, prec).unwrap())
                })
                .collect();
            for k in (4..=700usize).step_by(2).filter(|k| k % (p as usize - 1) != 0) {
                for k2 in (k + (p as usize - 1)..=700).step_by(p as usize - 1) {
                    let m = vp_int(&BigInt::from(k2 - k), p).finite().unwrap() as u32;
                    let (a, b) = (x[k].as_ref().unwrap(), x[k2].as_ref().unwrap());
                    assert!(m < prec);
                    assert!((a - b).truncate(m + 1).is_zero(), "p={p} k={k} k'={k2}");
                }
            }
        }
    }

    #[test]
    fn regularity_examples() {
        let c = BernoulliCache::default();
        assert_eq!(is_regular(&BigInt::from(12), 691, &c).unwrap(), Regularity::Irregular);
        assert_eq!(is_regular(&BigInt::from(4), 5, &c).unwrap(), Regularity::NotApplicable);
        assert_eq!(is_regular(&BigInt::from(6), 5, &c).unwrap(), Regularity::Regular);
        assert_eq!(is_regular(&BigInt::from(2), 37, &c).unwrap(), Regularity::Regular);
        // 37 | numerator(B_32)
        assert_eq!(is_regular(&BigInt::from(32 + 36 * 5), 37, &c).unwrap(), Regularity::Irregular);
    }
}

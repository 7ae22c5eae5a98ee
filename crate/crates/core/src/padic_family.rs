//! The non-constant coefficients `a_n(G*_k)` as power series in the weight.
//!
//! For `k ≡ l (mod p-1)` and `p ∤ d`, `d^(k-1) = d^-1 ω(d)^l <d>^k`, and
//! `<d>^k = sum_M (k)_M / M! * p^M q_d^M` with `<d> = 1 + p q_d`. Expanding the
//! falling factorials `(k)_M` in powers of `k` gives the coefficients below.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::{angle_and_q, check_odd_prime, pow_p, teichmuller, Margin, Residue};
use crate::{Error, Result};

/// A point of `Z_p × Z/(p-1)`, known modulo `p^prec` in the first factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Weight {
    pub s_part: Residue,
    pub u_part: u64,
}

impl Weight {
    /// The image of an integer, `n ↦ (n, n)`.
    pub fn from_integer(k: &BigInt, p: u64, prec: u32) -> Weight {
        let u = k.mod_floor(&BigInt::from(p - 1));
        Weight {
            s_part: Residue::new(k, p, prec),
            u_part: u64::try_from(&u).expect("reduced"),
        }
    }
}

/// Coefficients of `k(k-1)...(k-m+1)`, constant term first.
pub fn stirling_falling(m: usize) -> Vec<BigInt> {
    let mut c = vec![BigInt::one()];
    for j in 0..m {
        // multiply by (k - j)
        let mut next = vec![BigInt::zero(); c.len() + 1];
        for (i, a) in c.iter().enumerate() {
            next[i + 1] += a;
            next[i] -= a * BigInt::from(j);
        }
        c = next;
    }
    c
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaylorCoeffs {
    pub n: u64,
    pub p: u64,
    /// Branch, reduced into `[0, p-1)`.
    pub l: u64,
    pub prec: u32,
    pub m_max: u32,
    /// `a_m` modulo `p^prec` for `m = 0..=m_max`.
    pub coeffs: Vec<Residue>,
}

/// Least truncation point for which every omitted term has `v_p >= prec`.
pub fn default_m_max(p: u64, prec: u32) -> u32 {
    let num = prec as u64 * (p - 1);
    num.div_ceil(p - 2) as u32
}

fn tail_is_negligible(p: u64, prec: u32, m_max: u32) -> bool {
    (m_max as u64 + 1) * (p - 2) >= prec as u64 * (p - 1)
}

fn legendre(m: u64, p: u64) -> u64 {
    let mut v = 0;
    let mut q = m / p;
    while q > 0 {
        v += q;
        q /= p;
    }
    v
}

/// `p^M / M!` modulo `p^prec`; always `p`-integral.
fn p_power_over_factorial(m: u64, p: u64, prec: u32) -> Result<Residue> {
    let v = legendre(m, p);
    let shift = m - v;
    if shift >= prec as u64 {
        return Ok(Residue::zero(p, prec));
    }
    let mut unit = Residue::one(p, prec);
    for j in 1..=m {
        let mut x = j;
        while x % p == 0 {
            x /= p;
        }
        unit = &unit * &Residue::from_u64(x, p, prec);
    }
    let scale = Residue::new(&BigInt::from(pow_p(p, shift as u32)), p, prec);
    Ok(&scale * &unit.inv()?)
}

pub fn taylor_coeffs(n: u64, p: u64, l: u64, prec: u32, m_max: Option<u32>) -> Result<TaylorCoeffs> {
    check_odd_prime(p)?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    if prec == 0 {
        return Err(Error::InvalidArgument("precision must be at least 1".into()));
    }
    if !l.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!("branch l = {l} must be even")));
    }
    let m_max = m_max.unwrap_or_else(|| default_m_max(p, prec));
    if !tail_is_negligible(p, prec, m_max) {
        return Err(Error::InvalidArgument(format!(
            "m_max = {m_max} leaves a tail of valuation below {prec} at p = {p}"
        )));
    }
    let l = l % (p - 1);

    // weights d^-1 ω(d)^l and q_d for the divisors prime to p
    let mut parts: Vec<(Residue, Residue)> = Vec::new();
    for d in 1..=n {
        if !n.is_multiple_of(d) || d % p == 0 {
            continue;
        }
        let db = BigInt::from(d);
        let (_, q) = angle_and_q(&db, p, prec + 1)?;
        let w = &Residue::new(&db, p, prec).inv()? * &teichmuller(&db, p, prec)?.pow_u64(l);
        parts.push((q, w));
    }

    let size = m_max as usize + 1;
    let mut coeffs = vec![Residue::zero(p, prec); size];
    let mut powers: Vec<Residue> = parts.iter().map(|_| Residue::one(p, prec)).collect();
    for big_m in 0..size {
        let c_m = parts
            .iter()
            .zip(&powers)
            .fold(Residue::zero(p, prec), |acc, ((_, w), qm)| &acc + &(w * qm));
        for ((q, _), qm) in parts.iter().zip(powers.iter_mut()) {
            *qm = &*qm * q;
        }
        let factor = p_power_over_factorial(big_m as u64, p, prec)?;
        if factor.is_zero() || c_m.is_zero() {
            continue;
        }
        let term = &factor * &c_m;
        for (m, b) in stirling_falling(big_m).iter().enumerate() {
            coeffs[m] = &coeffs[m] + &(&term * &Residue::new(b, p, prec));
        }
    }
    Ok(TaylorCoeffs { n, p, l, prec, m_max, coeffs })
}

/// `sum_m a_m s^m` at a point of the branch `tc.l`.
pub fn eval_taylor_at(tc: &TaylorCoeffs, x: &Weight) -> Result<Residue> {
    if x.u_part % (tc.p - 1) != tc.l {
        return Err(Error::WrongBranch {
            k: BigInt::from(x.u_part),
            l: tc.l,
            modulus: tc.p - 1,
        });
    }
    let s = x.s_part.truncate(tc.prec);
    let mut acc = Residue::zero(tc.p, tc.prec);
    for a in tc.coeffs.iter().rev() {
        acc = &(&acc * &s) + a;
    }
    Ok(acc)
}

/// `a_n(G*_k)` modulo `p^prec` from the series.
pub fn eval_taylor(tc: &TaylorCoeffs, k: &BigInt) -> Result<Residue> {
    let branch = k.mod_floor(&BigInt::from(tc.p - 1));
    if branch != BigInt::from(tc.l) {
        return Err(Error::WrongBranch { k: k.clone(), l: tc.l, modulus: tc.p - 1 });
    }
    if k < &BigInt::from(4) || k.is_odd() {
        return Err(Error::InvalidArgument(format!("weight {k} must be even and at least 4")));
    }
    eval_taylor_at(tc, &Weight::from_integer(k, tc.p, tc.prec))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundCheck {
    pub m: u32,
    pub observed: Margin,
    /// `m - m/(p-1)`, rounded up.
    pub general: i64,
    /// `m`, when `p >= m + 2`.
    pub small_m: Option<i64>,
    pub pass_general: bool,
    pub pass_small_m: Option<bool>,
    /// False when the coefficient vanished modulo `p^prec` and `prec` is
    /// below a bound, so the bound is consistent but not proved.
    pub certified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValuationBoundReport {
    pub checks: Vec<BoundCheck>,
    pub pass: bool,
}

/// Whether `observed` meets `bound`, and whether that is proved rather than
/// merely consistent with the available precision.
fn meets(observed: Margin, bound: i64) -> (bool, bool) {
    match observed {
        Margin::Exact(v) => (v >= bound, true),
        Margin::AtLeast(w) => (true, w >= bound),
        Margin::Infinite => (true, true),
    }
}

pub fn check_valuation_bounds(tc: &TaylorCoeffs) -> ValuationBoundReport {
    let p = tc.p as i64;
    let checks: Vec<BoundCheck> = tc
        .coeffs
        .iter()
        .enumerate()
        .map(|(m, a)| {
            let mi = m as i64;
            let general = mi - mi / (p - 1);
            let small_m = (p >= mi + 2).then_some(mi);
            let observed = a.margin();
            let (pass_general, cert_general) = meets(observed, general);
            let small = small_m.map(|b| meets(observed, b));
            BoundCheck {
                m: m as u32,
                observed,
                general,
                small_m,
                pass_general,
                pass_small_m: small.map(|s| s.0),
                certified: cert_general && small.is_none_or(|s| s.1),
            }
        })
        .collect();
    let pass = checks
        .iter()
        .all(|c| c.pass_general && c.pass_small_m.unwrap_or(true));
    ValuationBoundReport { checks, pass }
}

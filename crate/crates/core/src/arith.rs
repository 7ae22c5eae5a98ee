//! Exact scalars and p-adic bookkeeping.
//!
//! [`Rat`] is the universal exact scalar. p-adic quantities appear in three
//! shapes:
//! - [`Residue`]: an integer class modulo `p^W`.
//! - [`ScaledResidue`]: `x = p^val * unit` with the unit known modulo `p^W`,
//!   so values with negative valuation still have a normal form.
//! - [`PadicApprox`]: a rational known modulo `p^A` (absolute precision), the
//!   working type for sums of terms of mixed precision.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::{Error, Result};

pub type Rat = BigRational;

/// A valuation in `Z ∪ {+∞}`. `Finite` orders below `Infinite`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == Valuation::Infinite
    }
}

impl Add for Valuation {
    type Output = Valuation;

    fn add(self, rhs: Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinite,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

/// What a finite-precision computation can say about `v_p` of a quantity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Margin {
    /// The valuation is exactly this value.
    Exact(i64),
    /// The quantity vanishes to the available precision; the valuation is at least this.
    AtLeast(i64),
    /// The quantity is exactly zero.
    Infinite,
}

impl Margin {
    /// Whether the quantity is certified to vanish modulo `p^n`.
    pub fn meets(self, n: i64) -> bool {
        match self {
            Margin::Exact(v) | Margin::AtLeast(v) => v >= n,
            Margin::Infinite => true,
        }
    }

    /// Truncates finite margins above `limit` to `AtLeast(limit)`.
    pub fn cap(self, limit: i64) -> Margin {
        match self {
            Margin::Exact(v) | Margin::AtLeast(v) if v >= limit => Margin::AtLeast(limit),
            m => m,
        }
    }

    pub fn from_valuation(v: Valuation) -> Margin {
        match v {
            Valuation::Finite(v) => Margin::Exact(v),
            Valuation::Infinite => Margin::Infinite,
        }
    }
}

impl fmt::Display for Margin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Margin::Exact(v) => write!(f, "{v}"),
            Margin::AtLeast(v) => write!(f, ">={v}"),
            Margin::Infinite => f.write_str("inf"),
        }
    }
}

/// Deterministic trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) || n.is_multiple_of(3) {
        return false;
    }
    let mut d = 5u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) || n.is_multiple_of(d + 2) {
            return false;
        }
        d += 6;
    }
    true
}

pub(crate) fn check_odd_prime(p: u64) -> Result<()> {
    if p == 2 || !is_prime(p) {
        return Err(Error::InvalidArgument(format!("{p} is not an odd prime")));
    }
    Ok(())
}

/// Primes in the half-open window `(lo, hi]`.
pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    (lo.saturating_add(1)..=hi).filter(|&n| is_prime(n)).collect()
}

pub fn pow_p(p: u64, e: u32) -> BigUint {
    num_traits::pow(BigUint::from(p), e as usize)
}

pub(crate) fn vp_int(x: &BigInt, p: u64) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinite;
    }
    let p = BigInt::from(p);
    let mut x = x.clone();
    let mut v = 0;
    loop {
        let (q, r) = x.div_rem(&p);
        if !r.is_zero() {
            return Valuation::Finite(v);
        }
        x = q;
        v += 1;
    }
}

pub(crate) fn vp_rat(x: &Rat, p: u64) -> Valuation {
    match vp_int(x.numer(), p) {
        Valuation::Infinite => Valuation::Infinite,
        Valuation::Finite(a) => {
            let b = vp_int(x.denom(), p).finite().unwrap_or(0);
            Valuation::Finite(a - b)
        }
    }
}

/// p-adic valuation of a rational; `+∞` exactly for zero.
pub fn vp(x: &Rat, p: u64) -> Result<Valuation> {
    check_odd_prime(p)?;
    Ok(vp_rat(x, p))
}

/// `p^e` as a rational, for any sign of `e`.
pub fn p_power_rat(p: u64, e: i64) -> Rat {
    let mag = BigInt::from(pow_p(p, e.unsigned_abs() as u32));
    if e >= 0 {
        Rat::from_integer(mag)
    } else {
        Rat::new(BigInt::one(), mag)
    }
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

/// An integer class modulo `p^prec`, stored as its least nonnegative representative.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Residue {
    p: u64,
    prec: u32,
    value: BigUint,
}

impl Residue {
    pub fn new(value: &BigInt, p: u64, prec: u32) -> Residue {
        let m = BigInt::from(pow_p(p, prec));
        let value = value.mod_floor(&m).to_biguint().expect("nonnegative after mod_floor");
        Residue { p, prec, value }
    }

    pub fn from_u64(value: u64, p: u64, prec: u32) -> Residue {
        Residue::new(&BigInt::from(value), p, prec)
    }

    pub fn zero(p: u64, prec: u32) -> Residue {
        Residue { p, prec, value: BigUint::zero() }
    }

    pub fn one(p: u64, prec: u32) -> Residue {
        Residue::from_u64(1, p, prec)
    }

    /// Reduction of a p-integral rational. Fails when `p` divides the denominator.
    pub fn from_rat(x: &Rat, p: u64, prec: u32) -> Result<Residue> {
        let m = BigInt::from(pow_p(p, prec));
        if prec == 0 {
            return Ok(Residue::zero(p, 0));
        }
        let inv = mod_inverse(x.denom(), &m).ok_or(Error::NotUnit { p, prec })?;
        Ok(Residue::new(&(x.numer() * inv), p, prec))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn modulus(&self) -> BigUint {
        pow_p(self.p, self.prec)
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn to_bigint(&self) -> BigInt {
        BigInt::from(self.value.clone())
    }

    pub fn to_rat(&self) -> Rat {
        Rat::from_integer(self.to_bigint())
    }

    /// Valuation of the class: exact when nonzero, `AtLeast(prec)` for the zero class.
    pub fn margin(&self) -> Margin {
        if self.value.is_zero() {
            Margin::AtLeast(self.prec as i64)
        } else {
            Margin::from_valuation(vp_int(&self.to_bigint(), self.p))
        }
    }

    pub fn pow(&self, e: &BigUint) -> Residue {
        Residue {
            p: self.p,
            prec: self.prec,
            value: self.value.modpow(e, &self.modulus()),
        }
    }

    pub fn pow_u64(&self, e: u64) -> Residue {
        self.pow(&BigUint::from(e))
    }

    pub fn inv(&self) -> Result<Residue> {
        let m = BigInt::from(self.modulus());
        let inv = mod_inverse(&self.to_bigint(), &m).ok_or(Error::NotUnit {
            p: self.p,
            prec: self.prec,
        })?;
        Ok(Residue::new(&inv, self.p, self.prec))
    }

    /// The image in `Z/p^prec` for `prec <= self.prec`.
    pub fn truncate(&self, prec: u32) -> Residue {
        assert!(prec <= self.prec, "cannot raise precision by truncation");
        Residue::new(&self.to_bigint(), self.p, prec)
    }

    fn check_compatible(&self, other: &Residue) {
        assert!(
            self.p == other.p && self.prec == other.prec,
            "residues mod {}^{} and {}^{} mixed",
            self.p,
            self.prec,
            other.p,
            other.prec
        );
    }
}

impl Add for &Residue {
    type Output = Residue;

    fn add(self, rhs: &Residue) -> Residue {
        self.check_compatible(rhs);
        let v = (&self.value + &rhs.value) % self.modulus();
        Residue { p: self.p, prec: self.prec, value: v }
    }
}

impl Sub for &Residue {
    type Output = Residue;

    fn sub(self, rhs: &Residue) -> Residue {
        self.check_compatible(rhs);
        let d = self.to_bigint() - rhs.to_bigint();
        Residue::new(&d, self.p, self.prec)
    }
}

impl Mul for &Residue {
    type Output = Residue;

    fn mul(self, rhs: &Residue) -> Residue {
        self.check_compatible(rhs);
        let v = (&self.value * &rhs.value) % self.modulus();
        Residue { p: self.p, prec: self.prec, value: v }
    }
}

impl Neg for &Residue {
    type Output = Residue;

    fn neg(self) -> Residue {
        Residue::new(&-self.to_bigint(), self.p, self.prec)
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}^{}", self.value, self.p, self.prec)
    }
}

/// `x = p^val * unit` with `unit` a unit known modulo `p^prec`.
///
/// The zero value has `val = Infinite` and unit 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ScaledResidue {
    p: u64,
    prec: u32,
    val: Valuation,
    unit: BigUint,
}

impl ScaledResidue {
    /// Multiplies by a `p`-adic unit known to the same precision.
    pub(crate) fn times_unit(&self, u: &Residue) -> ScaledResidue {
        assert_eq!((self.p, self.prec), (u.p, u.prec));
        if self.is_zero() {
            return self.clone();
        }
        ScaledResidue {
            unit: (&self.unit_residue() * u).value,
            ..self.clone()
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn val(&self) -> Valuation {
        self.val
    }

    pub fn unit(&self) -> &BigUint {
        &self.unit
    }

    pub fn unit_residue(&self) -> Residue {
        Residue::new(&BigInt::from(self.unit.clone()), self.p, self.prec)
    }

    pub fn is_zero(&self) -> bool {
        self.val.is_infinite()
    }

    /// The representative `unit * p^val` as an exact rational.
    pub fn to_rat(&self) -> Rat {
        match self.val {
            Valuation::Infinite => Rat::zero(),
            Valuation::Finite(v) => {
                Rat::from_integer(BigInt::from(self.unit.clone())) * p_power_rat(self.p, v)
            }
        }
    }
}

impl fmt::Display for ScaledResidue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(val {}, unit {} mod {}^{})", self.val, self.unit, self.p, self.prec)
    }
}

/// Normal form `(v_p(x), x * p^-v_p(x) mod p^prec)` of an exact rational.
pub fn reduce_scaled(x: &Rat, p: u64, prec: u32) -> Result<ScaledResidue> {
    check_odd_prime(p)?;
    if prec == 0 {
        return Err(Error::InvalidArgument("precision must be at least 1".into()));
    }
    Ok(reduce_scaled_unchecked(x, p, prec))
}

pub(crate) fn reduce_scaled_unchecked(x: &Rat, p: u64, prec: u32) -> ScaledResidue {
    let (Valuation::Finite(a), Valuation::Finite(b)) = (vp_int(x.numer(), p), vp_int(x.denom(), p)) else {
        return ScaledResidue {
            p,
            prec,
            val: Valuation::Infinite,
            unit: BigUint::zero(),
        };
    };
    let strip = |y: &BigInt, e: i64| y / BigInt::from(pow_p(p, e as u32));
    let m = BigInt::from(pow_p(p, prec));
    let num = strip(x.numer(), a).mod_floor(&m);
    let inv = mod_inverse(&strip(x.denom(), b), &m).expect("unit part is p-integral");
    ScaledResidue {
        p,
        prec,
        val: Valuation::Finite(a - b),
        unit: (num * inv).mod_floor(&m).to_biguint().expect("nonnegative"),
    }
}

/// A rational number known modulo `p^prec`; `prec = None` means exact.
///
/// Inexact values are kept in the canonical form `p^v * u` with
/// `0 <= u < p^(prec - v)`, or zero when nothing below `p^prec` survives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PadicApprox {
    p: u64,
    value: Rat,
    prec: Option<i64>,
}

impl PadicApprox {
    pub fn exact(value: Rat, p: u64) -> PadicApprox {
        PadicApprox { p, value, prec: None }
    }

    pub fn new(value: Rat, p: u64, prec: i64) -> PadicApprox {
        let mut a = PadicApprox { p, value, prec: Some(prec) };
        a.normalize();
        a
    }

    pub fn from_scaled(s: &ScaledResidue) -> PadicApprox {
        match s.val {
            Valuation::Infinite => PadicApprox::exact(Rat::zero(), s.p),
            Valuation::Finite(v) => PadicApprox::new(s.to_rat(), s.p, v + s.prec as i64),
        }
    }

    pub fn from_residue(r: &Residue) -> PadicApprox {
        PadicApprox::new(r.to_rat(), r.p, r.prec as i64)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn value(&self) -> &Rat {
        &self.value
    }

    pub fn prec(&self) -> Option<i64> {
        self.prec
    }

    fn normalize(&mut self) {
        let Some(a) = self.prec else { return };
        match vp_rat(&self.value, self.p) {
            Valuation::Finite(v) if v < a => {
                let u = &self.value * p_power_rat(self.p, -v);
                let u = Residue::from_rat(&u, self.p, (a - v) as u32).expect("unit");
                self.value = u.to_rat() * p_power_rat(self.p, v);
            }
            _ => self.value = Rat::zero(),
        }
    }

    fn min_prec(a: Option<i64>, b: Option<i64>) -> Option<i64> {
        match (a, b) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, None) => x,
            (None, y) => y,
        }
    }

    fn with(value: Rat, p: u64, prec: Option<i64>) -> PadicApprox {
        match prec {
            None => PadicApprox::exact(value, p),
            Some(a) => PadicApprox::new(value, p, a),
        }
    }

    /// Multiplication by an exact rational: absolute precision shifts by its valuation.
    pub fn scale(&self, c: &Rat) -> PadicApprox {
        if c.is_zero() {
            return PadicApprox::exact(Rat::zero(), self.p);
        }
        let shift = vp_rat(c, self.p).finite().expect("nonzero");
        PadicApprox::with(&self.value * c, self.p, self.prec.map(|a| a + shift))
    }

    /// Lowers the absolute precision to at most `prec`.
    pub fn cap(&self, prec: i64) -> PadicApprox {
        PadicApprox::new(self.value.clone(), self.p, self.prec.map_or(prec, |a| a.min(prec)))
    }

    pub fn margin(&self) -> Margin {
        if self.value.is_zero() {
            return match self.prec {
                None => Margin::Infinite,
                Some(a) => Margin::AtLeast(a),
            };
        }
        let v = vp_rat(&self.value, self.p).finite().expect("nonzero");
        Margin::Exact(v)
    }

    /// The scaled normal form at relative precision `prec`, when the known digits allow it.
    pub fn to_scaled(&self, prec: u32) -> Option<ScaledResidue> {
        if prec == 0 {
            return None;
        }
        match (self.prec, self.margin()) {
            (None, _) => Some(reduce_scaled_unchecked(&self.value, self.p, prec)),
            (Some(a), Margin::Exact(v)) if a - v >= prec as i64 => {
                Some(reduce_scaled_unchecked(&self.value, self.p, prec))
            }
            _ => None,
        }
    }
}

impl Add for &PadicApprox {
    type Output = PadicApprox;

    fn add(self, rhs: &PadicApprox) -> PadicApprox {
        assert_eq!(self.p, rhs.p);
        PadicApprox::with(
            &self.value + &rhs.value,
            self.p,
            PadicApprox::min_prec(self.prec, rhs.prec),
        )
    }
}

impl Sub for &PadicApprox {
    type Output = PadicApprox;

    fn sub(self, rhs: &PadicApprox) -> PadicApprox {
        assert_eq!(self.p, rhs.p);
        PadicApprox::with(
            &self.value - &rhs.value,
            self.p,
            PadicApprox::min_prec(self.prec, rhs.prec),
        )
    }
}

impl Neg for &PadicApprox {
    type Output = PadicApprox;

    fn neg(self) -> PadicApprox {
        PadicApprox::with(-self.value.clone(), self.p, self.prec)
    }
}

impl fmt::Display for PadicApprox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.prec {
            None => write!(f, "{}", self.value),
            Some(a) => write!(f, "{} + O({}^{})", self.value, self.p, a),
        }
    }
}

/// Teichmüller lift `ω(d) mod p^prec`, computed as `d^(p^(prec-1))`.
pub fn teichmuller(d: &BigInt, p: u64, prec: u32) -> Result<Residue> {
    check_odd_prime(p)?;
    if prec == 0 {
        return Err(Error::InvalidArgument("precision must be at least 1".into()));
    }
    if (d % BigInt::from(p)).is_zero() {
        return Err(Error::InvalidArgument(format!("{p} divides {d}")));
    }
    Ok(Residue::new(d, p, prec).pow(&pow_p(p, prec - 1)))
}

/// `(⟨d⟩ mod p^prec, q_d mod p^(prec-1))` where `⟨d⟩ = d/ω(d) = 1 + p*q_d`.
pub fn angle_and_q(d: &BigInt, p: u64, prec: u32) -> Result<(Residue, Residue)> {
    if prec < 2 {
        return Err(Error::InvalidArgument("angle_and_q needs precision at least 2".into()));
    }
    let omega = teichmuller(d, p, prec)?;
    let angle = &Residue::new(d, p, prec) * &omega.inv()?;
    let shifted = angle.to_bigint() - BigInt::one();
    debug_assert!((&shifted % BigInt::from(p)).is_zero(), "<d> must be 1 mod p");
    let q = Residue::new(&(shifted / BigInt::from(p)), p, prec - 1);
    Ok((angle, q))
}

/// Converts a possibly negative big integer to `i64`, failing with a named argument.
pub(crate) fn to_i64(x: &BigInt, what: &str) -> Result<i64> {
    x.to_i64()
        .ok_or_else(|| Error::InvalidArgument(format!("{what} = {x} does not fit in 64 bits")))
}

//! Polynomials over `Z` and `Q`, and the rational function field `Q(t)`.
//!
//! [`RatFunc`] is always stored reduced with a monic denominator, so the
//! t-adic valuation and the `t^d * h(t)` split read off the lowest nonzero
//! coefficients directly.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{Rat, Valuation};
use crate::{Error, Result};

/// Element of `Z[t]`, coefficient `i` multiplies `t^i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> IntPoly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> IntPoly {
        IntPoly::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_i64(&self, x: i64) -> BigInt {
        self.eval(&BigInt::from(x))
    }

    pub fn to_qpoly(&self) -> QPoly {
        QPoly::new(self.coeffs.iter().map(|c| Rat::from_integer(c.clone())).collect())
    }

    pub fn to_ratfunc(&self) -> RatFunc {
        RatFunc::from_poly(self.to_qpoly())
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_qpoly().fmt(f)
    }
}

/// Element of `Q[t]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QPoly {
    coeffs: Vec<Rat>,
}

impl QPoly {
    pub fn new(mut coeffs: Vec<Rat>) -> QPoly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        QPoly { coeffs }
    }

    pub fn zero() -> QPoly {
        QPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Rat) -> QPoly {
        QPoly::new(vec![c])
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rat> {
        self.coeffs.last()
    }

    /// Index of the lowest nonzero coefficient.
    pub fn lowest_index(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        self.coeffs.iter().rev().fold(Rat::zero(), |acc, c| acc * x + c)
    }

    pub fn scale(&self, c: &Rat) -> QPoly {
        QPoly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    fn monic(&self) -> QPoly {
        match self.leading() {
            Some(l) => self.scale(&l.recip()),
            None => QPoly::zero(),
        }
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &QPoly) -> (QPoly, QPoly) {
        let dl = d.leading().expect("division by the zero polynomial").clone();
        let dd = d.coeffs.len() - 1;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (QPoly::zero(), self.clone());
        }
        let mut quot = vec![Rat::zero(); rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = &rem[i + dd] / &dl;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    rem[i + j] -= &c * dc;
                }
            }
            quot[i] = c;
        }
        rem.truncate(dd);
        (QPoly::new(quot), QPoly::new(rem))
    }

    /// Monic gcd; zero only when both inputs are zero.
    pub fn gcd(&self, other: &QPoly) -> QPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn pow(&self, e: u32) -> QPoly {
        let mut acc = QPoly::constant(Rat::one());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }
}

impl Add for &QPoly {
    type Output = QPoly;

    fn add(self, rhs: &QPoly) -> QPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let zero = Rat::zero();
        QPoly::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&zero) + rhs.coeffs.get(i).unwrap_or(&zero))
                .collect(),
        )
    }
}

impl Neg for &QPoly {
    type Output = QPoly;

    fn neg(self) -> QPoly {
        QPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Sub for &QPoly {
    type Output = QPoly;

    fn sub(self, rhs: &QPoly) -> QPoly {
        self + &(-rhs)
    }
}

impl Mul for &QPoly {
    type Output = QPoly;

    fn mul(self, rhs: &QPoly) -> QPoly {
        if self.is_zero() || rhs.is_zero() {
            return QPoly::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        QPoly::new(out)
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            }
            first = false;
            let unit = mag.is_one();
            match (k, unit) {
                (0, _) => write!(f, "{mag}")?,
                (_, true) => {}
                (_, false) => write!(f, "{mag}*")?,
            }
            match k {
                0 => {}
                1 => f.write_str("t")?,
                _ => write!(f, "t^{k}")?,
            }
        }
        Ok(())
    }
}

/// Element of `Q(t)` in reduced form with monic denominator; zero is `0/1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: QPoly,
    den: QPoly,
}

impl RatFunc {
    /// `None` when `den` is the zero polynomial.
    pub fn new(num: QPoly, den: QPoly) -> Option<RatFunc> {
        if den.is_zero() {
            return None;
        }
        if num.is_zero() {
            return Some(RatFunc::zero());
        }
        let g = num.gcd(&den);
        let (num, _) = num.div_rem(&g);
        let (den, _) = den.div_rem(&g);
        let lead = den.leading().expect("nonzero").recip();
        Some(RatFunc {
            num: num.scale(&lead),
            den: den.scale(&lead),
        })
    }

    pub fn from_poly(num: QPoly) -> RatFunc {
        RatFunc::new(num, QPoly::constant(Rat::one())).expect("unit denominator")
    }

    pub fn zero() -> RatFunc {
        RatFunc {
            num: QPoly::zero(),
            den: QPoly::constant(Rat::one()),
        }
    }

    pub fn constant(c: Rat) -> RatFunc {
        RatFunc::from_poly(QPoly::constant(c))
    }

    pub fn from_i64(c: i64) -> RatFunc {
        RatFunc::constant(Rat::from_integer(BigInt::from(c)))
    }

    /// The indeterminate `t`.
    pub fn t() -> RatFunc {
        RatFunc::from_poly(QPoly::new(vec![Rat::zero(), Rat::one()]))
    }

    pub fn num(&self) -> &QPoly {
        &self.num
    }

    pub fn den(&self) -> &QPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn checked_div(&self, rhs: &RatFunc) -> Option<RatFunc> {
        if rhs.is_zero() {
            return None;
        }
        RatFunc::new(&self.num * &rhs.den, &self.den * &rhs.num)
    }

    pub fn pow(&self, e: u32) -> RatFunc {
        RatFunc::new(self.num.pow(e), self.den.pow(e)).expect("nonzero denominator")
    }

    /// t-adic valuation; `+∞` for zero.
    pub fn vt(&self) -> Valuation {
        match (self.num.lowest_index(), self.den.lowest_index()) {
            (Some(a), Some(b)) => Valuation::Finite(a as i64 - b as i64),
            _ => Valuation::Infinite,
        }
    }

    /// Exact value at the integer `x`.
    pub fn eval_at(&self, x: &BigInt) -> Result<Rat> {
        let xr = Rat::from_integer(x.clone());
        let d = self.den.eval(&xr);
        if d.is_zero() {
            return Err(Error::Pole { at: x.clone() });
        }
        Ok(self.num.eval(&xr) / d)
    }

    /// Splits `h = t^d * q(t)` with `q(0) != 0`; returns `(d, q(0))`.
    pub fn strip_t(&self) -> Result<(i64, Rat)> {
        let (Some(a), Some(b)) = (self.num.lowest_index(), self.den.lowest_index()) else {
            return Err(Error::Undefined("strip_t of the zero function".into()));
        };
        Ok((a as i64 - b as i64, &self.num.coeffs[a] / &self.den.coeffs[b]))
    }

    /// Writes `h = t^d * c * A(t)/B(t)` with `A, B` primitive in `Z[t]` and
    /// `A(0), B(0) != 0`; returns `(c, A(0), B(0))`. `None` for zero.
    pub fn integer_form(&self) -> Option<(Rat, BigInt, BigInt)> {
        fn primitive(p: &QPoly) -> (Rat, BigInt) {
            let lcm = p
                .coeffs
                .iter()
                .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
            let ints: Vec<BigInt> = p
                .coeffs
                .iter()
                .map(|c| (c * Rat::from_integer(lcm.clone())).to_integer())
                .collect();
            let content = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
            let low = ints.iter().find(|c| !c.is_zero()).expect("nonzero");
            (Rat::new(content.clone(), lcm), low / &content)
        }
        if self.is_zero() {
            return None;
        }
        let (cn, a0) = primitive(&self.num);
        let (cd, b0) = primitive(&self.den);
        Some((cn / cd, a0, b0))
    }

    /// The numerator as an integer polynomial when `self` lies in `Z[t]`.
    pub fn to_int_poly(&self) -> Option<IntPoly> {
        if self.den.degree() != Some(0) {
            return None;
        }
        let d = &self.den.coeffs[0];
        self.num
            .coeffs
            .iter()
            .map(|c| {
                let v = c / d;
                v.is_integer().then(|| v.to_integer())
            })
            .collect::<Option<Vec<_>>>()
            .map(IntPoly::new)
    }
}

impl From<&IntPoly> for RatFunc {
    fn from(p: &IntPoly) -> RatFunc {
        p.to_ratfunc()
    }
}

impl Add for &RatFunc {
    type Output = RatFunc;

    fn add(self, rhs: &RatFunc) -> RatFunc {
        if self.den == rhs.den {
            return RatFunc::new(&self.num + &rhs.num, self.den.clone()).expect("nonzero");
        }
        RatFunc::new(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
        .expect("nonzero")
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;

    fn neg(self) -> RatFunc {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Sub for &RatFunc {
    type Output = RatFunc;

    fn sub(self, rhs: &RatFunc) -> RatFunc {
        self + &(-rhs)
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;

    fn mul(self, rhs: &RatFunc) -> RatFunc {
        RatFunc::new(&self.num * &rhs.num, &self.den * &rhs.den).expect("nonzero")
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.degree() == Some(0) {
            // monic constant denominator is exactly 1
            return self.num.fmt(f);
        }
        write!(f, "({})/({})", self.num, self.den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn poly(c: &[i64]) -> RatFunc {
        IntPoly::from_i64s(c).to_ratfunc()
    }

    fn q(n: i64, d: i64) -> Rat {
        Rat::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn vt_examples() {
        let h = poly(&[0, 0, 1]).checked_div(&poly(&[1, 1])).unwrap();
        assert_eq!(h.vt(), Valuation::Finite(2));
        assert_eq!(poly(&[0, -2, 2]).vt(), Valuation::Finite(1));
        assert_eq!(RatFunc::zero().vt(), Valuation::Infinite);
        let inv_t = RatFunc::from_i64(1).checked_div(&RatFunc::t()).unwrap();
        assert_eq!(inv_t.vt(), Valuation::Finite(-1));
    }

    #[test]
    fn eval_examples() {
        assert_eq!(IntPoly::from_i64s(&[3, 0, 0, 1]).eval_i64(7), BigInt::from(346));
        let h = poly(&[-1, 1]).checked_div(&RatFunc::t()).unwrap();
        assert_eq!(h.eval_at(&BigInt::from(5)).unwrap(), q(4, 5));
        let pole = RatFunc::from_i64(1).checked_div(&poly(&[-5, 1])).unwrap();
        assert_eq!(
            pole.eval_at(&BigInt::from(5)),
            Err(Error::Pole { at: BigInt::from(5) })
        );
    }

    #[test]
    fn strip_t_examples() {
        assert_eq!(poly(&[0, -2, 2]).strip_t().unwrap(), (1, q(-2, 1)));
        assert_eq!(poly(&[0, 1, 0, -1]).strip_t().unwrap(), (1, q(1, 1)));
        assert_eq!(RatFunc::from_i64(6).strip_t().unwrap(), (0, q(6, 1)));
        assert!(matches!(RatFunc::zero().strip_t(), Err(Error::Undefined(_))));
    }

    #[test]
    fn reduction_cancels_common_factors() {
        // (t - t^3)/(1 - t^2) = t
        let h = poly(&[0, 1, 0, -1]).checked_div(&poly(&[1, 0, -1])).unwrap();
        assert_eq!(h, RatFunc::t());
        assert_eq!(h.to_int_poly(), Some(IntPoly::from_i64s(&[0, 1])));
    }

    #[test]
    fn integer_form_splits_content() {
        // (t + 35)/(2t + 35): content 1, A(0) = B(0) = 35
        let h = poly(&[35, 1]).checked_div(&poly(&[35, 2])).unwrap();
        let (c, a0, b0) = h.integer_form().unwrap();
        assert_eq!((c, a0, b0), (q(1, 1), BigInt::from(35), BigInt::from(35)));
        let (c, a0, _) = poly(&[0, -2, 2]).integer_form().unwrap();
        assert_eq!((c, a0), (q(2, 1), BigInt::from(-1)));
    }

    #[test]
    fn display_is_canonical() {
        assert_eq!(poly(&[0, -2, 2]).to_string(), "2*t^2 - 2*t");
        assert_eq!(poly(&[3, 0, 0, 1]).to_string(), "t^3 + 3");
        let h = poly(&[1, -1]).checked_div(&poly(&[0, 2])).unwrap();
        assert_eq!(h.to_string(), "(-1/2*t + 1/2)/(t)");
        assert_eq!(RatFunc::zero().to_string(), "0");
    }

    fn small_ratfunc() -> impl Strategy<Value = RatFunc> {
        (
            prop::collection::vec(-4i64..5, 1..4),
            prop::collection::vec(-4i64..5, 1..3),
            0u32..3,
        )
            .prop_filter_map("nonzero denominator", |(n, d, s)| {
                let den = poly(&d);
                let shifted = &poly(&n) * &RatFunc::t().pow(s);
                shifted.checked_div(&den)
            })
    }

    proptest! {
        #[test]
        fn vt_is_a_valuation(a in small_ratfunc(), b in small_ratfunc()) {
            prop_assert_eq!((&a * &b).vt(), a.vt() + b.vt());
            prop_assert!((&a + &b).vt() >= a.vt().min(b.vt()));
        }

        #[test]
        fn strip_t_reassembles(h in small_ratfunc()) {
            prop_assume!(!h.is_zero());
            let (d, q0) = h.strip_t().unwrap();
            let rest = if d >= 0 {
                h.checked_div(&RatFunc::t().pow(d as u32)).unwrap()
            } else {
                &h * &RatFunc::t().pow((-d) as u32)
            };
            prop_assert_eq!(rest.eval_at(&BigInt::zero()).unwrap(), q0.clone());
            let back = if d >= 0 {
                &rest * &RatFunc::t().pow(d as u32)
            } else {
                rest.checked_div(&RatFunc::t().pow((-d) as u32)).unwrap()
            };
            prop_assert_eq!(back, h);
        }
    }
}

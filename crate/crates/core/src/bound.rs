//! An explicit prime `P` beyond which the conditions transfer to `p`-adic
//! valuations.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::Valuation;
use crate::bernoulli::BernoulliCache;
use crate::conditions::{compute_m_s1, valuated_functions, CongruenceProblem, ValuatedFunction};
use crate::polyfield::{IntPoly, RatFunc};
use crate::Result;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundBreakdown {
    pub b1: BigInt,
    pub b2: BigInt,
    pub b3: BigInt,
    pub b4: BigInt,
    pub b5: BigInt,
    pub p: BigInt,
}

impl BoundBreakdown {
    pub fn contributions(&self) -> [&BigInt; 5] {
        [&self.b1, &self.b2, &self.b3, &self.b4, &self.b5]
    }

    /// `P` as a machine integer, if it fits.
    pub fn threshold(&self) -> Option<u64> {
        u64::try_from(&self.p).ok()
    }
}

impl fmt::Display for BoundBreakdown {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "P = {} (b1 = {}, b2 = {}, b3 = {}, b4 = {}, b5 = {})",
            self.p, self.b1, self.b2, self.b3, self.b4, self.b5
        )
    }
}

/// The nonzero functions whose t-adic valuation C1–C4 constrain.
pub fn collect_valuated_functions(
    problem: &CongruenceProblem,
    cache: &BernoulliCache,
) -> Result<Vec<ValuatedFunction>> {
    Ok(valuated_functions(problem, cache)?
        .into_iter()
        .filter(|v| !v.function.is_zero())
        .collect())
}

/// Largest of the quantities whose prime factors could make `v_p(h(p))`
/// differ from `v_t(h)`.
fn height(h: &RatFunc) -> BigInt {
    let mut best = BigInt::zero();
    let mut bump = |x: BigInt| {
        let x = x.abs();
        if x > best {
            best = x;
        }
    };
    if let Ok((_, q0)) = h.strip_t() {
        bump(q0.numer().clone());
        bump(q0.denom().clone());
    }
    if let Some((c, a0, b0)) = h.integer_form() {
        bump(c.numer().clone());
        bump(c.denom().clone());
        bump(a0);
        bump(b0);
    }
    best
}

/// Least `P_i >= 0` with `f(j) > threshold` for every integer `j > P_i`.
fn eventually_above(f: &IntPoly, threshold: &BigInt) -> BigInt {
    let mut coeffs = f.coeffs().to_vec();
    coeffs[0] -= threshold;
    let lead = coeffs.last().expect("non-constant").clone();
    let max_low = coeffs[..coeffs.len() - 1]
        .iter()
        .map(|c| c.abs())
        .max()
        .unwrap_or_default();
    // Cauchy: every real root has |x| < 1 + max|a_j| / a_d
    let cauchy = BigInt::one() + Integer::div_ceil(&max_low, &lead);
    let h = IntPoly::new(coeffs);
    let mut j = cauchy;
    while j.is_positive() {
        if !h.eval(&j).is_positive() {
            return j;
        }
        j -= 1;
    }
    BigInt::zero()
}

pub fn compute_p(problem: &CongruenceProblem, cache: &BernoulliCache) -> Result<BoundBreakdown> {
    let (min_vt, _) = compute_m_s1(problem)?;
    let n = BigInt::from(problem.exponent());
    let b1 = match min_vt {
        Valuation::Finite(m) => &n - m + 3,
        Valuation::Infinite => BigInt::zero(),
    };
    let b2 = problem
        .weights_at_one()?
        .into_iter()
        .map(|l| BigInt::from(l.unsigned_abs()) + 1)
        .max()
        .unwrap_or_default();
    let threshold = n.clone().max(BigInt::from(3));
    let b3 = problem
        .f()
        .iter()
        .map(|f| eventually_above(f, &threshold))
        .max()
        .unwrap_or_default();
    let b4 = problem
        .g()
        .iter()
        .filter(|g| !g.is_zero())
        .map(height)
        .max()
        .unwrap_or_default();
    let b5 = collect_valuated_functions(problem, cache)?
        .iter()
        .map(|v| height(&v.function))
        .max()
        .unwrap_or_default();
    let p = [&b1, &b2, &b3, &b4, &b5]
        .into_iter()
        .cloned()
        .fold(BigInt::one(), BigInt::max);
    Ok(BoundBreakdown { b1, b2, b3, b4, b5, p })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{primes_in, vp};
    use crate::conditions::fixtures::{kummer, poly, von_staudt};

    fn b(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn von_staudt_breakdown() {
        let cache = BernoulliCache::default();
        let bd = compute_p(&von_staudt(), &cache).unwrap();
        assert_eq!(
            (bd.b1.clone(), bd.b2.clone(), bd.b3.clone(), bd.b4.clone(), bd.b5.clone(), bd.p.clone()),
            (b(3), b(1), b(4), b(2), b(2), b(4))
        );
        let fs: Vec<String> = collect_valuated_functions(&von_staudt(), &cache)
            .unwrap()
            .iter()
            .map(|v| v.function.to_string())
            .collect();
        assert_eq!(fs, vec!["t", "2*t^2 - 2*t"]);
    }

    #[test]
    fn kummer_breakdown() {
        let cache = BernoulliCache::default();
        let bd = compute_p(&kummer(), &cache).unwrap();
        assert_eq!(
            (bd.b1.clone(), bd.b2.clone(), bd.b3.clone(), bd.b4.clone(), bd.b5.clone(), bd.p.clone()),
            (b(5), b(5), b(0), b(1), b(6), b(6))
        );
        let fs: Vec<RatFunc> = collect_valuated_functions(&kummer(), &cache)
            .unwrap()
            .into_iter()
            .map(|v| v.function)
            .collect();
        assert_eq!(fs.len(), 2);
        assert_eq!(fs[0], poly(&[0, 1, 0, -1]).to_ratfunc());
        assert_eq!(fs[1], poly(&[0, 6, 1, -6, 0, 0, -1]).to_ratfunc());
    }

    #[test]
    fn single_linear_weight() {
        let cache = BernoulliCache::default();
        let p = CongruenceProblem::new(1, vec![poly(&[0, 1])], vec![RatFunc::from_i64(1)], RatFunc::zero()).unwrap();
        assert_eq!(compute_p(&p, &cache).unwrap().b2, b(2));
    }

    #[test]
    fn all_zero_coefficients() {
        let cache = BernoulliCache::default();
        let p = CongruenceProblem::new(1, vec![poly(&[0, 1])], vec![RatFunc::zero()], RatFunc::zero()).unwrap();
        assert!(collect_valuated_functions(&p, &cache).unwrap().is_empty());
        let bd = compute_p(&p, &cache).unwrap();
        assert_eq!((bd.b1.clone(), bd.b4.clone(), bd.b5.clone()), (b(0), b(0), b(0)));
        assert!(bd.p >= b(1));
    }

    #[test]
    fn eventually_above_scans_past_dips() {
        // t^2 - 10t + 20 dips below 3 on [3, 7] and exceeds it from j = 8 on
        assert_eq!(eventually_above(&poly(&[20, -10, 1]), &b(3)), b(7));
        assert_eq!(eventually_above(&poly(&[-1, 1]), &b(3)), b(4));
        assert_eq!(eventually_above(&poly(&[100, 1]), &b(3)), b(0));
    }

    #[test]
    fn rational_coefficient_needs_integer_form() {
        // q(0) = 1 but 35 = 5 * 7 divides A(0) and B(0)
        let cache = BernoulliCache::default();
        let h = RatFunc::new(poly(&[35, 1]).to_qpoly(), poly(&[35, 2]).to_qpoly()).unwrap();
        let p = CongruenceProblem::new(1, vec![poly(&[3, 1])], vec![h.clone()], RatFunc::zero()).unwrap();
        let bd = compute_p(&p, &cache).unwrap();
        assert!(bd.p >= b(35));
        for q in primes_in(bd.threshold().unwrap(), 400) {
            let v = vp(&h.eval_at(&b(q as i64)).unwrap(), q).unwrap();
            assert_eq!(v, h.vt());
        }
    }

    fn soundness(problem: &CongruenceProblem) {
        let cache = BernoulliCache::default();
        let bd = compute_p(problem, &cache).unwrap();
        let lo = bd.threshold().unwrap();
        let mut hs: Vec<RatFunc> = problem.g().iter().filter(|g| !g.is_zero()).cloned().collect();
        hs.extend(collect_valuated_functions(problem, &cache).unwrap().into_iter().map(|v| v.function));
        let threshold = BigInt::from(problem.exponent()).max(b(3));
        for j in lo + 1..=lo + 1000 {
            for f in problem.f() {
                assert!(f.eval_i64(j as i64) > threshold);
            }
        }
        for q in primes_in(lo, lo + 200) {
            for h in &hs {
                let v = vp(&h.eval_at(&b(q as i64)).unwrap(), q).unwrap();
                assert_eq!(v, h.vt(), "h = {h}, p = {q}");
            }
        }
    }

    #[test]
    fn soundness_on_presets() {
        soundness(&von_staudt());
        soundness(&kummer());
    }

    #[test]
    fn order_independence() {
        let cache = BernoulliCache::default();
        let f = vec![poly(&[3, 1]), poly(&[-1, 1]), poly(&[3, 0, 0, 1])];
        let g = vec![RatFunc::from_i64(5), poly(&[0, 0, 7]).to_ratfunc(), RatFunc::from_i64(-5)];
        let a = CongruenceProblem::new(2, f.clone(), g.clone(), RatFunc::zero()).unwrap();
        let rev = CongruenceProblem::new(
            2,
            f.into_iter().rev().collect(),
            g.into_iter().rev().collect(),
            RatFunc::zero(),
        )
        .unwrap();
        assert_eq!(compute_p(&a, &cache).unwrap(), compute_p(&rev, &cache).unwrap());
        soundness(&a);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn small_poly() -> impl Strategy<Value = IntPoly> {
            (prop::collection::vec(-6i64..=6, 1..=3), 1i64..=3).prop_map(|(mut c, lead)| {
                c.push(lead);
                poly(&c)
            })
        }

        fn small_ratfunc() -> impl Strategy<Value = RatFunc> {
            (prop::collection::vec(-9i64..=9, 1..=3), prop::collection::vec(-9i64..=9, 1..=2), 0usize..=2).prop_filter_map(
                "zero denominator",
                |(n, d, shift)| {
                    let mut n = n;
                    for _ in 0..shift {
                        n.insert(0, 0);
                    }
                    RatFunc::new(poly(&n).to_qpoly(), poly(&d).to_qpoly())
                },
            )
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(24))]
            #[test]
            fn random_problems_are_sound(
                fs in prop::collection::vec(small_poly(), 1..=3),
                gs in prop::collection::vec(small_ratfunc(), 3),
                n in 1u32..=3,
            ) {
                let k = fs.len();
                let problem = CongruenceProblem::new(n, fs, gs[..k].to_vec(), RatFunc::zero()).unwrap();
                soundness(&problem);
            }
        }
    }
}

//! The sufficient conditions C1–C4, decided symbolically in `Q(t)`.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};

use crate::arith::{to_i64, Rat, Valuation};
use crate::bernoulli::BernoulliCache;
use crate::polyfield::{IntPoly, RatFunc};
use crate::{Error, Result};

/// `sum_i g_i(p) G_{f_i(p)} ≡ g_0(p) mod p^N`, one instance of the question.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CongruenceProblem {
    exponent: u32,
    f: Vec<IntPoly>,
    g: Vec<RatFunc>,
    g0: RatFunc,
}

impl CongruenceProblem {
    pub fn new(exponent: u32, f: Vec<IntPoly>, g: Vec<RatFunc>, g0: RatFunc) -> Result<Self> {
        if exponent == 0 {
            return Err(Error::InvalidArgument("the exponent N must be at least 1".into()));
        }
        if f.is_empty() || f.len() != g.len() {
            return Err(Error::InvalidArgument(format!(
                "need n >= 1 weights and as many coefficients (got {} and {})",
                f.len(),
                g.len()
            )));
        }
        for (i, fi) in f.iter().enumerate() {
            let ok = fi.degree().is_some_and(|d| d >= 1)
                && fi.leading().is_some_and(|c| c.is_positive());
            if !ok {
                return Err(Error::InvalidArgument(format!(
                    "f_{} = {fi} must be non-constant with positive leading coefficient",
                    i + 1
                )));
            }
        }
        Ok(CongruenceProblem { exponent, f, g, g0 })
    }

    /// The target exponent `N`.
    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn f(&self) -> &[IntPoly] {
        &self.f
    }

    pub fn g(&self) -> &[RatFunc] {
        &self.g
    }

    pub fn g0(&self) -> &RatFunc {
        &self.g0
    }

    pub fn len(&self) -> usize {
        self.f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f.is_empty()
    }

    pub fn with_exponent(&self, exponent: u32) -> Result<Self> {
        CongruenceProblem::new(exponent, self.f.clone(), self.g.clone(), self.g0.clone())
    }

    pub fn with_g0(&self, g0: RatFunc) -> Result<Self> {
        CongruenceProblem::new(self.exponent, self.f.clone(), self.g.clone(), g0)
    }

    /// `f_i(1)` for every index.
    pub fn weights_at_one(&self) -> Result<Vec<i64>> {
        self.f
            .iter()
            .enumerate()
            .map(|(i, fi)| to_i64(&fi.eval_i64(1), &format!("f_{}(1)", i + 1)))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConditionId {
    C1,
    C2,
    C3,
    C4,
}

impl fmt::Display for ConditionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConditionId::C1 => "C1",
            ConditionId::C2 => "C2",
            ConditionId::C3 => "C3",
            ConditionId::C4 => "C4",
        })
    }
}

/// One `v_t(h) >= required` test, or a vacuous placeholder.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionEntry {
    pub condition: ConditionId,
    pub l: Option<i64>,
    pub m: Option<u32>,
    pub observed: Valuation,
    pub required: Option<i64>,
    pub pass: bool,
    pub vacuous: bool,
}

impl ConditionEntry {
    fn tested(condition: ConditionId, l: Option<i64>, m: Option<u32>, h: &RatFunc, required: i64) -> Self {
        let observed = h.vt();
        ConditionEntry {
            condition,
            l,
            m,
            observed,
            required: Some(required),
            pass: observed >= Valuation::Finite(required),
            vacuous: false,
        }
    }

    fn vacuous(condition: ConditionId, l: Option<i64>) -> Self {
        ConditionEntry {
            condition,
            l,
            m: None,
            observed: Valuation::Infinite,
            required: None,
            pass: true,
            vacuous: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionReport {
    /// `M = min_i v_t(g_i)`.
    pub min_vt: Valuation,
    /// `S_1 = {f_i(1)}`.
    pub s1: BTreeSet<i64>,
    /// Sorted by condition, then `l`, then `m`.
    pub entries: Vec<ConditionEntry>,
    pub overall: bool,
    /// Zero-based indexes `i` with odd `f_i(1)`; no condition involves them.
    pub ignored_indexes: Vec<usize>,
    pub notes: Vec<String>,
}

impl ConditionReport {
    pub fn first_failure(&self) -> Option<&ConditionEntry> {
        self.entries.iter().find(|e| !e.pass)
    }
}

pub fn compute_m_s1(problem: &CongruenceProblem) -> Result<(Valuation, BTreeSet<i64>)> {
    let m = problem
        .g
        .iter()
        .map(RatFunc::vt)
        .min()
        .unwrap_or(Valuation::Infinite);
    let s1 = problem.weights_at_one()?.into_iter().collect();
    Ok((m, s1))
}

/// A function whose t-adic valuation one of the conditions bounds.
#[derive(Clone, Debug)]
pub struct ValuatedFunction {
    pub condition: ConditionId,
    pub l: Option<i64>,
    pub m: Option<u32>,
    pub function: RatFunc,
    pub required: i64,
}

/// The inclusive range `lo..=N-M`, empty when `M = ∞` or `N - M < lo`.
fn m_range(exponent: u32, min_vt: Valuation, lo: i64) -> Vec<u32> {
    match min_vt {
        Valuation::Infinite => Vec::new(),
        Valuation::Finite(m) => {
            let hi = exponent as i64 - m;
            (lo..=hi).map(|x| x as u32).collect()
        }
    }
}

fn class_members(at_one: &[i64], l: i64) -> impl Iterator<Item = usize> + '_ {
    at_one.iter().enumerate().filter(move |(_, &v)| v == l).map(|(i, _)| i)
}

fn c1_function(problem: &CongruenceProblem, at_one: &[i64], cache: &BernoulliCache) -> Result<RatFunc> {
    let half = RatFunc::constant(Rat::new(BigInt::one(), BigInt::from(2)));
    let t = RatFunc::t();
    let one = RatFunc::from_i64(1);
    let mut total = problem.g0.clone();

    let mut pole_sum = RatFunc::zero();
    for i in class_members(at_one, 0) {
        let term = problem.g[i]
            .checked_div(&problem.f[i].to_ratfunc())
            .expect("f_i is non-constant");
        pole_sum = &pole_sum + &term;
    }
    if !pole_sum.is_zero() {
        let one_minus_inv_t = &one - &one.checked_div(&t).expect("t != 0");
        total = &total + &(&(&half * &one_minus_inv_t) * &pole_sum);
    }

    for (i, &l) in at_one.iter().enumerate() {
        if l >= 4 && l % 2 == 0 {
            let lu = l.to_usize().expect("positive");
            let b_over_l = cache.bernoulli_exact(lu)? / Rat::from_integer(BigInt::from(l));
            let euler = &one - &t.pow((l - 1) as u32);
            let term = &(&RatFunc::constant(b_over_l) * &euler) * &problem.g[i];
            total = &total + &(&half * &term);
        }
    }
    Ok(total)
}

fn even_classes(s1: &BTreeSet<i64>, small: bool) -> Vec<i64> {
    s1.iter()
        .copied()
        .filter(|l| l % 2 == 0 && if small { *l <= 2 } else { *l >= 4 })
        .collect()
}

fn c2_functions(problem: &CongruenceProblem, at_one: &[i64], s1: &BTreeSet<i64>, min_vt: Valuation) -> Vec<(i64, Vec<(u32, RatFunc)>)> {
    even_classes(s1, true)
        .into_iter()
        .map(|l| {
            let fs = m_range(problem.exponent, min_vt, 0)
                .into_iter()
                .map(|m| {
                    let h = class_members(at_one, l).fold(RatFunc::zero(), |acc, i| {
                        &acc + &(&problem.g[i] * &problem.f[i].to_ratfunc().pow(m))
                    });
                    (m, h)
                })
                .collect();
            (l, fs)
        })
        .collect()
}

fn c3_functions(problem: &CongruenceProblem, at_one: &[i64], s1: &BTreeSet<i64>, min_vt: Valuation) -> Vec<(i64, Vec<(u32, RatFunc)>)> {
    even_classes(s1, false)
        .into_iter()
        .map(|l| {
            let fs = m_range(problem.exponent, min_vt, 1)
                .into_iter()
                .map(|m| {
                    let lm = RatFunc::constant(Rat::from_integer(num_traits::pow(BigInt::from(l), m as usize)));
                    let h = class_members(at_one, l).fold(RatFunc::zero(), |acc, i| {
                        let diff = &problem.f[i].to_ratfunc().pow(m) - &lm;
                        &acc + &(&problem.g[i] * &diff)
                    });
                    (m, h)
                })
                .collect();
            (l, fs)
        })
        .collect()
}

fn c4_functions(problem: &CongruenceProblem, at_one: &[i64], s1: &BTreeSet<i64>) -> Vec<(i64, RatFunc)> {
    even_classes(s1, false)
        .into_iter()
        .map(|l| {
            let h = class_members(at_one, l).fold(RatFunc::zero(), |acc, i| &acc + &problem.g[i]);
            (l, h)
        })
        .collect()
}

/// Every function whose valuation C1–C4 bound, in report order.
pub fn valuated_functions(problem: &CongruenceProblem, cache: &BernoulliCache) -> Result<Vec<ValuatedFunction>> {
    let at_one = problem.weights_at_one()?;
    let (min_vt, s1) = compute_m_s1(problem)?;
    let n = problem.exponent as i64;
    let mut out = vec![ValuatedFunction {
        condition: ConditionId::C1,
        l: None,
        m: None,
        function: c1_function(problem, &at_one, cache)?,
        required: n,
    }];
    for (cond, groups) in [
        (ConditionId::C2, c2_functions(problem, &at_one, &s1, min_vt)),
        (ConditionId::C3, c3_functions(problem, &at_one, &s1, min_vt)),
    ] {
        for (l, fs) in groups {
            for (m, function) in fs {
                out.push(ValuatedFunction {
                    condition: cond,
                    l: Some(l),
                    m: Some(m),
                    function,
                    required: n - m as i64,
                });
            }
        }
    }
    for (l, function) in c4_functions(problem, &at_one, &s1) {
        out.push(ValuatedFunction {
            condition: ConditionId::C4,
            l: Some(l),
            m: None,
            function,
            required: n,
        });
    }
    Ok(out)
}

pub fn check_c1(problem: &CongruenceProblem, cache: &BernoulliCache) -> Result<ConditionEntry> {
    let at_one = problem.weights_at_one()?;
    let h = c1_function(problem, &at_one, cache)?;
    Ok(ConditionEntry::tested(ConditionId::C1, None, None, &h, problem.exponent as i64))
}

fn ranged_entries(
    condition: ConditionId,
    groups: Vec<(i64, Vec<(u32, RatFunc)>)>,
    exponent: u32,
) -> Vec<ConditionEntry> {
    if groups.is_empty() {
        return vec![ConditionEntry::vacuous(condition, None)];
    }
    let mut out = Vec::new();
    for (l, fs) in groups {
        if fs.is_empty() {
            out.push(ConditionEntry::vacuous(condition, Some(l)));
        }
        for (m, h) in fs {
            out.push(ConditionEntry::tested(condition, Some(l), Some(m), &h, exponent as i64 - m as i64));
        }
    }
    out
}

pub fn check_c2(problem: &CongruenceProblem, min_vt: Valuation) -> Result<Vec<ConditionEntry>> {
    let at_one = problem.weights_at_one()?;
    let s1 = at_one.iter().copied().collect();
    Ok(ranged_entries(
        ConditionId::C2,
        c2_functions(problem, &at_one, &s1, min_vt),
        problem.exponent,
    ))
}

pub fn check_c3(problem: &CongruenceProblem, min_vt: Valuation) -> Result<Vec<ConditionEntry>> {
    let at_one = problem.weights_at_one()?;
    let s1 = at_one.iter().copied().collect();
    Ok(ranged_entries(
        ConditionId::C3,
        c3_functions(problem, &at_one, &s1, min_vt),
        problem.exponent,
    ))
}

pub fn check_c4(problem: &CongruenceProblem) -> Result<Vec<ConditionEntry>> {
    let at_one = problem.weights_at_one()?;
    let s1 = at_one.iter().copied().collect();
    let groups = c4_functions(problem, &at_one, &s1);
    if groups.is_empty() {
        return Ok(vec![ConditionEntry::vacuous(ConditionId::C4, None)]);
    }
    Ok(groups
        .into_iter()
        .map(|(l, h)| ConditionEntry::tested(ConditionId::C4, Some(l), None, &h, problem.exponent as i64))
        .collect())
}

pub fn check_all(problem: &CongruenceProblem, cache: &BernoulliCache) -> Result<ConditionReport> {
    let (min_vt, s1) = compute_m_s1(problem)?;
    let at_one = problem.weights_at_one()?;
    let mut entries = vec![check_c1(problem, cache)?];
    entries.extend(check_c2(problem, min_vt)?);
    entries.extend(check_c3(problem, min_vt)?);
    entries.extend(check_c4(problem)?);

    let mut notes = Vec::new();
    if let Valuation::Finite(m) = min_vt {
        if (problem.exponent as i64) < m && s1.iter().any(|l| l % 2 == 0 && *l <= 2) {
            notes.push("N - M < 0: the C2 range of m is empty and C2 is read as vacuous".to_string());
        }
    }
    let ignored_indexes: Vec<usize> = at_one
        .iter()
        .enumerate()
        .filter(|(_, l)| *l % 2 != 0)
        .map(|(i, _)| i)
        .collect();
    if !ignored_indexes.is_empty() {
        notes.push(format!(
            "indexes with odd f_i(1) do not enter any condition: {:?}",
            ignored_indexes.iter().map(|i| i + 1).collect::<Vec<_>>()
        ));
    }
    let overall = entries.iter().all(|e| e.pass);
    Ok(ConditionReport {
        min_vt,
        s1,
        entries,
        overall,
        ignored_indexes,
        notes,
    })
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    fn rf(c: &[i64]) -> RatFunc {
        poly(c).to_ratfunc()
    }

    #[test]
    fn m_and_s1() {
        let c = [(von_staudt(), Valuation::Finite(1), vec![0]), (kummer(), Valuation::Finite(0), vec![4])];
        for (p, m, s1) in c {
            let (got_m, got_s1) = compute_m_s1(&p).unwrap();
            assert_eq!(got_m, m);
            assert_eq!(got_s1.into_iter().collect::<Vec<_>>(), s1);
        }
        let inv_t = RatFunc::from_i64(1).checked_div(&RatFunc::t()).unwrap();
        let p = CongruenceProblem::new(1, vec![poly(&[0, 1])], vec![inv_t], RatFunc::zero()).unwrap();
        assert_eq!(compute_m_s1(&p).unwrap().0, Valuation::Finite(-1));
    }

    #[test]
    fn c1_examples() {
        let cache = BernoulliCache::default();
        let e = check_c1(&von_staudt(), &cache).unwrap();
        assert_eq!((e.observed, e.pass), (Valuation::Finite(1), true));
        let e = check_c1(&kummer(), &cache).unwrap();
        assert_eq!((e.observed, e.pass), (Valuation::Infinite, true));
        let e = check_c1(&kummer().with_g0(RatFunc::from_i64(1)).unwrap(), &cache).unwrap();
        assert_eq!((e.observed, e.pass), (Valuation::Finite(0), false));
    }

    #[test]
    fn c2_to_c4_on_presets() {
        let vs = von_staudt();
        let c2 = check_c2(&vs, Valuation::Finite(1)).unwrap();
        assert_eq!(c2.len(), 1);
        assert_eq!((c2[0].l, c2[0].m, c2[0].observed, c2[0].pass), (Some(0), Some(0), Valuation::Finite(1), true));
        assert!(check_c3(&vs, Valuation::Finite(1)).unwrap().iter().all(|e| e.vacuous));
        assert!(check_c4(&vs).unwrap().iter().all(|e| e.vacuous));

        let k = kummer();
        let c3 = check_c3(&k, Valuation::Finite(0)).unwrap();
        let obs: Vec<_> = c3.iter().map(|e| (e.m, e.observed, e.required, e.pass)).collect();
        let f = Valuation::Finite;
        assert_eq!(obs, vec![(Some(1), f(1), Some(1), true), (Some(2), f(1), Some(0), true)]);
        let c4 = check_c4(&k).unwrap();
        assert_eq!((c4[0].observed, c4[0].pass), (Valuation::Infinite, true));
        assert!(check_c2(&k, Valuation::Finite(0)).unwrap().iter().all(|e| e.vacuous));
    }

    #[test]
    fn tightened_kummer_fails_at_c3() {
        let cache = BernoulliCache::default();
        let r = check_all(&kummer().with_exponent(3).unwrap(), &cache).unwrap();
        assert!(!r.overall);
        let e = r.first_failure().unwrap();
        assert_eq!((e.condition, e.l, e.m), (ConditionId::C3, Some(4), Some(1)));
        assert_eq!(e.observed, Valuation::Finite(1));
    }

    #[test]
    fn presets_pass_all_conditions() {
        let cache = BernoulliCache::default();
        assert!(check_all(&von_staudt(), &cache).unwrap().overall);
        assert!(check_all(&kummer(), &cache).unwrap().overall);
    }

    #[test]
    fn odd_classes_are_ignored_and_recorded() {
        let cache = BernoulliCache::default();
        // f_2(1) = 3 is odd
        let p = CongruenceProblem::new(
            1,
            vec![poly(&[-1, 1]), poly(&[2, 1])],
            vec![rf(&[0, -2, 2]), rf(&[5])],
            RatFunc::from_i64(1),
        )
        .unwrap();
        let r = check_all(&p, &cache).unwrap();
        assert_eq!(r.ignored_indexes, vec![1]);
        assert!(r.entries.iter().all(|e| e.l != Some(3)));
        assert!(r.overall);
    }

    #[test]
    fn negative_range_makes_c2_and_c3_vacuous() {
        let cache = BernoulliCache::default();
        // M = 3 > N = 1
        let p = CongruenceProblem::new(1, vec![poly(&[-1, 1]), poly(&[3, 1])], vec![rf(&[0, 0, 0, 1]), rf(&[0, 0, 0, 0, 1])], RatFunc::zero())
            .unwrap();
        let r = check_all(&p, &cache).unwrap();
        let c2: Vec<_> = r.entries.iter().filter(|e| e.condition == ConditionId::C2).collect();
        assert!(c2.iter().all(|e| e.vacuous && e.pass));
        assert!(!r.notes.is_empty());
    }

    #[test]
    fn report_is_sorted_and_deterministic() {
        let cache = BernoulliCache::default();
        let p = CongruenceProblem::new(
            2,
            vec![poly(&[3, 1]), poly(&[-1, 1]), poly(&[3, 0, 0, 1]), poly(&[1, 1])],
            vec![rf(&[1]), rf(&[0, 0, 2]), rf(&[-1]), rf(&[0, 1])],
            RatFunc::zero(),
        )
        .unwrap();
        let a = check_all(&p, &cache).unwrap();
        let b = check_all(&p, &cache).unwrap();
        assert_eq!(a, b);
        let keys: Vec<_> = a.entries.iter().map(|e| (e.condition, e.l, e.m)).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn constructor_rejects_bad_weights() {
        assert!(CongruenceProblem::new(1, vec![poly(&[5])], vec![rf(&[1])], RatFunc::zero()).is_err());
        assert!(CongruenceProblem::new(1, vec![poly(&[0, -1])], vec![rf(&[1])], RatFunc::zero()).is_err());
        assert!(CongruenceProblem::new(0, vec![poly(&[0, 1])], vec![rf(&[1])], RatFunc::zero()).is_err());
        assert!(CongruenceProblem::new(1, vec![poly(&[0, 1])], vec![], RatFunc::zero()).is_err());
    }

    #[test]
    fn von_staudt_recipe_passes_for_many_f() {
        // f(1) = 0, g_1 = 2t f(t), g_0 = 1, N = 1
        let cache = BernoulliCache::default();
        for c0 in -3i64..=3 {
            for c2 in 0i64..=2 {
                for c3 in 0i64..=1 {
                    let c1 = -(c0 + c2 + c3);
                    let coeffs = [c0, c1, c2, c3];
                    let f = poly(&coeffs);
                    if !f.leading().is_some_and(|x| x.is_positive()) || f.degree() == Some(0) {
                        continue;
                    }
                    let g1 = &RatFunc::t() * &(&RatFunc::from_i64(2) * &f.to_ratfunc());
                    let p = CongruenceProblem::new(1, vec![f], vec![g1], RatFunc::from_i64(1)).unwrap();
                    assert!(check_all(&p, &cache).unwrap().overall, "{coeffs:?}");
                }
            }
        }
    }

    #[test]
    fn kummer_recipe_passes_for_many_pairs() {
        // f(1) = g(1) != 0, N = v_t(f - g) + 1, g = (1, -1)
        let cache = BernoulliCache::default();
        let candidates: Vec<IntPoly> = [
            [3i64, 1, 0, 0], [1, 3, 0, 0], [3, 0, 0, 1], [1, 0, 2, 1], [2, 0, 1, 1], [0, 2, 1, 1], [2, 2, 0, 0], [4, 0, 0, 0],
        ]
        .iter()
        .map(|c| poly(c))
        .filter(|p| p.degree().is_some_and(|d| d >= 1))
        .collect();
        let mut tested = 0;
        for a in &candidates {
            for b in &candidates {
                if a == b || a.eval_i64(1) != b.eval_i64(1) {
                    continue;
                }
                let d = (&a.to_ratfunc() - &b.to_ratfunc()).vt().finite().unwrap();
                let p = CongruenceProblem::new(
                    d as u32 + 1,
                    vec![a.clone(), b.clone()],
                    vec![RatFunc::from_i64(1), RatFunc::from_i64(-1)],
                    RatFunc::zero(),
                )
                .unwrap();
                assert!(check_all(&p, &cache).unwrap().overall, "{a} vs {b}");
                tested += 1;
            }
        }
        assert!(tested >= 6);
    }
}

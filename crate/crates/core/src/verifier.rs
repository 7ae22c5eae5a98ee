//! Prime-by-prime evaluation of `Δ(p) = sum_i g_i(p) G_{f_i(p)} - g_0(p)`
//! coefficientwise, plus the preset problems.

use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::arith::{check_odd_prime, primes_in, vp_rat, Margin, PadicApprox, Rat, Valuation};
use crate::bernoulli::{a0_star, is_regular, sigma_pow_mod, A0Strategy, BernoulliCache, Regularity};
use crate::bound::{compute_p, BoundBreakdown};
use crate::conditions::CongruenceProblem;
use crate::eisenstein::{e_series, g_series, series_congruent, CongruenceReport, QSeries, SeriesRef};
use crate::polyfield::{IntPoly, RatFunc};
use crate::{Error, Result};

pub const DEFAULT_N_MAX: usize = 50;
pub const DEFAULT_GUARD: u32 = 2;

/// How the Eisenstein coefficients are obtained.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RoutePreference {
    /// Exact rationals when every weight is within the Bernoulli budget.
    #[default]
    Auto,
    /// Always go through `G*_k` modulo a power of `p`.
    Star,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    Exact,
    Star,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    pub n_max: usize,
    pub guard: u32,
    pub route: RoutePreference,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            n_max: DEFAULT_N_MAX,
            guard: DEFAULT_GUARD,
            route: RoutePreference::Auto,
        }
    }
}

/// How one index `i` contributed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TermStrategy {
    /// `g_i(p) = 0`.
    ZeroCoefficient,
    /// `f_i(p)` odd or at most 2, so `G_{f_i(p)} = 0`.
    Vanishes,
    Exact,
    /// `G*` modulo `p^prec` (relative precision for the constant term).
    Star { prec: u32, a0: A0Strategy },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermNote {
    /// Zero-based.
    pub index: usize,
    pub weight: BigInt,
    pub strategy: TermStrategy,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub p: u64,
    pub exponent: u32,
    pub n_max: usize,
    pub guard: u32,
    /// `v_p` of each coefficient of `Δ(p)`, truncated at `N + guard`.
    pub margins: Vec<Margin>,
    pub pass: bool,
    pub route: Route,
    pub terms: Vec<TermNote>,
    pub elapsed: Duration,
}

impl VerifyReport {
    pub fn first_failure(&self) -> Option<usize> {
        self.margins.iter().position(|m| !m.meets(self.exponent as i64))
    }
}

/// The constant-term and higher-term congruences for `G*`, separately.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarPartsReport {
    pub p: u64,
    pub exponent: u32,
    pub n_max: usize,
    /// `v_p(sum_i g_i(p) a_0(G*_{f_i(p)}) - g_0(p))`.
    pub constant: Margin,
    pub constant_pass: bool,
    /// `v_p(sum_i g_i(p) a_n(G*_{f_i(p)}))` for `n = 1..=n_max`.
    pub higher: Vec<Margin>,
    pub higher_pass: bool,
    pub terms: Vec<TermNote>,
    pub elapsed: Duration,
}

impl StarPartsReport {
    pub fn pass(&self) -> bool {
        self.constant_pass && self.higher_pass
    }
}

#[derive(Debug)]
pub struct PrimeOutcome {
    pub p: u64,
    pub result: Result<VerifyReport>,
}

fn has_series(k: &BigInt) -> bool {
    k.is_even() && *k > BigInt::from(2)
}

struct Evaluated {
    weights: Vec<BigInt>,
    coefficients: Vec<Rat>,
    g0: Rat,
}

fn evaluate(problem: &CongruenceProblem, p: u64) -> Result<Evaluated> {
    let x = BigInt::from(p);
    Ok(Evaluated {
        weights: problem.f().iter().map(|f| f.eval(&x)).collect(),
        coefficients: problem
            .g()
            .iter()
            .map(|g| g.eval_at(&x))
            .collect::<Result<_>>()?,
        g0: problem.g0().eval_at(&x)?,
    })
}

fn check_above_bound(p: u64, bound: &BoundBreakdown) -> Result<()> {
    if BigInt::from(p) <= bound.p {
        return Err(Error::BoundViolation { p, bound: bound.p.clone() });
    }
    check_odd_prime(p)
}

/// `a_0(G*_k)` at the highest relative precision `<= prec` the reduction
/// can certify.
fn a0_capped(k: &BigInt, p: u64, prec: u32, cache: &BernoulliCache) -> Result<(PadicApprox, u32, A0Strategy)> {
    let mut last = None;
    for w in (1..=prec).rev() {
        match a0_star(k, p, w, cache) {
            Ok(v) => return Ok((PadicApprox::from_scaled(&v.value), w, v.strategy)),
            Err(e @ Error::PrecisionUnattainable { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("prec >= 1"))
}

/// `a_0(G*_k)` known to absolute precision `target` when attainable.
fn a0_with_fallback(k: &BigInt, p: u64, target: i64, cache: &BernoulliCache) -> Result<(PadicApprox, u32, A0Strategy)> {
    let mut w = target.max(1) as u32;
    loop {
        let (a, used, strategy) = a0_capped(k, p, w, cache)?;
        if let Margin::Exact(v) = a.margin() {
            let want = target - v;
            if used == w && want > w as i64 {
                w = want as u32;
                continue;
            }
        }
        return Ok((a, used, strategy));
    }
}

/// Coefficients of `G*_k` (or of `G_k`, when `substitute`) as `p`-adic approximations.
fn star_series(
    k: &BigInt,
    p: u64,
    target: i64,
    n_max: usize,
    substitute: bool,
    cache: &BernoulliCache,
) -> Result<(Vec<PadicApprox>, TermStrategy)> {
    let (a0, w, strategy) = a0_with_fallback(k, p, target, cache)?;
    let prec = target.max(1) as u32;
    let e = BigUint::try_from(k - 1).expect("weight >= 4");
    // G_k - G*_k: the constant term differs by a factor 1 - p^(k-1),
    // the others by the divisors divisible by p
    let gap = (k - BigInt::from(1)).to_i64().unwrap_or(i64::MAX);
    let mut coeffs = Vec::with_capacity(n_max + 1);
    let a0 = match (substitute, a0.margin()) {
        (true, Margin::Exact(v)) => a0.cap(v.saturating_add(gap)),
        (true, _) => a0.cap(gap),
        (false, _) => a0,
    };
    coeffs.push(a0);
    for n in 1..=n_max as u64 {
        let a = PadicApprox::from_residue(&sigma_pow_mod(&e, n, p, prec, true));
        coeffs.push(if substitute { a.cap(gap) } else { a });
    }
    Ok((coeffs, TermStrategy::Star { prec: w, a0: strategy }))
}

fn exact_series(k: &BigInt, p: u64, n_max: usize, cache: &BernoulliCache) -> Result<Vec<PadicApprox>> {
    let k = k.to_i64().expect("within budget");
    Ok(g_series(k, n_max, cache)?
        .coeffs()
        .iter()
        .map(|c| PadicApprox::exact(c.clone(), p))
        .collect())
}

enum Mode {
    /// `Δ(p)` with `G`.
    Full(Route),
    /// The `G*` sums without substitution.
    StarParts,
}

/// `sum_i g_i(p) X_i - g_0(p) [n = 0]` where `X_i` is `G_{f_i(p)}` or `G*_{f_i(p)}`.
fn combine(
    problem: &CongruenceProblem,
    ev: &Evaluated,
    p: u64,
    n_max: usize,
    limit: i64,
    mode: Mode,
    cache: &BernoulliCache,
) -> Result<(Vec<PadicApprox>, Vec<TermNote>)> {
    let mut totals = vec![PadicApprox::exact(Rat::zero(), p); n_max + 1];
    let mut terms = Vec::with_capacity(problem.len());
    for (i, (k, c)) in ev.weights.iter().zip(&ev.coefficients).enumerate() {
        let note = |strategy| TermNote { index: i, weight: k.clone(), strategy };
        if c.is_zero() {
            terms.push(note(TermStrategy::ZeroCoefficient));
            continue;
        }
        if !has_series(k) {
            terms.push(note(TermStrategy::Vanishes));
            continue;
        }
        // absolute precision needed before scaling by g_i(p)
        let target = limit - vp_rat(c, p).finite().expect("nonzero");
        let (series, strategy) = match mode {
            Mode::Full(Route::Exact) => (exact_series(k, p, n_max, cache)?, TermStrategy::Exact),
            Mode::Full(Route::Star) => star_series(k, p, target, n_max, true, cache)?,
            Mode::StarParts => star_series(k, p, target, n_max, false, cache)?,
        };
        for (t, a) in totals.iter_mut().zip(&series) {
            *t = &*t + &a.scale(c);
        }
        terms.push(note(strategy));
    }
    totals[0] = &totals[0] - &PadicApprox::exact(ev.g0.clone(), p);
    Ok((totals, terms))
}

fn verify_with_bound(
    problem: &CongruenceProblem,
    p: u64,
    bound: &BoundBreakdown,
    opts: &VerifyOptions,
    cache: &BernoulliCache,
) -> Result<VerifyReport> {
    let start = Instant::now();
    check_above_bound(p, bound)?;
    let ev = evaluate(problem, p)?;
    let all_small = ev
        .weights
        .iter()
        .zip(&ev.coefficients)
        .all(|(k, c)| c.is_zero() || !has_series(k) || cache.within_budget(k));
    let route = match opts.route {
        RoutePreference::Auto if all_small => Route::Exact,
        _ => Route::Star,
    };
    let n = problem.exponent();
    let limit = (n + opts.guard) as i64;
    let (totals, terms) = combine(problem, &ev, p, opts.n_max, limit, Mode::Full(route), cache)?;
    let margins: Vec<Margin> = totals.iter().map(|t| t.margin().cap(limit)).collect();
    let pass = margins.iter().all(|m| m.meets(n as i64));
    Ok(VerifyReport {
        p,
        exponent: n,
        n_max: opts.n_max,
        guard: opts.guard,
        margins,
        pass,
        route,
        terms,
        elapsed: start.elapsed(),
    })
}

pub fn verify_at_prime(
    problem: &CongruenceProblem,
    p: u64,
    opts: &VerifyOptions,
    cache: &BernoulliCache,
) -> Result<VerifyReport> {
    let bound = compute_p(problem, cache)?;
    verify_with_bound(problem, p, &bound, opts, cache)
}

/// Every prime in `(P, p_max]`, in increasing order; failures stay per prime.
pub fn verify_range(
    problem: &CongruenceProblem,
    p_max: u64,
    opts: &VerifyOptions,
    cache: &BernoulliCache,
) -> Result<Vec<PrimeOutcome>> {
    let bound = compute_p(problem, cache)?;
    let Some(lo) = bound.threshold() else {
        return Ok(Vec::new());
    };
    Ok(primes_in(lo, p_max)
        .into_par_iter()
        .map(|p| PrimeOutcome {
            p,
            result: verify_with_bound(problem, p, &bound, opts, cache),
        })
        .collect())
}

pub fn verify_star_parts(
    problem: &CongruenceProblem,
    p: u64,
    opts: &VerifyOptions,
    cache: &BernoulliCache,
) -> Result<StarPartsReport> {
    let start = Instant::now();
    let bound = compute_p(problem, cache)?;
    check_above_bound(p, &bound)?;
    let ev = evaluate(problem, p)?;
    let n = problem.exponent();
    let limit = (n + opts.guard) as i64;
    let (totals, terms) = combine(problem, &ev, p, opts.n_max, limit, Mode::StarParts, cache)?;
    let mut margins = totals.iter().map(|t| t.margin().cap(limit));
    let constant = margins.next().expect("constant term");
    let higher: Vec<Margin> = margins.collect();
    Ok(StarPartsReport {
        p,
        exponent: n,
        n_max: opts.n_max,
        constant,
        constant_pass: constant.meets(n as i64),
        higher_pass: higher.iter().all(|m| m.meets(n as i64)),
        higher,
        terms,
        elapsed: start.elapsed(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PresetSpec {
    VonStaudt { f: IntPoly },
    Kummer { f: IntPoly, g: IntPoly },
    /// `E_k ≡ 1 mod p^r`.
    EUnit { k: i64, p: u64, r: u32 },
    /// `E_k ≡ E_l mod p^r`.
    EPair { k: i64, l: i64, p: u64, r: u32 },
}

/// A direct check of one of the `E_k` congruences.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ESeriesPlan {
    pub p: u64,
    pub r: u32,
    pub k: i64,
    /// `None` compares against the constant series 1.
    pub l: Option<i64>,
}

impl ESeriesPlan {
    pub fn run(&self, n_max: usize, cache: &BernoulliCache) -> Result<CongruenceReport> {
        let a = e_series(self.k, n_max, cache)?;
        let b = match self.l {
            Some(l) => e_series(l, n_max, cache)?,
            None => QSeries::constant(Rat::from_integer(1.into()), n_max),
        };
        series_congruent(SeriesRef::Exact(&a), SeriesRef::Exact(&b), self.p, self.r)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Preset {
    Problem(CongruenceProblem),
    ESeries(ESeriesPlan),
}

fn preset_err(msg: String) -> Error {
    Error::Preset(msg)
}

fn check_e_weight(k: i64, r: u32) -> Result<()> {
    if k < 4 || k % 2 != 0 {
        return Err(preset_err(format!("weight {k} must be even and at least 4")));
    }
    if k < r as i64 + 1 {
        return Err(preset_err(format!("weight {k} must be at least r + 1 = {}", r + 1)));
    }
    Ok(())
}

fn e_modulus(p: u64, r: u32) -> Result<i64> {
    if r == 0 {
        return Err(preset_err("r must be at least 1".into()));
    }
    (p as i64 - 1)
        .checked_mul((p as i64).checked_pow(r - 1).ok_or_else(|| preset_err("p^(r-1) overflows".into()))?)
        .ok_or_else(|| preset_err("(p-1) p^(r-1) overflows".into()))
}

pub fn build_preset(spec: &PresetSpec, cache: &BernoulliCache) -> Result<Preset> {
    match spec {
        PresetSpec::VonStaudt { f } => {
            let at_one = f.eval_i64(1);
            if !at_one.is_zero() {
                return Err(preset_err(format!("von Staudt preset needs f(1) = 0, got f(1) = {at_one}")));
            }
            let fr = f.to_ratfunc();
            let g1 = &(&RatFunc::from_i64(2) * &RatFunc::t()) * &fr;
            let problem = CongruenceProblem::new(1, vec![f.clone()], vec![g1], RatFunc::from_i64(1))
                .map_err(|e| preset_err(e.to_string()))?;
            Ok(Preset::Problem(problem))
        }
        PresetSpec::Kummer { f, g } => {
            if f == g {
                return Err(preset_err("Kummer preset needs f != g".into()));
            }
            let (a, b) = (f.eval_i64(1), g.eval_i64(1));
            if a != b {
                return Err(preset_err(format!("Kummer preset needs f(1) = g(1), got {a} and {b}")));
            }
            if a.is_zero() {
                return Err(preset_err("Kummer preset needs f(1) = g(1) != 0".into()));
            }
            let d = (&f.to_ratfunc() - &g.to_ratfunc()).vt();
            let Valuation::Finite(d) = d else { unreachable!("f != g") };
            let n = u32::try_from(d + 1).map_err(|_| preset_err("v_t(f - g) out of range".into()))?;
            let problem = CongruenceProblem::new(
                n,
                vec![f.clone(), g.clone()],
                vec![RatFunc::from_i64(1), RatFunc::from_i64(-1)],
                RatFunc::zero(),
            )
            .map_err(|e| preset_err(e.to_string()))?;
            Ok(Preset::Problem(problem))
        }
        PresetSpec::EUnit { k, p, r } => {
            check_odd_prime(*p).map_err(|e| preset_err(e.to_string()))?;
            check_e_weight(*k, *r)?;
            let m = e_modulus(*p, *r)?;
            if k % m != 0 {
                return Err(preset_err(format!("E_k ≡ 1 needs k ≡ 0 mod (p-1) p^(r-1) = {m}, got k = {k}")));
            }
            Ok(Preset::ESeries(ESeriesPlan { p: *p, r: *r, k: *k, l: None }))
        }
        PresetSpec::EPair { k, l, p, r } => {
            check_odd_prime(*p).map_err(|e| preset_err(e.to_string()))?;
            check_e_weight(*k, *r)?;
            check_e_weight(*l, *r)?;
            let m = e_modulus(*p, *r)?;
            if (k - l) % m != 0 {
                return Err(preset_err(format!("E_k ≡ E_l needs k ≡ l mod (p-1) p^(r-1) = {m}")));
            }
            for w in [k, l] {
                if is_regular(&BigInt::from(*w), *p, cache)? == Regularity::Irregular {
                    return Err(preset_err(format!("p = {p} divides the numerator of B_{w}")));
                }
            }
            Ok(Preset::ESeries(ESeriesPlan { p: *p, r: *r, k: *k, l: Some(*l) }))
        }
    }
}

use num_bigint::BigInt;

use polycong::arith::{Margin, Rat};
use polycong::bernoulli::A0Strategy;
use polycong::bernoulli::BernoulliCache;
use polycong::bound::compute_p;
use polycong::conditions::{check_all, CongruenceProblem};
use polycong::polyfield::{IntPoly, RatFunc};
use polycong::verifier::{
    build_preset, verify_at_prime, verify_range, Preset, PresetSpec, Route, RoutePreference, TermStrategy, VerifyOptions,
};
use polycong::Error;

fn poly(c: &[i64]) -> IntPoly {
    IntPoly::from_i64s(c)
}

fn hand_von_staudt() -> CongruenceProblem {
    CongruenceProblem::new(1, vec![poly(&[-1, 1])], vec![poly(&[0, -2, 2]).to_ratfunc()], RatFunc::from_i64(1)).unwrap()
}

fn kummer(cache: &BernoulliCache) -> CongruenceProblem {
    match build_preset(&PresetSpec::Kummer { f: poly(&[3, 1]), g: poly(&[3, 0, 0, 1]) }, cache).unwrap() {
        Preset::Problem(p) => p,
        Preset::ESeries(_) => unreachable!(),
    }
}

#[test]
fn hand_built_problem_matches_preset() {
    let cache = BernoulliCache::default();
    let Preset::Problem(vs) = build_preset(&PresetSpec::VonStaudt { f: poly(&[-1, 1]) }, &cache).unwrap() else {
        panic!("expected a problem")
    };
    assert_eq!(vs, hand_von_staudt());
    assert!(check_all(&vs, &cache).unwrap().overall);
}

#[test]
fn small_budget_forces_reduction_and_still_passes() {
    let cache = BernoulliCache::new(300);
    let problem = kummer(&cache);
    let opts = VerifyOptions { n_max: 20, ..VerifyOptions::default() };
    let r = verify_at_prime(&problem, 17, &opts, &cache).unwrap();
    assert!(r.pass, "{:?}", r.first_failure());
    assert_eq!(r.route, Route::Star);
    assert!(r.terms.iter().any(|t| matches!(
        t.strategy,
        TermStrategy::Star { a0: A0Strategy::Reduced { k0: 292, .. }, .. }
    )));
}

#[test]
fn weight_p_minus_one_over_budget_is_a_precision_error() {
    let cache = BernoulliCache::new(60);
    let err = verify_at_prime(&hand_von_staudt(), 101, &VerifyOptions::default(), &cache).unwrap_err();
    assert!(matches!(err, Error::PrecisionUnattainable { p: 101, .. }), "{err}");
    assert!(err.is_precision());
}

fn clamp(m: Margin, cut: i64) -> i64 {
    match m {
        Margin::Exact(v) | Margin::AtLeast(v) => v.min(cut),
        Margin::Infinite => cut,
    }
}

#[test]
fn routes_agree_below_the_target() {
    let cache = BernoulliCache::default();
    let problem = kummer(&cache);
    let cut = (problem.exponent() + 2) as i64;
    for p in [7, 11, 13] {
        let auto = VerifyOptions { n_max: 15, ..VerifyOptions::default() };
        let star = VerifyOptions { route: RoutePreference::Star, ..auto };
        let a = verify_at_prime(&problem, p, &auto, &cache).unwrap();
        let s = verify_at_prime(&problem, p, &star, &cache).unwrap();
        assert_eq!(a.route, Route::Exact);
        assert_eq!(s.route, Route::Star);
        assert_eq!(a.pass, s.pass);
        for (x, y) in a.margins.iter().zip(&s.margins) {
            assert_eq!(clamp(*x, cut), clamp(*y, cut), "p = {p}");
        }
    }
}

#[test]
fn primes_at_or_below_the_bound_are_refused() {
    let cache = BernoulliCache::default();
    let problem = kummer(&cache);
    assert_eq!(compute_p(&problem, &cache).unwrap().p, BigInt::from(6));
    let err = verify_at_prime(&problem, 5, &VerifyOptions::default(), &cache).unwrap_err();
    assert!(matches!(err, Error::BoundViolation { p: 5, .. }));
    assert!(!err.is_precision());
}

#[test]
fn range_is_ordered_and_complete() {
    let cache = BernoulliCache::default();
    let problem = kummer(&cache);
    let opts = VerifyOptions { n_max: 8, ..VerifyOptions::default() };
    let out = verify_range(&problem, 60, &opts, &cache).unwrap();
    let primes: Vec<u64> = out.iter().map(|o| o.p).collect();
    assert_eq!(primes, vec![7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]);
    assert!(out.iter().all(|o| o.result.as_ref().is_ok_and(|r| r.pass)));
}

#[test]
fn broken_constant_is_caught() {
    let cache = BernoulliCache::default();
    let problem = hand_von_staudt().with_g0(RatFunc::constant(Rat::from_integer(BigInt::from(2)))).unwrap();
    let r = verify_at_prime(&problem, 7, &VerifyOptions::default(), &cache).unwrap();
    assert!(!r.pass);
    assert_eq!(r.first_failure(), Some(0));
    assert_eq!(r.margins[0], Margin::Exact(0));
}

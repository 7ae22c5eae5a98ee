//! Truncated q-expansions of `G_k`, `E_k` and the p-adic `G*_k`, and
//! coefficientwise congruence testing.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::arith::{check_odd_prime, Margin, PadicApprox, Rat, ScaledResidue};
use crate::bernoulli::{a0_star, sigma_pow, sigma_pow_mod, A0Strategy, BernoulliCache};
use crate::{Error, Result};

/// `sum_{n <= n_max} a_n q^n` with exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSeries {
    coeffs: Vec<Rat>,
}

impl QSeries {
    pub fn new(coeffs: Vec<Rat>) -> QSeries {
        assert!(!coeffs.is_empty(), "a truncated series has at least a constant term");
        QSeries { coeffs }
    }

    pub fn zero(n_max: usize) -> QSeries {
        QSeries::new(vec![Rat::zero(); n_max + 1])
    }

    /// The constant series `c`.
    pub fn constant(c: Rat, n_max: usize) -> QSeries {
        let mut s = QSeries::zero(n_max);
        s.coeffs[0] = c;
        s
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn n_max(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }
}

/// A truncated series whose coefficients are p-adic approximations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModSeries {
    p: u64,
    prec: u32,
    coeffs: Vec<PadicApprox>,
    a0_strategy: A0Strategy,
}

impl ModSeries {
    pub fn p(&self) -> u64 {
        self.p
    }

    /// The working precision `W` the series was requested at.
    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn coeffs(&self) -> &[PadicApprox] {
        &self.coeffs
    }

    pub fn n_max(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn a0_strategy(&self) -> &A0Strategy {
        &self.a0_strategy
    }

    /// Coefficient `n` in `(val, unit mod p^W)` form.
    pub fn scaled(&self, n: usize) -> Option<ScaledResidue> {
        self.coeffs[n].to_scaled(self.prec)
    }
}

fn is_weight_with_series(k: i64) -> bool {
    k > 2 && k % 2 == 0
}

/// `G_k = -B_k/(2k) + sum sigma_{k-1}(n) q^n`; the zero series unless `k` is even and `> 2`.
pub fn g_series(k: i64, n_max: usize, cache: &BernoulliCache) -> Result<QSeries> {
    if !is_weight_with_series(k) {
        return Ok(QSeries::zero(n_max));
    }
    let b = cache.bernoulli_exact(k as usize)?;
    let mut coeffs = Vec::with_capacity(n_max + 1);
    coeffs.push(-b / Rat::from_integer(BigInt::from(2 * k)));
    for n in 1..=n_max as u64 {
        coeffs.push(Rat::from_integer(BigInt::from(sigma_pow((k - 1) as u32, n, None))));
    }
    Ok(QSeries::new(coeffs))
}

/// `E_k = 1 - (2k/B_k) sum sigma_{k-1}(n) q^n` for even `k >= 4`.
pub fn e_series(k: i64, n_max: usize, cache: &BernoulliCache) -> Result<QSeries> {
    if k < 4 || k % 2 != 0 {
        return Err(Error::InvalidArgument(format!("E_{k} needs an even weight >= 4")));
    }
    let b = cache.bernoulli_exact(k as usize)?;
    let scale = -Rat::from_integer(BigInt::from(2 * k)) / b;
    let mut coeffs = Vec::with_capacity(n_max + 1);
    coeffs.push(Rat::one());
    for n in 1..=n_max as u64 {
        coeffs.push(&scale * Rat::from_integer(BigInt::from(sigma_pow((k - 1) as u32, n, None))));
    }
    Ok(QSeries::new(coeffs))
}

/// `G*_k` modulo `p^prec`: constant term from [`a0_star`], higher terms
/// `sigma*_{k-1}(n)` with the multiples of `p` removed.
pub fn g_star_series_mod(
    k: &BigInt,
    p: u64,
    prec: u32,
    n_max: usize,
    cache: &BernoulliCache,
) -> Result<ModSeries> {
    let a0 = a0_star(k, p, prec, cache)?;
    let e = BigUint::try_from(k - 1).expect("weight >= 4");
    let mut coeffs = Vec::with_capacity(n_max + 1);
    coeffs.push(PadicApprox::from_scaled(&a0.value));
    for n in 1..=n_max as u64 {
        coeffs.push(PadicApprox::from_residue(&sigma_pow_mod(&e, n, p, prec, true)));
    }
    Ok(ModSeries {
        p,
        prec,
        coeffs,
        a0_strategy: a0.strategy,
    })
}

#[derive(Clone, Copy, Debug)]
pub enum SeriesRef<'a> {
    Exact(&'a QSeries),
    Modular(&'a ModSeries),
}

impl<'a> From<&'a QSeries> for SeriesRef<'a> {
    fn from(s: &'a QSeries) -> Self {
        SeriesRef::Exact(s)
    }
}

impl<'a> From<&'a ModSeries> for SeriesRef<'a> {
    fn from(s: &'a ModSeries) -> Self {
        SeriesRef::Modular(s)
    }
}

impl SeriesRef<'_> {
    fn n_max(&self) -> usize {
        match self {
            SeriesRef::Exact(s) => s.n_max(),
            SeriesRef::Modular(s) => s.n_max(),
        }
    }

    fn coeff(&self, n: usize, p: u64) -> PadicApprox {
        match self {
            SeriesRef::Exact(s) => PadicApprox::exact(s.coeffs[n].clone(), p),
            SeriesRef::Modular(s) => s.coeffs[n].clone(),
        }
    }
}

/// Per-coefficient `v_p(A_n - B_n)` against a target exponent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CongruenceReport {
    pub p: u64,
    pub target: u32,
    pub margins: Vec<Margin>,
    pub pass: bool,
}

impl CongruenceReport {
    pub fn first_failure(&self) -> Option<usize> {
        self.margins
            .iter()
            .position(|m| !m.meets(self.target as i64))
    }
}

/// Checks `A ≡ B mod p^target` coefficientwise.
pub fn series_congruent(
    a: SeriesRef<'_>,
    b: SeriesRef<'_>,
    p: u64,
    target: u32,
) -> Result<CongruenceReport> {
    check_odd_prime(p)?;
    if a.n_max() != b.n_max() {
        return Err(Error::InvalidArgument(format!(
            "series truncated at different orders ({} and {})",
            a.n_max(),
            b.n_max()
        )));
    }
    for s in [a, b] {
        if let SeriesRef::Modular(m) = s {
            if m.p != p {
                return Err(Error::InvalidArgument(format!(
                    "series computed for p = {}, compared at p = {p}",
                    m.p
                )));
            }
            if m.prec < target {
                return Err(Error::Precision {
                    needed: target as i64,
                    available: m.prec as i64,
                });
            }
        }
    }
    let margins: Vec<Margin> = (0..=a.n_max())
        .map(|n| (&a.coeff(n, p) - &b.coeff(n, p)).margin())
        .collect();
    let pass = margins.iter().all(|m| m.meets(target as i64));
    Ok(CongruenceReport {
        p,
        target,
        margins,
        pass,
    })
}

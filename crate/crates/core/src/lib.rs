//! Exact-arithmetic engine for congruences of Eisenstein series whose weights
//! are polynomials in a prime.
//!
//! Given integer polynomials `f_1..f_n`, rational functions `g_0..g_n` and an
//! exponent `N`, the crate decides the symbolic sufficient conditions C1–C4,
//! derives an explicit prime threshold `P`, and checks
//!
//! ```text
//!     sum_i g_i(p) * G_{f_i(p)}  ==  g_0(p)   (mod p^N, coefficientwise in q)
//! ```
//!
//! numerically for primes `p > P`.
//!
//! Module map:
//! - [`arith`]: rationals, p-adic valuations, residues mod `p^W`, Teichmüller lifts.
//! - [`polyfield`]: `Z[t]` and `Q(t)` with the t-adic valuation.
//! - [`bernoulli`]: Bernoulli numbers, divisor power sums, constant terms of `G*_k`.
//! - [`eisenstein`]: truncated q-expansions of `G_k`, `E_k`, `G*_k`.
//! - [`conditions`]: the conditions C1–C4, `M` and `S_1`.
//! - [`bound`]: the prime threshold `P`.
//! - [`padic_family`]: Taylor expansion of `a_n(G*_k)` in the weight.
//! - [`verifier`]: per-prime verification and presets.

pub mod arith;
pub mod bernoulli;
pub mod bound;
pub mod conditions;
pub mod eisenstein;
mod error;
pub mod padic_family;
pub mod polyfield;
pub mod verifier;

pub use error::{Error, Result};

//! Cohomology of finitely graded Lie superalgebras with trivial coefficients.
//!
//! The pipeline implemented here computes `H^k_g = Ker d^k / Im d^{k-1}` of the
//! Chevalley–Eilenberg complex of a graded Lie superalgebra, one grade at a
//! time, in three stages:
//!
//! 1. **Splitting** — the `(k-1, k, k+1)` slice of the complex in grade `g`
//!    decomposes into a direct sum of *minimal subcomplexes*, obtained by
//!    closing a starting monomial under the image/inverse-image maps of the
//!    differential ([`subcomplex`]).
//! 2. **Modular prefilter** — each subcomplex is first processed over a small
//!    prime field `F_p`. Since `dim H(F_p) >= dim H(Q)`, a zero modular
//!    dimension certifies that the subcomplex carries no rational cohomology
//!    and all expensive exact work can be skipped ([`engine`]).
//! 3. **Exact lift** — subcomplexes that survive the prefilter are handed to
//!    exact linear algebra over `Q` or `Z`: rational elimination, or a
//!    two-stage integer Smith normal form that also yields torsion
//!    coefficients and integral representatives, or a CRT/rational
//!    reconstruction bridge over several primes ([`linalg`]).
//!
//! Built-in algebra families are generated from polynomial models: `H(n)`
//! (polynomial hamiltonians under the Poisson bracket) and `B(n)`, `Le(n)`,
//! `SLe(n)` (functions of `n` even and `n` odd variables under the Buttin
//! antibracket, with constants and/or the divergence condition ∆f = 0 imposed)
//! ([`poly`], [`algebra`]).
//!
//! The crate is `no_std` (with `alloc`); everything IO-flavored lives in the
//! companion CLI crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod algebra;
pub mod cochain;
pub mod engine;
pub mod error;
pub mod linalg;
pub mod poly;
pub mod rng;
pub mod subcomplex;

pub use error::Error;

/// Arbitrary-precision integers used for Smith normal form work.
pub type Int = num_bigint::BigInt;
/// Arbitrary-precision rationals; every stored value is canonical (lowest
/// terms, positive denominator) — `num_rational` maintains that on its own.
pub type Rat = num_rational::BigRational;

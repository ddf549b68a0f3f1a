//! Error type shared by all core modules.

use alloc::string::String;
use core::fmt;

/// Errors surfaced by the core pipeline.
///
/// Everything here is a *caller* error or an explicit signal; internal
/// invariant violations (`Complex`) indicate a bug and are treated as fatal by
/// the CLI (exit code 3).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// Bracket operation applied to a polynomial outside the family's model
    /// (e.g. Poisson bracket on a polynomial with odd variables).
    InvalidFamily(String),
    /// Mixed-parity polynomial passed to a parity-homogeneous operation.
    Parity(String),
    /// Requested generation size exceeds a hard resource bound.
    Capacity(String),
    /// Element index outside the generated range.
    Range(String),
    /// The generated grade window is too small for the requested enumeration.
    /// Carries the required window so callers can regenerate.
    Window {
        required_lo: i64,
        required_hi: i64,
        available_lo: i64,
        available_hi: i64,
    },
    /// A starting monomial was requested from an empty set.
    Empty,
    /// Monomial violates the admissibility rules (non-decreasing indices,
    /// repeats only at odd elements).
    Admissibility(String),
    /// Operation is defined only over a field ring.
    UnsupportedRing(String),
    /// CRT moduli are not pairwise coprime.
    Moduli(String),
    /// d∘d ≠ 0 or D·D′ ≠ 0 — an internal invariant failure.
    Complex(String),
    /// `is_coboundary` called on a cochain that is not a cocycle.
    NotCocycle(String),
    /// A denominator of a structure constant vanishes modulo the chosen
    /// prime; the caller should retry with a different prime.
    PrimeSkip { prime: i64 },
    /// Invalid engine or run configuration (bad prime, empty prime list,
    /// malformed ranges). The CLI reports these with exit code 2.
    Config(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidFamily(m) => write!(f, "invalid family: {m}"),
            Error::Parity(m) => write!(f, "parity error: {m}"),
            Error::Capacity(m) => write!(f, "capacity exceeded: {m}"),
            Error::Range(m) => write!(f, "index out of range: {m}"),
            Error::Window {
                required_lo,
                required_hi,
                available_lo,
                available_hi,
            } => write!(
                f,
                "grade window too small: need [{required_lo}, {required_hi}], \
                 algebra generated over [{available_lo}, {available_hi}]"
            ),
            Error::Empty => write!(f, "empty monomial set"),
            Error::Admissibility(m) => write!(f, "inadmissible monomial: {m}"),
            Error::UnsupportedRing(m) => write!(f, "unsupported ring: {m}"),
            Error::Moduli(m) => write!(f, "moduli not coprime: {m}"),
            Error::Complex(m) => write!(f, "complex invariant violated: {m}"),
            Error::NotCocycle(m) => write!(f, "not a cocycle: {m}"),
            Error::PrimeSkip { prime } => {
                write!(f, "denominator vanishes modulo {prime}; skip this prime")
            }
            Error::Config(m) => write!(f, "configuration error: {m}"),
        }
    }
}

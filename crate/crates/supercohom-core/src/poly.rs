//! Polynomials in `n` even variables `x^1..x^n` and `n` odd (Grassmann)
//! variables `θ_1..θ_n`, with the operations the built-in algebra families
//! are generated from: the classical Poisson bracket, the Buttin antibracket
//! and the odd Laplacian.
//!
//! Odd variables square to zero and anticommute; a monomial stores them as a
//! bitmask read in ascending index order. All odd derivatives are *left*
//! derivatives: `∂/∂θ_i` first anticommutes `θ_i` to the front (collecting a
//! sign) and then removes it. The grading used throughout is
//! `gr(x^i) = 1`, `gr(θ_i) = −1`.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::Rat;

/// Parity (Z/2 grading) of polynomials and of superalgebra elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    /// 0 for even, 1 for odd.
    pub fn bit(self) -> u8 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }

    pub fn from_bit(b: u8) -> Parity {
        if b % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Exponent data of a single monomial `x^a · θ^S`: even exponents `a` and the
/// set `S` of odd variables as a bitmask (bit `i` ⇔ `θ_{i+1}` present).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub even: Vec<u16>,
    pub odd: u32,
}

impl Monomial {
    pub fn constant(n: usize) -> Monomial {
        Monomial {
            even: alloc::vec![0; n],
            odd: 0,
        }
    }

    /// Number of odd variables present.
    pub fn odd_count(&self) -> u32 {
        self.odd.count_ones()
    }

    /// Total even degree.
    pub fn even_degree(&self) -> i64 {
        self.even.iter().map(|&e| e as i64).sum()
    }

    /// Grade with `gr(x^i) = 1`, `gr(θ_i) = −1`.
    pub fn grade(&self) -> i64 {
        self.even_degree() - self.odd_count() as i64
    }

    /// Parity of the monomial = number of odd variables mod 2.
    pub fn parity(&self) -> Parity {
        Parity::from_bit((self.odd_count() % 2) as u8)
    }

    fn is_constant(&self) -> bool {
        self.odd == 0 && self.even.iter().all(|&e| e == 0)
    }
}

/// Sparse polynomial: nonzero rational coefficients indexed by monomials.
///
/// Invariants: no stored zero coefficients; every monomial has `even.len() ==
/// n`; odd exponents are implicitly 0/1 via the bitmask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuperPolynomial {
    n: usize,
    terms: BTreeMap<Monomial, Rat>,
}

impl SuperPolynomial {
    pub fn zero(n: usize) -> SuperPolynomial {
        SuperPolynomial {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: Rat) -> SuperPolynomial {
        let mut p = SuperPolynomial::zero(n);
        p.add_term(Monomial::constant(n), c);
        p
    }

    /// Single monomial with coefficient `c`.
    pub fn term(n: usize, even: Vec<u16>, odd: u32, c: Rat) -> SuperPolynomial {
        assert_eq!(even.len(), n, "even exponent vector must have length n");
        assert!(odd < (1u32 << n), "odd mask out of range");
        let mut p = SuperPolynomial::zero(n);
        p.add_term(Monomial { even, odd }, c);
        p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Coefficient of a monomial (zero if absent).
    pub fn coeff(&self, m: &Monomial) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        use alloc::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get().clone() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add_assign_scaled(&mut self, other: &SuperPolynomial, s: &Rat) {
        assert_eq!(self.n, other.n);
        if s.is_zero() {
            return;
        }
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone() * s.clone());
        }
    }

    pub fn add(&self, other: &SuperPolynomial) -> SuperPolynomial {
        let mut out = self.clone();
        out.add_assign_scaled(other, &Rat::one());
        out
    }

    pub fn scaled(&self, s: &Rat) -> SuperPolynomial {
        let mut out = SuperPolynomial::zero(self.n);
        out.add_assign_scaled(self, s);
        out
    }

    pub fn neg(&self) -> SuperPolynomial {
        self.scaled(&-Rat::one())
    }

    /// Product with Koszul signs: odd variables anticommute, so merging odd
    /// masks `S`, `T` costs `(−1)^{#{(i,j) ∈ S×T : i > j}}` and vanishes when
    /// the masks intersect.
    pub fn mul(&self, other: &SuperPolynomial) -> SuperPolynomial {
        assert_eq!(self.n, other.n);
        let mut out = SuperPolynomial::zero(self.n);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if ma.odd & mb.odd != 0 {
                    continue;
                }
                let mut inversions = 0u32;
                for j in 0..self.n as u32 {
                    if mb.odd & (1 << j) != 0 {
                        // bits of `ma.odd` strictly above j must hop over θ_j
                        inversions += (ma.odd >> (j + 1)).count_ones();
                    }
                }
                let mut c = ca.clone() * cb.clone();
                if inversions % 2 == 1 {
                    c = -c;
                }
                let even = ma
                    .even
                    .iter()
                    .zip(&mb.even)
                    .map(|(&a, &b)| a + b)
                    .collect();
                out.add_term(
                    Monomial {
                        even,
                        odd: ma.odd | mb.odd,
                    },
                    c,
                );
            }
        }
        out
    }

    /// Partial derivative with respect to the even variable `x^{i+1}`.
    pub fn deriv_even(&self, i: usize) -> SuperPolynomial {
        assert!(i < self.n);
        let mut out = SuperPolynomial::zero(self.n);
        for (m, c) in &self.terms {
            let e = m.even[i];
            if e == 0 {
                continue;
            }
            let mut even = m.even.clone();
            even[i] = e - 1;
            out.add_term(
                Monomial { even, odd: m.odd },
                c.clone() * Rat::from_integer(crate::Int::from(e)),
            );
        }
        out
    }

    /// Left partial derivative with respect to the odd variable `θ_{i+1}`:
    /// the sign is the parity of the number of odd variables with smaller
    /// index present in the monomial.
    pub fn deriv_odd(&self, i: usize) -> SuperPolynomial {
        assert!(i < self.n);
        let bit = 1u32 << i;
        let mut out = SuperPolynomial::zero(self.n);
        for (m, c) in &self.terms {
            if m.odd & bit == 0 {
                continue;
            }
            let below = (m.odd & (bit - 1)).count_ones();
            let mut c = c.clone();
            if below % 2 == 1 {
                c = -c;
            }
            out.add_term(
                Monomial {
                    even: m.even.clone(),
                    odd: m.odd & !bit,
                },
                c,
            );
        }
        out
    }

    /// Parity of a parity-homogeneous polynomial; `None` when parities mix.
    /// The zero polynomial counts as even.
    pub fn parity(&self) -> Option<Parity> {
        let mut it = self.terms.keys();
        let first = match it.next() {
            None => return Some(Parity::Even),
            Some(m) => m.parity(),
        };
        if it.all(|m| m.parity() == first) {
            Some(first)
        } else {
            None
        }
    }

    /// Grade of a grade-homogeneous polynomial; `None` for the zero
    /// polynomial or when grades mix.
    pub fn grade(&self) -> Option<i64> {
        let mut it = self.terms.keys();
        let first = it.next()?.grade();
        if it.all(|m| m.grade() == first) {
            Some(first)
        } else {
            None
        }
    }

    /// Remove the constant term (quotient by constants in `Le`, `SLe`, `H`).
    pub fn drop_constant(&mut self) {
        self.terms.retain(|m, _| !m.is_constant());
    }

    /// Classical Poisson bracket on polynomials without odd variables, taken
    /// over consecutive pairs `(x^{2m+1}, x^{2m+2})` playing `(q, p)`:
    /// `{f,g} = Σ_m ∂f/∂q_m ∂g/∂p_m − ∂f/∂p_m ∂g/∂q_m`.
    pub fn poisson_bracket(
        f: &SuperPolynomial,
        g: &SuperPolynomial,
    ) -> Result<SuperPolynomial, Error> {
        if f.n != g.n {
            return Err(Error::InvalidFamily(String::from(
                "operands disagree on the number of variables",
            )));
        }
        if f.n % 2 != 0 {
            return Err(Error::InvalidFamily(String::from(
                "Poisson bracket needs an even number of variables",
            )));
        }
        let has_odd =
            f.terms.keys().any(|m| m.odd != 0) || g.terms.keys().any(|m| m.odd != 0);
        if has_odd {
            return Err(Error::InvalidFamily(String::from(
                "Poisson bracket is defined on purely even polynomials",
            )));
        }
        let mut out = SuperPolynomial::zero(f.n);
        for m in 0..f.n / 2 {
            let (q, p) = (2 * m, 2 * m + 1);
            out.add_assign_scaled(&f.deriv_even(q).mul(&g.deriv_even(p)), &Rat::one());
            out.add_assign_scaled(&f.deriv_even(p).mul(&g.deriv_even(q)), &-Rat::one());
        }
        Ok(out)
    }

    /// Buttin bracket (antibracket): for parity-homogeneous `f`, `g`,
    /// `{f,g} = Σ_i ( ∂f/∂x^i · ∂g/∂θ_i + (−1)^{p(f)} ∂f/∂θ_i · ∂g/∂x^i )`
    /// with left odd derivatives and the pairing `θ_i ↔ x^i`.
    pub fn buttin_bracket(
        f: &SuperPolynomial,
        g: &SuperPolynomial,
    ) -> Result<SuperPolynomial, Error> {
        if f.n != g.n {
            return Err(Error::Parity(String::from(
                "operands disagree on the number of variables",
            )));
        }
        let pf = f
            .parity()
            .ok_or_else(|| Error::Parity(String::from("left operand has mixed parity")))?;
        g.parity()
            .ok_or_else(|| Error::Parity(String::from("right operand has mixed parity")))?;
        let twist = if pf == Parity::Odd {
            -Rat::one()
        } else {
            Rat::one()
        };
        let mut out = SuperPolynomial::zero(f.n);
        for i in 0..f.n {
            out.add_assign_scaled(&f.deriv_even(i).mul(&g.deriv_odd(i)), &Rat::one());
            out.add_assign_scaled(&f.deriv_odd(i).mul(&g.deriv_even(i)), &twist);
        }
        Ok(out)
    }

    /// Odd Laplacian `∆f = Σ_i ∂²f / ∂x^i ∂θ_i` (left odd derivatives).
    /// `∆² = 0` and `∆f = 0` is the divergence-free condition cutting out
    /// `SB(n)`/`SLe(n)` inside `B(n)`/`Le(n)`.
    pub fn odd_laplacian(f: &SuperPolynomial) -> SuperPolynomial {
        let mut out = SuperPolynomial::zero(f.n);
        for i in 0..f.n {
            out.add_assign_scaled(&f.deriv_odd(i).deriv_even(i), &Rat::one());
        }
        out
    }
}

impl fmt::Display for SuperPolynomial {
    /// Human-readable rendering; for `n = 2` the variables print as
    /// `x, y, θ, ψ`, otherwise as `x1.., θ1..`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            let neg = c.is_negative();
            let mag = if neg { -c.clone() } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut body = String::new();
            for (i, &e) in m.even.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let name: String = if self.n == 2 {
                    String::from(if i == 0 { "x" } else { "y" })
                } else {
                    alloc::format!("x{}", i + 1)
                };
                body.push_str(&name);
                if e > 1 {
                    body.push_str(&alloc::format!("^{e}"));
                }
            }
            for i in 0..self.n {
                if m.odd & (1 << i) != 0 {
                    let name: String = if self.n == 2 {
                        String::from(if i == 0 { "θ" } else { "ψ" })
                    } else {
                        alloc::format!("θ{}", i + 1)
                    };
                    body.push_str(&name);
                }
            }
            if body.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{body}")?;
            } else {
                write!(f, "{mag}{body}")?;
            }
        }
        Ok(())
    }
}

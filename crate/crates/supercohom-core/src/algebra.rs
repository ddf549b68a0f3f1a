//! Graded Lie superalgebras given by structure constants over ℚ.
//!
//! Built-in families are graded truncations of the infinite-dimensional
//! algebras of Hamiltonian/periplectic vector fields in their
//! generating-function presentation:
//!
//! * `H(n)` — Hamiltonian vector fields on ℝ^n (n even), generating
//!   functions = polynomials modulo constants under the Poisson bracket;
//!   a degree-d polynomial sits in grade d − 2.
//! * `B(n)` — the Buttin algebra: all polynomials of the (n|n)-superspace
//!   under the antibracket (constants included — the central extension).
//! * `Le(n)` — the Leites algebra `B(n)/⟨1⟩`.
//! * `SLe(n)` — the special Leites algebra: divergence-free generating
//!   functions (`Δf = 0`) modulo constants.
//!
//! With `gr(x^i) = 1`, `gr(θ_i) = −1` the antibracket families are graded by
//! `even degree − odd count`; elements of grade `g` exist only for
//! `g ≥ −n` (`g ≥ −1` for `H(n)`), so a grade window `[lo, hi]` captures the
//! full algebra below `hi`. Brackets whose target grade falls outside the
//! window are *unknown*, not zero; [`Algebra::bracket`] reports this as a
//! window error so truncation can never silently corrupt a computation.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_traits::{One, Zero};

use crate::error::Error;
use crate::linalg::{kernel_basis, Eliminator, RatField, SparseMat};
use crate::poly::{Monomial, Parity, SuperPolynomial};
use crate::rng::SplitMix64;
use crate::Rat;

/// Hard caps keeping accidental huge windows from exhausting memory.
const MAX_ELEMENTS: usize = 150_000;
const MAX_N_HAMILTONIAN: u32 = 6;
const MAX_N_ANTIBRACKET: u32 = 5;

/// Built-in algebra families (with the superspace dimension parameter) or a
/// custom algebra loaded from explicit structure constants.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    H(u32),
    B(u32),
    Le(u32),
    SLe(u32),
    Custom,
}

impl Family {
    fn check(&self) -> Result<(), Error> {
        match *self {
            Family::H(n) => {
                if n < 2 || n % 2 != 0 {
                    return Err(Error::InvalidFamily(format!(
                        "H(n) needs an even n ≥ 2, got n = {n}"
                    )));
                }
                if n > MAX_N_HAMILTONIAN {
                    return Err(Error::Capacity(format!(
                        "H({n}) exceeds the supported bound n ≤ {MAX_N_HAMILTONIAN}"
                    )));
                }
            }
            Family::B(n) | Family::Le(n) | Family::SLe(n) => {
                if n == 0 {
                    return Err(Error::InvalidFamily(String::from(
                        "antibracket families need n ≥ 1",
                    )));
                }
                if n > MAX_N_ANTIBRACKET {
                    return Err(Error::Capacity(format!(
                        "n = {n} exceeds the supported bound n ≤ {MAX_N_ANTIBRACKET}"
                    )));
                }
            }
            Family::Custom => {}
        }
        Ok(())
    }

    /// Lowest grade in which the (untruncated) algebra has elements.
    pub fn floor(&self) -> Option<i64> {
        match *self {
            Family::H(_) => Some(-1),
            Family::B(n) | Family::Le(n) | Family::SLe(n) => Some(-(n as i64)),
            Family::Custom => None,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Family::H(n) => write!(f, "H({n})"),
            Family::B(n) => write!(f, "B({n})"),
            Family::Le(n) => write!(f, "Le({n})"),
            Family::SLe(n) => write!(f, "SLe({n})"),
            Family::Custom => write!(f, "custom"),
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    /// Accepts `H(2)`, `H2`, `SLe(3)`, `SLe3`, …
    fn from_str(s: &str) -> Result<Family, Error> {
        let err = || Error::InvalidFamily(format!("unknown algebra family: {s:?}"));
        let (name, num) = match s.find(|c: char| c.is_ascii_digit() || c == '(') {
            Some(pos) => s.split_at(pos),
            None => return Err(err()),
        };
        let digits = num.trim_start_matches('(').trim_end_matches(')');
        let n: u32 = digits.parse().map_err(|_| err())?;
        let fam = match name {
            "H" => Family::H(n),
            "B" => Family::B(n),
            "Le" => Family::Le(n),
            "SLe" => Family::SLe(n),
            _ => return Err(err()),
        };
        fam.check()?;
        Ok(fam)
    }
}

/// One basis element of the algebra.
#[derive(Clone, Debug)]
pub struct BasisElement {
    /// 0-based position in the algebra's element list.
    pub index: u32,
    /// Superalgebra parity (for antibracket families this is the *shifted*
    /// parity, opposite to the generating function's polynomial parity).
    pub parity: Parity,
    pub grade: i64,
    /// `E_i`/`O_i` for generated algebras (1-based, grades ascending);
    /// caller-supplied for custom algebras.
    pub label: String,
    /// Generating function, when the algebra has a polynomial model.
    pub gen_fn: Option<SuperPolynomial>,
    /// Leading monomial of `gen_fn` under the canonical monomial order; the
    /// generated basis is in reduced row echelon form with respect to these,
    /// which makes expansion over the basis a coefficient read-off.
    pub(crate) pivot: Option<Monomial>,
}

/// Structure constants in three indexed views.
#[derive(Clone, Debug, Default)]
pub struct StructureTable {
    /// `(i, j) → [e_i, e_j]` expanded over the basis, stored for `i ≤ j`
    /// only (the other order follows by super antisymmetry). Absent key with
    /// target grade inside the window ⇔ zero bracket.
    pub forward: BTreeMap<(u32, u32), Vec<(u32, Rat)>>,
    /// `c → {(i, j, coeff)}` with `i ≤ j`: all brackets containing `e_c`.
    pub inverse: BTreeMap<u32, Vec<(u32, u32, Rat)>>,
    /// Elements per grade, ascending index order.
    pub grade_index: BTreeMap<i64, Vec<u32>>,
}

/// Element data for [`Algebra::from_structure`].
#[derive(Clone, Debug)]
pub struct ElementSpec {
    pub label: String,
    pub parity: Parity,
    pub grade: i64,
}

/// A finite graded window of a Lie superalgebra, with its structure table.
#[derive(Clone, Debug)]
pub struct Algebra {
    family: Family,
    name: String,
    n_even: u32,
    n_odd: u32,
    grade_lo: i64,
    grade_hi: i64,
    /// Grade floor of the untruncated algebra (built-ins); `None` when
    /// unknown (custom truncations).
    floor: Option<i64>,
    /// True when the window contains the whole algebra, so brackets landing
    /// outside it are genuinely zero.
    complete: bool,
    elements: Vec<BasisElement>,
    table: StructureTable,
    label_index: BTreeMap<String, u32>,
}

// --- canonical monomial enumeration ---------------------------------------

/// Even exponent vectors of total degree `d` over `n` variables, in
/// ascending lexicographic order.
fn compositions_lex(n: usize, d: u16, out: &mut Vec<Vec<u16>>) {
    fn rec(n: usize, d: u16, prefix: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
        if n == 1 {
            let mut v = prefix.clone();
            v.push(d);
            out.push(v);
            return;
        }
        for first in 0..=d {
            prefix.push(first);
            rec(n - 1, d - first, prefix, out);
            prefix.pop();
        }
    }
    let mut prefix = Vec::new();
    rec(n, d, &mut prefix, out);
}

/// All monomials of the (n|n)-superspace with `even_degree − odd_count = g`,
/// in the canonical order: odd count ascending, then even exponents
/// lexicographically ascending, then odd mask ascending.
fn antibracket_monomials(n: u32, g: i64, include_constant: bool) -> Vec<Monomial> {
    let mut mons = Vec::new();
    for j in 0..=n {
        let d = g + j as i64;
        if d < 0 || d > u16::MAX as i64 {
            continue;
        }
        if d == 0 && j == 0 && !include_constant {
            continue;
        }
        let mut evens = Vec::new();
        compositions_lex(n as usize, d as u16, &mut evens);
        let masks: Vec<u32> = (0u32..1 << n).filter(|m| m.count_ones() == j).collect();
        for e in evens {
            for &mask in &masks {
                mons.push(Monomial {
                    even: e.clone(),
                    odd: mask,
                });
            }
        }
    }
    mons
}

/// Monomials of total degree `g + 2 ≥ 1` in `n` even variables (the grade-g
/// slice of `H(n)`; degree 0 is the removed center).
fn hamiltonian_monomials(n: u32, g: i64) -> Vec<Monomial> {
    let d = g + 2;
    if d < 1 || d > u16::MAX as i64 {
        return Vec::new();
    }
    let mut evens = Vec::new();
    compositions_lex(n as usize, d as u16, &mut evens);
    evens
        .into_iter()
        .map(|e| Monomial { even: e, odd: 0 })
        .collect()
}

impl Algebra {
    /// Generate the grade window `[grade_lo, grade_hi]` of a built-in family.
    /// The lower end is clamped to the family's grade floor.
    pub fn generate(family: Family, grade_lo: i64, grade_hi: i64) -> Result<Algebra, Error> {
        family.check()?;
        if family == Family::Custom {
            return Err(Error::InvalidFamily(String::from(
                "custom algebras are built from explicit structure constants",
            )));
        }
        if grade_lo > grade_hi {
            return Err(Error::Range(format!(
                "empty grade window: lo = {grade_lo} > hi = {grade_hi}"
            )));
        }
        let floor = family.floor().expect("built-in families have a floor");
        let lo = grade_lo.max(floor);

        let (n_even, n_odd, poly_n) = match family {
            Family::H(n) => (n, 0, n as usize),
            Family::B(n) | Family::Le(n) | Family::SLe(n) => (n, n, n as usize),
            Family::Custom => unreachable!(),
        };

        // Per grade: generating functions in canonical order with their
        // leading (pivot) monomials.
        let mut elements: Vec<BasisElement> = Vec::new();
        let mut label_index = BTreeMap::new();
        for g in lo..=grade_hi {
            let basis_g = Self::grade_basis(family, poly_n, g)?;
            for (gen_fn, pivot) in basis_g {
                if elements.len() >= MAX_ELEMENTS {
                    return Err(Error::Capacity(format!(
                        "window [{lo}, {grade_hi}] of {family} exceeds {MAX_ELEMENTS} elements"
                    )));
                }
                let parity = match family {
                    Family::H(_) => Parity::Even,
                    _ => pivot.parity().flip(),
                };
                let index = elements.len() as u32;
                let label = format!(
                    "{}_{}",
                    if parity == Parity::Even { "E" } else { "O" },
                    index + 1
                );
                label_index.insert(label.clone(), index);
                elements.push(BasisElement {
                    index,
                    parity,
                    grade: g,
                    label,
                    gen_fn: Some(gen_fn),
                    pivot: Some(pivot),
                });
            }
        }

        let mut alg = Algebra {
            family,
            name: family.to_string(),
            n_even,
            n_odd,
            grade_lo: lo,
            grade_hi,
            floor: Some(floor),
            complete: false,
            elements,
            table: StructureTable::default(),
            label_index,
        };
        alg.build_table()?;
        Ok(alg)
    }

    /// Canonical basis of one grade slice: `(generating function, pivot)`
    /// pairs, RREF-ordered by pivot monomial.
    fn grade_basis(
        family: Family,
        poly_n: usize,
        g: i64,
    ) -> Result<Vec<(SuperPolynomial, Monomial)>, Error> {
        let n = poly_n as u32;
        let mons = match family {
            Family::H(_) => hamiltonian_monomials(n, g),
            Family::B(_) => antibracket_monomials(n, g, true),
            Family::Le(_) | Family::SLe(_) => antibracket_monomials(n, g, false),
            Family::Custom => unreachable!(),
        };
        if mons.is_empty() {
            return Ok(Vec::new());
        }

        let monomial_poly = |m: &Monomial| {
            SuperPolynomial::term(poly_n, m.even.clone(), m.odd, Rat::one())
        };

        if !matches!(family, Family::SLe(_)) {
            return Ok(mons.iter().map(|m| (monomial_poly(m), m.clone())).collect());
        }

        // SLe(n): kernel of the odd Laplacian on the grade slice, written in
        // reduced row echelon form over the canonical monomial columns.
        let col_of: BTreeMap<&Monomial, u32> = mons
            .iter()
            .enumerate()
            .map(|(c, m)| (m, c as u32))
            .collect();
        let mut target_rows: BTreeMap<Monomial, Vec<(u32, Rat)>> = BTreeMap::new();
        for (c, m) in mons.iter().enumerate() {
            let image = SuperPolynomial::odd_laplacian(&monomial_poly(m));
            for (t, coeff) in image.terms() {
                target_rows
                    .entry(t.clone())
                    .or_default()
                    .push((c as u32, coeff.clone()));
            }
        }
        let mut rows: Vec<Vec<(u32, Rat)>> = target_rows.into_values().collect();
        for r in &mut rows {
            r.sort_by_key(|e| e.0);
        }
        let constraint = SparseMat::from_rows(mons.len(), rows);
        let mut ops = 0u64;
        let kernel = kernel_basis(&RatField, &constraint, &mut ops);

        let field = RatField;
        let mut elim = Eliminator::new(&field);
        for v in kernel {
            elim.insert_row(v);
        }
        elim.back_substitute();
        let mut out = Vec::new();
        for (pivot_col, row) in elim
            .pivot_cols()
            .into_iter()
            .map(|c| {
                let r = elim
                    .rows()
                    .iter()
                    .find(|r| r.first().map(|e| e.0) == Some(c))
                    .expect("pivot row present")
                    .clone();
                (c, r)
            })
            .collect::<Vec<_>>()
        {
            let mut gen_fn = SuperPolynomial::zero(poly_n);
            for (c, coeff) in &row {
                let m = mons[*c as usize].clone();
                gen_fn.add_term(m, coeff.clone());
            }
            let pivot = mons[pivot_col as usize].clone();
            debug_assert!(col_of.contains_key(&pivot));
            out.push((gen_fn, pivot));
        }
        Ok(out)
    }

    /// Build a custom algebra from explicit elements and bracket data.
    /// Bracket triples are `(i, j, expansion)` with 0-based indices in any
    /// order; `i > j` entries are normalized by super antisymmetry. Grading
    /// and parity additivity of every entry are hard errors here; deeper
    /// checks (Jacobi) live in [`Algebra::validate_structure`].
    pub fn from_structure(
        name: &str,
        grade_lo: i64,
        grade_hi: i64,
        complete: bool,
        specs: Vec<ElementSpec>,
        brackets: Vec<(u32, u32, Vec<(u32, Rat)>)>,
    ) -> Result<Algebra, Error> {
        if grade_lo > grade_hi {
            return Err(Error::Range(format!(
                "empty grade window: lo = {grade_lo} > hi = {grade_hi}"
            )));
        }
        if specs.len() > MAX_ELEMENTS {
            return Err(Error::Capacity(format!(
                "{} elements exceed the supported bound {MAX_ELEMENTS}",
                specs.len()
            )));
        }
        let dim = specs.len() as u32;
        let mut elements = Vec::with_capacity(specs.len());
        let mut label_index = BTreeMap::new();
        for (idx, spec) in specs.into_iter().enumerate() {
            if spec.grade < grade_lo || spec.grade > grade_hi {
                return Err(Error::Range(format!(
                    "element {:?} has grade {} outside the window [{grade_lo}, {grade_hi}]",
                    spec.label, spec.grade
                )));
            }
            if label_index.insert(spec.label.clone(), idx as u32).is_some() {
                return Err(Error::InvalidFamily(format!(
                    "duplicate element label {:?}",
                    spec.label
                )));
            }
            elements.push(BasisElement {
                index: idx as u32,
                parity: spec.parity,
                grade: spec.grade,
                label: spec.label,
                gen_fn: None,
                pivot: None,
            });
        }

        let mut forward: BTreeMap<(u32, u32), Vec<(u32, Rat)>> = BTreeMap::new();
        for (bi, bj, terms) in brackets {
            if bi >= dim || bj >= dim || terms.iter().any(|&(k, _)| k >= dim) {
                return Err(Error::Range(format!(
                    "bracket ({bi}, {bj}) references an element index out of range (dim = {dim})"
                )));
            }
            // Normalize to i ≤ j via [e_i, e_j] = −(−1)^{P_i P_j} [e_j, e_i].
            let (i, j, flip) = if bi <= bj { (bi, bj, false) } else { (bj, bi, true) };
            let sign = if flip {
                antisym_sign(
                    elements[bi as usize].parity,
                    elements[bj as usize].parity,
                )
            } else {
                Rat::one()
            };
            let mut expansion: Vec<(u32, Rat)> = terms
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| (k, c * &sign))
                .collect();
            expansion.sort_by_key(|e| e.0);
            for w in expansion.windows(2) {
                if w[0].0 == w[1].0 {
                    return Err(Error::InvalidFamily(format!(
                        "bracket ({bi}, {bj}) lists element {} twice",
                        w[0].0
                    )));
                }
            }
            if expansion.is_empty() {
                continue;
            }
            let gi = elements[i as usize].grade;
            let gj = elements[j as usize].grade;
            let pi = elements[i as usize].parity;
            let pj = elements[j as usize].parity;
            for (k, _) in &expansion {
                let target = &elements[*k as usize];
                if target.grade != gi + gj {
                    return Err(Error::InvalidFamily(format!(
                        "bracket [{}, {}] maps grades {gi}+{gj} to element {} of grade {}",
                        elements[i as usize].label,
                        elements[j as usize].label,
                        target.label,
                        target.grade
                    )));
                }
                let want = if pi == pj { Parity::Even } else { Parity::Odd };
                if target.parity != want {
                    return Err(Error::InvalidFamily(format!(
                        "bracket [{}, {}] violates parity additivity at element {}",
                        elements[i as usize].label,
                        elements[j as usize].label,
                        target.label
                    )));
                }
            }
            if i == j && elements[i as usize].parity == Parity::Even {
                return Err(Error::InvalidFamily(format!(
                    "[{0}, {0}] must vanish for the even element {0}",
                    elements[i as usize].label
                )));
            }
            if forward.insert((i, j), expansion).is_some() {
                return Err(Error::InvalidFamily(format!(
                    "bracket ({i}, {j}) defined twice"
                )));
            }
        }

        let mut table = StructureTable {
            forward,
            inverse: BTreeMap::new(),
            grade_index: BTreeMap::new(),
        };
        for e in &elements {
            table.grade_index.entry(e.grade).or_default().push(e.index);
        }
        rebuild_inverse(&mut table);

        // A custom algebra's window is anchored at its true bottom: grades
        // below `grade_lo` are declared empty, `complete = false` only means
        // the window may be truncated from above.
        Ok(Algebra {
            family: Family::Custom,
            name: String::from(name),
            n_even: 0,
            n_odd: 0,
            grade_lo,
            grade_hi,
            floor: Some(grade_lo),
            complete,
            elements,
            table,
            label_index,
        })
    }

    /// Polynomial-model bracket of the family (Poisson for `H`, antibracket
    /// otherwise). Constants are NOT dropped here; the structure table works
    /// in the quotient where applicable.
    pub fn bracket_poly(
        &self,
        f: &SuperPolynomial,
        g: &SuperPolynomial,
    ) -> Result<SuperPolynomial, Error> {
        match self.family {
            Family::H(_) => SuperPolynomial::poisson_bracket(f, g),
            Family::B(_) | Family::Le(_) | Family::SLe(_) => {
                SuperPolynomial::buttin_bracket(f, g)
            }
            Family::Custom => Err(Error::InvalidFamily(String::from(
                "custom algebras have no polynomial model",
            ))),
        }
    }

    fn build_table(&mut self) -> Result<(), Error> {
        let keep_constants = matches!(self.family, Family::B(_));
        let dim = self.elements.len() as u32;
        let mut grade_index: BTreeMap<i64, Vec<u32>> = BTreeMap::new();
        for e in &self.elements {
            grade_index.entry(e.grade).or_default().push(e.index);
        }
        // pivot → index per grade, for expansion.
        let mut pivot_of: BTreeMap<(i64, Monomial), u32> = BTreeMap::new();
        for e in &self.elements {
            let p = e.pivot.clone().expect("generated elements carry pivots");
            pivot_of.insert((e.grade, p), e.index);
        }

        let mut forward: BTreeMap<(u32, u32), Vec<(u32, Rat)>> = BTreeMap::new();
        for i in 0..dim {
            for j in i..dim {
                let gi = self.elements[i as usize].grade;
                let gj = self.elements[j as usize].grade;
                let target = gi + gj;
                if target < self.grade_lo || target > self.grade_hi {
                    continue; // provably zero below the floor; unknown above
                }
                let fi = self.elements[i as usize].gen_fn.as_ref().unwrap();
                let fj = self.elements[j as usize].gen_fn.as_ref().unwrap();
                let mut val = self.bracket_poly(fi, fj)?;
                if !keep_constants {
                    val.drop_constant();
                }
                if val.is_zero() {
                    continue;
                }
                // Expansion over the RREF basis: read coefficients off the
                // pivot monomials, then the residual must vanish.
                let mut expansion = Vec::new();
                if let Some(indices) = grade_index.get(&target) {
                    for &e in indices {
                        let pivot = self.elements[e as usize].pivot.as_ref().unwrap();
                        let c = val.coeff(pivot);
                        if !c.is_zero() {
                            val.add_assign_scaled(
                                self.elements[e as usize].gen_fn.as_ref().unwrap(),
                                &-c.clone(),
                            );
                            expansion.push((e, c));
                        }
                    }
                }
                if !val.is_zero() {
                    return Err(Error::Complex(format!(
                        "bracket of elements {i} and {j} does not lie in the grade-{target} span"
                    )));
                }
                if !expansion.is_empty() {
                    expansion.sort_by_key(|e| e.0);
                    forward.insert((i, j), expansion);
                }
            }
        }

        let mut table = StructureTable {
            forward,
            inverse: BTreeMap::new(),
            grade_index,
        };
        rebuild_inverse(&mut table);
        self.table = table;
        Ok(())
    }

    // --- accessors ---------------------------------------------------------

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_even(&self) -> u32 {
        self.n_even
    }

    pub fn n_odd(&self) -> u32 {
        self.n_odd
    }

    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn grade_lo(&self) -> i64 {
        self.grade_lo
    }

    pub fn grade_hi(&self) -> i64 {
        self.grade_hi
    }

    /// `Some(floor)` when grades below `floor` are known to be empty.
    pub fn floor(&self) -> Option<i64> {
        self.floor
    }

    pub fn complete(&self) -> bool {
        self.complete
    }

    pub fn elements(&self) -> &[BasisElement] {
        &self.elements
    }

    pub fn element(&self, i: u32) -> Result<&BasisElement, Error> {
        self.elements.get(i as usize).ok_or_else(|| {
            Error::Range(format!(
                "element index {i} out of range (dim = {})",
                self.elements.len()
            ))
        })
    }

    pub fn label(&self, i: u32) -> &str {
        &self.elements[i as usize].label
    }

    pub fn by_label(&self, label: &str) -> Option<u32> {
        self.label_index.get(label).copied()
    }

    pub fn table(&self) -> &StructureTable {
        &self.table
    }

    /// Elements of one grade (ascending indices; empty slice for grades with
    /// no elements).
    pub fn grade_elements(&self, g: i64) -> &[u32] {
        self.table
            .grade_index
            .get(&g)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// All brackets `(i, j, expansion)` containing `e_c` in their expansion.
    pub fn inverse_pairs(&self, c: u32) -> &[(u32, u32, Rat)] {
        self.table
            .inverse
            .get(&c)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// `[e_i, e_j]` expanded over the basis, in any index order. Empty
    /// vector = zero. When the target grade lies outside the window of an
    /// incomplete algebra (and is not below the family floor, where the
    /// bracket provably vanishes), the value is unknown and a window error
    /// is returned.
    pub fn bracket(&self, i: u32, j: u32) -> Result<Vec<(u32, Rat)>, Error> {
        let ei = self.element(i)?;
        let ej = self.element(j)?;
        let target = ei.grade + ej.grade;
        if target < self.grade_lo || target > self.grade_hi {
            if self.complete || self.floor.map_or(false, |f| target < f) {
                return Ok(Vec::new());
            }
            return Err(Error::Window {
                required_lo: target,
                required_hi: target,
                available_lo: self.grade_lo,
                available_hi: self.grade_hi,
            });
        }
        let (a, b, flip) = if i <= j { (i, j, false) } else { (j, i, true) };
        let stored = self
            .table
            .forward
            .get(&(a, b))
            .cloned()
            .unwrap_or_default();
        if !flip {
            return Ok(stored);
        }
        let sign = antisym_sign(ei.parity, ej.parity);
        Ok(stored.into_iter().map(|(k, c)| (k, c * &sign)).collect())
    }

    /// Structure checks: index/grade/parity consistency of the table, super
    /// antisymmetry on the diagonal, and the graded Jacobi identity on every
    /// triple whose intermediate and final grades stay inside the window.
    /// For large algebras (dim > 90) Jacobi is spot-checked on a fixed-seed
    /// random sample of 150 000 triples instead of all of them.
    pub fn validate_structure(&self) -> Vec<String> {
        let mut violations = Vec::new();
        let dim = self.elements.len() as u32;

        for (&(i, j), expansion) in &self.table.forward {
            if i > j || j >= dim {
                violations.push(format!("malformed bracket key ({i}, {j})"));
                continue;
            }
            let (ei, ej) = (&self.elements[i as usize], &self.elements[j as usize]);
            if i == j && ei.parity == Parity::Even {
                violations.push(format!(
                    "[{0}, {0}] must vanish for even {0} (super antisymmetry)",
                    ei.label
                ));
            }
            let want_parity = if ei.parity == ej.parity {
                Parity::Even
            } else {
                Parity::Odd
            };
            for (k, c) in expansion {
                if *k >= dim {
                    violations.push(format!(
                        "bracket [{}, {}] references out-of-range element {k}",
                        ei.label, ej.label
                    ));
                    continue;
                }
                if c.is_zero() {
                    violations.push(format!(
                        "bracket [{}, {}] stores an explicit zero",
                        ei.label, ej.label
                    ));
                }
                let ek = &self.elements[*k as usize];
                if ek.grade != ei.grade + ej.grade {
                    violations.push(format!(
                        "bracket [{}, {}] breaks grading at {}",
                        ei.label, ej.label, ek.label
                    ));
                }
                if ek.parity != want_parity {
                    violations.push(format!(
                        "bracket [{}, {}] breaks parity additivity at {}",
                        ei.label, ej.label, ek.label
                    ));
                }
            }
        }

        for e in &self.elements {
            match self.table.grade_index.get(&e.grade) {
                Some(v) if v.contains(&e.index) => {}
                _ => violations.push(format!("{} missing from the grade index", e.label)),
            }
        }

        // Graded Jacobi:
        //   (−1)^{P_i P_k}[e_i,[e_j,e_k]] + (−1)^{P_j P_i}[e_j,[e_k,e_i]]
        // + (−1)^{P_k P_j}[e_k,[e_i,e_j]] = 0.
        let check_triple = |i: u32, j: u32, k: u32, violations: &mut Vec<String>| {
            let mut acc: BTreeMap<u32, Rat> = BTreeMap::new();
            for &(a, b, c) in &[(i, j, k), (j, k, i), (k, i, j)] {
                let pa = self.elements[a as usize].parity;
                let pc = self.elements[c as usize].parity;
                let sign = if pa == Parity::Odd && pc == Parity::Odd {
                    -Rat::one()
                } else {
                    Rat::one()
                };
                let inner = match self.bracket(b, c) {
                    Ok(v) => v,
                    Err(_) => return, // outside the window: cannot verify
                };
                for (m, cm) in inner {
                    let outer = match self.bracket(a, m) {
                        Ok(v) => v,
                        Err(_) => return,
                    };
                    for (t, ct) in outer {
                        let entry = acc.entry(t).or_insert_with(Rat::zero);
                        *entry += &sign * &cm * ct;
                    }
                }
            }
            if acc.values().any(|v| !v.is_zero()) {
                violations.push(format!(
                    "Jacobi identity fails on ({}, {}, {})",
                    self.elements[i as usize].label,
                    self.elements[j as usize].label,
                    self.elements[k as usize].label
                ));
            }
        };

        if dim <= 90 {
            for i in 0..dim {
                for j in i..dim {
                    for k in j..dim {
                        check_triple(i, j, k, &mut violations);
                    }
                }
            }
        } else {
            let mut rng = SplitMix64::new(0x6A11_ACB1);
            for _ in 0..150_000 {
                let i = rng.below(dim as usize) as u32;
                let j = rng.below(dim as usize) as u32;
                let k = rng.below(dim as usize) as u32;
                check_triple(i, j, k, &mut violations);
            }
        }

        violations
    }
}

/// Sign relating the two orders: `[x, y] = antisym_sign(p_x, p_y) · [y, x]`
/// (`+1` when both odd, `−1` otherwise).
fn antisym_sign(pi: Parity, pj: Parity) -> Rat {
    if pi == Parity::Odd && pj == Parity::Odd {
        Rat::one()
    } else {
        -Rat::one()
    }
}

fn rebuild_inverse(table: &mut StructureTable) {
    table.inverse.clear();
    for (&(i, j), expansion) in &table.forward {
        for (k, c) in expansion {
            table
                .inverse
                .entry(*k)
                .or_default()
                .push((i, j, c.clone()));
        }
    }
}

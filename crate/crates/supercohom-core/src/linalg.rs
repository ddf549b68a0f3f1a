//! Exact sparse linear algebra: coefficient rings (symmetric `F_p`, `Z`, `Q`),
//! incremental relation reduction over fields, integer Smith normal form with
//! unimodular transforms, the two-stage cohomology decomposition, and the
//! modular↔rational bridges (Chinese remaindering, rational reconstruction).
//!
//! Matrices are stored row-sparse; a row is a column-sorted `Vec<(u32, T)>` of
//! nonzero entries. Elimination is incremental: every new relation is reduced
//! against the system accumulated so far and either dies (dependent) or is
//! normalized and appended. All routines count scalar multiply–add operations
//! so that strategy comparisons can use a deterministic cost measure.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::{Int, Rat};

// ---------------------------------------------------------------------------
// Sparse matrices
// ---------------------------------------------------------------------------

/// Row-sparse matrix; rows hold column-sorted nonzero entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMat<T> {
    nrows: usize,
    ncols: usize,
    rows: Vec<Vec<(u32, T)>>,
}

impl<T: Clone> SparseMat<T> {
    pub fn zero(nrows: usize, ncols: usize) -> Self {
        SparseMat {
            nrows,
            ncols,
            rows: vec![Vec::new(); nrows],
        }
    }

    /// Build from rows; each row must be column-sorted and within bounds.
    pub fn from_rows(ncols: usize, rows: Vec<Vec<(u32, T)>>) -> Self {
        for r in &rows {
            debug_assert!(r.windows(2).all(|w| w[0].0 < w[1].0), "row not sorted");
            debug_assert!(r.iter().all(|&(c, _)| (c as usize) < ncols));
        }
        SparseMat {
            nrows: rows.len(),
            ncols,
            rows,
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn row(&self, i: usize) -> &[(u32, T)] {
        &self.rows[i]
    }

    pub fn rows(&self) -> impl Iterator<Item = &Vec<(u32, T)>> {
        self.rows.iter()
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn transpose(&self) -> SparseMat<T> {
        let mut rows = vec![Vec::new(); self.ncols];
        for (i, r) in self.rows.iter().enumerate() {
            for (c, v) in r {
                rows[*c as usize].push((i as u32, v.clone()));
            }
        }
        SparseMat {
            nrows: self.ncols,
            ncols: self.nrows,
            rows,
        }
    }

    /// Entry-wise fallible map (used for reduction mod p, where a denominator
    /// may vanish).
    pub fn try_map<U, E>(
        &self,
        mut f: impl FnMut(&T) -> Result<U, E>,
    ) -> Result<SparseMat<U>, E> {
        let mut rows = Vec::with_capacity(self.nrows);
        for r in &self.rows {
            let mut out = Vec::with_capacity(r.len());
            for (c, v) in r {
                out.push((*c, f(v)?));
            }
            rows.push(out);
        }
        Ok(SparseMat {
            nrows: self.nrows,
            ncols: self.ncols,
            rows,
        })
    }
}

// ---------------------------------------------------------------------------
// Coefficient fields
// ---------------------------------------------------------------------------

/// A field of coefficients, used generically by the elimination routines.
/// Implementations: [`FpField`] (machine-word modular arithmetic in symmetric
/// representation) and [`RatField`] (arbitrary-precision rationals).
pub trait Field {
    type Elem: Clone + PartialEq + fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse of a nonzero element.
    fn inv(&self, a: &Self::Elem) -> Self::Elem;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }
}

/// Deterministic primality test for machine-word candidates (trial division;
/// the numbers involved are at most 2^31).
pub fn is_prime_i64(p: i64) -> bool {
    if p < 2 {
        return false;
    }
    if p % 2 == 0 {
        return p == 2;
    }
    let mut d = 3i64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Prime field `F_p` in symmetric representation: every value is kept in
/// `[-(p-1)/2, (p-1)/2]`, which keeps reduced matrix entries small and makes
/// lifts to `Z` canonical.
///
/// `p = 2` is accepted here (the Theorem-1 style rank experiments need it);
/// engine-level configuration separately restricts the *prefilter* prime to
/// odd primes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FpField {
    p: i64,
}

impl FpField {
    /// Primes must fit a machine word comfortably: products of two symmetric
    /// representatives must not overflow `i64`, hence `p < 2^31`.
    pub fn new(p: i64) -> Result<FpField, Error> {
        if p >= 1 << 31 {
            return Err(Error::Capacity(format!(
                "prime {p} too large: moduli must be < 2^31"
            )));
        }
        if !is_prime_i64(p) {
            return Err(Error::Capacity(format!("{p} is not prime")));
        }
        Ok(FpField { p })
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    /// Normalize into the symmetric range.
    pub fn norm(&self, v: i64) -> i64 {
        let mut r = v % self.p;
        if 2 * r > self.p {
            r -= self.p;
        } else if 2 * r < -self.p {
            r += self.p;
        }
        r
    }
}

impl Field for FpField {
    type Elem = i64;

    fn zero(&self) -> i64 {
        0
    }
    fn one(&self) -> i64 {
        1
    }
    fn is_zero(&self, a: &i64) -> bool {
        *a == 0
    }
    fn neg(&self, a: &i64) -> i64 {
        self.norm(-*a)
    }
    fn add(&self, a: &i64, b: &i64) -> i64 {
        self.norm(a + b)
    }
    fn mul(&self, a: &i64, b: &i64) -> i64 {
        self.norm(a * b)
    }

    fn inv(&self, a: &i64) -> i64 {
        assert!(*a != 0, "inverse of zero");
        // Extended Euclid on (p, a).
        let (mut r0, mut r1) = (self.p, a.rem_euclid(self.p));
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0.abs(), 1);
        self.norm(t0 * r0.signum())
    }
}

/// The field of rationals.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RatField;

impl Field for RatField {
    type Elem = Rat;

    fn zero(&self) -> Rat {
        Rat::zero()
    }
    fn one(&self) -> Rat {
        Rat::one()
    }
    fn is_zero(&self, a: &Rat) -> bool {
        a.is_zero()
    }
    fn neg(&self, a: &Rat) -> Rat {
        -a.clone()
    }
    fn add(&self, a: &Rat, b: &Rat) -> Rat {
        a + b
    }
    fn mul(&self, a: &Rat, b: &Rat) -> Rat {
        a * b
    }
    fn inv(&self, a: &Rat) -> Rat {
        assert!(!a.is_zero(), "inverse of zero");
        a.recip()
    }
}

// ---------------------------------------------------------------------------
// Reduction mod p of exact scalars
// ---------------------------------------------------------------------------

/// Image of an integer under `φ_p`, in symmetric representation.
pub fn phi_p_int(x: &Int, field: &FpField) -> i64 {
    let p = Int::from(field.p());
    let r = x.mod_floor(&p);
    // r ∈ [0, p); fits i64 because p does.
    let r: i64 = i64::try_from(&r).expect("residue fits i64");
    field.norm(r)
}

/// Image of a rational under `φ_p`; fails with [`Error::PrimeSkip`] when the
/// denominator vanishes mod p.
pub fn phi_p_rat(x: &Rat, field: &FpField) -> Result<i64, Error> {
    let den = phi_p_int(x.denom(), field);
    if den == 0 {
        return Err(Error::PrimeSkip { prime: field.p() });
    }
    let num = phi_p_int(x.numer(), field);
    Ok(field.mul(&num, &field.inv(&den)))
}

/// Reduce a whole rational matrix mod p.
pub fn mat_mod_p(mat: &SparseMat<Rat>, field: &FpField) -> Result<SparseMat<i64>, Error> {
    // A numerator divisible by p legitimately produces an explicit zero;
    // filter those out to keep the no-stored-zeros invariant.
    let mapped = mat.try_map(|x| phi_p_rat(x, field))?;
    let rows = mapped
        .rows
        .into_iter()
        .map(|r| r.into_iter().filter(|(_, v)| *v != 0).collect())
        .collect();
    Ok(SparseMat {
        nrows: mat.nrows(),
        ncols: mat.ncols(),
        rows,
    })
}

// ---------------------------------------------------------------------------
// Incremental elimination over a field
// ---------------------------------------------------------------------------

/// `out = a - c·b` on column-sorted sparse rows; counts one operation per
/// touched entry of `b`.
fn row_axpy<F: Field>(
    field: &F,
    a: &[(u32, F::Elem)],
    c: &F::Elem,
    b: &[(u32, F::Elem)],
    ops: &mut u64,
) -> Vec<(u32, F::Elem)> {
    *ops += b.len() as u64;
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0usize, 0usize);
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some(&(ca, ref va)), Some(&(cb, ref vb))) => {
                if ca < cb {
                    out.push((ca, va.clone()));
                    i += 1;
                } else if cb < ca {
                    out.push((cb, field.neg(&field.mul(c, vb))));
                    j += 1;
                } else {
                    let v = field.sub(va, &field.mul(c, vb));
                    if !field.is_zero(&v) {
                        out.push((ca, v));
                    }
                    i += 1;
                    j += 1;
                }
            }
            (Some(&(ca, ref va)), None) => {
                out.push((ca, va.clone()));
                i += 1;
            }
            (None, Some(&(cb, ref vb))) => {
                out.push((cb, field.neg(&field.mul(c, vb))));
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

/// Incremental row-reduction system: holds a set of rows in echelon form,
/// each normalized to leading coefficient 1, indexed by pivot column.
///
/// Integer rows are *not* accepted here — reduction over `Z` loses torsion
/// and goes through [`smith_normal_form`] instead; see
/// [`reduce_relation_ring`] for the tag-dispatched entry point.
pub struct Eliminator<'f, F: Field> {
    field: &'f F,
    rows: Vec<Vec<(u32, F::Elem)>>,
    pivot_of_col: BTreeMap<u32, usize>,
    ops: u64,
}

impl<'f, F: Field> Eliminator<'f, F> {
    pub fn new(field: &'f F) -> Self {
        Eliminator {
            field,
            rows: Vec::new(),
            pivot_of_col: BTreeMap::new(),
            ops: 0,
        }
    }

    /// Reduce a relation against the system: Gaussian reduction by pivot
    /// rows; a nonzero result comes back normalized (leading coefficient 1)
    /// and is NOT inserted. An empty result means the row was dependent.
    pub fn reduce_relation(&mut self, mut row: Vec<(u32, F::Elem)>) -> Vec<(u32, F::Elem)> {
        loop {
            let Some(&(lead, ref coeff)) = row.first() else {
                return row; // zero: dependent
            };
            match self.pivot_of_col.get(&lead) {
                Some(&ri) => {
                    let c = coeff.clone();
                    let pivot_row = &self.rows[ri];
                    row = row_axpy(self.field, &row, &c, pivot_row, &mut self.ops);
                }
                None => {
                    // Normalize leading coefficient to 1.
                    let inv = self.field.inv(coeff);
                    if !(self.field.is_zero(&self.field.sub(&inv, &self.field.one()))) {
                        self.ops += row.len() as u64;
                        for (_, v) in row.iter_mut() {
                            *v = self.field.mul(v, &inv);
                        }
                    }
                    return row;
                }
            }
        }
    }

    /// Reduce and insert; returns true when the row extended the system.
    pub fn insert_row(&mut self, row: Vec<(u32, F::Elem)>) -> bool {
        let reduced = self.reduce_relation(row);
        match reduced.first() {
            None => false,
            Some(&(lead, _)) => {
                self.pivot_of_col.insert(lead, self.rows.len());
                self.rows.push(reduced);
                true
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ops(&self) -> u64 {
        self.ops
    }

    /// Pivot columns in ascending order.
    pub fn pivot_cols(&self) -> Vec<u32> {
        self.pivot_of_col.keys().copied().collect()
    }

    pub fn rows(&self) -> &[Vec<(u32, F::Elem)>] {
        &self.rows
    }

    /// Full back-substitution: clears every pivot column from all other rows,
    /// turning the echelon system into reduced row echelon form. Rows stay
    /// indexed by their pivot.
    pub fn back_substitute(&mut self) {
        let pivots: Vec<(u32, usize)> =
            self.pivot_of_col.iter().map(|(&c, &r)| (c, r)).collect();
        for &(pcol, prow) in pivots.iter().rev() {
            let pivot_row = self.rows[prow].clone();
            for ri in 0..self.rows.len() {
                if ri == prow {
                    continue;
                }
                if let Ok(pos) = self.rows[ri].binary_search_by_key(&pcol, |e| e.0) {
                    let c = self.rows[ri][pos].1.clone();
                    self.rows[ri] =
                        row_axpy(self.field, &self.rows[ri], &c, &pivot_row, &mut self.ops);
                }
            }
        }
    }
}

/// Rank of a matrix over a field, by incremental reduction of its rows.
pub fn rank<F: Field>(field: &F, mat: &SparseMat<F::Elem>, ops: &mut u64) -> usize {
    let mut elim = Eliminator::new(field);
    for r in mat.rows() {
        elim.insert_row(r.clone());
    }
    *ops += elim.ops();
    elim.rank()
}

/// Tag used by ring-generic entry points and the matrix interchange format.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RingTag {
    Fp(i64),
    Int,
    Rat,
}

/// A scalar in one of the three coefficient rings, kept in canonical form:
/// `Fp` values live in the symmetric range, rationals in lowest terms with
/// positive denominator (maintained by `num-rational`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RingElement {
    Fp { value: i64, p: i64 },
    Int(Int),
    Rat(Rat),
}

impl RingElement {
    pub fn fp(value: i64, field: &FpField) -> RingElement {
        RingElement::Fp {
            value: field.norm(value),
            p: field.p(),
        }
    }

    pub fn tag(&self) -> RingTag {
        match self {
            RingElement::Fp { p, .. } => RingTag::Fp(*p),
            RingElement::Int(_) => RingTag::Int,
            RingElement::Rat(_) => RingTag::Rat,
        }
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingElement::Fp { value, .. } => write!(f, "{value}"),
            RingElement::Int(x) => write!(f, "{x}"),
            RingElement::Rat(x) => write!(f, "{x}"),
        }
    }
}

/// Ring-dispatched relation reduction, for callers that carry a [`RingTag`]
/// at runtime. Rejects the integer ring: incremental reduction over `Z`
/// discards torsion, so integral systems must go through the Smith normal
/// form path.
pub fn reduce_relation_ring(
    tag: RingTag,
    row: Vec<(u32, Rat)>,
    system: &mut Vec<Vec<(u32, Rat)>>,
) -> Result<Option<Vec<(u32, Rat)>>, Error> {
    match tag {
        RingTag::Int => Err(Error::UnsupportedRing(String::from(
            "incremental reduction over Z is not defined; use smith_normal_form",
        ))),
        RingTag::Rat => {
            let field = RatField;
            let mut elim = Eliminator::new(&field);
            for r in system.iter() {
                elim.insert_row(r.clone());
            }
            let reduced = elim.reduce_relation(row);
            if reduced.is_empty() {
                Ok(None)
            } else {
                system.push(reduced.clone());
                Ok(Some(reduced))
            }
        }
        RingTag::Fp(p) => {
            let field = FpField::new(p)?;
            let to_fp = |r: &[(u32, Rat)]| -> Result<Vec<(u32, i64)>, Error> {
                let mut out = Vec::new();
                for (c, v) in r {
                    let m = phi_p_rat(v, &field)?;
                    if m != 0 {
                        out.push((*c, m));
                    }
                }
                Ok(out)
            };
            let mut elim = Eliminator::new(&field);
            for r in system.iter() {
                let fr = to_fp(r)?;
                elim.insert_row(fr);
            }
            let reduced = elim.reduce_relation(to_fp(&row)?);
            if reduced.is_empty() {
                Ok(None)
            } else {
                let back: Vec<(u32, Rat)> = reduced
                    .iter()
                    .map(|&(c, v)| (c, Rat::from_integer(Int::from(v))))
                    .collect();
                system.push(back.clone());
                Ok(Some(back))
            }
        }
    }
}

// ---------------------------------------------------------------------------
// RREF, kernels, solving
// ---------------------------------------------------------------------------

/// Reduced row echelon form of the row space; returns the RREF rows keyed by
/// pivot column, in ascending pivot order.
pub fn rref<F: Field>(
    field: &F,
    mat: &SparseMat<F::Elem>,
    ops: &mut u64,
) -> Vec<(u32, Vec<(u32, F::Elem)>)> {
    let mut elim = Eliminator::new(field);
    for r in mat.rows() {
        elim.insert_row(r.clone());
    }
    elim.back_substitute();
    *ops += elim.ops();
    elim.pivot_of_col
        .iter()
        .map(|(&c, &ri)| (c, elim.rows[ri].clone()))
        .collect()
}

/// Basis of the null space `{x : A·x = 0}` of an `nrows × ncols` matrix over
/// a field (each matrix row is read as one linear constraint). Vectors come
/// out column-sorted, one per free column, in ascending free-column order —
/// a deterministic basis.
pub fn kernel_basis<F: Field>(
    field: &F,
    mat: &SparseMat<F::Elem>,
    ops: &mut u64,
) -> Vec<Vec<(u32, F::Elem)>> {
    let rref_rows = rref(field, mat, ops);
    let pivot_cols: BTreeSet<u32> = rref_rows.iter().map(|&(c, _)| c).collect();
    let mut basis = Vec::new();
    for f in 0..mat.ncols() as u32 {
        if pivot_cols.contains(&f) {
            continue;
        }
        let mut v: Vec<(u32, F::Elem)> = Vec::new();
        for (pcol, row) in &rref_rows {
            if let Ok(pos) = row.binary_search_by_key(&f, |e| e.0) {
                v.push((*pcol, field.neg(&row[pos].1)));
            }
        }
        v.push((f, field.one()));
        v.sort_by_key(|e| e.0);
        basis.push(v);
    }
    basis
}

/// Solve `A·x = b` over a field; returns a particular solution (free
/// variables zero) or `None` when inconsistent. `b` is a sparse vector over
/// row indices of `A`.
pub fn solve<F: Field>(
    field: &F,
    mat: &SparseMat<F::Elem>,
    rhs: &[(u32, F::Elem)],
    ops: &mut u64,
) -> Option<Vec<(u32, F::Elem)>> {
    let aug_col = mat.ncols() as u32;
    let rhs_map: BTreeMap<u32, &F::Elem> = rhs.iter().map(|(i, v)| (*i, v)).collect();
    let mut elim = Eliminator::new(field);
    for (i, r) in mat.rows().enumerate() {
        let mut row = r.clone();
        if let Some(v) = rhs_map.get(&(i as u32)) {
            if !field.is_zero(v) {
                row.push((aug_col, (*v).clone()));
            }
        }
        elim.insert_row(row);
    }
    if elim.pivot_of_col.contains_key(&aug_col) {
        *ops += elim.ops();
        return None; // inconsistent
    }
    elim.back_substitute();
    *ops += elim.ops();
    let mut x = Vec::new();
    for (&pcol, &ri) in &elim.pivot_of_col {
        let row = &elim.rows[ri];
        if let Ok(pos) = row.binary_search_by_key(&aug_col, |e| e.0) {
            x.push((pcol, row[pos].1.clone()));
        }
    }
    Some(x)
}

// ---------------------------------------------------------------------------
// Cohomology over a field: kernel modulo image with explicit classes
// ---------------------------------------------------------------------------

/// Field-side cohomology data of a block `C' --D'--> C --D--> C''`:
/// ranks of both differentials and, on request, an echelon basis of the
/// kernel of `D` reduced modulo the column space of `D'`.
pub struct FieldCohomology<E> {
    pub r: usize,
    pub r_prime: usize,
    pub betti: usize,
    /// Cocycle representatives spanning kernel/image; echelon-reduced against
    /// the image and against each other (deterministic).
    pub classes: Vec<Vec<(u32, E)>>,
    /// Structural signature used to compare eliminations across primes:
    /// pivot columns of the RREF of `D`, of the image echelon of `D'`, and
    /// the leading columns of the classes.
    pub signature: (Vec<u32>, Vec<u32>, Vec<u32>),
    pub ops: u64,
}

/// Compute [`FieldCohomology`]; when `want_classes` is false only the ranks
/// are produced (the prefilter path).
pub fn field_cohomology<F: Field>(
    field: &F,
    d: &SparseMat<F::Elem>,
    d_prime: &SparseMat<F::Elem>,
    want_classes: bool,
) -> FieldCohomology<F::Elem> {
    let m = d.ncols();
    debug_assert_eq!(m, d_prime.nrows());
    let mut ops = 0u64;

    if !want_classes {
        let r = rank(field, d, &mut ops);
        let r_prime = rank(field, &d_prime.transpose(), &mut ops);
        return FieldCohomology {
            r,
            r_prime,
            betti: m - r - r_prime,
            classes: Vec::new(),
            signature: (Vec::new(), Vec::new(), Vec::new()),
            ops,
        };
    }

    // Kernel of D via RREF; also keep the pivot columns for the signature.
    let d_rref = rref(field, d, &mut ops);
    let pivots_d: Vec<u32> = d_rref.iter().map(|&(c, _)| c).collect();
    let pivot_set: BTreeSet<u32> = pivots_d.iter().copied().collect();
    let mut kernel = Vec::new();
    for f in 0..m as u32 {
        if pivot_set.contains(&f) {
            continue;
        }
        let mut v: Vec<(u32, F::Elem)> = Vec::new();
        for (pcol, row) in &d_rref {
            if let Ok(pos) = row.binary_search_by_key(&f, |e| e.0) {
                v.push((*pcol, field.neg(&row[pos].1)));
            }
        }
        v.push((f, field.one()));
        v.sort_by_key(|e| e.0);
        kernel.push(v);
    }
    let r = m - kernel.len();

    // Image echelon of D' (columns of D' = rows of its transpose), then the
    // kernel vectors reduced against image + previously accepted classes.
    let mut elim = Eliminator::new(field);
    let dpt = d_prime.transpose();
    for row in dpt.rows() {
        elim.insert_row(row.clone());
    }
    let r_prime = elim.rank();
    let pivots_im = elim.pivot_cols();

    let mut classes = Vec::new();
    let mut class_leads = Vec::new();
    for v in kernel {
        let reduced = elim.reduce_relation(v);
        if let Some(&(lead, _)) = reduced.first() {
            class_leads.push(lead);
            elim.pivot_of_col.insert(lead, elim.rows.len());
            elim.rows.push(reduced.clone());
            classes.push(reduced);
        }
    }
    ops += elim.ops();
    let betti = m - r - r_prime;
    debug_assert_eq!(classes.len(), betti, "class count must equal betti");

    FieldCohomology {
        r,
        r_prime,
        betti,
        classes,
        signature: (pivots_d, pivots_im, class_leads),
        ops,
    }
}

// ---------------------------------------------------------------------------
// Smith normal form over Z with unimodular transforms
// ---------------------------------------------------------------------------

/// Result of `S = U·A·V` with `U`, `V` unimodular and `S` diagonal with the
/// divisibility chain `s_1 | s_2 | … | s_r`, all `s_i > 0`.
/// Inverse transforms are tracked alongside because the cohomology
/// decomposition needs `V^{-1}` and `Ũ'^{-1}` explicitly.
#[derive(Clone, Debug)]
pub struct SmithDecomposition {
    pub nrows: usize,
    pub ncols: usize,
    pub rank: usize,
    /// The nonzero invariant factors `s_1..s_r`.
    pub invariant_factors: Vec<Int>,
    pub u: Vec<Vec<Int>>,
    pub u_inv: Vec<Vec<Int>>,
    pub v: Vec<Vec<Int>>,
    pub v_inv: Vec<Vec<Int>>,
    pub ops: u64,
}

fn identity(n: usize) -> Vec<Vec<Int>> {
    let mut m = vec![vec![Int::zero(); n]; n];
    for (i, item) in m.iter_mut().enumerate() {
        item[i] = Int::one();
    }
    m
}

struct SnfWorker {
    a: Vec<Vec<Int>>,
    nr: usize,
    nc: usize,
    u: Vec<Vec<Int>>,
    u_inv: Vec<Vec<Int>>,
    v: Vec<Vec<Int>>,
    v_inv: Vec<Vec<Int>>,
    ops: u64,
}

impl SnfWorker {
    fn row_swap(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.a.swap(i, j);
        self.u.swap(i, j);
        for r in &mut self.u_inv {
            r.swap(i, j);
        }
        self.ops += 1;
    }

    fn col_swap(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in &mut self.a {
            r.swap(i, j);
        }
        for r in &mut self.v {
            r.swap(i, j);
        }
        self.v_inv.swap(i, j);
        self.ops += 1;
    }

    fn row_neg(&mut self, i: usize) {
        for x in &mut self.a[i] {
            *x = -x.clone();
        }
        for x in &mut self.u[i] {
            *x = -x.clone();
        }
        for r in &mut self.u_inv {
            r[i] = -r[i].clone();
        }
        self.ops += (self.nc + 2 * self.nr) as u64;
    }

    /// row_i += c · row_j
    fn row_add(&mut self, i: usize, j: usize, c: &Int) {
        debug_assert!(i != j);
        if c.is_zero() {
            return;
        }
        for k in 0..self.nc {
            let t = &self.a[j][k] * c;
            self.a[i][k] += t;
        }
        for k in 0..self.nr {
            let t = &self.u[j][k] * c;
            self.u[i][k] += t;
        }
        for r in &mut self.u_inv {
            let t = &r[i] * c;
            r[j] -= t;
        }
        self.ops += (self.nc + 2 * self.nr) as u64;
    }

    /// col_i += c · col_j
    fn col_add(&mut self, i: usize, j: usize, c: &Int) {
        debug_assert!(i != j);
        if c.is_zero() {
            return;
        }
        for r in &mut self.a {
            let t = &r[j] * c;
            r[i] += t;
        }
        for r in &mut self.v {
            let t = &r[j] * c;
            r[i] += t;
        }
        for k in 0..self.nc {
            let t = &self.v_inv[i][k] * c;
            self.v_inv[j][k] -= t;
        }
        self.ops += (self.nr + 2 * self.nc) as u64;
    }

    /// One column pass: collapse every row into a single pivot entry at the
    /// diagonal using column operations only. Within a row the divisor is
    /// always a minimal-absolute-value nonzero entry (ties keep the current
    /// pivot), reduced with balanced remainders; nonzero residues are promoted
    /// and the row re-collapsed. Quotients are ratios of same-row entries of
    /// comparable magnitude, which is what keeps coefficient growth tame —
    /// dividing the whole trailing block by one globally minimal pivot makes
    /// the quotients, and with them the fill-in, as large as possible.
    fn col_pass(&mut self) {
        for r in 0..self.nr.min(self.nc) {
            'row: loop {
                let mut best: Option<usize> = None;
                let mut best_abs: Option<Int> = None;
                for j in r..self.nc {
                    if self.a[r][j].is_zero() {
                        continue;
                    }
                    let abs = self.a[r][j].abs();
                    if best_abs.as_ref().map_or(true, |b| &abs < b) {
                        best = Some(j);
                        best_abs = Some(abs);
                    }
                }
                let Some(jp) = best else { break 'row };
                self.col_swap(r, jp);
                let mut clean = true;
                for j in r + 1..self.nc {
                    if self.a[r][j].is_zero() {
                        continue;
                    }
                    let q = div_centered(&self.a[r][j], &self.a[r][r]);
                    self.col_add(j, r, &(-q));
                    if !self.a[r][j].is_zero() {
                        clean = false;
                    }
                }
                if clean {
                    break 'row;
                }
            }
        }
    }

    /// Transposed pass: collapse every column into its diagonal pivot with
    /// row operations. See [`Self::col_pass`].
    fn row_pass(&mut self) {
        for c in 0..self.nr.min(self.nc) {
            'col: loop {
                let mut best: Option<usize> = None;
                let mut best_abs: Option<Int> = None;
                for i in c..self.nr {
                    if self.a[i][c].is_zero() {
                        continue;
                    }
                    let abs = self.a[i][c].abs();
                    if best_abs.as_ref().map_or(true, |b| &abs < b) {
                        best = Some(i);
                        best_abs = Some(abs);
                    }
                }
                let Some(ip) = best else { break 'col };
                self.row_swap(c, ip);
                let mut clean = true;
                for i in c + 1..self.nr {
                    if self.a[i][c].is_zero() {
                        continue;
                    }
                    let q = div_centered(&self.a[i][c], &self.a[c][c]);
                    self.row_add(i, c, &(-q));
                    if !self.a[i][c].is_zero() {
                        clean = false;
                    }
                }
                if clean {
                    break 'col;
                }
            }
        }
    }

    fn is_diagonal(&self) -> bool {
        for (i, row) in self.a.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if i != j && !x.is_zero() {
                    return false;
                }
            }
        }
        true
    }
}

/// Quotient with a balanced remainder: `n - q·d` lies in `(-|d|/2, |d|/2]`.
/// Plain truncated division leaves remainders up to `|d| - 1`, which lets
/// entries swell much faster during the elimination cascades.
fn div_centered(n: &Int, d: &Int) -> Int {
    let mut q = n / d;
    let r = n - &q * d;
    if r.abs() * Int::from(2) > d.abs() {
        if r.sign() == d.sign() {
            q += Int::one();
        } else {
            q -= Int::one();
        }
    }
    q
}

/// Integer Smith normal form by pivot-driven elementary operations, tracking
/// all four transforms. Diagonalization alternates full row-collapse and
/// column-collapse passes (minimal-absolute-value pivots, balanced
/// remainders); the divisibility chain is then repaired with local two-pivot
/// cascades. Deterministic.
///
/// The alternation terminates: the leading not-yet-frozen pivot is replaced
/// by a gcd of entries including itself on every pass, so its absolute value
/// is a non-increasing positive integer, and once it stops shrinking both its
/// row and column collapse cleanly and later passes never touch them again.
pub fn smith_normal_form(mat: &SparseMat<Int>) -> SmithDecomposition {
    let (nr, nc) = (mat.nrows(), mat.ncols());
    let mut a = vec![vec![Int::zero(); nc]; nr];
    for (i, row) in mat.rows().enumerate() {
        for (c, v) in row {
            a[i][*c as usize] = v.clone();
        }
    }
    let mut w = SnfWorker {
        a,
        nr,
        nc,
        u: identity(nr),
        u_inv: identity(nr),
        v: identity(nc),
        v_inv: identity(nc),
        ops: 0,
    };

    while !w.is_diagonal() {
        let before = w.ops;
        w.col_pass();
        if w.is_diagonal() {
            break;
        }
        w.row_pass();
        // A non-diagonal matrix has a nonzero off-diagonal entry, and the
        // pass responsible for it must perform at least one reduction.
        assert!(w.ops > before, "Smith elimination stalled");
    }

    // Compact the diagonal: move nonzero entries to the leading positions,
    // preserving their order.
    let mut rank = 0usize;
    for i in 0..nr.min(nc) {
        if !w.a[i][i].is_zero() {
            if i != rank {
                w.row_swap(rank, i);
                w.col_swap(rank, i);
            }
            rank += 1;
        }
    }

    // Divisibility chain: whenever d_i does not divide d_j (i < j), splice
    // column j into column i and re-run the gcd cascade at pivot i. All other
    // entries in rows and columns i, j are zero, so every operation stays
    // inside the 2×2 block and turns (d_i, d_j) into (±gcd, ±lcm).
    for i in 0..rank {
        for j in i + 1..rank {
            if (&w.a[j][j] % &w.a[i][i]).is_zero() {
                continue;
            }
            w.col_add(i, j, &Int::one());
            'pair: loop {
                for jj in i + 1..nc {
                    if w.a[i][jj].is_zero() {
                        continue;
                    }
                    let q = div_centered(&w.a[i][jj], &w.a[i][i]);
                    w.col_add(jj, i, &(-q));
                    if !w.a[i][jj].is_zero() {
                        w.col_swap(i, jj);
                        continue 'pair;
                    }
                }
                for ii in i + 1..nr {
                    if w.a[ii][i].is_zero() {
                        continue;
                    }
                    let q = div_centered(&w.a[ii][i], &w.a[i][i]);
                    w.row_add(ii, i, &(-q));
                    if !w.a[ii][i].is_zero() {
                        w.row_swap(i, ii);
                        continue 'pair;
                    }
                }
                break 'pair;
            }
        }
    }

    for i in 0..rank {
        if w.a[i][i].is_negative() {
            w.row_neg(i);
        }
    }

    let invariant_factors = (0..rank).map(|i| w.a[i][i].clone()).collect();
    SmithDecomposition {
        nrows: nr,
        ncols: nc,
        rank,
        invariant_factors,
        u: w.u,
        u_inv: w.u_inv,
        v: w.v,
        v_inv: w.v_inv,
        ops: w.ops,
    }
}

// ---------------------------------------------------------------------------
// Cohomology decomposition (two-stage SNF over Z; ranks over a field)
// ---------------------------------------------------------------------------

/// Ring over which [`cohomology_decomposition`] works.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecompRing {
    Fp(i64),
    Q,
    Z,
}

/// Betti/torsion data of one block `C' --D'--> C --D--> C''`.
#[derive(Clone, Debug)]
pub struct DecompositionResult {
    pub m: usize,
    pub r: usize,
    pub r_prime: usize,
    pub betti: usize,
    /// Torsion coefficients (> 1, divisibility chain); only meaningful when
    /// `torsion_known`.
    pub torsion: Vec<Int>,
    /// True when the integral Smith path ran on genuinely integral matrices.
    pub torsion_known: bool,
    /// Primitive integer cocycle vectors spanning the free part, echelon
    /// ordered; empty unless classes were requested.
    pub basis_classes: Vec<Vec<(u32, Int)>>,
    pub ops: u64,
}

/// Verify `D·D' = 0` over the rationals (sparse product).
pub fn verify_complex(d: &SparseMat<Rat>, d_prime: &SparseMat<Rat>) -> Result<(), Error> {
    if d.ncols() != d_prime.nrows() {
        return Err(Error::Complex(format!(
            "shape mismatch: D is …×{}, D' is {}×…",
            d.ncols(),
            d_prime.nrows()
        )));
    }
    for (i, row) in d.rows().enumerate() {
        let mut acc: BTreeMap<u32, Rat> = BTreeMap::new();
        for (j, c) in row {
            for (jj, cc) in d_prime.row(*j as usize) {
                let e = acc.entry(*jj).or_insert_with(Rat::zero);
                *e += c * cc;
            }
        }
        if acc.values().any(|v| !v.is_zero()) {
            return Err(Error::Complex(format!(
                "D·D' has a nonzero row at index {i}: the differential does not square to zero"
            )));
        }
    }
    Ok(())
}

/// Scale a rational vector to a primitive integer vector (clear denominators,
/// divide by content, first nonzero entry positive).
pub fn primitive_int_vector(v: &[(u32, Rat)]) -> Vec<(u32, Int)> {
    if v.is_empty() {
        return Vec::new();
    }
    let mut lcm = Int::one();
    for (_, x) in v {
        lcm = lcm.lcm(x.denom());
    }
    let mut ints: Vec<(u32, Int)> = v
        .iter()
        .map(|(c, x)| (*c, x.numer() * (&lcm / x.denom())))
        .collect();
    let mut content = Int::zero();
    for (_, x) in &ints {
        content = content.gcd(x);
    }
    if !content.is_one() && !content.is_zero() {
        for (_, x) in &mut ints {
            *x = &*x / &content;
        }
    }
    if ints.first().map(|(_, x)| x.is_negative()).unwrap_or(false) {
        for (_, x) in &mut ints {
            *x = -x.clone();
        }
    }
    ints
}

fn rat_is_integer(x: &Rat) -> bool {
    x.denom().is_one()
}

/// Dense × sparse product `M · S` where `M` is dense `p×q` and `S` sparse
/// `q×n`; returns dense rows.
fn dense_times_sparse(m: &[Vec<Int>], s: &SparseMat<Int>) -> Vec<Vec<Int>> {
    let p = m.len();
    let n = s.ncols();
    let mut out = vec![vec![Int::zero(); n]; p];
    for (k, row) in s.rows().enumerate() {
        for (j, c) in row {
            for i in 0..p {
                if m[i][k].is_zero() {
                    continue;
                }
                let t = &m[i][k] * c;
                out[i][*j as usize] += t;
            }
        }
    }
    out
}

/// The two-stage decomposition of one block.
///
/// Over `Z` (integral matrices): Smith form `S = U·D·V` gives the kernel of
/// `D` as the last `m−r` columns of `V`; `S·(V^{-1}D') = U·D·D' = 0` forces
/// the first `r` rows of `V^{-1}D'` to vanish identically, and the Smith form
/// `S' = Ũ'·D̃'·V'` of the remaining block yields `r'`, the torsion
/// coefficients (invariant factors > 1) and — through the last `m−r−r'`
/// columns of `V·diag(I_r, Ũ'^{-1})` — integral representatives of the free
/// part.
///
/// Over a field: `betti = m − rank(D) − rank(D')`; torsion is empty.
/// Called with `DecompRing::Z` on non-integral matrices, the computation
/// falls back to the rational path and reports `torsion_known = false`.
pub fn cohomology_decomposition(
    d_prime: &SparseMat<Rat>,
    d: &SparseMat<Rat>,
    ring: DecompRing,
    want_classes: bool,
) -> Result<DecompositionResult, Error> {
    verify_complex(d, d_prime)?;
    let m = d.ncols();

    match ring {
        DecompRing::Fp(p) => {
            let field = FpField::new(p)?;
            let dm = mat_mod_p(d, &field)?;
            let dpm = mat_mod_p(d_prime, &field)?;
            let fc = field_cohomology(&field, &dm, &dpm, false);
            Ok(DecompositionResult {
                m,
                r: fc.r,
                r_prime: fc.r_prime,
                betti: fc.betti,
                torsion: Vec::new(),
                torsion_known: false,
                basis_classes: Vec::new(),
                ops: fc.ops,
            })
        }
        DecompRing::Q => {
            let field = RatField;
            let fc = field_cohomology(&field, d, d_prime, want_classes);
            let classes = fc
                .classes
                .iter()
                .map(|v| primitive_int_vector(v))
                .collect();
            Ok(DecompositionResult {
                m,
                r: fc.r,
                r_prime: fc.r_prime,
                betti: fc.betti,
                torsion: Vec::new(),
                torsion_known: false,
                basis_classes: classes,
                ops: fc.ops,
            })
        }
        DecompRing::Z => {
            let integral = d.rows().flatten().all(|(_, x)| rat_is_integer(x))
                && d_prime.rows().flatten().all(|(_, x)| rat_is_integer(x));
            if !integral {
                let mut out = cohomology_decomposition(d_prime, d, DecompRing::Q, want_classes)?;
                out.torsion_known = false;
                return Ok(out);
            }

            let to_int = |mat: &SparseMat<Rat>| -> SparseMat<Int> {
                SparseMat::from_rows(
                    mat.ncols(),
                    mat.rows()
                        .map(|r| r.iter().map(|(c, x)| (*c, x.numer().clone())).collect())
                        .collect(),
                )
            };
            let di = to_int(d);
            let dpi = to_int(d_prime);

            let snf_d = smith_normal_form(&di);
            let r = snf_d.rank;
            let mut ops = snf_d.ops;

            // X = V^{-1}·D'; its first r rows vanish over Z because
            // S·X = U·D·D' = 0 and the first r diagonal entries of S are
            // nonzero.
            let x = dense_times_sparse(&snf_d.v_inv, &dpi);
            for (i, row) in x.iter().enumerate().take(r) {
                if row.iter().any(|v| !v.is_zero()) {
                    return Err(Error::Complex(format!(
                        "reduced coboundary block has a nonzero entry in row {i}; D·D' ≠ 0"
                    )));
                }
            }
            let n = d_prime.ncols();
            let dtp_rows: Vec<Vec<(u32, Int)>> = x[r..]
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|(_, v)| !v.is_zero())
                        .map(|(j, v)| (j as u32, v.clone()))
                        .collect()
                })
                .collect();
            let dtp = SparseMat::from_rows(n, dtp_rows);
            let snf_dp = smith_normal_form(&dtp);
            let r_prime = snf_dp.rank;
            ops += snf_dp.ops;

            let torsion: Vec<Int> = snf_dp
                .invariant_factors
                .iter()
                .filter(|s| !s.is_one())
                .cloned()
                .collect();

            let betti = m - r - r_prime;
            let mut classes = Vec::new();
            if want_classes {
                // Columns r+r'..m of V·diag(I_r, Ũ'^{-1}).
                for j in (r + r_prime)..m {
                    let w_col = j - r;
                    let mut x_vec = vec![Int::zero(); m];
                    for (i, x_i) in x_vec.iter_mut().enumerate() {
                        let mut acc = Int::zero();
                        for k in r..m {
                            if snf_d.v[i][k].is_zero() {
                                continue;
                            }
                            acc += &snf_d.v[i][k] * &snf_dp.u_inv[k - r][w_col];
                        }
                        *x_i = acc;
                    }
                    let sparse: Vec<(u32, Rat)> = x_vec
                        .iter()
                        .enumerate()
                        .filter(|(_, v)| !v.is_zero())
                        .map(|(i, v)| (i as u32, Rat::from_integer(v.clone())))
                        .collect();
                    classes.push(primitive_int_vector(&sparse));
                }
            }

            Ok(DecompositionResult {
                m,
                r,
                r_prime,
                betti,
                torsion,
                torsion_known: true,
                basis_classes: classes,
                ops,
            })
        }
    }
}

// ---------------------------------------------------------------------------
// CRT and rational reconstruction
// ---------------------------------------------------------------------------

/// Symmetric representative of `v` modulo `m` (in `(-m/2, m/2]`).
pub fn symmetric_mod(v: &Int, m: &Int) -> Int {
    let mut r = v.mod_floor(m);
    if &r * 2 > *m {
        r -= m;
    }
    r
}

/// Combine residues by the Chinese remainder theorem; moduli must be
/// pairwise coprime. Returns the symmetric representative and the product
/// modulus.
pub fn crt_combine(residues: &[(Int, Int)]) -> Result<(Int, Int), Error> {
    let mut it = residues.iter();
    let Some((v0, m0)) = it.next() else {
        return Err(Error::Moduli(String::from("no residues supplied")));
    };
    let mut v = v0.clone();
    let mut m = m0.clone();
    for (v2, m2) in it {
        let eg = m.extended_gcd(m2);
        if !eg.gcd.is_one() {
            return Err(Error::Moduli(format!(
                "moduli {m} and {m2} share the factor {}",
                eg.gcd
            )));
        }
        // eg.x · m ≡ 1 (mod m2)
        let diff = v2 - &v;
        let k = (&eg.x * diff).mod_floor(m2);
        v += &m * k;
        m *= m2;
        v = symmetric_mod(&v, &m);
    }
    Ok((symmetric_mod(&v, &m), m))
}

/// Recover `n/d` from `n·d^{-1} mod m` by the half-extended Euclidean
/// algorithm; succeeds exactly when some `|n|, d ≤ √(m/2)` with
/// `gcd(d, m) = 1` matches the residue. `None` signals "need more primes".
pub fn rational_reconstruction(residue: &Int, modulus: &Int) -> Option<Rat> {
    if modulus <= &Int::one() {
        return None;
    }
    let bound = (modulus / Int::from(2)).sqrt();
    let mut r0 = modulus.clone();
    let mut r1 = residue.mod_floor(modulus);
    let mut t0 = Int::zero();
    let mut t1 = Int::one();
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = r1;
        r1 = r2;
        t0 = t1;
        t1 = t2;
    }
    if t1.is_zero() {
        return None;
    }
    let (mut n, mut d) = (r1, t1);
    if d.is_negative() {
        n = -n;
        d = -d;
    }
    if d > bound || n.abs() > bound {
        return None;
    }
    if !n.gcd(&d).is_one() {
        return None;
    }
    if !d.gcd(modulus).is_one() {
        return None;
    }
    Some(Rat::new(n, d))
}

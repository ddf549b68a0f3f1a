//! Splitting of the `(k−1, k, k+1)` slice of the cochain complex in one
//! grade into its direct sum of minimal subcomplexes.
//!
//! The differential never mixes monomials across a minimal subcomplex: the
//! closure of a single starting monomial under image/inverse-image monomial
//! maps is the unique minimal block containing it, and the blocks partition
//! the monomial basis. Ranks can then be computed block by block, which is
//! both cheaper and embarrassingly parallel.
//!
//! The closure procedure is a three-worklist loop: take a pending
//! k-monomial, pull its inverse images into level `k−1` and its images into
//! level `k+1`, then alternately close every new `(k+1)`-monomial back into
//! level `k` (inverse image) and every new `(k−1)`-monomial into level `k`
//! (image), until all worklists drain. Pending monomials are always taken
//! in lexicographic order, so the construction is deterministic.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::algebra::Algebra;
use crate::cochain::{
    boundary, differential, enumerate_monomials, required_window, Cochain, CochainMonomial,
};
use crate::error::Error;
use crate::linalg::SparseMat;
use crate::rng::SplitMix64;
use crate::Rat;

/// Starting-monomial selection strategy for the partition loop.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Lexicographically smallest remaining monomial.
    Bottom,
    /// Lexicographically largest remaining monomial (the default: it tends
    /// to discover the cheap blocks first).
    Top,
    /// Uniform draw from a deterministic seeded generator.
    Random { seed: u64 },
}

impl Default for Strategy {
    fn default() -> Self {
        Strategy::Top
    }
}

/// One minimal subcomplex `C^{k−1}_{g,s} → C^k_{g,s} → C^{k+1}_{g,s}`.
///
/// Bases are sorted lexicographically; `d` and `d_prime` are the raw
/// differential matrices in those bases (rows of `d` are indexed by the
/// `(k+1)`-basis, of `d_prime` by the k-basis; the entry at row `m₊`,
/// column `m` is `⟨∂m₊, m⟩ = ⟨d m, m₊⟩`). The raw matrices are kept —
/// incremental reduction over a field would discard the torsion
/// information the integer pass needs. The order in which the relations
/// arose during closure is retained separately: it depends on the starting
/// monomial and is what makes elimination cost strategy-dependent.
#[derive(Clone, Debug)]
pub struct Subcomplex {
    id: u32,
    k: usize,
    g: i64,
    basis_km1: Vec<CochainMonomial>,
    basis_k: Vec<CochainMonomial>,
    basis_kp1: Vec<CochainMonomial>,
    /// `|M^k| × |M^{k−1}|`, the matrix of `d^{k−1}` restricted to the block.
    d_prime: SparseMat<Rat>,
    /// `|M^{k+1}| × |M^k|`, the matrix of `d^k` restricted to the block.
    d: SparseMat<Rat>,
    /// Row indices of `d_prime` in the order their relations arose.
    d_prime_discovery: Vec<u32>,
    /// Row indices of `d` in the order their relations arose.
    d_discovery: Vec<u32>,
}

impl Subcomplex {
    pub fn id(&self) -> u32 {
        self.id
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn grade(&self) -> i64 {
        self.g
    }

    pub fn basis_km1(&self) -> &[CochainMonomial] {
        &self.basis_km1
    }

    pub fn basis_k(&self) -> &[CochainMonomial] {
        &self.basis_k
    }

    pub fn basis_kp1(&self) -> &[CochainMonomial] {
        &self.basis_kp1
    }

    pub fn d_prime(&self) -> &SparseMat<Rat> {
        &self.d_prime
    }

    pub fn d(&self) -> &SparseMat<Rat> {
        &self.d
    }

    pub fn d_prime_discovery(&self) -> &[u32] {
        &self.d_prime_discovery
    }

    pub fn d_discovery(&self) -> &[u32] {
        &self.d_discovery
    }

    /// Middle dimension `dim C^k_{g,s}`.
    pub fn dim_k(&self) -> usize {
        self.basis_k.len()
    }
}

/// Pick the starting monomial for one subcomplex. Deterministic per call:
/// `Random { seed }` draws from a generator freshly seeded with `seed`, so
/// repeated calls on the same set agree.
pub fn choose_start(
    strategy: Strategy,
    remaining: &BTreeSet<CochainMonomial>,
) -> Result<CochainMonomial, Error> {
    let mut rng = match strategy {
        Strategy::Random { seed } => SplitMix64::new(seed),
        _ => SplitMix64::new(0),
    };
    choose_start_with(strategy, remaining, &mut rng)
}

/// As [`choose_start`], drawing from a caller-owned generator so a partition
/// loop advances through the random stream.
fn choose_start_with(
    strategy: Strategy,
    remaining: &BTreeSet<CochainMonomial>,
    rng: &mut SplitMix64,
) -> Result<CochainMonomial, Error> {
    if remaining.is_empty() {
        return Err(Error::Empty);
    }
    let m = match strategy {
        Strategy::Bottom => remaining.iter().next().unwrap(),
        Strategy::Top => remaining.iter().next_back().unwrap(),
        Strategy::Random { .. } => {
            let n = rng.below(remaining.len());
            remaining.iter().nth(n).unwrap()
        }
    };
    Ok(m.clone())
}

/// Closure work-list direction: which pending monomial a closure step takes
/// next. It follows the strategy that picked the starting monomial, so a
/// `Top` run keeps working from the top end of the monomial order. The
/// computed subcomplex (a unique minimal closure) does not depend on this;
/// the order in which its relations arise — and with it the elimination
/// cost — does.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum WorkOrder {
    Ascending,
    Descending,
}

impl Strategy {
    fn work_order(self) -> WorkOrder {
        match self {
            Strategy::Top => WorkOrder::Descending,
            Strategy::Bottom | Strategy::Random { .. } => WorkOrder::Ascending,
        }
    }
}

/// Closure state for one level of the subcomplex under construction.
struct Level {
    members: BTreeSet<CochainMonomial>,
    pending: BTreeSet<CochainMonomial>,
}

impl Level {
    fn new() -> Level {
        Level {
            members: BTreeSet::new(),
            pending: BTreeSet::new(),
        }
    }

    /// Add a monomial; it becomes pending only when genuinely new.
    fn add(&mut self, m: CochainMonomial) {
        if self.members.insert(m.clone()) {
            self.pending.insert(m);
        }
    }

    /// Extremal pending monomial in the given direction.
    fn take(&mut self, order: WorkOrder) -> Option<CochainMonomial> {
        let m = match order {
            WorkOrder::Ascending => self.pending.iter().next().cloned()?,
            WorkOrder::Descending => self.pending.iter().next_back().cloned()?,
        };
        self.pending.remove(&m);
        Some(m)
    }
}

/// Construct the unique minimal subcomplex containing `start` in the
/// `(k−1, k, k+1)` slice at grade `g`, closing in ascending order.
pub fn construct_subcomplex(
    alg: &Algebra,
    start: &CochainMonomial,
    k: usize,
    g: i64,
) -> Result<Subcomplex, Error> {
    construct_with_order(alg, start, k, g, WorkOrder::Ascending)
}

fn construct_with_order(
    alg: &Algebra,
    start: &CochainMonomial,
    k: usize,
    g: i64,
    order: WorkOrder,
) -> Result<Subcomplex, Error> {
    if start.k() != k || start.grade() != g {
        return Err(Error::Admissibility(alloc::format!(
            "starting monomial has (k, g) = ({}, {}), expected ({k}, {g})",
            start.k(),
            start.grade()
        )));
    }
    // Re-validate against this algebra (also catches foreign indices).
    CochainMonomial::new(alg, start.indices().to_vec(), start.module_index())
        .map_err(|e| Error::Admissibility(alloc::format!("inadmissible starting monomial: {e}")))?;
    check_window(alg, k, g)?;

    let mut lower = Level::new();
    let mut middle = Level::new();
    let mut upper = Level::new();
    middle.add(start.clone());

    // Relations in the order they arise: ∂ of each k-monomial (rows of D′)
    // and of each (k+1)-monomial (rows of D).
    let mut order_k: Vec<CochainMonomial> = Vec::new();
    let mut order_kp1: Vec<CochainMonomial> = Vec::new();

    while let Some(m) = middle.take(order) {
        // Supplement M^{k−1} with the inverse images of m.
        for w in inverse_image_of(alg, &m)? {
            lower.add(w);
        }
        order_k.push(m.clone());
        // Supplement M^{k+1} with the images of m.
        for w in image_of(alg, &m)? {
            upper.add(w);
        }
        // Close every new (k+1)-monomial back into level k.
        while let Some(up) = upper.take(order) {
            for w in inverse_image_of(alg, &up)? {
                middle.add(w);
            }
            order_kp1.push(up);
        }
        // Close every new (k−1)-monomial into level k.
        while let Some(down) = lower.take(order) {
            for w in image_of(alg, &down)? {
                middle.add(w);
            }
        }
    }

    let basis_km1: Vec<CochainMonomial> = lower.members.into_iter().collect();
    let basis_k: Vec<CochainMonomial> = middle.members.into_iter().collect();
    let basis_kp1: Vec<CochainMonomial> = upper.members.into_iter().collect();

    let d_prime = assemble(alg, &basis_k, &basis_km1)?;
    let d = assemble(alg, &basis_kp1, &basis_k)?;
    let d_prime_discovery = discovery_permutation(&basis_k, &order_k);
    let d_discovery = discovery_permutation(&basis_kp1, &order_kp1);

    Ok(Subcomplex {
        id: 0,
        k,
        g,
        basis_km1,
        basis_k,
        basis_kp1,
        d_prime,
        d,
        d_prime_discovery,
        d_discovery,
    })
}

/// Partition the whole `(k−1, k, k+1)` slice at grade `g` into minimal
/// subcomplexes. The middle bases cover `M^k_g` disjointly; ids are
/// discovery ordinals. The resulting set of subcomplexes is independent of
/// the strategy (minimal subcomplexes are unique) — only discovery order
/// and the retained relation orders vary.
pub fn partition_complex(
    alg: &Algebra,
    k: usize,
    g: i64,
    strategy: Strategy,
) -> Result<Vec<Subcomplex>, Error> {
    check_window(alg, k, g)?;
    let mut remaining: BTreeSet<CochainMonomial> =
        enumerate_monomials(alg, k, g)?.into_iter().collect();
    let mut rng = match strategy {
        Strategy::Random { seed } => SplitMix64::new(seed),
        _ => SplitMix64::new(0),
    };
    let mut out = Vec::new();
    while !remaining.is_empty() {
        let start = choose_start_with(strategy, &remaining, &mut rng)?;
        let mut sc = construct_with_order(alg, &start, k, g, strategy.work_order())?;
        sc.id = out.len() as u32;
        for m in &sc.basis_k {
            if !remaining.remove(m) {
                return Err(Error::Complex(alloc::format!(
                    "subcomplexes are not disjoint: {} reached twice",
                    m.display(alg)
                )));
            }
        }
        out.push(sc);
    }
    Ok(out)
}

/// Window precondition for the whole slice: see [`required_window`].
fn check_window(alg: &Algebra, k: usize, g: i64) -> Result<(), Error> {
    if alg.complete() {
        return Ok(());
    }
    let floor = alg.floor().expect("every algebra carries a grade floor");
    if let Some((lo, hi)) = required_window(floor, k, g) {
        if alg.grade_lo() > lo || alg.grade_hi() < hi {
            return Err(Error::Window {
                required_lo: lo,
                required_hi: hi,
                available_lo: alg.grade_lo(),
                available_hi: alg.grade_hi(),
            });
        }
    }
    Ok(())
}

fn inverse_image_of(alg: &Algebra, m: &CochainMonomial) -> Result<Vec<CochainMonomial>, Error> {
    Ok(boundary(alg, m)?.terms().map(|(w, _)| w.clone()).collect())
}

fn image_of(alg: &Algebra, m: &CochainMonomial) -> Result<Vec<CochainMonomial>, Error> {
    Ok(differential(alg, m)?
        .terms()
        .map(|(w, _)| w.clone())
        .collect())
}

/// Matrix of the boundary restricted to the block: rows = `rows` basis
/// (level q), columns = `cols` basis (level q−1); closure guarantees every
/// boundary term lands inside `cols`.
fn assemble(
    alg: &Algebra,
    rows: &[CochainMonomial],
    cols: &[CochainMonomial],
) -> Result<SparseMat<Rat>, Error> {
    let col_of = |m: &CochainMonomial| cols.binary_search(m).ok();
    let mut mat_rows: Vec<Vec<(u32, Rat)>> = Vec::with_capacity(rows.len());
    for m in rows {
        let b: Cochain = boundary(alg, m)?;
        let mut row: Vec<(u32, Rat)> = Vec::with_capacity(b.num_terms());
        for (w, c) in b.terms() {
            match col_of(w) {
                Some(j) => row.push((j as u32, c.clone())),
                None => {
                    return Err(Error::Complex(alloc::format!(
                        "closure violated: ∂{} has support outside the block",
                        m.display(alg)
                    )))
                }
            }
        }
        row.sort_by_key(|e| e.0);
        mat_rows.push(row);
    }
    Ok(SparseMat::from_rows(cols.len(), mat_rows))
}

/// Map the relation-arising order (a permutation of the basis) to sorted
/// row indices.
fn discovery_permutation(basis: &[CochainMonomial], order: &[CochainMonomial]) -> Vec<u32> {
    debug_assert_eq!(basis.len(), order.len());
    order
        .iter()
        .map(|m| basis.binary_search(m).expect("ordered monomial in basis") as u32)
        .collect()
}

//! Cochain spaces `C^k_g` of the Chevalley–Eilenberg complex with trivial
//! coefficients, their super skew-symmetric monomial bases, and the
//! differential together with its image/inverse-image monomial maps.
//!
//! Chains are modeled as the symmetric algebra on the parity-*shifted*
//! algebra: the letter standing for element `e_i` carries parity
//! `P_i = p_i + 1`. Letters of even elements therefore anticommute (no
//! repeats — ordinary exterior behavior), letters of odd elements commute
//! (symmetric powers allowed). A monomial is a non-decreasing index list.
//!
//! The boundary operator on a word `a_{i_1}⋯a_{i_k}` is
//!
//! ```text
//! ∂w = Σ_{r<s} ε(r,s) · (−1)^{p_{i_r}} · Π[e_{i_r}, e_{i_s}] · (w minus r, s)
//! ```
//!
//! where `ε(r,s)` is the Koszul sign of moving letters `r` and `s` to the
//! front (computed with shifted parities) and `(−1)^{p_{i_r}}` is the
//! décalage sign making the two-letter map graded symmetric; the bracket
//! letter is then moved right into sorted position (another Koszul sign;
//! the term dies if it duplicates an anticommuting letter). Since the
//! décalage of a super Lie bracket is graded symmetric and satisfies the
//! transported Jacobi identity, `∂∘∂ = 0` holds by construction; the
//! differential `d` on cochains is the transpose of `∂` in the monomial
//! bases, so `d∘d = 0` as well. Cohomology dimensions do not depend on the
//! sign convention; it is pinned here once so matrices and representatives
//! are reproducible.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::algebra::Algebra;
use crate::error::Error;
use crate::poly::Parity;
use crate::Rat;

/// A super skew-symmetric monomial `c(e_{i_1},…,e_{i_k})` (trivial
/// coefficient module: `module_index` is always 0, the slot exists so the
/// data model extends to nontrivial modules later).
#[derive(Clone, Debug)]
pub struct CochainMonomial {
    indices: Vec<u32>,
    module_index: u32,
    grade: i64,
}

impl PartialEq for CochainMonomial {
    fn eq(&self, other: &Self) -> bool {
        self.indices == other.indices && self.module_index == other.module_index
    }
}

impl Eq for CochainMonomial {}

/// Lexicographic on index sequences (shorter prefixes compare by first
/// difference), then on the module ordinal — the canonical monomial order
/// used for storage and the bottom/top strategies.
impl Ord for CochainMonomial {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.indices
            .cmp(&other.indices)
            .then(self.module_index.cmp(&other.module_index))
    }
}

impl PartialOrd for CochainMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Shifted parity bit of a letter: 1 for even elements (anticommuting
/// letters), 0 for odd elements (commuting letters).
pub(crate) fn shifted_bit(alg: &Algebra, i: u32) -> u32 {
    match alg.elements()[i as usize].parity {
        Parity::Even => 1,
        Parity::Odd => 0,
    }
}

impl CochainMonomial {
    /// Validating constructor: indices must be non-decreasing, in range,
    /// with repeats only at odd elements; only the trivial module exists.
    pub fn new(alg: &Algebra, indices: Vec<u32>, module_index: u32) -> Result<Self, Error> {
        if module_index != 0 {
            return Err(Error::Range(format!(
                "module index {module_index} out of range (trivial module)"
            )));
        }
        let mut grade = 0i64;
        for (t, &i) in indices.iter().enumerate() {
            let e = alg.element(i)?;
            grade += e.grade;
            if t > 0 {
                if indices[t - 1] > i {
                    return Err(Error::Admissibility(format!(
                        "indices not non-decreasing at position {t}"
                    )));
                }
                if indices[t - 1] == i && e.parity == Parity::Even {
                    return Err(Error::Admissibility(format!(
                        "repeated even element {} (its dual anticommutes)",
                        e.label
                    )));
                }
            }
        }
        Ok(CochainMonomial {
            indices,
            module_index,
            grade,
        })
    }

    /// The empty 0-monomial (the unit of `C^0_0`).
    pub fn empty() -> Self {
        CochainMonomial {
            indices: Vec::new(),
            module_index: 0,
            grade: 0,
        }
    }

    fn from_sorted(alg: &Algebra, indices: Vec<u32>) -> Self {
        let grade = indices
            .iter()
            .map(|&i| alg.elements()[i as usize].grade)
            .sum();
        CochainMonomial {
            indices,
            module_index: 0,
            grade,
        }
    }

    pub fn k(&self) -> usize {
        self.indices.len()
    }

    pub fn grade(&self) -> i64 {
        self.grade
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn module_index(&self) -> u32 {
        self.module_index
    }

    /// Stable textual form, e.g. `c(O_1,O_1,E_2)`.
    pub fn display(&self, alg: &Algebra) -> String {
        let mut s = String::from("c(");
        for (t, &i) in self.indices.iter().enumerate() {
            if t > 0 {
                s.push(',');
            }
            s.push_str(alg.label(i));
        }
        s.push(')');
        s
    }
}

/// Grade of a monomial: sum of its factors' element grades (the trivial
/// module contributes grade 0).
pub fn monomial_grade(m: &CochainMonomial) -> i64 {
    m.grade()
}

/// A homogeneous cochain: sparse rational combination of monomials sharing
/// one `(k, g)`. Modular images are taken at the matrix level, so the single
/// coefficient ring here is ℚ (with ℤ-valued combinations as a subset).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cochain {
    k: usize,
    g: i64,
    terms: BTreeMap<CochainMonomial, Rat>,
}

impl Cochain {
    pub fn zero(k: usize, g: i64) -> Cochain {
        Cochain {
            k,
            g,
            terms: BTreeMap::new(),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn grade(&self) -> i64 {
        self.g
    }

    /// Add `c·m`; panics if the monomial's `(k, g)` disagrees (all public
    /// construction paths are homogeneous by design).
    pub fn add_term(&mut self, m: CochainMonomial, c: Rat) {
        assert_eq!(m.k(), self.k, "cochain terms must share one degree");
        assert_eq!(m.grade(), self.g, "cochain terms must share one grade");
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            alloc::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            alloc::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &CochainMonomial) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&CochainMonomial, &Rat)> {
        self.terms.iter()
    }

    pub fn add_assign_scaled(&mut self, other: &Cochain, s: &Rat) {
        assert_eq!((self.k, self.g), (other.k, other.g));
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c * s);
        }
    }

    /// Stable textual form, e.g. `2·c(E_4) - c(O_1,O_7)`.
    pub fn display(&self, alg: &Algebra) -> String {
        if self.terms.is_empty() {
            return String::from("0");
        }
        let mut s = String::new();
        for (t, (m, c)) in self.terms.iter().enumerate() {
            let neg = c < &Rat::zero();
            let abs = if neg { -c.clone() } else { c.clone() };
            if t == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            if !abs.is_one() {
                s.push_str(&format!("{abs}·"));
            }
            s.push_str(&m.display(alg));
        }
        s
    }
}

/// All admissible k-monomials of grade `g` in lexicographic order.
///
/// The algebra window must certify completeness: every factor grade of such
/// a monomial lies in `[floor, g − (k−1)·floor]`, so that range has to be
/// inside the window (unless the algebra is complete). `k·floor > g` makes
/// the space empty regardless of the window.
pub fn enumerate_monomials(
    alg: &Algebra,
    k: usize,
    g: i64,
) -> Result<Vec<CochainMonomial>, Error> {
    if k == 0 {
        return Ok(if g == 0 {
            vec![CochainMonomial::empty()]
        } else {
            Vec::new()
        });
    }
    let floor = alg.floor().expect("every algebra carries a grade floor");
    if (k as i64) * floor > g {
        return Ok(Vec::new());
    }
    let required_lo = floor;
    let required_hi = g - (k as i64 - 1) * floor;
    if !alg.complete() && (alg.grade_lo() > required_lo || alg.grade_hi() < required_hi) {
        return Err(Error::Window {
            required_lo,
            required_hi,
            available_lo: alg.grade_lo(),
            available_hi: alg.grade_hi(),
        });
    }

    let dim = alg.dim() as u32;
    // Suffix grade bounds over indices ≥ t, for feasibility pruning.
    let grades: Vec<i64> = alg.elements().iter().map(|e| e.grade).collect();
    let mut suff_min = vec![i64::MAX; dim as usize + 1];
    let mut suff_max = vec![i64::MIN; dim as usize + 1];
    for t in (0..dim as usize).rev() {
        suff_min[t] = suff_min[t + 1].min(grades[t]);
        suff_max[t] = suff_max[t + 1].max(grades[t]);
    }

    let mut out = Vec::new();
    let mut word: Vec<u32> = Vec::with_capacity(k);
    // DFS in ascending index order emits monomials in lexicographic order.
    fn rec(
        alg: &Algebra,
        grades: &[i64],
        suff_min: &[i64],
        suff_max: &[i64],
        from: u32,
        slots: usize,
        g_left: i64,
        word: &mut Vec<u32>,
        out: &mut Vec<CochainMonomial>,
    ) {
        if slots == 0 {
            if g_left == 0 {
                out.push(CochainMonomial::from_sorted(alg, word.clone()));
            }
            return;
        }
        let n = grades.len() as u32;
        for i in from..n {
            let t = i as usize;
            if suff_min[t] == i64::MAX {
                break; // no elements left
            }
            // Suffix bounds are monotone in t, so infeasibility here means
            // infeasibility for every later start as well.
            let s = slots as i64;
            if s * suff_min[t] > g_left || s * suff_max[t] < g_left {
                break;
            }
            word.push(i);
            let next = if shifted_bit(alg, i) == 1 { i + 1 } else { i };
            rec(
                alg,
                grades,
                suff_min,
                suff_max,
                next,
                slots - 1,
                g_left - grades[t],
                word,
                out,
            );
            word.pop();
        }
    }
    rec(
        alg,
        &grades,
        &suff_min,
        &suff_max,
        0,
        k,
        g,
        &mut word,
        &mut out,
    );
    debug_assert!(out.windows(2).all(|w| w[0] < w[1]));
    Ok(out)
}

/// Grade window an algebra must cover so that the whole `(k−1, k, k+1)`
/// slice of the complex in grade `g` — monomial enumeration at all three
/// levels and every bracket arising inside their boundaries — is certifiably
/// complete: `[floor, max over nonempty levels kk of g − (kk−1)·floor]`.
/// `None` when all three levels are provably empty.
pub fn required_window(floor: i64, k: usize, g: i64) -> Option<(i64, i64)> {
    let mut hi: Option<i64> = None;
    for kk in k.saturating_sub(1)..=(k + 1) {
        if kk == 0 {
            continue; // C^0 needs no elements
        }
        if (kk as i64) * floor > g {
            continue; // level provably empty
        }
        let need = g - (kk as i64 - 1) * floor;
        hi = Some(hi.map_or(need, |h: i64| h.max(need)));
    }
    hi.map(|h| (floor, h))
}

/// Insert the bracket letter `c` (sitting at the front) into the sorted word
/// `u`, returning the sorted result and the Koszul crossing sign; `None`
/// when `c` duplicates an anticommuting letter.
fn insert_letter(alg: &Algebra, u: &[u32], c: u32) -> Option<(Vec<u32>, i32)> {
    let pos = u.iter().position(|&x| x >= c).unwrap_or(u.len());
    let pc = shifted_bit(alg, c);
    if pc == 1 && pos < u.len() && u[pos] == c {
        return None;
    }
    let crossed: u32 = u[..pos].iter().map(|&x| shifted_bit(alg, x)).sum();
    let sign = if pc * crossed % 2 == 1 { -1 } else { 1 };
    let mut w = Vec::with_capacity(u.len() + 1);
    w.extend_from_slice(&u[..pos]);
    w.push(c);
    w.extend_from_slice(&u[pos..]);
    Some((w, sign))
}

/// Boundary `∂m` of a k-monomial as a (k−1)-cochain, with all coefficient
/// cancellations carried out. Propagates a window error when a needed
/// bracket falls outside the algebra window.
pub fn boundary(alg: &Algebra, m: &CochainMonomial) -> Result<Cochain, Error> {
    let idx = m.indices();
    let k = idx.len();
    let mut out = Cochain::zero(k.saturating_sub(1), m.grade());
    if k < 2 {
        return Ok(out);
    }
    let pbits: Vec<u32> = idx.iter().map(|&i| shifted_bit(alg, i)).collect();
    // prefix[t] = P_{i_1} + … + P_{i_t}.
    let mut prefix = vec![0u32; k + 1];
    for t in 0..k {
        prefix[t + 1] = prefix[t] + pbits[t];
    }
    for r in 0..k {
        for s in (r + 1)..k {
            let bracket = alg.bracket(idx[r], idx[s])?;
            if bracket.is_empty() {
                continue;
            }
            let decalage = match alg.elements()[idx[r] as usize].parity {
                Parity::Odd => 1u32,
                Parity::Even => 0u32,
            };
            let kos = pbits[r] * prefix[r] + pbits[s] * (prefix[s] - pbits[r]);
            let pair_sign: i32 = if (decalage + kos) % 2 == 1 { -1 } else { 1 };
            let mut rest = Vec::with_capacity(k - 2);
            for (t, &i) in idx.iter().enumerate() {
                if t != r && t != s {
                    rest.push(i);
                }
            }
            for (c, coeff) in &bracket {
                if let Some((word, ins_sign)) = insert_letter(alg, &rest, *c) {
                    let total = Rat::from_integer(crate::Int::from(pair_sign * ins_sign)) * coeff;
                    out.add_term(CochainMonomial::from_sorted(alg, word), total);
                }
            }
        }
    }
    Ok(out)
}

/// The Chevalley–Eilenberg differential of a monomial, `d = ∂ᵀ`:
/// `⟨d m, m₊⟩ = ⟨m, ∂ m₊⟩` over all candidate (k+1)-monomials `m₊` (formed
/// by replacing one factor `c` of `m` with a bracket pair hitting `c`).
pub fn differential(alg: &Algebra, m: &CochainMonomial) -> Result<Cochain, Error> {
    let mut out = Cochain::zero(m.k() + 1, m.grade());
    let mut seen: BTreeSet<Vec<u32>> = BTreeSet::new();
    let idx = m.indices();
    for (t, &c) in idx.iter().enumerate() {
        if t > 0 && idx[t - 1] == c {
            continue; // same candidates as the previous occurrence
        }
        let mut rest: Vec<u32> = Vec::with_capacity(idx.len() - 1);
        rest.extend_from_slice(&idx[..t]);
        rest.extend_from_slice(&idx[t + 1..]);
        for &(a, b, _) in alg.inverse_pairs(c) {
            let Some((w1, _)) = insert_letter(alg, &rest, a) else {
                continue;
            };
            let Some((word, _)) = insert_letter(alg, &w1, b) else {
                continue;
            };
            if !seen.insert(word.clone()) {
                continue;
            }
            let cand = CochainMonomial::from_sorted(alg, word);
            let coeff = boundary(alg, &cand)?.coeff(m);
            if !coeff.is_zero() {
                out.add_term(cand, coeff);
            }
        }
    }
    Ok(out)
}

/// Linear extension of [`differential`] to cochains.
pub fn differential_cochain(alg: &Algebra, c: &Cochain) -> Result<Cochain, Error> {
    let mut out = Cochain::zero(c.k() + 1, c.grade());
    for (m, coeff) in c.terms() {
        out.add_assign_scaled(&differential(alg, m)?, coeff);
    }
    Ok(out)
}

/// Support of `differential(m)`: the (k+1)-monomials whose boundary
/// contains `m` with a nonzero coefficient (all sign cancellations are
/// accounted for).
pub fn image_monomials(alg: &Algebra, m: &CochainMonomial) -> Result<Vec<CochainMonomial>, Error> {
    Ok(differential(alg, m)?.terms.into_keys().collect())
}

/// Support of `∂m`: the (k−1)-monomials whose differential contains `m`
/// with a nonzero coefficient (`⟨∂m, m′⟩ = ⟨m, d m′⟩` entry for entry).
pub fn inverse_image_monomials(
    alg: &Algebra,
    m: &CochainMonomial,
) -> Result<Vec<CochainMonomial>, Error> {
    Ok(boundary(alg, m)?.terms.into_keys().collect())
}

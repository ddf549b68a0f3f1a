//! The computation engine: modular prefiltering over the subcomplex
//! partition, exact lifts where the prefilter leaves something to compute,
//! cup products, and coboundary solving.
//!
//! The pipeline for one `(k, g)` cell is
//!
//! 1. partition `C^{k-1} → C^k → C^{k+1}` at grade `g` into minimal
//!    subcomplexes ([`crate::subcomplex::partition_complex`]),
//! 2. for each subcomplex, run a cheap rank count over `F_p`
//!    ([`modular_prefilter`]); `dim_p = 0` certifies `dim_Q = 0` (the modular
//!    dimension always dominates the rational one), so the block is closed
//!    without exact arithmetic,
//! 3. for the surviving blocks, compute exactly over `Q` (or over `Z` with
//!    torsion, or by CRT over several primes with verified rational
//!    reconstruction), and
//! 4. aggregate per-block results by discovery ordinal.
//!
//! Every step is deterministic for a fixed [`EngineConfig`]; the `random`
//! strategy is reproducible via its seed. [`analyze_subcomplex`] is a pure
//! function of one block, so callers may fan blocks out across threads and
//! merge by ordinal without changing any result.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::algebra::Algebra;
use crate::cochain::{
    differential_cochain, enumerate_monomials, shifted_bit, Cochain, CochainMonomial,
};
use crate::error::Error;
use crate::linalg::{
    crt_combine, field_cohomology, is_prime_i64, mat_mod_p, primitive_int_vector,
    rational_reconstruction, cohomology_decomposition, DecompRing, Eliminator, FpField, RatField,
    SparseMat,
};
use crate::subcomplex::{partition_complex, Strategy, Subcomplex};
use crate::{Int, Rat};

use alloc::collections::BTreeMap;

/// Default prefilter prime: the Fermat prime 2^16 + 1. Large enough that
/// accidental rank drops are rare, small enough that arithmetic stays in
/// machine words.
pub const DEFAULT_PRIME: i64 = 65_537;

/// Default fallback prime used when the primary prime hits a vanishing
/// denominator.
pub const DEFAULT_FALLBACK_PRIME: i64 = 1_000_003;

/// How the exact (post-prefilter) pass computes cohomology.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExactMode {
    /// Direct elimination over `Q`. The default: desk-scale instances do not
    /// hit the coefficient swell that motivates the modular machinery.
    Rational,
    /// Two-stage Smith decomposition over `Z`: also yields torsion
    /// coefficients and integral representatives.
    IntegerSnf,
    /// Eliminations over each listed prime, CRT-combined and rationally
    /// reconstructed, then *verified* exactly (cocycle + independence
    /// checks); any failure falls back to `Rational`.
    Crt(Vec<i64>),
}

impl Default for ExactMode {
    fn default() -> Self {
        ExactMode::Rational
    }
}

/// Coefficient field of the reported cohomology.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum FieldMode {
    /// Rational cohomology: modular prefilter first, exact lift where needed.
    #[default]
    Q,
    /// Purely modular cohomology over `F_prime` (no exact pass at all).
    Fp,
}

/// Knobs of one engine run. `..Default::default()` gives the documented
/// defaults; call [`EngineConfig::validate`] before use (the entry points do).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EngineConfig {
    pub field: FieldMode,
    /// Prefilter prime (or the working prime in `FieldMode::Fp`); must be an
    /// odd prime below 2^31.
    pub prime: i64,
    /// Second prime tried when `prime` hits a vanishing denominator.
    pub fallback_prime: i64,
    /// Start-monomial strategy for the partition loop.
    pub strategy: Strategy,
    pub exact_mode: ExactMode,
    /// Emit explicit representative cocycles (primitive integer vectors).
    pub emit_representatives: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            field: FieldMode::Q,
            prime: DEFAULT_PRIME,
            fallback_prime: DEFAULT_FALLBACK_PRIME,
            strategy: Strategy::default(),
            exact_mode: ExactMode::default(),
            emit_representatives: false,
        }
    }
}

fn check_odd_prime(p: i64, role: &str) -> Result<(), Error> {
    if p == 2 {
        return Err(Error::Config(format!(
            "{role} must be odd (2 breaks sign bookkeeping in the symmetric range)"
        )));
    }
    if p >= 1 << 31 || !is_prime_i64(p) {
        return Err(Error::Config(format!(
            "{role} must be an odd prime below 2^31, got {p}"
        )));
    }
    Ok(())
}

impl EngineConfig {
    pub fn validate(&self) -> Result<(), Error> {
        check_odd_prime(self.prime, "prime")?;
        check_odd_prime(self.fallback_prime, "fallback prime")?;
        if self.prime == self.fallback_prime {
            return Err(Error::Config(format!(
                "fallback prime must differ from the primary prime {}",
                self.prime
            )));
        }
        if let ExactMode::Crt(primes) = &self.exact_mode {
            if primes.is_empty() {
                return Err(Error::Config(String::from(
                    "crt mode needs a non-empty prime list",
                )));
            }
            for (i, &p) in primes.iter().enumerate() {
                check_odd_prime(p, "crt prime")?;
                if primes[..i].contains(&p) {
                    return Err(Error::Config(format!(
                        "crt primes must be pairwise distinct, {p} repeats"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Outcome of the modular rank count on one subcomplex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrefilterOutcome {
    /// `dim_k − rank φ_p(D) − rank φ_p(D′)`.
    pub dim_fp: usize,
    pub r: usize,
    pub r_prime: usize,
    pub ops: u64,
}

/// Which route produced a block's exact answer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExactPath {
    /// The prefilter certified `dim_Q = 0`; no exact work ran.
    Prefiltered,
    Rational,
    IntegerSnf,
    Crt,
    /// CRT reconstruction or verification failed; the rational path answered.
    CrtFallback,
    /// `FieldMode::Fp`: the modular count *is* the answer.
    ModularOnly,
}

impl core::fmt::Display for ExactPath {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let s = match self {
            ExactPath::Prefiltered => "prefiltered",
            ExactPath::Rational => "rational",
            ExactPath::IntegerSnf => "integer_snf",
            ExactPath::Crt => "crt",
            ExactPath::CrtFallback => "crt_fallback",
            ExactPath::ModularOnly => "modular_only",
        };
        f.write_str(s)
    }
}

/// Everything the engine learned about one subcomplex.
#[derive(Clone, Debug)]
pub struct SubcomplexReport {
    pub id: u32,
    pub dim_km1: usize,
    pub dim_k: usize,
    pub dim_kp1: usize,
    /// Prime whose rank count stands (the fallback when the primary skipped);
    /// `None` when both primes hit vanishing denominators.
    pub prefilter_prime: Option<i64>,
    /// Modular cohomology dimension at `prefilter_prime`.
    pub dim_fp: Option<usize>,
    /// Exact rational dimension. Always present in `FieldMode::Q` (either
    /// computed or certified zero by the prefilter); `None` in modular-only
    /// runs.
    pub dim_q: Option<usize>,
    /// Torsion coefficients (invariant factors > 1); meaningful only when
    /// `torsion_known`.
    pub torsion: Vec<Int>,
    pub torsion_known: bool,
    pub path: ExactPath,
    /// Representative cocycles over the middle basis, primitive integer
    /// coefficients, echelon-reduced against the coboundary space.
    pub representatives: Vec<Cochain>,
    /// Elimination operation count (prefilter + exact work).
    pub ops: u64,
    /// Noteworthy events ("unlucky prime", CRT fallbacks, …).
    pub events: Vec<String>,
}

/// Aggregate statistics of one `(k, g)` cell.
#[derive(Clone, Debug, Default)]
pub struct EngineStats {
    pub subcomplex_count: usize,
    pub max_middle_dim: usize,
    /// Blocks the prefilter closed without exact work.
    pub prefiltered_out: usize,
    /// Blocks that needed an exact computation.
    pub exact_solved: usize,
    pub ops: u64,
    pub events: Vec<String>,
}

/// Cohomology of one `(k, g)` cell, aggregated over the partition in
/// discovery-ordinal order.
#[derive(Clone, Debug)]
pub struct CohomologyResult {
    pub k: usize,
    pub g: i64,
    /// `dim C^k_g` (the middle bases cover it disjointly).
    pub dim_cochain: usize,
    /// `dim H^k_g` over the configured field.
    pub betti: usize,
    /// Concatenated block torsion, sorted; meaningful when `torsion_known`.
    pub torsion: Vec<Int>,
    pub torsion_known: bool,
    pub representatives: Vec<Cochain>,
    pub subcomplexes: Vec<SubcomplexReport>,
    pub stats: EngineStats,
}

/// One cell of a [`betti_table`]: the three box numbers of the survey tables
/// (`dim C^k_g`, subcomplex count, max subcomplex dimension) plus the betti
/// number and torsion.
#[derive(Clone, Debug)]
pub struct BettiCell {
    pub k: usize,
    pub g: i64,
    pub dim_cochain: usize,
    pub subcomplex_count: usize,
    pub max_middle_dim: usize,
    pub betti: usize,
    pub torsion: Vec<Int>,
    pub torsion_known: bool,
}

/// Grid of cells, row-major: `k` ascending, then `g` ascending.
#[derive(Clone, Debug)]
pub struct BettiTable {
    pub k_lo: usize,
    pub k_hi: usize,
    pub g_lo: i64,
    pub g_hi: i64,
    pub cells: Vec<BettiCell>,
}

impl BettiTable {
    pub fn cell(&self, k: usize, g: i64) -> Option<&BettiCell> {
        self.cells.iter().find(|c| c.k == k && c.g == g)
    }
}

// ---------------------------------------------------------------------------
// Modular prefilter
// ---------------------------------------------------------------------------

/// Insert rows in the order their relations arose during closure; the op
/// count (and nothing else) depends on that order, which is what makes
/// start-strategy benchmarks meaningful.
fn rank_in_discovery_order(
    field: &FpField,
    mat: &SparseMat<i64>,
    order: &[u32],
    ops: &mut u64,
) -> usize {
    let mut elim = Eliminator::new(field);
    for &ri in order {
        elim.insert_row(mat.row(ri as usize).to_vec());
    }
    *ops += elim.ops();
    elim.rank()
}

/// Cheap modular rank count: `dim H(F_p)` of the block. By the universal
/// coefficient bound this dominates `dim H(Q)`, so a zero here certifies
/// that the exact pass can be skipped.
///
/// A vanishing denominator surfaces as [`Error::PrimeSkip`]; the caller picks
/// a different prime.
pub fn modular_prefilter(sub: &Subcomplex, p: i64) -> Result<PrefilterOutcome, Error> {
    let field = FpField::new(p)?;
    let d_p = mat_mod_p(sub.d(), &field)?;
    let dp_p = mat_mod_p(sub.d_prime(), &field)?;
    let mut ops = 0u64;
    let r = rank_in_discovery_order(&field, &d_p, sub.d_discovery(), &mut ops);
    let r_prime = rank_in_discovery_order(&field, &dp_p, sub.d_prime_discovery(), &mut ops);
    Ok(PrefilterOutcome {
        dim_fp: sub.dim_k() - r - r_prime,
        r,
        r_prime,
        ops,
    })
}

// ---------------------------------------------------------------------------
// Exact analysis of one subcomplex
// ---------------------------------------------------------------------------

/// Echelon-reduce raw class vectors against the coboundary space (and each
/// other) over `Q`, then normalize to primitive integer vectors. Keeps
/// representatives canonical and diff-stable across exact modes and
/// strategies. Returns `Error::Complex` if a claimed class collapses into
/// the image — that would mean the producing path miscounted.
fn canonical_representatives(
    sub: &Subcomplex,
    raw: Vec<Vec<(u32, Rat)>>,
    ops: &mut u64,
) -> Result<Vec<Vec<(u32, Int)>>, Error> {
    if raw.is_empty() {
        return Ok(Vec::new());
    }
    let field = RatField;
    let mut elim = Eliminator::new(&field);
    for row in sub.d_prime().transpose().rows() {
        elim.insert_row(row.clone());
    }
    let mut out = Vec::with_capacity(raw.len());
    for v in raw {
        let reduced = elim.reduce_relation(v);
        if reduced.is_empty() {
            return Err(Error::Complex(String::from(
                "claimed cohomology class lies in the coboundary space",
            )));
        }
        out.push(primitive_int_vector(&reduced));
        elim.insert_row(reduced);
    }
    *ops += elim.ops();
    Ok(out)
}

fn int_vec_to_rat(v: &[(u32, Int)]) -> Vec<(u32, Rat)> {
    v.iter()
        .map(|(c, x)| (*c, Rat::from_integer(x.clone())))
        .collect()
}

fn vector_to_cochain(sub: &Subcomplex, v: &[(u32, Int)]) -> Cochain {
    let mut c = Cochain::zero(sub.k(), sub.grade());
    for (col, x) in v {
        c.add_term(
            sub.basis_k()[*col as usize].clone(),
            Rat::from_integer(x.clone()),
        );
    }
    c
}

/// `D · v` exactly over `Q`; true iff the product vanishes.
fn is_exact_cocycle(d: &SparseMat<Rat>, v: &[(u32, Rat)]) -> bool {
    let vmap: BTreeMap<u32, &Rat> = v.iter().map(|(c, x)| (*c, x)).collect();
    for row in d.rows() {
        let mut acc = Rat::zero();
        for (j, coeff) in row {
            if let Some(x) = vmap.get(j) {
                acc += coeff * *x;
            }
        }
        if !acc.is_zero() {
            return false;
        }
    }
    true
}

struct ExactOutcome {
    dim_q: usize,
    torsion: Vec<Int>,
    torsion_known: bool,
    raw_classes: Vec<Vec<(u32, Rat)>>,
    path: ExactPath,
    ops: u64,
    events: Vec<String>,
}

fn exact_rational(sub: &Subcomplex, want_classes: bool) -> ExactOutcome {
    let fc = field_cohomology(&RatField, sub.d(), sub.d_prime(), want_classes);
    ExactOutcome {
        dim_q: fc.betti,
        torsion: Vec::new(),
        torsion_known: false,
        raw_classes: fc.classes,
        path: ExactPath::Rational,
        ops: fc.ops,
        events: Vec::new(),
    }
}

fn exact_integer_snf(sub: &Subcomplex, want_classes: bool) -> Result<ExactOutcome, Error> {
    let dec = cohomology_decomposition(sub.d_prime(), sub.d(), DecompRing::Z, want_classes)?;
    Ok(ExactOutcome {
        dim_q: dec.betti,
        torsion: dec.torsion,
        torsion_known: dec.torsion_known,
        raw_classes: dec.basis_classes.iter().map(|v| int_vec_to_rat(v)).collect(),
        path: ExactPath::IntegerSnf,
        ops: dec.ops,
        events: Vec::new(),
    })
}

/// CRT route: eliminate over every configured prime, group primes whose
/// eliminations agree structurally, reconstruct rational representatives from
/// the minimal-dimension group, and *prove* the answer: each reconstructed
/// vector must be an exact cocycle and independent modulo the image, which
/// pins `dim_Q` from below, while the modular dimension pins it from above.
/// Any gap falls back to the rational path.
fn exact_crt(sub: &Subcomplex, primes: &[i64]) -> Result<ExactOutcome, Error> {
    let mut events = Vec::new();
    let mut ops = 0u64;

    // Per-prime eliminations (classes always wanted: they are the CRT input).
    let mut survivors: Vec<(i64, crate::linalg::FieldCohomology<i64>)> = Vec::new();
    for &q in primes {
        let field = FpField::new(q)?;
        let dq = match mat_mod_p(sub.d(), &field) {
            Ok(m) => m,
            Err(Error::PrimeSkip { prime }) => {
                events.push(format!("crt: unlucky prime {prime} skipped"));
                continue;
            }
            Err(e) => return Err(e),
        };
        let dpq = match mat_mod_p(sub.d_prime(), &field) {
            Ok(m) => m,
            Err(Error::PrimeSkip { prime }) => {
                events.push(format!("crt: unlucky prime {prime} skipped"));
                continue;
            }
            Err(e) => return Err(e),
        };
        let fc = field_cohomology(&field, &dq, &dpq, true);
        ops += fc.ops;
        survivors.push((q, fc));
    }
    if survivors.is_empty() {
        events.push(String::from(
            "crt: every prime was unlucky; falling back to rational elimination",
        ));
        let mut out = exact_rational(sub, true);
        out.ops += ops;
        out.events = events;
        out.path = ExactPath::CrtFallback;
        return Ok(out);
    }

    // The true dimension is bounded above by every surviving modular
    // dimension, so only the minimal group can be exact.
    let min_betti = survivors.iter().map(|(_, fc)| fc.betti).min().unwrap();
    if min_betti == 0 {
        return Ok(ExactOutcome {
            dim_q: 0,
            torsion: Vec::new(),
            torsion_known: false,
            raw_classes: Vec::new(),
            path: ExactPath::Crt,
            ops,
            events,
        });
    }
    let group: Vec<&(i64, crate::linalg::FieldCohomology<i64>)> = {
        let sig = survivors
            .iter()
            .filter(|(_, fc)| fc.betti == min_betti)
            .map(|(_, fc)| fc.signature.clone())
            .min()
            .unwrap();
        survivors
            .iter()
            .filter(|(_, fc)| fc.betti == min_betti && fc.signature == sig)
            .collect()
    };

    // Entry-wise CRT + rational reconstruction of each class vector.
    let mut raw: Vec<Vec<(u32, Rat)>> = Vec::with_capacity(min_betti);
    'reconstruct: for slot in 0..min_betti {
        let mut cols: BTreeMap<u32, Vec<(Int, Int)>> = BTreeMap::new();
        for (q, fc) in group.iter() {
            for (col, val) in &fc.classes[slot] {
                cols.entry(*col)
                    .or_default()
                    .push((Int::from(*val), Int::from(*q)));
            }
        }
        let mut vec_q: Vec<(u32, Rat)> = Vec::with_capacity(cols.len());
        for (col, mut residues) in cols {
            // A column missing at some prime is a zero residue there.
            for (q, fc) in group.iter() {
                if fc.classes[slot].binary_search_by_key(&col, |e| e.0).is_err() {
                    residues.push((Int::zero(), Int::from(*q)));
                }
            }
            let (res, modulus) = crt_combine(&residues)?;
            match rational_reconstruction(&res, &modulus) {
                Some(x) => {
                    if !x.is_zero() {
                        vec_q.push((col, x));
                    }
                }
                None => {
                    events.push(format!(
                        "crt: rational reconstruction failed at class {slot}, column {col}; \
                         falling back to rational elimination"
                    ));
                    raw.clear();
                    break 'reconstruct;
                }
            }
        }
        raw.push(vec_q);
    }

    // Verification: cocycle + independence modulo the image. Success proves
    // dim_Q ≥ min_betti; the modular bound proves dim_Q ≤ min_betti.
    let verified = raw.len() == min_betti && {
        let field = RatField;
        let mut elim = Eliminator::new(&field);
        for row in sub.d_prime().transpose().rows() {
            elim.insert_row(row.clone());
        }
        let mut ok = true;
        for v in &raw {
            if !is_exact_cocycle(sub.d(), v) {
                events.push(String::from(
                    "crt: reconstructed vector is not a cocycle; falling back",
                ));
                ok = false;
                break;
            }
            if !elim.insert_row(v.clone()) {
                events.push(String::from(
                    "crt: reconstructed vector is dependent modulo the image; falling back",
                ));
                ok = false;
                break;
            }
        }
        ops += elim.ops();
        ok
    };

    if verified {
        Ok(ExactOutcome {
            dim_q: min_betti,
            torsion: Vec::new(),
            torsion_known: false,
            raw_classes: raw,
            path: ExactPath::Crt,
            ops,
            events,
        })
    } else {
        let mut out = exact_rational(sub, true);
        out.ops += ops;
        out.events = events;
        out.path = ExactPath::CrtFallback;
        Ok(out)
    }
}

/// Analyze one subcomplex under the configured pipeline. Pure in the block
/// and the config, hence safe to run blocks in parallel and merge by ordinal.
pub fn analyze_subcomplex(
    sub: &Subcomplex,
    config: &EngineConfig,
) -> Result<SubcomplexReport, Error> {
    let mut events: Vec<String> = Vec::new();
    let mut ops = 0u64;

    // Modular pass, with the fallback prime behind the primary one.
    let mut prefilter_prime = None;
    let mut dim_fp = None;
    for (attempt, &p) in [config.prime, config.fallback_prime].iter().enumerate() {
        match modular_prefilter(sub, p) {
            Ok(out) => {
                ops += out.ops;
                prefilter_prime = Some(p);
                dim_fp = Some(out.dim_fp);
                break;
            }
            Err(Error::PrimeSkip { prime }) => {
                events.push(if attempt == 0 {
                    format!("unlucky prime {prime}: denominator vanishes; trying fallback")
                } else {
                    format!("unlucky fallback prime {prime}: proceeding unfiltered")
                });
            }
            Err(e) => return Err(e),
        }
    }

    let mut report = SubcomplexReport {
        id: sub.id(),
        dim_km1: sub.basis_km1().len(),
        dim_k: sub.dim_k(),
        dim_kp1: sub.basis_kp1().len(),
        prefilter_prime,
        dim_fp,
        dim_q: None,
        torsion: Vec::new(),
        torsion_known: false,
        path: ExactPath::Prefiltered,
        representatives: Vec::new(),
        ops,
        events,
    };

    if config.field == FieldMode::Fp {
        // Modular-only run: the rank count is the answer, so a skip on both
        // primes is a hard error rather than a silent hole.
        if dim_fp.is_none() {
            return Err(Error::PrimeSkip {
                prime: config.fallback_prime,
            });
        }
        report.path = ExactPath::ModularOnly;
        return Ok(report);
    }

    // dim_Q ≤ dim_Fp = 0 certifies an empty block — but only for the *free*
    // part. The integral mode still runs its decomposition, because torsion
    // at primes other than the prefilter prime is invisible to the rank
    // count. The rational and CRT modes report no torsion anyway.
    if dim_fp == Some(0) && !matches!(config.exact_mode, ExactMode::IntegerSnf) {
        report.dim_q = Some(0);
        return Ok(report);
    }

    let want_classes = config.emit_representatives;
    let outcome = match &config.exact_mode {
        ExactMode::Rational => exact_rational(sub, want_classes),
        ExactMode::IntegerSnf => exact_integer_snf(sub, want_classes)?,
        ExactMode::Crt(primes) => exact_crt(sub, primes)?,
    };
    report.ops += outcome.ops;
    report.events.extend(outcome.events);
    report.dim_q = Some(outcome.dim_q);
    report.torsion = outcome.torsion;
    report.torsion_known = outcome.torsion_known;
    report.path = outcome.path;

    if let (Some(fp), Some(q)) = (report.dim_fp, report.dim_q) {
        if fp < q {
            return Err(Error::Complex(format!(
                "modular dimension {fp} below rational dimension {q} in subcomplex {}: \
                 the universal coefficient bound is violated",
                report.id
            )));
        }
    }

    if want_classes && outcome.dim_q > 0 {
        let canon = canonical_representatives(sub, outcome.raw_classes, &mut report.ops)?;
        report.representatives = canon.iter().map(|v| vector_to_cochain(sub, v)).collect();
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Cell-level computation
// ---------------------------------------------------------------------------

/// Merge per-subcomplex reports (in discovery-ordinal order) into the cell
/// result. Public so parallel drivers can fan [`analyze_subcomplex`] out
/// across threads and still produce the exact sequential result.
pub fn aggregate_reports(
    alg: &Algebra,
    k: usize,
    g: i64,
    reports: Vec<SubcomplexReport>,
) -> Result<CohomologyResult, Error> {
    // The middle bases cover C^k_g disjointly, so dims add up.
    let dim_cochain = enumerate_monomials(alg, k, g)?.len();
    let mut stats = EngineStats {
        subcomplex_count: reports.len(),
        ..EngineStats::default()
    };
    let mut betti = 0usize;
    let mut torsion: Vec<Int> = Vec::new();
    let mut torsion_known = true;
    let mut representatives = Vec::new();
    for r in &reports {
        stats.max_middle_dim = stats.max_middle_dim.max(r.dim_k);
        stats.ops += r.ops;
        stats.events.extend(r.events.iter().cloned());
        match r.path {
            ExactPath::Prefiltered => stats.prefiltered_out += 1,
            ExactPath::ModularOnly => {}
            _ => stats.exact_solved += 1,
        }
        betti += match (r.dim_q, r.dim_fp) {
            (Some(q), _) => q,
            (None, Some(fp)) => fp,
            (None, None) => {
                return Err(Error::Complex(format!(
                    "subcomplex {} carries neither a modular nor an exact dimension",
                    r.id
                )))
            }
        };
        torsion_known &= r.torsion_known;
        torsion.extend(r.torsion.iter().cloned());
        representatives.extend(r.representatives.iter().cloned());
    }
    torsion.sort();
    Ok(CohomologyResult {
        k,
        g,
        dim_cochain,
        betti,
        torsion,
        torsion_known,
        representatives,
        subcomplexes: reports,
        stats,
    })
}

/// Compute `H^k_g` over the configured field.
///
/// Partition, prefilter, exact lift, aggregate — see the module docs. The
/// result is deterministic for a fixed config (including the random
/// strategy's seed), and independent of how callers schedule the per-block
/// work.
pub fn compute_cohomology(
    alg: &Algebra,
    k: usize,
    g: i64,
    config: &EngineConfig,
) -> Result<CohomologyResult, Error> {
    config.validate()?;
    let parts = partition_complex(alg, k, g, config.strategy)?;
    let mut reports = Vec::with_capacity(parts.len());
    for sub in &parts {
        reports.push(analyze_subcomplex(sub, config)?);
    }
    aggregate_reports(alg, k, g, reports)
}

/// Grid of cell summaries over inclusive ranges (the survey-table shape:
/// `dim C^k_g`, subcomplex count, max subcomplex dimension, betti).
/// Representatives are never materialized here.
pub fn betti_table(
    alg: &Algebra,
    k_range: (usize, usize),
    g_range: (i64, i64),
    config: &EngineConfig,
) -> Result<BettiTable, Error> {
    config.validate()?;
    let (k_lo, k_hi) = k_range;
    let (g_lo, g_hi) = g_range;
    let mut cells = Vec::new();
    let cell_config = EngineConfig {
        emit_representatives: false,
        ..config.clone()
    };
    let mut k = k_lo;
    while k <= k_hi {
        let mut g = g_lo;
        while g <= g_hi {
            let r = compute_cohomology(alg, k, g, &cell_config)?;
            cells.push(BettiCell {
                k,
                g,
                dim_cochain: r.dim_cochain,
                subcomplex_count: r.stats.subcomplex_count,
                max_middle_dim: r.stats.max_middle_dim,
                betti: r.betti,
                torsion: r.torsion,
                torsion_known: r.torsion_known,
            });
            g += 1;
        }
        k += 1;
    }
    Ok(BettiTable {
        k_lo,
        k_hi,
        g_lo,
        g_hi,
        cells,
    })
}

// ---------------------------------------------------------------------------
// Cup product
// ---------------------------------------------------------------------------

/// Binomial coefficient as an exact integer.
fn binomial(n: u64, k: u64) -> Int {
    let k = k.min(n - k);
    let mut num = Int::one();
    let mut den = Int::one();
    for i in 0..k {
        num *= Int::from(n - i);
        den *= Int::from(i + 1);
    }
    num / den
}

/// Merge two admissible words into their sorted union. Returns the Koszul
/// sign of the unshuffle (shifted parities) and the positional multiplicity
/// `Π_e C(a_e + b_e, a_e)` over repeated commuting letters, or `None` when an
/// anticommuting letter repeats across the two words (the product dies).
fn merge_words(alg: &Algebra, a: &[u32], b: &[u32]) -> Option<(Vec<u32>, Rat)> {
    // Suffix sums of shifted parity bits of `a`: crossing costs for letters
    // of `b` that land before the tail of `a`.
    let abits: Vec<u32> = a.iter().map(|&i| shifted_bit(alg, i)).collect();
    let mut suffix = vec![0u32; a.len() + 1];
    for t in (0..a.len()).rev() {
        suffix[t] = suffix[t + 1] + abits[t];
    }

    let mut merged = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut sign_exp = 0u32;
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            if a[i] == b[j] && abits[i] == 1 {
                return None; // repeated anticommuting letter
            }
            merged.push(a[i]);
            i += 1;
        } else {
            // b[j] crosses every remaining letter of a.
            sign_exp += shifted_bit(alg, b[j]) * suffix[i];
            merged.push(b[j]);
            j += 1;
        }
    }
    merged.extend_from_slice(&a[i..]);
    merged.extend_from_slice(&b[j..]);

    // Multiplicity: for each commuting letter, choose which copies of the
    // merged power came from `a`.
    let mut factor = Int::one();
    let mut t = 0usize;
    while t < merged.len() {
        let mut run = t + 1;
        while run < merged.len() && merged[run] == merged[t] {
            run += 1;
        }
        let total = (run - t) as u64;
        if total > 1 {
            let from_a = a.iter().filter(|&&x| x == merged[t]).count() as u64;
            factor *= binomial(total, from_a);
        }
        t = run;
    }

    let mut coeff = Rat::from_integer(factor);
    if sign_exp % 2 == 1 {
        coeff = -coeff;
    }
    Some((merged, coeff))
}

/// Super wedge product of cochains. Bilinear; on basis monomials it is the
/// signed sorted merge with the positional multiplicity on repeated
/// commuting letters — exactly the product for which the transposed boundary
/// is a graded derivation (`d(x∧y) = dx∧y + (−1)^{|x|} x∧dy`, `|x|` the total
/// shifted parity of `x`).
pub fn cup_product(alg: &Algebra, c1: &Cochain, c2: &Cochain) -> Result<Cochain, Error> {
    let k = c1.k() + c2.k();
    let g = c1.grade() + c2.grade();
    let mut out = Cochain::zero(k, g);
    for (m1, x1) in c1.terms() {
        for (m2, x2) in c2.terms() {
            if let Some((word, factor)) = merge_words(alg, m1.indices(), m2.indices()) {
                let m = CochainMonomial::new(alg, word, 0)?;
                out.add_term(m, x1 * x2 * &factor);
            }
        }
    }
    Ok(out)
}

/// Total shifted parity of a cochain's monomials; `None` for mixed cochains.
/// The sign in the Leibniz rule is `(−1)` to this power.
pub fn shifted_parity(alg: &Algebra, c: &Cochain) -> Option<u32> {
    let mut parities = c
        .terms()
        .map(|(m, _)| m.indices().iter().map(|&i| shifted_bit(alg, i)).sum::<u32>() % 2);
    let first = parities.next()?;
    if parities.all(|p| p == first) {
        Some(first)
    } else {
        None
    }
}

// ---------------------------------------------------------------------------
// Coboundary solving
// ---------------------------------------------------------------------------

/// Decide whether a cocycle is a coboundary; on success returns the witness
/// `x` with `d(x) = c` (the zero cochain for `c = 0`).
///
/// The solve happens block by block: `c` restricts to each subcomplex of its
/// `(k, g)` cell, and `D′x = c` must be solvable in every block.
pub fn is_coboundary(
    alg: &Algebra,
    c: &Cochain,
    config: &EngineConfig,
) -> Result<Option<Cochain>, Error> {
    let k = c.k();
    let g = c.grade();
    let dc = differential_cochain(alg, c)?;
    if !dc.is_zero() {
        return Err(Error::NotCocycle(format!(
            "d(c) has {} nonzero terms",
            dc.num_terms()
        )));
    }
    let mut witness = Cochain::zero(k.saturating_sub(1), g);
    if c.is_zero() {
        return Ok(Some(witness));
    }
    if k == 0 {
        return Ok(None); // nonzero 0-cochain, no (−1)-cochains to hit it
    }

    let parts = partition_complex(alg, k, g, config.strategy)?;
    let mut remaining: BTreeMap<&CochainMonomial, &Rat> = c.terms().collect();
    let field = RatField;
    for sub in &parts {
        // Restriction of c to this block's middle basis.
        let mut rhs: Vec<(u32, Rat)> = Vec::new();
        for (row, m) in sub.basis_k().iter().enumerate() {
            if let Some(x) = remaining.remove(m) {
                rhs.push((row as u32, x.clone()));
            }
        }
        if rhs.is_empty() {
            continue;
        }
        let mut ops = 0u64;
        match crate::linalg::solve(&field, sub.d_prime(), &rhs, &mut ops) {
            None => return Ok(None),
            Some(x) => {
                for (col, v) in x {
                    witness.add_term(sub.basis_km1()[col as usize].clone(), v);
                }
            }
        }
    }
    if !remaining.is_empty() {
        return Err(Error::Complex(format!(
            "{} cocycle terms fall outside the enumerated cell — inadmissible input",
            remaining.len()
        )));
    }
    Ok(Some(witness))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Algebra, ElementSpec, Family};
    use crate::cochain::{differential, differential_cochain};
    use crate::poly::Parity;
    use alloc::string::ToString;
    use alloc::vec;

    fn q(n: i64) -> Rat {
        Rat::from_integer(Int::from(n))
    }

    fn sle2(hi: i64) -> Algebra {
        Algebra::generate(Family::SLe(2), -2, hi).unwrap()
    }

    fn h2(hi: i64) -> Algebra {
        Algebra::generate(Family::H(2), -1, hi).unwrap()
    }

    fn mono(alg: &Algebra, labels: &[&str]) -> CochainMonomial {
        let idx: Vec<u32> = labels
            .iter()
            .map(|l| alg.by_label(l).expect("label exists"))
            .collect();
        CochainMonomial::new(alg, idx, 0).unwrap()
    }

    fn single(alg: &Algebra, labels: &[&str]) -> Cochain {
        let m = mono(alg, labels);
        let mut c = Cochain::zero(m.k(), m.grade());
        c.add_term(m, q(1));
        c
    }

    /// Three commuting grade-0 elements with one bracket `[a, b] = coeff·c`
    /// (all other brackets zero): the smallest stage for prime-skip plumbing.
    fn toy_with_coeff(coeff: Rat) -> Algebra {
        let specs = vec![
            ElementSpec {
                label: "a".to_string(),
                parity: Parity::Even,
                grade: 0,
            },
            ElementSpec {
                label: "b".to_string(),
                parity: Parity::Even,
                grade: 0,
            },
            ElementSpec {
                label: "c".to_string(),
                parity: Parity::Even,
                grade: 0,
            },
        ];
        let brackets = vec![(0, 1, vec![(2, coeff)])];
        let alg = Algebra::from_structure("toy", 0, 0, true, specs, brackets).unwrap();
        assert_eq!(alg.validate_structure(), Vec::<String>::new());
        alg
    }

    // -- configuration ------------------------------------------------------

    #[test]
    fn config_defaults_and_validation() {
        let c = EngineConfig::default();
        assert_eq!(c.prime, 65_537);
        assert_eq!(c.fallback_prime, 1_000_003);
        assert_eq!(c.field, FieldMode::Q);
        assert_eq!(c.exact_mode, ExactMode::Rational);
        assert!(!c.emit_representatives);
        c.validate().unwrap();

        let bad = |cfg: EngineConfig| matches!(cfg.validate(), Err(Error::Config(_)));
        assert!(bad(EngineConfig {
            prime: 2,
            ..EngineConfig::default()
        }));
        assert!(bad(EngineConfig {
            prime: 15,
            ..EngineConfig::default()
        }));
        assert!(bad(EngineConfig {
            fallback_prime: 65_537,
            ..EngineConfig::default()
        }));
        assert!(bad(EngineConfig {
            exact_mode: ExactMode::Crt(vec![]),
            ..EngineConfig::default()
        }));
        assert!(bad(EngineConfig {
            exact_mode: ExactMode::Crt(vec![3, 5, 3]),
            ..EngineConfig::default()
        }));
        assert!(bad(EngineConfig {
            exact_mode: ExactMode::Crt(vec![3, 9]),
            ..EngineConfig::default()
        }));
        EngineConfig {
            exact_mode: ExactMode::Crt(vec![3, 5, 7]),
            ..EngineConfig::default()
        }
        .validate()
        .unwrap();
    }

    // -- prefilter ----------------------------------------------------------

    #[test]
    fn prefilter_formula_is_strict_at_bad_primes() {
        // The toy block D' = [2], D empty: dim over F_2 is 1, over F_5 (and
        // over Q) it is 0 — the modular count is an upper bound that can
        // genuinely overshoot.
        let d: SparseMat<Rat> = SparseMat::from_rows(1, vec![]);
        let d_prime = SparseMat::from_rows(1, vec![vec![(0u32, q(2))]]);
        let f2 = FpField::new(2).unwrap();
        let f5 = FpField::new(5).unwrap();
        let m2 = mat_mod_p(&d_prime, &f2).unwrap();
        let m5 = mat_mod_p(&d_prime, &f5).unwrap();
        let d2 = mat_mod_p(&d, &f2).unwrap();
        let mut ops = 0u64;
        let betti_2 =
            1 - crate::linalg::rank(&f2, &d2, &mut ops) - crate::linalg::rank(&f2, &m2, &mut ops);
        let betti_5 = 1
            - crate::linalg::rank(&f5, &mat_mod_p(&d, &f5).unwrap(), &mut ops)
            - crate::linalg::rank(&f5, &m5, &mut ops);
        assert_eq!(betti_2, 1);
        assert_eq!(betti_5, 0);
        let fc = field_cohomology(&RatField, &d, &d_prime, false);
        assert_eq!(fc.betti, 0);
    }

    #[test]
    fn alpha_block_prefilters_to_one() {
        // The k=1, g=−2 slice is the single monomial c(O_1) with empty
        // differentials on both sides; the prefilter alone certifies dim 1.
        let alg = sle2(0);
        let parts = partition_complex(&alg, 1, -2, Strategy::Top).unwrap();
        assert_eq!(parts.len(), 1);
        let sub = &parts[0];
        assert_eq!(sub.dim_k(), 1);
        assert_eq!(sub.d().nnz(), 0);
        assert_eq!(sub.d_prime().nnz(), 0);
        let out = modular_prefilter(sub, 65_537).unwrap();
        assert_eq!(
            out,
            PrefilterOutcome {
                dim_fp: 1,
                r: 0,
                r_prime: 0,
                ops: out.ops,
            }
        );
    }

    #[test]
    fn unlucky_prime_falls_back_and_logs() {
        // [a, b] = (1/3)c: the prefilter at p = 3 hits the denominator, the
        // fallback prime finishes the job (and certifies the block empty).
        let alg = toy_with_coeff(Rat::new(Int::from(1), Int::from(3)));
        let config = EngineConfig {
            prime: 3,
            fallback_prime: 5,
            emit_representatives: true,
            ..EngineConfig::default()
        };
        let r = compute_cohomology(&alg, 2, 0, &config).unwrap();
        // C^2 = {ab, ac, bc}; d' kills one dimension (∂(ab) = c/3 ≠ 0 dual).
        assert_eq!(r.dim_cochain, 3);
        assert_eq!(r.betti, 2);
        let skipped: Vec<&SubcomplexReport> = r
            .subcomplexes
            .iter()
            .filter(|s| !s.events.is_empty())
            .collect();
        assert_eq!(skipped.len(), 1, "exactly one block touches 1/3");
        let s = skipped[0];
        assert_eq!(s.prefilter_prime, Some(5));
        assert_eq!(s.dim_fp, Some(0));
        assert_eq!(s.dim_q, Some(0));
        assert_eq!(s.path, ExactPath::Prefiltered);
        assert!(s.events[0].contains("unlucky prime 3"));
        // The cell-level event log carries the block events upward.
        assert!(r.stats.events.iter().any(|e| e.contains("unlucky prime 3")));
    }

    #[test]
    fn both_primes_unlucky_goes_exact_unfiltered() {
        let alg = toy_with_coeff(Rat::new(Int::from(1), Int::from(15)));
        let config = EngineConfig {
            prime: 3,
            fallback_prime: 5,
            ..EngineConfig::default()
        };
        let r = compute_cohomology(&alg, 2, 0, &config).unwrap();
        assert_eq!(r.betti, 2);
        let s = r
            .subcomplexes
            .iter()
            .find(|s| s.events.len() == 2)
            .expect("the 1/15 block logs both skips");
        assert_eq!(s.prefilter_prime, None);
        assert_eq!(s.dim_fp, None);
        assert_eq!(s.dim_q, Some(0));
        assert_eq!(s.path, ExactPath::Rational);
        assert!(s.events[1].contains("unfiltered"));
    }

    #[test]
    fn fp_mode_with_both_primes_unlucky_is_an_error() {
        let alg = toy_with_coeff(Rat::new(Int::from(1), Int::from(15)));
        let config = EngineConfig {
            field: FieldMode::Fp,
            prime: 3,
            fallback_prime: 5,
            ..EngineConfig::default()
        };
        match compute_cohomology(&alg, 2, 0, &config) {
            Err(Error::PrimeSkip { prime: 5 }) => {}
            other => panic!("expected PrimeSkip, got {other:?}"),
        }
    }

    // -- exact cells --------------------------------------------------------

    #[test]
    fn h0_is_the_ground_field() {
        let alg = sle2(2);
        let r = compute_cohomology(&alg, 0, 0, &EngineConfig::default()).unwrap();
        assert_eq!((r.dim_cochain, r.betti), (1, 1));
        let r = compute_cohomology(&alg, 0, -1, &EngineConfig::default()).unwrap();
        assert_eq!((r.dim_cochain, r.betti), (0, 0));
    }

    #[test]
    fn alpha_column_with_representatives() {
        // Table 4 row 0: H^k_{−2k} is one-dimensional for every k; the
        // representative is the k-th power of the bottom letter.
        let alg = sle2(0);
        let config = EngineConfig {
            emit_representatives: true,
            ..EngineConfig::default()
        };
        for k in 1..=3usize {
            let g = -2 * k as i64;
            let r = compute_cohomology(&alg, k, g, &config).unwrap();
            assert_eq!(r.betti, 1, "H^{k}_{g} must be one-dimensional");
            assert_eq!(r.representatives.len(), 1);
            let rep = &r.representatives[0];
            let expect = mono(&alg, &vec!["O_1"; k]);
            assert_eq!(rep.num_terms(), 1);
            assert_eq!(rep.coeff(&expect), q(1));
        }
    }

    #[test]
    fn beta_cell_counts_and_prefilter_soundness() {
        let alg = sle2(4);
        let config = EngineConfig {
            emit_representatives: true,
            ..EngineConfig::default()
        };
        let r = compute_cohomology(&alg, 2, 0, &config).unwrap();
        assert_eq!(r.dim_cochain, 23);
        assert_eq!(r.stats.subcomplex_count, 13);
        assert_eq!(r.stats.max_middle_dim, 4);
        assert_eq!(r.betti, 1, "the β class spans H^2_0");
        assert_eq!(r.representatives.len(), 1);
        // Per-block bookkeeping: rational dims sum to the betti number and
        // never exceed the modular count.
        let mut total = 0usize;
        for s in &r.subcomplexes {
            let dq = s.dim_q.expect("exact dim present in Q mode");
            total += dq;
            if let Some(fp) = s.dim_fp {
                assert!(fp >= dq, "prefilter soundness in block {}", s.id);
            }
        }
        assert_eq!(total, r.betti);
        assert_eq!(
            r.stats.prefiltered_out + r.stats.exact_solved,
            r.stats.subcomplex_count
        );
        // The whole point of the prefilter: most blocks never go exact.
        assert!(r.stats.prefiltered_out >= 10, "{:?}", r.stats);
    }

    #[test]
    fn low_rows_of_the_sle2_table_vanish() {
        let alg = sle2(4);
        let config = EngineConfig::default();
        for (k, g) in [(1usize, -1i64), (2, -3), (1, 0), (2, -2), (2, -1), (3, -4)] {
            let r = compute_cohomology(&alg, k, g, &config).unwrap();
            assert_eq!(r.betti, 0, "H^{k}_{g} should vanish");
        }
    }

    #[test]
    fn hamiltonian_cells_match_the_survey() {
        let alg = h2(2);
        let config = EngineConfig::default();
        let r = compute_cohomology(&alg, 2, -2, &config).unwrap();
        assert_eq!(r.betti, 1);
        let r = compute_cohomology(&alg, 1, 0, &config).unwrap();
        assert_eq!(r.betti, 0);
    }

    #[test]
    fn exact_modes_agree_on_the_beta_cell() {
        let alg = sle2(4);
        let base = EngineConfig {
            emit_representatives: true,
            ..EngineConfig::default()
        };
        let rational = compute_cohomology(&alg, 2, 0, &base).unwrap();

        let snf = compute_cohomology(
            &alg,
            2,
            0,
            &EngineConfig {
                exact_mode: ExactMode::IntegerSnf,
                ..base.clone()
            },
        )
        .unwrap();
        assert_eq!(snf.betti, rational.betti);

        let crt = compute_cohomology(
            &alg,
            2,
            0,
            &EngineConfig {
                exact_mode: ExactMode::Crt(vec![3, 5, 7, 11, 13]),
                ..base.clone()
            },
        )
        .unwrap();
        assert_eq!(crt.betti, rational.betti);
        for s in &crt.subcomplexes {
            assert!(
                matches!(
                    s.path,
                    ExactPath::Prefiltered | ExactPath::Crt | ExactPath::CrtFallback
                ),
                "unexpected path {:?} in crt mode",
                s.path
            );
        }
        // Whatever route produced them, representatives are canonical.
        assert_eq!(rational.representatives.len(), 1);
        assert_eq!(crt.representatives.len(), 1);
        let a = &rational.representatives[0];
        let b = &crt.representatives[0];
        for (m, x) in a.terms() {
            assert_eq!(b.coeff(m), x.clone(), "at {}", m.display(&alg));
        }
        assert_eq!(a.num_terms(), b.num_terms());
    }

    #[test]
    fn fp_mode_reports_modular_dimensions() {
        let alg = sle2(4);
        let config = EngineConfig {
            field: FieldMode::Fp,
            ..EngineConfig::default()
        };
        let modular = compute_cohomology(&alg, 2, 0, &config).unwrap();
        let exact = compute_cohomology(&alg, 2, 0, &EngineConfig::default()).unwrap();
        // At a huge generic prime the modular and rational counts coincide.
        assert_eq!(modular.betti, exact.betti);
        for s in &modular.subcomplexes {
            assert_eq!(s.path, ExactPath::ModularOnly);
            assert!(s.dim_q.is_none());
            assert!(s.dim_fp.is_some());
        }
        let total: usize = modular.subcomplexes.iter().map(|s| s.dim_fp.unwrap()).sum();
        assert_eq!(total, modular.betti);
    }

    #[test]
    fn strategies_and_seeds_are_reproducible() {
        let alg = sle2(4);
        let mut bettis = Vec::new();
        for strategy in [
            Strategy::Bottom,
            Strategy::Top,
            Strategy::Random { seed: 7 },
        ] {
            let config = EngineConfig {
                strategy,
                ..EngineConfig::default()
            };
            let r = compute_cohomology(&alg, 2, 0, &config).unwrap();
            bettis.push(r.betti);
        }
        assert_eq!(bettis, vec![1, 1, 1]);

        let config = EngineConfig {
            strategy: Strategy::Random { seed: 7 },
            ..EngineConfig::default()
        };
        let a = compute_cohomology(&alg, 2, 0, &config).unwrap();
        let b = compute_cohomology(&alg, 2, 0, &config).unwrap();
        let shape = |r: &CohomologyResult| {
            r.subcomplexes
                .iter()
                .map(|s| (s.id, s.dim_k, s.ops))
                .collect::<Vec<_>>()
        };
        assert_eq!(shape(&a), shape(&b), "same seed, same run");
    }

    #[test]
    fn window_errors_propagate() {
        let alg = sle2(1);
        match compute_cohomology(&alg, 2, 0, &EngineConfig::default()) {
            Err(Error::Window { required_hi, .. }) => assert_eq!(required_hi, 4),
            other => panic!("expected a window error, got {other:?}"),
        }
    }

    #[test]
    fn representative_invariants_hold() {
        let alg = sle2(4);
        let config = EngineConfig {
            emit_representatives: true,
            ..EngineConfig::default()
        };
        let r = compute_cohomology(&alg, 2, 0, &config).unwrap();
        for rep in &r.representatives {
            assert!(differential_cochain(&alg, rep).unwrap().is_zero());
            assert!(
                is_coboundary(&alg, rep, &config).unwrap().is_none(),
                "representative must not be exact"
            );
            // Primitive integer vectors: integral coefficients, content 1,
            // positive leading coefficient.
            let mut content = Int::from(0);
            for (_, x) in rep.terms() {
                assert!(x.denom().is_one(), "integral coefficient");
                content = num_integer::Integer::gcd(&content, x.numer());
            }
            assert!(content.is_one());
            assert!(rep.terms().next().unwrap().1 > &Rat::zero());
        }
    }

    // -- betti tables -------------------------------------------------------

    #[test]
    fn betti_table_matches_the_survey_boxes() {
        let alg = sle2(4);
        let table = betti_table(&alg, (1, 2), (-4, 0), &EngineConfig::default()).unwrap();
        assert_eq!(table.cells.len(), 2 * 5);
        let beta = table.cell(2, 0).unwrap();
        assert_eq!(
            (
                beta.dim_cochain,
                beta.subcomplex_count,
                beta.max_middle_dim,
                beta.betti
            ),
            (23, 13, 4, 1)
        );
        let alpha = table.cell(1, -2).unwrap();
        assert_eq!((alpha.dim_cochain, alpha.betti), (1, 1));
        // Anti-diagonal g + 2k = 1 stabilizes at two monomials per cell.
        // (The grid's top-right cell (3, −1) is the window's worst case.)
        let alg_wide = sle2(6);
        let t = betti_table(&alg_wide, (1, 3), (-5, -1), &EngineConfig::default()).unwrap();
        for k in 1..=3usize {
            let g = 1 - 2 * k as i64;
            assert_eq!(t.cell(k, g).unwrap().dim_cochain, 2);
        }
    }

    #[test]
    fn empty_ranges_make_empty_tables() {
        let alg = sle2(2);
        let t = betti_table(&alg, (2, 1), (0, 0), &EngineConfig::default()).unwrap();
        assert!(t.cells.is_empty());
        let t = betti_table(&alg, (1, 1), (1, 0), &EngineConfig::default()).unwrap();
        assert!(t.cells.is_empty());
    }

    // -- cup products -------------------------------------------------------

    #[test]
    fn cup_unit_and_square() {
        let alg = sle2(4);
        let alpha = single(&alg, &["O_1"]);
        let mut unit = Cochain::zero(0, 0);
        unit.add_term(CochainMonomial::empty(), q(1));

        let left = cup_product(&alg, &unit, &alpha).unwrap();
        let right = cup_product(&alg, &alpha, &unit).unwrap();
        assert_eq!(left.coeff(&mono(&alg, &["O_1"])), q(1));
        assert_eq!(right.coeff(&mono(&alg, &["O_1"])), q(1));
        assert_eq!(left.num_terms(), 1);
        assert_eq!(right.num_terms(), 1);

        // α ∧ α: the commuting letter squares with the positional factor 2;
        // as a primitive vector this is exactly the monomial c(O_1,O_1), and
        // it is a nonzero cocycle (not a coboundary).
        let square = cup_product(&alg, &alpha, &alpha).unwrap();
        assert_eq!((square.k(), square.grade()), (2, -4));
        assert_eq!(square.num_terms(), 1);
        let m2 = mono(&alg, &["O_1", "O_1"]);
        assert_eq!(square.coeff(&m2), q(2));
        let prim = primitive_int_vector(&[(0, square.coeff(&m2))]);
        assert_eq!(prim, vec![(0, Int::from(1))]);
        assert!(differential_cochain(&alg, &square).unwrap().is_zero());
        let alg0 = sle2(0);
        assert!(is_coboundary(&alg0, &square, &EngineConfig::default())
            .unwrap()
            .is_none());
    }

    #[test]
    fn cup_is_supercommutative_with_shifted_signs() {
        let alg = sle2(4);
        // E_2, E_3 are even elements: their duals anticommute.
        let e2 = single(&alg, &["E_2"]);
        let e3 = single(&alg, &["E_3"]);
        let ab = cup_product(&alg, &e2, &e3).unwrap();
        let ba = cup_product(&alg, &e3, &e2).unwrap();
        let m = mono(&alg, &["E_2", "E_3"]);
        assert_eq!(ab.coeff(&m), q(1));
        assert_eq!(ba.coeff(&m), q(-1));
        let sq = cup_product(&alg, &e2, &e2).unwrap();
        assert!(sq.is_zero());
        // Mixed: a commuting letter crosses an anticommuting one freely.
        let o1 = single(&alg, &["O_1"]);
        let oe = cup_product(&alg, &o1, &e2).unwrap();
        let eo = cup_product(&alg, &e2, &o1).unwrap();
        let m = mono(&alg, &["O_1", "E_2"]);
        assert_eq!(oe.coeff(&m), q(1));
        assert_eq!(eo.coeff(&m), q(1));
    }

    #[test]
    fn cup_satisfies_the_graded_leibniz_rule() {
        // d(x∧y) = dx∧y + (−1)^{|x|} x∧dy with |x| the total shifted parity.
        // Checked exactly on every monomial pair drawn from small cells,
        // including pairs with repeated commuting letters (where the
        // positional multiplicity in the product is what makes this hold).
        let alg = sle2(4);
        let mut cells: Vec<CochainMonomial> = Vec::new();
        for (k, g) in [
            (1usize, -2i64),
            (1, -1),
            (1, 0),
            (1, 1),
            (2, -4),
            (2, -3),
            (2, -2),
            (2, 0),
            (2, 2),
        ] {
            cells.extend(enumerate_monomials(&alg, k, g).unwrap());
        }
        let mut checked = 0usize;
        let mut repeated_nontrivial = 0usize;
        for m1 in &cells {
            for m2 in &cells {
                if m1.k() + m2.k() > 3 {
                    continue;
                }
                let c1 = {
                    let mut c = Cochain::zero(m1.k(), m1.grade());
                    c.add_term(m1.clone(), q(1));
                    c
                };
                let c2 = {
                    let mut c = Cochain::zero(m2.k(), m2.grade());
                    c.add_term(m2.clone(), q(1));
                    c
                };
                let product = cup_product(&alg, &c1, &c2).unwrap();
                let lhs = match differential_cochain(&alg, &product) {
                    Ok(v) => v,
                    Err(Error::Window { .. }) => continue,
                    Err(e) => panic!("{e}"),
                };
                let d1 = match differential_cochain(&alg, &c1) {
                    Ok(v) => v,
                    Err(Error::Window { .. }) => continue,
                    Err(e) => panic!("{e}"),
                };
                let d2 = match differential_cochain(&alg, &c2) {
                    Ok(v) => v,
                    Err(Error::Window { .. }) => continue,
                    Err(e) => panic!("{e}"),
                };
                let sign = shifted_parity(&alg, &c1).unwrap();
                let mut rhs = cup_product(&alg, &d1, &c2).unwrap();
                let xdy = cup_product(&alg, &c1, &d2).unwrap();
                let s = if sign % 2 == 0 { q(1) } else { q(-1) };
                rhs.add_assign_scaled(&xdy, &s);
                assert_eq!(
                    (lhs.is_zero(), lhs.num_terms()),
                    (rhs.is_zero(), rhs.num_terms()),
                    "Leibniz shape for {} ∧ {}",
                    m1.display(&alg),
                    m2.display(&alg)
                );
                for (m, x) in lhs.terms() {
                    assert_eq!(
                        rhs.coeff(m),
                        x.clone(),
                        "Leibniz at {} for {} ∧ {}",
                        m.display(&alg),
                        m1.display(&alg),
                        m2.display(&alg)
                    );
                }
                checked += 1;
                let has_repeat = |m: &CochainMonomial| {
                    m.indices().windows(2).any(|w| w[0] == w[1])
                        || (m1.indices().iter().any(|i| m2.indices().contains(i))
                            && m1
                                .indices()
                                .iter()
                                .chain(m2.indices())
                                .any(|&i| shifted_bit(&alg, i) == 0))
                };
                if has_repeat(&product.terms().next().map(|(m, _)| m.clone()).unwrap_or_else(
                    CochainMonomial::empty,
                )) && !lhs.is_zero()
                {
                    repeated_nontrivial += 1;
                }
            }
        }
        assert!(checked >= 200, "only {checked} pairs checked");
        assert!(
            repeated_nontrivial >= 1,
            "no pair exercised the repeated-letter multiplicity"
        );
    }

    // -- coboundary solving -------------------------------------------------

    #[test]
    fn coboundary_examples() {
        let alg = sle2(4);
        let config = EngineConfig::default();

        // The zero cochain is a coboundary with the zero witness.
        let zero = Cochain::zero(2, 0);
        let w = is_coboundary(&alg, &zero, &config).unwrap().unwrap();
        assert!(w.is_zero());

        // α generates H^1_{−2}: a cocycle but not a coboundary.
        let alg0 = sle2(0);
        let alpha = single(&alg0, &["O_1"]);
        assert!(is_coboundary(&alg0, &alpha, &config).unwrap().is_none());

        // An honest coboundary: d of a 1-cochain, solved back to a witness.
        let e4 = single(&alg, &["E_4"]);
        let de4 = differential_cochain(&alg, &e4).unwrap();
        assert!(!de4.is_zero(), "d c(E_4) must be nonzero");
        let witness = is_coboundary(&alg, &de4, &config)
            .unwrap()
            .expect("an exact cochain is a coboundary");
        let check = differential_cochain(&alg, &witness).unwrap();
        assert_eq!(check.num_terms(), de4.num_terms());
        for (m, x) in de4.terms() {
            assert_eq!(check.coeff(m), x.clone());
        }

        // Non-cocycles are rejected.
        match is_coboundary(&alg, &e4, &config) {
            Err(Error::NotCocycle(_)) => {}
            other => panic!("expected NotCocycle, got {other:?}"),
        }
    }

    #[test]
    fn beta_times_alpha_is_a_coboundary() {
        // The first ring relation: [β][α] = 0 although both factors are
        // nonzero classes.
        let alg = sle2(4);
        let config = EngineConfig {
            emit_representatives: true,
            ..EngineConfig::default()
        };
        let beta = compute_cohomology(&alg, 2, 0, &config)
            .unwrap()
            .representatives
            .remove(0);
        let alpha = single(&alg, &["O_1"]);
        assert!(is_coboundary(&alg, &beta, &config).unwrap().is_none());
        let ba = cup_product(&alg, &beta, &alpha).unwrap();
        assert_eq!((ba.k(), ba.grade()), (3, -2));
        assert!(differential_cochain(&alg, &ba).unwrap().is_zero());
        assert!(
            is_coboundary(&alg, &ba, &config).unwrap().is_some(),
            "βα must die in cohomology"
        );
    }
}

//! Release acceptance suite: nine go/no-go criteria, one test per criterion.
//!
//! Every test ends by printing exactly one `ACCEPTANCE n: PASS (…)` line
//! (visible with `cargo test -- --nocapture`); a failing criterion panics
//! with an `ACCEPTANCE n: FAIL …` message instead. Criteria with wall-clock
//! budgets hold a shared lock so the timing is measured without contention
//! from sibling tests; the remaining criteria take the same lock to keep the
//! budgeted ones honest.

use std::collections::BTreeMap;
use std::str::FromStr;
use std::sync::Mutex;
use std::time::Instant;

use num_traits::{Signed, Zero};
use supercohom_cli::bench;
use supercohom_cli::manifest::{BenchArgs, FieldArg, StrategyArg};
use supercohom_core::algebra::{Algebra, Family};
use supercohom_core::cochain::{
    boundary, differential, differential_cochain, enumerate_monomials, required_window,
    CochainMonomial,
};
use supercohom_core::engine::{
    compute_cohomology, cup_product, is_coboundary, EngineConfig, FieldMode,
};
use supercohom_core::linalg::{
    crt_combine, field_cohomology, is_prime_i64, mat_mod_p, phi_p_rat, rational_reconstruction,
    smith_normal_form, FpField, RatField, SmithDecomposition, SparseMat,
};
use supercohom_core::rng::SplitMix64;
use supercohom_core::subcomplex::{partition_complex, Strategy};
use supercohom_core::{Int, Rat};

static GATE: Mutex<()> = Mutex::new(());

fn gate() -> std::sync::MutexGuard<'static, ()> {
    GATE.lock().unwrap_or_else(|e| e.into_inner())
}

fn family(name: &str) -> Family {
    Family::from_str(name).expect("built-in family")
}

fn generate(name: &str, hi: i64) -> Algebra {
    let fam = family(name);
    let lo = fam.floor().expect("built-in families have a grade floor");
    Algebra::generate(fam, lo, hi).expect("algebra generation")
}

fn q_cfg() -> EngineConfig {
    EngineConfig::default()
}

fn q_reps() -> EngineConfig {
    EngineConfig {
        emit_representatives: true,
        ..EngineConfig::default()
    }
}

fn fp_cfg(p: i64) -> EngineConfig {
    EngineConfig {
        field: FieldMode::Fp,
        prime: p,
        ..EngineConfig::default()
    }
}

fn betti(alg: &Algebra, k: usize, g: i64, config: &EngineConfig) -> usize {
    compute_cohomology(alg, k, g, config)
        .unwrap_or_else(|e| panic!("cohomology at (k={k}, g={g}) failed: {e}"))
        .betti
}

// ---------------------------------------------------------------------------
// 1. Structural shape of the SLe(2) complex
// ---------------------------------------------------------------------------

#[test]
fn acceptance_1_sle2_structural_boxes() {
    let _g = gate();
    let t0 = Instant::now();

    let alg = generate("SLe2", 4);

    let dim = |k: usize, g: i64| enumerate_monomials(&alg, k, g).unwrap().len();
    assert_eq!(
        dim(1, -2),
        1,
        "ACCEPTANCE 1: FAIL — dim C^1_-2(SLe(2)) must be 1"
    );
    assert_eq!(
        dim(1, 1),
        6,
        "ACCEPTANCE 1: FAIL — dim C^1_1(SLe(2)) must be 6"
    );
    for k in 1..=5usize {
        let g = 1 - 2 * k as i64;
        let alg_k = generate("SLe2", required_window(-2, k, g).unwrap().1.max(-2));
        assert_eq!(
            enumerate_monomials(&alg_k, k, g).unwrap().len(),
            2,
            "ACCEPTANCE 1: FAIL — dim C^{k}_{g}(SLe(2)) must be 2"
        );
    }

    let r = compute_cohomology(&alg, 2, 0, &q_cfg()).unwrap();
    assert_eq!(
        (r.dim_cochain, r.stats.subcomplex_count, r.stats.max_middle_dim),
        (23, 13, 4),
        "ACCEPTANCE 1: FAIL — the (k=2, g=0) box of SLe(2) must split as 23/13/4"
    );

    let r = compute_cohomology(&alg, 3, -3, &q_cfg()).unwrap();
    assert_eq!(
        (r.dim_cochain, r.stats.subcomplex_count, r.stats.max_middle_dim),
        (12, 8, 3),
        "ACCEPTANCE 1: FAIL — the (k=3, g=-3) box of SLe(2) must split as 12/8/3"
    );

    let secs = t0.elapsed().as_secs_f64();
    assert!(
        secs < 5.0,
        "ACCEPTANCE 1: FAIL — structural checks exceeded the 5 s budget ({secs:.2} s)"
    );
    println!("ACCEPTANCE 1: PASS (SLe(2) cochain boxes 23/13/4 and 12/8/3, edge dims verified in {secs:.2} s)");
}

// ---------------------------------------------------------------------------
// 2. Rational cohomology of SLe(2)
// ---------------------------------------------------------------------------

#[test]
fn acceptance_2_sle2_rational_cohomology() {
    let _g = gate();
    let t0 = Instant::now();

    let alg = generate("SLe2", 4);

    // H^1_-2 is one-dimensional, generated by the ghost of the lowest element.
    let r = compute_cohomology(&alg, 1, -2, &q_reps()).unwrap();
    assert_eq!(r.betti, 1, "ACCEPTANCE 2: FAIL — dim H^1_-2(SLe(2)) must be 1");
    assert_eq!(r.representatives.len(), 1, "ACCEPTANCE 2: FAIL — expected one representative");
    let alpha = &r.representatives[0];
    assert_eq!(
        alpha.num_terms(),
        1,
        "ACCEPTANCE 2: FAIL — the H^1_-2 generator must be a single monomial"
    );
    let (mono, coeff) = alpha.terms().next().unwrap();
    assert!(
        !coeff.is_zero() && mono.indices() == [0] && mono.display(&alg) == "c(O_1)",
        "ACCEPTANCE 2: FAIL — the H^1_-2 generator must be proportional to c(O_1), got {}",
        alpha.display(&alg)
    );

    // One-dimensional boxes along g = -2k, and the survey's marked (2, 0) box.
    for k in 2..=4usize {
        let g = -2 * (k as i64);
        assert_eq!(
            betti(&alg, k, g, &q_cfg()),
            1,
            "ACCEPTANCE 2: FAIL — dim H^{k}_{g}(SLe(2)) must be 1"
        );
    }
    assert_eq!(
        betti(&alg, 2, 0, &q_cfg()),
        1,
        "ACCEPTANCE 2: FAIL — dim H^2_0(SLe(2)) must be 1"
    );

    // The three diagonals g + 2k ∈ {1, 2, 3} carry no cohomology at all.
    for (k, g) in [
        (1usize, -1i64),
        (2, -3),
        (3, -5),
        (1, 0),
        (2, -2),
        (3, -4),
        (1, 1),
        (2, -1),
        (3, -3),
    ] {
        assert_eq!(
            betti(&alg, k, g, &q_cfg()),
            0,
            "ACCEPTANCE 2: FAIL — dim H^{k}_{g}(SLe(2)) must vanish"
        );
    }

    let secs = t0.elapsed().as_secs_f64();
    assert!(
        secs < 60.0,
        "ACCEPTANCE 2: FAIL — rational SLe(2) checks exceeded the 60 s budget ({secs:.2} s)"
    );
    println!("ACCEPTANCE 2: PASS (SLe(2) betti numbers over Q, generator c(O_1), nine vanishing boxes in {secs:.2} s)");
}

// ---------------------------------------------------------------------------
// 3. Rational cohomology of H(2)
// ---------------------------------------------------------------------------

#[test]
fn acceptance_3_h2_rational_cohomology() {
    let _g = gate();
    let t0 = Instant::now();

    let alg = generate("H2", 7);
    for (k, g, want) in [(2usize, -2i64, 1usize), (5, -2, 1), (7, 0, 1), (1, 0, 0)] {
        let got = betti(&alg, k, g, &q_cfg());
        assert_eq!(
            got, want,
            "ACCEPTANCE 3: FAIL — dim H^{k}_{g}(H(2)) over Q: got {got}, want {want}"
        );
    }

    let secs = t0.elapsed().as_secs_f64();
    assert!(
        secs < 60.0,
        "ACCEPTANCE 3: FAIL — rational H(2) checks exceeded the 60 s budget ({secs:.2} s)"
    );
    println!("ACCEPTANCE 3: PASS (H(2) betti numbers at (2,-2), (5,-2), (7,0), (1,0) over Q in {secs:.2} s)");
}

// ---------------------------------------------------------------------------
// 4. Modular cohomology of H(2): small-prime deviations, F_17 agreement
// ---------------------------------------------------------------------------

#[test]
fn acceptance_4_h2_modular_vs_rational() {
    let _g = gate();
    let t0 = Instant::now();

    let alg = generate("H2", 5);

    for (p, k, g, want) in [(3i64, 2usize, -1i64, 2usize), (3, 3, 0, 1), (5, 2, 1, 2)] {
        let r = compute_cohomology(&alg, k, g, &fp_cfg(p)).unwrap();
        assert_eq!(
            r.betti, want,
            "ACCEPTANCE 4: FAIL — dim H^{k}_{g}(H(2); F_{p}): got {}, want {want}",
            r.betti
        );
        // The whole point is the *requested* prime: every block must have
        // been counted at p itself, not at the fallback.
        for sub in &r.subcomplexes {
            assert_eq!(
                sub.prefilter_prime,
                Some(p),
                "ACCEPTANCE 4: FAIL — block {} of (k={k}, g={g}) was not counted at F_{p}",
                sub.id
            );
        }
    }

    // F_17 sees no torsion in this window: it must agree with Q cell by cell.
    let mut checked = 0usize;
    for k in 1..=4usize {
        for g in -2i64..=1 {
            let over_q = betti(&alg, k, g, &q_cfg());
            let over_f17 = betti(&alg, k, g, &fp_cfg(17));
            assert_eq!(
                over_f17, over_q,
                "ACCEPTANCE 4: FAIL — F_17 disagrees with Q at (k={k}, g={g}): {over_f17} vs {over_q}"
            );
            checked += 1;
        }
    }

    let secs = t0.elapsed().as_secs_f64();
    assert!(
        secs < 120.0,
        "ACCEPTANCE 4: FAIL — modular H(2) checks exceeded the 120 s budget ({secs:.2} s)"
    );
    println!("ACCEPTANCE 4: PASS (F_3/F_5 torsion cells of H(2), F_17 == Q on {checked} cells in {secs:.2} s)");
}

// ---------------------------------------------------------------------------
// Randomized three-term complexes with D·D' = 0 by construction
// ---------------------------------------------------------------------------

/// One random block `C' --D'--> C --D--> C''` over Z with known diagonal core:
/// `D' = U·D0'·V` and `D = W·D0·U^{-1}` for unimodular `U`, `V`, `W`, where
/// `D0'`/`D0` hit disjoint coordinates of the middle space, so `D·D' = 0`
/// exactly and all ranks (over Q and over any F_p) are read off the diagonals.
struct RandomComplex {
    d: SparseMat<Rat>,       // b × m
    d_prime: SparseMat<Rat>, // m × a
    m: usize,
    diag_d: Vec<i64>,
    diag_dp: Vec<i64>,
}

fn to_sparse(dense: &[Vec<i128>], ncols: usize) -> SparseMat<Rat> {
    let rows = dense
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .filter(|(_, v)| **v != 0)
                .map(|(j, v)| (j as u32, Rat::from_integer(Int::from(*v))))
                .collect()
        })
        .collect();
    SparseMat::from_rows(ncols, rows)
}

fn random_complex(rng: &mut SplitMix64) -> RandomComplex {
    const POOL: [i64; 14] = [1, 2, 3, 4, 5, 6, 7, 10, 14, 21, 30, 35, 65537, 196611];
    let m = 1 + rng.below(6);
    let a = rng.below(7);
    let b = rng.below(7);
    let r_prime = rng.below(a.min(m) + 1);
    let r = rng.below((m - r_prime).min(b) + 1);
    let diag_dp: Vec<i64> = (0..r_prime).map(|_| POOL[rng.below(POOL.len())]).collect();
    let diag_d: Vec<i64> = (0..r).map(|_| POOL[rng.below(POOL.len())]).collect();

    // Diagonal cores on disjoint middle coordinates (front r', back r).
    let mut dp = vec![vec![0i128; a]; m];
    for (i, &s) in diag_dp.iter().enumerate() {
        dp[i][i] = s as i128;
    }
    let mut dd = vec![vec![0i128; m]; b];
    for (j, &s) in diag_d.iter().enumerate() {
        dd[j][m - 1 - j] = s as i128;
    }

    // Shared unimodular U: row operations on D', the inverse column
    // operations on D, applied in lockstep so D·D' stays zero.
    if m >= 2 {
        for _ in 0..(2 + rng.below(7)) {
            let i = rng.below(m);
            let mut j = rng.below(m);
            while j == i {
                j = rng.below(m);
            }
            let c = rng.below(7) as i128 - 3;
            if c == 0 {
                continue;
            }
            for col in 0..a {
                let v = c * dp[j][col];
                dp[i][col] += v;
            }
            for row in dd.iter_mut() {
                let v = c * row[i];
                row[j] -= v;
            }
        }
    }
    // Independent V (columns of D') and W (rows of D).
    if a >= 2 {
        for _ in 0..(1 + rng.below(6)) {
            let i = rng.below(a);
            let mut j = rng.below(a);
            while j == i {
                j = rng.below(a);
            }
            let c = rng.below(7) as i128 - 3;
            for row in dp.iter_mut() {
                let v = c * row[i];
                row[j] += v;
            }
        }
    }
    if b >= 2 {
        for _ in 0..(1 + rng.below(6)) {
            let i = rng.below(b);
            let mut j = rng.below(b);
            while j == i {
                j = rng.below(b);
            }
            let c = rng.below(7) as i128 - 3;
            let src = dd[j].clone();
            for (t, v) in src.iter().enumerate() {
                dd[i][t] += c * v;
            }
        }
    }

    // The construction must be exact — verify D·D' = 0 densely.
    for row in 0..b {
        for col in 0..a {
            let mut s = 0i128;
            for t in 0..m {
                s += dd[row][t] * dp[t][col];
            }
            assert_eq!(s, 0, "generator bug: D·D' has a nonzero entry");
        }
    }

    RandomComplex {
        d: to_sparse(&dd, m),
        d_prime: to_sparse(&dp, a),
        m,
        diag_d,
        diag_dp,
    }
}

const TEST_PRIMES: [i64; 5] = [2, 3, 5, 7, 65537];

// ---------------------------------------------------------------------------
// 5. Modular dimensions bound rational dimensions
// ---------------------------------------------------------------------------

#[test]
fn acceptance_5_modular_dimension_bounds() {
    let _g = gate();

    let fields: Vec<FpField> = TEST_PRIMES
        .iter()
        .map(|&p| FpField::new(p).unwrap())
        .collect();
    let mut rng = SplitMix64::new(0xACCE5);
    let mut strict = 0usize;
    const N: usize = 200;
    for _ in 0..N {
        let rc = random_complex(&mut rng);
        let over_q = field_cohomology(&RatField, &rc.d, &rc.d_prime, false).betti;
        let expect_q = rc.m - rc.diag_d.len() - rc.diag_dp.len();
        assert_eq!(
            over_q, expect_q,
            "ACCEPTANCE 5: FAIL — rational betti {over_q} disagrees with the constructed value {expect_q}"
        );
        for f in &fields {
            let p = f.p();
            let d_p = mat_mod_p(&rc.d, f).unwrap();
            let dp_p = mat_mod_p(&rc.d_prime, f).unwrap();
            let over_p = field_cohomology(f, &d_p, &dp_p, false).betti;
            assert!(
                over_p >= over_q,
                "ACCEPTANCE 5: FAIL — dim H(F_{p}) = {over_p} < dim H(Q) = {over_q}"
            );
            let expect_p = rc.m
                - rc.diag_d.iter().filter(|s| *s % p != 0).count()
                - rc.diag_dp.iter().filter(|s| *s % p != 0).count();
            assert_eq!(
                over_p, expect_p,
                "ACCEPTANCE 5: FAIL — dim H(F_{p}) = {over_p} disagrees with the constructed value {expect_p}"
            );
            if over_p > over_q {
                strict += 1;
            }
        }
    }

    // Constructed torsion witness: D' = [p] has H(F_p) = F_p but H(Q) = 0,
    // so the bound is strict for every test prime.
    for f in &fields {
        let p = f.p();
        let d_prime = SparseMat::from_rows(1, vec![vec![(0u32, Rat::from_integer(Int::from(p)))]]);
        let d = SparseMat::<Rat>::from_rows(1, Vec::new());
        let over_q = field_cohomology(&RatField, &d, &d_prime, false).betti;
        let over_p = field_cohomology(
            f,
            &mat_mod_p(&d, f).unwrap(),
            &mat_mod_p(&d_prime, f).unwrap(),
            false,
        )
        .betti;
        assert!(
            over_q == 0 && over_p == 1,
            "ACCEPTANCE 5: FAIL — D' = [{p}] must give dim H(Q) = 0 < dim H(F_{p}) = 1, got {over_q} and {over_p}"
        );
    }

    println!(
        "ACCEPTANCE 5: PASS (dim H(F_p) >= dim H(Q) on {N} random complexes × {} primes, {strict} strict, witnesses strict at every prime)",
        TEST_PRIMES.len()
    );
}

// ---------------------------------------------------------------------------
// 6. Universal coefficients: the modular excess counts p-torsion
// ---------------------------------------------------------------------------

/// Brute-force dense Smith normal form used as an oracle: elementary row and
/// column operations with a minimal-|pivot| rule, no transform tracking.
fn oracle_snf(mut a: Vec<Vec<Int>>) -> Vec<Int> {
    let nr = a.len();
    let nc = a.first().map_or(0, Vec::len);
    let lim = nr.min(nc);
    let mut t = 0usize;
    'outer: while t < lim {
        let mut piv: Option<(usize, usize)> = None;
        for i in t..nr {
            for j in t..nc {
                if !a[i][j].is_zero()
                    && piv
                        .map_or(true, |(pi, pj)| a[i][j].abs() < a[pi][pj].abs())
                {
                    piv = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = piv else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        let mut dirty = false;
        for i in t + 1..nr {
            if !a[i][t].is_zero() {
                let q = &a[i][t] / &a[t][t];
                if !q.is_zero() {
                    for j in t..nc {
                        let v = &q * &a[t][j];
                        a[i][j] -= v;
                    }
                }
                if !a[i][t].is_zero() {
                    dirty = true;
                }
            }
        }
        for j in t + 1..nc {
            if !a[t][j].is_zero() {
                let q = &a[t][j] / &a[t][t];
                if !q.is_zero() {
                    for i in t..nr {
                        let v = &q * &a[i][t];
                        a[i][j] -= v;
                    }
                }
                if !a[t][j].is_zero() {
                    dirty = true;
                }
            }
        }
        if dirty {
            continue 'outer; // smaller residues appeared; re-pick the pivot
        }
        for i in t + 1..nr {
            for j in t + 1..nc {
                if !(&a[i][j] % &a[t][t]).is_zero() {
                    // Fold row i into row t so the pivot must shrink.
                    let src = a[i].clone();
                    for (jj, v) in src.into_iter().enumerate().skip(t) {
                        a[t][jj] += v;
                    }
                    continue 'outer;
                }
            }
        }
        t += 1;
    }
    (0..t).map(|i| a[i][i].abs()).collect()
}

fn dense_int(mat: &SparseMat<Rat>) -> Vec<Vec<Int>> {
    let mut out = vec![vec![Int::zero(); mat.ncols()]; mat.nrows()];
    for (i, row) in mat.rows().enumerate() {
        for (c, v) in row {
            assert!(v.is_integer(), "matrix entry {v} is not integral");
            out[i][*c as usize] = v.numer().clone();
        }
    }
    out
}

fn count_divisible(factors: &[Int], p: i64) -> usize {
    let p = Int::from(p);
    factors.iter().filter(|f| (*f % &p).is_zero()).count()
}

#[test]
fn acceptance_6_universal_coefficients() {
    let _g = gate();

    let mut rng = SplitMix64::new(0xC0EF);
    const N: usize = 80;
    let mut torsion_cases = 0usize;
    for _ in 0..N {
        let rc = random_complex(&mut rng);
        let over_q = field_cohomology(&RatField, &rc.d, &rc.d_prime, false).betti;
        let snf_dp = oracle_snf(dense_int(&rc.d_prime));
        let snf_d = oracle_snf(dense_int(&rc.d));
        for &p in &TEST_PRIMES {
            let f = FpField::new(p).unwrap();
            let over_p = field_cohomology(
                &f,
                &mat_mod_p(&rc.d, &f).unwrap(),
                &mat_mod_p(&rc.d_prime, &f).unwrap(),
                false,
            )
            .betti;
            // Universal coefficients: the modular excess is exactly the
            // number of p-divisible invariant factors of D' (torsion in this
            // degree) plus those of D (torsion one degree up).
            let torsion = count_divisible(&snf_dp, p) + count_divisible(&snf_d, p);
            assert_eq!(
                over_p - over_q,
                torsion,
                "ACCEPTANCE 6: FAIL — excess dim H(F_{p}) - dim H(Q) = {} but the SNF oracle counts {torsion} p-torsion factors",
                over_p - over_q
            );
            if torsion > 0 {
                torsion_cases += 1;
            }
        }
    }
    assert!(
        torsion_cases > 0,
        "ACCEPTANCE 6: FAIL — the random suite never produced torsion; the check is vacuous"
    );
    println!(
        "ACCEPTANCE 6: PASS (modular excess == oracle p-torsion count on {N} complexes × {} primes, {torsion_cases} torsion cases)",
        TEST_PRIMES.len()
    );
}

// ---------------------------------------------------------------------------
// 7. Kernel properties: d∘d = 0, Smith postconditions, CRT round-trips
// ---------------------------------------------------------------------------

fn matmul(a: &[Vec<Int>], b: &[Vec<Int>]) -> Vec<Vec<Int>> {
    let n = a.len();
    let inner = b.len();
    let m = b.first().map_or(0, Vec::len);
    let mut out = vec![vec![Int::zero(); m]; n];
    for i in 0..n {
        assert_eq!(a[i].len(), inner, "matmul shape mismatch");
        for t in 0..inner {
            if a[i][t].is_zero() {
                continue;
            }
            for j in 0..m {
                if !b[t][j].is_zero() {
                    let v = &a[i][t] * &b[t][j];
                    out[i][j] += v;
                }
            }
        }
    }
    out
}

fn check_snf_postconditions(mat: &SparseMat<Int>, s: &SmithDecomposition) {
    assert_eq!(s.rank, s.invariant_factors.len(), "rank vs factor count");
    // U·A·V is the padded diagonal of the invariant factors.
    let uav = matmul(&matmul(&s.u, &dense_int_mat(mat)), &s.v);
    for (i, row) in uav.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let want = if i == j && i < s.rank {
                s.invariant_factors[i].clone()
            } else {
                Int::zero()
            };
            assert_eq!(
                *v, want,
                "ACCEPTANCE 7: FAIL — (U·A·V)[{i}][{j}] = {v}, want {want}"
            );
        }
    }
    // Unimodularity via explicit integer inverses.
    for (m1, m2, n, label) in [
        (&s.u, &s.u_inv, s.nrows, "U"),
        (&s.v, &s.v_inv, s.ncols, "V"),
    ] {
        let prod = matmul(m1, m2);
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { Int::from(1) } else { Int::zero() };
                assert_eq!(
                    prod[i][j], want,
                    "ACCEPTANCE 7: FAIL — {label}·{label}^-1 is not the identity at [{i}][{j}]"
                );
            }
        }
    }
    // Divisibility chain, positive factors.
    for w in s.invariant_factors.windows(2) {
        assert!(
            (&w[1] % &w[0]).is_zero(),
            "ACCEPTANCE 7: FAIL — invariant factors {} ∤ {}",
            w[0],
            w[1]
        );
    }
    assert!(
        s.invariant_factors.iter().all(|f| f.is_positive()),
        "ACCEPTANCE 7: FAIL — invariant factors must be positive"
    );
}

fn dense_int_mat(mat: &SparseMat<Int>) -> Vec<Vec<Int>> {
    let mut out = vec![vec![Int::zero(); mat.ncols()]; mat.nrows()];
    for (i, row) in mat.rows().enumerate() {
        for (c, v) in row {
            out[i][*c as usize] = v.clone();
        }
    }
    out
}

fn random_int_mat(rng: &mut SplitMix64, nr: usize, nc: usize, density_pct: usize) -> SparseMat<Int> {
    let mut rows = Vec::with_capacity(nr);
    for _ in 0..nr {
        let mut row = Vec::new();
        for j in 0..nc {
            if rng.below(100) < density_pct {
                let mag = 1 + rng.below(9) as i64;
                let v = if rng.below(2) == 0 { mag } else { -mag };
                row.push((j as u32, Int::from(v)));
            }
        }
        rows.push(row);
    }
    SparseMat::from_rows(nc, rows)
}

#[test]
fn acceptance_7_kernel_properties() {
    let _g = gate();

    // (a) d∘d = 0 on 1000 random monomials for each built-in family.
    let mut dd_checked = Vec::new();
    for (name, hi) in [("SLe2", 9i64), ("H2", 8), ("Le2", 8), ("B2", 8)] {
        let fam = family(name);
        let floor = fam.floor().unwrap();
        let alg = Algebra::generate(fam, floor, hi).unwrap();
        let mut pool: Vec<CochainMonomial> = Vec::new();
        for k in 1..=4usize {
            // d∘d reaches level k+2, so the whole (k, k+1, k+2) slice of the
            // grade must fit inside the generated window.
            for g in (floor * k as i64)..=(hi + floor * k as i64) {
                match required_window(floor, k + 1, g) {
                    Some((_, need)) if need <= hi => {}
                    _ => continue,
                }
                pool.extend(enumerate_monomials(&alg, k, g).unwrap());
            }
        }
        assert!(
            pool.len() >= 300,
            "ACCEPTANCE 7: FAIL — monomial pool for {name} too small ({})",
            pool.len()
        );
        let mut rng = SplitMix64::new(0xD0D0 + hi as u64);
        for _ in 0..1000 {
            let m = &pool[rng.below(pool.len())];
            let dm = differential(&alg, m).unwrap();
            let ddm = differential_cochain(&alg, &dm).unwrap();
            assert!(
                ddm.is_zero(),
                "ACCEPTANCE 7: FAIL — d∘d != 0 at {} (k={}, g={}) of {name}",
                m.display(&alg),
                m.k(),
                m.grade()
            );
        }
        dd_checked.push(format!("{name} (pool {})", pool.len()));
    }

    // (b) Smith normal form postconditions on random matrices up to 40×40,
    // invariant factors cross-checked against the dense oracle.
    let edges: Vec<SparseMat<Int>> = vec![
        SparseMat::zero(3, 4),
        SparseMat::from_rows(
            4,
            (0..4).map(|i| vec![(i as u32, Int::from(1))]).collect(),
        ),
        SparseMat::from_rows(
            2,
            vec![
                vec![(0, Int::from(2)), (1, Int::from(4))],
                vec![(0, Int::from(6)), (1, Int::from(8))],
            ],
        ),
        SparseMat::from_rows(
            2,
            vec![vec![(0, Int::from(2))], vec![(1, Int::from(3))]],
        ),
        SparseMat::from_rows(
            3,
            vec![vec![
                (0, Int::from(6)),
                (1, Int::from(10)),
                (2, Int::from(15)),
            ]],
        ),
        SparseMat::from_rows(1, vec![vec![(0, Int::from(4))], vec![(0, Int::from(6))]]),
    ];
    let mut rng = SplitMix64::new(0x5EED);
    let mut mats = edges;
    for i in 0..24 {
        let (nr, nc, dens) = if i < 14 {
            (1 + rng.below(8), 1 + rng.below(8), 55)
        } else {
            (10 + rng.below(31), 10 + rng.below(31), 12)
        };
        mats.push(random_int_mat(&mut rng, nr, nc, dens));
    }
    let mut max_dim = 0usize;
    for mat in &mats {
        let s = smith_normal_form(mat);
        check_snf_postconditions(mat, &s);
        let want = oracle_snf(dense_int_mat(mat));
        assert_eq!(
            s.invariant_factors, want,
            "ACCEPTANCE 7: FAIL — invariant factors disagree with the dense oracle on a {}×{} matrix",
            mat.nrows(),
            mat.ncols()
        );
        max_dim = max_dim.max(mat.nrows()).max(mat.ncols());
    }

    // (c) CRT + rational reconstruction round-trips.
    let crt_primes: [i64; 5] = [65521, 65519, 65497, 65479, 65449];
    for &p in &crt_primes {
        assert!(is_prime_i64(p), "test modulus {p} is not prime");
    }
    let fields: Vec<FpField> = crt_primes.iter().map(|&p| FpField::new(p).unwrap()).collect();
    let mut rng = SplitMix64::new(0xC47);
    let mut done = 0usize;
    let bound = 1i64 << 30;
    while done < 10_000 {
        let num = (rng.next_u64() % (2 * bound as u64 + 1)) as i64 - bound;
        let den = 1 + (rng.next_u64() % bound as u64) as i64;
        if crt_primes.iter().any(|&p| den % p == 0) {
            continue;
        }
        let x = Rat::new(Int::from(num), Int::from(den));
        let residues: Vec<(Int, Int)> = fields
            .iter()
            .map(|f| (Int::from(phi_p_rat(&x, f).unwrap()), Int::from(f.p())))
            .collect();
        let (v, m) = crt_combine(&residues).unwrap();
        let back = rational_reconstruction(&v, &m).unwrap_or_else(|| {
            panic!("ACCEPTANCE 7: FAIL — reconstruction failed for {x} (residue {v} mod {m})")
        });
        assert_eq!(
            back, x,
            "ACCEPTANCE 7: FAIL — CRT round-trip returned {back}, want {x}"
        );
        done += 1;
    }

    println!(
        "ACCEPTANCE 7: PASS (d∘d = 0 on 1000 monomials each for {}; Smith postconditions + oracle on {} matrices up to {max_dim}×{max_dim}; 10000 CRT round-trips)",
        dd_checked.join(", "),
        mats.len()
    );
}

// ---------------------------------------------------------------------------
// 8. The partition pipeline agrees with unsplit elimination
// ---------------------------------------------------------------------------

/// Full (unsplit) differential of one grade slice: rows are the boundaries of
/// the level-`k` monomials expressed over the level-`k-1` basis.
fn full_matrix(alg: &Algebra, level: &[CochainMonomial], below: &[CochainMonomial]) -> SparseMat<Rat> {
    let index: BTreeMap<&CochainMonomial, u32> = below
        .iter()
        .enumerate()
        .map(|(i, m)| (m, i as u32))
        .collect();
    let rows = level
        .iter()
        .map(|m| {
            let b = boundary(alg, m).unwrap();
            let mut row: Vec<(u32, Rat)> = b
                .terms()
                .map(|(mono, coeff)| {
                    let col = *index
                        .get(mono)
                        .unwrap_or_else(|| panic!("boundary term {} missing from the basis", mono.display(alg)));
                    (col, coeff.clone())
                })
                .collect();
            row.sort_unstable_by_key(|(c, _)| *c);
            row
        })
        .collect();
    SparseMat::from_rows(below.len(), rows)
}

#[test]
fn acceptance_8_partition_matches_unsplit() {
    let _g = gate();
    let t0 = Instant::now();

    let mut checked = 0usize;
    let mut skipped_large = 0usize;
    let mut max_dim = 0usize;
    for (name, hi) in [("SLe2", 8i64), ("H2", 8)] {
        let fam = family(name);
        let floor = fam.floor().unwrap();
        let alg = Algebra::generate(fam, floor, hi).unwrap();
        for k in 1..=6usize {
            for g in (floor * k as i64)..=(hi + floor * k as i64) {
                match required_window(floor, k, g) {
                    Some((_, need)) if need <= hi => {}
                    _ => continue,
                }
                let middle = enumerate_monomials(&alg, k, g).unwrap();
                if middle.is_empty() {
                    continue;
                }
                if middle.len() > 300 {
                    skipped_large += 1;
                    continue;
                }
                max_dim = max_dim.max(middle.len());

                // Unsplit ground truth: eliminate the full matrices directly.
                let below = enumerate_monomials(&alg, k - 1, g).unwrap();
                let above = enumerate_monomials(&alg, k + 1, g).unwrap();
                let d_prime_full = full_matrix(&alg, &middle, &below);
                let d_full = full_matrix(&alg, &above, &middle);
                let unsplit = field_cohomology(&RatField, &d_full, &d_prime_full, false).betti;

                let piped = compute_cohomology(&alg, k, g, &q_cfg()).unwrap();
                assert_eq!(
                    piped.betti, unsplit,
                    "ACCEPTANCE 8: FAIL — split {} vs unsplit {unsplit} at {name} (k={k}, g={g})",
                    piped.betti
                );

                // The minimal subcomplexes cover the middle level disjointly.
                let parts = partition_complex(&alg, k, g, Strategy::Top).unwrap();
                let mut cover: Vec<&CochainMonomial> =
                    parts.iter().flat_map(|s| s.basis_k().iter()).collect();
                assert_eq!(
                    cover.len(),
                    middle.len(),
                    "ACCEPTANCE 8: FAIL — cover size mismatch at {name} (k={k}, g={g})"
                );
                cover.sort();
                cover.dedup();
                assert_eq!(
                    cover.len(),
                    middle.len(),
                    "ACCEPTANCE 8: FAIL — overlapping subcomplex bases at {name} (k={k}, g={g})"
                );

                // The answer is independent of the splitting strategy.
                for strat in [Strategy::Bottom, Strategy::Random { seed: 12345 }] {
                    let cfg = EngineConfig {
                        strategy: strat,
                        ..EngineConfig::default()
                    };
                    let r2 = compute_cohomology(&alg, k, g, &cfg).unwrap();
                    assert_eq!(
                        (r2.betti, r2.dim_cochain, r2.torsion_known, r2.torsion.clone()),
                        (
                            piped.betti,
                            piped.dim_cochain,
                            piped.torsion_known,
                            piped.torsion.clone()
                        ),
                        "ACCEPTANCE 8: FAIL — strategy {strat:?} changed the result at {name} (k={k}, g={g})"
                    );
                }
                checked += 1;
            }
        }
    }
    assert!(
        checked >= 40,
        "ACCEPTANCE 8: FAIL — the scan only covered {checked} cells; widen the window"
    );

    let secs = t0.elapsed().as_secs_f64();
    println!(
        "ACCEPTANCE 8: PASS ({checked} cells of SLe(2)/H(2) up to dim {max_dim}: split == unsplit, disjoint covers, 3 strategies agree; {skipped_large} larger cells out of scope; {secs:.1} s)"
    );
}

// ---------------------------------------------------------------------------
// 9. Ring structure and the strategy cost asymmetry
// ---------------------------------------------------------------------------

#[test]
fn acceptance_9_ring_structure_and_strategy_cost() {
    let _g = gate();

    // Cup products over SLe(2). One window covers every cell involved.
    let alg = generate("SLe2", 4);
    let r1 = compute_cohomology(&alg, 1, -2, &q_reps()).unwrap();
    assert_eq!(r1.betti, 1, "ACCEPTANCE 9: FAIL — dim H^1_-2 must be 1");
    let alpha = r1.representatives[0].clone();

    let mut power = alpha.clone();
    for k in 2..=4usize {
        power = cup_product(&alg, &power, &alpha).unwrap();
        assert!(
            !power.is_zero(),
            "ACCEPTANCE 9: FAIL — α^{k} vanished as a cochain"
        );
        let witness = is_coboundary(&alg, &power, &q_cfg()).unwrap();
        assert!(
            witness.is_none(),
            "ACCEPTANCE 9: FAIL — α^{k} is a coboundary; the class [α]^{k} must be nonzero"
        );
    }

    let r2 = compute_cohomology(&alg, 2, 0, &q_reps()).unwrap();
    assert_eq!(r2.betti, 1, "ACCEPTANCE 9: FAIL — dim H^2_0 must be 1");
    let beta = r2.representatives[0].clone();
    let beta_alpha = cup_product(&alg, &beta, &alpha).unwrap();
    let witness = is_coboundary(&alg, &beta_alpha, &q_cfg())
        .unwrap()
        .unwrap_or_else(|| {
            panic!("ACCEPTANCE 9: FAIL — β·α must be a coboundary (H^3_-2 carries no class for it)")
        });
    let check = differential_cochain(&alg, &witness).unwrap();
    assert_eq!(
        check, beta_alpha,
        "ACCEPTANCE 9: FAIL — the returned witness does not satisfy d(w) = β·α"
    );

    // Strategy cost comparison on a survey-scale modular instance. Only the
    // *relative* cost is asserted (median bottom >= median top, and the
    // deterministic elimination operation counts must agree in direction);
    // absolute times depend on the host.
    let t0 = Instant::now();
    let args = BenchArgs {
        algebra: String::from("SLe2"),
        k: 6,
        g: 1,
        field: FieldArg::Fp,
        reps: 5,
        strategies: vec![StrategyArg::Bottom, StrategyArg::Top],
        primes: vec![17],
        seed: 0,
        out: None,
    };
    let report = bench::run_bench(&args).unwrap();
    let secs = t0.elapsed().as_secs_f64();
    assert!(
        secs < 120.0,
        "ACCEPTANCE 9: FAIL — the benchmark instance exceeded the 120 s budget ({secs:.1} s)"
    );
    let row = |s: StrategyArg| {
        report
            .rows
            .iter()
            .find(|r| r.strategy == s)
            .unwrap_or_else(|| panic!("missing bench row for {s:?}"))
    };
    let bottom = row(StrategyArg::Bottom);
    let top = row(StrategyArg::Top);
    assert_eq!(
        bottom.betti, top.betti,
        "ACCEPTANCE 9: FAIL — strategies disagree on the benched betti number"
    );
    assert!(
        bottom.ops > top.ops,
        "ACCEPTANCE 9: FAIL — elimination work must favor the top strategy: bottom {} ops <= top {} ops",
        bottom.ops,
        top.ops
    );
    assert!(
        bottom.median_ms >= top.median_ms,
        "ACCEPTANCE 9: FAIL — median wall time: bottom {:.0} ms < top {:.0} ms",
        bottom.median_ms,
        top.median_ms
    );

    // The benched slice has the survey dimensions around (k=6, g=1).
    let big = generate("SLe2", 13);
    for (k, want) in [(5usize, 3528usize), (6, 12162), (7, 39796)] {
        let got = enumerate_monomials(&big, k, 1).unwrap().len();
        assert_eq!(
            got, want,
            "ACCEPTANCE 9: FAIL — dim C^{k}_1(SLe(2)) = {got}, want {want}"
        );
    }

    println!(
        "ACCEPTANCE 9: PASS (α^2..α^4 nonzero classes, β·α exact coboundary; bottom/top medians {:.0}/{:.0} ms, ops {}/{}, bench {secs:.1} s)",
        bottom.median_ms, top.median_ms, bottom.ops, top.ops
    );
}

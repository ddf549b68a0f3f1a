//! The JSON result document: a stable, versioned record of one compute run.
//!
//! Field order is fixed by declaration order below and never depends on the
//! input. Identical manifests produce byte-identical documents — nothing
//! time- or machine-dependent (wall times, host names, thread counts beyond
//! the requested `jobs`) is recorded.

use serde::Serialize;
use supercohom_core::algebra::Algebra;
use supercohom_core::cochain::Cochain;
use supercohom_core::engine::{CohomologyResult, SubcomplexReport};

use crate::driver::ComputeOutput;
use crate::manifest::RunManifest;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
pub struct ResultDoc {
    pub schema_version: u32,
    pub generator: String,
    pub manifest: RunManifest,
    pub algebra: AlgebraSummary,
    pub cells: Vec<CellDoc>,
}

#[derive(Serialize)]
pub struct AlgebraSummary {
    pub name: String,
    pub dim: usize,
    /// Basis elements of each parity (not model variable counts).
    pub elements_even: usize,
    pub elements_odd: usize,
    pub grade_range: [i64; 2],
    pub complete: bool,
}

#[derive(Serialize)]
pub struct CellDoc {
    pub k: usize,
    pub g: i64,
    pub dim_cochain: usize,
    pub betti: usize,
    pub torsion: Vec<String>,
    pub torsion_known: bool,
    pub representatives: Vec<RepDoc>,
    pub subcomplexes: Vec<SubcomplexDoc>,
    pub stats: StatsDoc,
}

#[derive(Serialize)]
pub struct SubcomplexDoc {
    pub id: u32,
    pub dim_km1: usize,
    pub dim_k: usize,
    pub dim_kp1: usize,
    pub prefilter_prime: Option<i64>,
    pub dim_fp: Option<usize>,
    pub dim_q: Option<usize>,
    pub torsion: Vec<String>,
    pub torsion_known: bool,
    pub path: String,
    pub representatives: Vec<RepDoc>,
    pub ops: u64,
    pub events: Vec<String>,
}

#[derive(Serialize)]
pub struct StatsDoc {
    pub subcomplex_count: usize,
    pub max_middle_dim: usize,
    pub prefiltered_out: usize,
    pub exact_solved: usize,
    pub ops: u64,
}

/// One cocycle as an explicit term list. Coefficients are decimal strings so
/// arbitrary-precision values survive any JSON reader.
#[derive(Serialize)]
pub struct RepDoc {
    pub terms: Vec<TermDoc>,
}

#[derive(Serialize)]
pub struct TermDoc {
    pub monomial: String,
    /// 1-based element indices, matching the printed labels.
    pub indices: Vec<u32>,
    pub num: String,
    pub den: String,
}

fn rep_doc(alg: &Algebra, c: &Cochain) -> RepDoc {
    RepDoc {
        terms: c
            .terms()
            .map(|(m, coeff)| TermDoc {
                monomial: m.display(alg),
                indices: m.indices().iter().map(|&i| i + 1).collect(),
                num: coeff.numer().to_string(),
                den: coeff.denom().to_string(),
            })
            .collect(),
    }
}

fn subcomplex_doc(alg: &Algebra, r: &SubcomplexReport) -> SubcomplexDoc {
    SubcomplexDoc {
        id: r.id,
        dim_km1: r.dim_km1,
        dim_k: r.dim_k,
        dim_kp1: r.dim_kp1,
        prefilter_prime: r.prefilter_prime,
        dim_fp: r.dim_fp,
        dim_q: r.dim_q,
        torsion: r.torsion.iter().map(|t| t.to_string()).collect(),
        torsion_known: r.torsion_known,
        path: r.path.to_string(),
        representatives: r.representatives.iter().map(|c| rep_doc(alg, c)).collect(),
        ops: r.ops,
        events: r.events.clone(),
    }
}

fn cell_doc(alg: &Algebra, r: &CohomologyResult) -> CellDoc {
    CellDoc {
        k: r.k,
        g: r.g,
        dim_cochain: r.dim_cochain,
        betti: r.betti,
        torsion: r.torsion.iter().map(|t| t.to_string()).collect(),
        torsion_known: r.torsion_known,
        representatives: r.representatives.iter().map(|c| rep_doc(alg, c)).collect(),
        subcomplexes: r.subcomplexes.iter().map(|s| subcomplex_doc(alg, s)).collect(),
        stats: StatsDoc {
            subcomplex_count: r.stats.subcomplex_count,
            max_middle_dim: r.stats.max_middle_dim,
            prefiltered_out: r.stats.prefiltered_out,
            exact_solved: r.stats.exact_solved,
            ops: r.stats.ops,
        },
    }
}

pub fn build(manifest: &RunManifest, output: &ComputeOutput) -> ResultDoc {
    let alg = &output.algebra;
    let (elements_even, elements_odd) = crate::driver::parity_counts(alg);
    ResultDoc {
        schema_version: SCHEMA_VERSION,
        generator: format!("supercohom {}", env!("CARGO_PKG_VERSION")),
        manifest: manifest.clone(),
        algebra: AlgebraSummary {
            name: alg.name().to_string(),
            dim: alg.dim(),
            elements_even,
            elements_odd,
            grade_range: [alg.grade_lo(), alg.grade_hi()],
            complete: alg.complete(),
        },
        cells: output.cells.iter().map(|c| cell_doc(alg, &c.result)).collect(),
    }
}

pub fn to_json(doc: &ResultDoc) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("result documents always serialize");
    s.push('\n');
    s
}

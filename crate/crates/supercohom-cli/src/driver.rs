//! Algebra resolution and the (optionally parallel) compute pipeline.

use std::path::Path;
use std::str::FromStr;

use supercohom_core::algebra::{Algebra, Family};
use supercohom_core::cochain::required_window;
use supercohom_core::engine::{self, CohomologyResult};
use supercohom_core::subcomplex::{partition_complex, Subcomplex};

use crate::algebra_file;
use crate::error::CliError;
use crate::manifest::RunManifest;

/// Whether `--algebra` names a built-in family (`SLe2`, `H(2)`, …) rather
/// than a definition file. Family names win over identically named paths.
pub fn is_builtin(spec: &str) -> bool {
    matches!(Family::from_str(spec), Ok(f) if f != Family::Custom)
}

/// `(even, odd)` basis element counts.
pub fn parity_counts(alg: &Algebra) -> (usize, usize) {
    let even = (0..alg.dim())
        .filter(|&i| {
            alg.element(i as u32)
                .map(|e| e.parity == supercohom_core::poly::Parity::Even)
                .unwrap_or(false)
        })
        .count();
    (even, alg.dim() - even)
}

/// Resolve `--algebra` into an algebra covering the requested cells.
///
/// Built-in families are generated over the smallest grade window that makes
/// every requested `(k−1, k, k+1)` slice certifiably complete. File algebras
/// come with their own declared window; cells reaching outside it fail with
/// the window invariant.
pub fn resolve_algebra(
    spec: &str,
    k_range: [usize; 2],
    g_range: [i64; 2],
) -> Result<Algebra, CliError> {
    if let Ok(family) = Family::from_str(spec) {
        let floor = family
            .floor()
            .expect("built-in families carry a grade floor");
        let mut hi = floor;
        for k in k_range[0]..=k_range[1] {
            for g in g_range[0]..=g_range[1] {
                if let Some((_, need)) = required_window(floor, k, g) {
                    hi = hi.max(need);
                }
            }
        }
        return Ok(Algebra::generate(family, floor, hi)?);
    }
    let path = Path::new(spec);
    if path.exists() {
        return algebra_file::load(path);
    }
    // No such file; if the spec reads like a family name, surface the
    // family diagnostics (`H(3)` → "H(n) needs an even n ≥ 2").
    let prefix: String = spec.chars().take_while(|c| c.is_ascii_alphabetic()).collect();
    match prefix.as_str() {
        "H" | "B" | "Le" | "SLe" => {
            Err(Family::from_str(spec).expect_err("checked above").into())
        }
        _ => Err(CliError::config(format!(
            "unknown algebra {spec:?}: not a built-in family (H(n), B(n), Le(n), SLe(n)) \
             and not a readable file"
        ))),
    }
}

/// One computed cell plus the subcomplexes behind it (kept for dumps).
pub struct CellOutput {
    pub result: CohomologyResult,
    pub subcomplexes: Vec<Subcomplex>,
}

/// Everything a compute run produces, cells ordered `k` ascending then `g`
/// ascending.
pub struct ComputeOutput {
    pub algebra: Algebra,
    pub cells: Vec<CellOutput>,
}

/// Run the full pipeline for every cell in the manifest's ranges.
///
/// Subcomplexes of a cell are analyzed across `jobs` worker threads; reports
/// are merged in discovery-ordinal order, so the result is identical for
/// every job count and matches the sequential engine exactly.
pub fn run_compute(manifest: &RunManifest) -> Result<ComputeOutput, CliError> {
    let algebra = resolve_algebra(&manifest.algebra, manifest.k_range, manifest.g_range)?;
    let config = manifest.engine_config();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(manifest.jobs)
        .build()
        .map_err(|e| CliError::config(format!("cannot build a {}-thread pool: {e}", manifest.jobs)))?;

    let mut cells = Vec::new();
    for k in manifest.k_range[0]..=manifest.k_range[1] {
        for g in manifest.g_range[0]..=manifest.g_range[1] {
            let subcomplexes = partition_complex(&algebra, k, g, config.strategy)?;
            let reports = pool.install(|| {
                use rayon::prelude::*;
                subcomplexes
                    .par_iter()
                    .map(|sub| engine::analyze_subcomplex(sub, &config))
                    .collect::<Result<Vec<_>, _>>()
            })?;
            let result = engine::aggregate_reports(&algebra, k, g, reports)?;
            cells.push(CellOutput {
                result,
                subcomplexes,
            });
        }
    }
    Ok(ComputeOutput { algebra, cells })
}

//! Human-facing output: the survey-style table, CSV rows, and sparse
//! subcomplex dumps.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use supercohom_core::algebra::Algebra;
use supercohom_core::cochain::CochainMonomial;
use supercohom_core::engine::CohomologyResult;
use supercohom_core::linalg::SparseMat;
use supercohom_core::{Int, Rat};

use crate::driver::ComputeOutput;
use crate::error::CliError;
use crate::manifest::{FieldArg, RunManifest};

fn torsion_str(ts: &[Int]) -> String {
    ts.iter()
        .map(|t| t.to_string())
        .collect::<Vec<_>>()
        .join(";")
}

fn field_str(manifest: &RunManifest) -> String {
    match manifest.field {
        FieldArg::Q => "Q".to_string(),
        FieldArg::Fp => format!("F_{}", manifest.prime),
    }
}

fn strategy_str(manifest: &RunManifest) -> String {
    match manifest.strategy {
        crate::manifest::StrategyArg::Top => "top".to_string(),
        crate::manifest::StrategyArg::Bottom => "bottom".to_string(),
        crate::manifest::StrategyArg::Random => {
            format!("random (seed {})", manifest.seed.unwrap_or(0))
        }
    }
}

/// The four-number cell box `dim/count/maxdim b=betti` (plus torsion when it
/// is known and present).
fn cell_box(r: &CohomologyResult) -> String {
    let mut s = format!(
        "{}/{}/{} b={}",
        r.dim_cochain, r.stats.subcomplex_count, r.stats.max_middle_dim, r.betti
    );
    if r.torsion_known && !r.torsion.is_empty() {
        let _ = write!(s, " t={}", torsion_str(&r.torsion));
    }
    s
}

fn same_box(a: &CohomologyResult, b: &CohomologyResult) -> bool {
    a.dim_cochain == b.dim_cochain
        && a.stats.subcomplex_count == b.stats.subcomplex_count
        && a.stats.max_middle_dim == b.stats.max_middle_dim
        && a.betti == b.betti
        && a.torsion_known == b.torsion_known
        && a.torsion == b.torsion
}

/// Grid of cell boxes, `k` decreasing downward the way survey tables print
/// it, `g` increasing to the right; `→` marks a box equal to its left
/// neighbor.
pub fn render_table(manifest: &RunManifest, output: &ComputeOutput) -> String {
    let alg = &output.algebra;
    let [k_lo, k_hi] = manifest.k_range;
    let [g_lo, g_hi] = manifest.g_range;
    let n_g = (g_hi - g_lo + 1) as usize;

    let cell = |k: usize, g: i64| -> &CohomologyResult {
        let row = k - k_lo;
        let col = (g - g_lo) as usize;
        &output.cells[row * n_g + col].result
    };

    let mut out = String::new();
    let _ = writeln!(
        out,
        "H^k_g of {} over {} (strategy {}, prefilter prime {})",
        alg.name(),
        field_str(manifest),
        strategy_str(manifest),
        manifest.prime
    );
    let _ = writeln!(
        out,
        "cell box: dim C^k_g / subcomplexes / max block dim, b = dim H^k_g (→ = same as left neighbor)"
    );

    // Lay the grid out with k decreasing downward.
    let mut grid: Vec<Vec<String>> = Vec::new();
    let mut header = vec![String::new()];
    for g in g_lo..=g_hi {
        header.push(format!("g={g}"));
    }
    grid.push(header);
    for k in (k_lo..=k_hi).rev() {
        let mut row = vec![format!("k={k}")];
        for g in g_lo..=g_hi {
            let r = cell(k, g);
            if g > g_lo && same_box(r, cell(k, g - 1)) {
                row.push("→".to_string());
            } else {
                row.push(cell_box(r));
            }
        }
        grid.push(row);
    }

    let ncols = grid[0].len();
    let widths: Vec<usize> = (0..ncols)
        .map(|c| grid.iter().map(|row| row[c].chars().count()).max().unwrap_or(0))
        .collect();
    for row in &grid {
        let mut line = String::new();
        for (c, s) in row.iter().enumerate() {
            if c > 0 {
                line.push_str("  ");
            }
            let pad = widths[c] - s.chars().count();
            line.push_str(&" ".repeat(pad));
            line.push_str(s);
        }
        let _ = writeln!(out, "{}", line.trim_end());
    }

    // Torsion recap for decomposition runs.
    let torsion_lines: Vec<String> = output
        .cells
        .iter()
        .filter(|c| c.result.torsion_known && !c.result.torsion.is_empty())
        .map(|c| {
            format!(
                "  H^{}_{}: torsion [{}]",
                c.result.k,
                c.result.g,
                torsion_str(&c.result.torsion)
            )
        })
        .collect();
    if !torsion_lines.is_empty() {
        let _ = writeln!(out, "torsion:");
        for line in torsion_lines {
            let _ = writeln!(out, "{line}");
        }
    }

    if manifest.representatives {
        let mut any = false;
        for c in &output.cells {
            for rep in &c.result.representatives {
                if !any {
                    let _ = writeln!(out, "representatives:");
                    any = true;
                }
                let _ = writeln!(
                    out,
                    "  H^{}_{}: {}",
                    c.result.k,
                    c.result.g,
                    rep.display(alg)
                );
            }
        }
    }

    let events: Vec<&String> = output
        .cells
        .iter()
        .flat_map(|c| c.result.stats.events.iter())
        .collect();
    if !events.is_empty() {
        let _ = writeln!(out, "events:");
        for e in events {
            let _ = writeln!(out, "  {e}");
        }
    }
    out
}

/// One CSV row per `(k, g, subcomplex)`; a cell whose cochain space is empty
/// emits a single placeholder row with a blank `subcomplex_id`.
pub fn render_csv(output: &ComputeOutput) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "k",
        "g",
        "subcomplex_id",
        "dim_km1",
        "dim_k",
        "dim_kp1",
        "prefilter_prime",
        "dim_fp",
        "dim_q",
        "path",
        "torsion",
        "torsion_known",
        "ops",
        "cell_betti",
    ])
    .map_err(|e| CliError::internal(format!("csv: {e}")))?;

    let opt = |v: Option<String>| v.unwrap_or_default();
    for cell in &output.cells {
        let r = &cell.result;
        if r.subcomplexes.is_empty() {
            w.write_record([
                r.k.to_string(),
                r.g.to_string(),
                String::new(),
                "0".into(),
                "0".into(),
                "0".into(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                "true".into(),
                "0".into(),
                r.betti.to_string(),
            ])
            .map_err(|e| CliError::internal(format!("csv: {e}")))?;
            continue;
        }
        for s in &r.subcomplexes {
            w.write_record([
                r.k.to_string(),
                r.g.to_string(),
                s.id.to_string(),
                s.dim_km1.to_string(),
                s.dim_k.to_string(),
                s.dim_kp1.to_string(),
                opt(s.prefilter_prime.map(|p| p.to_string())),
                opt(s.dim_fp.map(|d| d.to_string())),
                opt(s.dim_q.map(|d| d.to_string())),
                s.path.to_string(),
                torsion_str(&s.torsion),
                s.torsion_known.to_string(),
                s.ops.to_string(),
                r.betti.to_string(),
            ])
            .map_err(|e| CliError::internal(format!("csv: {e}")))?;
        }
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::internal(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| CliError::internal(format!("csv: {e}")))
}

fn write_basis(out: &mut String, alg: &Algebra, title: &str, basis: &[CochainMonomial]) {
    let _ = writeln!(out, "{title} (dim {}):", basis.len());
    for (i, m) in basis.iter().enumerate() {
        let _ = writeln!(out, "  {i} {}", m.display(alg));
    }
}

/// Sparse triplet block: `row col numerator` per entry, with the denominator
/// appended only when it differs from 1.
fn write_matrix(out: &mut String, title: &str, mat: &SparseMat<Rat>, nrows: usize, ncols: usize) {
    let _ = writeln!(out, "{title}, {nrows} x {ncols}, nnz {}:", mat.nnz());
    for (ri, row) in mat.rows().enumerate() {
        for (cj, coeff) in row {
            if coeff.denom() == &Int::from(1) {
                let _ = writeln!(out, "  {ri} {cj} {}", coeff.numer());
            } else {
                let _ = writeln!(out, "  {ri} {cj} {} {}", coeff.numer(), coeff.denom());
            }
        }
    }
}

/// Write one `k{K}_g{G}_sub{ID}.txt` per subcomplex into `dir`: the three
/// bases with their row/column numbering, then both boundary matrices as
/// sparse triplets.
pub fn dump_subcomplexes(dir: &Path, output: &ComputeOutput) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    let alg = &output.algebra;
    for cell in &output.cells {
        for sub in &cell.subcomplexes {
            let mut out = String::new();
            let _ = writeln!(
                out,
                "subcomplex {} of the (k={}, g={}) slice of {}",
                sub.id(),
                sub.k(),
                sub.grade(),
                alg.name()
            );
            write_basis(&mut out, alg, "basis level k-1", sub.basis_km1());
            write_basis(&mut out, alg, "basis level k", sub.basis_k());
            write_basis(&mut out, alg, "basis level k+1", sub.basis_kp1());
            write_matrix(
                &mut out,
                "D' (boundaries of level-k monomials; rows = level k, cols = level k-1)",
                sub.d_prime(),
                sub.basis_k().len(),
                sub.basis_km1().len(),
            );
            write_matrix(
                &mut out,
                "D (boundaries of level-(k+1) monomials; rows = level k+1, cols = level k)",
                sub.d(),
                sub.basis_kp1().len(),
                sub.basis_k().len(),
            );
            let name = format!("k{}_g{}_sub{}.txt", sub.k(), sub.grade(), sub.id());
            fs::write(dir.join(name), out)?;
        }
    }
    Ok(())
}

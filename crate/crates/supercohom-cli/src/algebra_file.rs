//! The algebra definition file: a JSON document carrying a graded basis and
//! its structure constants.
//!
//! ```json
//! {
//!   "name": "SLe(2)",
//!   "n_even": 2,
//!   "n_odd": 2,
//!   "grade_range": [-2, 1],
//!   "complete": false,
//!   "elements": [ {"label": "O_1", "parity": "odd", "grade": -2}, … ],
//!   "brackets": [ {"i": 2, "j": 5, "terms": [{"k": 2, "num": 1, "den": 1}]}, … ]
//! }
//! ```
//!
//! Element indices in `brackets` are 1-based, matching the printed labels
//! (`E_1` is element 1). Only `i ≤ j` pairs need to be listed; the other
//! order follows by super antisymmetry. `grade_range[0]` is the algebra's
//! true bottom grade; `complete: false` (the default) means the window may
//! be truncated from above. Writing and re-reading a file is the identity.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use supercohom_core::algebra::{Algebra, ElementSpec};
use supercohom_core::poly::Parity;
use supercohom_core::{Int, Rat};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FileParity {
    Even,
    Odd,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileElement {
    pub label: String,
    pub parity: FileParity,
    pub grade: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileTerm {
    /// 1-based index of the target element.
    pub k: u32,
    pub num: i64,
    pub den: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileBracket {
    /// 1-based index of the first factor.
    pub i: u32,
    /// 1-based index of the second factor.
    pub j: u32,
    pub terms: Vec<FileTerm>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraFile {
    pub name: String,
    pub n_even: u32,
    pub n_odd: u32,
    /// `[lo, hi]`, inclusive; `lo` is the algebra's minimal grade.
    pub grade_range: [i64; 2],
    /// True when every bracket of in-window elements lands in the window.
    #[serde(default)]
    pub complete: bool,
    pub elements: Vec<FileElement>,
    pub brackets: Vec<FileBracket>,
}

/// Parse a file; syntax errors are reported with line and column.
pub fn parse(path: &Path) -> Result<AlgebraFile, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        CliError::config(format!(
            "{}: parse error at line {}, column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })
}

/// Build the in-memory algebra. Hard structural errors (bad indices,
/// ungraded entries, …) come back as `Err`; soft violations found by the
/// validator (antisymmetry, Jacobi, …) are returned for the caller to
/// judge — computing demands an empty list, `validate` just prints it.
pub fn build(file: &AlgebraFile) -> Result<(Algebra, Vec<String>), CliError> {
    let n = file.elements.len() as u32;
    let specs: Vec<ElementSpec> = file
        .elements
        .iter()
        .map(|e| ElementSpec {
            label: e.label.clone(),
            parity: match e.parity {
                FileParity::Even => Parity::Even,
                FileParity::Odd => Parity::Odd,
            },
            grade: e.grade,
        })
        .collect();

    let to_zero_based = |idx: u32, role: &str| -> Result<u32, CliError> {
        if idx == 0 || idx > n {
            Err(CliError::config(format!(
                "bracket {role} index {idx} out of range 1..={n}"
            )))
        } else {
            Ok(idx - 1)
        }
    };
    let mut brackets = Vec::with_capacity(file.brackets.len());
    for b in &file.brackets {
        let i = to_zero_based(b.i, "i")?;
        let j = to_zero_based(b.j, "j")?;
        let mut terms = Vec::with_capacity(b.terms.len());
        for t in &b.terms {
            let k = to_zero_based(t.k, "k")?;
            if t.den == 0 {
                return Err(CliError::config(format!(
                    "bracket ({}, {}): zero denominator at target {}",
                    b.i, b.j, t.k
                )));
            }
            terms.push((k, Rat::new(Int::from(t.num), Int::from(t.den))));
        }
        brackets.push((i, j, terms));
    }

    let alg = Algebra::from_structure(
        &file.name,
        file.grade_range[0],
        file.grade_range[1],
        file.complete,
        specs,
        brackets,
    )?;
    let violations = alg.validate_structure();
    Ok((alg, violations))
}

/// Load an algebra for computation: parse, build, and insist on a clean
/// validation report.
pub fn load(path: &Path) -> Result<Algebra, CliError> {
    let file = parse(path)?;
    let (alg, violations) = build(&file)?;
    if !violations.is_empty() {
        return Err(CliError::config(format!(
            "{}: structure validation failed:\n  {}",
            path.display(),
            violations.join("\n  ")
        )));
    }
    Ok(alg)
}

/// Snapshot an in-memory algebra into the file representation.
pub fn from_algebra(alg: &Algebra) -> Result<AlgebraFile, CliError> {
    let elements = alg
        .elements()
        .iter()
        .map(|e| FileElement {
            label: e.label.clone(),
            parity: match e.parity {
                Parity::Even => FileParity::Even,
                Parity::Odd => FileParity::Odd,
            },
            grade: e.grade,
        })
        .collect();
    let mut brackets = Vec::new();
    for ((i, j), terms) in &alg.table().forward {
        let mut file_terms = Vec::with_capacity(terms.len());
        for (k, c) in terms {
            let num = i64::try_from(c.numer()).map_err(|_| {
                CliError::config(format!(
                    "structure constant at ({}, {}) does not fit the file format",
                    i + 1,
                    j + 1
                ))
            })?;
            let den = i64::try_from(c.denom()).map_err(|_| {
                CliError::config(format!(
                    "structure constant at ({}, {}) does not fit the file format",
                    i + 1,
                    j + 1
                ))
            })?;
            file_terms.push(FileTerm { k: k + 1, num, den });
        }
        brackets.push(FileBracket {
            i: i + 1,
            j: j + 1,
            terms: file_terms,
        });
    }
    Ok(AlgebraFile {
        name: alg.name().to_string(),
        n_even: alg.n_even(),
        n_odd: alg.n_odd(),
        grade_range: [alg.grade_lo(), alg.grade_hi()],
        complete: alg.complete(),
        elements,
        brackets,
    })
}

/// Serialize with a trailing newline (stable, diff-friendly output).
pub fn to_json(file: &AlgebraFile) -> String {
    let mut s = serde_json::to_string_pretty(file).expect("algebra file serializes");
    s.push('\n');
    s
}

pub fn save(path: &Path, file: &AlgebraFile) -> Result<(), CliError> {
    fs::write(path, to_json(file))
        .map_err(|e| CliError::config(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}

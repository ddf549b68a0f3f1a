//! Strategy/prime benchmark grid for one cell: wall-clock medians plus the
//! deterministic elimination operation counts.

use std::fmt::Write as _;
use std::time::Instant;

use serde::Serialize;
use supercohom_core::engine::{compute_cohomology, EngineConfig, ExactMode, FieldMode};
use supercohom_core::subcomplex::Strategy;

use crate::driver::resolve_algebra;
use crate::error::CliError;
use crate::manifest::{BenchArgs, FieldArg, StrategyArg};

#[derive(Serialize)]
pub struct BenchReport {
    pub algebra: String,
    pub k: usize,
    pub g: i64,
    pub field: FieldArg,
    pub reps: usize,
    pub rows: Vec<BenchRow>,
}

#[derive(Serialize)]
pub struct BenchRow {
    pub strategy: StrategyArg,
    pub prime: i64,
    pub betti: usize,
    pub subcomplexes: usize,
    pub prefiltered_out: usize,
    /// Elimination operations — identical across repetitions.
    pub ops: u64,
    pub median_ms: f64,
    pub min_ms: f64,
    pub max_ms: f64,
}

fn to_strategy(s: StrategyArg, seed: u64) -> Strategy {
    match s {
        StrategyArg::Top => Strategy::Top,
        StrategyArg::Bottom => Strategy::Bottom,
        StrategyArg::Random => Strategy::Random { seed },
    }
}

pub fn run_bench(args: &BenchArgs) -> Result<BenchReport, CliError> {
    if args.reps == 0 {
        return Err(CliError::config("--reps must be at least 1"));
    }
    if args.strategies.is_empty() {
        return Err(CliError::config("--strategies must name at least one strategy"));
    }
    if args.primes.is_empty() {
        return Err(CliError::config("--primes must name at least one prime"));
    }
    let algebra = resolve_algebra(&args.algebra, [args.k, args.k], [args.g, args.g])?;

    let mut rows = Vec::new();
    for &strategy in &args.strategies {
        for &prime in &args.primes {
            let config = EngineConfig {
                field: match args.field {
                    FieldArg::Q => FieldMode::Q,
                    FieldArg::Fp => FieldMode::Fp,
                },
                prime,
                fallback_prime: if prime == supercohom_core::engine::DEFAULT_FALLBACK_PRIME {
                    supercohom_core::engine::DEFAULT_PRIME
                } else {
                    supercohom_core::engine::DEFAULT_FALLBACK_PRIME
                },
                strategy: to_strategy(strategy, args.seed),
                exact_mode: ExactMode::Rational,
                emit_representatives: false,
            };
            config.validate()?;
            let mut walls_ms: Vec<f64> = Vec::with_capacity(args.reps);
            let mut last = None;
            for _ in 0..args.reps {
                let t = Instant::now();
                let r = compute_cohomology(&algebra, args.k, args.g, &config)?;
                walls_ms.push(t.elapsed().as_secs_f64() * 1e3);
                last = Some(r);
            }
            let r = last.expect("reps >= 1");
            walls_ms.sort_by(|a, b| a.total_cmp(b));
            let median_ms = walls_ms[walls_ms.len() / 2];
            rows.push(BenchRow {
                strategy,
                prime,
                betti: r.betti,
                subcomplexes: r.stats.subcomplex_count,
                prefiltered_out: r.stats.prefiltered_out,
                ops: r.stats.ops,
                median_ms,
                min_ms: walls_ms[0],
                max_ms: walls_ms[walls_ms.len() - 1],
            });
        }
    }
    Ok(BenchReport {
        algebra: algebra.name().to_string(),
        k: args.k,
        g: args.g,
        field: args.field,
        reps: args.reps,
        rows,
    })
}

pub fn render_bench(report: &BenchReport) -> String {
    let mut out = String::new();
    let field = match report.field {
        FieldArg::Q => "Q".to_string(),
        FieldArg::Fp => "F_p (grid prime)".to_string(),
    };
    let _ = writeln!(
        out,
        "bench {} at (k={}, g={}) over {}, {} repetition(s) per configuration",
        report.algebra, report.k, report.g, field, report.reps
    );
    let _ = writeln!(
        out,
        "{:<8}  {:>9}  {:>5}  {:>6}  {:>10}  {:>12}  {:>10}  {:>10}  {:>10}",
        "strategy", "prime", "betti", "blocks", "prefilt", "ops", "median_ms", "min_ms", "max_ms"
    );
    for r in &report.rows {
        let strat = match r.strategy {
            StrategyArg::Top => "top",
            StrategyArg::Bottom => "bottom",
            StrategyArg::Random => "random",
        };
        let _ = writeln!(
            out,
            "{:<8}  {:>9}  {:>5}  {:>6}  {:>10}  {:>12}  {:>10.3}  {:>10.3}  {:>10.3}",
            strat,
            r.prime,
            r.betti,
            r.subcomplexes,
            r.prefiltered_out,
            r.ops,
            r.median_ms,
            r.min_ms,
            r.max_ms
        );
    }
    out
}

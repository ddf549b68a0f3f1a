use std::fs;
use std::path::Path;
use std::str::FromStr;

use clap::Parser;
use supercohom_core::algebra::{Algebra, Family};

use supercohom_cli::error::CliError;
use supercohom_cli::manifest::{
    BenchArgs, Cli, Command, ComputeArgs, ExportArgs, FormatArg, ValidateArgs,
};
use supercohom_cli::{algebra_file, bench, driver, render, result_doc};

fn main() {
    // clap itself exits with 2 on unparsable flags, matching the config-error
    // exit code used below.
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("{e}");
        std::process::exit(e.exit_code());
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Compute(args) => cmd_compute(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Validate(args) => cmd_validate(args),
        Command::Export(args) => cmd_export(args),
    }
}

/// Write to `--out` when given, stdout otherwise.
fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => Ok(fs::write(path, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_compute(args: ComputeArgs) -> Result<(), CliError> {
    let manifest = args.manifest()?;
    let output = driver::run_compute(&manifest)?;
    if let Some(dir) = &args.dump_subcomplexes {
        render::dump_subcomplexes(dir, &output)?;
    }
    let text = match manifest.format {
        FormatArg::Json => result_doc::to_json(&result_doc::build(&manifest, &output)),
        FormatArg::Csv => render::render_csv(&output)?,
        FormatArg::Table => render::render_table(&manifest, &output),
    };
    emit(args.out.as_deref(), &text)
}

fn cmd_bench(args: BenchArgs) -> Result<(), CliError> {
    let report = bench::run_bench(&args)?;
    print!("{}", bench::render_bench(&report));
    if let Some(path) = &args.out {
        let mut s = serde_json::to_string_pretty(&report)
            .map_err(|e| CliError::internal(format!("bench report: {e}")))?;
        s.push('\n');
        fs::write(path, s)?;
    }
    Ok(())
}

fn cmd_validate(args: ValidateArgs) -> Result<(), CliError> {
    let file = algebra_file::parse(&args.path)?;
    let (alg, violations) = algebra_file::build(&file)?;
    if violations.is_empty() {
        let (even, odd) = driver::parity_counts(&alg);
        println!(
            "OK: {} — dim {} ({} even / {} odd elements), grade window [{}, {}], complete: {}",
            alg.name(),
            alg.dim(),
            even,
            odd,
            alg.grade_lo(),
            alg.grade_hi(),
            alg.complete()
        );
        Ok(())
    } else {
        for v in &violations {
            eprintln!("violation: {v}");
        }
        Err(CliError::config(format!(
            "{}: structure validation failed with {} violation(s), first: {}",
            args.path.display(),
            violations.len(),
            violations[0]
        )))
    }
}

fn cmd_export(args: ExportArgs) -> Result<(), CliError> {
    if !driver::is_builtin(&args.algebra) {
        return Err(CliError::config(format!(
            "export needs a built-in family (SLe2, Le3, B2, H(2), …), got {:?}",
            args.algebra
        )));
    }
    let family = Family::from_str(&args.algebra)?;
    let floor = family
        .floor()
        .expect("built-in families carry a grade floor");
    let lo = args.grade_lo.unwrap_or(floor);
    let alg = Algebra::generate(family, lo, args.grade_hi)?;
    let file = algebra_file::from_algebra(&alg)?;
    emit(args.out.as_deref(), &algebra_file::to_json(&file))
}

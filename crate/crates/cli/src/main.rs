use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use submanifold::catalog::catalog_entries;
use submanifold::geometry::Corruption;
use submanifold_cli::{emit_report, resolve_jobs, run_verification, CliError, Format, Input, RunConfig};

#[derive(Parser)]
#[command(name = "submanifold", version, about = "Verify the Gauss-Codazzi-Ricci equations of an explicit embedding")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample chart points and check every integrability residual.
    Verify {
        /// Path to a `.emb` file, or `catalog:NAME`.
        input: Input,
        #[arg(long, default_value_t = 100)]
        points: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Relative tolerance: a point passes when every residual ≤ tol · max(scale, 1).
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
        /// Perturb the extrinsic data first, e.g. `b:scale:1.001` or `A:add:1e-3`.
        #[arg(long, value_name = "TENSOR:MODE:MAG")]
        corrupt: Option<Corruption>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Worker threads (0 = one per core); falls back to SUBMANIFOLD_JOBS.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Inspect the built-in reference embeddings.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    /// Names and dimensions of every entry.
    List,
    /// Print the DSL source of an entry.
    Show { name: String },
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let mut stdout = std::io::stdout().lock();
    match cli.command {
        Command::Verify { input, points, seed, tol, corrupt, format, jobs } => {
            let config = RunConfig { input, points, seed, tol, corruption: corrupt, format, jobs: resolve_jobs(jobs)? };
            let report = run_verification(&config)?;
            let _ = stdout.write_all(emit_report(&report, format).as_bytes());
            if report.skipped > 0 {
                eprintln!("warning: {} of {} points skipped as degenerate", report.skipped, report.points.len());
            }
            Ok(report.verdict.exit_code())
        }
        Command::Catalog { action: CatalogAction::List } => {
            for e in catalog_entries() {
                let signs: String = e.signature.iter().map(|s| if *s > 0 { '+' } else { '-' }).collect();
                let _ = writeln!(stdout, "{:<18} n = {}  D = {}  ({signs})", e.name, e.n, e.dim);
            }
            Ok(0)
        }
        Command::Catalog { action: CatalogAction::Show { name } } => {
            let entry = submanifold::catalog::find(&name).ok_or(CliError::UnknownEntry(name))?;
            let _ = stdout.write_all(entry.source.as_bytes());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

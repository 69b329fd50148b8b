use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use entbound::cli::{
    self, efficiency_table, run_bound, run_fig2, run_fig3, run_fig4, ExperimentConfig,
    MeasureKind, DEFAULT_SEED,
};
use entbound::Error;

#[derive(Parser)]
#[command(
    name = "entbound",
    about = "Lower bounds on entanglement measures from measured expectation values"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MeasureArg {
    Concurrence,
    Eof,
    Geometric,
    Mw,
}

impl From<MeasureArg> for MeasureKind {
    fn from(m: MeasureArg) -> Self {
        match m {
            MeasureArg::Concurrence => MeasureKind::Concurrence,
            MeasureArg::Eof => MeasureKind::Eof,
            MeasureArg::Geometric => MeasureKind::Geometric,
            MeasureArg::Mw => MeasureKind::MeyerWallach,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Optimized lower bound from a measurement-record file.
    Bound {
        /// Path to the record file (JSON).
        record: PathBuf,
        #[arg(long, value_enum, default_value = "concurrence")]
        measure: MeasureArg,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Isotropic-state sweep: exact concurrence versus witness bound (CSV).
    Fig2 {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value = "fig2.csv")]
        out: PathBuf,
        /// Fidelity grid points (>= 30).
        #[arg(long, default_value_t = 30)]
        grid: usize,
    },
    /// Method comparison on noisy two-qubit states (CSV + efficiency table).
    Fig3 {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value = "fig3.csv")]
        out: PathBuf,
        /// Number of random noise realizations.
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Cluster-basis fidelity grid: single versus multi-fidelity bound (CSV).
    Fig4 {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value = "fig4.csv")]
        out: PathBuf,
        /// Grid points per fidelity axis (>= 20).
        #[arg(long, default_value_t = 20)]
        grid: usize,
    },
}

fn run(command: Command) -> Result<u8, Error> {
    match command {
        Command::Bound {
            record,
            measure,
            seed,
        } => {
            let result = run_bound(&record, measure.into(), seed)?;
            println!("bound: {:.10}", result.bound);
            println!(
                "optimal lambda: [{}]",
                result
                    .optimal_lambdas
                    .iter()
                    .map(|l| format!("{l:.6}"))
                    .collect::<Vec<_>>()
                    .join(", ")
            );
            println!("legendre value at optimum: {:.10}", result.legendre_at_optimum);
            println!(
                "evaluations: {} (total fixed-point iterations {})",
                result.diagnostics.iterations_per_eval.len(),
                result.diagnostics.iterations_per_eval.iter().sum::<usize>()
            );
            println!("converged: {}", result.diagnostics.converged);
            Ok(if result.diagnostics.converged { 0 } else { 2 })
        }
        Command::Fig2 { seed, out, grid } => {
            let cfg = ExperimentConfig {
                seed,
                grid,
                out: Some(out.clone()),
                ..Default::default()
            };
            let result = run_fig2(&cfg)?;
            println!("wrote {} rows to {}", result.rows.len(), cli::resolve_out(&out).display());
            println!("max |exact - bound| = {:.3e}", result.max_gap);
            Ok(0)
        }
        Command::Fig3 { seed, out, samples } => {
            let cfg = ExperimentConfig {
                seed,
                samples,
                out: Some(out.clone()),
                ..Default::default()
            };
            let result = run_fig3(&cfg)?;
            println!("wrote {} rows to {}", result.rows.len(), cli::resolve_out(&out).display());
            print!("{}", efficiency_table(&result));
            Ok(0)
        }
        Command::Fig4 { seed, out, grid } => {
            let cfg = ExperimentConfig {
                seed,
                grid,
                out: Some(out.clone()),
                ..Default::default()
            };
            let result = run_fig4(&cfg)?;
            println!("wrote {} rows to {}", result.rows.len(), cli::resolve_out(&out).display());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hpquad::AdaptiveConfig;
use hpquad_cli::{
    emit_graph, emit_mesh, output_path, run_benchmarks, select_cases, write_file, CliError,
    MeshFormat, RunOptions,
};

/// Benchmarks the hp-adaptive integrator on the built-in test integrands.
#[derive(Parser)]
#[command(name = "bench", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the selected cases and print a report.
    Run(RunArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct RunArgs {
    /// Case name (f1..f5) or `all`.
    #[arg(long, default_value = "all")]
    case: String,
    #[arg(long, default_value_t = AdaptiveConfig::default().tol)]
    tol: f64,
    /// Smoothness threshold.
    #[arg(long, default_value_t = AdaptiveConfig::default().tau)]
    tau: f64,
    /// Largest number of points per segment.
    #[arg(long, default_value_t = AdaptiveConfig::default().p_max)]
    pmax: usize,
    /// Number of points on the initial segment.
    #[arg(long, default_value_t = AdaptiveConfig::default().p_init)]
    pinit: usize,
    /// Write the final mesh here. With several cases the case name is
    /// appended to the file stem.
    #[arg(long, value_name = "PATH")]
    emit_mesh: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv, requires = "emit_mesh")]
    format: Format,
    /// Write uniformly sampled `x,f` pairs here.
    #[arg(long, value_name = "PATH")]
    emit_graph: Option<PathBuf>,
    #[arg(long, default_value_t = 1000, requires = "emit_graph")]
    samples: usize,
    /// Also run adaptive Simpson at the same tolerance.
    #[arg(long)]
    compare_simpson: bool,
    /// Run the cases on separate threads.
    #[arg(long)]
    parallel: bool,
    /// Print the report as JSON.
    #[arg(long)]
    json: bool,
}

fn run(args: RunArgs) -> Result<bool, CliError> {
    let cfg = AdaptiveConfig {
        tol: args.tol,
        tau: args.tau,
        p_max: args.pmax,
        p_init: args.pinit,
        ..Default::default()
    };
    let cases = select_cases(&args.case)?;
    let opts = RunOptions {
        compare_simpson: args.compare_simpson,
        parallel: args.parallel,
    };
    let (report, results) = run_benchmarks(&cases, &cfg, opts)?;

    if args.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        print!("{}", report.render_text());
    }

    let multiple = cases.len() > 1;
    if let Some(path) = &args.emit_mesh {
        let format = match args.format {
            Format::Csv => MeshFormat::Csv,
            Format::Json => MeshFormat::Json,
        };
        for (case, result) in cases.iter().zip(&results) {
            if let Some(result) = result {
                write_file(
                    &output_path(path, case.name, multiple),
                    &emit_mesh(result, format)?,
                )?;
            }
        }
    }
    if let Some(path) = &args.emit_graph {
        for case in &cases {
            write_file(
                &output_path(path, case.name, multiple),
                &emit_graph(case, args.samples)?,
            )?;
        }
    }
    Ok(report.all_ok())
}

fn main() -> ExitCode {
    let Command::Run(args) = Cli::parse().command;
    match run(args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

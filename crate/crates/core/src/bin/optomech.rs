use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use optomech::sweep::{run, table_peaks, ExperimentConfig, RunOptions, SweepTable};

#[derive(Parser)]
#[command(name = "optomech", version, about = "Steady-state photon statistics of a driven optomechanical cavity")]
struct Cli {
    /// Worker threads for sweep points.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Output file, overriding the config (use - for standard output).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the sweep or heatmap described by a TOML config.
    Run { config: PathBuf },
    /// List local maxima of one column of a sweep CSV.
    Peaks {
        csv: PathBuf,
        #[arg(long, default_value = "g2")]
        column: String,
    },
    /// Validate a config without solving.
    Check { config: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn writer(path: Option<&PathBuf>) -> optomech::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) if p.as_os_str() != "-" => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            Box::new(BufWriter::new(File::create(p)?))
        }
        _ => Box::new(io::stdout().lock()),
    })
}

fn execute(cli: &Cli) -> optomech::Result<ExitCode> {
    match &cli.command {
        Command::Check { config } => {
            let cfg = ExperimentConfig::load(config)?;
            eprintln!(
                "{}: ok, {} points, cutoffs {}x{}",
                config.display(),
                cfg.grid().len(),
                cfg.truncation.n_cav,
                cfg.truncation.n_mech
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Run { config } => {
            let cfg = ExperimentConfig::load(config)?;
            let opts = RunOptions {
                threads: cli.threads,
                progress: true,
            };
            let table = run(&cfg, &opts)?;
            let target = cli.out.clone().or_else(|| cfg.output_path());
            let mut out = writer(target.as_ref())?;
            table.write_csv(&mut out)?;
            out.flush()?;
            if let Some(p) = target.filter(|p| p.as_os_str() != "-") {
                eprintln!("wrote {} rows to {}", table.rows.len(), p.display());
            }
            if table.all_converged() {
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!("warning: some points did not converge");
                Ok(ExitCode::from(2))
            }
        }
        Command::Peaks { csv, column } => {
            let table = SweepTable::read_csv(File::open(csv)?)?;
            let peaks = table_peaks(&table, column)?;
            let mut out = writer(cli.out.as_ref())?;
            writeln!(out, "value_units,{column}")?;
            for (x, y) in peaks {
                writeln!(out, "{},{}", optomech::sweep::format_float(x), optomech::sweep::format_float(y))?;
            }
            out.flush()?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use producibility_lab::bounds::{witness_depth, BoundConvention, BoundFamily, KConvention};
use producibility_lab::cli::{self, CSV_HEADER};
use producibility_lab::spin::{Axis, SpinChainSpec};
use producibility_lab::{Error, Result};

#[derive(Parser)]
#[command(
    name = "producibility-lab",
    version,
    about = "Entanglement-depth estimators for dissipative spin chains"
)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Linear,
    Partition,
    General,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario config and write `<output_prefix>.csv`.
    Evolve {
        config: PathBuf,
        /// Also write every sampled state as `<output_prefix>_t<step>.cmx`.
        #[arg(long)]
        checkpoints: bool,
    },
    /// Evaluate all estimators for one stored density matrix.
    Estimate {
        rho: PathBuf,
        #[arg(long)]
        n_sites: usize,
        #[arg(long, default_value = "x")]
        axis: Axis,
        #[arg(long, default_value = "tight")]
        k_convention: KConvention,
    },
    /// Print the producibility bounds and the depth witnessed by a value.
    Bounds {
        #[arg(long = "f")]
        value: f64,
        #[arg(long = "n")]
        n_sites: usize,
        #[arg(long, default_value = "tight")]
        k_convention: KConvention,
        #[arg(long, value_enum, default_value = "partition")]
        family: FamilyArg,
        /// Number of blocks, required for the general family.
        #[arg(long)]
        p: Option<usize>,
    },
    /// Write a gnuplot script next to a scenario CSV.
    Plot { csv: PathBuf },
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Evolve {
            config,
            checkpoints,
        } => {
            let cfg = cli::load_config(&config)?;
            let out = cli::run_scenario(&cfg, checkpoints)?;
            eprintln!(
                "{} rows -> {} (max sample trace error {:.1e})",
                out.run.rows.len(),
                out.csv_path.display(),
                out.run.diagnostics.max_sample_trace_error
            );
            for path in &out.checkpoints {
                eprintln!("checkpoint {}", path.display());
            }
        }
        Command::Estimate {
            rho,
            n_sites,
            axis,
            k_convention,
        } => {
            let chain = SpinChainSpec::new(n_sites, 1.0, 1.0, 0.0)?;
            let conv = BoundConvention::spin_half(k_convention);
            let row = cli::estimate_file(&rho, &chain, axis, &conv)?;
            println!("{CSV_HEADER}");
            println!("{}", row.to_csv_line());
        }
        Command::Bounds {
            value,
            n_sites,
            k_convention,
            family,
            p,
        } => {
            let family = match (family, p) {
                (FamilyArg::Linear, _) => BoundFamily::Linear,
                (FamilyArg::Partition, _) => BoundFamily::Partition,
                (FamilyArg::General, Some(p)) => BoundFamily::General { p },
                (FamilyArg::General, None) => {
                    return Err(Error::InvalidParameter {
                        name: "p",
                        reason: "the general family needs --p".into(),
                    })
                }
            };
            let conv = BoundConvention::spin_half(k_convention);
            let cert = witness_depth(value, n_sites, &conv, family)?;
            println!("k_convention = {k_convention}");
            println!("k = {}", conv.k());
            println!("family = {family}");
            println!("c,bound");
            for c in 1..=n_sites {
                println!("{c},{}", family.bound(c, n_sites, &conv)?);
            }
            println!("witnessed_depth = {}", cert.witnessed_depth);
        }
        Command::Plot { csv } => {
            let script = cli::emit_plot_script(&csv)?;
            println!("{}", script.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(cli::exit_code(&err) as u8)
        }
    }
}

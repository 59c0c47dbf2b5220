//! Command-line front end: thin argument parsing and exit-code mapping
//! around the library pipeline.

use clap::{Args, Parser, Subcommand};
use fecw::config::{EmitKind, RunConfig};
use fecw::report::{load_records, patterns_csv, write_atomic};
use fecw::runner::{build_book, execute_run, execute_tune, simulate_point};
use fecw::Error;
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_CONFIG: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser)]
#[command(name = "fecw", version, about = "Adaptive-parallelism FEC decoding workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Run configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Override channel.seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override channel.trials.
    #[arg(long)]
    trials: Option<u64>,
    /// Override output.dir.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Worker threads (results are identical for any value).
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate and emit the artifacts requested by the configuration.
    Run {
        #[command(flatten)]
        common: CommonArgs,
        /// Override output.emit (bler|table1|dist|patterns|records).
        #[arg(long, value_delimiter = ',')]
        emit: Option<Vec<String>>,
    },
    /// Tune selector thresholds against a previously recorded trial set.
    Tune {
        #[command(flatten)]
        common: CommonArgs,
        /// Records file from a `run` with `records` emission; when absent
        /// the records are simulated fresh from the configuration.
        #[arg(long)]
        records: Option<PathBuf>,
    },
    /// Dump the ORBGRAND pattern book as CSV.
    Patterns {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Shortcut for `run` emitting only the minimum-parallelism table.
    Table1 {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Shortcut for `run` emitting only the reliability distributions.
    Dist {
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn parse_emit(names: &[String]) -> Result<Vec<EmitKind>, Error> {
    names
        .iter()
        .map(|name| match name.as_str() {
            "bler" => Ok(EmitKind::Bler),
            "table1" => Ok(EmitKind::Table1),
            "dist" => Ok(EmitKind::Dist),
            "patterns" => Ok(EmitKind::Patterns),
            "records" => Ok(EmitKind::Records),
            other => Err(Error::Config(format!("--emit: unknown artifact {other:?}"))),
        })
        .collect()
}

fn load_config(common: &CommonArgs) -> Result<RunConfig, Error> {
    let mut cfg = RunConfig::load(&common.config)?;
    if let Some(seed) = common.seed {
        cfg.channel.seed = seed;
    }
    if let Some(trials) = common.trials {
        cfg.channel.trials = trials;
    }
    if let Some(dir) = &common.out_dir {
        cfg.output.dir = dir.display().to_string();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn dispatch(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run { common, emit } => {
            let mut cfg = load_config(&common)?;
            if let Some(names) = emit {
                cfg.output.emit = parse_emit(&names)?;
            }
            execute_run(&cfg, common.workers)?;
            Ok(())
        }
        Command::Table1 { common } => {
            let mut cfg = load_config(&common)?;
            cfg.output.emit = vec![EmitKind::Table1];
            execute_run(&cfg, common.workers)?;
            Ok(())
        }
        Command::Dist { common } => {
            let mut cfg = load_config(&common)?;
            cfg.output.emit = vec![EmitKind::Dist];
            execute_run(&cfg, common.workers)?;
            Ok(())
        }
        Command::Patterns { common } => {
            let cfg = load_config(&common)?;
            let book = build_book(&cfg)?;
            let path = PathBuf::from(&cfg.output.dir).join("patterns.csv");
            write_atomic(&path, patterns_csv(&book).as_bytes())?;
            println!("{}", path.display());
            Ok(())
        }
        Command::Tune { common, records } => {
            let cfg = load_config(&common)?;
            let set = match records {
                Some(path) => load_records(&path)?,
                None => {
                    let &ebn0_db = cfg.channel.ebn0_db.first().ok_or_else(|| {
                        Error::Config("channel.ebn0_db: must list at least one point".into())
                    })?;
                    simulate_point(&cfg, ebn0_db)?
                }
            };
            let out_dir = PathBuf::from(&cfg.output.dir);
            let report = execute_tune(&cfg, &set, &out_dir)?;
            if !report.feasible {
                eprintln!(
                    "tune: no threshold meets BLER <= {:.3e}; best achieved {:.3e}",
                    report.target_max_bler, report.bler
                );
                return Err(Error::Infeasible);
            }
            println!("{}", out_dir.join("tune.json").display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Config(_) | Error::InvalidArgument(_) | Error::MissingStatistic(_) => {
                    ExitCode::from(EXIT_CONFIG)
                }
                Error::Infeasible => ExitCode::from(EXIT_INFEASIBLE),
                Error::Io(_) => ExitCode::from(EXIT_IO),
            }
        }
    }
}

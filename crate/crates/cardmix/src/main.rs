//! Thin command-line front end over the library. Every subcommand maps
//! onto one library call; batch runs go through a JSON manifest.
//!
//! Exit codes: 0 success, 1 validation error, 2 verification criterion
//! failure, 3 internal contract violation.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cardmix::error::Error;
use cardmix::manifest::{self, ExperimentEntry};
use cardmix::process::Family;

#[derive(Parser)]
#[command(
    name = "cardmix",
    version,
    about = "Card-shuffling chains, interaction events, and stopping-rule experiments"
)]
struct Cli {
    /// Run a JSON batch manifest instead of a single subcommand.
    #[arg(long, value_name = "FILE")]
    manifest: Option<PathBuf>,

    /// Output directory for manifest runs.
    #[arg(long, default_value = ".", value_name = "DIR")]
    out_dir: PathBuf,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Sample replicas of a process, emitting event and projection CSVs.
    Simulate {
        #[arg(long)]
        family: String,
        #[arg(long)]
        n: usize,
        /// Sweep parameter for wash1d-long ("1/2" or a decimal).
        #[arg(long)]
        p: Option<String>,
        /// Grid dimension for wash-grid.
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        #[arg(long, default_value_t = 1)]
        replicas: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output stem; writes <out>.events.csv and <out>.projections.csv.
        /// Prints to stdout when absent.
        #[arg(long)]
        out: Option<String>,
    },
    /// Monte Carlo tail of a stopping rule over a time grid.
    Stopping {
        #[arg(long)]
        family: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: Option<String>,
        #[arg(long)]
        dim: Option<usize>,
        /// all-pairs | sequential
        #[arg(long, default_value = "all-pairs")]
        rule: String,
        /// Comma-separated times, e.g. 1,2,5,10.
        #[arg(long, value_delimiter = ',', default_values_t = vec![1usize, 2, 5, 10, 20, 50, 100])]
        t_grid: Vec<usize>,
        /// Also emit the combining-log ratio table over these deck sizes.
        #[arg(long, value_delimiter = ',')]
        n_list: Option<Vec<usize>>,
        #[arg(long, default_value_t = 1000)]
        replicas: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<String>,
    },
    /// Exact separation/TV distances and the stopping tail at small n.
    MixingExact {
        #[arg(long)]
        family: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: Option<String>,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long, default_value_t = 8)]
        t_max: usize,
        #[arg(long)]
        out: Option<String>,
    },
    /// Per-pair interaction-time scaling over a grid of deck sizes.
    Scaling {
        #[arg(long)]
        family: String,
        #[arg(long, value_delimiter = ',')]
        n_list: Vec<usize>,
        #[arg(long)]
        p: Option<String>,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long, default_value_t = 1000)]
        replicas: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<String>,
    },
    /// Exhaustively verify a mutation map over the full path space.
    MutateVerify {
        #[arg(long)]
        family: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        t: usize,
        /// fast (all-pairs) | slow (sequential)
        #[arg(long, default_value = "fast")]
        rule: String,
    },
    /// Print the exact conditional deck law at n=3, t=3 given all pairs
    /// interacted (the nonuniformity counterexample), as exact rationals.
    Counterexample,
    /// Star-factor a permutation, or greedily factor it over a sequence.
    Factorize {
        /// Permutation as "[2,3,1]".
        #[arg(long)]
        perm: String,
        /// Transposition sequence as "1-2,1-3,2-3".
        #[arg(long)]
        seq: Option<String>,
    },
    /// Spanning-prefix vs coupon-collector experiment for random
    /// transposition sequences.
    Spanning {
        #[arg(long, value_delimiter = ',', default_values_t = vec![4usize, 5])]
        n_list: Vec<usize>,
        #[arg(long, default_value_t = 10_000)]
        replicas: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<String>,
    },
    /// Run the full verification suite with pinned seeds.
    Suite {
        /// Run a single criterion (1-12) instead of all.
        #[arg(long)]
        only: Option<usize>,
    },
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InternalContract(_) => ExitCode::from(3),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn run() -> cardmix::Result<ExitCode> {
    let cli = Cli::parse();

    if let Some(path) = &cli.manifest {
        if cli.command.is_some() {
            return Err(Error::Validation(
                "give either --manifest or a subcommand, not both".into(),
            ));
        }
        let bytes = std::fs::read(path)?;
        let manifest = manifest::parse_manifest(&bytes)?;
        let metadata = manifest::run_manifest(&manifest, &bytes, &cli.out_dir)?;
        println!("{}", serde_json::to_string_pretty(&metadata)?);
        return Ok(if metadata.all_ok {
            ExitCode::SUCCESS
        } else {
            ExitCode::from(2)
        });
    }

    let Some(command) = cli.command else {
        return Err(Error::Validation(
            "a subcommand or --manifest is required (see --help)".into(),
        ));
    };

    match command {
        Command::Simulate {
            family,
            n,
            p,
            dim,
            steps,
            replicas,
            seed,
            out,
        } => {
            let entry = ExperimentEntry {
                subcommand: "simulate".into(),
                family: Some(family),
                n: Some(n),
                p,
                dim,
                steps: Some(steps),
                replicas: Some(replicas),
                seed: Some(seed),
                output: out.clone().unwrap_or_default(),
                ..Default::default()
            };
            emit(entry, out)
        }
        Command::Stopping {
            family,
            n,
            p,
            dim,
            rule,
            t_grid,
            n_list,
            replicas,
            seed,
            out,
        } => {
            let entry = ExperimentEntry {
                subcommand: "stopping".into(),
                family: Some(family),
                n: Some(n),
                p,
                dim,
                rule: Some(rule),
                t_grid: Some(t_grid),
                n_list,
                replicas: Some(replicas),
                seed: Some(seed),
                output: out.clone().unwrap_or_default(),
                ..Default::default()
            };
            emit(entry, out)
        }
        Command::MixingExact {
            family,
            n,
            p,
            dim,
            t_max,
            out,
        } => {
            let entry = ExperimentEntry {
                subcommand: "mixing-exact".into(),
                family: Some(family),
                n: Some(n),
                p,
                dim,
                t_max: Some(t_max),
                output: out.clone().unwrap_or_default(),
                ..Default::default()
            };
            emit(entry, out)
        }
        Command::Scaling {
            family,
            n_list,
            p,
            dim,
            replicas,
            seed,
            out,
        } => {
            let entry = ExperimentEntry {
                subcommand: "scaling".into(),
                family: Some(family),
                n_list: Some(n_list),
                p,
                dim,
                replicas: Some(replicas),
                seed: Some(seed),
                output: out.clone().unwrap_or_default(),
                ..Default::default()
            };
            emit(entry, out)
        }
        Command::MutateVerify { family, n, t, rule } => {
            let report = cardmix::mutate::verify_for_family(
                Family::parse(&family)?,
                n,
                t,
                manifest::parse_rule(&rule)?,
            )?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(if report.clean() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            })
        }
        Command::Counterexample => {
            let entry = ExperimentEntry {
                subcommand: "counterexample".into(),
                output: String::new(),
                ..Default::default()
            };
            emit(entry, None)
        }
        Command::Factorize { perm, seq } => {
            let perm: cardmix::Permutation = perm.parse()?;
            print!("{}", manifest::factorize_json(&perm, seq.as_deref())?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Spanning {
            n_list,
            replicas,
            seed,
            out,
        } => {
            let entry = ExperimentEntry {
                subcommand: "spanning".into(),
                n_list: Some(n_list),
                replicas: Some(replicas),
                seed: Some(seed),
                output: out.clone().unwrap_or_default(),
                ..Default::default()
            };
            emit(entry, out)
        }
        Command::Suite { only } => {
            let outcomes = match only {
                Some(id) => vec![cardmix::suite::run_one(id).ok_or_else(|| {
                    Error::Validation(format!("no criterion {id}; valid ids are 1-12"))
                })?],
                None => cardmix::suite::run_all(),
            };
            let mut all = true;
            for o in &outcomes {
                println!("{}", o.line());
                all &= o.passed;
            }
            Ok(if all {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            })
        }
    }
}

/// Execute one entry; write files when an output stem was given, print to
/// stdout otherwise.
fn emit(entry: ExperimentEntry, out: Option<String>) -> cardmix::Result<ExitCode> {
    let files = manifest::execute_entry(&entry)?;
    match out {
        Some(stem) => {
            for (suffix, content) in files {
                let path = format!("{stem}{suffix}");
                if let Some(parent) = std::path::Path::new(&path).parent() {
                    if !parent.as_os_str().is_empty() {
                        std::fs::create_dir_all(parent)?;
                    }
                }
                std::fs::write(&path, content)?;
                eprintln!("wrote {path}");
            }
        }
        None => {
            let multiple = files.len() > 1;
            for (suffix, content) in files {
                if multiple {
                    println!("# {suffix}");
                }
                print!("{content}");
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

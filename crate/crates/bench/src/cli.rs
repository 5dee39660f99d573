//! Command-line interface.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or spec error, 3 attempt
//! cap reached (the partial result is still written).

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use somm::baseline::{random_oversample, smote_oversample, SmoteConfig};
use somm::data::{read_csv, resolve_label, write_csv};
use somm::rng::child_seed;
use somm::sampler::{somm_oversample, SommConfig, SommOutput, SyntheticCount};
use somm::synthetic::{generate, SyntheticFamily, SyntheticSpec};
use somm::{Dataset, Error};

use crate::error::{BenchError, Result};
use crate::report::write_outputs;
use crate::runner::{manifest, run, run_k_sweep, winners_csv};
use crate::spec::{ExperimentSpec, Task};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_ATTEMPT_CAP: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "somm",
    version,
    about = "Synthetic over-sampling using minority and majority neighborhoods, with benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Somm,
    Smote,
    Random,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Over-sample a CSV file; writes the original rows followed by the
    /// synthetic ones.
    Oversample {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "somm")]
        method: Method,
        /// Class to over-sample. Without it every class is brought up to
        /// the largest one.
        #[arg(long)]
        minority_label: Option<String>,
        /// Neighborhood size (default 15 for somm, 5 for smote).
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Synthetic rows to add for --minority-label (default: up to the
        /// size of the rest of the data).
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 50)]
        max_attempts_factor: usize,
    },
    /// Run a diversity experiment described by a JSON spec.
    Diversity {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a classification experiment described by a JSON spec.
    Classify {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Classification over every synthetic family for several SOMM k.
    SweepK {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a synthetic data set as CSV.
    GenSynthetic {
        #[arg(long)]
        family: SyntheticFamily,
        #[arg(long)]
        nmaj: usize,
        #[arg(long)]
        nmin: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit code.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_DATA
        }
    }
}

fn execute(command: Command) -> Result<i32> {
    match command {
        Command::Oversample {
            input,
            out,
            method,
            minority_label,
            k,
            seed,
            n,
            max_attempts_factor,
        } => {
            let data = read_csv(&input)?;
            let label = minority_label
                .map(|l| resolve_label(&data, &l))
                .transpose()?;
            let (result, capped) =
                oversample(&data, method, label, k, seed, n, max_attempts_factor)?;
            write_csv(&result, &out)?;
            if let Some(e) = capped {
                eprintln!("error: {e}; partial result written to {}", out.display());
                return Ok(EXIT_ATTEMPT_CAP);
            }
            Ok(EXIT_OK)
        }
        Command::Diversity { spec, out } => experiment(&spec, &out, Task::Diversity),
        Command::Classify { spec, out } => experiment(&spec, &out, Task::Classification),
        Command::SweepK { spec, out } => {
            let mut spec = ExperimentSpec::from_path(&spec)?;
            spec.task = Task::Classification;
            let sweep = run_k_sweep(&spec)?;
            std::fs::create_dir_all(&out)?;
            for (family, result, _) in &sweep {
                let mut s = spec.clone();
                if let crate::spec::DataSource::Synthetic(src) = &mut s.data_source {
                    src.family = *family;
                }
                write_outputs(&out.join(family.name()), result, &manifest(&s))?;
            }
            std::fs::write(out.join("winners.csv"), winners_csv(&sweep))?;
            Ok(EXIT_OK)
        }
        Command::GenSynthetic {
            family,
            nmaj,
            nmin,
            seed,
            out,
        } => {
            let data = generate(&SyntheticSpec {
                family,
                n_majority: nmaj,
                n_minority: nmin,
                seed,
            })?;
            write_csv(&data, &out)?;
            Ok(EXIT_OK)
        }
    }
}

fn experiment(spec_path: &Path, out: &Path, task: Task) -> Result<i32> {
    let spec = ExperimentSpec::from_path(spec_path)?;
    if spec.task != task {
        return Err(BenchError::Spec(format!(
            "spec task is {:?} but the {} command was used",
            spec.task,
            match task {
                Task::Diversity => "diversity",
                Task::Classification => "classify",
            }
        )));
    }
    let result = run(&spec)?;
    write_outputs(out, &result, &manifest(&spec))?;
    Ok(EXIT_OK)
}

/// Returns the augmented data and, if a class hit the attempt cap, the
/// error (the data then holds the rows produced up to that point).
fn oversample(
    data: &Dataset,
    method: Method,
    label: Option<usize>,
    k: Option<usize>,
    seed: u64,
    n: Option<usize>,
    max_attempts_factor: usize,
) -> Result<(Dataset, Option<Error>)> {
    let one = |class: usize, count: SyntheticCount, seed: u64| -> somm::Result<SommOutput> {
        match method {
            Method::Somm => somm_oversample(
                data,
                class,
                &SommConfig {
                    k: k.unwrap_or(15),
                    n_synthetic: count,
                    max_attempts_factor,
                    seed,
                },
            ),
            Method::Smote => smote_oversample(
                data,
                class,
                &SmoteConfig {
                    k: k.unwrap_or(5),
                    n_synthetic: count,
                    seed,
                },
            ),
            Method::Random => {
                let n = match count {
                    SyntheticCount::Exact(n) => n,
                    SyntheticCount::Auto => {
                        let minority = data.count_of(class);
                        (data.n_rows() - minority)
                            .checked_sub(minority)
                            .ok_or_else(|| {
                                Error::InvalidInput(format!(
                                    "class {class} is not smaller than the rest of the data"
                                ))
                            })?
                    }
                };
                random_oversample(data, class, n, seed)
            }
        }
    };

    let jobs: Vec<(usize, SyntheticCount, u64)> = match label {
        Some(class) => vec![(
            class,
            n.map_or(SyntheticCount::Auto, SyntheticCount::Exact),
            seed,
        )],
        None => {
            if n.is_some() {
                return Err(BenchError::Spec("--n requires --minority-label".into()));
            }
            let counts = data.class_counts();
            let target = counts.iter().copied().max().unwrap_or(0);
            counts
                .iter()
                .enumerate()
                .filter(|&(_, &c)| c > 0 && c < target)
                .map(|(class, &c)| {
                    (
                        class,
                        SyntheticCount::Exact(target - c),
                        child_seed(seed, class as u64),
                    )
                })
                .collect()
        }
    };

    let mut out = data.clone();
    for (class, count, seed) in jobs {
        match one(class, count, seed) {
            Ok(o) => out = out.append(o.synthetic.view(), class)?,
            Err(Error::AttemptCap {
                cap,
                requested,
                partial,
            }) => {
                out = out.append(partial.synthetic.view(), class)?;
                let e = Error::AttemptCap {
                    cap,
                    requested,
                    partial,
                };
                return Ok((
                    out,
                    Some(Error::Class {
                        class,
                        source: Box::new(e),
                    }),
                ));
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok((out, None))
}

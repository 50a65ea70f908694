// SPDX-License-Identifier: Apache-2.0

//! `stochsep` command-line front end.
//!
//! Exit codes: 0 success, 1 usage or input errors, 2 general-position
//! violations, 3 guard-rail rejections.

mod bench;
mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use report::{error_document, exit_code};

#[derive(Parser)]
#[command(name = "stochsep", version, about = "Separable-probability and expected margin of stochastic datasets")]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Add wall-clock timings to the diagnostics (makes output run-dependent).
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Float,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Scan,
    Radial,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LevelArg {
    Gp,
    Sgpp,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchKind {
    Membership,
    Intersection,
    EpsDistant,
    ExpectedDistance,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleWhat {
    Sp,
    Esm,
    Margins,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Random,
    Multipoint,
    Cluster,
    Balls,
}

#[derive(Args)]
pub struct Input {
    /// Dataset JSON file.
    #[arg(long, short)]
    pub input: PathBuf,
}

#[derive(Subcommand)]
pub enum Command {
    /// Check general position (exit 2 on violations).
    Validate {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = LevelArg::Sgpp)]
        level: LevelArg,
    },
    /// Rotate the dataset into SGPP with an exact orthogonal map.
    Transform {
        #[command(flatten)]
        input: Input,
        /// Where to write the transformed dataset (stdout report only when absent).
        #[arg(long, short)]
        output: Option<PathBuf>,
        /// Nudge every coordinate by up to this magnitude first (changes the answer).
        #[arg(long)]
        jitter: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Separable-probability of a point dataset.
    Sp {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
        #[arg(long, value_enum, default_value_t = StrategyArg::Radial)]
        strategy: StrategyArg,
        /// Lift the dimension and candidate-count guard rails.
        #[arg(long)]
        force: bool,
    },
    /// Expected separation-margin of a point dataset.
    Esm {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = Mode::Float)]
        mode: Mode,
        #[arg(long)]
        force: bool,
    },
    /// Separable-probability of a ball/polytope dataset (float).
    SpObjects {
        #[command(flatten)]
        input: Input,
    },
    /// Expected separation-margin of a ball/polytope dataset (float).
    EsmObjects {
        #[command(flatten)]
        input: Input,
    },
    /// Stochastic convex hull queries against the points of the input.
    Sch {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum)]
        kind: SchKind,
        /// Query point as comma-separated coordinates, e.g. `1,1/2`.
        #[arg(long)]
        query: Option<String>,
        /// Query polytope as `;`-separated vertices, e.g. `0,0;1,2`.
        #[arg(long)]
        polytope: Option<String>,
        #[arg(long)]
        eps: Option<String>,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
    },
    /// Brute-force ground truth by instance enumeration.
    Oracle {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = OracleWhat::Sp)]
        what: OracleWhat,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
        /// Lift the 22-location guard rail.
        #[arg(long)]
        force: bool,
    },
    /// Write a seeded dataset.
    Gen {
        #[arg(long, value_enum)]
        kind: GenKind,
        #[arg(long, default_value_t = 3)]
        reds: usize,
        #[arg(long, default_value_t = 3)]
        blues: usize,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = LevelArg::Sgpp)]
        level: LevelArg,
        /// `uniform`, `grid:K` or `const:P`.
        #[arg(long, default_value = "uniform")]
        probs: String,
        /// Cluster radius for `cluster`.
        #[arg(long, default_value = "1/64")]
        eps: String,
        /// Fraction of zero-radius balls for `balls`.
        #[arg(long, default_value_t = 0.0)]
        zero_radius: f64,
        /// Locations per uncertain point for `multipoint`.
        #[arg(long, default_value_t = 3)]
        max_locations: usize,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Candidate counts and wall times over a size ladder.
    Bench {
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 4)]
        reds: usize,
        /// Comma-separated blue counts.
        #[arg(long, default_value = "16,32,64")]
        blues: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = StrategyArg::Radial)]
        strategy: StrategyArg,
        /// Also run both strategies in exact mode and compare.
        #[arg(long)]
        compare: bool,
        /// Print the table as CSV instead of a report.
        #[arg(long)]
        csv: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(k) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            eprintln!("stochsep: cannot set up {k} threads: {e}");
            return ExitCode::from(1);
        }
    }
    let name = commands::name(&cli.command);
    match commands::run(cli.command, cli.timings) {
        Ok(commands::Output::Report(report, code)) => {
            match cli.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&report.to_json()).unwrap()),
                Format::Text => print!("{}", report.to_text()),
            }
            ExitCode::from(code)
        }
        Ok(commands::Output::Raw(text)) => {
            print!("{text}");
            ExitCode::from(0)
        }
        Err(commands::Failure::Engine(e)) => {
            eprintln!("stochsep {name}: {e}");
            println!("{}", serde_json::to_string_pretty(&error_document(name, &e)).unwrap());
            ExitCode::from(exit_code(&e) as u8)
        }
        Err(commands::Failure::Usage(msg)) => {
            eprintln!("stochsep {name}: {msg}");
            ExitCode::from(1)
        }
    }
}

//! Single-binary workbench: class I/O, dimension reports, constructions,
//! online simulations, private learning runs, audits, and batch experiments.
//! Output is machine-readable first (JSON/CSV artifacts), with a short
//! human summary on stdout. Exit code is nonzero iff a verdict failed.

mod artifacts;
mod commands;
mod expconfig;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "closurelab",
    about = "Dimension computations, online learners, and private-learning audits over finite hypothesis classes"
)]
struct Cli {
    /// Parallel worker threads for trial execution (0 = rayon default).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,

    /// Output directory for artifacts.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact VC / Littlestone / threshold dimensions with certificates.
    Dims(DimsArgs),
    /// Compose classes through an aggregator and write the result.
    Compose(ComposeArgs),
    /// Build one of the named class constructions.
    Construct(ConstructArgs),
    /// Online simulations: exhaustive adversary or a seeded replay.
    Online(OnlineArgs),
    /// Run one private-learning training from an experiment config.
    DpLearn(DpLearnArgs),
    /// Privacy/utility/dimension audits.
    Audit(AuditArgs),
    /// Batch generalization experiment from a config file.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
pub struct DimsArgs {
    /// Class file (text format).
    #[arg(long = "class")]
    class: PathBuf,
}

#[derive(Args)]
pub struct ComposeArgs {
    /// Aggregator: a name (and/or/maj/xor/identity) or a file path.
    #[arg(long)]
    aggregator: String,
    /// Class files, one per aggregator input.
    #[arg(long = "class", required = true)]
    classes: Vec<PathBuf>,
    /// Candidate-tuple cap.
    #[arg(long, default_value_t = closurelab::hclass::DEFAULT_COMPOSE_CAP)]
    cap: usize,
}

#[derive(Args)]
pub struct ConstructArgs {
    #[command(subcommand)]
    kind: ConstructKind,
}

#[derive(Subcommand)]
pub enum ConstructKind {
    /// Threshold chain h_i(j) = 1 iff i <= j.
    Chain {
        #[arg(long)]
        t: usize,
    },
    /// The union-tightness pair (at most d1 ones / at most d2 zeros).
    UnionTight {
        #[arg(long)]
        d1: usize,
        #[arg(long)]
        d2: usize,
        #[arg(long)]
        n: usize,
    },
    /// Extend a class with floor(log2 k) fresh points, all patterns.
    Multiunion {
        #[arg(long)]
        class: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Randomized OR-composition lower-bound class.
    OrBlowup {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        seed: u64,
    },
}

#[derive(Args)]
pub struct OnlineArgs {
    #[command(subcommand)]
    mode: OnlineMode,
}

#[derive(Subcommand)]
pub enum OnlineMode {
    /// Exhaustive worst-case adversary against the SOA learner.
    Adversary {
        #[arg(long)]
        class: PathBuf,
        #[arg(long)]
        horizon: usize,
        #[arg(long, default_value_t = closurelab::online::ADVERSARY_NODE_BUDGET)]
        budget: usize,
    },
    /// Replay a random realizable sequence against the SOA learner.
    Replay {
        #[arg(long)]
        class: PathBuf,
        #[arg(long)]
        target_member: usize,
        #[arg(long)]
        rounds: usize,
        #[arg(long)]
        seed: u64,
    },
}

#[derive(Args)]
pub struct DpLearnArgs {
    /// Experiment config file; one training run is executed.
    #[arg(long)]
    config: PathBuf,
}

#[derive(Args)]
pub struct AuditArgs {
    #[command(subcommand)]
    kind: AuditKind,
}

#[derive(Subcommand)]
pub enum AuditKind {
    /// Exhaustive exact DP check of the exponential mechanism over all
    /// neighboring samples up to a length cap.
    ExpMech {
        #[arg(long)]
        class: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
        #[arg(long, default_value_t = 2)]
        max_sample_len: usize,
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
    },
    /// Mechanism tail bound vs exact tail vs Monte-Carlo frequency.
    Utility {
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Monte-Carlo privacy audit of the relabel+learn pipeline on a tiny
    /// instance, plus a planted non-private control.
    RelabelMc {
        #[arg(long)]
        class: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 4.0)]
        eps: f64,
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
    },
    /// Both directions of the Littlestone/threshold exponential relation.
    Shelah {
        #[arg(long)]
        class: PathBuf,
    },
    /// Composition dimension survey against the closure bounds.
    Survey {
        #[arg(long)]
        aggregator: String,
        #[arg(long = "class", required = true)]
        classes: Vec<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        oconst: f64,
    },
    /// OR-blowup threshold lower bound and the biclique certificate.
    OrBlowup {
        #[arg(long)]
        t: usize,
        #[arg(long, default_value_t = 1)]
        seeds: u64,
        #[arg(long)]
        seed: u64,
    },
    /// All-ones submatrix certificate on a class file.
    Biclique {
        #[arg(long)]
        class: PathBuf,
        #[arg(long)]
        k: usize,
    },
}

#[derive(Args)]
pub struct ExperimentArgs {
    #[arg(long)]
    config: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build_global()
        {
            eprintln!("warning: could not size thread pool: {e}");
        }
    }
    let result: Result<bool> = match cli.command {
        Command::Dims(args) => commands::dims(&args, &cli.out),
        Command::Compose(args) => commands::compose(&args, &cli.out),
        Command::Construct(args) => commands::construct(&args, &cli.out),
        Command::Online(args) => commands::online(&args, &cli.out),
        Command::DpLearn(args) => commands::dp_learn(&args, &cli.out),
        Command::Audit(args) => commands::audit(&args, &cli.out),
        Command::Experiment(args) => commands::experiment(&args, &cli.out),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("FAIL: at least one verdict failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

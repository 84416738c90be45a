mod commands;
mod input;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "kframe", version, about = "Finite Kripke frame workbench")]
struct Cli {
    /// Seed for every random choice made by the command.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Largest n·k for exhaustive valuation search.
    #[arg(long, global = true, default_value_t = kframe::semantics::DEFAULT_CAP)]
    cap: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Args)]
pub struct FormulaArgs {
    /// Formula text; may be repeated.
    #[arg(long = "formula", short = 'f')]
    inline: Vec<String>,
    /// File with one formula per line; `#` starts a comment.
    #[arg(long = "formula-file")]
    file: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Parse formulas and print them in canonical form.
    Parse {
        #[command(flatten)]
        formulas: FormulaArgs,
    },
    /// Worlds of a model where each formula holds.
    Modelcheck {
        #[arg(long)]
        frame: PathBuf,
        #[arg(long)]
        val: PathBuf,
        #[command(flatten)]
        formulas: FormulaArgs,
    },
    /// Frame validity by exhaustive valuation search.
    Valid {
        #[arg(long)]
        frame: PathBuf,
        #[command(flatten)]
        formulas: FormulaArgs,
    },
    /// Coarsest tuned refinement of a partition (default: the trivial one).
    Refine {
        #[arg(long)]
        frame: PathBuf,
        #[arg(long, conflicts_with = "val")]
        partition: Option<String>,
        /// Start from the partition induced by a valuation's sets.
        #[arg(long)]
        val: Option<PathBuf>,
    },
    /// Length of the longest chain of clusters.
    Height {
        #[arg(long)]
        frame: PathBuf,
    },
    /// Least m with the union relation m-transitive, if any.
    Degree {
        #[arg(long)]
        frame: PathBuf,
    },
    /// Clusters and the order between them.
    Skeleton {
        #[arg(long)]
        frame: PathBuf,
    },
    /// Sum of summands over an index frame.
    Sum {
        #[arg(long)]
        index: PathBuf,
        #[arg(long, num_args = 1..)]
        summands: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the world-to-index map here.
        #[arg(long)]
        map: Option<PathBuf>,
    },
    /// Lexicographic sum; the index modalities come first.
    Lexsum {
        #[arg(long)]
        index: PathBuf,
        #[arg(long, num_args = 1..)]
        summands: Vec<PathBuf>,
        /// Expected split, e.g. "v:a;h:b".
        #[arg(long)]
        split: Option<String>,
        /// Use the single summand at every index world.
        #[arg(long)]
        product: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        map: Option<PathBuf>,
    },
    /// Staged tuned partition of a sum built from a base partition.
    Transfer {
        #[arg(long)]
        index: PathBuf,
        #[arg(long, num_args = 1..)]
        summands: Vec<PathBuf>,
        /// Base partition of the sum worlds (default: trivial).
        #[arg(long)]
        partition: Option<String>,
    },
    /// Lexicographic cover of a rooted frame and its verification.
    Cover {
        #[arg(long)]
        frame: PathBuf,
        #[arg(long)]
        split: String,
        #[arg(long)]
        root: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        map: Option<PathBuf>,
    },
    /// Interaction conditions between vertical and horizontal modalities.
    PhiCheck {
        #[arg(long)]
        frame: PathBuf,
        #[arg(long)]
        split: String,
    },
    /// Rewrite formulas: reflexive closure, relativization, or bounded-step diamonds over an alphabet.
    Translate {
        #[arg(long, value_enum)]
        mode: Mode,
        #[command(flatten)]
        formulas: FormulaArgs,
        /// Relativizing formula.
        #[arg(long)]
        xi: Option<String>,
        #[arg(long)]
        m: Option<usize>,
        /// Comma-separated modalities for `--mode m` (default: those of the formula).
        #[arg(long)]
        alphabet: Option<String>,
    },
    /// Defect-driven finite subalgebra construction and its verifiers.
    Qes {
        #[arg(long)]
        frame: PathBuf,
        #[arg(long)]
        modality: Option<String>,
        /// Generating sets, in the valuation file format.
        #[arg(long)]
        generators: Option<PathBuf>,
        /// Chain the construction through every modality.
        #[arg(long, conflicts_with = "modality")]
        all: bool,
    },
    /// Run a property suite on seeded random frames.
    Suite(SuiteArgs),
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Mode {
    Reflexive,
    Relativize,
    M,
}

#[derive(Args)]
pub struct SuiteArgs {
    /// One of the suite names, or `all`.
    name: String,
    /// JSON file with experiment settings; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    frames: Option<usize>,
    #[arg(long)]
    world_bound: Option<usize>,
    #[arg(long)]
    modality_bound: Option<usize>,
    #[arg(long)]
    density: Option<f64>,
    #[arg(long)]
    variable_bound: Option<usize>,
    #[arg(long)]
    depth_bound: Option<usize>,
    #[arg(long)]
    sequential: bool,
}

/// What a command prints and whether everything it checked held.
pub struct Outcome {
    pub json: serde_json::Value,
    pub text: String,
    pub ok: bool,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<kframe::Error>() {
        Some(kframe::Error::CapExceeded { .. } | kframe::Error::BudgetExceeded { .. }) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = commands::Ctx {
        seed: cli.seed,
        cap: cli.cap,
    };
    match commands::run(&ctx, cli.command) {
        Ok(out) => {
            let text = match cli.format {
                Format::Json => format!("{}\n", serde_json::to_string_pretty(&out.json).expect("values serialize")),
                Format::Text => out.text,
            };
            // A closed pipe (e.g. `| head`) is not an error.
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(text.as_bytes()).and_then(|()| stdout.flush());
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

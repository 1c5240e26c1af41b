//! `ordtree`: JSON in, one JSON report out.
//!
//! Exit codes: 0 when a verdict is produced, 2 on input errors (unknown
//! command, malformed or invalid input), 3 when a budget, cap or inspection
//! horizon is exceeded.

mod commands;
mod report;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ordtree::{RankMode, TVariant};

use commands::Ctx;
use report::{CliError, Report};

#[derive(Parser)]
#[command(name = "ordtree", version, about = "Ordinals, tagged trees, scattered orders and their games")]
struct Cli {
    #[command(flatten)]
    flags: Flags,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Flags {
    /// Re-check the verdict with an independent oracle.
    #[arg(long, global = true)]
    verify: bool,
    /// Indent the JSON report.
    #[arg(long, global = true)]
    pretty: bool,
    /// Rank budget as an ordinal in JSON.
    #[arg(long, global = true, value_name = "CNF_JSON")]
    budget: Option<String>,
    /// Rounds of the back-and-forth construction.
    #[arg(long, global = true)]
    rounds: Option<usize>,
    /// Seed for randomized presentations.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Size cap: probe window, bound search limit or search budget.
    #[arg(long, global = true)]
    cap: Option<usize>,
    /// Add wall-clock time to the report.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Strict,
    Reflexive,
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    AsWritten,
    DifferModI,
}

#[derive(Subcommand)]
enum Command {
    /// Doubling rank of a scattered order term.
    Rank { term: PathBuf },
    /// Whether a term is scattered.
    Scattered { term: PathBuf },
    /// Colours every point of a term by its character.
    CanonColour { term: PathBuf },
    /// Cases of a cut of a term.
    CutClassify { term: PathBuf, cut: PathBuf },
    /// Back-and-forth between two coloured order terms.
    Iso {
        a: PathBuf,
        b: PathBuf,
        /// Include a per-round log.
        #[arg(long)]
        trace: bool,
        /// Use the square-root schedule instead of strict alternation.
        #[arg(long)]
        square: bool,
    },
    /// Whether a node set is a front of a tree, with a depth witness.
    Front { tree: PathBuf, nodes: PathBuf },
    /// Depth rank of every node of a tagged tree.
    TreeRank {
        tree: PathBuf,
        #[arg(long, value_enum, default_value = "strict")]
        mode: Mode,
    },
    /// Strongest subtree relation from the first tree to the second.
    TreeCompare {
        t1: PathBuf,
        t2: PathBuf,
        #[arg(long)]
        mu: Option<usize>,
    },
    /// Solves the game in which PlayerI must reach the target nodes.
    Game { tree: PathBuf, target: PathBuf },
    /// Homogeneous subtree or diagonal counterexample for a colouring.
    Homogenize { tree: PathBuf, colouring: PathBuf },
    /// Subtree on which node labels depend only on depth.
    LevelHomogenize { tree: PathBuf, values: PathBuf },
    /// Least bound on node values achievable by a subtree.
    BoundHomogenize {
        tree: PathBuf,
        values: PathBuf,
        #[arg(long, default_value_t = 0)]
        mu: usize,
    },
    /// First index of a cover that PlayerI can force.
    CoverHomogenize { tree: PathBuf, cover: PathBuf },
    /// Invariants of a smallness family.
    IdealCheck {
        family: PathBuf,
        #[arg(long)]
        lam: Option<u32>,
    },
    /// Largest family of functions with small difference sets.
    TInvariant {
        family: PathBuf,
        function: PathBuf,
        #[arg(long, value_enum, default_value = "as-written")]
        variant: Variant,
    },
    /// Almost-disjoint families.
    #[command(subcommand)]
    Ad(AdCommand),
}

#[derive(Subcommand)]
enum AdCommand {
    /// Emits the diagonal set.
    Extend {
        family: PathBuf,
        #[arg(long)]
        emit: usize,
        /// Comma-separated set indices; defaults to the family order.
        #[arg(long, value_delimiter = ',')]
        order: Option<Vec<usize>>,
    },
    /// Cuts after which the sets are pairwise disjoint.
    Disjointify { family: PathBuf },
}

fn run(cli: &Cli) -> commands::Answer {
    let ctx = Ctx {
        verify: cli.flags.verify,
        seed: cli.flags.seed,
        cap: cli.flags.cap,
        rounds: cli.flags.rounds,
        budget: cli.flags.budget.clone(),
    };
    match &cli.command {
        Command::Rank { term } => commands::rank(&ctx, term),
        Command::Scattered { term } => commands::scattered(&ctx, term),
        Command::CanonColour { term } => commands::canon_colour(&ctx, term),
        Command::CutClassify { term, cut } => commands::cut_classify(&ctx, term, cut),
        Command::Iso { a, b, trace, square } => commands::iso(&ctx, a, b, *trace, *square),
        Command::Front { tree, nodes } => commands::front(&ctx, tree, nodes),
        Command::TreeRank { tree, mode } => {
            let mode = match mode {
                Mode::Strict => RankMode::Strict,
                Mode::Reflexive => RankMode::Reflexive,
            };
            commands::tree_rank(&ctx, tree, mode)
        }
        Command::TreeCompare { t1, t2, mu } => commands::tree_compare(&ctx, t1, t2, *mu),
        Command::Game { tree, target } => commands::game(&ctx, tree, target),
        Command::Homogenize { tree, colouring } => commands::homogenize_cmd(&ctx, tree, colouring),
        Command::LevelHomogenize { tree, values } => commands::level_homogenize_cmd(&ctx, tree, values),
        Command::BoundHomogenize { tree, values, mu } => commands::bound_homogenize_cmd(&ctx, tree, values, *mu),
        Command::CoverHomogenize { tree, cover } => commands::cover_homogenize_cmd(&ctx, tree, cover),
        Command::IdealCheck { family, lam } => commands::ideal_check(&ctx, family, *lam),
        Command::TInvariant {
            family,
            function,
            variant,
        } => {
            let variant = match variant {
                Variant::AsWritten => TVariant::AsWritten,
                Variant::DifferModI => TVariant::DifferModI,
            };
            commands::t_invariant(&ctx, family, function, variant)
        }
        Command::Ad(AdCommand::Extend { family, emit, order }) => {
            commands::ad_extend_cmd(&ctx, family, *emit, order.clone())
        }
        Command::Ad(AdCommand::Disjointify { family }) => commands::ad_disjointify_cmd(&ctx, family),
    }
}

fn emit(value: &impl serde::Serialize, pretty: bool) {
    let text = if pretty {
        serde_json::to_string_pretty(value)
    } else {
        serde_json::to_string(value)
    }
    .expect("serializable");
    println!("{text}");
}

fn main() {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let pretty = argv.iter().any(|a| a == "--pretty");
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                e.exit();
            }
            let err = match e.kind() {
                ErrorKind::InvalidSubcommand | ErrorKind::MissingSubcommand => CliError::UnknownCommand {
                    message: e.render().to_string(),
                },
                _ => CliError::InvalidInput {
                    detail: serde_json::json!({ "arguments": e.render().to_string() }),
                },
            };
            emit(&serde_json::json!({ "command": argv, "error": err.to_json() }), pretty);
            std::process::exit(err.exit_code());
        }
    };
    let start = Instant::now();
    match run(&cli) {
        Ok((verdict, verification)) => {
            let report = Report {
                command: argv,
                verdict,
                verification,
                timing_ms: cli.flags.timing.then(|| start.elapsed().as_millis() as u64),
            };
            emit(&report, cli.flags.pretty);
        }
        Err(err) => {
            emit(&serde_json::json!({ "command": argv, "error": err.to_json() }), cli.flags.pretty);
            std::process::exit(err.exit_code());
        }
    }
}

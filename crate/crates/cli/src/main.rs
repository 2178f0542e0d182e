use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

use commands::Failure;

/// Exact elimination in classical groups, spinor norms and z-class counts.
#[derive(Parser, Debug)]
#[command(name = "elimkit", version)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Emit::Text)]
    emit: Emit,
    /// Seed for the SplitMix64 sampling stream.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Emit {
    Text,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct GroupArgs {
    /// gl | sl | gsp | sp | go-even | o-even | go-odd | o-odd | u
    #[arg(long)]
    pub kind: String,
    /// Rank `l` for the form groups, dimension `n` for gl, sl and u.
    #[arg(long = "l", visible_alias = "n")]
    pub size: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpinorMethod {
    Elim,
    Wall,
    Reflect,
    All,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesArg {
    Closed,
    Real,
    Fq,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a group element as left word * diagonal * right word.
    Decompose {
        #[command(flatten)]
        group: GroupArgs,
        /// Field, e.g. `p=7`, `q=9`, `p=3,m=2`, `rational` (default: from the input file).
        #[arg(long)]
        field: Option<String>,
        /// Matrix JSON file.
        #[arg(long = "in")]
        input: PathBuf,
        /// Where to write the decomposition text.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a decomposition file against a matrix.
    Verify {
        #[arg(long)]
        kind: Option<String>,
        #[arg(long = "l", visible_alias = "n")]
        size: Option<usize>,
        #[arg(long)]
        field: Option<String>,
        /// Matrix JSON file.
        #[arg(long = "in")]
        input: PathBuf,
        /// Decomposition text written by `decompose`.
        #[arg(long)]
        word: PathBuf,
    },
    /// Spinor norm of an orthogonal matrix.
    Spinor {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        field: Option<String>,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = SpinorMethod::All)]
        method: SpinorMethod,
    },
    /// Enumerate monic irreducible self-U-reciprocal polynomials over GF(q^2).
    Polys {
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 4)]
        dmax: usize,
        /// Self-U-reciprocal enumeration (the only mode).
        #[arg(long, default_value_t = true)]
        self_u: bool,
    },
    /// z-class counts from generating functions.
    Zcount {
        #[arg(long, value_enum, conflicts_with_all = ["u_compact", "u_lorentz"])]
        series: Option<SeriesArg>,
        #[arg(long, default_value_t = 10)]
        terms: usize,
        /// Count for the compact unitary group U(n+1, 0).
        #[arg(long, conflicts_with = "u_lorentz")]
        u_compact: Option<usize>,
        /// Counts for U(n, 1).
        #[arg(long)]
        u_lorentz: Option<usize>,
    },
    /// Brute-force conjugacy classes and z-classes of a small group.
    Zbrute {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        q: u64,
        /// Raise the order cap for the large rows.
        #[arg(long)]
        deep: bool,
        /// Cluster by explicit search for conjugating elements.
        #[arg(long)]
        search: bool,
    },
    /// Time decompositions of random elements; CSV per configuration.
    Bench {
        #[arg(long)]
        kind: Option<String>,
        #[arg(long = "l", visible_alias = "n")]
        size: Option<usize>,
        #[arg(long)]
        field: Option<String>,
        /// Random elements per configuration.
        #[arg(long, default_value_t = 100)]
        words: usize,
    },
}

fn run(cli: Cli) -> Result<String, Failure> {
    if let Some(n) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    let emit = cli.emit;
    match cli.command {
        Command::Decompose { group, field, input, out } => commands::decompose(&group, field.as_deref(), &input, out.as_deref(), emit),
        Command::Verify { kind, size, field, input, word } => {
            commands::verify(kind.as_deref(), size, field.as_deref(), &input, &word, emit)
        }
        Command::Spinor { group, field, input, method } => commands::spinor(&group, field.as_deref(), &input, method, emit),
        Command::Polys { q, dmax, self_u } => commands::polys(q, dmax, self_u, emit),
        Command::Zcount { series, terms, u_compact, u_lorentz } => commands::zcount(series, terms, u_compact, u_lorentz, emit),
        Command::Zbrute { group, q, deep, search } => commands::zbrute(&group, q, deep, search, emit),
        Command::Bench { kind, size, field, words } => {
            commands::bench(kind.as_deref(), size, field.as_deref(), words, cli.seed, emit)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            if let Some(out) = f.stdout() {
                print!("{out}");
            }
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

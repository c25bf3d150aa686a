//! `mswa`: compile, evaluate, analyze and train weighted multiset automata.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 invalid input, 3 resource
//! limit, 4 numeric or degenerate model.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use mswa::{Error, ErrorClass};

#[derive(Debug, Parser)]
#[command(name = "mswa", version, about = "Weighted multiset automata toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse an expression and print its canonical form and mc-validity.
    Parse(ParseArgs),
    /// Compile an mc-regular expression to an automaton file.
    Compile(CompileArgs),
    /// Weigh multisets with a stored automaton.
    Weight(WeightArgs),
    /// Cycle structure, characteristic equations and generating set.
    Analyze(AnalyzeArgs),
    /// Learn weights from multiset data.
    Train(TrainArgs),
    /// Draw multisets from a real-weighted automaton.
    Sample(SampleArgs),
    /// Reduce a DIMACS CNF formula to a multiset membership question.
    ReduceSat(ReduceSatArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Expression text.
    #[arg(short = 'e', long = "expr")]
    expr: Option<String>,
    /// File holding the expression.
    #[arg(short = 'f', long = "file")]
    file: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ParseArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SemiringName {
    Real,
    Rational,
    Boolean,
    Viterbi,
    Log,
}

impl SemiringName {
    fn as_str(self) -> &'static str {
        match self {
            SemiringName::Real => "real",
            SemiringName::Rational => "rational",
            SemiringName::Boolean => "boolean",
            SemiringName::Viterbi => "viterbi",
            SemiringName::Log => "log",
        }
    }
}

#[derive(Debug, Args)]
struct CompileArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, value_enum, default_value_t = SemiringName::Real)]
    semiring: SemiringName,
    /// Extra alphabet symbols beyond those in the expression, comma separated.
    #[arg(long, value_delimiter = ',')]
    alphabet: Vec<String>,
    /// Output file; standard output when absent.
    #[arg(short = 'o', long = "out")]
    out: Option<PathBuf>,
    /// Also write a Graphviz rendering.
    #[arg(long)]
    dot: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct WeightArgs {
    /// Automaton file.
    #[arg(short = 'a', long = "automaton")]
    automaton: PathBuf,
    /// A multiset as whitespace-separated symbols; repeatable.
    #[arg(short = 'w', long = "multiset", allow_hyphen_values = true)]
    multisets: Vec<String>,
    /// Data file with one multiset per line.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Require the automaton to use this semiring.
    #[arg(long, value_enum)]
    semiring: Option<SemiringName>,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    /// Automaton file.
    automaton: PathBuf,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    dot: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TrainMode {
    Skeleton,
    Free,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[arg(long, value_enum)]
    mode: TrainMode,
    /// File holding the skeleton expression (skeleton mode).
    #[arg(long, required_if_eq("mode", "skeleton"), conflicts_with = "states")]
    regex: Option<PathBuf>,
    /// Number of states (free mode).
    #[arg(long, required_if_eq("mode", "free"))]
    states: Option<usize>,
    /// Training data, one multiset per line.
    #[arg(long)]
    data: PathBuf,
    /// Size bound N; defaults to the largest data multiset.
    #[arg(long)]
    bound: Option<usize>,
    #[arg(long, default_value_t = 1e-2)]
    lr: f64,
    #[arg(long, default_value_t = 100)]
    epochs: usize,
    #[arg(long, default_value_t = 1.0)]
    penalty_start: f64,
    #[arg(long, default_value_t = 1.1)]
    penalty_growth: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    batch_size: Option<usize>,
    /// Learned automaton; standard output when absent.
    #[arg(short = 'o', long = "out")]
    out: Option<PathBuf>,
    /// Loss curve CSV.
    #[arg(long)]
    curve: Option<PathBuf>,
    /// Accepted for uniformity; training is real-valued only.
    #[arg(long, value_enum)]
    semiring: Option<SemiringName>,
}

#[derive(Debug, Args)]
struct SampleArgs {
    /// Automaton file (real or rational weights).
    #[arg(short = 'a', long = "automaton")]
    automaton: PathBuf,
    /// Size bound N.
    #[arg(long)]
    bound: usize,
    #[arg(short = 'n', long, default_value_t = 1)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short = 'o', long = "out")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ReduceSatArgs {
    /// DIMACS CNF file.
    cnf: PathBuf,
    /// Decide membership of the target multiset and compare with the
    /// truth table.
    #[arg(long)]
    check: bool,
    #[arg(long)]
    json: bool,
}

/// An error with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e.class() {
            ErrorClass::Validation => 2,
            ErrorClass::Resource => 3,
            ErrorClass::Numeric => 4,
            ErrorClass::Io => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }

    pub fn validation(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Parse(a) => commands::parse(a),
        Command::Compile(a) => commands::compile(a),
        Command::Weight(a) => commands::weight(a),
        Command::Analyze(a) => commands::analyze(a),
        Command::Train(a) => commands::train(a),
        Command::Sample(a) => commands::sample(a),
        Command::ReduceSat(a) => commands::reduce_sat(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

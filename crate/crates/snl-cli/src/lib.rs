//! The `snl` command-line tool. [`run`] parses arguments, executes one subcommand
//! and returns the output streams and exit code, so the binary and the tests share
//! one code path.
//!
//! Exit codes: 0 success, 1 property failure, 2 usage error, 3 budget abort.
//! Data goes to standard output as TSV; summaries go to standard error.

pub mod acceptance;
pub mod commands;
pub mod compare;
pub mod oracle;

use std::fmt;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use snl_check::DEFAULT_DNF_BUDGET;
use snl_encode::Problem;
use snl_eval::DEFAULT_BUDGET;
use snl_opt::Method;
use snl_reduce::Gadget;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PROPERTY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(m: impl fmt::Display) -> Self {
        CliError { code: EXIT_USAGE, message: m.to_string() }
    }

    pub fn property(m: impl fmt::Display) -> Self {
        CliError { code: EXIT_PROPERTY, message: m.to_string() }
    }

    pub fn budget(m: impl fmt::Display) -> Self {
        CliError { code: EXIT_BUDGET, message: m.to_string() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// What a run printed and how it ended.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct Output {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Output {
    pub fn out(&mut self, s: impl AsRef<str>) {
        self.stdout.push_str(s.as_ref());
    }

    pub fn err(&mut self, s: impl AsRef<str>) {
        self.stderr.push_str(s.as_ref());
        if !self.stderr.ends_with('\n') {
            self.stderr.push('\n');
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "snl", version, about = "Syntactic NL toolkit: sentences, encoders, reductions, optimizers and oracles")]
pub struct Cli {
    /// Seed for every randomized corpus; the SNL_SEED environment variable overrides it.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for instance-level parallelism (default: one per core).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Extra diagnostics on standard error.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Classify a sentence against the SNL, μSNL and SNLω requirements.
    Check {
        sentence: PathBuf,
        /// Domain structure, needed for the binary and Ω checks.
        #[arg(long)]
        domain: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_DNF_BUDGET)]
        dnf_budget: usize,
        /// Largest successor offset allowed on clock terms (default: the largest used).
        #[arg(long)]
        offset_bound: Option<u64>,
    },
    /// Evaluate a sentence against a given witness or by witness search.
    Eval {
        #[arg(long)]
        sentence: PathBuf,
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        domain: PathBuf,
        #[arg(long, conflicts_with = "search", required_unless_present = "search")]
        witness: Option<PathBuf>,
        #[arg(long)]
        search: bool,
        /// Search node budget.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// Where to write the witness found by search.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Encode a problem instance into a directory of sentence, structures and witness.
    Encode {
        problem: Problem,
        instance: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        /// Source and target vertex for the reachability problems, as `s,t`.
        #[arg(long, value_parser = parse_st)]
        st: Option<(usize, usize)>,
    },
    /// Apply one reduction pass.
    Reduce {
        pass: Pass,
        /// A file, or an encoding directory for the grounding passes.
        input: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long, default_value_t = Gadget::Corrected)]
        gadget: Gadget,
        /// Write the approximation-preserving trace of the step here.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Optimize: exhaustively over an encoding, greedily for MAX-UK, or by the step-wise scheme.
    Solve {
        #[arg(long)]
        method: Method,
        /// Encoding directory, or a directory with r.snl, r_minus.snl and tau.json.
        #[arg(long)]
        spec: PathBuf,
        /// Override the budget cap of the MAX-UK step specification.
        #[arg(long)]
        cap: Option<u64>,
        /// Witness budget for the exact method.
        #[arg(long, default_value_t = 1 << 20)]
        budget: u64,
        /// Write the full result as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the reference solver on one instance.
    Oracle {
        problem: Problem,
        instance: PathBuf,
        #[arg(long)]
        json: bool,
        #[arg(long, value_parser = parse_st)]
        st: Option<(usize, usize)>,
    },
    /// Differential test of encoder and evaluator against the oracle on a seeded corpus.
    Compare {
        problem: Problem,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 8)]
        max_n: usize,
        /// Enumerate every graph on this many vertices instead of sampling.
        #[arg(long)]
        exhaustive_n: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Chain MAX-3SAT through MAX-2SAT and weighted cut to MAX-CUT and check the optimum maps back.
    Pipeline {
        instance: PathBuf,
        #[arg(long, default_value = "max3sat")]
        from: String,
        #[arg(long, default_value = "maxcut")]
        to: String,
        /// Directory for the intermediate instances and the trace.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Approximation ratios of an optimizer on a seeded corpus.
    Bench {
        #[arg(long)]
        method: Method,
        #[arg(long)]
        problem: Problem,
        #[arg(long, default_value_t = 500)]
        count: usize,
        #[arg(long, default_value_t = 12)]
        max_n: usize,
        #[arg(long, default_value_t = 30)]
        a_max: u64,
        #[arg(long, default_value_t = 60)]
        b_max: u64,
        #[arg(long, default_value_t = 1 << 16)]
        budget: u64,
    },
    /// Run a named test suite.
    Report {
        suite: String,
        /// Run a single criterion of the suite.
        #[arg(long)]
        only: Option<String>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Pass {
    #[value(name = "2sat-to-bcsp2")]
    TwosatToBcsp2,
    Polarize,
    GroundBcsp2,
    GroundMax2sat,
    Max3satToMax2sat,
    Max2satToWtdcut,
    WtdcutToMaxcut,
}

fn parse_st(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected `s,t`")?;
    let num = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("`{x}`: {e}"));
    Ok((num(a)?, num(b)?))
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let mut o = Output::default();
    let mut cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                o.err(text);
                o.code = EXIT_USAGE;
            } else {
                o.out(text);
            }
            return o;
        }
    };
    if let Ok(v) = std::env::var("SNL_SEED") {
        match v.trim().parse() {
            Ok(seed) => cli.seed = seed,
            Err(_) => {
                o.err(format!("error: SNL_SEED=`{v}` is not a 64-bit unsigned integer"));
                o.code = EXIT_USAGE;
                return o;
            }
        }
    }
    let result = match cli.jobs {
        Some(0) => Err(CliError::usage("--jobs must be at least 1")),
        Some(j) => match rayon::ThreadPoolBuilder::new().num_threads(j).build() {
            Ok(pool) => pool.install(|| commands::dispatch(&cli, &mut o)),
            Err(e) => Err(CliError::usage(e)),
        },
        None => commands::dispatch(&cli, &mut o),
    };
    if let Err(e) = result {
        o.err(format!("error: {e}"));
        o.code = e.code;
    }
    o
}

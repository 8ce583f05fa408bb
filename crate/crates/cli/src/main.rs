mod inputs;
mod output;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

const BODY_HELP: &str = "\
Bodies (--body, --body2):
  simplex:<n>              standard simplex conv{0, e_1, .., e_n}
  cube:<n>[:<h>]           [-h, h]^n (h defaults to 1)
  ball:<n>[:<r>]           centered Euclidean ball
  cross:<n>                cross-polytope conv{±e_i}
  random:<n>:<v>:<seed>    hull of v seeded points on the unit sphere
  @file.json               body JSON ({\"dim\", \"form\": \"vpolytope\", \"vertices\"} etc.)

Densities (--density, --weight):
  lebesgue | gaussian | exp-norm | exp-sq
  ring:eps=<e>,delta=<d> | wedge:theta=<t>
  indicator:<body> | cone:<body>,r=<r>
  <spec>|<spec>:split=<k>  product, first factor on the leading k axes

Functions (--fn):
  indicator:<body> | cone:<r>:<levels>:<body> | @file.json

Subspaces (--subspace, --subspace2): comma-separated one-based axes, e.g. 1,3.

Exit codes: 0 ok, 1 unexpected violation or failed suite row,
2 usage or input error, 3 a hypothesis failed its audit.
Set RSLAB_THREADS to cap the worker pool.";

#[derive(Parser, Debug)]
#[command(name = "rslab", version, about = "Numerical checks of Rogers-Shephard type inequalities", after_help = BODY_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one verification.
    Verify {
        family: Family,
        #[command(flatten)]
        args: VerifyArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Run a named battery and write one CSV row per check.
    Suite {
        /// equality-battery, soundness-sweep, counterexamples or constants
        name: String,
        #[command(flatten)]
        cfg: CfgArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Repeat a verification over a parameter range.
    Sweep {
        family: Family,
        /// name=<start>:<end>:<steps>; names: scale, shift.<i>, omega.<i>, r, x, n, m, p, q, samples
        #[arg(long)]
        param: String,
        #[command(flatten)]
        args: VerifyArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Reproduce one of the known counterexamples.
    Counterexample {
        /// ring, wedge or parallelogram
        id: String,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        /// Comma-separated wedge angles.
        #[arg(long, value_delimiter = ',')]
        thetas: Option<Vec<f64>>,
        /// Comma-separated parallelogram tilts.
        #[arg(long, value_delimiter = ',')]
        alphas: Option<Vec<f64>>,
        #[command(flatten)]
        cfg: CfgArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Write a body or function as JSON.
    Export {
        #[arg(long, conflicts_with = "fn_spec")]
        body: Option<String>,
        #[arg(long = "fn")]
        fn_spec: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Family {
    DifferenceBody,
    Shifted,
    Ck,
    SectionProjection,
    Functional,
    Lemma,
    Alpha,
}

#[derive(Args, Clone, Debug, Default)]
struct CfgArgs {
    #[arg(long)]
    seed: Option<u64>,
    /// Monte-Carlo sample count.
    #[arg(long)]
    samples: Option<usize>,
    /// Quadrature nodes per axis.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    theta_order: Option<usize>,
    #[arg(long)]
    theta_min: Option<f64>,
}

#[derive(Args, Clone, Debug, Default)]
struct VerifyArgs {
    #[arg(long)]
    variant: Option<String>,
    #[arg(long)]
    body: Option<String>,
    #[arg(long)]
    body2: Option<String>,
    #[arg(long)]
    density: Option<String>,
    /// Extra weight density (g) for the functional checks.
    #[arg(long)]
    weight: Option<String>,
    #[arg(long = "fn")]
    fn_spec: Option<String>,
    /// Peak of a cone-shaped --fn, comma-separated (default: origin).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    apex: Option<Vec<f64>>,
    #[arg(long)]
    subspace: Option<String>,
    #[arg(long)]
    subspace2: Option<String>,
    #[arg(long)]
    r: Option<u32>,
    /// Concavity exponent of --fn.
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    x: Option<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    omega: Option<Vec<f64>>,
    #[command(flatten)]
    cfg: CfgArgs,
}

#[derive(Args, Clone, Debug, Default)]
struct OutArgs {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Also write a matplotlib script plotting the CSV output.
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

impl Format {
    fn name(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Err(e) = run::configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    match run::dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

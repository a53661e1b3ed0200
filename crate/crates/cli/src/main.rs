//! `spreadkit` command-line front end.

mod commands;
mod report;
mod verify;

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use spreadkit::{Face, Rational};

use commands::{rational_arg, usage, CliResult, DecomposeArgs, MonteCarloArgs};
use report::Report;
use verify::{collect_inputs, parse_range, VerifyArgs};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Parser, Debug)]
#[command(
    name = "spreadkit",
    version,
    about = "Spread approximations and t-intersecting families in simplicial complexes"
)]
struct Cli {
    /// Output format. JSON is canonical: sorted keys, reals at 12 significant digits.
    #[arg(long, value_enum, default_value = "json", global = true)]
    format: Format,

    /// Worker threads (0 = one per core).
    #[arg(long, env = "SPREADKIT_THREADS", default_value_t = 0, global = true)]
    threads: usize,

    /// Record wall-clock time in `runtime_ms` (otherwise 0, keeping reports reproducible).
    #[arg(long, global = true)]
    timing: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Layer spreadness and local LYM ratios of a complex.
    Analyze {
        input: PathBuf,
        /// Read the input as a graph and use its independence complex.
        #[arg(long)]
        graph: bool,
        /// Single layer to analyze (default: every layer up to the rank).
        #[arg(long)]
        k: Option<usize>,
    },
    /// Peel a family in layer k into dense traces and a remainder.
    Decompose {
        input: PathBuf,
        #[arg(long)]
        graph: bool,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        t: usize,
        /// Density parameter, e.g. `2`, `5/2`, `2.5`.
        #[arg(long)]
        r: String,
        /// Stop once a chosen set has more than q elements (default: never).
        #[arg(long)]
        q: Option<usize>,
        /// Spreadness of the ambient layer used for the remainder bound (default: rank/k).
        #[arg(long)]
        r0: Option<String>,
        /// Family to decompose, in facet format (default: the best star of layer k).
        #[arg(long)]
        family: Option<PathBuf>,
        /// Pick the largest maximal dense set instead of growing greedily.
        #[arg(long)]
        exhaustive: bool,
    },
    /// Exact maximum t-intersecting family in layer k, compared with the best star.
    Extremal {
        input: PathBuf,
        #[arg(long)]
        graph: bool,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        t: usize,
        /// Node budget for the search (default: unlimited).
        #[arg(long)]
        budget: Option<u64>,
        /// Also compute the largest non-trivial t-intersecting family.
        #[arg(long)]
        nontrivial: bool,
    },
    /// Run the verification suite over instances or a corpus directory.
    Verify {
        inputs: Vec<PathBuf>,
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        graph: bool,
        /// Layers to check, `LO..=HI` or `K` (default: 1..=rank).
        #[arg(long, value_parser = parse_range)]
        k_range: Option<(usize, usize)>,
        /// Values of t for the complete-complex extremal checks.
        #[arg(long, value_parser = parse_range, default_value = "1..=3")]
        t_range: (usize, usize),
        /// Sampled restriction-bound tuples per instance.
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Random-set containment and two-colouring experiments on a family file.
    Montecarlo {
        input: PathBuf,
        /// Spreadness the family is claimed to have.
        #[arg(long)]
        r: Option<String>,
        /// Exponent m; elements are kept with probability p = m * delta.
        #[arg(long, default_value_t = 1.0)]
        m: f64,
        #[arg(long)]
        delta: Option<f64>,
        /// Shorthand for m = 1, delta = p.
        #[arg(long, conflicts_with_all = ["m", "delta"])]
        p: Option<f64>,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Second family for the two-colouring experiment.
        #[arg(long)]
        two_color: Option<PathBuf>,
        /// Elements left uncoloured, e.g. `1,2`.
        #[arg(long, value_delimiter = ',')]
        excluded: Vec<u32>,
    },
    /// Proof parameters and hypothesis flags for (n, k, t).
    Plan {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        t: u64,
    },
    /// Write the standard corpus to a directory.
    GenCorpus {
        dir: PathBuf,
        /// Also write `<name>.expect.json` golden summaries.
        #[arg(long)]
        expect: bool,
    },
}

fn run(cmd: Command) -> CliResult<Report> {
    match cmd {
        Command::Analyze { input, graph, k } => commands::analyze(&input, graph, k),
        Command::Decompose {
            input,
            graph,
            k,
            t,
            r,
            q,
            r0,
            family,
            exhaustive,
        } => {
            let r = rational_arg("r", &r)?;
            let r0: Option<Rational> = r0.map(|s| rational_arg("r0", &s)).transpose()?;
            commands::decompose(&DecomposeArgs {
                input: &input,
                force_graph: graph,
                k,
                t,
                r,
                q,
                r0,
                family: family.as_deref(),
                exhaustive,
            })
        }
        Command::Extremal {
            input,
            graph,
            k,
            t,
            budget,
            nontrivial,
        } => commands::extremal(&input, graph, k, t, budget, nontrivial),
        Command::Verify {
            inputs,
            corpus,
            graph,
            k_range,
            t_range,
            samples,
            seed,
        } => {
            let inputs = collect_inputs(&inputs, corpus.as_deref())?;
            verify::verify(&VerifyArgs {
                inputs,
                force_graph: graph,
                k_range,
                t_range,
                samples,
                seed,
            })
        }
        Command::Montecarlo {
            input,
            r,
            m,
            delta,
            p,
            trials,
            seed,
            two_color,
            excluded,
        } => {
            let (m, delta) = match (p, delta) {
                (Some(p), _) => (1.0, p),
                (None, Some(d)) => (m, d),
                (None, None) if two_color.is_some() => (m, 0.0),
                (None, None) => return Err(usage("give --p or --delta")),
            };
            let r = r.map(|s| rational_arg("r", &s)).transpose()?;
            let excluded = Face::from_elements(excluded)?;
            commands::montecarlo(&MonteCarloArgs {
                input: &input,
                r,
                m,
                delta,
                trials,
                seed,
                two_color: two_color.as_deref(),
                excluded,
            })
        }
        Command::Plan { n, k, t } => commands::plan(n, k, t),
        Command::GenCorpus { dir, expect } => verify::gen_corpus(&dir, expect),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let start = Instant::now();
    let mut report = match run(cli.command) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if cli.timing {
        report.runtime_ms = start.elapsed().as_millis() as u64;
    }
    let text = match cli.format {
        Format::Json => report.to_canonical_json(),
        Format::Table => report.to_table(),
    };
    let mut out = std::io::stdout().lock();
    if out
        .write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .is_err()
    {
        return ExitCode::from(2);
    }
    ExitCode::from(report.status.exit_code() as u8)
}

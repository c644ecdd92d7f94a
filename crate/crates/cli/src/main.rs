//! `qpdlab`: JSON in, JSON out. Exit codes: 0 computed, 1 input error,
//! 2 budget exhausted or nothing found within the budgets.

mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "qpdlab", version, about = "Quasi-projective dimension over graded quotient algebras")]
pub struct Cli {
    #[command(flatten)]
    pub opts: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// Degree bound for ring expansions (overrides the document).
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    pub truncation: Option<u32>,
    /// Homological bound for resolutions.
    #[arg(long, global = true, value_parser = clap::value_parser!(i64).range(1..))]
    pub hmax: Option<i64>,
    /// Largest total rank tried by the bounded search.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub search_rank: Option<u64>,
    /// Largest index span tried by the bounded search.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub search_window: Option<u64>,
    /// Cap on the number of complexes the search enumerates.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub search_candidates: Option<u64>,
    /// Disable the bounded search.
    #[arg(long, global = true)]
    pub no_search: bool,
    /// Random trials per isomorphism test.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: Option<u64>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Field characteristic (overrides the document; the suite defaults to 101).
    #[arg(long, global = true)]
    pub p: Option<u32>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Compact JSON (the default).
    #[arg(long, global = true, conflicts_with = "pretty")]
    pub json: bool,
    /// Indented JSON.
    #[arg(long, global = true)]
    pub pretty: bool,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Ring-level computations.
    Ring {
        #[command(subcommand)]
        command: RingCommand,
    },
    /// Graded homology of a module or complex.
    Homology { input: PathBuf },
    /// sup, inf, hsup, hinf, amp and perfection.
    Invariants { input: PathBuf },
    /// Minimalize a complex of free modules.
    Minimize { input: PathBuf },
    /// Minimal free resolution, projective dimension and Betti numbers.
    Resolve { input: PathBuf },
    /// Depth of a module or complex; of the ring for a bare ring document.
    Depth { input: PathBuf },
    /// Graded dimensions of Ext^i(a, b) for i up to --hmax (default 3).
    Ext { a: PathBuf, b: PathBuf },
    /// Quasi-projective dimension with a certificate.
    Qpd { input: PathBuf },
    /// Run the verification suite.
    #[command(name = "verify-paper-suite", alias = "verify-suite")]
    VerifySuite,
}

#[derive(Subcommand, Debug, Clone)]
pub enum RingCommand {
    /// Embedding dimension, mu, complete intersection, hypersurface, Burch.
    Classify { input: PathBuf },
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
    if let Some(n) = std::env::var("QPDLAB_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let (text, code) = report::run(&cli, argv);
    let written = match &cli.opts.out {
        Some(path) => std::fs::write(path, format!("{text}\n")).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("{e}");
        return ExitCode::from(1);
    }
    ExitCode::from(code)
}

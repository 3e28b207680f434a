use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use apify::analysis::SignatureOptions;
use apify::commands;
use apify::project::Project;
use apify::CliError;
use apify_core::signature::Flow;
use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "apify", version, about = "Find API candidates in COBOL code and compute their request/response fields")]
struct Cli {
    /// Workspace config file.
    #[arg(long, global = true, default_value = "apify.json")]
    config: PathBuf,
    /// Include iteration counts in signature output.
    #[arg(long, global = true)]
    stats: bool,
    /// Keep SQLCODE and the rest of the SQLCA in signatures.
    #[arg(long, global = true)]
    include_sqlcode: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Variant {
    /// Flow variant: fi, fs or ps (default from the config).
    #[arg(long, value_parser = parse_flow)]
    flow: Option<Flow>,
    /// Analyze called programs through summaries.
    #[arg(long, overrides_with = "no_call_chain")]
    call_chain: bool,
    /// Treat call sites as writing their arguments.
    #[arg(long, overrides_with = "call_chain")]
    no_call_chain: bool,
    /// Loop unrolling bound for the path-sensitive variant.
    #[arg(long)]
    ps_bound: Option<usize>,
    /// Fail when a called program is missing instead of degrading.
    #[arg(long)]
    strict: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List API candidates.
    Identify {
        /// Also offer a dynamic-query API for this program (repeatable).
        #[arg(long = "dynamic-query", value_name = "PROGRAM")]
        dynamic_query: Vec<String>,
    },
    /// Compute the signature of a region ("PROG:START-END") or candidate.
    Signature {
        selector: String,
        #[command(flatten)]
        variant: Variant,
        /// Restrict responses to fields read after the region (fs only).
        #[arg(long)]
        post_context: bool,
        /// Write the program's control-flow graph and the call graph as DOT files here.
        #[arg(long, value_name = "DIR")]
        dot_dir: Option<PathBuf>,
    },
    /// Refactoring suggestions and copybook slices for an API.
    Refactor {
        selector: String,
        #[command(flatten)]
        variant: Variant,
        /// Write <api-name>-REQ.cpy and <api-name>-RESP.cpy here.
        #[arg(long, value_name = "DIR")]
        out_dir: Option<PathBuf>,
    },
    /// OpenAPI document for the given candidates (all when none given).
    Export {
        selectors: Vec<String>,
        #[command(flatten)]
        variant: Variant,
    },
    /// Enumerate the paths of a region and their read/write sets.
    Oracle {
        selector: String,
        /// Loop unrolling bound.
        #[arg(long, default_value_t = 3)]
        bound: usize,
    },
    /// Check soundness and precision on generated programs.
    Verify {
        /// Seed range, "A..B" (exclusive) or "A..=B".
        #[arg(long, default_value = "0..1000", value_parser = commands::parse_seeds)]
        seeds: std::ops::Range<u64>,
        #[arg(long, hide = true)]
        corrupt_kills: bool,
    },
}

fn parse_flow(s: &str) -> Result<Flow, String> {
    Flow::parse(s).ok_or_else(|| format!("unknown flow {s:?}, expected fi, fs or ps"))
}

fn options(project: &Project, v: &Variant, include_sqlcode: bool) -> SignatureOptions {
    let mut o = SignatureOptions::from(&project.config.defaults);
    if let Some(f) = v.flow {
        o.flow = f;
    }
    if v.call_chain {
        o.call_chain = true;
    }
    if v.no_call_chain {
        o.call_chain = false;
    }
    if let Some(b) = v.ps_bound {
        o.ps_bound = b;
    }
    o.strict = v.strict;
    o.include_sqlcode |= include_sqlcode;
    o
}

fn run(cli: &Cli) -> Result<String, CliError> {
    if let Command::Verify { seeds, corrupt_kills } = &cli.command {
        return commands::verify(seeds.clone(), *corrupt_kills);
    }
    let project = Project::load(&cli.config)?;
    match &cli.command {
        Command::Identify { dynamic_query } => commands::identify(&project, dynamic_query),
        Command::Signature { selector, variant, post_context, dot_dir } => {
            let opts = SignatureOptions { post_context: *post_context, ..options(&project, variant, cli.include_sqlcode) };
            commands::signature(&project, selector, &opts, cli.stats, dot_dir.as_deref())
        }
        Command::Refactor { selector, variant, out_dir } => commands::refactor(&project, selector, &options(&project, variant, cli.include_sqlcode), out_dir.as_deref()),
        Command::Export { selectors, variant } => commands::export(&project, selectors, &options(&project, variant, cli.include_sqlcode)),
        Command::Oracle { selector, bound } => commands::oracle(&project, selector, *bound),
        Command::Verify { .. } => unreachable!("handled above"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            std::io::stdout().flush().ok();
            ExitCode::SUCCESS
        }
        Err(CliError::Verify(report)) => {
            print!("{report}");
            std::io::stdout().flush().ok();
            ExitCode::from(5)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

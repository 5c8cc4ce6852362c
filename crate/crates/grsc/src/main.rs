//! `grsc`: command line front end. Every run prints one JSON report on stdout.
//!
//! Exit codes: 0 property holds or verdict reached, 1 property fails,
//! 2 budget exhausted or verdict unknown, 3 input or module error.

mod commands;
mod report;

use std::process::ExitCode;
use std::sync::mpsc;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::report::{CliError, Envelope, Finished, Outcome};

#[derive(Parser, Debug)]
#[command(name = "grsc", version, about = "Graphical small cancellation toolkit")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Global {
    /// Worker threads; defaults to the available cores. Results do not depend on it.
    #[arg(long, global = true, env = "GRSC_THREADS")]
    pub threads: Option<usize>,
    /// Cycle and enumeration budget.
    #[arg(long, global = true, env = "GRSC_BUDGET_CYCLES", default_value_t = grsc_core::cycles::DEFAULT_CYCLE_BUDGET)]
    pub budget: u64,
    /// Solver search-node budget per word.
    #[arg(long, global = true, env = "GRSC_BUDGET_NODES", default_value_t = 1_000_000)]
    pub nodes: u64,
    /// Wall-clock budget in seconds; 0 disables it.
    #[arg(long, global = true, env = "GRSC_BUDGET_SECONDS", default_value_t = 0)]
    pub timeout: u64,
    /// Omit the timing field so identical configs give byte-identical reports.
    #[arg(long, global = true)]
    pub deterministic: bool,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case", tag = "subcommand")]
pub enum Command {
    /// Check a small cancellation condition.
    Check(commands::CheckArgs),
    /// List maximal pieces with their witness starts.
    Pieces(commands::PiecesArgs),
    /// Extract a presentation of the group defined by a graph.
    Present(commands::PresentArgs),
    /// Classify the group: trivial, cyclic, free, or containing a free subgroup.
    Classify(commands::ClassifyArgs),
    /// Decide a word under a verified condition.
    Word(commands::WordArgs),
    /// Van Kampen diagram checks.
    #[command(subcommand)]
    Diagram(commands::DiagramCommand),
    /// Embed a component into a Cayley graph ball.
    Embed(commands::EmbedArgs),
    /// Lacunary selection over the components of a graph file.
    Lacunary(commands::LacunaryArgs),
    /// Write a corpus graph.
    Gen(commands::GenArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Check(_) => "check",
            Command::Pieces(_) => "pieces",
            Command::Present(_) => "present",
            Command::Classify(_) => "classify",
            Command::Word(_) => "word",
            Command::Diagram(_) => "diagram verify",
            Command::Embed(_) => "embed",
            Command::Lacunary(_) => "lacunary",
            Command::Gen(_) => "gen",
        }
    }
}

fn run(command: Command, global: Global) -> Result<Outcome, CliError> {
    match command {
        Command::Check(a) => commands::check(a, &global),
        Command::Pieces(a) => commands::pieces(a, &global),
        Command::Present(a) => commands::present(a, &global),
        Command::Classify(a) => commands::classify(a, &global),
        Command::Word(a) => commands::word(a, &global),
        Command::Diagram(commands::DiagramCommand::Verify(a)) => commands::diagram_verify(a, &global),
        Command::Embed(a) => commands::embed(a, &global),
        Command::Lacunary(a) => commands::lacunary(a, &global),
        Command::Gen(a) => commands::gen(a, &global),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help, --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            let env = Envelope::new("usage", serde_json::Value::Null, &Finished::from(CliError::Usage(e.to_string())));
            println!("{}", env.to_json());
            return ExitCode::from(3);
        }
    };
    if let Some(n) = cli.global.threads {
        // only fails if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let name = cli.command.name();
    let config = serde_json::json!({ "command": &cli.command, "global": &cli.global });
    let start = Instant::now();
    let (global, command) = (cli.global.clone(), cli.command);
    let timeout = global.timeout;
    let (tx, rx) = mpsc::channel();
    let spawned = std::thread::Builder::new().stack_size(64 << 20).spawn(move || {
        let _ = tx.send(run(command, global));
    });
    if let Err(e) = spawned {
        eprintln!("cannot start worker: {e}");
        return ExitCode::from(3);
    }
    let result = if timeout == 0 {
        rx.recv().unwrap_or_else(|_| Err(CliError::Internal("worker panicked".into())))
    } else {
        match rx.recv_timeout(Duration::from_secs(timeout)) {
            Ok(r) => r,
            Err(mpsc::RecvTimeoutError::Timeout) => Err(CliError::Budget(format!("wall-clock budget of {timeout}s"))),
            Err(mpsc::RecvTimeoutError::Disconnected) => Err(CliError::Internal("worker panicked".into())),
        }
    };
    let result = Finished::from(result);
    let mut env = Envelope::new(name, config, &result);
    if !cli.global.deterministic {
        env.elapsed_ms = Some(start.elapsed().as_millis() as u64);
    }
    println!("{}", env.to_json());
    ExitCode::from(env.exit_code)
}

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fedosov_cli::{cmd_dump_r, cmd_star, cmd_verify, Problem, RunOptions, EXIT_SETUP};

#[derive(Parser)]
#[command(name = "fedosov", version, about = "Exact Fedosov star products on Kaehler charts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the tasks of a specification.
    Star(Common),
    /// Run verification suites on the configured chart.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Comma-separated suite names; all suites by default.
        #[arg(long, value_delimiter = ',')]
        suite: Vec<String>,
        /// Flip the sign of every Christoffel symbol (negative control).
        #[arg(long)]
        debug_flip_christoffel: bool,
    },
    /// List the solved connection forms.
    DumpR(Common),
}

#[derive(Args)]
struct Common {
    /// Problem specification (JSON).
    #[arg(long)]
    spec: PathBuf,
    /// Seed for sampled test data.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file, or `stdout`.
    #[arg(long, default_value = "stdout")]
    output: String,
}

fn open_output(target: &str) -> io::Result<Box<dyn Write>> {
    if target == "stdout" || target == "-" {
        Ok(Box::new(BufWriter::new(io::stdout().lock())))
    } else {
        Ok(Box::new(BufWriter::new(File::create(target)?)))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, opts) = match &cli.command {
        Command::Star(c) | Command::DumpR(c) => (
            c,
            RunOptions {
                seed: c.seed,
                ..Default::default()
            },
        ),
        Command::Verify {
            common,
            suite,
            debug_flip_christoffel,
        } => (
            common,
            RunOptions {
                seed: common.seed,
                suites: suite.clone(),
                flip_christoffel: *debug_flip_christoffel,
            },
        ),
    };
    let problem = match Problem::load(&common.spec) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: invalid specification {}:\n{e}", common.spec.display());
            return ExitCode::from(EXIT_SETUP as u8);
        }
    };
    let mut out = match open_output(&common.output) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: cannot open {}: {e}", common.output);
            return ExitCode::from(EXIT_SETUP as u8);
        }
    };
    let code = match &cli.command {
        Command::Star(_) => cmd_star(&problem, &opts, &mut out),
        Command::Verify { .. } => cmd_verify(&problem, &opts, &mut out),
        Command::DumpR(_) => cmd_dump_r(&problem, &opts, &mut out),
    };
    if let Err(e) = out.flush() {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(EXIT_SETUP as u8);
    }
    ExitCode::from(code as u8)
}

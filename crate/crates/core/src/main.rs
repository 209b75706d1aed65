use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use pseudolem::job::{self, Command, JobSpec};

#[derive(Parser)]
#[command(
    name = "pseudolem",
    version,
    about = "Decide whether a Jordan curve is a pseudo-lemniscate of a meromorphic \
             function, and trace, count and model its preimages"
)]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Subcommand)]
enum CliCommand {
    /// Classify S against Gamma under f (preimage counts + direct image check)
    Classify(RunArgs),
    /// Test whether f(S) can possibly be a Jordan curve
    #[command(name = "nonjordan")]
    NonJordan(RunArgs),
    /// Trace the preimage curves of Gamma inside a search box
    Trace(RunArgs),
    /// Isolate the zeros and poles of f inside a search box
    Locate(RunArgs),
    /// Count preimages N_f(w) for the listed target values
    Count(RunArgs),
    /// Fit a ratio of Blaschke products to f on the unit disk
    #[command(name = "blaschke-model")]
    BlaschkeModel(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Job file (JSON)
    #[arg(long)]
    job: PathBuf,
    /// Directory that relative artifact paths resolve against
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override every seed in the job
    #[arg(long)]
    seed: Option<u64>,
    /// Progress notes on stderr
    #[arg(long)]
    verbose: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        CliCommand::Classify(a) => (Command::Classify, a),
        CliCommand::NonJordan(a) => (Command::NonJordan, a),
        CliCommand::Trace(a) => (Command::Trace, a),
        CliCommand::Locate(a) => (Command::Locate, a),
        CliCommand::Count(a) => (Command::Count, a),
        CliCommand::BlaschkeModel(a) => (Command::BlaschkeModel, a),
    };

    let mut spec = match JobSpec::from_path(&args.job) {
        Ok(spec) => spec,
        Err(e) => {
            let report = job::error_report(command, &e);
            print_report(&report);
            eprintln!("error: cannot load job {}: {e}", args.job.display());
            return exit_code(e.exit_code());
        }
    };
    if let Some(seed) = args.seed {
        spec.override_seed(seed);
    }
    if args.verbose {
        eprintln!(
            "{}: job {} (seed {})",
            command.name(),
            args.job.display(),
            spec.tolerances.seed
        );
    }

    let (report, code) = job::run(command, &spec, args.out.as_deref(), args.verbose);
    print_report(&report);
    exit_code(code)
}

fn print_report(report: &job::Report) {
    match serde_json::to_string_pretty(report) {
        Ok(text) => println!("{text}"),
        Err(e) => eprintln!("error: cannot serialize report: {e}"),
    }
}

fn exit_code(code: i32) -> ExitCode {
    ExitCode::from(u8::try_from(code).unwrap_or(1))
}

use std::path::PathBuf;
use std::process::ExitCode;

use bbsolve::commands::{cmd_analyze, cmd_solve, cmd_verify, CliError, Outcome, Overrides, EXIT_ERROR};
use bbsolve::problem::{load_scaling, parse_bounds, parse_list, Problem};
use clap::{Args, Parser, Subcommand};

/// Exact singularity analysis and closed-form travelling waves for
/// autonomous algebraic ODEs.
///
/// Exit codes: 0 verified closed forms exist, 2 no closed form was found,
/// 1 error or failed verification. JSON goes to stdout, text to stderr.
#[derive(Parser)]
#[command(name = "bbsolve", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pole families, Fuchs indices and Laurent series.
    Analyze(StageArgs),
    /// Full pipeline: subequations, genus, closed forms, verification.
    Solve(StageArgs),
    /// Re-verify a stored report.
    Verify {
        report: PathBuf,
        /// Problem file the report must belong to.
        #[arg(long)]
        problem: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct StageArgs {
    problem: PathBuf,
    /// Truncation J of the Laurent series.
    #[arg(long)]
    terms: Option<usize>,
    /// Comma-separated indices of the pole families to enforce.
    #[arg(long, value_parser = parse_list)]
    families: Option<Vec<usize>>,
    /// Degrees `N,D` of the rational ansatz in tau.
    #[arg(long, value_parser = parse_bounds)]
    max_degree: Option<(usize, usize)>,
    /// File holding scale-invariant parameter combinations.
    #[arg(long)]
    scaling_from_file: Option<PathBuf>,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    seed: Option<u64>,
}

fn stage(args: &StageArgs, solve: bool) -> Result<Outcome, CliError> {
    let scaling = args.scaling_from_file.as_deref().map(load_scaling).transpose()?;
    let overrides = Overrides { terms: args.terms, families: args.families.clone(), bounds: args.max_degree, scaling, seed: args.seed };
    let problem = overrides.apply(&Problem::load(&args.problem)?);
    let path = args.problem.display().to_string();
    if solve {
        cmd_solve(&problem, &path, args.seed)
    } else {
        cmd_analyze(&problem, &path, args.seed)
    }
}

fn verify(report: &PathBuf, problem: Option<&PathBuf>) -> Result<Outcome, CliError> {
    let path = report.display().to_string();
    let text = std::fs::read_to_string(report).map_err(|e| CliError::Report { path: path.clone(), message: e.to_string() })?;
    let problem = problem.map(|p| Problem::load(p)).transpose()?;
    cmd_verify(&text, &path, problem.as_ref())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (result, json) = match &cli.command {
        Command::Analyze(a) => (stage(a, false), a.json),
        Command::Solve(a) => (stage(a, true), a.json),
        Command::Verify { report, problem, json } => (verify(report, problem.as_ref()), *json),
    };
    match result {
        Ok(out) => {
            eprint!("{}", out.text);
            if json {
                println!("{}", out.json);
            }
            ExitCode::from(out.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            if json {
                println!("{}", e.to_json());
            }
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}

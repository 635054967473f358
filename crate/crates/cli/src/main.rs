//! Command-line front end: argument parsing, exit-code mapping, and CSV
//! output. All computation lives in the library; this binary translates
//! arguments into an [`AnalysisRequest`] and prints the report.
//!
//! Exit codes: 0 success; 2 invalid input or violated precondition;
//! 3 negative finding (target not implementable, check failed); 4 I/O error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use kimpl::cli::{run, AnalysisRequest, CliError, ReportStatus, VcgReportKind};

#[derive(Parser)]
#[command(
    name = "kimpl",
    version,
    about = "Minimal monetary promises that steer rational play in finite games"
)]
struct Cli {
    /// Write the report's key/value rows as CSV to this path.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dominance structure, pure equilibria, and (two players) a mixed one.
    Analyze {
        /// Game file (JSON).
        game: PathBuf,
    },
    /// Price of forcing a single strategy profile.
    Price {
        game: PathBuf,
        /// Target profile as comma-separated strategy labels, e.g. "f,s".
        #[arg(long)]
        profile: String,
    },
    /// Build and verify the optimal single-profile payment scheme.
    Implement {
        game: PathBuf,
        #[arg(long)]
        profile: String,
        /// Strictness pad on off-target columns (default 1).
        #[arg(long)]
        epsilon: Option<String>,
    },
    /// Exact implementation of a rectangular target (two players).
    Exact {
        game: PathBuf,
        /// Per-player strategy lists: "|" within a player, ";" between,
        /// e.g. "f|s;s".
        #[arg(long)]
        target: String,
    },
    /// Grid-search oracle for the price of a target set.
    Brute {
        game: PathBuf,
        /// Semicolon-separated profiles, e.g. "f,s;s,f".
        #[arg(long)]
        target: String,
        /// Comma-separated candidate payment values (default: payoff
        /// differences of each player).
        #[arg(long)]
        grid: Option<String>,
        /// Budget cap on enumerated candidate schemes.
        #[arg(long)]
        cap: Option<u128>,
    },
    /// Build a recommendation device for an equilibrium.
    DeviceBuild {
        game: PathBuf,
        /// Mixed profile: per-player probability lists, e.g. "0.8,0.2;0.8,0.2".
        #[arg(long)]
        mixed: Option<String>,
        /// Outcome distribution: profile=probability pairs, e.g.
        /// "f,s=1/2;s,f=1/2".
        #[arg(long)]
        correlated: Option<String>,
        /// Write the device file here.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Seeded simulation of a device.
    DeviceSim {
        game: PathBuf,
        device: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        rounds: u64,
        /// Per-player signal=action maps (default: obey every signal),
        /// e.g. "f=f,s=f;f=f,s=s".
        #[arg(long)]
        strategy: Option<String>,
    },
    /// Obedience check for an outcome distribution.
    CorrCheck {
        game: PathBuf,
        #[arg(long)]
        dist: String,
    },
    /// Feasibility of signal-blind payments in an informational-form game.
    InfoCheck {
        info: PathBuf,
        /// Per-player signal=action maps, e.g. "s=U,t=D;s=L,t=R".
        #[arg(long)]
        target: String,
        #[arg(long)]
        epsilon: Option<String>,
    },
    /// Run the scenarios of an auction file.
    VcgRun {
        auction: PathBuf,
        /// allocation | payments | utilities
        #[arg(long, default_value = "utilities")]
        report: String,
    },
    /// Build the CNF reduction gadget; optionally check an assignment.
    SatGadget {
        cnf: PathBuf,
        /// Truth assignment as one character per variable (T/F/1/0).
        #[arg(long)]
        assignment: Option<String>,
    },
}

fn to_request(command: Command) -> Result<AnalysisRequest, String> {
    Ok(match command {
        Command::Analyze { game } => AnalysisRequest::Analyze { game },
        Command::Price { game, profile } => AnalysisRequest::Price { game, profile },
        Command::Implement {
            game,
            profile,
            epsilon,
        } => AnalysisRequest::Implement {
            game,
            profile,
            epsilon,
        },
        Command::Exact { game, target } => AnalysisRequest::Exact { game, target },
        Command::Brute {
            game,
            target,
            grid,
            cap,
        } => AnalysisRequest::Brute {
            game,
            target,
            grid,
            cap,
        },
        Command::DeviceBuild {
            game,
            mixed,
            correlated,
            output,
        } => AnalysisRequest::DeviceBuild {
            game,
            mixed,
            correlated,
            output,
        },
        Command::DeviceSim {
            game,
            device,
            seed,
            rounds,
            strategy,
        } => AnalysisRequest::DeviceSim {
            game,
            device,
            seed,
            rounds,
            strategy,
        },
        Command::CorrCheck { game, dist } => AnalysisRequest::CorrCheck { game, dist },
        Command::InfoCheck {
            info,
            target,
            epsilon,
        } => AnalysisRequest::InfoCheck {
            info,
            target,
            epsilon,
        },
        Command::VcgRun { auction, report } => AnalysisRequest::VcgRun {
            auction,
            report: match report.as_str() {
                "allocation" => VcgReportKind::Allocation,
                "payments" => VcgReportKind::Payments,
                "utilities" => VcgReportKind::Utilities,
                other => return Err(format!("unknown report kind `{other}`")),
            },
        },
        Command::SatGadget { cnf, assignment } => AnalysisRequest::SatGadget { cnf, assignment },
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let request = match to_request(cli.command) {
        Ok(request) => request,
        Err(message) => {
            eprintln!("error: {message}");
            return ExitCode::from(2);
        }
    };
    match run(&request) {
        Ok(report) => {
            print!("{}", report.text());
            if let Some(path) = &cli.csv {
                if let Err(e) = std::fs::write(path, report.csv()) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(4);
                }
            }
            match report.status {
                ReportStatus::Ok => ExitCode::SUCCESS,
                ReportStatus::Negative => ExitCode::from(3),
            }
        }
        Err(CliError::Input(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
        Err(CliError::Io(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(4)
        }
    }
}

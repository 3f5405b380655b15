//! `rsp`: run the protocol, sweep the trade-off, solve for REE, run LOCC
//! sessions and execute the acceptance checks.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rsp_core::acceptance::{run_all, Expectations};
use rsp_core::io::{format_matrix, format_tradeoff_csv, parse_matrix};
use rsp_core::locc::{classical_cost, replay, run_session, Topology, Transcript};
use rsp_core::protocol::{pole_fidelity, run_protocol, ProtocolSpec};
use rsp_core::quantum::DensityMatrix;
use rsp_core::ree::FwOptions;
use rsp_core::report::{cut_diagnostics, ere_report, tradeoff_notes, tradeoff_table};
use rsp_core::Execution;

#[derive(Parser)]
#[command(name = "rsp", version, about = "Two-receiver remote state preparation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate both measurement outcomes for one target.
    Run(TargetArgs),
    /// Write the fidelity / relative-entropy trade-off table as CSV.
    Tradeoff {
        #[arg(long, default_value_t = 11)]
        alpha_steps: usize,
        #[arg(long)]
        out: PathBuf,
        /// Compute rows one after another instead of in parallel.
        #[arg(long)]
        sequential: bool,
    },
    /// Relative entropy of entanglement of a two-qubit state file.
    Ere {
        input: PathBuf,
        /// Where to write the closest separable state (default: `<input stem>.sigma.txt`).
        #[arg(long)]
        sigma_out: Option<PathBuf>,
    },
    /// Run one Alice/Bob/Charlie session and write its transcript.
    Locc(LoccArgs),
    /// Run every acceptance check; exit 1 if any fails.
    Verify {
        /// One JSON record per criterion.
        #[arg(long)]
        json: bool,
        /// Override an expected constant, `name=value` (mutation testing).
        #[arg(long = "expect", hide = true, value_name = "NAME=VALUE")]
        overrides: Vec<String>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Equatorial,
    Polar,
}

#[derive(Args)]
struct TargetArgs {
    #[arg(long, value_enum)]
    mode: ModeArg,
    /// Azimuth in radians, equatorial mode.
    #[arg(long, allow_negative_numbers = true)]
    phi: Option<f64>,
    /// Polar angle in radians, polar mode.
    #[arg(long, allow_negative_numbers = true)]
    theta: Option<f64>,
    /// Resource amplitude α in [0, 1], polar mode only (default √(2/3)).
    #[arg(long)]
    alpha: Option<f64>,
}

#[derive(Args)]
struct LoccArgs {
    #[arg(long, value_enum, required_unless_present = "replay")]
    mode: Option<ModeArg>,
    #[arg(long, allow_negative_numbers = true)]
    phi: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    theta: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, env = "RSP_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "standard", value_parser = ["standard", "same-location"])]
    topology: String,
    #[arg(long, default_value = "transcript.txt")]
    out: PathBuf,
    /// Re-run a transcript and check it reproduces bit for bit.
    #[arg(long, conflicts_with_all = ["mode", "phi", "theta", "alpha"])]
    replay: Option<PathBuf>,
}

enum Failure {
    Verify,
    Usage(String),
    Io(String),
    Validation(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Verify => 1,
            Failure::Usage(_) => 2,
            Failure::Io(_) => 3,
            Failure::Validation(_) => 4,
        }
    }
}

type Outcome = Result<(), Failure>;

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

fn validation(e: impl ToString) -> Failure {
    Failure::Validation(e.to_string())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Outcome {
    fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn spec_from(
    mode: ModeArg,
    phi: Option<f64>,
    theta: Option<f64>,
    alpha: Option<f64>,
) -> Result<ProtocolSpec, Failure> {
    match (mode, phi, theta, alpha) {
        (ModeArg::Equatorial, Some(phi), None, None) => {
            ProtocolSpec::equatorial(phi).map_err(usage)
        }
        (ModeArg::Equatorial, ..) => Err(usage("equatorial mode takes --phi only")),
        (ModeArg::Polar, None, Some(theta), None) => ProtocolSpec::polar(theta).map_err(usage),
        (ModeArg::Polar, None, Some(theta), Some(a)) => {
            ProtocolSpec::general_alpha(theta, a).map_err(usage)
        }
        (ModeArg::Polar, ..) => Err(usage("polar mode takes --theta and optionally --alpha")),
    }
}

fn cmd_run(args: TargetArgs) -> Outcome {
    let spec = spec_from(args.mode, args.phi, args.theta, args.alpha)?;
    let outcomes = run_protocol(&spec).map_err(validation)?;
    println!(
        "{} target, angle {:.6} rad, alpha {:.6}",
        spec.mode(),
        spec.angle(),
        spec.alpha()
    );
    for (k, o) in outcomes.iter().enumerate() {
        println!(
            "outcome {k}: probability {:.6}  fidelity_B {:.6}  fidelity_C {:.6}",
            o.probability, o.fidelity_b, o.fidelity_c
        );
    }
    if args.mode == ModeArg::Polar {
        let pole = pole_fidelity(spec.alpha()).map_err(validation)?;
        let simulated = outcomes[0].fidelity_b;
        let note = if (pole - simulated).abs() > 1e-9 {
            "MISMATCH: the pole formula holds at theta = 0 only"
        } else {
            "agrees"
        };
        println!("pole formula (1 + alpha^2)/2 = {pole:.6}, simulated {simulated:.6}: {note}");
    }
    println!();
    println!("outcome,probability,fidelity_B,fidelity_C");
    for (k, o) in outcomes.iter().enumerate() {
        println!(
            "{k},{:?},{:?},{:?}",
            o.probability, o.fidelity_b, o.fidelity_c
        );
    }
    Ok(())
}

fn cmd_tradeoff(steps: usize, out: &Path, sequential: bool) -> Outcome {
    if steps < 2 {
        return Err(usage(format!(
            "--alpha-steps must be at least 2, got {steps}"
        )));
    }
    let exec = if sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let opts = FwOptions::default();
    let rows = tradeoff_table(steps, &opts, exec).map_err(validation)?;
    write(out, &format_tradeoff_csv(&rows))?;
    let notes = tradeoff_notes(&cut_diagnostics(&opts).map_err(validation)?);
    let notes_path = out.with_extension("notes.txt");
    write(&notes_path, &notes)?;
    println!("wrote {} rows to {}", rows.len(), out.display());
    println!("wrote cut diagnostics to {}", notes_path.display());
    print!("{notes}");
    Ok(())
}

fn cmd_ere(input: &Path, sigma_out: Option<PathBuf>) -> Outcome {
    let text = read(input)?;
    let matrix = parse_matrix(&text).map_err(validation)?;
    let rho = DensityMatrix::new(&['a', 'B'], matrix)
        .map_err(|e| validation(format!("not a two-qubit density matrix: {e}")))?;
    let report = ere_report(&rho, &FwOptions::default()).map_err(validation)?;
    print!("{report}");
    let sigma_path = sigma_out.unwrap_or_else(|| input.with_extension("sigma.txt"));
    write(&sigma_path, &format_matrix(report.result.sigma.matrix()))?;
    println!(
        "closest separable state written to {}",
        sigma_path.display()
    );
    Ok(())
}

fn print_session(fidelity_b: f64, fidelity_c: f64, transcript: &Transcript) {
    println!("classical_cost_bits {}", classical_cost(transcript));
    println!("fidelity_B {fidelity_b:?}");
    println!("fidelity_C {fidelity_c:?}");
    println!("digest {:016x}", transcript.digest());
}

fn cmd_locc(args: LoccArgs) -> Outcome {
    if let Some(path) = args.replay {
        let recorded: Transcript = read(&path)?.parse().map_err(validation)?;
        let session = replay(&recorded).map_err(validation)?;
        if session.transcript != recorded {
            return Err(validation("replay does not reproduce the transcript"));
        }
        println!("replay of {} reproduces every record", path.display());
        print_session(session.fidelity_b, session.fidelity_c, &session.transcript);
        return Ok(());
    }
    let mode = args.mode.ok_or_else(|| usage("--mode is required"))?;
    let spec = spec_from(mode, args.phi, args.theta, args.alpha)?;
    let topology: Topology = args.topology.parse().map_err(usage)?;
    let session = run_session(&spec, topology, args.seed).map_err(validation)?;
    write(&args.out, &session.transcript.to_string())?;
    println!("outcome {}", session.outcome);
    print_session(session.fidelity_b, session.fidelity_c, &session.transcript);
    println!("transcript written to {}", args.out.display());
    Ok(())
}

fn cmd_verify(json: bool, overrides: &[String]) -> Outcome {
    let mut expectations = Expectations::default();
    for o in overrides {
        let (name, value) = o
            .split_once('=')
            .ok_or_else(|| usage(format!("--expect wants NAME=VALUE, got '{o}'")))?;
        let value: f64 = value
            .parse()
            .map_err(|_| usage(format!("'{value}' is not a number")))?;
        expectations.set(name, value).map_err(usage)?;
    }
    let results = run_all(&expectations);
    for r in &results {
        if json {
            println!(
                "{}",
                serde_json::to_string(r).expect("criterion result serializes")
            );
        } else {
            println!("{}", r.line());
        }
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    if !json {
        println!(
            "{} of {} criteria passed",
            results.len() - failed,
            results.len()
        );
    }
    if failed > 0 {
        return Err(Failure::Verify);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version also arrive here, with exit code 0.
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let outcome = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Tradeoff {
            alpha_steps,
            out,
            sequential,
        } => cmd_tradeoff(alpha_steps, &out, sequential),
        Command::Ere { input, sigma_out } => cmd_ere(&input, sigma_out),
        Command::Locc(args) => cmd_locc(args),
        Command::Verify { json, overrides } => cmd_verify(json, &overrides),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Verify => eprintln!("error: acceptance checks failed"),
                Failure::Usage(m) => eprintln!("usage error: {m}"),
                Failure::Io(m) => eprintln!("I/O error: {m}"),
                Failure::Validation(m) => eprintln!("invalid input: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}

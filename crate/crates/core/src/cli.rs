//! Command-line entry point: demos, sweeps, the distributed runner and
//! report emission. Reports go to standard output in the declared format;
//! diagnostics go to standard error. Exit codes: 0 success, 1 a run-time
//! check failed, 2 usage or parameter-file errors.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use crate::distsim::{self};
use crate::dotsim::{self, Frame, ParamsFile};
use crate::error::{Error, Result};
use crate::gatelib::{bell_measure, bell_pair, swap3, BellKind};
use crate::protocols::{self, RunMode};
use crate::qstate::{c, QReg};
use crate::ramsey::{solve_phases, DispersiveModel};
use crate::random;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Parser, Debug)]
#[command(
    name = "cnotsim",
    version,
    about = "Conditional quantum dynamics workbench: controlled-NOT gates, \
             entanglement protocols over classical channels, and two physical \
             gate models (cavity interferometry, coupled quantum dots)"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Emit the four Bell pairs and their disentangling-measurement outcomes
    Bell {
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Swap random state pairs with the three-CNOT cascade and verify
    Swap3 {
        /// Number of seeded random state pairs to swap
        #[arg(long, default_value_t = 10)]
        pairs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Distributed swap of two unknown states over classical bits plus two
    /// shared entangled pairs
    Distswap {
        /// Alice's input state: 0 | 1 | + | - | i | -i | re,im,re,im
        #[arg(long, default_value = "+")]
        alpha: String,
        /// Bob's input state, same syntax
        #[arg(long, default_value = "0")]
        beta: String,
        /// Enumerate all 16 measurement branches (default)
        #[arg(long, conflicts_with = "sample")]
        enumerate: bool,
        /// Sample a single seeded trajectory instead
        #[arg(long)]
        sample: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Search per-branch Pauli corrections on top of the literal protocol
        #[arg(long)]
        calibrate: bool,
        /// Random input pairs used by the calibration search
        #[arg(long, default_value_t = 20)]
        calibration_inputs: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Teleport one state through a shared pair; the two-transfer baseline
    /// for the distributed swap's resource ledger
    Teleport {
        /// State to transfer: 0 | 1 | + | - | i | -i | re,im,re,im
        #[arg(long, default_value = "+")]
        xi: String,
        #[arg(long, conflicts_with = "sample")]
        enumerate: bool,
        #[arg(long)]
        sample: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Ramsey pulse-phase search for the dispersive cavity sequence
    Ramsey {
        #[command(subcommand)]
        command: RamseyCommand,
    },
    /// Coupled quantum-dot model
    Dots {
        #[command(subcommand)]
        command: DotsCommand,
    },
    /// Timescale feasibility report (alias for `dots feasibility`)
    Feasibility {
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Host the shared register for one distributed-swap session
    ServeReferee {
        /// Listening port; 0 picks an ephemeral port (announced on stderr)
        #[arg(long)]
        port: u16,
        #[arg(long, default_value = "+")]
        alpha: String,
        #[arg(long, default_value = "0")]
        beta: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Join a referee as one protocol participant
    Party {
        #[arg(long, value_parser = parse_role)]
        role: distsim::Role,
        /// Referee address, host:port
        #[arg(long)]
        connect: String,
    },
}

#[derive(Subcommand, Debug)]
enum RamseyCommand {
    /// Scan pulse phases (and the dispersive phase unless --theta fixes it)
    /// for composites in the phased-CNOT family
    Solve {
        #[arg(long, value_parser = parse_model)]
        model: DispersiveModel,
        /// Grid points per scanned axis (minimum 16)
        #[arg(long, default_value_t = 64)]
        grid: usize,
        /// Fix the dispersive phase and scan only the two pulse phases
        #[arg(long)]
        theta: Option<f64>,
        /// Polish the best grid point with a golden-section search
        #[arg(long, default_value_t = true)]
        refine: bool,
        /// Force JSON output (the default)
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand, Debug)]
enum DotsCommand {
    /// Conditional resonance spectrum and the splitting bookkeeping
    Spectrum {
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Drive one pulse and report flip probabilities and gate fidelities
    Pulse {
        #[arg(long)]
        params: Option<PathBuf>,
        /// Override the integration frame from the params file
        #[arg(long, value_parser = parse_frame)]
        frame: Option<Frame>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Sweep the drive carrier across the conditional resonances
    Sweep {
        #[arg(long)]
        params: Option<PathBuf>,
        /// Sample count across the sweep window
        #[arg(long, default_value_t = 21)]
        points: usize,
        /// Half-width of the window in units of |coupling|
        #[arg(long, default_value_t = 6.0)]
        span: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Timescale ordering constraints for the pulse
    Feasibility {
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

fn parse_role(s: &str) -> std::result::Result<distsim::Role, String> {
    match s.to_ascii_uppercase().as_str() {
        "ALICE" => Ok(distsim::Role::Alice),
        "BOB" => Ok(distsim::Role::Bob),
        other => Err(format!("unknown role `{other}`, expected ALICE or BOB")),
    }
}

fn parse_model(s: &str) -> std::result::Result<DispersiveModel, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_frame(s: &str) -> std::result::Result<Frame, String> {
    match s.to_ascii_lowercase().as_str() {
        "full" => Ok(Frame::Full),
        "rwa" => Ok(Frame::Rwa),
        other => Err(format!("unknown frame `{other}`, expected full or rwa")),
    }
}

/// Parses a single-qubit state: a named preset or four comma-separated
/// floats (re0, im0, re1, im1), normalized on input.
pub fn parse_state(spec: &str) -> Result<[Complex64; 2]> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match spec {
        "0" => return Ok(crate::qstate::ket_zero()),
        "1" => return Ok(crate::qstate::ket_one()),
        "+" => return Ok(crate::qstate::ket_plus()),
        "-" => return Ok(crate::qstate::ket_minus()),
        "i" => return Ok([c(h, 0.0), c(0.0, h)]),
        "-i" => return Ok([c(h, 0.0), c(0.0, -h)]),
        _ => {}
    }
    let parts: Vec<f64> = spec
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Params(format!("state `{spec}`: {e}")))?;
    if parts.len() != 4 {
        return Err(Error::Params(format!(
            "state `{spec}`: expected 4 comma-separated floats (re0,im0,re1,im1)"
        )));
    }
    let a = c(parts[0], parts[1]);
    let b = c(parts[2], parts[3]);
    let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
    if norm == 0.0 {
        return Err(Error::Params(format!("state `{spec}` has zero norm")));
    }
    Ok([a / norm, b / norm])
}

fn print_json<T: Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("reports serialize")
    );
}

fn load_or_default_params(path: &Option<PathBuf>) -> Result<ParamsFile> {
    match path {
        Some(p) => dotsim::load_params(p),
        None => Ok(ParamsFile {
            dot: dotsim::default_dot_params(),
            drive: dotsim::default_drive(Frame::Rwa)?,
        }),
    }
}

fn json_only(format: Format) -> Result<()> {
    if format == Format::Csv {
        return Err(Error::Params(
            "csv output is only available for homogeneous sweep rows".to_string(),
        ));
    }
    Ok(())
}

#[derive(Serialize)]
struct BellRow {
    kind: &'static str,
    amplitudes: Vec<[f64; 2]>,
    measurement: Vec<(String, f64)>,
}

fn cmd_bell(format: Format) -> Result<i32> {
    json_only(format)?;
    let mut rows = Vec::new();
    let mut ok = true;
    for kind in BellKind::ALL {
        let state = bell_pair(kind);
        let dist = bell_measure(&state)?;
        for (k, p) in &dist {
            if *k == kind && (p - 1.0).abs() > 1e-10 {
                ok = false;
            }
        }
        rows.push(BellRow {
            kind: kind.label(),
            amplitudes: state.amps().iter().map(|a| [a.re, a.im]).collect(),
            measurement: dist
                .iter()
                .map(|(k, p)| (k.label().to_string(), *p))
                .collect(),
        });
    }
    print_json(&rows);
    if !ok {
        eprintln!("check failed: a Bell state was not identified with probability 1");
        return Ok(1);
    }
    Ok(0)
}

#[derive(Serialize)]
struct Swap3Report {
    pairs: usize,
    seed: u64,
    min_fidelity: f64,
}

fn cmd_swap3(pairs: usize, seed: u64, format: Format) -> Result<i32> {
    json_only(format)?;
    let gate = swap3(true);
    let mut rng = random::rng_from_seed(seed);
    let mut min_fidelity: f64 = 1.0;
    for _ in 0..pairs.max(1) {
        let a = random::random_qubit(&mut rng);
        let b = random::random_qubit(&mut rng);
        let swapped = QReg::prepare(&[a, b])?.apply(&gate, &[0, 1])?;
        let want = QReg::prepare(&[b, a])?;
        min_fidelity = min_fidelity.min(swapped.fidelity(&want)?);
    }
    print_json(&Swap3Report {
        pairs: pairs.max(1),
        seed,
        min_fidelity,
    });
    if min_fidelity < 1.0 - 1e-10 {
        eprintln!("check failed: swap fidelity dropped to {min_fidelity}");
        return Ok(1);
    }
    Ok(0)
}

#[derive(Serialize)]
struct DistswapReport {
    mode: &'static str,
    branches: Vec<protocols::BranchReport>,
    total_probability: f64,
    min_fidelity: f64,
    ledger: protocols::ResourceLedger,
    #[serde(skip_serializing_if = "Option::is_none")]
    calibration: Option<protocols::CalibrationTable>,
    #[serde(skip_serializing_if = "Option::is_none")]
    calibration_identity_only: Option<bool>,
}

#[allow(clippy::too_many_arguments)]
fn cmd_distswap(
    alpha: &str,
    beta: &str,
    sample: bool,
    seed: u64,
    calibrate: bool,
    calibration_inputs: usize,
    format: Format,
) -> Result<i32> {
    json_only(format)?;
    let alpha = parse_state(alpha)?;
    let beta = parse_state(beta)?;
    let mode = if sample {
        RunMode::Sample(seed)
    } else {
        RunMode::Enumerate
    };
    let branches = protocols::distributed_swap(&alpha, &beta, mode)?;
    let total_probability: f64 = branches.iter().map(|b| b.probability).sum();
    let min_fidelity = branches
        .iter()
        .map(|b| b.fidelity_h0.min(b.fidelity_h5))
        .fold(1.0f64, f64::min);
    let (calibration, calibration_identity_only) = if calibrate {
        let table = protocols::calibrate_corrections(calibration_inputs, seed)?;
        let identity = table.is_identity_only();
        (Some(table), Some(identity))
    } else {
        (None, None)
    };
    let report = DistswapReport {
        mode: if sample { "sample" } else { "enumerate" },
        branches,
        total_probability,
        min_fidelity,
        ledger: protocols::distributed_swap_ledger(),
        calibration,
        calibration_identity_only,
    };
    print_json(&report);
    let enumerated_total_ok = sample || (report.total_probability - 1.0).abs() <= 1e-9;
    if report.min_fidelity < 1.0 - 1e-9 || !enumerated_total_ok {
        eprintln!(
            "check failed: min branch fidelity {} / total probability {}",
            report.min_fidelity, report.total_probability
        );
        return Ok(1);
    }
    Ok(0)
}

#[derive(Serialize)]
struct TeleportCliReport {
    mode: &'static str,
    branches: Vec<protocols::TeleportReport>,
    min_fidelity: f64,
    teleport_ledger: protocols::ResourceLedger,
    double_teleport_ledger: protocols::ResourceLedger,
    distributed_swap_ledger: protocols::ResourceLedger,
    ledgers_match: bool,
}

fn cmd_teleport(xi: &str, sample: bool, seed: u64, format: Format) -> Result<i32> {
    json_only(format)?;
    let xi = parse_state(xi)?;
    let mode = if sample {
        RunMode::Sample(seed)
    } else {
        RunMode::Enumerate
    };
    let branches = protocols::teleport(&xi, mode)?;
    let min_fidelity = branches.iter().map(|b| b.fidelity).fold(1.0f64, f64::min);
    let report = TeleportCliReport {
        mode: if sample { "sample" } else { "enumerate" },
        branches,
        min_fidelity,
        teleport_ledger: protocols::teleport_ledger(),
        double_teleport_ledger: protocols::double_teleport_ledger(),
        distributed_swap_ledger: protocols::distributed_swap_ledger(),
        ledgers_match: protocols::double_teleport_ledger()
            == protocols::distributed_swap_ledger(),
    };
    print_json(&report);
    if report.min_fidelity < 1.0 - 1e-10 || !report.ledgers_match {
        eprintln!("check failed: teleport fidelity {}", report.min_fidelity);
        return Ok(1);
    }
    Ok(0)
}

fn cmd_ramsey(command: RamseyCommand) -> Result<i32> {
    match command {
        RamseyCommand::Solve {
            model,
            grid,
            theta,
            refine,
            json: _,
        } => {
            let report = solve_phases(model, grid, refine, theta)?;
            print_json(&report);
            // An empty hit list is a finding, not a failure.
            Ok(0)
        }
    }
}

fn sweep_csv(rows: &[dotsim::SweepRow]) -> String {
    let mut out = String::from("omega_drive,T,P10_11,P00_flip,F_raw,F_phase_opt\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.omega_drive, r.t, r.p10_11, r.p00_flip, r.f_raw, r.f_phase_opt
        ));
    }
    out
}

fn cmd_dots(command: DotsCommand) -> Result<i32> {
    match command {
        DotsCommand::Spectrum { params, format } => {
            json_only(format)?;
            let file = load_or_default_params(&params)?;
            print_json(&file.dot.spectrum()?);
            Ok(0)
        }
        DotsCommand::Pulse {
            params,
            frame,
            format,
        } => {
            json_only(format)?;
            let file = load_or_default_params(&params)?;
            let mut drive = file.drive;
            if let Some(frame) = frame {
                drive.frame = frame;
            }
            print_json(&dotsim::cnot_fidelity(&file.dot, &drive)?);
            Ok(0)
        }
        DotsCommand::Sweep {
            params,
            points,
            span,
            format,
        } => {
            let file = load_or_default_params(&params)?;
            let resonance = file.dot.target_transition(1)?;
            let coupling = file.dot.omega_bar()?.abs();
            let points = points.max(2);
            let carriers: Vec<f64> = (0..points)
                .map(|i| {
                    let frac = i as f64 / (points - 1) as f64 * 2.0 - 1.0;
                    resonance + frac * span * coupling
                })
                .collect();
            let rows = dotsim::sweep(&file.dot, &file.drive, &carriers)?;
            match format {
                Format::Csv => print!("{}", sweep_csv(&rows)),
                Format::Json => print_json(&rows),
            }
            Ok(0)
        }
        DotsCommand::Feasibility { params, format } => {
            json_only(format)?;
            let file = load_or_default_params(&params)?;
            let report = dotsim::feasibility(&file.dot, &file.drive)?;
            print_json(&report);
            if !report.pass {
                eprintln!(
                    "check failed: decoherence_ok={} selectivity_ok={}",
                    report.decoherence_ok, report.selectivity_ok
                );
                return Ok(1);
            }
            Ok(0)
        }
    }
}

fn cmd_serve_referee(port: u16, alpha: &str, beta: &str, seed: u64) -> Result<i32> {
    let alpha = parse_state(alpha)?;
    let beta = parse_state(beta)?;
    let listener = std::net::TcpListener::bind(("127.0.0.1", port))
        .map_err(|e| Error::Transport(format!("bind 127.0.0.1:{port}: {e}")))?;
    let local = listener
        .local_addr()
        .map_err(|e| Error::Transport(format!("local_addr: {e}")))?;
    eprintln!("referee listening on {local}");
    let referee = distsim::Referee::new(alpha, beta, seed)?;
    let (mut a, mut b) = distsim::accept_parties(&listener)?;
    let (branch, transcript) = referee.run(&mut a, &mut b)?;
    // JSON lines: one object per transcript entry, branch report last.
    println!("{}", distsim::transcript_to_json_lines(&transcript));
    println!(
        "{}",
        serde_json::to_string(&branch).expect("reports serialize")
    );
    if branch.fidelity_h0.min(branch.fidelity_h5) < 1.0 - 1e-9 {
        eprintln!("check failed: branch fidelity below threshold");
        return Ok(1);
    }
    Ok(0)
}

fn run_command(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Bell { format } => cmd_bell(format),
        Command::Swap3 {
            pairs,
            seed,
            format,
        } => cmd_swap3(pairs, seed, format),
        Command::Distswap {
            alpha,
            beta,
            enumerate: _,
            sample,
            seed,
            calibrate,
            calibration_inputs,
            format,
        } => cmd_distswap(
            &alpha,
            &beta,
            sample,
            seed,
            calibrate,
            calibration_inputs,
            format,
        ),
        Command::Teleport {
            xi,
            enumerate: _,
            sample,
            seed,
            format,
        } => cmd_teleport(&xi, sample, seed, format),
        Command::Ramsey { command } => cmd_ramsey(command),
        Command::Dots { command } => cmd_dots(command),
        Command::Feasibility { params, format } => {
            cmd_dots(DotsCommand::Feasibility { params, format })
        }
        Command::ServeReferee {
            port,
            alpha,
            beta,
            seed,
        } => cmd_serve_referee(port, &alpha, &beta, seed),
        Command::Party { role, connect } => {
            distsim::run_party_client(role, &connect)?;
            Ok(0)
        }
    }
}

/// Parses and runs a full command line, returning the process exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match run_command(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Params(_) => 2,
                _ => 1,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn state_parsing() {
        let plus = parse_state("+").unwrap();
        assert!((plus[0].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        let custom = parse_state("3,0,4,0").unwrap();
        assert!((custom[0].re - 0.6).abs() < 1e-12);
        assert!((custom[1].re - 0.8).abs() < 1e-12);
        assert!(parse_state("nope").is_err());
        assert!(parse_state("0,0,0,0").is_err());
        assert!(parse_state("1,2,3").is_err());
    }

    #[test]
    fn exit_codes() {
        // Success paths.
        assert_eq!(run_from(["cnotsim", "bell"]), 0);
        assert_eq!(run_from(["cnotsim", "swap3", "--pairs", "2"]), 0);
        assert_eq!(run_from(["cnotsim", "distswap", "--sample", "--seed", "3"]), 0);
        assert_eq!(run_from(["cnotsim", "teleport", "--xi", "i"]), 0);
        // Usage errors.
        assert_eq!(run_from(["cnotsim", "no-such-command"]), 2);
        assert_eq!(run_from(["cnotsim", "bell", "--bogus-flag"]), 2);
        assert_eq!(run_from(["cnotsim", "bell", "--format", "csv"]), 2);
        // Missing params file is a usage error naming the path.
        assert_eq!(
            run_from(["cnotsim", "dots", "spectrum", "--params", "/no/such/file.json"]),
            2
        );
    }

    #[test]
    fn feasibility_failure_exit_code() {
        let dir = std::env::temp_dir().join("cnotsim-cli-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("short_pulse.json");
        let mut drive = dotsim::default_drive(Frame::Rwa).unwrap();
        drive.duration = 1e-13;
        let file = ParamsFile {
            dot: dotsim::default_dot_params(),
            drive,
        };
        std::fs::write(&path, serde_json::to_string_pretty(&file).unwrap()).unwrap();
        let code = run_from([
            "cnotsim",
            "dots",
            "feasibility",
            "--params",
            path.to_str().unwrap(),
        ]);
        assert_eq!(code, 1);
    }
}

//! Command line driver: run circuit files, walk through the canonical gate
//! demonstrations, count subspaces, and run the statistical suite.
//!
//! Exit codes: 0 on success, 1 when a requested verification fails, 2 for
//! parse or argument errors.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use rtwlogic::{
    binary_string, decode_superposition, orthogonality_suite, run_circuit, subspace_count,
    CircuitFile, Error, ReferenceSystem, Report, RunOptions, RunReport, Superposition, XnorMode,
    XnorVariant, XorVariant,
};

#[derive(Parser)]
#[command(
    name = "rtwlogic",
    version,
    about = "Noise-based logic simulator over random telegraph waves"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a circuit file, run it, and report the decoded strings
    Run {
        /// Circuit file path
        file: PathBuf,
        /// Override the file's seed directive
        #[arg(long)]
        seed: Option<u64>,
        /// Cross-check the mask engine against the signal-level simulator
        /// over M cycles
        #[arg(long, value_name = "M")]
        verify_signal: Option<u64>,
        /// Statistical presence estimates over M cycles
        #[arg(long, value_name = "M")]
        stats: Option<u64>,
        /// Write the output waveform as CSV to PATH (needs --cycles)
        #[arg(long, value_name = "PATH", requires = "cycles")]
        dump_waveform: Option<PathBuf>,
        /// Number of cycles for --dump-waveform
        #[arg(long, value_name = "M", requires = "dump_waveform")]
        cycles: Option<u64>,
        /// Emit the full report as JSON
        #[arg(long)]
        json: bool,
    },
    /// Walk through the canonical four-string gate demonstration
    Demo {
        gate: DemoGate,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Count the subspaces of an N-bit superposition
    Subspaces {
        n_bits: usize,
        #[arg(long)]
        json: bool,
    },
    /// Statistical orthogonality suite for an N-bit system over M cycles
    Orthogonality {
        n_bits: usize,
        cycles: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum DemoGate {
    Xor,
    Xnor,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run {
            file,
            seed,
            verify_signal,
            stats,
            dump_waveform,
            cycles,
            json,
        } => cmd_run(
            file,
            seed,
            verify_signal,
            stats,
            dump_waveform,
            cycles,
            json,
        ),
        Command::Demo { gate, seed, json } => cmd_demo(gate, seed, json),
        Command::Subspaces { n_bits, json } => cmd_subspaces(n_bits, json),
        Command::Orthogonality {
            n_bits,
            cycles,
            seed,
            json,
        } => cmd_orthogonality(n_bits, cycles, seed, json),
    };
    match outcome {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

/// Errors map to exit 2 except undecodable systems, which are a runtime
/// verification failure.
fn run_error(err: Error) -> Result<ExitCode, String> {
    if matches!(err, Error::Undecodable { .. }) {
        eprintln!("error: {err}");
        Ok(ExitCode::from(1))
    } else {
        Err(err.to_string())
    }
}

fn cmd_run(
    path: PathBuf,
    seed: Option<u64>,
    verify_signal: Option<u64>,
    stats: Option<u64>,
    dump_waveform: Option<PathBuf>,
    cycles: Option<u64>,
    json: bool,
) -> Result<ExitCode, String> {
    let text = fs::read_to_string(&path)
        .map_err(|err| format!("cannot read {}: {err}", path.display()))?;
    let file = CircuitFile::parse(&text).map_err(|err| format!("{}: {err}", path.display()))?;
    let options = RunOptions {
        seed_override: seed,
        verify_signal_cycles: verify_signal,
        stats_cycles: stats,
        waveform_cycles: cycles,
    };
    let report = match run_circuit(&file, &options) {
        Ok(report) => report,
        Err(err) => return run_error(err),
    };

    if let (Some(csv_path), Some(waveform)) = (&dump_waveform, &report.waveform) {
        fs::write(csv_path, waveform.to_csv())
            .map_err(|err| format!("cannot write {}: {err}", csv_path.display()))?;
    }

    if json {
        println!("{:#}", report.to_json());
    } else {
        print_run_report(&report);
        if let Some(csv_path) = &dump_waveform {
            println!(
                "waveform: {} cycles written to {}",
                cycles.unwrap_or(0),
                csv_path.display()
            );
        }
    }
    Ok(exit_for(report.verifications_passed()))
}

fn print_superposition(sup: &Superposition) {
    for term in sup.terms() {
        if term.multiplicity() == 1 {
            println!("  {}", term.binary_string());
        } else {
            println!("  {} x{}", term.binary_string(), term.multiplicity());
        }
    }
}

fn print_run_report(report: &RunReport) {
    println!(
        "circuit: {} bits, seed {}, {} strings, {} gates",
        report.n_bits,
        report.seed,
        report.before.total_multiplicity(),
        report.schedule.len()
    );
    println!("before:");
    print_superposition(&report.before);
    for op in report.schedule.ops() {
        println!("  gate: {op}");
    }
    println!("after ({} multiplications):", report.mul_counter);
    print_superposition(&report.after);
    println!("wires:");
    for (id, mask) in wire_rows(&report.wire_table) {
        println!("  {id} {mask}");
    }
    if let Some(check) = report.signal_check {
        match check.first_divergence {
            None => println!("signal check over {} cycles: PASS", check.cycles),
            Some(t) => println!(
                "signal check over {} cycles: FAIL (first divergence at t={t})",
                check.cycles
            ),
        }
    }
    if let Some(presence) = &report.presence {
        println!("presence:");
        print_report_lines(presence);
    }
}

fn wire_rows(table: &serde_json::Value) -> Vec<(String, String)> {
    table
        .as_array()
        .into_iter()
        .flatten()
        .map(|row| {
            (
                format!("({},{})", row[0], row[1]),
                row[2].as_str().unwrap_or_default().to_string(),
            )
        })
        .collect()
}

fn print_report_lines(report: &Report) {
    for check in &report.checks {
        println!(
            "  {} {}: observed {:.6} (bound {:.6})",
            if check.pass { "PASS" } else { "FAIL" },
            check.name,
            check.observed,
            check.bound
        );
    }
}

fn exit_for(pass: bool) -> ExitCode {
    if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn cmd_demo(gate: DemoGate, seed: u64, json: bool) -> Result<ExitCode, String> {
    let n_bits = 3;
    let (i, f, h) = (1usize, 2usize, 3usize);
    // Arbitrary initial output-bit labels; the gates make them irrelevant.
    let labels = [1u64, 0, 0, 1];
    let values: Vec<u64> = [(0u64, 0u64), (1, 0), (0, 1), (1, 1)]
        .iter()
        .zip(labels)
        .map(|(&(iv, fv), x)| iv | fv << 1 | x << 2)
        .collect();
    let sup = Superposition::from_values(n_bits, &values).map_err(|e| e.to_string())?;
    let mut sys = ReferenceSystem::new(n_bits, seed).map_err(|e| e.to_string())?;

    let steps: Vec<String> = match gate {
        DemoGate::Xor => {
            sys.xor_gate(i, f, h, XorVariant::Ones)
                .map_err(|e| e.to_string())?;
            vec![
                format!("form the pair product R({h},0)*R({h},1) from the base generators"),
                format!("multiply wire ({h},1) by it  (clearing: every string reads h=0)"),
                format!("multiply wire ({i},1) by it"),
                format!("multiply wire ({f},1) by it"),
            ]
        }
        DemoGate::Xnor => {
            sys.xnor_gate(i, f, h, XnorMode::Direct, XnorVariant::Standard)
                .map_err(|e| e.to_string())?;
            vec![
                format!("form the pair product R({h},0)*R({h},1) from the base generators"),
                format!("multiply wire ({h},1) by it  (clearing: every string reads h=0)"),
                format!("multiply wire ({i},1) by it"),
                format!("multiply wire ({f},0) by it"),
            ]
        }
    };

    let decoded = decode_superposition(&sup, &sys).map_err(|e| e.to_string())?;
    let mut pass = true;
    let mut rows = Vec::new();
    for &value in &values {
        let term = rtwlogic::StringTerm::from_number(value, n_bits).map_err(|e| e.to_string())?;
        let out = rtwlogic::decode_term(&term, &sys).map_err(|e| e.to_string())?;
        let iv = value & 1;
        let fv = value >> 1 & 1;
        let expect = match gate {
            DemoGate::Xor => iv ^ fv,
            DemoGate::Xnor => 1 ^ iv ^ fv,
        };
        pass &= out == (value & !0b100) | expect << 2;
        rows.push((value, out));
    }

    if json {
        let after = Superposition::from_counts(
            n_bits,
            &decoded.iter().map(|(&v, &m)| (v, m)).collect::<Vec<_>>(),
        )
        .map_err(|e| e.to_string())?;
        let body = serde_json::json!({
            "gate": match gate { DemoGate::Xor => "xor", DemoGate::Xnor => "xnor" },
            "bits": n_bits,
            "inputs": [i, f],
            "output": h,
            "before": sup.to_json(),
            "after": after.to_json(),
            "mul_counter": sys.mul_counter(),
            "pass": pass,
        });
        println!("{body:#}");
        return Ok(exit_for(pass));
    }

    let name = match gate {
        DemoGate::Xor => "XOR",
        DemoGate::Xnor => "XNOR",
    };
    println!("{name} of bits {{i={i}, f={f}}} into bit {{h={h}}}, seed {seed}");
    println!("four strings, h starting with arbitrary labels:");
    println!("  i f h   string");
    for &value in &values {
        println!(
            "  {} {} {}   {}",
            value & 1,
            value >> 1 & 1,
            value >> 2 & 1,
            binary_string(value, n_bits)
        );
    }
    println!("steps:");
    for (k, step) in steps.iter().enumerate() {
        println!("  {}. {step}", k + 1);
    }
    println!("after the gate ({} multiplications):", sys.mul_counter());
    println!("  i f h   string");
    for &(value, out) in &rows {
        println!(
            "  {} {} {}   {}",
            value & 1,
            value >> 1 & 1,
            out >> 2 & 1,
            binary_string(out, n_bits)
        );
    }
    println!(
        "every decoded h equals {}: {}",
        match gate {
            DemoGate::Xor => "i XOR f",
            DemoGate::Xnor => "NOT(i XOR f)",
        },
        if pass { "yes" } else { "NO" }
    );
    Ok(exit_for(pass))
}

fn cmd_subspaces(n_bits: usize, json: bool) -> Result<ExitCode, String> {
    let count = subspace_count(n_bits).map_err(|e| e.to_string())?;
    if json {
        println!(
            "{:#}",
            serde_json::json!({"bits": n_bits, "count": count.to_string()})
        );
    } else {
        println!("{count}");
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_orthogonality(
    n_bits: usize,
    cycles: u64,
    seed: u64,
    json: bool,
) -> Result<ExitCode, String> {
    let report = orthogonality_suite(seed, n_bits, cycles).map_err(|e| e.to_string())?;
    if json {
        println!("{:#}", report.to_json());
    } else {
        let total = report.checks.len();
        let failed: Vec<_> = report.failures().collect();
        if failed.is_empty() {
            println!("{total} checks over {cycles} cycles: all PASS");
        } else {
            for check in &failed {
                println!(
                    "FAIL {}: observed {:.6} (bound {:.6})",
                    check.name, check.observed, check.bound
                );
            }
            println!("{} of {total} checks FAILED", failed.len());
        }
    }
    Ok(exit_for(report.all_pass()))
}

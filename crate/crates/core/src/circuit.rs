//! Line-oriented circuit text format, parser, and the runner behind the CLI.
//!
//! ```text
//! # one directive per line, '#' starts a comment
//! bits 3            # required first directive
//! seed 7            # optional, default 0
//! init 010 x2       # MSB first; significance 1 is the rightmost character
//! not 1
//! clear 2
//! xor 1 2 -> 3      # append `alt` for the value-0-wire variant
//! xnor 1 2 -> 3     # append `alt` or `vianot`
//! ```

use std::fmt;

use serde_json::{json, Value};
use thiserror::Error as ThisError;

use crate::error::Error;
use crate::logic::{
    decode_superposition, StringTerm, Superposition, XnorMode, XnorVariant, XorVariant,
};
use crate::system::ReferenceSystem;
use crate::verify::{
    compare_with_signal, engine_waveform, presence_report, GateOp, GateSchedule, Report,
    SignalCheck, Waveform,
};

/// Parse failure with a 1-based line and column pointing at the offending
/// token.
#[derive(Debug, Clone, PartialEq, Eq, ThisError)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            column,
            message: message.into(),
        }
    }
}

/// A parsed circuit description.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircuitFile {
    pub n_bits: usize,
    pub seed: Option<u64>,
    pub inits: Vec<StringTerm>,
    pub schedule: GateSchedule,
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let body = &line[..line.find('#').unwrap_or(line.len())];
    let mut tokens = Vec::new();
    let mut start = None;
    for (offset, ch) in body.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                tokens.push(Token {
                    text: &body[s..offset],
                    column: s + 1,
                });
            }
        } else if start.is_none() {
            start = Some(offset);
        }
    }
    if let Some(s) = start {
        tokens.push(Token {
            text: &body[s..],
            column: s + 1,
        });
    }
    tokens
}

impl CircuitFile {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut n_bits: Option<usize> = None;
        let mut seed: Option<u64> = None;
        let mut seed_line: Option<usize> = None;
        let mut inits: Vec<StringTerm> = Vec::new();
        let mut schedule = GateSchedule::default();
        let mut line_count = 0usize;

        for (line_index, raw) in text.lines().enumerate() {
            let line_no = line_index + 1;
            line_count = line_no;
            let tokens = tokenize(raw);
            let Some(head) = tokens.first() else {
                continue;
            };

            let bits = match n_bits {
                Some(n) => n,
                None => {
                    if head.text != "bits" {
                        return Err(ParseError::new(
                            line_no,
                            head.column,
                            "first directive must be `bits`",
                        ));
                    }
                    let n = parse_number(line_no, &tokens, 1, "bit count")? as usize;
                    if !(1..=crate::rtw::MAX_NOISE_BITS).contains(&n) {
                        return Err(ParseError::new(
                            line_no,
                            tokens[1].column,
                            format!(
                                "bit count must be within 1..={}",
                                crate::rtw::MAX_NOISE_BITS
                            ),
                        ));
                    }
                    expect_end(line_no, &tokens, 2)?;
                    n_bits = Some(n);
                    continue;
                }
            };

            match head.text {
                "bits" => {
                    return Err(ParseError::new(
                        line_no,
                        head.column,
                        "duplicate `bits` directive",
                    ));
                }
                "seed" => {
                    if let Some(previous) = seed_line {
                        return Err(ParseError::new(
                            line_no,
                            head.column,
                            format!("duplicate `seed` directive (already set on line {previous})"),
                        ));
                    }
                    seed = Some(parse_number(line_no, &tokens, 1, "seed")?);
                    seed_line = Some(line_no);
                    expect_end(line_no, &tokens, 2)?;
                }
                "init" => {
                    let literal = tokens.get(1).ok_or_else(|| {
                        ParseError::new(line_no, head.column, "`init` needs a binary literal")
                    })?;
                    if let Some(bad) = literal.text.chars().find(|c| *c != '0' && *c != '1') {
                        return Err(ParseError::new(
                            line_no,
                            literal.column,
                            format!("binary literal may contain only 0 and 1, found '{bad}'"),
                        ));
                    }
                    if literal.text.len() != bits {
                        return Err(ParseError::new(
                            line_no,
                            literal.column,
                            format!(
                                "literal length {} does not match bits {bits}",
                                literal.text.len()
                            ),
                        ));
                    }
                    let value = u64::from_str_radix(literal.text, 2).expect("validated binary");
                    let multiplicity = match tokens.get(2) {
                        None => 1,
                        Some(tok) => {
                            let digits = tok.text.strip_prefix('x').ok_or_else(|| {
                                ParseError::new(
                                    line_no,
                                    tok.column,
                                    format!("expected multiplicity like `x3`, got `{}`", tok.text),
                                )
                            })?;
                            let m: u64 = digits.parse().map_err(|_| {
                                ParseError::new(
                                    line_no,
                                    tok.column,
                                    format!("invalid multiplicity `{}`", tok.text),
                                )
                            })?;
                            if m == 0 {
                                return Err(ParseError::new(
                                    line_no,
                                    tok.column,
                                    "multiplicity must be at least 1",
                                ));
                            }
                            m
                        }
                    };
                    expect_end(line_no, &tokens, 3)?;
                    inits.push(
                        StringTerm::with_multiplicity(value, bits, multiplicity)
                            .expect("literal already validated"),
                    );
                }
                "not" | "clear" => {
                    let h = parse_index(line_no, &tokens, 1, bits)?;
                    expect_end(line_no, &tokens, 2)?;
                    schedule.push(if head.text == "not" {
                        GateOp::Not { h }
                    } else {
                        GateOp::Clear { h }
                    });
                }
                "xor" | "xnor" => {
                    let i = parse_index(line_no, &tokens, 1, bits)?;
                    let f = parse_index(line_no, &tokens, 2, bits)?;
                    let arrow = tokens.get(3).ok_or_else(|| {
                        ParseError::new(line_no, head.column, "expected `-> <h>` after the inputs")
                    })?;
                    if arrow.text != "->" {
                        return Err(ParseError::new(
                            line_no,
                            arrow.column,
                            format!("expected `->`, got `{}`", arrow.text),
                        ));
                    }
                    let h = parse_index(line_no, &tokens, 4, bits)?;
                    if i == f {
                        return Err(ParseError::new(
                            line_no,
                            tokens[2].column,
                            format!("{} arguments must be pairwise distinct", head.text),
                        ));
                    }
                    if h == i || h == f {
                        return Err(ParseError::new(
                            line_no,
                            tokens[4].column,
                            format!("{} arguments must be pairwise distinct", head.text),
                        ));
                    }
                    let suffix = tokens.get(5).map(|t| (t.text, t.column));
                    expect_end(line_no, &tokens, 6)?;
                    let op = if head.text == "xor" {
                        let variant = match suffix {
                            None => XorVariant::Ones,
                            Some(("alt", _)) => XorVariant::Zeros,
                            Some((other, column)) => {
                                return Err(ParseError::new(
                                    line_no,
                                    column,
                                    format!("unknown xor option `{other}` (expected `alt`)"),
                                ));
                            }
                        };
                        GateOp::Xor { i, f, h, variant }
                    } else {
                        let (mode, variant) = match suffix {
                            None => (XnorMode::Direct, XnorVariant::Standard),
                            Some(("alt", _)) => (XnorMode::Direct, XnorVariant::Alternate),
                            Some(("vianot", _)) => (XnorMode::ViaNot, XnorVariant::Standard),
                            Some((other, column)) => {
                                return Err(ParseError::new(
                                    line_no,
                                    column,
                                    format!(
                                        "unknown xnor option `{other}` (expected `alt` or `vianot`)"
                                    ),
                                ));
                            }
                        };
                        GateOp::Xnor {
                            i,
                            f,
                            h,
                            mode,
                            variant,
                        }
                    };
                    schedule.push(op);
                }
                other => {
                    return Err(ParseError::new(
                        line_no,
                        head.column,
                        format!("unknown directive `{other}`"),
                    ));
                }
            }
        }

        let n_bits = n_bits
            .ok_or_else(|| ParseError::new(line_count.max(1), 1, "missing `bits` directive"))?;
        if inits.is_empty() {
            return Err(ParseError::new(
                line_count.max(1),
                1,
                "circuit declares no `init` strings (at least one is required)",
            ));
        }
        Ok(Self {
            n_bits,
            seed,
            inits,
            schedule,
        })
    }

    /// The initial superposition described by the `init` lines.
    pub fn superposition(&self) -> Result<Superposition, Error> {
        Superposition::new(self.inits.iter().copied())
    }
}

fn parse_number(
    line: usize,
    tokens: &[Token<'_>],
    position: usize,
    what: &str,
) -> Result<u64, ParseError> {
    let Some(token) = tokens.get(position) else {
        return Err(ParseError::new(
            line,
            tokens[position - 1].column,
            format!("missing {what}"),
        ));
    };
    token.text.parse().map_err(|_| {
        ParseError::new(
            line,
            token.column,
            format!("invalid {what} `{}`", token.text),
        )
    })
}

fn parse_index(
    line: usize,
    tokens: &[Token<'_>],
    position: usize,
    n_bits: usize,
) -> Result<usize, ParseError> {
    let index = parse_number(line, tokens, position, "bit index")? as usize;
    if index == 0 || index > n_bits {
        return Err(ParseError::new(
            line,
            tokens[position].column,
            format!("bit index {index} out of range 1..={n_bits}"),
        ));
    }
    Ok(index)
}

fn expect_end(line: usize, tokens: &[Token<'_>], from: usize) -> Result<(), ParseError> {
    if let Some(extra) = tokens.get(from) {
        return Err(ParseError::new(
            line,
            extra.column,
            format!("unexpected token `{}`", extra.text),
        ));
    }
    Ok(())
}

impl fmt::Display for CircuitFile {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(out, "bits {}", self.n_bits)?;
        if let Some(seed) = self.seed {
            writeln!(out, "seed {seed}")?;
        }
        for init in &self.inits {
            if init.multiplicity() == 1 {
                writeln!(out, "init {}", init.binary_string())?;
            } else {
                writeln!(
                    out,
                    "init {} x{}",
                    init.binary_string(),
                    init.multiplicity()
                )?;
            }
        }
        for op in self.schedule.ops() {
            writeln!(out, "{op}")?;
        }
        Ok(())
    }
}

/// Knobs for [`run_circuit`]. Every optional field enables one extra
/// section of the report.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Overrides the file's `seed` directive.
    pub seed_override: Option<u64>,
    /// Cross-check the mask engine against the signal-level simulator.
    pub verify_signal_cycles: Option<u64>,
    /// Statistical presence estimates for every term.
    pub stats_cycles: Option<u64>,
    /// Capture the output waveform.
    pub waveform_cycles: Option<u64>,
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub n_bits: usize,
    pub seed: u64,
    pub before: Superposition,
    pub after: Superposition,
    pub schedule: GateSchedule,
    pub wire_table: Value,
    pub mul_counter: u64,
    pub signal_check: Option<SignalCheck>,
    pub presence: Option<Report>,
    pub waveform: Option<Waveform>,
}

impl RunReport {
    /// True when every requested verification passed.
    pub fn verifications_passed(&self) -> bool {
        self.signal_check.is_none_or(|c| c.passed())
            && self.presence.as_ref().is_none_or(|r| r.all_pass())
    }

    pub fn to_json(&self) -> Value {
        let mut body = json!({
            "bits": self.n_bits,
            "seed": self.seed,
            "before": self.before.to_json(),
            "after": self.after.to_json(),
            "schedule": self.schedule.ops().iter().map(|op| op.to_string()).collect::<Vec<_>>(),
            "wire_table": self.wire_table,
            "mul_counter": self.mul_counter,
            "pass": self.verifications_passed(),
        });
        if let Some(check) = self.signal_check {
            body["signal_check"] = serde_json::to_value(check).expect("serializable");
        }
        if let Some(presence) = &self.presence {
            body["presence"] = presence.to_json();
        }
        body
    }
}

/// Build a fresh system, apply the circuit's schedule, and decode before and
/// after. Requested verifications run against the mutated system.
pub fn run_circuit(file: &CircuitFile, options: &RunOptions) -> Result<RunReport, Error> {
    let seed = options.seed_override.or(file.seed).unwrap_or(0);
    let sup = file.superposition()?;
    let mut sys = ReferenceSystem::new(file.n_bits, seed)?;

    let before = decode_superposition(&sup, &sys)?;
    file.schedule.apply(&mut sys)?;
    let after = decode_superposition(&sup, &sys)?;

    let to_superposition = |decoded: std::collections::BTreeMap<u64, u64>| {
        let counts: Vec<(u64, u64)> = decoded.into_iter().collect();
        Superposition::from_counts(file.n_bits, &counts)
    };

    let signal_check = match options.verify_signal_cycles {
        Some(cycles) => Some(compare_with_signal(&sys, &sup, &file.schedule, cycles)?),
        None => None,
    };
    let presence = match options.stats_cycles {
        Some(cycles) => Some(presence_report(&sys, &sup, cycles)?),
        None => None,
    };
    let waveform = match options.waveform_cycles {
        Some(cycles) => Some(engine_waveform(&sup, &sys, cycles)?),
        None => None,
    };

    Ok(RunReport {
        n_bits: file.n_bits,
        seed,
        before: to_superposition(before)?,
        after: to_superposition(after)?,
        schedule: file.schedule.clone(),
        wire_table: sys.wire_table_json(),
        mul_counter: sys.mul_counter(),
        signal_check,
        presence,
        waveform,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_reference_example() {
        let file = CircuitFile::parse("bits 3\ninit 000\ninit 110\nxor 1 2 -> 3").unwrap();
        assert_eq!(file.n_bits, 3);
        assert_eq!(file.seed, None);
        assert_eq!(file.inits.len(), 2);
        assert_eq!(file.schedule.len(), 1);
        assert_eq!(
            file.schedule.ops()[0],
            GateOp::Xor {
                i: 1,
                f: 2,
                h: 3,
                variant: XorVariant::Ones
            }
        );
    }

    #[test]
    fn literal_length_mismatch_reports_line_two() {
        let err = CircuitFile::parse("bits 2\ninit 101").unwrap_err();
        assert_eq!(err.line, 2);
        assert_eq!(err.column, 6);
        assert!(err.message.contains("length 3"), "{}", err.message);
    }

    #[test]
    fn distinctness_violation_reports_line_three() {
        let err = CircuitFile::parse("bits 3\ninit 000\nxor 1 1 -> 2").unwrap_err();
        assert_eq!(err.line, 3);
        assert!(err.message.contains("distinct"), "{}", err.message);
    }

    #[test]
    fn missing_bits_and_missing_inits_are_errors() {
        let err = CircuitFile::parse("init 01\n").unwrap_err();
        assert_eq!(err.line, 1);
        assert!(err.message.contains("bits"), "{}", err.message);

        let err = CircuitFile::parse("").unwrap_err();
        assert!(err.message.contains("bits"), "{}", err.message);

        let err = CircuitFile::parse("bits 2\nnot 1").unwrap_err();
        assert!(err.message.contains("init"), "{}", err.message);
    }

    #[test]
    fn unknown_directive_and_index_errors_carry_positions() {
        let err = CircuitFile::parse("bits 2\nflip 1").unwrap_err();
        assert_eq!((err.line, err.column), (2, 1));
        assert!(err.message.contains("unknown directive"), "{}", err.message);

        let err = CircuitFile::parse("bits 2\ninit 00\nnot 3").unwrap_err();
        assert_eq!((err.line, err.column), (3, 5));
        assert!(err.message.contains("out of range"), "{}", err.message);
    }

    #[test]
    fn comments_blank_lines_and_seed_are_accepted() {
        let text =
            "# a circuit\nbits 3\n\nseed 42   # reproducible\ninit 011 x2\nxnor 1 3 -> 2 vianot\n";
        let file = CircuitFile::parse(text).unwrap();
        assert_eq!(file.seed, Some(42));
        assert_eq!(file.inits[0].multiplicity(), 2);
        assert_eq!(
            file.schedule.ops()[0],
            GateOp::Xnor {
                i: 1,
                f: 3,
                h: 2,
                mode: XnorMode::ViaNot,
                variant: XnorVariant::Standard
            }
        );
    }

    #[test]
    fn duplicate_directives_are_rejected() {
        assert!(CircuitFile::parse("bits 2\nbits 2\ninit 00").is_err());
        assert!(CircuitFile::parse("bits 2\nseed 1\nseed 2\ninit 00").is_err());
    }

    #[test]
    fn print_parse_round_trip() {
        let text = "bits 4\nseed 9\ninit 0000\ninit 1010 x3\nnot 2\nclear 4\nxor 1 2 -> 3 alt\nxnor 2 3 -> 4\nxnor 1 2 -> 4 vianot\n";
        let file = CircuitFile::parse(text).unwrap();
        let printed = file.to_string();
        let reparsed = CircuitFile::parse(&printed).unwrap();
        assert_eq!(file, reparsed);
    }

    #[test]
    fn run_reports_xor_decoding_and_cost() {
        let file =
            CircuitFile::parse("bits 3\ninit 000\ninit 001\ninit 010\ninit 011\nxor 1 2 -> 3")
                .unwrap();
        let report = run_circuit(&file, &RunOptions::default()).unwrap();
        assert_eq!(report.mul_counter, 4);
        let after: Vec<(String, u64)> = report
            .after
            .terms()
            .iter()
            .map(|t| (t.binary_string(), t.multiplicity()))
            .collect();
        // Terms are sorted ascending by value; every decoded h is i XOR f.
        assert_eq!(
            after,
            vec![
                ("000".to_string(), 1),
                ("011".to_string(), 1),
                ("101".to_string(), 1),
                ("110".to_string(), 1),
            ]
        );
        assert!(report.verifications_passed());
    }

    #[test]
    fn empty_schedule_keeps_decodings_equal() {
        let file = CircuitFile::parse("bits 2\ninit 01\ninit 10 x2").unwrap();
        let report = run_circuit(&file, &RunOptions::default()).unwrap();
        assert_eq!(report.before, report.after);
        assert_eq!(report.mul_counter, 0);
    }

    #[test]
    fn run_with_verification_options() {
        let file = CircuitFile::parse("bits 3\nseed 5\ninit 000\ninit 110\nxor 1 2 -> 3").unwrap();
        let options = RunOptions {
            verify_signal_cycles: Some(2000),
            stats_cycles: Some(20_000),
            waveform_cycles: Some(64),
            ..Default::default()
        };
        let report = run_circuit(&file, &options).unwrap();
        assert!(report.signal_check.unwrap().passed());
        assert!(report.presence.as_ref().unwrap().all_pass());
        assert_eq!(report.waveform.as_ref().unwrap().len(), 64);
        assert!(report.verifications_passed());
        let json = report.to_json();
        assert_eq!(json["mul_counter"], 4);
        assert_eq!(json["pass"], true);
    }

    #[test]
    fn seed_override_wins() {
        let file = CircuitFile::parse("bits 2\nseed 5\ninit 01").unwrap();
        let report = run_circuit(
            &file,
            &RunOptions {
                seed_override: Some(9),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(report.seed, 9);
    }

    #[test]
    fn waveform_csv_shape() {
        let file = CircuitFile::parse("bits 2\ninit 01\ninit 10").unwrap();
        let report = run_circuit(
            &file,
            &RunOptions {
                waveform_cycles: Some(3),
                ..Default::default()
            },
        )
        .unwrap();
        let csv = report.waveform.unwrap().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t,sum");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("0,"));
    }
}

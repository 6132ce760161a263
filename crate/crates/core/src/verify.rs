//! Independent oracles for the mask engine: a signal-level simulator that
//! never touches GF(2) algebra, exhaustive truth-table checks, and
//! statistical tests of the RTW identities.
//!
//! The signal simulator recomputes every wire product per cycle with
//! explicit ±1 arithmetic. It shares only the base sample function with the
//! engine (both must drive the same physical noises) and is deliberately
//! O(cycles · (strings · bits + schedule)).

use std::fmt;

use serde::Serialize;
use serde_json::Value;

use crate::error::Error;
use crate::logic::{realized_mask, StringTerm, Superposition, XnorMode, XnorVariant, XorVariant};
use crate::rtw::{
    mean_estimate, sample_with_key, stream_key, GeneratorMask, Sample, SplitMix64, MAX_NOISE_BITS,
};
use crate::system::ReferenceSystem;

/// One gate record of a schedule.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum GateOp {
    Not {
        h: usize,
    },
    Clear {
        h: usize,
    },
    Xor {
        i: usize,
        f: usize,
        h: usize,
        variant: XorVariant,
    },
    Xnor {
        i: usize,
        f: usize,
        h: usize,
        mode: XnorMode,
        variant: XnorVariant,
    },
}

impl fmt::Display for GateOp {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GateOp::Not { h } => write!(out, "not {h}"),
            GateOp::Clear { h } => write!(out, "clear {h}"),
            GateOp::Xor { i, f, h, variant } => {
                write!(out, "xor {i} {f} -> {h}")?;
                if variant == XorVariant::Zeros {
                    write!(out, " alt")?;
                }
                Ok(())
            }
            GateOp::Xnor {
                i,
                f,
                h,
                mode,
                variant,
            } => {
                write!(out, "xnor {i} {f} -> {h}")?;
                match (mode, variant) {
                    (XnorMode::ViaNot, _) => write!(out, " vianot"),
                    (XnorMode::Direct, XnorVariant::Alternate) => write!(out, " alt"),
                    (XnorMode::Direct, XnorVariant::Standard) => Ok(()),
                }
            }
        }
    }
}

fn check_op(op: &GateOp, n_bits: usize) -> Result<(), Error> {
    let check_index = |index: usize| {
        if index == 0 || index > n_bits {
            Err(Error::SignificanceOutOfRange {
                significance: index,
                n_bits,
            })
        } else {
            Ok(())
        }
    };
    match *op {
        GateOp::Not { h } | GateOp::Clear { h } => check_index(h),
        GateOp::Xor { i, f, h, .. } | GateOp::Xnor { i, f, h, .. } => {
            check_index(i)?;
            check_index(f)?;
            check_index(h)?;
            if i == f || i == h || f == h {
                return Err(Error::IndicesNotDistinct { i, f, h });
            }
            Ok(())
        }
    }
}

/// An ordered list of gate operations.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GateSchedule {
    ops: Vec<GateOp>,
}

impl GateSchedule {
    pub fn new(ops: Vec<GateOp>) -> Self {
        Self { ops }
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn push(&mut self, op: GateOp) {
        self.ops.push(op);
    }

    /// Check every record against a system of `n_bits` noise bits. Steps are
    /// reported 1-based.
    pub fn validate(&self, n_bits: usize) -> Result<(), Error> {
        for (step, op) in self.ops.iter().enumerate() {
            check_op(op, n_bits).map_err(|source| Error::Schedule {
                step: step + 1,
                source: Box::new(source),
            })?;
        }
        Ok(())
    }

    /// Apply every gate in order to `sys` through the mask engine.
    pub fn apply(&self, sys: &mut ReferenceSystem) -> Result<(), Error> {
        for (step, op) in self.ops.iter().enumerate() {
            let applied = match *op {
                GateOp::Not { h } => sys.not_gate(h),
                GateOp::Clear { h } => sys.clear_bit(h),
                GateOp::Xor { i, f, h, variant } => sys.xor_gate(i, f, h, variant),
                GateOp::Xnor {
                    i,
                    f,
                    h,
                    mode,
                    variant,
                } => sys.xnor_gate(i, f, h, mode, variant),
            };
            applied.map_err(|source| Error::Schedule {
                step: step + 1,
                source: Box::new(source),
            })?;
        }
        Ok(())
    }
}

impl FromIterator<GateOp> for GateSchedule {
    fn from_iter<T: IntoIterator<Item = GateOp>>(iter: T) -> Self {
        Self {
            ops: iter.into_iter().collect(),
        }
    }
}

/// Integer samples of a superposition's output signal, one per clock cycle.
/// Each sample lies in `[-K, K]` and has the parity of the total
/// multiplicity K.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Waveform {
    samples: Vec<i64>,
}

impl Waveform {
    pub fn samples(&self) -> &[i64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// CSV with header `t,sum`, one row per cycle.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,sum\n");
        for (t, sample) in self.samples.iter().enumerate() {
            out.push_str(&format!("{t},{sample}\n"));
        }
        out
    }
}

/// Simulate the physical block diagram directly.
///
/// Per cycle: sample every base generator, push each scheduled gate's
/// multiplier signal R(h,0)·R(h,1) onto the wires that gate names, form
/// every string as the literal product of its N wire samples, and output
/// the multiplicity-weighted sum. No GF(2) masks anywhere on this path.
pub fn signal_simulate(
    n_bits: usize,
    seed: u64,
    sup: &Superposition,
    sched: &GateSchedule,
    cycles: u64,
) -> Result<Waveform, Error> {
    if n_bits == 0 || n_bits > MAX_NOISE_BITS {
        return Err(Error::NBitsOutOfRange {
            n_bits,
            min: 1,
            max: MAX_NOISE_BITS,
        });
    }
    if sup.n_bits() != n_bits {
        return Err(Error::BitCountMismatch {
            left: n_bits,
            right: sup.n_bits(),
        });
    }
    sched.validate(n_bits)?;

    // Each wire accumulates the list of pair multipliers a gate wired into it.
    let mut multipliers: Vec<Vec<usize>> = vec![Vec::new(); 2 * n_bits];
    let mut push = |sig: usize, value: usize, h: usize| {
        multipliers[2 * (sig - 1) + value].push(h);
    };
    for op in sched.ops() {
        match *op {
            GateOp::Not { h } => {
                push(h, 0, h);
                push(h, 1, h);
            }
            GateOp::Clear { h } => push(h, 1, h),
            GateOp::Xor { i, f, h, variant } => {
                let value = match variant {
                    XorVariant::Ones => 1,
                    XorVariant::Zeros => 0,
                };
                push(h, 1, h);
                push(i, value, h);
                push(f, value, h);
            }
            GateOp::Xnor {
                i,
                f,
                h,
                mode,
                variant,
            } => match mode {
                XnorMode::Direct => {
                    let (i_value, f_value) = match variant {
                        XnorVariant::Standard => (1, 0),
                        XnorVariant::Alternate => (0, 1),
                    };
                    push(h, 1, h);
                    push(i, i_value, h);
                    push(f, f_value, h);
                }
                XnorMode::ViaNot => {
                    // XOR (ones variant), then NOT on h.
                    push(h, 1, h);
                    push(i, 1, h);
                    push(f, 1, h);
                    push(h, 0, h);
                    push(h, 1, h);
                }
            },
        }
    }

    let keys: Vec<u64> = (0..2 * n_bits).map(|i| stream_key(seed, i)).collect();
    let mut generators = vec![Sample::PLUS; 2 * n_bits];
    let mut pairs = vec![Sample::PLUS; n_bits];
    let mut wires = vec![Sample::PLUS; 2 * n_bits];
    let mut samples = Vec::with_capacity(cycles as usize);

    for t in 0..cycles {
        for (index, g) in generators.iter_mut().enumerate() {
            *g = sample_with_key(keys[index], t);
        }
        for h in 1..=n_bits {
            pairs[h - 1] = generators[2 * (h - 1)] * generators[2 * (h - 1) + 1];
        }
        for (index, wire) in wires.iter_mut().enumerate() {
            let mut signal = generators[index];
            for &h in &multipliers[index] {
                signal = signal * pairs[h - 1];
            }
            *wire = signal;
        }
        let mut sum = 0i64;
        for term in sup.terms() {
            let mut signal = Sample::PLUS;
            for significance in 1..=n_bits {
                signal = signal * wires[2 * (significance - 1) + term.bit(significance) as usize];
            }
            sum += term.multiplicity() as i64 * signal.value();
        }
        samples.push(sum);
    }
    Ok(Waveform { samples })
}

/// Mask-engine waveform of `sup` under the current wire table of `sys`.
pub fn engine_waveform(
    sup: &Superposition,
    sys: &ReferenceSystem,
    cycles: u64,
) -> Result<Waveform, Error> {
    let mut terms = Vec::with_capacity(sup.terms().len());
    for term in sup.terms() {
        let mask = realized_mask(term, sys)?;
        let keys: Vec<u64> = mask
            .set_indices()
            .map(|i| stream_key(sys.seed(), i))
            .collect();
        terms.push((keys, term.multiplicity() as i64));
    }
    let mut samples = Vec::with_capacity(cycles as usize);
    for t in 0..cycles {
        let mut sum = 0i64;
        for (keys, multiplicity) in &terms {
            let mut negative = false;
            for &key in keys {
                negative ^= sample_with_key(key, t).is_negative();
            }
            sum += if negative {
                -multiplicity
            } else {
                *multiplicity
            };
        }
        samples.push(sum);
    }
    Ok(Waveform { samples })
}

/// Result of a sample-by-sample comparison between the mask engine and the
/// signal-level simulator.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SignalCheck {
    pub cycles: u64,
    pub first_divergence: Option<u64>,
}

impl SignalCheck {
    pub fn passed(&self) -> bool {
        self.first_divergence.is_none()
    }
}

/// Compare the engine waveform of `sys` (with `sched` already applied to it)
/// against the signal-level simulation of the same schedule.
pub fn compare_with_signal(
    sys: &ReferenceSystem,
    sup: &Superposition,
    sched: &GateSchedule,
    cycles: u64,
) -> Result<SignalCheck, Error> {
    let signal = signal_simulate(sys.n_bits(), sys.seed(), sup, sched, cycles)?;
    let engine = engine_waveform(sup, sys, cycles)?;
    let first_divergence = signal
        .samples()
        .iter()
        .zip(engine.samples())
        .position(|(a, b)| a != b)
        .map(|p| p as u64);
    Ok(SignalCheck {
        cycles,
        first_divergence,
    })
}

/// Build a fresh system, run `sched` through the mask engine, and compare
/// waveforms sample-by-sample with the signal-level simulation.
pub fn check_engine_vs_signal(
    n_bits: usize,
    seed: u64,
    sup: &Superposition,
    sched: &GateSchedule,
    cycles: u64,
) -> Result<SignalCheck, Error> {
    let mut sys = ReferenceSystem::new(n_bits, seed)?;
    sched.apply(&mut sys)?;
    compare_with_signal(&sys, sup, sched, cycles)
}

/// Outcome of one verification check. `observed` is the measured deviation
/// from the expected value and the check passes iff `observed <= bound`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub observed: f64,
    pub bound: f64,
}

impl Check {
    pub fn deviation(name: impl Into<String>, observed: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            pass: observed <= bound,
            observed,
            bound,
        }
    }
}

/// A list of named checks, serialized as `{"checks": [...]}`.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report serialization cannot fail")
    }
}

/// Which gate a truth-table check exercises.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum TruthTableGate {
    Xor,
    Xnor,
}

/// Exhaustive four-string truth-table check with inputs on bits 1 and 2 and
/// output on bit 3.
///
/// For each of the 16 choices of initial output-bit labels the canonical
/// four-string superposition is built on a fresh system, the gate is
/// applied, and every decoded string is compared with the boolean truth
/// table; positions outside {1,2,3} carry per-term payload values that must
/// come through unchanged. One check per label choice, `observed` counting
/// mismatched strings. XNOR runs both the direct and the NOT-composed
/// construction.
pub fn truth_table_check(gate: TruthTableGate, n_bits: usize, seed: u64) -> Result<Report, Error> {
    if !(3..=MAX_NOISE_BITS).contains(&n_bits) {
        return Err(Error::NBitsOutOfRange {
            n_bits,
            min: 3,
            max: MAX_NOISE_BITS,
        });
    }
    let modes: &[(&str, Option<XnorMode>)] = match gate {
        TruthTableGate::Xor => &[("xor", None)],
        TruthTableGate::Xnor => &[
            ("xnor direct", Some(XnorMode::Direct)),
            ("xnor vianot", Some(XnorMode::ViaNot)),
        ],
    };

    let mut payload_rng = SplitMix64::new(seed ^ 0x7ab1_e000);
    let payloads: Vec<u64> = (0..4)
        .map(|_| {
            if n_bits == 3 {
                0
            } else {
                payload_rng.below(1 << (n_bits - 3)) << 3
            }
        })
        .collect();

    let mut report = Report::default();
    for &(label, mode) in modes {
        for labels in 0..16u64 {
            let mut sys = ReferenceSystem::new(n_bits, seed)?;
            let values: Vec<u64> = [(0u64, 0u64), (1, 0), (0, 1), (1, 1)]
                .iter()
                .enumerate()
                .map(|(k, &(iv, fv))| iv | fv << 1 | (labels >> k & 1) << 2 | payloads[k])
                .collect();
            match mode {
                None => sys.xor_gate(1, 2, 3, XorVariant::Ones)?,
                Some(m) => sys.xnor_gate(1, 2, 3, m, XnorVariant::Standard)?,
            }
            let mut mismatches = 0u32;
            for &value in &values {
                let term = StringTerm::from_number(value, n_bits)?;
                let decoded = crate::logic::decode_term(&term, &sys)?;
                let iv = value & 1;
                let fv = value >> 1 & 1;
                let out = match gate {
                    TruthTableGate::Xor => iv ^ fv,
                    TruthTableGate::Xnor => 1 ^ iv ^ fv,
                };
                let expected = (value & !0b100) | out << 2;
                if decoded != expected {
                    mismatches += 1;
                }
            }
            report.checks.push(Check::deviation(
                format!("{label} labels {labels:04b}"),
                f64::from(mismatches),
                0.0,
            ));
        }
    }
    Ok(report)
}

/// Time-averaged correlation of a waveform against a probe product signal.
///
/// Expectation equals the total multiplicity of superposition terms whose
/// realized mask equals the probe; every other term averages to zero. The
/// logic itself never needs this: it is a test-harness readout only.
pub fn statistical_presence(
    waveform: &Waveform,
    probe: &GeneratorMask,
    seed: u64,
) -> Result<f64, Error> {
    if waveform.is_empty() {
        return Err(Error::CyclesTooFew { cycles: 0, min: 1 });
    }
    let keys: Vec<u64> = probe.set_indices().map(|i| stream_key(seed, i)).collect();
    let mut sum = 0i128;
    for (t, &value) in waveform.samples().iter().enumerate() {
        let mut negative = false;
        for &key in &keys {
            negative ^= sample_with_key(key, t as u64).is_negative();
        }
        sum += if negative { -value } else { value } as i128;
    }
    Ok(sum as f64 / waveform.len() as f64)
}

/// Presence estimates for every distinct term of `sup` plus, when the value
/// space is not saturated, one probe that is absent from the superposition.
/// Bound: five sigma of the cross-term noise, `5·sqrt(K)/sqrt(M)`.
pub fn presence_report(
    sys: &ReferenceSystem,
    sup: &Superposition,
    cycles: u64,
) -> Result<Report, Error> {
    if cycles == 0 {
        return Err(Error::CyclesTooFew { cycles: 0, min: 1 });
    }
    let waveform = engine_waveform(sup, sys, cycles)?;
    let bound = 5.0 * (sup.total_multiplicity() as f64).sqrt() / (cycles as f64).sqrt();

    let mut report = Report::default();
    for term in sup.terms() {
        let probe = realized_mask(term, sys)?;
        let estimate = statistical_presence(&waveform, &probe, sys.seed())?;
        report.checks.push(Check::deviation(
            format!("present {} x{}", term.binary_string(), term.multiplicity()),
            (estimate - term.multiplicity() as f64).abs(),
            bound,
        ));
    }

    if let Some(absent) = absent_value(sup) {
        let term = StringTerm::from_number(absent, sup.n_bits())?;
        let probe = realized_mask(&term, sys)?;
        let estimate = statistical_presence(&waveform, &probe, sys.seed())?;
        report.checks.push(Check::deviation(
            format!("absent {}", term.binary_string()),
            estimate.abs(),
            bound,
        ));
    }
    Ok(report)
}

/// Smallest value not present in `sup`, if the value space is not full.
fn absent_value(sup: &Superposition) -> Option<u64> {
    let mut candidate = 0u64;
    for term in sup.terms() {
        if term.value() != candidate {
            return Some(candidate);
        }
        candidate += 1;
    }
    if sup.n_bits() == 64 || candidate < (1u64 << sup.n_bits()) {
        Some(candidate)
    } else {
        None
    }
}

/// Statistical verification of the RTW identities over `cycles` cycles: the
/// empty product is exactly the constant +1, and every single generator,
/// every generator pair product, and 50 random product masks average to
/// zero within `5/sqrt(cycles)`. Each failing check is retried once with an
/// alternate seed before it counts as a failure.
pub fn orthogonality_suite(seed: u64, n_bits: usize, cycles: u64) -> Result<Report, Error> {
    if n_bits == 0 || n_bits > MAX_NOISE_BITS {
        return Err(Error::NBitsOutOfRange {
            n_bits,
            min: 1,
            max: MAX_NOISE_BITS,
        });
    }
    if cycles < 10_000 {
        return Err(Error::CyclesTooFew {
            cycles,
            min: 10_000,
        });
    }
    let bound = 5.0 / (cycles as f64).sqrt();
    let retry_seed = SplitMix64::new(seed ^ 0x5eed_5eed_5eed_5eed).next_u64();

    let mut report = Report::default();

    let zero = GeneratorMask::zero(n_bits);
    let mean = mean_estimate(seed, &zero, cycles)?;
    report.checks.push(Check::deviation(
        "empty product mean",
        (mean - 1.0).abs(),
        0.0,
    ));

    let zero_mean_check = |name: String, mask: &GeneratorMask| -> Result<Check, Error> {
        let mean = mean_estimate(seed, mask, cycles)?;
        if mean.abs() <= bound {
            return Ok(Check::deviation(name, mean.abs(), bound));
        }
        let retried = mean_estimate(retry_seed, mask, cycles)?;
        Ok(Check::deviation(
            format!("{name} (retried)"),
            retried.abs(),
            bound,
        ))
    };

    let mut checks = Vec::new();
    for index in 0..2 * n_bits {
        let mask = GeneratorMask::from_indices(n_bits, &[index]);
        let id = crate::rtw::GeneratorId::from_linear_index(index);
        checks.push(zero_mean_check(format!("generator {id} mean"), &mask)?);
    }
    for a in 0..2 * n_bits {
        for b in a + 1..2 * n_bits {
            let mask = GeneratorMask::from_indices(n_bits, &[a, b]);
            let ida = crate::rtw::GeneratorId::from_linear_index(a);
            let idb = crate::rtw::GeneratorId::from_linear_index(b);
            checks.push(zero_mean_check(format!("product {ida}{idb} mean"), &mask)?);
        }
    }
    let mut rng = SplitMix64::new(seed ^ 0x0a57_0a57_0a57_0a57);
    for k in 0..50 {
        let mut indices: Vec<usize> = (0..2 * n_bits).filter(|_| rng.flip()).collect();
        if indices.is_empty() {
            indices.push(rng.below(2 * n_bits as u64) as usize);
        }
        let mask = GeneratorMask::from_indices(n_bits, &indices);
        checks.push(zero_mean_check(
            format!("random product #{k} (0x{}) mean", mask.to_hex()),
            &mask,
        )?);
    }
    report.checks.extend(checks);
    Ok(report)
}

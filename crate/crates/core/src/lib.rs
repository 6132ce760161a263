//! Simulator, gate library, and verification harness for instantaneous
//! noise-based logic over random telegraph waves (RTWs).
//!
//! A system of N noise bits is carried by 2N reference wires, one ±1
//! telegraph wave per (bit, value) pair. Numbers are products of one wire
//! per bit ("strings"), superpositions are sums of strings, and the NOT,
//! bit-clearing, XOR and XNOR gates act by multiplying a handful of
//! reference wires by a pair product; gate cost is therefore independent
//! of how many strings the superposition holds. Internally every product
//! signal is tracked as a GF(2) exponent mask, and a mask-free signal-level
//! simulator plus statistical correlators serve as independent oracles.
//!
//! ```
//! use rtwlogic::{decode_superposition, ReferenceSystem, Superposition, XorVariant};
//!
//! let mut sys = ReferenceSystem::new(3, 42).unwrap();
//! let sup = Superposition::from_values(3, &[0b000, 0b001, 0b010, 0b011]).unwrap();
//! sys.xor_gate(1, 2, 3, XorVariant::Ones).unwrap();
//!
//! let decoded = decode_superposition(&sup, &sys).unwrap();
//! assert_eq!(decoded.into_keys().collect::<Vec<_>>(), vec![0b000, 0b011, 0b101, 0b110]);
//! assert_eq!(sys.mul_counter(), 4);
//! ```

mod error;

pub mod circuit;
pub mod logic;
pub mod rtw;
pub mod system;
pub mod verify;

pub use circuit::{run_circuit, CircuitFile, ParseError, RunOptions, RunReport};
pub use error::Error;
pub use logic::{
    binary_string, decode_superposition, decode_term, eval_superposition, realized_mask,
    subspace_count, StringTerm, Superposition, XnorMode, XnorVariant, XorVariant,
};
pub use rtw::{
    eval_mask, mean_estimate, sample_generator, ClockIndex, GeneratorId, GeneratorMask, Sample,
    SplitMix64, MAX_NOISE_BITS,
};
pub use system::{ReferenceSystem, WireSnapshot};
pub use verify::{
    check_engine_vs_signal, compare_with_signal, engine_waveform, orthogonality_suite,
    presence_report, signal_simulate, statistical_presence, truth_table_check, Check, GateOp,
    GateSchedule, Report, SignalCheck, TruthTableGate, Waveform,
};

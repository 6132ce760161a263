//! Python bindings for the rtwlogic simulator: the reference system with its
//! gates, superpositions, decoding, and the verification oracles. Reports
//! cross the boundary as JSON strings so Python sees the same schemas as the
//! CLI.

use num_bigint::BigUint;
use pyo3::exceptions::{PyIndexError, PyValueError};
use pyo3::prelude::*;

use rtwlogic::{ClockIndex, GeneratorId, XnorMode, XnorVariant, XorVariant};

fn to_py_err(err: rtwlogic::Error) -> PyErr {
    match err {
        rtwlogic::Error::SignificanceZero
        | rtwlogic::Error::SignificanceOutOfRange { .. }
        | rtwlogic::Error::GeneratorValueInvalid { .. } => PyIndexError::new_err(err.to_string()),
        _ => PyValueError::new_err(err.to_string()),
    }
}

fn parse_xor_variant(variant: &str) -> PyResult<XorVariant> {
    match variant {
        "ones" => Ok(XorVariant::Ones),
        "zeros" => Ok(XorVariant::Zeros),
        other => Err(PyValueError::new_err(format!(
            "unknown xor variant `{other}` (expected `ones` or `zeros`)"
        ))),
    }
}

fn parse_xnor_args(mode: &str, variant: &str) -> PyResult<(XnorMode, XnorVariant)> {
    let mode = match mode {
        "direct" => XnorMode::Direct,
        "vianot" => XnorMode::ViaNot,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown xnor mode `{other}` (expected `direct` or `vianot`)"
            )))
        }
    };
    let variant = match variant {
        "standard" => XnorVariant::Standard,
        "alternate" => XnorVariant::Alternate,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown xnor variant `{other}` (expected `standard` or `alternate`)"
            )))
        }
    };
    Ok((mode, variant))
}

/// The 2N mutable reference wires plus the multiplication counter.
#[pyclass(name = "ReferenceSystem")]
struct PyReferenceSystem {
    inner: rtwlogic::ReferenceSystem,
}

#[pymethods]
impl PyReferenceSystem {
    #[new]
    #[pyo3(signature = (n_bits, seed = 0))]
    fn new(n_bits: usize, seed: u64) -> PyResult<Self> {
        Ok(Self {
            inner: rtwlogic::ReferenceSystem::new(n_bits, seed).map_err(to_py_err)?,
        })
    }

    #[getter]
    fn n_bits(&self) -> usize {
        self.inner.n_bits()
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed()
    }

    #[getter]
    fn mul_counter(&self) -> u64 {
        self.inner.mul_counter()
    }

    fn not_gate(&mut self, h: usize) -> PyResult<()> {
        self.inner.not_gate(h).map_err(to_py_err)
    }

    fn clear_bit(&mut self, h: usize) -> PyResult<()> {
        self.inner.clear_bit(h).map_err(to_py_err)
    }

    #[pyo3(signature = (i, f, h, variant = "ones"))]
    fn xor_gate(&mut self, i: usize, f: usize, h: usize, variant: &str) -> PyResult<()> {
        self.inner
            .xor_gate(i, f, h, parse_xor_variant(variant)?)
            .map_err(to_py_err)
    }

    #[pyo3(signature = (i, f, h, mode = "direct", variant = "standard"))]
    fn xnor_gate(
        &mut self,
        i: usize,
        f: usize,
        h: usize,
        mode: &str,
        variant: &str,
    ) -> PyResult<()> {
        let (mode, variant) = parse_xnor_args(mode, variant)?;
        self.inner
            .xnor_gate(i, f, h, mode, variant)
            .map_err(to_py_err)
    }

    /// The ±1 sample on wire (significance, value) at cycle t.
    fn wire_signal(&self, significance: usize, value: u8, t: u64) -> PyResult<i64> {
        let id = GeneratorId::new(significance, value).map_err(to_py_err)?;
        Ok(self
            .inner
            .wire_signal(id, ClockIndex(t))
            .map_err(to_py_err)?
            .value())
    }

    /// Wire table as a JSON string: [[significance, value, mask-hex], ...].
    fn wire_table_json(&self) -> String {
        self.inner.wire_table_json().to_string()
    }

    fn __repr__(&self) -> String {
        format!(
            "ReferenceSystem(n_bits={}, seed={}, mul_counter={})",
            self.inner.n_bits(),
            self.inner.seed(),
            self.inner.mul_counter()
        )
    }
}

/// A multiset of strings. Terms are (value, multiplicity) pairs with values
/// ascending.
#[pyclass(name = "Superposition")]
struct PySuperposition {
    inner: rtwlogic::Superposition,
}

#[pymethods]
impl PySuperposition {
    #[new]
    fn new(n_bits: usize, values: Vec<u64>) -> PyResult<Self> {
        Ok(Self {
            inner: rtwlogic::Superposition::from_values(n_bits, &values).map_err(to_py_err)?,
        })
    }

    #[staticmethod]
    fn from_counts(n_bits: usize, counts: Vec<(u64, u64)>) -> PyResult<Self> {
        Ok(Self {
            inner: rtwlogic::Superposition::from_counts(n_bits, &counts).map_err(to_py_err)?,
        })
    }

    #[getter]
    fn n_bits(&self) -> usize {
        self.inner.n_bits()
    }

    #[getter]
    fn total_multiplicity(&self) -> u64 {
        self.inner.total_multiplicity()
    }

    fn terms(&self) -> Vec<(u64, u64)> {
        self.inner
            .terms()
            .iter()
            .map(|t| (t.value(), t.multiplicity()))
            .collect()
    }

    fn to_json(&self) -> String {
        self.inner.to_json().to_string()
    }

    fn __len__(&self) -> usize {
        self.inner.terms().len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Superposition(n_bits={}, terms={:?})",
            self.inner.n_bits(),
            self.terms()
        )
    }
}

/// Sample base generator `index` at cycle `t`: returns +1 or -1.
#[pyfunction]
fn sample_generator(seed: u64, index: usize, t: u64) -> i64 {
    rtwlogic::sample_generator(seed, index, ClockIndex(t)).value()
}

/// Decode every string of `sup` under the current wire table of `sys`.
/// Returns (value, multiplicity) pairs with values ascending.
#[pyfunction]
fn decode(sys: &PyReferenceSystem, sup: &PySuperposition) -> PyResult<Vec<(u64, u64)>> {
    Ok(rtwlogic::decode_superposition(&sup.inner, &sys.inner)
        .map_err(to_py_err)?
        .into_iter()
        .collect())
}

/// Instantaneous output of the superposition wire at cycle `t`.
#[pyfunction]
fn eval_superposition(sys: &PyReferenceSystem, sup: &PySuperposition, t: u64) -> PyResult<i64> {
    rtwlogic::eval_superposition(&sup.inner, &sys.inner, ClockIndex(t)).map_err(to_py_err)
}

/// Number of nonempty subsets of the 2^N strings: 2^(2^N) - 1.
#[pyfunction]
fn subspace_count(n_bits: usize) -> PyResult<BigUint> {
    rtwlogic::subspace_count(n_bits).map_err(to_py_err)
}

/// Parse a circuit text, run it, and return the full report as a JSON
/// string. Mirrors `rtwlogic run` on the CLI.
#[pyfunction]
#[pyo3(signature = (text, seed = None, verify_signal = None, stats = None))]
fn run_circuit(
    text: &str,
    seed: Option<u64>,
    verify_signal: Option<u64>,
    stats: Option<u64>,
) -> PyResult<String> {
    let file =
        rtwlogic::CircuitFile::parse(text).map_err(|err| PyValueError::new_err(err.to_string()))?;
    let options = rtwlogic::RunOptions {
        seed_override: seed,
        verify_signal_cycles: verify_signal,
        stats_cycles: stats,
        waveform_cycles: None,
    };
    let report = rtwlogic::run_circuit(&file, &options).map_err(to_py_err)?;
    Ok(report.to_json().to_string())
}

/// Exhaustive truth-table report for "xor" or "xnor" as a JSON string.
#[pyfunction]
#[pyo3(signature = (gate, n_bits = 3, seed = 0))]
fn truth_table(gate: &str, n_bits: usize, seed: u64) -> PyResult<String> {
    let gate = match gate {
        "xor" => rtwlogic::TruthTableGate::Xor,
        "xnor" => rtwlogic::TruthTableGate::Xnor,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown gate `{other}` (expected `xor` or `xnor`)"
            )))
        }
    };
    Ok(rtwlogic::truth_table_check(gate, n_bits, seed)
        .map_err(to_py_err)?
        .to_json()
        .to_string())
}

/// Statistical orthogonality report as a JSON string.
#[pyfunction]
#[pyo3(signature = (n_bits, cycles, seed = 0))]
fn orthogonality(n_bits: usize, cycles: u64, seed: u64) -> PyResult<String> {
    Ok(rtwlogic::orthogonality_suite(seed, n_bits, cycles)
        .map_err(to_py_err)?
        .to_json()
        .to_string())
}

#[pymodule]
fn rtwlogic_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyReferenceSystem>()?;
    m.add_class::<PySuperposition>()?;
    m.add_function(wrap_pyfunction!(sample_generator, m)?)?;
    m.add_function(wrap_pyfunction!(decode, m)?)?;
    m.add_function(wrap_pyfunction!(eval_superposition, m)?)?;
    m.add_function(wrap_pyfunction!(subspace_count, m)?)?;
    m.add_function(wrap_pyfunction!(run_circuit, m)?)?;
    m.add_function(wrap_pyfunction!(truth_table, m)?)?;
    m.add_function(wrap_pyfunction!(orthogonality, m)?)?;
    Ok(())
}

//! Strings, superpositions, the logic gates as reference-wire surgery, and
//! decoding of superposition contents back to binary numbers.
//!
//! A string picks one reference wire per bit significance; its physical
//! signal is the product of those wires. Gates never look at strings:
//! applying NOT, bit clearing, XOR or XNOR multiplies at most three
//! reference wires by one pair product, so gate cost is independent of how
//! many strings ride on the output wire.
//!
//! Decoding is exact and instantaneous. Every gate multiplies wires by
//! whole-pair products only, so each wire keeps odd GF(2) parity on its home
//! significance pair and even parity on all others; a string's realized mask
//! therefore carries exactly one generator per pair, and that generator's
//! value IS the decoded bit.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use serde_json::{json, Value};

use crate::error::Error;
use crate::rtw::{eval_mask, ClockIndex, GeneratorId, GeneratorMask, MAX_NOISE_BITS};
use crate::system::ReferenceSystem;

/// Render `value` as an MSB-first binary literal of `n_bits` characters.
pub fn binary_string(value: u64, n_bits: usize) -> String {
    (0..n_bits)
        .rev()
        .map(|b| if (value >> b) & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// One string: an N-bit value assignment selecting one reference wire per
/// significance pair, with a positive multiplicity.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct StringTerm {
    value: u64,
    n_bits: usize,
    multiplicity: u64,
}

impl StringTerm {
    /// The string for number `value` with multiplicity 1. Bit `i - 1` of
    /// `value` is the wire value selected at significance `i`.
    pub fn from_number(value: u64, n_bits: usize) -> Result<Self, Error> {
        Self::with_multiplicity(value, n_bits, 1)
    }

    pub fn with_multiplicity(value: u64, n_bits: usize, multiplicity: u64) -> Result<Self, Error> {
        if n_bits == 0 || n_bits > MAX_NOISE_BITS {
            return Err(Error::NBitsOutOfRange {
                n_bits,
                min: 1,
                max: MAX_NOISE_BITS,
            });
        }
        if n_bits < 64 && value >> n_bits != 0 {
            return Err(Error::ValueOutOfRange { value, n_bits });
        }
        if multiplicity == 0 {
            return Err(Error::ZeroMultiplicity);
        }
        Ok(Self {
            value,
            n_bits,
            multiplicity,
        })
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn n_bits(&self) -> usize {
        self.n_bits
    }

    pub fn multiplicity(&self) -> u64 {
        self.multiplicity
    }

    /// The wire value j(i) selected at significance `i` (1-based).
    pub fn bit(&self, significance: usize) -> u8 {
        assert!(
            significance >= 1 && significance <= self.n_bits,
            "significance {significance} out of 1..={}",
            self.n_bits
        );
        ((self.value >> (significance - 1)) & 1) as u8
    }

    pub fn binary_string(&self) -> String {
        binary_string(self.value, self.n_bits)
    }
}

/// A multiset of strings riding on one wire. Terms with identical
/// assignments are merged into multiplicities; terms are kept sorted by
/// value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Superposition {
    n_bits: usize,
    terms: Vec<StringTerm>,
}

impl Superposition {
    /// Merge `terms` into a superposition. At least one term is required and
    /// all terms must agree on the bit count. Total multiplicity is capped
    /// at 2^N (and at `i64::MAX`, so waveform sums cannot overflow).
    pub fn new(terms: impl IntoIterator<Item = StringTerm>) -> Result<Self, Error> {
        let mut iter = terms.into_iter();
        let first = iter.next().ok_or(Error::EmptySuperposition)?;
        let n_bits = first.n_bits;

        let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
        let mut total: u128 = 0;
        for term in std::iter::once(first).chain(iter) {
            if term.n_bits != n_bits {
                return Err(Error::BitCountMismatch {
                    left: n_bits,
                    right: term.n_bits,
                });
            }
            total += u128::from(term.multiplicity);
            let entry = counts.entry(term.value).or_insert(0);
            *entry = entry.saturating_add(term.multiplicity);
        }

        let limit = (1u128 << n_bits).min(i64::MAX as u128);
        if total > limit {
            return Err(Error::SuperpositionTooLarge { total, limit });
        }

        Ok(Self {
            n_bits,
            terms: counts
                .into_iter()
                .map(|(value, multiplicity)| StringTerm {
                    value,
                    n_bits,
                    multiplicity,
                })
                .collect(),
        })
    }

    pub fn from_values(n_bits: usize, values: &[u64]) -> Result<Self, Error> {
        Self::new(
            values
                .iter()
                .map(|&v| StringTerm::from_number(v, n_bits))
                .collect::<Result<Vec<_>, _>>()?,
        )
    }

    pub fn from_counts(n_bits: usize, counts: &[(u64, u64)]) -> Result<Self, Error> {
        Self::new(
            counts
                .iter()
                .map(|&(v, m)| StringTerm::with_multiplicity(v, n_bits, m))
                .collect::<Result<Vec<_>, _>>()?,
        )
    }

    pub fn n_bits(&self) -> usize {
        self.n_bits
    }

    /// Distinct terms, ascending by value.
    pub fn terms(&self) -> &[StringTerm] {
        &self.terms
    }

    pub fn total_multiplicity(&self) -> u64 {
        self.terms.iter().map(|t| t.multiplicity).sum()
    }

    /// JSON form: `{"bits": N, "terms": [{"value": "<binary>", "mult": k}]}`
    /// with terms ascending by value.
    pub fn to_json(&self) -> Value {
        json!({
            "bits": self.n_bits,
            "terms": self
                .terms
                .iter()
                .map(|t| json!({"value": t.binary_string(), "mult": t.multiplicity}))
                .collect::<Vec<_>>(),
        })
    }
}

/// XOR of the wire masks selected by `term`, one wire per significance pair.
/// This is the GF(2) identity of the string's physical signal under the
/// current wire table.
pub fn realized_mask(term: &StringTerm, sys: &ReferenceSystem) -> Result<GeneratorMask, Error> {
    if term.n_bits() != sys.n_bits() {
        return Err(Error::BitCountMismatch {
            left: sys.n_bits(),
            right: term.n_bits(),
        });
    }
    let mut mask = GeneratorMask::zero(sys.n_bits());
    for significance in 1..=sys.n_bits() {
        let id = GeneratorId::new(significance, term.bit(significance))?;
        mask.xor_assign(sys.wire(id)?)?;
    }
    Ok(mask)
}

/// Instantaneous output of the superposition wire at cycle `t`: the
/// multiplicity-weighted sum of every term's product signal. Lies in
/// `[-K, K]` and has the parity of `K`, the total multiplicity.
pub fn eval_superposition(
    sup: &Superposition,
    sys: &ReferenceSystem,
    t: ClockIndex,
) -> Result<i64, Error> {
    let mut sum = 0i64;
    for term in sup.terms() {
        let mask = realized_mask(term, sys)?;
        sum += term.multiplicity() as i64 * eval_mask(sys.seed(), &mask, t).value();
    }
    Ok(sum)
}

/// Which pair of input wires the XOR gate multiplies by the pair product.
/// Both choices produce identical realized masks for every string.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash)]
pub enum XorVariant {
    /// Multiply the value-1 wires of both inputs.
    #[default]
    Ones,
    /// Multiply the value-0 wires of both inputs.
    Zeros,
}

/// How the XNOR gate is constructed.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash)]
pub enum XnorMode {
    /// Clearing step plus two asymmetric wire multiplications; four
    /// multiplications total.
    #[default]
    Direct,
    /// XOR gate followed by NOT on the output bit; seven multiplications.
    ViaNot,
}

/// Which asymmetric wire pair the direct XNOR construction multiplies.
/// Both choices produce identical realized masks for every string.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash)]
pub enum XnorVariant {
    /// Multiply the i-value-1 and f-value-0 wires.
    #[default]
    Standard,
    /// Multiply the i-value-0 and f-value-1 wires.
    Alternate,
}

impl ReferenceSystem {
    fn check_gate_triple(&self, i: usize, f: usize, h: usize) -> Result<(), Error> {
        for index in [i, f, h] {
            if index == 0 || index > self.n_bits() {
                return Err(Error::SignificanceOutOfRange {
                    significance: index,
                    n_bits: self.n_bits(),
                });
            }
        }
        if i == f || i == h || f == h {
            return Err(Error::IndicesNotDistinct { i, f, h });
        }
        Ok(())
    }

    /// NOT on bit `h`: both wires of pair `h` are multiplied by the pair
    /// product. Three multiplications.
    pub fn not_gate(&mut self, h: usize) -> Result<(), Error> {
        let p = self.pair_product(h)?;
        self.multiply_wire(GeneratorId::new(h, 0)?, &p)?;
        self.multiply_wire(GeneratorId::new(h, 1)?, &p)?;
        Ok(())
    }

    /// Clearing step on bit `h`: the value-1 wire is multiplied by the pair
    /// product, so relative to a fresh pair every string decodes to h = 0.
    /// Two multiplications.
    pub fn clear_bit(&mut self, h: usize) -> Result<(), Error> {
        let p = self.pair_product(h)?;
        self.multiply_wire(GeneratorId::new(h, 1)?, &p)?;
        Ok(())
    }

    /// XOR of bits `i` and `f` into bit `h`: the clearing step on `h`
    /// followed by multiplying one wire of each input pair (chosen by
    /// `variant`) by the same pair product. Exactly four multiplications,
    /// independent of superposition size.
    pub fn xor_gate(
        &mut self,
        i: usize,
        f: usize,
        h: usize,
        variant: XorVariant,
    ) -> Result<(), Error> {
        self.check_gate_triple(i, f, h)?;
        let p = self.pair_product(h)?;
        self.multiply_wire(GeneratorId::new(h, 1)?, &p)?;
        let value = match variant {
            XorVariant::Ones => 1,
            XorVariant::Zeros => 0,
        };
        self.multiply_wire(GeneratorId::new(i, value)?, &p)?;
        self.multiply_wire(GeneratorId::new(f, value)?, &p)?;
        Ok(())
    }

    /// XNOR of bits `i` and `f` into bit `h`. `Direct` mode costs four
    /// multiplications; `ViaNot` composes [`xor_gate`](Self::xor_gate) with
    /// [`not_gate`](Self::not_gate) (seven) and ignores `variant`.
    pub fn xnor_gate(
        &mut self,
        i: usize,
        f: usize,
        h: usize,
        mode: XnorMode,
        variant: XnorVariant,
    ) -> Result<(), Error> {
        self.check_gate_triple(i, f, h)?;
        match mode {
            XnorMode::Direct => {
                let p = self.pair_product(h)?;
                self.multiply_wire(GeneratorId::new(h, 1)?, &p)?;
                let (i_value, f_value) = match variant {
                    XnorVariant::Standard => (1, 0),
                    XnorVariant::Alternate => (0, 1),
                };
                self.multiply_wire(GeneratorId::new(i, i_value)?, &p)?;
                self.multiply_wire(GeneratorId::new(f, f_value)?, &p)?;
            }
            XnorMode::ViaNot => {
                self.xor_gate(i, f, h, XorVariant::Ones)?;
                self.not_gate(h)?;
            }
        }
        Ok(())
    }
}

/// Decode one string under the current wire table.
///
/// Requires the realized mask to carry exactly one generator per
/// significance pair; every gate in this crate preserves that property. A
/// violation means the system was mutated by a non-gate mask.
pub fn decode_term(term: &StringTerm, sys: &ReferenceSystem) -> Result<u64, Error> {
    let mask = realized_mask(term, sys)?;
    let mut value = 0u64;
    for significance in 1..=sys.n_bits() {
        match mask.pair_bits(significance) {
            (true, false) => {}
            (false, true) => value |= 1 << (significance - 1),
            (zero_bit, one_bit) => {
                return Err(Error::Undecodable {
                    significance,
                    generators: u32::from(zero_bit) + u32::from(one_bit),
                })
            }
        }
    }
    Ok(value)
}

/// Decode a whole superposition to a value -> multiplicity multiset.
pub fn decode_superposition(
    sup: &Superposition,
    sys: &ReferenceSystem,
) -> Result<BTreeMap<u64, u64>, Error> {
    let mut decoded = BTreeMap::new();
    for term in sup.terms() {
        let value = decode_term(term, sys)?;
        *decoded.entry(value).or_insert(0) += term.multiplicity();
    }
    Ok(decoded)
}

/// Number of nonempty subsets of the 2^N strings: 2^(2^N) - 1.
///
/// Capped at N = 32; beyond that the count does not fit in memory.
pub fn subspace_count(n_bits: usize) -> Result<BigUint, Error> {
    const MAX_SUBSPACE_BITS: usize = 32;
    if n_bits == 0 || n_bits > MAX_SUBSPACE_BITS {
        return Err(Error::NBitsOutOfRange {
            n_bits,
            min: 1,
            max: MAX_SUBSPACE_BITS,
        });
    }
    Ok((BigUint::from(1u32) << (1usize << n_bits)) - 1u32)
}

//! The reference system: the mutable table of 2N wires that gates act on.
//!
//! Wires start out carrying the 2N base generators. Logic gates never touch
//! strings or superpositions; they multiply reference wires by pair
//! products, which this module records as XORs on the wires' masks.
//! `mul_counter` tallies every such multiplication so cost claims can be
//! audited independently of the algebra.

use serde_json::{json, Value};

use crate::error::Error;
use crate::rtw::{eval_mask, ClockIndex, GeneratorId, GeneratorMask, Sample, MAX_NOISE_BITS};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReferenceSystem {
    n_bits: usize,
    seed: u64,
    wires: Vec<GeneratorMask>,
    mul_counter: u64,
}

impl ReferenceSystem {
    /// Fresh system: wire (i, j) carries exactly base generator (i, j).
    pub fn new(n_bits: usize, seed: u64) -> Result<Self, Error> {
        if n_bits == 0 || n_bits > MAX_NOISE_BITS {
            return Err(Error::NBitsOutOfRange {
                n_bits,
                min: 1,
                max: MAX_NOISE_BITS,
            });
        }
        let wires = (0..2 * n_bits)
            .map(|i| GeneratorMask::from_indices(n_bits, &[i]))
            .collect();
        Ok(Self {
            n_bits,
            seed,
            wires,
            mul_counter: 0,
        })
    }

    pub fn n_bits(&self) -> usize {
        self.n_bits
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of signal multiplications performed by gate operations so far.
    pub fn mul_counter(&self) -> u64 {
        self.mul_counter
    }

    pub fn wire(&self, id: GeneratorId) -> Result<&GeneratorMask, Error> {
        let index = id.linear_index(self.n_bits)?;
        Ok(&self.wires[index])
    }

    /// All wires in linear index order.
    pub fn wires(&self) -> impl Iterator<Item = (GeneratorId, &GeneratorMask)> {
        self.wires
            .iter()
            .enumerate()
            .map(|(i, mask)| (GeneratorId::from_linear_index(i), mask))
    }

    /// The gate multiplier signal R(h,0)·R(h,1), built from the BASE
    /// generators of pair `h`, never from the current wires. Counts as one
    /// multiplication.
    pub fn pair_product(&mut self, h: usize) -> Result<GeneratorMask, Error> {
        if h == 0 || h > self.n_bits {
            return Err(Error::SignificanceOutOfRange {
                significance: h,
                n_bits: self.n_bits,
            });
        }
        self.mul_counter += 1;
        Ok(GeneratorMask::from_indices(
            self.n_bits,
            &[2 * (h - 1), 2 * (h - 1) + 1],
        ))
    }

    /// Multiply wire `id` by the product signal `by`. Counts as one
    /// multiplication.
    pub fn multiply_wire(&mut self, id: GeneratorId, by: &GeneratorMask) -> Result<(), Error> {
        let index = id.linear_index(self.n_bits)?;
        if by.width() != 2 * self.n_bits {
            return Err(Error::MaskWidthMismatch {
                left: 2 * self.n_bits,
                right: by.width(),
            });
        }
        self.wires[index].xor_assign(by)?;
        self.mul_counter += 1;
        Ok(())
    }

    /// Current physical signal on wire `id` at cycle `t`.
    pub fn wire_signal(&self, id: GeneratorId, t: ClockIndex) -> Result<Sample, Error> {
        Ok(eval_mask(self.seed, self.wire(id)?, t))
    }

    pub fn snapshot(&self) -> WireSnapshot {
        WireSnapshot {
            n_bits: self.n_bits,
            seed: self.seed,
            wires: self.wires.clone(),
        }
    }

    /// Restore the wire table from `snapshot`. The multiplication counter is
    /// an instrumentation ledger and is left untouched.
    pub fn restore(&mut self, snapshot: &WireSnapshot) -> Result<(), Error> {
        if snapshot.n_bits != self.n_bits {
            return Err(Error::BitCountMismatch {
                left: self.n_bits,
                right: snapshot.n_bits,
            });
        }
        if snapshot.seed != self.seed {
            return Err(Error::SeedMismatch {
                snapshot: snapshot.seed,
                system: self.seed,
            });
        }
        self.wires.clone_from(&snapshot.wires);
        Ok(())
    }

    /// Wire table as JSON: `[[significance, value, mask-hex], ...]` in
    /// linear index order, hex little-endian over the linear index.
    pub fn wire_table_json(&self) -> Value {
        Value::Array(
            self.wires()
                .map(|(id, mask)| json!([id.significance(), id.value(), mask.to_hex()]))
                .collect(),
        )
    }
}

/// Immutable copy of a system's wire table. Snapshots can be shared and
/// sampled concurrently while the source system keeps mutating.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WireSnapshot {
    n_bits: usize,
    seed: u64,
    wires: Vec<GeneratorMask>,
}

impl WireSnapshot {
    pub fn n_bits(&self) -> usize {
        self.n_bits
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn wire(&self, id: GeneratorId) -> Result<&GeneratorMask, Error> {
        let index = id.linear_index(self.n_bits)?;
        Ok(&self.wires[index])
    }

    pub fn wire_signal(&self, id: GeneratorId, t: ClockIndex) -> Result<Sample, Error> {
        Ok(eval_mask(self.seed, self.wire(id)?, t))
    }
}

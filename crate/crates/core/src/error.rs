use thiserror::Error;

/// Errors raised by the simulator core.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("noise-bit count {n_bits} out of range {min}..={max}")]
    NBitsOutOfRange {
        n_bits: usize,
        min: usize,
        max: usize,
    },

    #[error("bit significance must be at least 1")]
    SignificanceZero,

    #[error("bit significance {significance} out of range (system has {n_bits} noise bits)")]
    SignificanceOutOfRange { significance: usize, n_bits: usize },

    #[error("generator value {value} must be 0 or 1")]
    GeneratorValueInvalid { value: u8 },

    #[error("mask width mismatch: {left} vs {right}")]
    MaskWidthMismatch { left: usize, right: usize },

    #[error("noise-bit count mismatch: {left} vs {right}")]
    BitCountMismatch { left: usize, right: usize },

    #[error("snapshot seed {snapshot} does not match system seed {system}")]
    SeedMismatch { snapshot: u64, system: u64 },

    #[error("cycle count {cycles} too small (minimum {min})")]
    CyclesTooFew { cycles: u64, min: u64 },

    #[error("value {value} does not fit in {n_bits} bits")]
    ValueOutOfRange { value: u64, n_bits: usize },

    #[error("string multiplicity must be at least 1")]
    ZeroMultiplicity,

    #[error("superposition needs at least one string")]
    EmptySuperposition,

    #[error("total multiplicity {total} exceeds the superposition limit {limit}")]
    SuperpositionTooLarge { total: u128, limit: u128 },

    #[error("gate arguments must be pairwise distinct, got i={i}, f={f}, h={h}")]
    IndicesNotDistinct { i: usize, f: usize, h: usize },

    #[error(
        "string is undecodable: significance pair {significance} carries {generators} generators"
    )]
    Undecodable {
        significance: usize,
        generators: u32,
    },

    #[error("schedule step {step}: {source}")]
    Schedule {
        step: usize,
        #[source]
        source: Box<Error>,
    },
}

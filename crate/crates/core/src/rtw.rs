//! Random-access sampling of the base random telegraph wave (RTW)
//! generators and the GF(2) mask algebra that describes their products.
//!
//! A system with `N` noise bits owns `2N` base generators, one per
//! (significance, value) pair. Each generator is a clocked ±1 signal that is
//! resampled uniformly on every cycle. Here that process is realized as a
//! counter-based keyed hash of `(seed, generator index, clock index)`, which
//! has the same joint distribution as the textbook flip process but permits
//! random access in `t` and lock-free parallel evaluation.
//!
//! Products of generators never need to be expanded: a product signal is
//! identified by the set of generators appearing an odd number of times in
//! it (a [`GeneratorMask`]), because every generator squares to the constant
//! +1. Multiplying physical signals is XOR on masks.

use std::fmt;

use crate::error::Error;

/// Upper limit on noise bits per system. Keeps string assignments inside a
/// `u64` and mask storage trivially small.
pub const MAX_NOISE_BITS: usize = 64;

/// Identity of one base generator: a 1-based bit significance plus the
/// binary value that generator stands for.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GeneratorId {
    significance: usize,
    value: u8,
}

impl GeneratorId {
    pub fn new(significance: usize, value: u8) -> Result<Self, Error> {
        if significance == 0 {
            return Err(Error::SignificanceZero);
        }
        if value > 1 {
            return Err(Error::GeneratorValueInvalid { value });
        }
        Ok(Self {
            significance,
            value,
        })
    }

    pub fn significance(self) -> usize {
        self.significance
    }

    pub fn value(self) -> u8 {
        self.value
    }

    /// Linear index `2 * (significance - 1) + value`, checked against a
    /// system of `n_bits` noise bits. This is a bijection onto `[0, 2N)`.
    pub fn linear_index(self, n_bits: usize) -> Result<usize, Error> {
        if self.significance > n_bits {
            return Err(Error::SignificanceOutOfRange {
                significance: self.significance,
                n_bits,
            });
        }
        Ok(self.index_unchecked())
    }

    pub(crate) fn index_unchecked(self) -> usize {
        2 * (self.significance - 1) + usize::from(self.value)
    }

    /// Inverse of [`linear_index`](Self::linear_index).
    pub fn from_linear_index(index: usize) -> Self {
        Self {
            significance: index / 2 + 1,
            value: (index % 2) as u8,
        }
    }
}

impl fmt::Display for GeneratorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.significance, self.value)
    }
}

/// Clock cycle counter. RTWs change value only on clock boundaries, so all
/// sampling is indexed by whole cycles.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClockIndex(pub u64);

impl From<u64> for ClockIndex {
    fn from(t: u64) -> Self {
        Self(t)
    }
}

/// One RTW sample. The representation makes +1 and -1 the only inhabitants.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct Sample {
    negative: bool,
}

impl Sample {
    pub const PLUS: Self = Self { negative: false };
    pub const MINUS: Self = Self { negative: true };

    pub fn from_negative(negative: bool) -> Self {
        Self { negative }
    }

    pub fn value(self) -> i64 {
        if self.negative {
            -1
        } else {
            1
        }
    }

    pub fn is_negative(self) -> bool {
        self.negative
    }
}

impl std::ops::Mul for Sample {
    type Output = Self;

    // (-1)^a * (-1)^b = (-1)^(a xor b)
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: Self) -> Self {
        Self {
            negative: self.negative ^ rhs.negative,
        }
    }
}

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer: a full-avalanche permutation of u64.
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Per-(seed, generator) stream key. Distinct generators land at
/// avalanche-separated offsets of one master SplitMix64 sequence, so their
/// sample streams do not overlap for any realistic cycle count.
#[inline]
pub(crate) fn stream_key(seed: u64, index: usize) -> u64 {
    mix64(seed ^ (index as u64 + 1).wrapping_mul(GOLDEN_GAMMA))
}

#[inline]
pub(crate) fn sample_with_key(key: u64, t: u64) -> Sample {
    Sample::from_negative(mix64(key.wrapping_add(t.wrapping_mul(GOLDEN_GAMMA))) >> 63 != 0)
}

/// Sample base generator `index` at cycle `t`.
///
/// Deterministic in `(seed, index, t)`, marginally uniform on {+1, -1}, and
/// statistically independent across distinct `(index, t)` pairs.
pub fn sample_generator(seed: u64, index: usize, t: ClockIndex) -> Sample {
    sample_with_key(stream_key(seed, index), t.0)
}

/// Element of GF(2)^(2N): the exponent vector of a product of base RTWs.
///
/// The all-zero mask is the empty product, i.e. the constant +1 signal.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GeneratorMask {
    width: usize,
    words: Vec<u64>,
}

impl GeneratorMask {
    /// The multiplicative identity over a system of `n_bits` noise bits.
    pub fn zero(n_bits: usize) -> Self {
        let width = 2 * n_bits;
        Self {
            width,
            words: vec![0; width.div_ceil(64)],
        }
    }

    pub fn singleton(id: GeneratorId, n_bits: usize) -> Result<Self, Error> {
        let index = id.linear_index(n_bits)?;
        let mut mask = Self::zero(n_bits);
        mask.toggle(index);
        Ok(mask)
    }

    /// Mask with the given linear-index components set.
    ///
    /// Panics if an index falls outside `[0, 2 * n_bits)`.
    pub fn from_indices(n_bits: usize, indices: &[usize]) -> Self {
        let mut mask = Self::zero(n_bits);
        for &index in indices {
            mask.toggle(index);
        }
        mask
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn n_bits(&self) -> usize {
        self.width / 2
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    pub fn test(&self, index: usize) -> bool {
        assert!(
            index < self.width,
            "mask index {index} out of width {}",
            self.width
        );
        (self.words[index / 64] >> (index % 64)) & 1 == 1
    }

    pub fn toggle(&mut self, index: usize) {
        assert!(
            index < self.width,
            "mask index {index} out of width {}",
            self.width
        );
        self.words[index / 64] ^= 1u64 << (index % 64);
    }

    /// Componentwise XOR. This is signal multiplication: generators present
    /// in both operands square away to +1.
    pub fn product(&self, other: &Self) -> Result<Self, Error> {
        let mut out = self.clone();
        out.xor_assign(other)?;
        Ok(out)
    }

    pub fn xor_assign(&mut self, other: &Self) -> Result<(), Error> {
        if self.width != other.width {
            return Err(Error::MaskWidthMismatch {
                left: self.width,
                right: other.width,
            });
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
        Ok(())
    }

    /// Linear indices of the set components, ascending.
    pub fn set_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &word)| {
            let mut bits = word;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let b = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    Some(w * 64 + b)
                }
            })
        })
    }

    pub fn generators(&self) -> impl Iterator<Item = GeneratorId> + '_ {
        self.set_indices().map(GeneratorId::from_linear_index)
    }

    /// The two component bits of significance pair `significance` (1-based),
    /// as (value-0 bit, value-1 bit).
    pub fn pair_bits(&self, significance: usize) -> (bool, bool) {
        let base = 2 * (significance - 1);
        (self.test(base), self.test(base + 1))
    }

    /// Lowercase hex, little-endian over the linear index: bit 0 of the
    /// first byte is generator index 0.
    pub fn to_hex(&self) -> String {
        let n_bytes = self.width.div_ceil(8);
        let mut out = String::with_capacity(2 * n_bytes);
        for byte in 0..n_bytes {
            let b = (self.words[byte / 8] >> (8 * (byte % 8))) & 0xff;
            out.push_str(&format!("{b:02x}"));
        }
        out
    }
}

impl fmt::Debug for GeneratorMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "GeneratorMask(0x{}, width {})",
            self.to_hex(),
            self.width
        )
    }
}

/// Evaluate the product signal identified by `mask` at cycle `t`.
///
/// The all-zero mask evaluates to +1 for every `t`.
pub fn eval_mask(seed: u64, mask: &GeneratorMask, t: ClockIndex) -> Sample {
    let mut negative = false;
    for index in mask.set_indices() {
        negative ^= sample_generator(seed, index, t).is_negative();
    }
    Sample::from_negative(negative)
}

/// Arithmetic mean of [`eval_mask`] over cycles `0..cycles`.
///
/// Exactly 1.0 for the all-zero mask; expectation 0 for any other mask.
pub fn mean_estimate(seed: u64, mask: &GeneratorMask, cycles: u64) -> Result<f64, Error> {
    if cycles == 0 {
        return Err(Error::CyclesTooFew { cycles: 0, min: 1 });
    }
    let keys: Vec<u64> = mask.set_indices().map(|i| stream_key(seed, i)).collect();
    let mut sum: i64 = 0;
    for t in 0..cycles {
        let mut negative = false;
        for &key in &keys {
            negative ^= sample_with_key(key, t).is_negative();
        }
        sum += if negative { -1 } else { 1 };
    }
    Ok(sum as f64 / cycles as f64)
}

/// Small sequential PRNG for reproducible sweeps and randomized tests.
///
/// This is deliberately separate from the generators themselves, which are
/// counter-based and never carry state.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform in `[0, bound)`. `bound` must be nonzero.
    pub fn below(&mut self, bound: u64) -> u64 {
        self.next_u64() % bound
    }

    pub fn flip(&mut self) -> bool {
        self.next_u64() >> 63 != 0
    }
}

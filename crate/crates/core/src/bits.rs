//! Short binary strings over the alphabet {0, 1}.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Longest string a [`BitString`] can hold.
pub const MAX_BITS: usize = 64;

/// A binary string of at most [`MAX_BITS`] characters.
///
/// The first character is the most significant bit of `bits`, so for strings
/// of equal length the numeric order of `bits` is the lexicographic order.
/// The derived ordering is shortlex (length first).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct BitString {
    len: u8,
    bits: u64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BitStringError {
    #[error("bitstring longer than {MAX_BITS} characters")]
    TooLong,
    #[error("invalid character {0:?} in bitstring")]
    BadChar(char),
}

impl BitString {
    pub const EMPTY: BitString = BitString { len: 0, bits: 0 };

    /// The string of length `len` whose characters spell `bits` in binary.
    /// Bits above `len` are discarded.
    pub fn new(len: usize, bits: u64) -> Self {
        assert!(len <= MAX_BITS, "bitstring length {len} exceeds {MAX_BITS}");
        let mask = if len == MAX_BITS { u64::MAX } else { (1u64 << len) - 1 };
        BitString {
            len: len as u8,
            bits: bits & mask,
        }
    }

    pub fn zeros(len: usize) -> Self {
        BitString::new(len, 0)
    }

    pub fn ones(len: usize) -> Self {
        BitString::new(len, u64::MAX)
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Position of this string among the strings of its length in lexicographic order.
    pub fn rank(&self) -> u64 {
        self.bits
    }

    /// Character at position `i`, counting from the left.
    pub fn bit(&self, i: usize) -> bool {
        assert!(i < self.len(), "index {i} out of range for length {}", self.len);
        (self.bits >> (self.len() - 1 - i)) & 1 == 1
    }

    /// Reads `width` characters starting at `start` as an unsigned number.
    pub fn field(&self, start: usize, width: usize) -> u64 {
        assert!(start + width <= self.len());
        if width == 0 {
            return 0;
        }
        let shifted = self.bits >> (self.len() - start - width);
        if width == 64 {
            shifted
        } else {
            shifted & ((1u64 << width) - 1)
        }
    }

    pub fn concat(&self, other: &BitString) -> BitString {
        let len = self.len() + other.len();
        assert!(len <= MAX_BITS, "concatenation exceeds {MAX_BITS} characters");
        let high = if other.len() == 64 { 0 } else { self.bits << other.len() };
        BitString::new(len, high | other.bits)
    }

    /// Substring `[start, start + len)`.
    pub fn slice(&self, start: usize, len: usize) -> BitString {
        BitString::new(len, self.field(start, len))
    }

    pub fn count_ones(&self) -> u32 {
        self.bits.count_ones()
    }

    /// All `2^len` strings of the given length in lexicographic order.
    pub fn all_of_length(len: usize) -> impl DoubleEndedIterator<Item = BitString> {
        assert!(len < MAX_BITS, "cannot enumerate strings of length {len}");
        (0..1u64 << len).map(move |bits| BitString::new(len, bits))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            f.write_str(if self.bit(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = BitStringError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.len() > MAX_BITS {
            return Err(BitStringError::TooLong);
        }
        let mut bits = 0u64;
        for ch in s.chars() {
            bits = (bits << 1)
                | match ch {
                    '0' => 0,
                    '1' => 1,
                    other => return Err(BitStringError::BadChar(other)),
                };
        }
        Ok(BitString::new(s.len(), bits))
    }
}

use crate::error::{Error, Result};

/// Largest arity for which a truth table may be materialized.
pub const MAX_TABLE_ARITY: usize = 20;

/// Explicit function table: bit `i` is the output at the assignment whose
/// little-endian reading is `i` (input 0 is the least significant bit).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TruthTable {
    arity: usize,
    words: Vec<u64>,
}

fn word_count(arity: usize) -> usize {
    (1usize << arity).div_ceil(64)
}

impl TruthTable {
    pub fn constant(arity: usize, value: bool) -> Result<Self> {
        Self::from_fn(arity, |_| value)
    }

    /// Tabulates `f` over every input index `0..2^arity`.
    pub fn from_fn(arity: usize, mut f: impl FnMut(usize) -> bool) -> Result<Self> {
        if arity > MAX_TABLE_ARITY {
            return Err(Error::capacity("truth table arity", MAX_TABLE_ARITY, arity));
        }
        let mut words = vec![0u64; word_count(arity)];
        for i in 0..(1usize << arity) {
            if f(i) {
                words[i / 64] |= 1 << (i % 64);
            }
        }
        Ok(TruthTable { arity, words })
    }

    /// Builds a table from explicit output bits, one per input index.
    pub fn from_bits(arity: usize, bits: &[bool]) -> Result<Self> {
        if bits.len() != 1usize.checked_shl(arity as u32).unwrap_or(0) {
            return Err(Error::Arity {
                expected: 1 << arity.min(63),
                actual: bits.len(),
            });
        }
        Self::from_fn(arity, |i| bits[i])
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        1 << self.arity
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Output at a packed input index.
    #[inline]
    pub fn get(&self, index: usize) -> bool {
        (self.words[index / 64] >> (index % 64)) & 1 == 1
    }

    pub fn eval(&self, x: &[bool]) -> bool {
        self.get(pack(x))
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_constant(&self) -> Option<bool> {
        match self.count_ones() {
            0 => Some(false),
            n if n == self.len() => Some(true),
            _ => None,
        }
    }

    /// Output bits as a vector, in index order.
    pub fn bits(&self) -> Vec<bool> {
        (0..self.len()).map(|i| self.get(i)).collect()
    }
}

/// Little-endian packing of an assignment into an integer index.
pub(crate) fn pack(x: &[bool]) -> usize {
    x.iter()
        .enumerate()
        .fold(0usize, |acc, (i, &b)| acc | (usize::from(b) << i))
}

//! Fixed-length bit vectors.
//!
//! `Bits` serves two roles: the value table of a hypothesis over the domain
//! (bit `j` = label of point `j`), and subsets of class members inside the
//! dimension searches (bit `i` = member `i` selected). The ordering is
//! lexicographic on the bit sequence, which is what canonical member order
//! is defined on.

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;

const BLOCK_BITS: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bits {
    len: usize,
    blocks: Vec<u64>,
}

impl Bits {
    pub fn zeros(len: usize) -> Self {
        Bits {
            len,
            blocks: vec![0; len.div_ceil(BLOCK_BITS)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut b = Bits {
            len,
            blocks: vec![u64::MAX; len.div_ceil(BLOCK_BITS)],
        };
        b.mask_tail();
        b
    }

    /// Zero out the unused bits of the last block.
    fn mask_tail(&mut self) {
        let rem = self.len % BLOCK_BITS;
        if rem != 0 {
            if let Some(last) = self.blocks.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn from_bools(bools: &[bool]) -> Self {
        let mut b = Self::zeros(bools.len());
        for (i, &v) in bools.iter().enumerate() {
            b.set(i, v);
        }
        b
    }

    /// Parse a string of '0'/'1' characters, most significant point first
    /// (index 0 is the first character).
    pub fn from_str01(s: &str) -> Option<Self> {
        let mut b = Self::zeros(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => b.set(i, true),
                _ => return None,
            }
        }
        Some(b)
    }

    pub fn string01(&self) -> String {
        (0..self.len)
            .map(|i| if self.get(i) { '1' } else { '0' })
            .collect()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.blocks[i / BLOCK_BITS] & (1u64 << (i % BLOCK_BITS)) != 0
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % BLOCK_BITS);
        if v {
            self.blocks[i / BLOCK_BITS] |= mask;
        } else {
            self.blocks[i / BLOCK_BITS] &= !mask;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(|&b| b == 0)
    }

    pub fn complemented(&self) -> Bits {
        let mut out = Bits {
            len: self.len,
            blocks: self.blocks.iter().map(|b| !b).collect(),
        };
        out.mask_tail();
        out
    }

    pub fn and(&self, other: &Bits) -> Bits {
        debug_assert_eq!(self.len, other.len);
        Bits {
            len: self.len,
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    pub fn or(&self, other: &Bits) -> Bits {
        debug_assert_eq!(self.len, other.len);
        Bits {
            len: self.len,
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| a | b)
                .collect(),
        }
    }

    pub fn and_not(&self, other: &Bits) -> Bits {
        debug_assert_eq!(self.len, other.len);
        Bits {
            len: self.len,
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| a & !b)
                .collect(),
        }
    }

    pub fn and_count(&self, other: &Bits) -> usize {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn is_subset_of(&self, other: &Bits) -> bool {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.blocks.iter().enumerate().flat_map(|(bi, &block)| {
            let mut b = block;
            std::iter::from_fn(move || {
                if b == 0 {
                    None
                } else {
                    let tz = b.trailing_zeros() as usize;
                    b &= b - 1;
                    Some(bi * BLOCK_BITS + tz)
                }
            })
        })
    }

    pub fn first_one(&self) -> Option<usize> {
        self.iter_ones().next()
    }

    pub fn blocks(&self) -> &[u64] {
        &self.blocks
    }
}

// Lexicographic on the bit sequence: bit 0 is most significant. Within a
// block bit 0 sits at the LSB, so blocks are compared reversed.
impl Ord for Bits {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.blocks.iter().zip(&other.blocks) {
            match a.reverse_bits().cmp(&b.reverse_bits()) {
                Ordering::Equal => {}
                ord => return ord,
            }
        }
        self.len.cmp(&other.len)
    }
}

impl PartialOrd for Bits {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bits({})", self.string01())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_and_ops() {
        let b = Bits::from_str01("01101").unwrap();
        assert_eq!(b.string01(), "01101");
        assert_eq!(b.count_ones(), 3);
        assert!(!b.get(0));
        assert!(b.get(1));
        assert_eq!(b.complemented().string01(), "10010");
        assert_eq!(b.complemented().complemented(), b);
        assert_eq!(b.iter_ones().collect::<Vec<_>>(), vec![1, 2, 4]);
    }

    #[test]
    fn lexicographic_order() {
        let a = Bits::from_str01("001").unwrap();
        let b = Bits::from_str01("011").unwrap();
        let c = Bits::from_str01("111").unwrap();
        assert!(a < b && b < c);
        // crosses block boundary
        let mut long0 = Bits::zeros(70);
        let mut long1 = Bits::zeros(70);
        long0.set(69, true);
        long1.set(0, true);
        assert!(long0 < long1);
    }

    #[test]
    fn tail_masking() {
        let b = Bits::ones(5);
        assert_eq!(b.count_ones(), 5);
        assert_eq!(b.complemented().count_ones(), 0);
    }
}

//! Packed per-row bit vectors: selection vectors and presence bitmaps.

use std::ops::Range;

/// One bit per row, packed into `u64` words, LSB first.
///
/// Bits beyond `len` in the last word are always zero.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl std::fmt::Debug for BitVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BitVector(len={}, ones={})", self.len, self.count_ones())
    }
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        BitVector { len, words: vec![0; len.div_ceil(64)] }
    }

    pub fn ones(len: usize) -> Self {
        let mut bv = BitVector { len, words: vec![u64::MAX; len.div_ceil(64)] };
        bv.trim();
        bv
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut bv = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                bv.set(i);
            }
        }
        bv
    }

    pub fn from_words(len: usize, mut words: Vec<u64>) -> Self {
        words.resize(len.div_ceil(64), 0);
        let mut bv = BitVector { len, words };
        bv.trim();
        bv
    }

    /// LSB-first packed bytes, as stored in presence pages.
    pub fn from_bytes(len: usize, bytes: &[u8]) -> Option<Self> {
        if bytes.len() < len.div_ceil(8) {
            return None;
        }
        let mut words = vec![0u64; len.div_ceil(64)];
        for (i, b) in bytes.iter().take(len.div_ceil(8)).enumerate() {
            words[i / 8] |= (*b as u64) << ((i % 8) * 8);
        }
        let mut bv = BitVector { len, words };
        bv.trim();
        Some(bv)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let n = self.len.div_ceil(8);
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push((self.words[i / 8] >> ((i % 8) * 8)) as u8);
        }
        out
    }

    fn trim(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        self.words[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub fn unset(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        self.words[i / 64] &= !(1 << (i % 64));
    }

    pub fn set_to(&mut self, i: usize, v: bool) {
        if v {
            self.set(i)
        } else {
            self.unset(i)
        }
    }

    pub fn push(&mut self, v: bool) {
        if self.len % 64 == 0 {
            self.words.push(0);
        }
        self.len += 1;
        if v {
            self.set(self.len - 1);
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn all(&self) -> bool {
        self.count_ones() == self.len
    }

    /// Realized selectivity: fraction of set bits.
    pub fn selectivity(&self) -> f64 {
        if self.len == 0 {
            0.0
        } else {
            self.count_ones() as f64 / self.len as f64
        }
    }

    fn range_masks(range: &Range<usize>) -> impl Iterator<Item = (usize, u64)> {
        let (start, end) = (range.start, range.end);
        let first = start / 64;
        let last = if end == 0 { 0 } else { (end - 1) / 64 };
        (first..=last).filter(move |_| start < end).map(move |w| {
            let lo = if w == first { start % 64 } else { 0 };
            let hi = if w == last { (end - 1) % 64 + 1 } else { 64 };
            let mask = if hi - lo == 64 { u64::MAX } else { ((1u64 << (hi - lo)) - 1) << lo };
            (w, mask)
        })
    }

    pub fn count_ones_in(&self, range: Range<usize>) -> usize {
        assert!(range.end <= self.len);
        Self::range_masks(&range).map(|(w, m)| (self.words[w] & m).count_ones() as usize).sum()
    }

    pub fn any_in(&self, range: Range<usize>) -> bool {
        assert!(range.end <= self.len);
        Self::range_masks(&range).any(|(w, m)| self.words[w] & m != 0)
    }

    pub fn clear_range(&mut self, range: Range<usize>) {
        assert!(range.end <= self.len);
        for (w, m) in Self::range_masks(&range) {
            self.words[w] &= !m;
        }
    }

    pub fn set_range(&mut self, range: Range<usize>) {
        assert!(range.end <= self.len);
        for (w, m) in Self::range_masks(&range) {
            self.words[w] |= m;
        }
    }

    /// Copy of bits `range` as a new vector starting at bit 0.
    pub fn slice(&self, range: Range<usize>) -> BitVector {
        assert!(range.start <= range.end && range.end <= self.len);
        let len = range.end - range.start;
        let shift = range.start % 64;
        let base = range.start / 64;
        let mut words = Vec::with_capacity(len.div_ceil(64));
        for i in 0..len.div_ceil(64) {
            let lo = self.words[base + i] >> shift;
            let hi = if shift > 0 && base + i + 1 < self.words.len() {
                self.words[base + i + 1] << (64 - shift)
            } else {
                0
            };
            words.push(lo | hi);
        }
        BitVector::from_words(len, words)
    }

    /// ANDs `fragment` into the bits starting at `offset`.
    pub fn and_at(&mut self, offset: usize, fragment: &BitVector) {
        assert!(offset + fragment.len <= self.len);
        if offset % 64 == 0 {
            let base = offset / 64;
            let full = fragment.len / 64;
            for i in 0..full {
                self.words[base + i] &= fragment.words[i];
            }
            for i in full * 64..fragment.len {
                if !fragment.get(i) {
                    self.unset(offset + i);
                }
            }
        } else {
            for i in 0..fragment.len {
                if !fragment.get(i) {
                    self.unset(offset + i);
                }
            }
        }
    }

    /// Overwrites bits starting at `offset` with `fragment`.
    pub fn copy_at(&mut self, offset: usize, fragment: &BitVector) {
        assert!(offset + fragment.len <= self.len);
        for i in 0..fragment.len {
            self.set_to(offset + i, fragment.get(i));
        }
    }

    pub fn and(&mut self, other: &BitVector) {
        assert_eq!(self.len, other.len, "bit vector lengths differ");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= *b;
        }
    }

    pub fn extend(&mut self, other: &BitVector) {
        if self.len % 64 == 0 {
            self.words.extend_from_slice(&other.words);
            self.len += other.len;
        } else {
            for i in 0..other.len {
                self.push(other.get(i));
            }
        }
    }

    /// Positions of set bits in ascending order.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let tz = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + tz)
                }
            })
        })
    }

    /// Positions of set bits inside `range`, ascending.
    pub fn iter_ones_in(&self, range: Range<usize>) -> impl Iterator<Item = usize> + '_ {
        assert!(range.end <= self.len);
        Self::range_masks(&range).flat_map(move |(wi, m)| {
            let mut w = self.words[wi] & m;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let tz = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + tz)
                }
            })
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(|i| self.get(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_and_counts() {
        let mut bv = BitVector::zeros(200);
        bv.set_range(3..130);
        assert_eq!(bv.count_ones(), 127);
        assert_eq!(bv.count_ones_in(0..64), 61);
        assert_eq!(bv.iter_ones_in(60..70).collect::<Vec<_>>(), (60..70).collect::<Vec<_>>());
        assert_eq!(bv.iter_ones_in(125..200).collect::<Vec<_>>(), (125..130).collect::<Vec<_>>());
        assert_eq!(bv.iter_ones_in(5..5).count(), 0);
        assert!(!bv.any_in(130..200));
        bv.clear_range(60..70);
        assert_eq!(bv.count_ones(), 117);
        assert_eq!(bv.iter_ones().next(), Some(3));
        assert_eq!(bv.slice(59..71).iter_ones().collect::<Vec<_>>(), vec![0, 11]);
    }

    #[test]
    fn ones_is_trimmed() {
        let bv = BitVector::ones(70);
        assert_eq!(bv.count_ones(), 70);
        assert_eq!(bv.words()[1], (1 << 6) - 1);
        assert!(bv.all());
    }

    #[test]
    fn byte_round_trip() {
        let bv = BitVector::from_bools(&[true, false, true, true, false, false, false, false, true]);
        let bytes = bv.to_bytes();
        assert_eq!(bytes, vec![0b0000_1101, 0b1]);
        assert_eq!(BitVector::from_bytes(9, &bytes).unwrap(), bv);
        assert!(BitVector::from_bytes(17, &bytes).is_none());
    }

    #[test]
    fn and_at_unaligned() {
        let mut bv = BitVector::ones(100);
        bv.and_at(10, &BitVector::from_bools(&[false, true, false]));
        assert_eq!(bv.count_ones(), 98);
        assert!(!bv.get(10) && bv.get(11) && !bv.get(12));
    }

    #[test]
    fn extend_unaligned() {
        let mut a = BitVector::from_bools(&[true, false, true]);
        a.extend(&BitVector::ones(64));
        assert_eq!(a.len(), 67);
        assert_eq!(a.count_ones(), 66);
    }
}

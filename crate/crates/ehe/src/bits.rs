//! Fixed-width bit vectors over `u64` words, little-endian bit order
//! (bit 0 is the first variable / wire).
//!
//! The same representation backs monomial masks, gate control masks and
//! machine states, so subset tests and XOR/AND/OR all reduce to word ops.

use std::cmp::Ordering;
use std::fmt;

use rand::Rng;
use smallvec::SmallVec;

/// Inline capacity of 4 words covers widths up to 256 without heap allocation.
type Words = SmallVec<[u64; 4]>;

/// A bit vector of fixed length `nbits`, packed LSB-first into 64-bit words.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVec {
    nbits: u32,
    words: Words,
}

#[inline]
pub(crate) fn words_for(nbits: u32) -> usize {
    ((nbits as usize) + 63) / 64
}

impl BitVec {
    /// All-zero vector of the given length.
    pub fn zeros(nbits: u32) -> Self {
        let mut words = Words::new();
        words.resize(words_for(nbits), 0);
        BitVec { nbits, words }
    }

    pub fn from_indices(nbits: u32, ones: &[u32]) -> Self {
        let mut v = Self::zeros(nbits);
        for &i in ones {
            v.set(i, true);
        }
        v
    }

    /// Low `nbits` of `value`, bit 0 first.
    pub fn from_u64(nbits: u32, value: u64) -> Self {
        let mut v = Self::zeros(nbits);
        let keep = if nbits >= 64 { u64::MAX } else { (1u64 << nbits) - 1 };
        if !v.words.is_empty() {
            v.words[0] = value & keep;
        }
        v
    }

    /// Parse a string of `0`/`1` characters, leftmost character = bit 0.
    pub fn from_bit_str(s: &str) -> Self {
        let bits: Vec<char> = s.chars().filter(|c| *c == '0' || *c == '1').collect();
        let mut v = Self::zeros(bits.len() as u32);
        for (i, c) in bits.iter().enumerate() {
            if *c == '1' {
                v.set(i as u32, true);
            }
        }
        v
    }

    #[inline]
    pub fn len(&self) -> u32 {
        self.nbits
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.nbits == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: u32) -> bool {
        debug_assert!(i < self.nbits);
        (self.words[(i / 64) as usize] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: u32, value: bool) {
        debug_assert!(i < self.nbits);
        let w = &mut self.words[(i / 64) as usize];
        if value {
            *w |= 1u64 << (i % 64);
        } else {
            *w &= !(1u64 << (i % 64));
        }
    }

    #[inline]
    pub fn toggle(&mut self, i: u32) {
        debug_assert!(i < self.nbits);
        self.words[(i / 64) as usize] ^= 1u64 << (i % 64);
    }

    #[inline]
    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    /// True iff every set bit of `self` is also set in `other`.
    #[inline]
    pub fn is_subset_of(&self, other: &BitVec) -> bool {
        debug_assert_eq!(self.nbits, other.nbits);
        self.words
            .iter()
            .zip(other.words.iter())
            .all(|(a, b)| a & !b == 0)
    }

    #[inline]
    pub fn intersects(&self, other: &BitVec) -> bool {
        self.words
            .iter()
            .zip(other.words.iter())
            .any(|(a, b)| a & b != 0)
    }

    #[inline]
    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.nbits, other.nbits);
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a ^= b;
        }
    }

    #[inline]
    pub fn or_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.nbits, other.nbits);
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a |= b;
        }
    }

    #[inline]
    pub fn and_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.nbits, other.nbits);
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a &= b;
        }
    }

    pub fn or_with(&self, other: &BitVec) -> BitVec {
        let mut out = self.clone();
        out.or_assign(other);
        out
    }

    pub fn without_bit(&self, i: u32) -> BitVec {
        let mut out = self.clone();
        out.set(i, false);
        out
    }

    /// Complement of `self` within its width.
    pub fn negated(&self) -> BitVec {
        let mut out = self.clone();
        for w in out.words.iter_mut() {
            *w = !*w;
        }
        out.mask_tail();
        out
    }

    fn mask_tail(&mut self) {
        let rem = self.nbits % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    /// Reinterpret at a wider width (extra high bits are zero).
    pub fn extended(&self, nbits: u32) -> BitVec {
        assert!(nbits >= self.nbits, "cannot shrink a bit vector");
        let mut out = BitVec::zeros(nbits);
        out.words[..self.words.len()].copy_from_slice(&self.words);
        out
    }

    /// The low `nbits` as an integer; panics if a set bit lies above 64.
    pub fn to_u64(&self) -> u64 {
        assert!(
            self.words.iter().skip(1).all(|w| *w == 0),
            "value does not fit in u64"
        );
        self.words.first().copied().unwrap_or(0)
    }

    /// Bits `[lo, lo+len)` as an integer, `len <= 64`.
    pub fn extract_u64(&self, lo: u32, len: u32) -> u64 {
        debug_assert!(len <= 64 && lo + len <= self.nbits);
        let mut out = 0u64;
        for i in 0..len {
            if self.get(lo + i) {
                out |= 1u64 << i;
            }
        }
        out
    }

    /// Write `value`'s low `len` bits into bits `[lo, lo+len)`.
    pub fn insert_u64(&mut self, lo: u32, len: u32, value: u64) {
        debug_assert!(len <= 64 && lo + len <= self.nbits);
        for i in 0..len {
            self.set(lo + i, (value >> i) & 1 == 1);
        }
    }

    /// Concatenate `self` followed by `other`.
    pub fn concat(&self, other: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.nbits + other.nbits);
        for i in 0..self.nbits {
            if self.get(i) {
                out.set(i, true);
            }
        }
        for i in 0..other.nbits {
            if other.get(i) {
                out.set(self.nbits + i, true);
            }
        }
        out
    }

    /// Bits `[lo, hi)` as a new vector.
    pub fn slice(&self, lo: u32, hi: u32) -> BitVec {
        debug_assert!(lo <= hi && hi <= self.nbits);
        let mut out = BitVec::zeros(hi - lo);
        for i in lo..hi {
            if self.get(i) {
                out.set(i - lo, true);
            }
        }
        out
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = u32> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let b = bits.trailing_zeros();
                    bits &= bits - 1;
                    Some(wi as u32 * 64 + b)
                }
            })
        })
    }

    /// Uniformly random vector.
    pub fn random<R: Rng + ?Sized>(nbits: u32, rng: &mut R) -> Self {
        let mut v = Self::zeros(nbits);
        for w in v.words.iter_mut() {
            *w = rng.gen();
        }
        v.mask_tail();
        v
    }

    /// Uniformly random subset of the set bits of `mask`.
    pub fn random_subset<R: Rng + ?Sized>(mask: &BitVec, rng: &mut R) -> Self {
        let mut v = BitVec::random(mask.nbits, rng);
        v.and_assign(mask);
        v
    }
}

// Canonical serialization order: lexicographic on the word array, word 0 first.
impl Ord for BitVec {
    fn cmp(&self, other: &Self) -> Ordering {
        self.words
            .as_slice()
            .cmp(other.words.as_slice())
            .then(self.nbits.cmp(&other.nbits))
    }
}

impl PartialOrd for BitVec {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.nbits {
            write!(f, "{}", if self.get(i) { 1 } else { 0 })?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn set_get_toggle() {
        let mut v = BitVec::zeros(130);
        v.set(0, true);
        v.set(129, true);
        assert!(v.get(0) && v.get(129) && !v.get(64));
        v.toggle(129);
        assert!(!v.get(129));
        assert_eq!(v.count_ones(), 1);
    }

    #[test]
    fn subset_and_words() {
        let a = BitVec::from_indices(70, &[1, 65]);
        let b = BitVec::from_indices(70, &[1, 3, 65]);
        assert!(a.is_subset_of(&b));
        assert!(!b.is_subset_of(&a));
        assert!(a.intersects(&b));
    }

    #[test]
    fn u64_roundtrip_and_slices() {
        let v = BitVec::from_u64(20, 0b1011_0110);
        assert_eq!(v.to_u64(), 0b1011_0110);
        assert_eq!(v.extract_u64(1, 4), 0b1011);
        let mut w = v.clone();
        w.insert_u64(10, 4, 0b1111);
        assert_eq!(w.extract_u64(10, 4), 0b1111);
        assert_eq!(v.concat(&BitVec::from_u64(4, 0b101)).len(), 24);
    }

    #[test]
    fn tail_masking() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for nbits in [1u32, 63, 64, 65, 127, 160] {
            let v = BitVec::random(nbits, &mut rng);
            let full = v.negated();
            assert_eq!(v.count_ones() + full.count_ones(), nbits);
        }
    }

    #[test]
    fn iter_ones_matches_get() {
        let v = BitVec::from_indices(200, &[0, 5, 63, 64, 150, 199]);
        let ones: Vec<u32> = v.iter_ones().collect();
        assert_eq!(ones, vec![0, 5, 63, 64, 150, 199]);
    }
}

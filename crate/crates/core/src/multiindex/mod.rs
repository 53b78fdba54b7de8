//! Ordered multi-indices stored as bitsets, and the relative-sign calculus.
//!
//! Orbitals are 1-based at every public boundary (constructors, iteration,
//! JSON); bit `i` of the word holds orbital `i + 1`.

use std::fmt;
use std::ops::Mul;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub mod sums;

#[cfg(not(feature = "wide"))]
pub type Word = u64;
#[cfg(feature = "wide")]
pub type Word = u128;

/// Largest orbital label a [`MultiIndex`] can hold.
pub const MAX_ORBITALS: usize = Word::BITS as usize;

/// Strictly increasing tuple of orbital labels.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct MultiIndex(Word);

impl MultiIndex {
    pub const EMPTY: MultiIndex = MultiIndex(0);

    pub const fn from_bits(bits: Word) -> Self {
        MultiIndex(bits)
    }

    pub const fn bits(self) -> Word {
        self.0
    }

    /// Builds from 1-based labels in any order. Repeats and out-of-range
    /// labels are rejected.
    pub fn from_orbitals(orbitals: &[usize]) -> Result<Self> {
        let mut bits: Word = 0;
        for &o in orbitals {
            if o == 0 || o > MAX_ORBITALS {
                return Err(Error::Validation(format!(
                    "orbital label {o} outside 1..={MAX_ORBITALS}"
                )));
            }
            let bit = (1 as Word) << (o - 1);
            if bits & bit != 0 {
                return Err(Error::Validation(format!("orbital {o} repeated")));
            }
            bits |= bit;
        }
        Ok(MultiIndex(bits))
    }

    /// `{1, ..., m}`.
    pub fn full(m: usize) -> Self {
        assert!(m <= MAX_ORBITALS, "orbital space too large");
        MultiIndex(low_mask(m))
    }

    pub fn singleton(orbital: usize) -> Self {
        assert!(orbital >= 1 && orbital <= MAX_ORBITALS);
        MultiIndex((1 as Word) << (orbital - 1))
    }

    pub const fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, orbital: usize) -> bool {
        orbital >= 1 && orbital <= MAX_ORBITALS && self.0 >> (orbital - 1) & 1 == 1
    }

    /// Largest label, 0 for the empty index.
    pub fn max_orbital(self) -> usize {
        (Word::BITS - self.0.leading_zeros()) as usize
    }

    /// True when every label lies in `1..=m`.
    pub fn within(self, m: usize) -> bool {
        self.max_orbital() <= m
    }

    pub fn orbitals(self) -> Orbitals {
        Orbitals(self.0)
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.orbitals().collect()
    }

    pub const fn is_disjoint(self, other: MultiIndex) -> bool {
        self.0 & other.0 == 0
    }

    pub const fn is_subset_of(self, other: MultiIndex) -> bool {
        self.0 & !other.0 == 0
    }

    /// Set union; overlapping inputs are an error.
    pub fn union(self, other: MultiIndex) -> Result<MultiIndex> {
        if self.is_disjoint(other) {
            Ok(MultiIndex(self.0 | other.0))
        } else {
            Err(Error::Overlap(self, other))
        }
    }

    /// Union without the disjointness check, for callers that already know.
    #[inline]
    pub const fn join(self, other: MultiIndex) -> MultiIndex {
        MultiIndex(self.0 | other.0)
    }

    #[inline]
    pub const fn intersect(self, other: MultiIndex) -> MultiIndex {
        MultiIndex(self.0 & other.0)
    }

    #[inline]
    pub const fn difference(self, other: MultiIndex) -> MultiIndex {
        MultiIndex(self.0 & !other.0)
    }

    /// Position of `self` in [`enumerate`] order among indices of the same length.
    pub fn rank(self) -> usize {
        let mut r = 0usize;
        for (i, p) in BitPositions(self.0).enumerate() {
            r += if p < 64 {
                PASCAL[p][i + 1] as usize
            } else {
                binomial_exact(p as u64, i as u64 + 1) as usize
            };
        }
        r
    }

    /// Inverse of [`MultiIndex::rank`].
    pub fn unrank(mut rank: u128, length: usize) -> MultiIndex {
        let mut bits: Word = 0;
        for i in (1..=length).rev() {
            let mut p = i - 1;
            while binomial_exact(p as u64 + 1, i as u64) <= rank {
                p += 1;
            }
            rank -= binomial_exact(p as u64, i as u64);
            bits |= (1 as Word) << p;
        }
        MultiIndex(bits)
    }
}

#[inline]
fn low_mask(m: usize) -> Word {
    if m >= MAX_ORBITALS {
        Word::MAX
    } else {
        ((1 as Word) << m) - 1
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, o) in self.orbitals().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{o}")?;
        }
        f.write_str(")")
    }
}

impl Serialize for MultiIndex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.orbitals())
    }
}

impl<'de> Deserialize<'de> for MultiIndex {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        if v.windows(2).any(|w| w[0] >= w[1]) {
            return Err(serde::de::Error::custom(format!(
                "multi-index {v:?} is not strictly increasing"
            )));
        }
        MultiIndex::from_orbitals(&v).map_err(serde::de::Error::custom)
    }
}

/// 1-based labels in increasing order.
#[derive(Clone)]
pub struct Orbitals(Word);

impl Iterator for Orbitals {
    type Item = usize;
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let p = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(p + 1)
    }
}

struct BitPositions(Word);

impl Iterator for BitPositions {
    type Item = usize;
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let p = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(p)
    }
}

/// A permutation sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_parity(odd: bool) -> Sign {
        if odd {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn value(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn as_f64(self) -> f64 {
        self.value() as f64
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        Sign::from_parity(self != rhs)
    }
}

/// Parity of the number of pairs `(x, y)` with `x` in `a`, `y` in `b`, `y < x`.
/// No disjointness check.
#[inline]
pub fn sign_parity(a: MultiIndex, b: MultiIndex) -> bool {
    let mut acc = 0u32;
    let mut x = a.0;
    while x != 0 {
        let low = x & x.wrapping_neg();
        acc ^= (b.0 & (low - 1)).count_ones();
        x &= x - 1;
    }
    acc & 1 == 1
}

/// Sign of the permutation sorting the concatenation `(a, b)`.
pub fn relative_sign(a: MultiIndex, b: MultiIndex) -> Result<Sign> {
    if !a.is_disjoint(b) {
        return Err(Error::Overlap(a, b));
    }
    Ok(Sign::from_parity(sign_parity(a, b)))
}

/// Two disjoint multi-indices together with their relative sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SignedIndexPair {
    pub first: MultiIndex,
    pub second: MultiIndex,
    pub sign: Sign,
}

impl SignedIndexPair {
    pub fn new(first: MultiIndex, second: MultiIndex) -> Result<Self> {
        let sign = relative_sign(first, second)?;
        Ok(SignedIndexPair { first, second, sign })
    }
}

/// All `length`-subsets of `{1..m}`, in increasing order of the bit pattern.
/// (For length 2, m = 3: (1,2), (1,3), (2,3).)
pub fn enumerate(length: usize, m: usize) -> Combinations {
    assert!(m <= MAX_ORBITALS, "orbital space too large");
    Combinations::new(length, m)
}

/// All `length`-subsets of `a`.
pub fn subset_stream(a: MultiIndex, length: usize) -> Subsets {
    Subsets {
        host: a,
        inner: Combinations::new(length, a.len()),
    }
}

/// `(a ∩ b, a \ b, b \ a)`.
pub fn split_triple(a: MultiIndex, b: MultiIndex) -> (MultiIndex, MultiIndex, MultiIndex) {
    (a.intersect(b), a.difference(b), b.difference(a))
}

/// Inverse of [`split_triple`].
pub fn merge_triple(d: MultiIndex, a: MultiIndex, b: MultiIndex) -> (MultiIndex, MultiIndex) {
    (d.join(a), d.join(b))
}

#[derive(Clone)]
pub struct Combinations {
    next: Option<Word>,
    m: usize,
}

impl Combinations {
    fn new(length: usize, m: usize) -> Self {
        let next = if length > m { None } else { Some(low_mask(length)) };
        Combinations { next, m }
    }
}

impl Iterator for Combinations {
    type Item = MultiIndex;

    fn next(&mut self) -> Option<MultiIndex> {
        let x = self.next?;
        self.next = if x == 0 {
            None
        } else {
            // Gosper's hack
            let c = x & x.wrapping_neg();
            match x.checked_add(c) {
                None => None,
                Some(r) => {
                    let n = (((r ^ x) >> 2) / c) | r;
                    if self.m < MAX_ORBITALS && n >> self.m != 0 {
                        None
                    } else {
                        Some(n)
                    }
                }
            }
        };
        Some(MultiIndex(x))
    }
}

#[derive(Clone)]
pub struct Subsets {
    host: MultiIndex,
    inner: Combinations,
}

impl Iterator for Subsets {
    type Item = MultiIndex;
    fn next(&mut self) -> Option<MultiIndex> {
        let pattern = self.inner.next()?;
        Some(deposit(pattern.0, self.host.0))
    }
}

/// Scatter the low bits of `pattern` onto the set bits of `host`.
#[inline]
fn deposit(mut pattern: Word, host: Word) -> MultiIndex {
    let mut out = 0;
    let mut h = host;
    while pattern != 0 && h != 0 {
        let low = h & h.wrapping_neg();
        if pattern & 1 == 1 {
            out |= low;
        }
        pattern >>= 1;
        h &= h - 1;
    }
    MultiIndex(out)
}

const PASCAL: [[u64; 66]; 65] = pascal();

const fn pascal() -> [[u64; 66]; 65] {
    let mut t = [[0u64; 66]; 65];
    let mut n = 0;
    while n < 65 {
        t[n][0] = 1;
        let mut k = 1;
        while k <= n {
            t[n][k] = t[n - 1][k - 1].saturating_add(t[n - 1][k]);
            k += 1;
        }
        n += 1;
    }
    t
}

fn binomial_exact(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r
}

/// `C(n, k)`, zero whenever `k < 0`, `n < 0` or `k > n`.
pub fn binomial(n: i64, k: i64) -> f64 {
    if n < 0 || k < 0 || k > n {
        0.0
    } else {
        binomial_exact(n as u64, k as u64) as f64
    }
}

/// Exact `C(n, k)` for counting.
pub fn count(n: usize, k: usize) -> u128 {
    binomial_exact(n as u64, k as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(v: &[usize]) -> MultiIndex {
        MultiIndex::from_orbitals(v).unwrap()
    }

    #[test]
    fn sign_examples() {
        assert_eq!(relative_sign(mi(&[1, 3]), mi(&[2, 4])).unwrap(), Sign::Minus);
        assert_eq!(relative_sign(mi(&[]), mi(&[5, 7])).unwrap(), Sign::Plus);
        assert_eq!(relative_sign(mi(&[1, 2]), mi(&[3, 4])).unwrap(), Sign::Plus);
        assert_eq!(relative_sign(mi(&[2, 4]), mi(&[1, 3])).unwrap(), Sign::Minus);
        assert!(matches!(
            relative_sign(mi(&[1, 2]), mi(&[2])),
            Err(Error::Overlap(..))
        ));
    }

    #[test]
    fn set_ops() {
        assert_eq!(mi(&[1, 3]).union(mi(&[2, 4])).unwrap(), mi(&[1, 2, 3, 4]));
        assert!(mi(&[1, 3]).union(mi(&[3])).is_err());
        assert_eq!(mi(&[1, 2, 3]).intersect(mi(&[2, 3, 5])), mi(&[2, 3]));
        assert_eq!(mi(&[1, 2, 3]).difference(mi(&[2])), mi(&[1, 3]));
    }

    #[test]
    fn enumeration_order_and_counts() {
        let v: Vec<_> = enumerate(2, 3).map(|x| x.to_vec()).collect();
        assert_eq!(v, vec![vec![1, 2], vec![1, 3], vec![2, 3]]);
        let e: Vec<_> = enumerate(0, 5).collect();
        assert_eq!(e, vec![MultiIndex::EMPTY]);
        assert_eq!(enumerate(3, 6).count(), 20);
        assert_eq!(enumerate(4, 3).count(), 0);
        assert_eq!(enumerate(64, 64).count(), 1);
        assert_eq!(enumerate(1, 64).count(), 64);
    }

    #[test]
    fn rank_matches_enumeration() {
        for len in 0..=5 {
            for (i, x) in enumerate(len, 9).enumerate() {
                assert_eq!(x.rank(), i);
                assert_eq!(MultiIndex::unrank(i as u128, len), x);
            }
        }
    }

    #[test]
    fn split_examples() {
        assert_eq!(
            split_triple(mi(&[1, 3]), mi(&[2, 3])),
            (mi(&[3]), mi(&[1]), mi(&[2]))
        );
        assert_eq!(
            split_triple(mi(&[1, 2]), mi(&[1, 2])),
            (mi(&[1, 2]), MultiIndex::EMPTY, MultiIndex::EMPTY)
        );
    }

    #[test]
    fn subsets() {
        let v: Vec<_> = subset_stream(mi(&[1, 2, 3]), 2).map(|x| x.to_vec()).collect();
        assert_eq!(v, vec![vec![1, 2], vec![1, 3], vec![2, 3]]);
        let v: Vec<_> = subset_stream(mi(&[2, 5]), 0).collect();
        assert_eq!(v, vec![MultiIndex::EMPTY]);
        assert_eq!(subset_stream(mi(&[1, 4, 6, 7, 9, 11]), 3).count(), 20);
        assert!(subset_stream(mi(&[4, 9, 11]), 2).all(|s| s.is_subset_of(mi(&[4, 9, 11]))));
    }

    #[test]
    fn binomial_convention() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(-1, 0), 0.0);
        assert_eq!(binomial(3, -1), 0.0);
        assert_eq!(binomial(3, 4), 0.0);
        assert_eq!(binomial(0, 0), 1.0);
    }

    #[test]
    fn json_form() {
        let s = serde_json::to_string(&mi(&[4, 1, 3])).unwrap();
        assert_eq!(s, "[1,3,4]");
        let back: MultiIndex = serde_json::from_str("[1,3,4]").unwrap();
        assert_eq!(back, mi(&[1, 3, 4]));
        assert!(serde_json::from_str::<MultiIndex>("[1,1,2]").is_err());
        assert!(serde_json::from_str::<MultiIndex>("[0]").is_err());
    }
}

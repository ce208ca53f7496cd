use std::fmt;
use std::ops::{BitAnd, BitOr, BitXor, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Largest supported vertex count; vertex ids are `0..MAX_VERTICES`.
pub const MAX_VERTICES: usize = 64;

pub type Vertex = usize;

/// A set of vertex ids, stored as a 64-bit mask.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexSet(u64);

impl VertexSet {
    pub const EMPTY: VertexSet = VertexSet(0);

    #[inline]
    pub const fn from_bits(bits: u64) -> Self {
        VertexSet(bits)
    }

    #[inline]
    pub const fn bits(self) -> u64 {
        self.0
    }

    /// `{0, 1, ..., n-1}`.
    #[inline]
    pub const fn range(n: usize) -> Self {
        if n >= 64 {
            VertexSet(u64::MAX)
        } else {
            VertexSet((1u64 << n) - 1)
        }
    }

    #[inline]
    pub fn singleton(v: Vertex) -> Self {
        debug_assert!(v < MAX_VERTICES);
        VertexSet(1u64 << v)
    }

    #[inline]
    pub fn contains(self, v: Vertex) -> bool {
        v < MAX_VERTICES && (self.0 >> v) & 1 == 1
    }

    #[inline]
    pub fn with(self, v: Vertex) -> Self {
        self | Self::singleton(v)
    }

    #[inline]
    pub fn without(self, v: Vertex) -> Self {
        VertexSet(self.0 & !(1u64 << v))
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn is_subset(self, other: VertexSet) -> bool {
        self.0 & !other.0 == 0
    }

    #[inline]
    pub fn is_disjoint(self, other: VertexSet) -> bool {
        self.0 & other.0 == 0
    }

    #[inline]
    pub fn min(self) -> Option<Vertex> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    #[inline]
    pub fn max(self) -> Option<Vertex> {
        (self.0 != 0).then(|| 63 - self.0.leading_zeros() as usize)
    }

    /// Ascending ids.
    #[inline]
    pub fn iter(self) -> Iter {
        Iter(self.0)
    }

    pub fn to_vec(self) -> Vec<Vertex> {
        self.iter().collect()
    }

    /// Hex form used in reports and CLI output, e.g. `0x15`.
    pub fn to_hex(self) -> String {
        format!("{:#x}", self.0)
    }

    pub fn from_hex(s: &str) -> Option<Self> {
        let digits = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X"))?;
        if digits.is_empty() || digits.len() > 16 {
            return None;
        }
        u64::from_str_radix(digits, 16).ok().map(VertexSet)
    }

    /// Maps the `i`-th lowest member of `self` to bit `i` of the result for
    /// every member that is also in `x` (a software `pext`).
    pub fn compress(self, x: VertexSet) -> u64 {
        let mut out = 0;
        for (i, v) in self.iter().enumerate() {
            if x.contains(v) {
                out |= 1 << i;
            }
        }
        out
    }

    /// Inverse of [`compress`](Self::compress): bit `i` of `bits` selects the
    /// `i`-th lowest member of `self`.
    pub fn expand(self, bits: u64) -> VertexSet {
        let mut out = 0;
        for (i, v) in self.iter().enumerate() {
            if (bits >> i) & 1 == 1 {
                out |= 1 << v;
            }
        }
        VertexSet(out)
    }
}

pub struct Iter(u64);

impl Iterator for Iter {
    type Item = Vertex;

    #[inline]
    fn next(&mut self) -> Option<Vertex> {
        if self.0 == 0 {
            return None;
        }
        let v = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(v)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl DoubleEndedIterator for Iter {
    #[inline]
    fn next_back(&mut self) -> Option<Vertex> {
        if self.0 == 0 {
            return None;
        }
        let v = 63 - self.0.leading_zeros() as usize;
        self.0 &= !(1u64 << v);
        Some(v)
    }
}

impl ExactSizeIterator for Iter {}

impl IntoIterator for VertexSet {
    type Item = Vertex;
    type IntoIter = Iter;

    fn into_iter(self) -> Iter {
        self.iter()
    }
}

impl FromIterator<Vertex> for VertexSet {
    fn from_iter<I: IntoIterator<Item = Vertex>>(iter: I) -> Self {
        iter.into_iter()
            .fold(VertexSet::EMPTY, |acc, v| acc.with(v))
    }
}

impl BitOr for VertexSet {
    type Output = VertexSet;
    #[inline]
    fn bitor(self, rhs: Self) -> Self {
        VertexSet(self.0 | rhs.0)
    }
}

impl BitAnd for VertexSet {
    type Output = VertexSet;
    #[inline]
    fn bitand(self, rhs: Self) -> Self {
        VertexSet(self.0 & rhs.0)
    }
}

impl BitXor for VertexSet {
    type Output = VertexSet;
    #[inline]
    fn bitxor(self, rhs: Self) -> Self {
        VertexSet(self.0 ^ rhs.0)
    }
}

/// Set difference.
impl Sub for VertexSet {
    type Output = VertexSet;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        VertexSet(self.0 & !rhs.0)
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Comma-separated ids, e.g. `0,2,5`; empty set prints as the empty string.
impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl Serialize for VertexSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for VertexSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        VertexSet::from_hex(&s)
            .ok_or_else(|| serde::de::Error::custom(format!("invalid vertex-set mask {s:?}")))
    }
}

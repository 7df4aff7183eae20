//! Exact linear algebra over GF(2).
//!
//! Bit order convention (shared by every module): index 0 is the leftmost
//! bit of the written string, i.e. the most significant bit of the packed
//! word. `BitVec::to_string` and parsing follow the same big-endian
//! convention.

use std::fmt;
use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// An element of GF(2)^n, n <= 64, packed into a word.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct BitVec {
    len: usize,
    value: u64,
}

impl BitVec {
    pub fn zero(len: usize) -> Self {
        assert!(len >= 1 && len <= 64, "BitVec length must be in 1..=64");
        BitVec { len, value: 0 }
    }

    /// Interprets `value` as the big-endian binary string of width `len`.
    pub fn from_word(value: u64, len: usize) -> Self {
        assert!(len >= 1 && len <= 64, "BitVec length must be in 1..=64");
        assert!(len == 64 || value < (1u64 << len), "value does not fit in {len} bits");
        BitVec { len, value }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn as_word(&self) -> u64 {
        self.value
    }

    /// Bit at position `i`, counting from the leftmost written digit.
    pub fn get(&self, i: usize) -> u8 {
        assert!(i < self.len);
        ((self.value >> (self.len - 1 - i)) & 1) as u8
    }

    pub fn set(&mut self, i: usize, bit: u8) {
        assert!(i < self.len);
        let mask = 1u64 << (self.len - 1 - i);
        if bit != 0 {
            self.value |= mask;
        } else {
            self.value &= !mask;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn weight(&self) -> u32 {
        self.value.count_ones()
    }

    pub fn xor(&self, other: &BitVec) -> Result<BitVec> {
        if self.len != other.len {
            return Err(Error::Dimension(format!(
                "xor of widths {} and {}",
                self.len, other.len
            )));
        }
        Ok(BitVec { len: self.len, value: self.value ^ other.value })
    }

    pub fn iter_bits(&self) -> impl Iterator<Item = u8> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:0width$b}", self.value, width = self.len)
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec({self})")
    }
}

impl FromStr for BitVec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() || s.len() > 64 || !s.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(Error::InvalidArgument(format!("not a binary string: {s:?}")));
        }
        let value = u64::from_str_radix(s, 2)
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
        Ok(BitVec { len: s.len(), value })
    }
}

impl Serialize for BitVec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BitVec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(D::Error::custom)
    }
}

/// Inner product over GF(2).
pub fn inner(x: &BitVec, y: &BitVec) -> Result<u8> {
    if x.len != y.len {
        return Err(Error::Dimension(format!(
            "inner product of widths {} and {}",
            x.len, y.len
        )));
    }
    Ok(((x.value & y.value).count_ones() & 1) as u8)
}

/// A list of equal-width rows over GF(2).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BitMatrix {
    width: usize,
    rows: Vec<BitVec>,
}

impl BitMatrix {
    pub fn new(width: usize) -> Self {
        assert!(width >= 1 && width <= 64);
        BitMatrix { width, rows: Vec::new() }
    }

    pub fn from_rows(width: usize, rows: Vec<BitVec>) -> Result<Self> {
        for r in &rows {
            if r.len() != width {
                return Err(Error::Dimension(format!(
                    "row width {} in matrix of width {width}",
                    r.len()
                )));
            }
        }
        Ok(BitMatrix { width, rows })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    pub fn push_row(&mut self, row: BitVec) -> Result<()> {
        if row.len() != self.width {
            return Err(Error::Dimension(format!(
                "row width {} in matrix of width {}",
                row.len(),
                self.width
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    /// Row-echelon basis of the row space, pivots strictly left to right.
    fn echelon_basis(&self) -> Vec<u64> {
        let mut basis: Vec<u64> = Vec::new();
        for row in &self.rows {
            let mut v = row.value;
            for b in &basis {
                if (v ^ b) < v {
                    v ^= b;
                }
            }
            if v != 0 {
                basis.push(v);
                basis.sort_unstable_by(|a, b| b.cmp(a));
            }
        }
        basis
    }

    /// Row rank over GF(2).
    pub fn rank(&self) -> usize {
        self.echelon_basis().len()
    }

    /// True iff `y` is a GF(2)-combination of the rows.
    pub fn span_contains(&self, y: &BitVec) -> Result<bool> {
        if y.len() != self.width {
            return Err(Error::Dimension(format!(
                "vector width {} against matrix width {}",
                y.len(),
                self.width
            )));
        }
        let mut v = y.value;
        for b in self.echelon_basis() {
            if (v ^ b) < v {
                v ^= b;
            }
        }
        Ok(v == 0)
    }

    /// The unique nonzero vector orthogonal to every row. Requires the row
    /// space to have dimension exactly width - 1.
    pub fn nullspace_nontrivial(&self) -> Result<BitVec> {
        let basis = self.echelon_basis();
        let rank = basis.len();
        if rank != self.width - 1 {
            return Err(Error::NullspaceNotUnique { rank, width: self.width });
        }
        // Reduce to RREF so each pivot column appears in exactly one row.
        let mut rref = basis;
        for i in 0..rref.len() {
            let pivot = 63 - rref[i].leading_zeros() as usize;
            for j in 0..rref.len() {
                if j != i && (rref[j] >> pivot) & 1 == 1 {
                    rref[j] ^= rref[i];
                }
            }
        }
        let pivots: Vec<usize> =
            rref.iter().map(|r| 63 - r.leading_zeros() as usize).collect();
        let free = (0..self.width)
            .map(|i| self.width - 1 - i) // bit position of column i
            .find(|p| !pivots.contains(p))
            .expect("rank = width - 1 leaves one free column");
        let mut s = 1u64 << free;
        for (row, &p) in rref.iter().zip(&pivots) {
            if (row >> free) & 1 == 1 {
                s |= 1 << p;
            }
        }
        Ok(BitVec { len: self.width, value: s })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bv(s: &str) -> BitVec {
        s.parse().unwrap()
    }

    #[test]
    fn inner_products() {
        assert_eq!(inner(&bv("1011"), &bv("1110")).unwrap(), 0);
        let x = bv("10110");
        assert_eq!(inner(&x, &BitVec::zero(5)).unwrap(), 0);
        assert_eq!(inner(&bv("111"), &bv("110")).unwrap(), 0);
        assert_eq!(inner(&bv("111"), &bv("101")).unwrap(), 0);
        // brute force over GF(2)^3: inner == parity of AND
        for x in 0..8u64 {
            for y in 0..8u64 {
                let expect = ((x & y).count_ones() & 1) as u8;
                assert_eq!(
                    inner(&BitVec::from_word(x, 3), &BitVec::from_word(y, 3)).unwrap(),
                    expect
                );
            }
        }
        assert!(inner(&bv("10"), &bv("100")).is_err());
    }

    #[test]
    fn self_inner_is_weight_parity() {
        for v in 0..64u64 {
            let x = BitVec::from_word(v, 6);
            assert_eq!(inner(&x, &x).unwrap(), (x.weight() & 1) as u8);
        }
    }

    #[test]
    fn rank_examples() {
        let m = BitMatrix::from_rows(3, vec![bv("110"), bv("101")]).unwrap();
        assert_eq!(m.rank(), 2);
        let z = BitMatrix::from_rows(4, vec![BitVec::zero(4)]).unwrap();
        assert_eq!(z.rank(), 0);
        let dup = BitMatrix::from_rows(3, vec![bv("101"), bv("101")]).unwrap();
        assert_eq!(dup.rank(), 1);
    }

    #[test]
    fn span_membership() {
        let m = BitMatrix::from_rows(3, vec![bv("110"), bv("101")]).unwrap();
        assert!(m.span_contains(&bv("011")).unwrap()); // 110 + 101
        assert!(!m.span_contains(&bv("111")).unwrap());
        let empty = BitMatrix::new(4);
        assert!(empty.span_contains(&BitVec::zero(4)).unwrap());
        // oracle: enumerate all 4 combinations of the two rows
        let mut reachable = Vec::new();
        for c in 0..4u64 {
            let mut acc = 0u64;
            if c & 1 != 0 {
                acc ^= bv("110").as_word();
            }
            if c & 2 != 0 {
                acc ^= bv("101").as_word();
            }
            reachable.push(acc);
        }
        for v in 0..8u64 {
            let y = BitVec::from_word(v, 3);
            assert_eq!(m.span_contains(&y).unwrap(), reachable.contains(&v));
        }
    }

    #[test]
    fn nullspace_examples() {
        // oracle: brute force over all 8 vectors of GF(2)^3
        let m = BitMatrix::from_rows(3, vec![bv("110"), bv("101")]).unwrap();
        let s = m.nullspace_nontrivial().unwrap();
        let brute: Vec<u64> = (1..8u64)
            .filter(|&v| {
                m.rows().iter().all(|r| {
                    inner(r, &BitVec::from_word(v, 3)).unwrap() == 0
                })
            })
            .collect();
        assert_eq!(brute, vec![s.as_word()]);
        assert_eq!(s, bv("111"));

        let single = BitMatrix::from_rows(2, vec![bv("10")]).unwrap();
        assert_eq!(single.nullspace_nontrivial().unwrap(), bv("01"));

        // dependent third row does not raise the rank
        let dep = BitMatrix::from_rows(3, vec![bv("110"), bv("101"), bv("011")]).unwrap();
        assert_eq!(dep.rank(), 2);
        assert_eq!(dep.nullspace_nontrivial().unwrap(), bv("111"));

        let low = BitMatrix::from_rows(3, vec![bv("110")]).unwrap();
        assert!(matches!(
            low.nullspace_nontrivial(),
            Err(Error::NullspaceNotUnique { rank: 1, width: 3 })
        ));
    }

    #[test]
    fn nullspace_orthogonal_to_rows() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.gen_range(2..=10);
            let mut m = BitMatrix::new(n);
            while m.rank() < n - 1 {
                m.push_row(BitVec::from_word(rng.gen_range(0..(1u64 << n)), n)).unwrap();
            }
            // drop rows until exactly rank n-1 remains possible; matrix may
            // have extra dependent rows, which is fine
            let s = m.nullspace_nontrivial();
            if let Ok(s) = s {
                assert!(!s.is_zero());
                for r in m.rows() {
                    assert_eq!(inner(r, &s).unwrap(), 0);
                }
            }
        }
    }

    #[test]
    fn display_roundtrip() {
        let v = bv("110010");
        assert_eq!(v.to_string(), "110010");
        assert_eq!(v.get(0), 1);
        assert_eq!(v.get(5), 0);
        assert_eq!(v.as_word(), 50);
    }
}

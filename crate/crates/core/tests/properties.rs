//! Randomized invariants over the GF(2) linear algebra, the hash family,
//! the reversible compiler, and the continued-fraction post-process.

use proptest::prelude::*;

use periodlab_core::evenmansour::{simeck_round, simeck_round_inverse};
use periodlab_core::f2lin::{inner, BitMatrix, BitVec};
use periodlab_core::hashing::LinearHash;
use periodlab_core::shor::cf_denominator;

proptest! {
    #[test]
    fn bitvec_string_roundtrip(value in 0u64..256, len in 8usize..=12) {
        let v = BitVec::from_word(value, len);
        let back: BitVec = v.to_string().parse().unwrap();
        prop_assert_eq!(v, back);
    }

    #[test]
    fn linear_hash_is_homomorphic(
        seeds in prop::collection::vec(0u64..64, 1..=3),
        x in 0u64..64,
        y in 0u64..64,
    ) {
        let n = 6;
        let h = LinearHash::new(
            seeds.into_iter().map(|s| BitVec::from_word(s, n)).collect(),
        ).unwrap();
        let hx = h.apply(&BitVec::from_word(x, n)).unwrap();
        let hy = h.apply(&BitVec::from_word(y, n)).unwrap();
        let hxy = h.apply(&BitVec::from_word(x ^ y, n)).unwrap();
        prop_assert_eq!(hxy, hx.xor(&hy).unwrap());
    }

    #[test]
    fn rank_is_invariant_under_row_xor(rows in prop::collection::vec(0u64..256, 2..8)) {
        let n = 8;
        let m = BitMatrix::from_rows(
            n,
            rows.iter().map(|&r| BitVec::from_word(r, n)).collect(),
        ).unwrap();
        let rank = m.rank();
        // replace row 0 by row 0 xor row last: a row operation
        let mut mixed = rows.clone();
        mixed[0] ^= *rows.last().unwrap();
        let m2 = BitMatrix::from_rows(
            n,
            mixed.iter().map(|&r| BitVec::from_word(r, n)).collect(),
        ).unwrap();
        prop_assert_eq!(rank, m2.rank());
    }

    #[test]
    fn nullspace_vector_is_orthogonal_to_all_rows(
        rows in prop::collection::vec(0u64..256, 1..20),
    ) {
        let n = 8;
        let mut m = BitMatrix::new(n);
        for &r in &rows {
            let v = BitVec::from_word(r, n);
            if !m.span_contains(&v).unwrap() {
                m.push_row(v).unwrap();
            }
        }
        if m.rank() == n - 1 {
            let s = m.nullspace_nontrivial().unwrap();
            prop_assert!(!s.is_zero());
            for row in m.rows() {
                prop_assert_eq!(inner(row, &s).unwrap(), 0);
            }
        }
    }

    #[test]
    fn simeck_round_is_a_bijection(x in 0u64..256, key in 0u64..16) {
        let y = simeck_round(x, 8, key);
        prop_assert_eq!(simeck_round_inverse(y, 8, key), x);
    }

    #[test]
    fn cf_denominator_is_a_lowest_terms_denominator(y in 1u64..4096, bound in 2u64..100) {
        let q = 12;
        if let Some(den) = cf_denominator(y, q, bound) {
            prop_assert!(den <= bound);
            // den is the denominator of y / 2^q in lowest terms
            let g = gcd(y, 1 << q);
            prop_assert_eq!(den, (1u64 << q) / g);
        }
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

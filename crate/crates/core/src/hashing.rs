//! The linear universal hash family h_r(x) = (<x,r_1>, ..., <x,r_t>),
//! with exact enumeration for small parameters and seeded sampling for
//! experiments, plus the fixed-width binary encoding that adapts Z_N
//! domains to it.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::f2lin::{inner, BitVec};
use crate::{Error, Result};

/// Guard on exhaustive family enumeration: 2^(n*t) members.
pub const ENUMERATION_GUARD: usize = 24;

/// Parameters of the family H_t over GF(2)^n. The `identity` flag selects
/// the degenerate one-member "family" {id} with t = n, so that unhashed
/// baselines run through the same code paths as hashed circuits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub n: usize,
    pub t: usize,
    pub identity: bool,
}

impl FamilySpec {
    pub fn hashed(n: usize, t: usize) -> Self {
        assert!(n >= 1 && t >= 1);
        FamilySpec { n, t, identity: false }
    }

    pub fn identity(n: usize) -> Self {
        assert!(n >= 1);
        FamilySpec { n, t: n, identity: true }
    }

    /// Number of members: 2^(n*t), or 1 in identity mode.
    pub fn family_size(&self) -> u128 {
        if self.identity {
            1
        } else {
            1u128 << (self.n * self.t)
        }
    }
}

/// A member of the linear family: t seed vectors of width n.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearHash {
    seeds: Vec<BitVec>,
}

impl LinearHash {
    pub fn new(seeds: Vec<BitVec>) -> Result<Self> {
        if seeds.is_empty() {
            return Err(Error::InvalidArgument("hash needs at least one seed".into()));
        }
        let n = seeds[0].len();
        if seeds.iter().any(|s| s.len() != n) {
            return Err(Error::Dimension("hash seeds of unequal width".into()));
        }
        Ok(LinearHash { seeds })
    }

    pub fn domain_bits(&self) -> usize {
        self.seeds[0].len()
    }

    pub fn range_bits(&self) -> usize {
        self.seeds.len()
    }

    pub fn seeds(&self) -> &[BitVec] {
        &self.seeds
    }

    pub fn apply(&self, x: &BitVec) -> Result<BitVec> {
        if x.len() != self.domain_bits() {
            return Err(Error::Dimension(format!(
                "hash domain is {} bits, input has {}",
                self.domain_bits(),
                x.len()
            )));
        }
        let mut out = BitVec::zero(self.range_bits());
        for (i, r) in self.seeds.iter().enumerate() {
            out.set(i, inner(x, r)?);
        }
        Ok(out)
    }
}

/// How a circuit's raw output value is mapped into the output register:
/// unhashed, through a linear family member, or through an arbitrary
/// fixed table (used when a reference distribution pins down a specific
/// partition).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum OutputMap {
    Identity { bits: usize },
    Linear(LinearHash),
    Explicit { in_bits: usize, out_bits: usize, table: Vec<u64> },
}

impl OutputMap {
    pub fn in_bits(&self) -> usize {
        match self {
            OutputMap::Identity { bits } => *bits,
            OutputMap::Linear(h) => h.domain_bits(),
            OutputMap::Explicit { in_bits, .. } => *in_bits,
        }
    }

    pub fn out_bits(&self) -> usize {
        match self {
            OutputMap::Identity { bits } => *bits,
            OutputMap::Linear(h) => h.range_bits(),
            OutputMap::Explicit { out_bits, .. } => *out_bits,
        }
    }

    /// Applies the map to a value written as an `in_bits`-wide word.
    pub fn apply_word(&self, x: u64) -> u64 {
        match self {
            OutputMap::Identity { .. } => x,
            OutputMap::Linear(h) => {
                let v = BitVec::from_word(x, h.domain_bits());
                h.apply(&v).expect("width checked").as_word()
            }
            OutputMap::Explicit { table, .. } => table[x as usize],
        }
    }

    pub fn apply(&self, x: &BitVec) -> Result<BitVec> {
        if x.len() != self.in_bits() {
            return Err(Error::Dimension(format!(
                "output map domain is {} bits, input has {}",
                self.in_bits(),
                x.len()
            )));
        }
        Ok(BitVec::from_word(self.apply_word(x.as_word()), self.out_bits()))
    }
}

/// Draws a member uniformly; deterministic given the rng state.
pub fn sample<R: Rng>(spec: &FamilySpec, rng: &mut R) -> OutputMap {
    if spec.identity {
        return OutputMap::Identity { bits: spec.n };
    }
    let seeds = (0..spec.t)
        .map(|_| {
            let mask = if spec.n == 64 { u64::MAX } else { (1u64 << spec.n) - 1 };
            BitVec::from_word(rng.gen::<u64>() & mask, spec.n)
        })
        .collect();
    OutputMap::Linear(LinearHash::new(seeds).expect("t >= 1"))
}

/// Yields every member of the family exactly once. In identity mode the
/// single identity map is yielded.
pub fn enumerate_family(spec: &FamilySpec) -> Result<impl Iterator<Item = OutputMap>> {
    let spec = *spec;
    if !spec.identity && spec.n * spec.t > ENUMERATION_GUARD {
        return Err(Error::EnumerationGuard {
            actual: spec.n * spec.t,
            guard: ENUMERATION_GUARD,
        });
    }
    let count: u64 = if spec.identity { 1 } else { 1u64 << (spec.n * spec.t) };
    Ok((0..count).map(move |index| {
        if spec.identity {
            OutputMap::Identity { bits: spec.n }
        } else {
            // chunk i of n bits, from the high end, is seed r_{i+1}
            let seeds = (0..spec.t)
                .map(|i| {
                    let shift = (spec.t - 1 - i) * spec.n;
                    let mask = (1u64 << spec.n) - 1;
                    BitVec::from_word((index >> shift) & mask, spec.n)
                })
                .collect();
            OutputMap::Linear(LinearHash::new(seeds).expect("t >= 1"))
        }
    }))
}

/// Bits needed for the big-endian binary encoding of residues mod N.
pub fn zn_bits(modulus: u64) -> usize {
    assert!(modulus >= 2);
    (64 - (modulus - 1).leading_zeros() as usize).max(1)
}

/// Big-endian binary encoding of a residue mod N; injective.
pub fn encode_zn(v: u64, modulus: u64) -> Result<BitVec> {
    if v >= modulus {
        return Err(Error::OutOfRange { value: v, modulus });
    }
    Ok(BitVec::from_word(v, zn_bits(modulus)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn apply_examples() {
        let h = LinearHash::new(vec!["110".parse().unwrap()]).unwrap();
        assert_eq!(h.apply(&"101".parse().unwrap()).unwrap().as_word(), 1);
        assert_eq!(h.apply(&BitVec::zero(3)).unwrap().as_word(), 0);

        let h2 =
            LinearHash::new(vec!["110".parse().unwrap(), "011".parse().unwrap()]).unwrap();
        assert_eq!(h2.apply(&"101".parse().unwrap()).unwrap().to_string(), "11");
        assert!(h2.apply(&"1010".parse().unwrap()).is_err());
    }

    #[test]
    fn sampling_is_deterministic() {
        let spec = FamilySpec::hashed(3, 1);
        let a = sample(&spec, &mut ChaCha8Rng::seed_from_u64(0));
        let b = sample(&spec, &mut ChaCha8Rng::seed_from_u64(0));
        match (&a, &b) {
            (OutputMap::Linear(x), OutputMap::Linear(y)) => assert_eq!(x, y),
            _ => panic!("expected linear maps"),
        }
        assert_eq!(a.apply_word(0), 0);
    }

    #[test]
    fn empirical_collision_rate() {
        // Def.-1 check: P[h(x) = h(y)] = 1/2 for t = 1 over random draws
        let spec = FamilySpec::hashed(4, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let x: BitVec = "1010".parse().unwrap();
        let y: BitVec = "0111".parse().unwrap();
        let mut collisions = 0u32;
        let trials = 10_000;
        for _ in 0..trials {
            let h = sample(&spec, &mut rng);
            if h.apply(&x).unwrap() == h.apply(&y).unwrap() {
                collisions += 1;
            }
        }
        let rate = f64::from(collisions) / f64::from(trials);
        assert!((0.47..=0.53).contains(&rate), "collision rate {rate}");
    }

    #[test]
    fn enumeration_counts_and_exact_universality() {
        let spec = FamilySpec::hashed(2, 1);
        assert_eq!(enumerate_family(&spec).unwrap().count(), 4);

        // n=4, t=1: for a fixed pair x != y, exactly 8 of 16 members collide
        let spec = FamilySpec::hashed(4, 1);
        let x: BitVec = "1010".parse().unwrap();
        let y: BitVec = "0111".parse().unwrap();
        let collide = enumerate_family(&spec)
            .unwrap()
            .filter(|h| h.apply(&x).unwrap() == h.apply(&y).unwrap())
            .count();
        assert_eq!(collide, 8);

        // n=2, t=2: 16 members, exactly 4 collide on any fixed pair
        let spec = FamilySpec::hashed(2, 2);
        let members: Vec<_> = enumerate_family(&spec).unwrap().collect();
        assert_eq!(members.len(), 16);
        for a in 0..4u64 {
            for b in 0..4u64 {
                if a == b {
                    continue;
                }
                let x = BitVec::from_word(a, 2);
                let y = BitVec::from_word(b, 2);
                let collide = members
                    .iter()
                    .filter(|h| h.apply(&x).unwrap() == h.apply(&y).unwrap())
                    .count();
                assert_eq!(collide, 4);
            }
        }
    }

    #[test]
    fn exact_universality_across_small_specs() {
        // count of colliding members equals 2^(nt - t) for every pair
        for (n, t) in [(2usize, 1usize), (3, 1), (4, 2), (3, 3), (2, 2)] {
            if n * t > 12 {
                continue;
            }
            let spec = FamilySpec::hashed(n, t);
            let members: Vec<_> = enumerate_family(&spec).unwrap().collect();
            let expect = 1usize << (n * t - t);
            for a in 0..(1u64 << n) {
                for b in (a + 1)..(1u64 << n) {
                    let x = BitVec::from_word(a, n);
                    let y = BitVec::from_word(b, n);
                    let collide = members
                        .iter()
                        .filter(|h| h.apply(&x).unwrap() == h.apply(&y).unwrap())
                        .count();
                    assert_eq!(collide, expect, "n={n} t={t} pair ({a},{b})");
                }
            }
        }
    }

    #[test]
    fn enumeration_guard() {
        let spec = FamilySpec::hashed(13, 2);
        assert!(enumerate_family(&spec).is_err());
    }

    #[test]
    fn zn_encoding() {
        assert_eq!(encode_zn(0, 51).unwrap().to_string(), "000000");
        assert_eq!(encode_zn(50, 51).unwrap().to_string(), "110010");
        assert!(encode_zn(51, 51).is_err());
        assert_eq!(zn_bits(2), 1);
        assert_eq!(zn_bits(16), 4);
        assert_eq!(zn_bits(17), 5);
    }

    #[test]
    fn homomorphism_on_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let spec = FamilySpec::hashed(8, 3);
        for _ in 0..500 {
            let h = sample(&spec, &mut rng);
            let x = BitVec::from_word(rng.gen_range(0..256), 8);
            let y = BitVec::from_word(rng.gen_range(0..256), 8);
            let lhs = h.apply(&x.xor(&y).unwrap()).unwrap();
            let rhs = h.apply(&x).unwrap().xor(&h.apply(&y).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }
}

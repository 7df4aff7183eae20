//! Simon functions with a planted period, the hashed period-recovery loop
//! (fresh hash per query, span-filtered collection, nullspace extraction),
//! and query-count statistics.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::f2lin::{BitMatrix, BitVec};
use crate::hashing::{self, FamilySpec, OutputMap};
use crate::qsim::{RegisterLayout, StateVector};
use crate::report::{trial_seed, ExperimentReport};
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct SimonInstance {
    pub n: usize,
    pub s: BitVec,
    /// f[x] for every x in 0..2^n, as n-bit words.
    pub f: Vec<u64>,
}

impl SimonInstance {
    /// Exhaustive check of the perfect 2:1 structure with period s.
    pub fn verify_2to1(&self) -> bool {
        let s = self.s.as_word();
        let size = 1usize << self.n;
        (0..size).all(|x| {
            let fx = self.f[x];
            self.f[x ^ s as usize] == fx
                && (0..size).all(|y| self.f[y] != fx || y == x || y as u64 == x as u64 ^ s)
        })
    }

    /// True iff the candidate is the period: f(x) = f(x ^ cand) everywhere.
    pub fn is_period(&self, cand: &BitVec) -> bool {
        let c = cand.as_word() as usize;
        c != 0 && (0..1usize << self.n).all(|x| self.f[x] == self.f[x ^ c])
    }
}

/// Pairs every coset {x, x ^ s} with a distinct random n-bit value.
pub fn random_simon<R: Rng>(n: usize, s: &BitVec, rng: &mut R) -> Result<SimonInstance> {
    if s.len() != n {
        return Err(Error::Dimension("period width must equal n".into()));
    }
    if s.is_zero() {
        return Err(Error::InvalidArgument("period must be nonzero".into()));
    }
    let size = 1usize << n;
    let mut values: Vec<u64> = (0..size as u64).collect();
    values.shuffle(rng);
    let sw = s.as_word() as usize;
    let mut f = vec![u64::MAX; size];
    let mut next = 0usize;
    for x in 0..size {
        if f[x] == u64::MAX {
            f[x] = values[next];
            f[x ^ sw] = values[next];
            next += 1;
        }
    }
    Ok(SimonInstance { n, s: s.clone(), f })
}

/// One execution of the period-finding circuit under the given output map:
/// H-layer, XOR oracle for map(f(x)), H-layer, input measurement.
pub fn simon_sample<R: Rng>(
    inst: &SimonInstance,
    map: &OutputMap,
    rng: &mut R,
) -> Result<BitVec> {
    let layout = RegisterLayout::new(inst.n, map.out_bits())?;
    let mut state = StateVector::zero(layout);
    let wires: Vec<usize> = (0..inst.n).collect();
    let table: Vec<u64> = inst.f.iter().map(|&v| map.apply_word(v)).collect();
    state.hadamard_layer(&wires)?;
    state.oracle_xor(&table)?;
    state.hadamard_layer(&wires)?;
    state.measure_input(rng)
}

fn query_factor(spec: &FamilySpec) -> f64 {
    if spec.identity {
        1.0
    } else {
        1.0 - 0.5f64.powi(spec.t as i32)
    }
}

/// Recovers the period: repeats the circuit with a freshly drawn hash per
/// query, keeps outcomes outside the current span until n-1 independent
/// vectors are collected, then solves for the nullspace.
pub fn hashed_simon<R: Rng>(
    inst: &SimonInstance,
    spec: &FamilySpec,
    rng: &mut R,
) -> Result<(BitVec, u64)> {
    if spec.n != inst.n {
        return Err(Error::Dimension("family domain must equal n".into()));
    }
    let cap = (64.0 * (inst.n as f64 + 1.0) / query_factor(spec)).ceil() as u64;
    let mut collected = BitMatrix::new(inst.n);
    let mut queries = 0u64;
    while collected.rank() < inst.n - 1 {
        if queries >= cap {
            return Err(Error::IterationCap(cap));
        }
        let map = hashing::sample(spec, rng);
        let y = simon_sample(inst, &map, rng)?;
        queries += 1;
        if !collected.span_contains(&y)? {
            collected.push_row(y)?;
        }
    }
    let s = collected.nullspace_nontrivial()?;
    debug_assert!(inst.is_period(&s));
    Ok((s, queries))
}

/// Mean query count over independent trials with fresh random instances,
/// against the reference value (n+1)/(1-2^-t).
pub fn query_statistics(
    n: usize,
    spec: &FamilySpec,
    trials: u64,
    seed: u64,
) -> Result<ExperimentReport> {
    let mut counts = Vec::with_capacity(trials as usize);
    let mut successes = 0u64;
    for i in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(seed, i));
        let s = loop {
            let w = rng.gen_range(1..1u64 << n);
            break BitVec::from_word(w, n);
        };
        let inst = random_simon(n, &s, &mut rng)?;
        let (found, queries) = hashed_simon(&inst, spec, &mut rng)?;
        counts.push(queries);
        if found == s {
            successes += 1;
        }
    }
    let check = (n as f64 + 1.0) / query_factor(spec);
    Ok(ExperimentReport::from_counts(&counts, successes, check, seed))
}

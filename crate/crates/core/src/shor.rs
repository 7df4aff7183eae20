//! Order finding over Z_N*: the hashed order-finding circuit, continued
//! fraction post-processing with lcm combination, and expected-query
//! statistics for power-of-two periods.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::closedform::ShorAmplitudes;
use crate::group::{gcd, modpow};
use crate::hashing::{self, FamilySpec, OutputMap};
use crate::qsim::{RegisterLayout, StateVector};
use crate::report::{trial_seed, ExperimentReport};
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct OrderInstance {
    pub modulus: u64,
    pub a: u64,
    /// Multiplicative order of a, computed at construction.
    pub d: u64,
    pub q: usize,
}

impl OrderInstance {
    pub fn new(modulus: u64, a: u64, q: usize) -> Result<Self> {
        if modulus < 3 {
            return Err(Error::InvalidArgument("modulus must be at least 3".into()));
        }
        let d = order_bruteforce(modulus, a)?;
        Ok(OrderInstance { modulus, a, d, q })
    }

    /// a^k mod N for k in 0..d.
    pub fn powers(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.d as usize);
        let mut acc = 1u64;
        for _ in 0..self.d {
            out.push(acc);
            acc = acc * self.a % self.modulus;
        }
        out
    }

    /// Oracle table x -> map(encode(a^x mod N)) over the full input range.
    pub fn oracle_table(&self, map: &OutputMap) -> Vec<u64> {
        assert_eq!(map.in_bits(), hashing::zn_bits(self.modulus));
        let mut out = Vec::with_capacity(1 << self.q);
        let mut acc = 1u64;
        for _ in 0..1u64 << self.q {
            out.push(map.apply_word(acc));
            acc = acc * self.a % self.modulus;
        }
        out
    }

    /// m = 2^q / d when the period divides the register size.
    pub fn multiple_stride(&self) -> Option<u64> {
        let size = 1u64 << self.q;
        (size % self.d == 0).then(|| size / self.d)
    }
}

/// Smallest positive d with a^d = 1 mod N.
pub fn order_bruteforce(modulus: u64, a: u64) -> Result<u64> {
    if gcd(a % modulus, modulus) != 1 {
        return Err(Error::InvalidArgument(format!("{a} is not a unit mod {modulus}")));
    }
    let mut acc = a % modulus;
    let mut d = 1u64;
    while acc != 1 {
        acc = acc * (a % modulus) % modulus;
        d += 1;
    }
    Ok(d)
}

/// Denominator of y/2^q in lowest terms via the Euclidean continued
/// fraction expansion, if it is at most the bound.
pub fn cf_denominator(y: u64, q: usize, bound: u64) -> Option<u64> {
    if y == 0 {
        return None;
    }
    let (mut num, mut den) = (y, 1u64 << q);
    // convergent denominators k_i from the partial quotients
    let (mut k_prev, mut k) = (0u64, 1u64);
    while num != 0 {
        let quot = den / num;
        (den, num) = (num, den % num);
        let k_next = quot.checked_mul(k).and_then(|v| v.checked_add(k_prev))?;
        (k_prev, k) = (k, k_next);
        if num == 0 {
            return (k <= bound).then_some(k);
        }
    }
    None
}

/// Hash realizing the reference partition of the a = 2, N = 51 residues:
/// the residues 2^k with k in {2,3,4,7} map to 0, the rest to 1.
pub fn figure_map() -> OutputMap {
    let mut table = vec![0u64; 64];
    for v in [1u64, 2, 32, 13] {
        table[v as usize] = 1;
    }
    OutputMap::Explicit { in_bits: 6, out_bits: 1, table }
}

/// One circuit execution: H-layer, oracle, QFT, input measurement.
pub fn shor_sample<R: Rng>(
    inst: &OrderInstance,
    map: &OutputMap,
    rng: &mut R,
) -> Result<u64> {
    let layout = RegisterLayout::new(inst.q, map.out_bits())?;
    let mut state = StateVector::zero(layout);
    let wires: Vec<usize> = (0..inst.q).collect();
    state.hadamard_layer(&wires)?;
    state.oracle_xor(&inst.oracle_table(map))?;
    state.qft_block(0, inst.q)?;
    Ok(state.measure_input(rng)?.as_word())
}

/// Recovers the order: fresh hash per execution, continued-fraction
/// denominators combined by lcm, stopping as soon as the lcm L satisfies
/// a^L = 1 mod N (then L equals the order).
pub fn hashed_shor<R: Rng>(
    inst: &OrderInstance,
    spec: &FamilySpec,
    rng: &mut R,
) -> Result<(u64, u64)> {
    let cap = 200u64;
    let mut l = 1u64;
    let mut measurements = 0u64;
    while measurements < cap {
        let map = hashing::sample(spec, rng);
        let y = shor_sample(inst, &map, rng)?;
        measurements += 1;
        if let Some(den) = cf_denominator(y, inst.q, inst.modulus) {
            l = l / gcd(l, den) * den;
            if modpow(inst.a, l, inst.modulus) == 1 {
                return Ok((l, measurements));
            }
        }
    }
    Err(Error::IterationCap(cap))
}

/// Mean number of circuit applications until an odd-multiple outcome
/// y = l * 2^q/d (l odd), for power-of-two periods; sampled from the exact
/// closed-form outcome distribution with a fresh hash per application.
pub fn pow2_expected_queries(
    inst: &OrderInstance,
    spec: &FamilySpec,
    trials: u64,
    seed: u64,
) -> Result<ExperimentReport> {
    if !inst.d.is_power_of_two() || inst.multiple_stride().is_none() {
        return Err(Error::InvalidArgument(format!(
            "period {} is not a power of two dividing 2^{}",
            inst.d, inst.q
        )));
    }
    let amps = ShorAmplitudes::new(inst);
    let id_dist = amps.multiple_distribution(&OutputMap::Identity {
        bits: hashing::zn_bits(inst.modulus),
    })?;
    let factor = if spec.identity {
        1.0
    } else {
        1.0 - 0.5f64.powi(spec.t as i32)
    };
    let mut counts = Vec::with_capacity(trials as usize);
    for i in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(seed, i));
        let mut applications = 0u64;
        loop {
            applications += 1;
            let dist = if spec.identity {
                id_dist.clone()
            } else {
                amps.multiple_distribution(&hashing::sample(spec, &mut rng))?
            };
            let l = sample_index(&dist, &mut rng);
            if l % 2 == 1 {
                break;
            }
            if applications > 10_000 {
                return Err(Error::IterationCap(10_000));
            }
        }
        counts.push(applications);
    }
    Ok(ExperimentReport::from_counts(&counts, trials, 2.0 / factor, seed))
}

pub(crate) fn sample_index<R: Rng>(probs: &[f64], rng: &mut R) -> usize {
    let total: f64 = probs.iter().sum();
    let mut u = rng.gen::<f64>() * total;
    for (i, &p) in probs.iter().enumerate() {
        if u < p {
            return i;
        }
        u -= p;
    }
    probs.len() - 1
}

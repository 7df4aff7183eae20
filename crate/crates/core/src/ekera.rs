//! Short discrete logarithms from the two-register state over exponents
//! (a, b): f(a, b) = g^a x^{-b}, exact outcome distributions, and
//! desk-scale recovery of d by exhaustive candidate scoring in place of
//! the lattice post-process.

use rand::Rng;
use serde::Serialize;
use std::f64::consts::TAU;

use crate::closedform;
use crate::group::{modinv, modpow};
use crate::hashing::{self, FamilySpec, OutputMap};
use crate::shor::sample_index;
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct EHInstance {
    pub modulus: u64,
    pub g: u64,
    /// x = g^d.
    pub x: u64,
    /// The planted logarithm, when known.
    pub d: Option<u64>,
    /// Bit length bound on d; the a register has m + ell bits.
    pub m: usize,
    /// Tradeoff parameter; ell = ceil(m / s).
    pub s: usize,
    pub ell: usize,
    x_inv: u64,
}

impl EHInstance {
    pub fn with_planted(modulus: u64, g: u64, d: u64, m: usize, s: usize) -> Result<Self> {
        let x = modpow(g, d, modulus);
        let mut inst = Self::without_planted(modulus, g, x, m, s)?;
        if d >= 1u64 << m {
            return Err(Error::InvalidArgument(format!("d = {d} exceeds 2^{m}")));
        }
        inst.d = Some(d);
        Ok(inst)
    }

    pub fn without_planted(modulus: u64, g: u64, x: u64, m: usize, s: usize) -> Result<Self> {
        if m < 1 || s < 1 {
            return Err(Error::InvalidArgument("m and s must be positive".into()));
        }
        let x_inv = modinv(x, modulus)?;
        let ell = m.div_ceil(s);
        Ok(EHInstance { modulus, g, x, d: None, m, s, ell, x_inv })
    }

    /// f(a, b) = g^a x^{-b} mod modulus.
    pub fn eh_function(&self, a: u64, b: u64) -> u64 {
        modpow(self.g, a, self.modulus) * modpow(self.x_inv, b, self.modulus)
            % self.modulus
    }

    /// Splits a row index of the closed-form table into the (j, k) pair.
    pub fn split_row(&self, row: usize) -> (u64, u64) {
        ((row >> self.ell) as u64, (row & ((1 << self.ell) - 1)) as u64)
    }
}

/// Exact joint outcome distribution over (j, k), indexed j * 2^ell + k.
pub fn eh_distribution(inst: &EHInstance, map: &OutputMap) -> Vec<f64> {
    closedform::ekera_table(inst, map).distribution()
}

/// Draws outcome pairs, each from the exact distribution of a run with a
/// freshly sampled hash.
pub fn sample_outcomes<R: Rng>(
    inst: &EHInstance,
    spec: &FamilySpec,
    count: usize,
    rng: &mut R,
) -> Vec<(u64, u64)> {
    let id_dist = if spec.identity {
        Some(eh_distribution(inst, &OutputMap::Identity { bits: spec.n }))
    } else {
        None
    };
    (0..count)
        .map(|_| {
            let row = match &id_dist {
                Some(dist) => sample_index(dist, rng),
                None => {
                    let map = hashing::sample(spec, rng);
                    sample_index(&eh_distribution(inst, &map), rng)
                }
            };
            inst.split_row(row)
        })
        .collect()
}

/// Scores every candidate d' in [1, 2^m) by how close d'·j + 2^m·k comes
/// to 0 mod 2^{m+ell} across the samples, then returns the best-scoring
/// candidate that verifies g^{d'} = x.
pub fn recover_d_scoring(inst: &EHInstance, samples: &[(u64, u64)]) -> Result<u64> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("no samples".into()));
    }
    let period = 1u64 << (inst.m + inst.ell);
    let mut scored: Vec<(f64, u64)> = (1..1u64 << inst.m)
        .map(|cand| {
            let score: f64 = samples
                .iter()
                .map(|&(j, k)| {
                    let phase = (cand * j + (k << inst.m)) % period;
                    (TAU * phase as f64 / period as f64).cos()
                })
                .sum();
            (score, cand)
        })
        .collect();
    scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    scored
        .iter()
        .map(|&(_, cand)| cand)
        .find(|&cand| modpow(inst.g, cand, inst.modulus) == inst.x)
        .ok_or_else(|| Error::AttackFailed("no candidate verifies".into()))
}

/// End-to-end recovery: hashed sampling (t = 1, fresh hash per run)
/// followed by scoring.
pub fn recover_d_quantum<R: Rng>(
    inst: &EHInstance,
    samples: usize,
    rng: &mut R,
) -> Result<u64> {
    let spec = FamilySpec::hashed(hashing::zn_bits(inst.modulus), 1);
    let outcomes = sample_outcomes(inst, &spec, samples, rng);
    recover_d_scoring(inst, &outcomes)
}

#[derive(Clone, Debug, Serialize)]
pub struct QubitLedger {
    pub input_bits: usize,
    pub hashed_output_bits: usize,
    pub plain_output_bits: usize,
    pub hashed_total: usize,
    pub plain_total: usize,
}

/// Register accounting: m + 2*ell input bits plus either t hashed output
/// bits or a full group-element register.
pub fn qubit_ledger(inst: &EHInstance, t: usize) -> QubitLedger {
    let input_bits = inst.m + 2 * inst.ell;
    let plain = hashing::zn_bits(inst.modulus);
    QubitLedger {
        input_bits,
        hashed_output_bits: t,
        plain_output_bits: plain,
        hashed_total: input_bits + t,
        plain_total: input_bits + plain,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn function_examples() {
        let inst = EHInstance::with_planted(23, 5, 3, 2, 1).unwrap();
        assert_eq!(inst.eh_function(0, 0), 1);
        assert_eq!(inst.eh_function(3, 1), 1);
        assert_eq!(inst.eh_function(4, 1), 5);
        assert_eq!(inst.x, modpow(5, 3, 23));
    }

    #[test]
    fn distribution_mass_and_conditional_match() {
        let inst = EHInstance::with_planted(23, 5, 3, 2, 1).unwrap();
        let id = OutputMap::Identity { bits: hashing::zn_bits(23) };
        let plain = eh_distribution(&inst, &id);
        assert!((plain.iter().sum::<f64>() - 1.0).abs() < 1e-9);

        // hashed and plain agree after conditioning on (j,k) != (0,0):
        // average over the full t=1 family
        let spec = FamilySpec::hashed(hashing::zn_bits(23), 1);
        let mut avg = vec![0.0; plain.len()];
        let mut count = 0u64;
        for map in hashing::enumerate_family(&spec).unwrap() {
            for (i, p) in eh_distribution(&inst, &map).iter().enumerate() {
                avg[i] += p;
            }
            count += 1;
        }
        avg.iter_mut().for_each(|p| *p /= count as f64);
        let plain_rest: f64 = plain[1..].iter().sum();
        let avg_rest: f64 = avg[1..].iter().sum();
        for i in 1..plain.len() {
            assert!((avg[i] / avg_rest - plain[i] / plain_rest).abs() < 1e-9);
        }
    }

    #[test]
    fn recovery_small_prime() {
        let mut rng = ChaCha8Rng::seed_from_u64(60);
        let inst = EHInstance::with_planted(23, 5, 3, 2, 1).unwrap();
        let spec = FamilySpec::hashed(hashing::zn_bits(23), 1);
        let samples = sample_outcomes(&inst, &spec, 30, &mut rng);
        assert_eq!(recover_d_scoring(&inst, &samples).unwrap(), 3);
        assert!(recover_d_scoring(&inst, &[]).is_err());
    }

    #[test]
    fn recovery_larger_prime() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        // 5 generates GF(103)*: 102 = 2 * 3 * 17
        assert_ne!(modpow(5, 51, 103), 1);
        assert_ne!(modpow(5, 34, 103), 1);
        assert_ne!(modpow(5, 6, 103), 1);
        let inst = EHInstance::with_planted(103, 5, 6, 3, 1).unwrap();
        assert_eq!(recover_d_quantum(&inst, 30, &mut rng).unwrap(), 6);
    }

    #[test]
    fn id_mode_recovery() {
        let mut rng = ChaCha8Rng::seed_from_u64(62);
        let inst = EHInstance::with_planted(23, 5, 3, 2, 1).unwrap();
        let spec = FamilySpec::identity(hashing::zn_bits(23));
        let samples = sample_outcomes(&inst, &spec, 30, &mut rng);
        assert_eq!(recover_d_scoring(&inst, &samples).unwrap(), 3);
    }

    #[test]
    fn ledger_arithmetic() {
        let inst = EHInstance::with_planted(23, 5, 3, 2, 1).unwrap();
        let ledger = qubit_ledger(&inst, 1);
        assert_eq!(ledger.input_bits, 2 + 2 * 2);
        assert_eq!(ledger.hashed_total, 6 + 1);
        assert_eq!(ledger.plain_total, 6 + 5);
    }
}

//! SiMeck-style Feistel permutation, the Even-Mansour cipher built on it,
//! in-place reversible compilation, and the (n+1)-qubit hashed key-recovery
//! attack.

use rand::Rng;

use crate::f2lin::{BitMatrix, BitVec};
use crate::qsim::{Gate, GateList, RegisterLayout, StateVector};
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct EMInstance {
    pub n: usize,
    pub rounds: usize,
    /// Round key, reused every round.
    pub kprime: BitVec,
    /// Secret whitening key.
    pub k: BitVec,
}

impl EMInstance {
    pub fn new(n: usize, rounds: usize, kprime: BitVec, k: BitVec) -> Result<Self> {
        if n % 2 != 0 || n / 2 < 2 || n > 16 {
            return Err(Error::InvalidArgument(format!("unsupported block size {n}")));
        }
        if rounds == 0 {
            return Err(Error::InvalidArgument("at least one round".into()));
        }
        if kprime.len() != n / 2 || k.len() != n {
            return Err(Error::Dimension("key widths must be n/2 and n".into()));
        }
        Ok(EMInstance { n, rounds, kprime, k })
    }

    pub fn simeck_forward(&self, x: u64) -> u64 {
        let mut w = x;
        for _ in 0..self.rounds {
            w = simeck_round(w, self.n, self.kprime.as_word());
        }
        w
    }

    pub fn simeck_inverse(&self, y: u64) -> u64 {
        let mut w = y;
        for _ in 0..self.rounds {
            w = simeck_round_inverse(w, self.n, self.kprime.as_word());
        }
        w
    }

    /// EM_k(x) = P(x ^ k) ^ k.
    pub fn em_encrypt(&self, x: u64) -> u64 {
        self.simeck_forward(x ^ self.k.as_word()) ^ self.k.as_word()
    }
}

fn bit(word: u64, width: usize, i: usize) -> u64 {
    word >> (width - 1 - i) & 1
}

/// One Feistel round: for i < n/2 the output bit i is
/// x_i x_{i+5} ^ x_{i+1} ^ k'_i ^ x_{i+n/2} (round-function indices mod
/// n/2); for i >= n/2 it is x_{i-n/2}.
pub fn simeck_round(x: u64, n: usize, kprime: u64) -> u64 {
    let h = n / 2;
    let mut out = 0u64;
    for i in 0..h {
        let f = bit(x, n, i) & bit(x, n, (i + 5) % h)
            ^ bit(x, n, (i + 1) % h)
            ^ bit(kprime, h, i);
        let left = f ^ bit(x, n, i + h);
        out |= left << (n - 1 - i);
        out |= bit(x, n, i) << (n - 1 - (i + h));
    }
    out
}

pub fn simeck_round_inverse(y: u64, n: usize, kprime: u64) -> u64 {
    let h = n / 2;
    // left half of the preimage is the output's right half
    let mut x = 0u64;
    for i in 0..h {
        x |= bit(y, n, i + h) << (n - 1 - i);
    }
    for i in 0..h {
        let f = bit(x, n, i) & bit(x, n, (i + 5) % h)
            ^ bit(x, n, (i + 1) % h)
            ^ bit(kprime, h, i);
        x |= (f ^ bit(y, n, i)) << (n - 1 - (i + h));
    }
    x
}

/// In-place reversible realization: per round and position, a Toffoli for
/// the AND, a CNOT for the linear tap, a NOT when the round-key bit is
/// set, with the Feistel swap tracked as a wire relabeling.
pub fn compile_simeck(inst: &EMInstance) -> Result<GateList> {
    let n = inst.n;
    let h = n / 2;
    let mut gl = GateList::new(n);
    let mut cur: Vec<usize> = (0..n).collect();
    for _ in 0..inst.rounds {
        for i in 0..h {
            gl.push(Gate::Toffoli {
                c1: cur[i],
                c2: cur[(i + 5) % h],
                target: cur[i + h],
            })?;
            gl.push(Gate::Cnot { control: cur[(i + 1) % h], target: cur[i + h] })?;
            if inst.kprime.get(i) == 1 {
                gl.push(Gate::Not(cur[i + h]))?;
            }
        }
        let old = cur.clone();
        for i in 0..h {
            cur[i] = old[i + h];
            cur[i + h] = old[i];
        }
    }
    gl.output_permutation = cur;
    Ok(gl)
}

/// NOT-layer for k, the permutation gates, NOT-layer for k again.
pub fn compile_em(inst: &EMInstance) -> Result<GateList> {
    let mut gl = GateList::new(inst.n);
    for i in 0..inst.n {
        if inst.k.get(i) == 1 {
            gl.push(Gate::Not(i))?;
        }
    }
    let inner = compile_simeck(inst)?;
    for gate in &inner.gates {
        gl.push(*gate)?;
    }
    // the final whitening acts on logical bit i, which now lives on wire
    // inner.output_permutation[i]
    for i in 0..inst.n {
        if inst.k.get(i) == 1 {
            gl.push(Gate::Not(inner.output_permutation[i]))?;
        }
    }
    gl.output_permutation = inner.output_permutation;
    Ok(gl)
}

fn verify_candidate(inst: &EMInstance, cand: &BitVec) -> bool {
    let c = cand.as_word();
    (0..1u64 << inst.n).all(|x| inst.em_encrypt(x) == inst.simeck_forward(x ^ c) ^ c)
}

/// Key recovery on n+1 wires: Hadamards, in-place P, a parity tap of the
/// hash seed into the single output qubit, P undone, the same around the
/// cipher, Hadamards, measurement. Outcomes are collected until the
/// nullspace yields a candidate that classical encryption queries confirm.
pub fn em_attack<R: Rng>(inst: &EMInstance, rng: &mut R) -> Result<BitVec> {
    let n = inst.n;
    // the zero key makes P ^ EM_k vanish identically; test it classically
    let zero = BitVec::zero(n);
    if verify_candidate(inst, &zero) {
        return Ok(zero);
    }
    let p = compile_simeck(inst)?;
    let p_inv = p.inverted();
    let em = compile_em(inst)?;
    let em_inv = em.inverted();
    let layout = RegisterLayout::new(n, 1)?;
    let wires: Vec<usize> = (0..n).collect();

    let cap = 200 * (n as u64 + 1);
    let mut collected = BitMatrix::new(n);
    let mut iterations = 0u64;
    loop {
        if iterations >= cap {
            // a stalled rank usually means extra collisions in P ^ EM_k;
            // fall back to checking the few remaining orthogonal candidates
            if n - collected.rank() <= 3 {
                for w in 1..1u64 << n {
                    let cand = BitVec::from_word(w, n);
                    let orth = collected
                        .rows()
                        .iter()
                        .all(|r| crate::f2lin::inner(r, &cand).unwrap() == 0);
                    if orth && verify_candidate(inst, &cand) {
                        return Ok(cand);
                    }
                }
            }
            return Err(Error::AttackFailed("iteration cap exceeded".into()));
        }
        iterations += 1;

        let r = BitVec::from_word(rng.gen_range(0..1u64 << n), n);
        let mut taps = GateList::new(n + 1);
        for i in 0..n {
            if r.get(i) == 1 {
                taps.push(Gate::Cnot { control: i, target: n })?;
            }
        }
        let mut state = StateVector::zero(layout);
        state.hadamard_layer(&wires)?;
        state.run_gatelist(&p, 0)?;
        state.run_gatelist(&taps, 0)?;
        state.run_gatelist(&p_inv, 0)?;
        state.run_gatelist(&em, 0)?;
        state.run_gatelist(&taps, 0)?;
        state.run_gatelist(&em_inv, 0)?;
        state.hadamard_layer(&wires)?;
        let y = state.measure_input(rng)?;

        if !collected.span_contains(&y)? {
            collected.push_row(y)?;
        }
        if collected.rank() == n - 1 {
            let cand = collected.nullspace_nontrivial()?;
            if verify_candidate(inst, &cand) {
                return Ok(cand);
            }
            collected = BitMatrix::new(n);
        }
    }
}

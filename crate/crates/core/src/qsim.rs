//! Dense statevector simulator over an (input ⊗ output) register pair:
//! Hadamard layers, an exact QFT on contiguous wire blocks, XOR- and
//! group-type oracles, reversible gate lists, and seeded projective
//! measurement.

use num_complex::Complex64;
use rand::Rng;
use rustfft::FftDirection;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

use crate::f2lin::BitVec;
use crate::group::GroupSpec;
use crate::{Error, Result, EXACT_TOL, QUBIT_CAP};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RegisterLayout {
    pub input_bits: usize,
    pub output_bits: usize,
}

impl RegisterLayout {
    pub fn new(input_bits: usize, output_bits: usize) -> Result<Self> {
        let total = input_bits + output_bits;
        if total > QUBIT_CAP {
            return Err(Error::RegisterGuard(total));
        }
        Ok(RegisterLayout { input_bits, output_bits })
    }

    pub fn total_bits(&self) -> usize {
        self.input_bits + self.output_bits
    }
}

/// Wire 0 is the most significant bit of the input register; the output
/// register wires follow. Basis index of (x, z) is (x << output_bits) | z.
#[derive(Clone, Debug)]
pub struct StateVector {
    pub layout: RegisterLayout,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// |0...0⟩ ⊗ |0...0⟩.
    pub fn zero(layout: RegisterLayout) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << layout.total_bits()];
        amps[0] = Complex64::new(1.0, 0.0);
        StateVector { layout, amps }
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn bit_pos(&self, wire: usize) -> Result<usize> {
        let total = self.layout.total_bits();
        if wire >= total {
            return Err(Error::WireOutOfRange { wire, width: total });
        }
        Ok(total - 1 - wire)
    }

    pub fn hadamard_layer(&mut self, wires: &[usize]) -> Result<()> {
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        for &wire in wires {
            let mask = 1usize << self.bit_pos(wire)?;
            for idx in 0..self.amps.len() {
                if idx & mask == 0 {
                    let a = self.amps[idx];
                    let b = self.amps[idx | mask];
                    self.amps[idx] = (a + b) * inv_sqrt2;
                    self.amps[idx | mask] = (a - b) * inv_sqrt2;
                }
            }
        }
        Ok(())
    }

    /// Exact QFT |x⟩ ↦ 2^{-len/2} Σ_y e^{2πi x y / 2^len} |y⟩ on a
    /// contiguous block of wires.
    pub fn qft_block(&mut self, start_wire: usize, len: usize) -> Result<()> {
        self.dft_block(start_wire, len, FftDirection::Inverse)
    }

    /// The inverse transform (phase e^{-2πi x y / 2^len}).
    pub fn inverse_qft_block(&mut self, start_wire: usize, len: usize) -> Result<()> {
        self.dft_block(start_wire, len, FftDirection::Forward)
    }

    fn dft_block(&mut self, start_wire: usize, len: usize, dir: FftDirection) -> Result<()> {
        let total = self.layout.total_bits();
        if len == 0 || start_wire + len > total {
            return Err(Error::WireOutOfRange { wire: start_wire + len, width: total });
        }
        let low_bits = total - start_wire - len;
        let block = 1usize << len;
        let low = 1usize << low_bits;
        let hi_count = 1usize << start_wire;
        let fft = rustfft::FftPlanner::new().plan_fft(block, dir);
        let scale = 1.0 / (block as f64).sqrt();
        let mut scratch = vec![Complex64::new(0.0, 0.0); block];
        for hi in 0..hi_count {
            for lo in 0..low {
                let base = (hi << (len + low_bits)) | lo;
                for x in 0..block {
                    scratch[x] = self.amps[base | (x << low_bits)];
                }
                fft.process(&mut scratch);
                for y in 0..block {
                    self.amps[base | (y << low_bits)] = scratch[y] * scale;
                }
            }
        }
        Ok(())
    }

    /// U_f: |x⟩|z⟩ ↦ |x⟩|z ⊕ f(x)⟩.
    pub fn oracle_xor(&mut self, f: &[u64]) -> Result<()> {
        let q = self.layout.input_bits;
        let w = self.layout.output_bits;
        if f.len() != 1 << q {
            return Err(Error::Dimension(format!(
                "oracle table has {} entries, expected {}",
                f.len(),
                1usize << q
            )));
        }
        if f.iter().any(|&v| v >> w != 0) {
            return Err(Error::Dimension("oracle value exceeds output width".into()));
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for x in 0..1usize << q {
            let fx = f[x] as usize;
            for z in 0..1usize << w {
                out[(x << w) | (z ^ fx)] = self.amps[(x << w) | z];
            }
        }
        self.amps = out;
        Ok(())
    }

    /// Group-type oracle: |x⟩|y⟩ ↦ |x⟩|y ∘ g(x)⟩ where the output register
    /// indexes group elements through the encoding.
    pub fn oracle_group(&mut self, g: &[u64], enc: &GroupEncoding) -> Result<()> {
        let q = self.layout.input_bits;
        let w = self.layout.output_bits;
        if g.len() != 1 << q {
            return Err(Error::Dimension("group oracle table size mismatch".into()));
        }
        if enc.bits() > w {
            return Err(Error::Dimension("group does not fit the output register".into()));
        }
        for &v in g {
            if enc.index_of(v).is_none() {
                return Err(Error::InvalidArgument(format!("{v} is not a group element")));
            }
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        let card = enc.elems.len();
        for x in 0..1usize << q {
            let gx = g[x];
            for z in 0..1usize << w {
                let idx = (x << w) | z;
                if z < card {
                    let prod = enc.group.op(enc.elems[z], gx);
                    let zi = enc.index_of(prod).expect("group closed under op");
                    out[(x << w) | zi] = self.amps[idx];
                } else {
                    out[idx] = self.amps[idx];
                }
            }
        }
        self.amps = out;
        Ok(())
    }

    /// Applies a gate list whose wire 0 sits at global wire `base`.
    pub fn run_gatelist(&mut self, gates: &GateList, base: usize) -> Result<()> {
        let total = self.layout.total_bits();
        if base + gates.width > total {
            return Err(Error::WireOutOfRange { wire: base + gates.width, width: total });
        }
        for gate in &gates.gates {
            self.apply_gate(gate, base)?;
        }
        if !gates.permutation_is_identity() {
            // basis relabeling: new bit (base+i) = old bit (base+perm[i])
            let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
            let positions: Vec<usize> = (0..gates.width)
                .map(|i| total - 1 - (base + i))
                .collect();
            let src_positions: Vec<usize> = (0..gates.width)
                .map(|i| total - 1 - (base + gates.output_permutation[i]))
                .collect();
            let block_mask: usize = positions.iter().map(|&p| 1usize << p).sum();
            for idx in 0..self.amps.len() {
                let mut dst = idx & !block_mask;
                for i in 0..gates.width {
                    if idx & (1 << src_positions[i]) != 0 {
                        dst |= 1 << positions[i];
                    }
                }
                out[dst] = self.amps[idx];
            }
            self.amps = out;
        }
        Ok(())
    }

    fn apply_gate(&mut self, gate: &Gate, base: usize) -> Result<()> {
        match *gate {
            Gate::Not(t) => {
                let tm = 1usize << self.bit_pos(base + t)?;
                for idx in 0..self.amps.len() {
                    if idx & tm == 0 {
                        self.amps.swap(idx, idx | tm);
                    }
                }
            }
            Gate::Cnot { control, target } => {
                let cm = 1usize << self.bit_pos(base + control)?;
                let tm = 1usize << self.bit_pos(base + target)?;
                for idx in 0..self.amps.len() {
                    if idx & cm != 0 && idx & tm == 0 {
                        self.amps.swap(idx, idx | tm);
                    }
                }
            }
            Gate::Toffoli { c1, c2, target } => {
                let m1 = 1usize << self.bit_pos(base + c1)?;
                let m2 = 1usize << self.bit_pos(base + c2)?;
                let tm = 1usize << self.bit_pos(base + target)?;
                for idx in 0..self.amps.len() {
                    if idx & m1 != 0 && idx & m2 != 0 && idx & tm == 0 {
                        self.amps.swap(idx, idx | tm);
                    }
                }
            }
        }
        Ok(())
    }

    /// Exact marginal over the input register.
    pub fn input_distribution(&self) -> Vec<f64> {
        let w = self.layout.output_bits;
        let mut probs = vec![0.0; 1 << self.layout.input_bits];
        for (idx, a) in self.amps.iter().enumerate() {
            probs[idx >> w] += a.norm_sqr();
        }
        probs
    }

    pub fn measure_input<R: Rng>(&mut self, rng: &mut R) -> Result<BitVec> {
        let probs = self.input_distribution();
        let x = born_sample(&probs, rng)?;
        let w = self.layout.output_bits;
        self.collapse(|idx| idx >> w == x, probs[x]);
        Ok(BitVec::from_word(x as u64, self.layout.input_bits))
    }

    pub fn measure_output<R: Rng>(&mut self, rng: &mut R) -> Result<BitVec> {
        let w = self.layout.output_bits;
        let mut probs = vec![0.0; 1 << w];
        for (idx, a) in self.amps.iter().enumerate() {
            probs[idx & ((1 << w) - 1)] += a.norm_sqr();
        }
        let z = born_sample(&probs, rng)?;
        self.collapse(|idx| idx & ((1 << w) - 1) == z, probs[z]);
        Ok(BitVec::from_word(z as u64, w))
    }

    fn collapse<F: Fn(usize) -> bool>(&mut self, keep: F, mass: f64) {
        let scale = 1.0 / mass.sqrt();
        for (idx, a) in self.amps.iter_mut().enumerate() {
            if keep(idx) {
                *a *= scale;
            } else {
                *a = Complex64::new(0.0, 0.0);
            }
        }
    }
}

fn born_sample<R: Rng>(probs: &[f64], rng: &mut R) -> Result<usize> {
    let total: f64 = probs.iter().sum();
    if total < EXACT_TOL {
        return Err(Error::Degenerate("zero-norm register distribution".into()));
    }
    let mut u = rng.gen::<f64>() * total;
    for (i, &p) in probs.iter().enumerate() {
        if u < p {
            return Ok(i);
        }
        u -= p;
    }
    Ok(probs.len() - 1)
}

/// Maps packed group elements to output-register indices; the neutral
/// element sits at index 0 so |0...0⟩ is the group identity.
pub struct GroupEncoding {
    pub group: GroupSpec,
    pub elems: Vec<u64>,
    index: HashMap<u64, usize>,
}

impl GroupEncoding {
    pub fn new(group: GroupSpec) -> Self {
        let elems = group.elements();
        assert_eq!(elems[0], group.neutral());
        let index = elems.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        GroupEncoding { group, elems, index }
    }

    pub fn index_of(&self, v: u64) -> Option<usize> {
        self.index.get(&v).copied()
    }

    pub fn bits(&self) -> usize {
        self.group.encoding_bits()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Gate {
    Not(usize),
    Cnot { control: usize, target: usize },
    Toffoli { c1: usize, c2: usize, target: usize },
}

impl Gate {
    fn wires(&self) -> Vec<usize> {
        match *self {
            Gate::Not(t) => vec![t],
            Gate::Cnot { control, target } => vec![control, target],
            Gate::Toffoli { c1, c2, target } => vec![c1, c2, target],
        }
    }

    fn relabel(&self, map: &[usize]) -> Gate {
        match *self {
            Gate::Not(t) => Gate::Not(map[t]),
            Gate::Cnot { control, target } => {
                Gate::Cnot { control: map[control], target: map[target] }
            }
            Gate::Toffoli { c1, c2, target } => {
                Gate::Toffoli { c1: map[c1], c2: map[c2], target: map[target] }
            }
        }
    }
}

/// A reversible circuit: gates applied in order, then a wire relabeling
/// (bit i of the result reads bit output_permutation[i] of the word after
/// the gates). The relabeling stands in for Feistel swaps.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GateList {
    pub width: usize,
    pub gates: Vec<Gate>,
    pub output_permutation: Vec<usize>,
}

impl GateList {
    pub fn new(width: usize) -> Self {
        GateList { width, gates: Vec::new(), output_permutation: (0..width).collect() }
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        let wires = gate.wires();
        for &w in &wires {
            if w >= self.width {
                return Err(Error::WireOutOfRange { wire: w, width: self.width });
            }
        }
        for i in 0..wires.len() {
            for j in (i + 1)..wires.len() {
                if wires[i] == wires[j] {
                    return Err(Error::InvalidArgument("gate wires must be distinct".into()));
                }
            }
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn permutation_is_identity(&self) -> bool {
        self.output_permutation.iter().enumerate().all(|(i, &p)| i == p)
    }

    /// Evaluates the circuit on a classical word (bit i of the word is the
    /// wire-i value, stored at position width-1-i of the u64).
    pub fn apply_word(&self, x: u64) -> u64 {
        let pos = |wire: usize| self.width - 1 - wire;
        let mut y = x;
        for gate in &self.gates {
            match *gate {
                Gate::Not(t) => y ^= 1 << pos(t),
                Gate::Cnot { control, target } => {
                    if y >> pos(control) & 1 == 1 {
                        y ^= 1 << pos(target);
                    }
                }
                Gate::Toffoli { c1, c2, target } => {
                    if y >> pos(c1) & 1 == 1 && y >> pos(c2) & 1 == 1 {
                        y ^= 1 << pos(target);
                    }
                }
            }
        }
        let mut out = 0u64;
        for i in 0..self.width {
            if y >> pos(self.output_permutation[i]) & 1 == 1 {
                out |= 1 << pos(i);
            }
        }
        out
    }

    /// The inverse circuit, again in gates-then-relabeling form: reversed
    /// gates conjugated through the relabeling, with the inverse relabeling.
    pub fn inverted(&self) -> GateList {
        let mut inv_perm = vec![0usize; self.width];
        for (i, &p) in self.output_permutation.iter().enumerate() {
            inv_perm[p] = i;
        }
        let gates = self
            .gates
            .iter()
            .rev()
            .map(|g| g.relabel(&inv_perm))
            .collect();
        GateList { width: self.width, gates, output_permutation: inv_perm }
    }
}

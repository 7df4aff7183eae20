//! Semiclassical period finding with a single reused input qubit: per bit,
//! Hadamard, a controlled group multiplication, a classically controlled
//! phase correction from the bits already measured, Hadamard, measurement.
//! Generic over the output group, with an optional homomorphic compressor
//! shrinking the output register.

use num_complex::Complex64;
use rand::Rng;
use std::f64::consts::TAU;

use crate::gfpm::GFContext;
use crate::group::GroupSpec;
use crate::qsim::GroupEncoding;
use crate::{Error, Result};

enum CompressorKind {
    Identity,
    Norm(GFContext),
}

/// A homomorphic map between two groups; the homomorphism is verified on
/// a thousand random pairs at construction and is a hard precondition.
pub struct Compressor {
    pub source: GroupSpec,
    pub target: GroupSpec,
    kind: CompressorKind,
}

impl Compressor {
    pub fn identity<R: Rng>(group: GroupSpec, rng: &mut R) -> Result<Self> {
        let c = Compressor {
            source: group.clone(),
            target: group,
            kind: CompressorKind::Identity,
        };
        c.verify_homomorphism(rng)?;
        Ok(c)
    }

    /// The norm map GF(p^m)* -> GF(p)*.
    pub fn norm<R: Rng>(ctx: GFContext, rng: &mut R) -> Result<Self> {
        let p = ctx.p;
        let c = Compressor {
            source: GroupSpec::GfpmMul { ctx: ctx.clone() },
            target: GroupSpec::FpMul { p },
            kind: CompressorKind::Norm(ctx),
        };
        c.verify_homomorphism(rng)?;
        Ok(c)
    }

    pub fn apply(&self, x: u64) -> u64 {
        match &self.kind {
            CompressorKind::Identity => x,
            CompressorKind::Norm(ctx) => ctx.norm(x).expect("nonzero element"),
        }
    }

    fn verify_homomorphism<R: Rng>(&self, rng: &mut R) -> Result<()> {
        let elems = self.source.elements();
        for _ in 0..1000 {
            let a = elems[rng.gen_range(0..elems.len())];
            let b = elems[rng.gen_range(0..elems.len())];
            let lhs = self.apply(self.source.op(a, b));
            let rhs = self.target.op(self.apply(a), self.apply(b));
            if lhs != rhs {
                return Err(Error::InvalidArgument(
                    "compressor is not homomorphic".into(),
                ));
            }
        }
        Ok(())
    }
}

/// One semiclassical execution; returns the q-bit outcome whose
/// distribution equals the QFT-based circuit's. Bit i of the result is
/// extracted at step i using the phase correction 2π (y mod 2^i) / 2^{i+1}
/// on the |1⟩ branch.
pub fn semiclassical_run<R: Rng>(
    group: &GroupSpec,
    a: u64,
    q: usize,
    compressor: Option<&Compressor>,
    rng: &mut R,
) -> Result<u64> {
    if !group.contains(a) {
        return Err(Error::InvalidArgument(format!("{a} is not a group element")));
    }
    let working = match compressor {
        Some(c) => c.target.clone(),
        None => group.clone(),
    };
    let enc = GroupEncoding::new(working.clone());
    let dim = enc.elems.len();
    let mut amp0 = vec![Complex64::new(0.0, 0.0); dim];
    let mut amp1 = vec![Complex64::new(0.0, 0.0); dim];
    amp0[0] = Complex64::new(1.0, 0.0);

    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut y = 0u64;
    for i in 0..q {
        // controlled factor a^{2^{q-1-i}}, compressed into the working group
        let power = group.pow(a, 1u64 << (q - 1 - i));
        let factor = match compressor {
            Some(c) => c.apply(power),
            None => power,
        };
        for (z0, z1) in amp0.iter_mut().zip(amp1.iter_mut()) {
            let (a0, a1) = (*z0, *z1);
            *z0 = (a0 + a1) * inv_sqrt2;
            *z1 = (a0 - a1) * inv_sqrt2;
        }
        let mut shifted = vec![Complex64::new(0.0, 0.0); dim];
        for (e, &amp) in amp1.iter().enumerate() {
            let prod = working.op(enc.elems[e], factor);
            shifted[enc.index_of(prod).expect("closed")] = amp;
        }
        amp1 = shifted;
        let angle = TAU * (y & ((1 << i) - 1)) as f64 / (1u64 << (i + 1)) as f64;
        let phase = Complex64::new(angle.cos(), angle.sin());
        amp1.iter_mut().for_each(|z| *z *= phase);
        for (z0, z1) in amp0.iter_mut().zip(amp1.iter_mut()) {
            let (a0, a1) = (*z0, *z1);
            *z0 = (a0 + a1) * inv_sqrt2;
            *z1 = (a0 - a1) * inv_sqrt2;
        }
        let p1: f64 = amp1.iter().map(|z| z.norm_sqr()).sum();
        let bit = if rng.gen::<f64>() < p1 { 1u64 } else { 0 };
        if bit == 1 {
            amp0 = std::mem::take(&mut amp1);
            y |= 1 << i;
        }
        let norm: f64 = amp0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        amp0.iter_mut().for_each(|z| *z /= norm);
        amp1 = vec![Complex64::new(0.0, 0.0); dim];
    }
    Ok(y)
}

/// Single-input-qubit register widths: 1 + ceil(log2 |G|) for the source
/// group vs the compressor's target group.
pub fn qubit_ledger(compressor: &Compressor) -> (usize, usize) {
    (
        1 + compressor.source.encoding_bits(),
        1 + compressor.target.encoding_bits(),
    )
}

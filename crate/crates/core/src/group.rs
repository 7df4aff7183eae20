//! Small finite abelian groups used as oracle output alphabets: the unit
//! groups of Z_N, GF(p), and GF(p^m). Elements are packed into u64 words
//! so the simulator can index them directly.

use crate::gfpm::GFContext;
use crate::{Error, Result};

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn modpow(base: u64, mut e: u64, modulus: u64) -> u64 {
    assert!(modulus >= 2);
    let mut b = u128::from(base % modulus);
    let m = u128::from(modulus);
    let mut acc = 1u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc as u64
}

/// Inverse of a modulo n via extended Euclid; errors when gcd(a, n) != 1.
pub fn modinv(a: u64, n: u64) -> Result<u64> {
    let (mut r0, mut r1) = (i128::from(n), i128::from(a % n));
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return Err(Error::InvalidArgument(format!("{a} is not a unit mod {n}")));
    }
    Ok(s0.rem_euclid(i128::from(n)) as u64)
}

/// Multiplicative order of a modulo n; errors when a is not a unit.
pub fn mod_order(a: u64, n: u64) -> Result<u64> {
    if gcd(a % n, n) != 1 {
        return Err(Error::InvalidArgument(format!("{a} is not a unit mod {n}")));
    }
    let mut acc = a % n;
    let mut d = 1u64;
    while acc != 1 {
        acc = (u128::from(acc) * u128::from(a % n) % u128::from(n)) as u64;
        d += 1;
    }
    Ok(d)
}

/// A finite abelian group with u64-packed elements.
#[derive(Clone, Debug)]
pub enum GroupSpec {
    /// Units of Z_N under multiplication.
    ZnMul { n: u64 },
    /// GF(p)* for prime p (same arithmetic as ZnMul, kept distinct for
    /// reporting).
    FpMul { p: u64 },
    /// GF(p^m)* with packed polynomial elements.
    GfpmMul { ctx: GFContext },
}

impl GroupSpec {
    pub fn neutral(&self) -> u64 {
        1
    }

    pub fn contains(&self, x: u64) -> bool {
        match self {
            GroupSpec::ZnMul { n } => x < *n && gcd(x, *n) == 1,
            GroupSpec::FpMul { p } => x >= 1 && x < *p,
            GroupSpec::GfpmMul { ctx } => x >= 1 && ctx.contains(x),
        }
    }

    pub fn op(&self, a: u64, b: u64) -> u64 {
        match self {
            GroupSpec::ZnMul { n } | GroupSpec::FpMul { p: n } => {
                (u128::from(a) * u128::from(b) % u128::from(*n)) as u64
            }
            GroupSpec::GfpmMul { ctx } => ctx.mul(a, b),
        }
    }

    pub fn pow(&self, a: u64, e: u64) -> u64 {
        match self {
            GroupSpec::ZnMul { n } | GroupSpec::FpMul { p: n } => modpow(a, e, *n),
            GroupSpec::GfpmMul { ctx } => ctx.pow(a, e),
        }
    }

    pub fn inverse(&self, a: u64) -> Result<u64> {
        match self {
            GroupSpec::ZnMul { n } | GroupSpec::FpMul { p: n } => modinv(a, *n),
            GroupSpec::GfpmMul { ctx } => ctx.inverse(a),
        }
    }

    /// All elements in a fixed order with the neutral element first.
    pub fn elements(&self) -> Vec<u64> {
        match self {
            GroupSpec::ZnMul { n } => (1..*n).filter(|&x| gcd(x, *n) == 1).collect(),
            GroupSpec::FpMul { p } => (1..*p).collect(),
            GroupSpec::GfpmMul { ctx } => (1..ctx.field_size()).collect(),
        }
    }

    pub fn order(&self) -> u64 {
        match self {
            GroupSpec::ZnMul { .. } => self.elements().len() as u64,
            GroupSpec::FpMul { p } => *p - 1,
            GroupSpec::GfpmMul { ctx } => ctx.field_size() - 1,
        }
    }

    /// Bits needed to index the elements.
    pub fn encoding_bits(&self) -> usize {
        let ord = self.order();
        (64 - (ord - 1).leading_zeros() as usize).max(1)
    }
}

//! Closed-form amplitude tables w_{y,z} for the Simon, order-finding, and
//! short-discrete-log circuit families, the cancellation-criterion check,
//! and the exact (1 - 2^-t) scaling verifier computed as a full average
//! over the enumerated hash family.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::TAU;

use crate::ekera::EHInstance;
use crate::hashing::{self, FamilySpec, OutputMap};
use crate::shor::OrderInstance;
use crate::{Result, EXACT_TOL};

/// Row y, column z holds w_{y,z}; the outcome distribution is the row-wise
/// squared mass.
#[derive(Clone, Debug)]
pub struct AmplitudeTable {
    pub label: String,
    pub rows: usize,
    pub cols: usize,
    w: Vec<Complex64>,
}

impl AmplitudeTable {
    fn zeros(label: impl Into<String>, rows: usize, cols: usize) -> Self {
        AmplitudeTable {
            label: label.into(),
            rows,
            cols,
            w: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn entry(&self, y: usize, z: usize) -> Complex64 {
        self.w[y * self.cols + z]
    }

    pub fn row_sum(&self, y: usize) -> Complex64 {
        self.w[y * self.cols..(y + 1) * self.cols].iter().sum()
    }

    pub fn total_mass(&self) -> f64 {
        self.w.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn distribution(&self) -> Vec<f64> {
        (0..self.rows)
            .map(|y| {
                self.w[y * self.cols..(y + 1) * self.cols]
                    .iter()
                    .map(|a| a.norm_sqr())
                    .sum()
            })
            .collect()
    }
}

/// True iff every row with y != 0 sums to zero: the sufficient condition
/// for exact probability scaling under hashing.
pub fn cancellation_check(table: &AmplitudeTable) -> bool {
    (1..table.rows).all(|y| table.row_sum(y).norm() < EXACT_TOL)
}

/// w_{y,z} = (1/2^n) sum over x with map(f(x)) = z of (-1)^{<x,y>}.
pub fn simon_table(f: &[u64], n: usize, map: &OutputMap) -> AmplitudeTable {
    assert_eq!(f.len(), 1 << n);
    assert_eq!(map.in_bits(), n);
    let cols = 1usize << map.out_bits();
    let mut t = AmplitudeTable::zeros("simon", 1 << n, cols);
    let scale = 1.0 / (1u64 << n) as f64;
    let z_of: Vec<usize> = f.iter().map(|&v| map.apply_word(v) as usize).collect();
    for y in 0..1usize << n {
        for (x, &z) in z_of.iter().enumerate() {
            let sign = if (x & y).count_ones() % 2 == 0 { scale } else { -scale };
            t.w[y * cols + z] += Complex64::new(sign, 0.0);
        }
    }
    t
}

/// Per-residue amplitude vectors A_k(y) = sum over c with cd + k < 2^q of
/// e^{2πi (cd+k) y / 2^q}, precomputed once per instance via geometric sums
/// on reduced rational angles. Tables and distributions for any output map
/// then cost only a regrouping.
pub struct ShorAmplitudes {
    pub q: usize,
    pub d: u64,
    /// a^k mod N for k in 0..d.
    pub powers: Vec<u64>,
    pub in_bits: usize,
    ak: Vec<Vec<Complex64>>,
}

impl ShorAmplitudes {
    pub fn new(inst: &OrderInstance) -> Self {
        let q = inst.q;
        let size = 1u64 << q;
        let root = |j: u64| {
            let angle = TAU * (j as f64) / (size as f64);
            Complex64::new(angle.cos(), angle.sin())
        };
        let d = inst.d;
        let ak = (0..d)
            .map(|k| {
                let n_k = (size - k).div_ceil(d);
                (0..size)
                    .map(|y| {
                        let lead = root(k * y % size);
                        let step = d * y % size;
                        if step == 0 {
                            lead * n_k as f64
                        } else {
                            let num = 1.0
                                - root((u128::from(step) * u128::from(n_k)
                                    % u128::from(size)) as u64);
                            lead * (num / (1.0 - root(step)))
                        }
                    })
                    .collect()
            })
            .collect();
        ShorAmplitudes {
            q,
            d,
            powers: inst.powers(),
            in_bits: hashing::zn_bits(inst.modulus),
            ak,
        }
    }

    fn z_of_k(&self, map: &OutputMap) -> Vec<usize> {
        assert_eq!(map.in_bits(), self.in_bits);
        self.powers.iter().map(|&v| map.apply_word(v) as usize).collect()
    }

    pub fn table(&self, map: &OutputMap) -> AmplitudeTable {
        let cols = 1usize << map.out_bits();
        let rows = 1usize << self.q;
        let mut t = AmplitudeTable::zeros("shor", rows, cols);
        let scale = 1.0 / rows as f64;
        let z_of_k = self.z_of_k(map);
        for y in 0..rows {
            for (k, &z) in z_of_k.iter().enumerate() {
                t.w[y * cols + z] += self.ak[k][y] * scale;
            }
        }
        t
    }

    /// p(y) for the given map, without materializing the table.
    pub fn distribution(&self, map: &OutputMap) -> Vec<f64> {
        let cols = 1usize << map.out_bits();
        let rows = 1usize << self.q;
        let scale = 1.0 / rows as f64;
        let z_of_k = self.z_of_k(map);
        let mut probs = vec![0.0; rows];
        let mut acc = vec![Complex64::new(0.0, 0.0); cols];
        for y in 0..rows {
            acc.iter_mut().for_each(|a| *a = Complex64::new(0.0, 0.0));
            for (k, &z) in z_of_k.iter().enumerate() {
                acc[z] += self.ak[k][y];
            }
            probs[y] = acc.iter().map(|a| (a * scale).norm_sqr()).sum();
        }
        probs
    }

    /// For d | 2^q the support is exactly the multiples of m = 2^q/d; this
    /// returns the d-point distribution over y = l*m.
    pub fn multiple_distribution(&self, map: &OutputMap) -> Result<Vec<f64>> {
        let size = 1u64 << self.q;
        if size % self.d != 0 {
            return Err(crate::Error::InvalidArgument(format!(
                "period {} does not divide 2^{}",
                self.d, self.q
            )));
        }
        let m = size / self.d;
        let cols = 1usize << map.out_bits();
        let scale = 1.0 / size as f64;
        let z_of_k = self.z_of_k(map);
        let mut probs = vec![0.0; self.d as usize];
        let mut acc = vec![Complex64::new(0.0, 0.0); cols];
        for (l, p) in probs.iter_mut().enumerate() {
            let y = (l as u64 * m) as usize;
            acc.iter_mut().for_each(|a| *a = Complex64::new(0.0, 0.0));
            for (k, &z) in z_of_k.iter().enumerate() {
                acc[z] += self.ak[k][y];
            }
            *p = acc.iter().map(|a| (a * scale).norm_sqr()).sum();
        }
        Ok(probs)
    }
}

pub fn shor_table(inst: &OrderInstance, map: &OutputMap) -> AmplitudeTable {
    ShorAmplitudes::new(inst).table(map)
}

/// w_{(j,k),z} = (1/2^{m+2l}) sum over (a,b) with map(f(a,b)) = z of
/// e^{2πi (a j + 2^m b k) / 2^{m+l}}. Row index is j * 2^l + k.
pub fn ekera_table(inst: &EHInstance, map: &OutputMap) -> AmplitudeTable {
    let m = inst.m;
    let ell = inst.ell;
    let period = 1u64 << (m + ell);
    let root: Vec<Complex64> = (0..period)
        .map(|j| {
            let angle = TAU * (j as f64) / (period as f64);
            Complex64::new(angle.cos(), angle.sin())
        })
        .collect();
    let rows = 1usize << (m + 2 * ell);
    let cols = 1usize << map.out_bits();
    let mut t = AmplitudeTable::zeros("ekera", rows, cols);
    let scale = 1.0 / rows as f64;
    for a in 0..1u64 << (m + ell) {
        for b in 0..1u64 << ell {
            let z = map.apply_word(inst.eh_function(a, b)) as usize;
            for j in 0..1u64 << (m + ell) {
                let aj = a * j % period;
                for k in 0..1u64 << ell {
                    let phase = (aj + (b << m) * k) % period;
                    let row = (j << ell | k) as usize;
                    t.w[row * cols + z] += root[phase as usize] * scale;
                }
            }
        }
    }
    t
}

#[derive(Clone, Debug, Serialize)]
pub struct ScalingReport {
    pub t: usize,
    pub family_size: u64,
    /// max over y != 0 of |p_h(y) - (1-2^-t) p(y)|.
    pub max_dev_nonzero: f64,
    /// |p_h(0) - (2^-t + (1-2^-t) p(0))|.
    pub zero_dev: f64,
    /// max deviation between the two distributions renormalized over y != 0.
    pub max_conditional_dev: f64,
}

/// Computes p from the identity map and the exact average of hashed
/// distributions over the whole family, then checks the scaling law.
pub fn scaling_verify<F>(builder: F, spec: &FamilySpec) -> Result<ScalingReport>
where
    F: Fn(&OutputMap) -> AmplitudeTable,
{
    assert!(!spec.identity, "scaling is measured against a hashed family");
    let plain = builder(&OutputMap::Identity { bits: spec.n }).distribution();
    let mut avg = vec![0.0; plain.len()];
    let mut count = 0u64;
    for map in hashing::enumerate_family(spec)? {
        let dist = builder(&map).distribution();
        assert_eq!(dist.len(), plain.len());
        for (a, d) in avg.iter_mut().zip(&dist) {
            *a += d;
        }
        count += 1;
    }
    avg.iter_mut().for_each(|a| *a /= count as f64);

    let factor = 1.0 - 0.5f64.powi(spec.t as i32);
    let max_dev_nonzero = plain
        .iter()
        .zip(&avg)
        .skip(1)
        .map(|(&p, &ph)| (ph - factor * p).abs())
        .fold(0.0, f64::max);
    let zero_dev = (avg[0] - (0.5f64.powi(spec.t as i32) + factor * plain[0])).abs();

    let plain_rest: f64 = plain[1..].iter().sum();
    let avg_rest: f64 = avg[1..].iter().sum();
    let max_conditional_dev = if plain_rest > EXACT_TOL && avg_rest > EXACT_TOL {
        plain
            .iter()
            .zip(&avg)
            .skip(1)
            .map(|(&p, &ph)| (ph / avg_rest - p / plain_rest).abs())
            .fold(0.0, f64::max)
    } else {
        0.0
    };

    Ok(ScalingReport {
        t: spec.t,
        family_size: count,
        max_dev_nonzero,
        zero_dev,
        max_conditional_dev,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::f2lin::BitVec;
    use crate::hashing::LinearHash;
    use crate::simon::random_simon;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn simon_rows_vanish_off_orthogonal_complement() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        let s: BitVec = "001".parse().unwrap();
        let inst = random_simon(3, &s, &mut rng).unwrap();
        let table = simon_table(&inst.f, 3, &OutputMap::Identity { bits: 3 });
        for y in 0..8usize {
            let mass: f64 = (0..table.cols).map(|z| table.entry(y, z).norm_sqr()).sum();
            if y & 1 == 1 {
                assert!(mass < 1e-18, "row {y} should vanish");
            } else {
                assert!((mass - 0.25).abs() < 1e-12);
            }
        }
        // raw entries are ±2^{1-n}; renormalized per surviving row they are
        // ±1/2^{(n-1)/2} = ±0.5
        for y in (0..8).step_by(2) {
            let row_mass: f64 =
                (0..table.cols).map(|z| table.entry(y, z).norm_sqr()).sum();
            for z in 0..table.cols {
                let e = table.entry(y, z);
                assert!(e.norm() < 1e-12 || (e.norm() - 0.25).abs() < 1e-12);
                if e.norm() > 1e-12 {
                    assert!((e.norm() / row_mass.sqrt() - 0.5).abs() < 1e-12);
                }
            }
        }
        assert!((table.total_mass() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn simon_all_zero_seed_collapses_output() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let s: BitVec = "001".parse().unwrap();
        let inst = random_simon(3, &s, &mut rng).unwrap();
        let h = LinearHash::new(vec![BitVec::zero(3)]).unwrap();
        let table = simon_table(&inst.f, 3, &OutputMap::Linear(h));
        assert!((table.entry(0, 0).re - 1.0).abs() < 1e-12);
        assert!(table.entry(0, 1).norm() < 1e-12);
    }

    #[test]
    fn cancellation_for_all_three_families() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let s: BitVec = "0110".parse().unwrap();
        let inst = random_simon(4, &s, &mut rng).unwrap();
        assert!(cancellation_check(&simon_table(
            &inst.f,
            4,
            &OutputMap::Identity { bits: 4 }
        )));

        let shor = OrderInstance::new(51, 2, 12).unwrap();
        let id = OutputMap::Identity { bits: hashing::zn_bits(51) };
        assert!(cancellation_check(&shor_table(&shor, &id)));

        let eh = EHInstance::with_planted(23, 5, 3, 2, 1).unwrap();
        let id = OutputMap::Identity { bits: hashing::zn_bits(23) };
        assert!(cancellation_check(&ekera_table(&eh, &id)));

        let mut bad = AmplitudeTable::zeros("bad", 2, 2);
        bad.w[2] = Complex64::new(1.0, 0.0);
        assert!(!cancellation_check(&bad));
    }

    #[test]
    fn shor_baseline_uniform_on_multiples() {
        let inst = OrderInstance::new(51, 2, 12).unwrap();
        let amps = ShorAmplitudes::new(&inst);
        let id = OutputMap::Identity { bits: 6 };
        let dist = amps.distribution(&id);
        for (y, &p) in dist.iter().enumerate() {
            if y % 512 == 0 {
                assert!((p - 0.125).abs() < 1e-9, "y = {y}, p = {p}");
            } else {
                assert!(p < 1e-12, "y = {y}, p = {p}");
            }
        }
        let mult = amps.multiple_distribution(&id).unwrap();
        assert_eq!(mult.len(), 8);
        for &p in &mult {
            assert!((p - 0.125).abs() < 1e-9);
        }
    }

    #[test]
    fn shor_scaling_symmetry() {
        // hashed-to-plain probability ratio is symmetric: S(y) = S(2^q - y)
        let inst = OrderInstance::new(15, 2, 6).unwrap();
        let amps = ShorAmplitudes::new(&inst);
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let spec = FamilySpec::hashed(4, 1);
        let map = hashing::sample(&spec, &mut rng);
        let dist = amps.distribution(&map);
        let rows = dist.len();
        for y in 1..rows {
            assert!((dist[y] - dist[rows - y]).abs() < 1e-9, "y = {y}");
        }
    }

    #[test]
    fn ekera_row_zero_and_mass() {
        let inst = EHInstance::with_planted(23, 5, 3, 2, 2).unwrap();
        let id = OutputMap::Identity { bits: hashing::zn_bits(23) };
        let table = ekera_table(&inst, &id);
        assert!((table.row_sum(0).re - 1.0).abs() < 1e-9);
        assert!(table.row_sum(0).im.abs() < 1e-9);
        for y in 1..table.rows {
            assert!(table.row_sum(y).norm() < 1e-9, "row {y}");
        }
        assert!((table.total_mass() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn simon_scaling_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let s: BitVec = "0110".parse().unwrap();
        let inst = random_simon(4, &s, &mut rng).unwrap();
        let spec = FamilySpec::hashed(4, 1);
        let report =
            scaling_verify(|map| simon_table(&inst.f, 4, map), &spec).unwrap();
        assert!(report.max_dev_nonzero < 1e-9);
        assert!(report.zero_dev < 1e-9);
        assert!(report.max_conditional_dev < 1e-9);
        assert_eq!(report.family_size, 16);
    }

    #[test]
    fn shor_scaling_power_of_two_and_general() {
        // d = 4 divides 2^6
        let inst = OrderInstance::new(15, 2, 6).unwrap();
        let amps = ShorAmplitudes::new(&inst);
        let spec = FamilySpec::hashed(4, 1);
        let report = scaling_verify(|map| amps.table(map), &spec).unwrap();
        assert!(report.max_dev_nonzero < 1e-9);
        assert!(report.zero_dev < 1e-9);

        // d = 6 does not divide any power of two; the generic scaling law
        // still holds exactly
        let inst = OrderInstance::new(21, 2, 9).unwrap();
        assert_eq!(inst.d, 6);
        let amps = ShorAmplitudes::new(&inst);
        let spec = FamilySpec::hashed(5, 1);
        let report = scaling_verify(|map| amps.table(map), &spec).unwrap();
        assert!(report.max_dev_nonzero < 1e-9);
        assert!(report.zero_dev < 1e-9);
        assert!(report.max_conditional_dev < 1e-9);
    }

    #[test]
    fn ekera_scaling_t1() {
        let inst = EHInstance::with_planted(23, 5, 3, 2, 1).unwrap();
        let spec = FamilySpec::hashed(hashing::zn_bits(23), 1);
        let report = scaling_verify(|map| ekera_table(&inst, map), &spec).unwrap();
        assert!(report.max_dev_nonzero < 1e-9);
        assert!(report.zero_dev < 1e-9);
        assert!(report.max_conditional_dev < 1e-9);
    }
}

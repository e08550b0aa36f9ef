//! Classifies a bin as zero-ton, single-ton or multi-ton from its offset
//! values, and reads out the index of a single-ton.

pub mod code;

use serde::{Deserialize, Serialize};

use crate::design::{OffsetKind, OffsetSet};
use crate::pauli::symplectic_bits;

pub use code::{OffsetCode, RepetitionCode};

/// `0` for `x >= 0`, `1` otherwise (as `false` / `true`).
#[inline]
pub fn sgn(x: f64) -> bool {
    !(x >= 0.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BinKind {
    ZeroTon,
    SingleTon,
    MultiTon,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BinVerdict {
    pub kind: BinKind,
    /// Label bits and rate, present only for single-tons.
    pub singleton: Option<(u64, f64)>,
}

impl BinVerdict {
    pub const ZERO: BinVerdict = BinVerdict { kind: BinKind::ZeroTon, singleton: None };
    pub const MULTI: BinVerdict = BinVerdict { kind: BinKind::MultiTon, singleton: None };

    fn single(m: u64, p: f64) -> Self {
        BinVerdict { kind: BinKind::SingleTon, singleton: Some((m, p)) }
    }
}

/// Thresholds of the bin detector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    pub gamma1: f64,
    pub gamma2: f64,
}

impl DetectorConfig {
    pub const DEFAULT_GAMMA: f64 = 0.4;

    /// Caps both constants at `0.9 min(1, eps0^2 / nu^2)` when a rate floor is
    /// declared.
    pub fn clamped(self, eps0: Option<f64>, nu2: f64) -> Self {
        let Some(eps0) = eps0 else { return self };
        if nu2 <= 0.0 {
            return self;
        }
        let cap = 0.9 * (eps0 * eps0 / nu2).min(1.0);
        DetectorConfig { gamma1: self.gamma1.min(cap), gamma2: self.gamma2.min(cap) }
    }
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig { gamma1: Self::DEFAULT_GAMMA, gamma2: Self::DEFAULT_GAMMA }
    }
}

/// Bit `i` of the estimate is set when offset `J e_i` flips the sign relative
/// to the zero offset.
pub fn estimate_index_basis(u_basis: &[f64], u0: f64) -> u64 {
    let s0 = sgn(u0);
    u_basis
        .iter()
        .enumerate()
        .fold(0, |m, (i, &u)| m | (u64::from(s0 ^ sgn(u)) << i))
}

/// Index read-out from whatever the offsets support: the code if present,
/// otherwise basis offsets relative to offset 0.
pub fn decode_index(u: &[f64], offsets: &OffsetSet) -> Option<u64> {
    if let Some(code) = offsets.code() {
        let mut bits = vec![false; code.len()];
        for (t, kind) in offsets.kinds().iter().enumerate() {
            if let OffsetKind::Coded { anchor, row } = *kind {
                bits[row] = sgn(u[anchor]) ^ sgn(u[t]);
            }
        }
        return code.decode(&bits);
    }
    let pos = offsets.basis_positions()?;
    let basis: Vec<f64> = pos.iter().map(|&t| u[t]).collect();
    Some(estimate_index_basis(&basis, u[0]))
}

#[inline]
fn signed(u: f64, d: u64, m: u64, n: u32) -> f64 {
    if symplectic_bits(d, m, n) {
        -u
    } else {
        u
    }
}

/// The three-way bin test on values `u` (one per offset) with variance
/// multiplier `t` and base noise variance `nu2`.
///
/// Detection and value estimation use the first `P1` offsets only; the
/// remaining offsets feed the index decoder.
pub fn detect(u: &[f64], offsets: &OffsetSet, t: f64, nu2: f64, cfg: &DetectorConfig) -> BinVerdict {
    debug_assert_eq!(u.len(), offsets.len());
    let p1 = offsets.p1();
    let n = offsets.num_qubits() as u32;
    let random = &u[..p1];
    let energy = random.iter().map(|x| x * x).sum::<f64>() / p1 as f64;
    if energy <= t * (1.0 + cfg.gamma1) * nu2 {
        return BinVerdict::ZERO;
    }
    let Some(m) = decode_index(u, offsets) else {
        return BinVerdict::MULTI;
    };
    let ds = &offsets.offsets()[..p1];
    let p = ds.iter().zip(random).map(|(&d, &x)| signed(x, d, m, n)).sum::<f64>() / p1 as f64;
    let residual = ds
        .iter()
        .zip(random)
        .map(|(&d, &x)| (x - signed(p, d, m, n)).powi(2))
        .sum::<f64>()
        / p1 as f64;
    if residual <= t * (1.0 + cfg.gamma2) * nu2 && p > 0.0 {
        BinVerdict::single(m, p)
    } else {
        BinVerdict::MULTI
    }
}

/// Upper bound on the chance that noise of variance `t nu2` flips the sign of
/// a single-ton of rate `p`.
pub fn singleton_flip_probability(p: f64, t: f64, nu2: f64) -> f64 {
    let var = t * nu2;
    if var <= 0.0 {
        return 0.0;
    }
    let r = p * p / var;
    (1.0 / (2.0 * std::f64::consts::PI * r)).sqrt() * (-r / 2.0).exp()
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::design::basis_offset;
    use crate::pauli::PauliLabel;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    /// Offset values of a bin holding the given `(label, rate)` terms.
    fn bin_values(terms: &[(u64, f64)], offsets: &OffsetSet) -> Vec<f64> {
        let n = offsets.num_qubits() as u32;
        offsets
            .offsets()
            .iter()
            .map(|&d| terms.iter().map(|&(m, p)| signed(p, d, m, n)).sum())
            .collect()
    }

    #[test]
    fn sign_convention() {
        assert!(!sgn(0.0));
        assert!(sgn(-1e-30));
        assert!(!sgn(3.2));
    }

    #[test]
    fn reference_sign_pattern() {
        // Signs (+, -, -, +) relative to the zero offset read out 0110.
        let m = estimate_index_basis(&[-0.001, -0.001, 0.001], 0.001);
        assert_eq!(m, 0b011);
        let full = estimate_index_basis(&[0.001, -0.001, -0.001, 0.001], 0.001);
        assert_eq!(full, 0b0110);
        assert_eq!(estimate_index_basis(&[0.3; 6], 0.3), 0);
    }

    #[test]
    fn basis_readout_recovers_random_labels() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let n = rng.random_range(1..=8);
            let offsets = OffsetSet::heuristic(n).unwrap();
            let m = rng.random::<u64>() & ((1 << (2 * n)) - 1);
            let u = bin_values(&[(m, rng.random_range(1e-6..0.1))], &offsets);
            assert_eq!(decode_index(&u, &offsets), Some(m));
        }
    }

    #[test]
    fn one_flipped_offset_gives_one_wrong_bit() {
        let n = 3;
        let offsets = OffsetSet::heuristic(n).unwrap();
        let m = "XZY".parse::<PauliLabel>().unwrap().bits();
        let mut u = bin_values(&[(m, 0.01)], &offsets);
        u[4] = -u[4];
        let got = decode_index(&u, &offsets).unwrap();
        assert_eq!((got ^ m).count_ones(), 1);
        assert_eq!(got ^ m, 1 << 3);
        assert_eq!(offsets.offsets()[4], basis_offset(3, n));
    }

    fn coded(n: usize, p1: usize, r: usize, seed: u64) -> OffsetSet {
        OffsetSet::random(n, p1, Some(Arc::new(RepetitionCode::new(2 * n, r).unwrap())), false, seed).unwrap()
    }

    #[test]
    fn zero_and_degenerate_inputs() {
        let offsets = coded(4, 8, 3, 0);
        let cfg = DetectorConfig::default();
        let zeros = vec![0.0; offsets.len()];
        assert_eq!(detect(&zeros, &offsets, 1.0, 1e-8, &cfg).kind, BinKind::ZeroTon);
        let ones = vec![1.0; offsets.len()];
        let v = detect(&ones, &offsets, 1.0, 1e-8, &cfg);
        assert_eq!(v, BinVerdict::single(0, 1.0));
        let neg = vec![-1.0; offsets.len()];
        assert_eq!(detect(&neg, &offsets, 1.0, 1e-8, &cfg).kind, BinKind::MultiTon);
    }

    #[test]
    fn noiseless_singletons_are_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let cfg = DetectorConfig::default();
        for trial in 0..200 {
            let n = rng.random_range(1..=10);
            let offsets = coded(n, 16, 9, trial);
            let m = rng.random::<u64>() & ((1 << (2 * n)) - 1);
            let p = rng.random_range(1e-7..0.5);
            let u = bin_values(&[(m, p)], &offsets);
            let v = detect(&u, &offsets, 1.0, 1e-24, &cfg);
            let (gm, gp) = v.singleton.expect("single-ton");
            assert_eq!(gm, m);
            assert!((gp - p).abs() < 1e-12);
        }
    }

    #[test]
    fn two_term_bin_is_a_multiton() {
        let n = 4;
        let offsets = coded(n, 16, 9, 3);
        let m1 = "XIZY".parse::<PauliLabel>().unwrap().bits();
        let m2 = "IZZX".parse::<PauliLabel>().unwrap().bits();
        let u = bin_values(&[(m1, 0.01), (m2, 0.02)], &offsets);
        let nu2 = 1e-10;
        assert_eq!(detect(&u, &offsets, 1.0, nu2, &DetectorConfig::default()).kind, BinKind::MultiTon);
    }

    #[test]
    fn flip_bound_values() {
        let nu2 = 1e-8_f64;
        let p = nu2.sqrt();
        let want = (-0.5f64).exp() / (2.0 * std::f64::consts::PI).sqrt();
        assert!((singleton_flip_probability(p, 1.0, nu2) - want).abs() < 1e-15);
        assert!((want - 0.2420).abs() < 1e-4);
        assert_eq!(singleton_flip_probability(1e-3, 1.0, 0.0), 0.0);
        assert!(singleton_flip_probability(1e-3, 1.0, 1e-12) < 1e-100);
    }

    #[test]
    fn coded_decode_at_six_sigma() {
        // nu = p / 6, r = 9: needs >= 99% correct decodes.
        let n = 6;
        let p = 1e-3;
        let nu = p / 6.0;
        let offsets = coded(n, 16, 9, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let trials = 10_000;
        let mut ok = 0;
        for _ in 0..trials {
            let m = rng.random::<u64>() & ((1 << (2 * n)) - 1);
            let u: Vec<f64> = bin_values(&[(m, p)], &offsets)
                .into_iter()
                .map(|x| { let z: f64 = StandardNormal.sample(&mut rng); x + nu * z })
                .collect();
            if decode_index(&u, &offsets) == Some(m) {
                ok += 1;
            }
        }
        assert!(ok as f64 >= 0.99 * trials as f64, "{ok} / {trials}");
    }

    #[test]
    fn gamma_clamp() {
        let cfg = DetectorConfig::default();
        assert_eq!(cfg.clamped(None, 1.0), cfg);
        assert_eq!(cfg.clamped(Some(2.0), 1.0), cfg);
        let tight = cfg.clamped(Some(0.5), 1.0);
        assert!((tight.gamma1 - 0.225).abs() < 1e-15);
    }
}

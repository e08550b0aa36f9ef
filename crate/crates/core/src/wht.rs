//! Walsh-Hadamard transforms over `F_2^k`.
//!
//! Two sign conventions are supported. [`WhtOrdering::Natural`] uses the dot
//! product `(-1)^{i.j}`; [`WhtOrdering::Symplectic`] uses the symplectic
//! product `(-1)^{<i,j>}` with indices read as `(x | z)` halves of `k/2` bits.
//! In symplectic ordering the transform of a rate vector lands each
//! eigenvalue at the index of its own Pauli.

use crate::error::{Error, Result};
use crate::pauli::{swap_halves, symplectic_bits};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WhtOrdering {
    Natural,
    Symplectic,
}

fn index_bits(len: usize, ordering: WhtOrdering) -> Result<u32> {
    if !len.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(len));
    }
    let k = len.trailing_zeros();
    if ordering == WhtOrdering::Symplectic && k % 2 != 0 {
        return Err(Error::OddSymplecticBits(k));
    }
    Ok(k)
}

fn coefficient(v: &[f64], i: u64, k: u32, ordering: WhtOrdering) -> f64 {
    let half = k / 2;
    let sign = |j: u64| match ordering {
        WhtOrdering::Natural => (i & j).count_ones() & 1 == 1,
        WhtOrdering::Symplectic => symplectic_bits(i, j, half),
    };
    v.iter()
        .enumerate()
        .map(|(j, &x)| if sign(j as u64) { -x } else { x })
        .sum()
}

/// Quadratic-time reference transform `out_i = sum_j (-1)^{s(i,j)} v_j`.
pub fn wht_brute(v: &[f64], ordering: WhtOrdering) -> Result<Vec<f64>> {
    let k = index_bits(v.len(), ordering)?;
    Ok((0..v.len() as u64).map(|i| coefficient(v, i, k, ordering)).collect())
}

/// Single output `i` of [`wht_brute`], for spot checks on long vectors.
pub fn wht_brute_coefficient(v: &[f64], i: usize, ordering: WhtOrdering) -> Result<f64> {
    let k = index_bits(v.len(), ordering)?;
    if i >= v.len() {
        return Err(Error::Shape(format!("coefficient {i} of a length-{} transform", v.len())));
    }
    Ok(coefficient(v, i as u64, k, ordering))
}

/// Unnormalized radix-2 butterfly transform in natural ordering.
fn butterfly(v: &mut [f64]) {
    let len = v.len();
    let mut h = 1;
    while h < len {
        for block in v.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

/// Applies the index permutation `j -> J j` (exchange of the two index halves).
/// The permutation is an involution.
pub fn symplectic_permute(v: &mut [f64]) -> Result<()> {
    let k = index_bits(v.len(), WhtOrdering::Symplectic)?;
    let half = k / 2;
    for i in 0..v.len() {
        let j = swap_halves(i as u64, half) as usize;
        if j > i {
            v.swap(i, j);
        }
    }
    Ok(())
}

/// In-place fast transform, `O(2^k k)`. The symplectic ordering is the natural
/// transform followed by the half-swap permutation of the output index.
pub fn wht_inplace(v: &mut [f64], ordering: WhtOrdering) -> Result<()> {
    index_bits(v.len(), ordering)?;
    butterfly(v);
    if ordering == WhtOrdering::Symplectic {
        symplectic_permute(v)?;
    }
    Ok(())
}

pub fn wht_fast(v: &[f64], ordering: WhtOrdering) -> Result<Vec<f64>> {
    let mut out = v.to_vec();
    wht_inplace(&mut out, ordering)?;
    Ok(out)
}

/// Eigenvalues to rates: `p_j = (1/N) sum_k (-1)^{s(j,k)} lambda_k`.
pub fn inverse_wht(lambda: &[f64], ordering: WhtOrdering) -> Result<Vec<f64>> {
    let mut out = wht_fast(lambda, ordering)?;
    let scale = 1.0 / out.len() as f64;
    out.iter_mut().for_each(|x| *x *= scale);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_vec(len: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..len).map(|_| rng.random_range(-1.0..1.0)).collect()
    }

    fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn delta_maps_to_all_ones() {
        let out = wht_brute(&[1.0, 0.0, 0.0, 0.0], WhtOrdering::Symplectic).unwrap();
        assert_eq!(out, vec![1.0; 4]);
    }

    #[test]
    fn single_qubit_depolarizing_eigenvalues() {
        // q = 0.3: every non-identity eigenvalue is 1 - 4q/3 = 0.6.
        let p = [0.7, 0.1, 0.1, 0.1];
        let lambda = wht_brute(&p, WhtOrdering::Symplectic).unwrap();
        for (got, want) in lambda.iter().zip([1.0, 0.6, 0.6, 0.6]) {
            assert!((got - want).abs() < 1e-15);
        }
        let back = inverse_wht(&lambda, WhtOrdering::Symplectic).unwrap();
        assert!(max_abs_diff(&back, &p) < 1e-15);
    }

    #[test]
    fn two_point_natural() {
        assert_eq!(wht_fast(&[3.0, 5.0], WhtOrdering::Natural).unwrap(), vec![8.0, -2.0]);
    }

    #[test]
    fn all_ones_inverts_to_delta() {
        let p = inverse_wht(&[1.0; 4], WhtOrdering::Symplectic).unwrap();
        assert_eq!(p, vec![1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn half_swap_of_index() {
        // "10|01" for n = 2 is bits x = 0b01, z = 0b10 -> index 0b1001.
        assert_eq!(swap_halves(0b1001, 2), 0b0110);
        let mut v: Vec<f64> = (0..16).map(f64::from).collect();
        symplectic_permute(&mut v).unwrap();
        assert_eq!(v[0b1001], 6.0);
        symplectic_permute(&mut v).unwrap();
        assert_eq!(v, (0..16).map(f64::from).collect::<Vec<_>>());
    }

    #[test]
    fn fast_matches_brute_k10() {
        let v = random_vec(1 << 10, 7);
        for ordering in [WhtOrdering::Natural, WhtOrdering::Symplectic] {
            let a = wht_brute(&v, ordering).unwrap();
            let b = wht_fast(&v, ordering).unwrap();
            assert!(max_abs_diff(&a, &b) < 1e-12);
        }
    }

    #[test]
    fn round_trip_k12() {
        let v = random_vec(1 << 12, 9);
        let back = inverse_wht(&wht_fast(&v, WhtOrdering::Symplectic).unwrap(), WhtOrdering::Symplectic).unwrap();
        assert!(max_abs_diff(&v, &back) < 1e-12);
    }

    #[test]
    fn ordering_equivalence_exhaustive() {
        for k in (2..=8).step_by(2) {
            let v = random_vec(1 << k, k as u64);
            let mut permuted = v.clone();
            symplectic_permute(&mut permuted).unwrap();
            let natural_of_permuted = wht_fast(&permuted, WhtOrdering::Natural).unwrap();
            let symplectic = wht_brute(&v, WhtOrdering::Symplectic).unwrap();
            assert!(max_abs_diff(&natural_of_permuted, &symplectic) < 1e-12);
        }
    }

    #[test]
    fn parseval() {
        for k in [4, 9, 14] {
            let v = random_vec(1 << k, 100 + k as u64);
            let out = wht_fast(&v, WhtOrdering::Natural).unwrap();
            let lhs: f64 = out.iter().map(|x| x * x).sum();
            let rhs: f64 = (1 << k) as f64 * v.iter().map(|x| x * x).sum::<f64>();
            assert!(((lhs - rhs) / rhs).abs() < 1e-10);
        }
    }

    #[test]
    fn invalid_lengths() {
        assert!(matches!(wht_fast(&[1.0; 3], WhtOrdering::Natural), Err(Error::NotPowerOfTwo(3))));
        assert!(matches!(wht_brute(&[1.0; 8], WhtOrdering::Symplectic), Err(Error::OddSymplecticBits(3))));
    }
}

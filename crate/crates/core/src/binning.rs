//! Turns eigenvalue queries into bin tensors `U[c][t][j]`.

use std::io::{Read, Write};

use rayon::prelude::*;

use crate::channel::SparsePauliChannel;
use crate::design::SubsamplingDesign;
use crate::error::{Error, Result};
use crate::oracle::EigenvalueOracle;
use crate::pauli::symplectic_bits;
use crate::wht::wht_inplace;

/// Smallest base noise variance used by the detectors, so that exact data
/// still leaves room for rounding.
pub const NU2_FLOOR: f64 = 1e-24;

/// Bin values for all groups and offsets, plus the per-bin variance
/// multipliers `T[c][j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct BinTensor {
    groups: usize,
    offsets: usize,
    bins: usize,
    /// Laid out as `[c][t][j]`.
    values: Vec<f64>,
    /// Laid out as `[c][j]`.
    multipliers: Vec<f64>,
    nu2: f64,
    queries: u64,
}

impl BinTensor {
    pub fn zeros(groups: usize, offsets: usize, bins: usize, nu2: f64) -> Self {
        BinTensor {
            groups,
            offsets,
            bins,
            values: vec![0.0; groups * offsets * bins],
            multipliers: vec![1.0; groups * bins],
            nu2,
            queries: 0,
        }
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.groups, self.offsets, self.bins)
    }

    /// Base noise variance `nu^2` of a bin.
    pub fn nu2(&self) -> f64 {
        self.nu2
    }

    pub fn queries(&self) -> u64 {
        self.queries
    }

    /// The `B` bins of group `c` at offset `t`.
    pub fn bins(&self, c: usize, t: usize) -> &[f64] {
        let start = (c * self.offsets + t) * self.bins;
        &self.values[start..start + self.bins]
    }

    pub fn bins_mut(&mut self, c: usize, t: usize) -> &mut [f64] {
        let start = (c * self.offsets + t) * self.bins;
        &mut self.values[start..start + self.bins]
    }

    #[inline]
    pub fn value(&self, c: usize, t: usize, j: usize) -> f64 {
        self.values[(c * self.offsets + t) * self.bins + j]
    }

    /// All offset values of bin `j` in group `c`.
    pub fn bin_values(&self, c: usize, j: usize) -> Vec<f64> {
        (0..self.offsets).map(|t| self.value(c, t, j)).collect()
    }

    /// Adds `delta[t]` to bin `j` of group `c` at every offset `t`.
    pub fn add_to_bin(&mut self, c: usize, j: usize, delta: impl Fn(usize) -> f64) {
        for t in 0..self.offsets {
            self.values[(c * self.offsets + t) * self.bins + j] += delta(t);
        }
    }

    pub fn multiplier(&self, c: usize, j: usize) -> f64 {
        self.multipliers[c * self.bins + j]
    }

    pub fn multiplier_mut(&mut self, c: usize, j: usize) -> &mut f64 {
        &mut self.multipliers[c * self.bins + j]
    }

    pub fn max_abs_diff(&self, other: &BinTensor) -> Result<f64> {
        if self.shape() != other.shape() {
            return Err(Error::Shape(format!("{:?} vs {:?}", self.shape(), other.shape())));
        }
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    }

    const MAGIC: &'static [u8; 8] = b"SPBINS01";

    /// Binary dump: magic, shape as three little-endian `u64`, `nu2`, query
    /// count, then values and multipliers as little-endian `f64`.
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(Self::MAGIC)?;
        for dim in [self.groups, self.offsets, self.bins] {
            out.write_all(&(dim as u64).to_le_bytes())?;
        }
        out.write_all(&self.nu2.to_le_bytes())?;
        out.write_all(&self.queries.to_le_bytes())?;
        for x in self.values.iter().chain(&self.multipliers) {
            out.write_all(&x.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(mut input: R) -> Result<Self> {
        let mut magic = [0u8; 8];
        input.read_exact(&mut magic)?;
        if &magic != Self::MAGIC {
            return Err(Error::Malformed("not a bin tensor dump".into()));
        }
        let mut word = [0u8; 8];
        let mut next = |input: &mut R| -> Result<[u8; 8]> {
            input.read_exact(&mut word)?;
            Ok(word)
        };
        let mut dims = [0usize; 3];
        for d in &mut dims {
            *d = usize::try_from(u64::from_le_bytes(next(&mut input)?)).map_err(|_| Error::Malformed("shape".into()))?;
        }
        let [groups, offsets, bins] = dims;
        let count = groups
            .checked_mul(offsets)
            .and_then(|x| x.checked_mul(bins))
            .filter(|&x| x <= 1 << 32)
            .ok_or_else(|| Error::Malformed(format!("implausible shape {dims:?}")))?;
        let nu2 = f64::from_le_bytes(next(&mut input)?);
        let queries = u64::from_le_bytes(next(&mut input)?);
        let mut tensor = BinTensor::zeros(groups, offsets, bins, nu2);
        tensor.queries = queries;
        for i in 0..count + groups * bins {
            let x = f64::from_le_bytes(next(&mut input)?);
            if i < count {
                tensor.values[i] = x;
            } else {
                tensor.multipliers[i - count] = x;
            }
        }
        if input.read(&mut [0u8; 1])? != 0 {
            return Err(Error::Malformed("trailing bytes after bin tensor".into()));
        }
        Ok(tensor)
    }
}

/// Queries the oracle along every coset `M'_c l + d_{c;t}` and transforms each
/// gathered vector into bins: `U[c][t][j] = (1/B) sum_l (-1)^{<j,l>} lambda_hat`.
pub fn subsample_bins<O: EigenvalueOracle + ?Sized>(oracle: &O, design: &SubsamplingDesign) -> Result<BinTensor> {
    if oracle.num_qubits() != design.num_qubits() {
        return Err(Error::Dimension { expected: design.num_qubits(), found: oracle.num_qubits() });
    }
    let bins = design.num_bins();
    let offsets = design.num_offsets();
    let xi = oracle.noise_std();
    let nu2 = (xi * xi / bins as f64).max(NU2_FLOOR);
    let before = oracle.query_count();
    let mut tensor = BinTensor::zeros(design.num_groups(), offsets, bins, nu2);
    let scale = 1.0 / bins as f64;
    for (c, group) in design.groups().iter().enumerate() {
        let cosets = group.coset_indices();
        let ordering = group.ordering();
        let start = c * offsets * bins;
        tensor.values[start..start + offsets * bins]
            .par_chunks_mut(bins)
            .zip(group.offsets().offsets().par_iter())
            .try_for_each(|(buf, &d)| -> Result<()> {
                for (slot, &k) in buf.iter_mut().zip(&cosets) {
                    *slot = oracle.query(k ^ d)?;
                }
                wht_inplace(buf, ordering)?;
                buf.iter_mut().for_each(|x| *x *= scale);
                Ok(())
            })?;
    }
    tensor.queries = oracle.query_count() - before;
    Ok(tensor)
}

/// Direct evaluation of the bin model
/// `U[c][t][j] = sum_{m : M_c^T m = j} (-1)^{<d_{c;t}, m>} p_m`
/// from the channel's support.
pub fn bin_observation_bruteforce(ch: &SparsePauliChannel, design: &SubsamplingDesign) -> Result<BinTensor> {
    if ch.num_qubits() != design.num_qubits() {
        return Err(Error::Dimension { expected: design.num_qubits(), found: ch.num_qubits() });
    }
    let n = ch.num_qubits() as u32;
    let mut tensor = BinTensor::zeros(design.num_groups(), design.num_offsets(), design.num_bins(), NU2_FLOOR);
    for (c, group) in design.groups().iter().enumerate() {
        for (m, p) in ch.raw_entries() {
            let j = group.hash(m);
            for (t, &d) in group.offsets().offsets().iter().enumerate() {
                let idx = (c * tensor.offsets + t) * tensor.bins + j;
                tensor.values[idx] += if symplectic_bits(d, m, n) { -p } else { p };
            }
        }
    }
    Ok(tensor)
}

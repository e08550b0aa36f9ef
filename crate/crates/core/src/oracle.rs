//! Query access to (noisy) Pauli eigenvalues.

use std::collections::{HashMap, HashSet};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::channel::SparsePauliChannel;
use crate::error::{Error, Result};
use crate::pauli::PauliLabel;

/// How queries are charged.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QueryCounting {
    /// Every call counts.
    Total,
    /// Only the first request for each index counts.
    Distinct,
}

/// Something that answers `k -> lambda_hat_k`.
///
/// Implementations must be deterministic per index so that the result of a
/// parallel gather does not depend on evaluation order.
pub trait EigenvalueOracle: Sync {
    fn num_qubits(&self) -> usize;

    /// Eigenvalue estimate for the label with the given bits.
    fn query(&self, k: u64) -> Result<f64>;

    /// Standard deviation `xi` of the additive noise on each answer.
    fn noise_std(&self) -> f64;

    /// Queries charged so far.
    fn query_count(&self) -> u64;
}

#[derive(Debug, Default)]
struct Counter {
    calls: AtomicU64,
    seen: Option<Mutex<HashSet<u64>>>,
}

impl Counter {
    fn new(mode: QueryCounting) -> Self {
        Counter {
            calls: AtomicU64::new(0),
            seen: (mode == QueryCounting::Distinct).then(|| Mutex::new(HashSet::new())),
        }
    }

    fn record(&self, k: u64) {
        match &self.seen {
            Some(seen) => {
                seen.lock().unwrap_or_else(|e| e.into_inner()).insert(k);
            }
            None => {
                self.calls.fetch_add(1, Ordering::Relaxed);
            }
        }
    }

    fn count(&self) -> u64 {
        match &self.seen {
            Some(seen) => seen.lock().unwrap_or_else(|e| e.into_inner()).len() as u64,
            None => self.calls.load(Ordering::Relaxed),
        }
    }
}

/// Gaussian noise `N(0, 1)` keyed by `(seed, index)`.
pub fn keyed_normal(seed: u64, index: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    StandardNormal.sample(&mut rng)
}

/// Exact eigenvalues of a known channel plus `N(0, xi^2)` noise.
#[derive(Debug)]
pub struct ChannelOracle<'a> {
    channel: &'a SparsePauliChannel,
    xi: f64,
    seed: u64,
    counter: Counter,
}

impl<'a> ChannelOracle<'a> {
    pub fn new(channel: &'a SparsePauliChannel, xi: f64, seed: u64) -> Result<Self> {
        Self::with_counting(channel, xi, seed, QueryCounting::Total)
    }

    pub fn with_counting(channel: &'a SparsePauliChannel, xi: f64, seed: u64, mode: QueryCounting) -> Result<Self> {
        if !(xi >= 0.0) || !xi.is_finite() {
            return Err(Error::Infeasible(format!("noise level must be finite and non-negative, got {xi}")));
        }
        Ok(ChannelOracle { channel, xi, seed, counter: Counter::new(mode) })
    }

    /// Noiseless oracle.
    pub fn exact(channel: &'a SparsePauliChannel) -> Self {
        ChannelOracle { channel, xi: 0.0, seed: 0, counter: Counter::new(QueryCounting::Total) }
    }

    pub fn channel(&self) -> &SparsePauliChannel {
        self.channel
    }

    pub fn query_label(&self, k: &PauliLabel) -> Result<f64> {
        if k.num_qubits() != self.channel.num_qubits() {
            return Err(Error::Dimension { expected: self.channel.num_qubits(), found: k.num_qubits() });
        }
        self.query(k.bits())
    }
}

impl EigenvalueOracle for ChannelOracle<'_> {
    fn num_qubits(&self) -> usize {
        self.channel.num_qubits()
    }

    fn query(&self, k: u64) -> Result<f64> {
        self.counter.record(k);
        let exact = self.channel.eigenvalue_bits(k);
        if self.xi == 0.0 {
            return Ok(exact);
        }
        Ok(exact + self.xi * keyed_normal(self.seed, k))
    }

    fn noise_std(&self) -> f64 {
        self.xi
    }

    fn query_count(&self) -> u64 {
        self.counter.count()
    }
}

/// Answers from a fixed table of measured eigenvalues. Missing indices are an
/// error, so a design can be checked against the data it needs.
#[derive(Debug)]
pub struct TableOracle {
    n: usize,
    values: HashMap<u64, f64>,
    xi: f64,
    counter: Counter,
}

impl TableOracle {
    /// `xi` is the noise level the table is believed to carry.
    pub fn new(n: usize, rows: &[(PauliLabel, f64)], xi: f64) -> Result<Self> {
        let mut values = HashMap::with_capacity(rows.len());
        for (label, value) in rows {
            if label.num_qubits() != n {
                return Err(Error::Dimension { expected: n, found: label.num_qubits() });
            }
            if values.insert(label.bits(), *value).is_some() {
                return Err(Error::DuplicateLabel(label.to_xz_string()));
            }
        }
        Ok(TableOracle { n, values, xi, counter: Counter::new(QueryCounting::Distinct) })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl EigenvalueOracle for TableOracle {
    fn num_qubits(&self) -> usize {
        self.n
    }

    fn query(&self, k: u64) -> Result<f64> {
        self.counter.record(k);
        self.values
            .get(&k)
            .copied()
            .ok_or_else(|| Error::MissingEigenvalue(PauliLabel::from_raw(self.n, k).to_xz_string()))
    }

    fn noise_std(&self) -> f64 {
        self.xi
    }

    fn query_count(&self) -> u64 {
        self.counter.count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::random_sparse_channel;

    #[test]
    fn zero_noise_is_exact() {
        let ch = random_sparse_channel(6, 20, 1e-4, 0.9, 1).unwrap();
        let orc = ChannelOracle::new(&ch, 0.0, 5).unwrap();
        for k in [0u64, 1, 77, 4095] {
            assert_eq!(orc.query(k).unwrap(), ch.eigenvalue_bits(k));
        }
        assert_eq!(orc.query_count(), 4);
    }

    #[test]
    fn repeated_queries_are_identical() {
        let ch = random_sparse_channel(6, 20, 1e-4, 0.9, 1).unwrap();
        let orc = ChannelOracle::new(&ch, 1e-3, 5).unwrap();
        let a = orc.query(123).unwrap();
        let b = orc.query(123).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
        let other = ChannelOracle::new(&ch, 1e-3, 6).unwrap();
        assert_ne!(other.query(123).unwrap(), a);
    }

    #[test]
    fn distinct_counting() {
        let ch = SparsePauliChannel::identity_channel(3).unwrap();
        let orc = ChannelOracle::with_counting(&ch, 0.1, 0, QueryCounting::Distinct).unwrap();
        for k in [1, 2, 1, 1, 3] {
            orc.query(k).unwrap();
        }
        assert_eq!(orc.query_count(), 3);
    }

    #[test]
    fn noise_statistics() {
        let draws: Vec<f64> = (0..100_000u64).map(|k| keyed_normal(17, k)).collect();
        let mean = draws.iter().sum::<f64>() / draws.len() as f64;
        let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (draws.len() - 1) as f64;
        assert!((var.sqrt() - 1.0).abs() < 0.02, "std {}", var.sqrt());

        // Adjacent indices must not be correlated.
        let pairs = draws.len() / 2;
        let corr: f64 = (0..pairs).map(|i| draws[2 * i] * draws[2 * i + 1]).sum::<f64>() / pairs as f64;
        assert!(corr.abs() < 0.01, "correlation {corr}");
    }

    #[test]
    fn oracle_noise_scale() {
        let ch = SparsePauliChannel::identity_channel(10).unwrap();
        let xi = 1e-3;
        let orc = ChannelOracle::new(&ch, xi, 3).unwrap();
        let devs: Vec<f64> = (0..100_000u64).map(|k| orc.query(k).unwrap() - 1.0).collect();
        let std = (devs.iter().map(|d| d * d).sum::<f64>() / devs.len() as f64).sqrt();
        assert!((std / xi - 1.0).abs() < 0.02);
    }

    #[test]
    fn table_oracle_reports_missing_index() {
        let rows = vec![("10|01".parse().unwrap(), 0.5)];
        let orc = TableOracle::new(2, &rows, 0.0).unwrap();
        assert_eq!(orc.query(0b1001).unwrap(), 0.5);
        assert!(matches!(orc.query(0), Err(Error::MissingEigenvalue(_))));
    }

    #[test]
    fn rejects_bad_noise() {
        let ch = SparsePauliChannel::identity_channel(1).unwrap();
        assert!(ChannelOracle::new(&ch, -1.0, 0).is_err());
        assert!(ChannelOracle::new(&ch, f64::NAN, 0).is_err());
    }
}

//! Sparse Pauli channels: storage, exact eigenvalues, synthetic generators and
//! file formats.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{low_mask, parity};
use crate::pauli::{swap_halves, PauliLabel, MAX_QUBITS};
use crate::wht::{wht_fast, WhtOrdering};

/// Allowed deviation of the total probability from one.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

/// A Pauli channel with finitely many non-zero error rates.
///
/// Entries are kept sorted by label. The identity label is always present,
/// possibly with rate zero.
#[derive(Clone, Debug, PartialEq)]
pub struct SparsePauliChannel {
    n: usize,
    labels: Vec<u64>,
    rates: Vec<f64>,
    // labels with x/z halves exchanged: sign of <k, m> is parity(k & dual).
    duals: Vec<u64>,
}

impl SparsePauliChannel {
    /// Validates and stores `entries`. Rates must be non-negative and sum to
    /// one within [`NORMALIZATION_TOLERANCE`]. A missing identity is added with
    /// rate zero.
    pub fn new<I>(n: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (PauliLabel, f64)>,
    {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::QubitCount(n));
        }
        let mut map = BTreeMap::new();
        for (label, rate) in entries {
            if label.num_qubits() != n {
                return Err(Error::Dimension { expected: n, found: label.num_qubits() });
            }
            if !(rate >= 0.0) || !rate.is_finite() {
                return Err(Error::NegativeRate { label: label.to_word(), rate });
            }
            if map.insert(label.bits(), rate).is_some() {
                return Err(Error::DuplicateLabel(label.to_word()));
            }
        }
        map.entry(0).or_insert(0.0);
        let total: f64 = map.values().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::Normalization { total, deficit: 1.0 - total });
        }
        Ok(Self::from_sorted(n, map.into_iter().collect()))
    }

    fn from_sorted(n: usize, entries: Vec<(u64, f64)>) -> Self {
        let (labels, rates): (Vec<u64>, Vec<f64>) = entries.into_iter().unzip();
        let duals = labels.iter().map(|&m| swap_halves(m, n as u32)).collect();
        SparsePauliChannel { n, labels, rates, duals }
    }

    pub fn identity_channel(n: usize) -> Result<Self> {
        Self::new(n, [(PauliLabel::identity(n)?, 1.0)])
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// Number of stored entries, the identity included.
    pub fn sparsity(&self) -> usize {
        self.labels.len()
    }

    pub fn identity_rate(&self) -> f64 {
        self.rates[0]
    }

    pub fn rate(&self, label: &PauliLabel) -> f64 {
        self.labels.binary_search(&label.bits()).map_or(0.0, |i| self.rates[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (PauliLabel, f64)> + '_ {
        self.labels.iter().zip(&self.rates).map(move |(&b, &r)| (PauliLabel::from_raw(self.n, b), r))
    }

    /// `(label bits, rate)` pairs without constructing labels.
    pub fn raw_entries(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.labels.iter().copied().zip(self.rates.iter().copied())
    }

    /// `lambda_k = sum_m (-1)^{<k,m>} p_m`.
    pub fn eigenvalue(&self, k: &PauliLabel) -> f64 {
        debug_assert_eq!(k.num_qubits(), self.n);
        self.eigenvalue_bits(k.bits())
    }

    #[inline]
    pub fn eigenvalue_bits(&self, k: u64) -> f64 {
        self.duals
            .iter()
            .zip(&self.rates)
            .map(|(&d, &p)| if parity(k & d) { -p } else { p })
            .sum()
    }

    /// Dense rate vector indexed by label bits (only for small `n`).
    pub fn dense_rates(&self) -> Result<Vec<f64>> {
        if self.n > 12 {
            return Err(Error::Infeasible(format!("dense vector for n = {} is too large", self.n)));
        }
        let mut v = vec![0.0; 1 << (2 * self.n)];
        for (m, p) in self.raw_entries() {
            v[m as usize] = p;
        }
        Ok(v)
    }

    /// All `4^n` eigenvalues via one fast transform.
    pub fn dense_eigenvalues(&self) -> Result<Vec<f64>> {
        wht_fast(&self.dense_rates()?, WhtOrdering::Symplectic)
    }

    /// Sum of rates on labels whose per-qubit support matches each pattern
    /// (bit `q` set iff qubit `q` is acted on).
    pub fn local_averages(&self) -> BTreeMap<u64, f64> {
        let mut out = BTreeMap::new();
        for (m, p) in self.raw_entries() {
            let pattern = (m | (m >> self.n)) & low_mask(self.n);
            *out.entry(pattern).or_insert(0.0) += p;
        }
        out
    }

    /// Number of non-identity rates strictly above `threshold`.
    pub fn count_above(&self, threshold: f64) -> usize {
        self.raw_entries().filter(|&(m, p)| m != 0 && p > threshold).count()
    }
}

fn sample_support(n: usize, count: usize, rng: &mut ChaCha8Rng, exclude: &HashSet<u64>) -> Result<Vec<u64>> {
    let space = if 2 * n >= 64 { u64::MAX } else { (1u64 << (2 * n)) - 1 };
    let available = space.saturating_sub(exclude.iter().filter(|&&b| b != 0).count() as u64);
    if count as u64 > available {
        return Err(Error::Infeasible(format!("cannot draw {count} distinct labels on {n} qubits")));
    }
    let mask = low_mask(2 * n);
    let mut seen: HashSet<u64> = HashSet::with_capacity(count);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let bits = rng.random::<u64>() & mask;
        if bits != 0 && !exclude.contains(&bits) && seen.insert(bits) {
            out.push(bits);
        }
    }
    Ok(out)
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return lo;
    }
    (lo.ln() + rng.random::<f64>() * (hi.ln() - lo.ln())).exp()
}

/// Scales `raw` by the factor `f` for which `sum max(floor, f raw_i) = target`.
fn water_fill(raw: &[f64], floor: f64, target: f64) -> Vec<f64> {
    let mut sorted: Vec<f64> = raw.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut suffix = sorted.iter().sum::<f64>();
    let mut factor = 0.0;
    for (k, &r) in sorted.iter().enumerate() {
        let f = (target - k as f64 * floor) / suffix;
        if f * r >= floor {
            factor = f;
            break;
        }
        suffix -= r;
    }
    raw.iter().map(|&r| (factor * r).max(floor)).collect()
}

/// Random `s`-sparse channel: identity plus `s - 1` distinct uniformly random
/// labels. Non-identity rates are log-uniform over `[eps0, 1 - p_id]`, then
/// rescaled (with values below `eps0` held at `eps0`) so the identity keeps
/// `p_id`.
pub fn random_sparse_channel(n: usize, s: usize, eps0: f64, p_id: f64, seed: u64) -> Result<SparsePauliChannel> {
    random_sparse_channel_in(n, s, eps0, (1.0 - p_id).max(eps0), p_id, seed)
}

/// As [`random_sparse_channel`] with an explicit upper end `eps_max` for the
/// log-uniform draw.
pub fn random_sparse_channel_in(
    n: usize,
    s: usize,
    eps0: f64,
    eps_max: f64,
    p_id: f64,
    seed: u64,
) -> Result<SparsePauliChannel> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::QubitCount(n));
    }
    if s == 0 {
        return Err(Error::Infeasible("sparsity must be at least 1".into()));
    }
    if s == 1 {
        return SparsePauliChannel::identity_channel(n);
    }
    if !(0.0..1.0).contains(&p_id) || !(eps0 > 0.0) {
        return Err(Error::Infeasible(format!("need 0 <= p_id < 1 and eps0 > 0 (p_id = {p_id}, eps0 = {eps0})")));
    }
    let others = (s - 1) as f64;
    if p_id + others * eps0 > 1.0 + NORMALIZATION_TOLERANCE {
        return Err(Error::Infeasible(format!(
            "identity mass {p_id} plus {} rates of at least {eps0} exceeds 1",
            s - 1
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let support = sample_support(n, s - 1, &mut rng, &HashSet::new())?;
    let raw: Vec<f64> = (0..s - 1).map(|_| log_uniform(&mut rng, eps0, eps_max)).collect();
    let rates = water_fill(&raw, eps0, 1.0 - p_id);
    finish_with_identity(n, support.into_iter().zip(rates).collect())
}

/// Adds the identity with whatever mass the other entries leave.
fn finish_with_identity(n: usize, mut entries: Vec<(u64, f64)>) -> Result<SparsePauliChannel> {
    let rest: f64 = entries.iter().map(|e| e.1).sum();
    let identity = 1.0 - rest;
    if identity < -NORMALIZATION_TOLERANCE {
        return Err(Error::Infeasible(format!("non-identity mass {rest} exceeds 1")));
    }
    entries.push((0, identity.max(0.0)));
    entries.sort_by_key(|e| e.0);
    Ok(SparsePauliChannel::from_sorted(n, entries))
}

/// One log-uniform band of a [`TailProfile`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateBand {
    pub count: usize,
    pub lo: f64,
    pub hi: f64,
}

/// A heavy-tailed rate profile: log-uniform bands over uniformly random labels.
///
/// The first band is the head; it is rescaled so that the identity ends up
/// with exactly `identity` mass. The remaining bands are kept as drawn.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailProfile {
    pub identity: f64,
    pub bands: Vec<RateBand>,
}

impl TailProfile {
    /// Summary statistics of a 14-qubit superconducting device: no-error mass
    /// 0.86, about 200 rates above 1e-5, 600 above 1e-6 and 2000 above 1e-8.
    pub fn device_like() -> Self {
        TailProfile {
            identity: 0.86,
            bands: vec![
                RateBand { count: 200, lo: 1e-5, hi: 4e-3 },
                RateBand { count: 400, lo: 1e-6, hi: 1e-5 },
                RateBand { count: 1400, lo: 1e-8, hi: 1e-6 },
            ],
        }
    }

    /// Rates spread over four decades between 1e-3 and 1e-7, plus a sub-floor
    /// tail down to 1e-9.
    pub fn four_decades(identity: f64) -> Self {
        TailProfile {
            identity,
            bands: vec![
                RateBand { count: 100, lo: 1e-4, hi: 1e-3 },
                RateBand { count: 200, lo: 1e-5, hi: 1e-4 },
                RateBand { count: 300, lo: 1e-6, hi: 1e-5 },
                RateBand { count: 400, lo: 1e-7, hi: 1e-6 },
                RateBand { count: 600, lo: 1e-9, hi: 1e-7 },
            ],
        }
    }

    pub fn sample(&self, n: usize, seed: u64) -> Result<SparsePauliChannel> {
        let head = self.bands.first().ok_or_else(|| Error::Infeasible("profile has no bands".into()))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let total: usize = self.bands.iter().map(|b| b.count).sum();
        let support = sample_support(n, total, &mut rng, &HashSet::new())?;
        let mut rates: Vec<f64> = Vec::with_capacity(total);
        for band in &self.bands {
            rates.extend((0..band.count).map(|_| log_uniform(&mut rng, band.lo, band.hi)));
        }
        let tail: f64 = rates[head.count..].iter().sum();
        let head_target = 1.0 - self.identity - tail;
        if head_target <= 0.0 {
            return Err(Error::Infeasible(format!("tail mass {tail} leaves nothing for the head")));
        }
        let head_raw: f64 = rates[..head.count].iter().sum();
        rates[..head.count].iter_mut().for_each(|r| *r *= head_target / head_raw);
        finish_with_identity(n, support.into_iter().zip(rates).collect())
    }
}

/// Inserts or overwrites the given labels and takes the added mass from the
/// identity.
pub fn plant_paulis(ch: &SparsePauliChannel, plants: &[(PauliLabel, f64)]) -> Result<SparsePauliChannel> {
    let mut map: BTreeMap<u64, f64> = ch.raw_entries().collect();
    let mut seen = HashSet::new();
    for (label, rate) in plants {
        if label.num_qubits() != ch.n {
            return Err(Error::Dimension { expected: ch.n, found: label.num_qubits() });
        }
        if label.is_identity() {
            return Err(Error::Infeasible("cannot plant the identity".into()));
        }
        if !(*rate > 0.0) {
            return Err(Error::NegativeRate { label: label.to_word(), rate: *rate });
        }
        if !seen.insert(label.bits()) {
            return Err(Error::DuplicateLabel(label.to_word()));
        }
        map.insert(label.bits(), *rate);
    }
    let rest: f64 = map.iter().filter(|e| *e.0 != 0).map(|e| e.1).sum();
    let identity = 1.0 - rest;
    if identity < 0.0 {
        return Err(Error::Infeasible(format!("planted mass overflows the identity by {:e}", -identity)));
    }
    map.insert(0, identity);
    Ok(SparsePauliChannel::from_sorted(ch.n, map.into_iter().collect()))
}

/// Spreads each locally averaged mass uniformly at random (a flat Dirichlet
/// draw) over the `3^w` Paulis with that support pattern.
pub fn extrapolate_local_averages(n: usize, avg: &BTreeMap<u64, f64>, seed: u64) -> Result<SparsePauliChannel> {
    const MAX_PATTERN_WEIGHT: u32 = 14;
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::QubitCount(n));
    }
    let total: f64 = avg.values().sum();
    if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(Error::Normalization { total, deficit: 1.0 - total });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries = Vec::new();
    for (&pattern, &mass) in avg {
        if pattern & !low_mask(n) != 0 {
            return Err(Error::Malformed(format!("pattern {pattern:#b} has more than {n} bits")));
        }
        if mass < 0.0 {
            return Err(Error::NegativeRate { label: format!("{pattern:#b}"), rate: mass });
        }
        if mass == 0.0 {
            continue;
        }
        let qubits: Vec<usize> = (0..n).filter(|q| (pattern >> q) & 1 == 1).collect();
        if qubits.len() as u32 > MAX_PATTERN_WEIGHT {
            return Err(Error::Infeasible(format!("pattern weight {} is too large to expand", qubits.len())));
        }
        let count = 3usize.pow(qubits.len() as u32);
        let weights: Vec<f64> = (0..count).map(|_| Exp1.sample(&mut rng)).collect();
        let norm: f64 = weights.iter().sum();
        for (idx, w) in weights.iter().enumerate() {
            let mut rem = idx;
            let (mut x, mut z) = (0u64, 0u64);
            for &q in &qubits {
                match rem % 3 {
                    0 => x |= 1 << q,
                    1 => {
                        x |= 1 << q;
                        z |= 1 << q;
                    }
                    _ => z |= 1 << q,
                }
                rem /= 3;
            }
            entries.push((x | (z << n), mass * w / norm));
        }
    }
    entries.sort_by_key(|e| e.0);
    if entries.first().map(|e| e.0) != Some(0) {
        entries.insert(0, (0, 0.0));
    }
    Ok(SparsePauliChannel::from_sorted(n, entries))
}

#[derive(Serialize, Deserialize)]
struct RateEntry {
    pauli: String,
    p: f64,
}

#[derive(Serialize, Deserialize)]
struct ChannelFile {
    n: usize,
    identity: f64,
    rates: Vec<RateEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<serde_json::Value>,
}

/// Writes the JSON channel format. Entries are ordered by descending rate,
/// ties by label.
pub fn channel_to_json(ch: &SparsePauliChannel, meta: Option<serde_json::Value>) -> Result<String> {
    let mut rest: Vec<(PauliLabel, f64)> = ch.iter().filter(|(l, _)| !l.is_identity()).collect();
    rest.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let file = ChannelFile {
        n: ch.n,
        identity: ch.identity_rate(),
        rates: rest.into_iter().map(|(l, p)| RateEntry { pauli: l.to_word(), p }).collect(),
        meta,
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

pub fn channel_from_json(text: &str) -> Result<SparsePauliChannel> {
    let file: ChannelFile = serde_json::from_str(text)?;
    let mut entries = vec![(PauliLabel::identity(file.n)?, file.identity)];
    for e in &file.rates {
        let label: PauliLabel = e.pauli.parse()?;
        if label.is_identity() {
            return Err(Error::DuplicateLabel(label.to_word()));
        }
        entries.push((label, e.p));
    }
    SparsePauliChannel::new(file.n, entries)
}

pub fn save_channel(path: &Path, ch: &SparsePauliChannel, meta: Option<serde_json::Value>) -> Result<()> {
    let mut text = channel_to_json(ch, meta)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn load_channel(path: &Path) -> Result<SparsePauliChannel> {
    channel_from_json(&fs::read_to_string(path)?)
}

/// Writes `index,value` rows with the index in `x|z` form.
pub fn write_eigenvalues<W: Write>(out: W, values: &[(PauliLabel, f64)]) -> Result<()> {
    let mut out = BufWriter::new(out);
    writeln!(out, "index,value")?;
    for (label, value) in values {
        writeln!(out, "{},{}", label.to_xz_string(), value)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_eigenvalues<R: BufRead>(input: R) -> Result<Vec<(PauliLabel, f64)>> {
    let mut lines = input.lines();
    let header = lines.next().transpose()?.unwrap_or_default();
    if header.trim() != "index,value" {
        return Err(Error::Malformed(format!("expected header \"index,value\", found {header:?}")));
    }
    let mut out = Vec::new();
    let mut n = None;
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(parse_eigenvalue_row(&line).map_err(|e| Error::Malformed(format!("line {}: {e}", lineno + 2)))?);
        let this_n = out.last().map(|r: &(PauliLabel, f64)| r.0.num_qubits());
        match n {
            None => n = this_n,
            Some(prev) if Some(prev) != this_n => {
                return Err(Error::Dimension { expected: prev, found: this_n.unwrap_or(0) })
            }
            _ => {}
        }
    }
    Ok(out)
}

/// Parses one CSV row such as `10|01,0.9987`.
pub fn parse_eigenvalue_row(line: &str) -> Result<(PauliLabel, f64)> {
    let (idx, value) = line.split_once(',').ok_or_else(|| Error::Malformed(format!("no comma in {line:?}")))?;
    let label: PauliLabel = idx.trim().parse()?;
    let value: f64 = value.trim().parse().map_err(|_| Error::Malformed(format!("bad value {value:?}")))?;
    Ok((label, value))
}

pub fn save_eigenvalues(path: &Path, values: &[(PauliLabel, f64)]) -> Result<()> {
    write_eigenvalues(fs::File::create(path)?, values)
}

pub fn load_eigenvalues(path: &Path) -> Result<Vec<(PauliLabel, f64)>> {
    read_eigenvalues(BufReader::new(fs::File::open(path)?))
}

//! Peeling decoders: find single-ton bins, record them, and subtract them from
//! the other groups until the channel is explained.

use std::collections::BTreeMap;

use log::{debug, warn};
use serde::{Deserialize, Serialize};

use crate::binning::BinTensor;
use crate::channel::SparsePauliChannel;
use crate::design::{DesignMode, SubsamplingDesign};
use crate::detector::{decode_index, detect, DetectorConfig};
use crate::error::{Error, Result};
use crate::pauli::{symplectic_bits, PauliLabel};

/// Iteration budget `max(10, ceil(3 log2 log2 max(s, 4)) + 3)`.
pub fn default_iterations(s: usize) -> usize {
    let s = s.max(4) as f64;
    (((3.0 * s.log2().log2()).ceil() as usize) + 3).max(10)
}

/// Fraction of edges still unpeeled after `l` rounds on a random hypergraph
/// with `c` groups and `eta` bins per label.
pub fn predicted_edge_survival(c: usize, eta: f64, l: usize) -> f64 {
    (0..l).fold(1.0, |p: f64, _| (1.0 - (-p / eta).exp()).powi(c as i32 - 1))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeelConfig {
    /// Sweep budget `I` (per sensitivity level in the noisy decoder).
    pub max_iterations: usize,
    pub detector: DetectorConfig,
    /// Declared rate floor; tightens the detector constants when set.
    pub eps0: Option<f64>,
    /// Reject a single-ton whose label does not hash to the bin it came from.
    pub hash_check: bool,
    /// Initial zero threshold as a multiple of `nu^2`.
    pub zero_sensitivity: f64,
    /// Initial relative band of the single-ton test.
    pub singleton_band: f64,
    /// The zero threshold is divided by this on each relaxation.
    pub zero_relaxation: f64,
    /// Added to the single-ton band on each relaxation.
    pub band_relaxation: f64,
    pub max_relaxations: usize,
    /// Sparsity used for the completion tolerance; the number of recovered
    /// labels when unset.
    pub sparsity: Option<usize>,
    /// Overrides `max(10 nu sqrt(s), 1e-9)`.
    pub sum_tolerance: Option<f64>,
}

impl Default for PeelConfig {
    fn default() -> Self {
        PeelConfig {
            max_iterations: default_iterations(4),
            detector: DetectorConfig::default(),
            eps0: None,
            hash_check: true,
            zero_sensitivity: 9.0,
            singleton_band: 0.25,
            zero_relaxation: 10f64.sqrt(),
            band_relaxation: 0.25,
            max_relaxations: 4,
            sparsity: None,
            sum_tolerance: None,
        }
    }
}

impl PeelConfig {
    /// Defaults with the iteration budget sized for sparsity `s`.
    pub fn for_sparsity(s: usize) -> Self {
        PeelConfig { max_iterations: default_iterations(s), sparsity: Some(s), ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.max_iterations >= 1
            && self.zero_sensitivity > 0.0
            && self.singleton_band > 0.0
            && self.zero_relaxation >= 1.0
            && self.band_relaxation >= 0.0
            && (0.0..1.0).contains(&self.detector.gamma1)
            && (0.0..1.0).contains(&self.detector.gamma2)
            && self.detector.gamma1 > 0.0
            && self.detector.gamma2 > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Infeasible(format!("invalid peeling configuration {self:?}")))
        }
    }

    fn tolerance(&self, nu2: f64, found: usize) -> f64 {
        self.sum_tolerance
            .unwrap_or_else(|| (10.0 * nu2.sqrt() * (self.sparsity.unwrap_or(found).max(1) as f64).sqrt()).max(1e-9))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Complete,
    Incomplete,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub pauli: PauliLabel,
    pub rate: f64,
    /// Sweep (provable) or round (noisy) in which the label was found.
    pub round: usize,
    pub group: usize,
    pub bin: usize,
}

/// Bins left unexplained at the end.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ResidualSummary {
    pub bins: usize,
    /// Sum over those bins of the mean squared value.
    pub energy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecoveryResult {
    pub n: usize,
    pub status: Status,
    /// Ordered by descending rate, ties by label.
    pub estimates: Vec<Estimate>,
    pub iterations: usize,
    pub relaxations: usize,
    pub residual: ResidualSummary,
    pub queries: u64,
    /// Labels found again with a clearly different value.
    pub discrepancies: usize,
    /// Largest variance multiplier reached.
    pub max_multiplier: f64,
    pub config: PeelConfig,
}

impl RecoveryResult {
    pub fn total_rate(&self) -> f64 {
        self.estimates.iter().map(|e| e.rate).sum()
    }

    pub fn rate(&self, label: &PauliLabel) -> Option<f64> {
        self.estimates.iter().find(|e| e.pauli == *label).map(|e| e.rate)
    }

    /// The estimates as a channel, with the identity absorbing the
    /// normalization gap (clamped at zero).
    pub fn to_channel(&self) -> Result<SparsePauliChannel> {
        let rest: f64 = self.estimates.iter().filter(|e| !e.pauli.is_identity()).map(|e| e.rate).sum();
        let mut entries: Vec<(PauliLabel, f64)> =
            self.estimates.iter().filter(|e| !e.pauli.is_identity()).map(|e| (e.pauli, e.rate)).collect();
        let scale = if rest > 1.0 { 1.0 / rest } else { 1.0 };
        entries.iter_mut().for_each(|e| e.1 *= scale);
        entries.push((PauliLabel::identity(self.n)?, (1.0 - rest * scale).max(0.0)));
        SparsePauliChannel::new(self.n, entries)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// State of a peeling run, advanced one sweep at a time.
pub struct PeelingDecoder<'a> {
    design: &'a SubsamplingDesign,
    bins: BinTensor,
    cfg: PeelConfig,
    detector: DetectorConfig,
    found: BTreeMap<u64, Estimate>,
    /// Bins changed since they were last examined.
    dirty: Vec<bool>,
    /// Bins whose last verdict produced the label recorded from them.
    resolved: Vec<bool>,
    sweeps: usize,
    discrepancies: usize,
    max_multiplier: f64,
}

impl<'a> PeelingDecoder<'a> {
    pub fn new(design: &'a SubsamplingDesign, bins: BinTensor, cfg: PeelConfig) -> Result<Self> {
        cfg.validate()?;
        let (c, p, b) = bins.shape();
        if (c, p, b) != (design.num_groups(), design.num_offsets(), design.num_bins()) {
            return Err(Error::Shape(format!(
                "bins {:?} do not match design ({}, {}, {})",
                (c, p, b),
                design.num_groups(),
                design.num_offsets(),
                design.num_bins()
            )));
        }
        let detector = cfg.detector.clamped(cfg.eps0, bins.nu2());
        Ok(PeelingDecoder {
            design,
            bins,
            cfg,
            detector,
            found: BTreeMap::new(),
            dirty: vec![true; c * b],
            resolved: vec![false; c * b],
            sweeps: 0,
            discrepancies: 0,
            max_multiplier: 1.0,
        })
    }

    pub fn bins(&self) -> &BinTensor {
        &self.bins
    }

    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    pub fn detector(&self) -> &DetectorConfig {
        &self.detector
    }

    pub fn recovered(&self) -> impl Iterator<Item = &Estimate> {
        self.found.values()
    }

    fn nu(&self) -> f64 {
        self.bins.nu2().sqrt()
    }

    /// Records a label unless already known. Returns whether it was new.
    fn record(&mut self, m: u64, p: f64, c: usize, j: usize) -> bool {
        if let Some(prev) = self.found.get(&m) {
            if (prev.rate - p).abs() > 4.0 * self.nu() {
                self.discrepancies += 1;
                debug!("{} found again in group {c} with {p:e} (kept {:e})", prev.pauli, prev.rate);
            }
            return false;
        }
        let pauli = PauliLabel::from_raw(self.design.num_qubits(), m);
        self.found.insert(m, Estimate { pauli, rate: p, round: self.sweeps, group: c, bin: j });
        true
    }

    /// Subtracts `(m, p)` from its bin in every group except `c`. With
    /// `multiplier`, the variance bookkeeping follows: `T' += T / P1 +
    /// (P1 - 1) B / (P1 N)`.
    fn peel_back(&mut self, m: u64, p: f64, c: usize, multiplier: Option<f64>) {
        let n = self.design.num_qubits();
        let p1 = self.design.p1() as f64;
        let b_over_n = (self.design.b() as f64 - 2.0 * n as f64).exp2();
        let bins = self.design.num_bins();
        for (cc, group) in self.design.groups().iter().enumerate() {
            if cc == c {
                continue;
            }
            let jj = group.hash(m);
            let ds = group.offsets().offsets();
            self.bins.add_to_bin(cc, jj, |t| if symplectic_bits(ds[t], m, n as u32) { p } else { -p });
            if let Some(tm) = multiplier {
                let slot = self.bins.multiplier_mut(cc, jj);
                *slot += tm / p1 + (p1 - 1.0) * b_over_n / p1;
                self.max_multiplier = self.max_multiplier.max(*slot);
            }
            self.dirty[cc * bins + jj] = true;
            self.resolved[cc * bins + jj] = false;
        }
    }

    /// One pass over all groups and bins in fixed order. Returns the number of
    /// new labels.
    pub fn sweep(&mut self) -> usize {
        self.sweeps += 1;
        let bins = self.design.num_bins();
        let nu2 = self.bins.nu2();
        let mut added = 0;
        for (c, group) in self.design.groups().iter().enumerate() {
            for j in 0..bins {
                if !std::mem::take(&mut self.dirty[c * bins + j]) {
                    continue;
                }
                let u = self.bins.bin_values(c, j);
                let t = self.bins.multiplier(c, j);
                let verdict = detect(&u, group.offsets(), t, nu2, &self.detector);
                let Some((m, p)) = verdict.singleton else { continue };
                if self.cfg.hash_check && group.hash(m) != j {
                    continue;
                }
                self.resolved[c * bins + j] = true;
                if self.record(m, p, c, j) {
                    added += 1;
                    self.peel_back(m, p, c, Some(t));
                }
            }
        }
        added
    }

    /// Bins that neither pass the zero test nor produced a recorded label.
    fn residual(&self) -> ResidualSummary {
        let bins = self.design.num_bins();
        let p1 = self.design.p1();
        let mut out = ResidualSummary::default();
        for c in 0..self.design.num_groups() {
            for j in 0..bins {
                if self.resolved[c * bins + j] {
                    continue;
                }
                let energy = (0..p1).map(|t| self.bins.value(c, t, j).powi(2)).sum::<f64>() / p1 as f64;
                if energy > self.bins.multiplier(c, j) * (1.0 + self.detector.gamma1) * self.bins.nu2() {
                    out.bins += 1;
                    out.energy += energy;
                }
            }
        }
        out
    }

    pub fn finish(self) -> RecoveryResult {
        let residual = self.residual();
        let estimates = sorted(self.found.into_values());
        let total: f64 = estimates.iter().map(|e| e.rate).sum();
        let status = if (total - 1.0).abs() <= self.cfg.tolerance(self.bins.nu2(), estimates.len()) {
            Status::Complete
        } else {
            Status::Incomplete
        };
        RecoveryResult {
            n: self.design.num_qubits(),
            status,
            estimates,
            iterations: self.sweeps,
            relaxations: 0,
            residual,
            queries: self.bins.queries(),
            discrepancies: self.discrepancies,
            max_multiplier: self.max_multiplier,
            config: self.cfg,
        }
    }
}

fn sorted(estimates: impl Iterator<Item = Estimate>) -> Vec<Estimate> {
    let mut v: Vec<Estimate> = estimates.collect();
    v.sort_by(|a, b| b.rate.total_cmp(&a.rate).then(a.pauli.cmp(&b.pauli)));
    v
}

/// Sweeps until nothing new is found or the iteration budget runs out.
pub fn peel(bins: BinTensor, design: &SubsamplingDesign, cfg: PeelConfig) -> Result<RecoveryResult> {
    if design.num_groups() < 2 {
        warn!("peeling with a single group cannot resolve collisions");
    }
    let budget = cfg.max_iterations;
    let mut dec = PeelingDecoder::new(design, bins, cfg)?;
    while dec.sweeps() < budget {
        if dec.sweep() == 0 {
            break;
        }
    }
    Ok(dec.finish())
}

/// The relaxing decoder for basis-offset designs: zero test on the mean
/// square over all offsets, single-ton test on the spread of offset
/// magnitudes, index from basis signs.
pub fn noisy_peel(bins: BinTensor, design: &SubsamplingDesign, cfg: PeelConfig) -> Result<RecoveryResult> {
    if design.mode() != DesignMode::Heuristic {
        return Err(Error::Infeasible("noisy peeling needs a design with basis offsets".into()));
    }
    let mut dec = PeelingDecoder::new(design, bins, cfg)?;
    let nu2 = dec.bins.nu2();
    let n = design.num_qubits() as u32;
    let nbins = design.num_bins();
    let offsets = design.num_offsets();
    let mut zero = dec.cfg.zero_sensitivity * nu2;
    let mut band = dec.cfg.singleton_band;
    let mut relaxations = 0;
    let mut rounds_at_level = 0;
    let mut status = Status::Incomplete;
    'outer: loop {
        dec.sweeps += 1;
        rounds_at_level += 1;
        let mut added = 0;
        for (c, group) in design.groups().iter().enumerate() {
            let ds = group.offsets().offsets();
            for j in 0..nbins {
                if !std::mem::take(&mut dec.dirty[c * nbins + j]) {
                    continue;
                }
                let u = dec.bins.bin_values(c, j);
                if u.iter().map(|x| x * x).sum::<f64>() / offsets as f64 <= zero {
                    continue;
                }
                let mean_abs = u.iter().map(|x| x.abs()).sum::<f64>() / offsets as f64;
                if u.iter().any(|x| (x.abs() - mean_abs).abs() > band * mean_abs) {
                    continue;
                }
                let Some(m) = decode_index(&u, group.offsets()) else { continue };
                let p = ds
                    .iter()
                    .zip(&u)
                    .map(|(&d, &x)| if symplectic_bits(d, m, n) { -x } else { x })
                    .sum::<f64>()
                    / offsets as f64;
                if !(p > 0.0) || (dec.cfg.hash_check && group.hash(m) != j) {
                    continue;
                }
                dec.resolved[c * nbins + j] = true;
                if dec.record(m, p, c, j) {
                    added += 1;
                    dec.peel_back(m, p, c, None);
                    let total: f64 = dec.found.values().map(|e| e.rate).sum();
                    if (total - 1.0).abs() <= dec.cfg.tolerance(nu2, dec.found.len()) {
                        status = Status::Complete;
                        break 'outer;
                    }
                }
            }
        }
        if added > 0 && rounds_at_level < dec.cfg.max_iterations {
            continue;
        }
        if relaxations == dec.cfg.max_relaxations {
            break;
        }
        relaxations += 1;
        rounds_at_level = 0;
        zero /= dec.cfg.zero_relaxation;
        band += dec.cfg.band_relaxation;
        dec.dirty.iter_mut().for_each(|d| *d = true);
        debug!("relaxed to zero threshold {zero:e}, band {band}");
    }
    let mut result = dec.finish();
    result.status = status;
    result.relaxations = relaxations;
    Ok(result)
}

//! Design, binning and peeling wired together.

use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::binning::subsample_bins;
use crate::channel::SparsePauliChannel;
use crate::design::{local_stabilizer_design, type2_design, ExperimentDesign, SubsamplingDesign};
use crate::detector::{DetectorConfig, RepetitionCode};
use crate::error::{Error, Result};
use crate::metrics::{compare, BoundParams, RecoveryReport};
use crate::oracle::{ChannelOracle, EigenvalueOracle};
use crate::peeler::{noisy_peel, peel, PeelConfig, RecoveryResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Random hashes, coded offsets, threshold detector.
    Provable,
    /// Local stabilizer groups, basis offsets, relaxing detector.
    Heuristic,
}

/// Which groups the heuristic mode measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HeuristicDesign {
    /// `C` local stabilizer groups (`B = 2^n`).
    TypeOne,
    /// One group per qubit pair (`B = 2^(n+2)`).
    TypeTwo,
    /// `C` random hashes of `b` bits read with basis offsets.
    Random,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecoverConfig {
    pub mode: Mode,
    /// Hash bits per group; `B = 2^b`. Ignored by the local designs.
    pub b: usize,
    pub c: usize,
    /// Random offsets per group.
    pub p1: usize,
    /// Repetitions per index bit of the offset code.
    pub repetitions: usize,
    pub heuristic_design: HeuristicDesign,
    /// Declared rate floor.
    pub eps0: Option<f64>,
    /// Expected number of nonzero rates; sizes the iteration budget.
    pub sparsity: Option<usize>,
    pub gamma: f64,
    pub hash_check: bool,
    pub seed: u64,
}

impl Default for RecoverConfig {
    fn default() -> Self {
        RecoverConfig {
            mode: Mode::Provable,
            b: 10,
            c: 2,
            p1: 16,
            repetitions: RepetitionCode::DEFAULT_REPETITIONS,
            heuristic_design: HeuristicDesign::TypeOne,
            eps0: None,
            sparsity: None,
            gamma: DetectorConfig::DEFAULT_GAMMA,
            hash_check: true,
            seed: 0,
        }
    }
}

impl RecoverConfig {
    pub fn peel_config(&self) -> PeelConfig {
        let base = match self.sparsity {
            Some(s) => PeelConfig::for_sparsity(s),
            None => PeelConfig::default(),
        };
        PeelConfig {
            detector: DetectorConfig { gamma1: self.gamma, gamma2: self.gamma },
            eps0: self.eps0,
            hash_check: self.hash_check,
            ..base
        }
    }
}

/// Builds the design the configuration asks for on `n` qubits.
pub fn build_design(n: usize, cfg: &RecoverConfig) -> Result<(SubsamplingDesign, Option<ExperimentDesign>)> {
    match cfg.mode {
        Mode::Provable => {
            if cfg.b == 0 || cfg.b > 2 * n {
                return Err(Error::Infeasible(format!("need 1 <= b <= 2n, got b = {} for n = {n}", cfg.b)));
            }
            let code = Arc::new(RepetitionCode::new(2 * n, cfg.repetitions)?);
            Ok((SubsamplingDesign::provable(n, cfg.b, cfg.c, cfg.p1, code, cfg.seed)?, None))
        }
        Mode::Heuristic => match cfg.heuristic_design {
            HeuristicDesign::TypeOne => {
                let (d, e) = local_stabilizer_design(n, cfg.c, cfg.seed)?;
                Ok((d, Some(e)))
            }
            HeuristicDesign::TypeTwo => {
                let (d, e) = type2_design(n, cfg.seed)?;
                Ok((d, Some(e)))
            }
            HeuristicDesign::Random => Ok((SubsamplingDesign::heuristic_random(n, cfg.b, cfg.c, cfg.seed)?, None)),
        },
    }
}

#[derive(Debug)]
pub struct Recovery {
    pub design: SubsamplingDesign,
    pub experiments: Option<ExperimentDesign>,
    pub result: RecoveryResult,
    pub wall_time_secs: f64,
}

impl Recovery {
    /// Bound parameters from the declared noise level and the design.
    pub fn bound_params(&self, xi: f64, sparsity: usize) -> BoundParams {
        BoundParams { xi, bins: self.design.num_bins(), sparsity }
    }
}

/// Runs design, binning and peeling against `oracle`.
pub fn recover<O: EigenvalueOracle + ?Sized>(oracle: &O, cfg: &RecoverConfig) -> Result<Recovery> {
    let start = Instant::now();
    let (design, experiments) = build_design(oracle.num_qubits(), cfg)?;
    let bins = subsample_bins(oracle, &design)?;
    let peel_cfg = cfg.peel_config();
    let result = match cfg.mode {
        Mode::Provable => peel(bins, &design, peel_cfg)?,
        Mode::Heuristic => noisy_peel(bins, &design, peel_cfg)?,
    };
    Ok(Recovery { design, experiments, result, wall_time_secs: start.elapsed().as_secs_f64() })
}

/// Recovers a known channel through a noisy oracle and scores the result.
///
/// Bounds use the channel's own sparsity.
pub fn recover_synthetic(
    ch: &SparsePauliChannel,
    xi: f64,
    noise_seed: u64,
    cfg: &RecoverConfig,
) -> Result<(Recovery, RecoveryReport)> {
    let oracle = ChannelOracle::new(ch, xi, noise_seed)?;
    let rec = recover(&oracle, cfg)?;
    let bounds = rec.bound_params(xi, ch.sparsity());
    let mut report = compare(ch, &rec.result, cfg.eps0, Some(bounds))?;
    report.wall_time_secs = Some(rec.wall_time_secs);
    Ok((rec, report))
}

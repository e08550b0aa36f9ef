//! Recovery quality against a known channel.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::channel::SparsePauliChannel;
use crate::error::{Error, Result};
use crate::pauli::PauliLabel;
use crate::peeler::RecoveryResult;

/// Noise level, bins per group and sparsity the bounds are computed from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    pub xi: f64,
    pub bins: usize,
    pub sparsity: usize,
}

impl BoundParams {
    /// `2 xi / sqrt(B)`.
    pub fn linf_bound(&self) -> f64 {
        2.0 * self.xi / (self.bins as f64).sqrt()
    }

    /// `s xi / sqrt(B)`.
    pub fn tv_bound(&self) -> f64 {
        self.sparsity as f64 * self.xi / (self.bins as f64).sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LabelOutcome {
    Recovered,
    FalsePositive,
    FalseNegative,
    /// True rate below the floor and not recovered.
    BelowFloor,
}

impl LabelOutcome {
    fn as_str(self) -> &'static str {
        match self {
            LabelOutcome::Recovered => "recovered",
            LabelOutcome::FalsePositive => "false-positive",
            LabelOutcome::FalseNegative => "false-negative",
            LabelOutcome::BelowFloor => "below-floor",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabelError {
    pub pauli: PauliLabel,
    pub truth: f64,
    pub estimate: f64,
    pub abs_error: f64,
    /// `None` when the true rate is zero.
    pub rel_error: Option<f64>,
    pub outcome: LabelOutcome,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecoveryReport {
    pub n: usize,
    /// Largest absolute rate error over the union of both supports.
    pub linf: f64,
    /// Half the 1-norm distance, identity taken as the normalization gap.
    pub tv: f64,
    pub labels: Vec<LabelError>,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub eps0: Option<f64>,
    pub bounds: Option<BoundParams>,
    pub linf_bound: Option<f64>,
    pub tv_bound: Option<f64>,
    pub queries: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_secs: Option<f64>,
}

impl RecoveryReport {
    pub fn within_linf_bound(&self) -> Option<bool> {
        self.linf_bound.map(|b| self.linf <= b)
    }

    pub fn within_tv_bound(&self) -> Option<bool> {
        self.tv_bound.map(|b| self.tv <= b)
    }

    /// No false positives or negatives.
    pub fn support_exact(&self) -> bool {
        self.false_positives == 0 && self.false_negatives == 0
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// One row per label: `label,weight,truth,estimate,abs_error,rel_error,outcome`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "label,weight,truth,estimate,abs_error,rel_error,outcome")?;
        for l in &self.labels {
            let rel = l.rel_error.map(|r| format!("{r:e}")).unwrap_or_default();
            writeln!(
                out,
                "{},{},{:e},{:e},{:e},{},{}",
                l.pauli.to_word(),
                l.pauli.weight(),
                l.truth,
                l.estimate,
                l.abs_error,
                rel,
                l.outcome.as_str()
            )?;
        }
        Ok(())
    }
}

/// Total variation distance, each identity rate replaced by one minus the
/// other rates so both sides are distributions.
pub fn tv_distance(a: &SparsePauliChannel, b: &SparsePauliChannel) -> Result<f64> {
    if a.num_qubits() != b.num_qubits() {
        return Err(Error::Dimension { expected: a.num_qubits(), found: b.num_qubits() });
    }
    Ok(tv_of_maps(&a.raw_entries().collect(), &b.raw_entries().collect()))
}

fn tv_of_maps(a: &BTreeMap<u64, f64>, b: &BTreeMap<u64, f64>) -> f64 {
    let rest = |m: &BTreeMap<u64, f64>| m.iter().filter(|(&k, _)| k != 0).map(|(_, &p)| p).sum::<f64>();
    let mut l1 = ((1.0 - rest(a)) - (1.0 - rest(b))).abs();
    let keys: BTreeSet<u64> = a.keys().chain(b.keys()).copied().filter(|&k| k != 0).collect();
    for k in keys {
        l1 += (a.get(&k).copied().unwrap_or(0.0) - b.get(&k).copied().unwrap_or(0.0)).abs();
    }
    0.5 * l1
}

/// Compares a recovery with the channel it came from.
///
/// True labels below `eps0` that were not recovered are not counted as
/// misses; recovered labels whose true rate is below `eps0` count as false
/// positives.
pub fn compare(
    truth: &SparsePauliChannel,
    rec: &RecoveryResult,
    eps0: Option<f64>,
    bounds: Option<BoundParams>,
) -> Result<RecoveryReport> {
    if truth.num_qubits() != rec.n {
        return Err(Error::Dimension { expected: truth.num_qubits(), found: rec.n });
    }
    let n = rec.n;
    let floor = eps0.unwrap_or(0.0);
    let t: BTreeMap<u64, f64> = truth.raw_entries().collect();
    let r: BTreeMap<u64, f64> = rec.estimates.iter().map(|e| (e.pauli.bits(), e.rate)).collect();
    let keys: BTreeSet<u64> = t.keys().chain(r.keys()).copied().collect();

    let mut labels = Vec::with_capacity(keys.len());
    let mut linf: f64 = 0.0;
    for k in keys {
        let truth = t.get(&k).copied().unwrap_or(0.0);
        let est = r.get(&k).copied();
        let abs_error = (truth - est.unwrap_or(0.0)).abs();
        linf = linf.max(abs_error);
        let significant = truth > 0.0 && truth >= floor;
        let outcome = match (est.is_some(), significant) {
            (true, true) => LabelOutcome::Recovered,
            (true, false) => LabelOutcome::FalsePositive,
            (false, true) => LabelOutcome::FalseNegative,
            (false, false) => LabelOutcome::BelowFloor,
        };
        labels.push(LabelError {
            pauli: PauliLabel::from_raw(n, k),
            truth,
            estimate: est.unwrap_or(0.0),
            abs_error,
            rel_error: (truth > 0.0).then(|| abs_error / truth),
            outcome,
        });
    }
    labels.sort_by(|a, b| b.truth.total_cmp(&a.truth).then(a.pauli.bits().cmp(&b.pauli.bits())));
    let count = |o| labels.iter().filter(|l| l.outcome == o).count();

    Ok(RecoveryReport {
        n,
        linf,
        tv: tv_of_maps(&t, &r),
        false_positives: count(LabelOutcome::FalsePositive),
        false_negatives: count(LabelOutcome::FalseNegative),
        labels,
        eps0,
        bounds,
        linf_bound: bounds.map(|b| b.linf_bound()),
        tv_bound: bounds.map(|b| b.tv_bound()),
        queries: rec.queries,
        wall_time_secs: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::random_sparse_channel;
    use crate::peeler::{Estimate, PeelConfig, ResidualSummary, Status};

    fn p(s: &str) -> PauliLabel {
        s.parse().unwrap()
    }

    fn result_from(n: usize, entries: &[(PauliLabel, f64)]) -> RecoveryResult {
        RecoveryResult {
            n,
            status: Status::Complete,
            estimates: entries
                .iter()
                .map(|&(pauli, rate)| Estimate { pauli, rate, round: 1, group: 0, bin: 0 })
                .collect(),
            iterations: 1,
            relaxations: 0,
            residual: ResidualSummary::default(),
            queries: 7,
            discrepancies: 0,
            max_multiplier: 1.0,
            config: PeelConfig::default(),
        }
    }

    fn channel_result(ch: &SparsePauliChannel) -> RecoveryResult {
        result_from(ch.num_qubits(), &ch.iter().collect::<Vec<_>>())
    }

    #[test]
    fn perfect_recovery() {
        let ch = random_sparse_channel(6, 12, 1e-4, 0.9, 3).unwrap();
        let rep = compare(&ch, &channel_result(&ch), Some(1e-4), None).unwrap();
        assert_eq!(rep.linf, 0.0);
        assert_eq!(rep.tv, 0.0);
        assert!(rep.support_exact());
        assert_eq!(rep.labels.len(), 12);
        assert_eq!(rep.queries, 7);
    }

    #[test]
    fn missing_label_costs_its_rate() {
        let ch = SparsePauliChannel::new(2, [(p("II"), 0.9), (p("XY"), 0.06), (p("ZI"), 0.04)]).unwrap();
        let rec = result_from(2, &[(p("II"), 0.9), (p("XY"), 0.06)]);
        let rep = compare(&ch, &rec, None, None).unwrap();
        // 0.04 on ZI plus the same 0.04 moved onto the identity, halved.
        assert!((rep.tv - 0.04).abs() < 1e-15);
        assert!((rep.linf - 0.04).abs() < 1e-15);
        assert_eq!(rep.false_negatives, 1);
        assert_eq!(rep.false_positives, 0);

        // Below the floor it is not a miss.
        let rep = compare(&ch, &rec, Some(0.05), None).unwrap();
        assert_eq!(rep.false_negatives, 0);
        assert_eq!(rep.labels.iter().find(|l| l.pauli == p("ZI")).unwrap().outcome, LabelOutcome::BelowFloor);
    }

    #[test]
    fn spurious_label_is_a_false_positive() {
        let ch = SparsePauliChannel::new(1, [(p("I"), 0.99), (p("X"), 0.01)]).unwrap();
        let rec = result_from(1, &[(p("I"), 0.98), (p("X"), 0.01), (p("Z"), 0.01)]);
        let rep = compare(&ch, &rec, Some(1e-3), None).unwrap();
        assert_eq!(rep.false_positives, 1);
        assert!((rep.tv - 0.01).abs() < 1e-15);
        let z = rep.labels.iter().find(|l| l.pauli == p("Z")).unwrap();
        assert_eq!(z.rel_error, None);
    }

    #[test]
    fn tv_is_symmetric_and_bounded() {
        for seed in 0..20 {
            let a = random_sparse_channel(5, 10, 1e-3, 0.8, seed).unwrap();
            let b = random_sparse_channel(5, 14, 1e-3, 0.7, seed + 100).unwrap();
            let ab = compare(&a, &channel_result(&b), None, None).unwrap().tv;
            let ba = compare(&b, &channel_result(&a), None, None).unwrap().tv;
            assert!((ab - ba).abs() < 1e-15);
            assert!((0.0..=1.0).contains(&ab));
            assert!((tv_distance(&a, &b).unwrap() - ab).abs() < 1e-15);
        }
    }

    #[test]
    fn tv_matches_dense_computation() {
        let a = random_sparse_channel(4, 9, 1e-3, 0.8, 1).unwrap();
        let b = random_sparse_channel(4, 9, 1e-3, 0.8, 2).unwrap();
        let (da, db) = (a.dense_rates().unwrap(), b.dense_rates().unwrap());
        let want = 0.5 * da.iter().zip(&db).map(|(x, y)| (x - y).abs()).sum::<f64>();
        assert!((tv_distance(&a, &b).unwrap() - want).abs() < 1e-14);
    }

    #[test]
    fn bound_values() {
        let b = BoundParams { xi: 1e-4, bins: 1024, sparsity: 32 };
        assert!((b.linf_bound() - 6.25e-6).abs() < 1e-20);
        assert!((b.tv_bound() - 1e-4).abs() < 1e-18);
        let ch = SparsePauliChannel::identity_channel(3).unwrap();
        let rep = compare(&ch, &channel_result(&ch), None, Some(b)).unwrap();
        assert_eq!(rep.within_linf_bound(), Some(true));
        assert_eq!(rep.within_tv_bound(), Some(true));
    }

    #[test]
    fn dimension_mismatch() {
        let ch = SparsePauliChannel::identity_channel(3).unwrap();
        let other = SparsePauliChannel::identity_channel(2).unwrap();
        assert!(compare(&ch, &channel_result(&other), None, None).is_err());
        assert!(tv_distance(&ch, &other).is_err());
    }

    #[test]
    fn csv_has_one_row_per_label() {
        let ch = random_sparse_channel(4, 6, 1e-3, 0.9, 0).unwrap();
        let rep = compare(&ch, &channel_result(&ch), None, None).unwrap();
        let mut buf = Vec::new();
        rep.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 7);
        assert!(text.lines().nth(1).unwrap().starts_with("IIII,0,"));
    }
}

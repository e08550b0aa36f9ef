//! Subsampling matrices, offsets and local-stabilizer experiment designs.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::detector::code::OffsetCode;
use crate::error::{Error, Result};
use crate::gf2::{low_mask, parity, Gf2Matrix};
use crate::pauli::{is_stabilizer_group, swap_halves, PauliLabel, StabilizerGroup, MAX_QUBITS};
use crate::wht::WhtOrdering;

/// Generators of the five mutually unbiased two-qubit stabilizer groups.
pub const TWO_QUBIT_GROUPS: [[&str; 2]; 5] = [["IX", "XI"], ["IY", "YI"], ["ZI", "IZ"], ["ZX", "YZ"], ["ZY", "XZ"]];

/// Generators of the three single-qubit stabilizer groups.
pub const ONE_QUBIT_GROUPS: [&str; 3] = ["X", "Y", "Z"];

/// Offset `J e_t`: its symplectic product with `m` is bit `t` of `m`.
#[inline]
pub fn basis_offset(t: usize, n: usize) -> u64 {
    swap_halves(1 << t, n as u32)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum OffsetKind {
    Random,
    /// Carries code bit `row`, read relative to offset `anchor`.
    Coded { anchor: usize, row: usize },
    /// The shift `J e_bit` used by the heuristic read-out.
    Basis { bit: usize },
}

/// The offsets `d_0 .. d_{P-1}` of one subsampling group.
///
/// The first `p1` entries are the random offsets used for detection and value
/// estimation. Coded and basis offsets follow.
#[derive(Clone, Debug)]
pub struct OffsetSet {
    n: usize,
    offsets: Vec<u64>,
    kinds: Vec<OffsetKind>,
    p1: usize,
    p2: usize,
    code: Option<Arc<dyn OffsetCode>>,
}

impl OffsetSet {
    /// `p1` random offsets, then one anchored offset per code bit, then
    /// optionally the `2n` basis offsets.
    pub fn random(n: usize, p1: usize, code: Option<Arc<dyn OffsetCode>>, include_basis: bool, seed: u64) -> Result<Self> {
        check_qubits(n)?;
        if p1 == 0 {
            return Err(Error::Infeasible("at least one random offset is required".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mask = low_mask(2 * n);
        let mut offsets: Vec<u64> = (0..p1).map(|_| rng.random::<u64>() & mask).collect();
        let mut kinds = vec![OffsetKind::Random; p1];
        let mut p2 = 0;
        if let Some(code) = &code {
            if code.message_bits() != 2 * n {
                return Err(Error::Dimension { expected: 2 * n, found: code.message_bits() });
            }
            p2 = code.len();
            for row in 0..p2 {
                let anchor = row % p1;
                offsets.push(offsets[anchor] ^ swap_halves(code.generator_row(row), n as u32));
                kinds.push(OffsetKind::Coded { anchor, row });
            }
        }
        if include_basis {
            for bit in 0..2 * n {
                offsets.push(basis_offset(bit, n));
                kinds.push(OffsetKind::Basis { bit });
            }
        }
        Ok(OffsetSet { n, offsets, kinds, p1, p2, code })
    }

    /// Zero followed by the `2n` basis offsets.
    pub fn heuristic(n: usize) -> Result<Self> {
        check_qubits(n)?;
        let mut offsets = vec![0];
        let mut kinds = vec![OffsetKind::Random];
        for bit in 0..2 * n {
            offsets.push(basis_offset(bit, n));
            kinds.push(OffsetKind::Basis { bit });
        }
        Ok(OffsetSet { n, offsets, kinds, p1: 1, p2: 0, code: None })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    pub fn p1(&self) -> usize {
        self.p1
    }

    pub fn p2(&self) -> usize {
        self.p2
    }

    pub fn offsets(&self) -> &[u64] {
        &self.offsets
    }

    pub fn kinds(&self) -> &[OffsetKind] {
        &self.kinds
    }

    pub fn code(&self) -> Option<&dyn OffsetCode> {
        self.code.as_deref()
    }

    /// Index of basis offset `J e_bit`, if present.
    pub fn basis_positions(&self) -> Option<Vec<usize>> {
        let mut pos = vec![usize::MAX; 2 * self.n];
        for (i, k) in self.kinds.iter().enumerate() {
            if let OffsetKind::Basis { bit } = k {
                pos[*bit] = i;
            }
        }
        pos.iter().all(|&p| p != usize::MAX).then_some(pos)
    }
}

fn check_qubits(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::QubitCount(n));
    }
    Ok(())
}

/// Uniformly random `2n x b` matrix of full column rank, by rejection.
pub fn random_subsampling_matrix(n: usize, b: usize, seed: u64) -> Result<Gf2Matrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(Gf2Matrix::from_col_bits(&random_columns(n, b, &mut rng)?, 2 * n)?)
}

fn random_columns(n: usize, b: usize, rng: &mut ChaCha8Rng) -> Result<Vec<u64>> {
    check_qubits(n)?;
    if b == 0 || b > 2 * n {
        return Err(Error::Infeasible(format!("need 0 < b <= 2n, got b = {b} for n = {n}")));
    }
    let mask = low_mask(2 * n);
    loop {
        let cols: Vec<u64> = (0..b).map(|_| rng.random::<u64>() & mask).collect();
        if Gf2Matrix::from_col_bits(&cols, 2 * n)?.rank() == b {
            return Ok(cols);
        }
    }
}

/// One hash: the matrix `M` (stored by columns), the query matrix `M'` and the
/// offsets.
#[derive(Clone, Debug)]
pub struct SubsamplingGroup {
    n: usize,
    hash_cols: Vec<u64>,
    query_cols: Vec<u64>,
    offsets: OffsetSet,
    physical: bool,
}

/// `M' = J_n M J_b` for even `b`; `J_n M` for odd `b`, where the transform
/// runs in natural ordering instead. Both give the same bins.
fn query_columns(cols: &[u64], n: usize) -> Vec<u64> {
    let b = cols.len();
    (0..b)
        .map(|i| {
            let src = if b % 2 == 0 { (i + b / 2) % b } else { i };
            swap_halves(cols[src], n as u32)
        })
        .collect()
}

impl SubsamplingGroup {
    /// From the columns of `M`.
    pub fn new(n: usize, hash_cols: Vec<u64>, offsets: OffsetSet) -> Result<Self> {
        check_qubits(n)?;
        if offsets.num_qubits() != n {
            return Err(Error::Dimension { expected: n, found: offsets.num_qubits() });
        }
        let b = hash_cols.len();
        if b == 0 || b > 2 * n || Gf2Matrix::from_col_bits(&hash_cols, 2 * n)?.rank() != b {
            return Err(Error::Shape(format!("subsampling matrix must be 2n x b with full column rank (b = {b})")));
        }
        let query_cols = query_columns(&hash_cols, n);
        Ok(SubsamplingGroup { n, hash_cols, query_cols, offsets, physical: false })
    }

    /// From the columns of `M'`.
    pub fn from_query_columns(n: usize, query_cols: &[u64], offsets: OffsetSet) -> Result<Self> {
        // The map M -> M' is an involution, so applying it to M' gives M.
        let g = Self::new(n, query_columns(query_cols, n), offsets)?;
        debug_assert_eq!(g.query_cols, query_cols);
        Ok(g)
    }

    /// From the columns of `M'`, which must be commuting generators.
    pub fn from_stabilizer(n: usize, generators: &[u64], offsets: OffsetSet) -> Result<Self> {
        let gens = Gf2Matrix::from_row_bits(generators, 2 * n)?;
        if !is_stabilizer_group(&gens) {
            return Err(Error::Infeasible("query columns do not generate a stabilizer group".into()));
        }
        let mut g = Self::from_query_columns(n, generators, offsets)?;
        g.physical = true;
        Ok(g)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn b(&self) -> usize {
        self.hash_cols.len()
    }

    pub fn num_bins(&self) -> usize {
        1 << self.b()
    }

    pub fn is_physical(&self) -> bool {
        self.physical
    }

    pub fn offsets(&self) -> &OffsetSet {
        &self.offsets
    }

    pub fn hash_columns(&self) -> &[u64] {
        &self.hash_cols
    }

    pub fn query_columns(&self) -> &[u64] {
        &self.query_cols
    }

    pub fn matrix(&self) -> Gf2Matrix {
        Gf2Matrix::from_col_bits(&self.hash_cols, 2 * self.n).expect("validated on construction")
    }

    pub fn query_matrix(&self) -> Gf2Matrix {
        Gf2Matrix::from_col_bits(&self.query_cols, 2 * self.n).expect("validated on construction")
    }

    pub fn ordering(&self) -> WhtOrdering {
        if self.b() % 2 == 0 {
            WhtOrdering::Symplectic
        } else {
            WhtOrdering::Natural
        }
    }

    /// Bin of label `m`: `j = M^T m`.
    #[inline]
    pub fn hash(&self, m: u64) -> usize {
        self.hash_cols
            .iter()
            .enumerate()
            .fold(0, |j, (i, &col)| j | (usize::from(parity(col & m)) << i))
    }

    /// `M' l` for every `l` in `F_2^b`.
    pub fn coset_indices(&self) -> Vec<u64> {
        let mut ks = vec![0u64; self.num_bins()];
        for l in 1..ks.len() {
            ks[l] = ks[l & (l - 1)] ^ self.query_cols[l.trailing_zeros() as usize];
        }
        ks
    }

    /// Whether `M'` spans an isotropic subspace.
    pub fn is_isotropic(&self) -> bool {
        self.query_cols
            .iter()
            .enumerate()
            .all(|(i, &a)| self.query_cols[i + 1..].iter().all(|&b| !crate::pauli::symplectic_bits(a, b, self.n as u32)))
    }
}

/// How the bins of a design are meant to be decoded.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DesignMode {
    /// Random hashes with coded offsets.
    Provable,
    /// Basis offsets read directly.
    Heuristic,
}

#[derive(Clone, Debug)]
pub struct SubsamplingDesign {
    n: usize,
    mode: DesignMode,
    groups: Vec<SubsamplingGroup>,
}

impl SubsamplingDesign {
    pub fn new(n: usize, mode: DesignMode, groups: Vec<SubsamplingGroup>) -> Result<Self> {
        let first = groups.first().ok_or_else(|| Error::Infeasible("a design needs at least one group".into()))?;
        let (b, p) = (first.b(), first.offsets.len());
        for g in &groups {
            if g.n != n {
                return Err(Error::Dimension { expected: n, found: g.n });
            }
            if g.b() != b || g.offsets.len() != p || g.offsets.p1 != first.offsets.p1 {
                return Err(Error::Shape("all groups must share b and the offset layout".into()));
            }
        }
        if mode == DesignMode::Heuristic && groups.iter().any(|g| g.offsets.offsets[0] != 0 || g.offsets.basis_positions().is_none()) {
            return Err(Error::Infeasible("heuristic designs need the zero offset first and all basis offsets".into()));
        }
        Ok(SubsamplingDesign { n, mode, groups })
    }

    /// `c` random hashes of `b` bits, `p1` random offsets each, coded offsets
    /// from `code`.
    pub fn provable(n: usize, b: usize, c: usize, p1: usize, code: Arc<dyn OffsetCode>, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let groups = (0..c)
            .map(|_| {
                let cols = random_columns(n, b, &mut rng)?;
                let offsets = OffsetSet::random(n, p1, Some(code.clone()), false, rng.random())?;
                SubsamplingGroup::new(n, cols, offsets)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, DesignMode::Provable, groups)
    }

    /// `c` random hashes read with basis offsets (no physical constraint).
    pub fn heuristic_random(n: usize, b: usize, c: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let groups = (0..c)
            .map(|_| SubsamplingGroup::new(n, random_columns(n, b, &mut rng)?, OffsetSet::heuristic(n)?))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, DesignMode::Heuristic, groups)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> DesignMode {
        self.mode
    }

    pub fn groups(&self) -> &[SubsamplingGroup] {
        &self.groups
    }

    pub fn num_groups(&self) -> usize {
        self.groups.len()
    }

    pub fn b(&self) -> usize {
        self.groups[0].b()
    }

    pub fn num_bins(&self) -> usize {
        self.groups[0].num_bins()
    }

    pub fn num_offsets(&self) -> usize {
        self.groups[0].offsets.len()
    }

    pub fn p1(&self) -> usize {
        self.groups[0].offsets.p1
    }

    /// Upper bound `C P B` on the number of oracle calls.
    pub fn max_queries(&self) -> usize {
        self.num_groups() * self.num_offsets() * self.num_bins()
    }
}

/// Every index the binning stage asks for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuerySet {
    /// Calls made, repeats included.
    pub total: usize,
    pub distinct: BTreeSet<u64>,
}

pub fn design_query_set(design: &SubsamplingDesign) -> QuerySet {
    let mut distinct = BTreeSet::new();
    let mut total = 0;
    for g in design.groups() {
        let ks = g.coset_indices();
        for &d in g.offsets.offsets() {
            total += ks.len();
            distinct.extend(ks.iter().map(|k| k ^ d));
        }
    }
    QuerySet { total, distinct }
}

/// A set of qubits (one or two) measured in one of the fixed local groups.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Block {
    pub qubits: Vec<usize>,
    /// Index into [`TWO_QUBIT_GROUPS`] or [`ONE_QUBIT_GROUPS`].
    pub stabilizer: usize,
}

impl Block {
    fn generators(&self, n: usize) -> Vec<u64> {
        let words: Vec<&str> = if self.qubits.len() == 2 {
            TWO_QUBIT_GROUPS[self.stabilizer].to_vec()
        } else {
            vec![ONE_QUBIT_GROUPS[self.stabilizer]]
        };
        words.iter().map(|w| embed(w, &self.qubits, n)).collect()
    }

    fn choices(&self) -> usize {
        if self.qubits.len() == 2 {
            TWO_QUBIT_GROUPS.len()
        } else {
            ONE_QUBIT_GROUPS.len()
        }
    }
}

/// Places a short Pauli word on the given qubits of an `n`-qubit label.
fn embed(word: &str, qubits: &[usize], n: usize) -> u64 {
    word.chars().zip(qubits).fold(0, |acc, (ch, &q)| {
        let (x, z) = match ch {
            'X' => (1, 0),
            'Y' => (1, 1),
            'Z' => (0, 1),
            _ => (0, 0),
        };
        acc | (x << q) | (z << (q + n))
    })
}

/// One physical setting: a local stabilizer group assigned block by block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Experiment {
    /// Subsampling group this setting feeds.
    pub group: usize,
    pub blocks: Vec<Block>,
}

impl Experiment {
    pub fn generators(&self, n: usize) -> Vec<u64> {
        self.blocks.iter().flat_map(|b| b.generators(n)).collect()
    }

    pub fn stabilizer(&self, n: usize) -> Result<StabilizerGroup> {
        StabilizerGroup::new(Gf2Matrix::from_row_bits(&self.generators(n), 2 * n)?)
    }

    /// Whether the setting measures eigenvalue `k`, i.e. `k` restricted to
    /// every block lies in that block's group.
    pub fn measures(&self, k: u64, n: usize) -> bool {
        self.blocks.iter().all(|block| {
            let mask = block.qubits.iter().fold(0u64, |m, &q| m | (1 << q) | (1 << (q + n)));
            let gens = block.generators(n);
            crate::pauli::span(&gens).contains(&(k & mask))
        })
    }

    fn signature(&self) -> Vec<(Vec<usize>, usize)> {
        let mut sig: Vec<_> = self.blocks.iter().map(|b| (b.qubits.clone(), b.stabilizer)).collect();
        sig.sort();
        sig
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DesignType {
    #[serde(rename = "type1")]
    TypeI,
    #[serde(rename = "type2")]
    TypeII,
}

/// The list of physical settings behind a local design.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentDesign {
    pub kind: DesignType,
    pub n: usize,
    /// Nominal experiment count by the design's counting rule.
    pub count: usize,
    /// Physically distinct settings, each listed once.
    pub experiments: Vec<Experiment>,
}

impl ExperimentDesign {
    pub fn distinct_settings(&self) -> usize {
        self.experiments.iter().map(Experiment::signature).collect::<BTreeSet<_>>().len()
    }

    /// Whether some setting measures eigenvalue `k`.
    pub fn covers(&self, k: u64) -> bool {
        self.experiments.iter().any(|e| e.measures(k, self.n))
    }
}

/// Type I experiment count `C (2n + 1)`.
pub fn type1_count(n: usize, c: usize) -> usize {
    c * (2 * n + 1)
}

/// Type II experiment count `1 + 8n(n - 2)`.
pub fn type2_count(n: usize) -> usize {
    1 + 8 * n * n.saturating_sub(2)
}

/// Distinct Type II settings: the base, one block switched, or two blocks
/// switched, giving `1 + 2n(n - 1)`.
pub fn type2_distinct_count(n: usize) -> usize {
    1 + 2 * n * n.saturating_sub(1)
}

fn pairing(n: usize, shift: usize) -> Vec<Vec<usize>> {
    let mut blocks = Vec::new();
    let mut q = 0;
    if shift % 2 == 1 && n > 1 {
        blocks.push(vec![0]);
        q = 1;
    }
    while q + 1 < n {
        blocks.push(vec![q, q + 1]);
        q += 2;
    }
    if q < n {
        blocks.push(vec![q]);
    }
    blocks
}

fn random_blocks(n: usize, shift: usize, rng: &mut ChaCha8Rng) -> Vec<Block> {
    pairing(n, shift)
        .into_iter()
        .map(|qubits| {
            let choices = if qubits.len() == 2 { TWO_QUBIT_GROUPS.len() } else { ONE_QUBIT_GROUPS.len() };
            Block { qubits, stabilizer: rng.random_range(0..choices) }
        })
        .collect()
}

/// The base setting plus, for each block, the setting with that block moved
/// to each of its other groups.
fn single_switches(group: usize, base: &[Block]) -> Vec<Experiment> {
    let mut out = vec![Experiment { group, blocks: base.to_vec() }];
    for (i, block) in base.iter().enumerate() {
        for s in (0..block.choices()).filter(|&s| s != block.stabilizer) {
            let mut blocks = base.to_vec();
            blocks[i].stabilizer = s;
            out.push(Experiment { group, blocks });
        }
    }
    out
}

/// Type I local design with `c` groups. Group `c` pairs qubits starting at
/// qubit `c mod 2`, so odd groups straddle the even groups' pairs.
pub fn local_stabilizer_design(n: usize, c: usize, seed: u64) -> Result<(SubsamplingDesign, ExperimentDesign)> {
    check_qubits(n)?;
    if c == 0 {
        return Err(Error::Infeasible("need at least one group".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut groups = Vec::with_capacity(c);
    let mut experiments = Vec::new();
    for g in 0..c {
        let base = random_blocks(n, g, &mut rng);
        let gens: Vec<u64> = base.iter().flat_map(|b| b.generators(n)).collect();
        groups.push(SubsamplingGroup::from_stabilizer(n, &gens, OffsetSet::heuristic(n)?)?);
        experiments.extend(single_switches(g, &base));
    }
    let design = SubsamplingDesign::new(n, DesignMode::Heuristic, groups)?;
    let count = experiments.len();
    debug_assert_eq!(count, type1_count(n, c));
    Ok((design, ExperimentDesign { kind: DesignType::TypeI, n, count, experiments }))
}

/// Type II design: one group per qubit pair, with that pair fully resolved
/// (`b = n + 2`) and the other pairs in their base groups.
pub fn type2_design(n: usize, seed: u64) -> Result<(SubsamplingDesign, ExperimentDesign)> {
    check_qubits(n)?;
    if n < 4 || n % 2 != 0 {
        return Err(Error::Infeasible(format!("type II designs need an even n >= 4, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = random_blocks(n, 0, &mut rng);
    let mut groups = Vec::with_capacity(n / 2);
    for (k, pair) in base.iter().enumerate() {
        let mut gens: Vec<u64> = pair.qubits.iter().flat_map(|&q| [1u64 << q, 1u64 << (q + n)]).collect();
        gens.extend(base.iter().enumerate().filter(|&(i, _)| i != k).flat_map(|(_, b)| b.generators(n)));
        // Not isotropic: the pair's X and Z both appear, so the coset spans
        // all five settings of that pair.
        groups.push(SubsamplingGroup::from_query_columns(n, &gens, OffsetSet::heuristic(n)?)?);
    }
    let mut experiments = single_switches(0, &base);
    for i in 0..base.len() {
        for j in i + 1..base.len() {
            for si in (0..5).filter(|&s| s != base[i].stabilizer) {
                for sj in (0..5).filter(|&s| s != base[j].stabilizer) {
                    let mut blocks = base.clone();
                    blocks[i].stabilizer = si;
                    blocks[j].stabilizer = sj;
                    experiments.push(Experiment { group: 0, blocks });
                }
            }
        }
    }
    let design = SubsamplingDesign::new(n, DesignMode::Heuristic, groups)?;
    Ok((design, ExperimentDesign { kind: DesignType::TypeII, n, count: type2_count(n), experiments }))
}

#[derive(Serialize)]
struct OffsetView {
    offset: String,
    #[serde(flatten)]
    kind: OffsetKind,
}

#[derive(Serialize)]
struct GroupView {
    b: usize,
    physical: bool,
    /// Rows of `M`, `2n` strings of `b` bits.
    matrix: Vec<String>,
    /// Generators spanned by the queried cosets.
    query_generators: Vec<String>,
    p1: usize,
    p2: usize,
    code: Option<String>,
    offsets: Vec<OffsetView>,
}

#[derive(Serialize)]
struct DesignView<'a> {
    n: usize,
    mode: DesignMode,
    groups: Vec<GroupView>,
    #[serde(skip_serializing_if = "Option::is_none")]
    experiments: Option<&'a ExperimentDesign>,
    #[serde(skip_serializing_if = "Option::is_none")]
    meta: Option<serde_json::Value>,
}

/// Design file contents. Offsets are written as `x|z` strings.
pub fn design_to_json(
    design: &SubsamplingDesign,
    experiments: Option<&ExperimentDesign>,
    meta: Option<serde_json::Value>,
) -> Result<String> {
    let n = design.n;
    let groups = design
        .groups
        .iter()
        .map(|g| GroupView {
            b: g.b(),
            physical: g.physical,
            matrix: g.matrix().to_bit_strings(),
            query_generators: g.query_cols.iter().map(|&c| PauliLabel::from_raw(n, c).to_word()).collect(),
            p1: g.offsets.p1,
            p2: g.offsets.p2,
            code: g.offsets.code().map(|c| c.describe()),
            offsets: g
                .offsets
                .offsets
                .iter()
                .zip(&g.offsets.kinds)
                .map(|(&d, &kind)| OffsetView { offset: PauliLabel::from_raw(n, d).to_xz_string(), kind })
                .collect(),
        })
        .collect();
    Ok(serde_json::to_string_pretty(&DesignView { n, mode: design.mode, groups, experiments, meta })?)
}

//! Pauli operators modulo phase as `2n`-bit strings.
//!
//! A label packs the x-half in bits `0..n` and the z-half in bits `n..2n`;
//! qubit `q` owns x-bit `q` and z-bit `n + q`. In text form qubit 0 is the
//! leftmost character, both for Pauli words (`"XIZ"`) and for the `x|z` bit
//! format (`"100|001"`).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::gf2::{low_mask, parity, Gf2Matrix};

/// Largest qubit count a single-word label can hold.
pub const MAX_QUBITS: usize = 32;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliLabel {
    n: u8,
    bits: u64,
}

/// Swaps the x and z halves of a `2n`-bit word (multiplication by `J_n`).
#[inline]
pub fn swap_halves(bits: u64, n: u32) -> u64 {
    let mask = low_mask(n as usize);
    ((bits & mask) << n) | ((bits >> n) & mask)
}

/// Symplectic product of two raw `2n`-bit words.
#[inline]
pub fn symplectic_bits(a: u64, b: u64, n: u32) -> bool {
    parity(a & swap_halves(b, n))
}

impl PauliLabel {
    pub fn new(n: usize, bits: u64) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::QubitCount(n));
        }
        if bits & !low_mask(2 * n) != 0 {
            return Err(Error::Malformed(format!("label bits {bits:#x} exceed {} bits", 2 * n)));
        }
        Ok(PauliLabel { n: n as u8, bits })
    }

    /// Builds a label without range checks; callers guarantee `bits < 4^n`.
    #[inline]
    pub(crate) fn from_raw(n: usize, bits: u64) -> Self {
        debug_assert!(n >= 1 && n <= MAX_QUBITS && bits & !low_mask(2 * n) == 0);
        PauliLabel { n: n as u8, bits }
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(n, 0)
    }

    pub fn from_xz(n: usize, x: u64, z: u64) -> Result<Self> {
        let mask = low_mask(n.min(64));
        if x & !mask != 0 || z & !mask != 0 {
            return Err(Error::Malformed(format!("x/z halves do not fit in {n} bits")));
        }
        Self::new(n, x | (z << n))
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn bits(&self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn x_bits(&self) -> u64 {
        self.bits & low_mask(self.n as usize)
    }

    #[inline]
    pub fn z_bits(&self) -> u64 {
        self.bits >> self.n
    }

    pub fn is_identity(&self) -> bool {
        self.bits == 0
    }

    /// Number of qubits acted on non-trivially.
    pub fn weight(&self) -> usize {
        (self.x_bits() | self.z_bits()).count_ones() as usize
    }

    /// Product modulo phase.
    pub fn compose(&self, other: &PauliLabel) -> Result<PauliLabel> {
        self.check_same(other)?;
        Ok(PauliLabel { n: self.n, bits: self.bits ^ other.bits })
    }

    /// The label with x and z halves exchanged.
    pub fn symplectic_dual(&self) -> PauliLabel {
        PauliLabel { n: self.n, bits: swap_halves(self.bits, self.n as u32) }
    }

    /// Single-qubit Pauli on qubit `q` as a character in `IXYZ`.
    pub fn qubit_char(&self, q: usize) -> char {
        let x = (self.bits >> q) & 1;
        let z = (self.bits >> (q + self.n as usize)) & 1;
        match (x, z) {
            (0, 0) => 'I',
            (1, 0) => 'X',
            (1, 1) => 'Y',
            _ => 'Z',
        }
    }

    /// Pauli word, qubit 0 first.
    pub fn to_word(&self) -> String {
        (0..self.n as usize).map(|q| self.qubit_char(q)).collect()
    }

    /// `x|z` bit-string form, qubit 0 first in each half.
    pub fn to_xz_string(&self) -> String {
        let n = self.n as usize;
        let half = |h: u64| -> String { (0..n).map(|q| if (h >> q) & 1 == 1 { '1' } else { '0' }).collect() };
        format!("{}|{}", half(self.x_bits()), half(self.z_bits()))
    }

    pub fn parse_word(s: &str) -> Result<Self> {
        let n = s.chars().count();
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::ParsePauli { input: s.to_string(), reason: format!("length {n} out of range") });
        }
        let (mut x, mut z) = (0u64, 0u64);
        for (q, ch) in s.chars().enumerate() {
            match ch {
                'I' => {}
                'X' => x |= 1 << q,
                'Z' => z |= 1 << q,
                'Y' => {
                    x |= 1 << q;
                    z |= 1 << q;
                }
                other => {
                    return Err(Error::ParsePauli {
                        input: s.to_string(),
                        reason: format!("invalid character {other:?}"),
                    })
                }
            }
        }
        Self::from_xz(n, x, z)
    }

    pub fn parse_xz(s: &str) -> Result<Self> {
        let err = |reason: &str| Error::ParsePauli { input: s.to_string(), reason: reason.to_string() };
        let (xs, zs) = s.split_once('|').ok_or_else(|| err("missing '|'"))?;
        if xs.len() != zs.len() {
            return Err(err("x and z halves differ in length"));
        }
        let n = xs.len();
        if n == 0 || n > MAX_QUBITS {
            return Err(err("length out of range"));
        }
        let half = |h: &str| -> Result<u64> {
            h.chars().enumerate().try_fold(0u64, |acc, (q, ch)| match ch {
                '0' => Ok(acc),
                '1' => Ok(acc | (1 << q)),
                _ => Err(err("bits must be 0 or 1")),
            })
        };
        Self::from_xz(n, half(xs)?, half(zs)?)
    }

    fn check_same(&self, other: &PauliLabel) -> Result<()> {
        if self.n != other.n {
            return Err(Error::Dimension { expected: self.n as usize, found: other.n as usize });
        }
        Ok(())
    }
}

/// `<a, b> = a_x . b_z + a_z . b_x mod 2`; zero iff the Paulis commute.
pub fn symplectic_product(a: &PauliLabel, b: &PauliLabel) -> Result<u8> {
    a.check_same(b)?;
    Ok(symplectic_bits(a.bits, b.bits, a.n as u32) as u8)
}

pub fn weight(a: &PauliLabel) -> usize {
    a.weight()
}

impl FromStr for PauliLabel {
    type Err = Error;

    /// Accepts either a Pauli word or the `x|z` bit form.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.contains('|') {
            Self::parse_xz(s)
        } else {
            Self::parse_word(s)
        }
    }
}

impl fmt::Display for PauliLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_word())
    }
}

impl fmt::Debug for PauliLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliLabel({})", self.to_word())
    }
}

impl Serialize for PauliLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_word())
    }
}

impl<'de> Deserialize<'de> for PauliLabel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Generators of a stabilizer group, one `2n`-bit row per generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerGroup {
    n: usize,
    generators: Gf2Matrix,
}

impl StabilizerGroup {
    pub fn new(generators: Gf2Matrix) -> Result<Self> {
        if generators.cols() % 2 != 0 || generators.cols() == 0 {
            return Err(Error::Shape(format!("generator rows need 2n columns, got {}", generators.cols())));
        }
        if !is_stabilizer_group(&generators) {
            return Err(Error::Malformed("generators are dependent or do not commute".into()));
        }
        Ok(StabilizerGroup { n: generators.cols() / 2, generators })
    }

    pub fn from_labels(labels: &[PauliLabel]) -> Result<Self> {
        let n = labels.first().map(|l| l.num_qubits()).ok_or_else(|| Error::Shape("no generators".into()))?;
        if let Some(bad) = labels.iter().find(|l| l.num_qubits() != n) {
            return Err(Error::Dimension { expected: n, found: bad.num_qubits() });
        }
        let rows: Vec<u64> = labels.iter().map(|l| l.bits()).collect();
        Self::new(Gf2Matrix::from_row_bits(&rows, 2 * n)?)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &Gf2Matrix {
        &self.generators
    }

    pub fn generator_labels(&self) -> Vec<PauliLabel> {
        (0..self.generators.rows()).map(|r| PauliLabel::from_raw(self.n, self.generators.row_bits(r))).collect()
    }

    /// All `2^b` group elements, in the order of the binary expansion of the
    /// generator coefficients.
    pub fn elements(&self) -> Vec<PauliLabel> {
        span(&self.generator_labels().iter().map(|l| l.bits()).collect::<Vec<_>>())
            .into_iter()
            .map(|b| PauliLabel::from_raw(self.n, b))
            .collect()
    }
}

/// Every GF(2) combination of `gens`, indexed by the coefficient bits.
pub(crate) fn span(gens: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64; 1 << gens.len()];
    for (i, &g) in gens.iter().enumerate() {
        let half = 1 << i;
        for k in 0..half {
            out[half + k] = out[k] ^ g;
        }
    }
    out
}

/// True iff the rows of `s` (shape `b x 2n`) pairwise commute and are linearly
/// independent.
pub fn is_stabilizer_group(s: &Gf2Matrix) -> bool {
    if s.cols() % 2 != 0 || s.cols() > 2 * MAX_QUBITS {
        return false;
    }
    let n = (s.cols() / 2) as u32;
    let rows: Vec<u64> = (0..s.rows()).map(|r| s.row_bits(r)).collect();
    let isotropic = rows
        .iter()
        .enumerate()
        .all(|(i, &a)| rows[i + 1..].iter().all(|&b| !symplectic_bits(a, b, n)));
    isotropic && s.rank() == s.rows()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> PauliLabel {
        s.parse().unwrap()
    }

    #[test]
    fn x_and_z_anticommute() {
        assert_eq!(symplectic_product(&p("X"), &p("Z")).unwrap(), 1);
    }

    #[test]
    fn labels_commute_with_themselves() {
        for w in ["I", "Y", "XYZ", "ZZIY"] {
            assert_eq!(symplectic_product(&p(w), &p(w)).unwrap(), 0);
        }
    }

    #[test]
    fn xy_commutes_with_zz() {
        assert_eq!(symplectic_product(&p("XY"), &p("ZZ")).unwrap(), 0);
    }

    #[test]
    fn mismatched_sizes_are_rejected() {
        assert!(matches!(symplectic_product(&p("X"), &p("XZ")), Err(Error::Dimension { .. })));
    }

    #[test]
    fn parse_words() {
        assert_eq!(p("II").bits(), 0);
        let y = p("Y");
        assert_eq!((y.x_bits(), y.z_bits()), (1, 1));
        let xz = p("XZ");
        assert_eq!(xz.to_xz_string(), "10|01");
        assert_eq!(p("10|01"), xz);
        assert!("XQ".parse::<PauliLabel>().is_err());
        assert!("10|1".parse::<PauliLabel>().is_err());
        assert!("".parse::<PauliLabel>().is_err());
    }

    #[test]
    fn weights() {
        assert_eq!(p("IIII").weight(), 0);
        assert_eq!(p("IYIZ").weight(), 2);
        assert_eq!(p("YYYY").weight(), 4);
    }

    #[test]
    fn stabilizer_examples() {
        let rows = |ws: &[&str]| {
            let bits: Vec<u64> = ws.iter().map(|w| p(w).bits()).collect();
            Gf2Matrix::from_row_bits(&bits, 2 * ws[0].len()).unwrap()
        };
        assert!(is_stabilizer_group(&rows(&["IX", "XI"])));
        assert!(!is_stabilizer_group(&rows(&["X", "Z"])));
        assert!(is_stabilizer_group(&rows(&["ZY", "XZ"])));
        assert!(!is_stabilizer_group(&rows(&["ZY", "ZY"])), "dependent rows");
    }

    #[test]
    fn group_elements_cover_the_span() {
        let g = StabilizerGroup::from_labels(&[p("IX"), p("XI")]).unwrap();
        let mut words: Vec<String> = g.elements().iter().map(|l| l.to_word()).collect();
        words.sort();
        assert_eq!(words, ["II", "IX", "XI", "XX"]);
    }

    // Explicit complex Pauli matrices with Gaussian-integer entries.
    type C = (i64, i64);
    fn cmul(a: C, b: C) -> C {
        (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
    }
    fn single(ch: char) -> [[C; 2]; 2] {
        let (o, z, i, m) = ((1, 0), (0, 0), (0, 1), (0, -1));
        match ch {
            'I' => [[o, z], [z, o]],
            'X' => [[z, o], [o, z]],
            'Y' => [[z, m], [i, z]],
            _ => [[o, z], [z, (-1, 0)]],
        }
    }
    fn dense(label: &PauliLabel) -> Vec<Vec<C>> {
        let mut m = vec![vec![(1, 0)]];
        for ch in label.to_word().chars() {
            let s = single(ch);
            let d = m.len();
            let mut out = vec![vec![(0, 0); 2 * d]; 2 * d];
            for r in 0..d {
                for c in 0..d {
                    for a in 0..2 {
                        for b in 0..2 {
                            out[r * 2 + a][c * 2 + b] = cmul(m[r][c], s[a][b]);
                        }
                    }
                }
            }
            m = out;
        }
        m
    }
    fn matmul(a: &[Vec<C>], b: &[Vec<C>]) -> Vec<Vec<C>> {
        let d = a.len();
        (0..d)
            .map(|r| {
                (0..d)
                    .map(|c| {
                        (0..d).fold((0, 0), |acc, k| {
                            let v = cmul(a[r][k], b[k][c]);
                            (acc.0 + v.0, acc.1 + v.1)
                        })
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn commutation_matches_explicit_matrices() {
        for n in 1..=2usize {
            for a in 0..(1u64 << (2 * n)) {
                for b in 0..(1u64 << (2 * n)) {
                    let (la, lb) = (PauliLabel::new(n, a).unwrap(), PauliLabel::new(n, b).unwrap());
                    let (ma, mb) = (dense(&la), dense(&lb));
                    let commute = matmul(&ma, &mb) == matmul(&mb, &ma);
                    assert_eq!(symplectic_product(&la, &lb).unwrap() == 0, commute, "{la} {lb}");
                }
            }
        }
    }

    #[test]
    fn bilinear_and_symmetric_exhaustive_small() {
        for n in 1..=3usize {
            let all = 1u64 << (2 * n);
            for a in 0..all {
                for b in 0..all {
                    let ab = symplectic_bits(a, b, n as u32);
                    assert_eq!(ab, symplectic_bits(b, a, n as u32));
                    for c in (0..all).step_by(3) {
                        let lhs = symplectic_bits(a ^ b, c, n as u32);
                        let rhs = symplectic_bits(a, c, n as u32) ^ symplectic_bits(b, c, n as u32);
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn stabilizer_check_matches_brute_force() {
        // S J S^T = 0 and full row rank, enumerated for n <= 3, b <= 3.
        for n in 1..=3usize {
            let j = Gf2Matrix::symplectic_form(n);
            let all = 1u64 << (2 * n);
            let mut rows = Vec::new();
            let mut count = 0;
            fn rec(
                rows: &mut Vec<u64>,
                all: u64,
                b: usize,
                n: usize,
                j: &Gf2Matrix,
                count: &mut usize,
            ) {
                if rows.len() == b {
                    let s = Gf2Matrix::from_row_bits(rows, 2 * n).unwrap();
                    let sjst = s.mul(j).unwrap().mul(&s.transpose()).unwrap();
                    let expect = sjst.is_zero() && s.rank() == b;
                    assert_eq!(is_stabilizer_group(&s), expect, "{rows:?}");
                    *count += 1;
                    return;
                }
                // Sparse stride keeps n = 3 tractable while still mixing all rows.
                let stride = if n == 3 { 7 } else { 1 };
                for r in (0..all).step_by(stride) {
                    rows.push(r);
                    rec(rows, all, b, n, j, count);
                    rows.pop();
                }
            }
            for b in 1..=3.min(2 * n) {
                rec(&mut rows, all, b, n, &j, &mut count);
            }
            assert!(count > 0);
        }
    }

    proptest! {
        #[test]
        fn text_formats_round_trip(n in 1usize..=32, raw in any::<u64>()) {
            let label = PauliLabel::new(n, raw & low_mask(2 * n)).unwrap();
            prop_assert_eq!(label.to_word().parse::<PauliLabel>().unwrap(), label);
            prop_assert_eq!(label.to_xz_string().parse::<PauliLabel>().unwrap(), label);
        }

        #[test]
        fn bilinearity_random(n in 4usize..=32, a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
            let m = low_mask(2 * n);
            let (a, b, c) = (a & m, b & m, c & m);
            let n = n as u32;
            prop_assert_eq!(
                symplectic_bits(a ^ b, c, n),
                symplectic_bits(a, c, n) ^ symplectic_bits(b, c, n)
            );
            prop_assert_eq!(symplectic_bits(a, b, n), symplectic_bits(b, a, n));
        }
    }
}

//! Binary codes protecting the sign read-out of a single-ton's index.

use std::fmt;

use crate::error::{Error, Result};
use crate::gf2::{parity, Gf2Matrix};

/// A binary linear code of dimension `message_bits` and length `len`.
///
/// Code bit `i` of message `m` is `parity(generator_row(i) & m)`. The offsets
/// realizing the code are derived from these rows, so any implementation can
/// be dropped into a design.
pub trait OffsetCode: fmt::Debug + Send + Sync {
    fn message_bits(&self) -> usize;

    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn generator_row(&self, i: usize) -> u64;

    /// Recovers the message from (possibly corrupted) code bits. `None` means
    /// the decoder could not commit to an answer.
    fn decode(&self, bits: &[bool]) -> Option<u64>;

    /// Short human-readable name recorded in design files.
    fn describe(&self) -> String;

    fn encode(&self, message: u64) -> Vec<bool> {
        (0..self.len()).map(|i| parity(self.generator_row(i) & message)).collect()
    }

    /// The `len x message_bits` generator matrix.
    fn generator(&self) -> Gf2Matrix {
        let rows: Vec<u64> = (0..self.len()).map(|i| self.generator_row(i)).collect();
        Gf2Matrix::from_row_bits(&rows, self.message_bits()).expect("generator rows fit the message width")
    }
}

/// Every message bit repeated `r` times; decoded by majority vote.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RepetitionCode {
    message_bits: usize,
    r: usize,
}

/// Outcome of a majority vote over one bit's copies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MajorityDecode {
    pub message: u64,
    /// Bits whose copies were evenly split (decoded as 0).
    pub ties: u64,
}

impl RepetitionCode {
    pub const DEFAULT_REPETITIONS: usize = 9;

    pub fn new(message_bits: usize, r: usize) -> Result<Self> {
        if message_bits == 0 || message_bits > 64 {
            return Err(Error::Infeasible(format!("repetition code over {message_bits} bits")));
        }
        if r == 0 {
            return Err(Error::Infeasible("repetition count must be positive".into()));
        }
        Ok(RepetitionCode { message_bits, r })
    }

    pub fn repetitions(&self) -> usize {
        self.r
    }

    /// Majority vote with ties reported rather than hidden.
    pub fn decode_majority(&self, bits: &[bool]) -> MajorityDecode {
        debug_assert_eq!(bits.len(), self.len());
        let mut out = MajorityDecode { message: 0, ties: 0 };
        for (i, copies) in bits.chunks(self.r).enumerate() {
            let ones = copies.iter().filter(|&&b| b).count();
            if 2 * ones > self.r {
                out.message |= 1 << i;
            } else if 2 * ones == self.r {
                out.ties |= 1 << i;
            }
        }
        out
    }
}

impl OffsetCode for RepetitionCode {
    fn message_bits(&self) -> usize {
        self.message_bits
    }

    fn len(&self) -> usize {
        self.message_bits * self.r
    }

    fn generator_row(&self, i: usize) -> u64 {
        1 << (i / self.r)
    }

    fn decode(&self, bits: &[bool]) -> Option<u64> {
        if bits.len() != self.len() {
            return None;
        }
        let d = self.decode_majority(bits);
        (d.ties == 0).then_some(d.message)
    }

    fn describe(&self) -> String {
        format!("repetition(r={})", self.r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_flip_per_bit_is_corrected() {
        let code = RepetitionCode::new(8, 5).unwrap();
        let m = 0b1011_0010;
        let mut bits = code.encode(m);
        for i in 0..8 {
            bits[i * 5 + (i % 5)] ^= true;
        }
        assert_eq!(code.decode(&bits), Some(m));
    }

    #[test]
    fn three_of_five_flips_overturn_one_bit() {
        let code = RepetitionCode::new(8, 5).unwrap();
        let m = 0b1011_0010;
        let mut bits = code.encode(m);
        for copy in 0..3 {
            bits[2 * 5 + copy] ^= true;
        }
        assert_eq!(code.decode(&bits), Some(m ^ 0b100));
    }

    #[test]
    fn ties_are_flagged() {
        let code = RepetitionCode::new(2, 4).unwrap();
        let bits = [true, true, false, false, true, true, true, false];
        let d = code.decode_majority(&bits);
        assert_eq!(d.ties, 0b01);
        assert_eq!(d.message, 0b10);
        assert_eq!(code.decode(&bits), None);
    }

    #[test]
    fn generator_has_full_rank() {
        let code = RepetitionCode::new(20, 9).unwrap();
        let g = code.generator();
        assert_eq!((g.rows(), g.cols()), (180, 20));
        assert_eq!(g.rank(), 20);
    }

    #[test]
    fn wrong_length_is_a_failure() {
        let code = RepetitionCode::new(4, 3).unwrap();
        assert_eq!(code.decode(&[true; 5]), None);
    }
}

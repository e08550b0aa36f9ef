//! Sparse Pauli-channel estimation from Pauli eigenvalue queries.
//!
//! The pipeline hashes the unknown rate vector into small bins through
//! subsampled Walsh-Hadamard transforms, detects single-label bins, and peels
//! them off until the channel is explained.

pub mod binning;
pub mod channel;
pub mod design;
pub mod detector;
pub mod error;
pub mod gf2;
pub mod metrics;
pub mod oracle;
pub mod pauli;
pub mod peeler;
pub mod pipeline;
pub mod wht;

pub use binning::BinTensor;
pub use channel::SparsePauliChannel;
pub use design::{DesignMode, OffsetSet, SubsamplingDesign, SubsamplingGroup};
pub use detector::{BinKind, BinVerdict, DetectorConfig, OffsetCode, RepetitionCode};
pub use error::{Error, Result};
pub use gf2::Gf2Matrix;
pub use metrics::{compare, BoundParams, RecoveryReport};
pub use oracle::{ChannelOracle, EigenvalueOracle, QueryCounting};
pub use pauli::{PauliLabel, StabilizerGroup, MAX_QUBITS};
pub use wht::WhtOrdering;
pub use peeler::{noisy_peel, peel, PeelConfig, RecoveryResult, Status};
pub use pipeline::{recover, recover_synthetic, HeuristicDesign, Mode, RecoverConfig, Recovery};

//! Circuit-level erasure noise for random-circuit codes: noisy encoding,
//! ancilla distillation, Steane error correction, and the spacetime
//! erasure decoder.

pub mod outcome;
pub mod protocol;
pub mod reference;
pub mod spacetime;

pub use outcome::{
    build_protocol, decode_residual, decode_trial, dense_column, erasure_decode, LocatedPauli,
    MeasurementEvent, Observable, OutcomeCode, RowSet, SpacetimeProtocol, TrialOutcome,
};
pub use protocol::{
    bit_flip_check, distill, distill_with, encoded_epr_pairs, entropy_trial, mutual_info_trial,
    pauli_frame, phase_flip_check, prepare_noisy_encoded_state, steane_ec_round, CheckOutcome,
    ErasureEvent, ErasureRecord, LogicalBasis, ProtocolState, SteaneTranscript,
};
pub use spacetime::{back_cumulant, cumulant, FaultOperator, LocatedCircuit, SparsePauli};

#[derive(Debug, thiserror::Error)]
pub enum FtError {
    #[error(transparent)]
    Core(#[from] rcqec_core::Error),
    #[error("code must be CSS")]
    NotCss,
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

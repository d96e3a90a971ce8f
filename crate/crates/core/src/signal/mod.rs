//! Stacked two-slot STBC DS-CDMA signal model at chip rate.

pub mod channel;
pub mod fading;
pub mod received;
pub mod spreading;
pub mod stbc;

pub use channel::{FadingKind, SpaceTimeChannel};
pub use fading::{clarke_fading_sequence, ClarkeTap};
pub use received::{add_noise, assemble_received_block, BlockAssembler, ReceivedBlock};
pub use spreading::{
    build_constraint_matrices, build_convolution_matrix, ConstraintMatrices, ConvolutionMatrix,
    SpreadingScheme, SpreadingSet,
};
pub use stbc::{alamouti_encode, bit_errors, random_qpsk, SlotPair, SymbolStream, QPSK_POWER};

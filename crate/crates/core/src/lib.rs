//! Dense-matrix toolkit for qubit channels, their inverses and the
//! entanglement that system–environment dynamics hides or restores.
//!
//! Subsystem order for four-qubit registers is `(E_A, A, B, E_B)` and the
//! cross cut is `{E_A, A} | {B, E_B}`.

pub mod channels;
pub mod entanglement;
pub mod error;
pub mod matrix;
pub mod optimize;
pub mod procedures;
pub mod states;
pub mod tolerance;

pub use channels::{
    cavity_channel, compose, decay_probability, gad, invert, tensor, CavityParams, Channel, ChannelFlags, GadParams,
    KrausRep, PauliTransfer,
};
pub use entanglement::{
    concurrence, inaccessible_entanglement, is_entanglement_annihilating, is_entanglement_breaking, negativity,
    EaCertificate, EaConfig, EaVerdict, EntanglementReport,
};
pub use error::{Error, Result};
pub use matrix::{hermitian_eigen, kron, ComplexMatrix, HermitianEigen, C64};
pub use states::{DensityMatrix, PureState};
pub use tolerance::Tolerances;

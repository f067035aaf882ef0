//! Single-photon interferometer engine for interaction-free measurement.
//!
//! States are sparse superpositions over basis labels carrying the photon's
//! mode, every object's internal state and the set of detectors that clicked.
//! Circuits are staged lists of optical elements; each stage is an isometry
//! with an exact adjoint, which the two-state-vector analysis relies on.

pub mod circuit;
pub mod error;
pub mod optics;
pub mod protocols;
pub mod random;
pub mod state;
pub mod tsvf;

pub use circuit::{
    conditional_state, evolve, measured_at_cut, negative_result_update, outcome_distribution, trajectory, validate,
    Circuit, CutMeasurement, EventSelector, InitialAmplitude, ObjectSpec, OutcomeDistribution, PhotonOutcome, Stage,
    TerminalEvent, ValidationIssue,
};
pub use error::{Error, Result};
pub use optics::{apply_element, apply_element_adjoint, bs_matrix, coupler_matrix, Convention, Element};
pub use state::{inner_product, project, superpose, BasisLabel, Complex, ObjectState, PhotonSlot, PureState};
pub use tsvf::{backward_states, forward_states, two_state_vector, Projector, TwoStateVector};

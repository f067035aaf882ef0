//! End-to-end interaction-free measurement protocols built on the engine.

mod dicke;
mod ev;
mod hardy;
mod zeno;

pub use dicke::{dicke_localization, Localization};
pub use ev::{
    best_transmittance, efficiency, efficiency_frontier, ev_circuit, ev_repeated, ev_single_shot, RepeatMode, Rounds,
    EFFICIENCY_SUPREMUM,
};
pub use hardy::{
    hardy_circuit, hardy_conditional, hardy_input, hardy_joint, hardy_run, hardy_weak_values, HardyConfig, HardyQuery,
    HardyVariant, HardyWeakValues, HARDY_W_CUT,
};
pub use zeno::{zeno_circuit, zeno_run, ZenoObject};

use crate::circuit::{OutcomeDistribution, PhotonOutcome, TerminalEvent};

/// Names used by the bundled circuits.
pub mod names {
    pub const SOURCE: &str = "src";
    pub const VACUUM: &str = "vac";
    pub const FREE: &str = "free";
    pub const INTERACTION: &str = "int";
    pub const OUT1: &str = "out1";
    pub const OUT2: &str = "out2";
    pub const D1: &str = "D1";
    pub const D2: &str = "D2";
    pub const BOMB: &str = "bomb";
    pub const IN: &str = "in";
    pub const OUT: &str = "out";
    pub const LEFT: &str = "left";
    pub const RIGHT: &str = "right";
}

/// What sits in the interaction region.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ObjectKind {
    Absent,
    Bomb,
    /// Absorbs the photon without changing its own state.
    Opaque,
    /// Non-explosive partial absorber with amplitude transmittance √alpha.
    SemiTransparent {
        alpha: f64,
    },
}

impl ObjectKind {
    pub(crate) fn absorber_params(self) -> (f64, bool) {
        match self {
            ObjectKind::Absent | ObjectKind::Bomb => (0.0, true),
            ObjectKind::Opaque => (0.0, false),
            ObjectKind::SemiTransparent { alpha } => (alpha, false),
        }
    }
}

/// Probability that the photon ended inside an object: explosions plus
/// absorptions that did not click a detector.
pub fn interaction_probability(dist: &OutcomeDistribution) -> f64 {
    dist.iter()
        .filter(|(e, _)| is_interaction(e))
        .fold(0.0, |s, (_, p)| s + p)
}

fn is_interaction(e: &TerminalEvent) -> bool {
    !e.exploded.is_empty() || (e.clicked.is_empty() && e.photon == PhotonOutcome::Absorbed)
}

/// One round of a repeated protocol.
#[derive(Clone, Debug, PartialEq)]
pub struct RoundRecord {
    pub round: usize,
    /// Probability of reaching this round.
    pub reach: f64,
    pub found: f64,
    pub exploded: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolReport {
    pub single_shot: OutcomeDistribution,
    /// P(detect) / (P(detect) + P(interaction)) of a single shot.
    pub efficiency: f64,
    pub rounds: Vec<RoundRecord>,
    pub found_fraction: f64,
    pub exploded_fraction: f64,
    pub undecided_fraction: f64,
}

//! Two overlapping interferometers: a photon and an object that annihilate
//! when both take the arm through the shared region W.
//!
//! Photon rails: `p_src`, `p_vac` → `p_u` (free arm), `p_w` (through W) →
//! `p_1`, `p_2`. Object rails: `o_src`, `o_vac` → `o_v` (free arm), `o_w`
//! (through W) → `o_1`, `o_2`. Detectors D1/D2 watch the photon, oD1/oD2 the
//! object. Each interferometer on its own is dark at its D2.

use crate::circuit::{
    evolve, measured_at_cut, Circuit, EventSelector, InitialAmplitude, ObjectSpec, OutcomeDistribution,
};
use crate::error::{Error, Result};
use crate::optics::{Convention, Element};
use crate::state::{superpose, BasisLabel, Complex, ObjectState, PureState};
use crate::tsvf::{two_state_vector, Projector};

use super::ev::{detector, splitter};

pub const OBJECT: &str = "object";

/// Cut where both arms pass through W, just before the meeting.
pub const HARDY_W_CUT: usize = 1;

const P_MODES: [&str; 6] = ["p_src", "p_vac", "p_u", "p_w", "p_1", "p_2"];
const O_STATES: [&str; 6] = ["o_src", "o_vac", "o_v", "o_w", "o_1", "o_2"];

/// Which second splitter, if any, is replaced by a which-arm measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HardyVariant {
    Full,
    /// Object's second splitter replaced by detectors oV (free arm) and oW.
    ObjectPositionMeasured,
    /// Photon's second splitter replaced by detectors pU (free arm) and pW.
    PhotonPositionMeasured,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HardyConfig {
    pub photon_transmittance: f64,
    pub object_transmittance: f64,
    pub variant: HardyVariant,
}

impl Default for HardyConfig {
    fn default() -> Self {
        HardyConfig {
            photon_transmittance: 0.5,
            object_transmittance: 0.5,
            variant: HardyVariant::Full,
        }
    }
}

fn object_splitter(in_a: &str, in_b: &str, out_a: &str, out_b: &str, t: f64) -> Element {
    Element::BeamSplitter {
        in_a: in_a.into(),
        in_b: in_b.into(),
        out_a: out_a.into(),
        out_b: out_b.into(),
        transmittance: t,
        convention: Convention::Real,
        object: Some(OBJECT.into()),
    }
}

fn object_detector(state: &str, id: &str) -> Element {
    Element::Detector {
        mode: state.into(),
        detector: id.into(),
        object: Some(OBJECT.into()),
    }
}

pub fn hardy_circuit(config: HardyConfig) -> Result<Circuit> {
    for t in [config.photon_transmittance, config.object_transmittance] {
        if !(t.is_finite() && t > 0.0 && t < 1.0) {
            return Err(Error::BadParam(format!("transmittance {t} must lie in (0, 1)")));
        }
    }
    let (tp, to) = (config.photon_transmittance, config.object_transmittance);
    let object = ObjectSpec {
        id: OBJECT.into(),
        states: O_STATES.iter().map(|s| s.to_string()).collect(),
        initial: vec![InitialAmplitude {
            state: "o_src".into(),
            re: 1.0,
            im: 0.0,
        }],
    };
    let mut second = Vec::new();
    let mut detectors = Vec::new();
    match config.variant {
        HardyVariant::PhotonPositionMeasured => {
            detectors.push(detector("p_u", "pU"));
            detectors.push(detector("p_w", "pW"));
        }
        _ => {
            second.push(splitter("p_u", "p_w", "p_1", "p_2", tp));
            detectors.push(detector("p_1", "D1"));
            detectors.push(detector("p_2", "D2"));
        }
    }
    match config.variant {
        HardyVariant::ObjectPositionMeasured => {
            detectors.push(object_detector("o_v", "oV"));
            detectors.push(object_detector("o_w", "oW"));
        }
        _ => {
            second.push(object_splitter("o_v", "o_w", "o_1", "o_2", to));
            detectors.push(object_detector("o_1", "oD1"));
            detectors.push(object_detector("o_2", "oD2"));
        }
    }
    Ok(Circuit::new(P_MODES)
        .with_source("p_src")
        .with_object(object)
        .with_stage(vec![
            splitter("p_src", "p_vac", "p_u", "p_w", tp),
            object_splitter("o_src", "o_vac", "o_v", "o_w", to),
        ])
        .with_stage(vec![Element::Absorber {
            mode: "p_w".into(),
            object: OBJECT.into(),
            at: "o_w".into(),
            alpha: 0.0,
            explosive: true,
            phase: 0.0,
        }])
        .with_stage(second)
        .with_stage(detectors))
}

/// Input with either system optionally left out.
pub fn hardy_input(photon: bool, object: bool) -> Result<PureState> {
    let mut label = if photon {
        BasisLabel::photon_at("p_src")
    } else {
        BasisLabel::vacuum()
    };
    if object {
        label = label.with_object(OBJECT, ObjectState::at("o_src"));
    }
    superpose([(label, Complex::new(1.0, 0.0))])
}

pub fn hardy_joint(config: HardyConfig) -> Result<OutcomeDistribution> {
    let circuit = hardy_circuit(config)?;
    let input = circuit.initial_state()?;
    Ok(OutcomeDistribution::from_state(&evolve(&circuit, &input)?))
}

/// Joint distribution of the 50/50 construction.
pub fn hardy_run() -> Result<OutcomeDistribution> {
    hardy_joint(HardyConfig::default())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HardyQuery {
    /// Object found at W, given the photon's D2 clicked.
    ObjectAtW,
    /// Photon found at W, given the object's D2 clicked.
    PhotonAtW,
    /// Photon and object found at W together, given both D2 clicked.
    BothAtW,
}

/// Each query runs on its own circuit variant; the claims only hold when
/// tested separately.
pub fn hardy_conditional(query: HardyQuery) -> Result<f64> {
    let ratio = |variant, hit: &[&str], given: &[&str]| -> Result<f64> {
        let dist = hardy_joint(HardyConfig {
            variant,
            ..Default::default()
        })?;
        let both: Vec<&str> = hit.iter().chain(given).copied().collect();
        let denom = dist.probability(&EventSelector::clicks(given.iter().copied()));
        if denom <= 0.0 {
            return Err(Error::ImpossiblePostselection);
        }
        Ok(dist.probability(&EventSelector::clicks(both)) / denom)
    };
    match query {
        HardyQuery::ObjectAtW => ratio(HardyVariant::ObjectPositionMeasured, &["oW"], &["D2"]),
        HardyQuery::PhotonAtW => ratio(HardyVariant::PhotonPositionMeasured, &["pW"], &["oD2"]),
        HardyQuery::BothAtW => {
            let circuit = hardy_circuit(HardyConfig::default())?;
            let input = circuit.initial_state()?;
            let pair = Projector::photon_in(["p_w"]).and(Projector::object_at(OBJECT, ["o_w"]));
            let m = measured_at_cut(
                &circuit,
                &input,
                HARDY_W_CUT,
                |l| pair.matches(l),
                &EventSelector::clicks(["D2", "oD2"]),
            )?;
            m.conditional().ok_or(Error::ImpossiblePostselection)
        }
    }
}

/// Weak values at the W cut, post-selected on both D2 clicks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HardyWeakValues {
    pub photon_at_w: Complex,
    pub object_at_w: Complex,
    pub both_at_w: Complex,
    /// Photon in its free arm and object in its free arm.
    pub neither_at_w: Complex,
}

pub fn hardy_weak_values(cut: usize) -> Result<HardyWeakValues> {
    let circuit = hardy_circuit(HardyConfig::default())?;
    let input = circuit.initial_state()?;
    let tsv = two_state_vector(&circuit, &input, &EventSelector::clicks(["D2", "oD2"]))?;
    let pw = Projector::photon_in(["p_w"]);
    let ow = Projector::object_at(OBJECT, ["o_w"]);
    let free = Projector::photon_in(["p_u"]).and(Projector::object_at(OBJECT, ["o_v"]));
    Ok(HardyWeakValues {
        photon_at_w: tsv.weak_value(cut, &pw)?,
        object_at_w: tsv.weak_value(cut, &ow)?,
        both_at_w: tsv.weak_value(cut, &pw.clone().and(ow.clone()))?,
        neither_at_w: tsv.weak_value(cut, &free)?,
    })
}

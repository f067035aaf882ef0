//! Two coupled cavities: N weak couplings of angle π/(2N), with an absorber
//! checking the right cavity after each coupling.

use std::f64::consts::FRAC_PI_2;

use crate::circuit::{evolve, Circuit, ObjectSpec, OutcomeDistribution};
use crate::error::{Error, Result};
use crate::optics::Element;

use super::names::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZenoObject {
    Absent,
    Bomb,
}

pub fn zeno_circuit(cycles: usize, object: ZenoObject) -> Result<Circuit> {
    if cycles == 0 {
        return Err(Error::BadParam("need at least one coupling cycle".into()));
    }
    let theta = FRAC_PI_2 / cycles as f64;
    let placed = match object {
        ZenoObject::Absent => OUT,
        ZenoObject::Bomb => IN,
    };
    let mut circuit = Circuit::new([LEFT, RIGHT])
        .with_source(LEFT)
        .with_object(ObjectSpec::definite(BOMB, &[IN, OUT], placed));
    for _ in 0..cycles {
        circuit = circuit
            .with_stage(vec![Element::Coupler {
                left: LEFT.into(),
                right: RIGHT.into(),
                theta,
                object: None,
            }])
            .with_stage(vec![Element::Absorber {
                mode: RIGHT.into(),
                object: BOMB.into(),
                at: IN.into(),
                alpha: 0.0,
                explosive: true,
                phase: 0.0,
            }]);
    }
    Ok(circuit)
}

/// Distribution over photon@left, photon@right and explosion:bomb after
/// `cycles` couplings.
pub fn zeno_run(cycles: usize, object: ZenoObject) -> Result<OutcomeDistribution> {
    let circuit = zeno_circuit(cycles, object)?;
    let input = circuit.initial_state()?;
    Ok(OutcomeDistribution::from_state(&evolve(&circuit, &input)?))
}

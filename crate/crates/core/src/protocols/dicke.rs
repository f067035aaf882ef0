//! Localizing an object that starts in a superposition of locations.

use std::collections::BTreeMap;

use crate::circuit::{conditional_state, Circuit, EventSelector, InitialAmplitude, ObjectSpec};
use crate::error::{Error, Result};
use crate::optics::Element;
use crate::state::{Complex, ObjectState, PureState, NORM_TOLERANCE};

use super::ev::{detector, splitter};
use super::names::*;

#[derive(Clone, Debug, PartialEq)]
pub struct Localization {
    pub p_d2: f64,
    /// Joint state given D2, `None` when D2 cannot click.
    pub conditional: Option<PureState>,
    /// Object amplitudes given D2.
    pub object: Option<BTreeMap<ObjectState, Complex>>,
}

/// Runs the 50/50 bomb test on an object spread over `superposition`; the
/// location named `interaction` sits in the interferometer's lower arm.
pub fn dicke_localization(superposition: &[(String, Complex)], interaction: &str) -> Result<Localization> {
    let weight: f64 = superposition.iter().map(|(_, a)| a.norm_sqr()).sum();
    if !weight.is_finite() || (weight - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::BadParam(format!(
            "object amplitudes have weight {weight}, expected 1"
        )));
    }
    let mut states: Vec<String> = superposition.iter().map(|(s, _)| s.clone()).collect();
    if !states.iter().any(|s| s == interaction) {
        states.push(interaction.to_string());
    }
    let object = ObjectSpec {
        id: BOMB.into(),
        states,
        initial: superposition
            .iter()
            .map(|(s, a)| InitialAmplitude {
                state: s.clone(),
                re: a.re,
                im: a.im,
            })
            .collect(),
    };
    let circuit = Circuit::new([SOURCE, VACUUM, FREE, INTERACTION, OUT1, OUT2])
        .with_source(SOURCE)
        .with_object(object)
        .with_stage(vec![splitter(SOURCE, VACUUM, FREE, INTERACTION, 0.5)])
        .with_stage(vec![Element::Absorber {
            mode: INTERACTION.into(),
            object: BOMB.into(),
            at: interaction.into(),
            alpha: 0.0,
            explosive: true,
            phase: 0.0,
        }])
        .with_stage(vec![splitter(FREE, INTERACTION, OUT1, OUT2, 0.5)])
        .with_stage(vec![detector(OUT1, D1), detector(OUT2, D2)]);
    let input = circuit.initial_state()?;
    let (p_d2, conditional) = conditional_state(&circuit, &input, &EventSelector::clicks([D2]))?;
    let object = conditional.as_ref().and_then(|s| s.object_amplitudes(BOMB));
    Ok(Localization {
        p_d2,
        conditional,
        object,
    })
}

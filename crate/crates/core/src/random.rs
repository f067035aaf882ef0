//! Small random circuits for property tests and fuzzing.

use rand::Rng;

use crate::circuit::{Circuit, EventSelector, InitialAmplitude, ObjectSpec};
use crate::optics::{Convention, Element};

pub const MAX_MODES: usize = 4;
pub const MAX_STAGES: usize = 6;
pub const RANDOM_OBJECT: &str = "obj";

/// Random valid circuit with up to [`MAX_MODES`] modes and [`MAX_STAGES`]
/// stages. The object `obj` starts in a random superposition of `in` and
/// `out`; detectors sit on a random subset of modes in the last stage.
pub fn random_circuit<R: Rng + ?Sized>(rng: &mut R) -> Circuit {
    let n = rng.random_range(2..=MAX_MODES);
    let modes: Vec<String> = (0..n).map(|i| format!("m{i}")).collect();
    let a = rng.random_range(0.0..std::f64::consts::TAU);
    let c = rng.random_range(0.0..=1.0f64).sqrt();
    let s = (1.0 - c * c).sqrt();
    let object = ObjectSpec {
        id: RANDOM_OBJECT.into(),
        states: vec!["in".into(), "out".into()],
        initial: vec![
            InitialAmplitude {
                state: "in".into(),
                re: c,
                im: 0.0,
            },
            InitialAmplitude {
                state: "out".into(),
                re: s * a.cos(),
                im: s * a.sin(),
            },
        ],
    };
    let mut circuit = Circuit::new(modes.clone())
        .with_source(modes[0].clone())
        .with_object(object);
    let stages = rng.random_range(1..=MAX_STAGES);
    for _ in 0..stages {
        circuit = circuit.with_stage(random_stage(rng, &modes));
    }
    let mut detectors = Vec::new();
    for (i, m) in modes.iter().enumerate() {
        if rng.random_bool(0.6) {
            detectors.push(Element::Detector {
                mode: m.clone(),
                detector: format!("D{i}"),
                object: None,
            });
        }
    }
    if !detectors.is_empty() {
        circuit = circuit.with_stage(detectors);
    }
    circuit
}

fn random_stage<R: Rng + ?Sized>(rng: &mut R, modes: &[String]) -> Vec<Element> {
    let mut free: Vec<usize> = (0..modes.len()).collect();
    let mut elements = Vec::new();
    while !free.is_empty() && elements.len() < 2 {
        let take = |rng: &mut R, free: &mut Vec<usize>| {
            let i = rng.random_range(0..free.len());
            modes[free.swap_remove(i)].clone()
        };
        let kind = rng.random_range(0..5);
        if kind < 3 && free.len() >= 2 {
            let x = take(rng, &mut free);
            let y = take(rng, &mut free);
            elements.push(match kind {
                0 => Element::BeamSplitter {
                    in_a: x.clone(),
                    in_b: y.clone(),
                    out_a: x,
                    out_b: y,
                    transmittance: rng.random_range(0.05..0.95),
                    convention: match rng.random_range(0..3) {
                        0 => Convention::Real,
                        1 => Convention::RealSwapped,
                        _ => Convention::Symmetric,
                    },
                    object: None,
                },
                1 => Element::Coupler {
                    left: x,
                    right: y,
                    theta: rng.random_range(0.0..std::f64::consts::FRAC_PI_2),
                    object: None,
                },
                _ => Element::Mirror {
                    from: x,
                    to: y,
                    object: None,
                },
            });
        } else if kind == 3 {
            elements.push(Element::Phase {
                mode: take(rng, &mut free),
                phi: rng.random_range(0.0..std::f64::consts::TAU),
                object: None,
            });
        } else {
            let mode = take(rng, &mut free);
            // at most one absorber per stage keeps the object rails disjoint
            if elements.iter().any(|e| matches!(e, Element::Absorber { .. })) {
                continue;
            }
            elements.push(Element::Absorber {
                mode,
                object: RANDOM_OBJECT.into(),
                at: "in".into(),
                alpha: rng.random_range(0.0..1.0),
                explosive: rng.random_bool(0.5),
                phase: rng.random_range(0.0..std::f64::consts::TAU),
            });
        }
    }
    elements
}

/// Random post-selection on one of the circuit's detectors, or on an
/// explosion when there are none.
pub fn random_postselection<R: Rng + ?Sized>(rng: &mut R, circuit: &Circuit) -> EventSelector {
    let detectors: Vec<&str> = circuit.detectors().into_iter().collect();
    if detectors.is_empty() || rng.random_bool(0.15) {
        return EventSelector::explosion(RANDOM_OBJECT);
    }
    EventSelector::clicks([detectors[rng.random_range(0..detectors.len())]])
}

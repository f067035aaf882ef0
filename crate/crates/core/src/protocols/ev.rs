//! The bomb-testing Mach-Zehnder: single shot, repetition on the
//! uninformative port, and the transmittance/efficiency trade-off.

use crate::circuit::{
    conditional_state, evolve, Circuit, EventSelector, ObjectSpec, OutcomeDistribution, TerminalEvent,
};
use crate::error::{Error, Result};
use crate::optics::{Convention, Element};
use crate::state::{superpose, BasisLabel, ObjectState};

use super::names::*;
use super::{interaction_probability, ObjectKind, ProtocolReport, RoundRecord};

/// Limit of the single-shot efficiency as the transmittance approaches one.
pub const EFFICIENCY_SUPREMUM: f64 = 0.5;

fn check_open_unit(name: &str, x: f64) -> Result<()> {
    if !(x.is_finite() && x > 0.0 && x < 1.0) {
        return Err(Error::BadParam(format!("{name} = {x} must lie in (0, 1)")));
    }
    Ok(())
}

pub(crate) fn splitter(in_a: &str, in_b: &str, out_a: &str, out_b: &str, t: f64) -> Element {
    Element::BeamSplitter {
        in_a: in_a.into(),
        in_b: in_b.into(),
        out_a: out_a.into(),
        out_b: out_b.into(),
        transmittance: t,
        convention: Convention::Real,
        object: None,
    }
}

pub(crate) fn detector(mode: &str, id: &str) -> Element {
    Element::Detector {
        mode: mode.into(),
        detector: id.into(),
        object: None,
    }
}

/// The interferometer with first-splitter transmittance `t` into the free arm.
///
/// The second splitter uses the same matrix. That matrix is an involution,
/// so with nothing in the interaction arm the photon always leaves through
/// `out1` and D2 stays dark for every `t`.
pub fn ev_circuit(t: f64, object: ObjectKind) -> Result<Circuit> {
    if !(t.is_finite() && (0.0..=1.0).contains(&t)) {
        return Err(Error::BadParam(format!("transmittance {t} outside [0, 1]")));
    }
    let (alpha, explosive) = object.absorber_params();
    if !(alpha.is_finite() && (0.0..=1.0).contains(&alpha)) {
        return Err(Error::BadParam(format!("object transmittance {alpha} outside [0, 1]")));
    }
    let placed = if object == ObjectKind::Absent { OUT } else { IN };
    Ok(Circuit::new([SOURCE, VACUUM, FREE, INTERACTION, OUT1, OUT2])
        .with_source(SOURCE)
        .with_object(ObjectSpec::definite(BOMB, &[IN, OUT], placed))
        .with_stage(vec![splitter(SOURCE, VACUUM, FREE, INTERACTION, t)])
        .with_stage(vec![Element::Absorber {
            mode: INTERACTION.into(),
            object: BOMB.into(),
            at: IN.into(),
            alpha,
            explosive,
            phase: 0.0,
        }])
        .with_stage(vec![splitter(FREE, INTERACTION, OUT1, OUT2, t)])
        .with_stage(vec![detector(OUT1, D1), detector(OUT2, D2)]))
}

pub fn ev_single_shot(t: f64, object: ObjectKind) -> Result<OutcomeDistribution> {
    check_open_unit("transmittance", t)?;
    let circuit = ev_circuit(t, object)?;
    let input = circuit.initial_state()?;
    Ok(OutcomeDistribution::from_state(&evolve(&circuit, &input)?))
}

/// P(D2) / (P(D2) + P(interaction)); zero when neither can happen.
pub fn efficiency(dist: &OutcomeDistribution) -> f64 {
    let found = dist.get(&TerminalEvent::click(D2));
    let lost = interaction_probability(dist);
    if found + lost > 0.0 {
        found / (found + lost)
    } else {
        0.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rounds {
    Finite(usize),
    Unbounded,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RepeatMode {
    /// Closed-form geometric series.
    Analytic,
    /// Feed the D1-conditioned object state back into a fresh run each round.
    Simulated,
}

/// Repeats the bomb test whenever D1 clicks.
pub fn ev_repeated(t: f64, rounds: Rounds, mode: RepeatMode) -> Result<ProtocolReport> {
    check_open_unit("transmittance", t)?;
    if rounds == Rounds::Finite(0) {
        return Err(Error::BadParam("max_rounds must be at least 1".into()));
    }
    let single = ev_single_shot(t, ObjectKind::Bomb)?;
    let p_found = single.get(&TerminalEvent::click(D2));
    let p_boom = interaction_probability(&single);
    let p_again = single.get(&TerminalEvent::click(D1));
    let eff = efficiency(&single);

    let (rounds, found, exploded, undecided) = match (mode, rounds) {
        (RepeatMode::Analytic, Rounds::Unbounded) => {
            // Σ_k p_again^k = 1 / (1 − p_again)
            let s = 1.0 / (1.0 - p_again);
            (Vec::new(), p_found * s, p_boom * s, 0.0)
        }
        (RepeatMode::Analytic, Rounds::Finite(n)) => {
            let mut records = Vec::with_capacity(n);
            let mut reach = 1.0;
            for round in 1..=n {
                records.push(RoundRecord {
                    round,
                    reach,
                    found: reach * p_found,
                    exploded: reach * p_boom,
                });
                reach *= p_again;
            }
            // finite geometric series (1 − q^n) / (1 − q)
            let s = (1.0 - p_again.powi(n as i32)) / (1.0 - p_again);
            (records, p_found * s, p_boom * s, p_again.powi(n as i32))
        }
        (RepeatMode::Simulated, Rounds::Unbounded) => {
            return Err(Error::BadParam(
                "simulated repetition needs a finite round count".into(),
            ))
        }
        (RepeatMode::Simulated, Rounds::Finite(n)) => simulate_rounds(t, n)?,
    };
    Ok(ProtocolReport {
        single_shot: single,
        efficiency: eff,
        rounds,
        found_fraction: found,
        exploded_fraction: exploded,
        undecided_fraction: undecided,
    })
}

fn simulate_rounds(t: f64, n: usize) -> Result<(Vec<RoundRecord>, f64, f64, f64)> {
    let circuit = ev_circuit(t, ObjectKind::Bomb)?;
    let mut input = circuit.initial_state()?;
    let mut reach = 1.0;
    let (mut found, mut exploded) = (0.0, 0.0);
    let mut records = Vec::with_capacity(n);
    for round in 1..=n {
        let dist = OutcomeDistribution::from_state(&evolve(&circuit, &input)?);
        let f = reach * dist.get(&TerminalEvent::click(D2));
        let x = reach * interaction_probability(&dist);
        records.push(RoundRecord {
            round,
            reach,
            found: f,
            exploded: x,
        });
        found += f;
        exploded += x;
        let (p_again, cond) = conditional_state(&circuit, &input, &EventSelector::clicks([D1]))?;
        reach *= p_again;
        let Some(cond) = cond else {
            break;
        };
        // Re-prepare the photon; the object keeps its post-D1 state.
        let object = cond
            .object_amplitudes(BOMB)
            .ok_or_else(|| Error::BadParam("object entangled with the D1 record".into()))?;
        input = superpose(
            object
                .into_iter()
                .map(|(state, amp)| (BasisLabel::photon_at(SOURCE).with_object(BOMB, state), amp)),
        )?;
        debug_assert!(input.labels().all(|l| l.object(BOMB) != Some(&ObjectState::Exploded)));
    }
    Ok((records, found, exploded, reach))
}

/// η(T) for each transmittance in `grid`.
pub fn efficiency_frontier(grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    grid.iter()
        .map(|&t| Ok((t, efficiency(&ev_single_shot(t, ObjectKind::Bomb)?))))
        .collect()
}

/// Golden-section search for the transmittance maximizing η on `[lo, hi]`.
pub fn best_transmittance(lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)> {
    check_open_unit("lower bound", lo)?;
    check_open_unit("upper bound", hi)?;
    if lo >= hi || tol.is_nan() || tol <= 0.0 {
        return Err(Error::BadParam(format!("bad search interval [{lo}, {hi}] / tol {tol}")));
    }
    let eta = |t: f64| -> Result<f64> { Ok(efficiency(&ev_single_shot(t, ObjectKind::Bomb)?)) };
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (eta(x1)?, eta(x2)?);
    while b - a > tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = eta(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = eta(x1)?;
        }
    }
    // η is evaluated at the interval ends too: the optimum may sit on a bound.
    let candidates = [(lo, eta(lo)?), (hi, eta(hi)?), ((a + b) / 2.0, eta((a + b) / 2.0)?)];
    Ok(candidates
        .into_iter()
        .fold((lo, f64::NEG_INFINITY), |best, c| if c.1 > best.1 { c } else { best }))
}

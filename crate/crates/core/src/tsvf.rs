//! Forward and backward evolving states at every cut, "no trace" checks and
//! weak values for pre- and post-selected runs.
//!
//! The backward state at the final cut is the post-selected part of the
//! evolved state, normalized. Earlier backward states come from applying the
//! adjoint of each stage in reverse, so the overlap ⟨backward|forward⟩ is the
//! same at every cut and its squared magnitude is the post-selection
//! probability. Backward states are in general sub-normalized: the adjoint of
//! an absorbing stage discards whatever lies outside the stage's range.

use std::collections::{BTreeMap, BTreeSet};

use crate::circuit::{apply_stage, trajectory, Circuit, EventSelector};
use crate::error::{Error, Result};
use crate::optics::Direction;
use crate::state::{BasisLabel, Complex, PureState};

/// Threshold below which a forward × backward weight counts as zero.
pub const TRACE_TOLERANCE: f64 = 1e-9;

/// Denominator magnitude below which weak values are undefined.
pub const OVERLAP_TOLERANCE: f64 = 1e-12;

/// Conjunction of location conditions on the photon and on objects.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Projector {
    pub photon: Option<BTreeSet<String>>,
    pub objects: BTreeMap<String, BTreeSet<String>>,
}

impl Projector {
    /// The identity.
    pub fn everything() -> Projector {
        Projector::default()
    }

    pub fn photon_in<'a>(modes: impl IntoIterator<Item = &'a str>) -> Projector {
        Projector {
            photon: Some(modes.into_iter().map(str::to_string).collect()),
            ..Default::default()
        }
    }

    pub fn object_at<'a>(id: &str, states: impl IntoIterator<Item = &'a str>) -> Projector {
        let mut p = Projector::default();
        p.objects
            .insert(id.to_string(), states.into_iter().map(str::to_string).collect());
        p
    }

    /// Both projectors at once (they commute, being diagonal in labels).
    pub fn and(mut self, other: Projector) -> Projector {
        if let Some(modes) = other.photon {
            self.photon = Some(match self.photon {
                Some(mine) => mine.intersection(&modes).cloned().collect(),
                None => modes,
            });
        }
        for (id, states) in other.objects {
            let merged = match self.objects.remove(&id) {
                Some(mine) => mine.intersection(&states).cloned().collect(),
                None => states,
            };
            self.objects.insert(id, merged);
        }
        self
    }

    pub fn matches(&self, label: &BasisLabel) -> bool {
        if let Some(modes) = &self.photon {
            match label.photon.mode() {
                Some(m) if modes.contains(m) => {}
                _ => return false,
            }
        }
        self.objects.iter().all(|(id, states)| {
            label
                .objects
                .get(id)
                .and_then(|s| s.location())
                .is_some_and(|loc| states.contains(loc))
        })
    }
}

#[derive(Clone, Debug)]
pub struct TwoStateVector {
    /// Forward state at each cut (index = cut).
    pub forward: Vec<PureState>,
    /// Backward state at each cut.
    pub backward: Vec<PureState>,
    /// ⟨backward|forward⟩, identical at every cut.
    pub overlap: Complex,
    /// Probability of the post-selection.
    pub probability: f64,
    pub postselection: EventSelector,
}

pub fn forward_states(circuit: &Circuit, input: &PureState) -> Result<Vec<PureState>> {
    trajectory(circuit, input)
}

pub fn backward_states(circuit: &Circuit, input: &PureState, post: &EventSelector) -> Result<Vec<PureState>> {
    Ok(two_state_vector(circuit, input, post)?.backward)
}

pub fn two_state_vector(circuit: &Circuit, input: &PureState, post: &EventSelector) -> Result<TwoStateVector> {
    let forward = trajectory(circuit, input)?;
    let last = forward.last().expect("at least one cut");
    let selected = last.restrict(|l| post.matches_label(l));
    let probability = selected.norm_sqr();
    let tol = last.tolerance();
    if probability <= tol * tol {
        return Err(Error::ImpossiblePostselection);
    }
    let mut backward = vec![selected.scaled(1.0 / probability.sqrt())];
    for (k, stage) in circuit.stages.iter().enumerate().rev() {
        let prev = apply_stage(backward.last().expect("non-empty"), stage, k, Direction::Adjoint);
        backward.push(prev);
    }
    backward.reverse();
    let overlap = backward[0].inner(&forward[0]);
    Ok(TwoStateVector {
        forward,
        backward,
        overlap,
        probability,
        postselection: post.clone(),
    })
}

impl TwoStateVector {
    pub fn num_cuts(&self) -> usize {
        self.forward.len()
    }

    fn check_cut(&self, cut: usize) -> Result<()> {
        if cut >= self.num_cuts() {
            return Err(Error::BadCut {
                cut,
                cuts: self.num_cuts(),
            });
        }
        Ok(())
    }

    pub fn overlap_at(&self, cut: usize) -> Result<Complex> {
        self.check_cut(cut)?;
        Ok(self.backward[cut].inner(&self.forward[cut]))
    }

    /// Forward and backward weights inside the projector at `cut`.
    pub fn weights(&self, cut: usize, projector: &Projector) -> Result<(f64, f64)> {
        self.check_cut(cut)?;
        Ok((
            self.forward[cut].weight(|l| projector.matches(l)),
            self.backward[cut].weight(|l| projector.matches(l)),
        ))
    }

    /// True when the forward or the backward state vanishes inside the
    /// projector, so the photon cannot leave a trace there.
    pub fn trace_free(&self, cut: usize, projector: &Projector) -> Result<bool> {
        let (f, b) = self.weights(cut, projector)?;
        Ok((f * b).sqrt() <= TRACE_TOLERANCE)
    }

    /// ⟨backward|Π|forward⟩ / ⟨backward|forward⟩ at `cut`.
    pub fn weak_value(&self, cut: usize, projector: &Projector) -> Result<Complex> {
        self.check_cut(cut)?;
        let denom = self.backward[cut].inner(&self.forward[cut]);
        if denom.norm() < OVERLAP_TOLERANCE {
            return Err(Error::ZeroOverlap);
        }
        let inside = self.forward[cut].restrict(|l| projector.matches(l));
        Ok(self.backward[cut].inner(&inside) / denom)
    }
}

pub fn trace_free(
    circuit: &Circuit,
    input: &PureState,
    post: &EventSelector,
    cut: usize,
    projector: &Projector,
) -> Result<bool> {
    two_state_vector(circuit, input, post)?.trace_free(cut, projector)
}

pub fn weak_value(
    circuit: &Circuit,
    input: &PureState,
    post: &EventSelector,
    cut: usize,
    projector: &Projector,
) -> Result<Complex> {
    two_state_vector(circuit, input, post)?.weak_value(cut, projector)
}

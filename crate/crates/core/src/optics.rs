//! Circuit components and their action on labeled configurations.
//!
//! Every element is a linear map on configurations. Linear optics (splitters,
//! mirrors, phases, couplers) act as small unitaries on the rails of one
//! carrier: the photon, or an object whose locations play the role of modes.
//! Absorbers and detectors send the photon to a terminal `Absorbed` slot
//! tagged with the stage and mode, which keeps every stage map an isometry
//! on reachable configurations and gives it a well-defined adjoint.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::circuit::ValidationIssue;
use crate::error::{Error, Result};
use crate::state::{BasisLabel, Complex, ObjectState, PhotonSlot, PureState};

pub type Matrix2 = [[Complex; 2]; 2];

/// Sign convention of a beam splitter.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// `[[√T, √R], [√R, −√T]]`: the minus sign sits on input port b.
    #[default]
    Real,
    /// `[[−√T, √R], [√R, √T]]`: the minus sign sits on input port a.
    RealSwapped,
    /// `[[√T, i√R], [i√R, √T]]`.
    Symmetric,
}

/// One circuit component. Matrices are indexed `[output][input]`.
///
/// The optional `object` field on linear elements and detectors makes the
/// element act on that object's locations instead of on the photon.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Element {
    BeamSplitter {
        in_a: String,
        in_b: String,
        out_a: String,
        out_b: String,
        transmittance: f64,
        #[serde(default, skip_serializing_if = "is_default_convention")]
        convention: Convention,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        object: Option<String>,
    },
    /// Exchanges the contents of two rails.
    Mirror {
        from: String,
        to: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        object: Option<String>,
    },
    Phase {
        mode: String,
        phi: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        object: Option<String>,
    },
    /// Blocks the photon in `mode` whenever `object` is in state `at`.
    /// Amplitude √alpha is transmitted (with phase `phase`), √(1−alpha) absorbed.
    Absorber {
        mode: String,
        object: String,
        at: String,
        alpha: f64,
        explosive: bool,
        #[serde(default, skip_serializing_if = "is_zero")]
        phase: f64,
    },
    Detector {
        mode: String,
        detector: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        object: Option<String>,
    },
    /// Rotation by `theta` between two coupled rails.
    Coupler {
        left: String,
        right: String,
        theta: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        object: Option<String>,
    },
}

fn is_default_convention(c: &Convention) -> bool {
    *c == Convention::Real
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

/// Which subsystem an element moves.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Carrier<'a> {
    Photon,
    Object(&'a str),
}

impl<'a> Carrier<'a> {
    fn from_opt(object: &'a Option<String>) -> Self {
        match object {
            Some(id) => Carrier::Object(id),
            None => Carrier::Photon,
        }
    }
}

/// Declared photon modes and object state sets of a circuit.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Rails {
    pub modes: BTreeSet<String>,
    pub objects: BTreeMap<String, BTreeSet<String>>,
}

impl Rails {
    pub fn has(&self, carrier: Carrier<'_>, name: &str) -> bool {
        match carrier {
            Carrier::Photon => self.modes.contains(name),
            Carrier::Object(id) => self.objects.get(id).is_some_and(|s| s.contains(name)),
        }
    }
}

/// Beam splitter with intensity transmittance `t`.
pub fn bs_matrix(t: f64, convention: Convention) -> Result<Matrix2> {
    if !(t.is_finite() && (0.0..=1.0).contains(&t)) {
        return Err(Error::BadParam(format!("transmittance {t} outside [0, 1]")));
    }
    let st = Complex::new(t.sqrt(), 0.0);
    let sr = Complex::new((1.0 - t).sqrt(), 0.0);
    let i = Complex::new(0.0, 1.0);
    Ok(match convention {
        Convention::Real => [[st, sr], [sr, -st]],
        Convention::RealSwapped => [[-st, sr], [sr, st]],
        Convention::Symmetric => [[st, i * sr], [i * sr, st]],
    })
}

/// Per-cycle rotation `[[cos θ, −sin θ], [sin θ, cos θ]]` between two cavities.
pub fn coupler_matrix(theta: f64) -> Result<[[f64; 2]; 2]> {
    if !(theta.is_finite() && (0.0..=FRAC_PI_2 + 1e-12).contains(&theta)) {
        return Err(Error::BadParam(format!("coupling angle {theta} outside [0, π/2]")));
    }
    let (s, c) = theta.sin_cos();
    Ok([[c, -s], [s, c]])
}

/// Max-abs deviation of M†M from the identity.
pub fn unitarity_defect(m: &Matrix2) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let acc: Complex = m.iter().map(|row| row[i].conj() * row[j]).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((acc - target).norm());
        }
    }
    worst
}

/// Forward map or its adjoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Direction {
    Forward,
    Adjoint,
}

/// Small unitary acting on a handful of rails of one carrier.
struct LocalUnitary<'a> {
    carrier: Carrier<'a>,
    rails: Vec<&'a str>,
    u: Vec<Vec<Complex>>,
}

impl Element {
    pub fn carrier(&self) -> Carrier<'_> {
        match self {
            Element::BeamSplitter { object, .. }
            | Element::Mirror { object, .. }
            | Element::Phase { object, .. }
            | Element::Detector { object, .. }
            | Element::Coupler { object, .. } => Carrier::from_opt(object),
            Element::Absorber { .. } => Carrier::Photon,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Element::BeamSplitter { .. } => "beam_splitter",
            Element::Mirror { .. } => "mirror",
            Element::Phase { .. } => "phase",
            Element::Absorber { .. } => "absorber",
            Element::Detector { .. } => "detector",
            Element::Coupler { .. } => "coupler",
        }
    }

    /// Every (carrier, rail) the element touches.
    pub fn rails(&self) -> Vec<(Carrier<'_>, &str)> {
        let carrier = self.carrier();
        match self {
            Element::BeamSplitter {
                in_a,
                in_b,
                out_a,
                out_b,
                ..
            } => {
                let mut names: Vec<&str> = vec![in_a, in_b, out_a, out_b];
                names.sort_unstable();
                names.dedup();
                names.into_iter().map(|n| (carrier, n)).collect()
            }
            Element::Mirror { from, to, .. } => vec![(carrier, from.as_str()), (carrier, to.as_str())],
            Element::Phase { mode, .. } | Element::Detector { mode, .. } => vec![(carrier, mode.as_str())],
            Element::Coupler { left, right, .. } => {
                vec![(carrier, left.as_str()), (carrier, right.as_str())]
            }
            Element::Absorber { mode, object, at, .. } => {
                vec![(Carrier::Photon, mode.as_str()), (Carrier::Object(object), at.as_str())]
            }
        }
    }

    /// Parameter and port checks that do not need the circuit.
    pub fn parameter_issues(&self) -> Vec<String> {
        let mut issues = Vec::new();
        match self {
            Element::BeamSplitter {
                in_a,
                in_b,
                out_a,
                out_b,
                transmittance,
                ..
            } => {
                if !(transmittance.is_finite() && (0.0..=1.0).contains(transmittance)) {
                    issues.push(format!("transmittance {transmittance} outside [0, 1]"));
                }
                if in_a == in_b || out_a == out_b {
                    issues.push("beam splitter ports must be distinct".into());
                } else {
                    let ins: BTreeSet<&String> = [in_a, in_b].into();
                    let outs: BTreeSet<&String> = [out_a, out_b].into();
                    let shared = ins.intersection(&outs).count();
                    if shared == 1 {
                        issues.push("beam splitter outputs must equal the inputs or be disjoint from them".into());
                    }
                }
            }
            Element::Mirror { from, to, .. } => {
                if from == to {
                    issues.push("mirror must connect two distinct rails".into());
                }
            }
            Element::Phase { phi, .. } => {
                if !phi.is_finite() {
                    issues.push(format!("phase {phi} is not finite"));
                }
            }
            Element::Absorber { alpha, phase, .. } => {
                if !(alpha.is_finite() && (0.0..=1.0).contains(alpha)) {
                    issues.push(format!("transmittance alpha {alpha} outside [0, 1]"));
                }
                if !phase.is_finite() {
                    issues.push(format!("transmission phase {phase} is not finite"));
                }
            }
            Element::Detector { .. } => {}
            Element::Coupler { left, right, theta, .. } => {
                if coupler_matrix(*theta).is_err() {
                    issues.push(format!("coupling angle {theta} outside [0, π/2]"));
                }
                if left == right {
                    issues.push("coupler must connect two distinct rails".into());
                }
            }
        }
        issues
    }

    fn local_unitary(&self) -> Option<LocalUnitary<'_>> {
        let carrier = self.carrier();
        let one = Complex::new(1.0, 0.0);
        let zero = Complex::new(0.0, 0.0);
        match self {
            Element::BeamSplitter {
                in_a,
                in_b,
                out_a,
                out_b,
                transmittance,
                convention,
                ..
            } => {
                let m = bs_matrix(*transmittance, *convention).ok()?;
                let ins = [in_a.as_str(), in_b.as_str()];
                let outs = [out_a.as_str(), out_b.as_str()];
                if outs.iter().all(|o| ins.contains(o)) {
                    // In place: outputs relabel the same two rails.
                    let mut u = vec![vec![zero; 2]; 2];
                    for (i, out) in outs.iter().enumerate() {
                        let p = ins.iter().position(|r| r == out)?;
                        for j in 0..2 {
                            u[p][j] += m[i][j];
                        }
                    }
                    Some(LocalUnitary {
                        carrier,
                        rails: ins.to_vec(),
                        u,
                    })
                } else {
                    // Distinct output rails: [[0, M†], [M, 0]] on (ins, outs).
                    let mut u = vec![vec![zero; 4]; 4];
                    for i in 0..2 {
                        for j in 0..2 {
                            u[2 + i][j] = m[i][j];
                            u[j][2 + i] = m[i][j].conj();
                        }
                    }
                    Some(LocalUnitary {
                        carrier,
                        rails: vec![ins[0], ins[1], outs[0], outs[1]],
                        u,
                    })
                }
            }
            Element::Mirror { from, to, .. } => Some(LocalUnitary {
                carrier,
                rails: vec![from, to],
                u: vec![vec![zero, one], vec![one, zero]],
            }),
            Element::Phase { mode, phi, .. } => Some(LocalUnitary {
                carrier,
                rails: vec![mode],
                u: vec![vec![Complex::from_polar(1.0, *phi)]],
            }),
            Element::Coupler { left, right, theta, .. } => {
                let r = coupler_matrix(*theta).ok()?;
                Some(LocalUnitary {
                    carrier,
                    rails: vec![left, right],
                    u: r.iter()
                        .map(|row| row.iter().map(|x| Complex::new(*x, 0.0)).collect())
                        .collect(),
                })
            }
            Element::Absorber { .. } | Element::Detector { .. } => None,
        }
    }

    /// Images of one configuration (forward) or its preimages weighted by the
    /// conjugated matrix elements (adjoint).
    pub(crate) fn map_label(&self, label: &BasisLabel, stage: usize, dir: Direction) -> Vec<(BasisLabel, Complex)> {
        let one = Complex::new(1.0, 0.0);
        if let Some(lu) = self.local_unitary() {
            return lu.map_label(label, dir);
        }
        match self {
            Element::Absorber {
                mode,
                object,
                at,
                alpha,
                explosive,
                phase,
            } => {
                let pass = Complex::from_polar(alpha.sqrt(), *phase);
                let block = (1.0 - alpha).sqrt();
                let object_there = label.objects.get(object) == Some(&ObjectState::At(at.clone()));
                let photon_here = label.photon.mode() == Some(mode.as_str());
                match dir {
                    Direction::Forward => {
                        if !(photon_here && object_there) {
                            return vec![(label.clone(), one)];
                        }
                        let mut hit = label.clone();
                        hit.photon = PhotonSlot::Absorbed {
                            stage,
                            mode: mode.clone(),
                        };
                        if *explosive {
                            hit.objects.insert(object.clone(), ObjectState::Exploded);
                        }
                        vec![(label.clone(), pass), (hit, Complex::new(block, 0.0))]
                    }
                    Direction::Adjoint => {
                        if photon_here && object_there {
                            return vec![(label.clone(), pass.conj())];
                        }
                        let absorbed_here = matches!(
                            &label.photon,
                            PhotonSlot::Absorbed { stage: s, mode: m } if *s == stage && m == mode
                        );
                        let object_after = if *explosive {
                            label.objects.get(object) == Some(&ObjectState::Exploded)
                        } else {
                            object_there
                        };
                        if absorbed_here && object_after {
                            let mut pre = label.clone();
                            pre.photon = PhotonSlot::Mode(mode.clone());
                            pre.objects.insert(object.clone(), ObjectState::At(at.clone()));
                            return vec![(pre, Complex::new(block, 0.0))];
                        }
                        vec![(label.clone(), one)]
                    }
                }
            }
            Element::Detector { mode, detector, object } => match object {
                None => {
                    let photon_here = label.photon.mode() == Some(mode.as_str());
                    match dir {
                        Direction::Forward => {
                            if !photon_here {
                                return vec![(label.clone(), one)];
                            }
                            let mut hit = label.clone();
                            hit.photon = PhotonSlot::Absorbed {
                                stage,
                                mode: mode.clone(),
                            };
                            hit.clicked.insert(detector.clone());
                            vec![(hit, one)]
                        }
                        Direction::Adjoint => {
                            if photon_here {
                                return Vec::new();
                            }
                            let absorbed_here = matches!(
                                &label.photon,
                                PhotonSlot::Absorbed { stage: s, mode: m } if *s == stage && m == mode
                            );
                            if absorbed_here && label.clicked.contains(detector) {
                                let mut pre = label.clone();
                                pre.photon = PhotonSlot::Mode(mode.clone());
                                pre.clicked.remove(detector);
                                return vec![(pre, one)];
                            }
                            vec![(label.clone(), one)]
                        }
                    }
                }
                Some(id) => {
                    let object_here = label.objects.get(id).and_then(ObjectState::location) == Some(mode.as_str());
                    let clicked = label.clicked.contains(detector);
                    if !object_here {
                        return vec![(label.clone(), one)];
                    }
                    match (dir, clicked) {
                        (Direction::Forward, false) => vec![(label.clone().with_click(detector.clone()), one)],
                        (Direction::Forward, true) => vec![(label.clone(), one)],
                        (Direction::Adjoint, true) => {
                            let mut pre = label.clone();
                            pre.clicked.remove(detector);
                            vec![(pre, one)]
                        }
                        (Direction::Adjoint, false) => Vec::new(),
                    }
                }
            },
            _ => unreachable!("linear elements are handled by local_unitary"),
        }
    }
}

impl LocalUnitary<'_> {
    fn slot<'l>(&self, label: &'l BasisLabel) -> Option<&'l str> {
        match self.carrier {
            Carrier::Photon => label.photon.mode(),
            Carrier::Object(id) => label.objects.get(id).and_then(ObjectState::location),
        }
    }

    fn relabel(&self, label: &BasisLabel, rail: &str) -> BasisLabel {
        let mut out = label.clone();
        match self.carrier {
            Carrier::Photon => out.photon = PhotonSlot::Mode(rail.to_string()),
            Carrier::Object(id) => {
                out.objects.insert(id.to_string(), ObjectState::At(rail.to_string()));
            }
        }
        out
    }

    fn map_label(&self, label: &BasisLabel, dir: Direction) -> Vec<(BasisLabel, Complex)> {
        let Some(pos) = self.slot(label).and_then(|s| self.rails.iter().position(|r| *r == s)) else {
            return vec![(label.clone(), Complex::new(1.0, 0.0))];
        };
        (0..self.rails.len())
            .filter_map(|k| {
                let coeff = match dir {
                    Direction::Forward => self.u[k][pos],
                    Direction::Adjoint => self.u[pos][k].conj(),
                };
                (coeff != Complex::new(0.0, 0.0)).then(|| (self.relabel(label, self.rails[k]), coeff))
            })
            .collect()
    }
}

pub(crate) fn apply_unchecked(state: &PureState, element: &Element, stage: usize, dir: Direction) -> PureState {
    let mut out: BTreeMap<BasisLabel, Complex> = BTreeMap::new();
    for (label, amp) in state.terms() {
        for (image, coeff) in element.map_label(label, stage, dir) {
            *out.entry(image).or_default() += amp * coeff;
        }
    }
    PureState::from_raw(out, state.tolerance())
}

fn check_rails(element: &Element, rails: &Rails) -> Result<()> {
    for (carrier, name) in element.rails() {
        if let Carrier::Object(id) = carrier {
            if !rails.objects.contains_key(id) {
                return Err(Error::UnknownMode(format!("{id} (object)")));
            }
        }
        if !rails.has(carrier, name) {
            return Err(Error::UnknownMode(name.to_string()));
        }
    }
    let issues = element.parameter_issues();
    if !issues.is_empty() {
        return Err(Error::BadParam(issues.join("; ")));
    }
    Ok(())
}

/// Applies `element` as stage `stage` of a circuit with the given rails.
///
/// Amplitudes are not renormalized; absorbed branches stay in the state as
/// terminal configurations.
pub fn apply_element(state: &PureState, element: &Element, stage: usize, rails: &Rails) -> Result<PureState> {
    check_rails(element, rails)?;
    Ok(apply_unchecked(state, element, stage, Direction::Forward))
}

/// Adjoint of [`apply_element`]. For linear optics this is the inverse.
pub fn apply_element_adjoint(state: &PureState, element: &Element, stage: usize, rails: &Rails) -> Result<PureState> {
    check_rails(element, rails)?;
    Ok(apply_unchecked(state, element, stage, Direction::Adjoint))
}

pub(crate) fn element_issues(stage: usize, index: usize, element: &Element, rails: &Rails) -> Vec<ValidationIssue> {
    let mut issues = Vec::new();
    for (carrier, name) in element.rails() {
        match carrier {
            Carrier::Photon if !rails.modes.contains(name) => issues.push(ValidationIssue::UndeclaredMode {
                stage,
                element: index,
                mode: name.to_string(),
            }),
            Carrier::Object(id) if !rails.objects.contains_key(id) => issues.push(ValidationIssue::UnknownObject {
                stage,
                element: index,
                object: id.to_string(),
            }),
            Carrier::Object(id) if !rails.has(carrier, name) => issues.push(ValidationIssue::UndeclaredMode {
                stage,
                element: index,
                mode: format!("{id}:{name}"),
            }),
            _ => {}
        }
    }
    for message in element.parameter_issues() {
        issues.push(ValidationIssue::BadParam {
            stage,
            element: index,
            message,
        });
    }
    issues
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::superpose;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64) -> Complex {
        Complex::new(re, 0.0)
    }

    fn ev_rails() -> Rails {
        Rails {
            modes: ["int", "free"].iter().map(|s| s.to_string()).collect(),
            objects: [(
                "bomb".to_string(),
                ["in", "out"].iter().map(|s| s.to_string()).collect(),
            )]
            .into(),
        }
    }

    fn bomb(alpha: f64, explosive: bool) -> Element {
        Element::Absorber {
            mode: "int".into(),
            object: "bomb".into(),
            at: "in".into(),
            alpha,
            explosive,
            phase: 0.0,
        }
    }

    fn eq1(object: &str) -> PureState {
        superpose([
            (
                BasisLabel::photon_at("int").with_object("bomb", ObjectState::at(object)),
                c(1.0),
            ),
            (
                BasisLabel::photon_at("free").with_object("bomb", ObjectState::at(object)),
                c(1.0),
            ),
        ])
        .unwrap()
    }

    #[test]
    fn half_splitter() {
        let m = bs_matrix(0.5, Convention::Real).unwrap();
        let h = FRAC_1_SQRT_2;
        let want = [[h, h], [h, -h]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((m[i][j] - c(want[i][j])).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn limiting_and_asymmetric_splitters() {
        let m = bs_matrix(1.0, Convention::Real).unwrap();
        assert_eq!(m, [[c(1.0), c(0.0)], [c(0.0), c(-1.0)]]);

        // √0.8 = 0.894427..., √0.2 = 0.447213...
        let m = bs_matrix(0.8, Convention::Real).unwrap();
        let want = [[0.8944, 0.4472], [0.4472, -0.8944]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((m[i][j].re - want[i][j]).abs() < 5e-5);
                assert_eq!(m[i][j].im, 0.0);
            }
        }
    }

    #[test]
    fn splitter_parameter_range() {
        assert!(matches!(bs_matrix(-0.1, Convention::Real), Err(Error::BadParam(_))));
        assert!(matches!(bs_matrix(1.5, Convention::Symmetric), Err(Error::BadParam(_))));
        assert!(matches!(bs_matrix(f64::NAN, Convention::Real), Err(Error::BadParam(_))));
    }

    #[test]
    fn every_convention_is_unitary() {
        for conv in [Convention::Real, Convention::RealSwapped, Convention::Symmetric] {
            for k in 0..=20 {
                let m = bs_matrix(k as f64 / 20.0, conv).unwrap();
                assert!(unitarity_defect(&m) < 1e-12);
            }
        }
    }

    #[test]
    fn coupler_values() {
        let r = coupler_matrix(0.0).unwrap();
        assert_eq!(r, [[1.0, 0.0], [0.0, 1.0]]);
        let r = coupler_matrix(PI / 2.0).unwrap();
        assert!(r[0][0].abs() < 1e-15 && r[1][1].abs() < 1e-15);
        assert!((r[0][1] + 1.0).abs() < 1e-15 && (r[1][0] - 1.0).abs() < 1e-15);
        // cos(π/20) = 0.987688..., sin(π/20) = 0.156434...
        let r = coupler_matrix(PI / 20.0).unwrap();
        assert!((r[0][0] - 0.98769).abs() < 5e-6);
        assert!((r[0][1] + 0.15643).abs() < 5e-6);
        assert!((r[1][0] - 0.15643).abs() < 5e-6);
        assert!(matches!(coupler_matrix(2.0), Err(Error::BadParam(_))));
        assert!(matches!(coupler_matrix(-0.1), Err(Error::BadParam(_))));
    }

    #[test]
    fn bomb_absorbs_the_interaction_arm() {
        let out = apply_element(&eq1("in"), &bomb(0.0, true), 1, &ev_rails()).unwrap();
        let explosion = BasisLabel {
            photon: PhotonSlot::Absorbed {
                stage: 1,
                mode: "int".into(),
            },
            objects: [("bomb".to_string(), ObjectState::Exploded)].into(),
            clicked: Default::default(),
        };
        let free = BasisLabel::photon_at("free").with_object("bomb", ObjectState::at("in"));
        assert_eq!(out.len(), 2);
        assert!((out.amplitude(&explosion) - c(FRAC_1_SQRT_2)).norm() < 1e-15);
        assert!((out.amplitude(&free) - c(FRAC_1_SQRT_2)).norm() < 1e-15);
    }

    #[test]
    fn absent_or_transparent_object_is_identity() {
        let psi = eq1("out");
        let out = apply_element(&psi, &bomb(0.0, true), 1, &ev_rails()).unwrap();
        assert_eq!(out, psi);

        let psi = eq1("in");
        let out = apply_element(&psi, &bomb(1.0, true), 1, &ev_rails()).unwrap();
        assert!(out.approx_eq(&psi, 1e-15));
        assert_eq!(out.len(), 2);
    }

    #[test]
    fn opaque_blocker_leaves_object_alone() {
        let out = apply_element(&eq1("in"), &bomb(0.0, false), 1, &ev_rails()).unwrap();
        let blocked = out.labels().find(|l| l.photon.is_absorbed()).unwrap();
        assert_eq!(blocked.object("bomb"), Some(&ObjectState::at("in")));
    }

    #[test]
    fn partial_absorption_conserves_weight() {
        for alpha in [0.0, 0.2, 0.5, 0.93, 1.0] {
            let out = apply_element(&eq1("in"), &bomb(alpha, true), 1, &ev_rails()).unwrap();
            let absorbed = out.weight(|l| l.photon.is_absorbed());
            let survived = out.weight(|l| l.photon.mode() == Some("int"));
            assert!((absorbed + survived - 0.5).abs() < 1e-12);
            assert!((survived - 0.5 * alpha).abs() < 1e-12);
        }
    }

    #[test]
    fn unknown_mode_rejected() {
        let el = Element::Phase {
            mode: "nowhere".into(),
            phi: 0.3,
            object: None,
        };
        assert_eq!(
            apply_element(&eq1("in"), &el, 0, &ev_rails()),
            Err(Error::UnknownMode("nowhere".into()))
        );
    }

    #[test]
    fn mach_zehnder_routes_everything_to_one_port() {
        let rails = Rails {
            modes: ["a", "b"].iter().map(|s| s.to_string()).collect(),
            objects: BTreeMap::new(),
        };
        let bs = Element::BeamSplitter {
            in_a: "a".into(),
            in_b: "b".into(),
            out_a: "a".into(),
            out_b: "b".into(),
            transmittance: 0.5,
            convention: Convention::Real,
            object: None,
        };
        let psi = PureState::basis(BasisLabel::photon_at("a"));
        let mid = apply_element(&psi, &bs, 0, &rails).unwrap();
        let out = apply_element(&mid, &bs, 1, &rails).unwrap();
        assert_eq!(out.len(), 1);
        assert!((out.amplitude(&BasisLabel::photon_at("a")) - c(1.0)).norm() < 1e-12);
    }

    #[test]
    fn detector_adjoint_undoes_click() {
        let rails = ev_rails();
        let det = Element::Detector {
            mode: "free".into(),
            detector: "D".into(),
            object: None,
        };
        let psi = eq1("in");
        let out = apply_element(&psi, &det, 3, &rails).unwrap();
        assert!(out.labels().any(|l| l.clicked.contains("D")));
        let back = apply_element_adjoint(&out, &det, 3, &rails).unwrap();
        assert!(back.approx_eq(&psi, 1e-15));
    }
}

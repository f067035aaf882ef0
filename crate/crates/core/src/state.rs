//! Sparse pure states over labeled classical configurations.
//!
//! A configuration ([`BasisLabel`]) records where the single photon is (or
//! where it was absorbed), the discrete state of every object, and which
//! detectors have clicked. A [`PureState`] maps configurations to complex
//! amplitudes and keeps them in a canonical order, so two states built from
//! permuted term lists are bit-identical.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Complex = num_complex::Complex64;

/// Default amplitude-pruning threshold.
pub const DEFAULT_TOLERANCE: f64 = 1e-12;

/// Allowed deviation of Σ|amp|² from one for a normalized state.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Where the photon is in one configuration.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PhotonSlot {
    /// No photon in this sector (object-only circuits).
    None,
    /// Propagating in a mode.
    Mode(String),
    /// Absorbed at `mode` during stage `stage`, by a detector or an object.
    Absorbed { stage: usize, mode: String },
}

impl PhotonSlot {
    pub fn mode(&self) -> Option<&str> {
        match self {
            PhotonSlot::Mode(m) => Some(m),
            _ => None,
        }
    }

    pub fn is_absorbed(&self) -> bool {
        matches!(self, PhotonSlot::Absorbed { .. })
    }
}

/// Discrete state of an object: a location / internal state name, or exploded.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ObjectState {
    At(String),
    Exploded,
}

impl ObjectState {
    pub fn at(name: impl Into<String>) -> Self {
        ObjectState::At(name.into())
    }

    pub fn location(&self) -> Option<&str> {
        match self {
            ObjectState::At(s) => Some(s),
            ObjectState::Exploded => None,
        }
    }
}

/// One classical configuration of photon, objects and detectors.
///
/// Detectors not listed in `clicked` are ready.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BasisLabel {
    pub photon: PhotonSlot,
    pub objects: BTreeMap<String, ObjectState>,
    pub clicked: BTreeSet<String>,
}

impl BasisLabel {
    pub fn photon_at(mode: impl Into<String>) -> Self {
        BasisLabel {
            photon: PhotonSlot::Mode(mode.into()),
            objects: BTreeMap::new(),
            clicked: BTreeSet::new(),
        }
    }

    pub fn vacuum() -> Self {
        BasisLabel {
            photon: PhotonSlot::None,
            objects: BTreeMap::new(),
            clicked: BTreeSet::new(),
        }
    }

    pub fn with_object(mut self, id: impl Into<String>, state: ObjectState) -> Self {
        self.objects.insert(id.into(), state);
        self
    }

    pub fn with_click(mut self, detector: impl Into<String>) -> Self {
        self.clicked.insert(detector.into());
        self
    }

    pub fn object(&self, id: &str) -> Option<&ObjectState> {
        self.objects.get(id)
    }

    /// An exploded object implies the photon was absorbed in that branch.
    pub fn is_consistent(&self) -> bool {
        let exploded = self.objects.values().any(|s| *s == ObjectState::Exploded);
        !exploded || self.photon.is_absorbed()
    }

    /// True once nothing can evolve further: the photon is absorbed or absent.
    pub fn is_terminal(&self) -> bool {
        !matches!(self.photon, PhotonSlot::Mode(_))
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match &self.photon {
            PhotonSlot::None => {}
            PhotonSlot::Mode(m) => parts.push(format!("photon@{m}")),
            PhotonSlot::Absorbed { stage, mode } => parts.push(format!("absorbed@{mode}#{stage}")),
        }
        for (id, s) in &self.objects {
            match s {
                ObjectState::At(loc) => parts.push(format!("{id}={loc}")),
                ObjectState::Exploded => parts.push(format!("{id}=exploded")),
            }
        }
        for d in &self.clicked {
            parts.push(format!("{d}:click"));
        }
        write!(f, "|{}>", parts.join(", "))
    }
}

/// Sparse, canonically ordered map from configurations to amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    terms: BTreeMap<BasisLabel, Complex>,
    tolerance: f64,
}

/// Normalized superposition of `terms` with the default tolerance.
pub fn superpose<I>(terms: I) -> Result<PureState>
where
    I: IntoIterator<Item = (BasisLabel, Complex)>,
{
    PureState::superpose_with_tolerance(terms, DEFAULT_TOLERANCE)
}

/// ⟨a|b⟩, conjugating `a`.
pub fn inner_product(a: &PureState, b: &PureState) -> Complex {
    a.inner(b)
}

/// Measurement of the predicate: probability of the matching subspace and the
/// renormalized restriction onto it (`None` for a zero-probability branch).
pub fn project<F>(state: &PureState, predicate: F) -> (f64, Option<PureState>)
where
    F: Fn(&BasisLabel) -> bool,
{
    let part = state.restrict(predicate);
    let prob = part.norm_sqr();
    if prob > state.tolerance * state.tolerance {
        (prob, Some(part.scaled(1.0 / prob.sqrt())))
    } else {
        (prob, None)
    }
}

impl PureState {
    pub fn superpose_with_tolerance<I>(terms: I, tolerance: f64) -> Result<PureState>
    where
        I: IntoIterator<Item = (BasisLabel, Complex)>,
    {
        if !(tolerance.is_finite() && tolerance >= 0.0) {
            return Err(Error::BadParam(format!("tolerance {tolerance}")));
        }
        let mut list: Vec<(BasisLabel, Complex)> = terms.into_iter().collect();
        for (label, amp) in &list {
            if !(amp.re.is_finite() && amp.im.is_finite()) {
                return Err(Error::BadParam(format!("non-finite amplitude on {label}")));
            }
            if !label.is_consistent() {
                return Err(Error::BadParam(format!(
                    "exploded object without absorbed photon in {label}"
                )));
            }
        }
        // Duplicates are summed in a fixed order so the result does not depend
        // on how the caller ordered the list.
        list.sort_by(|(la, a), (lb, b)| la.cmp(lb).then(a.re.total_cmp(&b.re)).then(a.im.total_cmp(&b.im)));
        let mut merged: BTreeMap<BasisLabel, Complex> = BTreeMap::new();
        for (label, amp) in list {
            *merged.entry(label).or_default() += amp;
        }
        let raw = PureState::from_raw(merged, tolerance);
        if raw.terms.is_empty() {
            return Err(Error::AllZero);
        }
        raw.normalize()
    }

    /// A single configuration with amplitude one.
    pub fn basis(label: BasisLabel) -> PureState {
        let mut terms = BTreeMap::new();
        terms.insert(label, Complex::new(1.0, 0.0));
        PureState {
            terms,
            tolerance: DEFAULT_TOLERANCE,
        }
    }

    /// Raw constructor used by the evolution code: prunes but does not
    /// normalize, so branch weights stay meaningful.
    pub(crate) fn from_raw(mut terms: BTreeMap<BasisLabel, Complex>, tolerance: f64) -> PureState {
        terms.retain(|_, a| a.norm() >= tolerance);
        PureState { terms, tolerance }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> PureState {
        self.tolerance = tolerance;
        self.terms.retain(|_, a| a.norm() >= tolerance);
        self
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BasisLabel, &Complex)> {
        self.terms.iter()
    }

    pub fn labels(&self) -> impl Iterator<Item = &BasisLabel> {
        self.terms.keys()
    }

    /// Terms whose photon is still propagating.
    pub fn live_terms(&self) -> impl Iterator<Item = (&BasisLabel, &Complex)> {
        self.terms.iter().filter(|(l, _)| !l.is_terminal())
    }

    pub fn amplitude(&self, label: &BasisLabel) -> Complex {
        self.terms.get(label).copied().unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().fold(0.0, |s, a| s + a.norm_sqr())
    }

    pub fn normalize(&self) -> Result<PureState> {
        let n = self.norm_sqr();
        if n <= self.tolerance * self.tolerance || self.terms.is_empty() {
            return Err(Error::AllZero);
        }
        Ok(self.scaled(1.0 / n.sqrt()))
    }

    pub fn inner(&self, other: &PureState) -> Complex {
        let (small, large, conj_small) = if self.terms.len() <= other.terms.len() {
            (self, other, true)
        } else {
            (other, self, false)
        };
        let mut acc = Complex::new(0.0, 0.0);
        for (label, a) in &small.terms {
            if let Some(b) = large.terms.get(label) {
                acc += if conj_small { a.conj() * b } else { b.conj() * a };
            }
        }
        acc
    }

    /// Unnormalized restriction to the labels matching `predicate`.
    pub fn restrict<F>(&self, predicate: F) -> PureState
    where
        F: Fn(&BasisLabel) -> bool,
    {
        PureState {
            terms: self
                .terms
                .iter()
                .filter(|(l, _)| predicate(l))
                .map(|(l, a)| (l.clone(), *a))
                .collect(),
            tolerance: self.tolerance,
        }
    }

    /// Weight Σ|amp|² over labels matching `predicate`.
    pub fn weight<F>(&self, predicate: F) -> f64
    where
        F: Fn(&BasisLabel) -> bool,
    {
        self.terms
            .iter()
            .filter(|(l, _)| predicate(l))
            .fold(0.0, |s, (_, a)| s + a.norm_sqr())
    }

    pub(crate) fn scaled(&self, factor: f64) -> PureState {
        PureState::from_raw(
            self.terms.iter().map(|(l, a)| (l.clone(), a * factor)).collect(),
            self.tolerance,
        )
    }

    /// Amplitude-wise comparison.
    pub fn approx_eq(&self, other: &PureState, eps: f64) -> bool {
        let labels: BTreeSet<&BasisLabel> = self.terms.keys().chain(other.terms.keys()).collect();
        labels
            .into_iter()
            .all(|l| (self.amplitude(l) - other.amplitude(l)).norm() <= eps)
    }

    /// Comparison modulo a global phase.
    pub fn approx_eq_up_to_phase(&self, other: &PureState, eps: f64) -> bool {
        let overlap = self.inner(other);
        if overlap.norm() <= eps {
            return self.terms.is_empty() && other.terms.is_empty();
        }
        let phase = overlap / overlap.norm();
        let rotated = PureState {
            terms: self.terms.iter().map(|(l, a)| (l.clone(), a * phase)).collect(),
            tolerance: self.tolerance,
        };
        rotated.approx_eq(other, eps)
    }

    /// Amplitudes of object `id`, if the state factorizes as one fixed
    /// configuration of everything else times a superposition of that object.
    pub fn object_amplitudes(&self, id: &str) -> Option<BTreeMap<ObjectState, Complex>> {
        let mut rest: Option<BasisLabel> = None;
        let mut out = BTreeMap::new();
        for (label, amp) in &self.terms {
            let state = label.objects.get(id)?.clone();
            let mut others = label.clone();
            others.objects.remove(id);
            match &rest {
                None => rest = Some(others),
                Some(r) if *r == others => {}
                Some(_) => return None,
            }
            out.insert(state, *amp);
        }
        Some(out)
    }
}

impl fmt::Display for PureState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(l, a)| format!("({:+.6}{:+.6}i){l}", a.re, a.im))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> Complex {
        Complex::new(re, 0.0)
    }

    fn a() -> BasisLabel {
        BasisLabel::photon_at("A")
    }

    fn b() -> BasisLabel {
        BasisLabel::photon_at("B")
    }

    #[test]
    fn equal_weight_split() {
        let psi = superpose([
            (BasisLabel::photon_at("int"), c(FRAC_1_SQRT_2)),
            (BasisLabel::photon_at("free"), c(FRAC_1_SQRT_2)),
        ])
        .unwrap();
        assert_eq!(psi.len(), 2);
        assert!((psi.norm_sqr() - 1.0).abs() < 1e-12);
        assert!((psi.amplitude(&BasisLabel::photon_at("int")).re - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn single_term_is_identity() {
        let psi = superpose([(a(), c(1.0))]).unwrap();
        assert_eq!(psi, PureState::basis(a()));
    }

    #[test]
    fn duplicates_merge_then_normalize() {
        let psi = superpose([(a(), c(0.6)), (a(), c(0.8))]).unwrap();
        assert_eq!(psi.len(), 1);
        assert!((psi.amplitude(&a()) - c(1.0)).norm() < 1e-15);
    }

    #[test]
    fn all_zero_rejected() {
        assert_eq!(superpose([(a(), c(0.0)), (b(), c(1e-14))]), Err(Error::AllZero));
        assert_eq!(superpose(Vec::new()), Err(Error::AllZero));
    }

    #[test]
    fn non_finite_rejected() {
        assert!(matches!(
            superpose([(a(), Complex::new(f64::NAN, 0.0))]),
            Err(Error::BadParam(_))
        ));
    }

    #[test]
    fn exploded_requires_absorbed_photon() {
        let bad = BasisLabel::photon_at("int").with_object("bomb", ObjectState::Exploded);
        assert!(matches!(superpose([(bad, c(1.0))]), Err(Error::BadParam(_))));
    }

    #[test]
    fn inner_products() {
        let psi = superpose([(a(), c(0.3)), (b(), Complex::new(0.1, 0.7))]).unwrap();
        assert!((inner_product(&psi, &psi) - c(1.0)).norm() < 1e-12);
        assert_eq!(inner_product(&PureState::basis(a()), &PureState::basis(b())), c(0.0));
        // (|A>+|B>)/√2 against (|A>-|B>)/√2: (1·1 + 1·(-1))/2 = 0
        let plus = superpose([(a(), c(1.0)), (b(), c(1.0))]).unwrap();
        let minus = superpose([(a(), c(1.0)), (b(), c(-1.0))]).unwrap();
        assert!(inner_product(&plus, &minus).norm() < 1e-15);
    }

    #[test]
    fn inner_conjugates_left() {
        let i_a = superpose([(a(), Complex::new(0.0, 1.0))]).unwrap();
        let one_a = PureState::basis(a());
        assert!((inner_product(&i_a, &one_a) - Complex::new(0.0, -1.0)).norm() < 1e-15);
        assert!((inner_product(&one_a, &i_a) - Complex::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn projection_cases() {
        let psi = superpose([(a(), c(1.0)), (b(), c(1.0))]).unwrap();
        let (p, cond) = project(&psi, |l| *l == a());
        assert!((p - 0.5).abs() < 1e-12);
        assert!(cond.unwrap().approx_eq(&PureState::basis(a()), 1e-12));

        let (p, cond) = project(&PureState::basis(a()), |l| *l == b());
        assert_eq!(p, 0.0);
        assert!(cond.is_none());
    }

    #[test]
    fn global_phase_helper() {
        let psi = superpose([(a(), c(0.6)), (b(), c(0.8))]).unwrap();
        let rotated = superpose([
            (a(), Complex::from_polar(0.6, 1.1)),
            (b(), Complex::from_polar(0.8, 1.1)),
        ])
        .unwrap();
        assert!(!psi.approx_eq(&rotated, 1e-9));
        assert!(psi.approx_eq_up_to_phase(&rotated, 1e-12));
    }

    #[test]
    fn factorized_object_amplitudes() {
        let base = BasisLabel::vacuum().with_click("D2");
        let psi = superpose([
            (base.clone().with_object("o", ObjectState::at("in")), c(0.6)),
            (base.clone().with_object("o", ObjectState::at("out")), c(0.8)),
        ])
        .unwrap();
        let amps = psi.object_amplitudes("o").unwrap();
        assert!((amps[&ObjectState::at("in")] - c(0.6)).norm() < 1e-12);

        let entangled = superpose([
            (
                BasisLabel::photon_at("x").with_object("o", ObjectState::at("in")),
                c(1.0),
            ),
            (
                BasisLabel::photon_at("y").with_object("o", ObjectState::at("out")),
                c(1.0),
            ),
        ])
        .unwrap();
        assert!(entangled.object_amplitudes("o").is_none());
    }
}

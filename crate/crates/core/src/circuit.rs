//! Staged circuits: validation, exact evolution, outcome distributions and
//! conditional (post-selected) states.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optics::{self, Carrier, Direction, Element, Rails};
use crate::state::{BasisLabel, Complex, ObjectState, PhotonSlot, PureState, DEFAULT_TOLERANCE};

/// Initial amplitude of one object state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialAmplitude {
    pub state: String,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectSpec {
    pub id: String,
    /// Discrete states (locations) the object can occupy.
    pub states: Vec<String>,
    /// Initial superposition; renormalized when the input is built.
    pub initial: Vec<InitialAmplitude>,
}

impl ObjectSpec {
    pub fn definite(id: impl Into<String>, states: &[&str], initial: &str) -> Self {
        ObjectSpec {
            id: id.into(),
            states: states.iter().map(|s| s.to_string()).collect(),
            initial: vec![InitialAmplitude {
                state: initial.to_string(),
                re: 1.0,
                im: 0.0,
            }],
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Stage {
    #[serde(default)]
    pub elements: Vec<Element>,
}

impl From<Vec<Element>> for Stage {
    fn from(elements: Vec<Element>) -> Self {
        Stage { elements }
    }
}

/// An ordered list of stages over declared photon modes and objects.
///
/// Cut `k` sits before stage `k`; cut `stages.len()` is after the last stage.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Circuit {
    pub modes: Vec<String>,
    /// Mode the photon enters on; `None` for photon-free circuits.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub objects: Vec<ObjectSpec>,
    pub stages: Vec<Stage>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub postselection: Option<EventSelector>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "issue", rename_all = "snake_case")]
pub enum ValidationIssue {
    EmptyCircuit,
    DuplicateMode {
        mode: String,
    },
    UndeclaredSource {
        mode: String,
    },
    BadObject {
        object: String,
        message: String,
    },
    ModeClash {
        stage: usize,
        mode: String,
    },
    UndeclaredMode {
        stage: usize,
        element: usize,
        mode: String,
    },
    UnknownObject {
        stage: usize,
        element: usize,
        object: String,
    },
    BadParam {
        stage: usize,
        element: usize,
        message: String,
    },
    DuplicateDetector {
        detector: String,
    },
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ValidationIssue::*;
        match self {
            EmptyCircuit => write!(f, "EMPTY_CIRCUIT: circuit has no stages"),
            DuplicateMode { mode } => write!(f, "DUPLICATE_MODE: `{mode}` declared twice"),
            UndeclaredSource { mode } => write!(f, "UNDECLARED_MODE: source `{mode}` is not a declared mode"),
            BadObject { object, message } => write!(f, "BAD_OBJECT: `{object}`: {message}"),
            ModeClash { stage, mode } => {
                write!(f, "MODE_CLASH: stage {stage}: `{mode}` used by more than one element")
            }
            UndeclaredMode { stage, element, mode } => {
                write!(f, "UNDECLARED_MODE: stage {stage} element {element}: `{mode}`")
            }
            UnknownObject { stage, element, object } => {
                write!(f, "UNKNOWN_OBJECT: stage {stage} element {element}: `{object}`")
            }
            BadParam {
                stage,
                element,
                message,
            } => {
                write!(f, "BAD_PARAM: stage {stage} element {element}: {message}")
            }
            DuplicateDetector { detector } => {
                write!(f, "DUPLICATE_DETECTOR: `{detector}` appears more than once")
            }
        }
    }
}

/// All violations of the circuit invariants; `Ok` iff there are none.
pub fn validate(circuit: &Circuit) -> std::result::Result<(), Vec<ValidationIssue>> {
    let mut issues = Vec::new();
    if circuit.stages.is_empty() {
        issues.push(ValidationIssue::EmptyCircuit);
    }
    let mut seen = BTreeSet::new();
    for m in &circuit.modes {
        if !seen.insert(m) {
            issues.push(ValidationIssue::DuplicateMode { mode: m.clone() });
        }
    }
    if let Some(src) = &circuit.source {
        if !seen.contains(src) {
            issues.push(ValidationIssue::UndeclaredSource { mode: src.clone() });
        }
    }
    let mut ids = BTreeSet::new();
    for obj in &circuit.objects {
        let bad = |message: String| ValidationIssue::BadObject {
            object: obj.id.clone(),
            message,
        };
        if !ids.insert(&obj.id) {
            issues.push(bad("declared twice".into()));
        }
        let states: BTreeSet<&String> = obj.states.iter().collect();
        if states.len() != obj.states.len() {
            issues.push(bad("duplicate state names".into()));
        }
        if obj.states.is_empty() {
            issues.push(bad("no states declared".into()));
        }
        let mut weight = 0.0;
        for amp in &obj.initial {
            if !states.contains(&amp.state) {
                issues.push(bad(format!("initial state `{}` not declared", amp.state)));
            }
            if !(amp.re.is_finite() && amp.im.is_finite()) {
                issues.push(bad("non-finite initial amplitude".into()));
            }
            weight += amp.re * amp.re + amp.im * amp.im;
        }
        if weight.is_nan() || weight <= DEFAULT_TOLERANCE * DEFAULT_TOLERANCE {
            issues.push(bad("initial amplitudes are all zero".into()));
        }
    }
    let rails = circuit.rails();
    let mut detectors = BTreeSet::new();
    for (s, stage) in circuit.stages.iter().enumerate() {
        let mut used: BTreeSet<(Carrier<'_>, &str)> = BTreeSet::new();
        let mut clashed = BTreeSet::new();
        for (e, element) in stage.elements.iter().enumerate() {
            issues.extend(optics::element_issues(s, e, element, &rails));
            for rail in element.rails() {
                if !used.insert(rail) && clashed.insert(rail) {
                    let mode = match rail.0 {
                        Carrier::Photon => rail.1.to_string(),
                        Carrier::Object(id) => format!("{id}:{}", rail.1),
                    };
                    issues.push(ValidationIssue::ModeClash { stage: s, mode });
                }
            }
            if let Element::Detector { detector, .. } = element {
                if !detectors.insert(detector.as_str()) {
                    issues.push(ValidationIssue::DuplicateDetector {
                        detector: detector.clone(),
                    });
                }
            }
        }
    }
    if issues.is_empty() {
        Ok(())
    } else {
        Err(issues)
    }
}

impl Circuit {
    pub fn new<S: Into<String>>(modes: impl IntoIterator<Item = S>) -> Self {
        Circuit {
            modes: modes.into_iter().map(Into::into).collect(),
            ..Default::default()
        }
    }

    pub fn with_source(mut self, mode: impl Into<String>) -> Self {
        self.source = Some(mode.into());
        self
    }

    pub fn with_object(mut self, object: ObjectSpec) -> Self {
        self.objects.push(object);
        self
    }

    pub fn with_stage(mut self, elements: Vec<Element>) -> Self {
        self.stages.push(Stage { elements });
        self
    }

    pub fn with_postselection(mut self, selector: EventSelector) -> Self {
        self.postselection = Some(selector);
        self
    }

    pub fn num_cuts(&self) -> usize {
        self.stages.len() + 1
    }

    pub fn rails(&self) -> Rails {
        Rails {
            modes: self.modes.iter().cloned().collect(),
            objects: self
                .objects
                .iter()
                .map(|o| (o.id.clone(), o.states.iter().cloned().collect()))
                .collect(),
        }
    }

    pub fn detectors(&self) -> BTreeSet<&str> {
        self.stages
            .iter()
            .flat_map(|s| &s.elements)
            .filter_map(|e| match e {
                Element::Detector { detector, .. } => Some(detector.as_str()),
                _ => None,
            })
            .collect()
    }

    /// Product of the photon at `source` and every object's initial superposition.
    pub fn initial_state(&self) -> Result<PureState> {
        if let Err(issues) = validate(self) {
            return Err(Error::Invalid(issues));
        }
        let photon = match &self.source {
            Some(m) => BasisLabel::photon_at(m.clone()),
            None => BasisLabel::vacuum(),
        };
        let mut terms = vec![(photon, Complex::new(1.0, 0.0))];
        for obj in &self.objects {
            let mut next = Vec::with_capacity(terms.len() * obj.initial.len());
            for (label, amp) in &terms {
                for init in &obj.initial {
                    let l = label
                        .clone()
                        .with_object(obj.id.clone(), ObjectState::At(init.state.clone()));
                    next.push((l, amp * Complex::new(init.re, init.im)));
                }
            }
            terms = next;
        }
        crate::state::superpose(terms)
    }

    fn check_input(&self, input: &PureState) -> Result<()> {
        let rails = self.rails();
        let detectors = self.detectors();
        for label in input.labels() {
            match &label.photon {
                PhotonSlot::Mode(m) if !rails.modes.contains(m) => return Err(Error::UnknownMode(m.clone())),
                PhotonSlot::Absorbed { mode, .. } if !rails.modes.contains(mode) => {
                    return Err(Error::UnknownMode(mode.clone()))
                }
                _ => {}
            }
            for (id, s) in &label.objects {
                let Some(states) = rails.objects.get(id) else {
                    return Err(Error::UnknownMode(format!("{id} (object)")));
                };
                if let ObjectState::At(loc) = s {
                    if !states.contains(loc) {
                        return Err(Error::UnknownMode(format!("{id}:{loc}")));
                    }
                }
            }
            if let Some(d) = label.clicked.iter().find(|d| detectors.contains(d.as_str())) {
                return Err(Error::BadParam(format!("input has detector `{d}` already clicked")));
            }
        }
        Ok(())
    }

    fn prepare(&self, input: &PureState) -> Result<()> {
        if let Err(issues) = validate(self) {
            return Err(Error::Invalid(issues));
        }
        self.check_input(input)
    }
}

pub(crate) fn apply_stage(state: &PureState, stage: &Stage, index: usize, dir: Direction) -> PureState {
    let mut current = state.clone();
    match dir {
        Direction::Forward => {
            for e in &stage.elements {
                current = optics::apply_unchecked(&current, e, index, dir);
            }
        }
        Direction::Adjoint => {
            for e in stage.elements.iter().rev() {
                current = optics::apply_unchecked(&current, e, index, dir);
            }
        }
    }
    current
}

/// States at every cut, starting with `input` at cut 0.
pub fn trajectory(circuit: &Circuit, input: &PureState) -> Result<Vec<PureState>> {
    circuit.prepare(input)?;
    let mut states = Vec::with_capacity(circuit.num_cuts());
    states.push(input.clone());
    for (k, stage) in circuit.stages.iter().enumerate() {
        let next = apply_stage(&states[k], stage, k, Direction::Forward);
        states.push(next);
    }
    Ok(states)
}

/// Terminal joint state after all stages; absorbed branches are kept as
/// terminal configurations and nothing is renormalized.
pub fn evolve(circuit: &Circuit, input: &PureState) -> Result<PureState> {
    Ok(trajectory(circuit, input)?.pop().expect("at least one cut"))
}

pub(crate) fn evolve_from(circuit: &Circuit, state: &PureState, cut: usize) -> PureState {
    circuit.stages[cut..]
        .iter()
        .enumerate()
        .fold(state.clone(), |s, (k, stage)| {
            apply_stage(&s, stage, cut + k, Direction::Forward)
        })
}

/// What happened to the photon at the end of a run.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhotonOutcome {
    #[default]
    None,
    Absorbed,
    Mode(String),
}

/// Observable record of one run: exploded objects, clicked detectors, and the
/// photon's final whereabouts.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TerminalEvent {
    pub exploded: BTreeSet<String>,
    pub clicked: BTreeSet<String>,
    pub photon: PhotonOutcome,
}

impl TerminalEvent {
    pub fn of(label: &BasisLabel) -> TerminalEvent {
        TerminalEvent {
            exploded: label
                .objects
                .iter()
                .filter(|(_, s)| **s == ObjectState::Exploded)
                .map(|(id, _)| id.clone())
                .collect(),
            clicked: label.clicked.clone(),
            photon: match &label.photon {
                PhotonSlot::None => PhotonOutcome::None,
                PhotonSlot::Mode(m) => PhotonOutcome::Mode(m.clone()),
                PhotonSlot::Absorbed { .. } => PhotonOutcome::Absorbed,
            },
        }
    }

    pub fn click(detector: &str) -> TerminalEvent {
        TerminalEvent {
            clicked: [detector.to_string()].into(),
            photon: PhotonOutcome::Absorbed,
            ..Default::default()
        }
    }

    pub fn explosion(object: &str) -> TerminalEvent {
        TerminalEvent {
            exploded: [object.to_string()].into(),
            photon: PhotonOutcome::Absorbed,
            ..Default::default()
        }
    }

    pub fn photon_in(mode: &str) -> TerminalEvent {
        TerminalEvent {
            photon: PhotonOutcome::Mode(mode.to_string()),
            ..Default::default()
        }
    }

    pub fn absorbed() -> TerminalEvent {
        TerminalEvent {
            photon: PhotonOutcome::Absorbed,
            ..Default::default()
        }
    }

    pub fn selector(&self) -> EventSelector {
        EventSelector {
            exploded: self.exploded.clone(),
            clicked: self.clicked.clone(),
            photon: Some(self.photon.clone()),
        }
    }
}

impl fmt::Display for TerminalEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.exploded.iter().map(|o| format!("explosion:{o}")).collect();
        parts.extend(self.clicked.iter().cloned());
        match &self.photon {
            PhotonOutcome::Mode(m) => parts.push(format!("photon@{m}")),
            PhotonOutcome::Absorbed if parts.is_empty() => parts.push("absorbed".into()),
            PhotonOutcome::None if parts.is_empty() => parts.push("nophoton".into()),
            _ => {}
        }
        write!(f, "{}", parts.join(","))
    }
}

/// Predicate over terminal events: every listed explosion and click must have
/// happened, and the photon outcome must match when given.
///
/// Text form is a comma-separated token list: `D2`, `explosion:bomb`,
/// `photon@left`, `absorbed`, `nophoton`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct EventSelector {
    pub exploded: BTreeSet<String>,
    pub clicked: BTreeSet<String>,
    pub photon: Option<PhotonOutcome>,
}

impl EventSelector {
    pub fn clicks<'a>(detectors: impl IntoIterator<Item = &'a str>) -> EventSelector {
        EventSelector {
            clicked: detectors.into_iter().map(str::to_string).collect(),
            ..Default::default()
        }
    }

    pub fn explosion(object: &str) -> EventSelector {
        EventSelector {
            exploded: [object.to_string()].into(),
            ..Default::default()
        }
    }

    pub fn photon(outcome: PhotonOutcome) -> EventSelector {
        EventSelector {
            photon: Some(outcome),
            ..Default::default()
        }
    }

    pub fn matches(&self, event: &TerminalEvent) -> bool {
        self.exploded.is_subset(&event.exploded)
            && self.clicked.is_subset(&event.clicked)
            && self.photon.as_ref().is_none_or(|p| *p == event.photon)
    }

    pub fn matches_label(&self, label: &BasisLabel) -> bool {
        self.matches(&TerminalEvent::of(label))
    }
}

impl fmt::Display for EventSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.exploded.iter().map(|o| format!("explosion:{o}")).collect();
        parts.extend(self.clicked.iter().cloned());
        match &self.photon {
            Some(PhotonOutcome::Mode(m)) => parts.push(format!("photon@{m}")),
            Some(PhotonOutcome::Absorbed) => parts.push("absorbed".into()),
            Some(PhotonOutcome::None) => parts.push("nophoton".into()),
            None => {}
        }
        if parts.is_empty() {
            return write!(f, "any");
        }
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for EventSelector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut sel = EventSelector::default();
        let valid_name = |n: &str| !n.is_empty() && n.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '-');
        for token in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let photon = |sel: &mut EventSelector, p: PhotonOutcome| -> Result<()> {
                if sel.photon.replace(p).is_some() {
                    return Err(Error::BadParam(format!("event `{s}` names the photon outcome twice")));
                }
                Ok(())
            };
            if token == "any" {
                continue;
            } else if token == "absorbed" {
                photon(&mut sel, PhotonOutcome::Absorbed)?;
            } else if token == "nophoton" {
                photon(&mut sel, PhotonOutcome::None)?;
            } else if let Some(m) = token.strip_prefix("photon@") {
                if !valid_name(m) {
                    return Err(Error::BadParam(format!("bad mode in `{token}`")));
                }
                photon(&mut sel, PhotonOutcome::Mode(m.to_string()))?;
            } else if let Some(o) = token.strip_prefix("explosion:") {
                if !valid_name(o) {
                    return Err(Error::BadParam(format!("bad object in `{token}`")));
                }
                sel.exploded.insert(o.to_string());
            } else if valid_name(token) {
                sel.clicked.insert(token.to_string());
            } else {
                return Err(Error::BadParam(format!("cannot parse event token `{token}`")));
            }
        }
        Ok(sel)
    }
}

impl TryFrom<String> for EventSelector {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<EventSelector> for String {
    fn from(s: EventSelector) -> String {
        s.to_string()
    }
}

impl From<&TerminalEvent> for EventSelector {
    fn from(e: &TerminalEvent) -> Self {
        e.selector()
    }
}

/// Probabilities of terminal events.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct OutcomeDistribution {
    entries: BTreeMap<TerminalEvent, f64>,
}

impl OutcomeDistribution {
    pub fn from_state(state: &PureState) -> OutcomeDistribution {
        let mut entries: BTreeMap<TerminalEvent, f64> = BTreeMap::new();
        for (label, amp) in state.terms() {
            *entries.entry(TerminalEvent::of(label)).or_default() += amp.norm_sqr();
        }
        OutcomeDistribution { entries }
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (TerminalEvent, f64)>) -> Result<OutcomeDistribution> {
        let mut map: BTreeMap<TerminalEvent, f64> = BTreeMap::new();
        for (event, p) in entries {
            if !(p.is_finite() && (0.0..=1.0 + 1e-9).contains(&p)) {
                return Err(Error::BadParam(format!("probability {p} for {event}")));
            }
            *map.entry(event).or_default() += p;
        }
        let total: f64 = map.values().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::BadParam(format!("probabilities sum to {total}")));
        }
        Ok(OutcomeDistribution { entries: map })
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TerminalEvent, f64)> {
        self.entries.iter().map(|(e, p)| (e, *p))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, event: &TerminalEvent) -> f64 {
        self.entries.get(event).copied().unwrap_or(0.0)
    }

    /// Total probability of events accepted by `selector`.
    pub fn probability(&self, selector: &EventSelector) -> f64 {
        self.entries
            .iter()
            .filter(|(e, _)| selector.matches(e))
            .fold(0.0, |s, (_, p)| s + p)
    }

    pub fn total(&self) -> f64 {
        self.entries.values().fold(0.0, |s, p| s + p)
    }
}

pub fn outcome_distribution(circuit: &Circuit, input: &PureState) -> Result<OutcomeDistribution> {
    Ok(OutcomeDistribution::from_state(&evolve(circuit, input)?))
}

/// Probability of the selected events and the renormalized joint state given
/// them (`None` below tolerance²).
pub fn conditional_state(
    circuit: &Circuit,
    input: &PureState,
    event: &EventSelector,
) -> Result<(f64, Option<PureState>)> {
    let out = evolve(circuit, input)?;
    Ok(crate::state::project(&out, |l| event.matches_label(l)))
}

/// Negative-result collapse: drops the configurations matched by
/// `null_predicate` (the detector that did not fire) and renormalizes.
pub fn negative_result_update<F>(state: &PureState, null_predicate: F) -> Result<PureState>
where
    F: Fn(&BasisLabel) -> bool,
{
    let rest = state.restrict(|l| !null_predicate(l));
    let tol = state.tolerance();
    if rest.norm_sqr() <= tol * tol {
        return Err(Error::CertainDetection);
    }
    rest.normalize()
}

/// Joint probabilities of a projective (Lüders) measurement at a cut and a
/// later post-selection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CutMeasurement {
    /// P(projector yes ∧ post-selection).
    pub yes_and_post: f64,
    /// P(projector no ∧ post-selection).
    pub no_and_post: f64,
    /// P(projector yes), regardless of the post-selection.
    pub yes: f64,
}

impl CutMeasurement {
    /// P(yes | post-selection), `None` when the post-selection is impossible.
    pub fn conditional(&self) -> Option<f64> {
        let total = self.yes_and_post + self.no_and_post;
        (total > 0.0).then(|| self.yes_and_post / total)
    }
}

/// Measures `projector` at `cut`, lets both branches evolve separately to the
/// end, and reports how often each branch satisfies `post`.
pub fn measured_at_cut<F>(
    circuit: &Circuit,
    input: &PureState,
    cut: usize,
    projector: F,
    post: &EventSelector,
) -> Result<CutMeasurement>
where
    F: Fn(&BasisLabel) -> bool,
{
    if cut >= circuit.num_cuts() {
        return Err(Error::BadCut {
            cut,
            cuts: circuit.num_cuts(),
        });
    }
    let states = trajectory(circuit, input)?;
    let at_cut = &states[cut];
    let yes_part = at_cut.restrict(&projector);
    let no_part = at_cut.restrict(|l| !projector(l));
    let post_weight = |part: &PureState| {
        if part.is_empty() {
            return 0.0;
        }
        evolve_from(circuit, part, cut).weight(|l| post.matches_label(l))
    };
    Ok(CutMeasurement {
        yes_and_post: post_weight(&yes_part),
        no_and_post: post_weight(&no_part),
        yes: yes_part.norm_sqr(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::Convention;
    use crate::state::superpose;

    fn bs(a: &str, b: &str, t: f64) -> Element {
        Element::BeamSplitter {
            in_a: a.into(),
            in_b: b.into(),
            out_a: a.into(),
            out_b: b.into(),
            transmittance: t,
            convention: Convention::Real,
            object: None,
        }
    }

    #[test]
    fn clash_and_empty_detected() {
        let c = Circuit::new(["a", "b", "c"]).with_stage(vec![bs("a", "b", 0.5), bs("b", "c", 0.5)]);
        let issues = validate(&c).unwrap_err();
        assert!(issues.contains(&ValidationIssue::ModeClash {
            stage: 0,
            mode: "b".into()
        }));

        let empty = Circuit::new(["a"]);
        assert_eq!(validate(&empty), Err(vec![ValidationIssue::EmptyCircuit]));
    }

    #[test]
    fn undeclared_and_duplicate_detector() {
        let c = Circuit::new(["a"])
            .with_stage(vec![Element::Detector {
                mode: "zz".into(),
                detector: "D".into(),
                object: None,
            }])
            .with_stage(vec![Element::Detector {
                mode: "a".into(),
                detector: "D".into(),
                object: None,
            }]);
        let issues = validate(&c).unwrap_err();
        assert!(issues
            .iter()
            .any(|i| matches!(i, ValidationIssue::UndeclaredMode { mode, .. } if mode == "zz")));
        assert!(issues.contains(&ValidationIssue::DuplicateDetector { detector: "D".into() }));
    }

    #[test]
    fn identity_stage_leaves_input() {
        let c = Circuit::new(["a", "b"]).with_stage(vec![]);
        let psi = superpose([
            (BasisLabel::photon_at("a"), Complex::new(0.6, 0.0)),
            (BasisLabel::photon_at("b"), Complex::new(0.0, 0.8)),
        ])
        .unwrap();
        assert_eq!(evolve(&c, &psi).unwrap(), psi);
    }

    #[test]
    fn evolve_rejects_unknown_input_mode() {
        let c = Circuit::new(["a"]).with_stage(vec![]);
        let psi = PureState::basis(BasisLabel::photon_at("q"));
        assert_eq!(evolve(&c, &psi), Err(Error::UnknownMode("q".into())));
    }

    #[test]
    fn negative_results() {
        let a = BasisLabel::photon_at("A");
        let b = BasisLabel::photon_at("B");
        let psi = superpose([
            (a.clone(), Complex::new(0.3f64.sqrt(), 0.0)),
            (b.clone(), Complex::new(0.7f64.sqrt(), 0.0)),
        ])
        .unwrap();
        let after = negative_result_update(&psi, |l| *l == a).unwrap();
        assert!(after.approx_eq(&PureState::basis(b.clone()), 1e-12));

        let only_b = PureState::basis(b.clone());
        assert_eq!(negative_result_update(&only_b, |l| *l == a).unwrap(), only_b);

        assert_eq!(
            negative_result_update(&only_b, |l| *l == b),
            Err(Error::CertainDetection)
        );
    }

    #[test]
    fn renninger_sectors() {
        // Four equal sectors, detector covers sector 0 and stays silent.
        let sectors: Vec<_> = (0..4).map(|k| BasisLabel::photon_at(format!("s{k}"))).collect();
        let psi = superpose(sectors.iter().map(|l| (l.clone(), Complex::new(0.5, 0.0)))).unwrap();
        let after = negative_result_update(&psi, |l| l.photon.mode() == Some("s0")).unwrap();
        assert_eq!(after.len(), 3);
        for l in &sectors[1..] {
            assert!((after.amplitude(l).norm_sqr() - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn selector_text_round_trip() {
        for text in [
            "D2",
            "D1,D2",
            "explosion:bomb",
            "photon@left",
            "absorbed",
            "explosion:o,oD2",
        ] {
            let sel: EventSelector = text.parse().unwrap();
            let again: EventSelector = sel.to_string().parse().unwrap();
            assert_eq!(sel, again);
        }
        assert!("D2,photon@a,absorbed".parse::<EventSelector>().is_err());
        assert!("D 2".parse::<EventSelector>().is_err());
    }

    #[test]
    fn event_display() {
        assert_eq!(TerminalEvent::click("D1").to_string(), "D1");
        assert_eq!(TerminalEvent::explosion("bomb").to_string(), "explosion:bomb");
        assert_eq!(TerminalEvent::photon_in("left").to_string(), "photon@left");
        assert_eq!(TerminalEvent::absorbed().to_string(), "absorbed");
    }
}

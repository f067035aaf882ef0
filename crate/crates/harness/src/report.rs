//! Machine-readable records (JSON) and human-readable tables.

use std::collections::BTreeMap;
use std::fmt::Write;

use ifm_core::{Complex, OutcomeDistribution};
use serde::{Deserialize, Serialize};

/// Bumped whenever a field is renamed or removed.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Amp {
    pub re: f64,
    pub im: f64,
}

impl From<Complex> for Amp {
    fn from(c: Complex) -> Self {
        Amp { re: c.re, im: c.im }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EventRow {
    pub event: String,
    pub probability: f64,
}

pub fn event_rows(dist: &OutcomeDistribution) -> Vec<EventRow> {
    dist.iter()
        .map(|(e, p)| EventRow {
            event: e.to_string(),
            probability: p,
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateRow {
    pub state: String,
    pub amplitude: Amp,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Postselected {
    pub event: String,
    pub probability: f64,
    /// Object amplitudes given the event, when the object factorizes out.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub objects: BTreeMap<String, Vec<StateRow>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundRow {
    pub round: usize,
    pub reach: f64,
    pub found: f64,
    pub exploded: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrontierRow {
    pub transmittance: f64,
    pub efficiency: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZenoRow {
    pub cycles: usize,
    pub left_given_bomb: f64,
    pub explosion: f64,
    pub right_given_absent: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "protocol", rename_all = "snake_case")]
pub enum ProtocolOutput {
    EvSingleShot {
        distribution: Vec<EventRow>,
        efficiency: f64,
    },
    EvRepeated {
        single_shot: Vec<EventRow>,
        efficiency: f64,
        found_fraction: f64,
        exploded_fraction: f64,
        undecided_fraction: f64,
        rounds: Vec<RoundRow>,
    },
    EfficiencyFrontier {
        rows: Vec<FrontierRow>,
        supremum: f64,
    },
    Zeno {
        rows: Vec<ZenoRow>,
    },
    Hardy {
        joint: Vec<EventRow>,
        both_dark_ports: f64,
        annihilation: f64,
        object_at_w_given_d2: f64,
        photon_at_w_given_od2: f64,
        pair_at_w_given_both: f64,
        weak_photon_at_w: Amp,
        weak_object_at_w: Amp,
        weak_pair_at_w: Amp,
        weak_free_pair: Amp,
    },
    DickeLocalization {
        p_d2: f64,
        object: Vec<StateRow>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalRow {
    pub event: String,
    pub probability: f64,
    pub count: u64,
    pub frequency: f64,
    /// √(p(1−p)/shots) with the exact p.
    pub standard_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Empirical {
    pub shots: u64,
    pub seed: u64,
    pub rows: Vec<EmpiricalRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub version: String,
    pub generator: String,
    pub tolerance: f64,
}

impl Default for Metadata {
    fn default() -> Self {
        Metadata {
            version: env!("CARGO_PKG_VERSION").to_string(),
            generator: crate::sampling::GENERATOR.to_string(),
            tolerance: ifm_core::state::DEFAULT_TOLERANCE,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<Vec<EventRow>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub postselected: Option<Postselected>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub protocol: Option<ProtocolOutput>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub empirical: Option<Empirical>,
    pub metadata: Metadata,
}

impl RunReport {
    pub fn new(name: impl Into<String>) -> Self {
        RunReport {
            schema_version: SCHEMA_VERSION,
            name: name.into(),
            exact: None,
            postselected: None,
            protocol: None,
            empirical: None,
            metadata: Metadata::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabelRow {
    pub label: String,
    pub amplitude: Amp,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutRow {
    pub cut: usize,
    pub forward: Vec<LabelRow>,
    pub backward: Vec<LabelRow>,
    pub overlap: Amp,
    /// Per photon mode: no trace possible there at this cut.
    pub trace_free: BTreeMap<String, bool>,
    /// Per photon mode; absent when the overlap vanishes.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub weak_values: BTreeMap<String, Amp>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TsvfReport {
    pub schema_version: u32,
    pub name: String,
    pub postselection: String,
    pub probability: f64,
    pub cuts: Vec<CutRow>,
    pub metadata: Metadata,
}

pub fn to_json<T: Serialize>(report: &T) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
    s.push('\n');
    s
}

/// Six decimals, without a sign on values that round to zero.
fn p6(x: f64) -> String {
    let x = if x.abs() < 5e-7 { 0.0 } else { x };
    format!("{x:.6}")
}

fn s6(x: f64) -> String {
    let x = if x.abs() < 5e-7 { 0.0 } else { x };
    format!("{x:+.6}")
}

fn amp(a: Amp) -> String {
    if a.im.abs() < 5e-7 {
        s6(a.re)
    } else {
        format!("{}{}i", s6(a.re), s6(a.im))
    }
}

/// Left-aligned first column, right-aligned rest.
fn table(out: &mut String, header: &[&str], rows: &[Vec<String>]) {
    let mut w: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for r in rows {
        for (i, c) in r.iter().enumerate() {
            w[i] = w[i].max(c.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let mut s = String::new();
        for (i, c) in cells.iter().enumerate() {
            if i == 0 {
                let _ = write!(s, "{c:<width$}", width = w[0]);
            } else {
                let _ = write!(s, "  {c:>width$}", width = w[i]);
            }
        }
        s.trim_end().to_string()
    };
    let _ = writeln!(out, "{}", line(header.to_vec()));
    let _ = writeln!(out, "{}", "-".repeat(w.iter().sum::<usize>() + 2 * (w.len() - 1)));
    for r in rows {
        let _ = writeln!(out, "{}", line(r.iter().map(String::as_str).collect()));
    }
}

fn events_table(out: &mut String, rows: &[EventRow]) {
    let rows: Vec<Vec<String>> = rows.iter().map(|r| vec![r.event.clone(), p6(r.probability)]).collect();
    table(out, &["event", "probability"], &rows);
}

fn states_table(out: &mut String, rows: &[StateRow]) {
    let rows: Vec<Vec<String>> = rows.iter().map(|r| vec![r.state.clone(), amp(r.amplitude)]).collect();
    table(out, &["state", "amplitude"], &rows);
}

fn protocol_text(out: &mut String, p: &ProtocolOutput) {
    match p {
        ProtocolOutput::EvSingleShot {
            distribution,
            efficiency,
        } => {
            let _ = writeln!(out, "protocol ev_single_shot");
            events_table(out, distribution);
            let _ = writeln!(out, "efficiency {}", p6(*efficiency));
        }
        ProtocolOutput::EvRepeated {
            efficiency,
            found_fraction,
            exploded_fraction,
            undecided_fraction,
            rounds,
            ..
        } => {
            let _ = writeln!(out, "protocol ev_repeated");
            if !rounds.is_empty() {
                let rows: Vec<Vec<String>> = rounds
                    .iter()
                    .map(|r| vec![r.round.to_string(), p6(r.reach), p6(r.found), p6(r.exploded)])
                    .collect();
                table(out, &["round", "reach", "found", "exploded"], &rows);
            }
            let _ = writeln!(
                out,
                "found {}  exploded {}  undecided {}  efficiency {}",
                p6(*found_fraction),
                p6(*exploded_fraction),
                p6(*undecided_fraction),
                p6(*efficiency)
            );
        }
        ProtocolOutput::EfficiencyFrontier { rows, supremum } => {
            let _ = writeln!(out, "protocol efficiency_frontier");
            let rows: Vec<Vec<String>> = rows
                .iter()
                .map(|r| vec![p6(r.transmittance), p6(r.efficiency)])
                .collect();
            table(out, &["T", "efficiency"], &rows);
            let _ = writeln!(out, "supremum {supremum} (not attained)");
        }
        ProtocolOutput::Zeno { rows } => {
            let _ = writeln!(out, "protocol zeno");
            let rows: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.cycles.to_string(),
                        p6(r.left_given_bomb),
                        p6(r.explosion),
                        p6(r.right_given_absent),
                    ]
                })
                .collect();
            table(out, &["N", "P(left|bomb)", "P(explosion)", "P(right|absent)"], &rows);
        }
        ProtocolOutput::Hardy {
            joint,
            both_dark_ports,
            annihilation,
            object_at_w_given_d2,
            photon_at_w_given_od2,
            pair_at_w_given_both,
            weak_photon_at_w,
            weak_object_at_w,
            weak_pair_at_w,
            weak_free_pair,
        } => {
            let _ = writeln!(out, "protocol hardy");
            events_table(out, joint);
            let rows = vec![
                vec!["D2 and oD2".to_string(), p6(*both_dark_ports)],
                vec!["annihilation".to_string(), p6(*annihilation)],
                vec!["object in W | D2".to_string(), p6(*object_at_w_given_d2)],
                vec!["photon in W | oD2".to_string(), p6(*photon_at_w_given_od2)],
                vec!["pair in W | D2, oD2".to_string(), p6(*pair_at_w_given_both)],
            ];
            table(out, &["query", "probability"], &rows);
            let rows = vec![
                vec!["photon in W".to_string(), amp(*weak_photon_at_w)],
                vec!["object in W".to_string(), amp(*weak_object_at_w)],
                vec!["pair in W".to_string(), amp(*weak_pair_at_w)],
                vec!["both free arms".to_string(), amp(*weak_free_pair)],
            ];
            table(out, &["weak value", "given D2, oD2"], &rows);
        }
        ProtocolOutput::DickeLocalization { p_d2, object } => {
            let _ = writeln!(out, "protocol dicke_localization");
            let _ = writeln!(out, "P(D2) {}", p6(*p_d2));
            states_table(out, object);
        }
    }
}

pub fn run_text(r: &RunReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "scenario {}", r.name);
    if let Some(exact) = &r.exact {
        let _ = writeln!(out);
        events_table(&mut out, exact);
    }
    if let Some(p) = &r.postselected {
        let _ = writeln!(out);
        let _ = writeln!(out, "post-selected on {}: probability {}", p.event, p6(p.probability));
        for (id, rows) in &p.objects {
            let _ = writeln!(out, "object {id}");
            states_table(&mut out, rows);
        }
    }
    if let Some(p) = &r.protocol {
        let _ = writeln!(out);
        protocol_text(&mut out, p);
    }
    if let Some(e) = &r.empirical {
        let _ = writeln!(out);
        let _ = writeln!(out, "sampled {} shots, seed {}", e.shots, e.seed);
        let rows: Vec<Vec<String>> = e
            .rows
            .iter()
            .map(|x| {
                vec![
                    x.event.clone(),
                    p6(x.probability),
                    x.count.to_string(),
                    p6(x.frequency),
                    p6(x.standard_error),
                ]
            })
            .collect();
        table(&mut out, &["event", "exact", "count", "frequency", "se"], &rows);
    }
    out
}

pub fn tsvf_text(r: &TsvfReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "scenario {}  post-selection {}  probability {}",
        r.name,
        r.postselection,
        p6(r.probability)
    );
    for c in &r.cuts {
        let _ = writeln!(out);
        let _ = writeln!(out, "cut {}  overlap {}", c.cut, amp(c.overlap));
        let mut labels: BTreeMap<&str, [Option<Amp>; 2]> = BTreeMap::new();
        for row in &c.forward {
            labels.entry(&row.label).or_default()[0] = Some(row.amplitude);
        }
        for row in &c.backward {
            labels.entry(&row.label).or_default()[1] = Some(row.amplitude);
        }
        let show = |a: Option<Amp>| a.map_or("0".to_string(), amp);
        let rows: Vec<Vec<String>> = labels
            .into_iter()
            .map(|(l, [f, b])| vec![l.to_string(), show(f), show(b)])
            .collect();
        table(&mut out, &["label", "forward", "backward"], &rows);
        let rows: Vec<Vec<String>> = c
            .trace_free
            .iter()
            .map(|(m, free)| {
                vec![
                    m.clone(),
                    if *free { "yes" } else { "no" }.to_string(),
                    c.weak_values.get(m).map_or("-".to_string(), |w| amp(*w)),
                ]
            })
            .collect();
        table(&mut out, &["mode", "trace-free", "weak value"], &rows);
    }
    out
}

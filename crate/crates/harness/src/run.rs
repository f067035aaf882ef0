//! Evaluates scenarios and protocols into reports.

use std::collections::BTreeMap;

use ifm_core::protocols::{
    dicke_localization, efficiency, efficiency_frontier, ev_repeated, ev_single_shot, hardy_conditional, hardy_joint,
    hardy_weak_values, zeno_run, HardyConfig, HardyQuery, HardyVariant, ObjectKind, RepeatMode, Rounds, ZenoObject,
    EFFICIENCY_SUPREMUM,
};
use ifm_core::tsvf::Projector;
use ifm_core::{
    conditional_state, outcome_distribution, two_state_vector, Complex, Error, EventSelector, ObjectState, PureState,
    TerminalEvent,
};

use crate::error::Result;
use crate::report::*;
use crate::sampling::{sample, standard_error};
use crate::scenario::{ObjectChoice, ProtocolSpec, RepeatChoice, SamplingSpec, ScenarioSpec};

pub fn run_protocol(protocol: &ProtocolSpec) -> Result<ProtocolOutput> {
    protocol.check()?;
    Ok(match protocol {
        ProtocolSpec::EvSingleShot {
            transmittance,
            object,
            alpha,
        } => {
            let kind = match object {
                ObjectChoice::Absent => ObjectKind::Absent,
                ObjectChoice::Bomb => ObjectKind::Bomb,
                ObjectChoice::Opaque => ObjectKind::Opaque,
                ObjectChoice::SemiTransparent => ObjectKind::SemiTransparent {
                    alpha: alpha.unwrap_or(0.0),
                },
            };
            let d = ev_single_shot(*transmittance, kind)?;
            ProtocolOutput::EvSingleShot {
                distribution: event_rows(&d),
                efficiency: efficiency(&d),
            }
        }
        ProtocolSpec::EvRepeated {
            transmittance,
            max_rounds,
            mode,
        } => {
            let rounds = max_rounds.map_or(Rounds::Unbounded, Rounds::Finite);
            let mode = match mode {
                RepeatChoice::Analytic => RepeatMode::Analytic,
                RepeatChoice::Simulated => RepeatMode::Simulated,
            };
            let r = ev_repeated(*transmittance, rounds, mode)?;
            ProtocolOutput::EvRepeated {
                single_shot: event_rows(&r.single_shot),
                efficiency: r.efficiency,
                found_fraction: r.found_fraction,
                exploded_fraction: r.exploded_fraction,
                undecided_fraction: r.undecided_fraction,
                rounds: r
                    .rounds
                    .iter()
                    .map(|x| RoundRow {
                        round: x.round,
                        reach: x.reach,
                        found: x.found,
                        exploded: x.exploded,
                    })
                    .collect(),
            }
        }
        ProtocolSpec::EfficiencyFrontier { grid } => ProtocolOutput::EfficiencyFrontier {
            rows: efficiency_frontier(grid)?
                .into_iter()
                .map(|(transmittance, efficiency)| FrontierRow {
                    transmittance,
                    efficiency,
                })
                .collect(),
            supremum: EFFICIENCY_SUPREMUM,
        },
        ProtocolSpec::Zeno { cycles } => ProtocolOutput::Zeno {
            rows: cycles
                .iter()
                .map(|&n| {
                    let bomb = zeno_run(n, ZenoObject::Bomb)?;
                    let empty = zeno_run(n, ZenoObject::Absent)?;
                    Ok(ZenoRow {
                        cycles: n,
                        left_given_bomb: bomb.get(&TerminalEvent::photon_in("left")),
                        explosion: bomb.get(&TerminalEvent::explosion("bomb")),
                        right_given_absent: empty.get(&TerminalEvent::photon_in("right")),
                    })
                })
                .collect::<ifm_core::Result<_>>()?,
        },
        ProtocolSpec::Hardy {
            photon_transmittance,
            object_transmittance,
        } => {
            let joint = hardy_joint(HardyConfig {
                photon_transmittance: *photon_transmittance,
                object_transmittance: *object_transmittance,
                variant: HardyVariant::Full,
            })?;
            // conditionals and weak values belong to the fixed 50/50 construction
            let w = hardy_weak_values(ifm_core::protocols::HARDY_W_CUT)?;
            ProtocolOutput::Hardy {
                both_dark_ports: joint.probability(&EventSelector::clicks(["D2", "oD2"])),
                annihilation: joint.probability(&EventSelector::explosion("object")),
                joint: event_rows(&joint),
                object_at_w_given_d2: hardy_conditional(HardyQuery::ObjectAtW)?,
                photon_at_w_given_od2: hardy_conditional(HardyQuery::PhotonAtW)?,
                pair_at_w_given_both: hardy_conditional(HardyQuery::BothAtW)?,
                weak_photon_at_w: w.photon_at_w.into(),
                weak_object_at_w: w.object_at_w.into(),
                weak_pair_at_w: w.both_at_w.into(),
                weak_free_pair: w.neither_at_w.into(),
            }
        }
        ProtocolSpec::DickeLocalization {
            amplitudes,
            interaction,
        } => {
            let sup: Vec<(String, Complex)> = amplitudes
                .iter()
                .map(|a| (a.state.clone(), Complex::new(a.re, a.im)))
                .collect();
            let loc = dicke_localization(&sup, interaction)?;
            ProtocolOutput::DickeLocalization {
                p_d2: loc.p_d2,
                object: loc
                    .object
                    .into_iter()
                    .flatten()
                    .map(|(s, a)| StateRow {
                        state: state_name(&s),
                        amplitude: a.into(),
                    })
                    .collect(),
            }
        }
    })
}

fn state_name(s: &ObjectState) -> String {
    s.location().unwrap_or("exploded").to_string()
}

fn object_rows(state: &PureState, ids: impl Iterator<Item = String>) -> BTreeMap<String, Vec<StateRow>> {
    ids.filter_map(|id| {
        let amps = state.object_amplitudes(&id)?;
        let rows = amps
            .into_iter()
            .map(|(s, a)| StateRow {
                state: state_name(&s),
                amplitude: a.into(),
            })
            .collect();
        Some((id, rows))
    })
    .collect()
}

/// Exact distribution, post-selection, protocol and (optionally) sampled
/// counts. `sampling` overrides the scenario's own `[sampling]` table.
pub fn run_scenario(scenario: &ScenarioSpec, sampling: Option<SamplingSpec>) -> Result<RunReport> {
    let circuit = &scenario.circuit;
    let input = circuit.initial_state()?;
    let dist = outcome_distribution(circuit, &input)?;
    let mut report = RunReport::new(scenario.name.clone());
    report.exact = Some(event_rows(&dist));
    if let Some(post) = &circuit.postselection {
        let (p, cond) = conditional_state(circuit, &input, post)?;
        report.postselected = Some(Postselected {
            event: post.to_string(),
            probability: p,
            objects: cond
                .map(|c| object_rows(&c, circuit.objects.iter().map(|o| o.id.clone())))
                .unwrap_or_default(),
        });
    }
    if let Some(p) = &scenario.protocol {
        report.protocol = Some(run_protocol(p)?);
    }
    if let Some(s) = sampling.or(scenario.sampling) {
        let counts = sample(&dist, s.shots, s.seed)?;
        report.empirical = Some(Empirical {
            shots: s.shots,
            seed: s.seed,
            rows: dist
                .iter()
                .map(|(e, p)| {
                    let count = counts.get(e).copied().unwrap_or(0);
                    EmpiricalRow {
                        event: e.to_string(),
                        probability: p,
                        count,
                        frequency: count as f64 / s.shots as f64,
                        standard_error: standard_error(p, s.shots),
                    }
                })
                .collect(),
        });
    }
    Ok(report)
}

/// Per-cut forward and backward states, trace-free map and weak values for
/// every photon mode.
pub fn run_tsvf(scenario: &ScenarioSpec, post: &EventSelector) -> Result<TsvfReport> {
    let circuit = &scenario.circuit;
    let input = circuit.initial_state()?;
    let tsv = two_state_vector(circuit, &input, post)?;
    let rows = |s: &PureState| -> Vec<LabelRow> {
        s.terms()
            .map(|(l, a)| LabelRow {
                label: l.to_string(),
                amplitude: (*a).into(),
            })
            .collect()
    };
    let mut cuts = Vec::with_capacity(tsv.num_cuts());
    for cut in 0..tsv.num_cuts() {
        let mut trace_free = BTreeMap::new();
        let mut weak_values = BTreeMap::new();
        for mode in &circuit.modes {
            let pr = Projector::photon_in([mode.as_str()]);
            trace_free.insert(mode.clone(), tsv.trace_free(cut, &pr)?);
            match tsv.weak_value(cut, &pr) {
                Ok(w) => {
                    weak_values.insert(mode.clone(), w.into());
                }
                Err(Error::ZeroOverlap) => {}
                Err(e) => return Err(e.into()),
            }
        }
        cuts.push(CutRow {
            cut,
            forward: rows(&tsv.forward[cut]),
            backward: rows(&tsv.backward[cut]),
            overlap: tsv.overlap_at(cut)?.into(),
            trace_free,
            weak_values,
        });
    }
    Ok(TsvfReport {
        schema_version: SCHEMA_VERSION,
        name: scenario.name.clone(),
        postselection: post.to_string(),
        probability: tsv.probability,
        cuts,
        metadata: Metadata::default(),
    })
}

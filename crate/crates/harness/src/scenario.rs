//! Scenario files: TOML documents with a `name`, a `[circuit]` table and
//! optional `[protocol]` and `[sampling]` tables. See `scenarios/README.md`
//! for the schema.

use ifm_core::{validate, Circuit, InitialAmplitude};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

pub const KNOWN_KINDS: [&str; 6] = ["beam_splitter", "mirror", "phase", "absorber", "detector", "coupler"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub circuit: Circuit,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub protocol: Option<ProtocolSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampling: Option<SamplingSpec>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingSpec {
    pub shots: u64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectChoice {
    Absent,
    Bomb,
    Opaque,
    SemiTransparent,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepeatChoice {
    #[default]
    Analytic,
    Simulated,
}

fn half() -> f64 {
    0.5
}

/// Named protocol run alongside the circuit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProtocolSpec {
    EvSingleShot {
        transmittance: f64,
        object: ObjectChoice,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        alpha: Option<f64>,
    },
    EvRepeated {
        transmittance: f64,
        /// Omitted for the unbounded series.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        max_rounds: Option<usize>,
        #[serde(default)]
        mode: RepeatChoice,
    },
    EfficiencyFrontier {
        grid: Vec<f64>,
    },
    Zeno {
        cycles: Vec<usize>,
    },
    Hardy {
        #[serde(default = "half")]
        photon_transmittance: f64,
        #[serde(default = "half")]
        object_transmittance: f64,
    },
    DickeLocalization {
        amplitudes: Vec<InitialAmplitude>,
        interaction: String,
    },
}

fn open_unit(field: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(invalid(field, format!("{x} is not in (0, 1)")))
    }
}

fn invalid(field: &str, message: impl Into<String>) -> HarnessError {
    HarnessError::InvalidField {
        field: field.to_string(),
        message: message.into(),
    }
}

impl ProtocolSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ProtocolSpec::EvSingleShot { .. } => "ev_single_shot",
            ProtocolSpec::EvRepeated { .. } => "ev_repeated",
            ProtocolSpec::EfficiencyFrontier { .. } => "efficiency_frontier",
            ProtocolSpec::Zeno { .. } => "zeno",
            ProtocolSpec::Hardy { .. } => "hardy",
            ProtocolSpec::DickeLocalization { .. } => "dicke_localization",
        }
    }

    pub fn check(&self) -> Result<()> {
        match self {
            ProtocolSpec::EvSingleShot {
                transmittance,
                object,
                alpha,
            } => {
                open_unit("protocol.transmittance", *transmittance)?;
                match (object, alpha) {
                    (ObjectChoice::SemiTransparent, None) => {
                        Err(invalid("protocol.alpha", "required for a semi_transparent object"))
                    }
                    (ObjectChoice::SemiTransparent, Some(a)) if !(0.0..=1.0).contains(a) => {
                        Err(invalid("protocol.alpha", format!("{a} is not in [0, 1]")))
                    }
                    (ObjectChoice::SemiTransparent, Some(_)) | (_, None) => Ok(()),
                    (_, Some(_)) => Err(invalid("protocol.alpha", "only used with a semi_transparent object")),
                }
            }
            ProtocolSpec::EvRepeated {
                transmittance,
                max_rounds,
                mode,
            } => {
                open_unit("protocol.transmittance", *transmittance)?;
                match (max_rounds, mode) {
                    (Some(0), _) => Err(invalid("protocol.max_rounds", "must be at least 1")),
                    (None, RepeatChoice::Simulated) => {
                        Err(invalid("protocol.max_rounds", "simulated mode needs a round count"))
                    }
                    _ => Ok(()),
                }
            }
            ProtocolSpec::EfficiencyFrontier { grid } => {
                if grid.is_empty() {
                    return Err(invalid("protocol.grid", "empty"));
                }
                grid.iter().try_for_each(|&t| open_unit("protocol.grid", t))
            }
            ProtocolSpec::Zeno { cycles } => {
                if cycles.is_empty() || cycles.contains(&0) {
                    return Err(invalid("protocol.cycles", "need one or more positive cycle counts"));
                }
                Ok(())
            }
            ProtocolSpec::Hardy {
                photon_transmittance,
                object_transmittance,
            } => {
                open_unit("protocol.photon_transmittance", *photon_transmittance)?;
                open_unit("protocol.object_transmittance", *object_transmittance)
            }
            ProtocolSpec::DickeLocalization { amplitudes, .. } => {
                let w: f64 = amplitudes.iter().map(|a| a.re * a.re + a.im * a.im).sum();
                if (w - 1.0).abs() > 1e-9 {
                    return Err(invalid("protocol.amplitudes", format!("total weight {w}, expected 1")));
                }
                Ok(())
            }
        }
    }
}

/// Line and column (1-based) of a byte offset.
fn position(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

fn parse_error(text: &str, e: toml::de::Error) -> HarnessError {
    let (line, column) = e.span().map_or((0, 0), |s| position(text, s.start));
    HarnessError::Parse {
        line,
        column,
        message: e.message().trim().to_string(),
    }
}

fn check_kinds(text: &str, doc: &toml::Table) -> Result<()> {
    let stages = doc
        .get("circuit")
        .and_then(|c| c.get("stages"))
        .and_then(|s| s.as_array());
    for (i, stage) in stages.into_iter().flatten().enumerate() {
        let elements = stage.get("elements").and_then(|e| e.as_array());
        for (j, element) in elements.into_iter().flatten().enumerate() {
            let Some(kind) = element.get("kind").and_then(|k| k.as_str()) else {
                continue;
            };
            if !KNOWN_KINDS.contains(&kind) {
                let quoted = format!("\"{kind}\"");
                let line = text
                    .lines()
                    .position(|l| l.contains("kind") && l.contains(&quoted))
                    .map(|n| n + 1);
                return Err(HarnessError::UnknownElementKind {
                    kind: kind.to_string(),
                    field: format!("circuit.stages[{i}].elements[{j}].kind"),
                    line,
                });
            }
        }
    }
    Ok(())
}

pub fn parse_scenario(text: &str) -> Result<ScenarioSpec> {
    let doc: toml::Table = toml::from_str(text).map_err(|e| parse_error(text, e))?;
    check_kinds(text, &doc)?;
    let scenario: ScenarioSpec = toml::from_str(text).map_err(|e| parse_error(text, e))?;
    validate(&scenario.circuit).map_err(|issues| HarnessError::Validation { issues })?;
    if let Some(p) = &scenario.protocol {
        p.check()?;
    }
    if let Some(s) = &scenario.sampling {
        if s.shots == 0 {
            return Err(invalid("sampling.shots", "must be at least 1"));
        }
        if s.seed > i64::MAX as u64 {
            return Err(invalid("sampling.seed", "must fit in a signed 64-bit integer"));
        }
    }
    Ok(scenario)
}

pub fn serialize_scenario(scenario: &ScenarioSpec) -> Result<String> {
    toml::to_string(scenario).map_err(|e| HarnessError::Io(e.to_string()))
}

/// Scenario files shipped with the crate, by name.
pub const BUNDLED: [(&str, &str); 9] = [
    ("ev_bomb", include_str!("../scenarios/ev_bomb.scenario")),
    ("ev_empty", include_str!("../scenarios/ev_empty.scenario")),
    ("ev_asymmetric", include_str!("../scenarios/ev_asymmetric.scenario")),
    ("penrose", include_str!("../scenarios/penrose.scenario")),
    ("wheeler_open", include_str!("../scenarios/wheeler_open.scenario")),
    (
        "renninger_sectors",
        include_str!("../scenarios/renninger_sectors.scenario"),
    ),
    ("dicke_ev", include_str!("../scenarios/dicke_ev.scenario")),
    ("hardy", include_str!("../scenarios/hardy.scenario")),
    ("zeno", include_str!("../scenarios/zeno.scenario")),
];

pub fn bundled(name: &str) -> Option<&'static str> {
    let name = name.strip_suffix(".scenario").unwrap_or(name);
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

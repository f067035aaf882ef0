use thiserror::Error;

use crate::circuit::ValidationIssue;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("superposition has no term above the pruning tolerance")]
    AllZero,

    #[error("bad parameter: {0}")]
    BadParam(String),

    #[error("unknown mode `{0}`")]
    UnknownMode(String),

    #[error("invalid circuit: {}", format_issues(.0))]
    Invalid(Vec<ValidationIssue>),

    #[error("null outcome has zero probability; the detector fires with certainty")]
    CertainDetection,

    #[error("post-selection has zero probability")]
    ImpossiblePostselection,

    #[error("forward and backward states have zero overlap")]
    ZeroOverlap,

    #[error("cut {cut} out of range (circuit has {cuts} cuts)")]
    BadCut { cut: usize, cuts: usize },
}

fn format_issues(issues: &[ValidationIssue]) -> String {
    issues.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;

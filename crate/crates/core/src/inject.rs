//! Labeled error injection into dual LPs.
//!
//! Each [`ErrorType`] applies one edit to one target drawn from the eligible
//! targets. Draws use ChaCha8 seeded with `seed` through `seed_from_u64`
//! (the `rand_chacha` 0.10 construction); the target index is
//! `next_u64() % remaining`. When an edit leaves the LP equivalent to the
//! source (CGED 0), that target is removed and another one drawn.

use std::fmt;
use std::str::FromStr;

use rand_chacha::rand_core::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ged::GedError;
use crate::lp::{BoundKind, ConstraintSense, LinearProgram};
use crate::metrics::{cged_with, MetricOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ErrorType {
    WrongObjectiveSense,
    MissingVariable,
    MissingConstraint,
    FlippedConstraintSense,
    FlippedBoundSense,
}

impl ErrorType {
    pub const ALL: [ErrorType; 5] = [
        ErrorType::WrongObjectiveSense,
        ErrorType::MissingVariable,
        ErrorType::MissingConstraint,
        ErrorType::FlippedConstraintSense,
        ErrorType::FlippedBoundSense,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorType::WrongObjectiveSense => "WRONG_OBJECTIVE_SENSE",
            ErrorType::MissingVariable => "MISSING_VARIABLE",
            ErrorType::MissingConstraint => "MISSING_CONSTRAINT",
            ErrorType::FlippedConstraintSense => "FLIPPED_CONSTRAINT_SENSE",
            ErrorType::FlippedBoundSense => "FLIPPED_BOUND_SENSE",
        }
    }
}

impl fmt::Display for ErrorType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ErrorType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_uppercase().replace('-', "_");
        ErrorType::ALL
            .into_iter()
            .find(|t| t.as_str() == norm)
            .ok_or_else(|| format!("unknown error type `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InjectionRecord {
    pub mutated: LinearProgram,
    pub error: ErrorType,
    /// Name of the edited variable or constraint, or `objective`.
    pub location: String,
    pub seed: u64,
    /// Number of targets tried, including the one returned.
    pub attempts: usize,
}

#[derive(Debug, Error)]
pub enum InjectError {
    #[error("no eligible target for {0}")]
    NoTarget(ErrorType),
    #[error("every eligible target for {0} leaves the LP equivalent")]
    AllNoOps(ErrorType),
    #[error(transparent)]
    Ged(#[from] GedError),
}

fn targets(lp: &LinearProgram, etype: ErrorType, opts: &MetricOptions) -> Vec<String> {
    match etype {
        ErrorType::WrongObjectiveSense => vec!["objective".to_string()],
        ErrorType::MissingVariable => lp.variables.iter().map(|v| v.name.clone()).collect(),
        ErrorType::MissingConstraint => lp.constraints.iter().map(|c| c.name.clone()).collect(),
        ErrorType::FlippedConstraintSense => lp
            .constraints
            .iter()
            .filter(|c| c.sense != ConstraintSense::Eq)
            .map(|c| c.name.clone())
            .collect(),
        ErrorType::FlippedBoundSense => lp
            .variables
            .iter()
            .filter(|v| {
                matches!(
                    v.bound_kind(&opts.tol),
                    BoundKind::NonNegative | BoundKind::NonPositive
                )
            })
            .map(|v| v.name.clone())
            .collect(),
    }
}

/// Applies the edit of `etype` at `target` without any other change.
pub fn mutate(lp: &LinearProgram, etype: ErrorType, target: &str) -> LinearProgram {
    let mut out = lp.clone();
    match etype {
        ErrorType::WrongObjectiveSense => out.objective_sense = out.objective_sense.flipped(),
        ErrorType::MissingVariable => {
            out.variables.retain(|v| v.name != target);
            out.objective.remove(target);
            for c in &mut out.constraints {
                c.coefficients.remove(target);
            }
        }
        ErrorType::MissingConstraint => out.constraints.retain(|c| c.name != target),
        ErrorType::FlippedConstraintSense => {
            if let Some(c) = out.constraints.iter_mut().find(|c| c.name == target) {
                c.sense = c.sense.negated();
            }
        }
        ErrorType::FlippedBoundSense => {
            if let Some(v) = out.variables.iter_mut().find(|v| v.name == target) {
                (v.lower, v.upper) = if v.upper == f64::INFINITY {
                    (f64::NEG_INFINITY, 0.0)
                } else {
                    (0.0, f64::INFINITY)
                };
            }
        }
    }
    out
}

pub fn inject(
    lp: &LinearProgram,
    etype: ErrorType,
    seed: u64,
) -> Result<InjectionRecord, InjectError> {
    inject_with(lp, etype, seed, &MetricOptions::default())
}

pub fn inject_with(
    lp: &LinearProgram,
    etype: ErrorType,
    seed: u64,
    opts: &MetricOptions,
) -> Result<InjectionRecord, InjectError> {
    let mut remaining = targets(lp, etype, opts);
    if remaining.is_empty() {
        return Err(InjectError::NoTarget(etype));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut attempts = 0;
    while !remaining.is_empty() {
        let idx = (rng.next_u64() % remaining.len() as u64) as usize;
        let target = remaining.remove(idx);
        attempts += 1;
        let mutated = mutate(lp, etype, &target);
        let (distance, _) = cged_with(lp, &mutated, opts)?;
        if distance > opts.tol.atol {
            return Ok(InjectionRecord {
                mutated,
                error: etype,
                location: target,
                seed,
                attempts,
            });
        }
    }
    Err(InjectError::AllNoOps(etype))
}

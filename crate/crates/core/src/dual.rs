//! Symbolic LP dualization.
//!
//! Two independent procedures are provided. [`DualizationMethod::StandardForm`]
//! applies the textbook min-form map (maximization primals are negated first
//! and the dual objective negated back). [`DualizationMethod::Sob`] reads the
//! sensible/odd/bizarre table directly for either objective sense. Both
//! produce duals that are equivalent after canonicalization.
//!
//! Before either map runs, every finite bound that is not a plain sign bound
//! (`x >= 0` or `x <= 0`) is lifted into a constraint named `lb_<x>` or
//! `ub_<x>` and the variable becomes free, so that each such bound gets its own
//! dual variable.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ged::{EditPath, GedError};
use crate::lp::{
    BoundKind, ConstraintSense, LinearConstraint, LinearProgram, ObjectiveSense, Variable,
};
use crate::metrics::{cged_with, MetricOptions};
use crate::tol::Tolerance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DualizationMethod {
    StandardForm,
    Sob,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualizationReport {
    pub method: DualizationMethod,
    pub dual: LinearProgram,
    /// Primal constraint name (including lifted bound rows) to dual variable name.
    pub variable_map: BTreeMap<String, String>,
    /// Primal variable name to dual constraint name.
    pub constraint_map: BTreeMap<String, String>,
}

/// Sign of a primal variable after bound lifting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sign {
    NonNegative,
    NonPositive,
    Free,
}

/// Moves every non-sign finite bound into an explicit constraint.
pub fn lift_bounds(lp: &LinearProgram, tol: &Tolerance) -> LinearProgram {
    let mut out = lp.clone();
    for i in 0..lp.variables.len() {
        let name = lp.variables[i].name.clone();
        let kind = lp.variables[i].bound_kind(tol);
        let (lower, upper) = match kind {
            BoundKind::NonNegative | BoundKind::NonPositive | BoundKind::Free => continue,
            BoundKind::Lower(l) => (Some(l), None),
            BoundKind::Upper(u) => (None, Some(u)),
            BoundKind::Boxed(l, u) => (Some(l), Some(u)),
        };
        if let Some(l) = lower {
            let row = out.fresh_name(&format!("lb_{name}"));
            out.constraints.push(LinearConstraint::new(
                row,
                [(name.as_str(), 1.0)],
                ConstraintSense::Geq,
                l,
            ));
        }
        if let Some(u) = upper {
            let row = out.fresh_name(&format!("ub_{name}"));
            out.constraints.push(LinearConstraint::new(
                row,
                [(name.as_str(), 1.0)],
                ConstraintSense::Leq,
                u,
            ));
        }
        out.variables[i] = Variable::free(name);
    }
    out
}

fn sign_of(v: &Variable, tol: &Tolerance) -> Sign {
    match v.bound_kind(tol) {
        BoundKind::NonNegative => Sign::NonNegative,
        BoundKind::NonPositive => Sign::NonPositive,
        BoundKind::Free => Sign::Free,
        other => unreachable!("bounds are lifted before dualization: {other:?}"),
    }
}

fn signed_variable(name: String, sign: Sign) -> Variable {
    match sign {
        Sign::NonNegative => Variable::non_negative(name),
        Sign::NonPositive => Variable::new(name, f64::NEG_INFINITY, 0.0),
        Sign::Free => Variable::free(name),
    }
}

/// Shared assembly: dual variable signs per primal row, dual row senses per
/// primal column, and the objective/rhs vectors, each already resolved.
struct Plan {
    sense: ObjectiveSense,
    row_sign: Vec<Sign>,
    col_sense: Vec<ConstraintSense>,
    /// Multiplier applied to `b` in the dual objective.
    b_scale: f64,
    /// Multiplier applied to `c` on the dual right-hand side.
    c_scale: f64,
}

fn assemble(p: &LinearProgram, plan: Plan, method: DualizationMethod) -> DualizationReport {
    let mut dual = LinearProgram::new(plan.sense);
    dual.objective_constant = p.objective_constant;
    let mut variable_map = BTreeMap::new();
    let mut constraint_map = BTreeMap::new();
    let mut columns: BTreeMap<&str, BTreeMap<String, f64>> = BTreeMap::new();
    for (con, sign) in p.constraints.iter().zip(&plan.row_sign) {
        let y = format!("y_{}", con.name);
        dual.variables.push(signed_variable(y.clone(), *sign));
        let b = plan.b_scale * con.rhs;
        if b != 0.0 {
            dual.objective.insert(y.clone(), b);
        }
        for (x, &a) in &con.coefficients {
            columns.entry(x.as_str()).or_default().insert(y.clone(), a);
        }
        variable_map.insert(con.name.clone(), y);
    }
    for (var, sense) in p.variables.iter().zip(&plan.col_sense) {
        let d = format!("d_{}", var.name);
        dual.constraints.push(LinearConstraint {
            name: d.clone(),
            coefficients: columns.remove(var.name.as_str()).unwrap_or_default(),
            sense: *sense,
            rhs: plan.c_scale * p.objective_coef(&var.name),
        });
        constraint_map.insert(var.name.clone(), d);
    }
    DualizationReport {
        method,
        dual,
        variable_map,
        constraint_map,
    }
}

pub fn dualize(lp: &LinearProgram, method: DualizationMethod) -> DualizationReport {
    dualize_with(lp, method, &Tolerance::default())
}

pub fn dualize_with(
    lp: &LinearProgram,
    method: DualizationMethod,
    tol: &Tolerance,
) -> DualizationReport {
    let p = lift_bounds(lp, tol);
    let signs: Vec<Sign> = p.variables.iter().map(|v| sign_of(v, tol)).collect();
    let plan = match method {
        DualizationMethod::StandardForm => {
            // min c'x: y <= 0 on <= rows, y >= 0 on >= rows, A'y <= c for x >= 0
            let row_sign = p
                .constraints
                .iter()
                .map(|c| match c.sense {
                    ConstraintSense::Leq => Sign::NonPositive,
                    ConstraintSense::Geq => Sign::NonNegative,
                    ConstraintSense::Eq => Sign::Free,
                })
                .collect();
            let col_sense = signs
                .iter()
                .map(|s| match s {
                    Sign::NonNegative => ConstraintSense::Leq,
                    Sign::NonPositive => ConstraintSense::Geq,
                    Sign::Free => ConstraintSense::Eq,
                })
                .collect();
            match lp.objective_sense {
                ObjectiveSense::Minimize => Plan {
                    sense: ObjectiveSense::Maximize,
                    row_sign,
                    col_sense,
                    b_scale: 1.0,
                    c_scale: 1.0,
                },
                ObjectiveSense::Maximize => Plan {
                    sense: ObjectiveSense::Minimize,
                    row_sign,
                    col_sense,
                    b_scale: -1.0,
                    c_scale: -1.0,
                },
            }
        }
        DualizationMethod::Sob => {
            let (sensible, bizarre, sense) = match lp.objective_sense {
                ObjectiveSense::Minimize => (
                    ConstraintSense::Geq,
                    ConstraintSense::Leq,
                    ObjectiveSense::Maximize,
                ),
                ObjectiveSense::Maximize => (
                    ConstraintSense::Leq,
                    ConstraintSense::Geq,
                    ObjectiveSense::Minimize,
                ),
            };
            let row_sign = p
                .constraints
                .iter()
                .map(|c| match c.sense {
                    s if s == sensible => Sign::NonNegative,
                    s if s == bizarre => Sign::NonPositive,
                    _ => Sign::Free,
                })
                .collect();
            // a sensible variable (x >= 0) maps to a sensible dual row
            let col_sense = signs
                .iter()
                .map(|s| match s {
                    Sign::NonNegative => bizarre,
                    Sign::NonPositive => sensible,
                    Sign::Free => ConstraintSense::Eq,
                })
                .collect();
            Plan {
                sense,
                row_sign,
                col_sense,
                b_scale: 1.0,
                c_scale: 1.0,
            }
        }
    };
    assemble(&p, plan, method)
}

#[derive(Debug, Error)]
pub enum DualizeError {
    #[error("dualization methods disagree (cged {distance})")]
    MethodDisagreement {
        standard_form: Box<LinearProgram>,
        sob: Box<LinearProgram>,
        distance: f64,
        path: Box<EditPath>,
    },
    #[error(transparent)]
    Ged(#[from] GedError),
}

/// Dualizes with both methods, requires them to agree under CGED and returns
/// the standard-form report.
pub fn dualize_checked(lp: &LinearProgram) -> Result<DualizationReport, DualizeError> {
    dualize_checked_with(lp, &MetricOptions::default())
}

pub fn dualize_checked_with(
    lp: &LinearProgram,
    opts: &MetricOptions,
) -> Result<DualizationReport, DualizeError> {
    let sf = dualize_with(lp, DualizationMethod::StandardForm, &opts.tol);
    let sob = dualize_with(lp, DualizationMethod::Sob, &opts.tol);
    let (distance, path) = cged_with(&sf.dual, &sob.dual, opts)?;
    if distance > opts.tol.atol {
        return Err(DualizeError::MethodDisagreement {
            standard_form: Box::new(sf.dual),
            sob: Box::new(sob.dual),
            distance,
            path: Box::new(path),
        });
    }
    Ok(sf)
}

//! Equivalence metrics between a candidate LP and a reference LP.
//!
//! * CGED: edit distance between the graphs of both canonical forms.
//! * NGED: edit distance between raw graphs after only the objective sense
//!   and one-sided inequality senses are normalized, divided by the size
//!   (nodes plus edges) of the larger graph.
//! * OBJ: whether both LPs have the same optimal value, or share the same
//!   infeasible/unbounded status.

use serde::{Deserialize, Serialize};

use crate::canon::canonicalize_with;
use crate::ged::{ged_with, EditPath, GedError, GedOptions};
use crate::graph::{build_graph, BipartiteLpGraph, GraphMode};
use crate::lp::{negate_row, ConstraintSense, LinearProgram, ObjectiveSense};
use crate::simplex::{solve, SolveStatus};
use crate::tol::Tolerance;

/// Sense normalization applied to inequalities before NGED.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SenseCompat {
    /// Every `<=` row is flipped to `>=`.
    #[default]
    ToGeq,
    /// Every `>=` row is flipped to `<=`.
    ToLeq,
    /// Senses are left as written.
    Keep,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricOptions {
    pub tol: Tolerance,
    pub ged: GedOptions,
    pub compat: SenseCompat,
    /// Relative tolerance on optimal values for OBJ.
    pub obj_tol: f64,
}

impl Default for MetricOptions {
    fn default() -> Self {
        MetricOptions::with_tolerance(Tolerance::default())
    }
}

impl MetricOptions {
    pub fn with_tolerance(tol: Tolerance) -> Self {
        let mut ged = GedOptions::default();
        ged.cost.tol = tol;
        MetricOptions {
            tol,
            ged,
            compat: SenseCompat::default(),
            obj_tol: 1e-6,
        }
    }
}

/// Graph of the canonical form of `lp`.
pub fn canonical_graph(lp: &LinearProgram, tol: &Tolerance) -> BipartiteLpGraph {
    build_graph(&canonicalize_with(lp, tol).lp, GraphMode::Canonical)
        .expect("canonical output satisfies the graph precondition")
}

pub fn cged(a: &LinearProgram, b: &LinearProgram) -> Result<(f64, EditPath), GedError> {
    cged_with(a, b, &MetricOptions::default())
}

pub fn cged_with(
    a: &LinearProgram,
    b: &LinearProgram,
    opts: &MetricOptions,
) -> Result<(f64, EditPath), GedError> {
    let ga = canonical_graph(a, &opts.tol);
    let gb = canonical_graph(b, &opts.tol);
    let path = ged_with(&ga, &gb, &opts.ged)?;
    Ok((path.total, path))
}

/// The LP as seen by NGED: minimization objective and inequality senses
/// normalized per `compat`; nothing else changes.
pub fn nged_view(lp: &LinearProgram, compat: SenseCompat) -> LinearProgram {
    let mut out = lp.clone();
    if out.objective_sense == ObjectiveSense::Maximize {
        out.objective_sense = ObjectiveSense::Minimize;
        out.objective_constant = -out.objective_constant;
        for c in out.objective.values_mut() {
            *c = -*c;
        }
    }
    let from = match compat {
        SenseCompat::ToGeq => Some(ConstraintSense::Leq),
        SenseCompat::ToLeq => Some(ConstraintSense::Geq),
        SenseCompat::Keep => None,
    };
    for c in &mut out.constraints {
        if Some(c.sense) == from {
            negate_row(c);
        }
    }
    out
}

pub fn nged(a: &LinearProgram, b: &LinearProgram) -> Result<f64, GedError> {
    nged_with(a, b, &MetricOptions::default())
}

pub fn nged_with(
    a: &LinearProgram,
    b: &LinearProgram,
    opts: &MetricOptions,
) -> Result<f64, GedError> {
    let ga = build_graph(&nged_view(a, opts.compat), GraphMode::NgedCompat).expect("valid LP");
    let gb = build_graph(&nged_view(b, opts.compat), GraphMode::NgedCompat).expect("valid LP");
    let denom = ga.size().max(gb.size());
    if denom == 0 {
        return Ok(0.0);
    }
    let path = ged_with(&ga, &gb, &opts.ged)?;
    Ok(path.total / denom as f64)
}

/// Outcome of the OBJ comparison; `matched` is `None` when undecided.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObjMatch {
    pub matched: Option<bool>,
    /// Solver status per LP; `None` when the LP could not be solved at all.
    pub statuses: (Option<SolveStatus>, Option<SolveStatus>),
    pub values: (Option<f64>, Option<f64>),
}

pub fn obj_match(a: &LinearProgram, b: &LinearProgram, tol: f64) -> ObjMatch {
    let ra = solve(a).ok();
    let rb = solve(b).ok();
    let statuses = (ra.as_ref().map(|r| r.status), rb.as_ref().map(|r| r.status));
    let values = (
        ra.as_ref().and_then(|r| r.value),
        rb.as_ref().and_then(|r| r.value),
    );
    let matched = match statuses {
        (Some(SolveStatus::IterLimit), _)
        | (_, Some(SolveStatus::IterLimit))
        | (None, _)
        | (_, None) => None,
        (Some(SolveStatus::Optimal), Some(SolveStatus::Optimal)) => {
            let (va, vb) = (
                values.0.expect("optimal value"),
                values.1.expect("optimal value"),
            );
            Some((va - vb).abs() <= tol * va.abs().max(1.0))
        }
        (Some(x), Some(y)) => Some(x == y),
    };
    ObjMatch {
        matched,
        statuses,
        values,
    }
}

/// All three metrics for a candidate against the reference. A metric that
/// could not be computed is `None` and its error is listed in `errors`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricVerdict {
    pub cged: Option<f64>,
    pub nged: Option<f64>,
    pub obj_match: Option<bool>,
    pub equivalent: bool,
    pub edit_path: Option<EditPath>,
    pub statuses: (Option<SolveStatus>, Option<SolveStatus>),
    pub errors: Vec<String>,
}

pub fn verdict(candidate: &LinearProgram, truth: &LinearProgram) -> MetricVerdict {
    verdict_with(candidate, truth, &MetricOptions::default())
}

pub fn verdict_with(
    candidate: &LinearProgram,
    truth: &LinearProgram,
    opts: &MetricOptions,
) -> MetricVerdict {
    let mut errors = Vec::new();
    let (cged, edit_path) = match cged_with(candidate, truth, opts) {
        Ok((d, p)) => (Some(d), Some(p)),
        Err(e) => {
            errors.push(format!("cged: {e}"));
            (None, None)
        }
    };
    let nged = match nged_with(candidate, truth, opts) {
        Ok(d) => Some(d),
        Err(e) => {
            errors.push(format!("nged: {e}"));
            None
        }
    };
    let obj = obj_match(candidate, truth, opts.obj_tol);
    if obj.matched.is_none() {
        errors.push(format!("obj: undecided (statuses {:?})", obj.statuses));
    }
    MetricVerdict {
        cged,
        nged,
        obj_match: obj.matched,
        equivalent: cged.is_some_and(|d| d <= opts.tol.atol),
        edit_path,
        statuses: obj.statuses,
        errors,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{LinearConstraint, Variable};
    use ConstraintSense::*;

    fn model5() -> LinearProgram {
        LinearProgram::new(ObjectiveSense::Minimize)
            .with_variable(Variable::non_negative("yw"))
            .with_variable(Variable::non_negative("ys"))
            .with_objective([("yw", 12.0), ("ys", 8.0)])
            .with_constraint(LinearConstraint::new(
                "d",
                [("yw", 2.0), ("ys", 1.0)],
                Geq,
                5.0,
            ))
            .with_constraint(LinearConstraint::new(
                "t",
                [("yw", 3.0), ("ys", 2.0)],
                Geq,
                4.0,
            ))
    }

    fn model6() -> LinearProgram {
        LinearProgram::new(ObjectiveSense::Minimize)
            .with_variable(Variable::non_negative("yw"))
            .with_variable(Variable::non_negative("ys"))
            .with_variable(Variable::non_negative("zd"))
            .with_variable(Variable::non_negative("zt"))
            .with_objective([("yw", 12.0), ("ys", 8.0)])
            .with_constraint(LinearConstraint::new(
                "d",
                [("yw", 2.0), ("ys", 1.0), ("zd", -1.0)],
                Eq,
                5.0,
            ))
            .with_constraint(LinearConstraint::new(
                "t",
                [("yw", 3.0), ("ys", 2.0), ("zt", -1.0)],
                Eq,
                4.0,
            ))
    }

    #[test]
    fn slacked_dual_is_equivalent() {
        let v = verdict(&model6(), &model5());
        assert_eq!(v.cged, Some(0.0));
        assert!(v.nged.unwrap() > 0.0);
        assert_eq!(v.obj_match, Some(true));
        assert!(v.equivalent);
    }

    #[test]
    fn self_comparison() {
        let v = verdict(&model5(), &model5());
        assert_eq!(
            (v.cged, v.nged, v.obj_match, v.equivalent),
            (Some(0.0), Some(0.0), Some(true), true)
        );
    }

    #[test]
    fn nged_is_normalized_and_permutation_invariant() {
        let mut p = model6();
        p.variables.reverse();
        p.constraints.reverse();
        assert_eq!(nged(&p, &model6()).unwrap(), 0.0);
        let empty = LinearProgram::new(ObjectiveSense::Minimize);
        assert_eq!(nged(&empty, &model5()).unwrap(), 1.0);
        assert_eq!(nged(&empty, &empty).unwrap(), 0.0);
    }

    #[test]
    fn compat_flag_changes_nged() {
        let mut flipped = model5();
        flipped.constraints[0] =
            LinearConstraint::new("d", [("yw", -2.0), ("ys", -1.0)], Leq, -5.0);
        let keep = MetricOptions {
            compat: SenseCompat::Keep,
            ..MetricOptions::default()
        };
        let geq = MetricOptions::default();
        let leq = MetricOptions {
            compat: SenseCompat::ToLeq,
            ..MetricOptions::default()
        };
        assert_eq!(nged_with(&flipped, &model5(), &geq).unwrap(), 0.0);
        assert_eq!(nged_with(&flipped, &model5(), &leq).unwrap(), 0.0);
        assert!(nged_with(&flipped, &model5(), &keep).unwrap() > 0.0);
    }

    #[test]
    fn obj_statuses() {
        let unbounded = LinearProgram::new(ObjectiveSense::Minimize)
            .with_variable(Variable::free("x"))
            .with_objective([("x", 1.0)]);
        let m = obj_match(&unbounded, &unbounded, 1e-6);
        assert_eq!(m.matched, Some(true));
        assert_eq!(
            m.statuses,
            (Some(SolveStatus::Unbounded), Some(SolveStatus::Unbounded))
        );
        assert_eq!(obj_match(&unbounded, &model5(), 1e-6).matched, Some(false));
    }
}

//! Canonical form used for equivalence checking.
//!
//! [`canonicalize`] applies, in order: slack elimination, objective sense
//! normalization to minimization, flipping of `(-inf, u]` variables, splitting
//! of free and non-sign-bounded variables into differences of nonnegative
//! parts, sense normalization to `>=`, and materialization of every remaining
//! `x >= 0` bound as a row `bnd_<x>`.
//!
//! Every rewrite is recorded as a [`Step`]; [`replay`] re-applies a step list.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::lp::{
    negate_row, BoundKind, ConstraintSense, LinearConstraint, LinearProgram, ObjectiveSense,
    Variable,
};
use crate::tol::Tolerance;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "step", rename_all = "snake_case")]
pub enum Step {
    /// Slacks removed from `constraint`; `sense` is the resulting inequality,
    /// or `None` when the row was implied and dropped.
    EliminateSlacks {
        constraint: String,
        slacks: Vec<String>,
        sense: Option<ConstraintSense>,
    },
    NegateObjective,
    FlipVariable {
        variable: String,
    },
    /// Finite bounds moved into rows `lower_row` / `upper_row`; the variable becomes free.
    LiftBounds {
        variable: String,
        lower_row: Option<String>,
        upper_row: Option<String>,
    },
    SplitFree {
        variable: String,
        plus: String,
        minus: String,
    },
    FlipConstraint {
        constraint: String,
    },
    SplitEquality {
        constraint: String,
        ge: String,
        le: String,
    },
    MaterializeBound {
        variable: String,
        row: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalLp {
    pub lp: LinearProgram,
    pub provenance: Vec<Step>,
}

/// Applies a single recorded step.
pub fn apply_step(lp: &mut LinearProgram, step: &Step) {
    match step {
        Step::EliminateSlacks {
            constraint,
            slacks,
            sense,
        } => {
            lp.variables.retain(|v| !slacks.contains(&v.name));
            let i = lp
                .constraints
                .iter()
                .position(|c| &c.name == constraint)
                .expect("recorded constraint");
            match sense {
                Some(s) => {
                    let c = &mut lp.constraints[i];
                    c.coefficients.retain(|v, _| !slacks.contains(v));
                    c.sense = *s;
                }
                None => {
                    lp.constraints.remove(i);
                }
            }
        }
        Step::NegateObjective => {
            lp.objective_sense = lp.objective_sense.flipped();
            lp.objective_constant = -lp.objective_constant;
            for c in lp.objective.values_mut() {
                *c = -*c;
            }
        }
        Step::FlipVariable { variable } => {
            *lp = lp.negate_variable(variable).expect("recorded variable");
        }
        Step::LiftBounds {
            variable,
            lower_row,
            upper_row,
        } => {
            let v = lp
                .variables
                .iter_mut()
                .find(|v| &v.name == variable)
                .expect("recorded variable");
            let (l, u) = (v.lower, v.upper);
            *v = Variable::free(variable.clone());
            if let Some(row) = lower_row {
                lp.constraints.push(LinearConstraint::new(
                    row.clone(),
                    [(variable.as_str(), 1.0)],
                    ConstraintSense::Geq,
                    l,
                ));
            }
            if let Some(row) = upper_row {
                lp.constraints.push(LinearConstraint::new(
                    row.clone(),
                    [(variable.as_str(), -1.0)],
                    ConstraintSense::Geq,
                    -u,
                ));
            }
        }
        Step::SplitFree {
            variable,
            plus,
            minus,
        } => {
            let i = lp
                .variables
                .iter()
                .position(|v| &v.name == variable)
                .expect("recorded variable");
            lp.variables.splice(
                i..=i,
                [
                    Variable::non_negative(plus.clone()),
                    Variable::non_negative(minus.clone()),
                ],
            );
            let split = |coefs: &mut BTreeMap<String, f64>| {
                if let Some(a) = coefs.remove(variable) {
                    coefs.insert(plus.clone(), a);
                    coefs.insert(minus.clone(), -a);
                }
            };
            split(&mut lp.objective);
            for c in &mut lp.constraints {
                split(&mut c.coefficients);
            }
        }
        Step::FlipConstraint { constraint } => {
            let c = lp
                .constraints
                .iter_mut()
                .find(|c| &c.name == constraint)
                .expect("recorded constraint");
            negate_row(c);
        }
        Step::SplitEquality { constraint, ge, le } => {
            let i = lp
                .constraints
                .iter()
                .position(|c| &c.name == constraint)
                .expect("recorded constraint");
            let c = &lp.constraints[i];
            let first = LinearConstraint {
                name: ge.clone(),
                coefficients: c.coefficients.clone(),
                sense: ConstraintSense::Geq,
                rhs: c.rhs,
            };
            let mut second = LinearConstraint {
                name: le.clone(),
                coefficients: c.coefficients.clone(),
                sense: ConstraintSense::Leq,
                rhs: c.rhs,
            };
            negate_row(&mut second);
            lp.constraints.splice(i..=i, [first, second]);
        }
        Step::MaterializeBound { variable, row } => {
            lp.constraints.push(LinearConstraint::new(
                row.clone(),
                [(variable.as_str(), 1.0)],
                ConstraintSense::Geq,
                0.0,
            ));
        }
    }
}

pub fn replay(lp: &LinearProgram, steps: &[Step]) -> LinearProgram {
    let mut out = lp.clone();
    for s in steps {
        apply_step(&mut out, s);
    }
    out
}

/// Names taken by either a variable or a constraint, kept in sync while
/// steps are generated so fresh names stay unique.
struct Names(std::collections::HashSet<String>);

impl Names {
    fn of(lp: &LinearProgram) -> Self {
        Names(
            lp.variables
                .iter()
                .map(|v| v.name.clone())
                .chain(lp.constraints.iter().map(|c| c.name.clone()))
                .collect(),
        )
    }

    fn fresh(&mut self, base: &str) -> String {
        let mut name = base.to_string();
        let mut k = 1;
        while self.0.contains(&name) {
            name = format!("{base}_{k}");
            k += 1;
        }
        self.0.insert(name.clone());
        name
    }
}

fn run(lp: &mut LinearProgram, steps: &mut Vec<Step>, step: Step) {
    apply_step(lp, &step);
    steps.push(step);
}

fn slack_steps(lp: &LinearProgram, tol: &Tolerance) -> Vec<Step> {
    let mut occurrences: HashMap<&str, usize> = HashMap::new();
    for c in &lp.constraints {
        for v in c.coefficients.keys() {
            *occurrences.entry(v.as_str()).or_default() += 1;
        }
    }
    let mut steps = Vec::new();
    for c in lp
        .constraints
        .iter()
        .filter(|c| c.sense == ConstraintSense::Eq)
    {
        let mut slacks = Vec::new();
        let (mut leq, mut geq) = (false, false);
        for v in &lp.variables {
            let Some(&alpha) = c.coefficients.get(&v.name) else {
                continue;
            };
            if occurrences[v.name.as_str()] != 1 || lp.objective.contains_key(&v.name) {
                continue;
            }
            let positive_part = match v.bound_kind(tol) {
                BoundKind::NonNegative => alpha > 0.0,
                BoundKind::NonPositive => alpha < 0.0,
                _ => continue,
            };
            // a'x = b - alpha*s, so alpha*s >= 0 leaves a'x <= b
            if positive_part {
                leq = true;
            } else {
                geq = true;
            }
            slacks.push(v.name.clone());
        }
        if slacks.is_empty() {
            continue;
        }
        let sense = match (leq, geq) {
            (true, false) => Some(ConstraintSense::Leq),
            (false, true) => Some(ConstraintSense::Geq),
            _ => None,
        };
        steps.push(Step::EliminateSlacks {
            constraint: c.name.clone(),
            slacks,
            sense,
        });
    }
    steps
}

fn eliminate_slacks_into(lp: &mut LinearProgram, steps: &mut Vec<Step>, tol: &Tolerance) {
    let cap = lp.variables.len();
    let mut removed = 0;
    loop {
        let round = slack_steps(lp, tol);
        if round.is_empty() {
            return;
        }
        for step in round {
            if let Step::EliminateSlacks { slacks, .. } = &step {
                removed += slacks.len();
            }
            run(lp, steps, step);
        }
        assert!(
            removed <= cap,
            "slack elimination removed more variables than exist"
        );
    }
}

/// Removes slack variables: zero-cost variables that occur in exactly one
/// equality row and carry a sign bound. All slacks of a row go together; if
/// their signs allow both directions the row is implied and is dropped.
pub fn eliminate_slacks(lp: &LinearProgram) -> LinearProgram {
    let mut out = lp.clone();
    eliminate_slacks_into(&mut out, &mut Vec::new(), &Tolerance::default());
    out
}

fn flip_upper_into(lp: &mut LinearProgram, steps: &mut Vec<Step>, tol: &Tolerance) {
    let targets: Vec<String> = lp
        .variables
        .iter()
        .filter(|v| {
            matches!(
                v.bound_kind(tol),
                BoundKind::NonPositive | BoundKind::Upper(_)
            )
        })
        .map(|v| v.name.clone())
        .collect();
    for variable in targets {
        run(lp, steps, Step::FlipVariable { variable });
    }
}

/// Replaces every `(-inf, u]` variable by its negation with bounds `[-u, inf)`.
pub fn flip_upper_sign_bounds(lp: &LinearProgram) -> LinearProgram {
    let mut out = lp.clone();
    flip_upper_into(&mut out, &mut Vec::new(), &Tolerance::default());
    out
}

fn split_into(lp: &mut LinearProgram, steps: &mut Vec<Step>, names: &mut Names, tol: &Tolerance) {
    let vars: Vec<Variable> = lp.variables.clone();
    for v in vars {
        let (lower, upper) = match v.bound_kind(tol) {
            BoundKind::NonNegative => {
                if v.lower != 0.0 {
                    lp.variables
                        .iter_mut()
                        .find(|w| w.name == v.name)
                        .expect("present")
                        .lower = 0.0;
                }
                continue;
            }
            BoundKind::Free => (false, false),
            BoundKind::Lower(_) => (true, false),
            BoundKind::Boxed(..) => (true, true),
            // upper-bounded variables were flipped already; lift what remains
            BoundKind::Upper(_) | BoundKind::NonPositive => (false, true),
        };
        if lower || upper {
            let lower_row = lower.then(|| names.fresh(&format!("lb_{}", v.name)));
            let upper_row = upper.then(|| names.fresh(&format!("ub_{}", v.name)));
            run(
                lp,
                steps,
                Step::LiftBounds {
                    variable: v.name.clone(),
                    lower_row,
                    upper_row,
                },
            );
        }
        let plus = names.fresh(&format!("{}+", v.name));
        let minus = names.fresh(&format!("{}-", v.name));
        run(
            lp,
            steps,
            Step::SplitFree {
                variable: v.name.clone(),
                plus,
                minus,
            },
        );
    }
}

/// Moves non-sign finite bounds into `>=` rows and replaces each resulting
/// free variable `x` by `x+ - x-`.
pub fn split_nonstandard_vars(lp: &LinearProgram) -> LinearProgram {
    let mut out = lp.clone();
    let mut names = Names::of(&out);
    split_into(&mut out, &mut Vec::new(), &mut names, &Tolerance::default());
    out
}

fn normalize_into(lp: &mut LinearProgram, steps: &mut Vec<Step>, names: &mut Names) {
    if lp.objective_sense == ObjectiveSense::Maximize {
        run(lp, steps, Step::NegateObjective);
    }
    let rows: Vec<(String, ConstraintSense)> = lp
        .constraints
        .iter()
        .map(|c| (c.name.clone(), c.sense))
        .collect();
    for (constraint, sense) in rows {
        match sense {
            ConstraintSense::Geq => {}
            ConstraintSense::Leq => run(lp, steps, Step::FlipConstraint { constraint }),
            ConstraintSense::Eq => {
                let ge = names.fresh(&format!("{constraint}_ge"));
                let le = names.fresh(&format!("{constraint}_le"));
                run(lp, steps, Step::SplitEquality { constraint, ge, le });
            }
        }
    }
}

/// Minimization objective, `<=` rows flipped, equalities split into `>=` pairs.
pub fn normalize_senses(lp: &LinearProgram) -> LinearProgram {
    let mut out = lp.clone();
    let mut names = Names::of(&out);
    normalize_into(&mut out, &mut Vec::new(), &mut names);
    out
}

fn is_bound_row(c: &LinearConstraint, var: &str) -> bool {
    c.sense == ConstraintSense::Geq
        && c.rhs == 0.0
        && c.coefficients.len() == 1
        && c.coefficients.get(var) == Some(&1.0)
}

pub fn canonicalize(lp: &LinearProgram) -> CanonicalLp {
    canonicalize_with(lp, &Tolerance::default())
}

pub fn canonicalize_with(lp: &LinearProgram, tol: &Tolerance) -> CanonicalLp {
    let mut out = lp.clone();
    let mut steps = Vec::new();
    eliminate_slacks_into(&mut out, &mut steps, tol);
    if out.objective_sense == ObjectiveSense::Maximize {
        run(&mut out, &mut steps, Step::NegateObjective);
    }
    flip_upper_into(&mut out, &mut steps, tol);
    let mut names = Names::of(&out);
    split_into(&mut out, &mut steps, &mut names, tol);
    normalize_into(&mut out, &mut steps, &mut names);
    let vars: Vec<String> = out.variables.iter().map(|v| v.name.clone()).collect();
    for variable in vars {
        let base = format!("bnd_{variable}");
        if out
            .constraint(&base)
            .is_some_and(|c| is_bound_row(c, &variable))
        {
            continue;
        }
        let row = names.fresh(&base);
        run(
            &mut out,
            &mut steps,
            Step::MaterializeBound { variable, row },
        );
    }
    CanonicalLp {
        lp: out,
        provenance: steps,
    }
}

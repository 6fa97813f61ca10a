//! The linear program data model.
//!
//! A [`LinearProgram`] is a plain value: objective, bounded variables and named
//! linear constraints. Everything downstream (I/O, dualization,
//! canonicalization, graphs) consumes and produces these values without
//! mutating shared state.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tol::Tolerance;

/// Sparse coefficient vector keyed by variable name.
pub type Coefs = BTreeMap<String, f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectiveSense {
    Minimize,
    Maximize,
}

impl ObjectiveSense {
    pub fn flipped(self) -> Self {
        match self {
            ObjectiveSense::Minimize => ObjectiveSense::Maximize,
            ObjectiveSense::Maximize => ObjectiveSense::Minimize,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConstraintSense {
    #[serde(rename = "<=")]
    Leq,
    #[serde(rename = ">=")]
    Geq,
    #[serde(rename = "=")]
    Eq,
}

impl ConstraintSense {
    /// Sense after multiplying both sides by -1.
    pub fn negated(self) -> Self {
        match self {
            ConstraintSense::Leq => ConstraintSense::Geq,
            ConstraintSense::Geq => ConstraintSense::Leq,
            ConstraintSense::Eq => ConstraintSense::Eq,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            ConstraintSense::Leq => "<=",
            ConstraintSense::Geq => ">=",
            ConstraintSense::Eq => "=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
}

/// Shape of a variable's bound pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundKind {
    /// `[0, +inf)`
    NonNegative,
    /// `(-inf, 0]`
    NonPositive,
    /// `(-inf, +inf)`
    Free,
    /// `[l, +inf)` with `l != 0`
    Lower(f64),
    /// `(-inf, u]` with `u != 0`
    Upper(f64),
    /// `[l, u]`, both finite
    Boxed(f64, f64),
}

impl Variable {
    pub fn new(name: impl Into<String>, lower: f64, upper: f64) -> Self {
        Variable {
            name: name.into(),
            lower,
            upper,
        }
    }

    pub fn non_negative(name: impl Into<String>) -> Self {
        Variable::new(name, 0.0, f64::INFINITY)
    }

    pub fn free(name: impl Into<String>) -> Self {
        Variable::new(name, f64::NEG_INFINITY, f64::INFINITY)
    }

    /// Classifies the bound pair; a finite bound within `tol.atol` of zero
    /// counts as a sign bound only when the other side is infinite.
    pub fn bound_kind(&self, tol: &Tolerance) -> BoundKind {
        let lo = self.lower.is_finite();
        let up = self.upper.is_finite();
        match (lo, up) {
            (false, false) => BoundKind::Free,
            (true, false) if tol.is_zero(self.lower) => BoundKind::NonNegative,
            (true, false) => BoundKind::Lower(self.lower),
            (false, true) if tol.is_zero(self.upper) => BoundKind::NonPositive,
            (false, true) => BoundKind::Upper(self.upper),
            (true, true) => BoundKind::Boxed(self.lower, self.upper),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearConstraint {
    pub name: String,
    pub coefficients: Coefs,
    pub sense: ConstraintSense,
    pub rhs: f64,
}

impl LinearConstraint {
    /// Builds a constraint, dropping coefficients with magnitude at most the
    /// default absolute tolerance.
    pub fn new<'a, I>(name: impl Into<String>, coefs: I, sense: ConstraintSense, rhs: f64) -> Self
    where
        I: IntoIterator<Item = (&'a str, f64)>,
    {
        LinearConstraint {
            name: name.into(),
            coefficients: sparse(coefs),
            sense,
            rhs,
        }
    }

    pub fn coef(&self, var: &str) -> f64 {
        self.coefficients.get(var).copied().unwrap_or(0.0)
    }

    pub fn activity(&self, point: &BTreeMap<String, f64>) -> f64 {
        self.coefficients
            .iter()
            .map(|(v, a)| a * point.get(v).copied().unwrap_or(0.0))
            .sum()
    }
}

/// Collects `(name, coef)` pairs into a sparse map, summing repeats and
/// dropping near-zero results.
pub fn sparse<'a, I>(coefs: I) -> Coefs
where
    I: IntoIterator<Item = (&'a str, f64)>,
{
    let tol = Tolerance::default();
    let mut out = Coefs::new();
    for (name, c) in coefs {
        *out.entry(name.to_string()).or_insert(0.0) += c;
    }
    out.retain(|_, c| !tol.is_zero(*c));
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearProgram {
    pub objective_sense: ObjectiveSense,
    pub objective: Coefs,
    pub objective_constant: f64,
    pub variables: Vec<Variable>,
    pub constraints: Vec<LinearConstraint>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("unknown constraint `{0}`")]
    UnknownConstraint(String),
}

/// A violated model invariant, with its location.
#[derive(Debug, Clone, PartialEq)]
pub enum Diagnostic {
    DuplicateVariable(String),
    DuplicateConstraint(String),
    /// Constraint (or objective when `None`) references an undeclared variable.
    UndeclaredVariable {
        constraint: Option<String>,
        variable: String,
    },
    BoundOrder {
        variable: String,
        lower: f64,
        upper: f64,
    },
    /// Both bounds infinite with the same sign, or a NaN bound.
    DegenerateBound {
        variable: String,
    },
    NonFinite {
        location: String,
    },
    ExplicitZero {
        constraint: Option<String>,
        variable: String,
    },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let loc = |c: &Option<String>| match c {
            Some(name) => format!("constraint `{name}`"),
            None => "objective".to_string(),
        };
        match self {
            Diagnostic::DuplicateVariable(v) => write!(f, "duplicate variable name `{v}`"),
            Diagnostic::DuplicateConstraint(c) => write!(f, "duplicate constraint name `{c}`"),
            Diagnostic::UndeclaredVariable {
                constraint,
                variable,
            } => {
                write!(
                    f,
                    "{} references undeclared variable `{variable}`",
                    loc(constraint)
                )
            }
            Diagnostic::BoundOrder {
                variable,
                lower,
                upper,
            } => {
                write!(
                    f,
                    "variable `{variable}` has lower bound {lower} above upper bound {upper}"
                )
            }
            Diagnostic::DegenerateBound { variable } => {
                write!(f, "variable `{variable}` has a degenerate bound pair")
            }
            Diagnostic::NonFinite { location } => write!(f, "non-finite value in {location}"),
            Diagnostic::ExplicitZero {
                constraint,
                variable,
            } => {
                write!(
                    f,
                    "{} stores an explicit zero for `{variable}`",
                    loc(constraint)
                )
            }
        }
    }
}

impl LinearProgram {
    pub fn new(objective_sense: ObjectiveSense) -> Self {
        LinearProgram {
            objective_sense,
            objective: Coefs::new(),
            objective_constant: 0.0,
            variables: Vec::new(),
            constraints: Vec::new(),
        }
    }

    pub fn with_variable(mut self, var: Variable) -> Self {
        self.variables.push(var);
        self
    }

    pub fn with_objective<'a, I>(mut self, coefs: I) -> Self
    where
        I: IntoIterator<Item = (&'a str, f64)>,
    {
        self.objective = sparse(coefs);
        self
    }

    pub fn with_constraint(mut self, con: LinearConstraint) -> Self {
        self.constraints.push(con);
        self
    }

    pub fn variable(&self, name: &str) -> Option<&Variable> {
        self.variables.iter().find(|v| v.name == name)
    }

    pub fn constraint(&self, name: &str) -> Option<&LinearConstraint> {
        self.constraints.iter().find(|c| c.name == name)
    }

    pub fn objective_coef(&self, var: &str) -> f64 {
        self.objective.get(var).copied().unwrap_or(0.0)
    }

    /// Objective value (including the constant) at `point`.
    pub fn objective_value(&self, point: &BTreeMap<String, f64>) -> f64 {
        self.objective_constant
            + self
                .objective
                .iter()
                .map(|(v, c)| c * point.get(v).copied().unwrap_or(0.0))
                .sum::<f64>()
    }

    /// Number of nonzero constraint coefficients.
    pub fn nnz(&self) -> usize {
        self.constraints.iter().map(|c| c.coefficients.len()).sum()
    }

    /// Checks every model invariant; an empty list means the LP is valid.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut diags = Vec::new();
        let mut names = HashSet::new();
        for v in &self.variables {
            if !names.insert(v.name.as_str()) {
                diags.push(Diagnostic::DuplicateVariable(v.name.clone()));
            }
            if v.lower.is_nan()
                || v.upper.is_nan()
                || v.lower == f64::INFINITY
                || v.upper == f64::NEG_INFINITY
            {
                diags.push(Diagnostic::DegenerateBound {
                    variable: v.name.clone(),
                });
            } else if v.lower > v.upper {
                diags.push(Diagnostic::BoundOrder {
                    variable: v.name.clone(),
                    lower: v.lower,
                    upper: v.upper,
                });
            }
        }
        if !self.objective_constant.is_finite() {
            diags.push(Diagnostic::NonFinite {
                location: "objective constant".into(),
            });
        }
        self.check_coefs(None, &self.objective, &names, &mut diags);
        let mut con_names = HashSet::new();
        for c in &self.constraints {
            if !con_names.insert(c.name.as_str()) {
                diags.push(Diagnostic::DuplicateConstraint(c.name.clone()));
            }
            if !c.rhs.is_finite() {
                diags.push(Diagnostic::NonFinite {
                    location: format!("rhs of constraint `{}`", c.name),
                });
            }
            self.check_coefs(Some(&c.name), &c.coefficients, &names, &mut diags);
        }
        diags
    }

    fn check_coefs(
        &self,
        owner: Option<&String>,
        coefs: &Coefs,
        names: &HashSet<&str>,
        diags: &mut Vec<Diagnostic>,
    ) {
        for (v, &a) in coefs {
            if !names.contains(v.as_str()) {
                diags.push(Diagnostic::UndeclaredVariable {
                    constraint: owner.cloned(),
                    variable: v.clone(),
                });
            }
            if !a.is_finite() {
                let location = match owner {
                    Some(c) => format!("coefficient of `{v}` in constraint `{c}`"),
                    None => format!("objective coefficient of `{v}`"),
                };
                diags.push(Diagnostic::NonFinite { location });
            } else if a == 0.0 {
                diags.push(Diagnostic::ExplicitZero {
                    constraint: owner.cloned(),
                    variable: v.clone(),
                });
            }
        }
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Substitutes `var -> -var`: negates its objective and constraint
    /// coefficients and maps bounds `(l, u)` to `(-u, -l)`.
    pub fn negate_variable(&self, var: &str) -> Result<LinearProgram, LpError> {
        let mut out = self.clone();
        let v = out
            .variables
            .iter_mut()
            .find(|v| v.name == var)
            .ok_or_else(|| LpError::UnknownVariable(var.to_string()))?;
        let (l, u) = (v.lower, v.upper);
        v.lower = -u;
        v.upper = -l;
        if let Some(c) = out.objective.get_mut(var) {
            *c = -*c;
        }
        for con in &mut out.constraints {
            if let Some(a) = con.coefficients.get_mut(var) {
                *a = -*a;
            }
        }
        Ok(out)
    }

    /// Multiplies constraint `con` by -1: coefficients and rhs negated,
    /// `<=` and `>=` swapped, `=` kept.
    pub fn flip_constraint(&self, con: &str) -> Result<LinearProgram, LpError> {
        let mut out = self.clone();
        let c = out
            .constraints
            .iter_mut()
            .find(|c| c.name == con)
            .ok_or_else(|| LpError::UnknownConstraint(con.to_string()))?;
        negate_row(c);
        Ok(out)
    }

    /// Returns a name not used by any variable or constraint, starting from `base`.
    pub fn fresh_name(&self, base: &str) -> String {
        let taken = |n: &str| self.variable(n).is_some() || self.constraint(n).is_some();
        if !taken(base) {
            return base.to_string();
        }
        (1..)
            .map(|i| format!("{base}_{i}"))
            .find(|n| !taken(n))
            .expect("unbounded name search")
    }
}

pub(crate) fn negate_row(c: &mut LinearConstraint) {
    for a in c.coefficients.values_mut() {
        *a = -*a;
    }
    c.rhs = -c.rhs;
    c.sense = c.sense.negated();
}

//! Bipartite graph view of a linear program.
//!
//! Variables and constraints become the two node sides; each nonzero
//! coefficient becomes an edge. In [`GraphMode::Canonical`] a variable node
//! carries its objective coefficient and a constraint node its right-hand
//! side. [`GraphMode::NgedCompat`] keeps the raw bounds instead: variables
//! carry `(c, l, u)` and constraints the activity interval `(l, u)`.

use std::collections::HashMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lp::{ConstraintSense, LinearProgram, ObjectiveSense};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum GraphMode {
    Canonical,
    NgedCompat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: String,
    pub features: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    /// Index into `var_nodes`.
    pub var: usize,
    /// Index into `con_nodes`.
    pub con: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BipartiteLpGraph {
    pub var_nodes: Vec<Node>,
    pub con_nodes: Vec<Node>,
    pub edges: Vec<Edge>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("LP is not in canonical form: {0}")]
    NotCanonical(String),
    #[error("constraint `{constraint}` references unknown variable `{variable}`")]
    UnknownVariable {
        constraint: String,
        variable: String,
    },
}

impl BipartiteLpGraph {
    pub fn node_count(&self) -> usize {
        self.var_nodes.len() + self.con_nodes.len()
    }

    /// Nodes plus edges.
    pub fn size(&self) -> usize {
        self.node_count() + self.edges.len()
    }
}

fn check_canonical(lp: &LinearProgram) -> Result<(), GraphError> {
    if lp.objective_sense != ObjectiveSense::Minimize {
        return Err(GraphError::NotCanonical(
            "objective is not minimization".into(),
        ));
    }
    if let Some(v) = lp
        .variables
        .iter()
        .find(|v| v.lower != 0.0 || v.upper != f64::INFINITY)
    {
        return Err(GraphError::NotCanonical(format!(
            "variable `{}` is not bounded by [0, inf)",
            v.name
        )));
    }
    if let Some(c) = lp
        .constraints
        .iter()
        .find(|c| c.sense != ConstraintSense::Geq)
    {
        return Err(GraphError::NotCanonical(format!(
            "constraint `{}` is not a >= row",
            c.name
        )));
    }
    Ok(())
}

pub fn build_graph(lp: &LinearProgram, mode: GraphMode) -> Result<BipartiteLpGraph, GraphError> {
    if mode == GraphMode::Canonical {
        check_canonical(lp)?;
    }
    let mut g = BipartiteLpGraph::default();
    let mut index: HashMap<&str, usize> = HashMap::new();
    for (i, v) in lp.variables.iter().enumerate() {
        index.insert(&v.name, i);
        let c = lp.objective_coef(&v.name);
        let features = match mode {
            GraphMode::Canonical => vec![c],
            GraphMode::NgedCompat => vec![c, v.lower, v.upper],
        };
        g.var_nodes.push(Node {
            id: v.name.clone(),
            features,
        });
    }
    for (j, con) in lp.constraints.iter().enumerate() {
        let features = match mode {
            GraphMode::Canonical => vec![con.rhs],
            GraphMode::NgedCompat => match con.sense {
                ConstraintSense::Leq => vec![f64::NEG_INFINITY, con.rhs],
                ConstraintSense::Geq => vec![con.rhs, f64::INFINITY],
                ConstraintSense::Eq => vec![con.rhs, con.rhs],
            },
        };
        g.con_nodes.push(Node {
            id: con.name.clone(),
            features,
        });
        for (var, &a) in &con.coefficients {
            if a == 0.0 {
                continue;
            }
            let &i = index
                .get(var.as_str())
                .ok_or_else(|| GraphError::UnknownVariable {
                    constraint: con.name.clone(),
                    variable: var.clone(),
                })?;
            g.edges.push(Edge {
                var: i,
                con: j,
                weight: a,
            });
        }
    }
    g.edges.sort_by_key(|e| (e.con, e.var));
    Ok(g)
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn features(f: &[f64]) -> String {
    f.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

/// DOT rendering with features as node labels and weights as edge labels.
pub fn export_dot(g: &BipartiteLpGraph) -> String {
    if g.node_count() == 0 {
        return "graph g {}\n".to_string();
    }
    let mut out = String::from("graph g {\n");
    for (i, n) in g.var_nodes.iter().enumerate() {
        let _ = writeln!(
            out,
            "  v{i} [shape=ellipse, label=\"{}\\n{}\"];",
            escape(&n.id),
            features(&n.features)
        );
    }
    for (j, n) in g.con_nodes.iter().enumerate() {
        let _ = writeln!(
            out,
            "  c{j} [shape=box, label=\"{}\\n{}\"];",
            escape(&n.id),
            features(&n.features)
        );
    }
    for e in &g.edges {
        let _ = writeln!(out, "  v{} -- c{} [label=\"{}\"];", e.var, e.con, e.weight);
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::canonicalize;
    use crate::lp::{LinearConstraint, Variable};

    fn eq7_right() -> LinearProgram {
        LinearProgram::new(ObjectiveSense::Minimize)
            .with_variable(Variable::non_negative("x1"))
            .with_variable(Variable::non_negative("x2"))
            .with_objective([("x1", 1.0), ("x2", 1.0)])
            .with_constraint(LinearConstraint::new(
                "c1",
                [("x1", 1.0), ("x2", 1.0)],
                ConstraintSense::Geq,
                1.0,
            ))
    }

    #[test]
    fn canonical_eq7_graph() {
        let lp = canonicalize(&eq7_right()).lp;
        let g = build_graph(&lp, GraphMode::Canonical).unwrap();
        let vf: Vec<f64> = g.var_nodes.iter().map(|n| n.features[0]).collect();
        let cf: Vec<f64> = g.con_nodes.iter().map(|n| n.features[0]).collect();
        assert_eq!(vf, [1.0, 1.0]);
        assert_eq!(cf, [1.0, 0.0, 0.0]);
        assert_eq!(g.edges.len(), 4);

        // independent count from a dense matrix
        let dense: Vec<Vec<f64>> = lp
            .constraints
            .iter()
            .map(|c| lp.variables.iter().map(|v| c.coef(&v.name)).collect())
            .collect();
        let nnz = dense.iter().flatten().filter(|a| **a != 0.0).count();
        assert_eq!(nnz, g.edges.len());

        let dot = export_dot(&g);
        assert_eq!(dot.matches("label=").count(), 5 + 4);
        assert_eq!(dot.matches(" -- ").count(), 4);
        assert_eq!(
            dot,
            export_dot(&build_graph(&lp, GraphMode::Canonical).unwrap())
        );
    }

    #[test]
    fn empty() {
        let g = build_graph(
            &LinearProgram::new(ObjectiveSense::Minimize),
            GraphMode::Canonical,
        )
        .unwrap();
        assert_eq!(g.node_count(), 0);
        assert_eq!(export_dot(&g), "graph g {}\n");
    }

    #[test]
    fn canonical_mode_rejects_raw_lp() {
        let mut lp = eq7_right();
        assert!(build_graph(&lp, GraphMode::Canonical).is_ok());
        lp.constraints[0].sense = ConstraintSense::Leq;
        assert!(matches!(
            build_graph(&lp, GraphMode::Canonical),
            Err(GraphError::NotCanonical(_))
        ));
        assert!(build_graph(&lp, GraphMode::NgedCompat).is_ok());
    }

    #[test]
    fn compat_features() {
        let lp = LinearProgram::new(ObjectiveSense::Minimize)
            .with_variable(Variable::new("x", -1.0, 2.0))
            .with_objective([("x", 3.0)])
            .with_constraint(LinearConstraint::new(
                "l",
                [("x", 1.0)],
                ConstraintSense::Leq,
                4.0,
            ))
            .with_constraint(LinearConstraint::new(
                "e",
                [("x", 1.0)],
                ConstraintSense::Eq,
                1.0,
            ));
        let g = build_graph(&lp, GraphMode::NgedCompat).unwrap();
        assert_eq!(g.var_nodes[0].features, [3.0, -1.0, 2.0]);
        assert_eq!(g.con_nodes[0].features, [f64::NEG_INFINITY, 4.0]);
        assert_eq!(g.con_nodes[1].features, [1.0, 1.0]);
    }
}

#![allow(dead_code)]

use std::collections::BTreeSet;

use dualkit::graph::BipartiteLpGraph;
use dualkit::lp::{ConstraintSense, LinearConstraint, LinearProgram, ObjectiveSense, Variable};
use proptest::prelude::*;
use rand_chacha::rand_core::Rng;
use rand_chacha::ChaCha8Rng;

pub fn below(rng: &mut ChaCha8Rng, n: usize) -> usize {
    (rng.next_u64() % n as u64) as usize
}

pub fn int_in(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> f64 {
    (lo + below(rng, (hi - lo + 1) as usize) as i64) as f64
}

/// Nonzero coefficient: small integers or wide-range floats.
fn coef() -> impl Strategy<Value = f64> {
    prop_oneof![
        (1i32..10, any::<bool>()).prop_map(|(v, neg)| if neg { -v as f64 } else { v as f64 }),
        (1e-6f64..1e6, any::<bool>()).prop_map(|(v, neg)| if neg { -v } else { v }),
    ]
}

fn value() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.0), coef()]
}

fn bounds() -> impl Strategy<Value = (f64, f64)> {
    prop_oneof![
        Just((0.0, f64::INFINITY)),
        Just((f64::NEG_INFINITY, f64::INFINITY)),
        Just((f64::NEG_INFINITY, 0.0)),
        coef().prop_map(|l| (l, f64::INFINITY)),
        coef().prop_map(|u| (f64::NEG_INFINITY, u)),
        (coef(), coef()).prop_map(|(a, b)| (a.min(b), a.max(b))),
        coef().prop_map(|v| (v, v)),
    ]
}

fn sense() -> impl Strategy<Value = ConstraintSense> {
    prop_oneof![
        Just(ConstraintSense::Leq),
        Just(ConstraintSense::Geq),
        Just(ConstraintSense::Eq)
    ]
}

/// Arbitrary valid LPs with unique names that are legal MPS tokens.
pub fn arb_lp() -> impl Strategy<Value = LinearProgram> {
    let names = prop::collection::btree_set("[A-Za-z][A-Za-z0-9_.+-]{0,10}", 0..14);
    (names, any::<bool>(), value())
        .prop_flat_map(|(names, max, constant)| {
            let names: Vec<String> = names.into_iter().collect();
            let split = names.len() / 2;
            let vars = names[..split].to_vec();
            let cons = names[split..].to_vec();
            let nv = vars.len();
            let nc = cons.len();
            (
                Just(vars),
                Just(cons),
                Just(max),
                Just(constant),
                prop::collection::vec(bounds(), nv),
                prop::collection::vec(prop::option::of(coef()), nv),
                prop::collection::vec(
                    (
                        sense(),
                        value(),
                        prop::collection::vec(prop::option::of(coef()), nv),
                    ),
                    nc,
                ),
            )
        })
        .prop_map(|(vars, cons, max, constant, bounds, obj, rows)| {
            let mut lp = LinearProgram::new(if max {
                ObjectiveSense::Maximize
            } else {
                ObjectiveSense::Minimize
            });
            lp.objective_constant = constant;
            for (v, (l, u)) in vars.iter().zip(bounds) {
                lp.variables.push(Variable::new(v.clone(), l, u));
            }
            lp.objective = dualkit::lp::sparse(
                vars.iter()
                    .zip(&obj)
                    .filter_map(|(v, c)| c.map(|c| (v.as_str(), c))),
            );
            for (name, (s, rhs, coefs)) in cons.iter().zip(rows) {
                let entries = vars
                    .iter()
                    .zip(&coefs)
                    .filter_map(|(v, c)| c.map(|c| (v.as_str(), c)));
                lp.constraints
                    .push(LinearConstraint::new(name.clone(), entries, s, rhs));
            }
            lp
        })
}

/// Random small LP for solver cross-checks: `n <= 3` variables with integer data.
pub fn random_small_lp(rng: &mut ChaCha8Rng) -> LinearProgram {
    let n = 1 + below(rng, 3);
    let m = below(rng, 5);
    let sense = if below(rng, 2) == 0 {
        ObjectiveSense::Minimize
    } else {
        ObjectiveSense::Maximize
    };
    let mut lp = LinearProgram::new(sense);
    let names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    for name in &names {
        let (l, u) = match below(rng, 6) {
            0 | 1 => (0.0, f64::INFINITY),
            2 => (f64::NEG_INFINITY, f64::INFINITY),
            3 => (f64::NEG_INFINITY, 0.0),
            4 => (int_in(rng, -3, 1), f64::INFINITY),
            _ => {
                let a = int_in(rng, -3, 3);
                (a, a + int_in(rng, 0, 4))
            }
        };
        lp.variables.push(Variable::new(name.clone(), l, u));
    }
    let obj: Vec<(String, f64)> = names
        .iter()
        .map(|v| (v.clone(), int_in(rng, -4, 4)))
        .collect();
    lp.objective = dualkit::lp::sparse(obj.iter().map(|(v, c)| (v.as_str(), *c)));
    for j in 0..m {
        let coefs: Vec<(String, f64)> = names
            .iter()
            .map(|v| (v.clone(), int_in(rng, -3, 3)))
            .collect();
        let s = match below(rng, 3) {
            0 => ConstraintSense::Leq,
            1 => ConstraintSense::Geq,
            _ => ConstraintSense::Eq,
        };
        let rhs = int_in(rng, -5, 8);
        lp.constraints.push(LinearConstraint::new(
            format!("r{j}"),
            coefs.iter().map(|(v, c)| (v.as_str(), *c)),
            s,
            rhs,
        ));
    }
    lp
}

fn approx(x: f64, y: f64, atol: f64, rtol: f64) -> bool {
    x == y
        || (x.is_finite()
            && y.is_finite()
            && (x - y).abs() <= atol.max(rtol * x.abs().max(y.abs())))
}

/// Labelled isomorphism by backtracking: variables map to variables,
/// constraints to constraints, features and edge weights agree within tolerance.
pub fn isomorphic(a: &BipartiteLpGraph, b: &BipartiteLpGraph, atol: f64, rtol: f64) -> bool {
    if a.var_nodes.len() != b.var_nodes.len()
        || a.con_nodes.len() != b.con_nodes.len()
        || a.edges.len() != b.edges.len()
    {
        return false;
    }
    let nv = a.var_nodes.len();
    let n = nv + a.con_nodes.len();
    let adjacency = |g: &BipartiteLpGraph| {
        let mut adj = vec![Vec::new(); n];
        for e in &g.edges {
            adj[e.var].push((nv + e.con, e.weight));
            adj[nv + e.con].push((e.var, e.weight));
        }
        adj
    };
    let (adj_a, adj_b) = (adjacency(a), adjacency(b));
    let features = |g: &BipartiteLpGraph, u: usize| {
        if u < nv {
            g.var_nodes[u].features.clone()
        } else {
            g.con_nodes[u - nv].features.clone()
        }
    };
    let fa: Vec<Vec<f64>> = (0..n).map(|u| features(a, u)).collect();
    let fb: Vec<Vec<f64>> = (0..n).map(|u| features(b, u)).collect();
    let same = |x: &[f64], y: &[f64]| {
        x.len() == y.len() && x.iter().zip(y).all(|(p, q)| approx(*p, *q, atol, rtol))
    };
    let mut map = vec![usize::MAX; n];
    let mut taken = vec![false; n];
    fn go(
        u: usize,
        nv: usize,
        n: usize,
        map: &mut Vec<usize>,
        taken: &mut Vec<bool>,
        ok: &dyn Fn(&[usize], usize, usize) -> bool,
    ) -> bool {
        if u == n {
            return true;
        }
        let range = if u < nv { 0..nv } else { nv..n };
        for v in range {
            if taken[v] || !ok(map, u, v) {
                continue;
            }
            map[u] = v;
            taken[v] = true;
            if go(u + 1, nv, n, map, taken, ok) {
                return true;
            }
            map[u] = usize::MAX;
            taken[v] = false;
        }
        false
    }
    let ok = |map: &[usize], u: usize, v: usize| -> bool {
        if adj_a[u].len() != adj_b[v].len() || !same(&fa[u], &fb[v]) {
            return false;
        }
        adj_a[u]
            .iter()
            .filter(|(w, _)| map[*w] != usize::MAX)
            .all(|&(w, wt)| {
                adj_b[v]
                    .iter()
                    .any(|&(x, xt)| x == map[w] && approx(wt, xt, atol, rtol))
            })
    };
    go(0, nv, n, &mut map, &mut taken, &ok)
}

/// Exhaustive GED: every pair of partial injections on both node sides.
pub fn brute_force_ged(a: &BipartiteLpGraph, b: &BipartiteLpGraph, atol: f64, rtol: f64) -> f64 {
    fn injections(n: usize, m: usize) -> Vec<Vec<Option<usize>>> {
        let mut out = Vec::new();
        let mut stack: Vec<(Vec<Option<usize>>, BTreeSet<usize>)> =
            vec![(Vec::new(), BTreeSet::new())];
        while let Some((cur, used)) = stack.pop() {
            if cur.len() == n {
                out.push(cur);
                continue;
            }
            let mut next = cur.clone();
            next.push(None);
            stack.push((next, used.clone()));
            for j in 0..m {
                if !used.contains(&j) {
                    let mut next = cur.clone();
                    next.push(Some(j));
                    let mut u = used.clone();
                    u.insert(j);
                    stack.push((next, u));
                }
            }
        }
        out
    }
    let eq = |x: f64, y: f64| approx(x, y, atol, rtol);
    let same =
        |x: &[f64], y: &[f64]| x.len() == y.len() && x.iter().zip(y).all(|(p, q)| eq(*p, *q));
    let node_cost =
        |map: &[Option<usize>], an: &[dualkit::graph::Node], bn: &[dualkit::graph::Node]| -> f64 {
            let mut c = 0.0;
            for (i, m) in map.iter().enumerate() {
                c += match m {
                    None => 1.0,
                    Some(j) => f64::from(u8::from(!same(&an[i].features, &bn[*j].features))),
                };
            }
            c + (bn.len() - map.iter().flatten().count()) as f64
        };
    let vm = injections(a.var_nodes.len(), b.var_nodes.len());
    let cm = injections(a.con_nodes.len(), b.con_nodes.len());
    let mut best = f64::INFINITY;
    for fv in &vm {
        let cv = node_cost(fv, &a.var_nodes, &b.var_nodes);
        for fc in &cm {
            let mut cost = cv + node_cost(fc, &a.con_nodes, &b.con_nodes);
            let mut hit = vec![false; b.edges.len()];
            for e in &a.edges {
                let m = match (fv[e.var], fc[e.con]) {
                    (Some(x), Some(y)) => b.edges.iter().position(|f| f.var == x && f.con == y),
                    _ => None,
                };
                cost += match m {
                    Some(p) => {
                        hit[p] = true;
                        f64::from(u8::from(!eq(e.weight, b.edges[p].weight)))
                    }
                    None => 1.0,
                };
            }
            cost += hit.iter().filter(|h| !**h).count() as f64;
            best = best.min(cost);
        }
    }
    best
}

pub fn model5() -> LinearProgram {
    LinearProgram::new(ObjectiveSense::Minimize)
        .with_variable(Variable::non_negative("yw"))
        .with_variable(Variable::non_negative("ys"))
        .with_objective([("yw", 12.0), ("ys", 8.0)])
        .with_constraint(LinearConstraint::new(
            "d",
            [("yw", 2.0), ("ys", 1.0)],
            ConstraintSense::Geq,
            5.0,
        ))
        .with_constraint(LinearConstraint::new(
            "t",
            [("yw", 3.0), ("ys", 2.0)],
            ConstraintSense::Geq,
            4.0,
        ))
}

pub fn model6() -> LinearProgram {
    LinearProgram::new(ObjectiveSense::Minimize)
        .with_variable(Variable::non_negative("yw"))
        .with_variable(Variable::non_negative("ys"))
        .with_variable(Variable::non_negative("zd"))
        .with_variable(Variable::non_negative("zt"))
        .with_objective([("yw", 12.0), ("ys", 8.0)])
        .with_constraint(LinearConstraint::new(
            "d",
            [("yw", 2.0), ("ys", 1.0), ("zd", -1.0)],
            ConstraintSense::Eq,
            5.0,
        ))
        .with_constraint(LinearConstraint::new(
            "t",
            [("yw", 3.0), ("ys", 2.0), ("zt", -1.0)],
            ConstraintSense::Eq,
            4.0,
        ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rewrite {
    ObjectiveSense,
    ConstraintFlip,
    Permutation,
    SlackIntroduction,
    VariableNegation,
}

pub const REWRITES: [Rewrite; 5] = [
    Rewrite::ObjectiveSense,
    Rewrite::ConstraintFlip,
    Rewrite::Permutation,
    Rewrite::SlackIntroduction,
    Rewrite::VariableNegation,
];

fn slack_shaped(lp: &LinearProgram, name: &str) -> bool {
    let zero_cost = lp.objective.get(name).map_or(true, |&c| c == 0.0);
    let rows = lp
        .constraints
        .iter()
        .filter(|c| c.coefficients.contains_key(name))
        .count();
    let signed = lp.variables.iter().any(|v| {
        v.name == name
            && ((v.lower == 0.0 && v.upper == f64::INFINITY)
                || (v.lower == f64::NEG_INFINITY && v.upper == 0.0))
    });
    zero_cost && rows == 1 && signed
}

/// Applies one convention rewrite that must leave the LP equivalent.
pub fn rewrite(lp: &LinearProgram, kind: Rewrite, rng: &mut ChaCha8Rng) -> LinearProgram {
    let mut out = lp.clone();
    let inequalities: Vec<usize> = (0..lp.constraints.len())
        .filter(|&j| lp.constraints[j].sense != ConstraintSense::Eq)
        .collect();
    // rows where a new slack would not meet an existing slack-shaped variable
    let slackable: Vec<usize> = inequalities
        .iter()
        .copied()
        .filter(|&j| {
            !lp.constraints[j]
                .coefficients
                .keys()
                .any(|name| slack_shaped(lp, name))
        })
        .collect();
    match kind {
        Rewrite::ObjectiveSense => {
            out.objective_sense = match out.objective_sense {
                ObjectiveSense::Minimize => ObjectiveSense::Maximize,
                ObjectiveSense::Maximize => ObjectiveSense::Minimize,
            };
            for c in out.objective.values_mut() {
                *c = -*c;
            }
            out.objective_constant = -out.objective_constant;
        }
        Rewrite::ConstraintFlip if !inequalities.is_empty() => {
            let j = inequalities[below(rng, inequalities.len())];
            let c = &mut out.constraints[j];
            for a in c.coefficients.values_mut() {
                *a = -*a;
            }
            c.rhs = -c.rhs;
            c.sense = match c.sense {
                ConstraintSense::Leq => ConstraintSense::Geq,
                ConstraintSense::Geq => ConstraintSense::Leq,
                ConstraintSense::Eq => ConstraintSense::Eq,
            };
        }
        Rewrite::SlackIntroduction if !slackable.is_empty() => {
            let j = slackable[below(rng, slackable.len())];
            let name = lp.fresh_name("slack");
            // a'x <= b  becomes  a'x + s = b with s >= 0, or a'x - s = b with s <= 0
            let nonneg = below(rng, 2) == 0;
            let leq = lp.constraints[j].sense == ConstraintSense::Leq;
            let alpha = if leq == nonneg { 1.0 } else { -1.0 };
            out.variables.push(if nonneg {
                Variable::non_negative(name.clone())
            } else {
                Variable::new(name.clone(), f64::NEG_INFINITY, 0.0)
            });
            let c = &mut out.constraints[j];
            c.coefficients.insert(name, alpha);
            c.sense = ConstraintSense::Eq;
        }
        Rewrite::VariableNegation if !lp.variables.is_empty() => {
            let v = &lp.variables[below(rng, lp.variables.len())].name;
            out = lp.negate_variable(v).expect("variable exists");
        }
        _ => {
            for i in (1..out.variables.len()).rev() {
                out.variables.swap(i, below(rng, i + 1));
            }
            for i in (1..out.constraints.len()).rev() {
                out.constraints.swap(i, below(rng, i + 1));
            }
        }
    }
    out
}

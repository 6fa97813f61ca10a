//! Exact graph edit distance between bipartite LP graphs.
//!
//! Every edge joins a variable node to a constraint node, so once the nodes
//! of one side are mapped, the best mapping of the other side is a linear
//! assignment problem. The search is best-first over maps of one side of the
//! larger graph (the side with fewer partial injections), taken in
//! breadth-first order, to nodes of the other graph or to deletion; each
//! complete map is finished by an exact assignment. The lower bound is the
//! larger of:
//! * per node side, the cost of matching the remaining label multisets, plus
//!   the same bound over edges that still have an unassigned endpoint;
//! * optimal assignments of the remaining nodes of each side, where a pair
//!   pays its node cost, the exact cost of edges to assigned nodes and a share
//!   of the multiset cost of its other edges.
//!
//! Automorphisms of the source graph are broken along the processing order,
//! so only one of several equivalent maps is explored.
//!
//! Features and weights are compared through labels: all values of one kind
//! from both graphs are sorted and chained into clusters whenever neighbours
//! are equal within the tolerance, and two values match iff they share a
//! cluster.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::graph::BipartiteLpGraph;
use crate::tol::Tolerance;

/// Largest graph (in nodes) the exact search accepts by default.
pub const DEFAULT_BUDGET: usize = 60;

/// Expanded search states after which the search gives up by default.
pub const DEFAULT_EXPANSION_LIMIT: usize = 5_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostModel {
    pub node_indel: f64,
    pub edge_indel: f64,
    /// Cost of substituting a node by one with a different feature label.
    pub node_substitute: f64,
    pub edge_substitute: f64,
    pub tol: Tolerance,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel {
            node_indel: 1.0,
            edge_indel: 1.0,
            node_substitute: 1.0,
            edge_substitute: 1.0,
            tol: Tolerance::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GedOptions {
    pub cost: CostModel,
    /// Maximum node count of the larger graph.
    pub budget: usize,
    pub expansion_limit: usize,
}

impl Default for GedOptions {
    fn default() -> Self {
        GedOptions {
            cost: CostModel::default(),
            budget: DEFAULT_BUDGET,
            expansion_limit: DEFAULT_EXPANSION_LIMIT,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GedError {
    #[error("instance too large for exact GED: {nodes} nodes exceed the budget of {budget}")]
    BudgetExceeded { nodes: usize, budget: usize },
    #[error("instance too large for exact GED: search exceeded {0} expansions")]
    SearchLimit(usize),
    #[error("invalid cost model: {0}")]
    InvalidCost(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Var,
    Con,
}

/// One edit. Node indices refer to `var_nodes` or `con_nodes` of the graph
/// named by the field (`a` = source, `b` = target); edges are `(var, con)` pairs.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum EditOp {
    NodeSubstitute {
        side: Side,
        a: usize,
        b: usize,
        cost: f64,
    },
    NodeDelete {
        side: Side,
        a: usize,
        cost: f64,
    },
    NodeInsert {
        side: Side,
        b: usize,
        cost: f64,
    },
    EdgeSubstitute {
        a: (usize, usize),
        b: (usize, usize),
        cost: f64,
    },
    EdgeDelete {
        a: (usize, usize),
        cost: f64,
    },
    EdgeInsert {
        b: (usize, usize),
        cost: f64,
    },
}

impl EditOp {
    pub fn cost(&self) -> f64 {
        match *self {
            EditOp::NodeSubstitute { cost, .. }
            | EditOp::NodeDelete { cost, .. }
            | EditOp::NodeInsert { cost, .. }
            | EditOp::EdgeSubstitute { cost, .. }
            | EditOp::EdgeDelete { cost, .. }
            | EditOp::EdgeInsert { cost, .. } => cost,
        }
    }

    /// Human-readable form using node ids of both graphs.
    pub fn describe(&self, a: &BipartiteLpGraph, b: &BipartiteLpGraph) -> String {
        let node = |g: &BipartiteLpGraph, side: Side, i: usize| match side {
            Side::Var => format!("var `{}` {:?}", g.var_nodes[i].id, g.var_nodes[i].features),
            Side::Con => format!("con `{}` {:?}", g.con_nodes[i].id, g.con_nodes[i].features),
        };
        let edge = |g: &BipartiteLpGraph, (v, c): (usize, usize)| {
            let w = g
                .edges
                .iter()
                .find(|e| e.var == v && e.con == c)
                .map_or(f64::NAN, |e| e.weight);
            format!(
                "edge `{}`--`{}` ({w})",
                g.var_nodes[v].id, g.con_nodes[c].id
            )
        };
        match *self {
            EditOp::NodeSubstitute {
                side,
                a: i,
                b: j,
                cost,
            } => format!(
                "substitute {} -> {} (cost {cost})",
                node(a, side, i),
                node(b, side, j)
            ),
            EditOp::NodeDelete { side, a: i, cost } => {
                format!("delete {} (cost {cost})", node(a, side, i))
            }
            EditOp::NodeInsert { side, b: j, cost } => {
                format!("insert {} (cost {cost})", node(b, side, j))
            }
            EditOp::EdgeSubstitute { a: x, b: y, cost } => {
                format!("substitute {} -> {} (cost {cost})", edge(a, x), edge(b, y))
            }
            EditOp::EdgeDelete { a: x, cost } => format!("delete {} (cost {cost})", edge(a, x)),
            EditOp::EdgeInsert { b: y, cost } => format!("insert {} (cost {cost})", edge(b, y)),
        }
    }
}

/// An optimal edit path: the nonzero-cost operations plus the full node mapping.
#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct EditPath {
    pub operations: Vec<EditOp>,
    /// Image of each source variable node (`None` = deleted).
    pub var_mapping: Vec<Option<usize>>,
    /// Image of each source constraint node (`None` = deleted).
    pub con_mapping: Vec<Option<usize>>,
    pub total: f64,
}

impl EditPath {
    /// Applies the path to `a`. Surviving nodes take the ids of their images in
    /// `b`, so the result equals `b` up to node order and tolerance.
    pub fn apply(&self, a: &BipartiteLpGraph, b: &BipartiteLpGraph) -> BipartiteLpGraph {
        use crate::graph::{Edge, Node};
        let mut var_feat: Vec<Option<Vec<f64>>> = a
            .var_nodes
            .iter()
            .map(|n| Some(n.features.clone()))
            .collect();
        let mut con_feat: Vec<Option<Vec<f64>>> = a
            .con_nodes
            .iter()
            .map(|n| Some(n.features.clone()))
            .collect();
        let mut edges: HashMap<(usize, usize), f64> =
            a.edges.iter().map(|e| ((e.var, e.con), e.weight)).collect();
        let mut new_vars: Vec<Node> = Vec::new();
        let mut new_cons: Vec<Node> = Vec::new();
        let mut new_edges: Vec<(usize, usize, f64)> = Vec::new();
        for op in &self.operations {
            match *op {
                EditOp::NodeSubstitute {
                    side: Side::Var,
                    a: i,
                    b: j,
                    ..
                } => var_feat[i] = Some(b.var_nodes[j].features.clone()),
                EditOp::NodeSubstitute {
                    side: Side::Con,
                    a: i,
                    b: j,
                    ..
                } => con_feat[i] = Some(b.con_nodes[j].features.clone()),
                EditOp::NodeDelete {
                    side: Side::Var,
                    a: i,
                    ..
                } => var_feat[i] = None,
                EditOp::NodeDelete {
                    side: Side::Con,
                    a: i,
                    ..
                } => con_feat[i] = None,
                EditOp::NodeInsert {
                    side: Side::Var,
                    b: j,
                    ..
                } => new_vars.push(b.var_nodes[j].clone()),
                EditOp::NodeInsert {
                    side: Side::Con,
                    b: j,
                    ..
                } => new_cons.push(b.con_nodes[j].clone()),
                EditOp::EdgeSubstitute {
                    a: x, b: (v, c), ..
                } => {
                    let w = b
                        .edges
                        .iter()
                        .find(|e| e.var == v && e.con == c)
                        .expect("target edge")
                        .weight;
                    edges.insert(x, w);
                }
                EditOp::EdgeDelete { a: x, .. } => {
                    edges.remove(&x);
                }
                EditOp::EdgeInsert { b: (v, c), .. } => {
                    let w = b
                        .edges
                        .iter()
                        .find(|e| e.var == v && e.con == c)
                        .expect("target edge")
                        .weight;
                    new_edges.push((v, c, w));
                }
            }
        }
        let mut out = BipartiteLpGraph::default();
        let mut var_index: HashMap<String, usize> = HashMap::new();
        let mut con_index: HashMap<String, usize> = HashMap::new();
        for (i, f) in var_feat.into_iter().enumerate() {
            if let (Some(f), Some(j)) = (f, self.var_mapping[i]) {
                var_index.insert(b.var_nodes[j].id.clone(), out.var_nodes.len());
                out.var_nodes.push(Node {
                    id: b.var_nodes[j].id.clone(),
                    features: f,
                });
            }
        }
        for n in new_vars {
            var_index.insert(n.id.clone(), out.var_nodes.len());
            out.var_nodes.push(n);
        }
        for (i, f) in con_feat.into_iter().enumerate() {
            if let (Some(f), Some(j)) = (f, self.con_mapping[i]) {
                con_index.insert(b.con_nodes[j].id.clone(), out.con_nodes.len());
                out.con_nodes.push(Node {
                    id: b.con_nodes[j].id.clone(),
                    features: f,
                });
            }
        }
        for n in new_cons {
            con_index.insert(n.id.clone(), out.con_nodes.len());
            out.con_nodes.push(n);
        }
        let mut kept: Vec<_> = edges.into_iter().collect();
        kept.sort_by_key(|(k, _)| *k);
        for ((v, c), w) in kept {
            let (Some(bv), Some(bc)) = (self.var_mapping[v], self.con_mapping[c]) else {
                continue;
            };
            out.edges.push(Edge {
                var: var_index[&b.var_nodes[bv].id],
                con: con_index[&b.con_nodes[bc].id],
                weight: w,
            });
        }
        for (v, c, w) in new_edges {
            out.edges.push(Edge {
                var: var_index[&b.var_nodes[v].id],
                con: con_index[&b.con_nodes[c].id],
                weight: w,
            });
        }
        out
    }
}

/// Assigns cluster ids to values: sorted values equal within `tol` to their
/// predecessor share its cluster.
fn cluster(values: &mut Vec<f64>, tol: &Tolerance) -> HashMap<u64, u32> {
    values.sort_by(f64::total_cmp);
    let mut ids = HashMap::new();
    let mut id = 0u32;
    let mut prev: Option<f64> = None;
    for &v in values.iter() {
        if let Some(p) = prev {
            if !tol.eq(p, v) {
                id += 1;
            }
        }
        ids.insert(canonical_bits(v), id);
        prev = Some(v);
    }
    ids
}

fn canonical_bits(v: f64) -> u64 {
    if v == 0.0 {
        0.0f64.to_bits()
    } else {
        v.to_bits()
    }
}

/// Node and edge labels of both graphs in a shared label space, with nodes
/// indexed `0..n_var` for variables and `n_var..` for constraints.
struct Labeled {
    n_var: usize,
    labels: Vec<u32>,
    /// `(u, v, label)` with `u` a variable index and `v` a unified constraint index.
    edges: Vec<(usize, usize, u32)>,
    adj: Vec<Vec<(usize, u32)>>,
    edge_map: HashMap<(usize, usize), u32>,
}

fn label_graphs(
    a: &BipartiteLpGraph,
    b: &BipartiteLpGraph,
    tol: &Tolerance,
) -> (Labeled, Labeled, Vec<bool>, usize) {
    let width =
        |nodes: &[crate::graph::Node]| nodes.iter().map(|n| n.features.len()).max().unwrap_or(0);
    let var_width = width(&a.var_nodes).max(width(&b.var_nodes));
    let con_width = width(&a.con_nodes).max(width(&b.con_nodes));
    let mut var_maps = Vec::new();
    for k in 0..var_width {
        let mut vals: Vec<f64> = a
            .var_nodes
            .iter()
            .chain(&b.var_nodes)
            .filter_map(|n| n.features.get(k).copied())
            .collect();
        var_maps.push(cluster(&mut vals, tol));
    }
    let mut con_maps = Vec::new();
    for k in 0..con_width {
        let mut vals: Vec<f64> = a
            .con_nodes
            .iter()
            .chain(&b.con_nodes)
            .filter_map(|n| n.features.get(k).copied())
            .collect();
        con_maps.push(cluster(&mut vals, tol));
    }
    let mut weights: Vec<f64> = a.edges.iter().chain(&b.edges).map(|e| e.weight).collect();
    let weight_map = cluster(&mut weights, tol);

    let mut interner: HashMap<(u8, Vec<u32>), u32> = HashMap::new();
    let mut intern = |side: u8, key: Vec<u32>| {
        let next = interner.len() as u32;
        *interner.entry((side, key)).or_insert(next)
    };
    let mut build = |g: &BipartiteLpGraph| {
        let n_var = g.var_nodes.len();
        let mut labels = Vec::with_capacity(g.node_count());
        for n in &g.var_nodes {
            let key = n
                .features
                .iter()
                .enumerate()
                .map(|(k, f)| var_maps[k][&canonical_bits(*f)])
                .collect();
            labels.push(intern(0, key));
        }
        for n in &g.con_nodes {
            let key = n
                .features
                .iter()
                .enumerate()
                .map(|(k, f)| con_maps[k][&canonical_bits(*f)])
                .collect();
            labels.push(intern(1, key));
        }
        let mut adj = vec![Vec::new(); labels.len()];
        let mut edges = Vec::new();
        let mut edge_map = HashMap::new();
        for e in &g.edges {
            let (u, v, l) = (e.var, n_var + e.con, weight_map[&canonical_bits(e.weight)]);
            edges.push((u, v, l));
            adj[u].push((v, l));
            adj[v].push((u, l));
            edge_map.insert((u, v), l);
        }
        Labeled {
            n_var,
            labels,
            edges,
            adj,
            edge_map,
        }
    };
    let la = build(a);
    let lb = build(b);
    let mut var_label = vec![false; interner.len()];
    for ((side, _), id) in interner {
        var_label[id as usize] = side == 0;
    }
    (la, lb, var_label, weights.len().max(1))
}

/// Minimum cost of matching two label multisets of sizes `na`, `nb` sharing
/// `common` labels, with every element either matched or inserted/deleted.
fn multiset_bound(na: usize, nb: usize, common: usize, indel: f64, sub: f64) -> f64 {
    let matched = na.min(nb);
    let all_matched = indel * (na.abs_diff(nb)) as f64 + sub * (matched - common) as f64;
    let only_common = indel * (na + nb - 2 * common) as f64;
    all_matched.min(only_common)
}

/// Minimum-cost perfect assignment on a square `n x n` row-major matrix:
/// the total and the column of each row.
fn min_assignment(cost: &[f64], n: usize) -> (f64, Vec<usize>) {
    if n == 0 {
        return (0.0, Vec::new());
    }
    // potentials method on 1-based indices; column 0 is the virtual start
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut columns = vec![0; n];
    for j in 1..=n {
        columns[p[j] - 1] = j - 1;
    }
    (
        (1..=n).map(|j| cost[(p[j] - 1) * n + (j - 1)]).sum(),
        columns,
    )
}

/// Number of partial injections from an `n`-set into an `m`-set.
fn injections(n: usize, m: usize) -> f64 {
    let mut total = 0.0;
    let mut term = 1.0;
    for k in 0..=n.min(m) {
        total += term;
        term *= ((n - k) * (m - k)) as f64 / (k + 1) as f64;
    }
    total
}

/// Number of equal elements of two sorted slices.
fn common_sorted(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

#[derive(Debug)]
struct State {
    f: f64,
    g: f64,
    /// Image of each processed source node in processing order; `u32::MAX` = deleted.
    map: Vec<u32>,
    done: bool,
    seq: u64,
}

impl PartialEq for State {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for State {}
impl PartialOrd for State {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for State {
    // BinaryHeap is a max-heap: smaller f, then deeper, then older first
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .f
            .total_cmp(&self.f)
            .then(self.done.cmp(&other.done))
            .then(self.map.len().cmp(&other.map.len()))
            .then(other.seq.cmp(&self.seq))
    }
}

const DELETED: u32 = u32::MAX;

/// Backtracking steps allowed per automorphism query; an exhausted query
/// counts as "no automorphism", which only weakens symmetry pruning.
const AUTOMORPHISM_STEPS: usize = 20_000;

/// Colour refinement starting from `colors`, until the partition is stable.
fn refine(g: &Labeled, mut colors: Vec<u32>) -> Vec<u32> {
    let mut classes = colors
        .iter()
        .collect::<std::collections::HashSet<_>>()
        .len();
    loop {
        let mut ids: HashMap<(u32, Vec<(u32, u32)>), u32> = HashMap::new();
        let next: Vec<u32> = (0..colors.len())
            .map(|u| {
                let mut sig: Vec<(u32, u32)> =
                    g.adj[u].iter().map(|&(w, l)| (l, colors[w])).collect();
                sig.sort_unstable();
                let n = ids.len() as u32;
                *ids.entry((colors[u], sig)).or_insert(n)
            })
            .collect();
        colors = next;
        if ids.len() == classes {
            return colors;
        }
        classes = ids.len();
    }
}

/// Whether some label-preserving automorphism fixes every node of `fixed`
/// and maps `from` to `to`.
fn automorphism_exists(g: &Labeled, fixed: &[usize], from: usize, to: usize) -> bool {
    let n = g.labels.len();
    let special = n as u32 + 1;
    let mut colors: Vec<u32> = g.labels.iter().map(|&l| l + n as u32 + 2).collect();
    for (i, &u) in fixed.iter().enumerate() {
        colors[u] = i as u32;
    }
    colors[from] = special;
    colors[to] = special;
    if from == to {
        colors[from] = fixed.len() as u32;
    }
    let colors = refine(g, colors);
    let mut alpha = vec![usize::MAX; n];
    let mut taken = vec![false; n];
    for &u in fixed {
        alpha[u] = u;
        taken[u] = true;
    }
    alpha[from] = to;
    taken[to] = true;
    let consistent = |alpha: &[usize], taken: &[bool], x: usize, y: usize| -> bool {
        let mut mapped = 0;
        for &(z, l) in &g.adj[x] {
            if alpha[z] != usize::MAX {
                mapped += 1;
                let key = if x < g.n_var {
                    (y, alpha[z])
                } else {
                    (alpha[z], y)
                };
                if g.edge_map.get(&key) != Some(&l) {
                    return false;
                }
            }
        }
        let image_mapped = g.adj[y].iter().filter(|&&(z, _)| taken[z]).count();
        mapped == image_mapped
    };
    let mut seen: Vec<usize> = fixed.iter().copied().chain(std::iter::once(from)).collect();
    seen.sort_unstable();
    seen.dedup();
    for &x in &seen {
        if !consistent(&alpha, &taken, x, alpha[x]) || colors[x] != colors[alpha[x]] {
            return false;
        }
    }
    let rest: Vec<usize> = (0..n).filter(|&u| alpha[u] == usize::MAX).collect();
    let mut steps = 0usize;
    fn extend(
        g: &Labeled,
        colors: &[u32],
        rest: &[usize],
        alpha: &mut Vec<usize>,
        taken: &mut Vec<bool>,
        steps: &mut usize,
        consistent: &dyn Fn(&[usize], &[bool], usize, usize) -> bool,
    ) -> bool {
        let Some((&x, tail)) = rest.split_first() else {
            return true;
        };
        for y in 0..g.labels.len() {
            if taken[y] || colors[y] != colors[x] {
                continue;
            }
            *steps += 1;
            if *steps > AUTOMORPHISM_STEPS {
                return false;
            }
            if !consistent(alpha, taken, x, y) {
                continue;
            }
            alpha[x] = y;
            taken[y] = true;
            if extend(g, colors, tail, alpha, taken, steps, consistent) {
                return true;
            }
            alpha[x] = usize::MAX;
            taken[y] = false;
        }
        false
    }
    extend(
        g,
        &colors,
        &rest,
        &mut alpha,
        &mut taken,
        &mut steps,
        &consistent,
    )
}

/// Symmetry constraints along the first `depth` nodes of `order`: `out[j]`
/// lists the levels `i < j` such that an automorphism fixing `order[..i]`
/// maps `order[i]` to `order[j]`. Some optimal map sends each such
/// `order[i]` to an index no larger than the image of `order[j]` (deletion
/// counts as the largest index).
fn symmetry_constraints(g: &Labeled, order: &[usize], depth: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); depth];
    let base = refine(g, g.labels.clone());
    for i in 0..depth {
        for j in i + 1..depth {
            if base[order[i]] == base[order[j]]
                && automorphism_exists(g, &order[..i], order[i], order[j])
            {
                out[j].push(i);
            }
        }
    }
    out
}

/// Breadth-first processing order; each component starts at its highest-degree node.
fn processing_order(g: &Labeled) -> Vec<usize> {
    let n = g.labels.len();
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let start = (0..n)
            .filter(|&i| !seen[i])
            .max_by_key(|&i| (g.adj[i].len(), std::cmp::Reverse(i)))
            .expect("unvisited node");
        seen[start] = true;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            let mut next: Vec<usize> = g.adj[u]
                .iter()
                .map(|&(v, _)| v)
                .filter(|&v| !seen[v])
                .collect();
            next.sort_unstable();
            next.dedup();
            for v in next {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    order
}

pub fn ged(a: &BipartiteLpGraph, b: &BipartiteLpGraph) -> Result<EditPath, GedError> {
    ged_with(a, b, &GedOptions::default())
}

pub fn ged_with(
    a: &BipartiteLpGraph,
    b: &BipartiteLpGraph,
    opts: &GedOptions,
) -> Result<EditPath, GedError> {
    let c = &opts.cost;
    let costs = [
        c.node_indel,
        c.edge_indel,
        c.node_substitute,
        c.edge_substitute,
    ];
    if costs.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(GedError::InvalidCost(
            "costs must be finite and non-negative",
        ));
    }
    let nodes = a.node_count().max(b.node_count());
    if nodes > opts.budget {
        return Err(GedError::BudgetExceeded {
            nodes,
            budget: opts.budget,
        });
    }
    let (la, lb, var_label, n_edge_labels) = label_graphs(a, b, &c.tol);
    // the larger graph is the search source
    if lb.labels.len() > la.labels.len() {
        let (order, map) = search(&lb, &la, &var_label, n_edge_labels, opts)?;
        let mut preimage = vec![DELETED; la.labels.len()];
        for (i, &m) in map.iter().enumerate() {
            if m != DELETED {
                preimage[m as usize] = order[i] as u32;
            }
        }
        let identity: Vec<usize> = (0..la.labels.len()).collect();
        return Ok(build_path(a, b, &la, &lb, &identity, &preimage, c));
    }
    let (order, map) = search(&la, &lb, &var_label, n_edge_labels, opts)?;
    Ok(build_path(a, b, &la, &lb, &order, &map, c))
}

/// Best-first search; returns the processing order and the image of each source node in that order.
fn search(
    la: &Labeled,
    lb: &Labeled,
    var_label: &[bool],
    n_edge_labels: usize,
    opts: &GedOptions,
) -> Result<(Vec<usize>, Vec<u32>), GedError> {
    let c = &opts.cost;
    let n_labels = var_label.len();
    let na = la.labels.len();
    let nb = lb.labels.len();
    // nodes of one side are searched, the other side is completed by an exact assignment
    let search_var = injections(la.n_var, lb.n_var) <= injections(na - la.n_var, nb - lb.n_var);
    let bfs = processing_order(la);
    let mut order: Vec<usize> = bfs
        .iter()
        .copied()
        .filter(|&u| (u < la.n_var) == search_var)
        .collect();
    let depth = order.len();
    order.extend(
        bfs.iter()
            .copied()
            .filter(|&u| (u < la.n_var) != search_var),
    );
    let mut position = vec![0usize; na];
    for (k, &u) in order.iter().enumerate() {
        position[u] = k;
    }
    let symmetry = symmetry_constraints(la, &order, depth);

    // remaining source node labels and pending source edges after k nodes
    let mut rest_labels: Vec<Vec<i32>> = Vec::with_capacity(na + 1);
    let mut pending_edges: Vec<Vec<i32>> = Vec::with_capacity(na + 1);
    for k in 0..=na {
        let mut counts = vec![0i32; n_labels];
        for &u in &order[k..] {
            counts[la.labels[u] as usize] += 1;
        }
        rest_labels.push(counts);
        let mut ec = vec![0i32; n_edge_labels];
        for &(u, v, l) in &la.edges {
            if position[u].max(position[v]) >= k {
                ec[l as usize] += 1;
            }
        }
        pending_edges.push(ec);
    }

    let is_var_a = |u: usize| u < la.n_var;
    let is_var_b = |v: usize| v < lb.n_var;

    let heuristic = |k: usize, used: &[bool]| -> f64 {
        let mut b_counts = vec![0i32; n_labels];
        let (mut b_var, mut b_con) = (0usize, 0usize);
        for v in 0..nb {
            if !used[v] {
                b_counts[lb.labels[v] as usize] += 1;
                if is_var_b(v) {
                    b_var += 1;
                } else {
                    b_con += 1;
                }
            }
        }
        let (mut a_var, mut a_con) = (0usize, 0usize);
        for &u in &order[k..] {
            if is_var_a(u) {
                a_var += 1;
            } else {
                a_con += 1;
            }
        }
        let (mut common_var, mut common_con) = (0usize, 0usize);
        for l in 0..n_labels {
            let m = rest_labels[k][l].min(b_counts[l]).max(0) as usize;
            if var_label[l] {
                common_var += m;
            } else {
                common_con += m;
            }
        }
        let mut e_counts = vec![0i32; n_edge_labels];
        let mut nbe = 0usize;
        for &(u, v, l) in &lb.edges {
            if !used[u] || !used[v] {
                e_counts[l as usize] += 1;
                nbe += 1;
            }
        }
        let nae: usize = pending_edges[k].iter().map(|&x| x as usize).sum();
        let common_e: usize = (0..n_edge_labels)
            .map(|l| pending_edges[k][l].min(e_counts[l]).max(0) as usize)
            .sum();
        multiset_bound(a_var, b_var, common_var, c.node_indel, c.node_substitute)
            + multiset_bound(a_con, b_con, common_con, c.node_indel, c.node_substitute)
            + multiset_bound(nae, nbe, common_e, c.edge_indel, c.edge_substitute)
    };

    // Assignment matrix over the remaining nodes of one side. `image` holds the
    // images of processed source nodes, `pre` the preimages of used target nodes.
    // Edges without an assigned endpoint are charged `free_weight` times their
    // multiset cost; with weight 1 and every other-side node processed the
    // matrix is exact.
    let side_matrix = |k: usize,
                       side_var: bool,
                       image: &[u32],
                       pre: &[u32],
                       free_weight: f64|
     -> (Vec<usize>, Vec<usize>, Vec<f64>) {
        let ra: Vec<usize> = order[k..]
            .iter()
            .copied()
            .filter(|&u| is_var_a(u) == side_var)
            .collect();
        let rb: Vec<usize> = (0..nb)
            .filter(|&v| pre[v] == DELETED && is_var_b(v) == side_var)
            .collect();
        // per remaining source node: edges to processed nodes, sorted labels of other edges
        let a_info: Vec<(Vec<(u32, u32)>, Vec<u32>)> = ra
            .iter()
            .map(|&u| {
                let mut fixed = Vec::new();
                let mut free = Vec::new();
                for &(w, l) in &la.adj[u] {
                    if position[w] < k {
                        fixed.push((image[w], l));
                    } else {
                        free.push(l);
                    }
                }
                free.sort_unstable();
                (fixed, free)
            })
            .collect();
        let b_info: Vec<(Vec<usize>, Vec<u32>)> = rb
            .iter()
            .map(|&v| {
                let mut fixed = Vec::new();
                let mut free = Vec::new();
                for &(x, l) in &lb.adj[v] {
                    if pre[x] != DELETED {
                        fixed.push(x);
                    } else {
                        free.push(l);
                    }
                }
                free.sort_unstable();
                (fixed, free)
            })
            .collect();
        let n = ra.len() + rb.len();
        let mut m = vec![0.0; n * n];
        for (i, &u) in ra.iter().enumerate() {
            let (fixed_a, free_a) = &a_info[i];
            for (j, &v) in rb.iter().enumerate() {
                let (fixed_b, free_b) = &b_info[j];
                let mut cost = if la.labels[u] == lb.labels[v] {
                    0.0
                } else {
                    c.node_substitute
                };
                let mut hits = 0usize;
                for &(iw, l) in fixed_a {
                    let target = if iw == DELETED {
                        None
                    } else {
                        let key = if side_var {
                            (v, iw as usize)
                        } else {
                            (iw as usize, v)
                        };
                        lb.edge_map.get(&key).copied()
                    };
                    match target {
                        Some(tl) => {
                            hits += 1;
                            if tl != l {
                                cost += c.edge_substitute;
                            }
                        }
                        None => cost += c.edge_indel,
                    }
                }
                cost += c.edge_indel * (fixed_b.len() - hits) as f64;
                let common = common_sorted(free_a, free_b);
                cost += free_weight
                    * multiset_bound(
                        free_a.len(),
                        free_b.len(),
                        common,
                        c.edge_indel,
                        c.edge_substitute,
                    );
                m[i * n + j] = cost;
            }
            let delete = c.node_indel
                + c.edge_indel * (fixed_a.len() as f64 + free_weight * free_a.len() as f64);
            for j in rb.len()..n {
                m[i * n + j] = if j - rb.len() == i {
                    delete
                } else {
                    f64::INFINITY
                };
            }
        }
        for (j, _) in rb.iter().enumerate() {
            let (fixed_b, free_b) = &b_info[j];
            let insert = c.node_indel
                + c.edge_indel * (fixed_b.len() as f64 + free_weight * free_b.len() as f64);
            for i in ra.len()..n {
                m[i * n + j] = if i - ra.len() == j {
                    insert
                } else {
                    f64::INFINITY
                };
            }
        }
        (ra, rb, m)
    };
    // free edges charged half to each side, or fully to the completed side
    let assignment = |k: usize, image: &[u32], pre: &[u32]| -> f64 {
        let mut best = 0.0f64;
        for search_weight in [0.5, 0.0] {
            let mut total = 0.0;
            for side_var in [true, false] {
                let weight = if side_var == search_var {
                    search_weight
                } else {
                    1.0 - search_weight
                };
                let (ra, rb, m) = side_matrix(k, side_var, image, pre, weight);
                total += min_assignment(&m, ra.len() + rb.len()).0;
            }
            best = best.max(total);
        }
        best
    };

    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    let root_used = vec![false; nb];
    let root_h =
        heuristic(0, &root_used).max(assignment(0, &vec![DELETED; na], &vec![DELETED; nb]));
    heap.push(State {
        f: root_h,
        g: 0.0,
        map: Vec::new(),
        done: false,
        seq,
    });
    let mut expansions = 0usize;
    while let Some(state) = heap.pop() {
        if state.done {
            return Ok((order, state.map));
        }
        expansions += 1;
        if expansions > opts.expansion_limit {
            return Err(GedError::SearchLimit(opts.expansion_limit));
        }
        let k = state.map.len();
        let mut used = vec![false; nb];
        let mut image = vec![DELETED; na];
        let mut pre = vec![DELETED; nb];
        for (i, &m) in state.map.iter().enumerate() {
            image[order[i]] = m;
            if m != DELETED {
                used[m as usize] = true;
                pre[m as usize] = order[i] as u32;
            }
        }
        if k == depth {
            let mut g = state.g;
            for v in 0..nb {
                if !used[v] && is_var_b(v) == search_var {
                    g += c.node_indel;
                }
            }
            let (ra, rb, m) = side_matrix(k, !search_var, &image, &pre, 1.0);
            let (cost, columns) = min_assignment(&m, ra.len() + rb.len());
            g += cost;
            let mut map = state.map;
            map.extend(columns[..ra.len()].iter().map(|&j| {
                if j < rb.len() {
                    rb[j] as u32
                } else {
                    DELETED
                }
            }));
            seq += 1;
            heap.push(State {
                f: g,
                g,
                map,
                done: true,
                seq,
            });
            continue;
        }
        let u = order[k];
        let side_var = is_var_a(u);
        let candidates = (0..nb)
            .filter(|&v| !used[v] && is_var_b(v) == side_var)
            .map(|v| v as u32)
            .chain(std::iter::once(DELETED))
            .filter(|&cand| symmetry[k].iter().all(|&i| cand >= state.map[i]));
        for cand in candidates {
            let mut g = state.g;
            if cand == DELETED {
                g += c.node_indel;
            } else if la.labels[u] != lb.labels[cand as usize] {
                g += c.node_substitute;
            }
            for &(w, l) in &la.adj[u] {
                if position[w] >= k {
                    continue;
                }
                let iw = image[w];
                let target = if cand == DELETED || iw == DELETED {
                    None
                } else {
                    let (x, y) = if side_var {
                        (cand as usize, iw as usize)
                    } else {
                        (iw as usize, cand as usize)
                    };
                    lb.edge_map.get(&(x, y)).copied()
                };
                match target {
                    Some(tl) if tl == l => {}
                    Some(_) => g += c.edge_substitute,
                    None => g += c.edge_indel,
                }
            }
            if cand != DELETED {
                let v = cand as usize;
                for &(x, _) in &lb.adj[v] {
                    if !used[x] {
                        continue;
                    }
                    let w = pre[x] as usize;
                    let (p, q) = if side_var { (u, w) } else { (w, u) };
                    if !la.edge_map.contains_key(&(p, q)) {
                        g += c.edge_indel;
                    }
                }
            }
            let mut child_used = used.clone();
            let mut child_image = image.clone();
            let mut child_pre = pre.clone();
            child_image[u] = cand;
            if cand != DELETED {
                child_used[cand as usize] = true;
                child_pre[cand as usize] = u as u32;
            }
            let h = heuristic(k + 1, &child_used).max(assignment(k + 1, &child_image, &child_pre));
            let mut map = state.map.clone();
            map.push(cand);
            seq += 1;
            heap.push(State {
                f: g + h,
                g,
                map,
                done: false,
                seq,
            });
        }
    }
    unreachable!("the complete deletion/insertion path is always reachable")
}

fn build_path(
    a: &BipartiteLpGraph,
    b: &BipartiteLpGraph,
    la: &Labeled,
    lb: &Labeled,
    order: &[usize],
    map: &[u32],
    c: &CostModel,
) -> EditPath {
    let na = la.labels.len();
    let mut image = vec![None; na];
    for (i, &m) in map.iter().enumerate() {
        image[order[i]] = (m != DELETED).then_some(m as usize);
    }
    let mut used = vec![false; lb.labels.len()];
    let mut ops = Vec::new();
    let side = |u: usize, n_var: usize| {
        if u < n_var {
            (Side::Var, u)
        } else {
            (Side::Con, u - n_var)
        }
    };
    for u in 0..na {
        let (s, i) = side(u, la.n_var);
        match image[u] {
            Some(v) => {
                used[v] = true;
                if la.labels[u] != lb.labels[v] && c.node_substitute > 0.0 {
                    ops.push(EditOp::NodeSubstitute {
                        side: s,
                        a: i,
                        b: side(v, lb.n_var).1,
                        cost: c.node_substitute,
                    });
                }
            }
            None => ops.push(EditOp::NodeDelete {
                side: s,
                a: i,
                cost: c.node_indel,
            }),
        }
    }
    for v in 0..lb.labels.len() {
        if !used[v] {
            let (s, j) = side(v, lb.n_var);
            ops.push(EditOp::NodeInsert {
                side: s,
                b: j,
                cost: c.node_indel,
            });
        }
    }
    let mut matched_b = std::collections::HashSet::new();
    for &(u, w, l) in &la.edges {
        let ae = (u, w - la.n_var);
        match (image[u], image[w]) {
            (Some(x), Some(y)) if lb.edge_map.contains_key(&(x, y)) => {
                matched_b.insert((x, y));
                if lb.edge_map[&(x, y)] != l && c.edge_substitute > 0.0 {
                    ops.push(EditOp::EdgeSubstitute {
                        a: ae,
                        b: (x, y - lb.n_var),
                        cost: c.edge_substitute,
                    });
                }
            }
            _ => ops.push(EditOp::EdgeDelete {
                a: ae,
                cost: c.edge_indel,
            }),
        }
    }
    for &(x, y, _) in &lb.edges {
        if !matched_b.contains(&(x, y)) {
            ops.push(EditOp::EdgeInsert {
                b: (x, y - lb.n_var),
                cost: c.edge_indel,
            });
        }
    }
    ops.retain(|op| op.cost() > 0.0);
    let total = ops.iter().map(EditOp::cost).fold(0.0, |s, x| s + x);
    let var_mapping = (0..a.var_nodes.len()).map(|i| image[i]).collect();
    let con_mapping = (0..a.con_nodes.len())
        .map(|j| image[la.n_var + j].map(|v| v - lb.n_var))
        .collect();
    let _ = b;
    EditPath {
        operations: ops,
        var_mapping,
        con_mapping,
        total,
    }
}

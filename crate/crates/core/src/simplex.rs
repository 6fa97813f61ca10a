//! Dense two-phase primal simplex with Bland's rule, plus a brute-force
//! vertex enumeration oracle for LPs with at most three variables.
//!
//! The solver works on the standardized form `min c'x, Ax = b, x >= 0, b >= 0`:
//! finite lower bounds are shifted out, upper-only bounds reflected, free
//! variables split, finite upper bounds of shifted variables become rows and
//! inequality rows receive slack columns. Phase one drives an artificial
//! basis to zero; phase two optimizes the real objective.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lp::{ConstraintSense, LinearProgram, ObjectiveSense};

const PIVOT_TOL: f64 = 1e-10;
const COST_TOL: f64 = 1e-9;
/// Maximum number of rows or columns of the standardized problem.
pub const SIZE_LIMIT: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterLimit,
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolveStatus::Optimal => "OPTIMAL",
            SolveStatus::Infeasible => "INFEASIBLE",
            SolveStatus::Unbounded => "UNBOUNDED",
            SolveStatus::IterLimit => "ITER_LIMIT",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub status: SolveStatus,
    /// Objective value including the constant; set iff `Optimal`.
    pub value: Option<f64>,
    /// Optimal point; set iff `Optimal`.
    pub point: Option<BTreeMap<String, f64>>,
}

impl SolveResult {
    fn without_point(status: SolveStatus) -> Self {
        SolveResult {
            status,
            value: None,
            point: None,
        }
    }

    fn optimal(lp: &LinearProgram, point: BTreeMap<String, f64>) -> Self {
        SolveResult {
            status: SolveStatus::Optimal,
            value: Some(lp.objective_value(&point)),
            point: Some(point),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("invalid LP: {0}")]
    Invalid(String),
    #[error("standardized problem has {rows} rows and {cols} columns, limit is {SIZE_LIMIT}")]
    TooLarge { rows: usize, cols: usize },
    #[error("vertex enumeration supports at most 3 variables, got {0}")]
    Dimension(usize),
}

fn check_valid(lp: &LinearProgram) -> Result<(), SolveError> {
    match lp.validate().first() {
        Some(d) => Err(SolveError::Invalid(d.to_string())),
        None => Ok(()),
    }
}

/// Original variable expressed through standardized columns:
/// `x = offset + sum(coef * col)`.
struct ColumnMap {
    offset: f64,
    terms: Vec<(usize, f64)>,
}

struct Standardized {
    rows: Vec<(Vec<f64>, ConstraintSense, f64)>,
    cost: Vec<f64>,
    maps: Vec<ColumnMap>,
    ncols: usize,
}

fn standardize(lp: &LinearProgram) -> Standardized {
    let mut maps = Vec::with_capacity(lp.variables.len());
    let mut ncols = 0;
    let mut upper_rows = Vec::new();
    for v in &lp.variables {
        let map = match (v.lower.is_finite(), v.upper.is_finite()) {
            (true, up) => {
                let col = ncols;
                ncols += 1;
                if up {
                    upper_rows.push((col, v.upper - v.lower));
                }
                ColumnMap {
                    offset: v.lower,
                    terms: vec![(col, 1.0)],
                }
            }
            (false, true) => {
                let col = ncols;
                ncols += 1;
                ColumnMap {
                    offset: v.upper,
                    terms: vec![(col, -1.0)],
                }
            }
            (false, false) => {
                let col = ncols;
                ncols += 2;
                ColumnMap {
                    offset: 0.0,
                    terms: vec![(col, 1.0), (col + 1, -1.0)],
                }
            }
        };
        maps.push(map);
    }
    let index: BTreeMap<&str, usize> = lp
        .variables
        .iter()
        .enumerate()
        .map(|(i, v)| (v.name.as_str(), i))
        .collect();
    let sign = match lp.objective_sense {
        ObjectiveSense::Minimize => 1.0,
        ObjectiveSense::Maximize => -1.0,
    };
    let mut cost = vec![0.0; ncols];
    for (name, &c) in &lp.objective {
        for &(col, k) in &maps[index[name.as_str()]].terms {
            cost[col] += sign * c * k;
        }
    }
    let mut rows = Vec::new();
    for con in &lp.constraints {
        let mut row = vec![0.0; ncols];
        let mut rhs = con.rhs;
        for (name, &a) in &con.coefficients {
            let map = &maps[index[name.as_str()]];
            rhs -= a * map.offset;
            for &(col, k) in &map.terms {
                row[col] += a * k;
            }
        }
        rows.push((row, con.sense, rhs));
    }
    for (col, width) in upper_rows {
        let mut row = vec![0.0; ncols];
        row[col] = 1.0;
        rows.push((row, ConstraintSense::Leq, width));
    }
    Standardized {
        rows,
        cost,
        maps,
        ncols,
    }
}

struct Tableau {
    width: usize,
    rows: Vec<Vec<f64>>,
    obj: Vec<f64>,
    basis: Vec<usize>,
}

enum Outcome {
    Optimal,
    Unbounded,
    IterLimit,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        for x in self.rows[r].iter_mut() {
            *x /= p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= f * p;
                }
                row[c] = 0.0;
            }
        }
        let f = self.obj[c];
        if f != 0.0 {
            for (x, p) in self.obj.iter_mut().zip(&pivot_row) {
                *x -= f * p;
            }
            self.obj[c] = 0.0;
        }
        self.basis[r] = c;
    }

    /// Bland's rule iterations over columns `< allowed`.
    fn run(&mut self, allowed: usize, limit: usize) -> Outcome {
        let rhs = self.width;
        let mut pivots = 0;
        loop {
            let Some(enter) = (0..allowed).find(|&j| self.obj[j] < -COST_TOL) else {
                return Outcome::Optimal;
            };
            if pivots == limit {
                return Outcome::IterLimit;
            }
            pivots += 1;
            let mut leave: Option<(usize, f64)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                let a = row[enter];
                if a > PIVOT_TOL {
                    let ratio = row[rhs] / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - 1e-12
                                || (ratio <= lr + 1e-12 && self.basis[i] < self.basis[li])
                            {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            match leave {
                None => return Outcome::Unbounded,
                Some((r, _)) => self.pivot(r, enter),
            }
        }
    }
}

/// Solves `lp` with the two-phase simplex method.
pub fn solve(lp: &LinearProgram) -> Result<SolveResult, SolveError> {
    check_valid(lp)?;
    let std = standardize(lp);
    let m = std.rows.len();
    let nslack = std
        .rows
        .iter()
        .filter(|r| r.1 != ConstraintSense::Eq)
        .count();
    let nreal = std.ncols + nslack;
    if m > SIZE_LIMIT || nreal > SIZE_LIMIT {
        return Err(SolveError::TooLarge {
            rows: m,
            cols: nreal,
        });
    }
    // columns: structural | slack | artificial | rhs
    let width = nreal + m;
    let mut rows = Vec::with_capacity(m);
    let mut slack = std.ncols;
    for (i, (coefs, sense, rhs)) in std.rows.iter().enumerate() {
        let mut row = vec![0.0; width + 1];
        row[..std.ncols].copy_from_slice(coefs);
        match sense {
            ConstraintSense::Leq => {
                row[slack] = 1.0;
                slack += 1;
            }
            ConstraintSense::Geq => {
                row[slack] = -1.0;
                slack += 1;
            }
            ConstraintSense::Eq => {}
        }
        row[width] = *rhs;
        if *rhs < 0.0 {
            for x in row.iter_mut() {
                *x = -*x;
            }
        }
        row[nreal + i] = 1.0;
        rows.push(row);
    }
    let mut obj = vec![0.0; width + 1];
    for row in &rows {
        for j in 0..nreal {
            obj[j] -= row[j];
        }
        obj[width] -= row[width];
    }
    let mut tab = Tableau {
        width,
        rows,
        obj,
        basis: (nreal..nreal + m).collect(),
    };
    let limit = 10 * (m + width);

    match tab.run(width, limit) {
        Outcome::IterLimit => return Ok(SolveResult::without_point(SolveStatus::IterLimit)),
        Outcome::Unbounded => unreachable!("phase one objective is bounded below by zero"),
        Outcome::Optimal => {}
    }
    let scale = std.rows.iter().fold(1.0f64, |s, r| s.max(r.2.abs()));
    if -tab.obj[width] > 1e-9 * scale {
        return Ok(SolveResult::without_point(SolveStatus::Infeasible));
    }
    // Pivot artificials out of the basis where possible; the remaining rows
    // are redundant and have zeros in every real column.
    for r in 0..m {
        if tab.basis[r] >= nreal {
            if let Some(c) = (0..nreal).find(|&j| tab.rows[r][j].abs() > PIVOT_TOL) {
                tab.pivot(r, c);
            }
        }
    }

    let mut obj = vec![0.0; width + 1];
    obj[..std.ncols].copy_from_slice(&std.cost);
    for (r, &b) in tab.basis.iter().enumerate() {
        let cb = if b < std.ncols { std.cost[b] } else { 0.0 };
        if cb != 0.0 {
            for (x, a) in obj.iter_mut().zip(&tab.rows[r]) {
                *x -= cb * a;
            }
        }
    }
    tab.obj = obj;
    match tab.run(nreal, limit) {
        Outcome::IterLimit => Ok(SolveResult::without_point(SolveStatus::IterLimit)),
        Outcome::Unbounded => Ok(SolveResult::without_point(SolveStatus::Unbounded)),
        Outcome::Optimal => {
            let mut colval = vec![0.0; width];
            for (r, &b) in tab.basis.iter().enumerate() {
                colval[b] = tab.rows[r][width];
            }
            let point = lp
                .variables
                .iter()
                .zip(&std.maps)
                .map(|(v, map)| {
                    let x = map.offset + map.terms.iter().map(|&(c, k)| k * colval[c]).sum::<f64>();
                    (v.name.clone(), x)
                })
                .collect();
            Ok(SolveResult::optimal(lp, point))
        }
    }
}

/// Halfspace `a.x (sense) b` over dense variable order.
struct Halfspace {
    a: Vec<f64>,
    sense: ConstraintSense,
    b: f64,
}

fn satisfied(h: &Halfspace, x: &[f64]) -> bool {
    let lhs: f64 = h.a.iter().zip(x).map(|(a, x)| a * x).sum();
    let tol = 1e-7 * (1.0 + h.b.abs());
    match h.sense {
        ConstraintSense::Leq => lhs <= h.b + tol,
        ConstraintSense::Geq => lhs >= h.b - tol,
        ConstraintSense::Eq => (lhs - h.b).abs() <= tol,
    }
}

/// Solves a small square system by Gaussian elimination with partial pivoting.
fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-9 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for k in col..n {
                a[r][k] -= f * a[col][k];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

fn combinations(p: usize, k: usize, mut f: impl FnMut(&[usize])) {
    fn rec(start: usize, p: usize, k: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..p {
            cur.push(i);
            rec(i + 1, p, k, cur, f);
            cur.pop();
        }
    }
    rec(0, p, k, &mut Vec::with_capacity(k), &mut f);
}

/// Points obtained by intersecting `n` of the given hyperplanes that satisfy
/// every halfspace.
fn feasible_intersections(
    n: usize,
    planes: &[(Vec<f64>, f64)],
    halfspaces: &[Halfspace],
) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    if n == 0 {
        if halfspaces.iter().all(|h| satisfied(h, &[])) {
            out.push(Vec::new());
        }
        return out;
    }
    combinations(planes.len(), n, |idx| {
        let a = idx.iter().map(|&i| planes[i].0.clone()).collect();
        let b = idx.iter().map(|&i| planes[i].1).collect();
        if let Some(x) = solve_square(a, b) {
            if halfspaces.iter().all(|h| satisfied(h, &x)) {
                out.push(x);
            }
        }
    });
    out
}

/// Test oracle: enumerates every intersection of constraint, bound and
/// coordinate hyperplanes. Coordinate planes pin down points on faces that
/// contain lines, so every nonempty polyhedron yields a candidate. Unboundedness
/// is decided by minimizing the objective over the recession cone clipped to
/// the unit box.
pub fn solve_by_vertex_enumeration(lp: &LinearProgram) -> Result<SolveResult, SolveError> {
    check_valid(lp)?;
    let n = lp.variables.len();
    if n > 3 {
        return Err(SolveError::Dimension(n));
    }
    let index: BTreeMap<&str, usize> = lp
        .variables
        .iter()
        .enumerate()
        .map(|(i, v)| (v.name.as_str(), i))
        .collect();
    let dense = |coefs: &BTreeMap<String, f64>| {
        let mut a = vec![0.0; n];
        for (v, &c) in coefs {
            a[index[v.as_str()]] = c;
        }
        a
    };
    let unit = |i: usize| {
        let mut a = vec![0.0; n];
        a[i] = 1.0;
        a
    };
    let mut halfspaces: Vec<Halfspace> = lp
        .constraints
        .iter()
        .map(|c| Halfspace {
            a: dense(&c.coefficients),
            sense: c.sense,
            b: c.rhs,
        })
        .collect();
    for (i, v) in lp.variables.iter().enumerate() {
        if v.lower.is_finite() {
            halfspaces.push(Halfspace {
                a: unit(i),
                sense: ConstraintSense::Geq,
                b: v.lower,
            });
        }
        if v.upper.is_finite() {
            halfspaces.push(Halfspace {
                a: unit(i),
                sense: ConstraintSense::Leq,
                b: v.upper,
            });
        }
    }
    let sign = match lp.objective_sense {
        ObjectiveSense::Minimize => 1.0,
        ObjectiveSense::Maximize => -1.0,
    };
    let cost: Vec<f64> = dense(&lp.objective).into_iter().map(|c| sign * c).collect();
    let dot = |x: &[f64]| cost.iter().zip(x).map(|(c, x)| c * x).sum::<f64>();

    let mut planes: Vec<(Vec<f64>, f64)> = halfspaces.iter().map(|h| (h.a.clone(), h.b)).collect();
    planes.extend((0..n).map(|i| (unit(i), 0.0)));
    let candidates = feasible_intersections(n, &planes, &halfspaces);
    let Some(best) = candidates
        .into_iter()
        .min_by(|x, y| dot(x).total_cmp(&dot(y)))
    else {
        return Ok(SolveResult::without_point(SolveStatus::Infeasible));
    };

    let cone: Vec<Halfspace> = halfspaces
        .iter()
        .map(|h| Halfspace {
            a: h.a.clone(),
            sense: h.sense,
            b: 0.0,
        })
        .chain((0..n).flat_map(|i| {
            [
                Halfspace {
                    a: unit(i),
                    sense: ConstraintSense::Leq,
                    b: 1.0,
                },
                Halfspace {
                    a: unit(i),
                    sense: ConstraintSense::Geq,
                    b: -1.0,
                },
            ]
        }))
        .collect();
    let cone_planes: Vec<(Vec<f64>, f64)> = cone.iter().map(|h| (h.a.clone(), h.b)).collect();
    let descent = feasible_intersections(n, &cone_planes, &cone)
        .iter()
        .map(|d| dot(d))
        .fold(0.0f64, f64::min);
    if descent < -1e-9 {
        return Ok(SolveResult::without_point(SolveStatus::Unbounded));
    }
    let point = lp
        .variables
        .iter()
        .zip(best)
        .map(|(v, x)| (v.name.clone(), x))
        .collect();
    Ok(SolveResult::optimal(lp, point))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{LinearConstraint, Variable};
    use ConstraintSense::*;

    fn unit_square_max() -> LinearProgram {
        LinearProgram::new(ObjectiveSense::Maximize)
            .with_variable(Variable::new("x1", 0.0, 1.0))
            .with_variable(Variable::new("x2", 0.0, 1.0))
            .with_objective([("x1", 1.0), ("x2", 1.0)])
    }

    #[test]
    fn binding_single_constraint() {
        let lp = LinearProgram::new(ObjectiveSense::Minimize)
            .with_variable(Variable::non_negative("x1"))
            .with_variable(Variable::non_negative("x2"))
            .with_objective([("x1", 1.0), ("x2", 1.0)])
            .with_constraint(LinearConstraint::new(
                "c",
                [("x1", 1.0), ("x2", 1.0)],
                Geq,
                1.0,
            ));
        for r in [
            solve(&lp).unwrap(),
            solve_by_vertex_enumeration(&lp).unwrap(),
        ] {
            assert_eq!(r.status, SolveStatus::Optimal);
            assert!((r.value.unwrap() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn box_maximum() {
        for r in [
            solve(&unit_square_max()).unwrap(),
            solve_by_vertex_enumeration(&unit_square_max()).unwrap(),
        ] {
            assert_eq!(r.status, SolveStatus::Optimal);
            assert!((r.value.unwrap() - 2.0).abs() < 1e-9);
            let p = r.point.unwrap();
            assert!((p["x1"] - 1.0).abs() < 1e-9 && (p["x2"] - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn infeasible() {
        let lp = LinearProgram::new(ObjectiveSense::Minimize)
            .with_variable(Variable::free("x"))
            .with_constraint(LinearConstraint::new("a", [("x", 1.0)], Geq, 1.0))
            .with_constraint(LinearConstraint::new("b", [("x", 1.0)], Leq, 0.0));
        assert_eq!(solve(&lp).unwrap().status, SolveStatus::Infeasible);
        assert_eq!(
            solve_by_vertex_enumeration(&lp).unwrap().status,
            SolveStatus::Infeasible
        );
    }

    #[test]
    fn unbounded() {
        let lp = LinearProgram::new(ObjectiveSense::Minimize)
            .with_variable(Variable::non_negative("x1"))
            .with_objective([("x1", -1.0)]);
        assert_eq!(solve(&lp).unwrap().status, SolveStatus::Unbounded);
        assert_eq!(
            solve_by_vertex_enumeration(&lp).unwrap().status,
            SolveStatus::Unbounded
        );
    }

    #[test]
    fn optimum_on_face_with_lines() {
        // min x1 s.t. x1 >= 1, x2 free: no vertex, optimum 1
        let lp = LinearProgram::new(ObjectiveSense::Minimize)
            .with_variable(Variable::free("x1"))
            .with_variable(Variable::free("x2"))
            .with_objective([("x1", 1.0)])
            .with_constraint(LinearConstraint::new("c", [("x1", 1.0)], Geq, 1.0));
        for r in [
            solve(&lp).unwrap(),
            solve_by_vertex_enumeration(&lp).unwrap(),
        ] {
            assert_eq!(r.status, SolveStatus::Optimal);
            assert!((r.value.unwrap() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn empty_lp_and_constant() {
        let mut lp = LinearProgram::new(ObjectiveSense::Maximize);
        lp.objective_constant = 4.5;
        assert_eq!(solve(&lp).unwrap().value, Some(4.5));
        assert_eq!(solve_by_vertex_enumeration(&lp).unwrap().value, Some(4.5));
        // 0 = 1 with no variables is infeasible
        let lp = lp.with_constraint(LinearConstraint::new("e", [], Eq, 1.0));
        assert_eq!(solve(&lp).unwrap().status, SolveStatus::Infeasible);
        assert_eq!(
            solve_by_vertex_enumeration(&lp).unwrap().status,
            SolveStatus::Infeasible
        );
    }

    #[test]
    fn redundant_equalities() {
        let lp = LinearProgram::new(ObjectiveSense::Minimize)
            .with_variable(Variable::non_negative("x"))
            .with_variable(Variable::non_negative("y"))
            .with_objective([("x", 2.0), ("y", 1.0)])
            .with_constraint(LinearConstraint::new(
                "a",
                [("x", 1.0), ("y", 1.0)],
                Eq,
                2.0,
            ))
            .with_constraint(LinearConstraint::new(
                "b",
                [("x", 2.0), ("y", 2.0)],
                Eq,
                4.0,
            ));
        let r = solve(&lp).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!((r.value.unwrap() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn dimension_limit() {
        let mut lp = LinearProgram::new(ObjectiveSense::Minimize);
        for i in 0..4 {
            lp = lp.with_variable(Variable::non_negative(format!("x{i}")));
        }
        assert_eq!(
            solve_by_vertex_enumeration(&lp),
            Err(SolveError::Dimension(4))
        );
    }

    #[test]
    fn size_limit() {
        let mut lp = LinearProgram::new(ObjectiveSense::Minimize);
        for i in 0..201 {
            lp = lp.with_variable(Variable::non_negative(format!("x{i}")));
        }
        assert!(matches!(solve(&lp), Err(SolveError::TooLarge { .. })));
    }
}

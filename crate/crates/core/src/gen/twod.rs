//! Two-variable benchmark LPs over a fixed catalog of 36 convex polygons.
//!
//! Every polygon lies in the nonnegative quadrant and is given by integer
//! vertices in counter-clockwise order. Each edge becomes a `<=` row unless it
//! lies on a coordinate axis, where the variable bound `x >= 0` already
//! carries it. Every instance maximizes one of three fixed objectives.
//!
//! Catalog (shape ids):
//! * 1..=18: rounded regular k-gons, k = 3..=8, at three radius/center/rotation variants;
//! * 19..=21: boxes (unit square, 3x2 rectangle, offset box);
//! * 22..=24: simplices (two corner triangles, one interior triangle);
//! * 25..=33: irregular pentagons to octagons, including clipped rectangles;
//! * 34..=36: rounded regular 9-, 10- and 12-gons.

use std::f64::consts::PI;

use thiserror::Error;

use crate::lp::{ConstraintSense, LinearConstraint, LinearProgram, ObjectiveSense, Variable};

pub const SHAPES: usize = 36;
pub const OBJECTIVES: [(f64, f64); 3] = [(1.0, 1.0), (2.0, -1.0), (-1.0, 3.0)];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TwoDError {
    #[error("shape id {0} out of range 1..=36")]
    Shape(usize),
    #[error("objective id {0} out of range 1..=3")]
    Objective(usize),
}

fn regular(k: usize, radius: f64, center: (i64, i64), rotation: f64) -> Vec<(i64, i64)> {
    (0..k)
        .map(|i| {
            let t = rotation + 2.0 * PI * i as f64 / k as f64;
            (
                center.0 + (radius * t.cos()).round() as i64,
                center.1 + (radius * t.sin()).round() as i64,
            )
        })
        .collect()
}

/// Vertices of catalog shape `id` (1-based), counter-clockwise.
pub fn shape_vertices(id: usize) -> Result<Vec<(i64, i64)>, TwoDError> {
    let v = match id {
        1..=18 => {
            let k = 3 + (id - 1) % 6;
            let kf = k as f64;
            match (id - 1) / 6 {
                0 => regular(k, 3.0, (5, 5), PI / 2.0),
                1 => regular(k, 5.0, (7, 6), PI / 2.0 + PI / kf),
                _ => regular(k, 8.0, (10, 11), PI / (2.0 * kf)),
            }
        }
        19 => vec![(0, 0), (1, 0), (1, 1), (0, 1)],
        20 => vec![(0, 0), (3, 0), (3, 2), (0, 2)],
        21 => vec![(1, 1), (3, 1), (3, 2), (1, 2)],
        22 => vec![(0, 0), (2, 0), (0, 2)],
        23 => vec![(0, 0), (4, 0), (0, 2)],
        24 => vec![(1, 1), (4, 2), (2, 4)],
        25 => vec![(2, 1), (6, 1), (8, 4), (5, 7), (1, 4)],
        26 => vec![(3, 2), (9, 3), (10, 7), (6, 10), (2, 6)],
        27 => vec![(2, 1), (5, 1), (8, 3), (8, 6), (4, 8), (1, 5)],
        28 => vec![(3, 1), (7, 1), (10, 3), (11, 7), (8, 10), (4, 9), (1, 5)],
        29 => vec![(2, 2), (6, 1), (9, 2), (11, 6), (8, 9), (3, 8), (1, 5)],
        30 => vec![
            (2, 1),
            (7, 1),
            (9, 3),
            (9, 6),
            (7, 8),
            (2, 8),
            (1, 6),
            (1, 3),
        ],
        31 => vec![
            (3, 1),
            (8, 1),
            (11, 4),
            (11, 6),
            (8, 9),
            (3, 9),
            (1, 7),
            (1, 3),
        ],
        32 => vec![
            (4, 1),
            (6, 1),
            (9, 2),
            (10, 5),
            (8, 8),
            (5, 9),
            (2, 7),
            (1, 4),
        ],
        33 => vec![
            (2, 2),
            (5, 1),
            (9, 2),
            (11, 5),
            (10, 8),
            (6, 10),
            (3, 9),
            (1, 6),
        ],
        34 => regular(9, 9.0, (11, 11), PI / 2.0),
        35 => regular(10, 10.0, (12, 12), 0.1),
        36 => regular(12, 12.0, (14, 14), PI / 12.0),
        _ => return Err(TwoDError::Shape(id)),
    };
    Ok(v)
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Facet rows `(a1, a2, b)` meaning `a1 x1 + a2 x2 <= b`, with axis edges skipped.
pub fn facet_rows(vertices: &[(i64, i64)]) -> Vec<(i64, i64, i64)> {
    let n = vertices.len();
    let mut rows = Vec::new();
    for i in 0..n {
        let p = vertices[i];
        let q = vertices[(i + 1) % n];
        if (p.0 == 0 && q.0 == 0) || (p.1 == 0 && q.1 == 0) {
            continue;
        }
        let (a1, a2) = (q.1 - p.1, p.0 - q.0);
        let b = a1 * p.0 + a2 * p.1;
        let g = gcd(gcd(a1, a2), b).max(1);
        rows.push((a1 / g, a2 / g, b / g));
    }
    rows
}

/// The LP `max c'x` over shape `shape` with objective `objective` (both 1-based).
pub fn gen_2d(shape: usize, objective: usize) -> Result<LinearProgram, TwoDError> {
    let vertices = shape_vertices(shape)?;
    let &(c1, c2) = objective
        .checked_sub(1)
        .and_then(|i| OBJECTIVES.get(i))
        .ok_or(TwoDError::Objective(objective))?;
    let mut lp = LinearProgram::new(ObjectiveSense::Maximize)
        .with_variable(Variable::non_negative("x1"))
        .with_variable(Variable::non_negative("x2"))
        .with_objective([("x1", c1), ("x2", c2)]);
    for (i, (a1, a2, b)) in facet_rows(&vertices).into_iter().enumerate() {
        lp.constraints.push(LinearConstraint::new(
            format!("f{}", i + 1),
            [("x1", a1 as f64), ("x2", a2 as f64)],
            ConstraintSense::Leq,
            b as f64,
        ));
    }
    Ok(lp)
}

pub fn instance_id(shape: usize, objective: usize) -> String {
    format!("2d_s{shape:02}_o{objective}")
}

/// All 108 instances in shape-major order with their ids.
pub fn all_2d() -> Vec<(String, LinearProgram)> {
    let mut out = Vec::with_capacity(SHAPES * OBJECTIVES.len());
    for s in 1..=SHAPES {
        for o in 1..=OBJECTIVES.len() {
            out.push((instance_id(s, o), gen_2d(s, o).expect("ids in range")));
        }
    }
    out
}

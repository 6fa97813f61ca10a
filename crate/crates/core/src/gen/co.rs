//! Small LP relaxations of combinatorial optimization problems.
//!
//! Every generator is a pure function of `(family, size, seed)`; randomness is
//! ChaCha8 seeded through `seed_from_u64`.

use std::fmt;
use std::str::FromStr;

use rand_chacha::rand_core::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lp::{ConstraintSense, LinearConstraint, LinearProgram, ObjectiveSense, Variable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoFamily {
    Mis,
    Knapsack,
    MaxCut,
    Clique,
    VertexCover,
    Packing,
    Production,
}

impl CoFamily {
    pub const ALL: [CoFamily; 7] = [
        CoFamily::Mis,
        CoFamily::Knapsack,
        CoFamily::MaxCut,
        CoFamily::Clique,
        CoFamily::VertexCover,
        CoFamily::Packing,
        CoFamily::Production,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CoFamily::Mis => "mis",
            CoFamily::Knapsack => "knapsack",
            CoFamily::MaxCut => "max_cut",
            CoFamily::Clique => "clique",
            CoFamily::VertexCover => "vertex_cover",
            CoFamily::Packing => "packing",
            CoFamily::Production => "production",
        }
    }

    /// Accepted `size` values (nodes, items or products).
    pub fn sizes(self) -> std::ops::RangeInclusive<usize> {
        match self {
            CoFamily::Mis | CoFamily::Clique => 3..=5,
            CoFamily::Knapsack => 1..=5,
            CoFamily::MaxCut => 2..=3,
            CoFamily::VertexCover | CoFamily::Packing => 2..=5,
            CoFamily::Production => 2..=4,
        }
    }
}

impl fmt::Display for CoFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CoFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        CoFamily::ALL
            .into_iter()
            .find(|f| f.as_str() == norm)
            .ok_or_else(|| format!("unknown family `{s}`"))
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoError {
    #[error("size {size} outside {min}..={max} for {family}")]
    Size {
        family: CoFamily,
        size: usize,
        min: usize,
        max: usize,
    },
}

fn below(rng: &mut ChaCha8Rng, n: u64) -> u64 {
    rng.next_u64() % n
}

fn range(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> f64 {
    (lo + below(rng, (hi - lo + 1) as u64) as i64) as f64
}

/// Picks between `min` and `max` distinct pairs from `pool`, in pool order.
fn pick_pairs(
    rng: &mut ChaCha8Rng,
    mut pool: Vec<(usize, usize)>,
    min: usize,
    max: usize,
) -> Vec<(usize, usize)> {
    let max = max.min(pool.len());
    let min = min.min(max);
    let count = min + below(rng, (max - min + 1) as u64) as usize;
    for i in (1..pool.len()).rev() {
        let j = below(rng, i as u64 + 1) as usize;
        pool.swap(i, j);
    }
    pool.truncate(count);
    pool.sort_unstable();
    pool
}

fn all_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect()
}

fn unit_box(name: String) -> Variable {
    Variable::new(name, 0.0, 1.0)
}

fn x(i: usize) -> String {
    format!("x{}", i + 1)
}

pub fn gen_co(family: CoFamily, size: usize, seed: u64) -> Result<LinearProgram, CoError> {
    let sizes = family.sizes();
    if !sizes.contains(&size) {
        return Err(CoError::Size {
            family,
            size,
            min: *sizes.start(),
            max: *sizes.end(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = size;
    let lp = match family {
        CoFamily::Mis | CoFamily::Clique => {
            let mut lp = LinearProgram::new(ObjectiveSense::Maximize);
            for i in 0..n {
                lp.variables.push(unit_box(x(i)));
                lp.objective.insert(x(i), 1.0);
            }
            // MIS rows sit on edges; clique rows on non-edges
            let prefix = if family == CoFamily::Mis { "e" } else { "ne" };
            for (u, v) in pick_pairs(&mut rng, all_pairs(n), 1, 6) {
                lp.constraints.push(LinearConstraint::new(
                    format!("{prefix}_{}_{}", u + 1, v + 1),
                    [(x(u).as_str(), 1.0), (x(v).as_str(), 1.0)],
                    ConstraintSense::Leq,
                    1.0,
                ));
            }
            lp
        }
        CoFamily::Knapsack => {
            let dims = 1 + below(&mut rng, 3) as usize;
            let mut lp = LinearProgram::new(ObjectiveSense::Maximize);
            for i in 0..n {
                lp.variables.push(unit_box(x(i)));
                let p = range(&mut rng, 1, 9);
                lp.objective.insert(x(i), p);
            }
            for d in 0..dims {
                let w: Vec<f64> = (0..n).map(|_| range(&mut rng, 1, 9)).collect();
                let cap = w
                    .iter()
                    .cloned()
                    .fold(0.0, f64::max)
                    .max((w.iter().sum::<f64>() / 2.0).floor());
                let names: Vec<String> = (0..n).map(x).collect();
                lp.constraints.push(LinearConstraint::new(
                    format!("cap{}", d + 1),
                    names.iter().map(String::as_str).zip(w.iter().cloned()),
                    ConstraintSense::Leq,
                    cap,
                ));
            }
            lp
        }
        CoFamily::MaxCut => {
            let edges = pick_pairs(&mut rng, all_pairs(n), 1, 2);
            let mut lp = LinearProgram::new(ObjectiveSense::Maximize);
            for i in 0..n {
                lp.variables.push(unit_box(x(i)));
            }
            for &(u, v) in &edges {
                let z = format!("z_{}_{}", u + 1, v + 1);
                lp.variables.push(unit_box(z.clone()));
                lp.objective.insert(z.clone(), range(&mut rng, 1, 5));
                lp.constraints.push(LinearConstraint::new(
                    format!("cut_{}_{}", u + 1, v + 1),
                    [
                        (z.as_str(), 1.0),
                        (x(u).as_str(), -1.0),
                        (x(v).as_str(), -1.0),
                    ],
                    ConstraintSense::Leq,
                    0.0,
                ));
                lp.constraints.push(LinearConstraint::new(
                    format!("sep_{}_{}", u + 1, v + 1),
                    [
                        (z.as_str(), 1.0),
                        (x(u).as_str(), 1.0),
                        (x(v).as_str(), 1.0),
                    ],
                    ConstraintSense::Leq,
                    2.0,
                ));
            }
            lp
        }
        CoFamily::VertexCover => {
            let mut lp = LinearProgram::new(ObjectiveSense::Minimize);
            for i in 0..n {
                lp.variables.push(unit_box(x(i)));
                let w = range(&mut rng, 1, 5);
                lp.objective.insert(x(i), w);
            }
            for (u, v) in pick_pairs(&mut rng, all_pairs(n), 1, 6) {
                lp.constraints.push(LinearConstraint::new(
                    format!("e_{}_{}", u + 1, v + 1),
                    [(x(u).as_str(), 1.0), (x(v).as_str(), 1.0)],
                    ConstraintSense::Geq,
                    1.0,
                ));
            }
            lp
        }
        CoFamily::Packing => {
            let rows = 1 + below(&mut rng, 3) as usize;
            let mut lp = LinearProgram::new(ObjectiveSense::Maximize);
            for i in 0..n {
                lp.variables.push(Variable::non_negative(x(i)));
                let c = range(&mut rng, 1, 9);
                lp.objective.insert(x(i), c);
            }
            let mut a: Vec<Vec<f64>> = (0..rows)
                .map(|_| (0..n).map(|_| range(&mut rng, 0, 4)).collect())
                .collect();
            for j in 0..n {
                if a.iter().all(|row| row[j] == 0.0) {
                    let r = below(&mut rng, rows as u64) as usize;
                    a[r][j] = range(&mut rng, 1, 4);
                }
            }
            for (r, row) in a.iter().enumerate() {
                let names: Vec<String> = (0..n).map(x).collect();
                let b = range(&mut rng, 5, 15);
                lp.constraints.push(LinearConstraint::new(
                    format!("r{}", r + 1),
                    names.iter().map(String::as_str).zip(row.iter().cloned()),
                    ConstraintSense::Leq,
                    b,
                ));
            }
            lp
        }
        CoFamily::Production => {
            let mut lp = LinearProgram::new(ObjectiveSense::Maximize);
            for i in 0..n {
                lp.variables.push(Variable::non_negative(x(i)));
                let c = range(&mut rng, 1, 5);
                lp.objective.insert(x(i), c);
            }
            for r in 0..2 {
                let names: Vec<String> = (0..n).map(x).collect();
                let row: Vec<f64> = (0..n).map(|_| range(&mut rng, 1, 5)).collect();
                let b = range(&mut rng, 5, 20);
                lp.constraints.push(LinearConstraint::new(
                    format!("res{}", r + 1),
                    names.iter().map(String::as_str).zip(row),
                    ConstraintSense::Leq,
                    b,
                ));
            }
            lp
        }
    };
    Ok(lp)
}

/// Size used for dataset sample `index` of `family`.
pub fn dataset_size(family: CoFamily, index: usize) -> usize {
    let sizes = family.sizes();
    sizes.start() + index % (sizes.end() - sizes.start() + 1)
}

pub fn instance_id(family: CoFamily, index: usize) -> String {
    format!("co_{family}_{index:02}")
}

/// `per_family` instances of every family, seeds `seed + index`.
pub fn all_co(per_family: usize, seed: u64) -> Vec<(String, LinearProgram)> {
    let mut out = Vec::with_capacity(per_family * CoFamily::ALL.len());
    for family in CoFamily::ALL {
        for s in 0..per_family {
            let lp = gen_co(family, dataset_size(family, s), seed.wrapping_add(s as u64))
                .expect("size in range");
            out.push((instance_id(family, s), lp));
        }
    }
    out
}

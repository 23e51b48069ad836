//! Piecewise-linear finite elements on a metric graph, used as an
//! independent check of the exact solvers, and the monotone rearrangement
//! test for the energy function.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::energy::{distribution_function, solve_energy, EnergyError, EnergySolution};
use crate::graph::MetricGraph;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FemError {
    #[error("need at least 2 elements per edge, got {0}")]
    TooCoarse(usize),
    #[error("graph has no Dirichlet vertex")]
    NoDirichlet,
    #[error("stiffness matrix is not positive definite")]
    Singular,
    #[error("inverse iteration did not converge in {0} steps")]
    NoConvergence(usize),
    #[error(transparent)]
    Energy(#[from] EnergyError),
}

/// Upper-triangular rows of a sparse symmetric matrix.
type SymRows = Vec<BTreeMap<usize, f64>>;

fn add(rows: &mut SymRows, i: usize, j: usize, v: f64) {
    let (a, b) = (i.min(j), i.max(j));
    *rows[a].entry(b).or_insert(0.0) += v;
}

fn sym_mul(rows: &SymRows, x: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; x.len()];
    for (i, row) in rows.iter().enumerate() {
        for (&j, &v) in row {
            y[i] += v * x[j];
            if j != i {
                y[j] += v * x[i];
            }
        }
    }
    y
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `LDLᵀ` factorization in the natural order. Edge chains are numbered
/// before vertices, so eliminating them creates only constant fill.
struct SparseLdl {
    cols: Vec<Vec<(usize, f64)>>,
    diag: Vec<f64>,
}

impl SparseLdl {
    fn factor(mut rows: SymRows) -> Result<Self, FemError> {
        let n = rows.len();
        let mut cols = Vec::with_capacity(n);
        let mut diag = Vec::with_capacity(n);
        for i in 0..n {
            let row = std::mem::take(&mut rows[i]);
            let d = row.get(&i).copied().unwrap_or(0.0);
            if d.is_nan() || d <= 0.0 {
                return Err(FemError::Singular);
            }
            let off: Vec<(usize, f64)> = row.into_iter().filter(|&(j, _)| j > i).collect();
            for (a, &(j, aij)) in off.iter().enumerate() {
                for &(k, aik) in &off[a..] {
                    *rows[j].entry(k).or_insert(0.0) -= aij * aik / d;
                }
            }
            cols.push(off.into_iter().map(|(j, v)| (j, v / d)).collect());
            diag.push(d);
        }
        Ok(SparseLdl { cols, diag })
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut y = b.to_vec();
        for (i, col) in self.cols.iter().enumerate() {
            for &(j, l) in col {
                y[j] -= l * y[i];
            }
        }
        for (yi, d) in y.iter_mut().zip(&self.diag) {
            *yi /= d;
        }
        for i in (0..y.len()).rev() {
            let s: f64 = self.cols[i].iter().map(|&(j, l)| l * y[j]).sum();
            y[i] -= s;
        }
        y
    }
}

/// Assembled P1 system with Dirichlet nodes eliminated.
struct Mesh {
    stiffness: SymRows,
    mass: SymRows,
    load: Vec<f64>,
}

impl Mesh {
    fn build(g: &MetricGraph, n: usize) -> Result<Self, FemError> {
        if n < 2 {
            return Err(FemError::TooCoarse(n));
        }
        if g.dirichlet_count() == 0 {
            return Err(FemError::NoDirichlet);
        }
        let interior = g.edge_count() * (n - 1);
        let mut vertex_node: HashMap<usize, Option<usize>> = HashMap::new();
        let mut next = interior;
        for v in g.vertices() {
            let slot = (!v.role.is_dirichlet()).then(|| {
                next += 1;
                next - 1
            });
            vertex_node.insert(v.id, slot);
        }
        let size = next;
        let mut stiffness = vec![BTreeMap::new(); size];
        let mut mass = vec![BTreeMap::new(); size];
        let mut load = vec![0.0; size];

        for (k, e) in g.edges().iter().enumerate() {
            let h = e.length / n as f64;
            let node = |j: usize| -> Option<usize> {
                match j {
                    0 => vertex_node[&e.u],
                    _ if j == n => vertex_node[&e.v],
                    _ => Some(k * (n - 1) + j - 1),
                }
            };
            for j in 0..n {
                let (p, q) = (node(j), node(j + 1));
                for (a, b) in [(p, q), (q, p)] {
                    if let Some(a) = a {
                        add(&mut stiffness, a, a, 1.0 / h);
                        add(&mut mass, a, a, h / 3.0);
                        load[a] += 0.5 * h;
                        if let Some(b) = b {
                            if a < b {
                                add(&mut stiffness, a, b, -1.0 / h);
                                add(&mut mass, a, b, h / 6.0);
                            }
                        }
                    }
                }
            }
        }
        Ok(Mesh {
            stiffness,
            mass,
            load,
        })
    }
}

/// Discrete energy `½uᵀKu − fᵀu` at the P1 minimizer with `n` elements per
/// edge. Never below the exact energy.
pub fn fem_energy(g: &MetricGraph, n: usize) -> Result<f64, FemError> {
    let mesh = Mesh::build(g, n)?;
    let u = SparseLdl::factor(mesh.stiffness)?.solve(&mesh.load);
    Ok(-0.5 * dot(&mesh.load, &u))
}

const MAX_ITERATIONS: usize = 10_000;

/// Smallest eigenvalue of `Kx = λMx` by inverse iteration. Never below the
/// exact first eigenvalue.
pub fn fem_lambda1(g: &MetricGraph, n: usize) -> Result<f64, FemError> {
    let mesh = Mesh::build(g, n)?;
    let mut row_sums = vec![0.0; mesh.load.len()];
    for (i, row) in mesh.stiffness.iter().enumerate() {
        for (&j, &v) in row {
            row_sums[i] += v.abs();
            if j != i {
                row_sums[j] += v.abs();
            }
        }
    }
    let k_norm = row_sums.into_iter().fold(0.0, f64::max);
    let ldl = SparseLdl::factor(mesh.stiffness.clone())?;

    let mut x = vec![1.0; mesh.load.len()];
    for _ in 0..MAX_ITERATIONS {
        let mx = sym_mul(&mesh.mass, &x);
        let mut y = ldl.solve(&mx);
        let my = sym_mul(&mesh.mass, &y);
        let scale = dot(&y, &my).sqrt();
        y.iter_mut().for_each(|v| *v /= scale);
        let ky = sym_mul(&mesh.stiffness, &y);
        let my: Vec<f64> = my.iter().map(|v| v / scale).collect();
        let lambda = dot(&y, &ky);
        let residual: f64 = ky
            .iter()
            .zip(&my)
            .map(|(a, b)| (a - lambda * b).powi(2))
            .sum::<f64>()
            .sqrt();
        let y_norm = dot(&y, &y).sqrt();
        x = y;
        if residual <= 1e-12 * k_norm * y_norm {
            return Ok(lambda);
        }
    }
    Err(FemError::NoConvergence(MAX_ITERATIONS))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RearrangementCheck {
    pub graph_energy: f64,
    pub segment_energy: f64,
    pub ok: bool,
}

const REARRANGEMENT_GRID: usize = 10_000;

/// Smallest level `t` whose sublevel set has measure at least `s`.
fn inverse_distribution(sol: &EnergySolution, s: f64, top: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, top);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if distribution_function(sol, mid) >= s {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Compares the energy of a graph with the energy of its monotone
/// rearrangement on a segment of the same total length, starting from a
/// zero value. The rearrangement never does worse.
pub fn rearrangement_check(g: &MetricGraph) -> Result<RearrangementCheck, FemError> {
    let sol = solve_energy(g)?;
    let total = g.total_length();
    let top = sol.max_value();
    let ds = total / REARRANGEMENT_GRID as f64;
    let profile: Vec<f64> = (0..=REARRANGEMENT_GRID)
        .map(|i| match i {
            0 => 0.0,
            _ if i == REARRANGEMENT_GRID => top,
            _ => inverse_distribution(&sol, i as f64 * ds, top),
        })
        .collect();
    let (mut dirichlet, mut integral) = (0.0, 0.0);
    for w in profile.windows(2) {
        let dv = w[1] - w[0];
        dirichlet += dv * dv / ds;
        integral += 0.5 * (w[0] + w[1]) * ds;
    }
    let segment_energy = 0.5 * dirichlet - integral;
    Ok(RearrangementCheck {
        graph_energy: sol.energy,
        segment_energy,
        ok: segment_energy <= sol.energy + 1e-6,
    })
}

//! Exact minimizer of `J(u) = ½∫|u'|² − ∫u` on a metric graph with zero
//! values at Dirichlet vertices and Kirchhoff balance elsewhere.
//!
//! The minimizer solves `−w'' = 1` on each edge, so it is a parabola
//! `w(x) = u_i + a x − x²/2` determined by its vertex values. Those values
//! solve a small symmetric positive definite system over the free vertices.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{absorb_degree_two, EdgeId, MetricGraph, VertexId};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnergyError {
    #[error("graph has no Dirichlet vertex; the energy is unbounded below")]
    NoDirichlet,
    #[error("Kirchhoff system is singular (a component carries no Dirichlet vertex)")]
    Singular,
    #[error("edge {0} references an unknown vertex")]
    DanglingEdge(EdgeId),
    #[error("vertex {vertex} is not an endpoint of edge {edge}")]
    NotAnEndpoint { edge: EdgeId, vertex: VertexId },
    #[error("unknown edge id {0}")]
    UnknownEdge(EdgeId),
    #[error("position {x} is outside [0, {length}]")]
    OutOfRange { x: f64, length: f64 },
}

/// Kirchhoff system over the free vertices, in the order of `free`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    pub matrix: DMatrix<f64>,
    pub rhs: DVector<f64>,
    pub free: Vec<VertexId>,
}

/// The parabola on one edge, parametrized from `from` towards `to`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeProfile {
    pub edge: EdgeId,
    pub from: VertexId,
    pub to: VertexId,
    pub length: f64,
    pub start: f64,
    pub end: f64,
    /// Derivative at `from`, pointing into the edge.
    pub slope: f64,
}

impl EdgeProfile {
    fn new(edge: EdgeId, from: VertexId, to: VertexId, length: f64, start: f64, end: f64) -> Self {
        EdgeProfile {
            edge,
            from,
            to,
            length,
            start,
            end,
            slope: (end - start) / length + 0.5 * length,
        }
    }

    /// Same parabola read from the other end.
    pub fn reversed(&self) -> EdgeProfile {
        EdgeProfile::new(self.edge, self.to, self.from, self.length, self.end, self.start)
    }

    pub fn value(&self, x: f64) -> f64 {
        self.start + self.slope * x - 0.5 * x * x
    }

    pub fn derivative(&self, x: f64) -> f64 {
        self.slope - x
    }

    pub fn max_value(&self) -> f64 {
        self.value(self.slope.clamp(0.0, self.length))
    }

    pub fn integral(&self) -> f64 {
        let (u, a, l) = (self.start, self.slope, self.length);
        u * l + 0.5 * a * l * l - l * l * l / 6.0
    }

    pub fn gradient_sq_integral(&self) -> f64 {
        let (a, l) = (self.slope, self.length);
        a * a * l - a * l * l + l * l * l / 3.0
    }

    pub fn value_sq_integral(&self) -> f64 {
        let (u, a, l) = (self.start, self.slope, self.length);
        let (l2, l3) = (l * l, l * l * l);
        u * u * l + a * a * l3 / 3.0 + l3 * l2 / 20.0 + u * a * l2 - u * l3 / 3.0 - a * l2 * l2 / 4.0
    }

    /// Largest `|w'|` on the edge.
    pub fn max_abs_derivative(&self) -> f64 {
        self.slope.abs().max((self.slope - self.length).abs())
    }

    /// Length of `{x ∈ [0, L] : w(x) ≤ t}`.
    pub fn sublevel_measure(&self, t: f64) -> f64 {
        let disc = self.slope * self.slope + 2.0 * (self.start - t);
        if disc <= 0.0 {
            return self.length;
        }
        let r = disc.sqrt();
        let lo = (self.slope - r).max(0.0);
        let hi = (self.slope + r).min(self.length);
        self.length - (hi - lo).max(0.0)
    }
}

/// Selects one orientation of an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DirectedEdge {
    pub edge: EdgeId,
    pub from: VertexId,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergySolution {
    pub values: BTreeMap<VertexId, f64>,
    /// One profile per edge, oriented from the edge's `u` endpoint.
    pub profiles: Vec<EdgeProfile>,
    pub energy: f64,
    /// Sum of outgoing derivatives at each free vertex.
    pub residuals: BTreeMap<VertexId, f64>,
    pub min_value: f64,
    /// `|J + ½∫w|`, which vanishes for the exact minimizer.
    pub identity_gap: f64,
}

impl EnergySolution {
    pub fn profile(&self, d: DirectedEdge) -> Result<EdgeProfile, EnergyError> {
        let p = self
            .profiles
            .iter()
            .find(|p| p.edge == d.edge)
            .ok_or(EnergyError::UnknownEdge(d.edge))?;
        if d.from == p.from {
            Ok(*p)
        } else if d.from == p.to {
            Ok(p.reversed())
        } else {
            Err(EnergyError::NotAnEndpoint {
                edge: d.edge,
                vertex: d.from,
            })
        }
    }

    /// Slope `a(i→j)` of the parabola leaving `from` along `edge`.
    pub fn slope(&self, d: DirectedEdge) -> Result<f64, EnergyError> {
        self.profile(d).map(|p| p.slope)
    }

    pub fn total_length(&self) -> f64 {
        self.profiles.iter().map(|p| p.length).sum()
    }

    pub fn max_value(&self) -> f64 {
        self.profiles
            .iter()
            .map(EdgeProfile::max_value)
            .chain(self.values.values().copied())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn integral(&self) -> f64 {
        self.profiles.iter().map(EdgeProfile::integral).sum()
    }

    pub fn gradient_sq_integral(&self) -> f64 {
        self.profiles.iter().map(EdgeProfile::gradient_sq_integral).sum()
    }

    pub fn value_sq_integral(&self) -> f64 {
        self.profiles.iter().map(EdgeProfile::value_sq_integral).sum()
    }

    /// `‖w'‖∞` over the whole graph.
    pub fn max_abs_derivative(&self) -> f64 {
        self.profiles
            .iter()
            .map(EdgeProfile::max_abs_derivative)
            .fold(0.0, f64::max)
    }
}

pub fn assemble_kirchhoff_system(g: &MetricGraph) -> Result<LinearSystem, EnergyError> {
    if g.dirichlet_count() == 0 {
        return Err(EnergyError::NoDirichlet);
    }
    let free: Vec<VertexId> = g
        .vertices()
        .iter()
        .filter(|v| !v.role.is_dirichlet())
        .map(|v| v.id)
        .collect();
    let slot: BTreeMap<VertexId, usize> = free.iter().enumerate().map(|(i, &id)| (id, i)).collect();

    let n = free.len();
    let mut matrix = DMatrix::zeros(n, n);
    let mut rhs = DVector::zeros(n);
    for e in g.edges() {
        if g.vertex(e.u).is_none() || g.vertex(e.v).is_none() {
            return Err(EnergyError::DanglingEdge(e.id));
        }
        let c = 1.0 / e.length;
        let (a, b) = (slot.get(&e.u).copied(), slot.get(&e.v).copied());
        for (p, q) in [(a, b), (b, a)] {
            if let Some(p) = p {
                matrix[(p, p)] += c;
                rhs[p] += 0.5 * e.length;
                if let Some(q) = q {
                    matrix[(p, q)] -= c;
                }
            }
        }
    }
    Ok(LinearSystem { matrix, rhs, free })
}

pub fn solve_energy(g: &MetricGraph) -> Result<EnergySolution, EnergyError> {
    let sys = assemble_kirchhoff_system(g)?;
    let x = if sys.free.is_empty() {
        DVector::zeros(0)
    } else {
        let chol = sys.matrix.clone().cholesky().ok_or(EnergyError::Singular)?;
        chol.solve(&sys.rhs)
    };

    let mut values: BTreeMap<VertexId, f64> = g.vertices().iter().map(|v| (v.id, 0.0)).collect();
    for (i, &id) in sys.free.iter().enumerate() {
        values.insert(id, x[i]);
    }

    let profiles: Vec<EdgeProfile> = g
        .edges()
        .iter()
        .map(|e| EdgeProfile::new(e.id, e.u, e.v, e.length, values[&e.u], values[&e.v]))
        .collect();

    let mut residuals: BTreeMap<VertexId, f64> = sys.free.iter().map(|&id| (id, 0.0)).collect();
    for p in &profiles {
        if let Some(r) = residuals.get_mut(&p.from) {
            *r += p.slope;
        }
        if let Some(r) = residuals.get_mut(&p.to) {
            *r += p.reversed().slope;
        }
    }

    let energy: f64 = profiles
        .iter()
        .map(|p| 0.5 * p.gradient_sq_integral() - p.integral())
        .sum();
    let integral: f64 = profiles.iter().map(EdgeProfile::integral).sum();
    let min_value = values.values().copied().fold(f64::INFINITY, f64::min);

    Ok(EnergySolution {
        values,
        profiles,
        energy,
        residuals,
        min_value,
        identity_gap: (energy + 0.5 * integral).abs(),
    })
}

/// Slope at the first leaf of a three-edge star whose leaves are all
/// Dirichlet, from the closed form in the edge lengths.
pub fn edge_slope_from_formula(l1: f64, l2: f64, l3: f64) -> f64 {
    let sum = l1 + l2 + l3;
    let pairs = l1 * l2 + l2 * l3 + l3 * l1;
    0.5 * l1 + l2 * l3 * sum / (2.0 * pairs)
}

/// Value and derivative of the solution at distance `x` from `d.from`.
pub fn evaluate(sol: &EnergySolution, d: DirectedEdge, x: f64) -> Result<(f64, f64), EnergyError> {
    let p = sol.profile(d)?;
    if !(0.0..=p.length).contains(&x) {
        return Err(EnergyError::OutOfRange { x, length: p.length });
    }
    Ok((p.value(x), p.derivative(x)))
}

/// Measure of the sublevel set `{w ≤ t}`.
pub fn distribution_function(sol: &EnergySolution, t: f64) -> f64 {
    sol.profiles.iter().map(|p| p.sublevel_measure(t)).sum()
}

/// `J(w_c)` on the unit interval for `w_c(x) = −x²/2 + c x`.
pub fn parabola_energy(c: f64) -> f64 {
    0.5 * c * c - c + 1.0 / 3.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalityAudit {
    pub is_tree: bool,
    pub at_most_one_neumann_leaf: bool,
    /// Vacuously true without a Neumann leaf.
    pub max_at_neumann_leaf: bool,
    pub lipschitz_bound: bool,
    pub nonnegative: bool,
    pub kirchhoff_balanced: bool,
    /// Vertex and edge counts within the bounds an optimal tree obeys
    /// (`2k−2`/`2k−3` without a Neumann leaf, `2k`/`2k−1` with one), after
    /// absorbing free vertices of degree two.
    pub within_size_bounds: bool,
    pub neumann_leaf: Option<VertexId>,
    pub max_value: f64,
    pub max_abs_derivative: f64,
    pub max_residual: f64,
}

impl OptimalityAudit {
    /// Checks that hold for every solved graph, optimal or not.
    pub fn solution_checks_pass(&self) -> bool {
        self.lipschitz_bound && self.nonnegative && self.kirchhoff_balanced
    }

    pub fn all_pass(&self) -> bool {
        self.is_tree
            && self.at_most_one_neumann_leaf
            && self.max_at_neumann_leaf
            && self.within_size_bounds
            && self.solution_checks_pass()
    }
}

pub fn audit_optimality(g: &MetricGraph, sol: &EnergySolution) -> OptimalityAudit {
    let total = g.total_length();
    let adj = g.adjacency();
    let leaves: Vec<VertexId> = g
        .vertices()
        .iter()
        .enumerate()
        .filter(|(i, v)| !v.role.is_dirichlet() && adj[*i].len() == 1)
        .map(|(_, v)| v.id)
        .collect();
    let max_value = sol.max_value();
    let neumann_leaf = (leaves.len() == 1).then(|| leaves[0]);
    let max_at_neumann_leaf = match neumann_leaf {
        Some(id) => sol.values[&id] >= max_value - 1e-12,
        None => true,
    };

    let reduced = absorb_degree_two(g);
    let k = g.dirichlet_count();
    let (vmax, emax) = if leaves.is_empty() {
        (2 * k as isize - 2, 2 * k as isize - 3)
    } else {
        (2 * k as isize, 2 * k as isize - 1)
    };
    let within_size_bounds = reduced.vertex_count() as isize <= vmax.max(1)
        && reduced.edge_count() as isize <= emax.max(1);

    let max_abs_derivative = sol.max_abs_derivative();
    let max_residual = sol.residuals.values().fold(0.0f64, |m, r| m.max(r.abs()));
    OptimalityAudit {
        is_tree: g.is_tree(),
        at_most_one_neumann_leaf: leaves.len() <= 1,
        max_at_neumann_leaf,
        lipschitz_bound: max_abs_derivative <= total * (1.0 + 1e-12),
        nonnegative: sol.min_value >= -1e-12,
        kirchhoff_balanced: max_residual <= 1e-12 * (1.0 + total),
        within_size_bounds,
        neumann_leaf,
        max_value,
        max_abs_derivative,
        max_residual,
    }
}

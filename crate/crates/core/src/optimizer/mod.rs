//! Shape optimization: for each candidate topology, search over edge lengths
//! and junction positions for the graph of prescribed total length that
//! connects the pins and minimizes the chosen functional.
//!
//! Junction positions are the primary variables. Every non-leaf edge gets
//! at least the distance between its endpoints, and the remaining budget
//! `L − Σ|X_i − X_j|` is spread over the edges by squared weights, so every
//! trial point is realizable and sums to `L` exactly. Placements that exceed
//! the budget are scored by an exact penalty on the overshoot.

pub mod embedding;
pub mod feasibility;
pub mod nelder_mead;

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::energy::{audit_optimality, solve_energy, OptimalityAudit};
use crate::graph::{absorb_degree_two, contract_short_edges, MetricGraph, VertexRole};
use crate::spectral::lambda1;
use crate::topology::{enumerate_topologies, NodeRole, Topology, TopologyError};

pub use embedding::{EdgeShape, Embeddability, Realization};
pub use feasibility::{feasibility, Placement};

use feasibility::{distance, feasibility_tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Functional {
    Energy,
    Lambda1,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub dimension: usize,
    pub pins: Vec<Vec<f64>>,
    pub total_length: f64,
    pub functional: Functional,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecError {
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("at least one pin is required")]
    NoPins,
    #[error("pin {0} does not have {1} finite coordinates")]
    BadPin(usize, usize),
    #[error("pins {0} and {1} coincide")]
    DuplicatePins(usize, usize),
    #[error("total length must be positive and finite")]
    BadLength,
    #[error("total length {length} is below the largest pin distance {needed}")]
    TooShort { length: f64, needed: f64 },
}

impl ProblemSpec {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn validate(&self) -> Result<(), SpecError> {
        if self.dimension == 0 {
            return Err(SpecError::ZeroDimension);
        }
        if self.pins.is_empty() {
            return Err(SpecError::NoPins);
        }
        for (i, p) in self.pins.iter().enumerate() {
            if p.len() != self.dimension || p.iter().any(|x| !x.is_finite()) {
                return Err(SpecError::BadPin(i, self.dimension));
            }
        }
        if !(self.total_length.is_finite() && self.total_length > 0.0) {
            return Err(SpecError::BadLength);
        }
        let mut needed: f64 = 0.0;
        for i in 0..self.pins.len() {
            for j in i + 1..self.pins.len() {
                let d = distance(&self.pins[i], &self.pins[j]);
                if d == 0.0 {
                    return Err(SpecError::DuplicatePins(i, j));
                }
                needed = needed.max(d);
            }
        }
        if self.total_length < needed {
            return Err(SpecError::TooShort {
                length: self.total_length,
                needed,
            });
        }
        Ok(())
    }

    pub fn with_length(&self, total_length: f64) -> ProblemSpec {
        ProblemSpec {
            total_length,
            ..self.clone()
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OptimizeError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("total length below Steiner feasibility")]
    Infeasible,
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error("topology has {found} pins but the problem has {expected}")]
    PinMismatch { expected: usize, found: usize },
}

impl OptimizeError {
    /// The problem has no admissible graph, as opposed to a malformed input.
    pub fn is_infeasible(&self) -> bool {
        matches!(
            self,
            OptimizeError::Infeasible | OptimizeError::Spec(SpecError::TooShort { .. })
        )
    }
}

#[derive(Debug, Clone)]
pub struct SearchOptions {
    pub seeds: u64,
    /// Restrict the search to one topology code.
    pub topology: Option<String>,
    pub nelder_mead: nelder_mead::Options,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            seeds: 16,
            topology: None,
            nelder_mead: nelder_mead::Options::default(),
        }
    }
}

/// Best lengths found for one topology.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub topology: Topology,
    pub lengths: Vec<f64>,
    pub positions: Vec<Vec<f64>>,
    pub value: f64,
    pub feasible: bool,
    pub evaluations: usize,
}

impl Candidate {
    /// Some edge is short enough to count as collapsed.
    pub fn is_degenerate(&self, total_length: f64) -> bool {
        self.lengths.iter().any(|&l| l < 1e-6 * total_length)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateSummary {
    pub code: String,
    pub value: Option<f64>,
    /// Code of the topology this candidate collapsed onto, if any.
    pub reduced_to: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Optimum {
    pub functional: Functional,
    pub topology: Topology,
    pub lengths: Vec<f64>,
    pub placement: Placement,
    pub value: f64,
    pub energy: f64,
    pub lambda1: Option<f64>,
    pub embeddability: Embeddability,
    pub edge_shapes: Vec<EdgeShape>,
    pub embedding_issues: Vec<String>,
    pub audit: OptimalityAudit,
    pub candidates: Vec<CandidateSummary>,
}

impl Optimum {
    pub fn graph(&self) -> MetricGraph {
        self.topology
            .to_graph(&self.lengths)
            .expect("lengths match the topology")
    }
}

/// Energy of a tree from its lengths alone, without building a graph.
///
/// With `f` the Kirchhoff load and `u` the vertex values,
/// `J = −½ fᵀu − Σ l³/24`.
struct TreeEnergy {
    slots: Vec<Option<usize>>,
    free: usize,
}

impl TreeEnergy {
    fn new(t: &Topology) -> Self {
        let mut free = 0;
        let slots = t
            .roles()
            .iter()
            .map(|r| match r {
                NodeRole::Dirichlet { .. } => None,
                _ => {
                    free += 1;
                    Some(free - 1)
                }
            })
            .collect();
        TreeEnergy { slots, free }
    }

    fn eval(&self, t: &Topology, lengths: &[f64]) -> f64 {
        let n = self.free;
        let mut a = vec![0.0; n * n];
        let mut f = vec![0.0; n];
        let mut cubes = 0.0;
        for (&(p, q), &l) in t.edges().iter().zip(lengths) {
            cubes += l * l * l;
            let c = 1.0 / l;
            let (sp, sq) = (self.slots[p], self.slots[q]);
            for (x, y) in [(sp, sq), (sq, sp)] {
                if let Some(x) = x {
                    a[x * n + x] += c;
                    f[x] += 0.5 * l;
                    if let Some(y) = y {
                        a[x * n + y] -= c;
                    }
                }
            }
        }
        // in-place Cholesky, then two triangular solves
        for j in 0..n {
            let mut d = a[j * n + j];
            for k in 0..j {
                d -= a[j * n + k] * a[j * n + k];
            }
            if d.is_nan() || d <= 0.0 {
                return f64::INFINITY;
            }
            let d = d.sqrt();
            a[j * n + j] = d;
            for i in j + 1..n {
                let mut s = a[i * n + j];
                for k in 0..j {
                    s -= a[i * n + k] * a[j * n + k];
                }
                a[i * n + j] = s / d;
            }
        }
        let mut y = f.clone();
        for i in 0..n {
            for k in 0..i {
                y[i] -= a[i * n + k] * y[k];
            }
            y[i] /= a[i * n + i];
        }
        // fᵀA⁻¹f = |L⁻¹f|²
        let quad: f64 = y.iter().map(|v| v * v).sum();
        -0.5 * quad - cubes / 24.0
    }
}

enum Evaluator {
    Energy(TreeEnergy),
    Lambda1,
}

impl Evaluator {
    fn new(functional: Functional, t: &Topology) -> Self {
        match functional {
            Functional::Energy => Evaluator::Energy(TreeEnergy::new(t)),
            Functional::Lambda1 => Evaluator::Lambda1,
        }
    }

    fn eval(&self, t: &Topology, lengths: &[f64]) -> f64 {
        match self {
            Evaluator::Energy(e) => e.eval(t, lengths),
            Evaluator::Lambda1 => t
                .to_graph(lengths)
                .ok()
                .and_then(|g| lambda1(&g).ok())
                .map_or(f64::INFINITY, |s| s.lambda1),
        }
    }
}

/// Search variables: junction coordinates, then one weight per edge.
struct Layout<'a> {
    t: &'a Topology,
    pins: &'a [Vec<f64>],
    total: f64,
    dim: usize,
    junctions: Vec<usize>,
    leaf_edge: Option<usize>,
}

struct Trial {
    lengths: Vec<f64>,
    positions: Vec<Vec<f64>>,
    overshoot: f64,
    weight_norm: f64,
}

impl<'a> Layout<'a> {
    fn new(t: &'a Topology, pins: &'a [Vec<f64>], total: f64) -> Self {
        let junctions = (0..t.vertex_count())
            .filter(|&v| t.roles()[v] == NodeRole::Kirchhoff)
            .collect();
        let leaf = t.neumann_vertex();
        let leaf_edge = leaf.and_then(|v| t.edges().iter().position(|&(a, b)| a == v || b == v));
        Layout {
            t,
            pins,
            total,
            dim: pins[0].len(),
            junctions,
            leaf_edge,
        }
    }

    fn size(&self) -> usize {
        self.junctions.len() * self.dim + self.t.edge_count()
    }

    fn positions(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let mut positions: Vec<Vec<f64>> = self
            .t
            .roles()
            .iter()
            .map(|r| match r {
                NodeRole::Dirichlet { pin } => self.pins[*pin].clone(),
                _ => vec![0.0; self.dim],
            })
            .collect();
        for (j, &v) in self.junctions.iter().enumerate() {
            positions[v] = x[j * self.dim..(j + 1) * self.dim].to_vec();
        }
        if let Some(e) = self.leaf_edge {
            let (a, b) = self.t.edges()[e];
            let (leaf, hub) = if self.t.roles()[a] == NodeRole::Neumann { (a, b) } else { (b, a) };
            positions[leaf] = positions[hub].clone();
        }
        positions
    }

    /// Search point whose trial reproduces the given realized configuration.
    fn point(&self, positions: &[Vec<f64>], lengths: &[f64]) -> Vec<f64> {
        let mut x = Vec::with_capacity(self.size());
        for &v in &self.junctions {
            x.extend_from_slice(&positions[v]);
        }
        let slack: Vec<f64> = self
            .t
            .edges()
            .iter()
            .enumerate()
            .map(|(e, &(a, b))| {
                if Some(e) == self.leaf_edge {
                    lengths[e]
                } else {
                    (lengths[e] - distance(&positions[a], &positions[b])).max(0.0)
                }
            })
            .collect();
        let s: f64 = slack.iter().sum();
        if s > 0.0 {
            x.extend(slack.iter().map(|v| (v / s).sqrt()));
        } else {
            x.extend(std::iter::repeat_n((1.0 / slack.len() as f64).sqrt(), slack.len()));
        }
        x
    }

    fn trial(&self, x: &[f64]) -> Trial {
        let positions = self.positions(x);
        let weights = &x[self.junctions.len() * self.dim..];
        let chords: Vec<f64> = self
            .t
            .edges()
            .iter()
            .enumerate()
            .map(|(e, &(a, b))| {
                if Some(e) == self.leaf_edge {
                    0.0
                } else {
                    distance(&positions[a], &positions[b])
                }
            })
            .collect();
        let used: f64 = chords.iter().sum();
        let budget = self.total - used;
        let squares: Vec<f64> = weights.iter().map(|w| w * w).collect();
        let weight_norm: f64 = squares.iter().sum();
        let floor = 1e-9 * self.total;
        let lengths: Vec<f64> = if budget >= 0.0 {
            chords
                .iter()
                .zip(&squares)
                .map(|(c, s)| {
                    let share = if weight_norm > 0.0 {
                        s / weight_norm
                    } else {
                        1.0 / squares.len() as f64
                    };
                    (c + budget * share).max(floor)
                })
                .collect()
        } else {
            chords.iter().map(|c| (c * self.total / used).max(floor)).collect()
        };
        Trial {
            lengths,
            positions,
            overshoot: (-budget).max(0.0),
            weight_norm,
        }
    }
}

fn seeded_starts(layout: &Layout, spec: &ProblemSpec, seeds: u64) -> Vec<Vec<f64>> {
    let k = spec.pins.len();
    let m = layout.t.edge_count();
    (0..seeds)
        .map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut x = Vec::with_capacity(layout.size());
            // junctions at uniform random convex combinations of the pins
            for _ in &layout.junctions {
                let w: Vec<f64> = (0..k).map(|_| Exp1.sample(&mut rng)).collect();
                let s: f64 = w.iter().sum();
                for c in 0..layout.dim {
                    x.push((0..k).map(|i| w[i] / s * spec.pins[i][c]).sum());
                }
            }
            let mut w: Vec<f64> = (0..m).map(|_| Exp1.sample(&mut rng)).collect();
            // every other start gives the leaf most of the spare length
            if let (Some(e), 1) = (layout.leaf_edge, seed % 2) {
                w.iter_mut().for_each(|v| *v *= 0.01);
                w[e] = 1.0;
            }
            let s: f64 = w.iter().sum();
            x.extend(w.iter().map(|v| (v / s).sqrt()));
            x
        })
        .collect()
}

/// Runs the simplex search from each start and keeps the best realizable
/// configuration seen at any trial point.
fn search(t: &Topology, spec: &ProblemSpec, opts: &SearchOptions, starts: &[Vec<f64>]) -> Candidate {
    let layout = Layout::new(t, &spec.pins, spec.total_length);
    let evaluator = Evaluator::new(spec.functional, t);
    let total = spec.total_length;
    let m = t.edge_count();
    let mut best: Option<(f64, Vec<f64>, Vec<Vec<f64>>)> = None;
    let mut evaluations = 0;
    let mut scale: Option<f64> = None;

    for x0 in starts {
        let reference = *scale.get_or_insert_with(|| {
            let v = evaluator.eval(t, &layout.trial(x0).lengths);
            if v.is_finite() { v.abs().max(1e-300) } else { 1.0 }
        });
        let penalty = 1e3 * reference / total;
        let regular = 1e-2 * reference;
        let mut steps = vec![0.1 * total; layout.junctions.len() * layout.dim];
        steps.extend(std::iter::repeat_n(0.2, m));
        let objective = |x: &[f64]| -> f64 {
            let trial = layout.trial(x);
            let v = evaluator.eval(t, &trial.lengths);
            let shape = regular * (trial.weight_norm - 1.0).powi(2);
            if trial.overshoot > 0.0 {
                v + penalty * trial.overshoot + shape
            } else {
                if best.as_ref().is_none_or(|b| v < b.0) {
                    best = Some((v, trial.lengths, trial.positions));
                }
                v + shape
            }
        };
        evaluations += nelder_mead::minimize(objective, x0, &steps, &opts.nelder_mead).evals;
    }

    match best {
        Some((value, lengths, positions)) => Candidate {
            topology: t.clone(),
            lengths,
            positions,
            value,
            feasible: true,
            evaluations,
        },
        None => Candidate {
            topology: t.clone(),
            lengths: vec![total / m as f64; m],
            positions: layout.positions(&vec![0.0; layout.size()]),
            value: f64::INFINITY,
            feasible: false,
            evaluations,
        },
    }
}

/// Optimizes lengths and junction positions for one topology from the
/// seeded starts, without following collapsed edges.
pub fn optimize_fixed(t: &Topology, spec: &ProblemSpec, opts: &SearchOptions) -> Candidate {
    let layout = Layout::new(t, &spec.pins, spec.total_length);
    search(t, spec, opts, &seeded_starts(&layout, spec, opts.seeds))
}

/// Collapses the short edges of a candidate. Returns the smaller topology
/// and a search point for it that reproduces the collapsed configuration.
fn collapse(c: &Candidate, spec: &ProblemSpec) -> Option<(Topology, Vec<f64>)> {
    let g = c.topology.to_graph(&c.lengths).ok()?;
    let contracted = contract_short_edges(&g, 1e-6 * spec.total_length).ok()?;
    let g = absorb_degree_two(&contracted);
    let (t, map) = Topology::identify(&g).ok()?;
    if t.code() == c.topology.code() {
        return None;
    }
    // graph vertex ids are the old topology indices
    let mut positions = vec![Vec::new(); t.vertex_count()];
    for v in g.vertices() {
        positions[map[&v.id]] = c.positions[v.id].clone();
    }
    let mut lengths = vec![0.0; t.edge_count()];
    for e in g.edges() {
        let (a, b) = (map[&e.u], map[&e.v]);
        let i = t.edges().iter().position(|&p| p == (a.min(b), a.max(b)))?;
        lengths[i] = e.length;
    }
    let x0 = Layout::new(&t, &spec.pins, spec.total_length).point(&positions, &lengths);
    Some((t, x0))
}

/// Searched candidates by code, and for each collapsed code the code it
/// collapsed onto.
type Resolution = (BTreeMap<String, Candidate>, BTreeMap<String, String>);

/// Optimizes every topology, then repeatedly collapses degenerate
/// candidates. A collapsed configuration is polished as a start for the
/// smaller topology and competes with that topology's own search.
fn resolve(topologies: &[Topology], spec: &ProblemSpec, opts: &SearchOptions) -> Resolution {
    let mut done: BTreeMap<String, Candidate> = topologies
        .par_iter()
        .map(|t| (t.code().to_string(), optimize_fixed(t, spec, opts)))
        .collect();
    let mut reduced: BTreeMap<String, String> = BTreeMap::new();
    let mut frontier: Vec<String> = done.keys().cloned().collect();
    while !frontier.is_empty() {
        let jobs: Vec<(String, Topology, Vec<f64>)> = frontier
            .iter()
            .filter_map(|code| {
                let c = &done[code];
                if !(c.feasible && c.is_degenerate(spec.total_length)) {
                    return None;
                }
                let (t, x0) = collapse(c, spec)?;
                Some((code.clone(), t, x0))
            })
            .collect();
        let polished: Vec<Candidate> = jobs
            .par_iter()
            .map(|(_, t, x0)| search(t, spec, opts, std::slice::from_ref(x0)))
            .collect();
        let mut unseen: Vec<Topology> = Vec::new();
        for (_, t, _) in &jobs {
            if !done.contains_key(t.code()) && !unseen.iter().any(|u| u.code() == t.code()) {
                unseen.push(t.clone());
            }
        }
        let fresh: Vec<Candidate> = unseen.par_iter().map(|t| optimize_fixed(t, spec, opts)).collect();

        let mut changed: Vec<String> = Vec::new();
        for c in fresh {
            changed.push(c.topology.code().to_string());
            done.insert(c.topology.code().to_string(), c);
        }
        for ((from, t, _), c) in jobs.iter().zip(polished) {
            reduced.insert(from.clone(), t.code().to_string());
            let slot = done.get_mut(t.code()).expect("searched above");
            if c.value < slot.value {
                *slot = c;
                changed.push(t.code().to_string());
            }
        }
        changed.sort();
        changed.dedup();
        frontier = changed;
    }
    (done, reduced)
}

/// Optimizes one topology, following collapsed edges to smaller topologies.
pub fn optimize_lengths(t: &Topology, spec: &ProblemSpec, opts: &SearchOptions) -> Candidate {
    let (mut done, reduced) = resolve(std::slice::from_ref(t), spec, opts);
    let mut code = t.code().to_string();
    while let Some(next) = reduced.get(&code) {
        code = next.clone();
    }
    done.remove(&code).expect("resolved")
}

fn better(a: &Candidate, b: &Candidate) -> bool {
    let tol = 1e-9 * (1.0 + a.value.abs().max(b.value.abs()));
    if (a.value - b.value).abs() > tol {
        return a.value < b.value;
    }
    (a.topology.edge_count(), a.topology.code()) < (b.topology.edge_count(), b.topology.code())
}

/// Runs the search over every topology and returns the best graph.
pub fn optimize(spec: &ProblemSpec, opts: &SearchOptions) -> Result<Optimum, OptimizeError> {
    spec.validate()?;
    let k = spec.pins.len();
    let topologies = match &opts.topology {
        Some(code) => {
            let t = Topology::from_code(code)?;
            if t.pin_count() != k {
                return Err(OptimizeError::PinMismatch {
                    expected: k,
                    found: t.pin_count(),
                });
            }
            vec![t]
        }
        None => enumerate_topologies(k)?,
    };
    let (done, reduced) = resolve(&topologies, spec, opts);

    let mut winner: Option<&Candidate> = None;
    for (code, c) in &done {
        if !c.feasible || reduced.contains_key(code) {
            continue;
        }
        if winner.is_none_or(|w| better(c, w)) {
            winner = Some(c);
        }
    }
    let winner = winner.ok_or(OptimizeError::Infeasible)?.clone();

    let candidates = topologies
        .iter()
        .map(|t| {
            let c = &done[t.code()];
            CandidateSummary {
                code: t.code().to_string(),
                value: c.feasible.then_some(c.value),
                reduced_to: reduced.get(t.code()).cloned(),
            }
        })
        .collect();
    Ok(finish(spec, winner, candidates))
}

fn finish(spec: &ProblemSpec, c: Candidate, candidates: Vec<CandidateSummary>) -> Optimum {
    let g = c.topology.to_graph(&c.lengths).expect("lengths match the topology");
    let sol = solve_energy(&g).expect("a topology always has a pin");
    let audit = audit_optimality(&g, &sol);
    let lam = match spec.functional {
        Functional::Lambda1 => lambda1(&g).ok().map(|s| s.lambda1),
        Functional::Energy => None,
    };
    let realization = embedding::realize(&c.topology, &c.lengths, &c.positions);
    let max_violation = feasibility::max_violation(&c.topology, &c.lengths, &realization.positions);
    Optimum {
        functional: spec.functional,
        value: lam.unwrap_or(sol.energy),
        energy: sol.energy,
        lambda1: lam,
        placement: Placement {
            positions: realization.positions,
            max_violation,
            feasible: max_violation <= feasibility_tolerance(spec.total_length),
        },
        embeddability: realization.embeddability,
        edge_shapes: realization.shapes,
        embedding_issues: realization.issues,
        topology: c.topology,
        lengths: c.lengths,
        audit,
        candidates,
    }
}

/// Re-runs the embedding classification on an optimum's placement.
pub fn embedding_check(opt: &Optimum) -> Embeddability {
    embedding::realize(&opt.topology, &opt.lengths, &opt.placement.positions).embeddability
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollinearComparison {
    /// Three-edge star with lengths `(1, 1, n)`.
    pub star: f64,
    /// Chain `D₁–D₂–K–D₃` plus a free leaf at `K`, with lengths
    /// `(2, (n−1)/2, (n−1)/2, 1)`, total `n + 2`.
    pub chain: f64,
    /// The same chain with a leaf of length 2, total `n + 3`.
    pub chain_long_leaf: f64,
}

fn chain(n: f64, leaf: f64) -> MetricGraph {
    let h = 0.5 * (n - 1.0);
    MetricGraph::from_parts(
        &[
            VertexRole::Dirichlet { pin: 0 },
            VertexRole::Dirichlet { pin: 1 },
            VertexRole::Dirichlet { pin: 2 },
            VertexRole::Free,
            VertexRole::Free,
        ],
        &[(0, 1, 2.0), (1, 3, h), (2, 3, h), (3, 4, leaf)],
    )
}

/// Exact energies of the two competitors for pins at `−1`, `1` and `n` on a
/// line with total length `n + 2`.
pub fn compare_collinear(n: u32) -> CollinearComparison {
    let n = n as f64;
    let star = MetricGraph::from_parts(
        &[
            VertexRole::Dirichlet { pin: 0 },
            VertexRole::Dirichlet { pin: 1 },
            VertexRole::Dirichlet { pin: 2 },
            VertexRole::Free,
        ],
        &[(0, 3, 1.0), (1, 3, 1.0), (2, 3, n)],
    );
    let energy = |g: &MetricGraph| solve_energy(g).expect("graph has pins").energy;
    CollinearComparison {
        star: energy(&star),
        chain: energy(&chain(n, 1.0)),
        chain_long_leaf: energy(&chain(n, 2.0)),
    }
}

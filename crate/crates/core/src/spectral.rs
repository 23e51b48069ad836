//! First Dirichlet eigenvalue of `−u'' = λu` with Kirchhoff conditions at
//! free vertices.
//!
//! On an edge of length `l` an eigenfunction with end values `α`, `β` is
//! `(α sin k(l−x) + β sin kx) / sin kl`. Kirchhoff balance at the free
//! vertices then reads `M(k) u = 0` with the secular matrix below. `M(k)` is
//! positive definite as `k → 0⁺` and decreases in `k` between resonances, so
//! the ground state is the first `k` where it stops being positive definite.
//! Modes vanishing at every vertex live on edges between two Dirichlet
//! vertices and are handled separately.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{EdgeId, MetricGraph, VertexId};

const RESONANCE: f64 = 1e-12;
const BRACKET_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("graph has no Dirichlet vertex")]
    NoDirichlet,
    #[error("graph has no edges")]
    NoEdges,
    #[error("k = {k} resonates with edge {edge}")]
    Resonance { k: f64, edge: EdgeId },
    #[error("spectral bracket failure")]
    BracketFailure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroundMode {
    /// Determined by the secular matrix; nonzero at some vertex.
    Secular,
    /// A half sine on an edge joining two Dirichlet vertices.
    DirichletEdge { edge: EdgeId },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralSolution {
    pub lambda1: f64,
    pub k1: f64,
    /// Eigenfunction values at free vertices, normalized in L² and positive.
    pub values: BTreeMap<VertexId, f64>,
    pub bracket: (f64, f64),
    pub mode: GroundMode,
}

struct FreeIndex {
    free: Vec<VertexId>,
    slot: BTreeMap<VertexId, usize>,
}

impl FreeIndex {
    fn new(g: &MetricGraph) -> Self {
        let free: Vec<VertexId> = g
            .vertices()
            .iter()
            .filter(|v| !v.role.is_dirichlet())
            .map(|v| v.id)
            .collect();
        let slot = free.iter().enumerate().map(|(i, &id)| (id, i)).collect();
        FreeIndex { free, slot }
    }
}

fn secular_with(g: &MetricGraph, idx: &FreeIndex, k: f64) -> Result<DMatrix<f64>, SpectralError> {
    let n = idx.free.len();
    let mut m = DMatrix::zeros(n, n);
    for e in g.edges() {
        let (a, b) = (idx.slot.get(&e.u).copied(), idx.slot.get(&e.v).copied());
        if a.is_none() && b.is_none() {
            continue;
        }
        let s = (k * e.length).sin();
        if s.abs() < RESONANCE {
            return Err(SpectralError::Resonance { k, edge: e.id });
        }
        let cot = (k * e.length).cos() / s;
        for (p, q) in [(a, b), (b, a)] {
            if let Some(p) = p {
                m[(p, p)] += cot;
                if let Some(q) = q {
                    m[(p, q)] -= 1.0 / s;
                }
            }
        }
    }
    Ok(m)
}

/// Secular matrix over the free vertices, in vertex order.
pub fn secular_matrix(g: &MetricGraph, k: f64) -> Result<DMatrix<f64>, SpectralError> {
    secular_with(g, &FreeIndex::new(g), k)
}

fn positive_definite(g: &MetricGraph, idx: &FreeIndex, k: f64) -> bool {
    match secular_with(g, idx, k) {
        Ok(m) => m.cholesky().is_some(),
        Err(_) => false,
    }
}

/// `∫ φ²` over an edge for the eigenfunction with end values `α`, `β`.
fn edge_mass(alpha: f64, beta: f64, k: f64, l: f64) -> f64 {
    let s = (k * l).sin();
    let same = 0.5 * l - (2.0 * k * l).sin() / (4.0 * k);
    let cross = (s - k * l * (k * l).cos()) / (2.0 * k);
    ((alpha * alpha + beta * beta) * same + 2.0 * alpha * beta * cross) / (s * s)
}

pub fn lambda1(g: &MetricGraph) -> Result<SpectralSolution, SpectralError> {
    if g.dirichlet_count() == 0 {
        return Err(SpectralError::NoDirichlet);
    }
    if g.edge_count() == 0 {
        return Err(SpectralError::NoEdges);
    }
    let idx = FreeIndex::new(g);
    let is_free = |id: VertexId| idx.slot.contains_key(&id);

    let dirichlet_edge = g
        .edges()
        .iter()
        .filter(|e| !is_free(e.u) && !is_free(e.v))
        .max_by(|a, b| a.length.total_cmp(&b.length).then(b.id.cmp(&a.id)))
        .map(|e| (PI / e.length, e.id));

    let free_edge_max = g
        .edges()
        .iter()
        .filter(|e| is_free(e.u) || is_free(e.v))
        .map(|e| e.length)
        .fold(0.0, f64::max);

    let secular = if idx.free.is_empty() || free_edge_max == 0.0 {
        None
    } else {
        Some(secular_root(g, &idx, free_edge_max)?)
    };

    match (secular, dirichlet_edge) {
        (Some((lo, hi)), dd) if dd.is_none_or(|(kd, _)| hi <= kd) => {
            let k1 = 0.5 * (lo + hi);
            Ok(SpectralSolution {
                lambda1: k1 * k1,
                k1,
                values: ground_vertex_values(g, &idx, k1),
                bracket: (lo, hi),
                mode: GroundMode::Secular,
            })
        }
        (_, Some((kd, edge))) => Ok(SpectralSolution {
            lambda1: kd * kd,
            k1: kd,
            values: idx.free.iter().map(|&id| (id, 0.0)).collect(),
            bracket: (kd, kd),
            mode: GroundMode::DirichletEdge { edge },
        }),
        (None, None) => Err(SpectralError::BracketFailure),
        (Some(_), None) => unreachable!(),
    }
}

/// Brackets the first `k` at which `M(k)` loses positive definiteness.
///
/// Below the first resonance of an edge touching a free vertex `M(k)` has no
/// poles and decreases in the Loewner order, so definiteness is lost exactly
/// once and bisection over the whole interval is safe. The smallest
/// eigenvalue tends to −∞ at the resonance, so the root lies strictly before it.
fn secular_root(g: &MetricGraph, idx: &FreeIndex, free_edge_max: f64) -> Result<(f64, f64), SpectralError> {
    let l_max = g.edges().iter().map(|e| e.length).fold(0.0, f64::max);
    let mut lo = 1e-6 / l_max;
    let mut hi = PI / free_edge_max;
    if !positive_definite(g, idx, lo) {
        return Err(SpectralError::BracketFailure);
    }
    while hi - lo > BRACKET_TOL * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if positive_definite(g, idx, mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}

fn ground_vertex_values(g: &MetricGraph, idx: &FreeIndex, k: f64) -> BTreeMap<VertexId, f64> {
    let m = match secular_with(g, idx, k) {
        Ok(m) => m,
        Err(_) => return idx.free.iter().map(|&id| (id, 0.0)).collect(),
    };
    let eig = SymmetricEigen::new(m);
    let (i, _) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("at least one free vertex");
    let mut v: Vec<f64> = eig.eigenvectors.column(i).iter().copied().collect();
    if v.iter().sum::<f64>() < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    let value = |id: VertexId| idx.slot.get(&id).map_or(0.0, |&s| v[s]);
    let mass: f64 = g
        .edges()
        .iter()
        .map(|e| edge_mass(value(e.u), value(e.v), k, e.length))
        .sum();
    let norm = mass.sqrt();
    idx.free
        .iter()
        .map(|&id| (id, value(id) / norm))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::VertexRole;

    const D: fn(usize) -> VertexRole = |pin| VertexRole::Dirichlet { pin };
    const F: VertexRole = VertexRole::Free;

    fn segment(l: f64) -> MetricGraph {
        MetricGraph::from_parts(&[D(0), F], &[(0, 1, l)])
    }

    #[test]
    fn segment_matrix_is_cotangent() {
        let m = secular_matrix(&segment(1.0), 0.7).unwrap();
        assert_eq!(m[(0, 0)], 0.7f64.cos() / 0.7f64.sin());
        assert!(matches!(
            secular_matrix(&segment(1.0), PI),
            Err(SpectralError::Resonance { .. })
        ));
    }

    #[test]
    fn segments() {
        let s = lambda1(&segment(1.0)).unwrap();
        assert!((s.lambda1 - PI * PI / 4.0).abs() < 1e-9);
        assert!(s.bracket.1 - s.bracket.0 <= 1e-12 * s.bracket.1);
        assert!((lambda1(&segment(2.0)).unwrap().lambda1 - PI * PI / 16.0).abs() < 1e-9);

        let both = MetricGraph::from_parts(&[D(0), D(1)], &[(0, 1, 1.0)]);
        let s = lambda1(&both).unwrap();
        assert!((s.lambda1 - PI * PI).abs() < 1e-12);
        assert_eq!(s.mode, GroundMode::DirichletEdge { edge: 0 });
    }

    #[test]
    fn normalized_segment_trace() {
        // u(x) = √2 sin(πx/2) on [0, 1]
        let s = lambda1(&segment(1.0)).unwrap();
        assert!((s.values[&1] - 2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn symmetric_star() {
        let g = MetricGraph::from_parts(
            &[D(0), D(1), D(2), F],
            &[(0, 3, 1.0), (1, 3, 1.0), (2, 3, 1.0)],
        );
        let m = secular_matrix(&g, 0.4).unwrap();
        assert!((m[(0, 0)] - 3.0 / 0.4f64.tan()).abs() < 1e-14);
        assert!((lambda1(&g).unwrap().lambda1 - PI * PI / 4.0).abs() < 1e-9);
    }

    #[test]
    fn dirichlet_edge_can_win() {
        // long Dirichlet-Dirichlet edge next to a short pendant
        let g = MetricGraph::from_parts(&[D(0), D(1), F], &[(0, 1, 3.0), (1, 2, 0.5)]);
        let s = lambda1(&g).unwrap();
        assert_eq!(s.mode, GroundMode::DirichletEdge { edge: 0 });
        assert!((s.lambda1 - (PI / 3.0).powi(2)).abs() < 1e-12);
    }

    #[test]
    fn longer_pendant_lowers_lambda() {
        let mut prev = f64::INFINITY;
        for i in 1..=20 {
            let l = 0.2 * i as f64;
            let g = MetricGraph::from_parts(
                &[D(0), D(1), F, F],
                &[(0, 2, 0.5), (1, 2, 0.5), (2, 3, l)],
            );
            let lam = lambda1(&g).unwrap().lambda1;
            assert!(lam < prev);
            prev = lam;
        }
    }
}

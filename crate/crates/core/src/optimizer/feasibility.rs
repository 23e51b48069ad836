//! Placing a tree in space so that every edge is at least as long as the
//! distance between its endpoints.

use serde::{Deserialize, Serialize};

use crate::topology::{NodeRole, Topology};

/// Positions for every topology vertex. `max_violation` is the largest
/// `|X_i − X_j| − l_e` over edges; it is nonpositive exactly when the
/// placement realizes the lengths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub positions: Vec<Vec<f64>>,
    pub max_violation: f64,
    pub feasible: bool,
}

pub fn feasibility_tolerance(total_length: f64) -> f64 {
    1e-7 * (1.0 + total_length)
}

pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub(crate) fn max_violation(t: &Topology, lengths: &[f64], positions: &[Vec<f64>]) -> f64 {
    t.edges()
        .iter()
        .zip(lengths)
        .map(|(&(a, b), &l)| distance(&positions[a], &positions[b]) - l)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Tree path length between every pair of vertices.
fn path_lengths(t: &Topology, lengths: &[f64]) -> Vec<Vec<f64>> {
    let n = t.vertex_count();
    let mut adj = vec![Vec::new(); n];
    for (&(a, b), &l) in t.edges().iter().zip(lengths) {
        adj[a].push((b, l));
        adj[b].push((a, l));
    }
    (0..n)
        .map(|s| {
            let mut d = vec![f64::NAN; n];
            d[s] = 0.0;
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for &(w, l) in &adj[v] {
                    if d[w].is_nan() {
                        d[w] = d[v] + l;
                        stack.push(w);
                    }
                }
            }
            d
        })
        .collect()
}

/// Minimizes the largest edge violation over free-vertex positions with
/// Polyak subgradient steps from the pin centroid. The free leaf sits on
/// its neighbour; its edge never constrains anything.
pub fn feasibility(t: &Topology, lengths: &[f64], pins: &[Vec<f64>]) -> Placement {
    let total: f64 = lengths.iter().sum();
    let tol = feasibility_tolerance(total);
    let dim = pins.first().map_or(0, Vec::len);
    let mut centroid = vec![0.0; dim];
    for p in pins {
        for (c, x) in centroid.iter_mut().zip(p) {
            *c += x / pins.len() as f64;
        }
    }
    let mut positions: Vec<Vec<f64>> = t
        .roles()
        .iter()
        .map(|r| match r {
            NodeRole::Dirichlet { pin } => pins[*pin].clone(),
            _ => centroid.clone(),
        })
        .collect();
    let leaf = t.neumann_vertex();
    let leaf_edge = leaf.and_then(|v| t.edges().iter().position(|&(a, b)| a == v || b == v));
    let place_leaf = |positions: &mut Vec<Vec<f64>>| {
        if let (Some(v), Some(e)) = (leaf, leaf_edge) {
            let (a, b) = t.edges()[e];
            positions[v] = positions[if a == v { b } else { a }].clone();
        }
    };

    // a pair of pins farther apart than their tree path can never be placed
    let paths = path_lengths(t, lengths);
    let mut deficit = f64::NEG_INFINITY;
    for (i, ri) in t.roles().iter().enumerate() {
        for (j, rj) in t.roles().iter().enumerate().skip(i + 1) {
            if let (NodeRole::Dirichlet { .. }, NodeRole::Dirichlet { .. }) = (ri, rj) {
                deficit = deficit.max(distance(&positions[i], &positions[j]) - paths[i][j]);
            }
        }
    }
    if deficit > tol {
        place_leaf(&mut positions);
        let v = max_violation(t, lengths, &positions);
        return Placement {
            positions,
            max_violation: v.max(deficit),
            feasible: false,
        };
    }

    let movable: Vec<bool> = t
        .roles()
        .iter()
        .map(|r| *r == NodeRole::Kirchhoff)
        .collect();
    let constrained: Vec<usize> = (0..t.edge_count()).filter(|&e| Some(e) != leaf_edge).collect();
    let objective = |positions: &[Vec<f64>]| -> (f64, usize) {
        constrained
            .iter()
            .map(|&e| {
                let (a, b) = t.edges()[e];
                (distance(&positions[a], &positions[b]) - lengths[e], e)
            })
            .fold((f64::NEG_INFINITY, 0), |m, x| if x.0 > m.0 { x } else { m })
    };

    let (mut value, mut arg) = objective(&positions);
    let mut best = (value, positions.clone());
    if movable.iter().any(|&m| m) && !constrained.is_empty() {
        for it in 1..=10_000usize {
            if value <= 0.0 {
                break;
            }
            let (a, b) = t.edges()[arg];
            let d = distance(&positions[a], &positions[b]);
            if d == 0.0 {
                break;
            }
            let dir: Vec<f64> = positions[a].iter().zip(&positions[b]).map(|(x, y)| (x - y) / d).collect();
            let moving = movable[a] as usize + movable[b] as usize;
            if moving == 0 {
                break;
            }
            // Polyak step towards zero violation, damped late in the run
            let polyak = value / moving as f64;
            let step = if it <= 5_000 { polyak } else { polyak.min(total / it as f64) };
            if movable[a] {
                for (p, u) in positions[a].iter_mut().zip(&dir) {
                    *p -= step * u;
                }
            }
            if movable[b] {
                for (p, u) in positions[b].iter_mut().zip(&dir) {
                    *p += step * u;
                }
            }
            (value, arg) = objective(&positions);
            if value < best.0 {
                best = (value, positions.clone());
            }
        }
    }
    let mut positions = best.1;
    place_leaf(&mut positions);
    let v = max_violation(t, lengths, &positions);
    Placement {
        positions,
        max_violation: v,
        feasible: v <= tol,
    }
}

//! Helpers shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use mgopt::graph::{validate, MetricGraph, VertexRole};
use mgopt::topology::{NodeRole, Topology};
use rand::Rng;

/// Decodes a Prüfer sequence over `m` labelled vertices into its edges.
pub fn prufer_edges(seq: &[usize], m: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1; m];
    for &s in seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(m - 1);
    for &s in seq {
        let leaf = (0..m).find(|&v| degree[v] == 1).unwrap();
        edges.push((leaf, s));
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let rest: Vec<usize> = (0..m).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

/// Every labelled tree on at most `2k` vertices with pins `0..k`, an
/// optional free leaf and unlabelled junctions, reduced to canonical codes.
pub fn brute_force(k: usize) -> BTreeSet<String> {
    let mut codes = BTreeSet::new();
    for m in 2..=2 * k {
        for leaf in [false, true] {
            let fixed = k + leaf as usize;
            if fixed > m {
                continue;
            }
            let roles: Vec<NodeRole> = (0..m)
                .map(|v| match v {
                    _ if v < k => NodeRole::Dirichlet { pin: v },
                    _ if v == k && leaf => NodeRole::Neumann,
                    _ => NodeRole::Kirchhoff,
                })
                .collect();
            let mut seq = vec![0; m - 2];
            loop {
                // degree in the tree is one plus the count in the sequence
                let mut count = vec![0; m];
                for &s in &seq {
                    count[s] += 1;
                }
                let ok = roles.iter().enumerate().all(|(v, r)| match r {
                    NodeRole::Neumann => count[v] == 0,
                    NodeRole::Kirchhoff => count[v] >= 2,
                    NodeRole::Dirichlet { .. } => true,
                });
                if ok {
                    let t = Topology::new(roles.clone(), prufer_edges(&seq, m))
                        .expect("filtered tree is a valid topology");
                    codes.insert(t.code().to_string());
                }
                // odometer step; stop after wrapping around
                let Some(i) = seq.iter().rposition(|&s| s + 1 < m) else {
                    break;
                };
                seq[i] += 1;
                seq[i + 1..].iter_mut().for_each(|s| *s = 0);
            }
        }
    }
    codes
}

/// Tree on `seq.len() + 2` vertices whose first `k` vertices are pins.
pub fn tree_from_prufer(k: usize, seq: &[usize], lengths: &[f64]) -> MetricGraph {
    let m = seq.len() + 2;
    let roles: Vec<VertexRole> = (0..m)
        .map(|v| if v < k { VertexRole::Dirichlet { pin: v } } else { VertexRole::Free })
        .collect();
    let edges: Vec<(usize, usize, f64)> = prufer_edges(seq, m)
        .into_iter()
        .zip(lengths)
        .map(|((a, b), &l)| (a, b, l))
        .collect();
    MetricGraph::from_parts(&roles, &edges)
}

/// A random valid tree with at most four pins and at most `2k` vertices.
pub fn random_tree<R: Rng>(rng: &mut R) -> MetricGraph {
    loop {
        let k = rng.random_range(1..=4);
        let free = rng.random_range(usize::from(k == 1)..=k);
        let m = k + free;
        let seq: Vec<usize> = (0..m - 2).map(|_| rng.random_range(0..m)).collect();
        let lengths: Vec<f64> = (0..m - 1).map(|_| rng.random_range(0.05..2.0)).collect();
        let g = tree_from_prufer(k, &seq, &lengths);
        if validate(&g).is_ok() {
            return g;
        }
    }
}

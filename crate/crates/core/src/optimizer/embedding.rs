//! Deciding whether a placed tree can be drawn without self-intersections.
//!
//! Edges whose length equals the distance between their endpoints are drawn
//! as straight segments. Longer edges are drawn as arcs bulging off their
//! chord, which is possible in the plane or higher when the chord is clear
//! of everything else. The free leaf is pointed in the clearest of a fixed
//! set of directions. The test is conservative: anything it cannot certify
//! is reported as an immersion only.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::feasibility::distance;
use crate::topology::Topology;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Embeddability {
    Embeddable,
    ImmersionOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeShape {
    /// A straight segment between the endpoints.
    Taut,
    /// A curve longer than the chord.
    Slack,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Realization {
    pub embeddability: Embeddability,
    pub positions: Vec<Vec<f64>>,
    pub shapes: Vec<EdgeShape>,
    pub issues: Vec<String>,
}

const LEAF_DIRECTIONS: usize = 72;

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn point_segment_distance(p: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let ab = sub(b, a);
    let len2 = dot(&ab, &ab);
    let t = if len2 == 0.0 {
        0.0
    } else {
        (dot(&sub(p, a), &ab) / len2).clamp(0.0, 1.0)
    };
    let q: Vec<f64> = a.iter().zip(&ab).map(|(x, d)| x + t * d).collect();
    distance(p, &q)
}

/// Smallest distance between two segments in any dimension.
pub(crate) fn segment_distance(p0: &[f64], p1: &[f64], q0: &[f64], q1: &[f64]) -> f64 {
    let u = sub(p1, p0);
    let v = sub(q1, q0);
    let w = sub(p0, q0);
    let (a, b, c, d, e) = (dot(&u, &u), dot(&u, &v), dot(&v, &v), dot(&u, &w), dot(&v, &w));
    let denom = a * c - b * b;
    let mut best = point_segment_distance(p0, q0, q1)
        .min(point_segment_distance(p1, q0, q1))
        .min(point_segment_distance(q0, p0, p1))
        .min(point_segment_distance(q1, p0, p1));
    if denom > 1e-14 * a * c {
        let s = (b * e - c * d) / denom;
        let t = (a * e - b * d) / denom;
        if (0.0..=1.0).contains(&s) && (0.0..=1.0).contains(&t) {
            let ps: Vec<f64> = p0.iter().zip(&u).map(|(x, y)| x + s * y).collect();
            let qt: Vec<f64> = q0.iter().zip(&v).map(|(x, y)| x + t * y).collect();
            best = best.min(distance(&ps, &qt));
        }
    }
    best
}

/// Two segments from a common point overlap iff they leave it in the same
/// direction.
fn same_direction(from: &[f64], a: &[f64], b: &[f64]) -> bool {
    let (u, v) = (sub(a, from), sub(b, from));
    let (nu, nv) = (dot(&u, &u).sqrt(), dot(&v, &v).sqrt());
    nu == 0.0 || nv == 0.0 || dot(&u, &v) >= (1.0 - 1e-12) * nu * nv
}

#[derive(Clone)]
struct Drawn {
    ends: (usize, usize),
    from: Vec<f64>,
    to: Vec<f64>,
}

/// Why drawing `s` alongside everything in `drawn` fails, if it does.
fn conflict(s: &Drawn, drawn: &[Drawn], positions: &[Vec<f64>], skip: Option<usize>, tol: f64) -> Option<String> {
    for (v, p) in positions.iter().enumerate() {
        if Some(v) != skip && v != s.ends.0 && v != s.ends.1 && point_segment_distance(p, &s.from, &s.to) <= tol {
            return Some(format!("vertex {v} touches edge {}-{}", s.ends.0, s.ends.1));
        }
    }
    for o in drawn {
        let shared = [s.ends.0, s.ends.1]
            .into_iter()
            .find(|&x| x == o.ends.0 || x == o.ends.1);
        let clash = match shared {
            Some(x) => {
                let (mine, theirs) = (
                    if x == s.ends.0 { &s.to } else { &s.from },
                    if x == o.ends.0 { &o.to } else { &o.from },
                );
                same_direction(&positions[x], mine, theirs)
            }
            None => segment_distance(&s.from, &s.to, &o.from, &o.to) <= tol,
        };
        if clash {
            return Some(format!(
                "edges {}-{} and {}-{} intersect",
                s.ends.0, s.ends.1, o.ends.0, o.ends.1
            ));
        }
    }
    None
}

fn clearance(s: &Drawn, drawn: &[Drawn], positions: &[Vec<f64>], skip: Option<usize>) -> f64 {
    let mut c = f64::INFINITY;
    for (v, p) in positions.iter().enumerate() {
        if Some(v) != skip && v != s.ends.0 && v != s.ends.1 {
            c = c.min(point_segment_distance(p, &s.from, &s.to));
        }
    }
    for o in drawn {
        if ![o.ends.0, o.ends.1].contains(&s.ends.0) && ![o.ends.0, o.ends.1].contains(&s.ends.1) {
            c = c.min(segment_distance(&s.from, &s.to, &o.from, &o.to));
        }
    }
    c
}

/// Classifies the placement of `t` with `lengths`. Positions of the free
/// leaf are ignored and chosen here.
pub fn realize(t: &Topology, lengths: &[f64], positions: &[Vec<f64>]) -> Realization {
    let total: f64 = lengths.iter().sum();
    let taut_tol = 1e-7 * (1.0 + total);
    let tol = 1e-9 * (1.0 + total);
    let dim = positions.first().map_or(0, Vec::len);
    let leaf = t.neumann_vertex();
    let mut positions = positions.to_vec();
    let mut issues = Vec::new();
    let mut shapes = vec![EdgeShape::Taut; t.edge_count()];

    for a in 0..positions.len() {
        for b in a + 1..positions.len() {
            if Some(a) != leaf && Some(b) != leaf && distance(&positions[a], &positions[b]) <= tol {
                issues.push(format!("vertices {a} and {b} coincide"));
            }
        }
    }

    let mut drawn: Vec<Drawn> = Vec::new();
    let mut chords: Vec<Drawn> = Vec::new();
    let mut leaf_edge = None;
    for (e, (&(a, b), &l)) in t.edges().iter().zip(lengths).enumerate() {
        if Some(a) == leaf || Some(b) == leaf {
            leaf_edge = Some(e);
            continue;
        }
        let seg = Drawn {
            ends: (a, b),
            from: positions[a].clone(),
            to: positions[b].clone(),
        };
        if l - distance(&positions[a], &positions[b]) <= taut_tol {
            drawn.push(seg);
        } else {
            shapes[e] = EdgeShape::Slack;
            chords.push(seg);
        }
    }
    for (i, s) in drawn.iter().enumerate() {
        if let Some(msg) = conflict(s, &drawn[..i], &positions, leaf, tol) {
            issues.push(msg);
        }
    }
    if !chords.is_empty() && dim < 2 {
        issues.push("slack edge cannot leave the line".into());
    }
    for (i, c) in chords.iter().enumerate() {
        let mut against = drawn.clone();
        against.extend_from_slice(&chords[..i]);
        if let Some(msg) = conflict(c, &against, &positions, leaf, tol) {
            issues.push(format!("slack chord blocked: {msg}"));
        }
    }

    if let (Some(v), Some(e)) = (leaf, leaf_edge) {
        let (a, b) = t.edges()[e];
        let hub = if a == v { b } else { a };
        let l = lengths[e];
        let directions: Vec<Vec<f64>> = if dim == 0 {
            Vec::new()
        } else if dim == 1 {
            vec![vec![1.0], vec![-1.0]]
        } else {
            (0..LEAF_DIRECTIONS)
                .map(|i| {
                    let theta = 2.0 * PI * i as f64 / LEAF_DIRECTIONS as f64;
                    let mut u = vec![0.0; dim];
                    u[0] = theta.cos();
                    u[1] = theta.sin();
                    u
                })
                .collect()
        };
        let everything = [drawn.clone(), chords.clone()].concat();
        let try_reach = |reach: f64, everything: &[Drawn]| -> Option<(f64, Vec<f64>)> {
            let mut best: Option<(f64, Vec<f64>)> = None;
            for u in &directions {
                let tip: Vec<f64> = positions[hub].iter().zip(u).map(|(p, d)| p + reach * d).collect();
                let s = Drawn {
                    ends: (hub, v),
                    from: positions[hub].clone(),
                    to: tip.clone(),
                };
                if conflict(&s, everything, &positions, Some(v), tol).is_none() {
                    let c = clearance(&s, everything, &positions, Some(v));
                    if best.as_ref().is_none_or(|(bc, _)| c > *bc) {
                        best = Some((c, tip));
                    }
                }
            }
            best
        };
        if let Some((_, tip)) = try_reach(l, &everything) {
            positions[v] = tip;
        } else if let Some((_, tip)) = (dim >= 2).then(|| try_reach(1e-3 * l, &everything)).flatten() {
            // a curve of any length fits in a clear cone at the hub
            shapes[e] = EdgeShape::Slack;
            positions[v] = tip;
        } else {
            issues.push(format!("no room for the free leaf at vertex {hub}"));
            positions[v] = positions[hub].clone();
        }
    }

    Realization {
        embeddability: if issues.is_empty() {
            Embeddability::Embeddable
        } else {
            Embeddability::ImmersionOnly
        },
        positions,
        shapes,
        issues,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distances_between_segments() {
        let d = segment_distance(&[0.0, 0.0], &[1.0, 0.0], &[0.5, -1.0], &[0.5, 1.0]);
        assert_eq!(d, 0.0);
        let d = segment_distance(&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0]);
        assert!((d - 1.0).abs() < 1e-15);
        let d = segment_distance(&[0.0, 0.0, 0.0], &[1.0, 0.0, 0.0], &[0.5, 1.0, 1.0], &[0.5, -1.0, 1.0]);
        assert!((d - 1.0).abs() < 1e-15);
        let d = segment_distance(&[0.0], &[1.0], &[2.0], &[3.0]);
        assert!((d - 1.0).abs() < 1e-15);
    }

    #[test]
    fn t_graph_is_embeddable() {
        let t = Topology::from_code("d0(k(d1()n()))").unwrap();
        let pos = vec![vec![-0.5, 0.0], vec![0.5, 0.0], vec![0.0, 0.0], vec![0.0, 0.0]];
        let r = realize(&t, &[0.5, 0.5, 1.0], &pos);
        assert_eq!(r.embeddability, Embeddability::Embeddable, "{:?}", r.issues);
        // the leaf points away from the taut segments
        assert!((r.positions[3][1].abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn collinear_star_through_a_pin_is_not_embeddable() {
        let t = Topology::from_code("d0(k(d1()d2()))").unwrap();
        let pos = vec![vec![-1.0, 0.0], vec![1.0, 0.0], vec![12.0, 0.0], vec![0.0, 0.0]];
        let r = realize(&t, &[1.0, 1.0, 12.0], &pos);
        assert_eq!(r.embeddability, Embeddability::ImmersionOnly);
    }

    #[test]
    fn segment_is_embeddable_on_a_line() {
        let t = Topology::from_code("d0(n())").unwrap();
        let r = realize(&t, &[1.0], &[vec![0.0], vec![0.0]]);
        assert_eq!(r.embeddability, Embeddability::Embeddable);
        assert_eq!(r.shapes, vec![EdgeShape::Taut]);
    }

    #[test]
    fn slack_edge_in_the_plane() {
        let t = Topology::from_code("d0(d1())").unwrap();
        let r = realize(&t, &[2.0], &[vec![0.0, 0.0], vec![1.0, 0.0]]);
        assert_eq!(r.embeddability, Embeddability::Embeddable);
        assert_eq!(r.shapes, vec![EdgeShape::Slack]);
        let r = realize(&t, &[2.0], &[vec![0.0], vec![1.0]]);
        assert_eq!(r.embeddability, Embeddability::ImmersionOnly);
    }
}

//! Candidate tree skeletons for graphs spanning `k` pins.
//!
//! A topology is a tree whose vertices are the `k` pinned (Dirichlet)
//! vertices, junctions of degree at least three, and at most one free leaf.
//! Pinned vertices may have any degree. Trees have at most `2k` vertices.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{absorb_degree_two, MetricGraph, Vertex, VertexId, VertexRole};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TopologyError {
    #[error("need at least one pin")]
    NoPins,
    #[error("malformed topology code {0:?}")]
    BadCode(String),
    #[error("not a valid topology: {0}")]
    Invalid(String),
    #[error("expected {expected} lengths, got {got}")]
    LengthCount { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "role", rename_all = "lowercase")]
pub enum NodeRole {
    Dirichlet { pin: usize },
    Kirchhoff,
    Neumann,
}

impl NodeRole {
    fn tag(&self) -> String {
        match self {
            NodeRole::Dirichlet { pin } => format!("d{pin}"),
            NodeRole::Kirchhoff => "k".into(),
            NodeRole::Neumann => "n".into(),
        }
    }
}

/// An unweighted tree skeleton with vertices in canonical order: pins by
/// index, then junctions, then the free leaf if present.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Topology {
    pins: usize,
    roles: Vec<NodeRole>,
    edges: Vec<(usize, usize)>,
    code: String,
}

#[derive(Debug, Clone)]
struct Rooted {
    role: NodeRole,
    children: Vec<Rooted>,
}

impl Rooted {
    fn size(&self) -> usize {
        1 + self.children.iter().map(Rooted::size).sum::<usize>()
    }
}

fn neighbors(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    adj
}

fn rooted_code(v: usize, parent: usize, roles: &[NodeRole], adj: &[Vec<usize>]) -> String {
    let mut kids: Vec<String> = adj[v]
        .iter()
        .filter(|&&w| w != parent)
        .map(|&w| rooted_code(w, v, roles, adj))
        .collect();
    kids.sort();
    format!("{}({})", roles[v].tag(), kids.concat())
}

fn parse(code: &str) -> Result<Rooted, TopologyError> {
    fn node(s: &[u8], pos: &mut usize, code: &str) -> Result<Rooted, TopologyError> {
        let bad = || TopologyError::BadCode(code.to_string());
        let role = match s.get(*pos).ok_or_else(bad)? {
            b'k' => {
                *pos += 1;
                NodeRole::Kirchhoff
            }
            b'n' => {
                *pos += 1;
                NodeRole::Neumann
            }
            b'd' => {
                *pos += 1;
                let start = *pos;
                while s.get(*pos).is_some_and(u8::is_ascii_digit) {
                    *pos += 1;
                }
                let pin = std::str::from_utf8(&s[start..*pos])
                    .ok()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(bad)?;
                NodeRole::Dirichlet { pin }
            }
            _ => return Err(bad()),
        };
        if s.get(*pos) != Some(&b'(') {
            return Err(bad());
        }
        *pos += 1;
        let mut children = Vec::new();
        while s.get(*pos).ok_or_else(bad)? != &b')' {
            children.push(node(s, pos, code)?);
        }
        *pos += 1;
        Ok(Rooted { role, children })
    }
    let bytes = code.as_bytes();
    let mut pos = 0;
    let root = node(bytes, &mut pos, code)?;
    if pos != bytes.len() {
        return Err(TopologyError::BadCode(code.to_string()));
    }
    Ok(root)
}

fn flatten(root: &Rooted) -> (Vec<NodeRole>, Vec<(usize, usize)>) {
    let mut roles = Vec::new();
    let mut edges = Vec::new();
    let mut stack = vec![(root, None)];
    while let Some((t, parent)) = stack.pop() {
        let id = roles.len();
        roles.push(t.role);
        if let Some(p) = parent {
            edges.push((p, id));
        }
        for c in t.children.iter().rev() {
            stack.push((c, Some(id)));
        }
    }
    (roles, edges)
}

impl Topology {
    /// Builds a topology from any labelling of a valid skeleton.
    pub fn new(roles: Vec<NodeRole>, edges: Vec<(usize, usize)>) -> Result<Topology, TopologyError> {
        let invalid = |m: &str| Err(TopologyError::Invalid(m.to_string()));
        let n = roles.len();
        if n < 2 || edges.len() + 1 != n {
            return invalid("a tree with at least one edge is required");
        }
        if edges.iter().any(|&(a, b)| a >= n || b >= n || a == b) {
            return invalid("edge endpoint out of range");
        }
        let adj = neighbors(n, &edges);
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        if seen.contains(&false) {
            return invalid("not connected");
        }
        let pins: BTreeSet<usize> = roles
            .iter()
            .filter_map(|r| match r {
                NodeRole::Dirichlet { pin } => Some(*pin),
                _ => None,
            })
            .collect();
        let k = roles.iter().filter(|r| matches!(r, NodeRole::Dirichlet { .. })).count();
        if k == 0 || pins.len() != k || pins.iter().next_back() != Some(&(k - 1)) {
            return invalid("pins must be exactly 0..k-1");
        }
        if n > 2 * k {
            return invalid("more than 2k vertices");
        }
        let mut leaves = 0;
        for (v, r) in roles.iter().enumerate() {
            match r {
                NodeRole::Kirchhoff if adj[v].len() < 3 => return invalid("junction of degree below 3"),
                NodeRole::Neumann if adj[v].len() != 1 => return invalid("free leaf of degree other than 1"),
                NodeRole::Neumann => leaves += 1,
                _ => {}
            }
        }
        if leaves > 1 {
            return invalid("more than one free leaf");
        }
        let code = (0..n)
            .map(|r| rooted_code(r, usize::MAX, &roles, &adj))
            .min()
            .expect("nonempty");
        let (roles, edges) = flatten(&parse(&code)?);
        // pins first, then junctions in traversal order, then the free leaf
        let mut order: Vec<usize> = (0..roles.len()).collect();
        order.sort_by_key(|&v| match roles[v] {
            NodeRole::Dirichlet { pin } => (0, pin, v),
            NodeRole::Kirchhoff => (1, 0, v),
            NodeRole::Neumann => (2, 0, v),
        });
        let mut relabel = vec![0; roles.len()];
        for (new, &old) in order.iter().enumerate() {
            relabel[old] = new;
        }
        let mut edges: Vec<(usize, usize)> = edges
            .iter()
            .map(|&(a, b)| {
                let (a, b) = (relabel[a], relabel[b]);
                (a.min(b), a.max(b))
            })
            .collect();
        edges.sort_unstable();
        Ok(Topology {
            pins: k,
            roles: order.iter().map(|&v| roles[v]).collect(),
            edges,
            code,
        })
    }

    /// Parses a topology code. Codes need not be canonical.
    pub fn from_code(code: &str) -> Result<Topology, TopologyError> {
        let (roles, edges) = flatten(&parse(code)?);
        Topology::new(roles, edges)
    }

    /// Reads the skeleton of a metric graph after absorbing free vertices of
    /// degree two.
    pub fn from_graph(g: &MetricGraph) -> Result<Topology, TopologyError> {
        let g = absorb_degree_two(g);
        let adj = g.adjacency();
        let roles = g
            .vertices()
            .iter()
            .enumerate()
            .map(|(i, v)| match v.role {
                VertexRole::Dirichlet { pin } => NodeRole::Dirichlet { pin },
                VertexRole::Free if adj[i].len() == 1 => NodeRole::Neumann,
                VertexRole::Free => NodeRole::Kirchhoff,
            })
            .collect();
        let edges = g
            .edges()
            .iter()
            .map(|e| (g.vertex_index(e.u).unwrap(), g.vertex_index(e.v).unwrap()))
            .collect();
        Topology::new(roles, edges)
    }

    /// Like [`Topology::from_graph`], for a graph without free vertices of
    /// degree two, also returning the topology vertex of every graph vertex.
    pub fn identify(g: &MetricGraph) -> Result<(Topology, BTreeMap<VertexId, usize>), TopologyError> {
        let t = Topology::from_graph(g)?;
        if t.vertex_count() != g.vertex_count() {
            return Err(TopologyError::Invalid("free vertex of degree two".to_string()));
        }
        let adj: Vec<Vec<usize>> = g.adjacency().iter().map(|a| a.iter().map(|&(w, _)| w).collect()).collect();
        let roles: Vec<NodeRole> = g
            .vertices()
            .iter()
            .enumerate()
            .map(|(i, v)| match v.role {
                VertexRole::Dirichlet { pin } => NodeRole::Dirichlet { pin },
                VertexRole::Free if adj[i].len() == 1 => NodeRole::Neumann,
                VertexRole::Free => NodeRole::Kirchhoff,
            })
            .collect();
        let t_adj = neighbors(t.vertex_count(), &t.edges);
        let root = roles
            .iter()
            .position(|r| *r == NodeRole::Dirichlet { pin: 0 })
            .expect("validated topology has pin 0");
        let mut map = vec![usize::MAX; roles.len()];
        // pair up children with equal rooted codes, which are isomorphic subtrees
        let mut stack = vec![(root, usize::MAX, 0, usize::MAX)];
        while let Some((v, pv, w, pw)) = stack.pop() {
            map[v] = w;
            let coded = |x: usize, px: usize, roles: &[NodeRole], adj: &[Vec<usize>]| {
                let mut kids: Vec<(String, usize)> = adj[x]
                    .iter()
                    .filter(|&&c| c != px)
                    .map(|&c| (rooted_code(c, x, roles, adj), c))
                    .collect();
                kids.sort();
                kids
            };
            let ours = coded(v, pv, &roles, &adj);
            let theirs = coded(w, pw, &t.roles, &t_adj);
            for ((a, c), (b, d)) in ours.into_iter().zip(theirs) {
                debug_assert_eq!(a, b);
                stack.push((c, v, d, w));
            }
        }
        let map = g.vertices().iter().zip(map).map(|(v, m)| (v.id, m)).collect();
        Ok((t, map))
    }

    pub fn code(&self) -> &str {
        &self.code
    }

    pub fn pin_count(&self) -> usize {
        self.pins
    }

    pub fn roles(&self) -> &[NodeRole] {
        &self.roles
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.roles.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn neumann_vertex(&self) -> Option<usize> {
        self.roles.iter().position(|r| *r == NodeRole::Neumann)
    }

    pub fn has_neumann(&self) -> bool {
        self.neumann_vertex().is_some()
    }

    pub fn kirchhoff_count(&self) -> usize {
        self.roles.iter().filter(|r| **r == NodeRole::Kirchhoff).count()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    /// The metric graph with the given lengths, in edge order. Vertex and
    /// edge ids equal their positions.
    pub fn to_graph(&self, lengths: &[f64]) -> Result<MetricGraph, TopologyError> {
        if lengths.len() != self.edges.len() {
            return Err(TopologyError::LengthCount {
                expected: self.edges.len(),
                got: lengths.len(),
            });
        }
        let roles: Vec<VertexRole> = self
            .roles
            .iter()
            .map(|r| match *r {
                NodeRole::Dirichlet { pin } => VertexRole::Dirichlet { pin },
                _ => VertexRole::Free,
            })
            .collect();
        let edges: Vec<(usize, usize, f64)> = self
            .edges
            .iter()
            .zip(lengths)
            .map(|(&(a, b), &l)| (a, b, l))
            .collect();
        Ok(MetricGraph::from_parts(&roles, &edges))
    }

    /// Role of graph vertex `v` built by [`Topology::to_graph`].
    pub fn vertex_of(&self, v: &Vertex) -> Option<NodeRole> {
        self.roles.get(v.id).copied()
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.code)
    }
}

pub fn canonical_code(t: &Topology) -> &str {
    t.code()
}

/// Set partitions of `items` into nonempty blocks, each block listed once.
fn partitions<T: Copy>(items: &[T]) -> Vec<Vec<Vec<T>>> {
    let Some((&first, rest)) = items.split_first() else {
        return vec![Vec::new()];
    };
    let mut out = Vec::new();
    for p in partitions(rest) {
        for i in 0..p.len() {
            let mut q = p.clone();
            q[i].insert(0, first);
            out.push(q);
        }
        let mut q = p;
        q.insert(0, vec![first]);
        out.push(q);
    }
    out
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Item {
    Pin(usize),
    Leaf,
}

/// Every rooted subtree hanging below a parent whose pinned vertices and
/// free leaf are exactly `items`.
fn subtrees(items: &[Item], budget: usize) -> Vec<Rooted> {
    if budget == 0 {
        return Vec::new();
    }
    let pins: Vec<usize> = items
        .iter()
        .filter_map(|i| match i {
            Item::Pin(p) => Some(*p),
            Item::Leaf => None,
        })
        .collect();
    if pins.is_empty() {
        return match items {
            [Item::Leaf] => vec![Rooted {
                role: NodeRole::Neumann,
                children: Vec::new(),
            }],
            _ => Vec::new(),
        };
    }
    let mut out = Vec::new();
    for &p in &pins {
        let rest: Vec<Item> = items.iter().copied().filter(|&i| i != Item::Pin(p)).collect();
        out.extend(forests(&rest, budget - 1, 0).into_iter().map(|children| Rooted {
            role: NodeRole::Dirichlet { pin: p },
            children,
        }));
    }
    out.extend(forests(items, budget - 1, 2).into_iter().map(|children| Rooted {
        role: NodeRole::Kirchhoff,
        children,
    }));
    out
}

/// Every forest of at least `min_trees` subtrees covering `items`.
fn forests(items: &[Item], budget: usize, min_trees: usize) -> Vec<Vec<Rooted>> {
    let mut out = Vec::new();
    for blocks in partitions(items) {
        if blocks.len() < min_trees {
            continue;
        }
        let mut acc: Vec<Vec<Rooted>> = vec![Vec::new()];
        for block in &blocks {
            let options = subtrees(block, budget);
            let mut next = Vec::new();
            for partial in &acc {
                let used: usize = partial.iter().map(Rooted::size).sum();
                for o in &options {
                    if used + o.size() <= budget {
                        let mut p = partial.clone();
                        p.push(o.clone());
                        next.push(p);
                    }
                }
            }
            acc = next;
        }
        out.extend(acc);
    }
    out
}

/// All topologies for `k` pins in ascending code order.
pub fn enumerate_topologies(k: usize) -> Result<Vec<Topology>, TopologyError> {
    if k == 0 {
        return Err(TopologyError::NoPins);
    }
    let mut found = BTreeMap::new();
    for with_leaf in [false, true] {
        let mut items: Vec<Item> = (1..k).map(Item::Pin).collect();
        if with_leaf {
            items.push(Item::Leaf);
        }
        for children in forests(&items, 2 * k - 1, 1) {
            let root = Rooted {
                role: NodeRole::Dirichlet { pin: 0 },
                children,
            };
            let (roles, edges) = flatten(&root);
            if let Ok(t) = Topology::new(roles, edges) {
                found.insert(t.code.clone(), t);
            }
        }
    }
    Ok(found.into_values().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identify_maps_graph_vertices_onto_the_topology() {
        let g = MetricGraph::from_parts(
            &[VertexRole::Free, VertexRole::Dirichlet { pin: 1 }, VertexRole::Free, VertexRole::Dirichlet { pin: 0 }],
            &[(0, 1, 0.3), (2, 0, 0.7), (3, 0, 0.5)],
        );
        let (t, map) = Topology::identify(&g).unwrap();
        assert_eq!(t.code(), "d0(k(d1()n()))");
        for e in g.edges() {
            let (a, b) = (map[&e.u], map[&e.v]);
            assert!(t.edges().contains(&(a.min(b), a.max(b))));
        }
        assert_eq!(map[&3], 0);
        assert_eq!(map[&1], 1);
        assert_eq!(t.roles()[map[&2]], NodeRole::Neumann);
    }

    #[test]
    fn small_counts() {
        assert!(enumerate_topologies(0).is_err());
        let one = enumerate_topologies(1).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].code(), "d0(n())");
        let two = enumerate_topologies(2).unwrap();
        let codes: Vec<&str> = two.iter().map(Topology::code).collect();
        assert_eq!(codes, vec!["d0(d1())", "d0(d1()n())", "d0(d1(n()))", "d0(k(d1()n()))"]);
    }

    #[test]
    fn codes_roundtrip() {
        for k in 1..=4 {
            for t in enumerate_topologies(k).unwrap() {
                assert_eq!(Topology::from_code(t.code()).unwrap(), t);
            }
        }
    }

    #[test]
    fn relabelled_star_has_one_code() {
        let a = Topology::new(
            vec![
                NodeRole::Kirchhoff,
                NodeRole::Dirichlet { pin: 2 },
                NodeRole::Dirichlet { pin: 0 },
                NodeRole::Dirichlet { pin: 1 },
            ],
            vec![(0, 1), (0, 3), (2, 0)],
        )
        .unwrap();
        let b = Topology::new(
            vec![
                NodeRole::Dirichlet { pin: 1 },
                NodeRole::Dirichlet { pin: 0 },
                NodeRole::Kirchhoff,
                NodeRole::Dirichlet { pin: 2 },
            ],
            vec![(2, 3), (1, 2), (2, 0)],
        )
        .unwrap();
        assert_eq!(a.code(), b.code());
        assert_eq!(a, b);
    }

    #[test]
    fn star_differs_from_t_with_pendant() {
        let star = Topology::from_code("d0(k(d1()d2()))").unwrap();
        let t = Topology::from_code("d0(k(d1()n()d2()))").unwrap();
        assert_ne!(star.code(), t.code());
    }

    #[test]
    fn pins_are_not_interchangeable() {
        // d0 - d1 - d2 against d1 - d0 - d2
        let a = Topology::new(
            vec![NodeRole::Dirichlet { pin: 0 }, NodeRole::Dirichlet { pin: 1 }, NodeRole::Dirichlet { pin: 2 }],
            vec![(0, 1), (1, 2)],
        )
        .unwrap();
        let b = Topology::new(
            vec![NodeRole::Dirichlet { pin: 0 }, NodeRole::Dirichlet { pin: 1 }, NodeRole::Dirichlet { pin: 2 }],
            vec![(1, 0), (0, 2)],
        )
        .unwrap();
        assert_ne!(a.code(), b.code());
    }

    #[test]
    fn invalid_skeletons_are_rejected() {
        let bad_junction = Topology::new(
            vec![NodeRole::Dirichlet { pin: 0 }, NodeRole::Kirchhoff, NodeRole::Dirichlet { pin: 1 }],
            vec![(0, 1), (1, 2)],
        );
        assert!(bad_junction.is_err());
        assert!(Topology::from_code("d0(n()n())").is_err());
        assert!(Topology::from_code("d0(d1()").is_err());
        assert!(Topology::from_code("x()").is_err());
    }

    #[test]
    fn k3_contains_the_worked_shapes() {
        let codes: BTreeSet<String> = enumerate_topologies(3)
            .unwrap()
            .into_iter()
            .map(|t| t.code().to_string())
            .collect();
        for t in [
            "d0(k(d1()d2()))",
            "d0(k(d1()d2()n()))",
            "d0(k(d1()k(d2()n())))",
            "d0(d1(d2()))",
        ] {
            let c = Topology::from_code(t).unwrap();
            assert!(codes.contains(c.code()), "{t}");
        }
    }

    #[test]
    fn graph_roundtrip() {
        let t = Topology::from_code("d0(k(d1()n()))").unwrap();
        let g = t.to_graph(&[0.5, 0.5, 1.0]).unwrap();
        assert_eq!(Topology::from_graph(&g).unwrap(), t);
        assert!(t.to_graph(&[1.0]).is_err());
    }
}

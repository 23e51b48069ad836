//! Metric graphs: vertices with boundary roles, edges with positive lengths.
//!
//! Values are immutable once built; every transformation returns a new graph.
//! Vertex and edge ids are opaque integers that survive transformations where
//! the underlying object survives.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type VertexId = usize;
pub type EdgeId = usize;

/// Smallest edge length a validated graph may carry. Shorter edges are
/// removed with [`contract_short_edges`] before solving.
pub const MIN_EDGE_LENGTH: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("unknown vertex id {0}")]
    UnknownVertex(VertexId),
    #[error("unknown edge id {0}")]
    UnknownEdge(EdgeId),
    #[error("vertex {to} is unreachable from vertex {from}")]
    Unreachable { from: VertexId, to: VertexId },
    #[error("contraction would merge distinct Dirichlet vertices {0} and {1}")]
    PinCollision(VertexId, VertexId),
    #[error("subdivision point {t} is outside (0, {length}) on edge {edge}")]
    SubdivisionOutOfRange { edge: EdgeId, t: f64, length: f64 },
    #[error("edge {0} has a negative or non-finite length")]
    InvalidLength(EdgeId),
    #[error("duplicate vertex id {0}")]
    DuplicateVertex(VertexId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "role", rename_all = "lowercase")]
pub enum VertexRole {
    Dirichlet { pin: usize },
    Free,
}

impl VertexRole {
    pub fn is_dirichlet(&self) -> bool {
        matches!(self, VertexRole::Dirichlet { .. })
    }

    pub fn pin(&self) -> Option<usize> {
        match *self {
            VertexRole::Dirichlet { pin } => Some(pin),
            VertexRole::Free => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: VertexId,
    #[serde(flatten)]
    pub role: VertexRole,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    pub u: VertexId,
    pub v: VertexId,
    pub length: f64,
}

impl Edge {
    /// The endpoint opposite to `w`, if `w` is an endpoint.
    pub fn other(&self, w: VertexId) -> Option<VertexId> {
        if w == self.u {
            Some(self.v)
        } else if w == self.v {
            Some(self.u)
        } else {
            None
        }
    }
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
}

/// A combinatorial graph whose edges carry lengths.
///
/// Construction never fails; admissibility is reported by [`validate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "GraphRepr", into = "GraphRepr")]
pub struct MetricGraph {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    index: HashMap<VertexId, usize>,
}

impl From<GraphRepr> for MetricGraph {
    fn from(r: GraphRepr) -> Self {
        MetricGraph::new(r.vertices, r.edges)
    }
}

impl From<MetricGraph> for GraphRepr {
    fn from(g: MetricGraph) -> Self {
        GraphRepr {
            vertices: g.vertices,
            edges: g.edges,
        }
    }
}

impl MetricGraph {
    pub fn new(vertices: Vec<Vertex>, edges: Vec<Edge>) -> Self {
        let mut index = HashMap::with_capacity(vertices.len());
        for (i, v) in vertices.iter().enumerate() {
            index.entry(v.id).or_insert(i);
        }
        MetricGraph {
            vertices,
            edges,
            index,
        }
    }

    /// Convenience constructor: vertex `i` gets id `i`, edge `j` gets id `j`.
    pub fn from_parts(roles: &[VertexRole], edges: &[(VertexId, VertexId, f64)]) -> Self {
        let vertices = roles
            .iter()
            .enumerate()
            .map(|(id, &role)| Vertex { id, role })
            .collect();
        let edges = edges
            .iter()
            .enumerate()
            .map(|(id, &(u, v, length))| Edge { id, u, v, length })
            .collect();
        MetricGraph::new(vertices, edges)
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("graph serialization is infallible")
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Position of vertex `id` in [`MetricGraph::vertices`].
    pub fn vertex_index(&self, id: VertexId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    pub fn vertex(&self, id: VertexId) -> Option<&Vertex> {
        self.vertex_index(id).map(|i| &self.vertices[i])
    }

    pub fn role(&self, id: VertexId) -> Option<VertexRole> {
        self.vertex(id).map(|v| v.role)
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge> {
        self.edges.iter().find(|e| e.id == id)
    }

    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).sum()
    }

    pub fn dirichlet_count(&self) -> usize {
        self.vertices.iter().filter(|v| v.role.is_dirichlet()).count()
    }

    /// Incident (neighbor index, edge index) pairs per vertex index.
    /// Edges with unknown endpoints are skipped.
    pub fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for (k, e) in self.edges.iter().enumerate() {
            if let (Some(a), Some(b)) = (self.vertex_index(e.u), self.vertex_index(e.v)) {
                adj[a].push((b, k));
                if a != b {
                    adj[b].push((a, k));
                }
            }
        }
        adj
    }

    pub fn degree(&self, id: VertexId) -> Option<usize> {
        self.vertex(id)?;
        Some(self.edges.iter().filter(|e| e.u == id || e.v == id).count())
    }

    fn is_connected(&self) -> bool {
        if self.vertices.is_empty() {
            return false;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; self.vertices.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(a) = stack.pop() {
            for &(b, _) in &adj[a] {
                if !seen[b] {
                    seen[b] = true;
                    stack.push(b);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Connected with `|E| = |V| - 1`.
    pub fn is_tree(&self) -> bool {
        self.edges.len() + 1 == self.vertices.len() && self.is_connected()
    }

    /// Every length multiplied by `s`.
    pub fn scaled(&self, s: f64) -> MetricGraph {
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                length: e.length * s,
                ..*e
            })
            .collect();
        MetricGraph::new(self.vertices.clone(), edges)
    }

    /// Same graph with the role of `id` replaced.
    pub fn with_role(&self, id: VertexId, role: VertexRole) -> Result<MetricGraph, GraphError> {
        let i = self.vertex_index(id).ok_or(GraphError::UnknownVertex(id))?;
        let mut vertices = self.vertices.clone();
        vertices[i].role = role;
        Ok(MetricGraph::new(vertices, self.edges.clone()))
    }

    fn next_vertex_id(&self) -> VertexId {
        self.vertices.iter().map(|v| v.id + 1).max().unwrap_or(0)
    }

    fn next_edge_id(&self) -> EdgeId {
        self.edges.iter().map(|e| e.id + 1).max().unwrap_or(0)
    }
}

/// Everything that keeps a graph from being admissible for the solvers.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GraphDiagnostics {
    pub connected: bool,
    /// Zero, negative or non-finite lengths.
    pub nonpositive_lengths: Vec<EdgeId>,
    /// Positive lengths below [`MIN_EDGE_LENGTH`].
    pub short_lengths: Vec<EdgeId>,
    pub duplicate_edges: Vec<EdgeId>,
    pub self_loops: Vec<EdgeId>,
    pub isolated_vertices: Vec<VertexId>,
    /// Edges naming a vertex id that does not exist.
    pub dangling_edges: Vec<EdgeId>,
    pub duplicate_vertex_ids: Vec<VertexId>,
    pub duplicate_pins: Vec<usize>,
}

impl GraphDiagnostics {
    pub fn is_ok(&self) -> bool {
        self.connected
            && self.nonpositive_lengths.is_empty()
            && self.short_lengths.is_empty()
            && self.duplicate_edges.is_empty()
            && self.self_loops.is_empty()
            && self.isolated_vertices.is_empty()
            && self.dangling_edges.is_empty()
            && self.duplicate_vertex_ids.is_empty()
            && self.duplicate_pins.is_empty()
    }
}

pub fn validate(g: &MetricGraph) -> GraphDiagnostics {
    let mut d = GraphDiagnostics {
        connected: g.is_connected(),
        ..Default::default()
    };

    let mut seen_ids = BTreeMap::new();
    for v in g.vertices() {
        *seen_ids.entry(v.id).or_insert(0usize) += 1;
    }
    d.duplicate_vertex_ids = seen_ids
        .iter()
        .filter(|(_, &c)| c > 1)
        .map(|(&id, _)| id)
        .collect();

    let mut pins = BTreeMap::new();
    for v in g.vertices() {
        if let Some(p) = v.role.pin() {
            *pins.entry(p).or_insert(0usize) += 1;
        }
    }
    d.duplicate_pins = pins
        .iter()
        .filter(|(_, &c)| c > 1)
        .map(|(&p, _)| p)
        .collect();

    let mut pairs: HashMap<(VertexId, VertexId), EdgeId> = HashMap::new();
    let mut degree: HashMap<VertexId, usize> = HashMap::new();
    for e in g.edges() {
        if !(e.length.is_finite() && e.length > 0.0) {
            d.nonpositive_lengths.push(e.id);
        } else if e.length < MIN_EDGE_LENGTH {
            d.short_lengths.push(e.id);
        }
        if g.vertex(e.u).is_none() || g.vertex(e.v).is_none() {
            d.dangling_edges.push(e.id);
            continue;
        }
        if e.u == e.v {
            d.self_loops.push(e.id);
        }
        let key = (e.u.min(e.v), e.u.max(e.v));
        if pairs.insert(key, e.id).is_some() {
            d.duplicate_edges.push(e.id);
        }
        *degree.entry(e.u).or_default() += 1;
        *degree.entry(e.v).or_default() += 1;
    }

    if g.vertex_count() > 1 {
        d.isolated_vertices = g
            .vertices()
            .iter()
            .filter(|v| !degree.contains_key(&v.id))
            .map(|v| v.id)
            .collect();
    }
    d
}

pub fn total_length(g: &MetricGraph) -> f64 {
    g.total_length()
}

#[derive(Clone, Copy, PartialEq)]
struct HeapEntry(f64, usize);

impl Eq for HeapEntry {}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on distance
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

/// Shortest-path distances (by edge length) from `source` to every vertex,
/// indexed like [`MetricGraph::vertices`]. Unreachable vertices get `inf`.
pub fn distances_from(g: &MetricGraph, source: VertexId) -> Result<Vec<f64>, GraphError> {
    let s = g
        .vertex_index(source)
        .ok_or(GraphError::UnknownVertex(source))?;
    let adj = g.adjacency();
    let mut dist = vec![f64::INFINITY; g.vertex_count()];
    let mut heap = BinaryHeap::new();
    dist[s] = 0.0;
    heap.push(HeapEntry(0.0, s));
    while let Some(HeapEntry(d, a)) = heap.pop() {
        if d > dist[a] {
            continue;
        }
        for &(b, k) in &adj[a] {
            let nd = d + g.edges()[k].length;
            if nd < dist[b] {
                dist[b] = nd;
                heap.push(HeapEntry(nd, b));
            }
        }
    }
    Ok(dist)
}

pub fn graph_distance(g: &MetricGraph, u: VertexId, v: VertexId) -> Result<f64, GraphError> {
    let t = g.vertex_index(v).ok_or(GraphError::UnknownVertex(v))?;
    let d = distances_from(g, u)?[t];
    if d.is_finite() {
        Ok(d)
    } else {
        Err(GraphError::Unreachable { from: u, to: v })
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.parent[hi] = lo;
        }
    }
}

/// Merges the endpoints of every edge with `length <= eps`.
///
/// A merged vertex is Dirichlet if any of its constituents was. Parallel
/// edges created by the merge are each split at their midpoint by a new free
/// vertex; a loop becomes a triangle through two new free vertices.
pub fn contract_short_edges(g: &MetricGraph, eps: f64) -> Result<MetricGraph, GraphError> {
    for e in g.edges() {
        if !(e.length.is_finite() && e.length >= 0.0) {
            return Err(GraphError::InvalidLength(e.id));
        }
        for w in [e.u, e.v] {
            if g.vertex(w).is_none() {
                return Err(GraphError::UnknownVertex(w));
            }
        }
    }

    let n = g.vertex_count();
    let mut uf = UnionFind::new(n);
    for e in g.edges().iter().filter(|e| e.length <= eps) {
        let a = g.vertex_index(e.u).unwrap();
        let b = g.vertex_index(e.v).unwrap();
        uf.union(a, b);
    }

    // Representative vertex for each class: its Dirichlet member, or the
    // member with the smallest id.
    let mut rep: HashMap<usize, Vertex> = HashMap::new();
    for (i, v) in g.vertices().iter().enumerate() {
        let root = uf.find(i);
        match rep.get_mut(&root) {
            None => {
                rep.insert(root, *v);
            }
            Some(r) => match (r.role.is_dirichlet(), v.role.is_dirichlet()) {
                (true, true) => return Err(GraphError::PinCollision(r.id, v.id)),
                (false, true) => *r = *v,
                (false, false) if v.id < r.id => *r = *v,
                _ => {}
            },
        }
    }

    let mut vertices: Vec<Vertex> = Vec::new();
    for i in 0..n {
        if uf.find(i) == i {
            vertices.push(rep[&i]);
        }
    }
    let class_id = |uf: &mut UnionFind, id: VertexId| rep[&uf.find(g.vertex_index(id).unwrap())].id;

    let survivors: Vec<(Edge, VertexId, VertexId)> = g
        .edges()
        .iter()
        .filter(|e| e.length > eps)
        .map(|e| (*e, class_id(&mut uf, e.u), class_id(&mut uf, e.v)))
        .collect();
    let mut multiplicity: HashMap<(VertexId, VertexId), usize> = HashMap::new();
    for &(_, a, b) in &survivors {
        *multiplicity.entry((a.min(b), a.max(b))).or_default() += 1;
    }

    let mut next_v = g.next_vertex_id();
    let mut next_e = g.next_edge_id();
    let mut edges = Vec::with_capacity(survivors.len());
    for (e, a, b) in survivors {
        if a == b {
            let (p, q) = (next_v, next_v + 1);
            next_v += 2;
            for id in [p, q] {
                vertices.push(Vertex {
                    id,
                    role: VertexRole::Free,
                });
            }
            let third = e.length / 3.0;
            edges.push(Edge { id: e.id, u: a, v: p, length: third });
            edges.push(Edge { id: next_e, u: p, v: q, length: third });
            edges.push(Edge { id: next_e + 1, u: q, v: a, length: e.length - 2.0 * third });
            next_e += 2;
        } else if multiplicity[&(a.min(b), a.max(b))] > 1 {
            let mid = next_v;
            next_v += 1;
            vertices.push(Vertex {
                id: mid,
                role: VertexRole::Free,
            });
            let half = 0.5 * e.length;
            edges.push(Edge { id: e.id, u: a, v: mid, length: half });
            edges.push(Edge { id: next_e, u: mid, v: b, length: e.length - half });
            next_e += 1;
        } else {
            edges.push(Edge { u: a, v: b, ..e });
        }
    }
    Ok(MetricGraph::new(vertices, edges))
}

/// Splits edge `e` at distance `t` from its `u` endpoint with a new free
/// vertex. The piece adjacent to `u` keeps the edge id.
pub fn subdivide_edge(g: &MetricGraph, e: EdgeId, t: f64) -> Result<MetricGraph, GraphError> {
    let k = g
        .edges()
        .iter()
        .position(|x| x.id == e)
        .ok_or(GraphError::UnknownEdge(e))?;
    let old = g.edges()[k];
    if !(t > 0.0 && t < old.length) {
        return Err(GraphError::SubdivisionOutOfRange {
            edge: e,
            t,
            length: old.length,
        });
    }
    let mid = g.next_vertex_id();
    let mut vertices = g.vertices().to_vec();
    vertices.push(Vertex {
        id: mid,
        role: VertexRole::Free,
    });
    let mut edges = g.edges().to_vec();
    edges[k] = Edge {
        id: old.id,
        u: old.u,
        v: mid,
        length: t,
    };
    edges.push(Edge {
        id: g.next_edge_id(),
        u: mid,
        v: old.v,
        length: old.length - t,
    });
    Ok(MetricGraph::new(vertices, edges))
}

/// Removes free vertices of degree two by joining their two edges, unless
/// that would create a parallel edge. Inverse of [`subdivide_edge`].
pub fn absorb_degree_two(g: &MetricGraph) -> MetricGraph {
    let mut current = g.clone();
    loop {
        let adj = current.adjacency();
        let candidate = current.vertices().iter().enumerate().find_map(|(i, v)| {
            if v.role.is_dirichlet() || adj[i].len() != 2 {
                return None;
            }
            let (a, ka) = adj[i][0];
            let (b, kb) = adj[i][1];
            if a == b || a == i || b == i {
                return None;
            }
            let already = adj[a].iter().any(|&(x, _)| x == b);
            (!already).then_some((i, a, b, ka, kb))
        });
        let Some((i, a, b, ka, kb)) = candidate else {
            return current;
        };
        let (ea, eb) = (current.edges()[ka], current.edges()[kb]);
        let merged = Edge {
            id: ea.id.min(eb.id),
            u: current.vertices()[a].id,
            v: current.vertices()[b].id,
            length: ea.length + eb.length,
        };
        let edges = current
            .edges()
            .iter()
            .enumerate()
            .filter_map(|(k, e)| match k {
                _ if k == ka.min(kb) => Some(merged),
                _ if k == ka.max(kb) => None,
                _ => Some(*e),
            })
            .collect();
        let mut vertices = current.vertices().to_vec();
        vertices.remove(i);
        current = MetricGraph::new(vertices, edges);
    }
}

//! Serre graphs: directed edges paired by a fixed-point-free involution.
//!
//! Vertex and edge ids are opaque integers. Every geometric edge `{e, ē}` is
//! represented by the numerically smaller of its two ids, which fixes the
//! column order of incidence matrices built downstream.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::union_find::UnionFind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u64);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub u64);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct EdgeRecord {
    id: EdgeId,
    origin: usize,
    terminus: usize,
    inverse: usize,
}

/// A geometric edge `{e, ē}` with its canonical orientation `e < ē`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GeometricEdge {
    pub representative: EdgeId,
    pub inverse: EdgeId,
}

/// Finite graph in Serre's sense. Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SerreGraph {
    vertices: Vec<VertexId>,
    vertex_pos: HashMap<VertexId, usize>,
    edges: Vec<EdgeRecord>,
    edge_pos: HashMap<EdgeId, usize>,
    stars: Vec<Vec<usize>>,
}

#[derive(Default, Debug, Clone)]
pub struct SerreGraphBuilder {
    vertices: Vec<VertexId>,
    edges: Vec<(EdgeId, EdgeId, VertexId, VertexId)>,
}

impl SerreGraphBuilder {
    pub fn vertex(&mut self, v: VertexId) -> &mut Self {
        self.vertices.push(v);
        self
    }

    /// Adds the oriented edge `id` from `o` to `t` together with its inverse.
    pub fn edge_pair(&mut self, id: EdgeId, inverse: EdgeId, o: VertexId, t: VertexId) -> &mut Self {
        self.edges.push((id, inverse, o, t));
        self
    }

    pub fn build(&self) -> Result<SerreGraph> {
        let mut records = Vec::with_capacity(self.edges.len() * 2);
        for &(id, inv, o, t) in &self.edges {
            records.push(EdgeLiteral { id: id.0, inv: inv.0, o: o.0, t: t.0 });
            records.push(EdgeLiteral { id: inv.0, inv: id.0, o: t.0, t: o.0 });
        }
        SerreGraph::from_parts(self.vertices.clone(), records)
    }
}

/// JSON literal `{vertices:[...], edges:[{id, inv, o, t}]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphLiteral {
    pub vertices: Vec<u64>,
    pub edges: Vec<EdgeLiteral>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeLiteral {
    pub id: u64,
    pub inv: u64,
    pub o: u64,
    pub t: u64,
}

/// Partition of the vertex set into connected components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Components {
    /// Blocks sorted internally, and ordered by smallest vertex id.
    pub blocks: Vec<Vec<VertexId>>,
}

impl Components {
    pub fn count(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_of(&self, v: VertexId) -> Option<usize> {
        self.blocks.iter().position(|b| b.binary_search(&v).is_ok())
    }
}

impl SerreGraph {
    pub fn builder() -> SerreGraphBuilder {
        SerreGraphBuilder::default()
    }

    pub fn empty() -> SerreGraph {
        SerreGraph::from_parts(Vec::new(), Vec::new()).expect("empty graph is valid")
    }

    /// Vertices `0..n`; the i-th pair becomes edges `2i` (o → t) and `2i+1`.
    pub fn from_geometric(n: usize, pairs: &[(usize, usize)]) -> Result<SerreGraph> {
        let mut b = SerreGraph::builder();
        for v in 0..n {
            b.vertex(VertexId(v as u64));
        }
        for (i, &(o, t)) in pairs.iter().enumerate() {
            b.edge_pair(
                EdgeId(2 * i as u64),
                EdgeId(2 * i as u64 + 1),
                VertexId(o as u64),
                VertexId(t as u64),
            );
        }
        b.build()
    }

    fn from_parts(vertices: Vec<VertexId>, literals: Vec<EdgeLiteral>) -> Result<SerreGraph> {
        let mut vertex_pos = HashMap::with_capacity(vertices.len());
        for (i, &v) in vertices.iter().enumerate() {
            if vertex_pos.insert(v, i).is_some() {
                return Err(Error::MalformedGraph(format!("duplicate vertex {}", v.0)));
            }
        }
        let mut literals = literals;
        literals.sort_by_key(|l| l.id);
        let mut edge_pos = HashMap::with_capacity(literals.len());
        for (i, l) in literals.iter().enumerate() {
            if edge_pos.insert(EdgeId(l.id), i).is_some() {
                return Err(Error::MalformedGraph(format!("duplicate edge {}", l.id)));
            }
        }
        let mut edges = Vec::with_capacity(literals.len());
        for l in &literals {
            let origin = *vertex_pos.get(&VertexId(l.o)).ok_or(Error::UnknownVertex(l.o))?;
            let terminus = *vertex_pos.get(&VertexId(l.t)).ok_or(Error::UnknownVertex(l.t))?;
            let inverse = *edge_pos.get(&EdgeId(l.inv)).ok_or(Error::UnknownEdge(l.inv))?;
            edges.push(EdgeRecord { id: EdgeId(l.id), origin, terminus, inverse });
        }
        for (i, e) in edges.iter().enumerate() {
            let inv = &edges[e.inverse];
            if e.inverse == i {
                return Err(Error::MalformedGraph(format!("edge {} is its own inverse", e.id.0)));
            }
            if inv.inverse != i {
                return Err(Error::MalformedGraph(format!("inverse of edge {} is not an involution", e.id.0)));
            }
            if e.origin != inv.terminus || e.terminus != inv.origin {
                return Err(Error::MalformedGraph(format!("edge {} and its inverse disagree on endpoints", e.id.0)));
            }
        }
        let mut stars = vec![Vec::new(); vertices.len()];
        for (i, e) in edges.iter().enumerate() {
            stars[e.origin].push(i);
        }
        Ok(SerreGraph { vertices, vertex_pos, edges, edge_pos, stars })
    }

    pub fn from_literal(lit: &GraphLiteral) -> Result<SerreGraph> {
        SerreGraph::from_parts(lit.vertices.iter().map(|&v| VertexId(v)).collect(), lit.edges.clone())
    }

    pub fn to_literal(&self) -> GraphLiteral {
        GraphLiteral {
            vertices: self.vertices.iter().map(|v| v.0).collect(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeLiteral {
                    id: e.id.0,
                    inv: self.edges[e.inverse].id.0,
                    o: self.vertices[e.origin].0,
                    t: self.vertices[e.terminus].0,
                })
                .collect(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_locally_finite(&self) -> bool {
        true
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges.iter().map(|e| e.id)
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.vertex_pos.contains_key(&v)
    }

    pub fn origin(&self, e: EdgeId) -> Option<VertexId> {
        self.edge_pos.get(&e).map(|&i| self.vertices[self.edges[i].origin])
    }

    pub fn terminus(&self, e: EdgeId) -> Option<VertexId> {
        self.edge_pos.get(&e).map(|&i| self.vertices[self.edges[i].terminus])
    }

    pub fn inverse(&self, e: EdgeId) -> Option<EdgeId> {
        self.edge_pos.get(&e).map(|&i| self.edges[self.edges[i].inverse].id)
    }

    /// Geometric edges in ascending order of their representative.
    pub fn geometric_edges(&self) -> Vec<GeometricEdge> {
        self.edges
            .iter()
            .filter(|e| e.id < self.edges[e.inverse].id)
            .map(|e| GeometricEdge { representative: e.id, inverse: self.edges[e.inverse].id })
            .collect()
    }

    pub fn geometric_edge_count(&self) -> usize {
        self.edges.len() / 2
    }

    /// Edges with origin `v`.
    pub fn star(&self, v: VertexId) -> Result<Vec<EdgeId>> {
        let i = *self.vertex_pos.get(&v).ok_or(Error::UnknownVertex(v.0))?;
        Ok(self.stars[i].iter().map(|&e| self.edges[e].id).collect())
    }

    pub fn components(&self) -> Components {
        let mut uf = UnionFind::new(self.vertices.len());
        for e in &self.edges {
            uf.union(e.origin, e.terminus);
        }
        let mut blocks: Vec<Vec<VertexId>> = uf
            .blocks()
            .into_iter()
            .map(|b| {
                let mut ids: Vec<VertexId> = b.into_iter().map(|i| self.vertices[i]).collect();
                ids.sort();
                ids
            })
            .collect();
        blocks.sort();
        Components { blocks }
    }

    /// `Γ − S`: drops `S` and every edge with an endpoint in `S`.
    pub fn remove_vertex_set(&self, removed: &BTreeSet<VertexId>) -> SerreGraph {
        let vertices: Vec<VertexId> = self.vertices.iter().copied().filter(|v| !removed.contains(v)).collect();
        let literals = self
            .edges
            .iter()
            .filter(|e| {
                !removed.contains(&self.vertices[e.origin]) && !removed.contains(&self.vertices[e.terminus])
            })
            .map(|e| EdgeLiteral {
                id: e.id.0,
                inv: self.edges[e.inverse].id.0,
                o: self.vertices[e.origin].0,
                t: self.vertices[e.terminus].0,
            })
            .collect();
        SerreGraph::from_parts(vertices, literals).expect("subgraph of a valid graph is valid")
    }

    /// Connected, nonempty and free of circuits.
    pub fn is_tree_combinatorial(&self) -> bool {
        !self.vertices.is_empty()
            && self.vertices.len() == self.geometric_edge_count() + 1
            && self.components().count() == 1
    }

    /// Breadth-first distances from `v`, `None` for unreachable vertices.
    pub fn distances_from(&self, v: VertexId) -> Result<Vec<Option<usize>>> {
        let start = *self.vertex_pos.get(&v).ok_or(Error::UnknownVertex(v.0))?;
        let mut dist = vec![None; self.vertices.len()];
        dist[start] = Some(0);
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            let d = dist[x].unwrap();
            for &e in &self.stars[x] {
                let y = self.edges[e].terminus;
                if dist[y].is_none() {
                    dist[y] = Some(d + 1);
                    queue.push_back(y);
                }
            }
        }
        Ok(dist)
    }

    /// DOT with one arrow per geometric edge in its canonical orientation.
    pub fn to_dot(&self, name: &str, vertex_attrs: impl Fn(VertexId) -> Option<String>) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "digraph {name} {{");
        for &v in &self.vertices {
            match vertex_attrs(v) {
                Some(attrs) => {
                    let _ = writeln!(out, "  v{} [{}];", v.0, attrs);
                }
                None => {
                    let _ = writeln!(out, "  v{};", v.0);
                }
            }
        }
        for g in self.geometric_edges() {
            let o = self.origin(g.representative).unwrap();
            let t = self.terminus(g.representative).unwrap();
            let _ = writeln!(out, "  v{} -> v{} [label=\"{}\"];", o.0, t.0, g.representative.0);
        }
        out.push_str("}\n");
        out
    }
}

/// A sequence of edges `e_1 .. e_r` with `t(e_i) = o(e_{i+1})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Path {
    edges: Vec<EdgeId>,
}

impl Path {
    pub fn new(graph: &SerreGraph, edges: Vec<EdgeId>) -> Result<Path> {
        for e in &edges {
            if graph.origin(*e).is_none() {
                return Err(Error::UnknownEdge(e.0));
            }
        }
        for w in edges.windows(2) {
            if graph.terminus(w[0]) != graph.origin(w[1]) {
                return Err(Error::MalformedGraph(format!(
                    "edges {} and {} are not consecutive",
                    w[0].0, w[1].0
                )));
            }
        }
        Ok(Path { edges })
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// No edge is immediately followed by its inverse.
    pub fn is_reduced(&self, graph: &SerreGraph) -> bool {
        self.edges.windows(2).all(|w| graph.inverse(w[0]) != Some(w[1]))
    }

    pub fn is_circuit(&self, graph: &SerreGraph) -> bool {
        match (self.edges.first(), self.edges.last()) {
            (Some(&first), Some(&last)) => {
                self.is_reduced(graph) && graph.terminus(last) == graph.origin(first)
            }
            _ => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: u64) -> VertexId {
        VertexId(i)
    }

    #[test]
    fn components_of_small_graphs() {
        let two = SerreGraph::from_geometric(2, &[]).unwrap();
        assert_eq!(two.components().count(), 2);
        let seg = SerreGraph::from_geometric(2, &[(0, 1)]).unwrap();
        assert_eq!(seg.components().count(), 1);
        let tri_plus_seg = SerreGraph::from_geometric(5, &[(0, 1), (1, 2), (2, 0), (3, 4)]).unwrap();
        let comps = tri_plus_seg.components();
        assert_eq!(comps.blocks, vec![vec![v(0), v(1), v(2)], vec![v(3), v(4)]]);
        assert_eq!(comps.block_of(v(4)), Some(1));
    }

    #[test]
    fn stars() {
        let iso = SerreGraph::from_geometric(1, &[]).unwrap();
        assert!(iso.star(v(0)).unwrap().is_empty());
        let claw = SerreGraph::from_geometric(4, &[(0, 1), (0, 2), (3, 0)]).unwrap();
        assert_eq!(claw.star(v(0)).unwrap(), vec![EdgeId(0), EdgeId(2), EdgeId(5)]);
        assert_eq!(claw.star(v(9)), Err(Error::UnknownVertex(9)));
        let line: Vec<(usize, usize)> = (0..10).map(|i| (i, i + 1)).collect();
        let line = SerreGraph::from_geometric(11, &line).unwrap();
        for i in 1..10 {
            assert_eq!(line.star(v(i)).unwrap().len(), 2);
        }
    }

    #[test]
    fn remove_vertex_sets() {
        let line: Vec<(usize, usize)> = (0..6).map(|i| (i, i + 1)).collect();
        let g = SerreGraph::from_geometric(7, &line).unwrap();
        assert_eq!(g.remove_vertex_set(&BTreeSet::new()), g);
        let all: BTreeSet<VertexId> = g.vertices().iter().copied().collect();
        let empty = g.remove_vertex_set(&all);
        assert_eq!(empty.vertex_count(), 0);
        assert_eq!(empty.edge_count(), 0);
        let cut = g.remove_vertex_set(&BTreeSet::from([v(3)]));
        assert_eq!(cut.components().count(), 2);
        assert_eq!(cut.geometric_edge_count(), 4);
    }

    #[test]
    fn tree_test_examples() {
        assert!(SerreGraph::from_geometric(1, &[]).unwrap().is_tree_combinatorial());
        assert!(!SerreGraph::from_geometric(1, &[(0, 0)]).unwrap().is_tree_combinatorial());
        assert!(!SerreGraph::from_geometric(3, &[(0, 1), (1, 2), (2, 0)]).unwrap().is_tree_combinatorial());
        assert!(!SerreGraph::empty().is_tree_combinatorial());
        assert!(SerreGraph::from_geometric(3, &[(0, 1), (2, 1)]).unwrap().is_tree_combinatorial());
    }

    #[test]
    fn rejects_broken_involutions() {
        let lit = GraphLiteral {
            vertices: vec![0, 1],
            edges: vec![EdgeLiteral { id: 0, inv: 0, o: 0, t: 0 }],
        };
        assert!(matches!(SerreGraph::from_literal(&lit), Err(Error::MalformedGraph(_))));
        let lit = GraphLiteral {
            vertices: vec![0, 1],
            edges: vec![
                EdgeLiteral { id: 0, inv: 1, o: 0, t: 1 },
                EdgeLiteral { id: 1, inv: 0, o: 0, t: 1 },
            ],
        };
        assert!(matches!(SerreGraph::from_literal(&lit), Err(Error::MalformedGraph(_))));
    }

    #[test]
    fn literal_round_trip_and_dot() {
        let g = SerreGraph::from_geometric(3, &[(0, 1), (1, 2), (2, 2)]).unwrap();
        let json = serde_json::to_string(&g.to_literal()).unwrap();
        let back = SerreGraph::from_literal(&serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back, g);
        let dot = g.to_dot("g", |_| None);
        assert_eq!(dot.matches("->").count(), 3);
        assert!(dot.contains("v2 -> v2"));
    }

    #[test]
    fn paths_and_circuits() {
        let g = SerreGraph::from_geometric(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let circuit = Path::new(&g, vec![EdgeId(0), EdgeId(2), EdgeId(4)]).unwrap();
        assert!(circuit.is_reduced(&g));
        assert!(circuit.is_circuit(&g));
        let back = Path::new(&g, vec![EdgeId(0), EdgeId(1)]).unwrap();
        assert!(!back.is_reduced(&g));
        assert!(!back.is_circuit(&g));
        assert!(Path::new(&g, vec![EdgeId(0), EdgeId(4)]).is_err());
        let looped = SerreGraph::from_geometric(1, &[(0, 0)]).unwrap();
        assert!(Path::new(&looped, vec![EdgeId(0)]).unwrap().is_circuit(&looped));
    }
}

//! Rough Cayley graphs on `G/K` for a generating pair `(K, S)`, truncated at
//! a radius.
//!
//! A coset `gK` is labelled by `min_{k∈K} g·k`. Its neighbours are the cosets
//! `g·d·K` with `d` running over representatives of `KSK/K`; this set does
//! not depend on the representative `g`, so the graph is defined on cosets
//! and `G` acts on it by left multiplication.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, SerreGraph, VertexId};
use crate::group::{check_subgroup, Group};

/// Canonical label of `g·sub`: the least element of the coset.
pub fn coset_label<G: Group>(group: &G, sub: &[G::Elem], g: &G::Elem) -> G::Elem {
    sub.iter().map(|k| group.mul(g, k)).min().unwrap_or_else(|| g.clone())
}

/// `K` finite, `S` finite, symmetric and disjoint from `K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratingPair<E> {
    k: Vec<E>,
    s: Vec<E>,
    /// Representatives `d` of `KSK/K`, each with an index into `s` such that
    /// `d ∈ K·s·K`.
    d: Vec<(E, usize)>,
    k_normal: bool,
}

impl<E: Clone + Ord> GeneratingPair<E> {
    pub fn new<G: Group<Elem = E>>(group: &G, k: Vec<E>, s: Vec<E>) -> Result<Self> {
        let mut k = k;
        k.sort();
        k.dedup();
        check_subgroup(group, &k)?;
        let mut uniq = Vec::new();
        for x in s {
            if !uniq.contains(&x) {
                uniq.push(x);
            }
        }
        let s = uniq;
        if s.is_empty() {
            return Err(Error::InvalidPair("S is empty".into()));
        }
        for x in &s {
            if k.binary_search(x).is_ok() {
                return Err(Error::InvalidPair(format!("{} lies in K", group.render(x))));
            }
            if !s.contains(&group.inv(x)) {
                return Err(Error::InvalidPair(format!("S lacks the inverse of {}", group.render(x))));
            }
        }
        let mut d: Vec<(E, usize)> = Vec::new();
        for (si, x) in s.iter().enumerate() {
            for a in &k {
                let label = coset_label(group, &k, &group.mul(a, x));
                if !d.iter().any(|(y, _)| *y == label) {
                    d.push((label, si));
                }
            }
        }
        d.sort();
        let k_normal = group.generators().iter().chain(&s).all(|g| {
            let gi = group.inv(g);
            k.iter().all(|a| k.binary_search(&group.mul(&group.mul(g, a), &gi)).is_ok())
        });
        Ok(GeneratingPair { k, s, d, k_normal })
    }

    /// Closes `s` under inverses and drops elements of `K` before building.
    pub fn symmetrized<G: Group<Elem = E>>(group: &G, k: Vec<E>, s: Vec<E>) -> Result<Self> {
        let mut k_sorted = k.clone();
        k_sorted.sort();
        let mut out: Vec<E> = Vec::new();
        for x in s {
            for y in [x.clone(), group.inv(&x)] {
                if k_sorted.binary_search(&y).is_err() && !out.contains(&y) {
                    out.push(y);
                }
            }
        }
        GeneratingPair::new(group, k, out)
    }

    pub fn k(&self) -> &[E] {
        &self.k
    }

    pub fn s(&self) -> &[E] {
        &self.s
    }

    pub fn double_coset_reps(&self) -> &[(E, usize)] {
        &self.d
    }

    /// Whether `K` is normalized by `S` and the backend's generators.
    pub fn k_is_normal(&self) -> bool {
        self.k_normal
    }

    pub fn canon<G: Group<Elem = E>>(&self, group: &G, g: &E) -> E {
        coset_label(group, &self.k, g)
    }

    pub fn neighbours<G: Group<Elem = E>>(&self, group: &G, coset: &E) -> Vec<E> {
        let mut out: Vec<E> = self.d.iter().map(|(x, _)| self.canon(group, &group.mul(coset, x))).collect();
        out.sort();
        out.dedup();
        out
    }
}

/// The induced subgraph of the rough Cayley graph on the ball of radius `R`
/// around `K`.
#[derive(Clone, Debug)]
pub struct RoughCayleyTruncation<E> {
    /// Vertex `i` is the coset `labels[i]`; vertices are in BFS order, each
    /// layer sorted by label.
    pub graph: SerreGraph,
    pub labels: Vec<E>,
    pub distance: Vec<usize>,
    pub radius: usize,
    /// The whole coset graph lies within the radius.
    pub exhausted: bool,
    /// Number of neighbours of every coset in the full graph.
    pub degree: usize,
    k: Vec<E>,
    s: Vec<E>,
    index: HashMap<E, usize>,
    adjacency: Vec<Vec<usize>>,
}

impl<E: Clone + Ord + std::hash::Hash> RoughCayleyTruncation<E> {
    pub fn build<G: Group<Elem = E>>(group: &G, pair: &GeneratingPair<E>, radius: usize, cap: usize) -> Result<Self> {
        if radius == 0 {
            return Err(Error::InvalidPair("radius must be at least 1".into()));
        }
        let root = pair.canon(group, &group.identity());
        let mut labels = vec![root.clone()];
        let mut distance = vec![0];
        let mut index = HashMap::from([(root, 0usize)]);
        let mut nbrs: Vec<Vec<E>> = Vec::new();
        let mut frontier = vec![0usize];
        let mut exhausted = false;
        for d in 1..=radius + 1 {
            let mut layer = BTreeSet::new();
            for &i in &frontier {
                let ns = pair.neighbours(group, &labels[i]);
                for n in &ns {
                    if !index.contains_key(n) {
                        layer.insert(n.clone());
                    }
                }
                debug_assert_eq!(nbrs.len(), i);
                nbrs.push(ns);
            }
            if layer.is_empty() {
                exhausted = true;
                break;
            }
            if d == radius + 1 {
                break;
            }
            frontier.clear();
            for x in layer {
                if labels.len() >= cap {
                    return Err(Error::BudgetExceeded { cap });
                }
                index.insert(x.clone(), labels.len());
                frontier.push(labels.len());
                labels.push(x);
                distance.push(d);
            }
        }
        if exhausted {
            for g in group.generators() {
                let c = pair.canon(group, &g);
                if !index.contains_key(&c) {
                    return Err(Error::NotGenerating(format!(
                        "{} is not reached from K by S",
                        group.render(&g)
                    )));
                }
            }
        }
        let mut adjacency = vec![Vec::new(); labels.len()];
        let mut b = SerreGraph::builder();
        for i in 0..labels.len() {
            b.vertex(VertexId(i as u64));
        }
        let mut next_edge = 0u64;
        for (i, ns) in nbrs.iter().enumerate() {
            for n in ns {
                if let Some(&j) = index.get(n) {
                    adjacency[i].push(j);
                    if i < j {
                        b.edge_pair(EdgeId(next_edge), EdgeId(next_edge + 1), VertexId(i as u64), VertexId(j as u64));
                        next_edge += 2;
                    }
                }
            }
            adjacency[i].sort();
        }
        Ok(RoughCayleyTruncation {
            graph: b.build()?,
            labels,
            distance,
            radius,
            exhausted,
            degree: pair.double_coset_reps().len(),
            k: pair.k().to_vec(),
            s: pair.s().to_vec(),
            index,
            adjacency,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    /// Whether the truncation was built over `pair`.
    pub fn built_over(&self, pair: &GeneratingPair<E>) -> bool {
        self.k == pair.k() && self.s == pair.s()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn index_of(&self, label: &E) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn neighbours_of(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    /// Indices at distance exactly `r` from the base vertex.
    pub fn sphere(&self, r: usize) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.distance[i] == r).collect()
    }

    /// Indices at distance at most `r`.
    pub fn ball(&self, r: usize) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.distance[i] <= r).collect()
    }

    /// Whether vertex `i` has its full neighbourhood inside the truncation.
    pub fn is_interior(&self, i: usize) -> bool {
        self.exhausted || self.distance[i] < self.radius
    }

    pub fn to_json<G: Group<Elem = E>>(&self, group: &G) -> TruncationJson {
        TruncationJson {
            radius: self.radius,
            exhausted: self.exhausted,
            cosets: (0..self.len())
                .map(|i| CosetJson { index: i, label: group.render(&self.labels[i]), distance: self.distance[i] })
                .collect(),
            edges: (0..self.len())
                .flat_map(|i| self.adjacency[i].iter().filter(move |&&j| i < j).map(move |&j| (i, j)))
                .collect(),
        }
    }

    /// DOT with vertices coloured by sphere.
    pub fn to_dot<G: Group<Elem = E>>(&self, group: &G) -> String {
        const PALETTE: [&str; 6] = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02"];
        let mut out = String::from("graph rough_cayley {\n");
        for i in 0..self.len() {
            let _ = writeln!(
                out,
                "  {i} [label=\"{}\", style=filled, fillcolor=\"{}\"];",
                group.render(&self.labels[i]).replace('"', "\\\""),
                PALETTE[self.distance[i] % PALETTE.len()]
            );
        }
        for i in 0..self.len() {
            for &j in &self.adjacency[i] {
                if i < j {
                    let _ = writeln!(out, "  {i} -- {j};");
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CosetJson {
    pub index: usize,
    pub label: String,
    pub distance: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct TruncationJson {
    pub radius: usize,
    pub exhausted: bool,
    pub cosets: Vec<CosetJson>,
    pub edges: Vec<(usize, usize)>,
}

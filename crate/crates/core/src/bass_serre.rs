//! Graphs of finite groups, normal forms in their fundamental groups, and
//! truncations of the universal covering tree.
//!
//! Elements of π₁ are reduced words `r₁ e₁ r₂ e₂ … rₙ eₙ g` over the path
//! groupoid: `eᵢ` are oriented edges of the base graph Λ forming a closed
//! path at the base vertex, `rᵢ` runs over a fixed left transversal of
//! `ι_ēᵢ(𝒢_eᵢ)` in `𝒢_{o(eᵢ)}`, no `rᵢ₊₁ = 1` sits between `eᵢ` and `ēᵢ`, and
//! `g` is an arbitrary element of the base vertex group. The defining
//! relation is `ι_ē(a)·e = e·ι_e(a)`.
//!
//! The same words with arbitrary end vertex and trivial tail are the
//! vertices of the Bass-Serre tree.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeId, SerreGraph, VertexId};
use crate::group::{FiniteGroup, Group, Transversal};
use crate::qlinalg::{augmentation, delta_matrix, verify_short_exact, ShortExactCheck};

/// Vertex or edge group in a JSON spec.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupLiteral {
    Cyclic { n: usize },
    Dihedral { n: usize },
    Table { table: Vec<Vec<usize>> },
}

impl GroupLiteral {
    pub fn build(&self) -> Result<FiniteGroup> {
        match self {
            GroupLiteral::Cyclic { n } if *n > 0 => Ok(FiniteGroup::cyclic(*n)),
            GroupLiteral::Dihedral { n } if *n > 0 => Ok(FiniteGroup::dihedral(*n)),
            GroupLiteral::Table { table } => FiniteGroup::from_table(table.clone()),
            _ => Err(Error::InvalidGroup("group of order 0".into())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexSpec {
    pub id: u64,
    pub group: GroupLiteral,
}

/// One oriented edge; `embedding[a]` is `ι_e(a)` in the group at `t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub id: u64,
    pub inv: u64,
    pub o: u64,
    pub t: u64,
    pub edge_group: GroupLiteral,
    pub embedding: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GogSpec {
    pub vertices: Vec<VertexSpec>,
    pub edges: Vec<EdgeSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct OrientedEdge {
    id: EdgeId,
    inv: usize,
    o: usize,
    t: usize,
    group: usize,
    embedding: Vec<usize>,
}

/// A finite graph of finite groups. Structure only; [`validate`] checks the
/// group-theoretic conditions.
///
/// [`validate`]: GraphOfFiniteGroups::validate
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphOfFiniteGroups {
    base: SerreGraph,
    vertex_ids: Vec<VertexId>,
    vertex_groups: Vec<FiniteGroup>,
    edges: Vec<OrientedEdge>,
    edge_groups: Vec<FiniteGroup>,
}

#[derive(Default, Clone, Debug)]
pub struct GogBuilder {
    vertices: Vec<(u64, FiniteGroup)>,
    edges: Vec<(u64, u64, u64, u64, FiniteGroup, Vec<usize>, Vec<usize>)>,
}

impl GogBuilder {
    pub fn vertex(mut self, id: u64, group: FiniteGroup) -> Self {
        self.vertices.push((id, group));
        self
    }

    /// Edge `id: o → t` and its inverse `inv`, with `into_t = ι_e` and
    /// `into_o = ι_ē` given as element lists.
    #[allow(clippy::too_many_arguments)]
    pub fn edge(
        mut self,
        id: u64,
        inv: u64,
        o: u64,
        t: u64,
        group: FiniteGroup,
        into_t: Vec<usize>,
        into_o: Vec<usize>,
    ) -> Self {
        self.edges.push((id, inv, o, t, group, into_t, into_o));
        self
    }

    pub fn build(self) -> Result<GraphOfFiniteGroups> {
        let mut b = SerreGraph::builder();
        for (id, _) in &self.vertices {
            b.vertex(VertexId(*id));
        }
        for (id, inv, o, t, ..) in &self.edges {
            b.edge_pair(EdgeId(*id), EdgeId(*inv), VertexId(*o), VertexId(*t));
        }
        let base = b.build()?;
        let mut groups = BTreeMap::new();
        for (id, g) in self.vertices {
            groups.insert(id, g);
        }
        let mut raw = Vec::new();
        let mut edge_groups = Vec::new();
        for (id, inv, o, t, g, into_t, into_o) in self.edges {
            raw.push((id, inv, o, t, edge_groups.len(), into_t));
            raw.push((inv, id, t, o, edge_groups.len(), into_o));
            edge_groups.push(g);
        }
        GraphOfFiniteGroups::assemble(base, groups, raw, edge_groups)
    }
}

impl GraphOfFiniteGroups {
    pub fn builder() -> GogBuilder {
        GogBuilder::default()
    }

    pub fn from_spec(spec: &GogSpec) -> Result<GraphOfFiniteGroups> {
        let mut b = SerreGraph::builder();
        let mut groups = BTreeMap::new();
        for v in &spec.vertices {
            b.vertex(VertexId(v.id));
            groups.insert(v.id, v.group.build()?);
        }
        let by_id: HashMap<u64, &EdgeSpec> = spec.edges.iter().map(|e| (e.id, e)).collect();
        let mut raw = Vec::new();
        let mut edge_groups = Vec::new();
        let mut group_of: HashMap<u64, usize> = HashMap::new();
        for e in &spec.edges {
            let partner = by_id.get(&e.inv).ok_or(Error::UnknownEdge(e.inv))?;
            if partner.inv != e.id || partner.o != e.t || partner.t != e.o {
                return Err(Error::MalformedGraph(format!("edge {} and its inverse disagree", e.id)));
            }
            if partner.edge_group != e.edge_group {
                return Err(Error::InvalidGraphOfGroups(format!("edge {} and its inverse carry different groups", e.id)));
            }
            if e.id < e.inv {
                b.edge_pair(EdgeId(e.id), EdgeId(e.inv), VertexId(e.o), VertexId(e.t));
                group_of.insert(e.id, edge_groups.len());
                group_of.insert(e.inv, edge_groups.len());
                edge_groups.push(e.edge_group.build()?);
            }
        }
        let base = b.build()?;
        for e in &spec.edges {
            raw.push((e.id, e.inv, e.o, e.t, group_of[&e.id], e.embedding.clone()));
        }
        GraphOfFiniteGroups::assemble(base, groups, raw, edge_groups)
    }

    fn assemble(
        base: SerreGraph,
        mut groups: BTreeMap<u64, FiniteGroup>,
        mut raw: Vec<(u64, u64, u64, u64, usize, Vec<usize>)>,
        edge_groups: Vec<FiniteGroup>,
    ) -> Result<GraphOfFiniteGroups> {
        let mut vertex_ids: Vec<VertexId> = base.vertices().to_vec();
        vertex_ids.sort();
        let vpos: HashMap<VertexId, usize> = vertex_ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let vertex_groups = vertex_ids
            .iter()
            .map(|v| groups.remove(&v.0).ok_or(Error::UnknownVertex(v.0)))
            .collect::<Result<Vec<_>>>()?;
        raw.sort_by_key(|r| r.0);
        let epos: HashMap<u64, usize> = raw.iter().enumerate().map(|(i, r)| (r.0, i)).collect();
        let edges = raw
            .into_iter()
            .map(|(id, inv, o, t, group, embedding)| OrientedEdge {
                id: EdgeId(id),
                inv: epos[&inv],
                o: vpos[&VertexId(o)],
                t: vpos[&VertexId(t)],
                group,
                embedding,
            })
            .collect();
        Ok(GraphOfFiniteGroups { base, vertex_ids, vertex_groups, edges, edge_groups })
    }

    pub fn to_spec(&self) -> GogSpec {
        let lit = |g: &FiniteGroup| {
            let n = g.order();
            if *g == FiniteGroup::cyclic(n) {
                GroupLiteral::Cyclic { n }
            } else if n % 2 == 0 && *g == FiniteGroup::dihedral(n / 2) {
                GroupLiteral::Dihedral { n: n / 2 }
            } else {
                GroupLiteral::Table { table: g.table().to_vec() }
            }
        };
        GogSpec {
            vertices: self
                .vertex_ids
                .iter()
                .zip(&self.vertex_groups)
                .map(|(v, g)| VertexSpec { id: v.0, group: lit(g) })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeSpec {
                    id: e.id.0,
                    inv: self.edges[e.inv].id.0,
                    o: self.vertex_ids[e.o].0,
                    t: self.vertex_ids[e.t].0,
                    edge_group: lit(&self.edge_groups[e.group]),
                    embedding: e.embedding.clone(),
                })
                .collect(),
        }
    }

    pub fn base_graph(&self) -> &SerreGraph {
        &self.base
    }

    pub fn vertex_group(&self, v: VertexId) -> Result<&FiniteGroup> {
        self.vertex_index(v).map(|i| &self.vertex_groups[i])
    }

    pub fn edge_group(&self, e: EdgeId) -> Result<&FiniteGroup> {
        self.edge_index(e).map(|i| &self.edge_groups[self.edges[i].group])
    }

    /// `ι_e` as the list of images in `𝒢_{t(e)}`.
    pub fn embedding(&self, e: EdgeId) -> Result<&[usize]> {
        self.edge_index(e).map(|i| self.edges[i].embedding.as_slice())
    }

    fn vertex_index(&self, v: VertexId) -> Result<usize> {
        self.vertex_ids.binary_search(&v).map_err(|_| Error::UnknownVertex(v.0))
    }

    fn edge_index(&self, e: EdgeId) -> Result<usize> {
        self.edges.binary_search_by_key(&e, |x| x.id).map_err(|_| Error::UnknownEdge(e.0))
    }

    fn is_positive(&self, e: usize) -> bool {
        self.edges[e].id < self.edges[self.edges[e].inv].id
    }

    /// Checks (G1)–(G3) at desk scale and fixes the normal-form scaffolding.
    pub fn validate(&self) -> Result<BassSerreData> {
        if self.vertex_ids.is_empty() || self.base.components().count() != 1 {
            return Err(Error::InvalidGraphOfGroups("base graph must be nonempty and connected".into()));
        }
        for e in &self.edges {
            let a = &self.edge_groups[e.group];
            let target = &self.vertex_groups[e.t];
            if e.embedding.len() != a.order() || e.embedding.iter().any(|&x| x >= target.order()) {
                return Err(Error::BadEmbedding { edge: e.id.0, reason: "wrong length or out of range".into() });
            }
            if !a.is_homomorphism(target, &e.embedding) {
                return Err(Error::BadEmbedding { edge: e.id.0, reason: "not a homomorphism".into() });
            }
            let image: BTreeSet<usize> = e.embedding.iter().copied().collect();
            if image.len() != e.embedding.len() {
                return Err(Error::BadEmbedding { edge: e.id.0, reason: "not injective".into() });
            }
        }
        let n = self.vertex_ids.len();
        let mut tree_edge = vec![false; self.edges.len()];
        let mut path: Vec<Option<Vec<usize>>> = vec![None; n];
        path[0] = Some(Vec::new());
        let mut queue = VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            for (ei, e) in self.edges.iter().enumerate() {
                if e.o == v && path[e.t].is_none() {
                    let mut p = path[v].clone().unwrap();
                    p.push(ei);
                    path[e.t] = Some(p);
                    tree_edge[ei] = true;
                    tree_edge[e.inv] = true;
                    queue.push_back(e.t);
                }
            }
        }
        let tree_paths: Vec<Vec<usize>> = path.into_iter().map(|p| p.expect("connected")).collect();
        let stable_edges = (0..self.edges.len()).filter(|&e| !tree_edge[e] && self.is_positive(e)).collect();
        let transversals = self
            .edges
            .iter()
            .map(|e| self.vertex_groups[e.o].left_transversal(&self.edges[e.inv].embedding))
            .collect();
        Ok(BassSerreData { tree_paths, tree_edge, stable_edges, transversals })
    }

    /// Classification of each geometric edge, and an overall verdict: the
    /// first nontrivial edge if any.
    pub fn splitting_classify(&self) -> SplittingReport {
        let mut per_edge = Vec::new();
        for e in (0..self.edges.len()).filter(|&e| self.is_positive(e)) {
            per_edge.push((self.edges[e].id, self.classify_edge(e)));
        }
        let overall = match per_edge.iter().find(|(_, c)| c.is_nontrivial()) {
            Some((_, c)) => *c,
            None => per_edge.first().map(|(_, c)| *c).unwrap_or(SplittingClass::NoEdge),
        };
        SplittingReport { overall, per_edge }
    }

    fn classify_edge(&self, e: usize) -> SplittingClass {
        let edge = &self.edges[e];
        let removed: Vec<usize> = vec![e, edge.inv];
        let side_of = |start: usize| -> BTreeSet<usize> {
            let mut seen = BTreeSet::from([start]);
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                for (fi, f) in self.edges.iter().enumerate() {
                    if f.o == v && !removed.contains(&fi) && seen.insert(f.t) {
                        stack.push(f.t);
                    }
                }
            }
            seen
        };
        let origin_side = side_of(edge.o);
        if origin_side.contains(&edge.t) {
            return SplittingClass::NontrivialS2;
        }
        let target_side = side_of(edge.t);
        let order = self.edge_groups[edge.group].order();
        let proper_o = self.side_order(&origin_side, &removed).is_none_or(|m| m != order);
        let proper_t = self.side_order(&target_side, &removed).is_none_or(|m| m != order);
        if proper_o && proper_t {
            SplittingClass::NontrivialS1
        } else {
            SplittingClass::TrivialAt(edge.id)
        }
    }

    /// Order of π₁ of the subgraph of groups on `side`, or `None` when it is
    /// infinite. Collapses edges whose embedding is onto, using orders only.
    fn side_order(&self, side: &BTreeSet<usize>, removed: &[usize]) -> Option<usize> {
        let mut order: BTreeMap<usize, usize> = side.iter().map(|&v| (v, self.vertex_groups[v].order())).collect();
        let mut edges: Vec<(usize, usize, usize)> = self
            .edges
            .iter()
            .enumerate()
            .filter(|(fi, f)| side.contains(&f.o) && !removed.contains(fi) && self.is_positive(*fi))
            .map(|(_, f)| (f.o, f.t, self.edge_groups[f.group].order()))
            .collect();
        if edges.len() + 1 != side.len() {
            return None;
        }
        loop {
            let Some(pos) = edges.iter().position(|&(o, t, m)| order[&o] == m || order[&t] == m) else {
                break;
            };
            let (o, t, m) = edges.remove(pos);
            let (keep, gone) = if order[&t] == m { (o, t) } else { (t, o) };
            order.remove(&gone);
            for f in edges.iter_mut() {
                if f.0 == gone {
                    f.0 = keep;
                }
                if f.1 == gone {
                    f.1 = keep;
                }
            }
        }
        if edges.is_empty() {
            order.values().next().copied()
        } else {
            None
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "class", content = "edge")]
pub enum SplittingClass {
    NoEdge,
    TrivialAt(EdgeId),
    NontrivialS1,
    NontrivialS2,
}

impl SplittingClass {
    pub fn is_nontrivial(&self) -> bool {
        matches!(self, SplittingClass::NontrivialS1 | SplittingClass::NontrivialS2)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplittingReport {
    pub overall: SplittingClass,
    pub per_edge: Vec<(EdgeId, SplittingClass)>,
}

/// Spanning tree, stable letters and transversals; deterministic given the
/// input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BassSerreData {
    /// Edge indices of the spanning-tree path from the base vertex.
    tree_paths: Vec<Vec<usize>>,
    tree_edge: Vec<bool>,
    stable_edges: Vec<usize>,
    /// Left transversal of `ι_ē(𝒢_e)` in `𝒢_{o(e)}` for every oriented `e`.
    transversals: Vec<Transversal>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Step {
    pub rep: u32,
    pub edge: u32,
}

/// Reduced path word starting at `start`. With `start` the base vertex and
/// the path closed, this is an element of π₁; with trivial tail it names a
/// vertex of the Bass-Serre tree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PathWord {
    pub start: u32,
    pub steps: Vec<Step>,
    pub tail: u32,
}

pub type PiOneElement = PathWord;
pub type TreeVertex = PathWord;

impl Ord for PathWord {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.steps.len(), self.start, &self.steps, self.tail).cmp(&(
            other.steps.len(),
            other.start,
            &other.steps,
            other.tail,
        ))
    }
}

impl PartialOrd for PathWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// π₁ of a validated graph of finite groups, based at the smallest vertex.
#[derive(Clone, Debug)]
pub struct FundamentalGroup {
    gog: GraphOfFiniteGroups,
    data: BassSerreData,
}

impl FundamentalGroup {
    pub fn new(gog: GraphOfFiniteGroups) -> Result<FundamentalGroup> {
        let data = gog.validate()?;
        Ok(FundamentalGroup { gog, data })
    }

    pub fn from_spec(spec: &GogSpec) -> Result<FundamentalGroup> {
        FundamentalGroup::new(GraphOfFiniteGroups::from_spec(spec)?)
    }

    pub fn gog(&self) -> &GraphOfFiniteGroups {
        &self.gog
    }

    pub fn data(&self) -> &BassSerreData {
        &self.data
    }

    pub fn base_vertex(&self) -> VertexId {
        self.gog.vertex_ids[0]
    }

    fn vid(&self, w: &PathWord) -> usize {
        match w.steps.last() {
            Some(s) => self.gog.edges[s.edge as usize].t,
            None => w.start as usize,
        }
    }

    /// Vertex of Λ at which the path ends.
    pub fn end_vertex(&self, w: &PathWord) -> VertexId {
        self.gog.vertex_ids[self.vid(w)]
    }

    fn empty_at(&self, v: usize) -> PathWord {
        PathWord { start: v as u32, steps: Vec::new(), tail: self.gog.vertex_groups[v].identity_index() as u32 }
    }

    fn push_element(&self, w: &mut PathWord, g: usize) {
        let v = self.vid(w);
        w.tail = self.gog.vertex_groups[v].op(w.tail as usize, g) as u32;
    }

    fn push_edge(&self, w: &mut PathWord, e: usize) {
        let edge = &self.gog.edges[e];
        debug_assert_eq!(self.vid(w), edge.o);
        let tr = &self.data.transversals[e];
        let r = tr.rep[w.tail as usize];
        let a = tr.sub_part[w.tail as usize];
        let image = edge.embedding[a];
        let trivial_rep = r == self.gog.vertex_groups[edge.o].identity_index();
        if trivial_rep && w.steps.last().is_some_and(|s| s.edge as usize == edge.inv) {
            let prev = w.steps.pop().unwrap();
            w.tail = self.gog.vertex_groups[edge.t].op(prev.rep as usize, image) as u32;
        } else {
            w.steps.push(Step { rep: r as u32, edge: e as u32 });
            w.tail = image as u32;
        }
    }

    /// Appends `b` to `a`; `b` must start where `a` ends.
    pub fn concat(&self, a: &PathWord, b: &PathWord) -> PathWord {
        assert_eq!(self.vid(a), b.start as usize, "paths are not composable");
        let mut w = a.clone();
        for s in &b.steps {
            self.push_element(&mut w, s.rep as usize);
            self.push_edge(&mut w, s.edge as usize);
        }
        self.push_element(&mut w, b.tail as usize);
        w
    }

    pub fn path_inverse(&self, a: &PathWord) -> PathWord {
        let v = self.vid(a);
        let mut w = self.empty_at(v);
        self.push_element(&mut w, self.gog.vertex_groups[v].inverse_of(a.tail as usize));
        for s in a.steps.iter().rev() {
            let e = &self.gog.edges[s.edge as usize];
            self.push_edge(&mut w, e.inv);
            self.push_element(&mut w, self.gog.vertex_groups[e.o].inverse_of(s.rep as usize));
        }
        w
    }

    fn tree_path_word(&self, v: usize) -> PathWord {
        let mut w = self.empty_at(0);
        for &e in &self.data.tree_paths[v] {
            self.push_edge(&mut w, e);
        }
        w
    }

    /// Path word `p_v · g · p_v⁻¹` for `g ∈ 𝒢_v`.
    pub fn vertex_element(&self, v: VertexId, g: usize) -> Result<PathWord> {
        let vi = self.gog.vertex_index(v)?;
        if g >= self.gog.vertex_groups[vi].order() {
            return Err(Error::InvalidGroup(format!("vertex {} has no element {g}", v.0)));
        }
        let p = self.tree_path_word(vi);
        let mut w = p.clone();
        self.push_element(&mut w, g);
        Ok(self.concat(&w, &self.path_inverse(&p)))
    }

    /// The image of `𝒢_v` in π₁.
    pub fn vertex_subgroup(&self, v: VertexId) -> Result<Vec<PathWord>> {
        let n = self.gog.vertex_group(v)?.order();
        let mut out = (0..n).map(|g| self.vertex_element(v, g)).collect::<Result<Vec<_>>>()?;
        out.sort();
        Ok(out)
    }

    /// `p_{o(e)} · e · p_{t(e)}⁻¹`; a stable letter when `e` lies outside the
    /// spanning tree, trivial otherwise.
    pub fn edge_letter(&self, e: EdgeId) -> Result<PathWord> {
        let ei = self.gog.edge_index(e)?;
        let edge = &self.gog.edges[ei];
        let mut w = self.tree_path_word(edge.o);
        self.push_edge(&mut w, ei);
        Ok(self.concat(&w, &self.path_inverse(&self.tree_path_word(edge.t))))
    }

    /// Stabilizer `p ι_ē(𝒢_e) p⁻¹` of the base lift of `e`, with `p = p_{o(e)}`.
    pub fn edge_subgroup(&self, e: EdgeId) -> Result<Vec<PathWord>> {
        let ei = self.gog.edge_index(e)?;
        let edge = &self.gog.edges[ei];
        let p = self.tree_path_word(edge.o);
        let p_inv = self.path_inverse(&p);
        let mut out: Vec<PathWord> = self.gog.edges[edge.inv]
            .embedding
            .iter()
            .map(|&g| {
                let mut w = p.clone();
                self.push_element(&mut w, g);
                self.concat(&w, &p_inv)
            })
            .collect();
        out.sort();
        Ok(out)
    }

    pub fn stable_letters(&self) -> Vec<EdgeId> {
        self.data.stable_edges.iter().map(|&e| self.gog.edges[e].id).collect()
    }

    pub fn is_tree_edge(&self, e: EdgeId) -> Result<bool> {
        Ok(self.data.tree_edge[self.gog.edge_index(e)?])
    }

    /// Parses a product of tokens: `v<id>:<g>` for a vertex-group element,
    /// `t<id>` / `T<id>` for the edge letter of edge `id` and its inverse.
    /// `ε`, `1` or the empty string give the identity.
    pub fn parse(&self, text: &str) -> Result<PathWord> {
        let mut w = self.identity();
        for token in text.split(|c: char| c.is_whitespace() || c == '·' || c == '*') {
            if token.is_empty() || token == "ε" || token == "1" {
                continue;
            }
            let bad = || Error::UnknownLetter(token.to_string());
            let x = if let Some(rest) = token.strip_prefix('v') {
                let (v, g) = rest.split_once(':').ok_or_else(bad)?;
                let v: u64 = v.parse().map_err(|_| bad())?;
                let g: usize = g.parse().map_err(|_| bad())?;
                self.vertex_element(VertexId(v), g)?
            } else if let Some(rest) = token.strip_prefix('t') {
                self.edge_letter(EdgeId(rest.parse().map_err(|_| bad())?))?
            } else if let Some(rest) = token.strip_prefix('T') {
                self.inv(&self.edge_letter(EdgeId(rest.parse().map_err(|_| bad())?))?)
            } else {
                return Err(bad());
            };
            w = self.mul(&w, &x);
        }
        Ok(w)
    }

    /// Raw path rendering: `g<i>` for vertex-group elements, `e<id>` for
    /// edges, identities omitted.
    pub fn render_path(&self, w: &PathWord) -> String {
        let mut parts = Vec::new();
        for s in &w.steps {
            let e = &self.gog.edges[s.edge as usize];
            if s.rep as usize != self.gog.vertex_groups[e.o].identity_index() {
                parts.push(format!("g{}", s.rep));
            }
            parts.push(format!("e{}", e.id.0));
        }
        if w.tail as usize != self.gog.vertex_groups[self.vid(w)].identity_index() {
            parts.push(format!("g{}", w.tail));
        }
        if parts.is_empty() {
            "ε".into()
        } else {
            parts.join("·")
        }
    }

    // ---- the Bass-Serre tree ----

    pub fn tree_root(&self) -> TreeVertex {
        self.empty_at(0)
    }

    /// The tree vertex `g·𝒢_v` named by a path word.
    pub fn tree_vertex(&self, w: &PathWord) -> TreeVertex {
        let v = self.vid(w);
        PathWord { start: w.start, steps: w.steps.clone(), tail: self.gog.vertex_groups[v].identity_index() as u32 }
    }

    pub fn act(&self, g: &PathWord, x: &TreeVertex) -> TreeVertex {
        self.tree_vertex(&self.concat(g, x))
    }

    /// Neighbours of `x` one step further from the root.
    pub fn tree_children(&self, x: &TreeVertex) -> Vec<TreeVertex> {
        let v = self.vid(x);
        let back = x.steps.last().map(|s| self.gog.edges[s.edge as usize].inv);
        let mut out = Vec::new();
        for (ei, e) in self.gog.edges.iter().enumerate() {
            if e.o != v {
                continue;
            }
            for &r in &self.data.transversals[ei].reps {
                if Some(ei) == back && r == self.gog.vertex_groups[v].identity_index() {
                    continue;
                }
                let mut c = x.clone();
                c.steps.push(Step { rep: r as u32, edge: ei as u32 });
                c.tail = self.gog.vertex_groups[e.t].identity_index() as u32;
                out.push(c);
            }
        }
        out
    }

    /// Parent of a non-root tree vertex.
    pub fn tree_parent(&self, x: &TreeVertex) -> Option<TreeVertex> {
        let mut p = x.clone();
        p.steps.pop()?;
        p.tail = self.gog.vertex_groups[self.vid(&p)].identity_index() as u32;
        Some(p)
    }

    pub fn tree_distance(&self, x: &TreeVertex, y: &TreeVertex) -> usize {
        let common = common_prefix(x, y);
        x.steps.len() + y.steps.len() - 2 * common
    }

    /// Oriented tree edges along the geodesic from `x` to `y`, as
    /// `(from, to)` vertex pairs.
    pub fn tree_geodesic(&self, x: &TreeVertex, y: &TreeVertex) -> Vec<(TreeVertex, TreeVertex)> {
        let common = common_prefix(x, y);
        let mut out = Vec::new();
        let mut cur = x.clone();
        while cur.steps.len() > common {
            let p = self.tree_parent(&cur).unwrap();
            out.push((cur, p.clone()));
            cur = p;
        }
        for k in common..y.steps.len() {
            let mut next = cur.clone();
            next.steps.push(y.steps[k]);
            next.tail = self.gog.vertex_groups[self.vid(&next)].identity_index() as u32;
            out.push((cur, next.clone()));
            cur = next;
        }
        out
    }

    /// Λ-edge covered by the tree edge from `x` to its neighbour `y`.
    pub fn tree_edge_label(&self, x: &TreeVertex, y: &TreeVertex) -> Option<EdgeId> {
        if y.steps.len() == x.steps.len() + 1 && y.steps.starts_with(&x.steps) {
            Some(self.gog.edges[y.steps.last()?.edge as usize].id)
        } else if x.steps.len() == y.steps.len() + 1 && x.steps.starts_with(&y.steps) {
            let e = &self.gog.edges[x.steps.last()?.edge as usize];
            Some(self.gog.edges[e.inv].id)
        } else {
            None
        }
    }

    /// Endpoints `(P, Q)` of the lift of `e` starting at `p_{o(e)}`.
    pub fn base_lift(&self, e: EdgeId) -> Result<(TreeVertex, TreeVertex)> {
        let ei = self.gog.edge_index(e)?;
        let p = self.tree_path_word(self.gog.edges[ei].o);
        let mut q = p.clone();
        self.push_edge(&mut q, ei);
        Ok((self.tree_vertex(&p), self.tree_vertex(&q)))
    }

    /// Path word of a tree vertex as an element of π₁ ending back at the base
    /// vertex along the spanning tree.
    pub fn tree_vertex_element(&self, x: &TreeVertex) -> PathWord {
        self.concat(x, &self.path_inverse(&self.tree_path_word(self.vid(x))))
    }

    pub fn tree_truncation(&self, radius: usize, cap: usize) -> Result<TreeTruncation> {
        let mut labels = vec![self.tree_root()];
        let mut depth = vec![0usize];
        let mut parent: Vec<Option<usize>> = vec![None];
        let mut frontier = vec![0usize];
        for d in 1..=radius {
            let mut next = Vec::new();
            for &i in &frontier {
                let mut kids = self.tree_children(&labels[i]);
                kids.sort();
                for c in kids {
                    if labels.len() >= cap {
                        return Err(Error::BudgetExceeded { cap });
                    }
                    next.push(labels.len());
                    labels.push(c);
                    depth.push(d);
                    parent.push(Some(i));
                }
            }
            frontier = next;
        }
        let mut b = SerreGraph::builder();
        let mut edge_labels = BTreeMap::new();
        for i in 0..labels.len() {
            b.vertex(VertexId(i as u64));
        }
        for (i, p) in parent.iter().enumerate() {
            let Some(p) = *p else { continue };
            let e = labels[i].steps.last().unwrap().edge as usize;
            let (pos, neg) = (EdgeId(2 * i as u64), EdgeId(2 * i as u64 + 1));
            let (pi, ii) = (VertexId(p as u64), VertexId(i as u64));
            if self.gog.is_positive(e) {
                b.edge_pair(pos, neg, pi, ii);
                edge_labels.insert(pos, self.gog.edges[e].id);
                edge_labels.insert(neg, self.gog.edges[self.gog.edges[e].inv].id);
            } else {
                b.edge_pair(pos, neg, ii, pi);
                edge_labels.insert(pos, self.gog.edges[self.gog.edges[e].inv].id);
                edge_labels.insert(neg, self.gog.edges[e].id);
            }
        }
        let lambda_vertex = labels.iter().map(|w| self.end_vertex(w)).collect();
        Ok(TreeTruncation { graph: b.build()?, labels, depth, lambda_vertex, edge_labels, radius })
    }

    /// δ and augmentation of the truncation at `radius`, checked exact.
    pub fn exactness_on_truncation(&self, radius: usize, cap: usize) -> Result<ExactnessCertificate> {
        let t = self.tree_truncation(radius, cap)?;
        let delta = delta_matrix(&t.graph);
        let check = verify_short_exact(&delta.matrix, &augmentation(t.graph.vertex_count()))?;
        Ok(ExactnessCertificate {
            radius,
            vertices: t.graph.vertex_count(),
            geometric_edges: t.graph.geometric_edge_count(),
            is_tree: t.graph.is_tree_combinatorial(),
            check,
        })
    }

    pub fn tree_dot(&self, t: &TreeTruncation) -> String {
        t.graph.to_dot("bass_serre_tree", |v| {
            let i = v.0 as usize;
            Some(format!(
                "label=\"{} [v{}]\"",
                self.render_path(&t.labels[i]),
                t.lambda_vertex[i].0
            ))
        })
    }
}

fn common_prefix(x: &PathWord, y: &PathWord) -> usize {
    x.steps.iter().zip(&y.steps).take_while(|(a, b)| a == b).count()
}

/// Finite subtree of the universal covering tree around the base vertex.
#[derive(Clone, Debug)]
pub struct TreeTruncation {
    /// Vertices are `0..n` in BFS order; the edge into vertex `i` is the pair
    /// `2i`, `2i+1`, with `2i` along the positive Λ-orientation.
    pub graph: SerreGraph,
    pub labels: Vec<TreeVertex>,
    pub depth: Vec<usize>,
    /// Λ-vertex whose group stabilizes (a conjugate of) each tree vertex.
    pub lambda_vertex: Vec<VertexId>,
    pub edge_labels: BTreeMap<EdgeId, EdgeId>,
    pub radius: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExactnessCertificate {
    pub radius: usize,
    pub vertices: usize,
    pub geometric_edges: usize,
    pub is_tree: bool,
    pub check: ShortExactCheck,
}

impl ExactnessCertificate {
    pub fn passed(&self) -> bool {
        self.is_tree && self.check.exact
    }
}

impl Group for FundamentalGroup {
    type Elem = PathWord;

    fn identity(&self) -> PathWord {
        self.empty_at(0)
    }

    fn mul(&self, a: &PathWord, b: &PathWord) -> PathWord {
        self.concat(a, b)
    }

    fn inv(&self, a: &PathWord) -> PathWord {
        self.path_inverse(a)
    }

    fn generators(&self) -> Vec<PathWord> {
        let mut out = Vec::new();
        for (vi, v) in self.gog.vertex_ids.iter().enumerate() {
            let g = &self.gog.vertex_groups[vi];
            for x in (0..g.order()).filter(|&x| x != g.identity_index()) {
                out.push(self.vertex_element(*v, x).expect("valid vertex"));
            }
        }
        for &e in &self.data.stable_edges {
            let t = self.edge_letter(self.gog.edges[e].id).expect("valid edge");
            out.push(self.inv(&t));
            out.push(t);
        }
        out
    }

    fn render(&self, a: &PathWord) -> String {
        self.render_path(a)
    }
}

/// Ready-made graphs of groups.
impl GraphOfFiniteGroups {
    /// Segment `A -C- B`; `into_a`, `into_b` embed `C`.
    pub fn amalgam(a: FiniteGroup, b: FiniteGroup, c: FiniteGroup, into_a: Vec<usize>, into_b: Vec<usize>) -> Result<Self> {
        GraphOfFiniteGroups::builder().vertex(0, a).vertex(1, b).edge(0, 1, 0, 1, c, into_b, into_a).build()
    }

    /// Loop at a vertex with group `h`; `into_t = ι_e`, `into_o = ι_ē`.
    pub fn hnn(h: FiniteGroup, c: FiniteGroup, into_t: Vec<usize>, into_o: Vec<usize>) -> Result<Self> {
        GraphOfFiniteGroups::builder().vertex(0, h).edge(0, 1, 0, 0, c, into_t, into_o).build()
    }

    pub fn single_vertex(g: FiniteGroup) -> Result<Self> {
        GraphOfFiniteGroups::builder().vertex(0, g).build()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_spec()).expect("serializable")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    #[test]
    fn validate_examples() {
        let single = GraphOfFiniteGroups::single_vertex(FiniteGroup::cyclic(2)).unwrap();
        let g = FundamentalGroup::new(single).unwrap();
        assert_eq!(g.vertex_subgroup(VertexId(0)).unwrap().len(), 2);

        let onto = GraphOfFiniteGroups::amalgam(
            FiniteGroup::cyclic(4),
            FiniteGroup::cyclic(2),
            FiniteGroup::cyclic(2),
            vec![0, 2],
            vec![0, 1],
        )
        .unwrap();
        assert!(onto.validate().is_ok());
        assert_eq!(onto.splitting_classify().overall, SplittingClass::TrivialAt(EdgeId(0)));

        let c2c3 = presets::gog_c2_c3();
        assert!(c2c3.validate().is_ok());
    }

    #[test]
    fn validate_rejects_bad_embeddings() {
        let not_hom = GraphOfFiniteGroups::amalgam(
            FiniteGroup::cyclic(4),
            FiniteGroup::cyclic(4),
            FiniteGroup::cyclic(2),
            vec![0, 1],
            vec![0, 2],
        )
        .unwrap();
        assert!(matches!(not_hom.validate(), Err(Error::BadEmbedding { reason, .. }) if reason.contains("homomorphism")));
        let not_inj = GraphOfFiniteGroups::amalgam(
            FiniteGroup::cyclic(4),
            FiniteGroup::cyclic(4),
            FiniteGroup::cyclic(2),
            vec![0, 0],
            vec![0, 2],
        )
        .unwrap();
        assert!(matches!(not_inj.validate(), Err(Error::BadEmbedding { reason, .. }) if reason.contains("injective")));
        let disconnected = GraphOfFiniteGroups::builder()
            .vertex(0, FiniteGroup::cyclic(2))
            .vertex(1, FiniteGroup::cyclic(2))
            .build()
            .unwrap();
        assert!(matches!(disconnected.validate(), Err(Error::InvalidGraphOfGroups(_))));
    }

    #[test]
    fn multiplication_examples() {
        let d = presets::fundamental(presets::gog_d_infinity());
        let x = d.parse("v0:1").unwrap();
        assert_eq!(d.mul(&x, &x), d.identity());

        let z = presets::fundamental(presets::gog_z());
        let t = z.parse("t0").unwrap();
        let power = |n: i32| {
            let base = if n >= 0 { t.clone() } else { z.inv(&t) };
            (0..n.unsigned_abs()).fold(z.identity(), |acc, _| z.mul(&acc, &base))
        };
        for n in -3..=3 {
            for m in -3..=3 {
                assert_eq!(z.mul(&power(n), &power(m)), power(n + m));
            }
        }

        let g = presets::fundamental(presets::gog_c2_c3());
        let ab = g.parse("v0:1 v1:1").unwrap();
        let bba = g.parse("v1:2 v0:1").unwrap();
        assert_eq!(g.mul(&ab, &bba), g.identity());
    }

    #[test]
    fn tree_truncation_examples() {
        let d = presets::fundamental(presets::gog_d_infinity());
        let t = d.tree_truncation(3, 10_000).unwrap();
        assert_eq!(t.graph.vertex_count(), 7);
        assert!(t.graph.is_tree_combinatorial());
        assert!(t.graph.vertices().iter().all(|&v| t.graph.star(v).unwrap().len() <= 2));

        let g = presets::fundamental(presets::gog_c2_c3());
        let t = g.tree_truncation(2, 10_000).unwrap();
        for (i, v) in t.graph.vertices().iter().enumerate() {
            if t.depth[i] < 2 {
                let expected = if t.lambda_vertex[i] == VertexId(0) { 2 } else { 3 };
                assert_eq!(t.graph.star(*v).unwrap().len(), expected);
            }
        }
        let single = FundamentalGroup::new(GraphOfFiniteGroups::single_vertex(FiniteGroup::cyclic(5)).unwrap()).unwrap();
        assert_eq!(single.tree_truncation(4, 100).unwrap().graph.vertex_count(), 1);
    }

    #[test]
    fn splitting_examples() {
        assert_eq!(presets::gog_d_infinity().splitting_classify().overall, SplittingClass::NontrivialS1);
        assert_eq!(presets::gog_z().splitting_classify().overall, SplittingClass::NontrivialS2);
        let single = GraphOfFiniteGroups::single_vertex(FiniteGroup::cyclic(3)).unwrap();
        assert_eq!(single.splitting_classify().overall, SplittingClass::NoEdge);
    }

    #[test]
    fn splitting_sees_through_collapsible_sides() {
        // C₂ -C₂- C₄ -C₂- C₂: the middle edges are onto at the ends.
        let gog = GraphOfFiniteGroups::builder()
            .vertex(0, FiniteGroup::cyclic(2))
            .vertex(1, FiniteGroup::cyclic(4))
            .vertex(2, FiniteGroup::cyclic(2))
            .edge(0, 1, 0, 1, FiniteGroup::cyclic(2), vec![0, 2], vec![0, 1])
            .edge(2, 3, 1, 2, FiniteGroup::cyclic(2), vec![0, 1], vec![0, 2])
            .build()
            .unwrap();
        let report = gog.splitting_classify();
        assert_eq!(report.per_edge, vec![
            (EdgeId(0), SplittingClass::TrivialAt(EdgeId(0))),
            (EdgeId(2), SplittingClass::TrivialAt(EdgeId(2))),
        ]);
    }

    #[test]
    fn exactness_examples() {
        for gog in [presets::gog_d_infinity(), presets::gog_c2_c3()] {
            let g = presets::fundamental(gog);
            for r in 1..=3 {
                assert!(g.exactness_on_truncation(r, 10_000).unwrap().passed());
            }
        }
        let single = FundamentalGroup::new(GraphOfFiniteGroups::single_vertex(FiniteGroup::cyclic(5)).unwrap()).unwrap();
        let cert = single.exactness_on_truncation(1, 100).unwrap();
        assert!(cert.passed());
        assert_eq!((cert.vertices, cert.geometric_edges), (1, 0));
    }

    #[test]
    fn base_vertex_stabilizer_is_the_vertex_group() {
        let g = presets::fundamental(presets::gog_c4_c4_over_c2());
        let ball = crate::group::ball_enumerate(&g, &g.generators(), 3, 100_000).unwrap();
        let root = g.tree_root();
        let mut stab: Vec<PathWord> = ball.elements.iter().filter(|x| g.act(x, &root) == root).cloned().collect();
        stab.sort();
        assert_eq!(stab, g.vertex_subgroup(VertexId(0)).unwrap());
    }

    #[test]
    fn spec_round_trip() {
        let gog = presets::gog_c4_c4_over_c2();
        let spec = gog.to_spec();
        let json = serde_json::to_string(&spec).unwrap();
        let back: GogSpec = serde_json::from_str(&json).unwrap();
        let again = GraphOfFiniteGroups::from_spec(&back).unwrap();
        assert_eq!(again.splitting_classify(), gog.splitting_classify());
        assert_eq!(again.to_spec(), spec);
    }
}

//! Almost invariant subsets of `G/K`, their derivations, and the passage
//! between such sets and cuts of the rough Cayley graph.
//!
//! Splitting-derived witnesses live on the Bass-Serre tree: for the base
//! lift `ẽ₀ = (P, Q)` of a marked edge, `T⁺` is the half-tree on the side of
//! `Q` together with `ẽ₀`, and `B = {gK : g⁻¹ẽ₀ ∈ T⁺}` with `K` the
//! stabilizer of `ẽ₀`.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::Serialize;

use crate::bass_serre::{FundamentalGroup, PathWord, TreeVertex};
use crate::cayley::{GeneratingPair, RoughCayleyTruncation};
use crate::ends::{coboundary, escaping_components, Cut};
use crate::error::{Error, Result};
use crate::graph::EdgeId;
use crate::group::Group;

/// A subset `B ⊆ G/K` given by a membership test on coset labels, with a
/// declared finite superset of `sB Δ B` for each `s` of the pair.
pub trait CosetSet<G: Group> {
    fn contains(&self, group: &G, coset: &G::Elem) -> bool;
    fn declared_difference(&self, s_index: usize) -> &[G::Elem];
}

/// A coset set built from a closure and explicit declarations.
pub struct FnSet<E, F> {
    pub membership: F,
    pub declared: Vec<Vec<E>>,
}

impl<G: Group, F: Fn(&G::Elem) -> bool> CosetSet<G> for FnSet<G::Elem, F> {
    fn contains(&self, _group: &G, coset: &G::Elem) -> bool {
        (self.membership)(coset)
    }

    fn declared_difference(&self, s_index: usize) -> &[G::Elem] {
        self.declared.get(s_index).map(|v| v.as_slice()).unwrap_or(&[])
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvarianceFailure {
    pub kind: String,
    pub element: String,
    pub coset: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AlmostInvarianceReport {
    pub cosets_checked: usize,
    pub k_elements: usize,
    pub generators: usize,
    /// `|(sB Δ B) ∩ ball|` per generator.
    pub observed_differences: Vec<usize>,
    pub failures: Vec<InvarianceFailure>,
    pub passed: bool,
}

/// Checks `kB ∩ ball = B ∩ ball` for all `k ∈ K` and
/// `(sB Δ B) ∩ ball ⊆ declared(s)` for all `s ∈ S`.
pub fn check_almost_invariance<G: Group, B: CosetSet<G>>(
    group: &G,
    pair: &GeneratingPair<G::Elem>,
    set: &B,
    ball: &[G::Elem],
) -> AlmostInvarianceReport {
    let mut failures = Vec::new();
    let member: Vec<bool> = ball.iter().map(|x| set.contains(group, x)).collect();
    for k in pair.k() {
        let k_inv = group.inv(k);
        for (x, &bx) in ball.iter().zip(&member) {
            if set.contains(group, &pair.canon(group, &group.mul(&k_inv, x))) != bx {
                failures.push(InvarianceFailure {
                    kind: "k".into(),
                    element: group.render(k),
                    coset: group.render(x),
                });
            }
        }
    }
    let mut observed = Vec::new();
    for (si, s) in pair.s().iter().enumerate() {
        let s_inv = group.inv(s);
        let declared: HashSet<&G::Elem> = set.declared_difference(si).iter().collect();
        let mut count = 0;
        for (x, &bx) in ball.iter().zip(&member) {
            if set.contains(group, &pair.canon(group, &group.mul(&s_inv, x))) != bx {
                count += 1;
                if !declared.contains(x) {
                    failures.push(InvarianceFailure {
                        kind: "s".into(),
                        element: group.render(s),
                        coset: group.render(x),
                    });
                }
            }
        }
        observed.push(count);
    }
    AlmostInvarianceReport {
        cosets_checked: ball.len(),
        k_elements: pair.k().len(),
        generators: pair.s().len(),
        observed_differences: observed,
        passed: failures.is_empty(),
        failures,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Dh1Class {
    /// `B` and its complement both reach the outer sphere.
    Nonzero,
    /// `B` is finite or cofinite at the probe scale.
    ZeroAtScale,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Dh1Certificate {
    pub radius: usize,
    pub exhausted: bool,
    pub b_on_sphere: usize,
    pub complement_on_sphere: usize,
    pub class: Dh1Class,
    /// Order of `K`: the level of the permutation module the class lives in.
    pub level_order: usize,
    /// Level maps are injective, so a nonzero class at level `K` survives in
    /// the direct limit over all levels.
    pub survives_in_limit: bool,
}

/// Certifies that `χ_B` is not almost equal to a constant plus a finitely
/// supported `K`-invariant function, by exhibiting both `B` and its
/// complement on the outer sphere of `t`.
pub fn dh1_nonvanishing_certificate<G: Group, B: CosetSet<G>>(
    group: &G,
    pair: &GeneratingPair<G::Elem>,
    set: &B,
    report: &AlmostInvarianceReport,
    t: &RoughCayleyTruncation<G::Elem>,
) -> Result<Dh1Certificate> {
    if !report.passed {
        return Err(Error::ImproperWitness(format!("{} almost-invariance failures", report.failures.len())));
    }
    if !t.built_over(pair) {
        return Err(Error::PairMismatch);
    }
    let sphere = if t.exhausted { Vec::new() } else { t.sphere(t.radius) };
    let b_on_sphere = sphere.iter().filter(|&&i| set.contains(group, &t.labels[i])).count();
    let complement_on_sphere = sphere.len() - b_on_sphere;
    let class = if b_on_sphere > 0 && complement_on_sphere > 0 { Dh1Class::Nonzero } else { Dh1Class::ZeroAtScale };
    Ok(Dh1Certificate {
        radius: t.radius,
        exhausted: t.exhausted,
        b_on_sphere,
        complement_on_sphere,
        class,
        level_order: pair.k().len(),
        survives_in_limit: class == Dh1Class::Nonzero,
    })
}

/// Finitely supported function on `G/K` with integer values.
pub type SparseVector<E> = BTreeMap<E, i64>;

/// `d(g) = g·χ_B − χ_B` evaluated on `support`, which must contain
/// `gB Δ B`; zero entries are dropped.
pub fn derivation_value<G: Group, B: CosetSet<G>>(
    group: &G,
    pair: &GeneratingPair<G::Elem>,
    set: &B,
    g: &G::Elem,
    support: &[G::Elem],
) -> SparseVector<G::Elem> {
    let g_inv = group.inv(g);
    let mut out = BTreeMap::new();
    for x in support {
        let x = pair.canon(group, x);
        let v = set.contains(group, &pair.canon(group, &group.mul(&g_inv, &x))) as i64 - set.contains(group, &x) as i64;
        if v != 0 {
            out.insert(x, v);
        }
    }
    out
}

/// Left translate `g·f`.
pub fn translate<G: Group>(
    group: &G,
    pair: &GeneratingPair<G::Elem>,
    g: &G::Elem,
    f: &SparseVector<G::Elem>,
) -> SparseVector<G::Elem> {
    f.iter().map(|(x, v)| (pair.canon(group, &group.mul(g, x)), *v)).collect()
}

pub fn add<E: Ord + Clone>(a: &SparseVector<E>, b: &SparseVector<E>) -> SparseVector<E> {
    let mut out = a.clone();
    for (x, v) in b {
        let e = out.entry(x.clone()).or_insert(0);
        *e += v;
        if *e == 0 {
            out.remove(x);
        }
    }
    out
}

/// Result of transporting a witness to a cut of the rough Cayley graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CutFromWitness {
    /// Truncation vertices `gK` with `g⁻¹K ∈ B`.
    pub c_b: Vec<usize>,
    /// Oriented edges with exactly one endpoint in `C_B`.
    pub coboundary: Vec<EdgeId>,
    pub bound: usize,
    /// `true` when `K` is normalized and the sharp bound `Σ_s |cert_s|` applies.
    pub sharp_bound: bool,
    pub within_bound: bool,
    /// Escaping components after deleting all endpoints of the coboundary.
    pub escaping_after_removal: usize,
    pub cut: Option<Cut>,
}

/// Restricts `C_B = {gK : g⁻¹K ∈ B}` to `t` and computes its coboundary.
pub fn cut_from_witness<G: Group, B: CosetSet<G>>(
    group: &G,
    pair: &GeneratingPair<G::Elem>,
    set: &B,
    t: &RoughCayleyTruncation<G::Elem>,
) -> Result<CutFromWitness> {
    if !t.built_over(pair) {
        return Err(Error::PairMismatch);
    }
    let in_c: Vec<bool> = t.labels.iter().map(|g| set.contains(group, &pair.canon(group, &group.inv(g)))).collect();
    let c_b: BTreeSet<usize> = (0..t.len()).filter(|&i| in_c[i]).collect();
    let delta = coboundary(t, &c_b);
    let sharp_bound = pair.k_is_normal();
    let bound = if sharp_bound {
        (0..pair.s().len()).map(|i| set.declared_difference(i).len()).sum()
    } else {
        pair.k().len() * pair.double_coset_reps().iter().map(|(_, si)| set.declared_difference(*si).len()).sum::<usize>()
    };
    let mut removed = BTreeSet::new();
    for &e in &delta {
        removed.insert(t.graph.origin(e).unwrap().0 as usize);
        removed.insert(t.graph.terminus(e).unwrap().0 as usize);
    }
    let comps = escaping_components(t, &removed)?;
    let escaping_after_removal = comps.iter().filter(|c| c.escaping).count();
    let inside = comps.iter().find(|c| c.escaping && in_c[c.vertices[0]]);
    let outside = comps.iter().any(|c| c.escaping && !in_c[c.vertices[0]]);
    let cut = inside.map(|c| {
        let set: BTreeSet<usize> = c.vertices.iter().copied().collect();
        Cut {
            vertices: c.vertices.clone(),
            coboundary: coboundary(t, &set),
            escaping: true,
            complement_escaping: outside,
            probe_radius: 0,
        }
    });
    Ok(CutFromWitness {
        c_b: c_b.into_iter().collect(),
        within_bound: delta.len() <= bound,
        coboundary: delta,
        bound,
        sharp_bound,
        escaping_after_removal,
        cut,
    })
}

/// Declared superset of `sB Δ B` for one generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DifferenceCertificate {
    pub generator: PathWord,
    /// Length of the tree geodesic from `P` to `s·P`.
    pub geodesic_len: usize,
    pub cosets: Vec<PathWord>,
}

/// Images of the base edge's endpoints under each `k ∈ K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KOrbitRow {
    pub k: PathWord,
    pub fixes_p: bool,
    pub fixes_q: bool,
}

/// Half-tree witness for the marked edge of a nontrivial splitting.
#[derive(Clone, Debug)]
pub struct AIWitness {
    group: FundamentalGroup,
    edge: EdgeId,
    p: TreeVertex,
    q: TreeVertex,
    pair: GeneratingPair<PathWord>,
    certificates: Vec<DifferenceCertificate>,
    k_orbits: Vec<KOrbitRow>,
}

impl AIWitness {
    /// Builds the witness for `edge` with `K` its stabilizer and `S` the
    /// backend's generators outside `K` (or `s` when given), symmetrized.
    pub fn from_splitting(group: &FundamentalGroup, edge: EdgeId, s: Option<Vec<PathWord>>) -> Result<AIWitness> {
        let gog = group.gog();
        let inverse = gog.base_graph().inverse(edge).ok_or(Error::UnknownEdge(edge.0))?;
        let rep = edge.min(inverse);
        let class = gog
            .splitting_classify()
            .per_edge
            .into_iter()
            .find(|(e, _)| *e == rep)
            .map(|(_, c)| c)
            .ok_or(Error::UnknownEdge(edge.0))?;
        if !class.is_nontrivial() {
            return Err(Error::TrivialSplitting(edge.0));
        }
        let k = group.edge_subgroup(edge)?;
        let s = s.unwrap_or_else(|| group.generators());
        let pair = GeneratingPair::symmetrized(group, k, s)?;
        let (p, q) = group.base_lift(edge)?;
        let k_orbits = pair
            .k()
            .iter()
            .map(|k| KOrbitRow { k: k.clone(), fixes_p: group.act(k, &p) == p, fixes_q: group.act(k, &q) == q })
            .collect();
        let mut w = AIWitness { group: group.clone(), edge, p, q, pair, certificates: Vec::new(), k_orbits };
        w.certificates = w
            .pair
            .s()
            .iter()
            .map(|s| {
                let (geodesic_len, cosets) = w.difference_support(s);
                DifferenceCertificate { generator: s.clone(), geodesic_len, cosets }
            })
            .collect();
        Ok(w)
    }

    pub fn group(&self) -> &FundamentalGroup {
        &self.group
    }

    pub fn edge(&self) -> EdgeId {
        self.edge
    }

    pub fn pair(&self) -> &GeneratingPair<PathWord> {
        &self.pair
    }

    pub fn base_edge(&self) -> (&TreeVertex, &TreeVertex) {
        (&self.p, &self.q)
    }

    pub fn certificates(&self) -> &[DifferenceCertificate] {
        &self.certificates
    }

    pub fn k_orbits(&self) -> &[KOrbitRow] {
        &self.k_orbits
    }

    /// Every `k ∈ K` fixes both endpoints of `ẽ₀`, so `B` is well defined
    /// on cosets and `kB = B`.
    pub fn k_fixes_base_edge(&self) -> bool {
        self.k_orbits.iter().all(|r| r.fixes_p && r.fixes_q)
    }

    fn on_plus_side(&self, x: &TreeVertex) -> bool {
        self.group.tree_distance(x, &self.q) < self.group.tree_distance(x, &self.p)
    }

    /// Whether the tree edge `(x, y)` lies in `T⁺`.
    pub fn edge_in_half_tree(&self, x: &TreeVertex, y: &TreeVertex) -> bool {
        (*x == self.p && *y == self.q) || (self.on_plus_side(x) && self.on_plus_side(y))
    }

    /// Membership of the coset `gK`.
    pub fn contains(&self, g: &PathWord) -> bool {
        let g_inv = self.group.inv(g);
        self.edge_in_half_tree(&self.group.act(&g_inv, &self.p), &self.group.act(&g_inv, &self.q))
    }

    /// An element `h` with `h·ẽ₀ = (x, y)`, for a lift `(x, y)` of the marked
    /// edge.
    fn translator(&self, x: &TreeVertex, y: &TreeVertex) -> PathWord {
        let mut w = x.clone();
        if y.steps.len() == x.steps.len() + 1 {
            w.tail = y.steps.last().unwrap().rep;
        }
        let h = self.group.concat(&w, &self.group.path_inverse(&self.p));
        debug_assert_eq!(self.group.act(&h, &self.q), *y);
        h
    }

    /// Cosets `hK` with `h·ẽ₀` on the geodesic from `P` to `g·P`, plus `K`
    /// and `gK`; contains `gB Δ B`.
    pub fn difference_support(&self, g: &PathWord) -> (usize, Vec<PathWord>) {
        let grp = &self.group;
        let gp = grp.act(g, &self.p);
        let path = grp.tree_geodesic(&self.p, &gp);
        let mut out = BTreeSet::from([self.pair.canon(grp, &grp.identity()), self.pair.canon(grp, g)]);
        let label = self.edge;
        for (x, y) in &path {
            let h = if grp.tree_edge_label(x, y) == Some(label) {
                Some(self.translator(x, y))
            } else if grp.tree_edge_label(y, x) == Some(label) {
                Some(self.translator(y, x))
            } else {
                None
            };
            if let Some(h) = h {
                out.insert(self.pair.canon(grp, &h));
            }
        }
        (path.len(), out.into_iter().collect())
    }

    /// `d(g) = g·χ_B − χ_B` as an exact finitely supported vector.
    pub fn derivation(&self, g: &PathWord) -> SparseVector<PathWord> {
        let (_, support) = self.difference_support(g);
        derivation_value(&self.group, &self.pair, self, g, &support)
    }

    pub fn derivation_values(&self) -> Vec<(PathWord, SparseVector<PathWord>)> {
        self.pair.s().iter().map(|s| (s.clone(), self.derivation(s))).collect()
    }

    pub fn to_json(&self) -> WitnessJson {
        let g = &self.group;
        WitnessJson {
            edge: self.edge,
            k: self.pair.k().iter().map(|x| g.render(x)).collect(),
            s: self.pair.s().iter().map(|x| g.render(x)).collect(),
            base_edge: (g.render(&self.p), g.render(&self.q)),
            k_orbit_table: self
                .k_orbits
                .iter()
                .map(|r| KOrbitJson { k: g.render(&r.k), fixes_p: r.fixes_p, fixes_q: r.fixes_q })
                .collect(),
            differences: self
                .certificates
                .iter()
                .map(|c| DifferenceJson {
                    generator: g.render(&c.generator),
                    geodesic_len: c.geodesic_len,
                    cosets: c.cosets.iter().map(|x| g.render(x)).collect(),
                })
                .collect(),
        }
    }
}

impl CosetSet<FundamentalGroup> for AIWitness {
    fn contains(&self, _group: &FundamentalGroup, coset: &PathWord) -> bool {
        AIWitness::contains(self, coset)
    }

    fn declared_difference(&self, s_index: usize) -> &[PathWord] {
        &self.certificates[s_index].cosets
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct KOrbitJson {
    pub k: String,
    pub fixes_p: bool,
    pub fixes_q: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DifferenceJson {
    pub generator: String,
    pub geodesic_len: usize,
    pub cosets: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessJson {
    pub edge: EdgeId,
    pub k: Vec<String>,
    pub s: Vec<String>,
    pub base_edge: (String, String),
    pub k_orbit_table: Vec<KOrbitJson>,
    pub differences: Vec<DifferenceJson>,
}

//! Catalog of groups with expected verdicts, and the end-to-end checks run
//! over it: ends on every listed generating pair, splitting type, the
//! splitting → witness → cohomology class → cut chain, and exactness of the
//! tree resolution.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bass_serre::{FundamentalGroup, GraphOfFiniteGroups, SplittingClass};
use crate::cayley::RoughCayleyTruncation;
use crate::ends::{classify_ends, EndsClass, EndsEstimate};
use crate::error::{Error, Result};
use crate::graph::EdgeId;
use crate::group::FiniteGroup;
use crate::oracle::{OracleReport, OracleSpec};
use crate::presets;
use crate::spec::{resolve_pair, Backend, GroupSpec, PairSpec, SpecGroup, SubgroupSpec};
use crate::witness::{check_almost_invariance, cut_from_witness, dh1_nonvanishing_certificate, AIWitness, Dh1Class};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INCONSISTENT: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Scale {
    pub r_max: usize,
    #[serde(rename = "R")]
    pub big_r: usize,
    pub cap: usize,
    /// Radius of the truncation the witness is checked on.
    pub witness_radius: usize,
    /// Largest tree radius for the exactness check.
    pub exactness_radius: usize,
}

impl Default for Scale {
    fn default() -> Self {
        Scale { r_max: 3, big_r: 12, cap: 200_000, witness_radius: 8, exactness_radius: 4 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplittingKind {
    /// The graph has no edges.
    None,
    /// Every edge collapses.
    Trivial,
    S1,
    S2,
    /// Word backends carry no graph of groups.
    NotSupplied,
}

impl From<SplittingClass> for SplittingKind {
    fn from(c: SplittingClass) -> Self {
        match c {
            SplittingClass::NoEdge => SplittingKind::None,
            SplittingClass::TrivialAt(_) => SplittingKind::Trivial,
            SplittingClass::NontrivialS1 => SplittingKind::S1,
            SplittingClass::NontrivialS2 => SplittingKind::S2,
        }
    }
}

/// Where an expectation comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    /// A classical fact about the group.
    Literature,
    /// Predicted by the entry's oracle.
    Oracle,
    /// Holds by how the group is built.
    Construction,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expectation {
    pub ends: EndsClass,
    pub splitting: SplittingKind,
    pub witness: bool,
    pub source: Source,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    pub group: GroupSpec,
    #[serde(default)]
    pub pairs: Vec<PairSpec>,
    /// Edge carrying the witness; the first nontrivial edge when absent.
    #[serde(default)]
    pub marked_edge: Option<u64>,
    pub expected: Expectation,
    pub oracle: OracleSpec,
    #[serde(default)]
    pub scale: Option<Scale>,
}

impl CatalogEntry {
    pub fn pairs_or_default(&self) -> Vec<PairSpec> {
        if self.pairs.is_empty() {
            vec![PairSpec::default()]
        } else {
            self.pairs.clone()
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Catalog {
    #[serde(default)]
    pub scale: Scale,
    #[serde(default)]
    pub entries: Vec<CatalogEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairEnds {
    pub pair: usize,
    pub k_order: usize,
    pub generators: usize,
    pub estimate: Option<EndsEstimate>,
    pub error: Option<String>,
    pub budget_exceeded: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessOutcome {
    pub edge: u64,
    pub k_order: usize,
    pub radius: usize,
    pub almost_invariant: bool,
    pub failures: usize,
    pub class: Dh1Class,
    pub b_on_sphere: usize,
    pub complement_on_sphere: usize,
    pub coboundary: usize,
    pub bound: usize,
    pub within_bound: bool,
    pub escaping_after_removal: usize,
    /// All of the above hold: the class is nonzero and the cut separates.
    pub certified: bool,
}

/// Outcome of the three conditions on one entry: more than one end (`a`),
/// a nontrivial splitting over a finite group (`b`), a certified nonzero
/// class (`c`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquivalenceVerdict {
    pub name: String,
    pub scale: Scale,
    pub ends: Vec<PairEnds>,
    pub pair_invariant: bool,
    pub splitting: SplittingKind,
    pub marked_edge: Option<u64>,
    pub witness: Option<WitnessOutcome>,
    pub witness_error: Option<String>,
    pub oracle: Option<OracleReport>,
    pub oracle_error: Option<String>,
    pub a: Option<bool>,
    pub b: Option<bool>,
    pub c: bool,
    pub consistent: bool,
    pub matches_expectation: bool,
    pub budget_exceeded: bool,
    pub mismatches: Vec<String>,
    pub error: Option<String>,
}

impl EquivalenceVerdict {
    fn failed(name: &str, scale: Scale, e: &Error) -> EquivalenceVerdict {
        EquivalenceVerdict {
            name: name.into(),
            scale,
            ends: Vec::new(),
            pair_invariant: false,
            splitting: SplittingKind::NotSupplied,
            marked_edge: None,
            witness: None,
            witness_error: None,
            oracle: None,
            oracle_error: None,
            a: None,
            b: None,
            c: false,
            consistent: false,
            matches_expectation: false,
            budget_exceeded: e.is_budget(),
            mismatches: vec![e.to_string()],
            error: Some(e.to_string()),
        }
    }
}

fn ends_for_pairs<G: SpecGroup>(group: &G, pairs: &[PairSpec], scale: &Scale) -> Vec<PairEnds> {
    pairs
        .par_iter()
        .enumerate()
        .map(|(i, spec)| {
            let run = resolve_pair(group, spec).and_then(|pair| {
                let est = classify_ends(group, &pair, scale.r_max, scale.big_r, scale.cap)?;
                Ok((pair.k().len(), pair.s().len(), est))
            });
            match run {
                Ok((k_order, generators, est)) => PairEnds {
                    pair: i,
                    k_order,
                    generators,
                    estimate: Some(est),
                    error: None,
                    budget_exceeded: false,
                },
                Err(e) => PairEnds {
                    pair: i,
                    k_order: 0,
                    generators: 0,
                    estimate: None,
                    budget_exceeded: e.is_budget(),
                    error: Some(e.to_string()),
                },
            }
        })
        .collect()
}

/// Builds the half-tree witness on `edge` and runs the almost-invariance
/// check, the class certificate and the cut on one truncation.
pub fn witness_chain(group: &FundamentalGroup, edge: EdgeId, radius: usize, cap: usize) -> Result<WitnessOutcome> {
    let w = AIWitness::from_splitting(group, edge, None)?;
    let t = RoughCayleyTruncation::build(group, w.pair(), radius, cap)?;
    let report = check_almost_invariance(group, w.pair(), &w, &t.labels);
    let cert = dh1_nonvanishing_certificate(group, w.pair(), &w, &report, &t)?;
    let cut = cut_from_witness(group, w.pair(), &w, &t)?;
    let certified = report.passed && cert.class == Dh1Class::Nonzero && cut.within_bound && cut.escaping_after_removal >= 2;
    Ok(WitnessOutcome {
        edge: edge.0,
        k_order: w.pair().k().len(),
        radius,
        almost_invariant: report.passed,
        failures: report.failures.len(),
        class: cert.class,
        b_on_sphere: cert.b_on_sphere,
        complement_on_sphere: cert.complement_on_sphere,
        coboundary: cut.coboundary.len(),
        bound: cut.bound,
        within_bound: cut.within_bound,
        escaping_after_removal: cut.escaping_after_removal,
        certified,
    })
}

/// First edge (smallest id) whose splitting is nontrivial.
pub fn first_nontrivial_edge(gog: &GraphOfFiniteGroups) -> Option<EdgeId> {
    gog.splitting_classify().per_edge.into_iter().find(|(_, c)| c.is_nontrivial()).map(|(e, _)| e)
}

pub fn verify_theorem_astar(entry: &CatalogEntry, default_scale: &Scale) -> EquivalenceVerdict {
    let scale = entry.scale.unwrap_or(*default_scale);
    let backend = match Backend::from_spec(&entry.group) {
        Ok(b) => b,
        Err(e) => return EquivalenceVerdict::failed(&entry.name, scale, &e),
    };
    let pairs = entry.pairs_or_default();
    let (ends, oracle) = match &backend {
        Backend::Rewriting(g) => (ends_for_pairs(g, &pairs, &scale), entry.oracle.run_rewriting(g)),
        Backend::Gog(g) => (ends_for_pairs(g, &pairs, &scale), entry.oracle.run_gog(g.gog(), scale.big_r)),
    };
    let mut splitting = SplittingKind::NotSupplied;
    let mut marked_edge = None;
    let mut witness = None;
    let mut witness_error = None;
    let mut budget_exceeded = ends.iter().any(|p| p.budget_exceeded);
    if let Backend::Gog(g) = &backend {
        splitting = g.gog().splitting_classify().overall.into();
        let edge = entry.marked_edge.map(EdgeId).or_else(|| first_nontrivial_edge(g.gog()));
        marked_edge = edge.map(|e| e.0);
        if let Some(e) = edge {
            match witness_chain(g, e, scale.witness_radius, scale.cap) {
                Ok(w) => witness = Some(w),
                Err(err) => {
                    budget_exceeded |= err.is_budget();
                    witness_error = Some(err.to_string());
                }
            }
        }
    }

    let classes: Vec<Option<EndsClass>> = ends.iter().map(|p| p.estimate.as_ref().map(|e| e.verdict.class())).collect();
    let known: Vec<EndsClass> = classes.iter().flatten().copied().collect();
    let pair_invariant = known.windows(2).all(|w| w[0] == w[1]);
    let a = classes.first().copied().flatten().map(|c| matches!(c, EndsClass::Two | EndsClass::Many));
    let b = match splitting {
        SplittingKind::NotSupplied => None,
        SplittingKind::S1 | SplittingKind::S2 => Some(true),
        SplittingKind::None | SplittingKind::Trivial => Some(false),
    };
    let c = witness.as_ref().is_some_and(|w| w.certified);

    let mut consistent = pair_invariant;
    if let Some(a) = a {
        consistent &= !c || a;
        if let Some(b) = b {
            consistent &= a == b;
        }
    }
    match b {
        Some(true) => consistent &= c || budget_exceeded,
        Some(false) => consistent &= !c,
        None => {}
    }

    let expected = &entry.expected;
    let mut mismatches = Vec::new();
    for (p, class) in ends.iter().zip(&classes) {
        match class {
            Some(cl) if *cl != expected.ends => {
                mismatches.push(format!("pair {}: ends {:?}, expected {:?}", p.pair, cl, expected.ends))
            }
            None if !p.budget_exceeded => {
                mismatches.push(format!("pair {}: {}", p.pair, p.error.clone().unwrap_or_default()))
            }
            _ => {}
        }
    }
    if splitting != expected.splitting {
        mismatches.push(format!("splitting {:?}, expected {:?}", splitting, expected.splitting));
    }
    if c != expected.witness && !budget_exceeded {
        mismatches.push(format!("witness {}, expected {}", c, expected.witness));
    }
    let (oracle, oracle_error) = match oracle {
        Ok(r) => {
            if !r.faithful {
                mismatches.push(format!("oracle {} is not faithful", r.kind));
            }
            if r.predicted != expected.ends {
                mismatches.push(format!("oracle predicts {:?}, expected {:?}", r.predicted, expected.ends));
            }
            (Some(r), None)
        }
        Err(e) => {
            mismatches.push(format!("oracle: {e}"));
            (None, Some(e.to_string()))
        }
    };
    if !consistent {
        mismatches.push("conditions disagree".into());
    }

    EquivalenceVerdict {
        name: entry.name.clone(),
        scale,
        ends,
        pair_invariant,
        splitting,
        marked_edge,
        witness,
        witness_error,
        oracle,
        oracle_error,
        a,
        b,
        c,
        consistent,
        matches_expectation: mismatches.is_empty(),
        budget_exceeded,
        mismatches,
        error: None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExactnessRow {
    pub radius: usize,
    pub vertices: usize,
    pub geometric_edges: usize,
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TheoremBEvidence {
    pub name: String,
    pub rows: Vec<ExactnessRow>,
    /// Orders of the vertex groups, which are the tree's vertex stabilizers.
    pub vertex_group_orders: BTreeMap<u64, usize>,
    pub passed: bool,
}

/// Exactness of `0 → ℚ[E⁺] → ℚ[V] → ℚ → 0` on tree truncations of radius
/// `1..=radius`, for a graph-of-groups entry.
pub fn verify_theorem_b_evidence(entry: &CatalogEntry, radius: usize, cap: usize) -> Result<TheoremBEvidence> {
    let GroupSpec::GraphOfGroups(spec) = &entry.group else {
        return Err(Error::Spec(format!("{} has no graph of groups", entry.name)));
    };
    let g = FundamentalGroup::from_spec(spec)?;
    let mut rows = Vec::new();
    for r in 1..=radius {
        let cert = g.exactness_on_truncation(r, cap)?;
        rows.push(ExactnessRow {
            radius: r,
            vertices: cert.vertices,
            geometric_edges: cert.geometric_edges,
            exact: cert.passed(),
        });
    }
    let mut vertex_group_orders = BTreeMap::new();
    for &v in g.gog().base_graph().vertices() {
        vertex_group_orders.insert(v.0, g.gog().vertex_group(v)?.order());
    }
    Ok(TheoremBEvidence { name: entry.name.clone(), passed: rows.iter().all(|r| r.exact), rows, vertex_group_orders })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EntryReport {
    pub verdict: EquivalenceVerdict,
    pub exactness: Option<TheoremBEvidence>,
    pub exactness_error: Option<String>,
    pub exactness_budget: bool,
}

impl EntryReport {
    pub fn ok(&self) -> bool {
        self.verdict.consistent
            && self.verdict.matches_expectation
            && self.exactness.as_ref().is_none_or(|t| t.passed)
            && (self.exactness_error.is_none() || self.exactness_budget)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub entries: Vec<EntryReport>,
    pub inconsistent: Vec<String>,
    pub budget_exceeded: Vec<String>,
    pub exit_code: i32,
}

pub fn run_entry(entry: &CatalogEntry, default_scale: &Scale) -> EntryReport {
    let scale = entry.scale.unwrap_or(*default_scale);
    let mut verdict = verify_theorem_astar(entry, &scale);
    let (exactness, exactness_error, exactness_budget) = match &entry.group {
        GroupSpec::GraphOfGroups(_) => match verify_theorem_b_evidence(entry, scale.exactness_radius, scale.cap) {
            Ok(t) => (Some(t), None, false),
            Err(e) => (None, Some(e.to_string()), e.is_budget()),
        },
        GroupSpec::RewritingGroup(_) => (None, None, false),
    };
    verdict.budget_exceeded |= exactness_budget;
    EntryReport { verdict, exactness, exactness_error, exactness_budget }
}

/// Runs every entry; the report is ordered by entry name.
pub fn run_catalog(catalog: &Catalog) -> SuiteReport {
    let mut entries: Vec<EntryReport> = catalog.entries.par_iter().map(|e| run_entry(e, &catalog.scale)).collect();
    entries.sort_by(|x, y| x.verdict.name.cmp(&y.verdict.name));
    let inconsistent: Vec<String> = entries.iter().filter(|e| !e.ok()).map(|e| e.verdict.name.clone()).collect();
    let budget_exceeded: Vec<String> =
        entries.iter().filter(|e| e.verdict.budget_exceeded).map(|e| e.verdict.name.clone()).collect();
    let exit_code = if !inconsistent.is_empty() {
        EXIT_INCONSISTENT
    } else if !budget_exceeded.is_empty() {
        EXIT_BUDGET
    } else {
        EXIT_OK
    };
    SuiteReport { entries, inconsistent, budget_exceeded, exit_code }
}

impl Catalog {
    pub fn parse(text: &str) -> Result<Catalog> {
        serde_json::from_str(text).map_err(|e| Error::Spec(e.to_string()))
    }

    pub fn entry(&self, name: &str) -> Option<&CatalogEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    /// The built-in catalog.
    pub fn default_catalog() -> Catalog {
        Catalog { scale: Scale::default(), entries: default_entries() }
    }

    /// The built-in catalog with one expectation flipped: `z-rewriting` is
    /// declared one-ended.
    pub fn negative_control() -> Catalog {
        let mut c = Catalog::default_catalog();
        for e in &mut c.entries {
            if e.name == "z-rewriting" {
                e.expected.ends = EndsClass::One;
            }
        }
        c
    }
}

fn pair(k: SubgroupSpec, s: &[&str]) -> PairSpec {
    PairSpec { k, s: s.iter().map(|x| x.to_string()).collect() }
}

fn images<T: Clone>(items: &[(&str, T)]) -> BTreeMap<String, T> {
    items.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn expect(ends: EndsClass, splitting: SplittingKind, witness: bool, source: Source) -> Expectation {
    Expectation { ends, splitting, witness, source }
}

fn gog_entry(name: &str, gog: GraphOfFiniteGroups, pairs: Vec<PairSpec>, expected: Expectation) -> CatalogEntry {
    CatalogEntry {
        name: name.into(),
        group: GroupSpec::GraphOfGroups(gog.to_spec()),
        pairs,
        marked_edge: None,
        expected,
        oracle: OracleSpec::TreeBranching,
        scale: None,
    }
}

fn word_entry(name: &str, spec: crate::rewriting::RewritingSpec, pairs: Vec<PairSpec>, expected: Expectation, oracle: OracleSpec) -> CatalogEntry {
    CatalogEntry {
        name: name.into(),
        group: GroupSpec::RewritingGroup(spec),
        pairs,
        marked_edge: None,
        expected,
        oracle,
        scale: None,
    }
}

fn default_entries() -> Vec<CatalogEntry> {
    use EndsClass::*;
    use SplittingKind as Sp;
    use SubgroupSpec::{Edge, Trivial, Vertex};
    let mut f2 = word_entry(
        "f2-rewriting",
        presets::rewriting_f2_spec(),
        vec![pair(Trivial, &[]), pair(Trivial, &["a", "b", "ab"])],
        expect(Many, Sp::NotSupplied, false, Source::Literature),
        OracleSpec::FreeReduction,
    );
    f2.scale = Some(Scale { r_max: 2, big_r: 8, ..Scale::default() });
    vec![
        gog_entry(
            "finite-c5",
            presets::gog_finite(FiniteGroup::cyclic(5)),
            vec![],
            expect(Zero, Sp::None, false, Source::Construction),
        ),
        gog_entry(
            "finite-d3",
            presets::gog_finite(FiniteGroup::dihedral(3)),
            vec![],
            expect(Zero, Sp::None, false, Source::Construction),
        ),
        word_entry(
            "c3-rewriting",
            presets::rewriting_cyclic_spec(3),
            vec![],
            expect(Zero, Sp::NotSupplied, false, Source::Construction),
            OracleSpec::FiniteOrder { order: 3 },
        ),
        word_entry(
            "z-rewriting",
            presets::rewriting_z_spec(),
            vec![pair(Trivial, &["a"]), pair(Trivial, &["a", "aa"])],
            expect(Two, Sp::NotSupplied, false, Source::Literature),
            OracleSpec::Integer { images: images(&[("a", 1)]) },
        ),
        gog_entry(
            "z-hnn",
            presets::gog_z(),
            vec![pair(Trivial, &["t0"]), pair(Trivial, &["t0", "t0 t0"])],
            expect(Two, Sp::S2, true, Source::Literature),
        ),
        word_entry(
            "d-infinity-rewriting",
            presets::rewriting_d_infinity_spec(),
            vec![pair(Trivial, &["x", "y"]), pair(Trivial, &["x", "xy"])],
            expect(Two, Sp::NotSupplied, false, Source::Literature),
            OracleSpec::Affine { images: images(&[("x", [-1, 0]), ("y", [-1, 1])]) },
        ),
        gog_entry(
            "d-infinity-amalgam",
            presets::gog_d_infinity(),
            vec![pair(Trivial, &[]), pair(Vertex(0), &["v1:1"])],
            expect(Two, Sp::S1, true, Source::Literature),
        ),
        gog_entry(
            "c2-c3",
            presets::gog_c2_c3(),
            vec![pair(Trivial, &[]), pair(Vertex(1), &["v0:1", "v1:1 v0:1"])],
            expect(Many, Sp::S1, true, Source::Oracle),
        ),
        gog_entry(
            "c4-c4-over-c2",
            presets::gog_c4_c4_over_c2(),
            vec![pair(Trivial, &[]), pair(Edge(0), &["v0:1", "v1:1"])],
            expect(Two, Sp::S1, true, Source::Oracle),
        ),
        gog_entry(
            "sl2z",
            presets::gog_sl2z(),
            vec![pair(Trivial, &[]), pair(Vertex(0), &["v1:1"])],
            expect(Many, Sp::S1, true, Source::Literature),
        ),
        gog_entry(
            "c2-times-z-hnn",
            presets::gog_c2_times_z(),
            vec![pair(Trivial, &[]), pair(Edge(0), &["t0"])],
            expect(Two, Sp::S2, true, Source::Literature),
        ),
        word_entry(
            "z2-rewriting",
            presets::rewriting_z2_spec(),
            vec![pair(Trivial, &[]), pair(Trivial, &["a", "b", "ab"])],
            expect(One, Sp::NotSupplied, false, Source::Literature),
            OracleSpec::Lattice { images: images(&[("a", [1, 0]), ("b", [0, 1])]) },
        ),
        f2,
    ]
}

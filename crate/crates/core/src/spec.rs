//! JSON group and generating-pair specifications, and dispatch over the two
//! backends.

use serde::{Deserialize, Serialize};

use crate::bass_serre::{FundamentalGroup, GogSpec};
use crate::cayley::GeneratingPair;
use crate::error::{Error, Result};
use crate::graph::{EdgeId, VertexId};
use crate::group::Group;
use crate::rewriting::{RewritingGroup, RewritingSpec};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum GroupSpec {
    RewritingGroup(RewritingSpec),
    GraphOfGroups(GogSpec),
}

/// `"trivial"`, `{"vertex": id}` or `{"edge": id}`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubgroupSpec {
    #[default]
    Trivial,
    Vertex(u64),
    Edge(u64),
}

/// A generating pair; an empty `s` means the backend's generators outside
/// `K`. `S` is closed under inverses automatically.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairSpec {
    #[serde(default)]
    pub k: SubgroupSpec,
    #[serde(default)]
    pub s: Vec<String>,
}

/// Contents of a group file: a group spec with optional pairs. A bare group
/// spec is accepted too.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupFile {
    pub group: GroupSpec,
    #[serde(default)]
    pub pairs: Vec<PairSpec>,
}

impl GroupFile {
    pub fn parse(text: &str) -> Result<GroupFile> {
        match serde_json::from_str::<GroupFile>(text) {
            Ok(f) => Ok(f),
            Err(first) => match serde_json::from_str::<GroupSpec>(text) {
                Ok(group) => Ok(GroupFile { group, pairs: Vec::new() }),
                Err(_) => Err(Error::Spec(first.to_string())),
            },
        }
    }

    /// The pairs, or the default pair when none are listed.
    pub fn pairs_or_default(&self) -> Vec<PairSpec> {
        if self.pairs.is_empty() {
            vec![PairSpec::default()]
        } else {
            self.pairs.clone()
        }
    }
}

/// Groups that can be driven from JSON.
pub trait SpecGroup: Group {
    fn parse_element(&self, text: &str) -> Result<Self::Elem>;
    fn subgroup(&self, spec: &SubgroupSpec) -> Result<Vec<Self::Elem>>;
}

impl SpecGroup for RewritingGroup {
    fn parse_element(&self, text: &str) -> Result<Self::Elem> {
        self.element(text)
    }

    fn subgroup(&self, spec: &SubgroupSpec) -> Result<Vec<Self::Elem>> {
        match spec {
            SubgroupSpec::Trivial => Ok(vec![self.identity()]),
            other => Err(Error::Spec(format!("rewriting groups only take K = trivial, not {other:?}"))),
        }
    }
}

impl SpecGroup for FundamentalGroup {
    fn parse_element(&self, text: &str) -> Result<Self::Elem> {
        self.parse(text)
    }

    fn subgroup(&self, spec: &SubgroupSpec) -> Result<Vec<Self::Elem>> {
        match spec {
            SubgroupSpec::Trivial => Ok(vec![self.identity()]),
            SubgroupSpec::Vertex(v) => self.vertex_subgroup(VertexId(*v)),
            SubgroupSpec::Edge(e) => self.edge_subgroup(EdgeId(*e)),
        }
    }
}

pub fn resolve_pair<G: SpecGroup>(group: &G, spec: &PairSpec) -> Result<GeneratingPair<G::Elem>> {
    let k = group.subgroup(&spec.k)?;
    let s = if spec.s.is_empty() {
        group.generators()
    } else {
        spec.s.iter().map(|w| group.parse_element(w)).collect::<Result<Vec<_>>>()?
    };
    GeneratingPair::symmetrized(group, k, s)
}

#[derive(Clone, Debug)]
pub enum Backend {
    Rewriting(RewritingGroup),
    Gog(FundamentalGroup),
}

impl Backend {
    pub fn from_spec(spec: &GroupSpec) -> Result<Backend> {
        Ok(match spec {
            GroupSpec::RewritingGroup(r) => Backend::Rewriting(RewritingGroup::from_spec(r)?),
            GroupSpec::GraphOfGroups(g) => Backend::Gog(FundamentalGroup::from_spec(g)?),
        })
    }
}

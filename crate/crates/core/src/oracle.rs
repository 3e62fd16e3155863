//! Reference models that predict the end class of a catalog group without
//! going through rough Cayley graphs.
//!
//! Word backends are checked against a faithful action (translations of ℤ,
//! affine maps of ℤ, translations of ℤ², free reduction, or a finite order).
//! Graph-of-groups backends use only index arithmetic: sphere sizes of the
//! Bass-Serre tree are counted by edge type.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::bass_serre::GraphOfFiniteGroups;
use crate::ends::EndsClass;
use crate::error::{Error, Result};
use crate::group::{ball_enumerate, Group};
use crate::rewriting::{Letter, RewritingGroup, Word};

pub const ORACLE_RADIUS: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OracleSpec {
    /// Generator `g` acts on ℤ by `n ↦ n + images[g]`.
    Integer { images: BTreeMap<String, i64> },
    /// Generator `g` acts on ℤ by `n ↦ a·n + b` with `[a, b] = images[g]`, `a = ±1`.
    Affine { images: BTreeMap<String, [i64; 2]> },
    /// Generator `g` acts on ℤ² by translation.
    Lattice { images: BTreeMap<String, [i64; 2]> },
    /// Freely reduced words in the letters.
    FreeReduction,
    FiniteOrder { order: usize },
    /// Sphere sizes of the Bass-Serre tree from indices alone.
    TreeBranching,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    pub kind: String,
    pub predicted: EndsClass,
    /// The model agrees with the backend's multiplication on the checked ball.
    pub faithful: bool,
    pub checked: usize,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Model {
    Shift(i64),
    Affine(i64, i64),
    Vector(i64, i64),
    Reduced(Vec<Letter>),
}

impl Model {
    fn compose(&self, other: &Model, inverse: &dyn Fn(Letter) -> Letter) -> Model {
        match (self, other) {
            (Model::Shift(a), Model::Shift(b)) => Model::Shift(a + b),
            // Left action: (self ∘ other)(n) = a₁(a₂ n + b₂) + b₁.
            (Model::Affine(a1, b1), Model::Affine(a2, b2)) => Model::Affine(a1 * a2, a1 * b2 + b1),
            (Model::Vector(x1, y1), Model::Vector(x2, y2)) => Model::Vector(x1 + x2, y1 + y2),
            (Model::Reduced(u), Model::Reduced(v)) => {
                let mut out = u.clone();
                for &l in v {
                    if out.last().is_some_and(|&m| m == inverse(l)) {
                        out.pop();
                    } else {
                        out.push(l);
                    }
                }
                Model::Reduced(out)
            }
            _ => unreachable!("mixed models"),
        }
    }

    fn invert(&self, inverse: &dyn Fn(Letter) -> Letter) -> Model {
        match self {
            Model::Shift(a) => Model::Shift(-a),
            Model::Affine(a, b) => Model::Affine(*a, -a * b),
            Model::Vector(x, y) => Model::Vector(-x, -y),
            Model::Reduced(w) => Model::Reduced(w.iter().rev().map(|&l| inverse(l)).collect()),
        }
    }
}

impl OracleSpec {
    pub fn name(&self) -> &'static str {
        match self {
            OracleSpec::Integer { .. } => "integer",
            OracleSpec::Affine { .. } => "affine",
            OracleSpec::Lattice { .. } => "lattice",
            OracleSpec::FreeReduction => "free_reduction",
            OracleSpec::FiniteOrder { .. } => "finite_order",
            OracleSpec::TreeBranching => "tree_branching",
        }
    }

    /// Runs the oracle against a word backend.
    pub fn run_rewriting(&self, group: &RewritingGroup) -> Result<OracleReport> {
        let sys = group.system();
        let names = sys.names();
        let inverse = |l: Letter| group.formal_inverse(l);
        let generator_letters: Vec<Letter> = (0..names.len() as Letter).step_by(2).collect();
        let letter_model = |images: &dyn Fn(&str) -> Option<Model>| -> Result<Vec<Model>> {
            let mut out = vec![Model::Shift(0); names.len()];
            for &l in &generator_letters {
                let m = images(&names[l as usize])
                    .ok_or_else(|| Error::Spec(format!("oracle has no image for {}", names[l as usize])))?;
                out[inverse(l) as usize] = m.invert(&inverse);
                out[l as usize] = m;
            }
            Ok(out)
        };
        let (letters, predicted) = match self {
            OracleSpec::Integer { images } => {
                (letter_model(&|n| images.get(n).map(|&a| Model::Shift(a)))?, EndsClass::Two)
            }
            OracleSpec::Affine { images } => {
                for [a, _] in images.values() {
                    if a.abs() != 1 {
                        return Err(Error::Spec("affine oracle needs slopes ±1".into()));
                    }
                }
                (letter_model(&|n| images.get(n).map(|&[a, b]| Model::Affine(a, b)))?, EndsClass::Two)
            }
            OracleSpec::Lattice { images } => {
                (letter_model(&|n| images.get(n).map(|&[x, y]| Model::Vector(x, y)))?, EndsClass::One)
            }
            OracleSpec::FreeReduction => {
                let letters = (0..names.len() as Letter).map(|l| Model::Reduced(vec![l])).collect();
                let predicted = match generator_letters.len() {
                    0 => EndsClass::Zero,
                    1 => EndsClass::Two,
                    _ => EndsClass::Many,
                };
                (letters, predicted)
            }
            OracleSpec::FiniteOrder { order } => return finite_order(group, *order),
            OracleSpec::TreeBranching => {
                return Err(Error::Spec("tree_branching needs a graph of groups".into()));
            }
        };
        let identity = match &letters[0] {
            Model::Shift(_) => Model::Shift(0),
            Model::Affine(..) => Model::Affine(1, 0),
            Model::Vector(..) => Model::Vector(0, 0),
            Model::Reduced(_) => Model::Reduced(Vec::new()),
        };
        let eval = |w: &Word| w.0.iter().fold(identity.clone(), |acc, &l| acc.compose(&letters[l as usize], &inverse));
        let gens: Vec<Word> = (0..names.len() as Letter).map(|l| group.normal_form(&Word(vec![l]))).collect();
        let ball = ball_enumerate(group, &gens, ORACLE_RADIUS, 1_000_000)?;
        let mut faithful = true;
        let mut seen: HashMap<Model, usize> = HashMap::new();
        for (i, g) in ball.elements.iter().enumerate() {
            let image = eval(g);
            if seen.insert(image.clone(), i).is_some() {
                faithful = false;
            }
            for (l, s) in gens.iter().enumerate() {
                if eval(&group.mul(g, s)) != image.compose(&letters[l], &inverse) {
                    faithful = false;
                }
            }
        }
        Ok(OracleReport {
            kind: self.name().into(),
            predicted,
            faithful,
            checked: ball.len(),
            detail: format!("ball of radius {ORACLE_RADIUS}"),
        })
    }

    /// Runs the oracle against a graph of finite groups.
    pub fn run_gog(&self, gog: &GraphOfFiniteGroups, depth: usize) -> Result<OracleReport> {
        match self {
            OracleSpec::TreeBranching => {
                let sizes = tree_sphere_sizes(gog, 2 * depth)?;
                Ok(OracleReport {
                    kind: self.name().into(),
                    predicted: classify_spheres(&sizes, depth),
                    faithful: true,
                    checked: sizes.len(),
                    detail: format!("sphere sizes {sizes:?}"),
                })
            }
            OracleSpec::FiniteOrder { order } => {
                let actual: usize = if gog.base_graph().edge_count() == 0 {
                    gog.base_graph().vertices().iter().map(|&v| gog.vertex_group(v).map(|g| g.order())).sum::<Result<usize>>()?
                } else {
                    0
                };
                Ok(OracleReport {
                    kind: self.name().into(),
                    predicted: EndsClass::Zero,
                    faithful: actual == *order,
                    checked: 1,
                    detail: format!("vertex group order {actual}"),
                })
            }
            other => Err(Error::Spec(format!("{} needs a rewriting group", other.name()))),
        }
    }
}

fn finite_order(group: &RewritingGroup, order: usize) -> Result<OracleReport> {
    let gens = group.letter_elements();
    let found = match ball_enumerate(group, &gens, order + 1, order + 1) {
        Ok(ball) => ball.len(),
        Err(e) if e.is_budget() => order + 1,
        Err(e) => return Err(e),
    };
    Ok(OracleReport {
        kind: "finite_order".into(),
        predicted: EndsClass::Zero,
        faithful: found == order,
        checked: found,
        detail: format!("{found} elements"),
    })
}

/// Number of Bass-Serre tree vertices at each distance `0..=depth` from a
/// lift of the smallest vertex.
pub fn tree_sphere_sizes(gog: &GraphOfFiniteGroups, depth: usize) -> Result<Vec<u128>> {
    let graph = gog.base_graph();
    let edges: Vec<_> = graph.edges().collect();
    let mut branching = Vec::with_capacity(edges.len());
    for &e in &edges {
        let o = graph.origin(e).ok_or(Error::UnknownEdge(e.0))?;
        branching.push((gog.vertex_group(o)?.order() / gog.edge_group(e)?.order()) as u128);
    }
    let position = |e| edges.iter().position(|&f| f == e).expect("edge of the graph");
    let Some(&root) = graph.vertices().iter().min() else {
        return Ok(vec![0; depth + 1]);
    };
    let mut counts: Vec<u128> = edges
        .iter()
        .zip(&branching)
        .map(|(&e, &b)| if graph.origin(e) == Some(root) { b } else { 0 })
        .collect();
    let mut sizes = vec![1u128];
    for _ in 1..=depth {
        sizes.push(counts.iter().fold(0u128, |a, &c| a.saturating_add(c)));
        let mut next = vec![0u128; edges.len()];
        for (i, &e) in edges.iter().enumerate() {
            if counts[i] == 0 {
                continue;
            }
            let here = graph.terminus(e);
            let back = position(graph.inverse(e).expect("involution"));
            for (j, &f) in edges.iter().enumerate() {
                if graph.origin(f) == here {
                    let b = branching[j] - u128::from(j == back);
                    next[j] = next[j].saturating_add(counts[i].saturating_mul(b));
                }
            }
        }
        counts = next;
    }
    Ok(sizes)
}

/// Zero if the tree dies out, many if the second half of the spheres
/// outgrows the first, two otherwise.
fn classify_spheres(sizes: &[u128], depth: usize) -> EndsClass {
    if sizes.last().copied().unwrap_or(0) == 0 {
        return EndsClass::Zero;
    }
    let early = sizes[1..=depth].iter().max().copied().unwrap_or(0);
    let late = sizes[depth + 1..].iter().max().copied().unwrap_or(0);
    if late > early {
        EndsClass::Many
    } else {
        EndsClass::Two
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteGroup;
    use crate::presets;

    #[test]
    fn tree_spheres() {
        assert_eq!(tree_sphere_sizes(&presets::gog_d_infinity(), 4).unwrap(), vec![1, 2, 2, 2, 2]);
        assert_eq!(tree_sphere_sizes(&presets::gog_z(), 3).unwrap(), vec![1, 2, 2, 2]);
        assert_eq!(tree_sphere_sizes(&presets::gog_c2_c3(), 4).unwrap(), vec![1, 2, 4, 4, 8]);
        assert_eq!(tree_sphere_sizes(&presets::gog_finite(FiniteGroup::cyclic(5)), 2).unwrap(), vec![1, 0, 0]);
        let tb = OracleSpec::TreeBranching;
        assert_eq!(tb.run_gog(&presets::gog_c2_c3(), 6).unwrap().predicted, EndsClass::Many);
        assert_eq!(tb.run_gog(&presets::gog_c2_times_z(), 6).unwrap().predicted, EndsClass::Two);
        assert_eq!(tb.run_gog(&presets::gog_sl2z(), 6).unwrap().predicted, EndsClass::Many);
    }

    #[test]
    fn word_models() {
        let z = OracleSpec::Integer { images: BTreeMap::from([("a".into(), 1)]) };
        let r = z.run_rewriting(&presets::rewriting_z()).unwrap();
        assert!(r.faithful);
        assert_eq!(r.checked, 9);

        let d = OracleSpec::Affine { images: BTreeMap::from([("x".into(), [-1, 0]), ("y".into(), [-1, 1])]) };
        assert!(d.run_rewriting(&presets::rewriting_d_infinity()).unwrap().faithful);

        let l = OracleSpec::Lattice { images: BTreeMap::from([("a".into(), [1, 0]), ("b".into(), [0, 1])]) };
        let r = l.run_rewriting(&presets::rewriting_z2()).unwrap();
        assert!(r.faithful);
        assert_eq!(r.checked, 41);

        assert!(OracleSpec::FreeReduction.run_rewriting(&presets::rewriting_f2()).unwrap().faithful);
        assert!(OracleSpec::FiniteOrder { order: 3 }.run_rewriting(&presets::rewriting_cyclic(3)).unwrap().faithful);
    }

    #[test]
    fn wrong_models_are_caught() {
        let z2_as_free = OracleSpec::FreeReduction.run_rewriting(&presets::rewriting_z2()).unwrap();
        assert!(!z2_as_free.faithful);
        let collapsed = OracleSpec::Lattice { images: BTreeMap::from([("a".into(), [1, 0]), ("b".into(), [1, 0])]) };
        assert!(!collapsed.run_rewriting(&presets::rewriting_z2()).unwrap().faithful);
        assert!(!OracleSpec::FiniteOrder { order: 4 }.run_rewriting(&presets::rewriting_cyclic(3)).unwrap().faithful);
    }
}

//! Ready-made groups used by the catalog, the examples and the tests.

use std::collections::BTreeMap;

use crate::rewriting::{RewritingGroup, RewritingSpec};

fn spec(gens: &[(&str, &str)], rules: &[(&str, &str)]) -> RewritingSpec {
    RewritingSpec {
        generators: gens.iter().map(|(g, _)| g.to_string()).collect(),
        inverses: gens.iter().map(|(g, i)| (g.to_string(), i.to_string())).collect::<BTreeMap<_, _>>(),
        rules: rules.iter().map(|(l, r)| (l.to_string(), r.to_string())).collect(),
    }
}

pub fn rewriting_z_spec() -> RewritingSpec {
    spec(&[("a", "A")], &[])
}

pub fn rewriting_z2_spec() -> RewritingSpec {
    spec(&[("a", "A"), ("b", "B")], &[("ba", "ab"), ("bA", "Ab"), ("Ba", "aB"), ("BA", "AB")])
}

/// ⟨x, y | x², y²⟩ with the formal inverses rewritten to the generators.
pub fn rewriting_d_infinity_spec() -> RewritingSpec {
    spec(&[("x", "X"), ("y", "Y")], &[("X", "x"), ("Y", "y"), ("xx", ""), ("yy", "")])
}

pub fn rewriting_f2_spec() -> RewritingSpec {
    spec(&[("a", "A"), ("b", "B")], &[])
}

/// Cyclic group of order `n ≥ 2` on one generator; long powers of `a` are
/// rewritten to short powers of `A` and vice versa.
pub fn rewriting_cyclic_spec(n: usize) -> RewritingSpec {
    let m = n / 2;
    let up = ("a".repeat(m + 1), "A".repeat(n - m - 1));
    let down = if n % 2 == 0 { ("A".repeat(m), "a".repeat(m)) } else { ("A".repeat(m + 1), "a".repeat(m)) };
    spec(&[("a", "A")], &[(&up.0, &up.1), (&down.0, &down.1)])
}

pub fn rewriting_z() -> RewritingGroup {
    RewritingGroup::from_spec(&rewriting_z_spec()).expect("preset")
}

pub fn rewriting_z2() -> RewritingGroup {
    RewritingGroup::from_spec(&rewriting_z2_spec()).expect("preset")
}

pub fn rewriting_d_infinity() -> RewritingGroup {
    RewritingGroup::from_spec(&rewriting_d_infinity_spec()).expect("preset")
}

pub fn rewriting_f2() -> RewritingGroup {
    RewritingGroup::from_spec(&rewriting_f2_spec()).expect("preset")
}

pub fn rewriting_cyclic(n: usize) -> RewritingGroup {
    RewritingGroup::from_spec(&rewriting_cyclic_spec(n)).expect("preset")
}

use crate::bass_serre::{FundamentalGroup, GraphOfFiniteGroups};
use crate::group::FiniteGroup;

/// `C₂ ∗ C₂`, the infinite dihedral group.
pub fn gog_d_infinity() -> GraphOfFiniteGroups {
    GraphOfFiniteGroups::amalgam(FiniteGroup::cyclic(2), FiniteGroup::cyclic(2), FiniteGroup::trivial(), vec![0], vec![0])
        .expect("preset")
}

/// ℤ as the HNN extension of the trivial group.
pub fn gog_z() -> GraphOfFiniteGroups {
    GraphOfFiniteGroups::hnn(FiniteGroup::trivial(), FiniteGroup::trivial(), vec![0], vec![0]).expect("preset")
}

pub fn gog_c2_c3() -> GraphOfFiniteGroups {
    GraphOfFiniteGroups::amalgam(FiniteGroup::cyclic(2), FiniteGroup::cyclic(3), FiniteGroup::trivial(), vec![0], vec![0])
        .expect("preset")
}

/// `C₄ ∗_{C₂} C₄`, amalgamated along the squares.
pub fn gog_c4_c4_over_c2() -> GraphOfFiniteGroups {
    GraphOfFiniteGroups::amalgam(FiniteGroup::cyclic(4), FiniteGroup::cyclic(4), FiniteGroup::cyclic(2), vec![0, 2], vec![0, 2])
        .expect("preset")
}

/// `C₄ ∗_{C₂} C₆ ≅ SL₂(ℤ)`.
pub fn gog_sl2z() -> GraphOfFiniteGroups {
    GraphOfFiniteGroups::amalgam(FiniteGroup::cyclic(4), FiniteGroup::cyclic(6), FiniteGroup::cyclic(2), vec![0, 2], vec![0, 3])
        .expect("preset")
}

/// `C₂ × ℤ` as the HNN extension of `C₂` along the identity.
pub fn gog_c2_times_z() -> GraphOfFiniteGroups {
    GraphOfFiniteGroups::hnn(FiniteGroup::cyclic(2), FiniteGroup::cyclic(2), vec![0, 1], vec![0, 1]).expect("preset")
}

pub fn gog_finite(group: FiniteGroup) -> GraphOfFiniteGroups {
    GraphOfFiniteGroups::single_vertex(group).expect("preset")
}

pub fn fundamental(gog: GraphOfFiniteGroups) -> FundamentalGroup {
    FundamentalGroup::new(gog).expect("preset validates")
}

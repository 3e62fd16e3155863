use std::collections::BTreeSet;

use roughends::cayley::{GeneratingPair, RoughCayleyTruncation};
use roughends::ends::{classify_ends, escaping_components, escaping_count, find_cut, EndsClass};
use roughends::graph::{EdgeId, VertexId};
use roughends::group::Group;
use roughends::presets;
use roughends::spec::{resolve_pair, Backend};
use roughends::catalog::Catalog;

fn escaping_at<E: Clone + Ord + std::hash::Hash>(t: &RoughCayleyTruncation<E>, r: usize) -> usize {
    let ball: BTreeSet<usize> = t.ball(r).into_iter().collect();
    escaping_count(&escaping_components(t, &ball).unwrap())
}

fn check_monotone<G: Group>(g: &G, pair: &GeneratingPair<G::Elem>, big_r: usize) {
    let small = RoughCayleyTruncation::build(g, pair, big_r, 200_000).unwrap();
    let large = RoughCayleyTruncation::build(g, pair, big_r + 4, 200_000).unwrap();
    for r in 0..=2 {
        assert!(escaping_at(&large, r) <= escaping_at(&small, r), "r = {r}");
    }
}

#[test]
fn escaping_counts_do_not_grow_with_radius() {
    for entry in &Catalog::default_catalog().entries {
        let big_r = if entry.name == "f2-rewriting" { 3 } else { 6 };
        match Backend::from_spec(&entry.group).unwrap() {
            Backend::Rewriting(g) => {
                for p in entry.pairs_or_default() {
                    check_monotone(&g, &resolve_pair(&g, &p).unwrap(), big_r);
                }
            }
            Backend::Gog(g) => {
                for p in entry.pairs_or_default() {
                    check_monotone(&g, &resolve_pair(&g, &p).unwrap(), big_r);
                }
            }
        }
    }
}

#[test]
fn k_permutes_spheres() {
    let g = presets::fundamental(presets::gog_c2_c3());
    let k = g.vertex_subgroup(VertexId(1)).unwrap();
    let pair = GeneratingPair::symmetrized(&g, k, vec![g.parse("v0:1").unwrap()]).unwrap();
    let t = RoughCayleyTruncation::build(&g, &pair, 6, 100_000).unwrap();
    for k in pair.k() {
        for (i, label) in t.labels.iter().enumerate() {
            let image = pair.canon(&g, &g.mul(k, label));
            let j = t.index_of(&image).expect("K fixes the base coset, so balls are K-invariant");
            assert_eq!(t.distance[j], t.distance[i]);
        }
    }

    let g = presets::fundamental(presets::gog_c4_c4_over_c2());
    let k = g.edge_subgroup(EdgeId(0)).unwrap();
    let pair = GeneratingPair::symmetrized(&g, k, vec![g.parse("v0:1").unwrap(), g.parse("v1:1").unwrap()]).unwrap();
    let t = RoughCayleyTruncation::build(&g, &pair, 6, 100_000).unwrap();
    for k in pair.k() {
        let mut spheres: Vec<BTreeSet<usize>> = Vec::new();
        for r in 0..=6 {
            let sphere: BTreeSet<usize> = t.sphere(r).into_iter().collect();
            let moved: BTreeSet<usize> =
                sphere.iter().map(|&i| t.index_of(&pair.canon(&g, &g.mul(k, &t.labels[i]))).unwrap()).collect();
            assert_eq!(moved, sphere);
            spheres.push(sphere);
        }
        assert_eq!(spheres.iter().map(|s| s.len()).sum::<usize>(), t.len());
    }
}

#[test]
fn cuts_have_exact_coboundaries() {
    for (g, big_r) in [(presets::rewriting_z(), 8), (presets::rewriting_d_infinity(), 8), (presets::rewriting_f2(), 5)] {
        let pair = GeneratingPair::new(&g, vec![g.identity()], g.letter_elements()).unwrap();
        let t = RoughCayleyTruncation::build(&g, &pair, big_r, 100_000).unwrap();
        let cut = find_cut(&t).unwrap();
        let inside: BTreeSet<usize> = cut.vertices.iter().copied().collect();
        for e in &cut.coboundary {
            let o = t.graph.origin(*e).unwrap().0 as usize;
            let x = t.graph.terminus(*e).unwrap().0 as usize;
            assert_ne!(inside.contains(&o), inside.contains(&x));
        }
        let crossing = t
            .graph
            .edges()
            .filter(|&e| {
                inside.contains(&(t.graph.origin(e).unwrap().0 as usize))
                    != inside.contains(&(t.graph.terminus(e).unwrap().0 as usize))
            })
            .count();
        assert_eq!(crossing, cut.coboundary.len());
    }
}

#[test]
fn classification_is_independent_of_the_pair() {
    let g = presets::fundamental(presets::gog_d_infinity());
    let a = classify_ends(&g, &GeneratingPair::symmetrized(&g, vec![g.identity()], g.generators()).unwrap(), 3, 12, 200_000).unwrap();
    let k = g.vertex_subgroup(VertexId(0)).unwrap();
    let b = classify_ends(&g, &GeneratingPair::symmetrized(&g, k, vec![g.parse("v1:1").unwrap()]).unwrap(), 3, 12, 200_000).unwrap();
    assert_eq!(a.verdict.class(), EndsClass::Two);
    assert_eq!(a.verdict.class(), b.verdict.class());
}

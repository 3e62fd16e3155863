use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use roughends::bass_serre::PathWord;
use roughends::cayley::RoughCayleyTruncation;
use roughends::graph::EdgeId;
use roughends::group::{ball_enumerate, Group};
use roughends::presets;
use roughends::witness::{add, translate, AIWitness};

fn splitting_groups() -> Vec<(&'static str, roughends::bass_serre::FundamentalGroup)> {
    vec![
        ("d-infinity", presets::fundamental(presets::gog_d_infinity())),
        ("z", presets::fundamental(presets::gog_z())),
        ("c2-c3", presets::fundamental(presets::gog_c2_c3())),
        ("c4-c4-over-c2", presets::fundamental(presets::gog_c4_c4_over_c2())),
        ("c2-times-z", presets::fundamental(presets::gog_c2_times_z())),
    ]
}

/// `g·χ_B − χ_B` by brute force over every coset of a large truncation.
fn derivation_by_enumeration(w: &AIWitness, g: &PathWord, cosets: &[PathWord]) -> BTreeMap<PathWord, i64> {
    let grp = w.group();
    let g_inv = grp.inv(g);
    cosets
        .iter()
        .filter_map(|x| {
            let v = w.contains(&w.pair().canon(grp, &grp.mul(&g_inv, x))) as i64 - w.contains(x) as i64;
            (v != 0).then(|| (x.clone(), v))
        })
        .collect()
}

#[test]
fn cocycle_identity_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (name, g) in splitting_groups() {
        let w = AIWitness::from_splitting(&g, EdgeId(0), None).unwrap();
        let ball = ball_enumerate(&g, w.pair().s(), 3, 100_000).unwrap().elements;
        for _ in 0..200 {
            let a = &ball[rng.gen_range(0..ball.len())];
            let b = &ball[rng.gen_range(0..ball.len())];
            let lhs = w.derivation(&g.mul(a, b));
            let rhs = add(&translate(&g, w.pair(), a, &w.derivation(b)), &w.derivation(a));
            assert_eq!(lhs, rhs, "{name}");
        }
        for k in w.pair().k() {
            assert!(w.derivation(k).is_empty(), "{name}: d vanishes on K");
        }
    }
}

#[test]
fn derivations_match_enumeration() {
    for (name, g) in splitting_groups() {
        let w = AIWitness::from_splitting(&g, EdgeId(0), None).unwrap();
        let t = RoughCayleyTruncation::build(&g, w.pair(), 9, 200_000).unwrap();
        let ball = ball_enumerate(&g, w.pair().s(), 2, 100_000).unwrap().elements;
        for x in &ball {
            let by_cert = w.derivation(x);
            let by_enum = derivation_by_enumeration(&w, x, &t.labels);
            assert_eq!(by_cert, by_enum, "{name}: {}", g.render(x));
        }
    }
}

#[test]
fn principal_derivation_from_a_single_coset() {
    let g = presets::fundamental(presets::gog_c4_c4_over_c2());
    let w = AIWitness::from_splitting(&g, EdgeId(0), None).unwrap();
    let pair = w.pair();
    let base = pair.canon(&g, &g.identity());
    let m: BTreeMap<PathWord, i64> = BTreeMap::from([(base.clone(), 1)]);
    for k in pair.k() {
        assert_eq!(translate(&g, pair, k, &m), m);
    }
    for s in pair.s() {
        let d = add(&translate(&g, pair, s, &m), &m.iter().map(|(x, v)| (x.clone(), -v)).collect());
        let expected: BTreeMap<PathWord, i64> = if pair.canon(&g, s) == base {
            BTreeMap::new()
        } else {
            BTreeMap::from([(pair.canon(&g, s), 1), (base.clone(), -1)])
        };
        assert_eq!(d, expected);
    }
}

//! Oracles shared by the integration tests and the acceptance runner. None
//! of them calls into the code paths they check, apart from enumerating
//! words.

#![allow(dead_code)]

use std::collections::HashMap;
use std::hash::Hash;

use rand::Rng;
use roughends::group::{ball_enumerate, Group};

/// A random multigraph on `1..=max_n` vertices, loops allowed.
pub fn random_graph<R: Rng>(rng: &mut R, max_n: usize) -> (usize, Vec<(usize, usize)>) {
    let n = rng.gen_range(1..=max_n);
    let m = rng.gen_range(0..=2 * n);
    let pairs = (0..m).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect();
    (n, pairs)
}

/// Number of connected components by depth-first search.
pub fn components_by_dfs(n: usize, pairs: &[(usize, usize)]) -> usize {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in pairs {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut seen = vec![false; n];
    let mut count = 0;
    for s in 0..n {
        if seen[s] {
            continue;
        }
        count += 1;
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
    }
    count
}

/// Affine map `n ↦ a·n + b` of ℤ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Affine(pub i64, pub i64);

impl Affine {
    pub fn then(self, inner: Affine) -> Affine {
        Affine(self.0 * inner.0, self.0 * inner.1 + self.1)
    }
}

/// Freely reduces a word over letters with `inv(l) = l ^ 1`.
pub fn free_reduce(word: &[u16]) -> Vec<u16> {
    let mut out: Vec<u16> = Vec::new();
    for &l in word {
        if out.last() == Some(&(l ^ 1)) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

/// Compares the group's multiplication with a model on `ball(radius)`.
/// Returns the number of failures: model collisions on `ball(2·radius)` plus
/// pairs `a, b` in `ball(radius)` with `model(ab) ≠ model(a)·model(b)`.
pub fn model_mismatches<G: Group, M: Clone + Eq + Hash>(
    group: &G,
    gens: &[G::Elem],
    images: &[M],
    identity: M,
    compose: impl Fn(&M, &M) -> M,
    radius: usize,
) -> usize {
    let big = ball_enumerate(group, gens, 2 * radius, 1_000_000).expect("ball fits");
    let model: Vec<M> = (0..big.len())
        .map(|i| big.word_of(i).iter().fold(identity.clone(), |acc, &s| compose(&acc, &images[s])))
        .collect();
    let mut failures = 0;
    let mut by_model: HashMap<&M, usize> = HashMap::new();
    for (i, m) in model.iter().enumerate() {
        if by_model.insert(m, i).is_some() {
            failures += 1;
        }
    }
    let index: HashMap<&G::Elem, usize> = big.elements.iter().enumerate().map(|(i, x)| (x, i)).collect();
    let small: Vec<usize> = (0..big.len()).filter(|&i| big.distance[i] <= radius).collect();
    for &a in &small {
        for &b in &small {
            let ab = group.mul(&big.elements[a], &big.elements[b]);
            match index.get(&ab) {
                Some(&i) if model[i] == compose(&model[a], &model[b]) => {}
                _ => failures += 1,
            }
        }
    }
    failures
}

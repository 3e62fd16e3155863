//! The group interface shared by every backend, plus finite groups given by
//! Cayley tables.

use std::collections::{HashMap, HashSet};
use std::fmt::Debug;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A group with decidable equality of elements.
///
/// `Elem` values are canonical: two values are equal iff they denote the same
/// group element. `Ord` must be a total order usable for deterministic
/// minimal representatives (shortlex for word-based backends).
pub trait Group: Sync {
    type Elem: Clone + Eq + Ord + Hash + Debug + Send + Sync;

    fn identity(&self) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    /// A fixed generating set of the whole group.
    fn generators(&self) -> Vec<Self::Elem>;
    fn render(&self, a: &Self::Elem) -> String;

    fn product<'a, I>(&self, items: I) -> Self::Elem
    where
        I: IntoIterator<Item = &'a Self::Elem>,
        Self::Elem: 'a,
    {
        items.into_iter().fold(self.identity(), |acc, x| self.mul(&acc, x))
    }
}

/// Checks that `elems` is a subgroup: contains the identity, closed under
/// products and inverses. The list must be duplicate free.
pub fn check_subgroup<G: Group>(group: &G, elems: &[G::Elem]) -> Result<()> {
    let set: HashSet<&G::Elem> = elems.iter().collect();
    if set.len() != elems.len() {
        return Err(Error::NotSubgroup("repeated element".into()));
    }
    if !set.contains(&group.identity()) {
        return Err(Error::NotSubgroup("identity missing".into()));
    }
    for a in elems {
        if !set.contains(&group.inv(a)) {
            return Err(Error::NotSubgroup(format!("inverse of {} missing", group.render(a))));
        }
        for b in elems {
            if !set.contains(&group.mul(a, b)) {
                return Err(Error::NotSubgroup(format!(
                    "product {}·{} missing",
                    group.render(a),
                    group.render(b)
                )));
            }
        }
    }
    Ok(())
}

/// Result of a breadth-first enumeration of a ball in a Cayley graph.
#[derive(Clone, Debug)]
pub struct Ball<E> {
    /// Elements in BFS-then-`Ord` order; index 0 is the identity.
    pub elements: Vec<E>,
    /// `(parent index, generator index)` for every element but the identity.
    pub parent: Vec<Option<(usize, usize)>>,
    pub distance: Vec<usize>,
}

impl<E: Clone + Eq + Hash> Ball<E> {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Generator indices spelling the element at `i`.
    pub fn word_of(&self, mut i: usize) -> Vec<usize> {
        let mut out = Vec::new();
        while let Some((p, s)) = self.parent[i] {
            out.push(s);
            i = p;
        }
        out.reverse();
        out
    }
}

/// All elements of word length at most `radius` over `gens`.
pub fn ball_enumerate<G: Group>(group: &G, gens: &[G::Elem], radius: usize, cap: usize) -> Result<Ball<G::Elem>> {
    let mut elements = vec![group.identity()];
    let mut parent = vec![None];
    let mut distance = vec![0];
    let mut seen: HashMap<G::Elem, usize> = HashMap::from([(group.identity(), 0)]);
    let mut frontier = vec![0usize];
    for d in 1..=radius {
        let mut layer: HashMap<G::Elem, (usize, usize)> = HashMap::new();
        for &i in &frontier {
            for (si, s) in gens.iter().enumerate() {
                let x = group.mul(&elements[i], s);
                if seen.contains_key(&x) {
                    continue;
                }
                layer
                    .entry(x)
                    .and_modify(|cur| *cur = (*cur).min((i, si)))
                    .or_insert((i, si));
            }
        }
        if layer.is_empty() {
            break;
        }
        let mut layer: Vec<(G::Elem, (usize, usize))> = layer.into_iter().collect();
        layer.sort_by(|a, b| a.0.cmp(&b.0));
        frontier.clear();
        for (x, p) in layer {
            if elements.len() >= cap {
                return Err(Error::BudgetExceeded { cap });
            }
            seen.insert(x.clone(), elements.len());
            frontier.push(elements.len());
            elements.push(x);
            parent.push(Some(p));
            distance.push(d);
        }
    }
    Ok(Ball { elements, parent, distance })
}

/// Finite group given by its multiplication table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteGroup {
    table: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
    names: Vec<String>,
}

impl FiniteGroup {
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<FiniteGroup> {
        let n = table.len();
        if n == 0 {
            return Err(Error::InvalidGroup("empty table".into()));
        }
        for row in &table {
            if row.len() != n || row.iter().any(|&x| x >= n) {
                return Err(Error::InvalidGroup("table is not square over 0..n".into()));
            }
            let distinct: HashSet<_> = row.iter().collect();
            if distinct.len() != n {
                return Err(Error::InvalidGroup("table is not a Latin square".into()));
            }
        }
        for c in 0..n {
            let distinct: HashSet<_> = table.iter().map(|r| r[c]).collect();
            if distinct.len() != n {
                return Err(Error::InvalidGroup("table is not a Latin square".into()));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::InvalidGroup(format!("({a}·{b})·{c} ≠ {a}·({b}·{c})")));
                    }
                }
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or_else(|| Error::InvalidGroup("no identity".into()))?;
        let inverse: Vec<usize> = (0..n)
            .map(|a| (0..n).find(|&b| table[a][b] == identity).expect("Latin square row contains identity"))
            .collect();
        let names = (0..n).map(|i| i.to_string()).collect();
        Ok(FiniteGroup { table, identity, inverse, names })
    }

    pub fn trivial() -> FiniteGroup {
        FiniteGroup::cyclic(1)
    }

    /// `C_n` with element `i` standing for `g^i`.
    pub fn cyclic(n: usize) -> FiniteGroup {
        assert!(n > 0, "cyclic group of order 0");
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        FiniteGroup::from_table(table).expect("cyclic table is a group")
    }

    /// Dihedral group of order `2n`: element `i < n` is `r^i`, `n + i` is `s r^i`.
    pub fn dihedral(n: usize) -> FiniteGroup {
        assert!(n > 0, "dihedral group of order 0");
        let decode = |x: usize| (x / n, x % n);
        let encode = |f: usize, r: usize| f * n + r;
        let mut table = vec![vec![0; 2 * n]; 2 * n];
        for a in 0..2 * n {
            for b in 0..2 * n {
                let (fa, ra) = decode(a);
                let (fb, rb) = decode(b);
                // (s^fa r^ra)(s^fb r^rb) = s^(fa+fb) r^(±ra + rb)
                let r = if fb == 0 { (ra + rb) % n } else { (n - ra + rb) % n };
                table[a][b] = encode((fa + fb) % 2, r);
            }
        }
        FiniteGroup::from_table(table).expect("dihedral table is a group")
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity_index(&self) -> usize {
        self.identity
    }

    pub fn op(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inverse_of(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn is_homomorphism(&self, target: &FiniteGroup, map: &[usize]) -> bool {
        map.len() == self.order()
            && map.iter().all(|&x| x < target.order())
            && (0..self.order()).all(|a| {
                (0..self.order()).all(|b| map[self.op(a, b)] == target.op(map[a], map[b]))
            })
    }

    /// Left cosets `gH` of the subgroup `sub`: for every `g` the coset
    /// representative `r` and the subgroup element `h` with `g = r·h`.
    /// The identity represents `H` itself; other representatives are the
    /// smallest index in their coset.
    pub fn left_transversal(&self, sub: &[usize]) -> Transversal {
        let n = self.order();
        let mut rep = vec![usize::MAX; n];
        let mut sub_part = vec![usize::MAX; n];
        let mut reps = Vec::new();
        let order: Vec<usize> = std::iter::once(self.identity).chain((0..n).filter(|&g| g != self.identity)).collect();
        for g in order {
            if rep[g] != usize::MAX {
                continue;
            }
            reps.push(g);
            for (hi, &h) in sub.iter().enumerate() {
                let x = self.op(g, h);
                rep[x] = g;
                sub_part[x] = hi;
            }
        }
        Transversal { reps, rep, sub_part }
    }
}

/// Left coset decomposition `G = ⊔ r·H`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transversal {
    /// Representatives, identity first.
    pub reps: Vec<usize>,
    /// Representative of the coset containing `g`.
    pub rep: Vec<usize>,
    /// Index into the subgroup list of `h` with `g = rep[g]·h`.
    pub sub_part: Vec<usize>,
}

impl Group for FiniteGroup {
    type Elem = usize;

    fn identity(&self) -> usize {
        self.identity
    }

    fn mul(&self, a: &usize, b: &usize) -> usize {
        self.table[*a][*b]
    }

    fn inv(&self, a: &usize) -> usize {
        self.inverse[*a]
    }

    fn generators(&self) -> Vec<usize> {
        (0..self.order()).filter(|&g| g != self.identity).collect()
    }

    fn render(&self, a: &usize) -> String {
        self.names[*a].clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_and_dihedral_tables() {
        let c6 = FiniteGroup::cyclic(6);
        assert_eq!(c6.op(4, 5), 3);
        assert_eq!(c6.inverse_of(2), 4);
        let d3 = FiniteGroup::dihedral(3);
        assert_eq!(d3.order(), 6);
        // s r s = r^{-1}
        assert_eq!(d3.op(d3.op(3, 1), 3), 2);
        let non_abelian = (0..6).any(|a| (0..6).any(|b| d3.op(a, b) != d3.op(b, a)));
        assert!(non_abelian);
    }

    #[test]
    fn rejects_non_groups() {
        assert!(FiniteGroup::from_table(vec![vec![0, 1], vec![0, 1]]).is_err());
        // Latin square without an identity element
        let t = vec![vec![0, 2, 1], vec![2, 1, 0], vec![1, 0, 2]];
        assert!(FiniteGroup::from_table(t).is_err());
    }

    #[test]
    fn transversal_of_subgroup() {
        let c4 = FiniteGroup::cyclic(4);
        let t = c4.left_transversal(&[0, 2]);
        assert_eq!(t.reps, vec![0, 1]);
        assert_eq!(t.rep[3], 1);
        assert_eq!(c4.op(t.rep[3], [0, 2][t.sub_part[3]]), 3);
        let d3 = FiniteGroup::dihedral(3);
        let t = d3.left_transversal(&[0, 3]);
        assert_eq!(t.reps.len(), 3);
        for g in 0..6 {
            assert_eq!(d3.op(t.rep[g], [0, 3][t.sub_part[g]]), g);
        }
    }

    #[test]
    fn subgroup_checks() {
        let c6 = FiniteGroup::cyclic(6);
        assert!(check_subgroup(&c6, &[0, 2, 4]).is_ok());
        assert!(check_subgroup(&c6, &[0, 1]).is_err());
        assert!(check_subgroup(&c6, &[2, 4]).is_err());
    }

    #[test]
    fn ball_in_cyclic_group_saturates() {
        let c5 = FiniteGroup::cyclic(5);
        let ball = ball_enumerate(&c5, &[1, 4], 10, 100).unwrap();
        assert_eq!(ball.len(), 5);
        assert_eq!(ball.distance, vec![0, 1, 1, 2, 2]);
        assert_eq!(ball.word_of(3), vec![0, 0]);
        assert!(matches!(ball_enumerate(&c5, &[1, 4], 10, 3), Err(Error::BudgetExceeded { cap: 3 })));
    }
}

//! Level maps `η_{U,V}: ℚ[G/U] → ℚ[G/V]` between permutation modules of
//! finite subgroups `V ⊆ U`, sending `gU` to the average of the `V`-cosets it
//! contains.

use std::collections::BTreeMap;

use num_traits::One;
use serde::Serialize;

use crate::cayley::coset_label;
use crate::error::{Error, Result};
use crate::group::{ball_enumerate, check_subgroup, Group};
use crate::qlinalg::{rank, Rational, SparseMatrixQ};

#[derive(Clone, Debug)]
pub struct LevelMap<E> {
    /// `[U : V]`.
    pub index: usize,
    /// `U`-coset labels indexing the columns.
    pub cols: Vec<E>,
    /// `V`-coset labels indexing the rows, sorted.
    pub rows: Vec<E>,
    pub matrix: SparseMatrixQ,
}

/// Canonical labels of the cosets `g·sub` for `g` in the ball of radius
/// `radius` over `gens`.
pub fn enumerate_cosets<G: Group>(
    group: &G,
    sub: &[G::Elem],
    gens: &[G::Elem],
    radius: usize,
    cap: usize,
) -> Result<Vec<G::Elem>> {
    let ball = ball_enumerate(group, gens, radius, cap)?;
    let mut out: Vec<G::Elem> = ball.elements.iter().map(|g| coset_label(group, sub, g)).collect();
    out.sort();
    out.dedup();
    Ok(out)
}

/// The matrix of `η_{U,V}` on the given `U`-cosets.
pub fn eta_map<G: Group>(group: &G, u: &[G::Elem], v: &[G::Elem], columns: &[G::Elem]) -> Result<LevelMap<G::Elem>> {
    let mut u_sorted = u.to_vec();
    u_sorted.sort();
    let mut v_sorted = v.to_vec();
    v_sorted.sort();
    check_subgroup(group, &u_sorted)?;
    check_subgroup(group, &v_sorted)?;
    if v_sorted.iter().any(|x| u_sorted.binary_search(x).is_err()) {
        return Err(Error::NotSubgroup("V is not contained in U".into()));
    }
    let mut reps: Vec<G::Elem> = Vec::new();
    let mut seen = Vec::new();
    for r in &u_sorted {
        let label = coset_label(group, &v_sorted, r);
        if !seen.contains(&label) {
            seen.push(label);
            reps.push(r.clone());
        }
    }
    let index = reps.len();
    let mut cols: Vec<G::Elem> = columns.iter().map(|g| coset_label(group, &u_sorted, g)).collect();
    cols.sort();
    cols.dedup();
    let mut refinement: Vec<Vec<G::Elem>> = Vec::with_capacity(cols.len());
    let mut all_rows = Vec::new();
    for g in &cols {
        let block: Vec<G::Elem> = reps.iter().map(|r| coset_label(group, &v_sorted, &group.mul(g, r))).collect();
        all_rows.extend(block.iter().cloned());
        refinement.push(block);
    }
    all_rows.sort();
    all_rows.dedup();
    let row_of: BTreeMap<&G::Elem, usize> = all_rows.iter().enumerate().map(|(i, x)| (x, i)).collect();
    let weight = Rational::new(1.into(), (index as i64).into());
    let mut matrix = SparseMatrixQ::zeros(all_rows.len(), cols.len());
    for (c, block) in refinement.iter().enumerate() {
        for x in block {
            matrix.add_to(row_of[x], c, &weight);
        }
    }
    let rows = all_rows.clone();
    Ok(LevelMap { index, cols, rows, matrix })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelReport {
    pub index: usize,
    pub rows: usize,
    pub cols: usize,
    pub uniform_entries: bool,
    pub column_sums_one: bool,
    pub injective: bool,
}

impl<E> LevelMap<E> {
    pub fn report(&self) -> LevelReport {
        let weight = Rational::new(1.into(), (self.index as i64).into());
        let uniform_entries = self.matrix.entries().all(|(_, _, x)| *x == weight)
            && (0..self.matrix.cols()).all(|c| self.matrix.entries().filter(|(_, cc, _)| *cc == c).count() == self.index);
        let column_sums_one = (0..self.matrix.cols()).all(|c| self.matrix.column_sum(c).is_one());
        LevelReport {
            index: self.index,
            rows: self.matrix.rows(),
            cols: self.matrix.cols(),
            uniform_entries,
            column_sums_one,
            injective: rank(&self.matrix) == self.matrix.cols(),
        }
    }
}

/// Checks `η_{V,W} ∘ η_{U,V} = η_{U,W}` on the given `U`-cosets.
pub fn check_composition<G: Group>(
    group: &G,
    u: &[G::Elem],
    v: &[G::Elem],
    w: &[G::Elem],
    columns: &[G::Elem],
) -> Result<bool> {
    let uv = eta_map(group, u, v, columns)?;
    let vw = eta_map(group, v, w, &uv.rows)?;
    let uw = eta_map(group, u, w, columns)?;
    if vw.rows != uw.rows || vw.cols != uv.rows {
        return Ok(false);
    }
    let product = vw.matrix.mul(&uv.matrix)?;
    let mut diff = product;
    for (r, c, x) in uw.matrix.entries() {
        diff.add_to(r, c, &-x.clone());
    }
    Ok(diff.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{EdgeId, VertexId};
    use crate::presets;
    use crate::qlinalg::rat;
    use num_traits::Zero;

    #[test]
    fn identity_when_levels_agree() {
        let g = presets::fundamental(presets::gog_c4_c4_over_c2());
        let u = g.vertex_subgroup(VertexId(0)).unwrap();
        let cols = enumerate_cosets(&g, &u, &g.generators(), 2, 100_000).unwrap();
        let m = eta_map(&g, &u, &u, &cols).unwrap();
        assert_eq!(m.index, 1);
        assert_eq!(m.rows, m.cols);
        assert_eq!(m.matrix, SparseMatrixQ::identity(cols.len()));
    }

    #[test]
    fn halves_for_index_two() {
        let g = presets::fundamental(presets::gog_d_infinity());
        let u = g.vertex_subgroup(VertexId(0)).unwrap();
        let v = vec![g.identity()];
        let cols = enumerate_cosets(&g, &u, &g.generators(), 3, 10_000).unwrap();
        let m = eta_map(&g, &u, &v, &cols).unwrap();
        assert_eq!(m.index, 2);
        for c in 0..m.matrix.cols() {
            let col: Vec<Rational> = (0..m.matrix.rows()).map(|r| m.matrix.get(r, c)).filter(|x| !x.is_zero()).collect();
            assert_eq!(col, vec![rat(1, 2), rat(1, 2)]);
        }
        let report = m.report();
        assert!(report.column_sums_one && report.injective && report.uniform_entries);
    }

    #[test]
    fn composition_on_chain() {
        let g = presets::fundamental(presets::gog_c4_c4_over_c2());
        let u = g.vertex_subgroup(VertexId(0)).unwrap();
        let v = g.edge_subgroup(EdgeId(0)).unwrap();
        let w = vec![g.identity()];
        let cols = enumerate_cosets(&g, &u, &g.generators(), 2, 100_000).unwrap();
        assert!(check_composition(&g, &u, &v, &w, &cols).unwrap());
        for (a, b) in [(&u, &v), (&v, &w), (&u, &w)] {
            let r = eta_map(&g, a, b, &cols).unwrap().report();
            assert!(r.column_sums_one && r.injective && r.uniform_entries);
        }
    }

    #[test]
    fn rejects_non_subgroups() {
        let g = presets::fundamental(presets::gog_c4_c4_over_c2());
        let u = g.edge_subgroup(EdgeId(0)).unwrap();
        let bigger = g.vertex_subgroup(VertexId(0)).unwrap();
        assert!(matches!(eta_map(&g, &u, &bigger, &[g.identity()]), Err(Error::NotSubgroup(_))));
        let not_sub = vec![g.identity(), g.parse("v0:1").unwrap()];
        assert!(matches!(eta_map(&g, &bigger, &not_sub, &[g.identity()]), Err(Error::NotSubgroup(_))));
    }
}

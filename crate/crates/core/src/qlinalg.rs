//! Exact linear algebra over ℚ.
//!
//! Ranks come from fraction-free row elimination: every row is scaled to a
//! primitive integer vector, pivots are combined as `a·r − b·p`, and the
//! content of each updated row is divided out again. No rounding happens
//! anywhere.

use std::collections::{BTreeMap, HashMap};
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeId, SerreGraph, VertexId};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Sparse matrix with no stored zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrixQ {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Triplet {
    pub row: usize,
    pub col: usize,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Triplet>,
}

impl SparseMatrixQ {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrixQ { rows, cols, entries: BTreeMap::new() }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = SparseMatrixQ::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = SparseMatrixQ::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged rows");
            for (j, &x) in row.iter().enumerate() {
                m.set(i, j, int(x));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn set(&mut self, r: usize, c: usize, value: Rational) {
        assert!(r < self.rows && c < self.cols, "entry ({r},{c}) out of bounds");
        if value.is_zero() {
            self.entries.remove(&(r, c));
        } else {
            self.entries.insert((r, c), value);
        }
    }

    pub fn add_to(&mut self, r: usize, c: usize, value: &Rational) {
        let cur = self.get(r, c);
        self.set(r, c, cur + value);
    }

    pub fn get(&self, r: usize, c: usize) -> Rational {
        self.entries.get(&(r, c)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Rational)> {
        self.entries.iter().map(|(&(r, c), v)| (r, c, v))
    }

    pub fn column_sum(&self, c: usize) -> Rational {
        self.entries.iter().filter(|((_, cc), _)| *cc == c).map(|(_, v)| v.clone()).sum()
    }

    pub fn transpose(&self) -> SparseMatrixQ {
        SparseMatrixQ {
            rows: self.cols,
            cols: self.rows,
            entries: self.entries.iter().map(|(&(r, c), v)| ((c, r), v.clone())).collect(),
        }
    }

    pub fn mul_vec(&self, x: &[Rational]) -> Result<Vec<Rational>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch(format!("vector of length {} for {} columns", x.len(), self.cols)));
        }
        let mut out = vec![Rational::zero(); self.rows];
        for (&(r, c), v) in &self.entries {
            out[r] += v * &x[c];
        }
        Ok(out)
    }

    /// `self · other`.
    pub fn mul(&self, other: &SparseMatrixQ) -> Result<SparseMatrixQ> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut by_row: HashMap<usize, Vec<(usize, &Rational)>> = HashMap::new();
        for (&(r, c), v) in &other.entries {
            by_row.entry(r).or_default().push((c, v));
        }
        let mut out = SparseMatrixQ::zeros(self.rows, other.cols);
        for (&(i, k), a) in &self.entries {
            if let Some(row) = by_row.get(&k) {
                for &(j, b) in row {
                    out.add_to(i, j, &(a * b));
                }
            }
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_json(&self) -> MatrixJson {
        MatrixJson {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .map(|(&(row, col), v)| Triplet { row, col, value: v.to_string() })
                .collect(),
        }
    }

    fn integer_rows(&self, extra: Option<&[Rational]>) -> Vec<BTreeMap<usize, BigInt>> {
        let mut rows: Vec<BTreeMap<usize, Rational>> = vec![BTreeMap::new(); self.rows];
        for (&(r, c), v) in &self.entries {
            rows[r].insert(c, v.clone());
        }
        if let Some(b) = extra {
            for (r, v) in b.iter().enumerate() {
                if !v.is_zero() {
                    rows[r].insert(self.cols, v.clone());
                }
            }
        }
        rows.into_iter().map(clear_denominators).collect()
    }
}

fn clear_denominators(row: BTreeMap<usize, Rational>) -> BTreeMap<usize, BigInt> {
    let lcm = row.values().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let out: BTreeMap<usize, BigInt> = row
        .into_iter()
        .map(|(c, v)| (c, (v * Rational::from_integer(lcm.clone())).to_integer()))
        .collect();
    primitive(out)
}

fn primitive(mut row: BTreeMap<usize, BigInt>) -> BTreeMap<usize, BigInt> {
    let g = row.values().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    if !g.is_zero() && !g.is_one() {
        for v in row.values_mut() {
            *v /= &g;
        }
    }
    row
}

/// Row echelon form: pivot rows keyed by leading column.
struct Echelon {
    pivots: BTreeMap<usize, BTreeMap<usize, BigInt>>,
}

impl Echelon {
    fn build(mut rows: Vec<BTreeMap<usize, BigInt>>) -> Echelon {
        rows.retain(|r| !r.is_empty());
        rows.sort_by_key(BTreeMap::len);
        let mut pivots: BTreeMap<usize, BTreeMap<usize, BigInt>> = BTreeMap::new();
        for mut row in rows {
            loop {
                let Some((&lead, _)) = row.iter().next() else { break };
                match pivots.get(&lead) {
                    None => {
                        pivots.insert(lead, row);
                        break;
                    }
                    Some(p) => {
                        let a = p[&lead].clone();
                        let b = row[&lead].clone();
                        let mut next: BTreeMap<usize, BigInt> = BTreeMap::new();
                        for (&c, v) in &row {
                            next.insert(c, v * &a);
                        }
                        for (&c, v) in p {
                            let e = next.entry(c).or_insert_with(BigInt::zero);
                            *e -= v * &b;
                        }
                        next.retain(|_, v| !v.is_zero());
                        row = primitive(next);
                    }
                }
            }
        }
        Echelon { pivots }
    }

    fn rank(&self) -> usize {
        self.pivots.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankProfile {
    pub rank: usize,
    pub ker_dim: usize,
    pub coker_dim: usize,
}

pub fn rank(m: &SparseMatrixQ) -> usize {
    // Eliminate along the shorter side; rank is transpose-invariant.
    if m.rows <= m.cols {
        Echelon::build(m.integer_rows(None)).rank()
    } else {
        Echelon::build(m.transpose().integer_rows(None)).rank()
    }
}

pub fn rank_kernel_cokernel(m: &SparseMatrixQ) -> RankProfile {
    let r = rank(m);
    RankProfile { rank: r, ker_dim: m.cols - r, coker_dim: m.rows - r }
}

/// Some `x` with `m·x = b`, free variables set to zero, or `None` if the
/// system is inconsistent.
pub fn solve(m: &SparseMatrixQ, b: &[Rational]) -> Result<Option<Vec<Rational>>> {
    if b.len() != m.rows {
        return Err(Error::DimensionMismatch(format!("right-hand side of length {} for {} rows", b.len(), m.rows)));
    }
    let ech = Echelon::build(m.integer_rows(Some(b)));
    if ech.pivots.contains_key(&m.cols) {
        return Ok(None);
    }
    let mut x = vec![Rational::zero(); m.cols];
    for (&lead, row) in ech.pivots.iter().rev() {
        let mut acc = row
            .get(&m.cols)
            .map(|v| Rational::from_integer(v.clone()))
            .unwrap_or_else(Rational::zero);
        for (&c, v) in row.range(lead + 1..m.cols) {
            acc -= Rational::from_integer(v.clone()) * &x[c];
        }
        x[lead] = acc / Rational::from_integer(row[&lead].clone());
    }
    Ok(Some(x))
}

/// Ordered, duplicate-free list of basis labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeModuleBasis<L: Eq + Hash + Clone> {
    labels: Vec<L>,
    index: HashMap<L, usize>,
}

impl<L: Eq + Hash + Clone> FreeModuleBasis<L> {
    pub fn new(labels: Vec<L>) -> Result<Self> {
        let mut index = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::DimensionMismatch("duplicate basis label".into()));
            }
        }
        Ok(FreeModuleBasis { labels, index })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[L] {
        &self.labels
    }

    pub fn position(&self, l: &L) -> Option<usize> {
        self.index.get(l).copied()
    }
}

/// `δ[e] = t(e) − o(e)` with rows indexed by vertices and columns by
/// geometric edges in canonical orientation.
#[derive(Clone, Debug)]
pub struct DeltaMap {
    pub matrix: SparseMatrixQ,
    pub vertices: FreeModuleBasis<VertexId>,
    pub edges: FreeModuleBasis<EdgeId>,
}

pub fn delta_matrix(g: &SerreGraph) -> DeltaMap {
    let vertices = FreeModuleBasis::new(g.vertices().to_vec()).expect("vertex ids are unique");
    let geo = g.geometric_edges();
    let edges = FreeModuleBasis::new(geo.iter().map(|e| e.representative).collect()).expect("edge ids are unique");
    let mut m = SparseMatrixQ::zeros(vertices.len(), edges.len());
    for (c, e) in geo.iter().enumerate() {
        let o = vertices.position(&g.origin(e.representative).unwrap()).unwrap();
        let t = vertices.position(&g.terminus(e.representative).unwrap()).unwrap();
        if o != t {
            m.set(t, c, int(1));
            m.set(o, c, int(-1));
        }
    }
    DeltaMap { matrix: m, vertices, edges }
}

/// `1 × n` row of ones: `ℚ[V] → ℚ`.
pub fn augmentation(n: usize) -> SparseMatrixQ {
    let mut m = SparseMatrixQ::zeros(1, n);
    for c in 0..n {
        m.set(0, c, int(1));
    }
    m
}

/// Dimension counts of `δ` for a finite graph, next to the combinatorial
/// counts they should equal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyReport {
    pub vertices: usize,
    pub geometric_edges: usize,
    pub components: usize,
    pub rank: usize,
    pub ker_dim: usize,
    pub coker_dim: usize,
    /// `ker = |E| − |V| + c` and `coker = c`.
    pub counts_agree: bool,
    pub is_tree: bool,
    /// `ker = 0` and `coker = 1`.
    pub is_tree_linear: bool,
}

pub fn graph_homology(g: &SerreGraph) -> HomologyReport {
    let p = rank_kernel_cokernel(&delta_matrix(g).matrix);
    let vertices = g.vertex_count();
    let geometric_edges = g.geometric_edge_count();
    let components = g.components().count();
    HomologyReport {
        vertices,
        geometric_edges,
        components,
        rank: p.rank,
        ker_dim: p.ker_dim,
        coker_dim: p.coker_dim,
        counts_agree: p.ker_dim + vertices == geometric_edges + components && p.coker_dim == components,
        is_tree: g.is_tree_combinatorial(),
        is_tree_linear: p.ker_dim == 0 && p.coker_dim == 1,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShortExactCheck {
    pub rank_first: usize,
    pub rank_second: usize,
    pub composite_zero: bool,
    pub injective: bool,
    pub middle_exact: bool,
    pub surjective: bool,
    pub exact: bool,
}

/// Checks `0 → ℚ^n --a--> ℚ^m --b--> ℚ^k → 0` for exactness.
pub fn verify_short_exact(a: &SparseMatrixQ, b: &SparseMatrixQ) -> Result<ShortExactCheck> {
    if b.cols != a.rows {
        return Err(Error::DimensionMismatch(format!(
            "cannot compose {}x{} after {}x{}",
            b.rows, b.cols, a.rows, a.cols
        )));
    }
    let rank_first = rank(a);
    let rank_second = rank(b);
    let composite_zero = b.mul(a)?.is_zero();
    let injective = rank_first == a.cols;
    let middle_exact = composite_zero && rank_first == b.cols - rank_second;
    let surjective = rank_second == b.rows;
    Ok(ShortExactCheck {
        rank_first,
        rank_second,
        composite_zero,
        injective,
        middle_exact,
        surjective,
        exact: injective && middle_exact && surjective,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_examples() {
        let seg = SerreGraph::from_geometric(2, &[(0, 1)]).unwrap();
        let d = delta_matrix(&seg).matrix;
        assert_eq!(d, SparseMatrixQ::from_rows(&[vec![-1], vec![1]]));
        assert_eq!(rank_kernel_cokernel(&d), RankProfile { rank: 1, ker_dim: 0, coker_dim: 1 });

        let looped = SerreGraph::from_geometric(1, &[(0, 0)]).unwrap();
        let d = delta_matrix(&looped).matrix;
        assert_eq!((d.rows(), d.cols(), d.nnz()), (1, 1, 0));
        assert_eq!(rank_kernel_cokernel(&d), RankProfile { rank: 0, ker_dim: 1, coker_dim: 1 });

        let tri = SerreGraph::from_geometric(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let d = delta_matrix(&tri).matrix;
        assert_eq!((d.rows(), d.cols()), (3, 3));
        assert_eq!(rank_kernel_cokernel(&d), RankProfile { rank: 2, ker_dim: 1, coker_dim: 1 });
    }

    #[test]
    fn rank_of_rational_matrix() {
        let mut m = SparseMatrixQ::zeros(3, 3);
        m.set(0, 0, rat(1, 2));
        m.set(0, 1, rat(1, 3));
        m.set(1, 0, rat(3, 2));
        m.set(1, 1, int(1));
        m.set(2, 2, rat(-7, 5));
        assert_eq!(rank(&m), 2);
        assert_eq!(rank(&SparseMatrixQ::identity(4)), 4);
        assert_eq!(rank(&SparseMatrixQ::zeros(2, 5)), 0);
    }

    #[test]
    fn short_exact_examples() {
        let seg = SerreGraph::from_geometric(2, &[(0, 1)]).unwrap();
        let d = delta_matrix(&seg).matrix;
        assert!(verify_short_exact(&d, &augmentation(2)).unwrap().exact);

        let zero = SparseMatrixQ::zeros(1, 1);
        let check = verify_short_exact(&zero, &SparseMatrixQ::identity(1)).unwrap();
        assert!(!check.injective);
        assert!(!check.exact);

        assert!(matches!(
            verify_short_exact(&d, &augmentation(3)),
            Err(Error::DimensionMismatch(_))
        ));

        // single vertex: 0 → 0 → ℚ → ℚ → 0
        let point = SerreGraph::from_geometric(1, &[]).unwrap();
        let d = delta_matrix(&point).matrix;
        assert!(verify_short_exact(&d, &augmentation(1)).unwrap().exact);
    }

    #[test]
    fn solve_finds_preimage_or_reports_inconsistency() {
        let m = SparseMatrixQ::from_rows(&[vec![1, 1], vec![1, -1], vec![2, 0]]);
        let x = solve(&m, &[int(3), int(1), int(4)]).unwrap().unwrap();
        assert_eq!(x, vec![int(2), int(1)]);
        assert_eq!(solve(&m, &[int(3), int(1), int(5)]).unwrap(), None);
    }

    #[test]
    fn product_and_column_sums() {
        let a = SparseMatrixQ::from_rows(&[vec![1, 2], vec![0, 1]]);
        let b = SparseMatrixQ::from_rows(&[vec![1, 0], vec![-1, 1]]);
        assert_eq!(a.mul(&b).unwrap(), SparseMatrixQ::from_rows(&[vec![-1, 2], vec![-1, 1]]));
        assert_eq!(a.column_sum(1), int(3));
        let json = serde_json::to_value(a.to_json()).unwrap();
        assert_eq!(json["entries"].as_array().unwrap().len(), 3);
    }
}

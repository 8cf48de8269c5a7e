//! The two consequences of the digraph bound: walks of length two in
//! undirected graphs, and supports of `AAᵗ + AᵗA` for nonnegative `A`.

use std::collections::BTreeSet;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::certificate::oracle_check;
use crate::digraph::Digraph;
use crate::error::{GraphError, MatrixError};
use crate::relation::PairRelation;
use crate::scalar::Entry;

/// Finite undirected graph; edges are stored as `(min, max)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "UndirectedRepr", try_from = "UndirectedRepr")]
pub struct UndirectedGraph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl UndirectedGraph {
    /// Rejects out-of-range endpoints and edges listed twice in either orientation.
    pub fn new<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut set = BTreeSet::new();
        for (i, j) in edges {
            for v in [i, j] {
                if v >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: v, n });
                }
            }
            if !set.insert((i.min(j), i.max(j))) {
                return Err(GraphError::DuplicatePair(i, j));
            }
        }
        Ok(Self { n, edges: set })
    }

    /// The `code`-th loop-free graph on `n` vertices; bit `b` selects the
    /// `b`-th pair `i < j` in lexicographic order.
    pub fn from_code(n: usize, code: u64) -> Self {
        let mut edges = BTreeSet::new();
        let mut bit = 0;
        for i in 0..n {
            for j in i + 1..n {
                if code >> bit & 1 == 1 {
                    edges.insert((i, j));
                }
                bit += 1;
            }
        }
        Self { n, edges }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    /// Each edge `{i, j}` becomes `(i, j)` and `(j, i)`; a loop stays a loop.
    pub fn symmetrize(&self) -> Digraph {
        let mut rel = PairRelation::empty(self.n);
        for &(i, j) in &self.edges {
            rel.insert(i, j);
            rel.insert(j, i);
        }
        Digraph::from_relation(rel)
    }

    /// `γ_k` for `k ∈ {1, 2}`: ordered pairs joined by a walk of length `k`.
    pub fn gamma(&self, k: usize) -> Result<PairRelation, GraphError> {
        let d = self.symmetrize();
        match k {
            1 => Ok(d.edges().clone()),
            2 => Ok(d.mutual_pairs()),
            _ => Err(GraphError::BadWalkLength(k)),
        }
    }

    pub fn corollary_check(&self) -> UndirectedCheck {
        let g1 = self.symmetrize().edge_count();
        let g2 = self.symmetrize().mutual_pairs().len();
        UndirectedCheck {
            g2_size: g2,
            g1_size: g1,
            holds: g2 >= g1,
        }
    }

    /// `{"n": .., "edges": [[i, j], ..], "undirected": true}`.
    pub fn from_json_str(input: &str) -> Result<Self, GraphError> {
        serde_json::from_str(input).map_err(|e| GraphError::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("graph serializes")
    }
}

impl From<UndirectedGraph> for UndirectedRepr {
    fn from(g: UndirectedGraph) -> Self {
        UndirectedRepr {
            n: g.n,
            edges: g.edges.into_iter().collect(),
            undirected: true,
        }
    }
}

impl TryFrom<UndirectedRepr> for UndirectedGraph {
    type Error = GraphError;

    fn try_from(repr: UndirectedRepr) -> Result<Self, GraphError> {
        if !repr.undirected {
            return Err(GraphError::Parse("expected \"undirected\": true".into()));
        }
        Self::new(repr.n, repr.edges)
    }
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct UndirectedRepr {
    n: usize,
    edges: Vec<(usize, usize)>,
    undirected: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct UndirectedCheck {
    pub g2_size: usize,
    pub g1_size: usize,
    pub holds: bool,
}

/// Summary of checking every loop-free undirected graph on `n` vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UndirectedSweep {
    pub n: usize,
    pub graphs: u64,
    pub violations: u64,
    pub first_violation: Option<u64>,
}

pub fn sweep_undirected(n: usize) -> UndirectedSweep {
    let count = 1u64 << (n * n.saturating_sub(1) / 2);
    let mut violations = 0;
    let mut first_violation = None;
    for code in 0..count {
        if !UndirectedGraph::from_code(n, code).corollary_check().holds {
            violations += 1;
            first_violation.get_or_insert(code);
        }
    }
    UndirectedSweep {
        n,
        graphs: count,
        violations,
        first_violation,
    }
}

/// Square matrix with nonnegative entries.
#[derive(Debug, Clone, PartialEq)]
pub struct NonnegMatrix<T> {
    n: usize,
    entries: Vec<T>,
}

impl<T: Entry> NonnegMatrix<T> {
    pub fn new(rows: Vec<Vec<T>>) -> Result<Self, MatrixError> {
        let n = rows.len();
        let floor = T::ambiguity_floor();
        let mut entries = Vec::with_capacity(n * n);
        for (r, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(MatrixError::NotSquare {
                    row: r,
                    len: row.len(),
                    n,
                });
            }
            for (c, x) in row.into_iter().enumerate() {
                if x < T::zero() {
                    return Err(MatrixError::Negative {
                        row: r,
                        col: c,
                        value: x.to_string(),
                    });
                }
                if let Some(f) = floor {
                    if !x.is_zero() && x < f {
                        return Err(MatrixError::Ambiguous {
                            row: r,
                            col: c,
                            value: x.to_string(),
                            floor: f.to_string(),
                        });
                    }
                }
                entries.push(x);
            }
        }
        Ok(Self { n, entries })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            entries: vec![T::zero(); n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.entries[i * self.n + j]
    }

    /// Positions of nonzero entries.
    pub fn support(&self) -> PairRelation {
        let mut rel = PairRelation::empty(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                if !self.get(i, j).is_zero() {
                    rel.insert(i, j);
                }
            }
        }
        rel
    }

    /// The digraph with an edge wherever `a_ij ≠ 0`.
    pub fn support_digraph(&self) -> Digraph {
        Digraph::from_relation(self.support())
    }

    /// `Supp(AAᵗ + AᵗA)`, computed as the mutual-neighbor relation of the
    /// support digraph. Exact: nonnegative terms cannot cancel.
    pub fn gram_support(&self) -> PairRelation {
        self.support_digraph().mutual_pairs()
    }

    /// `AAᵗ + AᵗA` in the entry type's own arithmetic.
    pub fn gram_sum(&self) -> Vec<Vec<T>> {
        let n = self.n;
        let mut out = vec![vec![T::zero(); n]; n];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                let mut acc = T::zero();
                for k in 0..n {
                    acc = acc + self.get(i, k) * self.get(j, k) + self.get(k, i) * self.get(k, j);
                }
                *cell = acc;
            }
        }
        out
    }

    pub fn corollary_check(&self) -> MatrixCheck {
        let oracle = oracle_check(&self.support_digraph());
        MatrixCheck {
            gram_size: oracle.t_size,
            supp_size: oracle.e_size,
            holds: oracle.holds,
        }
    }
}

impl<T: Entry + FromStr> NonnegMatrix<T> {
    /// `n` rows of `n` comma-separated values.
    pub fn from_csv_str(input: &str) -> Result<Self, MatrixError> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(input.as_bytes());
        let mut rows = Vec::new();
        for (r, record) in reader.records().enumerate() {
            let record = record.map_err(|e| MatrixError::Parse(e.to_string()))?;
            let row = record
                .iter()
                .enumerate()
                .map(|(c, cell)| {
                    cell.parse::<T>()
                        .map_err(|_| MatrixError::Parse(format!("row {r}, column {c}: cannot parse {cell:?}")))
                })
                .collect::<Result<Vec<T>, _>>()?;
            rows.push(row);
        }
        Self::new(rows)
    }
}

impl<T: Entry + serde::de::DeserializeOwned> NonnegMatrix<T> {
    pub fn from_json_str(input: &str) -> Result<Self, MatrixError> {
        let rows: Vec<Vec<T>> = serde_json::from_str(input).map_err(|e| MatrixError::Parse(e.to_string()))?;
        Self::new(rows)
    }

    /// JSON when the input starts with `[`, CSV otherwise.
    pub fn parse(input: &str) -> Result<Self, MatrixError>
    where
        T: FromStr,
    {
        if input.trim_start().starts_with('[') {
            Self::from_json_str(input)
        } else {
            Self::from_csv_str(input)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixCheck {
    pub gram_size: usize,
    pub supp_size: usize,
    pub holds: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    fn rel(n: usize, e: &[(usize, usize)]) -> PairRelation {
        PairRelation::from_pairs(n, e.iter().copied()).unwrap()
    }

    fn ug(n: usize, e: &[(usize, usize)]) -> UndirectedGraph {
        UndirectedGraph::new(n, e.iter().copied()).unwrap()
    }

    #[test]
    fn symmetrize_examples() {
        assert_eq!(ug(2, &[(0, 1)]).symmetrize().edges(), &rel(2, &[(0, 1), (1, 0)]));
        assert!(ug(2, &[]).symmetrize().edges().is_empty());
        assert_eq!(ug(1, &[(0, 0)]).symmetrize().edges(), &rel(1, &[(0, 0)]));
    }

    #[test]
    fn gamma_examples() {
        let edge = ug(2, &[(0, 1)]);
        assert_eq!(edge.gamma(1).unwrap(), rel(2, &[(0, 1), (1, 0)]));
        assert_eq!(edge.gamma(2).unwrap(), rel(2, &[(0, 0), (1, 1)]));
        let tri = ug(3, &[(0, 1), (1, 2), (0, 2)]);
        assert_eq!(tri.gamma(1).unwrap().len(), 6);
        assert_eq!(tri.gamma(2).unwrap().len(), 9);
        assert!(ug(3, &[]).gamma(2).unwrap().is_empty());
        assert_eq!(edge.gamma(3), Err(GraphError::BadWalkLength(3)));
    }

    #[test]
    fn undirected_checks() {
        let c = ug(2, &[(0, 1)]).corollary_check();
        assert_eq!((c.g2_size, c.g1_size, c.holds), (2, 2, true));
        let c = ug(3, &[(0, 1), (1, 2), (0, 2)]).corollary_check();
        assert_eq!((c.g2_size, c.g1_size, c.holds), (9, 6, true));
        let c = ug(4, &[]).corollary_check();
        assert_eq!((c.g2_size, c.g1_size, c.holds), (0, 0, true));
    }

    #[test]
    fn undirected_duplicates_rejected() {
        assert!(UndirectedGraph::new(2, [(0, 1), (1, 0)]).is_err());
        let g = UndirectedGraph::from_json_str(r#"{"n": 3, "edges": [[0,1],[2,1]], "undirected": true}"#).unwrap();
        assert_eq!(g, ug(3, &[(0, 1), (1, 2)]));
        assert_eq!(UndirectedGraph::from_json_str(&g.to_json()).unwrap(), g);
        assert!(UndirectedGraph::from_json_str(r#"{"n": 3, "edges": [], "undirected": false}"#).is_err());
    }

    #[test]
    fn matrix_supports() {
        let a = NonnegMatrix::new(vec![vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert_eq!(a.support(), rel(2, &[(0, 1)]));
        assert_eq!(a.gram_support(), rel(2, &[(0, 0), (1, 1)]));
        let c = a.corollary_check();
        assert_eq!((c.gram_size, c.supp_size, c.holds), (2, 1, true));

        let z = NonnegMatrix::<f64>::zeros(3);
        assert!(z.support().is_empty());
        assert!(z.gram_support().is_empty());
        assert_eq!(
            z.corollary_check(),
            MatrixCheck {
                gram_size: 0,
                supp_size: 0,
                holds: true
            }
        );

        let id = NonnegMatrix::new(vec![vec![1u32, 0], vec![0, 1]]).unwrap();
        assert_eq!(id.support(), rel(2, &[(0, 0), (1, 1)]));

        let b = NonnegMatrix::new(vec![vec![0.0, 2.0], vec![3.0, 0.0]]).unwrap();
        assert_eq!(b.gram_support(), rel(2, &[(0, 0), (1, 1)]));
        assert_eq!(b.gram_sum(), vec![vec![13.0, 0.0], vec![0.0, 13.0]]);

        let ones = NonnegMatrix::new(vec![vec![1.0; 3]; 3]).unwrap();
        let c = ones.corollary_check();
        assert_eq!((c.gram_size, c.supp_size, c.holds), (9, 9, true));
    }

    #[test]
    fn rational_entries_agree() {
        let half = Rational64::new(1, 2);
        let zero = Rational64::from_integer(0);
        let a = NonnegMatrix::new(vec![
            vec![zero, half, zero],
            vec![zero, zero, half],
            vec![half, zero, zero],
        ])
        .unwrap();
        let numeric: Vec<(usize, usize)> = a
            .gram_sum()
            .iter()
            .enumerate()
            .flat_map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .filter(|(_, x)| **x != zero)
                    .map(move |(j, _)| (i, j))
            })
            .collect();
        assert_eq!(a.gram_support().to_pairs(), numeric);
    }

    #[test]
    fn matrix_input_validation() {
        let err = NonnegMatrix::new(vec![vec![0.0, -1.0], vec![0.0, 0.0]]).unwrap_err();
        assert!(matches!(err, MatrixError::Negative { row: 0, col: 1, .. }), "{err}");
        let err = NonnegMatrix::new(vec![vec![1e-13]]).unwrap_err();
        assert!(matches!(err, MatrixError::Ambiguous { .. }));
        assert!(NonnegMatrix::new(vec![vec![1.0, 2.0]]).is_err());

        let csv = NonnegMatrix::<f64>::parse("0, 1\n0, 0\n").unwrap();
        let json = NonnegMatrix::<f64>::parse("[[0, 1], [0, 0]]").unwrap();
        assert_eq!(csv, json);
        assert!(NonnegMatrix::<f64>::parse("0, x\n0, 0\n").is_err());
        assert!(NonnegMatrix::<f64>::parse("[[0, 1], [0]]").is_err());
    }
}

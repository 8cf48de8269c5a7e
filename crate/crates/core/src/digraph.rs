//! Finite digraphs without parallel edges and their mutual-neighbor relation.
//!
//! Vertices are the dense indices `0..n`. The edge set is a [`PairRelation`],
//! so "no parallel edges" holds by construction; loops are allowed.

use std::collections::VecDeque;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::GraphError;
use crate::relation::PairRelation;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Digraph {
    edges: PairRelation,
}

/// Per-vertex in- and out-degrees. A loop counts once on each side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeProfile {
    pub in_degree: Vec<usize>,
    pub out_degree: Vec<usize>,
}

impl DegreeProfile {
    pub fn is_balanced(&self) -> bool {
        self.in_degree == self.out_degree
    }
}

impl Digraph {
    pub fn empty(n: usize) -> Self {
        Self {
            edges: PairRelation::empty(n),
        }
    }

    /// Builds a digraph, rejecting out-of-range endpoints and repeated edges.
    pub fn new<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Ok(Self {
            edges: PairRelation::from_unique_pairs(n, edges)?,
        })
    }

    pub fn from_relation(edges: PairRelation) -> Self {
        Self { edges }
    }

    /// The directed cycle `0 -> 1 -> ... -> n-1 -> 0`. For `n == 1` this is a loop.
    pub fn directed_cycle(n: usize) -> Self {
        let mut edges = PairRelation::empty(n);
        for i in 0..n {
            edges.insert(i, (i + 1) % n);
        }
        Self { edges }
    }

    /// Decodes the `index`-th digraph on `n` vertices: bit `b` of `index`
    /// selects the `b`-th cell of the adjacency matrix in row-major order,
    /// skipping the diagonal when `loops` is false.
    pub fn from_code(n: usize, code: u64, loops: bool) -> Self {
        let mut edges = PairRelation::empty(n);
        let mut bit = 0;
        for i in 0..n {
            for j in 0..n {
                if i == j && !loops {
                    continue;
                }
                if code >> bit & 1 == 1 {
                    edges.insert(i, j);
                }
                bit += 1;
            }
        }
        Self { edges }
    }

    pub fn n(&self) -> usize {
        self.edges.n()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &PairRelation {
        &self.edges
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.contains(i, j)
    }

    pub fn add_edge(&mut self, i: usize, j: usize) -> Result<bool, GraphError> {
        for v in [i, j] {
            if v >= self.n() {
                return Err(GraphError::VertexOutOfRange { vertex: v, n: self.n() });
            }
        }
        Ok(self.edges.insert(i, j))
    }

    fn check_vertex(&self, v: usize) -> Result<(), GraphError> {
        if v >= self.n() {
            Err(GraphError::VertexOutOfRange { vertex: v, n: self.n() })
        } else {
            Ok(())
        }
    }

    /// `D⁻(v)`: every `u` with `(u, v)` an edge, ascending.
    pub fn in_neighbors(&self, v: usize) -> Result<Vec<usize>, GraphError> {
        self.check_vertex(v)?;
        Ok((0..self.n()).filter(|&u| self.edges.contains(u, v)).collect())
    }

    /// `D⁺(v)`: every `u` with `(v, u)` an edge, ascending.
    pub fn out_neighbors(&self, v: usize) -> Result<Vec<usize>, GraphError> {
        self.check_vertex(v)?;
        Ok(self.edges.row_iter(v).collect())
    }

    pub fn has_loop(&self, v: usize) -> bool {
        self.edges.contains(v, v)
    }

    /// Smallest vertex carrying a loop.
    pub fn first_loop(&self) -> Option<usize> {
        (0..self.n()).find(|&v| self.has_loop(v))
    }

    /// The relation of all mutually neighbored ordered pairs,
    /// `E∘Eᵒᵖ ∪ Eᵒᵖ∘E`.
    ///
    /// With `(a, c) ∈ r∘s ⇔ ∃b: (a, b) ∈ r ∧ (b, c) ∈ s`, `E∘Eᵒᵖ` collects
    /// pairs with a common out-neighbor and `Eᵒᵖ∘E` pairs with a common
    /// in-neighbor.
    pub fn mutual_pairs(&self) -> PairRelation {
        let op = self.edges.opposite();
        let mut t = self.edges.compose(&op).expect("relation and its opposite share n");
        t.union_with(&op.compose(&self.edges).expect("relation and its opposite share n"));
        t
    }

    /// Mutual pairs via pairwise neighborhood intersection. Quadratic in `n`
    /// row tests; kept alongside [`Digraph::mutual_pairs`] as a second route.
    pub fn mutual_pairs_by_intersection(&self) -> PairRelation {
        let n = self.n();
        let op = self.edges.opposite();
        let mut t = PairRelation::empty(n);
        for i in 0..n {
            for j in 0..n {
                if self.edges.rows_intersect(i, j) || op.rows_intersect(i, j) {
                    t.insert(i, j);
                }
            }
        }
        t
    }

    pub fn degree_profile(&self) -> DegreeProfile {
        let n = self.n();
        let mut in_degree = vec![0; n];
        let mut out_degree = vec![0; n];
        for (i, j) in self.edges.iter() {
            out_degree[i] += 1;
            in_degree[j] += 1;
        }
        DegreeProfile { in_degree, out_degree }
    }

    /// Every vertex has in-degree equal to out-degree. No connectivity
    /// requirement.
    pub fn is_balanced(&self) -> bool {
        self.degree_profile().is_balanced()
    }

    /// Vertices with no incident edge (a loop counts as incident).
    pub fn isolated_vertices(&self) -> Vec<usize> {
        let d = self.degree_profile();
        (0..self.n())
            .filter(|&v| d.in_degree[v] == 0 && d.out_degree[v] == 0)
            .collect()
    }

    /// A shortest directed cycle `[v1, .., vk]` with `k >= 2`, or `None` if
    /// the graph is acyclic.
    ///
    /// BFS runs from each vertex in index order, visiting out-neighbors in
    /// index order; the first cycle of globally minimum length wins and is
    /// reported starting at its smallest vertex.
    pub fn shortest_directed_cycle(&self) -> Result<Option<Vec<usize>>, GraphError> {
        if let Some(v) = self.first_loop() {
            return Err(GraphError::HasLoop(v));
        }
        let n = self.n();
        let mut best: Option<Vec<usize>> = None;
        let mut dist = vec![usize::MAX; n];
        let mut parent = vec![usize::MAX; n];
        let mut queue = VecDeque::new();
        for s in 0..n {
            dist.fill(usize::MAX);
            parent.fill(usize::MAX);
            queue.clear();
            dist[s] = 0;
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                for w in self.edges.row_iter(u) {
                    if dist[w] == usize::MAX {
                        dist[w] = dist[u] + 1;
                        parent[w] = u;
                        queue.push_back(w);
                    }
                }
            }
            // Closing edge (u, s) from the reached vertex nearest to s.
            let close = (0..n)
                .filter(|&u| self.edges.contains(u, s) && dist[u] != usize::MAX)
                .min_by_key(|&u| (dist[u], u));
            let Some(u) = close else { continue };
            let len = dist[u] + 1;
            if best.as_ref().is_some_and(|b| b.len() <= len) {
                continue;
            }
            let mut cycle = Vec::with_capacity(len);
            let mut cur = u;
            while cur != s {
                cycle.push(cur);
                cur = parent[cur];
            }
            cycle.push(s);
            cycle.reverse();
            let start = (0..cycle.len()).min_by_key(|&i| cycle[i]).unwrap_or(0);
            cycle.rotate_left(start);
            let done = len == 2;
            best = Some(cycle);
            if done {
                break;
            }
        }
        Ok(best)
    }

    /// Induced subgraph on the vertices not in `removed`, re-indexed densely
    /// in increasing order. The returned map sends new indices to old ones.
    pub fn remove_vertices(&self, removed: &[usize]) -> Result<(Digraph, Vec<usize>), GraphError> {
        let n = self.n();
        let mut gone = vec![false; n];
        for &v in removed {
            self.check_vertex(v)?;
            gone[v] = true;
        }
        let kept: Vec<usize> = (0..n).filter(|&v| !gone[v]).collect();
        let mut new_index = vec![usize::MAX; n];
        for (new, &old) in kept.iter().enumerate() {
            new_index[old] = new;
        }
        let mut edges = PairRelation::empty(kept.len());
        for (i, j) in self.edges.iter() {
            if !gone[i] && !gone[j] {
                edges.insert(new_index[i], new_index[j]);
            }
        }
        Ok((Digraph { edges }, kept))
    }

    /// Parses either the JSON form `{"n": .., "edges": [[i, j], ..]}` or the
    /// text form (first line `n`, then one `i j` pair per line).
    pub fn parse(input: &str) -> Result<Self, GraphError> {
        if input.trim_start().starts_with('{') {
            Self::from_json_str(input)
        } else {
            Self::from_text_str(input)
        }
    }

    pub fn from_json_str(input: &str) -> Result<Self, GraphError> {
        serde_json::from_str(input).map_err(|e| GraphError::Parse(e.to_string()))
    }

    pub fn from_text_str(input: &str) -> Result<Self, GraphError> {
        let mut lines = input
            .lines()
            .enumerate()
            .map(|(no, l)| (no + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (no, first) = lines
            .next()
            .ok_or_else(|| GraphError::Parse("empty input: expected vertex count".into()))?;
        let n: usize = first
            .parse()
            .map_err(|_| GraphError::Parse(format!("line {no}: expected vertex count, got {first:?}")))?;
        let mut pairs = Vec::new();
        for (no, line) in lines {
            let mut it = line.split_whitespace();
            let parse = |tok: Option<&str>| -> Result<usize, GraphError> {
                tok.and_then(|t| t.parse().ok())
                    .ok_or_else(|| GraphError::Parse(format!("line {no}: expected \"i j\", got {line:?}")))
            };
            let i = parse(it.next())?;
            let j = parse(it.next())?;
            if it.next().is_some() {
                return Err(GraphError::Parse(format!("line {no}: trailing tokens in {line:?}")));
            }
            pairs.push((i, j));
        }
        Digraph::new(n, pairs)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("digraph serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.n());
        for (i, j) in self.edges.iter() {
            let _ = writeln!(out, "{i} {j}");
        }
        out
    }

    /// Graphviz DOT. An overlay relation is drawn as dashed undirected edges
    /// (one per symmetric pair, diagonal omitted).
    pub fn to_dot(&self, name: &str, overlay: Option<&PairRelation>) -> String {
        let mut out = format!("digraph {name} {{\n");
        for v in 0..self.n() {
            let _ = writeln!(out, "  {v};");
        }
        for (i, j) in self.edges.iter() {
            let _ = writeln!(out, "  {i} -> {j};");
        }
        if let Some(rel) = overlay {
            for (i, j) in rel.iter() {
                if i < j || (i > j && !rel.contains(j, i)) {
                    let _ = writeln!(out, "  {i} -> {j} [style=dashed, dir=none, color=gray];");
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

impl std::fmt::Debug for Digraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Digraph")
            .field("n", &self.n())
            .field("edges", &self.edges.to_pairs())
            .finish()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DigraphRepr {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Serialize for Digraph {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        DigraphRepr {
            n: self.n(),
            edges: self.edges.to_pairs(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Digraph {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = DigraphRepr::deserialize(deserializer)?;
        Digraph::new(repr.n, repr.edges).map_err(serde::de::Error::custom)
    }
}

use std::collections::BTreeMap;

use anyhow::{bail, Result};
use neighborhood_bound::{check_graph, Digraph, StepKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FuzzConfig {
    pub seed: u64,
    pub count: usize,
    pub nodes: usize,
    pub edge_prob: f64,
    pub loops: bool,
}

impl FuzzConfig {
    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            bail!("--count must be at least 1");
        }
        if !(0.0..=1.0).contains(&self.edge_prob) {
            bail!("--edge-prob must lie in [0, 1], got {}", self.edge_prob);
        }
        Ok(())
    }
}

/// Graph number `index` of the stream for `seed`: every cell (including the
/// diagonal unless loops are off) is an edge with probability `p`, drawn in
/// row-major order from stream `index` of a ChaCha8 generator.
pub fn random_digraph(seed: u64, index: u64, n: usize, p: f64, loops: bool) -> Digraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if (loops || i != j) && rng.gen_bool(p) {
                edges.push((i, j));
            }
        }
    }
    Digraph::new(n, edges).expect("generated edges are distinct and in range")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FuzzCounterexample {
    pub index: u64,
    pub graph: Digraph,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FuzzSummary {
    pub seed: u64,
    pub count: usize,
    pub nodes: usize,
    pub edge_prob: f64,
    pub loops: bool,
    pub edges_total: u64,
    pub violations: u64,
    pub graphs_with_mismatches: u64,
    pub graphs_with_unexplained: u64,
    pub mismatch_counts: BTreeMap<String, u64>,
    pub steps_by_kind: BTreeMap<StepKind, u64>,
    /// Lowest-index violating graph.
    pub counterexample: Option<FuzzCounterexample>,
}

#[derive(Default)]
struct Tally {
    edges: u64,
    violations: u64,
    mismatched: u64,
    unexplained: u64,
    mismatch_counts: BTreeMap<String, u64>,
    steps_by_kind: BTreeMap<StepKind, u64>,
    first: Option<(u64, Digraph, String)>,
}

impl Tally {
    fn one(index: u64, g: Digraph) -> Tally {
        let check = check_graph(&g);
        let mut t = Tally {
            edges: g.edge_count() as u64,
            ..Tally::default()
        };
        let mut names = check.mismatches;
        names.sort();
        names.dedup();
        t.mismatched = u64::from(!names.is_empty());
        t.unexplained = u64::from(!check.unexplained.is_empty());
        t.mismatch_counts = names.into_iter().map(|n| (n, 1)).collect();
        for kind in check.step_kinds {
            *t.steps_by_kind.entry(kind).or_default() += 1;
        }
        if let Some(reason) = check.violation {
            t.violations = 1;
            t.first = Some((index, g, reason));
        }
        t
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.edges += other.edges;
        self.violations += other.violations;
        self.mismatched += other.mismatched;
        self.unexplained += other.unexplained;
        for (k, v) in other.mismatch_counts {
            *self.mismatch_counts.entry(k).or_default() += v;
        }
        for (k, v) in other.steps_by_kind {
            *self.steps_by_kind.entry(k).or_default() += v;
        }
        self.first = match (self.first, other.first) {
            (Some(a), Some(b)) => Some(if a.0 <= b.0 { a } else { b }),
            (a, b) => a.or(b),
        };
        self
    }
}

/// Checks `count` random graphs. The summary is the same for any thread count.
pub fn run_fuzz(cfg: &FuzzConfig) -> Result<FuzzSummary> {
    cfg.validate()?;
    let tally = (0..cfg.count as u64)
        .into_par_iter()
        .fold(Tally::default, |acc, k| {
            let g = random_digraph(cfg.seed, k, cfg.nodes, cfg.edge_prob, cfg.loops);
            acc.merge(Tally::one(k, g))
        })
        .reduce(Tally::default, Tally::merge);
    Ok(FuzzSummary {
        seed: cfg.seed,
        count: cfg.count,
        nodes: cfg.nodes,
        edge_prob: cfg.edge_prob,
        loops: cfg.loops,
        edges_total: tally.edges,
        violations: tally.violations,
        graphs_with_mismatches: tally.mismatched,
        graphs_with_unexplained: tally.unexplained,
        mismatch_counts: tally.mismatch_counts,
        steps_by_kind: tally.steps_by_kind,
        counterexample: tally
            .first
            .map(|(index, graph, reason)| FuzzCounterexample { index, graph, reason }),
    })
}

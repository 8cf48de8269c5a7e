//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the
//! libtest harness so the lines are always printed.

use std::collections::BTreeSet;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use neighborhood_bound::certificate::EDGE_FORMULA_CHECKS;
use neighborhood_bound::corollaries::sweep_undirected;
use neighborhood_bound::{
    build_certificate, builtin_group, exhaustive_verify, oracle_check, verify_certificate, Digraph, FiniteGroup,
    GradingDatum, Matrix, UndirectedGraph,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BIN: &str = env!("CARGO_BIN_EXE_neighborhood-bound");

/// Graphs per n (n = 1..=4, loops allowed) whose certificates fail one of the
/// exact removed-edge formulas; every one is explained by extra internal
/// edges among the removed vertices.
const KNOWN_MISMATCHED: [u64; 4] = [0, 0, 10, 3519];

struct Outcome {
    id: u8,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn outcome(id: u8, name: &'static str, failures: Vec<String>, detail: String) -> Outcome {
    let pass = failures.is_empty();
    let detail = if pass {
        detail
    } else {
        format!("{detail}; {}", failures.join("; "))
    };
    Outcome { id, name, pass, detail }
}

fn time_limit(failures: &mut Vec<String>, elapsed: Duration, limit_secs: f64) {
    if elapsed.as_secs_f64() >= limit_secs {
        failures.push(format!("took {:.2}s, limit {limit_secs}s", elapsed.as_secs_f64()));
    }
}

/// `(|T|, |E|)` straight from the definition of shared in/out-neighbors.
fn definition_counts(n: usize, edge: impl Fn(usize, usize) -> bool) -> (usize, usize) {
    let mut t = 0;
    let mut e = 0;
    for i in 0..n {
        for j in 0..n {
            e += usize::from(edge(i, j));
            t += usize::from((0..n).any(|k| (edge(k, i) && edge(k, j)) || (edge(i, k) && edge(j, k))));
        }
    }
    (t, e)
}

fn criterion_1() -> Outcome {
    let mut failures = Vec::new();
    let mut counts = Vec::new();
    let mut elapsed = Duration::ZERO;
    for n in 1..=4usize {
        let total = 1u64 << (n * n);
        let mut violations = 0;
        let started = Instant::now();
        let results: Vec<_> = (0..total)
            .map(|code| oracle_check(&Digraph::from_code(n, code, true)))
            .collect();
        elapsed += started.elapsed();
        for (code, o) in results.iter().enumerate() {
            violations += usize::from(!o.holds);
            let (t, e) = definition_counts(n, |i, j| (code >> (i * n + j)) & 1 == 1);
            if (o.t_size, o.e_size) != (t, e) {
                failures.push(format!(
                    "n={n} code={code}: oracle ({}, {}) vs definition ({t}, {e})",
                    o.t_size, o.e_size
                ));
            }
        }
        if violations > 0 {
            failures.push(format!("n={n}: {violations} violations"));
        }
        counts.push(format!("n={n}: {total}"));
    }
    time_limit(&mut failures, elapsed, 10.0);
    failures.truncate(5);
    outcome(
        1,
        "bound holds on every digraph with n <= 4 (loops allowed)",
        failures,
        format!(
            "{}; 0 violations; oracle time {:.3}s",
            counts.join(", "),
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_2() -> Outcome {
    let mut failures = Vec::new();
    let summary = exhaustive_verify(4, true, false).expect("n = 4 is inside the guard");
    let known: BTreeSet<String> = EDGE_FORMULA_CHECKS
        .iter()
        .flat_map(|c| ["EulerCase2", "NonEuler"].map(|k| format!("{k}:{c}")))
        .collect();
    let mut mismatched = Vec::new();
    for (s, &limit) in summary.per_n.iter().zip(&KNOWN_MISMATCHED) {
        if s.violations > 0 {
            failures.push(format!("n={}: {} soundness violations", s.n, s.violations));
        }
        if s.graphs_with_unexplained > 0 {
            failures.push(format!(
                "n={}: {} graphs with unexplained mismatches",
                s.n, s.graphs_with_unexplained
            ));
        }
        if s.graphs_with_mismatches > limit {
            failures.push(format!(
                "n={}: {} mismatched graphs exceeds documented {limit}",
                s.n, s.graphs_with_mismatches
            ));
        }
        for name in s.mismatch_counts.keys() {
            if !known.contains(name) {
                failures.push(format!("n={}: unexpected mismatch class {name}", s.n));
            }
        }
        mismatched.push(s.graphs_with_mismatches.to_string());
    }
    if let Some(c) = &summary.counterexample {
        failures.push(format!("counterexample n={} code={}: {}", c.n, c.code, c.reason));
    }
    outcome(
        2,
        "certificates build and verify on every graph of criterion 1",
        failures,
        format!(
            "{} certificates, 0 unsound; edge-formula mismatches per n = [{}] (documented [{}], all explained)",
            summary.total_graphs,
            mismatched.join(", "),
            KNOWN_MISMATCHED.map(|k| k.to_string()).join(", ")
        ),
    )
}

fn criterion_3() -> Outcome {
    let mut failures = Vec::new();
    for n in 2..=10 {
        let g = Digraph::directed_cycle(n);
        let o = oracle_check(&g);
        let (t, e) = definition_counts(n, |i, j| j == (i + 1) % n);
        if (o.t_size, o.e_size) != (n, n) || (t, e) != (n, n) {
            failures.push(format!("C_{n}: |T| = {}, |E| = {}", o.t_size, o.e_size));
        }
        let cert = build_certificate(&g).expect("certificate");
        if verify_certificate(&g, &cert).is_err() {
            failures.push(format!("C_{n}: certificate rejected"));
        }
    }
    outcome(
        3,
        "directed n-cycles are tight, n = 2..10",
        failures,
        "|T| = |E| = n for all 9 cycles".into(),
    )
}

fn criterion_4() -> Outcome {
    let mut failures = Vec::new();
    let started = Instant::now();
    let sweep = sweep_undirected(5);
    let elapsed = started.elapsed();
    if sweep.graphs != 1024 || sweep.violations != 0 {
        failures.push(format!("{} graphs, {} violations", sweep.graphs, sweep.violations));
    }
    let pairs: Vec<(usize, usize)> = (0..5).flat_map(|i| (i + 1..5).map(move |j| (i, j))).collect();
    for code in 0..1u64 << 10 {
        let mut adj = [[0u32; 5]; 5];
        for (b, &(i, j)) in pairs.iter().enumerate() {
            if code >> b & 1 == 1 {
                adj[i][j] = 1;
                adj[j][i] = 1;
            }
        }
        let g1: u32 = adj.iter().flatten().sum();
        let g2 = (0..5)
            .flat_map(|i| (0..5).map(move |j| (i, j)))
            .filter(|&(i, j)| (0..5).any(|k| adj[i][k] * adj[k][j] > 0))
            .count();
        let check = UndirectedGraph::from_code(5, code).corollary_check();
        if (check.g1_size, check.g2_size) != (g1 as usize, g2) || g2 < g1 as usize {
            failures.push(format!(
                "code {code}: library ({}, {}) vs squaring ({g2}, {g1})",
                check.g2_size, check.g1_size
            ));
        }
    }
    time_limit(&mut failures, elapsed, 1.0);
    failures.truncate(5);
    outcome(
        4,
        "walk-two corollary on all 1,024 simple graphs with 5 vertices",
        failures,
        format!("1024 graphs, 0 violations, sweep {:.4}s", elapsed.as_secs_f64()),
    )
}

fn criterion_5() -> Outcome {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let mut tight = 0;
    for trial in 0..10_000 {
        let n = rng.gen_range(1..=8);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                (0..n)
                    .map(|_| if rng.gen_bool(0.7) { 0.0 } else { 1.0 - rng.gen::<f64>() })
                    .collect()
            })
            .collect();
        let mut numeric = BTreeSet::new();
        for i in 0..n {
            for j in 0..n {
                let s: f64 = (0..n).map(|k| rows[i][k] * rows[j][k] + rows[k][i] * rows[k][j]).sum();
                if s != 0.0 {
                    numeric.insert((i, j));
                }
            }
        }
        let supp = rows.iter().flatten().filter(|x| **x != 0.0).count();
        let a = Matrix::new(rows).expect("valid matrix");
        let symbolic: BTreeSet<(usize, usize)> = a.gram_support().iter().collect();
        if symbolic != numeric {
            failures.push(format!("trial {trial}: symbolic and numeric supports differ"));
        }
        let check = a.corollary_check();
        if !check.holds || numeric.len() < supp || check.supp_size != supp {
            failures.push(format!(
                "trial {trial}: |Supp(AAᵗ+AᵗA)| = {} < |Supp(A)| = {supp}",
                numeric.len()
            ));
        }
        tight += usize::from(numeric.len() == supp);
    }
    failures.truncate(5);
    outcome(
        5,
        "support corollary on 10^4 seeded matrices (n <= 8, sparsity 0.7)",
        failures,
        format!("10000 matrices, supports agree exactly, 0 violations, {tight} tight"),
    )
}

/// Component dimensions by counting triples `(i, h, j)`.
fn triple_dims(g: &FiniteGroup, h: &[usize], tuple: &[usize]) -> Vec<usize> {
    let mut dims = vec![0; g.order()];
    for &gi in tuple {
        for &x in h {
            for &gj in tuple {
                dims[g.mul(g.mul(g.inv(gi), x), gj)] += 1;
            }
        }
    }
    dims
}

fn component_edges(g: &FiniteGroup, h: &[usize], tuple: &[usize], target: usize) -> Vec<Vec<bool>> {
    tuple
        .iter()
        .map(|&gi| {
            tuple
                .iter()
                .map(|&gj| h.iter().any(|&x| g.mul(g.mul(g.inv(gi), x), gj) == target))
                .collect()
        })
        .collect()
}

const GROUPS: [&str; 15] = [
    "C1", "C2", "C3", "C4", "C5", "C6", "C7", "C8", "C2xC2", "C2xC4", "C2xC2xC2", "D3", "D4", "Q8", "S3",
];

fn criterion_6() -> Outcome {
    let mut failures = Vec::new();
    let started = Instant::now();
    let mut data = 0u64;
    for spec in GROUPS {
        let group = Arc::new(builtin_group(spec).expect("builtin group"));
        let e = group.identity();
        let m = group.order();
        for sub in group.all_subgroups().expect("small group") {
            let h = sub.elements();
            let closed = h.iter().all(|&a| h.iter().all(|&b| sub.contains(group.mul(a, b))));
            if !closed || !m.is_multiple_of(h.len()) {
                failures.push(format!("{spec}: {h:?} is not a subgroup"));
            }
            for n in 1..=3u32 {
                for code in 0..m.pow(n) {
                    let tuple: Vec<usize> = (0..n).map(|p| code / m.pow(n - 1 - p) % m).collect();
                    data += 1;
                    let dims = triple_dims(&group, h, &tuple);
                    let datum = GradingDatum::new(Arc::clone(&group), sub.clone(), tuple.clone()).expect("datum");
                    let tag = format!("{spec} H={h:?} tuple={tuple:?}");
                    if datum.dimension_table().dims() != dims.as_slice() {
                        failures.push(format!("{tag}: dimension table disagrees with triple count"));
                    }
                    // (a)
                    let nn = n as usize;
                    if dims.iter().sum::<usize>() != nn * nn * h.len() {
                        failures.push(format!("{tag}: dimensions do not sum to n²|H|"));
                    }
                    // (b)
                    if dims.iter().any(|&d| d > dims[e]) {
                        failures.push(format!("{tag}: some component exceeds the identity component"));
                    }
                    let ee = component_edges(&group, h, &tuple, e);
                    let e_e: usize = ee.iter().flatten().filter(|b| **b).count();
                    for x in group.elements() {
                        let adj = component_edges(&group, h, &tuple, x);
                        let edge = |i: usize, j: usize| adj[i][j];
                        let (t, e_g) = definition_counts(nn, edge);
                        if e_g != dims[x] {
                            failures.push(format!("{tag}: |E_{x}| = {e_g} but dim = {}", dims[x]));
                        }
                        // (c)
                        for i in 0..nn {
                            for j in 0..nn {
                                let in_t = (0..nn).any(|k| (edge(k, i) && edge(k, j)) || (edge(i, k) && edge(j, k)));
                                if in_t && !ee[i][j] {
                                    failures.push(format!("{tag}: ({i},{j}) in T(Γ_{x}) but not in E_e"));
                                }
                            }
                        }
                        // (d)
                        if !(e_e >= t && t >= e_g) {
                            failures.push(format!("{tag}: chain {e_e} >= {t} >= {e_g} fails for element {x}"));
                        }
                    }
                    if !datum.check().holds() {
                        failures.push(format!("{tag}: library report flags a violation"));
                    }
                }
            }
        }
    }
    let elapsed = started.elapsed();
    time_limit(&mut failures, elapsed, 60.0);
    failures.truncate(5);
    outcome(
        6,
        "grading bounds (a)-(d) for 15 groups, all subgroups, n <= 3",
        failures,
        format!("{data} data, 0 violations, {:.2}s", elapsed.as_secs_f64()),
    )
}

fn run_bin(args: &[&str], threads: Option<&str>) -> (i32, Vec<u8>) {
    let mut cmd = Command::new(BIN);
    cmd.args(args);
    match threads {
        Some(t) => cmd.env("NEIGHBORHOOD_BOUND_THREADS", t),
        None => cmd.env_remove("NEIGHBORHOOD_BOUND_THREADS"),
    };
    let out = cmd.output().expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn criterion_7() -> Outcome {
    let mut failures = Vec::new();
    let golden_path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden/c2_trivial_h_tuple_e_a.json");
    let golden = std::fs::read(golden_path).expect("golden file present");
    let (code, produced) = run_bin(&["grading", "C2", "--tuple", "e,a"], None);
    if code != 0 {
        failures.push(format!("grading exited with {code}"));
    }
    if produced != golden {
        failures.push("output differs from golden file".into());
    }
    let c2 = builtin_group("C2").expect("C2");
    let (e, a) = (c2.identity(), 1 - c2.identity());
    let derived = triple_dims(&c2, &[e], &[e, a]);
    let report: serde_json::Value = serde_json::from_slice(&golden).expect("golden is JSON");
    let golden_dims = [c2.name(e), c2.name(a)].map(|name| report["dims"][name].as_u64());
    if derived != [2, 2] || golden_dims != [Some(2), Some(2)] {
        failures.push(format!("dims: derived {derived:?}, golden {golden_dims:?}"));
    }
    for spec in GROUPS {
        let group = Arc::new(builtin_group(spec).expect("builtin group"));
        for x in group.elements() {
            let datum = GradingDatum::new(Arc::clone(&group), group.whole(), vec![x]).expect("datum");
            if datum.dimension_table().dims().iter().any(|&d| d != 1) {
                failures.push(format!(
                    "{spec}, tuple ({}): a component is not one-dimensional",
                    group.name(x)
                ));
            }
        }
    }
    outcome(
        7,
        "worked grading example matches golden file; n = 1, H = G gives unit components",
        failures,
        "C2, H = {e}, tuple (e, a): dims e:2, a:2; 15 groups with n = 1, H = G all dims 1".into(),
    )
}

fn criterion_8() -> Outcome {
    let mut failures = Vec::new();
    let commands: [&[&str]; 4] = [
        &[
            "fuzz",
            "--seed",
            "42",
            "--count",
            "3000",
            "--nodes",
            "7",
            "--edge-prob",
            "0.3",
        ],
        &[
            "fuzz",
            "--seed",
            "7",
            "--count",
            "2000",
            "--nodes",
            "9",
            "--edge-prob",
            "0.2",
            "--no-loops",
        ],
        &["grading-sweep", "D4", "2"],
        &["grading-sweep", "C2xC4", "2"],
    ];
    for args in commands {
        let runs: Vec<(i32, Vec<u8>)> = [Some("1"), Some("1"), Some("8"), Some("8"), None]
            .into_iter()
            .map(|t| run_bin(args, t))
            .collect();
        if runs.iter().any(|(code, _)| *code != 0) {
            failures.push(format!("{}: nonzero exit", args.join(" ")));
        }
        if runs.iter().any(|(_, out)| out != &runs[0].1 || out.is_empty()) {
            failures.push(format!("{}: output differs between runs", args.join(" ")));
        }
    }
    outcome(
        8,
        "fuzz and grading-sweep output is byte-identical across runs and thread counts",
        failures,
        "4 commands x (1, 1, 8, 8, default threads) identical".into(),
    )
}

fn main() {
    let started = Instant::now();
    let criteria: [fn() -> Outcome; 8] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
    ];
    let mut failed = 0;
    for run in criteria {
        let o = run();
        println!(
            "{} [{}] {}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.id,
            o.name,
            o.detail
        );
        failed += usize::from(!o.pass);
    }
    println!(
        "acceptance: {} of {} criteria passed in {:.1}s",
        criteria.len() - failed,
        criteria.len(),
        started.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

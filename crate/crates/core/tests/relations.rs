use std::collections::BTreeSet;

use neighborhood_bound::{Digraph, PairRelation};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Pairs = BTreeSet<(usize, usize)>;

/// Composition by enumerating every triple (a, b, c).
fn compose_oracle(n: usize, r: &Pairs, s: &Pairs) -> Pairs {
    let mut out = Pairs::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if r.contains(&(a, b)) && s.contains(&(b, c)) {
                    out.insert((a, c));
                }
            }
        }
    }
    out
}

/// Mutual pairs straight from the definition: a shared in- or out-neighbor.
fn mutual_oracle(n: usize, e: &Pairs) -> Pairs {
    let mut out = Pairs::new();
    for i in 0..n {
        for j in 0..n {
            let shared = (0..n)
                .any(|k| (e.contains(&(k, i)) && e.contains(&(k, j))) || (e.contains(&(i, k)) && e.contains(&(j, k))));
            if shared {
                out.insert((i, j));
            }
        }
    }
    out
}

/// Length of a shortest directed cycle (k >= 2) by trying every start and
/// every walk length, using boolean matrix powers.
fn girth_oracle(n: usize, e: &Pairs) -> Option<usize> {
    let mut reach: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| e.contains(&(i, j))).collect()).collect();
    for len in 2..=n {
        let next: Vec<Vec<bool>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).any(|k| reach[i][k] && e.contains(&(k, j))))
                    .collect()
            })
            .collect();
        reach = next;
        if (0..n).any(|i| reach[i][i]) {
            return Some(len);
        }
    }
    None
}

fn pairs_of(rel: &PairRelation) -> Pairs {
    rel.iter().collect()
}

fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64, loops: bool) -> Digraph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if (loops || i != j) && rng.gen_bool(p) {
                edges.push((i, j));
            }
        }
    }
    Digraph::new(n, edges).unwrap()
}

prop_compose! {
    fn arb_digraph(max_n: usize)(n in 0..=max_n)(
        n in Just(n),
        cells in proptest::collection::vec(any::<bool>(), n * n),
    ) -> Digraph {
        let edges = (0..n * n).filter(|&c| cells[c]).map(|c| (c / n, c % n));
        Digraph::new(n, edges).unwrap()
    }
}

#[test]
fn compose_matches_triple_enumeration() {
    let r: Pairs = [(0, 1), (2, 1)].into();
    let op: Pairs = [(1, 0), (1, 2)].into();
    let expected = compose_oracle(3, &r, &op);
    assert_eq!(expected, [(0, 0), (0, 2), (2, 0), (2, 2)].into());
    let rel = PairRelation::from_pairs(3, r.iter().copied()).unwrap();
    assert_eq!(pairs_of(&rel.compose(&rel.opposite()).unwrap()), expected);
}

#[test]
fn both_routes_agree_on_all_small_graphs() {
    for n in 0..=4usize {
        for code in 0..1u64 << (n * n) {
            let g = Digraph::from_code(n, code, true);
            let via_compose = g.mutual_pairs();
            assert_eq!(via_compose, g.mutual_pairs_by_intersection(), "n={n} code={code}");
            if n <= 3 {
                assert_eq!(pairs_of(&via_compose), mutual_oracle(n, &pairs_of(g.edges())));
            }
        }
    }
}

#[test]
fn both_routes_agree_on_random_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..10_000 {
        let n = rng.gen_range(0..=12);
        let p = rng.gen_range(0.0..0.7);
        let g = random_graph(&mut rng, n, p, true);
        assert_eq!(g.mutual_pairs(), g.mutual_pairs_by_intersection(), "{g:?}");
    }
}

#[test]
fn shortest_cycle_length_matches_matrix_powers() {
    for n in 1..=4usize {
        for code in 0..1u64 << (n * n - n) {
            let g = Digraph::from_code(n, code, false);
            let e = pairs_of(g.edges());
            let cycle = g.shortest_directed_cycle().unwrap();
            assert_eq!(cycle.as_ref().map(Vec::len), girth_oracle(n, &e), "code={code}");
            if let Some(c) = cycle {
                let k = c.len();
                assert!((0..k).all(|i| g.has_edge(c[i], c[(i + 1) % k])));
                assert_eq!(c[0], *c.iter().min().unwrap());
            }
        }
    }
}

proptest! {
    #[test]
    fn mutual_pairs_match_definition(g in arb_digraph(7)) {
        prop_assert_eq!(pairs_of(&g.mutual_pairs()), mutual_oracle(g.n(), &pairs_of(g.edges())));
    }

    #[test]
    fn mutual_pairs_symmetric_with_reflexive_support(g in arb_digraph(9)) {
        let t = g.mutual_pairs();
        prop_assert!(t.is_symmetric());
        let isolated = g.isolated_vertices();
        for v in 0..g.n() {
            prop_assert_eq!(t.contains(v, v), !isolated.contains(&v));
        }
    }

    #[test]
    fn mutual_pairs_monotone_under_subgraphs(g in arb_digraph(8), drop in proptest::collection::vec(any::<bool>(), 64)) {
        let kept = g.edges().iter().enumerate().filter(|(k, _)| !drop[k % 64]).map(|(_, e)| e);
        let sub = Digraph::new(g.n(), kept).unwrap();
        prop_assert!(sub.mutual_pairs().is_subset(&g.mutual_pairs()));

        let removed: Vec<usize> = (0..g.n()).filter(|v| drop[*v]).collect();
        let (induced, map) = g.remove_vertices(&removed).unwrap();
        let full = g.mutual_pairs();
        for (a, b) in induced.mutual_pairs().iter() {
            prop_assert!(full.contains(map[a], map[b]));
        }
    }

    #[test]
    fn degree_sums_equal_edge_count(g in arb_digraph(10)) {
        let d = g.degree_profile();
        prop_assert_eq!(d.in_degree.iter().sum::<usize>(), g.edge_count());
        prop_assert_eq!(d.out_degree.iter().sum::<usize>(), g.edge_count());
    }

    #[test]
    fn opposite_is_an_involution(g in arb_digraph(10)) {
        let e = g.edges();
        prop_assert_eq!(&e.opposite().opposite(), e);
        prop_assert_eq!(e.opposite().len(), e.len());
    }

    #[test]
    fn json_and_text_forms_round_trip(g in arb_digraph(8)) {
        prop_assert_eq!(Digraph::parse(&g.to_json()).unwrap(), g.clone());
        prop_assert_eq!(Digraph::parse(&g.to_text()).unwrap(), g);
    }
}

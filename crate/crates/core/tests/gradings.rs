use std::sync::Arc;

use neighborhood_bound::gradings::DEFAULT_ENUMERATION_BUDGET;
use neighborhood_bound::{builtin_group, enumerate_data, FiniteGroup, GradingDatum};

const SPECS: [&str; 15] = [
    "C1", "C2", "C3", "C4", "C5", "C6", "C7", "C8", "C2xC2", "C2xC4", "C2xC2xC2", "D3", "D4", "Q8", "S3",
];

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

#[test]
fn builtin_orders_follow_their_formulas() {
    for n in 1..=8 {
        assert_eq!(builtin_group(&format!("C{n}")).unwrap().order(), n);
        assert_eq!(builtin_group(&format!("D{n}")).unwrap().order(), 2 * n);
    }
    for n in 1..=5 {
        assert_eq!(builtin_group(&format!("S{n}")).unwrap().order(), factorial(n));
    }
    assert_eq!(builtin_group("C3xD4xC2").unwrap().order(), 48);
}

#[test]
fn subgroups_obey_lagrange_and_reclose() {
    for spec in SPECS {
        let g = builtin_group(spec).unwrap();
        let subs = g.all_subgroups().unwrap();
        assert_eq!(subs.first().unwrap().elements(), &[g.identity()]);
        assert_eq!(subs.last().unwrap().len(), g.order());
        for h in &subs {
            assert_eq!(g.order() % h.len(), 0, "{spec}: {:?}", h);
            assert_eq!(&g.subgroup_from_generators(h.elements()), h);
            g.subgroup(h.elements()).unwrap();
        }
    }
}

/// Subgroup counts by brute force: every subset that is closed.
fn count_subgroups_brute(g: &FiniteGroup) -> usize {
    let n = g.order();
    (0..1u32 << n)
        .filter(|mask| {
            let has = |x: usize| mask >> x & 1 == 1;
            has(g.identity()) && (0..n).all(|a| !has(a) || (0..n).all(|b| !has(b) || has(g.mul(a, b))))
        })
        .count()
}

#[test]
fn subgroup_counts_match_brute_force() {
    for spec in ["C1", "C4", "C6", "S3", "C2xC2", "D4", "Q8", "C2xC2xC2"] {
        let g = builtin_group(spec).unwrap();
        assert_eq!(g.all_subgroups().unwrap().len(), count_subgroups_brute(&g), "{spec}");
    }
}

#[test]
fn component_digraphs_realize_dimensions() {
    for spec in ["C4", "S3", "Q8", "C2xC2"] {
        let g = Arc::new(builtin_group(spec).unwrap());
        for d in enumerate_data(g.clone(), 2, DEFAULT_ENUMERATION_BUDGET).unwrap() {
            let table = d.dimension_table();
            assert_eq!(table.total(), d.total_dimension());
            for x in g.elements() {
                let gamma = d.component_digraph(x);
                assert_eq!(gamma.edge_count(), table.get(x));
                assert!(d.verify_injection(x).contained);
            }
        }
    }
}

#[test]
fn group_algebra_case_has_unit_components() {
    for spec in SPECS {
        let g = Arc::new(builtin_group(spec).unwrap());
        for x in g.elements() {
            let d = GradingDatum::new(g.clone(), g.whole(), vec![x]).unwrap();
            assert!(d.dimension_table().dims().iter().all(|&v| v == 1), "{spec}");
        }
    }
}

use std::sync::Arc;

use anyhow::{bail, Result};
use neighborhood_bound::corollaries::{sweep_undirected, UndirectedSweep};
use neighborhood_bound::gradings::{enumeration_size, DatumReport};
use neighborhood_bound::{builtin_group, enumerate_data, GradingDatum};
use rayon::prelude::*;
use serde::Serialize;

/// Default cap on `n` for the undirected sweep (2^15 graphs).
pub const UNDIRECTED_GUARD: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UndirectedSummary {
    pub n_max: usize,
    pub per_n: Vec<UndirectedSweep>,
    pub total_graphs: u64,
    pub total_violations: u64,
}

impl UndirectedSummary {
    pub fn holds(&self) -> bool {
        self.total_violations == 0
    }
}

/// Every simple undirected graph on `1..=n_max` vertices.
pub fn undirected_exhaustive(n_max: usize, override_guard: bool) -> Result<UndirectedSummary> {
    if n_max * n_max.saturating_sub(1) / 2 >= 40 || (n_max > UNDIRECTED_GUARD && !override_guard) {
        bail!(
            "undirected enumeration limited to n <= {UNDIRECTED_GUARD} (requested {n_max}); pass --force to go further"
        );
    }
    let per_n: Vec<UndirectedSweep> = (1..=n_max).into_par_iter().map(sweep_undirected).collect();
    Ok(UndirectedSummary {
        n_max,
        total_graphs: per_n.iter().map(|s| s.graphs).sum(),
        total_violations: per_n.iter().map(|s| s.violations).sum(),
        per_n,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub data: u64,
    pub violations: u64,
    /// Data where some `g ≠ e` reaches `dim Λ_e`.
    pub ties_with_identity: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GradingSweep {
    pub group: String,
    pub order: usize,
    pub n_max: usize,
    pub subgroups: usize,
    pub data: u64,
    pub violations: u64,
    pub per_n: Vec<SweepRow>,
    /// Full report for the first violating datum in enumeration order.
    pub first_violation: Option<DatumReport>,
}

impl GradingSweep {
    pub fn holds(&self) -> bool {
        self.violations == 0
    }
}

fn ties(report: &DatumReport, datum: &GradingDatum) -> bool {
    let e = datum.group().identity();
    let dims = report.dims.dims();
    datum.group().elements().any(|g| g != e && dims[g] == dims[e])
}

/// Checks every datum over `spec` with tuple length up to `n_max`.
pub fn grading_sweep(spec: &str, n_max: usize, budget: u128) -> Result<GradingSweep> {
    if n_max == 0 {
        bail!("n_max must be at least 1");
    }
    let group = Arc::new(builtin_group(spec)?);
    let subgroups = group.all_subgroups()?.len();
    let data: Vec<GradingDatum> = enumerate_data(Arc::clone(&group), n_max, budget)?.collect();
    debug_assert_eq!(data.len() as u128, enumeration_size(&group, subgroups, n_max));
    let results: Vec<(usize, bool, bool, Option<DatumReport>)> = data
        .par_iter()
        .map(|d| {
            let report = d.check();
            let tie = ties(&report, d);
            let holds = report.holds();
            let keep = (!holds).then(|| {
                let mut r = report;
                r.datum = d.to_json_with_spec(spec);
                r
            });
            (d.n(), holds, tie, keep)
        })
        .collect();

    let mut per_n: Vec<SweepRow> = (1..=n_max)
        .map(|n| SweepRow {
            n,
            data: 0,
            violations: 0,
            ties_with_identity: 0,
        })
        .collect();
    let mut first_violation = None;
    for (n, holds, tie, report) in results {
        let row = &mut per_n[n - 1];
        row.data += 1;
        row.violations += u64::from(!holds);
        row.ties_with_identity += u64::from(tie);
        if first_violation.is_none() {
            first_violation = report;
        }
    }
    Ok(GradingSweep {
        group: spec.to_string(),
        order: group.order(),
        n_max,
        subgroups,
        data: per_n.iter().map(|r| r.data).sum(),
        violations: per_n.iter().map(|r| r.violations).sum(),
        per_n,
        first_violation,
    })
}

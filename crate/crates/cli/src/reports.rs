use std::fmt::Write as _;
use std::sync::Arc;

use anyhow::{anyhow, Context, Result};
use neighborhood_bound::certificate::{replay_certificate, StepDetail};
use neighborhood_bound::corollaries::{MatrixCheck, UndirectedCheck};
use neighborhood_bound::gradings::DatumReport;
use neighborhood_bound::{
    build_certificate, builtin_group, oracle_check, verify_certificate, Certificate, DatumJson, Digraph, GradingDatum,
    Matrix, OracleResult, StepKind, UndirectedGraph, VerifyReport,
};
use serde::Serialize;

use crate::Verdict;

/// Input accepted by `check`: a digraph, or an undirected graph when the
/// JSON object carries `"undirected": true`.
pub enum CheckInput {
    Directed(Digraph),
    Undirected(UndirectedGraph),
}

impl CheckInput {
    pub fn parse(input: &str) -> Result<Self> {
        if input.trim_start().starts_with('{') {
            let value: serde_json::Value = serde_json::from_str(input).context("malformed JSON")?;
            if value.get("undirected").is_some() {
                return Ok(CheckInput::Undirected(UndirectedGraph::from_json_str(input)?));
            }
        }
        Ok(CheckInput::Directed(Digraph::parse(input)?))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StepSummary {
    pub kind: StepKind,
    pub removed: Vec<usize>,
    pub removed_edges: usize,
    pub attributed: usize,
    pub detail: StepDetail,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub graph: Digraph,
    pub oracle: OracleResult,
    pub steps: Vec<StepSummary>,
    pub certificate_verified: bool,
    pub verify_error: Option<String>,
    /// Failed closed-form cross-checks, as `Kind:name`.
    pub mismatches: Vec<String>,
    pub unexplained: Vec<String>,
    pub holds: bool,
}

impl CheckReport {
    pub fn verdict(&self, strict: bool) -> Verdict {
        Verdict::from_holds(self.holds && !(strict && !self.mismatches.is_empty()))
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let o = &self.oracle;
        let _ = writeln!(s, "n = {}, |E| = {}, |T| = {}", self.graph.n(), o.e_size, o.t_size);
        let _ = writeln!(s, "oracle: {}", if o.holds { "holds" } else { "VIOLATED" });
        for (k, step) in self.steps.iter().enumerate() {
            let _ = writeln!(
                s,
                "step {k}: {:<12} removed {:?}, {} edges, {} pairs attributed",
                step.kind.to_string(),
                step.removed,
                step.removed_edges,
                step.attributed
            );
        }
        match &self.verify_error {
            None => s.push_str("certificate: verified\n"),
            Some(e) => {
                let _ = writeln!(s, "certificate: FAILED ({e})");
            }
        }
        for m in &self.mismatches {
            let _ = writeln!(s, "cross-check mismatch: {m}");
        }
        s
    }
}

pub fn check_digraph(g: &Digraph) -> CheckReport {
    let oracle = oracle_check(g);
    let (steps, verify_error, mismatches, unexplained) = match build_certificate(g) {
        Err(e) => (Vec::new(), Some(e.to_string()), Vec::new(), Vec::new()),
        Ok(cert) => {
            let steps = summarize(&cert);
            let err = verify_certificate(g, &cert).err().map(|e| e.to_string());
            (steps, err, cert.cross_check_mismatches(), cert.unexplained_mismatches())
        }
    };
    CheckReport {
        graph: g.clone(),
        oracle,
        certificate_verified: verify_error.is_none(),
        holds: oracle.holds && verify_error.is_none(),
        steps,
        verify_error,
        mismatches,
        unexplained,
    }
}

fn summarize(cert: &Certificate) -> Vec<StepSummary> {
    cert.steps
        .iter()
        .map(|s| StepSummary {
            kind: s.kind,
            removed: s.removed.clone(),
            removed_edges: s.removed_edges,
            attributed: s.attributed.len(),
            detail: s.detail.clone(),
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct UndirectedReport {
    pub graph: UndirectedGraph,
    pub check: UndirectedCheck,
}

impl UndirectedReport {
    pub fn new(graph: UndirectedGraph) -> Self {
        let check = graph.corollary_check();
        UndirectedReport { graph, check }
    }

    pub fn to_text(&self) -> String {
        format!(
            "undirected, n = {}: |γ₂| = {} >= |γ₁| = {}: {}\n",
            self.graph.n(),
            self.check.g2_size,
            self.check.g1_size,
            if self.check.holds { "holds" } else { "VIOLATED" }
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyOutcome {
    pub verified: bool,
    pub error: Option<String>,
    pub report: Option<VerifyReport>,
}

/// Replays `cert` against `g`; the per-step report is kept even when the
/// certificate fails.
pub fn verify(g: &Digraph, cert: &Certificate) -> VerifyOutcome {
    let replay = replay_certificate(g, cert);
    let error = match &replay {
        Err(e) => Some(e.to_string()),
        Ok(_) => verify_certificate(g, cert).err().map(|e| e.to_string()),
    };
    VerifyOutcome {
        verified: error.is_none(),
        error,
        report: replay.ok(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MatrixReport {
    pub n: usize,
    pub support: Vec<(usize, usize)>,
    pub gram_support: Vec<(usize, usize)>,
    pub check: MatrixCheck,
}

impl MatrixReport {
    pub fn new(a: &Matrix) -> Self {
        MatrixReport {
            n: a.n(),
            support: a.support().to_pairs(),
            gram_support: a.gram_support().to_pairs(),
            check: a.corollary_check(),
        }
    }

    pub fn to_text(&self) -> String {
        format!(
            "n = {}: |Supp(AAᵗ+AᵗA)| = {} >= |Supp(A)| = {}: {}\n",
            self.n,
            self.check.gram_size,
            self.check.supp_size,
            if self.check.holds { "holds" } else { "VIOLATED" }
        )
    }
}

pub fn matrix_dot(a: &Matrix) -> String {
    a.support_digraph().to_dot("support", Some(&a.gram_support()))
}

/// Builds a datum from a group spec, generator names and tuple names.
pub fn grading_datum(spec: &str, h: &[String], tuple: &[String]) -> Result<GradingDatum> {
    let group = Arc::new(builtin_group(spec)?);
    let gens = h
        .iter()
        .map(|s| group.element(s))
        .collect::<Result<Vec<_>, _>>()
        .context("in --h")?;
    let tuple = tuple
        .iter()
        .map(|s| group.element(s))
        .collect::<Result<Vec<_>, _>>()
        .context("in --tuple")?;
    let h = group.subgroup_from_generators(&gens);
    Ok(GradingDatum::new(group, h, tuple)?)
}

/// Parses a datum file `{"group": .., "H": [..], "tuple": [..]}`.
pub fn grading_datum_json(input: &str) -> Result<(GradingDatum, DatumJson)> {
    let json: DatumJson = serde_json::from_str(input).context("malformed datum JSON")?;
    let datum = json.resolve()?;
    Ok((datum, json))
}

pub fn grading_report(datum: &GradingDatum, source: &DatumJson) -> DatumReport {
    let mut report = datum.check();
    report.datum = source.clone();
    report
}

pub fn grading_text(report: &DatumReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "Σ dim = {} (n²|H| = {}), trivial component largest: {}",
        report.total, report.expected_total, report.trivial_is_max
    );
    let _ = writeln!(
        s,
        "{:<12} {:>5} {:>5} {:>5}  T⊆E_e  chain",
        "element", "dim", "|E|", "|T|"
    );
    for c in &report.components {
        let _ = writeln!(
            s,
            "{:<12} {:>5} {:>5} {:>5}  {:<5}  {}",
            c.element, c.dim, c.edges, c.t_size, c.injection_contained, c.chain_holds
        );
    }
    for v in &report.violations {
        let _ = writeln!(s, "VIOLATION: {v}");
    }
    s
}

/// One DOT digraph per component `Γ_g`, with `T(Γ_g)` dashed.
pub fn grading_dot(datum: &GradingDatum) -> String {
    let group = datum.group();
    group
        .elements()
        .map(|g| {
            let gamma = datum.component_digraph(g);
            let name = format!("\"Gamma_{}\"", group.name(g));
            gamma.to_dot(&name, Some(&gamma.mutual_pairs()))
        })
        .collect()
}

pub fn parse_certificate(input: &str) -> Result<Certificate> {
    serde_json::from_str(input).map_err(|e| anyhow!("malformed certificate JSON: {e}"))
}

//! Component dimensions of simple group gradings.
//!
//! A simple `G`-grading is described, up to the data that fixes every
//! component dimension, by a subgroup `H ≤ G` and a tuple `(g_1, .., g_n)`:
//! `dim Λ_g` counts the triples `(i, h, j)` with `g_i⁻¹ h g_j = g`. The same
//! data defines a digraph `Γ_g` on `n` vertices with an edge `(i, j)` when
//! such an `h` exists. Mutual pairs of any `Γ_g` are edges of `Γ_e`, which
//! together with the digraph bound forces the trivial component to be the
//! largest.

use std::sync::Arc;

use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};

use crate::certificate::oracle_check;
use crate::digraph::Digraph;
use crate::error::{GradingError, GroupError};
use crate::groups::{builtin_group, FiniteGroup, GroupJson, Subgroup};
use crate::relation::PairRelation;

/// Default cap on the number of data an enumeration may yield.
pub const DEFAULT_ENUMERATION_BUDGET: u128 = 10_000_000;

#[derive(Debug, Clone)]
pub struct GradingDatum {
    group: Arc<FiniteGroup>,
    h: Subgroup,
    tuple: Vec<usize>,
}

impl GradingDatum {
    pub fn new(group: Arc<FiniteGroup>, h: Subgroup, tuple: Vec<usize>) -> Result<Self, GradingError> {
        if tuple.is_empty() {
            return Err(GradingError::EmptyTuple);
        }
        for &x in tuple.iter().chain(h.elements()) {
            group.element_at(x)?;
        }
        Ok(Self { group, h, tuple })
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn subgroup(&self) -> &Subgroup {
        &self.h
    }

    pub fn tuple(&self) -> &[usize] {
        &self.tuple
    }

    pub fn n(&self) -> usize {
        self.tuple.len()
    }

    /// `n²·|H|`.
    pub fn total_dimension(&self) -> usize {
        self.n() * self.n() * self.h.len()
    }

    /// Number of triples `(i, h, j)` with `g_i⁻¹ h g_j = g`.
    pub fn component_dimension(&self, g: usize) -> usize {
        let grp = &*self.group;
        let mut count = 0;
        for &gi in &self.tuple {
            let gi_inv = grp.inv(gi);
            for &h in self.h.elements() {
                let left = grp.mul(gi_inv, h);
                count += self.tuple.iter().filter(|&&gj| grp.mul(left, gj) == g).count();
            }
        }
        count
    }

    pub fn dimension_table(&self) -> DimensionTable {
        DimensionTable {
            names: self.group.names().to_vec(),
            dims: self.group.elements().map(|g| self.component_dimension(g)).collect(),
        }
    }

    /// `Γ_g`: edge `(i, j)` iff some `h ∈ H` has `g_i⁻¹ h g_j = g`.
    pub fn component_digraph(&self, g: usize) -> Digraph {
        let grp = &*self.group;
        let n = self.n();
        let mut edges = PairRelation::empty(n);
        for i in 0..n {
            let gi_inv = grp.inv(self.tuple[i]);
            for j in 0..n {
                let hit = self
                    .h
                    .elements()
                    .iter()
                    .any(|&h| grp.mul(grp.mul(gi_inv, h), self.tuple[j]) == g);
                if hit {
                    edges.insert(i, j);
                }
            }
        }
        Digraph::from_relation(edges)
    }

    pub fn verify_theorem_b(&self) -> TheoremB {
        let dims = self.dimension_table();
        let e = self.group.identity();
        let witness = self.group.elements().find(|&g| dims.dims[g] > dims.dims[e]);
        TheoremB {
            trivial_is_max: witness.is_none(),
            witness: witness.map(|g| self.group.name(g).to_string()),
            dims,
        }
    }

    /// Checks `T(Γ_g) ⊆ E_e`.
    pub fn verify_injection(&self, g: usize) -> Injection {
        let t = self.component_digraph(g).mutual_pairs();
        let e_e = self.component_digraph(self.group.identity());
        let missing_pairs = t.difference(e_e.edges());
        Injection {
            contained: missing_pairs.is_empty(),
            missing_pairs,
        }
    }

    /// Every check on this datum, one row per group element.
    pub fn check(&self) -> DatumReport {
        let e = self.group.identity();
        let gamma_e = self.component_digraph(e);
        let e_size = gamma_e.edge_count();
        let mut components = Vec::with_capacity(self.group.order());
        let mut violations = Vec::new();
        for g in self.group.elements() {
            let name = self.group.name(g).to_string();
            let dim = self.component_dimension(g);
            let gamma = self.component_digraph(g);
            let t = gamma.mutual_pairs();
            let missing = t.difference(gamma_e.edges());
            let oracle = oracle_check(&gamma);
            let chain_holds = e_size >= t.len() && oracle.holds;
            if gamma.edge_count() != dim {
                violations.push(format!("{name}: |E_g| = {} but dim = {dim}", gamma.edge_count()));
            }
            if !missing.is_empty() {
                violations.push(format!("{name}: T(Γ_g) ⊄ E_e, missing {missing:?}"));
            }
            if !chain_holds {
                violations.push(format!(
                    "{name}: chain |E_e| = {e_size} >= |T| = {} >= |E_g| = {} fails",
                    t.len(),
                    gamma.edge_count()
                ));
            }
            components.push(ComponentReport {
                element: name,
                dim,
                edges: gamma.edge_count(),
                t_size: t.len(),
                injection_contained: missing.is_empty(),
                missing_pairs: missing,
                chain_holds,
            });
        }
        let dims = self.dimension_table();
        let total: usize = dims.dims.iter().sum();
        if total != self.total_dimension() {
            violations.push(format!(
                "dimensions sum to {total}, expected n²|H| = {}",
                self.total_dimension()
            ));
        }
        let theorem_b = self.verify_theorem_b();
        if let Some(w) = &theorem_b.witness {
            violations.push(format!("dim Λ_{w} exceeds dim Λ_e"));
        }
        DatumReport {
            datum: self.to_json(),
            dims,
            total,
            expected_total: self.total_dimension(),
            trivial_is_max: theorem_b.trivial_is_max,
            components,
            violations,
        }
    }

    pub fn to_json(&self) -> DatumJson {
        DatumJson {
            group: GroupSource::Table(self.group.to_json()),
            h: self.h.names(&self.group).iter().map(|s| s.to_string()).collect(),
            tuple: self.tuple.iter().map(|&x| self.group.name(x).to_string()).collect(),
        }
    }

    /// Same as [`GradingDatum::to_json`] but names the group by `spec`.
    pub fn to_json_with_spec(&self, spec: &str) -> DatumJson {
        DatumJson {
            group: GroupSource::Spec(spec.to_string()),
            ..self.to_json()
        }
    }
}

/// `dim Λ_g` for every `g`, in element order; serializes as a map keyed by
/// element name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimensionTable {
    names: Vec<String>,
    dims: Vec<usize>,
}

impl DimensionTable {
    pub fn get(&self, g: usize) -> usize {
        self.dims[g]
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> + '_ {
        self.names.iter().map(String::as_str).zip(self.dims.iter().copied())
    }
}

impl Serialize for DimensionTable {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.dims.len()))?;
        for (name, dim) in self.iter() {
            map.serialize_entry(name, &dim)?;
        }
        map.end()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TheoremB {
    pub dims: DimensionTable,
    pub trivial_is_max: bool,
    /// An element whose component is larger than the trivial one.
    pub witness: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Injection {
    pub contained: bool,
    pub missing_pairs: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentReport {
    pub element: String,
    pub dim: usize,
    pub edges: usize,
    pub t_size: usize,
    pub injection_contained: bool,
    pub missing_pairs: Vec<(usize, usize)>,
    /// `|E_e| ≥ |T(Γ_g)| ≥ |E_g|`.
    pub chain_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DatumReport {
    pub datum: DatumJson,
    pub dims: DimensionTable,
    pub total: usize,
    pub expected_total: usize,
    pub trivial_is_max: bool,
    pub components: Vec<ComponentReport>,
    pub violations: Vec<String>,
}

impl DatumReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A group given by spec string or by explicit table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupSource {
    Spec(String),
    Table(GroupJson),
}

impl GroupSource {
    pub fn build(&self) -> Result<FiniteGroup, GroupError> {
        match self {
            GroupSource::Spec(s) => builtin_group(s),
            GroupSource::Table(t) => FiniteGroup::try_from(t.clone()),
        }
    }
}

/// `{"group": <spec-or-table>, "H": [names], "tuple": [names]}`. `H` lists
/// generators; the subgroup is their closure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatumJson {
    pub group: GroupSource,
    #[serde(rename = "H")]
    pub h: Vec<String>,
    pub tuple: Vec<String>,
}

impl DatumJson {
    pub fn resolve(&self) -> Result<GradingDatum, GradingError> {
        let group = Arc::new(self.group.build()?);
        let gens = self.h.iter().map(|s| group.element(s)).collect::<Result<Vec<_>, _>>()?;
        let tuple = self
            .tuple
            .iter()
            .map(|s| group.element(s))
            .collect::<Result<Vec<_>, _>>()?;
        let h = group.subgroup_from_generators(&gens);
        GradingDatum::new(group, h, tuple)
    }
}

/// Number of data [`enumerate_data`] would yield.
pub fn enumeration_size(group: &FiniteGroup, subgroups: usize, n_max: usize) -> u128 {
    let order = group.order() as u128;
    let tuples: u128 = (1..=n_max as u32)
        .map(|n| order.saturating_pow(n))
        .fold(0u128, u128::saturating_add);
    tuples.saturating_mul(subgroups as u128)
}

/// Every `(H, tuple)` with `1 ≤ n ≤ n_max`: `n` outermost, then subgroups
/// in [`FiniteGroup::all_subgroups`] order, then tuples lexicographically.
pub fn enumerate_data(
    group: Arc<FiniteGroup>,
    n_max: usize,
    budget: u128,
) -> Result<impl Iterator<Item = GradingDatum>, GradingError> {
    let subgroups = group.all_subgroups()?;
    let count = enumeration_size(&group, subgroups.len(), n_max);
    if count > budget {
        return Err(GradingError::TooLarge { count, budget });
    }
    let order = group.order();
    Ok((1..=n_max).flat_map(move |n| {
        let group = Arc::clone(&group);
        let subgroups = subgroups.clone();
        let tuples = order.pow(n as u32);
        subgroups.into_iter().flat_map(move |h| {
            let group = Arc::clone(&group);
            (0..tuples).map(move |code| {
                let mut tuple = vec![0; n];
                let mut c = code;
                for slot in tuple.iter_mut().rev() {
                    *slot = c % order;
                    c /= order;
                }
                GradingDatum {
                    group: Arc::clone(&group),
                    h: h.clone(),
                    tuple,
                }
            })
        })
    }))
}

//! Finite groups as validated Cayley tables.
//!
//! Elements are indices `0..order`; `table[a][b]` is the index of `a·b`.
//! Built-in families follow the spec-string grammar `C<n>`, `D<n>` (order
//! `2n`), `S<n>` (`n ≤ 5`), `Q8`, and `x`-separated direct products.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::GroupError;

pub const MAX_BUILTIN_ORDER: usize = 1024;
pub const MAX_SUBGROUP_SEARCH_ORDER: usize = 64;

/// How a group was built; drives element-name aliases.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Family {
    Table,
    Cyclic(usize),
    Dihedral(usize),
    Symmetric(usize),
    Quaternion,
    Product(Vec<FiniteGroup>),
}

#[derive(Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    table: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
    names: Vec<String>,
    family: Family,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGroup")
            .field("order", &self.order())
            .field("names", &self.names)
            .finish()
    }
}

impl FiniteGroup {
    /// Validates a Cayley table. Names default to `"0".."order-1"`.
    pub fn from_table(table: Vec<Vec<usize>>, names: Option<Vec<String>>) -> Result<Self, GroupError> {
        let order = table.len();
        if order == 0 {
            return Err(GroupError::Empty);
        }
        for (row, r) in table.iter().enumerate() {
            if r.len() != order {
                return Err(GroupError::NotSquare {
                    row,
                    len: r.len(),
                    order,
                });
            }
            if let Some((col, &value)) = r.iter().enumerate().find(|(_, &v)| v >= order) {
                return Err(GroupError::EntryOutOfRange { row, col, value });
            }
        }
        for (i, r) in table.iter().enumerate() {
            let mut seen = vec![false; order];
            for &v in r {
                if std::mem::replace(&mut seen[v], true) {
                    return Err(GroupError::NotLatinSquare {
                        line: "row",
                        index: i,
                        value: v,
                    });
                }
            }
        }
        for c in 0..order {
            let mut seen = vec![false; order];
            for r in &table {
                let v = r[c];
                if std::mem::replace(&mut seen[v], true) {
                    return Err(GroupError::NotLatinSquare {
                        line: "column",
                        index: c,
                        value: v,
                    });
                }
            }
        }
        let identity = (0..order)
            .find(|&e| (0..order).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or(GroupError::NoIdentity)?;
        let mut inverse = Vec::with_capacity(order);
        for a in 0..order {
            let inv = (0..order)
                .find(|&b| table[a][b] == identity && table[b][a] == identity)
                .ok_or(GroupError::MissingInverse(a))?;
            inverse.push(inv);
        }
        for a in 0..order {
            for b in 0..order {
                let ab = table[a][b];
                for c in 0..order {
                    if table[ab][c] != table[a][table[b][c]] {
                        return Err(GroupError::NotAssociative { a, b, c });
                    }
                }
            }
        }
        let names = match names {
            Some(n) if n.len() != order => {
                return Err(GroupError::NameCount {
                    expected: order,
                    got: n.len(),
                })
            }
            Some(n) => n,
            None => (0..order).map(|i| i.to_string()).collect(),
        };
        Ok(Self {
            table,
            identity,
            inverse,
            names,
            family: Family::Table,
        })
    }

    fn with_family(mut self, family: Family) -> Self {
        self.family = family;
        self
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn name(&self, a: usize) -> &str {
        &self.names[a]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order()
    }

    pub fn is_abelian(&self) -> bool {
        self.elements()
            .all(|a| self.elements().all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Resolves an element by display name or alias. `e` always names the
    /// identity; cyclic groups accept `a`, `a^k`; dihedral groups accept
    /// `r`, `s`; symmetric groups accept cycle notation such as `(12)(34)`;
    /// products accept a parenthesized tuple of component names.
    pub fn element(&self, name: &str) -> Result<usize, GroupError> {
        let name = name.trim();
        if let Some(i) = self.names.iter().position(|n| n == name) {
            return Ok(i);
        }
        if name == "e" {
            return Ok(self.identity);
        }
        let unknown = || GroupError::UnknownElement(name.to_string());
        match &self.family {
            Family::Cyclic(n) => {
                let k = match name {
                    "a" => 1,
                    _ => name
                        .strip_prefix("a^")
                        .and_then(|p| p.parse::<usize>().ok())
                        .ok_or_else(unknown)?,
                };
                Ok(k % n)
            }
            Family::Symmetric(n) => {
                let perm = parse_cycles(name, *n).ok_or_else(unknown)?;
                let key = one_line(&perm);
                self.names.iter().position(|x| *x == key).ok_or_else(unknown)
            }
            Family::Product(factors) => {
                let inner = name
                    .strip_prefix('(')
                    .and_then(|s| s.strip_suffix(')'))
                    .ok_or_else(unknown)?;
                let parts = split_top_level(inner);
                if parts.len() != factors.len() {
                    return Err(unknown());
                }
                let mut index = 0;
                for (f, part) in factors.iter().zip(parts) {
                    index = index * f.order() + f.element(part)?;
                }
                Ok(index)
            }
            Family::Table | Family::Dihedral(_) | Family::Quaternion => Err(unknown()),
        }
    }

    pub fn element_at(&self, index: usize) -> Result<usize, GroupError> {
        if index < self.order() {
            Ok(index)
        } else {
            Err(GroupError::ElementOutOfRange {
                index,
                order: self.order(),
            })
        }
    }

    /// Closure of `gens ∪ {e}` under multiplication.
    pub fn subgroup_from_generators(&self, gens: &[usize]) -> Subgroup {
        let mut inside = vec![false; self.order()];
        let mut queue = VecDeque::from([self.identity]);
        inside[self.identity] = true;
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if !inside[y] {
                    inside[y] = true;
                    queue.push_back(y);
                }
            }
        }
        Subgroup {
            elements: (0..self.order()).filter(|&i| inside[i]).collect(),
        }
    }

    /// Validates an explicit element set as a subgroup.
    pub fn subgroup(&self, elements: &[usize]) -> Result<Subgroup, GroupError> {
        for &x in elements {
            self.element_at(x)?;
        }
        let set: BTreeSet<usize> = elements.iter().copied().collect();
        let closed = set.contains(&self.identity)
            && set
                .iter()
                .all(|&a| set.contains(&self.inv(a)) && set.iter().all(|&b| set.contains(&self.mul(a, b))));
        if !closed {
            return Err(GroupError::ParseError {
                spec: format!("{elements:?}"),
                reason: "not closed under the group operations".into(),
            });
        }
        Ok(Subgroup {
            elements: set.into_iter().collect(),
        })
    }

    pub fn whole(&self) -> Subgroup {
        Subgroup {
            elements: self.elements().collect(),
        }
    }

    pub fn trivial(&self) -> Subgroup {
        Subgroup {
            elements: vec![self.identity],
        }
    }

    /// Every subgroup exactly once, sorted by size then elements.
    ///
    /// Starts from the trivial subgroup and repeatedly adjoins one outside
    /// element to each subgroup found; every subgroup is reached along a
    /// chain of its own generators.
    pub fn all_subgroups(&self) -> Result<Vec<Subgroup>, GroupError> {
        if self.order() > MAX_SUBGROUP_SEARCH_ORDER {
            return Err(GroupError::TooLarge {
                order: self.order(),
                limit: MAX_SUBGROUP_SEARCH_ORDER,
            });
        }
        let mut found: HashSet<Vec<usize>> = HashSet::new();
        let mut frontier = vec![self.trivial()];
        found.insert(self.trivial().elements);
        while let Some(h) = frontier.pop() {
            let mut member = vec![false; self.order()];
            for &x in &h.elements {
                member[x] = true;
            }
            for g in self.elements().filter(|&g| !member[g]) {
                let mut gens = h.elements.clone();
                gens.push(g);
                let k = self.subgroup_from_generators(&gens);
                if found.insert(k.elements.clone()) {
                    frontier.push(k);
                }
            }
        }
        let mut all: Vec<Subgroup> = found.into_iter().map(|elements| Subgroup { elements }).collect();
        all.sort_by(|a, b| (a.len(), &a.elements).cmp(&(b.len(), &b.elements)));
        Ok(all)
    }

    pub fn to_json(&self) -> GroupJson {
        GroupJson {
            order: self.order(),
            table: self.table.clone(),
            names: Some(self.names.clone()),
        }
    }
}

/// `{"order": m, "table": [[..]], "names": [..]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupJson {
    pub order: usize,
    pub table: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
}

impl TryFrom<GroupJson> for FiniteGroup {
    type Error = GroupError;

    fn try_from(g: GroupJson) -> Result<Self, GroupError> {
        if g.table.len() != g.order {
            return Err(GroupError::NotSquare {
                row: g.table.len(),
                len: g.table.len(),
                order: g.order,
            });
        }
        FiniteGroup::from_table(g.table, g.names)
    }
}

/// A validated subgroup: sorted element indices of its parent group.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subgroup {
    elements: Vec<usize>,
}

impl Subgroup {
    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    pub fn names<'g>(&self, group: &'g FiniteGroup) -> Vec<&'g str> {
        self.elements.iter().map(|&x| group.name(x)).collect()
    }
}

fn split_top_level(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

fn one_line(perm: &[usize]) -> String {
    perm.iter().map(|&x| char::from(b'1' + x as u8)).collect()
}

/// Parses cycle notation with 1-based points, e.g. `(123)(45)` or `(1,2)`.
fn parse_cycles(s: &str, n: usize) -> Option<Vec<usize>> {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut rest = s.trim();
    if rest.is_empty() {
        return None;
    }
    while !rest.is_empty() {
        let body_end = rest.find(')')?;
        let body = rest.strip_prefix('(')?.get(..body_end - 1)?;
        let points: Vec<usize> = body
            .chars()
            .filter(|c| !matches!(c, ',' | ' '))
            .map(|c| c.to_digit(10).map(|d| d as usize))
            .collect::<Option<_>>()?;
        if points.iter().any(|&p| p == 0 || p > n) {
            return None;
        }
        let mut distinct = points.clone();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() != points.len() {
            return None;
        }
        // apply this cycle after the ones parsed so far (right to left)
        let mut cycle: Vec<usize> = (0..n).collect();
        for w in 0..points.len() {
            cycle[points[w] - 1] = points[(w + 1) % points.len()] - 1;
        }
        let composed: Vec<usize> = (0..n).map(|x| perm[cycle[x]]).collect();
        perm = composed;
        rest = rest[body_end + 1..].trim_start();
    }
    Some(perm)
}

fn cyclic(n: usize) -> Result<FiniteGroup, GroupError> {
    let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
    Ok(FiniteGroup::from_table(table, None)?.with_family(Family::Cyclic(n)))
}

/// Elements `r^k` at index `k` and `s r^k` at index `n + k`, with
/// `r^n = s^2 = e` and `r s = s r^-1`.
fn dihedral(n: usize) -> Result<FiniteGroup, GroupError> {
    let decode = |x: usize| (x / n, x % n);
    let table = (0..2 * n)
        .map(|x| {
            (0..2 * n)
                .map(|y| {
                    let (a, b) = decode(x);
                    let (c, d) = decode(y);
                    // s^a r^b s^c r^d = s^(a+c) r^((-1)^c b + d)
                    let rot = (if c == 0 { b + d } else { n - b + d }) % n;
                    ((a + c) % 2) * n + rot
                })
                .collect()
        })
        .collect();
    let power = |prefix: &str, k: usize| match (prefix, k) {
        ("", 0) => "e".to_string(),
        (p, 0) => p.to_string(),
        (p, 1) => format!("{p}r"),
        (p, k) => format!("{p}r^{k}"),
    };
    let names = (0..n)
        .map(|k| power("", k))
        .chain((0..n).map(|k| power("s", k)))
        .collect();
    Ok(FiniteGroup::from_table(table, Some(names))?.with_family(Family::Dihedral(n)))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    let mut used = vec![false; n];
    fn go(n: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for x in 0..n {
            if !used[x] {
                used[x] = true;
                cur.push(x);
                go(n, cur, used, out);
                cur.pop();
                used[x] = false;
            }
        }
    }
    go(n, &mut cur, &mut used, &mut out);
    out
}

/// Permutations in lexicographic one-line order; `(σ·τ)(x) = σ(τ(x))`.
fn symmetric(n: usize) -> Result<FiniteGroup, GroupError> {
    let perms = permutations(n);
    let index = |p: &[usize]| perms.iter().position(|q| q == p).expect("closed under composition");
    let table = perms
        .iter()
        .map(|s| {
            perms
                .iter()
                .map(|t| index(&(0..n).map(|x| s[t[x]]).collect::<Vec<_>>()))
                .collect()
        })
        .collect();
    let names = perms.iter().map(|p| one_line(p)).collect();
    Ok(FiniteGroup::from_table(table, Some(names))?.with_family(Family::Symmetric(n)))
}

fn quaternion() -> Result<FiniteGroup, GroupError> {
    // unit (0..4 = 1, i, j, k) times sign; index = 2 * unit + negative
    const UNIT: [[(usize, bool); 4]; 4] = [
        [(0, false), (1, false), (2, false), (3, false)],
        [(1, false), (0, true), (3, false), (2, true)],
        [(2, false), (3, true), (0, true), (1, false)],
        [(3, false), (2, false), (1, true), (0, true)],
    ];
    let table = (0..8)
        .map(|x| {
            (0..8)
                .map(|y| {
                    let (u, v) = (x / 2, y / 2);
                    let (w, neg) = UNIT[u][v];
                    2 * w + ((x % 2 == 1) ^ (y % 2 == 1) ^ neg) as usize
                })
                .collect()
        })
        .collect();
    let names = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"].map(String::from).to_vec();
    Ok(FiniteGroup::from_table(table, Some(names))?.with_family(Family::Quaternion))
}

fn product(factors: Vec<FiniteGroup>) -> Result<FiniteGroup, GroupError> {
    let order: usize = factors.iter().map(FiniteGroup::order).product();
    let digits = |mut x: usize| {
        let mut d = vec![0; factors.len()];
        for (i, f) in factors.iter().enumerate().rev() {
            d[i] = x % f.order();
            x /= f.order();
        }
        d
    };
    let compose = |d: &[usize]| d.iter().zip(&factors).fold(0, |acc, (&x, f)| acc * f.order() + x);
    let table = (0..order)
        .map(|x| {
            let dx = digits(x);
            (0..order)
                .map(|y| {
                    let dy = digits(y);
                    let prod: Vec<usize> = factors.iter().enumerate().map(|(i, f)| f.mul(dx[i], dy[i])).collect();
                    compose(&prod)
                })
                .collect()
        })
        .collect();
    let names = (0..order)
        .map(|x| {
            let parts: Vec<&str> = digits(x).iter().zip(&factors).map(|(&d, f)| f.name(d)).collect();
            format!("({})", parts.join(","))
        })
        .collect();
    Ok(FiniteGroup::from_table(table, Some(names))?.with_family(Family::Product(factors)))
}

fn factor_order(spec: &str, factor: &str) -> Result<usize, GroupError> {
    let err = |reason: &str| GroupError::ParseError {
        spec: spec.to_string(),
        reason: reason.to_string(),
    };
    if factor == "Q8" {
        return Ok(8);
    }
    let (kind, digits) = factor.split_at(factor.chars().next().map_or(0, char::len_utf8));
    let n: usize = digits.parse().map_err(|_| err(&format!("bad factor {factor:?}")))?;
    if n == 0 {
        return Err(err("size must be positive"));
    }
    match kind {
        "C" => Ok(n),
        "D" => Ok(2 * n),
        "S" if n <= 5 => Ok((1..=n).product()),
        "S" => Err(err("symmetric groups are limited to S5")),
        _ => Err(err(&format!("unknown family in {factor:?}"))),
    }
}

/// Builds a named group: `C<n>`, `D<n>` (order `2n`), `S<n>` (`n ≤ 5`),
/// `Q8`, or an `x`-separated product such as `C2xC4`.
pub fn builtin_group(spec: &str) -> Result<FiniteGroup, GroupError> {
    let trimmed = spec.trim();
    let factors: Vec<&str> = trimmed.split('x').map(str::trim).collect();
    if factors.iter().any(|f| f.is_empty()) {
        return Err(GroupError::ParseError {
            spec: spec.to_string(),
            reason: "empty factor".into(),
        });
    }
    let mut order: usize = 1;
    for f in &factors {
        order = order.saturating_mul(factor_order(spec, f)?);
        if order > MAX_BUILTIN_ORDER {
            return Err(GroupError::TooLarge {
                order,
                limit: MAX_BUILTIN_ORDER,
            });
        }
    }
    let build = |f: &str| -> Result<FiniteGroup, GroupError> {
        if f == "Q8" {
            return quaternion();
        }
        let n: usize = f[1..].parse().expect("validated above");
        match &f[..1] {
            "C" => cyclic(n),
            "D" => dihedral(n),
            _ => symmetric(n),
        }
    };
    if factors.len() == 1 {
        return build(factors[0]);
    }
    product(factors.into_iter().map(build).collect::<Result<_, _>>()?)
}

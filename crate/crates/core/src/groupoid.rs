//! Finite groupoids as explicit composition tables, their validation, a
//! seeded random generator, and the JSON file format.
//!
//! A groupoid is a set of elements with units, source and target maps, a
//! partial product defined exactly on composable pairs (s(p) = t(q)), and an
//! inverse map. Validation enumerates every law exhaustively and reports
//! violations with witnesses.

use std::collections::{BTreeMap, HashMap, HashSet};

use rand::Rng;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::report::{Check, VerificationReport};
use crate::Result;

#[derive(Debug, Clone)]
pub struct FiniteGroupoid {
    elements: Vec<String>,
    index: HashMap<String, usize>,
    units: Vec<usize>,
    source: Vec<usize>,
    target: Vec<usize>,
    mult: HashMap<(usize, usize), usize>,
    inverse: Vec<usize>,
}

impl FiniteGroupoid {
    /// Builds a groupoid from raw string tables, rejecting structural defects
    /// (missing map entries, duplicate or non-composable products) with named
    /// diagnostics. Algebraic law violations are left to [`validate_groupoid`].
    pub fn from_parts(
        elements: Vec<String>,
        units: Vec<String>,
        source: &BTreeMap<String, String>,
        target: &BTreeMap<String, String>,
        mult: &[(String, String, String)],
        inverse: &BTreeMap<String, String>,
    ) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::GroupoidFormat("no elements".into()));
        }
        let mut index = HashMap::new();
        for (k, e) in elements.iter().enumerate() {
            if index.insert(e.clone(), k).is_some() {
                return Err(Error::GroupoidFormat(format!("duplicate element `{e}`")));
            }
        }
        let lookup = |name: &str, role: &str| -> Result<usize> {
            index.get(name).copied().ok_or_else(|| {
                Error::GroupoidFormat(format!("{role} refers to unknown element `{name}`"))
            })
        };
        let mut unit_idx = Vec::new();
        let mut seen_units = HashSet::new();
        for u in &units {
            let k = lookup(u, "unit list")?;
            if !seen_units.insert(k) {
                return Err(Error::GroupoidFormat(format!("duplicate unit `{u}`")));
            }
            unit_idx.push(k);
        }
        if unit_idx.is_empty() {
            return Err(Error::GroupoidFormat("no units".into()));
        }
        let total_map = |m: &BTreeMap<String, String>, role: &str| -> Result<Vec<usize>> {
            let mut out = Vec::with_capacity(elements.len());
            for e in &elements {
                let v = m.get(e).ok_or_else(|| {
                    Error::GroupoidFormat(format!("{role} map has no entry for element `{e}`"))
                })?;
                out.push(lookup(v, role)?);
            }
            Ok(out)
        };
        let source_v = total_map(source, "source")?;
        let target_v = total_map(target, "target")?;
        let inverse_v = total_map(inverse, "inverse")?;
        let unit_set: HashSet<usize> = unit_idx.iter().copied().collect();
        for (k, e) in elements.iter().enumerate() {
            if !unit_set.contains(&source_v[k]) {
                return Err(Error::GroupoidFormat(format!(
                    "source of `{e}` is not a unit"
                )));
            }
            if !unit_set.contains(&target_v[k]) {
                return Err(Error::GroupoidFormat(format!(
                    "target of `{e}` is not a unit"
                )));
            }
        }

        let mut mult_map = HashMap::new();
        for (p, q, pq) in mult {
            let pi = lookup(p, "product")?;
            let qi = lookup(q, "product")?;
            let ri = lookup(pq, "product")?;
            if source_v[pi] != target_v[qi] {
                return Err(Error::GroupoidFormat(format!(
                    "product entry (`{p}`, `{q}`) is not composable: s({p}) != t({q})"
                )));
            }
            if mult_map.insert((pi, qi), ri).is_some() {
                return Err(Error::GroupoidFormat(format!(
                    "duplicate product entry for (`{p}`, `{q}`)"
                )));
            }
        }
        // the table must list exactly the composable pairs
        for p in 0..elements.len() {
            for q in 0..elements.len() {
                if source_v[p] == target_v[q] && !mult_map.contains_key(&(p, q)) {
                    return Err(Error::GroupoidFormat(format!(
                        "missing product entry for composable pair (`{}`, `{}`)",
                        elements[p], elements[q]
                    )));
                }
            }
        }

        Ok(FiniteGroupoid {
            elements,
            index,
            units: unit_idx,
            source: source_v,
            target: target_v,
            mult: mult_map,
            inverse: inverse_v,
        })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn element_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Unit indices, in the order of the unit list.
    pub fn units(&self) -> &[usize] {
        &self.units
    }

    pub fn num_units(&self) -> usize {
        self.units.len()
    }

    pub fn source(&self, p: usize) -> usize {
        self.source[p]
    }

    pub fn target(&self, p: usize) -> usize {
        self.target[p]
    }

    pub fn inverse(&self, p: usize) -> usize {
        self.inverse[p]
    }

    pub fn is_composable(&self, p: usize, q: usize) -> bool {
        self.source[p] == self.target[q]
    }

    pub fn product(&self, p: usize, q: usize) -> Option<usize> {
        self.mult.get(&(p, q)).copied()
    }

    pub fn composable_pairs(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.mult.iter().map(|(&(p, q), &r)| (p, q, r))
    }

    pub fn num_composable_pairs(&self) -> usize {
        self.mult.len()
    }

    /// Disjoint union; element ids are prefixed "c{k}:" per part.
    pub fn disjoint_union(parts: &[&FiniteGroupoid]) -> FiniteGroupoid {
        let mut elements = Vec::new();
        let mut units = Vec::new();
        let mut source = BTreeMap::new();
        let mut target = BTreeMap::new();
        let mut inverse = BTreeMap::new();
        let mut mult = Vec::new();
        for (k, g) in parts.iter().enumerate() {
            let tag = |e: &str| format!("c{k}:{e}");
            for e in &g.elements {
                elements.push(tag(e));
            }
            for &u in &g.units {
                units.push(tag(&g.elements[u]));
            }
            for (p, e) in g.elements.iter().enumerate() {
                source.insert(tag(e), tag(&g.elements[g.source[p]]));
                target.insert(tag(e), tag(&g.elements[g.target[p]]));
                inverse.insert(tag(e), tag(&g.elements[g.inverse[p]]));
            }
            for (p, q, r) in g.composable_pairs() {
                mult.push((
                    tag(&g.elements[p]),
                    tag(&g.elements[q]),
                    tag(&g.elements[r]),
                ));
            }
        }
        FiniteGroupoid::from_parts(elements, units, &source, &target, &mult, &inverse)
            .expect("union of valid groupoids")
    }

    pub fn to_json(&self) -> String {
        let wire = GroupoidWire::from(self);
        serde_json::to_string_pretty(&wire).expect("groupoid serialization")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let wire: GroupoidWire = serde_json::from_str(text)
            .map_err(|e| Error::GroupoidFormat(format!("JSON parse error: {e}")))?;
        wire.try_into()
    }
}

/// The groupoid file format: explicit maps and a product table listing
/// exactly the composable pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupoidWire {
    pub elements: Vec<String>,
    pub units: Vec<String>,
    pub source: BTreeMap<String, String>,
    pub target: BTreeMap<String, String>,
    pub mult: Vec<[String; 3]>,
    pub inverse: BTreeMap<String, String>,
}

impl From<&FiniteGroupoid> for GroupoidWire {
    fn from(g: &FiniteGroupoid) -> Self {
        let name = |k: usize| g.elements[k].clone();
        let mut mult: Vec<[String; 3]> = g
            .composable_pairs()
            .map(|(p, q, r)| [name(p), name(q), name(r)])
            .collect();
        mult.sort();
        GroupoidWire {
            elements: g.elements.clone(),
            units: g.units.iter().map(|&u| name(u)).collect(),
            source: g
                .elements
                .iter()
                .enumerate()
                .map(|(k, e)| (e.clone(), name(g.source[k])))
                .collect(),
            target: g
                .elements
                .iter()
                .enumerate()
                .map(|(k, e)| (e.clone(), name(g.target[k])))
                .collect(),
            mult,
            inverse: g
                .elements
                .iter()
                .enumerate()
                .map(|(k, e)| (e.clone(), name(g.inverse[k])))
                .collect(),
        }
    }
}

impl TryFrom<GroupoidWire> for FiniteGroupoid {
    type Error = Error;

    fn try_from(w: GroupoidWire) -> Result<Self> {
        let mult: Vec<(String, String, String)> =
            w.mult.into_iter().map(|[p, q, r]| (p, q, r)).collect();
        FiniteGroupoid::from_parts(w.elements, w.units, &w.source, &w.target, &mult, &w.inverse)
    }
}

/// Exhaustive validation of the groupoid laws; every violation is counted
/// and the first few witnesses are reported.
pub fn validate_groupoid(g: &FiniteGroupoid) -> VerificationReport {
    let name = |k: usize| g.elements()[k].as_str();
    let mut checks = Vec::new();

    let mut count = 0usize;
    let mut witnesses = Vec::new();
    for &u in g.units() {
        if g.source(u) != u || g.target(u) != u {
            count += 1;
            witnesses.push(format!("s/t of unit `{}` is not itself", name(u)));
        }
    }
    for p in 0..g.len() {
        let t = g.target(p);
        let s = g.source(p);
        if g.product(t, p) != Some(p) {
            count += 1;
            if witnesses.len() < 3 {
                witnesses.push(format!("t(p)·p != p at p = `{}`", name(p)));
            }
        }
        if g.product(p, s) != Some(p) {
            count += 1;
            if witnesses.len() < 3 {
                witnesses.push(format!("p·s(p) != p at p = `{}`", name(p)));
            }
        }
    }
    let mut check = Check::residual(
        "groupoid.unit_laws",
        "units satisfy s(u) = t(u) = u and act as identities",
        count as f64,
        0.0,
    );
    if !witnesses.is_empty() {
        check = check.with_detail(witnesses.join("; "));
    }
    checks.push(check);

    let mut count = 0usize;
    let mut witnesses = Vec::new();
    for (p, q, r) in g.composable_pairs() {
        if g.source(r) != g.source(q) || g.target(r) != g.target(p) {
            count += 1;
            if witnesses.len() < 3 {
                witnesses.push(format!(
                    "s/t of product `{}`·`{}` = `{}` is inconsistent",
                    name(p),
                    name(q),
                    name(r)
                ));
            }
        }
    }
    let mut check = Check::residual(
        "groupoid.closure",
        "s(pq) = s(q) and t(pq) = t(p) on the product table",
        count as f64,
        0.0,
    );
    if !witnesses.is_empty() {
        check = check.with_detail(witnesses.join("; "));
    }
    checks.push(check);

    let mut count = 0usize;
    let mut witnesses = Vec::new();
    for (p, q, pq) in g.composable_pairs() {
        for r in 0..g.len() {
            if !g.is_composable(q, r) {
                continue;
            }
            let qr = g.product(q, r).expect("table is total on composables");
            let left = g.product(pq, r);
            let right = g.product(p, qr);
            if left != right || left.is_none() {
                count += 1;
                if witnesses.len() < 3 {
                    witnesses.push(format!(
                        "associativity fails on the triple (`{}`, `{}`, `{}`)",
                        name(p),
                        name(q),
                        name(r)
                    ));
                }
            }
        }
    }
    let mut check = Check::residual(
        "groupoid.associativity",
        "the product is associative on all composable triples",
        count as f64,
        0.0,
    );
    if !witnesses.is_empty() {
        check = check.with_detail(witnesses.join("; "));
    }
    checks.push(check);

    let mut count = 0usize;
    let mut witnesses = Vec::new();
    for p in 0..g.len() {
        let pi = g.inverse(p);
        let ok = g.product(pi, p) == Some(g.source(p))
            && g.product(p, pi) == Some(g.target(p))
            && g.source(pi) == g.target(p)
            && g.target(pi) == g.source(p)
            && g.inverse(pi) == p;
        if !ok {
            count += 1;
            if witnesses.len() < 3 {
                witnesses.push(format!("inverse laws fail at `{}`", name(p)));
            }
        }
    }
    let mut check = Check::residual(
        "groupoid.inverse",
        "p⁻¹p = s(p), pp⁻¹ = t(p), s(p⁻¹) = t(p), (p⁻¹)⁻¹ = p",
        count as f64,
        0.0,
    );
    if !witnesses.is_empty() {
        check = check.with_detail(witnesses.join("; "));
    }
    checks.push(check);

    VerificationReport::from_checks(checks)
}

/// The pair groupoid on n points: arrows (i, j), s = j, t = i,
/// (i,j)·(j,k) = (i,k).
pub fn pair_groupoid(n: usize) -> FiniteGroupoid {
    assert!(n >= 1);
    let name = |i: usize, j: usize| format!("p{i}.{j}");
    let mut elements = Vec::new();
    let mut units = Vec::new();
    let mut source = BTreeMap::new();
    let mut target = BTreeMap::new();
    let mut inverse = BTreeMap::new();
    let mut mult = Vec::new();
    for i in 1..=n {
        for j in 1..=n {
            elements.push(name(i, j));
            source.insert(name(i, j), name(j, j));
            target.insert(name(i, j), name(i, i));
            inverse.insert(name(i, j), name(j, i));
            if i == j {
                units.push(name(i, i));
            }
        }
    }
    for i in 1..=n {
        for j in 1..=n {
            for k in 1..=n {
                mult.push((name(i, j), name(j, k), name(i, k)));
            }
        }
    }
    FiniteGroupoid::from_parts(elements, units, &source, &target, &mult, &inverse)
        .expect("pair groupoid")
}

/// The cyclic group ℤ_m as a one-unit groupoid.
pub fn cyclic_group(m: usize) -> FiniteGroupoid {
    assert!(m >= 1);
    let name = |k: usize| format!("g{k}");
    let elements: Vec<String> = (0..m).map(name).collect();
    let units = vec![name(0)];
    let mut source = BTreeMap::new();
    let mut target = BTreeMap::new();
    let mut inverse = BTreeMap::new();
    let mut mult = Vec::new();
    for a in 0..m {
        source.insert(name(a), name(0));
        target.insert(name(a), name(0));
        inverse.insert(name(a), name((m - a) % m));
        for b in 0..m {
            mult.push((name(a), name(b), name((a + b) % m)));
        }
    }
    FiniteGroupoid::from_parts(elements, units, &source, &target, &mult, &inverse)
        .expect("cyclic group")
}

/// A connected groupoid on `k` objects with cyclic isotropy ℤ_m: arrows
/// (i, j, h^s) composing as (i,j,s)(j,l,s') = (i,l,s+s').
pub fn connected_groupoid(k: usize, m: usize, tag: &str) -> FiniteGroupoid {
    assert!(k >= 1 && m >= 1);
    let name = |i: usize, j: usize, s: usize| format!("{tag}{i}>{j}.h{s}");
    let mut elements = Vec::new();
    let mut units = Vec::new();
    let mut source = BTreeMap::new();
    let mut target = BTreeMap::new();
    let mut inverse = BTreeMap::new();
    let mut mult = Vec::new();
    for i in 0..k {
        for j in 0..k {
            for s in 0..m {
                elements.push(name(i, j, s));
                source.insert(name(i, j, s), name(j, j, 0));
                target.insert(name(i, j, s), name(i, i, 0));
                inverse.insert(name(i, j, s), name(j, i, (m - s) % m));
                if i == j && s == 0 {
                    units.push(name(i, i, 0));
                }
            }
        }
    }
    for i in 0..k {
        for j in 0..k {
            for l in 0..k {
                for s in 0..m {
                    for s2 in 0..m {
                        mult.push((name(i, j, s), name(j, l, s2), name(i, l, (s + s2) % m)));
                    }
                }
            }
        }
    }
    FiniteGroupoid::from_parts(elements, units, &source, &target, &mult, &inverse)
        .expect("connected groupoid")
}

/// Seeded random groupoid: a disjoint union of connected components, each a
/// pair groupoid on at most `max_objects` objects with cyclic isotropy drawn
/// from `isotropy_orders`. Deterministic under the seed.
pub fn random_groupoid(
    n_components: usize,
    max_objects: usize,
    isotropy_orders: &[usize],
    seed: u64,
) -> FiniteGroupoid {
    assert!(n_components >= 1 && max_objects >= 1 && !isotropy_orders.is_empty());
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut parts = Vec::new();
    for c in 0..n_components {
        let k = rng.random_range(1..=max_objects);
        let m = isotropy_orders[rng.random_range(0..isotropy_orders.len())];
        parts.push(connected_groupoid(k, m, &format!("r{c}o")));
    }
    let refs: Vec<&FiniteGroupoid> = parts.iter().collect();
    FiniteGroupoid::disjoint_union(&refs)
}

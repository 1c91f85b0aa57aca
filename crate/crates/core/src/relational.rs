//! Relations as possibility sets over attribute domains, padding and
//! projection between them, natural join, and generalization hierarchies.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;
use std::sync::Arc;

use serde::Deserialize;

use crate::error::{precondition, structural, Result};
use crate::grothendieck::{groth_opcm, GrothElem, IndexedFamily, JoinSemilattice};
use crate::instances::possibility_of_set;
use crate::limits::{ensure_within_cap, nonempty_powerset_size};
use crate::morphisms::{GaloisConnection, Hom, LinkingPassage};
use crate::order::Subset;
use crate::report::{LawCheck, LawReport};

/// Attribute names with their finite value domains.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeSchema {
    domains: BTreeMap<String, Vec<String>>,
}

impl AttributeSchema {
    pub fn new<A, V>(domains: impl IntoIterator<Item = (A, Vec<V>)>) -> Result<Self>
    where
        A: Into<String>,
        V: Into<String>,
    {
        let mut out = BTreeMap::new();
        for (attr, values) in domains {
            let attr = attr.into();
            let values: Vec<String> = values.into_iter().map(Into::into).collect();
            if values.is_empty() {
                return Err(structural(format!(
                    "attribute {attr:?} has an empty domain"
                )));
            }
            if values.iter().collect::<BTreeSet<_>>().len() != values.len() {
                return Err(structural(format!(
                    "attribute {attr:?} lists a value twice"
                )));
            }
            if out.insert(attr.clone(), values).is_some() {
                return Err(structural(format!("attribute {attr:?} declared twice")));
            }
        }
        Ok(AttributeSchema { domains: out })
    }

    /// Every attribute gets the domain `{0, 1, …, k−1}`.
    pub fn uniform(attrs: &[&str], k: usize) -> Result<Self> {
        Self::new(
            attrs
                .iter()
                .map(|a| (*a, (0..k).map(|v| v.to_string()).collect::<Vec<_>>())),
        )
    }

    /// JSON object mapping each attribute to its list of values.
    pub fn parse_json(text: &str) -> Result<Self> {
        let raw: BTreeMap<String, Vec<String>> =
            serde_json::from_str(text).map_err(|e| structural(format!("schema JSON: {e}")))?;
        Self::new(raw)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| structural(format!("cannot read {}: {e}", path.display())))?;
        Self::parse_json(&text)
    }

    /// Attribute names, sorted.
    pub fn attrs(&self) -> Vec<&str> {
        self.domains.keys().map(String::as_str).collect()
    }

    pub fn domain(&self, attr: &str) -> Result<&[String]> {
        self.domains
            .get(attr)
            .map(Vec::as_slice)
            .ok_or_else(|| structural(format!("unknown attribute {attr:?}")))
    }

    /// The sub-schema on `attrs`.
    pub fn restrict(&self, attrs: &[&str]) -> Result<BTreeMap<String, Vec<String>>> {
        attrs
            .iter()
            .map(|a| Ok((a.to_string(), self.domain(a)?.to_vec())))
            .collect()
    }
}

/// All tuples over the given domains, lexicographic with the first
/// attribute most significant.
pub fn tuple_space(domains: &BTreeMap<String, Vec<String>>) -> Vec<Vec<String>> {
    let mut out = vec![Vec::new()];
    for values in domains.values() {
        out = out
            .into_iter()
            .flat_map(|t| {
                values.iter().map(move |v| {
                    let mut t = t.clone();
                    t.push(v.clone());
                    t
                })
            })
            .collect();
    }
    out
}

/// A non-empty set of tuples over an attribute set; columns are kept in
/// attribute-name order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    domains: BTreeMap<String, Vec<String>>,
    tuples: BTreeSet<Vec<String>>,
}

impl Relation {
    /// Tuples must list values in attribute-name order.
    pub fn new(
        domains: BTreeMap<String, Vec<String>>,
        tuples: impl IntoIterator<Item = Vec<String>>,
    ) -> Result<Self> {
        let tuples: BTreeSet<Vec<String>> = tuples.into_iter().collect();
        if tuples.is_empty() {
            return Err(precondition("a relation needs at least one tuple"));
        }
        for t in &tuples {
            if t.len() != domains.len() {
                return Err(structural(format!("tuple {t:?} has the wrong arity")));
            }
            for ((attr, dom), v) in domains.iter().zip(t) {
                if !dom.contains(v) {
                    return Err(structural(format!(
                        "value {v:?} is outside the domain of {attr:?}"
                    )));
                }
            }
        }
        Ok(Relation { domains, tuples })
    }

    /// Builds a relation from rows whose columns follow `header`.
    pub fn from_rows<S: AsRef<str>>(
        schema: &AttributeSchema,
        header: &[S],
        rows: &[Vec<String>],
    ) -> Result<Self> {
        let names: Vec<&str> = header.iter().map(AsRef::as_ref).collect();
        let domains = schema.restrict(&names)?;
        if domains.len() != names.len() {
            return Err(structural("header repeats an attribute"));
        }
        let order: Vec<usize> = domains
            .keys()
            .map(|a| {
                names
                    .iter()
                    .position(|n| n == a)
                    .expect("restricted from the header")
            })
            .collect();
        let tuples = rows.iter().map(|row| {
            if row.len() != names.len() {
                return Err(structural(format!("row {row:?} does not match the header")));
            }
            Ok(order.iter().map(|&c| row[c].clone()).collect())
        });
        Relation::new(domains, tuples.collect::<Result<Vec<_>>>()?)
    }

    /// `Φ_A` itself: no information beyond the attribute set.
    pub fn full(domains: BTreeMap<String, Vec<String>>) -> Result<Self> {
        let tuples = tuple_space(&domains);
        if let Some((a, _)) = domains.iter().find(|(_, d)| d.is_empty()) {
            return Err(structural(format!("attribute {a:?} has an empty domain")));
        }
        Relation::new(domains, tuples)
    }

    pub fn attrs(&self) -> Vec<&str> {
        self.domains.keys().map(String::as_str).collect()
    }

    pub fn domains(&self) -> &BTreeMap<String, Vec<String>> {
        &self.domains
    }

    pub fn tuples(&self) -> &BTreeSet<Vec<String>> {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    fn columns(&self, attrs: &[&str]) -> Result<Vec<usize>> {
        let names = self.attrs();
        attrs
            .iter()
            .map(|a| {
                names
                    .iter()
                    .position(|n| n == a)
                    .ok_or_else(|| structural(format!("attribute {a:?} is not in the relation")))
            })
            .collect()
    }

    /// The forward image under `p : Φ_B → Φ_A`.
    pub fn project(&self, attrs: &[&str]) -> Result<Relation> {
        let cols = self.columns(attrs)?;
        let mut keep: Vec<(usize, &str)> = cols.into_iter().zip(attrs.iter().copied()).collect();
        keep.sort_by(|a, b| a.1.cmp(b.1));
        keep.dedup();
        let domains = keep
            .iter()
            .map(|&(_, a)| (a.to_string(), self.domains[a].clone()))
            .collect();
        let tuples = self
            .tuples
            .iter()
            .map(|t| keep.iter().map(|&(c, _)| t[c].clone()).collect());
        Relation::new(domains, tuples)
    }

    /// Pads every tuple with all values of the new attributes: the preimage
    /// under the projection from the larger attribute set.
    pub fn extend(&self, domains: &BTreeMap<String, Vec<String>>) -> Result<Relation> {
        for (a, d) in &self.domains {
            match domains.get(a) {
                None => return Err(structural(format!("extension drops attribute {a:?}"))),
                Some(d2) if d2 != d => return Err(structural(format!("domain of {a:?} changes"))),
                _ => {}
            }
        }
        let full = Relation::full(domains.clone())?;
        Ok(natural_join(self, &full)?.expect("padding a non-empty relation is non-empty"))
    }
}

/// `R ⋈ S`, or `None` when no tuple pair agrees on the shared attributes.
/// Hash join on the shared attributes; output in sorted tuple order.
pub fn natural_join(r: &Relation, s: &Relation) -> Result<Option<Relation>> {
    let shared: Vec<&str> = r
        .domains
        .keys()
        .filter(|a| s.domains.contains_key(*a))
        .map(String::as_str)
        .collect();
    for a in &shared {
        if r.domains[*a] != s.domains[*a] {
            return Err(structural(format!(
                "attribute {a:?} has different domains on the two sides"
            )));
        }
    }
    let mut domains = r.domains.clone();
    domains.extend(s.domains.iter().map(|(k, v)| (k.clone(), v.clone())));
    let (rc, sc) = (r.columns(&shared)?, s.columns(&shared)?);
    // where each output column comes from
    let source: Vec<(bool, usize)> = domains
        .keys()
        .map(|a| match r.domains.keys().position(|k| k == a) {
            Some(c) => (true, c),
            None => (false, s.domains.keys().position(|k| k == a).expect("union")),
        })
        .collect();
    let mut buckets: HashMap<Vec<&String>, Vec<&Vec<String>>> = HashMap::new();
    for t in &s.tuples {
        buckets
            .entry(sc.iter().map(|&c| &t[c]).collect())
            .or_default()
            .push(t);
    }
    let mut tuples = BTreeSet::new();
    for t in &r.tuples {
        let key: Vec<&String> = rc.iter().map(|&c| &t[c]).collect();
        for u in buckets.get(&key).into_iter().flatten() {
            tuples.insert(
                source
                    .iter()
                    .map(|&(left, c)| if left { t[c].clone() } else { u[c].clone() })
                    .collect::<Vec<_>>(),
            );
        }
    }
    if tuples.is_empty() {
        return Ok(None);
    }
    Ok(Some(Relation { domains, tuples }))
}

/// The relational indexed family over a schema: one possibility powerset
/// per attribute set, padding as transitions.
#[derive(Debug, Clone)]
pub struct RelationalFamily {
    schema: AttributeSchema,
    family: IndexedFamily,
    spaces: Vec<Vec<Vec<String>>>,
}

fn names_of<'a>(attrs: &[&'a str], mask: usize) -> Vec<&'a str> {
    (0..attrs.len())
        .filter(|b| mask >> b & 1 == 1)
        .map(|b| attrs[b])
        .collect()
}

fn render_tuple(t: &[String]) -> String {
    format!("({})", t.join(", "))
}

/// Builds the relational family, materializing every fiber.
pub fn relational_family(schema: &AttributeSchema) -> Result<RelationalFamily> {
    let attrs = schema.attrs();
    let lattice = JoinSemilattice::powerset(&attrs)?;
    let n = lattice.len();
    let mut spaces = Vec::with_capacity(n);
    let mut fibers = Vec::with_capacity(n);
    for mask in 0..n {
        let space = tuple_space(&schema.restrict(&names_of(&attrs, mask))?);
        ensure_within_cap(nonempty_powerset_size(space.len()))?;
        fibers.push(Arc::new(possibility_of_set(
            space.iter().map(|t| render_tuple(t)),
        )?));
        spaces.push(space);
    }
    let mut transitions = Vec::new();
    for a in 0..n {
        for b in (0..n).filter(|b| b & a == a) {
            // position of each Φ_B tuple's restriction inside Φ_A
            let keep: Vec<usize> = (0..attrs.len())
                .filter(|bit| b >> bit & 1 == 1)
                .enumerate()
                .filter(|(_, bit)| a >> bit & 1 == 1)
                .map(|(col, _)| col)
                .collect();
            let restrict: Vec<usize> = spaces[b]
                .iter()
                .map(|t| {
                    let r: Vec<String> = keep.iter().map(|&c| t[c].clone()).collect();
                    spaces[a]
                        .iter()
                        .position(|u| *u == r)
                        .expect("restriction lies in the smaller space")
                })
                .collect();
            let map = fibers[a]
                .elements()
                .map(|s| {
                    let sub = Subset::from_mask(s as u64 + 1);
                    let padded: Subset = (0..spaces[b].len())
                        .filter(|&t| sub.contains(restrict[t]))
                        .collect();
                    padded.mask() as usize - 1
                })
                .collect();
            transitions.push((a, b, Hom::new(fibers[a].clone(), fibers[b].clone(), map)?));
        }
    }
    let family = IndexedFamily::new(lattice, fibers, transitions)?;
    Ok(RelationalFamily {
        schema: schema.clone(),
        family,
        spaces,
    })
}

impl RelationalFamily {
    pub fn family(&self) -> &IndexedFamily {
        &self.family
    }

    pub fn schema(&self) -> &AttributeSchema {
        &self.schema
    }

    /// The index of an attribute set.
    pub fn index_of(&self, attrs: &[&str]) -> Result<usize> {
        let all = self.schema.attrs();
        attrs.iter().try_fold(0usize, |m, a| {
            let bit = all
                .iter()
                .position(|x| x == a)
                .ok_or_else(|| structural(format!("unknown attribute {a:?}")))?;
            Ok(m | 1 << bit)
        })
    }

    pub fn attrs_of(&self, index: usize) -> Vec<&str> {
        names_of(&self.schema.attrs(), index)
    }

    /// The point `(A, S)` of the completion holding `r`.
    pub fn to_elem(&self, r: &Relation) -> Result<GrothElem> {
        let index = self.index_of(&r.attrs())?;
        if *r.domains() != self.schema.restrict(&r.attrs())? {
            return Err(structural("relation domains differ from the schema"));
        }
        let space = &self.spaces[index];
        let s: Subset = r
            .tuples()
            .iter()
            .map(|t| {
                space
                    .iter()
                    .position(|u| u == t)
                    .expect("values checked against domains")
            })
            .collect();
        Ok(GrothElem::new(index, s.mask() as usize - 1))
    }

    pub fn to_relation(&self, e: GrothElem) -> Relation {
        let domains = self
            .schema
            .restrict(&self.attrs_of(e.index))
            .expect("attributes come from the schema");
        let sub = Subset::from_mask(e.elem as u64 + 1);
        Relation {
            domains,
            tuples: sub
                .iter()
                .map(|t| self.spaces[e.index][t].clone())
                .collect(),
        }
    }

    /// The change of domain `A → B` for `A ⊆ B`: padding, with projection
    /// as its upper adjoint.
    pub fn padding(&self, a: usize, b: usize) -> Result<GaloisConnection> {
        if b & a != a {
            return Err(precondition("padding needs A ⊆ B"));
        }
        let lower = self.family.transition(a, b).clone();
        let target = self.family.fiber(b);
        let attrs = self.attrs_of(a);
        let upper = target
            .elements()
            .map(|y| {
                let projected = self.to_relation(GrothElem::new(b, y)).project(&attrs)?;
                Ok(self.to_elem(&projected)?.elem)
            })
            .collect::<Result<Vec<_>>>()?;
        GaloisConnection::new(lower, upper)
    }
}

/// Compares `⊞` in the completion with `⋈` on every pair of points,
/// including definedness.
pub fn check_join_is_boxplus(schema: &AttributeSchema) -> Result<LawReport> {
    let rf = relational_family(schema)?;
    let fam = rf.family();
    let g = groth_opcm(fam)?;
    let elems = fam.elements();
    let mut check = LawCheck::new("⊞ equals natural join");
    for (pa, &a) in elems.iter().enumerate() {
        for (pb, &b) in elems.iter().enumerate() {
            let boxed = g.combine(pa, pb).map(|c| rf.to_relation(elems[c]));
            let joined = natural_join(&rf.to_relation(a), &rf.to_relation(b))?;
            check.expect(boxed == joined, [fam.label(a), fam.label(b)], || {
                match (&boxed, &joined) {
                    (None, Some(_)) => "⊞ undefined but ⋈ non-empty".into(),
                    (Some(_), None) => "⋈ empty but ⊞ defined".into(),
                    _ => "results differ".into(),
                }
            });
        }
    }
    let mut report = LawReport::new(format!("join against ⊞ over {} points", elems.len()));
    report.push(check);
    Ok(report)
}

/// The square `K → I`, `K → J`, `I → I ∪ J`, `J → I ∪ J` of paddings, for
/// `K ⊆ I ∩ J`.
pub fn projection_passage(
    rf: &RelationalFamily,
    i: &[&str],
    j: &[&str],
    k: &[&str],
) -> Result<LinkingPassage> {
    let (i, j, k) = (rf.index_of(i)?, rf.index_of(j)?, rf.index_of(k)?);
    if k & i != k || k & j != k {
        return Err(precondition("the shared domain must lie inside both sides"));
    }
    LinkingPassage::new(
        rf.padding(k, i)?,
        rf.padding(k, j)?,
        rf.padding(i, i | j)?,
        rf.padding(j, i | j)?,
    )
}

/// A generalization tree: level 0 is a single root, and `parents[ℓ − 1]`
/// sends each value at level `ℓ` to its parent at level `ℓ − 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hierarchy {
    levels: Vec<String>,
    parents: Vec<BTreeMap<String, String>>,
    /// Values per level; level 0 holds the root alone.
    values: Vec<BTreeSet<String>>,
}

#[derive(Deserialize)]
struct RawHierarchy {
    levels: Vec<String>,
    parents: Vec<BTreeMap<String, String>>,
}

impl Hierarchy {
    pub fn new(levels: Vec<String>, parents: Vec<BTreeMap<String, String>>) -> Result<Self> {
        if levels.len() != parents.len() + 1 {
            return Err(structural(format!(
                "{} levels need {} parent maps, found {}",
                levels.len(),
                levels.len().saturating_sub(1),
                parents.len()
            )));
        }
        let Some(first) = parents.first() else {
            return Err(structural("a hierarchy needs at least one parent map"));
        };
        let roots: BTreeSet<String> = first.values().cloned().collect();
        if roots.len() != 1 {
            return Err(structural(format!(
                "level 0 must be a single root, found {roots:?}"
            )));
        }
        let mut values = vec![roots];
        for (l, map) in parents.iter().enumerate() {
            if let Some((child, parent)) = map.iter().find(|(_, p)| !values[l].contains(*p)) {
                return Err(structural(format!(
                    "parent {parent:?} of {child:?} is not a value at level {}",
                    levels[l]
                )));
            }
            values.push(map.keys().cloned().collect());
        }
        let mut seen = BTreeSet::new();
        for v in values.iter().flatten() {
            if !seen.insert(v) {
                return Err(structural(format!("value {v:?} appears on two levels")));
            }
        }
        Ok(Hierarchy {
            levels,
            parents,
            values,
        })
    }

    /// JSON object `{attribute: {levels: [...], parents: [{child: parent}, ...]}}`.
    pub fn parse_json(text: &str) -> Result<BTreeMap<String, Hierarchy>> {
        let raw: BTreeMap<String, RawHierarchy> =
            serde_json::from_str(text).map_err(|e| structural(format!("hierarchy JSON: {e}")))?;
        raw.into_iter()
            .map(|(attr, h)| Ok((attr, Hierarchy::new(h.levels, h.parents)?)))
            .collect()
    }

    pub fn load(path: &Path) -> Result<BTreeMap<String, Hierarchy>> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| structural(format!("cannot read {}: {e}", path.display())))?;
        Self::parse_json(&text)
    }

    pub fn levels(&self) -> &[String] {
        &self.levels
    }

    pub fn root(&self) -> &str {
        self.values[0].iter().next().expect("validated single root")
    }

    pub fn leaf_level(&self) -> usize {
        self.levels.len() - 1
    }

    /// Resolves a level given by name or by number.
    pub fn level(&self, name: &str) -> Result<usize> {
        if let Some(i) = self.levels.iter().position(|l| l == name) {
            return Ok(i);
        }
        match name.parse::<usize>() {
            Ok(i) if i < self.levels.len() => Ok(i),
            _ => Err(structural(format!("unknown level {name:?}"))),
        }
    }

    pub fn values_at(&self, level: usize) -> &BTreeSet<String> {
        &self.values[level]
    }

    pub fn level_of(&self, value: &str) -> Option<usize> {
        self.values.iter().position(|vs| vs.contains(value))
    }

    pub fn parent(&self, value: &str) -> Option<&str> {
        let l = self.level_of(value)?;
        if l == 0 {
            return None;
        }
        self.parents[l - 1].get(value).map(String::as_str)
    }

    /// The ancestor of `value` at `level`, or an error if `value` is not a
    /// node or sits above that level.
    pub fn ancestor(&self, value: &str, level: usize) -> Result<&str> {
        let mut at = self.level_of(value).ok_or_else(|| {
            precondition(format!("value {value:?} is not covered by the hierarchy"))
        })?;
        if level > at {
            return Err(precondition(format!(
                "value {value:?} is at level {} and cannot be refined to {}",
                self.levels[at],
                self.levels.get(level).map_or("?", String::as_str)
            )));
        }
        let mut v = self.values[at].get(value).expect("found above").as_str();
        while at > level {
            v = self.parents[at - 1][v].as_str();
            at -= 1;
        }
        Ok(v)
    }

    /// The information order: `a ⪯ b` iff `a` is `b` or one of its ancestors.
    pub fn leq(&self, a: &str, b: &str) -> bool {
        let (Some(la), Some(lb)) = (self.level_of(a), self.level_of(b)) else {
            return false;
        };
        la <= lb && self.ancestor(b, la).is_ok_and(|x| x == a)
    }
}

/// Replaces `attr` by its ancestor at `level`; the attribute's domain
/// becomes the values at that level.
pub fn generalize(r: &Relation, attr: &str, level: usize, h: &Hierarchy) -> Result<Relation> {
    let col = r.columns(&[attr])?[0];
    if level >= h.levels.len() {
        return Err(structural(format!("hierarchy has no level {level}")));
    }
    let mut domains = r.domains.clone();
    domains.insert(
        attr.to_string(),
        h.values_at(level).iter().cloned().collect(),
    );
    let tuples = r
        .tuples
        .iter()
        .map(|t| {
            let mut t = t.clone();
            t[col] = h.ancestor(&t[col], level)?.to_string();
            Ok(t)
        })
        .collect::<Result<Vec<_>>>()?;
    Relation::new(domains, tuples)
}

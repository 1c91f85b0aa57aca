//! Finite preorders as information orders.
//!
//! Elements are dense indices `0..len()` with a display label each. A
//! [`Preorder`] is always reflexive and transitive: its checked constructors
//! reject anything else, and [`Preorder::closure`] is the only way to have a
//! relation repaired.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{precondition, structural, Result};

/// A finite preordered set `(X, ⪯)`.
#[derive(Clone, PartialEq, Eq)]
pub struct Preorder {
    labels: Vec<String>,
    // row-major n×n adjacency: leq[x * n + y] ⇔ x ⪯ y
    leq: Vec<bool>,
}

impl fmt::Debug for Preorder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pairs: Vec<_> = self
            .pairs()
            .filter(|(x, y)| x != y)
            .map(|(x, y)| format!("{}⪯{}", self.labels[x], self.labels[y]))
            .collect();
        f.debug_struct("Preorder")
            .field("labels", &self.labels)
            .field("strict_pairs", &pairs)
            .finish()
    }
}

fn check_labels(labels: &[String]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for l in labels {
        if !seen.insert(l.as_str()) {
            return Err(structural(format!("duplicate element label {l:?}")));
        }
    }
    Ok(())
}

impl Preorder {
    /// Builds a preorder from an explicit relation, rejecting it unless it is
    /// already reflexive and transitive.
    pub fn new<L, I>(labels: impl IntoIterator<Item = L>, pairs: I) -> Result<Self>
    where
        L: Into<String>,
        I: IntoIterator<Item = (usize, usize)>,
    {
        let raw = Self::raw(labels, pairs)?;
        if let Some(problem) = raw.preorder_violation() {
            return Err(precondition(format!(
                "relation is not a preorder: {problem}"
            )));
        }
        Ok(raw)
    }

    /// Builds a preorder from a decidable predicate on index pairs.
    pub fn from_fn<L: Into<String>>(
        labels: impl IntoIterator<Item = L>,
        leq: impl Fn(usize, usize) -> bool,
    ) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let n = labels.len();
        let pairs: Vec<_> = (0..n)
            .flat_map(|x| (0..n).map(move |y| (x, y)))
            .filter(|&(x, y)| leq(x, y))
            .collect();
        Self::new(labels, pairs)
    }

    /// Reflexive-transitive closure of the given relation.
    pub fn closure<L, I>(labels: impl IntoIterator<Item = L>, pairs: I) -> Result<Self>
    where
        L: Into<String>,
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut p = Self::raw(labels, pairs)?;
        let n = p.len();
        for x in 0..n {
            p.leq[x * n + x] = true;
        }
        // Warshall
        for k in 0..n {
            for i in 0..n {
                if p.leq[i * n + k] {
                    for j in 0..n {
                        if p.leq[k * n + j] {
                            p.leq[i * n + j] = true;
                        }
                    }
                }
            }
        }
        Ok(p)
    }

    /// The discrete order `x ⪯ y ⇔ x = y`.
    pub fn discrete<L: Into<String>>(labels: impl IntoIterator<Item = L>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let n = labels.len();
        Self::new(labels, (0..n).map(|i| (i, i)))
    }

    fn raw<L, I>(labels: impl IntoIterator<Item = L>, pairs: I) -> Result<Self>
    where
        L: Into<String>,
        I: IntoIterator<Item = (usize, usize)>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        check_labels(&labels)?;
        let n = labels.len();
        let mut leq = vec![false; n * n];
        for (x, y) in pairs {
            if x >= n || y >= n {
                return Err(structural(format!(
                    "pair ({x}, {y}) references an element outside the {n}-element carrier"
                )));
            }
            leq[x * n + y] = true;
        }
        Ok(Preorder { labels, leq })
    }

    fn preorder_violation(&self) -> Option<String> {
        let n = self.len();
        for x in 0..n {
            if !self.leq(x, x) {
                return Some(format!("not reflexive at {}", self.labels[x]));
            }
        }
        for x in 0..n {
            for y in 0..n {
                if !self.leq(x, y) {
                    continue;
                }
                for z in 0..n {
                    if self.leq(y, z) && !self.leq(x, z) {
                        return Some(format!(
                            "not transitive: {} ⪯ {} ⪯ {} but not {} ⪯ {}",
                            self.labels[x],
                            self.labels[y],
                            self.labels[z],
                            self.labels[x],
                            self.labels[z]
                        ));
                    }
                }
            }
        }
        None
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    /// Looks an element up by label.
    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| structural(format!("unknown element {label:?}")))
    }

    /// `x ⪯ y`. Panics if either index is out of range.
    pub fn leq(&self, x: usize, y: usize) -> bool {
        let n = self.len();
        assert!(x < n && y < n, "element index out of range");
        self.leq[x * n + y]
    }

    /// Information equivalence `x ≅ y`.
    pub fn equiv(&self, x: usize, y: usize) -> bool {
        self.leq(x, y) && self.leq(y, x)
    }

    /// `x ⪯ y` and not `y ⪯ x`.
    pub fn strictly_below(&self, x: usize, y: usize) -> bool {
        self.leq(x, y) && !self.leq(y, x)
    }

    /// All pairs `(x, y)` with `x ⪯ y`, in row-major order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.len();
        (0..n * n)
            .filter(|&k| self.leq[k])
            .map(move |k| (k / n, k % n))
    }

    pub fn is_antisymmetric(&self) -> bool {
        let n = self.len();
        (0..n).all(|x| (0..n).all(|y| x == y || !self.equiv(x, y)))
    }

    /// The greatest element of `candidates` (up to ≅), if one exists.
    pub fn maximum(&self, candidates: &[usize]) -> Option<usize> {
        candidates
            .iter()
            .copied()
            .find(|&m| candidates.iter().all(|&c| self.leq(c, m)))
    }

    /// The least element of `candidates` (up to ≅), if one exists.
    pub fn minimum(&self, candidates: &[usize]) -> Option<usize> {
        candidates
            .iter()
            .copied()
            .find(|&m| candidates.iter().all(|&c| self.leq(m, c)))
    }

    /// The sub-preorder on `members`, re-indexed in the given order.
    pub fn restrict(&self, members: &[usize]) -> Result<Preorder> {
        let labels: Vec<String> = members.iter().map(|&m| self.labels[m].clone()).collect();
        Preorder::from_fn(labels, |i, j| self.leq(members[i], members[j]))
    }
}

/// Decides whether `leq` is a preorder on `carrier`. Does not repair anything.
pub fn is_preorder<T: Ord + fmt::Debug>(carrier: &[T], leq: &[(T, T)]) -> Result<bool> {
    let index: BTreeMap<&T, usize> = carrier.iter().enumerate().map(|(i, t)| (t, i)).collect();
    if index.len() != carrier.len() {
        return Err(structural("carrier contains duplicate elements"));
    }
    let lookup = |t: &T| {
        index.get(t).copied().ok_or_else(|| {
            structural(format!(
                "relation references {t:?}, which is not in the carrier"
            ))
        })
    };
    let mut pairs = Vec::with_capacity(leq.len());
    for (a, b) in leq {
        pairs.push((lookup(a)?, lookup(b)?));
    }
    let labels = (0..carrier.len()).map(|i| i.to_string());
    Ok(Preorder::raw(labels, pairs)?.preorder_violation().is_none())
}

/// A canonical (sorted, deduplicated) set of element indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Subset(Vec<usize>);

impl Subset {
    pub fn new(elements: impl IntoIterator<Item = usize>) -> Self {
        let set: BTreeSet<usize> = elements.into_iter().collect();
        Subset(set.into_iter().collect())
    }

    /// Members of the bitmask `mask` over `0..64`.
    pub fn from_mask(mask: u64) -> Self {
        Subset((0..64).filter(|i| mask >> i & 1 == 1).collect())
    }

    pub fn mask(&self) -> u64 {
        self.0.iter().fold(0u64, |m, &i| {
            assert!(i < 64, "mask requires indices below 64");
            m | 1 << i
        })
    }

    pub fn from_labels(order: &Preorder, labels: &[&str]) -> Result<Self> {
        let mut out = Vec::with_capacity(labels.len());
        for l in labels {
            out.push(order.index_of(l)?);
        }
        Ok(Subset::new(out))
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.0.binary_search(&x).is_ok()
    }

    pub fn render(&self, order: &Preorder) -> String {
        let items: Vec<&str> = self.iter().map(|i| order.label(i)).collect();
        format!("{{{}}}", items.join(", "))
    }
}

impl FromIterator<usize> for Subset {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Subset::new(iter)
    }
}

/// The three ways of lifting `⪯` to non-empty subsets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Lifting {
    /// `∀x∈S ∃y∈T. x ⪯ y`: T enriches S.
    Flat,
    /// `∀y∈T ∃x∈S. x ⪯ y`: S adulterates T.
    Sharp,
    /// Both of the above.
    Natural,
}

impl Lifting {
    pub const ALL: [Lifting; 3] = [Lifting::Flat, Lifting::Sharp, Lifting::Natural];
}

fn flat(order: &Preorder, s: &Subset, t: &Subset) -> bool {
    s.iter().all(|x| t.iter().any(|y| order.leq(x, y)))
}

fn sharp(order: &Preorder, s: &Subset, t: &Subset) -> bool {
    t.iter().all(|y| s.iter().any(|x| order.leq(x, y)))
}

/// Compares two non-empty subsets under the chosen lifting.
pub fn lift(order: &Preorder, mode: Lifting, s: &Subset, t: &Subset) -> Result<bool> {
    if s.is_empty() || t.is_empty() {
        return Err(precondition(
            "lifted orderings are defined on non-empty subsets only",
        ));
    }
    if let Some(bad) = s.iter().chain(t.iter()).find(|&i| i >= order.len()) {
        return Err(structural(format!(
            "subset references element {bad} outside the carrier"
        )));
    }
    Ok(match mode {
        Lifting::Flat => flat(order, s, t),
        Lifting::Sharp => sharp(order, s, t),
        Lifting::Natural => flat(order, s, t) && sharp(order, s, t),
    })
}

/// `⪯♯` without the precondition checks, for callers that already hold valid subsets.
pub(crate) fn sharp_leq(order: &Preorder, s: &Subset, t: &Subset) -> bool {
    sharp(order, s, t)
}

/// `K(S) = { a | ∃x,y∈S. x ⪯ a ⪯ y }`.
pub fn convex_hull(order: &Preorder, s: &Subset) -> Result<Subset> {
    if s.is_empty() {
        return Err(precondition(
            "convex hull of the empty set is not defined here",
        ));
    }
    Ok((0..order.len())
        .filter(|&a| s.iter().any(|x| order.leq(x, a)) && s.iter().any(|y| order.leq(a, y)))
        .collect())
}

/// An information class `[x]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfoClass {
    pub representative: usize,
    pub members: Subset,
}

/// The partially ordered quotient `X/≅` and the projection `x ↦ [x]`.
#[derive(Debug, Clone)]
pub struct Quotient {
    pub classes: Vec<InfoClass>,
    pub order: Preorder,
    pub projection: Vec<usize>,
}

/// Quotients a preorder by information equivalence.
///
/// Classes are numbered by their least member, and each class is
/// represented by that member.
pub fn quotient(order: &Preorder) -> Quotient {
    let n = order.len();
    let mut projection = vec![usize::MAX; n];
    let mut classes: Vec<InfoClass> = Vec::new();
    for x in 0..n {
        if projection[x] != usize::MAX {
            continue;
        }
        let members: Subset = (x..n).filter(|&y| order.equiv(x, y)).collect();
        for m in members.iter() {
            projection[m] = classes.len();
        }
        classes.push(InfoClass {
            representative: x,
            members,
        });
    }
    let labels: Vec<String> = classes
        .iter()
        .map(|c| {
            if c.members.len() == 1 {
                order.label(c.representative).to_string()
            } else {
                let names: Vec<&str> = c.members.iter().map(|m| order.label(m)).collect();
                format!("[{}]", names.join(" ≅ "))
            }
        })
        .collect();
    let quotient_order = Preorder::from_fn(labels, |a, b| {
        order.leq(classes[a].representative, classes[b].representative)
    })
    .expect("a quotient of a preorder is a preorder");
    Quotient {
        classes,
        order: quotient_order,
        projection,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(names: &[&str]) -> Preorder {
        Preorder::from_fn(names.iter().copied(), |x, y| x <= y).unwrap()
    }

    #[test]
    fn is_preorder_examples() {
        assert!(is_preorder(&["a"], &[("a", "a")]).unwrap());
        assert!(is_preorder(&["a", "b"], &[("a", "a"), ("b", "b"), ("a", "b")]).unwrap());
        assert!(!is_preorder(
            &["a", "b", "c"],
            &[("a", "a"), ("b", "b"), ("c", "c"), ("a", "b"), ("b", "c")]
        )
        .unwrap());
    }

    #[test]
    fn is_preorder_rejects_foreign_elements() {
        let err = is_preorder(&["a"], &[("a", "z")]).unwrap_err();
        assert!(matches!(err, crate::Error::Structural(_)));
    }

    #[test]
    fn constructors_validate_without_closing() {
        let missing = Preorder::new(["a", "b", "c"], [(0, 0), (1, 1), (2, 2), (0, 1), (1, 2)]);
        assert!(matches!(missing, Err(crate::Error::Precondition(_))));
        let closed = Preorder::closure(["a", "b", "c"], [(0, 1), (1, 2)]).unwrap();
        assert!(closed.leq(0, 2));
        assert!(matches!(
            Preorder::new(["a"], [(0, 3)]),
            Err(crate::Error::Structural(_))
        ));
        assert!(matches!(
            Preorder::discrete(["a", "a"]),
            Err(crate::Error::Structural(_))
        ));
    }

    #[test]
    fn equivalence() {
        let c = chain(&["a", "b"]);
        assert!(c.equiv(0, 0));
        assert!(!c.equiv(0, 1));
        let cycle = Preorder::new(["a", "b"], [(0, 0), (1, 1), (0, 1), (1, 0)]).unwrap();
        assert!(cycle.equiv(0, 1));
        assert!(c.index_of("zz").is_err());
    }

    #[test]
    fn lift_rejects_empty() {
        let c = chain(&["a", "b"]);
        assert!(lift(&c, Lifting::Flat, &Subset::default(), &Subset::new([0])).is_err());
    }

    #[test]
    fn lift_flat_and_sharp_differ() {
        // a ⪯ b; {a} vs {a, b}: flat holds, and so does sharp; {b} vs {a} fails both
        let c = chain(&["a", "b"]);
        let a = Subset::new([0]);
        let ab = Subset::new([0, 1]);
        let b = Subset::new([1]);
        assert!(lift(&c, Lifting::Flat, &a, &ab).unwrap());
        assert!(lift(&c, Lifting::Sharp, &a, &ab).unwrap());
        // {a,b} ⪯♭ {a} fails (b has nothing above it in {a}), ⪯♯ holds
        assert!(!lift(&c, Lifting::Flat, &ab, &a).unwrap());
        assert!(lift(&c, Lifting::Sharp, &ab, &a).unwrap());
        assert!(!lift(&c, Lifting::Natural, &b, &a).unwrap());
    }

    #[test]
    fn hull_of_singleton_is_its_class() {
        let p = Preorder::new(["a", "b", "c"], [(0, 0), (1, 1), (2, 2), (0, 1), (1, 0)]).unwrap();
        assert_eq!(
            convex_hull(&p, &Subset::new([0])).unwrap(),
            Subset::new([0, 1])
        );
        assert_eq!(
            convex_hull(&p, &Subset::new([2])).unwrap(),
            Subset::new([2])
        );
    }

    #[test]
    fn quotient_examples() {
        let d = Preorder::discrete(["a", "b"]).unwrap();
        let q = quotient(&d);
        assert_eq!(q.classes.len(), 2);

        let cycle = Preorder::new(["a", "b"], [(0, 0), (1, 1), (0, 1), (1, 0)]).unwrap();
        let q = quotient(&cycle);
        assert_eq!(q.classes.len(), 1);
        assert_eq!(q.classes[0].members, Subset::new([0, 1]));
        assert_eq!(q.projection, vec![0, 0]);
        assert!(q.order.is_antisymmetric());
    }

    #[test]
    fn quotient_reflects_order() {
        let p = Preorder::closure(["a", "b", "c", "d"], [(0, 1), (1, 0), (1, 2), (3, 2)]).unwrap();
        let q = quotient(&p);
        assert!(q.order.is_antisymmetric());
        for x in 0..4 {
            for y in 0..4 {
                assert_eq!(q.order.leq(q.projection[x], q.projection[y]), p.leq(x, y));
            }
        }
    }

    #[test]
    fn subset_mask_roundtrip() {
        let s = Subset::new([3, 0, 3, 5]);
        assert_eq!(s.as_slice(), &[0, 3, 5]);
        assert_eq!(Subset::from_mask(s.mask()), s);
    }
}

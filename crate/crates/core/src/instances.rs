//! Concrete OPCMs: flat algebras, prefix codes, and possibility powersets.

use std::collections::BTreeSet;
use std::path::Path;

use crate::error::{precondition, structural, Error, Result};
use crate::limits::{ensure_within_cap, nonempty_powerset_size};
use crate::opcm::FiniteOpcm;
use crate::order::{sharp_leq, Preorder, Subset};
use crate::report::{LawCheck, LawReport};

/// Label of the unknown element of a flat algebra.
pub const BOTTOM: &str = "⊥";
/// Label of the empty code.
pub const EPSILON: &str = "ε";

/// The flat algebra `X ∪ {⊥}`: `⊥ ⊕ x = x`, `x ⊕ x = x`, distinct values clash.
pub fn flat<L: AsRef<str>>(values: impl IntoIterator<Item = L>) -> Result<FiniteOpcm> {
    let mut labels = vec![BOTTOM.to_string()];
    for v in values {
        let v = v.as_ref();
        if v == BOTTOM {
            return Err(structural(format!(
                "value {BOTTOM} collides with the unknown element"
            )));
        }
        labels.push(v.to_string());
    }
    if labels.len() == 1 {
        return Err(precondition("a flat algebra needs at least one value"));
    }
    ensure_within_cap(labels.len())?;
    let order = Preorder::from_fn(labels, |x, y| x == 0 || x == y)?;
    FiniteOpcm::from_fn(order, 0, |x, y| match (x, y) {
        (0, y) => Some(y),
        (x, 0) => Some(x),
        (x, y) if x == y => Some(x),
        _ => None,
    })
}

/// A finite prefix-closed set of codes such as partial postcodes.
///
/// The levels are the distinct code lengths; every prefix of a code that
/// ends on a level must itself be a code. The empty code is always present.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixCodeSet {
    codes: Vec<String>,
    levels: Vec<usize>,
}

impl PrefixCodeSet {
    /// Accepts codes in any order; `""` and `"ε"` both denote the empty code.
    pub fn new<S: AsRef<str>>(codes: impl IntoIterator<Item = S>) -> Result<Self> {
        let mut set: BTreeSet<String> = BTreeSet::new();
        set.insert(String::new());
        for c in codes {
            let c = c.as_ref();
            let c = if c == EPSILON { "" } else { c };
            if c.contains(['\t', '\n', '\r']) {
                return Err(structural(format!(
                    "code {c:?} contains a tab or line break"
                )));
            }
            set.insert(c.to_string());
        }
        let levels: BTreeSet<usize> = set.iter().map(|c| c.chars().count()).collect();
        for code in &set {
            for &lvl in levels.iter().take_while(|&&l| l < code.chars().count()) {
                let prefix: String = code.chars().take(lvl).collect();
                if !set.contains(&prefix) {
                    return Err(precondition(format!(
                        "not prefix closed: {code:?} has level-{lvl} prefix {prefix:?} which is not a code"
                    )));
                }
            }
        }
        Ok(PrefixCodeSet {
            codes: set.into_iter().collect(),
            levels: levels.into_iter().collect(),
        })
    }

    /// One code per line; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        PrefixCodeSet::new(
            text.lines()
                .map(|l| l.trim())
                .filter(|l| !l.is_empty() && !l.starts_with('#')),
        )
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| structural(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Codes in sorted order; the empty code comes first.
    pub fn codes(&self) -> &[String] {
        &self.codes
    }

    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    pub fn contains(&self, code: &str) -> bool {
        let code = if code == EPSILON { "" } else { code };
        self.codes
            .binary_search_by(|c| c.as_str().cmp(code))
            .is_ok()
    }

    /// The display label of a code.
    pub fn label(code: &str) -> &str {
        if code.is_empty() {
            EPSILON
        } else {
            code
        }
    }

    /// `⟦P⟧`: the leaves that `code` could stand for.
    pub fn realization<'a>(code: &str, leaves: &'a [String]) -> BTreeSet<&'a str> {
        let code = if code == EPSILON { "" } else { code };
        leaves
            .iter()
            .filter(|l| l.starts_with(code))
            .map(String::as_str)
            .collect()
    }
}

/// Prefix order with `x ⊕ y` the longer of two comparable codes.
pub fn prefix_opcm(codes: &PrefixCodeSet) -> Result<FiniteOpcm> {
    ensure_within_cap(codes.codes.len())?;
    let c = &codes.codes;
    let labels: Vec<String> = c
        .iter()
        .map(|s| PrefixCodeSet::label(s).to_string())
        .collect();
    let order = Preorder::from_fn(labels, |x, y| c[y].starts_with(c[x].as_str()))?;
    FiniteOpcm::from_fn(order, 0, |x, y| {
        if c[y].starts_with(c[x].as_str()) {
            Some(y)
        } else if c[x].starts_with(c[y].as_str()) {
            Some(x)
        } else {
            None
        }
    })
}

fn render(values: &[String], s: &Subset) -> String {
    let items: Vec<&str> = s.iter().map(|i| values[i].as_str()).collect();
    format!("{{{}}}", items.join(", "))
}

fn subset_labels(values: &[String]) -> Result<Vec<String>> {
    let size = nonempty_powerset_size(values.len());
    ensure_within_cap(size)?;
    Ok((1..=size as u64)
        .map(|mask| render(values, &Subset::from_mask(mask)))
        .collect())
}

/// `(ℙ⁺X, ⊇, ∩, X)`. The subset with bitmask `m` has index `m − 1`.
pub fn possibility_of_set<L: AsRef<str>>(
    values: impl IntoIterator<Item = L>,
) -> Result<FiniteOpcm> {
    let values: Vec<String> = values.into_iter().map(|v| v.as_ref().to_string()).collect();
    if values.is_empty() {
        return Err(precondition("possibilities over an empty set"));
    }
    let labels = subset_labels(&values)?;
    let n = labels.len();
    let order = Preorder::from_fn(labels, |s, t| {
        let (s, t) = (s + 1, t + 1);
        s & t == t
    })?;
    FiniteOpcm::from_fn(order, n - 1, |s, t| {
        let meet = (s + 1) & (t + 1);
        (meet != 0).then(|| meet - 1)
    })
}

/// A triple `x ⪯ x′`, `x′ ⊥ y` with `x ⊕ y` undefined, if any.
pub fn downward_closure_violation(m: &FiniteOpcm) -> Option<(usize, usize, usize)> {
    m.order()
        .pairs()
        .flat_map(|(x, xp)| m.elements().map(move |y| (x, xp, y)))
        .find(|&(x, xp, y)| m.defined(xp, y) && !m.defined(x, y))
}

/// `x ⪯ x′ ∧ x′ ⊥ y ⇒ x ⊥ y` for all triples.
pub fn check_downward_closed(m: &FiniteOpcm) -> bool {
    downward_closure_violation(m).is_none()
}

/// `P 𝗼⊕ Q = { x ⊕ y | x ∈ P, y ∈ Q, x ⊥ y }`, undefined when empty.
pub fn lifted_combine(m: &FiniteOpcm, p: &Subset, q: &Subset) -> Option<Subset> {
    let out: Subset = p
        .iter()
        .flat_map(|x| q.iter().filter_map(move |y| m.combine(x, y)))
        .collect();
    (!out.is_empty()).then_some(out)
}

/// `(ℙ⁺M, ⪯♯, 𝗼⊕, {0})`, materialized in full. Requires `M` to be
/// ⊕-downward closed; the subset with bitmask `m` has index `m − 1`.
pub fn possibility_of_opcm(m: &FiniteOpcm) -> Result<FiniteOpcm> {
    if let Some((x, xp, y)) = downward_closure_violation(m) {
        return Err(Error::Precondition(format!(
            "not ⊕-downward closed: {} ⪯ {} and {} ⊥ {} but {} ⊕ {} undefined",
            m.label(x),
            m.label(xp),
            m.label(xp),
            m.label(y),
            m.label(x),
            m.label(y)
        )));
    }
    let labels = subset_labels(m.order().labels())?;
    let subsets: Vec<Subset> = (1..=labels.len() as u64).map(Subset::from_mask).collect();
    let order = Preorder::from_fn(labels, |s, t| {
        sharp_leq(m.order(), &subsets[s], &subsets[t])
    })?;
    let zero = Subset::new([m.zero()]).mask() as usize - 1;
    FiniteOpcm::from_fn(order, zero, |s, t| {
        lifted_combine(m, &subsets[s], &subsets[t]).map(|r| r.mask() as usize - 1)
    })
}

/// The OPCM laws of `(ℙ⁺M, ⪯♯, 𝗼⊕, {0})` restricted to the given subsets,
/// for `M` too large to materialize its powerset. Results of `𝗼⊕` need not
/// be among the samples.
pub fn check_lifted_laws(m: &FiniteOpcm, samples: &[Subset]) -> Result<LawReport> {
    if let Some(bad) = samples
        .iter()
        .find(|s| s.is_empty() || s.iter().any(|x| x >= m.len()))
    {
        return Err(structural(format!(
            "sample {bad:?} is empty or leaves the carrier"
        )));
    }
    let o = m.order();
    let eq = |a: &Subset, b: &Subset| sharp_leq(o, a, b) && sharp_leq(o, b, a);
    let r = |s: &Subset| s.render(o);
    let zero = Subset::new([m.zero()]);
    let mut report = LawReport::new(format!("lifted laws on {} sampled subsets", samples.len()));

    let mut identity = LawCheck::new("OPCM1 identity");
    for p in samples {
        match lifted_combine(m, &zero, p) {
            Some(z) => identity.expect(eq(&z, p), [r(p)], || format!("{{0}} 𝗼⊕ P = {}", r(&z))),
            None => identity.expect(false, [r(p)], || "{0} 𝗼⊕ P undefined".into()),
        }
    }
    report.push(identity);

    let mut comm = LawCheck::new("OPCM2 commutativity");
    for p in samples {
        for q in samples {
            let (pq, qp) = (lifted_combine(m, p, q), lifted_combine(m, q, p));
            if pq.is_none() && qp.is_none() {
                continue;
            }
            let ok = matches!((&pq, &qp), (Some(a), Some(b)) if eq(a, b));
            comm.expect(ok, [r(p), r(q)], || "P 𝗼⊕ Q ≇ Q 𝗼⊕ P".into());
        }
    }
    report.push(comm);

    let mut assoc = LawCheck::new("OPCM3 associativity");
    for p in samples {
        for q in samples {
            for s in samples {
                let left = lifted_combine(m, q, s).and_then(|qs| lifted_combine(m, p, &qs));
                let Some(left) = left else { continue };
                let right = lifted_combine(m, p, q).and_then(|pq| lifted_combine(m, &pq, s));
                let ok = right.as_ref().is_some_and(|right| eq(&left, right));
                assoc.expect(ok, [r(p), r(q), r(s)], || {
                    "P 𝗼⊕ (Q 𝗼⊕ R) ≇ (P 𝗼⊕ Q) 𝗼⊕ R".into()
                });
            }
        }
    }
    report.push(assoc);

    let mut mono = LawCheck::new("OPCM4 monotonicity");
    for p1 in samples {
        for p2 in samples.iter().filter(|p2| sharp_leq(o, p1, p2)) {
            for q in samples {
                if let (Some(a), Some(b)) = (lifted_combine(m, p1, q), lifted_combine(m, p2, q)) {
                    mono.expect(sharp_leq(o, &a, &b), [r(p1), r(p2), r(q)], || {
                        format!("{} ⋠♯ {}", r(&a), r(&b))
                    });
                }
            }
        }
    }
    report.push(mono);

    if m.elements().all(|x| o.leq(m.zero(), x)) {
        let mut least = LawCheck::new("{0} is ⪯♯-least");
        for p in samples {
            least.expect(sharp_leq(o, &zero, p), [r(p)], || "{0} ⋠♯ P".into());
        }
        report.push(least);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{post, post5, post_leaves};
    use crate::opcm::{check_compatibility, check_opcm_laws};

    fn idx(m: &FiniteOpcm, l: &str) -> usize {
        m.index_of(l).unwrap()
    }

    #[test]
    fn flat_tables() {
        let m = flat(["a", "b"]).unwrap();
        assert_eq!(m.len(), 3);
        assert_eq!(m.combine(1, 1), Some(1));
        assert_eq!(m.combine(0, 1), Some(1));
        assert_eq!(m.combine(1, 2), None);
        assert!(check_opcm_laws(&m).unwrap().passed());
        assert!(matches!(flat(["a", BOTTOM]), Err(Error::Structural(_))));
        assert!(matches!(
            flat(Vec::<&str>::new()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn postcode_order_and_combine() {
        let m = prefix_opcm(&post()).unwrap();
        assert_eq!(m.len(), 10);
        let chain = ["ε", "SA", "SA2", "SA2 8", "SA2 8PP"];
        for w in chain.windows(2) {
            assert!(m.leq(idx(&m, w[0]), idx(&m, w[1])));
        }
        assert_eq!(
            m.combine(idx(&m, "SA"), idx(&m, "SA2 8")),
            Some(idx(&m, "SA2 8"))
        );
        assert_eq!(m.combine(idx(&m, "SA1"), idx(&m, "SA2")), None);
        assert_eq!(m.zero(), idx(&m, "ε"));
    }

    #[test]
    fn prefix_closure_is_enforced() {
        assert!(PrefixCodeSet::new(["SA", "SA2", "SA1 3"]).is_err());
        assert!(PrefixCodeSet::new(["SA", "SA2 8"]).is_ok());
        let p = PrefixCodeSet::parse("# codes\nSA\n\nSA2\n").unwrap();
        assert_eq!(p.codes(), ["", "SA", "SA2"]);
        assert_eq!(p.levels(), [0, 2, 3]);
    }

    #[test]
    fn realization_reverses_the_prefix_order() {
        let codes = post();
        let leaves = post_leaves();
        for p in codes.codes() {
            for q in codes.codes() {
                let (rp, rq) = (
                    PrefixCodeSet::realization(p, &leaves),
                    PrefixCodeSet::realization(q, &leaves),
                );
                assert_eq!(
                    q.starts_with(p.as_str()),
                    rp.is_superset(&rq),
                    "{p:?} vs {q:?}"
                );
            }
        }
    }

    #[test]
    fn powerset_tables() {
        let m = possibility_of_set(["1", "2", "3"]).unwrap();
        assert_eq!(m.len(), 7);
        let s12 = idx(&m, "{1, 2}");
        let s23 = idx(&m, "{2, 3}");
        assert_eq!(m.combine(s12, s23), Some(idx(&m, "{2}")));
        assert_eq!(m.combine(idx(&m, "{1}"), idx(&m, "{2}")), None);
        assert_eq!(m.label(m.zero()), "{1, 2, 3}");
        for s in m.elements() {
            assert_eq!(m.combine(s, m.zero()), Some(s));
            assert!(m.leq(m.zero(), s));
        }
        assert!(check_opcm_laws(&m).unwrap().passed());
        assert!(check_compatibility(&m).unwrap().passed());
    }

    #[test]
    fn downward_closure() {
        let m = prefix_opcm(&post()).unwrap();
        assert!(check_downward_closed(&m));
        assert!(check_downward_closed(&flat(["a", "b"]).unwrap()));
        let (sa, sa28) = (idx(&m, "SA"), idx(&m, "SA2 8"));
        let broken = m.with_entry(sa, sa28, None).unwrap();
        let (x, xp, y) = downward_closure_violation(&broken).unwrap();
        assert!(broken.leq(x, xp) && broken.defined(xp, y) && !broken.defined(x, y));
        assert!(matches!(
            possibility_of_opcm(&broken),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn lifted_combine_examples() {
        let m = prefix_opcm(&post()).unwrap();
        let s = |ls: &[&str]| Subset::from_labels(m.order(), ls).unwrap();
        assert_eq!(
            lifted_combine(&m, &s(&["SA1", "SA2"]), &s(&["SA2 8"])),
            Some(s(&["SA2 8"]))
        );
        assert_eq!(lifted_combine(&m, &s(&["SA1 3LP"]), &s(&["SA2 8PP"])), None);
        let p = s(&["SA1", "SA2 8PW"]);
        assert_eq!(lifted_combine(&m, &p, &s(&["ε"])), Some(p));
    }

    #[test]
    fn possibility_over_post5() {
        let m = prefix_opcm(&post5()).unwrap();
        let pm = possibility_of_opcm(&m).unwrap();
        assert_eq!(pm.len(), 31);
        let report = check_opcm_laws(&pm).unwrap();
        assert!(report.passed(), "{report}");
        assert!(pm.elements().all(|p| pm.leq(pm.zero(), p)));
    }

    #[test]
    fn lifted_laws_on_samples() {
        let m = prefix_opcm(&post()).unwrap();
        let samples: Vec<Subset> = [
            0b11u64,
            0b101,
            0b1000000001,
            0b110000000,
            0b10,
            0b1111111111,
        ]
        .into_iter()
        .map(Subset::from_mask)
        .collect();
        assert!(check_lifted_laws(&m, &samples).unwrap().passed());
    }

    #[test]
    fn powerset_cap() {
        let many: Vec<String> = (0..20).map(|i| i.to_string()).collect();
        assert!(matches!(
            possibility_of_set(&many),
            Err(Error::Resource { .. })
        ));
    }
}

//! Ordered valuation algebras over finite tables, their index functor, the
//! extended order `≤′`, regularity, and the isomorphism with the
//! Grothendieck completion.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{precondition, structural, Result};
use crate::grothendieck::{completion_leq, groth_opcm, GrothElem, IndexedFamily, JoinSemilattice};
use crate::limits::ensure_within_cap;
use crate::morphisms::{synthesize_upper, Hom};
use crate::opcm::{check_opcm_laws, FiniteOpcm};
use crate::order::{Preorder, Subset};
use crate::relational::{tuple_space, AttributeSchema};
use crate::report::{LawCheck, LawReport};

/// `(Φ, ≤, D; ⊗, d, ↓, e)` given by tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValuationAlgebra {
    order: Preorder,
    domains: JoinSemilattice,
    combine: Vec<usize>,
    label: Vec<usize>,
    focus: Vec<Option<usize>>,
    identity: Vec<usize>,
}

impl ValuationAlgebra {
    /// `combine` is `n × n`; `focus` is `n × |D|` with an entry exactly
    /// where `x ≤ d(φ)`. Axioms are not checked here.
    pub fn new(
        order: Preorder,
        domains: JoinSemilattice,
        combine: Vec<usize>,
        label: Vec<usize>,
        focus: Vec<Option<usize>>,
        identity: Vec<usize>,
    ) -> Result<Self> {
        let (n, nd) = (order.len(), domains.len());
        if combine.len() != n * n || combine.iter().any(|&c| c >= n) {
            return Err(structural("combination table must be total on Φ × Φ"));
        }
        if label.len() != n || label.iter().any(|&d| d >= nd) {
            return Err(structural("every valuation needs a domain in D"));
        }
        if identity.len() != nd || identity.iter().any(|&e| e >= n) {
            return Err(structural("every domain needs an identity valuation"));
        }
        if focus.len() != n * nd {
            return Err(structural("focusing table must be n × |D|"));
        }
        for phi in 0..n {
            for x in 0..nd {
                let entry = focus[phi * nd + x];
                let allowed = domains.leq(x, label[phi]);
                if entry.is_some() != allowed || entry.is_some_and(|v| v >= n) {
                    return Err(structural(format!(
                        "focusing {} onto {} must be {}",
                        order.label(phi),
                        domains.label(x),
                        if allowed { "defined" } else { "undefined" }
                    )));
                }
            }
        }
        for x in 0..nd {
            for y in 0..nd {
                if domains.meet(x, y).is_none() {
                    return Err(precondition(format!(
                        "domains {} and {} have no meet",
                        domains.label(x),
                        domains.label(y)
                    )));
                }
            }
        }
        Ok(ValuationAlgebra {
            order,
            domains,
            combine,
            label,
            focus,
            identity,
        })
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn order(&self) -> &Preorder {
        &self.order
    }

    pub fn domains(&self) -> &JoinSemilattice {
        &self.domains
    }

    pub fn name(&self, phi: usize) -> &str {
        self.order.label(phi)
    }

    pub fn leq(&self, phi: usize, psi: usize) -> bool {
        self.order.leq(phi, psi)
    }

    /// `φ ⊗ ψ`.
    pub fn combine(&self, phi: usize, psi: usize) -> usize {
        self.combine[phi * self.len() + psi]
    }

    /// `d(φ)`.
    pub fn domain(&self, phi: usize) -> usize {
        self.label[phi]
    }

    /// `φ↓x`, defined for `x ≤ d(φ)`.
    pub fn focus(&self, phi: usize, x: usize) -> Option<usize> {
        self.focus[phi * self.domains.len() + x]
    }

    /// `e_x`.
    pub fn identity(&self, x: usize) -> usize {
        self.identity[x]
    }

    /// `Φ_x` in index order.
    pub fn valuations_on(&self, x: usize) -> Vec<usize> {
        (0..self.len())
            .filter(|&phi| self.label[phi] == x)
            .collect()
    }

    fn meet(&self, x: usize, y: usize) -> usize {
        self.domains
            .meet(x, y)
            .expect("meets validated at construction")
    }

    /// A copy with one focusing entry replaced.
    pub fn with_focus(&self, phi: usize, x: usize, result: usize) -> Result<Self> {
        let mut focus = self.focus.clone();
        focus[phi * self.domains.len() + x] = Some(result);
        ValuationAlgebra::new(
            self.order.clone(),
            self.domains.clone(),
            self.combine.clone(),
            self.label.clone(),
            focus,
            self.identity.clone(),
        )
    }
}

/// Checks the nine defining conditions, plus that `≤` is a partial order.
pub fn check_ova_axioms(v: &ValuationAlgebra) -> Result<LawReport> {
    ensure_within_cap(v.len())?;
    let n = v.len();
    let nd = v.domains.len();
    let d = &v.domains;
    let l = |phi: usize| v.name(phi).to_string();
    let dl = |x: usize| d.label(x).to_string();
    let mut report = LawReport::new(format!("ordered valuation algebra with {n} valuations"));

    let mut poset = LawCheck::new("valuations partially ordered");
    for a in 0..n {
        for b in (0..n).filter(|&b| b != a) {
            if v.leq(a, b) {
                poset.expect(!v.leq(b, a), [l(a), l(b)], || {
                    "distinct valuations are equivalent".into()
                });
            }
        }
    }
    report.push(poset);

    let mut semigroup = LawCheck::new("1 commutative semigroup");
    for a in 0..n {
        for b in 0..n {
            let ab = v.combine(a, b);
            semigroup.expect(ab == v.combine(b, a), [l(a), l(b)], || {
                "φ ⊗ ψ ≠ ψ ⊗ φ".into()
            });
            for c in 0..n {
                let left = v.combine(ab, c);
                let right = v.combine(a, v.combine(b, c));
                semigroup.expect(left == right, [l(a), l(b), l(c)], || {
                    format!("(φ ⊗ ψ) ⊗ χ = {} but φ ⊗ (ψ ⊗ χ) = {}", l(left), l(right))
                });
            }
        }
    }
    report.push(semigroup);

    let mut same = LawCheck::new("2 comparable implies same domain");
    for (a, b) in v.order.pairs() {
        same.expect(v.domain(a) == v.domain(b), [l(a), l(b)], || {
            format!("d = {} and {}", dl(v.domain(a)), dl(v.domain(b)))
        });
    }
    report.push(same);

    let mut ident = LawCheck::new("3 identity");
    for x in 0..nd {
        ident.expect(v.domain(v.identity(x)) == x, [dl(x)], || {
            "d(e_x) ≠ x".into()
        });
        for y in 0..nd {
            let got = v.combine(v.identity(x), v.identity(y));
            let want = v.identity(d.join(x, y));
            ident.expect(got == want, [dl(x), dl(y)], || {
                format!("e_x ⊗ e_y = {} ≠ {}", l(got), l(want))
            });
        }
    }
    for phi in 0..n {
        let got = v.combine(phi, v.identity(v.domain(phi)));
        ident.expect(got == phi, [l(phi)], || format!("φ ⊗ e_d(φ) = {}", l(got)));
    }
    report.push(ident);

    let mut stable = LawCheck::new("4 stability");
    for y in 0..nd {
        for x in (0..nd).filter(|&x| d.leq(x, y)) {
            let got = v.focus(v.identity(y), x);
            stable.expect(got == Some(v.identity(x)), [dl(y), dl(x)], || {
                format!("e_y↓x = {}", got.map_or("undefined".into(), l))
            });
        }
    }
    report.push(stable);

    let mut labelling = LawCheck::new("5 labelling");
    for a in 0..n {
        for b in 0..n {
            let got = v.domain(v.combine(a, b));
            let want = d.join(v.domain(a), v.domain(b));
            labelling.expect(got == want, [l(a), l(b)], || {
                format!("d(φ ⊗ ψ) = {}", dl(got))
            });
        }
        for x in 0..nd {
            if let Some(f) = v.focus(a, x) {
                labelling.expect(v.domain(f) == x, [l(a), dl(x)], || {
                    format!("d(φ↓x) = {}", dl(v.domain(f)))
                });
            }
        }
    }
    report.push(labelling);

    let mut transitive = LawCheck::new("6 transitivity of focusing");
    for phi in 0..n {
        for y in (0..nd).filter(|&y| d.leq(y, v.domain(phi))) {
            for x in (0..nd).filter(|&x| d.leq(x, y)) {
                let two = v.focus(phi, y).and_then(|f| v.focus(f, x));
                let one = v.focus(phi, x);
                transitive.expect(two.is_some() && two == one, [l(phi), dl(y), dl(x)], || {
                    "(φ↓y)↓x ≠ φ↓x".into()
                });
            }
        }
    }
    report.push(transitive);

    let mut distrib = LawCheck::new("7 distributivity");
    for a in 0..n {
        for b in 0..n {
            let (da, db) = (v.domain(a), v.domain(b));
            let left = v.focus(v.combine(a, b), da);
            let right = v.focus(b, v.meet(da, db)).map(|f| v.combine(a, f));
            distrib.expect(left.is_some() && left == right, [l(a), l(b)], || {
                format!(
                    "(φ ⊗ ψ)↓d(φ) = {} but φ ⊗ ψ↓(d(φ) ∧ d(ψ)) = {}",
                    left.map_or("undefined".into(), l),
                    right.map_or("undefined".into(), l)
                )
            });
        }
    }
    report.push(distrib);

    let mut comb = LawCheck::new("8 combination monotone");
    let pairs: Vec<(usize, usize)> = v.order.pairs().collect();
    for &(p1, q1) in &pairs {
        for &(p2, q2) in &pairs {
            let (a, b) = (v.combine(p1, p2), v.combine(q1, q2));
            comb.expect(v.leq(a, b), [l(p1), l(p2), l(q1), l(q2)], || {
                format!("φ1 ⊗ φ2 = {} ≰ {} = ψ1 ⊗ ψ2", l(a), l(b))
            });
        }
    }
    report.push(comb);

    let mut focmono = LawCheck::new("9 focusing monotone");
    for &(a, b) in &pairs {
        if v.domain(a) != v.domain(b) {
            continue;
        }
        for x in (0..nd).filter(|&x| d.leq(x, v.domain(a))) {
            let (fa, fb) = (v.focus(a, x), v.focus(b, x));
            let ok = matches!((fa, fb), (Some(fa), Some(fb)) if v.leq(fa, fb));
            focmono.expect(ok, [l(a), l(b), dl(x)], || "φ↓x ≰ ψ↓x".into());
        }
    }
    report.push(focmono);
    Ok(report)
}

fn require_axioms(v: &ValuationAlgebra) -> Result<()> {
    let report = check_ova_axioms(v)?;
    let first = report.witnesses().next().map(|(law, w)| {
        precondition(format!(
            "not an ordered valuation algebra: {law} fails at ({}): {}",
            w.elements.join(", "),
            w.detail
        ))
    });
    first.map_or(Ok(()), Err)
}

/// `φ↑y = φ ⊗ e_y` for `y ≥ d(φ)`.
pub fn vacuous_extension(v: &ValuationAlgebra, phi: usize, y: usize) -> Result<usize> {
    if !v.domains.leq(v.domain(phi), y) {
        return Err(precondition(format!(
            "cannot extend {} to the smaller domain {}",
            v.name(phi),
            v.domains.label(y)
        )));
    }
    Ok(v.combine(phi, v.identity(y)))
}

/// The index functor `x ↦ (Φ_x, ≤, ⊗, e_x)`, `x ≤ y ↦ ↑y`, with the
/// position of every valuation inside its fiber.
#[derive(Debug, Clone)]
pub struct OvaFamily {
    pub family: IndexedFamily,
    /// `members[x]` lists `Φ_x`; fiber element `i` of `x` is `members[x][i]`.
    pub members: Vec<Vec<usize>>,
}

impl OvaFamily {
    /// The completion point `(d(φ), φ)`.
    pub fn point(&self, v: &ValuationAlgebra, phi: usize) -> GrothElem {
        let x = v.domain(phi);
        let i = self.members[x]
            .iter()
            .position(|&m| m == phi)
            .expect("φ lies in Φ_d(φ)");
        GrothElem::new(x, i)
    }

    pub fn valuation(&self, e: GrothElem) -> usize {
        self.members[e.index][e.elem]
    }
}

/// Builds the functor after checking the axioms and that every `Φ_x` is an
/// ordered commutative monoid.
pub fn family_from_ova(v: &ValuationAlgebra) -> Result<OvaFamily> {
    require_axioms(v)?;
    let d = &v.domains;
    let nd = d.len();
    let members: Vec<Vec<usize>> = (0..nd).map(|x| v.valuations_on(x)).collect();
    let pos = |x: usize, phi: usize| members[x].iter().position(|&m| m == phi);
    let mut fibers = Vec::with_capacity(nd);
    for (x, ms) in members.iter().enumerate() {
        let labels: Vec<String> = ms.iter().map(|&m| v.name(m).to_string()).collect();
        let order = Preorder::from_fn(labels, |i, j| v.leq(ms[i], ms[j]))?;
        let zero = pos(x, v.identity(x)).expect("d(e_x) = x");
        let fiber = FiniteOpcm::from_fn(order, zero, |i, j| pos(x, v.combine(ms[i], ms[j])))?;
        let laws = check_opcm_laws(&fiber)?;
        if !laws.passed() || !fiber.is_total() {
            return Err(precondition(format!(
                "Φ_{} is not an ordered commutative monoid",
                d.label(x)
            )));
        }
        fibers.push(Arc::new(fiber));
    }
    let mut transitions = Vec::new();
    for (x, y) in d.order().pairs() {
        let map = members[x]
            .iter()
            .map(|&phi| {
                let up = vacuous_extension(v, phi, y)?;
                pos(y, up).ok_or_else(|| precondition("vacuous extension leaves the target domain"))
            })
            .collect::<Result<Vec<_>>>()?;
        transitions.push((x, y, Hom::new(fibers[x].clone(), fibers[y].clone(), map)?));
    }
    Ok(OvaFamily {
        family: IndexedFamily::new(d.clone(), fibers, transitions)?,
        members,
    })
}

/// `φ ≤′ ψ ⟺ d(φ) ≤ d(ψ) ∧ φ ⊗ e_{d(ψ)} ≤ ψ`, as a table.
pub fn extended_leq(v: &ValuationAlgebra, phi: usize, psi: usize) -> bool {
    v.domains.leq(v.domain(phi), v.domain(psi))
        && v.leq(v.combine(phi, v.identity(v.domain(psi))), psi)
}

/// `≤′` as a preorder; fails if it is not one.
pub fn extended_order(v: &ValuationAlgebra) -> Result<Preorder> {
    Preorder::from_fn(v.order.labels().to_vec(), |a, b| extended_leq(v, a, b))
}

/// Under `≤′`: it is a partial order agreeing with `≤` inside each `Φ_x`,
/// combination is monotone, and focusing is monotone in the form
/// `φ ≤′ ψ ∧ x ≤ d(φ) ⇒ φ↓x ≤′ ψ↓x`.
pub fn check_extended_order(v: &ValuationAlgebra) -> Result<LawReport> {
    ensure_within_cap(v.len())?;
    let n = v.len();
    let l = |phi: usize| v.name(phi).to_string();
    let le = |a: usize, b: usize| extended_leq(v, a, b);
    let mut report = LawReport::new("extended order ≤′");

    let mut po = LawCheck::new("≤′ is a partial order");
    for a in 0..n {
        po.expect(le(a, a), [l(a)], || "not reflexive".into());
        for b in (0..n).filter(|&b| le(a, b)) {
            if a != b {
                po.expect(!le(b, a), [l(a), l(b)], || "not antisymmetric".into());
            }
            for c in (0..n).filter(|&c| le(b, c)) {
                po.expect(le(a, c), [l(a), l(b), l(c)], || "not transitive".into());
            }
        }
    }
    report.push(po);

    let mut agree = LawCheck::new("≤′ coincides with ≤ on each domain");
    for a in 0..n {
        for b in (0..n).filter(|&b| v.domain(b) == v.domain(a)) {
            agree.expect(le(a, b) == v.leq(a, b), [l(a), l(b)], || {
                "orders differ".into()
            });
        }
    }
    report.push(agree);

    let mut comb = LawCheck::new("combination monotone under ≤′");
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .filter(|&(a, b)| le(a, b))
        .collect();
    for &(p1, q1) in &pairs {
        for &(p2, q2) in &pairs {
            let (a, b) = (v.combine(p1, p2), v.combine(q1, q2));
            comb.expect(le(a, b), [l(p1), l(p2), l(q1), l(q2)], || {
                format!("{} ≰′ {}", l(a), l(b))
            });
        }
    }
    report.push(comb);

    let mut focus = LawCheck::new("focusing monotone under ≤′");
    for &(a, b) in &pairs {
        for x in (0..v.domains.len()).filter(|&x| v.domains.leq(x, v.domain(a))) {
            let (fa, fb) = (v.focus(a, x), v.focus(b, x));
            let ok = matches!((fa, fb), (Some(fa), Some(fb)) if le(fa, fb));
            focus.expect(ok, [l(a), l(b), v.domains.label(x).to_string()], || {
                "φ↓x ≰′ ψ↓x".into()
            });
        }
    }
    report.push(focus);

    if identities_least(v) {
        let mut bottom = LawCheck::new("e_⊥ is ≤′-least");
        let e = v.identity(v.domains.bottom());
        for phi in 0..n {
            bottom.expect(le(e, phi), [l(phi)], || "e_⊥ ≰′ φ".into());
        }
        report.push(bottom);
    }
    Ok(report)
}

/// `e_x ≤ φ` for every `φ ∈ Φ_x`.
pub fn identities_least(v: &ValuationAlgebra) -> bool {
    (0..v.len()).all(|phi| v.leq(v.identity(v.domain(phi)), phi))
}

/// For each `(φ, x)` with `x ≤ d(φ)`, some `χ ∈ Φ_x` with `φ↓x ⊗ χ ⊗ φ ≤ φ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularityWitness(pub BTreeMap<(usize, usize), usize>);

impl RegularityWitness {
    /// `χ = e_x`, which works for idempotent algebras.
    pub fn identities(v: &ValuationAlgebra) -> Self {
        RegularityWitness(
            focus_pairs(v)
                .map(|(phi, x)| ((phi, x), v.identity(x)))
                .collect(),
        )
    }

    /// Exhaustive search; `None` when some `(φ, x)` has no witness.
    pub fn search(v: &ValuationAlgebra) -> Option<Self> {
        focus_pairs(v)
            .map(|(phi, x)| {
                v.valuations_on(x)
                    .into_iter()
                    .find(|&chi| witnesses(v, phi, x, chi))
                    .map(|chi| ((phi, x), chi))
            })
            .collect::<Option<BTreeMap<_, _>>>()
            .map(RegularityWitness)
    }

    /// The first `(φ, x)` for which this witness is missing or wrong.
    pub fn violation(&self, v: &ValuationAlgebra) -> Option<(usize, usize)> {
        focus_pairs(v).find(|&(phi, x)| {
            !self
                .0
                .get(&(phi, x))
                .is_some_and(|&chi| witnesses(v, phi, x, chi))
        })
    }
}

fn focus_pairs(v: &ValuationAlgebra) -> impl Iterator<Item = (usize, usize)> + '_ {
    (0..v.len()).flat_map(move |phi| {
        (0..v.domains.len())
            .filter(move |&x| v.domains.leq(x, v.domain(phi)))
            .map(move |x| (phi, x))
    })
}

fn witnesses(v: &ValuationAlgebra, phi: usize, x: usize, chi: usize) -> bool {
    v.domain(chi) == x
        && v.focus(phi, x)
            .is_some_and(|f| v.leq(v.combine(v.combine(f, chi), phi), phi))
}

/// Part 1, `φ↑y ≤ ψ ⇒ φ ≤ ψ↓x`, always; part 2, the converse, when the
/// identities are least and a regularity witness is given or can be found.
pub fn check_galois_lemma(
    v: &ValuationAlgebra,
    witness: Option<&RegularityWitness>,
) -> Result<LawReport> {
    ensure_within_cap(v.len())?;
    let n = v.len();
    let d = &v.domains;
    let l = |phi: usize| v.name(phi).to_string();
    if let Some(w) = witness {
        if let Some((phi, x)) = w.violation(v) {
            return Err(precondition(format!(
                "regularity witness fails at ({}, {})",
                v.name(phi),
                d.label(x)
            )));
        }
    }
    // (φ, ψ) with d(φ) ≤ d(ψ)
    let cases: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .filter(|&(a, b)| d.leq(v.domain(a), v.domain(b)))
        .collect();
    let mut report = LawReport::new("extension and focusing");
    let mut part1 = LawCheck::new("extension below implies focus above");
    for &(phi, psi) in &cases {
        let (x, y) = (v.domain(phi), v.domain(psi));
        if v.leq(vacuous_extension(v, phi, y)?, psi) {
            let f = v.focus(psi, x).expect("x ≤ d(ψ)");
            part1.expect(v.leq(phi, f), [l(phi), l(psi)], || {
                format!("φ ≰ ψ↓x = {}", l(f))
            });
        }
    }
    report.push(part1);

    let found;
    let witness = match witness {
        Some(w) => Some(w),
        None => {
            found = RegularityWitness::search(v);
            found.as_ref()
        }
    };
    if !identities_least(v) {
        report.push(LawCheck::unmet(
            "focus above implies extension below",
            "some e_x is not least in Φ_x",
        ));
    } else if witness.is_none() {
        report.push(LawCheck::unmet(
            "focus above implies extension below",
            "no regularity witness exists",
        ));
    } else {
        let mut part2 = LawCheck::new("focus above implies extension below");
        for &(phi, psi) in &cases {
            let (x, y) = (v.domain(phi), v.domain(psi));
            let f = v.focus(psi, x).expect("x ≤ d(ψ)");
            if v.leq(phi, f) {
                let up = vacuous_extension(v, phi, y)?;
                part2.expect(v.leq(up, psi), [l(phi), l(psi)], || {
                    format!("φ↑y = {} ≰ ψ", l(up))
                });
            }
        }
        report.push(part2);
    }
    Ok(report)
}

/// Rebuilds the algebra from the completion of its index functor and
/// compares: `(x, φ) ↦ φ` is a bijection and an order isomorphism onto
/// `≤′`, `⊠` is `⊗`, the zero is `e_⊥`, and focusing is the upper adjoint of
/// vacuous extension.
pub fn check_isomorphism_theorem(v: &ValuationAlgebra) -> Result<LawReport> {
    const ITEMS: [&str; 6] = [
        "bijection",
        "order isomorphism onto ≤′",
        "⊠ is ⊗",
        "zero is e_⊥",
        "focusing is the upper adjoint of extension",
        "round trip",
    ];
    let mut report = LawReport::new("regular valuation algebra against its completion");
    let mut unmet = Vec::new();
    let axioms = check_ova_axioms(v)?;
    if !axioms.passed() {
        unmet.push("the defining conditions fail".to_string());
    }
    if !identities_least(v) {
        unmet.push("some e_x is not least in Φ_x".to_string());
    }
    if RegularityWitness::search(v).is_none() {
        unmet.push("no regularity witness exists".to_string());
    }
    if !unmet.is_empty() {
        for item in ITEMS {
            report.push(LawCheck::unmet(item, unmet.join("; ")));
        }
        return Ok(report);
    }

    let of = family_from_ova(v)?;
    let fam = &of.family;
    let g = groth_opcm(fam)?;
    let points = fam.elements();
    let l = |phi: usize| v.name(phi).to_string();

    let mut bij = LawCheck::new(ITEMS[0]);
    let mut hits = vec![0usize; v.len()];
    for &p in &points {
        hits[of.valuation(p)] += 1;
    }
    for (phi, &h) in hits.iter().enumerate() {
        bij.expect(h == 1, [l(phi)], || format!("hit {h} times"));
    }
    report.push(bij);

    let mut iso = LawCheck::new(ITEMS[1]);
    for &a in &points {
        for &b in &points {
            let (pa, pb) = (of.valuation(a), of.valuation(b));
            iso.expect(
                completion_leq(fam, a, b) == extended_leq(v, pa, pb),
                [l(pa), l(pb)],
                || "completion order and ≤′ disagree".into(),
            );
        }
    }
    report.push(iso);

    let mut boxtimes = LawCheck::new(ITEMS[2]);
    for (ia, &a) in points.iter().enumerate() {
        for (ib, &b) in points.iter().enumerate() {
            let (pa, pb) = (of.valuation(a), of.valuation(b));
            let want = v.combine(pa, pb);
            let got = g.combine(ia, ib).map(|c| of.valuation(points[c]));
            boxtimes.expect(got == Some(want), [l(pa), l(pb)], || {
                format!("⊠ gives {}", got.map_or("undefined".into(), l))
            });
            let z = v.domains.join(a.index, b.index);
            let lifted = v.combine(vacuous_extension(v, pa, z)?, vacuous_extension(v, pb, z)?);
            boxtimes.expect(lifted == want, [l(pa), l(pb)], || {
                "φ↑z ⊗ ψ↑z ≠ φ ⊗ ψ".into()
            });
        }
    }
    report.push(boxtimes);

    let mut zero = LawCheck::new(ITEMS[3]);
    let e = v.identity(v.domains.bottom());
    zero.expect(of.valuation(points[g.zero()]) == e, [l(e)], || {
        "zero differs".into()
    });
    report.push(zero);

    let mut adjoint = LawCheck::new(ITEMS[4]);
    let mut focus_table = vec![None; v.len() * v.domains.len()];
    for (x, y) in v.domains.order().pairs() {
        match synthesize_upper(fam.transition(x, y)) {
            Ok(upper) => {
                for (i, &u) in upper.iter().enumerate() {
                    let psi = of.members[y][i];
                    let derived = of.members[x][u];
                    focus_table[psi * v.domains.len() + x] = Some(derived);
                    adjoint.expect(
                        v.focus(psi, x) == Some(derived),
                        [l(psi), v.domains.label(x).to_string()],
                        || format!("adjoint gives {}", l(derived)),
                    );
                }
            }
            Err(e) => adjoint.fail([v.domains.label(x), v.domains.label(y)], e.to_string()),
        }
    }
    report.push(adjoint);

    let mut round = LawCheck::new(ITEMS[5]);
    let rebuilt_combine: Vec<usize> = (0..points.len())
        .flat_map(|a| (0..points.len()).map(move |b| (a, b)))
        .map(|(a, b)| {
            g.combine(a, b)
                .map_or(usize::MAX, |c| of.valuation(points[c]))
        })
        .collect();
    let mut rebuilt = v.clone();
    rebuilt.order = extended_order(v)?;
    let mut perm = vec![0; v.len()];
    for (i, &p) in points.iter().enumerate() {
        perm[of.valuation(p)] = i;
    }
    let same_combine = (0..v.len()).all(|a| {
        (0..v.len()).all(|b| rebuilt_combine[perm[a] * points.len() + perm[b]] == v.combine(a, b))
    });
    round.expect(same_combine, ["⊗"], || "combination differs".into());
    round.expect(focus_table == v.focus, ["↓"], || {
        "focusing differs".into()
    });
    let same_labels = (0..v.len()).all(|phi| points[perm[phi]].index == v.domain(phi));
    round.expect(same_labels, ["d"], || "domain labels differ".into());
    let same_ids = (0..v.domains.len()).all(|x| {
        let p = points[perm[v.identity(x)]];
        p.index == x && fam.fiber(x).zero() == p.elem
    });
    round.expect(same_ids, ["e"], || "identities differ".into());
    let same_order = (0..v.len())
        .all(|a| (0..v.len()).all(|b| g.leq(perm[a], perm[b]) == rebuilt.order.leq(a, b)));
    round.expect(same_order, ["≤′"], || "order differs".into());
    report.push(round);
    Ok(report)
}

/// Relations over a schema as a valuation algebra: `Φ_A` holds every subset
/// of the tuple space (the empty one included, so `⋈` is total), `≤` is `⊇`
/// within a domain, `⊗` is natural join, `↓` is projection, `e_A` is `Φ_A`.
pub fn relational_ova(schema: &AttributeSchema) -> Result<ValuationAlgebra> {
    let attrs = schema.attrs();
    let domains = JoinSemilattice::powerset(&attrs)?;
    let nd = domains.len();
    let spaces: Vec<Vec<Vec<String>>> = (0..nd)
        .map(|m| {
            let names: Vec<&str> = (0..attrs.len())
                .filter(|b| m >> b & 1 == 1)
                .map(|b| attrs[b])
                .collect();
            Ok(tuple_space(&schema.restrict(&names)?))
        })
        .collect::<Result<_>>()?;
    if spaces.iter().any(|s| s.len() >= 16) {
        return Err(crate::Error::Resource {
            size: usize::MAX,
            cap: crate::limits::max_carrier(),
        });
    }
    let sizes: Vec<usize> = spaces.iter().map(|s| 1usize << s.len()).collect();
    let offsets: Vec<usize> = sizes
        .iter()
        .scan(0, |acc, &s| Some(std::mem::replace(acc, *acc + s)))
        .collect();
    let n: usize = sizes.iter().sum();
    ensure_within_cap(n)?;
    // restrict[b][a][t]: position in Φ_a of tuple t of Φ_b restricted, for a ⊆ b
    let restrict = |a: usize, b: usize| -> Vec<usize> {
        let keep: Vec<usize> = (0..attrs.len())
            .filter(|bit| b >> bit & 1 == 1)
            .enumerate()
            .filter(|(_, bit)| a >> bit & 1 == 1)
            .map(|(col, _)| col)
            .collect();
        spaces[b]
            .iter()
            .map(|t| {
                let r: Vec<String> = keep.iter().map(|&c| t[c].clone()).collect();
                spaces[a]
                    .iter()
                    .position(|u| *u == r)
                    .expect("restriction lies in the smaller space")
            })
            .collect()
    };
    let decode = |phi: usize| -> (usize, u64) {
        let dom = (0..nd)
            .rev()
            .find(|&x| offsets[x] <= phi)
            .expect("offsets start at 0");
        (dom, (phi - offsets[dom]) as u64)
    };
    let encode = |dom: usize, mask: u64| offsets[dom] + mask as usize;

    let labels: Vec<String> = (0..n)
        .map(|phi| {
            let (dom, mask) = decode(phi);
            let s = Subset::from_mask(mask);
            let items: Vec<String> = s
                .iter()
                .map(|t| format!("({})", spaces[dom][t].join(", ")))
                .collect();
            let set = if items.is_empty() {
                "∅".to_string()
            } else {
                format!("{{{}}}", items.join(", "))
            };
            format!("{}: {set}", domains.label(dom))
        })
        .collect();
    let order = Preorder::from_fn(labels, |a, b| {
        let ((da, ma), (db, mb)) = (decode(a), decode(b));
        da == db && ma & mb == mb
    })?;
    let mut restricts: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (a, b) in domains.order().pairs() {
        restricts.insert((a, b), restrict(a, b));
    }
    let mut combine = Vec::with_capacity(n * n);
    for p in 0..n {
        for q in 0..n {
            let ((da, ma), (db, mb)) = (decode(p), decode(q));
            let c = domains.join(da, db);
            let (ra, rb) = (&restricts[&(da, c)], &restricts[&(db, c)]);
            let mask = (0..spaces[c].len())
                .filter(|&t| ma >> ra[t] & 1 == 1 && mb >> rb[t] & 1 == 1)
                .fold(0u64, |m, t| m | 1 << t);
            combine.push(encode(c, mask));
        }
    }
    let label: Vec<usize> = (0..n).map(|phi| decode(phi).0).collect();
    let mut focus = vec![None; n * nd];
    for phi in 0..n {
        let (db, mb) = decode(phi);
        for x in (0..nd).filter(|&x| domains.leq(x, db)) {
            let r = &restricts[&(x, db)];
            let mask = (0..spaces[db].len())
                .filter(|&t| mb >> t & 1 == 1)
                .fold(0u64, |m, t| m | 1 << r[t]);
            focus[phi * nd + x] = Some(encode(x, mask));
        }
    }
    let identity = (0..nd).map(|x| encode(x, sizes[x] as u64 - 1)).collect();
    ValuationAlgebra::new(order, domains, combine, label, focus, identity)
}

/// Counts saturating at 2 on a single non-trivial domain: `⊗` adds, `≤`
/// compares counts. Satisfies the defining conditions but is not regular.
pub fn saturating_count_ova() -> Result<ValuationAlgebra> {
    let domains =
        JoinSemilattice::from_order(Preorder::new(["⊥", "⊤"], [(0, 0), (1, 1), (0, 1)])?)?;
    // 0 = e_⊥; 1, 2, 3 = counts 0, 1, 2 on ⊤
    let order = Preorder::new(
        ["e⊥", "0", "1", "2"],
        [(0, 0), (1, 1), (2, 2), (3, 3), (1, 2), (2, 3), (1, 3)],
    )?;
    let count = |v: usize| v.saturating_sub(1);
    let combine = (0..4)
        .flat_map(|a| (0..4).map(move |b| (a, b)))
        .map(|(a, b)| match (a, b) {
            (0, 0) => 0,
            (0, x) | (x, 0) => x,
            (a, b) => 1 + (count(a) + count(b)).min(2),
        })
        .collect();
    let label = vec![0, 1, 1, 1];
    let focus = (0..4)
        .flat_map(|phi| (0..2).map(move |x| (phi, x)))
        .map(|(phi, x)| match (phi, x) {
            (_, 0) => Some(0),
            (0, 1) => None,
            (phi, _) => Some(phi),
        })
        .collect();
    ValuationAlgebra::new(order, domains, combine, label, focus, vec![0, 1])
}

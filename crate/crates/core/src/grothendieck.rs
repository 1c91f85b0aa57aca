//! The Grothendieck completion of a family of OPCMs indexed by a preorder,
//! and its global combination `⊞` when the index is a join-semilattice.

use std::sync::Arc;

use crate::error::{precondition, structural, Result};
use crate::limits::ensure_within_cap;
use crate::morphisms::{check_hom, same_opcm, synthesize_upper, Hom};
use crate::opcm::FiniteOpcm;
use crate::order::Preorder;
use crate::report::{LawCheck, LawReport};

/// A finite bounded join-semilattice with its join stored as a table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JoinSemilattice {
    order: Preorder,
    bottom: usize,
    join: Vec<usize>,
}

impl JoinSemilattice {
    /// Validates that `order` is a partial order with a least element and
    /// that `join[i * n + j]` is the least upper bound of `i` and `j`.
    pub fn new(order: Preorder, join: Vec<usize>) -> Result<Self> {
        let n = order.len();
        if join.len() != n * n || join.iter().any(|&k| k >= n) {
            return Err(structural(
                "join table must be n × n with entries in the carrier",
            ));
        }
        if !order.is_antisymmetric() {
            return Err(precondition(
                "the index of a semilattice must be a partial order",
            ));
        }
        let all: Vec<usize> = (0..n).collect();
        let bottom = order
            .minimum(&all)
            .ok_or_else(|| precondition("the index has no least element"))?;
        for i in 0..n {
            for j in 0..n {
                let k = join[i * n + j];
                let upper: Vec<usize> = all
                    .iter()
                    .copied()
                    .filter(|&u| order.leq(i, u) && order.leq(j, u))
                    .collect();
                if !upper.contains(&k) || !upper.iter().all(|&u| order.leq(k, u)) {
                    return Err(precondition(format!(
                        "{} is not the least upper bound of {} and {}",
                        order.label(k),
                        order.label(i),
                        order.label(j)
                    )));
                }
            }
        }
        Ok(JoinSemilattice {
            order,
            bottom,
            join,
        })
    }

    /// Computes joins from the order, failing if some pair has none.
    pub fn from_order(order: Preorder) -> Result<Self> {
        let n = order.len();
        let mut join = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let upper: Vec<usize> = (0..n)
                    .filter(|&u| order.leq(i, u) && order.leq(j, u))
                    .collect();
                let k = order.minimum(&upper).ok_or_else(|| {
                    precondition(format!(
                        "{} and {} have no join",
                        order.label(i),
                        order.label(j)
                    ))
                })?;
                join.push(k);
            }
        }
        JoinSemilattice::new(order, join)
    }

    /// `(ℙ(atoms), ⊆, ∅, ∪)`; the subset with bitmask `m` has index `m`.
    pub fn powerset<L: AsRef<str>>(atoms: &[L]) -> Result<Self> {
        let k = atoms.len();
        if k >= 16 {
            return Err(structural("too many atoms for a powerset index"));
        }
        let n = 1usize << k;
        ensure_within_cap(n)?;
        let labels: Vec<String> = (0..n)
            .map(|m| {
                if m == 0 {
                    "∅".to_string()
                } else {
                    let names: Vec<&str> = (0..k)
                        .filter(|b| m >> b & 1 == 1)
                        .map(|b| atoms[b].as_ref())
                        .collect();
                    format!("{{{}}}", names.join(", "))
                }
            })
            .collect();
        let order = Preorder::from_fn(labels, |a, b| a & b == a)?;
        let join = (0..n).flat_map(|a| (0..n).map(move |b| a | b)).collect();
        Ok(JoinSemilattice {
            order,
            bottom: 0,
            join,
        })
    }

    pub fn order(&self) -> &Preorder {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.order.leq(i, j)
    }

    pub fn join(&self, i: usize, j: usize) -> usize {
        self.join[i * self.len() + j]
    }

    /// The greatest lower bound, if it exists.
    pub fn meet(&self, i: usize, j: usize) -> Option<usize> {
        let lower: Vec<usize> = (0..self.len())
            .filter(|&l| self.leq(l, i) && self.leq(l, j))
            .collect();
        self.order.maximum(&lower)
    }

    pub fn label(&self, i: usize) -> &str {
        self.order.label(i)
    }
}

/// A point `(i, x)` of the completion: an index and an element of its fiber.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GrothElem {
    pub index: usize,
    pub elem: usize,
}

impl GrothElem {
    pub fn new(index: usize, elem: usize) -> Self {
        GrothElem { index, elem }
    }
}

/// One OPCM per index and a transition homomorphism for every `i ≤ j`.
#[derive(Debug, Clone)]
pub struct IndexedFamily {
    index: Preorder,
    lattice: Option<JoinSemilattice>,
    fibers: Vec<Arc<FiniteOpcm>>,
    transitions: Vec<Option<Hom>>,
}

impl IndexedFamily {
    /// A family over a join-semilattice, the setting in which `⊞` exists.
    pub fn new(
        lattice: JoinSemilattice,
        fibers: Vec<Arc<FiniteOpcm>>,
        transitions: impl IntoIterator<Item = (usize, usize, Hom)>,
    ) -> Result<Self> {
        let index = lattice.order.clone();
        Self::build(index, Some(lattice), fibers, transitions)
    }

    /// A family over an arbitrary preorder. Its completion is a preorder but
    /// carries no `⊞`.
    pub fn over_preorder(
        index: Preorder,
        fibers: Vec<Arc<FiniteOpcm>>,
        transitions: impl IntoIterator<Item = (usize, usize, Hom)>,
    ) -> Result<Self> {
        Self::build(index, None, fibers, transitions)
    }

    fn build(
        index: Preorder,
        lattice: Option<JoinSemilattice>,
        fibers: Vec<Arc<FiniteOpcm>>,
        transitions: impl IntoIterator<Item = (usize, usize, Hom)>,
    ) -> Result<Self> {
        let n = index.len();
        if fibers.len() != n {
            return Err(structural(format!(
                "{} fibers for {n} indices",
                fibers.len()
            )));
        }
        let mut table: Vec<Option<Hom>> = vec![None; n * n];
        for (i, j, h) in transitions {
            if i >= n || j >= n {
                return Err(structural("transition between unknown indices"));
            }
            if !index.leq(i, j) {
                return Err(structural(format!(
                    "transition from {} to {} but {} ≰ {}",
                    index.label(i),
                    index.label(j),
                    index.label(i),
                    index.label(j)
                )));
            }
            if !same_opcm(&h.source_arc(), &fibers[i]) || !same_opcm(&h.target_arc(), &fibers[j]) {
                return Err(structural(format!(
                    "transition {} → {} does not connect the two fibers",
                    index.label(i),
                    index.label(j)
                )));
            }
            table[i * n + j] = Some(h);
        }
        if let Some((i, j)) = index.pairs().find(|&(i, j)| table[i * n + j].is_none()) {
            return Err(structural(format!(
                "missing transition from {} to {}",
                index.label(i),
                index.label(j)
            )));
        }
        Ok(IndexedFamily {
            index,
            lattice,
            fibers,
            transitions: table,
        })
    }

    /// A copy with one transition replaced.
    pub fn with_transition(&self, i: usize, j: usize, h: Hom) -> Result<Self> {
        let mut all: Vec<(usize, usize, Hom)> = self
            .index
            .pairs()
            .filter(|&p| p != (i, j))
            .map(|(a, b)| (a, b, self.transition(a, b).clone()))
            .collect();
        all.push((i, j, h));
        Self::build(
            self.index.clone(),
            self.lattice.clone(),
            self.fibers.clone(),
            all,
        )
    }

    pub fn index(&self) -> &Preorder {
        &self.index
    }

    pub fn lattice(&self) -> Option<&JoinSemilattice> {
        self.lattice.as_ref()
    }

    pub fn fiber(&self, i: usize) -> &FiniteOpcm {
        &self.fibers[i]
    }

    pub fn fiber_arc(&self, i: usize) -> Arc<FiniteOpcm> {
        self.fibers[i].clone()
    }

    /// The transition for `i ≤ j`. Panics otherwise.
    pub fn transition(&self, i: usize, j: usize) -> &Hom {
        self.transitions[i * self.index.len() + j]
            .as_ref()
            .expect("transitions exist exactly for comparable indices")
    }

    /// `Pⁱⱼ(x)`.
    pub fn push(&self, i: usize, j: usize, x: usize) -> usize {
        self.transition(i, j).apply(x)
    }

    /// All points of the completion, index by index.
    pub fn elements(&self) -> Vec<GrothElem> {
        (0..self.index.len())
            .flat_map(|i| self.fibers[i].elements().map(move |x| GrothElem::new(i, x)))
            .collect()
    }

    pub fn completion_size(&self) -> usize {
        self.fibers.iter().map(|f| f.len()).sum()
    }

    /// Position of a point in [`IndexedFamily::elements`].
    pub fn position(&self, e: GrothElem) -> usize {
        self.fibers[..e.index]
            .iter()
            .map(|f| f.len())
            .sum::<usize>()
            + e.elem
    }

    pub fn label(&self, e: GrothElem) -> String {
        format!(
            "({}, {})",
            self.index.label(e.index),
            self.fibers[e.index].label(e.elem)
        )
    }
}

/// `(i, x) ⪯ (j, y)` iff `i ≤ j` and `Pⁱⱼ(x) ⪯ y`.
pub fn completion_leq(f: &IndexedFamily, a: GrothElem, b: GrothElem) -> bool {
    f.index.leq(a.index, b.index) && f.fibers[b.index].leq(f.push(a.index, b.index, a.elem), b.elem)
}

/// The cocartesian lift `(j, Pⁱⱼ(x))` of `(i, x)` along `i ≤ j`.
pub fn cocartesian_lift(f: &IndexedFamily, a: GrothElem, j: usize) -> Result<GrothElem> {
    if !f.index.leq(a.index, j) {
        return Err(precondition("a lift needs a larger index"));
    }
    Ok(GrothElem::new(j, f.push(a.index, j, a.elem)))
}

/// Identity and composition laws on the nose, and HOM1–3 for every transition.
pub fn check_functor(f: &IndexedFamily) -> Result<LawReport> {
    let idx = &f.index;
    let mut report = LawReport::new(format!("indexed family over {} indices", idx.len()));

    let mut homs = LawCheck::new("transitions are homomorphisms");
    for (i, j) in idx.pairs() {
        for c in check_hom(f.transition(i, j))?.checks {
            homs.checked += c.checked;
            for w in c.witnesses {
                let mut elements = vec![idx.label(i).to_string(), idx.label(j).to_string()];
                elements.extend(w.elements);
                homs.fail(elements, format!("{}: {}", c.law, w.detail));
            }
        }
    }
    report.push(homs);

    let mut identity = LawCheck::new("identity transitions");
    for i in 0..idx.len() {
        let fiber = f.fiber(i);
        for x in fiber.elements() {
            let y = f.push(i, i, x);
            identity.expect(y == x, [idx.label(i), fiber.label(x)], || {
                let how = if fiber.equiv(x, y) {
                    " (only up to ≅: a pseudo-functor, which is not supported)"
                } else {
                    ""
                };
                format!("Pⁱᵢ(x) = {}{how}", fiber.label(y))
            });
        }
    }
    report.push(identity);

    let mut compose = LawCheck::new("composition of transitions");
    for (i, j) in idx.pairs() {
        for k in (0..idx.len()).filter(|&k| idx.leq(j, k)) {
            let target = f.fiber(k);
            for x in f.fiber(i).elements() {
                let two = f.push(j, k, f.push(i, j, x));
                let one = f.push(i, k, x);
                compose.expect(
                    two == one,
                    [
                        idx.label(i),
                        idx.label(j),
                        idx.label(k),
                        f.fiber(i).label(x),
                    ],
                    || {
                        let how = if target.equiv(one, two) {
                            " (equal only up to ≅: a pseudo-functor, which is not supported)"
                        } else {
                            ""
                        };
                        format!(
                            "Pʲₖ Pⁱⱼ x = {} but Pⁱₖ x = {}{how}",
                            target.label(two),
                            target.label(one)
                        )
                    },
                );
            }
        }
    }
    report.push(compose);
    Ok(report)
}

fn require_functor(f: &IndexedFamily) -> Result<()> {
    let report = check_functor(f)?;
    let first = report.witnesses().next().map(|(law, w)| {
        precondition(format!(
            "family is not a strict functor: {law} fails at ({}): {}",
            w.elements.join(", "),
            w.detail
        ))
    });
    first.map_or(Ok(()), Err)
}

/// Exhaustive checks of the completion's order-theoretic properties: it is a
/// preorder; a poset when the index and all fibers are; the projection is
/// monotone; it is an opfibration; and, when every transition has an upper
/// adjoint, a fibration as well.
pub fn check_completion_props(f: &IndexedFamily) -> Result<LawReport> {
    require_functor(f)?;
    let elems = f.elements();
    ensure_within_cap(elems.len())?;
    let idx = &f.index;
    let leq = |a: GrothElem, b: GrothElem| completion_leq(f, a, b);
    let l = |a: GrothElem| f.label(a);
    let mut report = LawReport::new(format!("completion with {} points", elems.len()));

    let mut pre = LawCheck::new("completion is a preorder");
    for &a in &elems {
        pre.expect(leq(a, a), [l(a)], || "not reflexive".into());
        for &b in elems.iter().filter(|&&b| leq(a, b)) {
            for &c in elems.iter().filter(|&&c| leq(b, c)) {
                pre.expect(leq(a, c), [l(a), l(b), l(c)], || "not transitive".into());
            }
        }
    }
    report.push(pre);

    let posets =
        idx.is_antisymmetric() && (0..idx.len()).all(|i| f.fiber(i).order().is_antisymmetric());
    if posets {
        let mut anti = LawCheck::new("completion is a poset");
        for &a in &elems {
            for &b in &elems {
                if a != b && leq(a, b) {
                    anti.expect(!leq(b, a), [l(a), l(b)], || {
                        "distinct points are equivalent".into()
                    });
                }
            }
        }
        report.push(anti);
    } else {
        report.push(LawCheck::unmet(
            "completion is a poset",
            "the index or some fiber is not antisymmetric",
        ));
    }

    let mut proj = LawCheck::new("projection is monotone");
    for &a in &elems {
        for &b in elems.iter().filter(|&&b| leq(a, b)) {
            proj.expect(idx.leq(a.index, b.index), [l(a), l(b)], || {
                "index order not preserved".into()
            });
        }
    }
    report.push(proj);

    let mut opfib = LawCheck::new("opfibration");
    for &a in &elems {
        for j in (0..idx.len()).filter(|&j| idx.leq(a.index, j)) {
            let lift = cocartesian_lift(f, a, j)?;
            opfib.expect(leq(a, lift), [l(a), idx.label(j).to_string()], || {
                "lift is not above the point".into()
            });
            for &z in elems.iter().filter(|&&z| idx.leq(j, z.index) && leq(a, z)) {
                opfib.expect(leq(lift, z), [l(a), l(z)], || {
                    format!("lift {} is not below {}", l(lift), l(z))
                });
            }
        }
    }
    report.push(opfib);

    let mut uppers = vec![None; idx.len() * idx.len()];
    let mut missing = None;
    for (i, j) in idx.pairs() {
        match synthesize_upper(f.transition(i, j)) {
            Ok(u) => uppers[i * idx.len() + j] = Some(u),
            Err(_) => {
                missing.get_or_insert((i, j));
            }
        }
    }
    if let Some((i, j)) = missing {
        report.push(LawCheck::unmet(
            "dual opfibration",
            format!(
                "transition {} → {} has no upper adjoint",
                idx.label(i),
                idx.label(j)
            ),
        ));
    } else {
        let mut fib = LawCheck::new("dual opfibration");
        for &b in &elems {
            for i in (0..idx.len()).filter(|&i| idx.leq(i, b.index)) {
                let upper = uppers[i * idx.len() + b.index]
                    .as_ref()
                    .expect("synthesized above");
                let lift = GrothElem::new(i, upper[b.elem]);
                fib.expect(leq(lift, b), [l(b), idx.label(i).to_string()], || {
                    "lift is not below the point".into()
                });
                for &z in elems.iter().filter(|&&z| idx.leq(z.index, i) && leq(z, b)) {
                    fib.expect(leq(z, lift), [l(b), l(z)], || {
                        format!("{} is not below lift {}", l(z), l(lift))
                    });
                }
            }
        }
        report.push(fib);
    }
    Ok(report)
}

/// `(i, x) ⊞ (j, y) = (i ∨ j, Pⁱ_{i∨j} x ⊕ Pʲ_{i∨j} y)`, or `None` when the
/// fiber combination is undefined.
pub fn boxplus(f: &IndexedFamily, a: GrothElem, b: GrothElem) -> Result<Option<GrothElem>> {
    let lat = f
        .lattice
        .as_ref()
        .ok_or_else(|| precondition("⊞ needs an index with joins"))?;
    let k = lat.join(a.index, b.index);
    let x = f.push(a.index, k, a.elem);
    let y = f.push(b.index, k, b.elem);
    Ok(f.fiber(k).combine(x, y).map(|z| GrothElem::new(k, z)))
}

/// The completion as an OPCM under `⊞`, with zero `(⊥, 0)`. Points are
/// numbered as in [`IndexedFamily::elements`].
pub fn groth_opcm(f: &IndexedFamily) -> Result<FiniteOpcm> {
    let lat = f
        .lattice
        .as_ref()
        .ok_or_else(|| precondition("the completion is an OPCM only over a join-semilattice"))?;
    let elems = f.elements();
    ensure_within_cap(elems.len())?;
    require_functor(f)?;
    let labels: Vec<String> = elems.iter().map(|&e| f.label(e)).collect();
    let order = Preorder::from_fn(labels, |a, b| completion_leq(f, elems[a], elems[b]))?;
    let bottom = lat.bottom();
    let zero = f.position(GrothElem::new(bottom, f.fiber(bottom).zero()));
    let mut table = Vec::new();
    for (pa, &a) in elems.iter().enumerate() {
        for (pb, &b) in elems.iter().enumerate() {
            if let Some(c) = boxplus(f, a, b)? {
                table.push((pa, pb, f.position(c)));
            }
        }
    }
    FiniteOpcm::new(order, zero, table)
}

/// The two steps behind monotonicity of `⊞`: for `(i, x) ⪯ (i′, x′)` and
/// `(j, y)`, with `k = i ∨ j` and `k′ = i′ ∨ j`,
/// `Pᵏ_{k′}(Pⁱₖ x ⊕ Pʲₖ y) ≅ Pⁱ_{k′} x ⊕ Pʲ_{k′} y ⪯ Pⁱ′_{k′} x′ ⊕ Pʲ_{k′} y`.
/// Also checks that the projection sends `⊞` to `∨`.
pub fn check_boxplus_chain(f: &IndexedFamily) -> Result<LawReport> {
    let lat = f
        .lattice
        .as_ref()
        .ok_or_else(|| precondition("⊞ needs an index with joins"))?;
    let elems = f.elements();
    ensure_within_cap(elems.len())?;
    let l = |a: GrothElem| f.label(a);
    let mut report = LawReport::new("monotonicity of ⊞");
    let mut transport = LawCheck::new("transport to the larger join");
    let mut compare = LawCheck::new("comparison at the larger join");
    let mut proj = LawCheck::new("projection of ⊞ is ∨");
    for &a in &elems {
        for &b in &elems {
            if let Some(c) = boxplus(f, a, b)? {
                proj.expect(c.index == lat.join(a.index, b.index), [l(a), l(b)], || {
                    "index is not the join".into()
                });
            }
        }
    }
    for &a in &elems {
        for &ap in elems.iter().filter(|&&ap| completion_leq(f, a, ap)) {
            for &b in &elems {
                let (k, kp) = (lat.join(a.index, b.index), lat.join(ap.index, b.index));
                let fk = f.fiber(kp);
                let Some(small) = boxplus(f, a, b)? else {
                    continue;
                };
                let moved = f.push(k, kp, small.elem);
                let direct = fk.combine(f.push(a.index, kp, a.elem), f.push(b.index, kp, b.elem));
                transport.case();
                match direct {
                    Some(d) if fk.equiv(d, moved) => {}
                    _ => transport.fail([l(a), l(b), l(ap)], "transported combination differs"),
                }
                let Some(big) = boxplus(f, ap, b)? else {
                    continue;
                };
                if let Some(d) = direct {
                    compare.expect(fk.leq(d, big.elem), [l(a), l(ap), l(b)], || {
                        format!("{} ⋠ {}", fk.label(d), fk.label(big.elem))
                    });
                }
            }
        }
    }
    report.push(transport);
    report.push(compare);
    report.push(proj);
    Ok(report)
}

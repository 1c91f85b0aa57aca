//! Ordered partial commutative monoids over explicit finite tables.
//!
//! Partiality is table absence: `combine(x, y) == None` means `x ⊕ y` is
//! undefined. Every law is checked up to information equivalence `≅`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{precondition, structural, Error, Result};
use crate::limits::ensure_within_cap;
use crate::morphisms::{check_hom, Hom};
use crate::order::{quotient, InfoClass, Preorder};
use crate::report::{LawCheck, LawReport};

/// A finite OPCM `(M, ⪯, ⊕, 0)` given by tables.
///
/// Construction only validates structure. Whether the tables satisfy the
/// OPCM axioms is decided by [`check_opcm_laws`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteOpcm {
    order: Preorder,
    zero: usize,
    table: Vec<Option<usize>>,
}

impl FiniteOpcm {
    /// Builds an OPCM from `(x, y, x ⊕ y)` triples; absent pairs are undefined.
    pub fn new(
        order: Preorder,
        zero: usize,
        entries: impl IntoIterator<Item = (usize, usize, usize)>,
    ) -> Result<Self> {
        let n = order.len();
        if zero >= n {
            return Err(structural(format!(
                "zero index {zero} outside the {n}-element carrier"
            )));
        }
        let mut table = vec![None; n * n];
        for (x, y, z) in entries {
            if x >= n || y >= n || z >= n {
                return Err(structural(format!(
                    "combine entry ({x}, {y}) ↦ {z} leaves the carrier"
                )));
            }
            match table[x * n + y] {
                Some(prev) if prev != z => {
                    return Err(structural(format!(
                        "combine entry ({}, {}) given twice with different results",
                        order.label(x),
                        order.label(y)
                    )))
                }
                _ => table[x * n + y] = Some(z),
            }
        }
        Ok(FiniteOpcm { order, zero, table })
    }

    /// Builds an OPCM from a partial combine function.
    pub fn from_fn(
        order: Preorder,
        zero: usize,
        combine: impl Fn(usize, usize) -> Option<usize>,
    ) -> Result<Self> {
        let n = order.len();
        let entries: Vec<_> = (0..n)
            .flat_map(|x| (0..n).map(move |y| (x, y)))
            .filter_map(|(x, y)| combine(x, y).map(|z| (x, y, z)))
            .collect();
        Self::new(order, zero, entries)
    }

    pub fn order(&self) -> &Preorder {
        &self.order
    }

    pub fn zero(&self) -> usize {
        self.zero
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn label(&self, x: usize) -> &str {
        self.order.label(x)
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.order.index_of(label)
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.order.leq(x, y)
    }

    pub fn equiv(&self, x: usize, y: usize) -> bool {
        self.order.equiv(x, y)
    }

    /// `x ⊕ y`, or `None` when undefined.
    pub fn combine(&self, x: usize, y: usize) -> Option<usize> {
        let n = self.len();
        assert!(x < n && y < n, "element index out of range");
        self.table[x * n + y]
    }

    /// The definedness judgment `x ⊥ y`.
    pub fn defined(&self, x: usize, y: usize) -> bool {
        self.combine(x, y).is_some()
    }

    pub fn is_total(&self) -> bool {
        self.table.iter().all(Option::is_some)
    }

    /// A copy with one combine-table entry replaced (or deleted with `None`).
    pub fn with_entry(&self, x: usize, y: usize, result: Option<usize>) -> Result<Self> {
        let n = self.len();
        if x >= n || y >= n || result.is_some_and(|z| z >= n) {
            return Err(structural("mutated entry leaves the carrier"));
        }
        let mut out = self.clone();
        out.table[x * n + y] = result;
        Ok(out)
    }

    /// A copy with the same tables and a different order.
    pub fn with_order(&self, order: Preorder) -> Result<Self> {
        if order.labels() != self.order.labels() {
            return Err(structural("replacement order must have the same carrier"));
        }
        Ok(FiniteOpcm {
            order,
            ..self.clone()
        })
    }

    /// Elements in index order.
    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.len()
    }

    /// The canonical textual dump: elements sorted by label, then the zero,
    /// every order pair and every defined combine triple, each sorted.
    pub fn dump(&self) -> String {
        let mut by_label: Vec<usize> = self.elements().collect();
        by_label.sort_by(|&a, &b| self.label(a).cmp(self.label(b)));
        let mut out =
            String::from("# opcm dump: element, zero, leq and combine lines, tab separated\n");
        for &x in &by_label {
            let _ = writeln!(out, "element\t{}", self.label(x));
        }
        let _ = writeln!(out, "zero\t{}", self.label(self.zero));
        for &x in &by_label {
            for &y in &by_label {
                if self.leq(x, y) {
                    let _ = writeln!(out, "leq\t{}\t{}", self.label(x), self.label(y));
                }
            }
        }
        for &x in &by_label {
            for &y in &by_label {
                if let Some(z) = self.combine(x, y) {
                    let _ = writeln!(
                        out,
                        "combine\t{}\t{}\t{}",
                        self.label(x),
                        self.label(y),
                        self.label(z)
                    );
                }
            }
        }
        out
    }

    /// Parses the format written by [`FiniteOpcm::dump`]. The order must be
    /// listed in full; it is validated, never closed.
    pub fn parse_dump(text: &str) -> Result<Self> {
        let mut labels: Vec<String> = Vec::new();
        let mut zero = None;
        let mut leq = Vec::new();
        let mut combine = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let bad = || structural(format!("dump line {}: cannot parse {line:?}", lineno + 1));
            match fields.as_slice() {
                ["element", l] => labels.push((*l).to_string()),
                ["zero", l] => zero = Some((*l).to_string()),
                ["leq", x, y] => leq.push((x.to_string(), y.to_string())),
                ["combine", x, y, z] => combine.push((x.to_string(), y.to_string(), z.to_string())),
                _ => return Err(bad()),
            }
        }
        let index: BTreeMap<&str, usize> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i))
            .collect();
        let find = |l: &str| {
            index
                .get(l)
                .copied()
                .ok_or_else(|| structural(format!("dump references undeclared element {l:?}")))
        };
        let mut pairs = Vec::new();
        for (x, y) in &leq {
            pairs.push((find(x)?, find(y)?));
        }
        let mut triples = Vec::new();
        for (x, y, z) in &combine {
            triples.push((find(x)?, find(y)?, find(z)?));
        }
        let zero = find(&zero.ok_or_else(|| structural("dump has no zero line"))?)?;
        let order = Preorder::new(labels.clone(), pairs)?;
        FiniteOpcm::new(order, zero, triples)
    }
}

/// Options for [`check_opcm_laws_with`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LawOptions {
    /// Check OPCM3 only in the direction it is stated: from `y ⊥ z` and
    /// `x ⊥ (y ⊕ z)`. By default the converse propagation is checked as well.
    pub strict_def3: bool,
}

/// Exhaustively checks OPCM1–4, reporting every violation.
pub fn check_opcm_laws(m: &FiniteOpcm) -> Result<LawReport> {
    check_opcm_laws_with(m, LawOptions::default())
}

pub fn check_opcm_laws_with(m: &FiniteOpcm, opts: LawOptions) -> Result<LawReport> {
    ensure_within_cap(m.len())?;
    let n = m.len();
    let l = |x: usize| m.label(x).to_string();
    let mut report = LawReport::new(format!("OPCM laws on {n} elements"));

    let mut identity = LawCheck::new("OPCM1 identity");
    for x in 0..n {
        identity.case();
        match m.combine(m.zero(), x) {
            None => identity.fail([l(m.zero()), l(x)], "0 ⊕ x undefined"),
            Some(z) if !m.equiv(z, x) => {
                identity.fail([l(x), l(z)], format!("0 ⊕ {} = {} ≇ {}", l(x), l(z), l(x)))
            }
            Some(z) if z != x => identity.equiv_only(),
            _ => {}
        }
    }
    report.push(identity);

    let mut commutative = LawCheck::new("OPCM2 commutativity");
    for x in 0..n {
        for y in 0..n {
            let Some(xy) = m.combine(x, y) else { continue };
            commutative.case();
            match m.combine(y, x) {
                None => commutative.fail([l(x), l(y)], "x ⊥ y but not y ⊥ x"),
                Some(yx) if !m.equiv(xy, yx) => commutative.fail(
                    [l(x), l(y)],
                    format!("x ⊕ y = {} ≇ {} = y ⊕ x", l(xy), l(yx)),
                ),
                Some(yx) if yx != xy => commutative.equiv_only(),
                _ => {}
            }
        }
    }
    report.push(commutative);

    let mut assoc = LawCheck::new("OPCM3 associativity");
    let mut converse = LawCheck::new("OPCM3 converse");
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                // stated direction: y ⊥ z and x ⊥ (y ⊕ z)
                if let Some(yz) = m.combine(y, z) {
                    if let Some(x_yz) = m.combine(x, yz) {
                        assoc.case();
                        match m.combine(x, y).map(|xy| (xy, m.combine(xy, z))) {
                            None => assoc.fail(
                                [l(x), l(y), l(z)],
                                "x ⊕ (y ⊕ z) defined but x ⊕ y undefined",
                            ),
                            Some((_, None)) => assoc.fail(
                                [l(x), l(y), l(z)],
                                "x ⊕ (y ⊕ z) defined but (x ⊕ y) ⊕ z undefined",
                            ),
                            Some((_, Some(xy_z))) if !m.equiv(x_yz, xy_z) => assoc.fail(
                                [l(x), l(y), l(z)],
                                format!("x ⊕ (y ⊕ z) = {} ≇ {} = (x ⊕ y) ⊕ z", l(x_yz), l(xy_z)),
                            ),
                            Some((_, Some(xy_z))) if xy_z != x_yz => assoc.equiv_only(),
                            _ => {}
                        }
                    }
                }
                if opts.strict_def3 {
                    continue;
                }
                // converse direction: x ⊥ y and (x ⊕ y) ⊥ z
                if let Some(xy) = m.combine(x, y) {
                    if let Some(xy_z) = m.combine(xy, z) {
                        converse.case();
                        let rhs = m.combine(y, z).and_then(|yz| m.combine(x, yz));
                        match rhs {
                            None => converse.fail(
                                [l(x), l(y), l(z)],
                                "(x ⊕ y) ⊕ z defined but x ⊕ (y ⊕ z) undefined",
                            ),
                            Some(x_yz) if !m.equiv(x_yz, xy_z) => converse.fail(
                                [l(x), l(y), l(z)],
                                format!("(x ⊕ y) ⊕ z = {} ≇ {} = x ⊕ (y ⊕ z)", l(xy_z), l(x_yz)),
                            ),
                            Some(x_yz) if x_yz != xy_z => converse.equiv_only(),
                            _ => {}
                        }
                    }
                }
            }
        }
    }
    report.push(assoc);
    if !opts.strict_def3 {
        report.push(converse);
    }

    let mut monotone = LawCheck::new("OPCM4 monotonicity");
    for x1 in 0..n {
        for x2 in 0..n {
            if !m.leq(x1, x2) {
                continue;
            }
            for y in 0..n {
                if let (Some(a), Some(b)) = (m.combine(x1, y), m.combine(x2, y)) {
                    monotone.expect(m.leq(a, b), [l(x1), l(x2), l(y)], || {
                        format!("x1 ⪯ x2 but x1 ⊕ y = {} ⋠ {} = x2 ⊕ y", l(a), l(b))
                    });
                }
            }
        }
    }
    report.push(monotone);
    Ok(report)
}

/// The algebraic ordering `x ⊑ y ⇔ ∃z. x ⊕ z ≅ y`.
pub fn algebraic_leq(m: &FiniteOpcm, x: usize, y: usize) -> bool {
    m.elements()
        .any(|z| m.combine(x, z).is_some_and(|xz| m.equiv(xz, y)))
}

/// The same tables reordered by `⊑`. Fails if `⊑` is not a preorder,
/// which cannot happen for a law-abiding PCM.
pub fn algebraic_opcm(m: &FiniteOpcm) -> Result<FiniteOpcm> {
    let order = Preorder::from_fn(m.order().labels().to_vec(), |x, y| algebraic_leq(m, x, y))?;
    m.with_order(order)
}

/// How to read the definedness hypothesis of the third clause of the
/// algebraic-ordering proposition.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum AlgebraicReading {
    /// As printed: hypothesis `x ⊥ x`; the conclusion then also requires `x ⊥ y`.
    #[default]
    Literal,
    /// Hypothesis `x ⊥ y` alongside `x' ⊥ y'`.
    Pairwise,
}

pub fn check_algebraic_opcm(m: &FiniteOpcm) -> Result<LawReport> {
    check_algebraic_opcm_with(m, AlgebraicReading::default())
}

/// For a PCM (discrete order), checks that `(M, ⊑, ⊕, 0)` is an OPCM, that
/// `0 ⊑ x`, and the pairwise monotonicity clause.
pub fn check_algebraic_opcm_with(m: &FiniteOpcm, reading: AlgebraicReading) -> Result<LawReport> {
    ensure_within_cap(m.len())?;
    let n = m.len();
    if !(0..n).all(|x| (0..n).all(|y| m.leq(x, y) == (x == y))) {
        return Err(precondition(
            "algebraic ordering is checked on PCMs, i.e. with the discrete order",
        ));
    }
    let mut report = LawReport::new("PCM under its algebraic ordering");
    let alg = match algebraic_opcm(m) {
        Ok(alg) => {
            report.push(LawCheck::new("algebraic order is a preorder"));
            alg
        }
        Err(e) => {
            let mut c = LawCheck::new("algebraic order is a preorder");
            c.fail(Vec::<String>::new(), e.to_string());
            report.push(c);
            return Ok(report);
        }
    };
    let l = |x: usize| m.label(x).to_string();
    report.extend(check_opcm_laws(&alg)?);

    let mut least = LawCheck::new("zero is ⊑-least");
    for x in 0..n {
        least.expect(alg.leq(m.zero(), x), [l(x)], || format!("0 ⋢ {}", l(x)));
    }
    report.push(least);

    let mut pairwise = LawCheck::new("pairwise monotonicity");
    for x in 0..n {
        for xp in (0..n).filter(|&xp| alg.leq(x, xp)) {
            for y in 0..n {
                for yp in (0..n).filter(|&yp| alg.leq(y, yp)) {
                    let Some(rhs) = m.combine(xp, yp) else {
                        continue;
                    };
                    let hypothesis = match reading {
                        AlgebraicReading::Literal => m.defined(x, x),
                        AlgebraicReading::Pairwise => m.defined(x, y),
                    };
                    if !hypothesis {
                        continue;
                    }
                    pairwise.case();
                    match m.combine(x, y) {
                        None => pairwise.fail([l(x), l(y), l(xp), l(yp)], "x ⊕ y undefined"),
                        Some(lhs) if !alg.leq(lhs, rhs) => pairwise.fail(
                            [l(x), l(y), l(xp), l(yp)],
                            format!("x ⊕ y = {} ⋢ {} = x' ⊕ y'", l(lhs), l(rhs)),
                        ),
                        _ => {}
                    }
                }
            }
        }
    }
    report.push(pairwise);
    Ok(report)
}

/// When `0 ⪯ x` for all `x`: `x ⊑ y ⇒ x ⪯ y` and `x, y ⪯ x ⊕ y`.
pub fn check_compatibility(m: &FiniteOpcm) -> Result<LawReport> {
    ensure_within_cap(m.len())?;
    let n = m.len();
    let l = |x: usize| m.label(x).to_string();
    let mut report = LawReport::new("compatibility of algebraic and information orders");
    if let Some(x) = (0..n).find(|&x| !m.leq(m.zero(), x)) {
        let note = format!("0 ⋠ {}: zero is not the least informative element", l(x));
        report.push(LawCheck::unmet("algebraic ⊑ implies ⪯", note.clone()));
        report.push(LawCheck::unmet("combination is an upper bound", note));
        return Ok(report);
    }
    let mut alg = LawCheck::new("algebraic ⊑ implies ⪯");
    for x in 0..n {
        for y in 0..n {
            if algebraic_leq(m, x, y) {
                alg.expect(m.leq(x, y), [l(x), l(y)], || "x ⊑ y but x ⋠ y".into());
            }
        }
    }
    report.push(alg);
    let mut upper = LawCheck::new("combination is an upper bound");
    for x in 0..n {
        for y in 0..n {
            if let Some(xy) = m.combine(x, y) {
                upper.expect(m.leq(x, xy) && m.leq(y, xy), [l(x), l(y)], || {
                    format!("x ⊕ y = {} is not above both", l(xy))
                });
            }
        }
    }
    report.push(upper);
    Ok(report)
}

/// The product monoid with pointwise order and componentwise combination.
/// Element `(a, b)` has index `a * |M2| + b`.
pub fn product(m1: &FiniteOpcm, m2: &FiniteOpcm) -> Result<FiniteOpcm> {
    let (n1, n2) = (m1.len(), m2.len());
    ensure_within_cap(n1.saturating_mul(n2))?;
    let labels: Vec<String> = (0..n1)
        .flat_map(|a| (0..n2).map(move |b| format!("({}, {})", m1.label(a), m2.label(b))))
        .collect();
    let order = Preorder::from_fn(labels, |p, q| {
        m1.leq(p / n2, q / n2) && m2.leq(p % n2, q % n2)
    })?;
    FiniteOpcm::from_fn(order, m1.zero() * n2 + m2.zero(), |p, q| {
        let a = m1.combine(p / n2, q / n2)?;
        let b = m2.combine(p % n2, q % n2)?;
        Some(a * n2 + b)
    })
}

/// The projection homomorphisms out of `product(m1, m2)`.
pub fn product_projections(m1: &FiniteOpcm, m2: &FiniteOpcm) -> Result<(Hom, Hom)> {
    use std::sync::Arc;
    let p = Arc::new(product(m1, m2)?);
    let n2 = m2.len();
    let pi1 = Hom::new(
        p.clone(),
        Arc::new(m1.clone()),
        p.elements().map(|q| q / n2).collect(),
    )?;
    let pi2 = Hom::new(
        p.clone(),
        Arc::new(m2.clone()),
        p.elements().map(|q| q % n2).collect(),
    )?;
    Ok((pi1, pi2))
}

/// The pairing `⟨f1, f2⟩ : N → M1 × M2`.
pub fn pairing(f1: &Hom, f2: &Hom) -> Result<Hom> {
    use std::sync::Arc;
    if f1.source() != f2.source() {
        return Err(structural(
            "pairing needs homomorphisms with a common source",
        ));
    }
    let n2 = f2.target().len();
    let p = Arc::new(product(f1.target(), f2.target())?);
    let map = f1
        .source()
        .elements()
        .map(|x| f1.apply(x) * n2 + f2.apply(x))
        .collect();
    Hom::new(f1.source_arc(), p, map)
}

/// Checks the universal property of the product for `f1 : N → M1`,
/// `f2 : N → M2`: the pairing is a homomorphism with `πᵢ ∘ h = fᵢ`, and it is
/// the only map satisfying both projection equations.
pub fn check_product_universal(f1: &Hom, f2: &Hom) -> Result<bool> {
    for f in [f1, f2] {
        let report = check_hom(f)?;
        if !report.passed() {
            return Err(precondition("both legs must be homomorphisms"));
        }
    }
    let h = pairing(f1, f2)?;
    let (pi1, pi2) = product_projections(f1.target(), f2.target())?;
    if !check_hom(&h)?.passed() || !check_hom(&pi1)?.passed() || !check_hom(&pi2)?.passed() {
        return Ok(false);
    }
    let product = h.target();
    for x in f1.source().elements() {
        if pi1.apply(h.apply(x)) != f1.apply(x) || pi2.apply(h.apply(x)) != f2.apply(x) {
            return Ok(false);
        }
        // every product element satisfying both equations at x must be h(x)
        let candidates: Vec<usize> = product
            .elements()
            .filter(|&p| pi1.apply(p) == f1.apply(x) && pi2.apply(p) == f2.apply(x))
            .collect();
        if candidates != [h.apply(x)] {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Does `map : N → M1 × M2` satisfy `πᵢ ∘ map = fᵢ` pointwise?
pub fn satisfies_projections(map: &[usize], f1: &Hom, f2: &Hom) -> bool {
    let n2 = f2.target().len();
    map.len() == f1.source().len()
        && map
            .iter()
            .enumerate()
            .all(|(x, &p)| p / n2 == f1.apply(x) && p % n2 == f2.apply(x))
}

/// `M/≅` with `[x] ⊕ [y] = [x ⊕ y]`.
#[derive(Debug, Clone)]
pub struct QuotientOpcm {
    pub opcm: FiniteOpcm,
    pub classes: Vec<InfoClass>,
    pub projection: Vec<usize>,
}

/// Quotients an OPCM by `≅`. `[x] ⊕ [y]` is defined when some pair of
/// representatives combines; all combining representative pairs must land
/// in the same class, otherwise the input violates the axioms and a
/// precondition error lists the disagreement.
pub fn quotient_opcm(m: &FiniteOpcm) -> Result<QuotientOpcm> {
    let q = quotient(m.order());
    let k = q.classes.len();
    let mut table: Vec<Option<usize>> = vec![None; k * k];
    for x in m.elements() {
        for y in m.elements() {
            let Some(z) = m.combine(x, y) else { continue };
            let (cx, cy, cz) = (q.projection[x], q.projection[y], q.projection[z]);
            match table[cx * k + cy] {
                Some(prev) if prev != cz => {
                    return Err(Error::Precondition(format!(
                        "[{}] ⊕ [{}] is not well defined: representatives give classes {} and {}",
                        m.label(x),
                        m.label(y),
                        q.order.label(prev),
                        q.order.label(cz)
                    )))
                }
                _ => table[cx * k + cy] = Some(cz),
            }
        }
    }
    let opcm = FiniteOpcm::from_fn(q.order.clone(), q.projection[m.zero()], |a, b| {
        table[a * k + b]
    })?;
    Ok(QuotientOpcm {
        opcm,
        classes: q.classes,
        projection: q.projection,
    })
}

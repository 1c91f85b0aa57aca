//! Homomorphisms, Galois connections (changes of domain) and linking passages.

use std::fmt;
use std::sync::Arc;

use crate::error::{precondition, structural, Result};
use crate::instances::possibility_of_set;
use crate::limits::ensure_within_cap;
use crate::opcm::FiniteOpcm;
use crate::order::Subset;
use crate::report::{LawCheck, LawReport};

/// A total map between two OPCMs, intended to satisfy HOM1–3.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hom {
    source: Arc<FiniteOpcm>,
    target: Arc<FiniteOpcm>,
    map: Vec<usize>,
}

impl Hom {
    pub fn new(source: Arc<FiniteOpcm>, target: Arc<FiniteOpcm>, map: Vec<usize>) -> Result<Self> {
        if map.len() != source.len() {
            return Err(structural(format!(
                "map has {} entries for a {}-element source",
                map.len(),
                source.len()
            )));
        }
        if let Some((x, &fx)) = map.iter().enumerate().find(|(_, &fx)| fx >= target.len()) {
            return Err(structural(format!(
                "image of {} is index {fx}, outside the {}-element target",
                source.label(x),
                target.len()
            )));
        }
        Ok(Hom {
            source,
            target,
            map,
        })
    }

    pub fn identity(m: Arc<FiniteOpcm>) -> Self {
        let map = m.elements().collect();
        Hom {
            source: m.clone(),
            target: m,
            map,
        }
    }

    pub fn source(&self) -> &FiniteOpcm {
        &self.source
    }

    pub fn target(&self) -> &FiniteOpcm {
        &self.target
    }

    pub fn source_arc(&self) -> Arc<FiniteOpcm> {
        self.source.clone()
    }

    pub fn target_arc(&self) -> Arc<FiniteOpcm> {
        self.target.clone()
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &Hom) -> Result<Hom> {
        if !same_opcm(&self.target, &g.source) {
            return Err(structural(
                "composition needs the first target to be the second source",
            ));
        }
        let map = self.map.iter().map(|&y| g.map[y]).collect();
        Hom::new(self.source.clone(), g.target.clone(), map)
    }
}

pub(crate) fn same_opcm(a: &Arc<FiniteOpcm>, b: &Arc<FiniteOpcm>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// The constant map onto the target's zero.
pub fn trivial_hom(source: Arc<FiniteOpcm>, target: Arc<FiniteOpcm>) -> Hom {
    let map = vec![target.zero(); source.len()];
    Hom {
        source,
        target,
        map,
    }
}

/// Exhaustively checks HOM1 (monotone), HOM2 (`f(0) ≅ 0`) and HOM3
/// (`x ⊥ y ⇒ f(x) ⊥ f(y)` and `f(x ⊕ y) ≅ f(x) ⊕ f(y)`).
pub fn check_hom(f: &Hom) -> Result<LawReport> {
    let (m, n) = (f.source(), f.target());
    ensure_within_cap(m.len())?;
    let l = |x: usize| m.label(x).to_string();
    let mut report = LawReport::new(format!(
        "homomorphism from {} to {} elements",
        m.len(),
        n.len()
    ));

    let mut monotone = LawCheck::new("HOM1 monotone");
    for (x, y) in m.order().pairs() {
        monotone.expect(n.leq(f.apply(x), f.apply(y)), [l(x), l(y)], || {
            format!(
                "{} ⋠ {} after mapping",
                n.label(f.apply(x)),
                n.label(f.apply(y))
            )
        });
    }
    report.push(monotone);

    let mut zero = LawCheck::new("HOM2 preserves zero");
    zero.expect(n.equiv(f.apply(m.zero()), n.zero()), [l(m.zero())], || {
        format!(
            "f(0) = {} ≇ {}",
            n.label(f.apply(m.zero())),
            n.label(n.zero())
        )
    });
    report.push(zero);

    let mut combine = LawCheck::new("HOM3 preserves ⊕");
    for x in m.elements() {
        for y in m.elements() {
            let Some(xy) = m.combine(x, y) else { continue };
            combine.case();
            let (fx, fy, fxy) = (f.apply(x), f.apply(y), f.apply(xy));
            match n.combine(fx, fy) {
                None => combine.fail(
                    [l(x), l(y)],
                    format!("f(x) ⊕ f(y) = {} ⊕ {} undefined", n.label(fx), n.label(fy)),
                ),
                Some(z) if !n.equiv(z, fxy) => combine.fail(
                    [l(x), l(y)],
                    format!("f(x ⊕ y) = {} ≇ {} = f(x) ⊕ f(y)", n.label(fxy), n.label(z)),
                ),
                Some(z) if z != fxy => combine.equiv_only(),
                _ => {}
            }
        }
    }
    report.push(combine);
    Ok(report)
}

/// Does `f` reflect as well as preserve the order?
pub fn check_embedding(f: &Hom) -> bool {
    let (m, n) = (f.source(), f.target());
    m.elements().all(|x| {
        m.elements()
            .all(|y| m.leq(x, y) == n.leq(f.apply(x), f.apply(y)))
    })
}

/// An embedding that is also a bijection.
pub fn check_isomorphism(f: &Hom) -> bool {
    let mut hit = vec![false; f.target().len()];
    for &y in f.map() {
        if std::mem::replace(&mut hit[y], true) {
            return false;
        }
    }
    hit.iter().all(|&h| h) && check_embedding(f)
}

/// A change of domain: a homomorphism `f` with its upper adjoint `f*`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaloisConnection {
    lower: Hom,
    upper: Vec<usize>,
}

impl GaloisConnection {
    pub fn new(lower: Hom, upper: Vec<usize>) -> Result<Self> {
        if upper.len() != lower.target().len() {
            return Err(structural("upper adjoint must be total on the target"));
        }
        if upper.iter().any(|&x| x >= lower.source().len()) {
            return Err(structural("upper adjoint leaves the source"));
        }
        Ok(GaloisConnection { lower, upper })
    }

    /// Pairs `f` with the adjoint found by [`synthesize_upper`].
    pub fn from_lower(lower: Hom) -> Result<Self> {
        let upper = synthesize_upper(&lower)?;
        Ok(GaloisConnection { lower, upper })
    }

    pub fn identity(m: Arc<FiniteOpcm>) -> Self {
        let upper = m.elements().collect();
        GaloisConnection {
            lower: Hom::identity(m),
            upper,
        }
    }

    pub fn lower(&self) -> &Hom {
        &self.lower
    }

    pub fn upper(&self) -> &[usize] {
        &self.upper
    }

    pub fn source(&self) -> &FiniteOpcm {
        self.lower.source()
    }

    pub fn target(&self) -> &FiniteOpcm {
        self.lower.target()
    }

    /// `f(x)`.
    pub fn apply(&self, x: usize) -> usize {
        self.lower.apply(x)
    }

    /// `f*(y)`.
    pub fn restrict(&self, y: usize) -> usize {
        self.upper[y]
    }

    /// The closure `f* ∘ f`.
    pub fn closure(&self, x: usize) -> usize {
        self.upper[self.lower.apply(x)]
    }

    pub fn with_upper(&self, upper: Vec<usize>) -> Result<Self> {
        GaloisConnection::new(self.lower.clone(), upper)
    }
}

/// `f*(y) = max { x | f(x) ⪯ y }`, failing when some maximum does not exist.
pub fn synthesize_upper(f: &Hom) -> Result<Vec<usize>> {
    let (m, n) = (f.source(), f.target());
    n.elements()
        .map(|y| {
            let below: Vec<usize> = m.elements().filter(|&x| n.leq(f.apply(x), y)).collect();
            m.order().maximum(&below).ok_or_else(|| {
                precondition(format!(
                    "no upper adjoint: {{x | f(x) ⪯ {}}} has no greatest element",
                    n.label(y)
                ))
            })
        })
        .collect()
}

/// Checks the adjunction `f(x) ⪯ y ⟺ x ⪯ f*(y)`, monotonicity of `f*`, the
/// homomorphism laws of `f`, and the closure laws of `f* ∘ f`.
pub fn check_galois(gc: &GaloisConnection) -> Result<LawReport> {
    let (m, n) = (gc.source(), gc.target());
    ensure_within_cap(n.len())?;
    let mut report = check_hom(&gc.lower)?;
    report.subject = format!("change of domain from {} to {} elements", m.len(), n.len());
    let lm = |x: usize| m.label(x).to_string();
    let ln = |y: usize| n.label(y).to_string();

    let mut upper = LawCheck::new("upper adjoint monotone");
    for (y1, y2) in n.order().pairs() {
        upper.expect(
            m.leq(gc.restrict(y1), gc.restrict(y2)),
            [ln(y1), ln(y2)],
            || format!("f*({}) ⋠ f*({})", ln(y1), ln(y2)),
        );
    }
    report.push(upper);

    let mut adj = LawCheck::new("adjunction");
    for x in m.elements() {
        for y in n.elements() {
            let left = n.leq(gc.apply(x), y);
            let right = m.leq(x, gc.restrict(y));
            adj.expect(left == right, [lm(x), ln(y)], || {
                if left {
                    format!("f(x) ⪯ y but x ⋠ f*(y) = {}", lm(gc.restrict(y)))
                } else {
                    format!(
                        "x ⪯ f*(y) = {} but f(x) = {} ⋠ y",
                        lm(gc.restrict(y)),
                        ln(gc.apply(x))
                    )
                }
            });
        }
    }
    report.push(adj);

    let mut extensive = LawCheck::new("closure extensive");
    let mut idempotent = LawCheck::new("closure idempotent");
    for x in m.elements() {
        let c = gc.closure(x);
        extensive.expect(m.leq(x, c), [lm(x)], || format!("x ⋠ f*f(x) = {}", lm(c)));
        let cc = gc.closure(c);
        idempotent.expect(m.leq(cc, c), [lm(x)], || {
            format!("f*f(f*f x) = {} ⋠ {} = f*f(x)", lm(cc), lm(c))
        });
    }
    let mut monotone = LawCheck::new("closure monotone");
    for (x1, x2) in m.order().pairs() {
        monotone.expect(
            m.leq(gc.closure(x1), gc.closure(x2)),
            [lm(x1), lm(x2)],
            || format!("f*f({}) ⋠ f*f({})", lm(x1), lm(x2)),
        );
    }
    report.push(extensive);
    report.push(idempotent);
    report.push(monotone);
    Ok(report)
}

/// `gc2 ∘ gc1`: lowers compose forwards, uppers backwards.
pub fn compose_galois(gc1: &GaloisConnection, gc2: &GaloisConnection) -> Result<GaloisConnection> {
    let lower = gc1.lower.then(&gc2.lower)?;
    let upper = gc2.upper.iter().map(|&y| gc1.upper[y]).collect();
    GaloisConnection::new(lower, upper)
}

/// A surjection `f : X ↠ Y` between finite labelled sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Surjection {
    domain: Vec<String>,
    codomain: Vec<String>,
    map: Vec<usize>,
}

impl Surjection {
    pub fn new<L: Into<String>>(
        domain: impl IntoIterator<Item = L>,
        codomain: impl IntoIterator<Item = L>,
        map: Vec<usize>,
    ) -> Result<Self> {
        let domain: Vec<String> = domain.into_iter().map(Into::into).collect();
        let codomain: Vec<String> = codomain.into_iter().map(Into::into).collect();
        if map.len() != domain.len() || map.iter().any(|&y| y >= codomain.len()) {
            return Err(structural(
                "surjection map must send every domain element into the codomain",
            ));
        }
        if let Some(y) = (0..codomain.len()).find(|y| !map.contains(y)) {
            return Err(precondition(format!(
                "not surjective: nothing maps to {}, so its preimage would be empty",
                codomain[y]
            )));
        }
        Ok(Surjection {
            domain,
            codomain,
            map,
        })
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn codomain(&self) -> &[String] {
        &self.codomain
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    /// `f⁻¹(V)`.
    pub fn preimage(&self, v: &Subset) -> Subset {
        (0..self.domain.len())
            .filter(|&x| v.contains(self.map[x]))
            .collect()
    }

    /// `f[U]`.
    pub fn image(&self, u: &Subset) -> Subset {
        u.iter().map(|x| self.map[x]).collect()
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &Surjection) -> Result<Surjection> {
        if self.codomain != g.domain {
            return Err(structural(
                "surjections do not compose: codomain and domain differ",
            ));
        }
        Surjection::new(
            self.domain.clone(),
            g.codomain.clone(),
            self.map.iter().map(|&y| g.map[y]).collect(),
        )
    }
}

/// The index of a non-empty subset inside `possibility_of_set`.
pub(crate) fn subset_index(s: &Subset) -> usize {
    s.mask() as usize - 1
}

pub(crate) fn index_subset(i: usize) -> Subset {
    Subset::from_mask(i as u64 + 1)
}

/// The change of domain `f⁻¹ : ℙ⁺Y → ℙ⁺X` with upper adjoint the forward image.
pub fn preimage_galois(f: &Surjection) -> Result<GaloisConnection> {
    let py = Arc::new(possibility_of_set(f.codomain.iter().map(String::as_str))?);
    let px = Arc::new(possibility_of_set(f.domain.iter().map(String::as_str))?);
    let lower = py
        .elements()
        .map(|v| subset_index(&f.preimage(&index_subset(v))))
        .collect();
    let upper = px
        .elements()
        .map(|u| subset_index(&f.image(&index_subset(u))))
        .collect();
    GaloisConnection::new(Hom::new(py, px, lower)?, upper)
}

/// Outcome of comparing the two sides of an inequality `lhs ⪯ rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InequalityVerdict {
    /// Both sides defined and `lhs ≅ rhs`.
    Equal,
    /// Both sides defined and `lhs ⪯ rhs` strictly.
    Strict,
    /// Both sides defined and `lhs ⋠ rhs`.
    Violated,
    /// One side is undefined.
    Vacuous,
}

impl InequalityVerdict {
    fn compare(m: &FiniteOpcm, lhs: Option<usize>, rhs: Option<usize>) -> Self {
        match (lhs, rhs) {
            (Some(a), Some(b)) if m.equiv(a, b) => InequalityVerdict::Equal,
            (Some(a), Some(b)) if m.leq(a, b) => InequalityVerdict::Strict,
            (Some(_), Some(_)) => InequalityVerdict::Violated,
            _ => InequalityVerdict::Vacuous,
        }
    }

    pub fn holds(self) -> bool {
        self != InequalityVerdict::Violated
    }
}

/// `x ⊕ f*(y) ⪯ f*(f(x) ⊕ y)` for `x` in the source and `y` in the target.
pub fn check_extension_inequality(gc: &GaloisConnection, x: usize, y: usize) -> InequalityVerdict {
    let m = gc.source();
    let lhs = m.combine(x, gc.restrict(y));
    let rhs = gc.target().combine(gc.apply(x), y).map(|z| gc.restrict(z));
    InequalityVerdict::compare(m, lhs, rhs)
}

/// Tally of inequality verdicts over a sweep.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct InequalityTally {
    pub equal: usize,
    pub strict: usize,
    pub violated: usize,
    pub vacuous: usize,
}

impl InequalityTally {
    pub fn record(&mut self, v: InequalityVerdict) {
        match v {
            InequalityVerdict::Equal => self.equal += 1,
            InequalityVerdict::Strict => self.strict += 1,
            InequalityVerdict::Violated => self.violated += 1,
            InequalityVerdict::Vacuous => self.vacuous += 1,
        }
    }
}

impl FromIterator<InequalityVerdict> for InequalityTally {
    fn from_iter<I: IntoIterator<Item = InequalityVerdict>>(iter: I) -> Self {
        let mut t = InequalityTally::default();
        iter.into_iter().for_each(|v| t.record(v));
        t
    }
}

impl fmt::Display for InequalityTally {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} equal, {} strict, {} vacuous, {} violated",
            self.equal, self.strict, self.vacuous, self.violated
        )
    }
}

/// The extension inequality over every `(x, y)`.
pub fn extension_inequality_sweep(gc: &GaloisConnection) -> InequalityTally {
    gc.source()
        .elements()
        .flat_map(|x| gc.target().elements().map(move |y| (x, y)))
        .map(|(x, y)| check_extension_inequality(gc, x, y))
        .collect()
}

/// A square of changes of domain `g1 : K → M1`, `g2 : K → M2`,
/// `f1 : M1 → N`, `f2 : M2 → N`.
#[derive(Debug, Clone)]
pub struct LinkingPassage {
    pub g1: GaloisConnection,
    pub g2: GaloisConnection,
    pub f1: GaloisConnection,
    pub f2: GaloisConnection,
}

impl LinkingPassage {
    /// Checks that the four connections meet at `K`, `M1`, `M2` and `N`.
    pub fn new(
        g1: GaloisConnection,
        g2: GaloisConnection,
        f1: GaloisConnection,
        f2: GaloisConnection,
    ) -> Result<Self> {
        let ends = [
            (
                g1.lower.source.clone(),
                g2.lower.source.clone(),
                "g1 and g2 must share their source K",
            ),
            (
                g1.lower.target.clone(),
                f1.lower.source.clone(),
                "g1 must land in the source of f1",
            ),
            (
                g2.lower.target.clone(),
                f2.lower.source.clone(),
                "g2 must land in the source of f2",
            ),
            (
                f1.lower.target.clone(),
                f2.lower.target.clone(),
                "f1 and f2 must share their target N",
            ),
        ];
        for (a, b, msg) in &ends {
            if !same_opcm(a, b) {
                return Err(structural(*msg));
            }
        }
        Ok(LinkingPassage { g1, g2, f1, f2 })
    }

    pub fn k(&self) -> &FiniteOpcm {
        self.g1.source()
    }

    pub fn m1(&self) -> &FiniteOpcm {
        self.f1.source()
    }

    pub fn m2(&self) -> &FiniteOpcm {
        self.f2.source()
    }

    pub fn n(&self) -> &FiniteOpcm {
        self.f1.target()
    }
}

fn summarize(name: &str, report: LawReport) -> LawCheck {
    let mut check = LawCheck::new(name);
    for c in report.checks {
        check.checked += c.checked;
        check.up_to_equiv += c.up_to_equiv;
        for w in c.witnesses {
            check.fail(w.elements, format!("{}: {}", c.law, w.detail));
        }
    }
    check
}

/// The four connections are valid and `f1 ∘ g1 ≅ f2 ∘ g2` on all of `K`.
pub fn check_linking_passage(lp: &LinkingPassage) -> Result<LawReport> {
    let mut report = LawReport::new("linking passage");
    for (name, gc) in [
        ("g1 change of domain", &lp.g1),
        ("g2 change of domain", &lp.g2),
        ("f1 change of domain", &lp.f1),
        ("f2 change of domain", &lp.f2),
    ] {
        report.push(summarize(name, check_galois(gc)?));
    }
    let (k, n) = (lp.k(), lp.n());
    let mut square = LawCheck::new("square commutes");
    for x in k.elements() {
        let a = lp.f1.apply(lp.g1.apply(x));
        let b = lp.f2.apply(lp.g2.apply(x));
        square.expect(n.equiv(a, b), [k.label(x)], || {
            format!("f1 g1 k = {} ≇ {} = f2 g2 k", n.label(a), n.label(b))
        });
    }
    report.push(square);
    Ok(report)
}

/// The data being linked is inconsistent: `f1(x1) ⊕ f2(x2)` is undefined.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("inconsistent linkage: {left} and {right} have no common refinement")]
pub struct InconsistentLinkage {
    pub left: String,
    pub right: String,
}

/// `f1(x1) ⊕ f2(x2)` in `N`.
pub fn link(lp: &LinkingPassage, x1: usize, x2: usize) -> Result<usize, InconsistentLinkage> {
    lp.n()
        .combine(lp.f1.apply(x1), lp.f2.apply(x2))
        .ok_or_else(|| InconsistentLinkage {
            left: lp.m1().label(x1).to_string(),
            right: lp.m2().label(x2).to_string(),
        })
}

/// Compares the two ways of moving `x ∈ M1` into `M2`: through the common
/// domain, `g2 ∘ g1* (x)`, and through the joint domain, `f2* ∘ f1 (x)`.
/// The route through `N` is at least as informative, so the verdict is for
/// `g2 ∘ g1* (x) ⪯ f2* ∘ f1 (x)`.
pub fn check_two_routes(lp: &LinkingPassage, x: usize) -> InequalityVerdict {
    let through_k = lp.g2.apply(lp.g1.restrict(x));
    let through_n = lp.f2.restrict(lp.f1.apply(x));
    InequalityVerdict::compare(lp.m2(), Some(through_k), Some(through_n))
}

/// The two-routes inequality over all of `M1`.
pub fn two_routes_sweep(lp: &LinkingPassage) -> InequalityTally {
    lp.m1()
        .elements()
        .map(|x| check_two_routes(lp, x))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{post, post_chain};
    use crate::instances::prefix_opcm;

    fn surj32() -> Surjection {
        Surjection::new(["p1", "p2", "p3"], ["A", "B"], vec![0, 0, 1]).unwrap()
    }

    #[test]
    fn identity_and_trivial_are_homs() {
        let m = Arc::new(prefix_opcm(&post()).unwrap());
        assert!(check_hom(&Hom::identity(m.clone())).unwrap().passed());
        let t = trivial_hom(m.clone(), m.clone());
        assert!(check_hom(&t).unwrap().passed());
        assert_eq!(t.apply(m.zero()), m.zero());
        assert!(!check_embedding(&t));
        assert!(check_isomorphism(&Hom::identity(m)));
    }

    #[test]
    fn swapping_sa1_and_sa2_breaks_monotonicity() {
        let m = Arc::new(prefix_opcm(&post()).unwrap());
        let (a, b) = (m.index_of("SA1").unwrap(), m.index_of("SA2").unwrap());
        let mut map: Vec<usize> = m.elements().collect();
        map.swap(a, b);
        let f = Hom::new(m.clone(), m.clone(), map).unwrap();
        let report = check_hom(&f).unwrap();
        assert!(!report.get("HOM1 monotone").unwrap().passed());
        let w = &report.get("HOM1 monotone").unwrap().witnesses;
        assert!(w.iter().any(|w| w.elements == ["SA1", "SA1 3"]));
    }

    #[test]
    fn chain_inclusion_is_an_embedding() {
        let m = Arc::new(prefix_opcm(&post()).unwrap());
        let c = Arc::new(prefix_opcm(&post_chain()).unwrap());
        let map = c
            .elements()
            .map(|x| m.index_of(c.label(x)).unwrap())
            .collect();
        let f = Hom::new(c, m, map).unwrap();
        assert!(check_hom(&f).unwrap().passed());
        assert!(check_embedding(&f));
        assert!(!check_isomorphism(&f));
    }

    #[test]
    fn out_of_carrier_image_is_structural() {
        let m = Arc::new(prefix_opcm(&post()).unwrap());
        assert!(Hom::new(m.clone(), m.clone(), vec![99; m.len()]).is_err());
        assert!(Hom::new(m.clone(), m, vec![0]).is_err());
    }

    #[test]
    fn surjection_preimage() {
        let f = surj32();
        let gc = preimage_galois(&f).unwrap();
        assert!(check_galois(&gc).unwrap().passed());
        let a = subset_index(&Subset::new([0]));
        assert_eq!(index_subset(gc.apply(a)), Subset::new([0, 1]));
        let whole_y = gc.source().zero();
        assert_eq!(gc.apply(whole_y), gc.target().zero());
        // f[f⁻¹({A}) ∩ {p2, p3}] = {A}
        let u = f.preimage(&Subset::new([0]));
        let meet: Subset = u.iter().filter(|&x| x == 1 || x == 2).collect();
        assert_eq!(f.image(&meet), Subset::new([0]));
        assert!(Surjection::new(["p"], ["A", "B"], vec![0]).is_err());
    }

    #[test]
    fn wrong_upper_is_caught() {
        let gc = preimage_galois(&surj32()).unwrap();
        let n = gc.target();
        // complement of the forward image, or the whole codomain when that is empty
        let upper = n
            .elements()
            .map(|u| {
                let img = index_subset(gc.restrict(u));
                let comp: Subset = (0..2).filter(|&y| !img.contains(y)).collect();
                if comp.is_empty() {
                    gc.restrict(u)
                } else {
                    subset_index(&comp)
                }
            })
            .collect();
        let bad = gc.with_upper(upper).unwrap();
        let report = check_galois(&bad).unwrap();
        assert!(!report.get("adjunction").unwrap().passed());
    }

    #[test]
    fn synthesized_upper_matches_forward_image() {
        let gc = preimage_galois(&surj32()).unwrap();
        assert_eq!(synthesize_upper(gc.lower()).unwrap(), gc.upper());
    }

    #[test]
    fn composed_preimages() {
        let f =
            Surjection::new(["p1", "p2", "p3", "p4"], ["A", "B", "C"], vec![0, 1, 2, 2]).unwrap();
        let g = Surjection::new(["A", "B", "C"], ["u", "v"], vec![0, 0, 1]).unwrap();
        let (gf, ff) = (preimage_galois(&g).unwrap(), preimage_galois(&f).unwrap());
        // ℙ⁺{u,v} → ℙ⁺{A,B,C} → ℙ⁺{p1..p4}
        let composed = compose_galois(&gf, &ff).unwrap();
        assert!(check_galois(&composed).unwrap().passed());
        let direct = preimage_galois(&f.then(&g).unwrap()).unwrap();
        assert_eq!(composed.lower().map(), direct.lower().map());
        assert_eq!(composed.upper(), direct.upper());
        assert!(compose_galois(&ff, &gf).is_err());
        let id = GaloisConnection::identity(gf.lower().source_arc());
        assert_eq!(compose_galois(&id, &gf).unwrap(), gf);
    }

    #[test]
    fn extension_inequality_is_equality_for_surjections() {
        let gc = preimage_galois(&surj32()).unwrap();
        let tally = extension_inequality_sweep(&gc);
        assert_eq!(tally.violated, 0);
        assert_eq!(tally.strict, 0);
        assert!(tally.equal > 0);
        let x = gc.source().elements().next().unwrap();
        assert_eq!(
            check_extension_inequality(&gc, x, gc.target().zero()),
            InequalityVerdict::Equal
        );
    }

    #[test]
    fn identity_passage_links() {
        let m = Arc::new(possibility_of_set(["1", "2"]).unwrap());
        let id = GaloisConnection::identity(m.clone());
        let lp = LinkingPassage::new(id.clone(), id.clone(), id.clone(), id).unwrap();
        assert!(check_linking_passage(&lp).unwrap().passed());
        let (one, two) = (
            subset_index(&Subset::new([0])),
            subset_index(&Subset::new([1])),
        );
        assert!(link(&lp, one, two).is_err());
        assert_eq!(link(&lp, m.zero(), one), Ok(one));
        assert_eq!(two_routes_sweep(&lp).violated, 0);
    }
}

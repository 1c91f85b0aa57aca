mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use opcmlink::fixtures::{post, P1, P2};
use opcmlink::grothendieck::boxplus;
use opcmlink::instances::{flat, possibility_of_set, prefix_opcm, PrefixCodeSet};
use opcmlink::morphisms::{
    check_extension_inequality, check_galois, link, preimage_galois, two_routes_sweep,
    GaloisConnection, Hom, InequalityVerdict, LinkingPassage, Surjection,
};
use opcmlink::opcm::FiniteOpcm;
use opcmlink::order::{lift, Lifting, Subset};
use opcmlink::relational::{projection_passage, relational_family, AttributeSchema, Relation};
use opcmlink::valuation::{extended_leq, family_from_ova, relational_ova};

fn labels(m: &FiniteOpcm) -> Vec<String> {
    m.elements().map(|i| m.label(i).to_string()).collect()
}

#[test]
fn flat_distinct_values_do_not_combine() {
    let m = flat(["a", "b"]).unwrap();
    let (a, b) = (m.index_of("a").unwrap(), m.index_of("b").unwrap());
    assert_eq!(m.combine(a, b), None);
    assert_eq!(m.combine(a, a), Some(a));
}

#[test]
fn possibility_order_is_reverse_inclusion() {
    let m = possibility_of_set(["1", "2", "3"]).unwrap();
    for x in m.elements() {
        for y in m.elements() {
            let (sx, sy) = (
                Subset::from_mask(x as u64 + 1),
                Subset::from_mask(y as u64 + 1),
            );
            let superset = sy.iter().all(|e| sx.contains(e));
            assert_eq!(m.leq(x, y), superset, "{} {}", m.label(x), m.label(y));
            let meet = sx.mask() & sy.mask();
            assert_eq!(m.combine(x, y), (meet != 0).then(|| meet as usize - 1));
        }
    }
}

#[test]
fn sanitised_postcodes_lift() {
    let m = prefix_opcm(&post()).unwrap();
    let p1 = Subset::from_labels(m.order(), &P1).unwrap();
    let p2 = Subset::from_labels(m.order(), &P2).unwrap();
    for mode in Lifting::ALL {
        assert!(lift(m.order(), mode, &p2, &p1).unwrap());
        assert!(!lift(m.order(), mode, &p1, &p2).unwrap());
    }
}

/// `ε ↦ {a,b,c}`, `SA ↦ {a,b}`, `SA2 ↦ {a}`.
fn strict_fixture() -> GaloisConnection {
    let m = Arc::new(prefix_opcm(&PrefixCodeSet::new(["SA", "SA2"]).unwrap()).unwrap());
    let n = Arc::new(possibility_of_set(["a", "b", "c"]).unwrap());
    let target = |l: &str| n.index_of(l).unwrap();
    let map = labels(&m)
        .iter()
        .map(|l| match l.as_str() {
            "ε" => target("{a, b, c}"),
            "SA" => target("{a, b}"),
            _ => target("{a}"),
        })
        .collect();
    GaloisConnection::from_lower(Hom::new(m, n.clone(), map).unwrap()).unwrap()
}

#[test]
fn extension_inequality_can_be_strict() {
    let gc = strict_fixture();
    assert!(check_galois(&gc).unwrap().passed());
    let (m, n) = (gc.source(), gc.target());
    // f*(y) by scanning for the largest x with f(x) ⊇ y
    let upper = |y: usize| {
        let fits: Vec<usize> = m.elements().filter(|&x| n.leq(gc.apply(x), y)).collect();
        m.order().maximum(&fits).unwrap()
    };
    for y in n.elements() {
        assert_eq!(gc.restrict(y), upper(y));
    }
    let x = m.index_of("SA").unwrap();
    let y = n.index_of("{a, c}").unwrap();
    assert_eq!(gc.restrict(y), m.index_of("ε").unwrap());
    assert_eq!(
        check_extension_inequality(&gc, x, y),
        InequalityVerdict::Strict
    );
}

fn product_passage() -> LinkingPassage {
    let xy = ["x1y1", "x1y2", "x2y1", "x2y2"];
    let yz = ["y1z1", "y2z1"];
    let xyz = ["x1y1z1", "x1y2z1", "x2y1z1", "x2y2z1"];
    let g1 =
        preimage_galois(&Surjection::new(xy, ["y1", "y2"], vec![0, 1, 0, 1]).unwrap()).unwrap();
    let g2 = preimage_galois(&Surjection::new(yz, ["y1", "y2"], vec![0, 1]).unwrap()).unwrap();
    let f1 = preimage_galois(&Surjection::new(xyz, xy, vec![0, 1, 2, 3]).unwrap()).unwrap();
    let f2 = preimage_galois(&Surjection::new(xyz, yz, vec![0, 1, 0, 1]).unwrap()).unwrap();
    LinkingPassage::new(g1, g2, f1, f2).unwrap()
}

/// Triples whose `xy` and `yz` parts are both listed.
fn triple_oracle(u: &[(&str, &str)], v: &[(&str, &str)]) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for x in ["x1", "x2"] {
        for y in ["y1", "y2"] {
            for z in ["z1"] {
                if u.contains(&(x, y)) && v.contains(&(y, z)) {
                    out.insert(format!("{x}{y}{z}"));
                }
            }
        }
    }
    out
}

#[test]
fn link_is_natural_join() {
    let lp = product_passage();
    let (m1, m2, n) = (lp.m1(), lp.m2(), lp.n());
    let u = m1.index_of("{x1y1, x2y2}").unwrap();
    let v = m2.index_of("{y1z1}").unwrap();
    let joined = link(&lp, u, v).unwrap();
    let expected = triple_oracle(&[("x1", "y1"), ("x2", "y2")], &[("y1", "z1")]);
    assert_eq!(expected, BTreeSet::from(["x1y1z1".to_string()]));
    assert_eq!(n.label(joined), "{x1y1z1}");

    let u = m1.index_of("{x1y1}").unwrap();
    let v = m2.index_of("{y2z1}").unwrap();
    assert!(triple_oracle(&[("x1", "y1")], &[("y2", "z1")]).is_empty());
    assert!(link(&lp, u, v).is_err());
}

#[test]
fn surjection_square_routes_agree() {
    let t = two_routes_sweep(&product_passage());
    assert_eq!((t.strict, t.violated), (0, 0));
    assert!(t.equal > 0);
}

#[test]
fn projection_square_routes() {
    let rf = relational_family(&AttributeSchema::uniform(&["a", "b"], 2).unwrap()).unwrap();
    let strict = two_routes_sweep(&projection_passage(&rf, &["a"], &["a", "b"], &[]).unwrap());
    assert_eq!(strict.violated, 0);
    // every relation on a except the full one
    assert_eq!(strict.strict, 2);
    let equal = two_routes_sweep(&projection_passage(&rf, &["a"], &["a", "b"], &["a"]).unwrap());
    assert_eq!((equal.strict, equal.violated), (0, 0));
}

#[test]
fn boxplus_of_single_tuples() {
    let schema = AttributeSchema::uniform(&["a", "b"], 2).unwrap();
    let rf = relational_family(&schema).unwrap();
    let row = |v: &str| vec![vec![v.to_string()]];
    let a0 = Relation::from_rows(&schema, &["a"], &row("0")).unwrap();
    let b1 = Relation::from_rows(&schema, &["b"], &row("1")).unwrap();
    let sum = boxplus(
        rf.family(),
        rf.to_elem(&a0).unwrap(),
        rf.to_elem(&b1).unwrap(),
    )
    .unwrap()
    .unwrap();
    let expected =
        Relation::from_rows(&schema, &["a", "b"], &[vec!["0".into(), "1".into()]]).unwrap();
    assert_eq!(rf.to_relation(sum), expected);
}

#[test]
fn relational_ova_extends_the_relational_family() {
    let schema = AttributeSchema::uniform(&["a", "b"], 2).unwrap();
    let v = relational_ova(&schema).unwrap();
    let of = family_from_ova(&v).unwrap();
    let rf = relational_family(&schema).unwrap();
    for x in 0..4 {
        let (ova, rel) = (of.family.fiber(x), rf.family().fiber(x));
        assert_eq!(ova.len(), rel.len() + 1);
        for i in 1..ova.len() {
            for j in 1..ova.len() {
                assert_eq!(ova.leq(i, j), rel.leq(i - 1, j - 1));
                let (a, b) = (ova.combine(i, j).unwrap(), rel.combine(i - 1, j - 1));
                assert_eq!(b.map(|b| b + 1), Some(a).filter(|&a| a != 0));
            }
        }
        for y in (0..4).filter(|y| y & x == x) {
            let (t1, t2) = (of.family.transition(x, y), rf.family().transition(x, y));
            for i in 1..ova.len() {
                assert_eq!(t1.apply(i), t2.apply(i - 1) + 1);
            }
        }
    }
}

#[test]
fn extended_order_matches_definition() {
    let schema = AttributeSchema::uniform(&["a", "b"], 2).unwrap();
    let v = relational_ova(&schema).unwrap();
    // φ ≤′ ψ iff d(φ) ⊆ d(ψ) and ψ ⊆ φ padded to d(ψ), read off the labels
    let parse = |label: &str| -> (BTreeSet<char>, BTreeSet<String>) {
        let (dom, set) = label.split_once(": ").unwrap();
        let attrs = dom.chars().filter(|c| c.is_ascii_lowercase()).collect();
        let rows = match set {
            "∅" => BTreeSet::new(),
            _ => set[1..set.len() - 1]
                .split("), ")
                .map(|s| s.trim_matches(|c| c == '(' || c == ')').replace(", ", ""))
                .collect(),
        };
        (attrs, rows)
    };
    for p in 0..v.len() {
        for q in 0..v.len() {
            let ((dp, sp), (dq, sq)) = (parse(v.name(p)), parse(v.name(q)));
            let cols: Vec<usize> = dq
                .iter()
                .enumerate()
                .filter(|(_, c)| dp.contains(c))
                .map(|(i, _)| i)
                .collect();
            let expected = dp.is_subset(&dq)
                && sq.iter().all(|t| {
                    let r: String = cols.iter().map(|&i| t.chars().nth(i).unwrap()).collect();
                    sp.contains(&r)
                });
            assert_eq!(
                extended_leq(&v, p, q),
                expected,
                "{} {}",
                v.name(p),
                v.name(q)
            );
        }
    }
}

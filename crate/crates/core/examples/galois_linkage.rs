//! Linking two sources through a shared attribute with preimage Galois
//! connections, and the extension inequality becoming strict.

use std::sync::Arc;

use opcmlink::instances::{possibility_of_set, prefix_opcm, PrefixCodeSet};
use opcmlink::morphisms::{
    check_extension_inequality, check_galois, check_linking_passage, link, preimage_galois,
    two_routes_sweep, GaloisConnection, Hom, LinkingPassage, Surjection,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // suspects × addresses and addresses × owners, linked over addresses
    let sa = ["s1a1", "s1a2", "s2a1", "s2a2"];
    let ao = ["a1o1", "a2o1"];
    let sao = ["s1a1o1", "s1a2o1", "s2a1o1", "s2a2o1"];
    let g1 = preimage_galois(&Surjection::new(sa, ["a1", "a2"], vec![0, 1, 0, 1])?)?;
    let g2 = preimage_galois(&Surjection::new(ao, ["a1", "a2"], vec![0, 1])?)?;
    let f1 = preimage_galois(&Surjection::new(sao, sa, vec![0, 1, 2, 3])?)?;
    let f2 = preimage_galois(&Surjection::new(sao, ao, vec![0, 1, 0, 1])?)?;
    let lp = LinkingPassage::new(g1, g2, f1, f2)?;
    println!("{}", check_linking_passage(&lp)?);

    let u = lp.m1().index_of("{s1a1, s2a2}")?;
    let v = lp.m2().index_of("{a1o1}")?;
    println!("link = {}", lp.n().label(link(&lp, u, v)?));
    let v = lp.m2().index_of("{a2o1}")?;
    let u = lp.m1().index_of("{s1a1}")?;
    match link(&lp, u, v) {
        Ok(w) => println!("link = {}", lp.n().label(w)),
        Err(e) => println!("{e}"),
    }
    println!("two routes: {}", two_routes_sweep(&lp));

    let m = Arc::new(prefix_opcm(&PrefixCodeSet::new(["SA", "SA2"])?)?);
    let n = Arc::new(possibility_of_set(["a", "b", "c"])?);
    let map = ["{a, b, c}", "{a, b}", "{a}"]
        .iter()
        .map(|l| n.index_of(l))
        .collect::<Result<_, _>>()?;
    let gc = GaloisConnection::from_lower(Hom::new(m.clone(), n.clone(), map)?)?;
    println!("{}", check_galois(&gc)?);
    let (x, y) = (m.index_of("SA")?, n.index_of("{a, c}")?);
    println!(
        "SA ⊕ f*({{a, c}}) vs f*(f(SA) ⊕ {{a, c}}): {:?}",
        check_extension_inequality(&gc, x, y)
    );
    Ok(())
}

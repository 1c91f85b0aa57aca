//! Relations as an ordered valuation algebra, its agreement with the
//! completion, and a small algebra that fails regularity.

use opcmlink::relational::AttributeSchema;
use opcmlink::valuation::{
    check_extended_order, check_galois_lemma, check_isomorphism_theorem, check_ova_axioms,
    relational_ova, saturating_count_ova,
};

fn main() -> opcmlink::Result<()> {
    let v = relational_ova(&AttributeSchema::uniform(&["a", "b"], 2)?)?;
    println!("{} valuations", v.len());
    println!("{}", check_ova_axioms(&v)?);
    println!("{}", check_extended_order(&v)?);
    println!("{}", check_isomorphism_theorem(&v)?);

    let counts = saturating_count_ova()?;
    println!("{}", check_galois_lemma(&counts, None)?);
    println!("{}", check_isomorphism_theorem(&counts)?);
    Ok(())
}

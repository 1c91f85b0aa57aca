//! The relational family over two binary attributes: its completion is an
//! OPCM whose combination is natural join.

use opcmlink::grothendieck::{boxplus, check_completion_props, groth_opcm};
use opcmlink::relational::{
    check_join_is_boxplus, natural_join, relational_family, AttributeSchema, Relation,
};

fn main() -> opcmlink::Result<()> {
    let schema = AttributeSchema::uniform(&["a", "b"], 2)?;
    let rf = relational_family(&schema)?;
    let f = rf.family();
    println!("completion has {} points", f.completion_size());
    println!("{}", check_completion_props(f)?);
    println!("completion is an OPCM with zero {}", {
        let g = groth_opcm(f)?;
        g.label(g.zero()).to_string()
    });

    let r = Relation::from_rows(&schema, &["a"], &[vec!["0".into()]])?;
    let s = Relation::from_rows(
        &schema,
        &["a", "b"],
        &[vec!["0".into(), "1".into()], vec!["1".into(), "1".into()]],
    )?;
    let sum = boxplus(f, rf.to_elem(&r)?, rf.to_elem(&s)?)?.map(|e| f.label(e));
    println!("⊞ gives {sum:?}");
    println!(
        "⋈ gives {:?}",
        natural_join(&r, &s)?.map(|j| j.tuples().clone())
    );

    println!("{}", check_join_is_boxplus(&schema)?);
    Ok(())
}

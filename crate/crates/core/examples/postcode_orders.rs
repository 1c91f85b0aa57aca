//! Partial postcodes as an information order: liftings to sets, convex
//! hulls and information classes.

use opcmlink::fixtures::{post, P1, P2};
use opcmlink::instances::prefix_opcm;
use opcmlink::order::{convex_hull, lift, quotient, Lifting, Subset};

fn main() -> opcmlink::Result<()> {
    let m = prefix_opcm(&post())?;
    let order = m.order();
    println!("{} codes, zero {}", m.len(), m.label(m.zero()));

    let p1 = Subset::from_labels(order, &P1)?;
    let p2 = Subset::from_labels(order, &P2)?;
    for mode in Lifting::ALL {
        println!(
            "{mode:?}: {} ⪯ {} is {}",
            p2.render(order),
            p1.render(order),
            lift(order, mode, &p2, &p1)?
        );
    }

    let s = Subset::from_labels(order, &["ε", "SA2 8PP"])?;
    println!(
        "K({}) = {}",
        s.render(order),
        convex_hull(order, &s)?.render(order)
    );

    let q = quotient(order);
    println!(
        "{} information classes (the order is a poset)",
        q.classes.len()
    );
    Ok(())
}

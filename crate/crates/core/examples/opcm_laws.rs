//! Checking the OPCM laws on the built-in instances, and watching a
//! single corrupted table entry get caught.

use opcmlink::fixtures::{post, post5};
use opcmlink::instances::{flat, possibility_of_opcm, possibility_of_set, prefix_opcm};
use opcmlink::opcm::{check_compatibility, check_opcm_laws, product};

fn main() -> opcmlink::Result<()> {
    let instances = [
        ("flat {a, b, c}", flat(["a", "b", "c"])?),
        ("prefix codes", prefix_opcm(&post())?),
        ("P+{1, 2, 3}", possibility_of_set(["1", "2", "3"])?),
        (
            "P+ of five codes",
            possibility_of_opcm(&prefix_opcm(&post5())?)?,
        ),
        (
            "flat × P+",
            product(&flat(["a", "b"])?, &possibility_of_set(["x", "y"])?)?,
        ),
    ];
    for (name, m) in &instances {
        let report = check_opcm_laws(m)?;
        println!(
            "{name:<18} {:>3} elements  laws hold: {}",
            m.len(),
            report.passed()
        );
    }

    let m = &instances[1].1;
    println!("{}", check_compatibility(m)?);

    let (sa, sa1, sa2) = (m.index_of("SA")?, m.index_of("SA1")?, m.index_of("SA2")?);
    let broken = m.with_entry(sa, sa1, Some(sa2))?;
    println!("{}", check_opcm_laws(&broken)?);
    Ok(())
}

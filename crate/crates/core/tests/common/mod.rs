#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use opcmlink::relational::{tuple_space, AttributeSchema, Relation};
use rand::Rng;

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

pub fn data_str(name: &str) -> String {
    data(name).to_string_lossy().into_owned()
}

/// Join by scanning every pair of tuples and keeping the agreeing ones.
pub fn scan_join(r: &Relation, s: &Relation) -> Option<BTreeSet<BTreeMap<String, String>>> {
    let rows = |rel: &Relation| -> Vec<BTreeMap<String, String>> {
        let attrs = rel.attrs();
        rel.tuples()
            .iter()
            .map(|t| {
                attrs
                    .iter()
                    .map(|a| a.to_string())
                    .zip(t.iter().cloned())
                    .collect()
            })
            .collect()
    };
    let mut out = BTreeSet::new();
    for x in rows(r) {
        for y in rows(s) {
            if x.iter().all(|(a, v)| y.get(a).is_none_or(|w| w == v)) {
                let mut m = x.clone();
                m.extend(y.clone());
                out.insert(m);
            }
        }
    }
    (!out.is_empty()).then_some(out)
}

pub fn as_maps(r: &Relation) -> BTreeSet<BTreeMap<String, String>> {
    let attrs = r.attrs();
    r.tuples()
        .iter()
        .map(|t| {
            attrs
                .iter()
                .map(|a| a.to_string())
                .zip(t.iter().cloned())
                .collect()
        })
        .collect()
}

/// Attributes `a, b, c` with one to three values each.
pub fn random_schema(rng: &mut impl Rng) -> AttributeSchema {
    let domains: Vec<(&str, Vec<String>)> = ["a", "b", "c"]
        .into_iter()
        .map(|a| {
            (
                a,
                (0..rng.gen_range(1..=3)).map(|v| v.to_string()).collect(),
            )
        })
        .collect();
    AttributeSchema::new(domains).unwrap()
}

/// A non-empty relation over a random subset of the schema's attributes.
pub fn random_relation(schema: &AttributeSchema, rng: &mut impl Rng) -> Relation {
    let all = schema.attrs();
    let attrs: Vec<&str> = all.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
    let domains = schema.restrict(&attrs).unwrap();
    let space = tuple_space(&domains);
    loop {
        let tuples: Vec<Vec<String>> = space
            .iter()
            .filter(|_| rng.gen_bool(0.5))
            .cloned()
            .collect();
        if !tuples.is_empty() {
            return Relation::new(domains, tuples).unwrap();
        }
    }
}

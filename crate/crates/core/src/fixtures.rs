//! Small named inputs shared by tests, examples and the command line.

use crate::instances::PrefixCodeSet;

/// The partial postcodes of the running example.
pub const POST_CODES: [&str; 10] = [
    "ε", "SA", "SA1", "SA2", "SA1 3", "SA2 8", "SA1 3LP", "SA2 8PP", "SA2 8PW", "SA2 8QF",
];

/// Five codes closed under prefixes, small enough to take the full powerset of.
pub const POST5_CODES: [&str; 5] = ["ε", "SA", "SA1", "SA2", "SA2 8"];

/// The chain from the root to `SA2 8PP`.
pub const POST_CHAIN_CODES: [&str; 5] = ["ε", "SA", "SA2", "SA2 8", "SA2 8PP"];

/// Exact postcodes from the original records.
pub const P1: [&str; 4] = ["SA2 8PP", "SA2 8PW", "SA1 3LP", "SA2 8QF"];

/// Their sanitised sectors.
pub const P2: [&str; 2] = ["SA2 8", "SA1 3"];

/// Full postcodes standing in for the rest of the country, chosen so every
/// code in [`POST_CODES`] has a leaf outside each of its proper extensions.
pub const EXTRA_LEAVES: [&str; 5] = ["SA1 3EP", "SA1 1AA", "SA2 0AA", "SA3 4HY", "CF10 3AT"];

pub fn post() -> PrefixCodeSet {
    PrefixCodeSet::new(POST_CODES).expect("fixture codes are prefix closed")
}

pub fn post5() -> PrefixCodeSet {
    PrefixCodeSet::new(POST5_CODES).expect("fixture codes are prefix closed")
}

pub fn post_chain() -> PrefixCodeSet {
    PrefixCodeSet::new(POST_CHAIN_CODES).expect("fixture codes are prefix closed")
}

/// The leaf set used for `⟦·⟧`: the full postcodes of [`P1`] plus [`EXTRA_LEAVES`].
pub fn post_leaves() -> Vec<String> {
    P1.iter()
        .chain(EXTRA_LEAVES.iter())
        .map(|s| s.to_string())
        .collect()
}

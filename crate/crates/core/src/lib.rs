//! Ordered partial commutative monoids (OPCMs) over finite tables, and the
//! algebra of data linkage built on them: Galois connections between
//! information domains, the Grothendieck completion over an attribute
//! lattice, natural join as its derived combination, and ordered valuation
//! algebras.
//!
//! Every law is an executable check that returns a [`LawReport`] listing
//! concrete counterexamples.

pub mod cli;
pub mod error;
pub mod fixtures;
pub mod grothendieck;
pub mod instances;
pub mod limits;
pub mod morphisms;
pub mod opcm;
pub mod order;
pub mod relational;
pub mod report;
pub mod valuation;

pub use error::{Error, Result};
pub use opcm::FiniteOpcm;
pub use order::{Lifting, Preorder, Subset};
pub use report::{LawCheck, LawReport, Verdict};

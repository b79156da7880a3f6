//! Mechanical classification of semigroups that are disjoint unions of two
//! or three copies of the free monogenic semigroup.
//!
//! * [`words`]: words, presentations and the presentation families.
//! * [`rewrite`]: rewriting, bounded derivation search and congruence balls.
//! * [`certs`]: positive certificates (weights, quotient tables, suffix
//!   invariants, irreducibility).
//! * [`typespace`]: type tuples and their symmetry orbits.
//! * [`classify`]: landing analysis, bounded elimination and the drivers.
//! * [`cli`]: the command-line surface.

pub mod certs;
pub mod classify;
pub mod cli;
pub mod rewrite;
pub mod typespace;
pub mod words;

pub use words::{instantiate_family, parse_presentation, Family, Letter, Params, Presentation, Relation, Word};

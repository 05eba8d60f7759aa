//! Beauville-property decisions for finite p-groups, with a focus on
//! groups of maximal class.
//!
//! The crate is organized around six subsystems:
//!
//! - [`pc`]: power-commutator presentations and the collection algorithm.
//! - [`group`]: enumerated groups with subgroup, series, quotient, and
//!   conjugacy machinery.
//! - [`maxclass`]: invariants of maximal-class groups (the distinguished
//!   maximal subgroup, degree of commutativity, branch profiles, mu).
//! - [`beauville`]: the Beauville decision by definition (oracle), the
//!   fast classifier for maximal-class groups, and the tame/wild split.
//! - [`forge`]: corpus constructors, covering quotients of the pro-p group of
//!   maximal class (with a cyclotomic ring model as an independent
//!   oracle), abelian references, and a structure-constant search for
//!   metabelian maximal-class groups.
//! - [`record`] and [`harness`]: result persistence and the
//!   classifier-versus-oracle cross-validation harness behind the CLI.

pub mod pc;
pub mod group;
pub mod maxclass;
pub mod beauville;
pub mod forge;
pub mod record;
pub mod harness;

pub use pc::{parse_presentation, GroupElement, PcPresentation, Word};

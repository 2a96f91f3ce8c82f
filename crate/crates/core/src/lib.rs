//! Reasoning kernel for an infinitary graded logic over the unit
//! interval: exact rational evaluation, compilation of finitary formulas
//! to piecewise-linear functions with exact polyhedral decision
//! procedures, a Hilbert-style proof checker with an infinitary
//! disjunction rule, and constructive approximation routines for Borel
//! functions.

pub mod analysis;
pub mod axioms;
pub mod formula;
pub mod proofs;
pub mod pwl;
pub mod rational;
pub mod semantics;

pub use formula::{
    expand_derived, family_nth, parse, CountableFamily, Formula, MonotoneHint, Scalar,
    SeqDescriptor,
};
pub use rational::{Rat, Rational01};

//! Witness-certified estimators for generalized bounded-variation
//! functionals of 1-periodic functions in one and two variables.
//!
//! The crate computes lower-bound estimates with explicit witnesses for the
//! weighted (Lambda) variation, the gap-constrained Wiener variation, and
//! their two-dimensional marginal, mixed, rectangle and sharp variants; it
//! evaluates the divergence/boundedness conditions those functionals hinge
//! on; and it builds the two tensor counterexample constructions (a dyadic
//! comb pair and a shrinking tent pair) together with closed-form upper and
//! lower certificates for each inequality in their analysis.
//!
//! Sup-type functionals over uncountable families are never "decided": every
//! estimate is a certified lower bound whose witness re-evaluates to the
//! reported value, and upper bounds exist only as construction-specific
//! certificates. Exhaustive oracles in [`oracle`] pin the estimators down on
//! small instances.

pub mod cli;
pub mod constructions;
pub mod functions;
pub mod numeric;
pub mod oracle;
pub mod sequences;
pub mod variation;

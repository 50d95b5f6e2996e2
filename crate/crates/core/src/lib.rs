//! Fair division of indivisible mixed manna.
//!
//! Items may be goods for some agents and bads for others. The crate checks
//! jealousy-freeness and envy-freeness relaxations and Pareto-optimality
//! exactly over rationals, solves leximin and leximin++ by exhaustive search,
//! runs a greedy algorithm for the weak jealousy-freeness relaxation, and
//! builds hardness reductions from exact cover by 3-sets.

#![allow(clippy::needless_range_loop)]

pub mod axioms;
pub mod bundle;
pub mod enumerate;
pub mod error;
pub mod io;
pub mod model;
pub mod paperlab;
pub mod rational;
pub mod reductions;
pub mod solvers;

pub use axioms::{
    check_ef, check_jf, check_property, is_equitable, is_jealous, is_po, EfVariant, JfVariant,
    PropertyVariant, Term, Verdict, Violation,
};
pub use bundle::Bundle;
pub use error::{Error, Result};
pub use model::{
    classify_in_allocation, classify_item_additive, classify_marginal, detect_problem_class,
    normalise, normalise_default, Allocation, Instance, ItemClass, Limits, ProblemClass,
    UtilityModel, Valuation,
};
pub use rational::Rational;

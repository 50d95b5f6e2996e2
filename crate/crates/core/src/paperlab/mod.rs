//! Named finite instances, claim re-verification, random instance
//! generation and the randomized theorem suites.

pub mod audit;
pub mod claims;
pub mod fixtures;
pub mod generator;
pub mod suites;

pub use audit::{audit_table, chain_links, implication_audit, AuditTable, ChainLink};
pub use claims::{claims_to_csv, verify_paper_claims, ClaimReport};
pub use fixtures::{fixture, Fixture, FIXTURE_IDS};
pub use generator::{gen_random_instance, GenClass, GenConfig, GenModel};
pub use suites::{run_chain_suite, run_theorem_suite, ChainReport, SuiteReport, Theorem};

//! Automated assessment toolkit for Prolog assignments.
//!
//! The crate is organized around the grading pipeline:
//!
//! - [`syntax`] — tokenizer, parser and error rendering for a Prolog subset
//! - [`engine`] — SLD resolution with backtracking, cut, negation and limits
//! - [`harness`] — plunit-style test suites run against a submission
//! - [`analyzers`] — call-graph, solution-type and name-suggestion analyses
//! - [`scoring`] — assignment specs, scorecards, leaderboards and reports
//! - [`analytics`] — submission-history classification and bug taxonomy

pub mod analytics;
pub mod analyzers;
pub mod engine;
pub mod scoring;
pub mod harness;
pub mod syntax;

#[cfg(feature = "test-support")]
pub mod testsupport;

pub use syntax::{Clause, PredId, Program, SourceSpan, Term, TermKind};

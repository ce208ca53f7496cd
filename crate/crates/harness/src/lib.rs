//! Verification harness for `cutlink`.
//!
//! Enumerates or samples graphs, checks a named property on a capped set of
//! configurations per graph, and reports violations as line-delimited JSON.
//! Separate entry points check the doubly-good-vertex guarantee at its size
//! bound and search for failures below it.

pub mod bound;
pub mod context;
pub mod enumerate;
pub mod properties;
pub mod sweep;
pub mod tables;

pub use bound::{doubly_good_at_bound, sample_bound_instance, tightness_search, BoundReport, TightnessReport, Witness};
pub use enumerate::{enumerate_graphs, random_graph, MAX_EXHAUSTIVE};
pub use properties::{Outcome, Property, UnknownProperty};
pub use sweep::{
    parse_report_line, run_sweep, EdgeProb, Generator, ReportLine, Summary, SweepError, SweepReport,
    SweepSpec, ViolationRecord, DEFAULT_CAP,
};

//! Exact solution counting for diagonal and Carlitz-type equations over
//! small finite fields.
//!
//! The crate has four layers:
//!
//! * [`ff`] — arithmetic in GF(p^s) with a deterministic element enumeration;
//! * [`equations`] — the three equation families and every hypothesis check
//!   that gates a closed form;
//! * [`counting`] — a brute-force enumeration oracle (the ground truth) and
//!   the closed-form evaluators, tied together by an auto-dispatcher;
//! * [`bijections`] — materialized solution-set fibrations with verified
//!   scaling bijections and the counting identities between fibers.
//!
//! [`parse`] and [`sample`] provide the text formats and the random
//! instance generators used by the command-line front end.

pub mod bijections;
pub mod counting;
pub mod equations;
pub mod ff;
pub mod parse;
pub mod sample;

/// Default budget for brute-force work, measured in tuple evaluations so
/// that behavior is machine-independent.
pub const DEFAULT_WORK_CAP: u64 = 100_000_000;

pub use counting::{count, CountMethod, CountReport, Method};
pub use equations::{CarlitzEquation, DiagonalEquation, QuasiHomogeneousEquation};
pub use ff::{make_field, make_field_with_cap, CharValue, FieldElement, FieldSpec};

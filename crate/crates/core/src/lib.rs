//! Information measures and event-probability bounds on finite joint
//! distributions.
//!
//! The crate computes the Renyi / Sibson / f-divergence family, maximal
//! leakage and max-information on exact finite-alphabet distributions,
//! evaluates a family of event-probability and generalization-error bounds
//! built from them, and ships the oracles (brute-force enumeration,
//! Monte-Carlo experiments, tightness constructions) that verify every
//! bound numerically.
//!
//! Modules:
//! - [`dist`]: validated distributions, joints, channels, events, fibers
//! - [`measures`]: divergences and dependence measures
//! - [`orlicz`]: Luxemburg/Amemiya norms, convex conjugation, the two
//!   norm-product bounds
//! - [`bounds`]: the concrete bound families, tail bounds, sample
//!   complexity
//! - [`mechanisms`]: additive-noise leakage and the differential-privacy
//!   bridge
//! - [`adaptive`]: composition ledger, chain rule, post-processing checks
//! - [`harness`]: instance generators, brute-force oracles, experiments,
//!   the verification suite

// `!(x >= 0.0)` is used throughout as the NaN-rejecting domain check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod adaptive;
pub mod bounds;
pub mod dist;
pub mod error;
pub mod harness;
pub mod measures;
pub mod mechanisms;
mod numeric;
pub mod orlicz;

pub use bounds::{BoundParams, BoundReport, TailFamily};
pub use dist::{Channel, Event, FiniteDist, JointDist};
pub use error::{Error, Result};
pub use measures::{Alpha, FKind};
pub use orlicz::{OrliczFn, WeightedValues};

/// Schema tag stamped on every JSON report.
pub const SCHEMA: &str = "leakage-lab/1";

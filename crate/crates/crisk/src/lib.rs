//! Conditional risk analysis on finite filtered probability spaces.
//!
//! The crate makes the module-theoretic ("conditional") picture of monetary
//! risk computable at desk scale: a finite set of atoms carries the fine
//! information, a partition into blocks carries the coarse information, and
//! every conditional quantity is a vector with one entry per block.
//!
//! The layers, bottom up:
//!
//! * [`space`] — the probability space, the block algebra, conditions and
//!   partitions of unity.
//! * [`l0`] — random variables and conditional scalars, concatenation along
//!   partitions, stable hulls, essential suprema, eventually periodic
//!   sequences.
//! * [`analysis`] — conditional expectation, conditional Lp norms and their
//!   duality, seminorm balls and gauges.
//! * [`risk`] — conditional convex risk measures (entropic, worst-case,
//!   AV@R, penalty-defined, custom) and a randomized axiom checker.
//! * [`duality`] — Fenchel conjugates, the robust representation, attainment
//!   certificates, scalarization, and penalty sublevel diagnostics.
//! * [`diagnostics`] — supremum-attainment versus compactness checks on
//!   block polytopes and proper convex block functions, the sup-limsup
//!   checker, and the Fatou/Lebesgue sequence harness.
//! * [`scenario`] — JSON scenario files, tolerance plumbing and run reports
//!   shared with the `crisk` command-line tool.

pub mod analysis;
pub mod diagnostics;
pub mod duality;
pub mod error;
pub mod l0;
pub mod risk;
pub mod scenario;
mod solver;
pub mod space;

pub use error::{Error, Result};
pub use l0::{CondScalar, ExtCondScalar, ExtReal, RandomVariable};
pub use risk::RiskMeasure;
pub use space::{Condition, FilteredSpace, PartitionOfUnity, ProbSpace, SubAlgebra};

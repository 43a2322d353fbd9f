//! Doc-test shim for the mdbook guide in `book/`.
//!
//! mdbook cannot run snippets against workspace dependencies, so each
//! chapter is included here as module documentation and `cargo test --doc`
//! executes every code block.  One module per chapter keeps failures
//! attributable to their source file.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/spaces.md")]
pub mod spaces {}

#[doc = include_str!("../../../book/src/random-variables.md")]
pub mod random_variables {}

#[doc = include_str!("../../../book/src/conditional-analysis.md")]
pub mod conditional_analysis {}

#[doc = include_str!("../../../book/src/risk-measures.md")]
pub mod risk_measures {}

#[doc = include_str!("../../../book/src/duality.md")]
pub mod duality {}

#[doc = include_str!("../../../book/src/diagnostics.md")]
pub mod diagnostics {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}

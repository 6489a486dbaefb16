//! Doc-test harness for the guide in `book/`. Each chapter becomes the
//! documentation of an empty module, so `cargo test` runs its code blocks.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/operators.md")]
pub mod operators {}

#[doc = include_str!("../../../book/src/linear_algebra.md")]
pub mod linear_algebra {}

#[doc = include_str!("../../../book/src/codes.md")]
pub mod codes {}

#[doc = include_str!("../../../book/src/logical.md")]
pub mod logical {}

#[doc = include_str!("../../../book/src/measurement.md")]
pub mod measurement {}

#[doc = include_str!("../../../book/src/hypergraph.md")]
pub mod hypergraph {}

#[doc = include_str!("../../../book/src/oracle.md")]
pub mod oracle {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}

#[doc = include_str!("../../../README.md")]
pub mod readme {}

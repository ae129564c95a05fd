//! Runs the guide's code blocks as doc-tests. mdbook cannot link against
//! workspace crates, so each chapter is pulled in here instead.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/materials.md")]
pub mod materials {}
#[doc = include_str!("../../../book/src/decay.md")]
pub mod decay {}
#[doc = include_str!("../../../book/src/solver.md")]
pub mod solver {}
#[doc = include_str!("../../../book/src/measures.md")]
pub mod measures {}
#[doc = include_str!("../../../book/src/tolerances.md")]
pub mod tolerances {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}

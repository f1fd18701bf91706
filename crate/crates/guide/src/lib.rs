//! The book chapters as doc-tests, one module per chapter.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/phase_space.md")]
pub mod phase_space {}
#[doc = include_str!("../../../book/src/family.md")]
pub mod family {}
#[doc = include_str!("../../../book/src/lax.md")]
pub mod lax {}
#[doc = include_str!("../../../book/src/reduction.md")]
pub mod reduction {}
#[doc = include_str!("../../../book/src/elliptic.md")]
pub mod elliptic {}
#[doc = include_str!("../../../book/src/separation.md")]
pub mod separation {}
#[doc = include_str!("../../../book/src/hess.md")]
pub mod hess {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}

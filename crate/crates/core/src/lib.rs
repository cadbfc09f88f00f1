// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dtn;
pub mod error;
pub mod experiments;
pub mod fem;
pub mod fit;
pub mod geometry;
pub mod laplace;
pub mod pml;
pub mod special;
pub mod time;

pub use error::{Error, Result};

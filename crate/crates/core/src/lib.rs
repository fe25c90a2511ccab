//! Variable Orlicz spaces on the unit circle and Orlicz Hardy spaces on the
//! unit disc.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circle;
pub mod error;
pub mod hardy;
pub mod harmonic;
pub mod leveltree;
pub mod modular;

pub use error::{Error, Result};

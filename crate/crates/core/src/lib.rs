//! Exact combinatorial kernels for moment-curve sumsets: Vinogradov counts,
//! representation tables, restricted sumsets, the popular-sum extraction
//! pipeline and sum-product reports.

pub mod bits;
pub mod caps;
pub mod check;
pub mod counting;
mod error;
pub mod exactset;
pub mod extraction;
pub mod key;
pub mod power;
pub mod sumproduct;
pub mod sumsets;

pub use caps::Caps;
pub use error::{Error, Result};
pub use exactset::GroundSet;
pub use key::PowerSumKey;

//! Newton duality between central potentials.

// `!(x > 0.0)` is used on purpose so NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod connection;
pub mod duality;
pub mod error;
pub mod heunfn;
pub mod oracle;
pub mod par;
pub mod quad;
pub mod roots;
pub mod spectra;
pub mod special;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

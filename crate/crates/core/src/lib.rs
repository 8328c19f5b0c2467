//! Transfer matrix, periodic Temperley-Lieb algebra and lattice integrals of
//! motion for the critical Ising model with spatially periodic boundaries.

pub mod characters;
pub mod error;
pub mod exact;
pub mod iom;
pub mod operator;
mod par;
pub mod spectrum;
pub mod tl;
pub mod transfer;
pub mod verify;

pub use error::{Error, Result};
pub use operator::Operator;
pub use par::is_parallel;

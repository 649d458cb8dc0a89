//! Numerical verification of identities on Lorentzian concircular structure
//! manifolds, their submanifolds, Ricci solitons and quarter-symmetric metric
//! connections.

#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod connectalg;
pub mod expr;
pub mod fieldcore;
pub mod lcsstruct;
pub mod report;
pub mod scenario;
pub mod qsmclab;
pub mod solitonlab;
pub mod subman;

pub use error::{GeomError, Result};

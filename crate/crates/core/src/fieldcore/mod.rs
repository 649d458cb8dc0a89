//! Charts, jets, tensor fields, sampling and Lorentzian frames.

pub mod chart;
pub mod field;
pub mod frame;
pub mod jet;
pub mod linalg;

pub use chart::ChartDomain;
pub use field::{jet_eval, Engine, JetFn, PointFn, TensorFieldHandle, Valence};
pub use frame::{gdot, orthonormal_frame, FramePoint};
pub use jet::{Jet, MAX_DIM};

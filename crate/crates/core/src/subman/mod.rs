//! Immersed submanifolds: induced metric, Gauss–Weingarten split, mean
//! curvature and invariant/anti-invariant classification.

mod classify;
mod fields;
mod gauss;
mod immersion;

pub use classify::{classify, induced_structure, SubmanifoldClass, SubmanifoldKind};
pub use fields::{projected_normal, tangential_field};
pub use gauss::{
    ambient_derivative_of, gauss_split, mean_curvature, second_fundamental, verify_gauss, weingarten,
    ShapeSummary, GAUSS_CHECKS, PROBES,
};
pub use immersion::{induced_levi_civita, induced_metric, ImmersionMap, ImmersionRecord, SubPoint};

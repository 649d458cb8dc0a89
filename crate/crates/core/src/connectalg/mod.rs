//! Metrics, affine connections, torsion, curvature and Ricci contractions.

pub mod connection;
pub mod curvature;
pub mod metric;

pub use connection::{
    christoffel, connection_lie_components, covariant_derivative, levi_civita, lie_derivative_metric,
    metric_compat_residual, ConnectionField, ConnectionPoint, Provenance,
};
pub use curvature::{curvature, curvature_from_point, ricci, ricci_over_frame, CurvatureValue};
pub use metric::{MetricField, MetricPoint, Signature};

#[cfg(test)]
mod tests;

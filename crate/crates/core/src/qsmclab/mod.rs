//! Quarter-symmetric metric connection built from the structure, its
//! transformation checks, and its restriction to invariant submanifolds.

mod algebra;
mod connection;
mod fit;
mod induced;

pub use algebra::{algebraic_phi, quarter_symmetric_coefficients, StructureValues};
pub use connection::{
    alpha_gate, alpha_variation, connection_lie, curvature_transform_check, qsm_connection, ricci_transform_check,
    verify_qsm_connection, QsmConnection, ALPHA_CONSTANT_GATE, CONNECTION_CHECKS, CURVATURE_CHECKS, RICCI_BASIS,
    RICCI_CHECKS,
};
pub use induced::{
    induced_qsm, induced_qsm_check, qsm_submanifold_soliton_check, InducedQsm, ANTI_INVARIANT_QSM_CHECKS,
    INDUCED_CHECKS, SUBMANIFOLD_CHECKS,
};
pub use fit::{condition_number, fit_coefficients, BasisSample, CoefficientFit};

#[cfg(test)]
mod tests;

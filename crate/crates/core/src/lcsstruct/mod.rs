//! Lorentzian concircular structure: GRW construction, derivation, identities.

mod axioms;
mod grw;
mod structure;

pub use axioms::{axiom_entry, verify_axioms, AXIOM_CHECKS};
pub use grw::{build_grw, Fiber, GrwManifold, GrwSpec};
pub use structure::{derive_structure, trace_phi, LcsStructure, StructurePoint, ALPHA_FLOOR};

#[cfg(test)]
mod tests;

//! Ricci-soliton residuals, λ estimation and the submanifold soliton chains.

mod chains;
mod soliton;

pub use chains::{
    anti_invariant_chain_check, invariant_chain_check, ANTI_INVARIANT_CHECKS, ANTI_INVARIANT_SUMMARY,
    INVARIANT_CHECKS, INVARIANT_SUMMARY,
};
pub use soliton::{
    best_lambda, einstein_fit, eta_einstein_fit, soliton_residual, standard_frame, synthetic_eta_einstein,
    EtaEinsteinFit, FitSample, LambdaFit, SolitonClass, SolitonSample, FIT_DET_GUARD, STEADY_BAND,
};

#[cfg(test)]
mod tests;

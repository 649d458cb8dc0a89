use std::fmt;
use std::sync::OnceLock;

use crate::lcsstruct::AXIOM_CHECKS;
use crate::qsmclab::{
    ANTI_INVARIANT_QSM_CHECKS, CONNECTION_CHECKS, CURVATURE_CHECKS, INDUCED_CHECKS, RICCI_CHECKS, SUBMANIFOLD_CHECKS,
};
use crate::solitonlab::{ANTI_INVARIANT_CHECKS, ANTI_INVARIANT_SUMMARY, INVARIANT_CHECKS, INVARIANT_SUMMARY};
use crate::subman::{GAUSS_CHECKS, PROBES};

/// Whether a check's failure fails the run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Assertability {
    Assertable,
    Diagnostic,
    /// Asserted only when the stated condition holds on the example.
    Conditional(&'static str),
}

impl Assertability {
    pub fn as_str(&self) -> &'static str {
        match self {
            Assertability::Assertable => "assertable",
            Assertability::Diagnostic => "diagnostic",
            Assertability::Conditional(_) => "conditional",
        }
    }
}

impl fmt::Display for Assertability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Assertability::Conditional(c) => write!(f, "conditional ({c})"),
            a => f.write_str(a.as_str()),
        }
    }
}

/// Checks that are evaluated together; one evaluation serves every id in the group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Group {
    Structure,
    Axioms,
    AmbientRicci,
    EngineAgreement,
    QsmConnection,
    QsmCurvature,
    QsmRicci,
    Classification,
    Gauss,
    InvariantChain,
    AntiInvariantChain,
    QsmInduced,
    QsmSubmanifold,
}

impl Group {
    /// Submanifold groups need an `id@submanifold` target.
    pub fn needs_target(&self) -> bool {
        matches!(
            self,
            Group::Classification
                | Group::Gauss
                | Group::InvariantChain
                | Group::AntiInvariantChain
                | Group::QsmInduced
                | Group::QsmSubmanifold
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckSpec {
    pub id: &'static str,
    pub equation: &'static str,
    pub group: Group,
    pub assertability: Assertability,
}

pub const STRUCTURE_CHECKS: [(&str, &str); 1] =
    [("structure_values", "α = div ξ/(n-1), ρ = -ξ(α), β = -ξ(ρ), a = tr φ")];
pub const AMBIENT_RICCI_CHECKS: [(&str, &str); 1] = [("ambient_ricci_fit", "S = a g + b η⊗η")];
pub const ENGINE_CHECKS: [(&str, &str); 1] =
    [("engine_agreement", "jet and finite-difference engines agree on α, ρ, Γ and S")];
pub const CLASSIFICATION_CHECKS: [(&str, &str); 1] =
    [("classification", "invariant (φTM ⊆ TM, ξ tangent) / anti-invariant (φTM ⊆ T⊥M) / neither")];

const ALPHA_CONSTANT: &str = "α constant on the samples";

fn assertability(id: &str) -> Assertability {
    use Assertability::*;
    match id {
        "eq_2_16_printed" | "eq_2_21" | "thm_3_2_wording" | "soliton_best_lambda" | "eq_3_5_fit" | "eq_2_30_fit"
        | "eq_3_12_fit" | "eq_3_13" | "qsm_sub_ricci_antisymmetry" | "thm_4_2_fit" | "structure_values"
        | "ambient_ricci_fit" => Diagnostic,
        "eq_2_29" | "eq_2_30" | "eq_4_7" | "eq_3_12_contraction" => Conditional(ALPHA_CONSTANT),
        "thm_3_1_minimal" => Conditional("the submanifold is totally geodesic"),
        "eq_3_5_einstein" => Conditional("the η-Einstein fit is exact"),
        "eq_3_7" => Conditional("the scenario supplies λ"),
        "classification" => Conditional("the scenario states the expected kind"),
        _ => Assertable,
    }
}

/// The fixed check registry, in listing order.
pub fn registry() -> &'static [CheckSpec] {
    static REG: OnceLock<Vec<CheckSpec>> = OnceLock::new();
    REG.get_or_init(|| {
        let groups: [(Group, &[(&'static str, &'static str)]); 13] = [
            (Group::Structure, &STRUCTURE_CHECKS),
            (Group::Axioms, &AXIOM_CHECKS),
            (Group::AmbientRicci, &AMBIENT_RICCI_CHECKS),
            (Group::EngineAgreement, &ENGINE_CHECKS),
            (Group::QsmConnection, &CONNECTION_CHECKS),
            (Group::QsmCurvature, &CURVATURE_CHECKS),
            (Group::QsmRicci, &RICCI_CHECKS),
            (Group::Classification, &CLASSIFICATION_CHECKS),
            (Group::Gauss, &GAUSS_CHECKS),
            (Group::Gauss, &PROBES),
            (Group::InvariantChain, &INVARIANT_CHECKS),
            (Group::InvariantChain, &INVARIANT_SUMMARY),
            (Group::AntiInvariantChain, &ANTI_INVARIANT_CHECKS),
        ];
        let tail: [(Group, &[(&'static str, &'static str)]); 4] = [
            (Group::AntiInvariantChain, &ANTI_INVARIANT_SUMMARY),
            (Group::QsmInduced, &INDUCED_CHECKS),
            (Group::QsmSubmanifold, &SUBMANIFOLD_CHECKS),
            (Group::QsmSubmanifold, &ANTI_INVARIANT_QSM_CHECKS),
        ];
        groups
            .iter()
            .chain(tail.iter())
            .flat_map(|(g, list)| {
                list.iter().map(move |(id, eq)| CheckSpec {
                    id,
                    equation: eq,
                    group: *g,
                    assertability: assertability(id),
                })
            })
            .collect()
    })
}

pub fn lookup(id: &str) -> Option<&'static CheckSpec> {
    registry().iter().find(|c| c.id == id)
}

/// Every registry id, comma-separated, for error messages.
pub fn known_ids() -> String {
    registry().iter().map(|c| c.id).collect::<Vec<_>>().join(", ")
}

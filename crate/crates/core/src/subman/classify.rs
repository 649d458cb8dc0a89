use std::fmt;

use crate::error::Result;
use crate::lcsstruct::{derive_structure, LcsStructure};
use crate::report::map_points;
use crate::subman::fields::tangential_field;
use crate::subman::immersion::{induced_metric, ImmersionRecord, SubPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubmanifoldKind {
    Invariant,
    AntiInvariant,
    Neither,
}

impl SubmanifoldKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SubmanifoldKind::Invariant => "invariant",
            SubmanifoldKind::AntiInvariant => "anti_invariant",
            SubmanifoldKind::Neither => "neither",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "invariant" => Some(SubmanifoldKind::Invariant),
            "anti_invariant" => Some(SubmanifoldKind::AntiInvariant),
            "neither" => Some(SubmanifoldKind::Neither),
            _ => None,
        }
    }
}

impl fmt::Display for SubmanifoldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Classification with the worst-case diagnostics over all samples.
#[derive(Debug, Clone, PartialEq)]
pub struct SubmanifoldClass {
    pub kind: SubmanifoldKind,
    /// Largest normal component of ξ.
    pub xi_normal_max: f64,
    /// Largest tangential part of `φX` over unit frame vectors `X`.
    pub phi_tangential_max: f64,
    /// Largest normal part of `φX`.
    pub phi_normal_max: f64,
    pub message: Option<String>,
}

impl SubmanifoldClass {
    pub fn xi_tangent(&self, tolerance: f64) -> bool {
        self.xi_normal_max < tolerance
    }
}

/// Pointwise classification; samples must agree unanimously.
///
/// Anti-invariance is tested first: a ξ integral curve satisfies both
/// definitions (φξ = 0 is tangent and normal) and is reported as anti-invariant.
pub fn classify(
    imm: &ImmersionRecord,
    structure: &LcsStructure,
    points: &[Vec<f64>],
    tolerance: f64,
    parallel: bool,
) -> Result<SubmanifoldClass> {
    let ambient = structure.metric();
    let conn = structure.connection();
    let per: Vec<Result<(f64, f64, f64)>> = map_points(points, parallel, |_, u| {
        let sp = SubPoint::new(imm, ambient, conn, u)?;
        let st = structure.at(&sp.x)?;
        let xi = st.xi();
        let xi_normal = sp.norm(&sp.normal(&xi));
        let (mut tan, mut nor) = (0.0f64, 0.0f64);
        for a in 0..sp.m {
            let phix = st.phi_of(&sp.frame_vector(a));
            tan = tan.max(sp.norm(&sp.tangential(&phix)));
            nor = nor.max(sp.norm(&sp.normal(&phix)));
        }
        Ok((xi_normal, tan, nor))
    });
    let mut out = SubmanifoldClass {
        kind: SubmanifoldKind::Neither,
        xi_normal_max: 0.0,
        phi_tangential_max: 0.0,
        phi_normal_max: 0.0,
        message: None,
    };
    for r in per {
        let (a, b, c) = r?;
        out.xi_normal_max = out.xi_normal_max.max(a);
        out.phi_tangential_max = out.phi_tangential_max.max(b);
        out.phi_normal_max = out.phi_normal_max.max(c);
    }
    out.kind = if out.phi_tangential_max < tolerance {
        SubmanifoldKind::AntiInvariant
    } else if out.xi_normal_max < tolerance && out.phi_normal_max < tolerance {
        SubmanifoldKind::Invariant
    } else {
        SubmanifoldKind::Neither
    };
    if out.kind != SubmanifoldKind::AntiInvariant && out.xi_normal_max < tolerance && imm.dim() >= 2 {
        out.message = Some(format!(
            "ξ tangent forces anti-invariant submanifolds to be curves; dimension {} cannot be anti-invariant",
            imm.dim()
        ));
    }
    Ok(out)
}

/// The structure `(ξ_M, φ_M, α)` induced on an invariant submanifold, built
/// intrinsically from the induced metric and the tangential part of ξ.
pub fn induced_structure(
    imm: &ImmersionRecord,
    structure: &LcsStructure,
    points: &[Vec<f64>],
    tolerance: f64,
) -> Result<LcsStructure> {
    let gm = induced_metric(imm, structure.metric())?;
    let xi_m = tangential_field(imm, structure.metric(), structure.xi_field())?;
    derive_structure(&gm, &xi_m, points, tolerance)
}

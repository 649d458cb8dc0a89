use std::sync::Arc;

use crate::connectalg::metric::invert_jets;
use crate::connectalg::MetricField;
use crate::error::{GeomError, Result};
use crate::fieldcore::{Jet, TensorFieldHandle, Valence};
use crate::subman::immersion::ImmersionRecord;

/// Jets in `u` of the objects every projection needs.
pub(crate) struct ProjectionJets {
    pub p: Vec<Jet>,
    pub g_amb: Vec<Jet>,
    pub gm_inv: Vec<Jet>,
    pub x: Vec<Jet>,
}

pub(crate) fn projection_jets(imm: &ImmersionRecord, ambient: &MetricField, u: &[f64]) -> Result<ProjectionJets> {
    let (n, m) = (imm.ambient_dim, imm.dim());
    let x = imm.composed_position(u)?;
    let g_amb = ambient.field().eval_composed(&x)?;
    let p = imm.pushforward(u)?;
    let mut gm = vec![Jet::zero(); m * m];
    for a in 0..m {
        for b in 0..m {
            let mut s = Jet::zero();
            for i in 0..n {
                for j in 0..n {
                    s.add_product(&(p[i * m + a] * g_amb[i * n + j]), &p[j * m + b]);
                }
            }
            gm[a * m + b] = s;
        }
    }
    let gm_inv = invert_jets(&gm, m).ok_or_else(|| GeomError::DegenerateMetric {
        point: u.to_vec(),
        det: 0.0,
    })?;
    Ok(ProjectionJets { p, g_amb, gm_inv, x })
}

impl ProjectionJets {
    /// Parameter components of the tangential part of an ambient vector field.
    pub fn tangent_coords(&self, v: &[Jet]) -> Vec<Jet> {
        let n = v.len();
        let m = self.p.len() / n;
        let lowered: Vec<Jet> = (0..m)
            .map(|b| {
                let mut s = Jet::zero();
                for i in 0..n {
                    for j in 0..n {
                        s.add_product(&(self.p[i * m + b] * self.g_amb[i * n + j]), &v[j]);
                    }
                }
                s
            })
            .collect();
        (0..m)
            .map(|a| {
                let mut s = Jet::zero();
                for b in 0..m {
                    s.add_product(&self.gm_inv[a * m + b], &lowered[b]);
                }
                s
            })
            .collect()
    }

    /// Normal part `v - P (tangent coords)`.
    pub fn normal(&self, v: &[Jet]) -> Vec<Jet> {
        let n = v.len();
        let m = self.p.len() / n;
        let t = self.tangent_coords(v);
        (0..n)
            .map(|i| {
                let mut s = v[i];
                for a in 0..m {
                    s -= self.p[i * m + a] * t[a];
                }
                s
            })
            .collect()
    }
}

/// `V(u) = (w)^⊥`, the normal projection of a constant ambient vector, as jets.
pub fn projected_normal(imm: &ImmersionRecord, ambient: &MetricField, u: &[f64], w: &[f64]) -> Result<Vec<Jet>> {
    let pj = projection_jets(imm, ambient, u)?;
    let wj: Vec<Jet> = w.iter().map(|&c| Jet::constant(c)).collect();
    Ok(pj.normal(&wj))
}

/// Tangential projection of an ambient vector field, in parameter components.
///
/// For ξ tangent to M this is the structure field of M.
pub fn tangential_field(
    imm: &ImmersionRecord,
    ambient: &MetricField,
    field: &TensorFieldHandle,
) -> Result<TensorFieldHandle> {
    if field.valence() != Valence::VECTOR || !field.is_composable() {
        return Err(GeomError::Unsupported(
            "tangential projection needs a composable ambient vector field".into(),
        ));
    }
    let (imm2, amb2, f2) = (imm.clone(), ambient.clone(), field.clone());
    Ok(TensorFieldHandle::from_point_fn(
        Valence::VECTOR,
        imm.params.clone(),
        Arc::new(move |u| {
            let pj = projection_jets(&imm2, &amb2, u)?;
            let v = f2.eval_composed(&pj.x)?;
            Ok(pj.tangent_coords(&v))
        }),
    )
    .with_engine(ambient.engine()))
}

use std::sync::Arc;

use crate::connectalg::{levi_civita, ConnectionField, MetricField, MetricPoint, Signature};
use crate::error::{GeomError, Result};
use crate::expr::CompiledExpr;
use crate::fieldcore::frame::symmetric_eigenvalues;
use crate::fieldcore::{gdot, ChartDomain, FramePoint, Jet, TensorFieldHandle, Valence};

/// Step of the five-point stencil that supplies third derivatives of `x(u)`.
const THIRD_STEP: f64 = 1e-3;

#[derive(Debug, Clone)]
pub enum ImmersionMap {
    /// `x^{coords[a]} = u^a`; every other ambient coordinate is held at `fixed`.
    Slice { coords: Vec<usize>, fixed: Vec<f64> },
    /// One expression per ambient coordinate, over the parameter names.
    Expr(Vec<CompiledExpr>),
}

/// A parametrized submanifold `u ∈ U ↦ x(u)` of an ambient chart.
#[derive(Debug, Clone)]
pub struct ImmersionRecord {
    pub name: String,
    pub params: ChartDomain,
    pub ambient_dim: usize,
    pub map: ImmersionMap,
}

impl ImmersionRecord {
    /// Coordinate slice: `names` vary over their ambient intervals, the rest are
    /// fixed (at `fixed` if given, else the interval midpoint).
    pub fn slice(
        name: &str,
        ambient: &ChartDomain,
        names: &[String],
        fixed: &[(String, f64)],
    ) -> Result<Self> {
        let n = ambient.dim();
        let index_of = |s: &str| {
            ambient
                .names()
                .iter()
                .position(|a| a == s)
                .ok_or_else(|| GeomError::Input(format!("unknown ambient coordinate {s:?} (known: {:?})", ambient.names())))
        };
        let mut coords = Vec::with_capacity(names.len());
        for s in names {
            let i = index_of(s)?;
            if coords.contains(&i) {
                return Err(GeomError::Input(format!("coordinate {s:?} listed twice")));
            }
            coords.push(i);
        }
        let mut values: Vec<f64> = (0..n)
            .map(|i| {
                let (lo, hi) = ambient.bounds(i);
                0.5 * (lo + hi)
            })
            .collect();
        for (s, v) in fixed {
            let i = index_of(s)?;
            if coords.contains(&i) {
                return Err(GeomError::Input(format!("coordinate {s:?} is both free and fixed")));
            }
            values[i] = *v;
        }
        let bounds = coords.iter().map(|&i| ambient.bounds(i)).collect();
        let params = ChartDomain::with_min_dim(names.to_vec(), bounds, 1)?;
        Self::checked(name, params, n, ImmersionMap::Slice { coords, fixed: values })
    }

    pub fn from_exprs(
        name: &str,
        ambient_dim: usize,
        params: ChartDomain,
        components: &[String],
    ) -> Result<Self> {
        if components.len() != ambient_dim {
            return Err(GeomError::Input(format!(
                "immersion {name:?} has {} components, ambient dimension is {ambient_dim}",
                components.len()
            )));
        }
        let exprs = components
            .iter()
            .map(|c| {
                CompiledExpr::parse(c, params.names())
                    .map_err(|e| GeomError::Expr(format!("immersion {name:?} component \"{c}\": {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::checked(name, params, ambient_dim, ImmersionMap::Expr(exprs))
    }

    fn checked(name: &str, params: ChartDomain, ambient_dim: usize, map: ImmersionMap) -> Result<Self> {
        if params.dim() >= ambient_dim {
            return Err(GeomError::Input(format!(
                "immersion {name:?}: dimension {} must be below the ambient dimension {ambient_dim}",
                params.dim()
            )));
        }
        Ok(ImmersionRecord {
            name: name.to_string(),
            params,
            ambient_dim,
            map,
        })
    }

    pub fn dim(&self) -> usize {
        self.params.dim()
    }

    /// `x(u)` as jets in `u`, exact to second order.
    pub fn position(&self, u: &[f64]) -> Result<Vec<Jet>> {
        self.position_jets(&Jet::variables(u))
    }

    fn position_jets(&self, uj: &[Jet]) -> Result<Vec<Jet>> {
        match &self.map {
            ImmersionMap::Slice { coords, fixed } => {
                let mut x: Vec<Jet> = fixed.iter().map(|&v| Jet::constant(v)).collect();
                for (a, &i) in coords.iter().enumerate() {
                    x[i] = uj[a];
                }
                Ok(x)
            }
            ImmersionMap::Expr(exprs) => exprs
                .iter()
                .map(|e| e.eval(uj).map_err(|err| GeomError::Expr(err.to_string())))
                .collect(),
        }
    }

    pub fn point(&self, u: &[f64]) -> Result<Vec<f64>> {
        Ok(self.position(u)?.iter().map(|j| j.value).collect())
    }

    /// `P^i_a = ∂x^i/∂u^a` at `i*m + a`, as jets exact to second order.
    ///
    /// The second derivatives of `P` are third derivatives of `x`; slices have
    /// none, expressions get them from a five-point stencil on the exact Hessian.
    pub fn pushforward(&self, u: &[f64]) -> Result<Vec<Jet>> {
        let (n, m) = (self.ambient_dim, self.dim());
        let x = self.position(u)?;
        let mut p = vec![Jet::zero(); n * m];
        for i in 0..n {
            for a in 0..m {
                let mut j = Jet::constant(x[i].grad[a]);
                for b in 0..m {
                    j.grad[b] = x[i].hess[a][b];
                }
                p[i * m + a] = j;
            }
        }
        if matches!(self.map, ImmersionMap::Expr(_)) {
            let h = THIRD_STEP;
            let hess_at = |c: usize, d: f64| -> Result<Vec<Jet>> {
                let mut q = u.to_vec();
                q[c] += d;
                self.position(&q)
            };
            for c in 0..m {
                let r = [hess_at(c, 2.0 * h)?, hess_at(c, h)?, hess_at(c, -h)?, hess_at(c, -2.0 * h)?];
                for i in 0..n {
                    for a in 0..m {
                        for b in 0..m {
                            let v = (-r[0][i].hess[a][b] + 8.0 * r[1][i].hess[a][b] - 8.0 * r[2][i].hess[a][b]
                                + r[3][i].hess[a][b])
                                / (12.0 * h);
                            p[i * m + a].hess[b][c] = v;
                        }
                    }
                }
            }
            // Symmetrise the stencil in the last two slots.
            for i in 0..n {
                for a in 0..m {
                    for b in 0..m {
                        for c in 0..b {
                            let s = 0.5 * (p[i * m + a].hess[b][c] + p[i * m + a].hess[c][b]);
                            p[i * m + a].hess[b][c] = s;
                            p[i * m + a].hess[c][b] = s;
                        }
                    }
                }
            }
        }
        Ok(p)
    }

    /// `x(u)` as input jets for composing ambient fields.
    pub(crate) fn composed_position(&self, u: &[f64]) -> Result<Vec<Jet>> {
        self.position(u)
    }
}

/// Pullback `g_M = Pᵀ g̃ P` as jets in `u`.
fn pullback_jets(imm: &ImmersionRecord, ambient: &MetricField, u: &[f64]) -> Result<Vec<Jet>> {
    let (n, m) = (imm.ambient_dim, imm.dim());
    let x = imm.composed_position(u)?;
    ambient.domain().check(&x.iter().map(|j| j.value).collect::<Vec<_>>())?;
    let g = ambient.field().eval_composed(&x)?;
    let p = imm.pushforward(u)?;
    let mut gm = vec![Jet::zero(); m * m];
    for a in 0..m {
        for b in a..m {
            let mut s = Jet::zero();
            for i in 0..n {
                for j in 0..n {
                    if g[i * n + j].value == 0.0 && g[i * n + j].is_constant() {
                        continue;
                    }
                    s.add_product(&(p[i * m + a] * g[i * n + j]), &p[j * m + b]);
                }
            }
            gm[a * m + b] = s;
            gm[b * m + a] = s;
        }
    }
    Ok(gm)
}

/// Degenerate-metric check on a pulled-back matrix.
fn check_nondegenerate(values: &[f64], m: usize, u: &[f64]) -> Result<Vec<f64>> {
    let ev = symmetric_eigenvalues(values, m);
    let scale = ev.iter().fold(1.0f64, |s, e| s.max(e.abs()));
    if ev.iter().any(|e| e.abs() < 1e-10 * scale) {
        let det = ev.iter().product();
        return Err(GeomError::DegenerateMetric { point: u.to_vec(), det });
    }
    Ok(ev)
}

/// The induced metric on the parameter domain.
///
/// Signature is read at the centre of the box: Lorentzian iff one negative
/// eigenvalue. Every sample is checked again when it is evaluated.
pub fn induced_metric(imm: &ImmersionRecord, ambient: &MetricField) -> Result<MetricField> {
    if !ambient.field().is_composable() {
        return Err(GeomError::Unsupported("induced metric needs a composable ambient metric".into()));
    }
    let m = imm.dim();
    let center: Vec<f64> = (0..m)
        .map(|a| {
            let (lo, hi) = imm.params.bounds(a);
            0.5 * (lo + hi)
        })
        .collect();
    let gm0: Vec<f64> = pullback_jets(imm, ambient, &center)?.iter().map(|j| j.value).collect();
    let ev = check_nondegenerate(&gm0, m, &center)?;
    let negative = ev.iter().filter(|e| **e < 0.0).count();
    let signature = match negative {
        0 => Signature::Riemannian,
        1 => Signature::Lorentzian,
        k => return Err(GeomError::Signature(format!("induced metric has {k} negative directions"))),
    };
    let (imm2, amb2) = (imm.clone(), ambient.clone());
    let f = TensorFieldHandle::from_point_fn(
        Valence::BILINEAR,
        imm.params.clone(),
        Arc::new(move |u| {
            let gm = pullback_jets(&imm2, &amb2, u)?;
            check_nondegenerate(&gm.iter().map(|j| j.value).collect::<Vec<_>>(), imm2.dim(), u)?;
            Ok(gm)
        }),
    )
    .with_engine(ambient.engine());
    MetricField::new(f, signature)
}

/// Immersion data at one parameter point.
#[derive(Debug, Clone)]
pub struct SubPoint {
    pub m: usize,
    pub n: usize,
    pub u: Vec<f64>,
    pub x: Vec<f64>,
    /// `P^i_a` at `i*m + a`.
    pub p: Vec<f64>,
    pub ambient: MetricPoint,
    pub g_amb: Vec<f64>,
    /// Ambient connection coefficients at `x(u)`, layout `k*n*n + i*n + j`.
    pub gamma: Vec<f64>,
    pub gm: Vec<f64>,
    pub gm_inv: Vec<f64>,
    /// `K_ab = ∇̃_{∂a} ∂b` (ambient components) at `(a*m + b)*n + i`.
    pub k: Vec<f64>,
    /// Induced orthonormal frame (parameter components).
    pub frame: FramePoint,
    /// Ambient orthonormal frame at `x(u)` for norms.
    pub ambient_frame: FramePoint,
}

impl SubPoint {
    pub fn new(imm: &ImmersionRecord, ambient: &MetricField, conn: &ConnectionField, u: &[f64]) -> Result<Self> {
        imm.params.check(u)?;
        let (n, m) = (imm.ambient_dim, imm.dim());
        let x = imm.point(u)?;
        let pj = imm.pushforward(u)?;
        let p: Vec<f64> = pj.iter().map(|j| j.value).collect();
        let am = ambient.at(&x)?;
        let g_amb = am.values();
        let gamma = conn.at(&x)?.values();

        let mut gram = vec![0.0; m * m];
        for a in 0..m {
            for b in 0..m {
                gram[a * m + b] = (0..n).map(|i| p[i * m + a] * p[i * m + b]).sum();
            }
        }
        let ev = symmetric_eigenvalues(&gram, m);
        if ev[0] < 1e-12 * ev[m - 1].max(1.0) {
            return Err(GeomError::Input(format!(
                "immersion {:?} has rank-deficient pushforward at {u:?}",
                imm.name
            )));
        }
        let mut gm = vec![0.0; m * m];
        for a in 0..m {
            for b in 0..m {
                let pa: Vec<f64> = (0..n).map(|i| p[i * m + a]).collect();
                let pb: Vec<f64> = (0..n).map(|i| p[i * m + b]).collect();
                gm[a * m + b] = gdot(&g_amb, &pa, &pb);
            }
        }
        check_nondegenerate(&gm, m, u)?;
        let gm_inv = nalgebra::DMatrix::from_row_slice(m, m, &gm)
            .try_inverse()
            .ok_or_else(|| GeomError::DegenerateMetric { point: u.to_vec(), det: 0.0 })?;
        let gm_inv: Vec<f64> = (0..m * m).map(|k| gm_inv[(k / m, k % m)]).collect();

        let mut k = vec![0.0; m * m * n];
        for a in 0..m {
            for b in 0..m {
                for i in 0..n {
                    let mut s = pj[i * m + b].grad[a];
                    for j in 0..n {
                        for l in 0..n {
                            s += gamma[i * n * n + j * n + l] * p[j * m + a] * p[l * m + b];
                        }
                    }
                    k[(a * m + b) * n + i] = s;
                }
            }
        }
        let frame = MetricPoint {
            n: m,
            point: u.to_vec(),
            g: gm.iter().map(|&v| Jet::constant(v)).collect(),
            ginv: gm_inv.iter().map(|&v| Jet::constant(v)).collect(),
        }
        .frame(None)?;
        let ambient_frame = am.frame(None)?;
        Ok(SubPoint {
            m,
            n,
            u: u.to_vec(),
            x,
            p,
            ambient: am,
            g_amb,
            gamma,
            gm,
            gm_inv,
            k,
            frame,
            ambient_frame,
        })
    }

    /// Ambient vector `P X` of parameter components `X`.
    pub fn push(&self, xu: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| (0..self.m).map(|a| self.p[i * self.m + a] * xu[a]).sum())
            .collect()
    }

    /// Parameter components of the tangential part: `g_M⁻¹ Pᵀ g̃ v`.
    pub fn tangent_coords(&self, v: &[f64]) -> Vec<f64> {
        let (n, m) = (self.n, self.m);
        let lowered: Vec<f64> = (0..m)
            .map(|a| {
                let pa: Vec<f64> = (0..n).map(|i| self.p[i * m + a]).collect();
                gdot(&self.g_amb, &pa, v)
            })
            .collect();
        (0..m)
            .map(|a| (0..m).map(|b| self.gm_inv[a * m + b] * lowered[b]).sum())
            .collect()
    }

    pub fn tangential(&self, v: &[f64]) -> Vec<f64> {
        self.push(&self.tangent_coords(v))
    }

    pub fn normal(&self, v: &[f64]) -> Vec<f64> {
        let t = self.tangential(v);
        v.iter().zip(&t).map(|(a, b)| a - b).collect()
    }

    /// `∇̃_X Y` for parameter-constant `X, Y` (ambient components).
    pub fn ambient_derivative(&self, xu: &[f64], yu: &[f64]) -> Vec<f64> {
        let (n, m) = (self.n, self.m);
        let mut out = vec![0.0; n];
        for a in 0..m {
            for b in 0..m {
                let w = xu[a] * yu[b];
                if w == 0.0 {
                    continue;
                }
                for i in 0..n {
                    out[i] += w * self.k[(a * m + b) * n + i];
                }
            }
        }
        out
    }

    /// Ambient frame max-norm.
    pub fn norm(&self, v: &[f64]) -> f64 {
        self.ambient_frame.max_norm(&self.g_amb, v)
    }

    pub fn dot(&self, v: &[f64], w: &[f64]) -> f64 {
        gdot(&self.g_amb, v, w)
    }

    /// Induced frame vector `e_a` pushed forward.
    pub fn frame_vector(&self, a: usize) -> Vec<f64> {
        self.push(&self.frame.basis[a])
    }
}

/// The Levi-Civita connection of the induced metric.
pub fn induced_levi_civita(imm: &ImmersionRecord, ambient: &MetricField) -> Result<(MetricField, ConnectionField)> {
    let gm = induced_metric(imm, ambient)?;
    let lc = levi_civita(&gm);
    Ok((gm, lc))
}

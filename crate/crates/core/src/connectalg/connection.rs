use std::fmt;
use std::sync::Arc;

use crate::connectalg::metric::{MetricField, MetricPoint};
use crate::error::{GeomError, Result};
use crate::fieldcore::{ChartDomain, Jet, TensorFieldHandle, Valence};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    LeviCivita,
    QuarterSymmetric,
    Induced,
    Custom,
}

/// `Γ^k_{ij}` at `p`, stored at `k*n*n + i*n + j`, valid to first order.
pub type CoeffFn = Arc<dyn Fn(&[f64]) -> Result<Vec<Jet>> + Send + Sync>;

/// An affine connection: `∇_{∂_i} ∂_j = Γ^k_{ij} ∂_k`. No symmetry in `i, j` is assumed.
#[derive(Clone)]
pub struct ConnectionField {
    domain: ChartDomain,
    provenance: Provenance,
    coeffs: CoeffFn,
}

impl fmt::Debug for ConnectionField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConnectionField")
            .field("dim", &self.dim())
            .field("provenance", &self.provenance)
            .finish()
    }
}

impl ConnectionField {
    pub fn new(domain: ChartDomain, provenance: Provenance, coeffs: CoeffFn) -> Self {
        ConnectionField {
            domain,
            provenance,
            coeffs,
        }
    }

    /// Constant coefficients everywhere (index layout as in [`CoeffFn`]).
    pub fn constant(domain: ChartDomain, gamma: Vec<f64>) -> Self {
        let jets: Vec<Jet> = gamma.into_iter().map(Jet::constant).collect();
        Self::new(domain, Provenance::Custom, Arc::new(move |_| Ok(jets.clone())))
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn domain(&self) -> &ChartDomain {
        &self.domain
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn at(&self, p: &[f64]) -> Result<ConnectionPoint> {
        self.domain.check(p)?;
        let n = self.dim();
        let gamma = (self.coeffs)(p)?;
        if gamma.len() != n * n * n {
            return Err(GeomError::Input(format!(
                "connection returned {} coefficients, expected {}",
                gamma.len(),
                n * n * n
            )));
        }
        Ok(ConnectionPoint {
            n,
            point: p.to_vec(),
            gamma,
        })
    }

    /// The torsion `T^k_{ij} = Γ^k_{ij} - Γ^k_{ji}` as a `(1,2)` field.
    pub fn torsion(&self) -> TensorFieldHandle {
        let conn = self.clone();
        TensorFieldHandle::from_point_fn(
            Valence { contra: 1, co: 2 },
            self.domain.clone(),
            Arc::new(move |p| Ok(conn.at(p)?.torsion())),
        )
    }
}

/// Christoffel symbols of the second kind from first jets of `g`.
pub fn christoffel(m: &MetricPoint) -> Vec<Jet> {
    let n = m.n;
    let dg = |a: usize, b: usize, c: usize| m.g[a * n + b].partial(c);
    let mut first = vec![Jet::zero(); n * n * n];
    for l in 0..n {
        for i in 0..n {
            for j in i..n {
                let v = (dg(j, l, i) + dg(i, l, j) - dg(i, j, l)).scale(0.5);
                first[l * n * n + i * n + j] = v;
                first[l * n * n + j * n + i] = v;
            }
        }
    }
    let mut gamma = vec![Jet::zero(); n * n * n];
    for k in 0..n {
        for i in 0..n {
            for j in i..n {
                let mut s = Jet::zero();
                for l in 0..n {
                    s.add_product(&m.ginv[k * n + l], &first[l * n * n + i * n + j]);
                }
                gamma[k * n * n + i * n + j] = s;
                gamma[k * n * n + j * n + i] = s;
            }
        }
    }
    gamma
}

/// The torsion-free metric connection of `g`.
pub fn levi_civita(g: &MetricField) -> ConnectionField {
    let metric = g.clone();
    ConnectionField::new(
        g.domain().clone(),
        Provenance::LeviCivita,
        Arc::new(move |p| Ok(christoffel(&metric.at(p)?))),
    )
}

/// Connection coefficients at a single point plus the covariant-derivative algebra.
#[derive(Debug, Clone)]
pub struct ConnectionPoint {
    pub n: usize,
    pub point: Vec<f64>,
    pub gamma: Vec<Jet>,
}

impl ConnectionPoint {
    #[inline]
    pub fn g(&self, k: usize, i: usize, j: usize) -> &Jet {
        &self.gamma[k * self.n * self.n + i * self.n + j]
    }

    pub fn values(&self) -> Vec<f64> {
        self.gamma.iter().map(|j| j.value).collect()
    }

    pub fn torsion(&self) -> Vec<Jet> {
        let n = self.n;
        let mut t = vec![Jet::zero(); n * n * n];
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    t[k * n * n + i * n + j] = *self.g(k, i, j) - *self.g(k, j, i);
                }
            }
        }
        t
    }

    /// `T(X,Y)` for vectors at the point.
    pub fn torsion_apply(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .map(|k| {
                let mut s = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        s += (self.g(k, i, j).value - self.g(k, j, i).value) * x[i] * y[j];
                    }
                }
                s
            })
            .collect()
    }

    /// `∇_X Y` for a constant-coefficient direction `X` and vector `Y` given as values.
    pub fn apply(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .map(|k| {
                let mut s = 0.0;
                for i in 0..n {
                    if x[i] == 0.0 {
                        continue;
                    }
                    for j in 0..n {
                        s += x[i] * self.g(k, i, j).value * y[j];
                    }
                }
                s
            })
            .collect()
    }

    /// `(∇_i Y)^k` for a vector field with jets; first-order valid.
    pub fn nabla_vector(&self, y: &[Jet]) -> Vec<Jet> {
        let n = self.n;
        let mut out = vec![Jet::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let mut s = y[k].partial(i);
                for j in 0..n {
                    s.add_product(self.g(k, i, j), &y[j]);
                }
                out[i * n + k] = s;
            }
        }
        out
    }

    /// `(∇_i ω)_j` for a covector field.
    pub fn nabla_covector(&self, w: &[Jet]) -> Vec<Jet> {
        let n = self.n;
        let mut out = vec![Jet::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                let mut s = w[j].partial(i);
                for l in 0..n {
                    s -= *self.g(l, i, j) * w[l];
                }
                out[i * n + j] = s;
            }
        }
        out
    }

    /// `(∇_i A)^k_j` for a `(1,1)` field stored as `A[k*n + j]`.
    pub fn nabla_endo(&self, a: &[Jet]) -> Vec<Jet> {
        let n = self.n;
        let mut out = vec![Jet::zero(); n * n * n];
        for i in 0..n {
            for k in 0..n {
                for j in 0..n {
                    let mut s = a[k * n + j].partial(i);
                    for l in 0..n {
                        s.add_product(self.g(k, i, l), &a[l * n + j]);
                        s -= *self.g(l, i, j) * a[k * n + l];
                    }
                    out[i * n * n + k * n + j] = s;
                }
            }
        }
        out
    }

    /// `(∇_i B)_{jk}` for a `(0,2)` field.
    pub fn nabla_bilinear(&self, b: &[Jet]) -> Vec<Jet> {
        let n = self.n;
        let mut out = vec![Jet::zero(); n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut s = b[j * n + k].partial(i);
                    for l in 0..n {
                        s -= *self.g(l, i, j) * b[l * n + k];
                        s -= *self.g(l, i, k) * b[j * n + l];
                    }
                    out[i * n * n + j * n + k] = s;
                }
            }
        }
        out
    }
}

/// Covariant derivative of `field` along `direction` at `p`, as plain components.
///
/// Supported valences: scalar, vector, covector, `(1,1)` and `(0,2)`. The
/// derivative slot is contracted with `direction`.
pub fn covariant_derivative(
    conn: &ConnectionField,
    field: &TensorFieldHandle,
    direction: &[f64],
    p: &[f64],
) -> Result<Vec<f64>> {
    let n = conn.dim();
    let cp = conn.at(p)?;
    let comps = field.eval(p)?;
    let (per_slot, full) = match field.valence() {
        Valence::SCALAR => (1, (0..n).map(|i| comps[0].partial(i)).collect::<Vec<_>>()),
        Valence::VECTOR => (n, cp.nabla_vector(&comps)),
        Valence::COVECTOR => (n, cp.nabla_covector(&comps)),
        Valence::ENDO => (n * n, cp.nabla_endo(&comps)),
        Valence::BILINEAR => (n * n, cp.nabla_bilinear(&comps)),
        v => {
            return Err(GeomError::Unsupported(format!(
                "covariant derivative of valence {v}"
            )))
        }
    };
    let mut out = vec![0.0; per_slot];
    for i in 0..n {
        if direction[i] == 0.0 {
            continue;
        }
        for c in 0..per_slot {
            out[c] += direction[i] * full[i * per_slot + c].value;
        }
    }
    Ok(out)
}

/// Largest frame component of `∇g`: zero exactly for metric connections.
pub fn metric_compat_residual(conn: &ConnectionField, g: &MetricField, p: &[f64]) -> Result<f64> {
    let n = conn.dim();
    let mp = g.at(p)?;
    let cp = conn.at(p)?;
    let dg: Vec<f64> = cp.nabla_bilinear(&mp.g).iter().map(|j| j.value).collect();
    let frame = mp.frame(None)?;
    let mut worst: f64 = 0.0;
    for ea in &frame.basis {
        for eb in &frame.basis {
            for ec in &frame.basis {
                let mut s = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        for k in 0..n {
                            s += dg[i * n * n + j * n + k] * ea[i] * eb[j] * ec[k];
                        }
                    }
                }
                worst = worst.max(s.abs());
            }
        }
    }
    Ok(worst)
}

/// `(£_V g)(Y,Z) = g(∇_Y V, Z) + g(Y, ∇_Z V)` for a torsion-free connection.
pub fn lie_derivative_metric(
    conn: &ConnectionField,
    g: &MetricField,
    v: &TensorFieldHandle,
    p: &[f64],
) -> Result<Vec<f64>> {
    let cp = conn.at(p)?;
    let worst = cp.torsion().iter().fold(0.0f64, |m, t| m.max(t.value.abs()));
    let scale = cp.gamma.iter().fold(1.0f64, |m, t| m.max(t.value.abs()));
    if worst > 1e-10 * scale {
        return Err(GeomError::Misuse(format!(
            "Lie derivative through a connection with torsion {worst:e}; use the connection-based form"
        )));
    }
    let mp = g.at(p)?;
    let vj = v.eval(p)?;
    Ok(connection_lie_components(&cp, &mp.values(), &vj))
}

/// `g(∇_Y V, Z) + g(Y, ∇_Z V)` in coordinates, for any connection.
pub fn connection_lie_components(cp: &ConnectionPoint, g: &[f64], v: &[Jet]) -> Vec<f64> {
    let n = cp.n;
    let dv = cp.nabla_vector(v);
    let mut out = vec![0.0; n * n];
    for y in 0..n {
        for z in 0..n {
            let mut s = 0.0;
            for k in 0..n {
                s += g[k * n + z] * dv[y * n + k].value + g[y * n + k] * dv[z * n + k].value;
            }
            out[y * n + z] = s;
        }
    }
    out
}

use crate::connectalg::{
    curvature_from_point, levi_civita, ConnectionField, ConnectionPoint, CurvatureValue, MetricField,
    MetricPoint,
};
use crate::error::{GeomError, Result};
use crate::fieldcore::{gdot, linalg, Engine, FramePoint, Jet, TensorFieldHandle, Valence};

/// `|α|` below which the structure is considered degenerate.
pub const ALPHA_FLOOR: f64 = 1e-10;

/// The quintuple `(ξ, η, φ, α, ρ)` and `β`, held as evaluators over the chart.
///
/// `φ` follows `φX = (1/α)∇_X ξ`; `α` is the trace `div ξ / (n-1)` so that
/// it carries derivatives; `ρ = -(ξα)` and `β = -(ξρ)`.
#[derive(Debug, Clone)]
pub struct LcsStructure {
    metric: MetricField,
    connection: ConnectionField,
    xi: TensorFieldHandle,
}

/// Every structure quantity at one point.
#[derive(Debug, Clone)]
pub struct StructurePoint {
    pub n: usize,
    pub point: Vec<f64>,
    pub metric: MetricPoint,
    pub conn: ConnectionPoint,
    /// Orthonormal frame with `e_1 ∝ ξ`.
    pub frame: FramePoint,
    pub g: Vec<f64>,
    pub xi_jet: Vec<Jet>,
    pub eta_jet: Vec<Jet>,
    /// `(∇_i ξ)^k` at `i*n + k`.
    pub nabla_xi: Vec<Jet>,
    /// `φ^k_i` at `k*n + i`, from `(1/α)∇ξ`.
    pub phi_jet: Vec<Jet>,
    pub alpha_jet: Jet,
    /// `α` from the frame least-squares fit of `∇_X ξ` against `X + η(X)ξ`.
    pub alpha_ls: f64,
    /// Largest frame component of `∇_{e_a} ξ - α_ls (e_a + η(e_a) ξ)`.
    pub ls_residual: f64,
    pub rho: f64,
    pub d_rho: Vec<f64>,
    pub beta: f64,
}

impl StructurePoint {
    pub fn xi(&self) -> Vec<f64> {
        self.xi_jet.iter().map(|j| j.value).collect()
    }

    pub fn eta(&self) -> Vec<f64> {
        self.eta_jet.iter().map(|j| j.value).collect()
    }

    pub fn phi(&self) -> Vec<f64> {
        self.phi_jet.iter().map(|j| j.value).collect()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha_jet.value
    }

    pub fn d_alpha(&self) -> Vec<f64> {
        self.alpha_jet.grad[..self.n].to_vec()
    }

    /// `α² - ρ`.
    pub fn curvature_coefficient(&self) -> f64 {
        self.alpha() * self.alpha() - self.rho
    }

    pub fn eta_of(&self, x: &[f64]) -> f64 {
        linalg::pairing(&self.eta(), x)
    }

    pub fn phi_of(&self, x: &[f64]) -> Vec<f64> {
        linalg::endo_apply(&self.phi(), x)
    }

    pub fn dot(&self, x: &[f64], y: &[f64]) -> f64 {
        gdot(&self.g, x, y)
    }

    /// `X + η(X)ξ`, the algebraic form of `φX`.
    pub fn phi_algebraic(&self, x: &[f64]) -> Vec<f64> {
        linalg::lincomb(&[(1.0, x), (self.eta_of(x), &self.xi())])
    }

    pub fn frame_norm(&self, v: &[f64]) -> f64 {
        self.frame.max_norm(&self.g, v)
    }

    /// `∇_X ξ` at the point.
    pub fn nabla_xi_along(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .map(|k| (0..n).map(|i| x[i] * self.nabla_xi[i * n + k].value).sum())
            .collect()
    }

    /// Levi-Civita curvature at the point.
    pub fn curvature(&self) -> CurvatureValue {
        curvature_from_point(&self.conn)
    }

    /// `a = Σ ε_a g(φ e_a, e_a)`.
    pub fn trace_phi(&self) -> f64 {
        self.frame
            .basis
            .iter()
            .zip(&self.frame.signs)
            .map(|(e, &s)| s * self.dot(&self.phi_of(e), e))
            .sum()
    }
}

impl LcsStructure {
    pub fn metric(&self) -> &MetricField {
        &self.metric
    }

    pub fn connection(&self) -> &ConnectionField {
        &self.connection
    }

    pub fn xi_field(&self) -> &TensorFieldHandle {
        &self.xi
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    pub fn engine(&self) -> Engine {
        self.metric.engine()
    }

    /// `α` (as a jet) and `ρ` at `p`, without the frame or `β`.
    fn alpha_rho(&self, p: &[f64]) -> Result<(Jet, f64)> {
        let n = self.dim();
        let cp = self.connection.at(p)?;
        let xi = self.xi.eval(p)?;
        let nabla = cp.nabla_vector(&xi);
        let mut div = Jet::zero();
        for i in 0..n {
            div += nabla[i * n + i];
        }
        let alpha = div / (n as f64 - 1.0);
        let rho = -(0..n).map(|i| xi[i].value * alpha.grad[i]).sum::<f64>();
        Ok((alpha, rho))
    }

    /// `ρ` alone; used for differencing.
    pub fn rho_at(&self, p: &[f64]) -> Result<f64> {
        Ok(self.alpha_rho(p)?.1)
    }

    pub fn at(&self, p: &[f64]) -> Result<StructurePoint> {
        let n = self.dim();
        let metric = self.metric.at(p)?;
        let conn = self.connection.at(p)?;
        let g = metric.values();
        let xi_jet = self.xi.eval(p)?;
        let xi: Vec<f64> = xi_jet.iter().map(|j| j.value).collect();
        let frame = metric.frame(Some(&xi))?;

        let eta_jet: Vec<Jet> = (0..n)
            .map(|j| {
                let mut s = Jet::zero();
                for l in 0..n {
                    s.add_product(&metric.g[j * n + l], &xi_jet[l]);
                }
                s
            })
            .collect();
        let eta: Vec<f64> = eta_jet.iter().map(|j| j.value).collect();

        let nabla_xi = conn.nabla_vector(&xi_jet);
        let mut div = Jet::zero();
        for i in 0..n {
            div += nabla_xi[i * n + i];
        }
        let alpha_jet = div / (n as f64 - 1.0);
        if alpha_jet.value.abs() < ALPHA_FLOOR {
            return Err(GeomError::AlphaDegenerate {
                alpha: alpha_jet.value,
                point: p.to_vec(),
            });
        }

        // Least squares for α over the frame, Euclideanised components.
        let along = |x: &[f64]| -> Vec<f64> {
            (0..n)
                .map(|k| (0..n).map(|i| x[i] * nabla_xi[i * n + k].value).sum())
                .collect()
        };
        let (mut num, mut den) = (0.0, 0.0);
        let mut pairs = Vec::with_capacity(n);
        for e in &frame.basis {
            let a = frame.components(&g, &along(e));
            let b_vec = linalg::lincomb(&[(1.0, e), (linalg::pairing(&eta, e), &xi)]);
            let b = frame.components(&g, &b_vec);
            num += linalg::pairing(&a, &b);
            den += linalg::pairing(&b, &b);
            pairs.push((a, b));
        }
        let alpha_ls = num / den;
        let ls_residual = pairs
            .iter()
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - alpha_ls * y).abs()))
            .fold(0.0, f64::max);

        let phi_jet: Vec<Jet> = (0..n * n)
            .map(|idx| {
                let (k, i) = (idx / n, idx % n);
                nabla_xi[i * n + k] / alpha_jet
            })
            .collect();

        let rho = -(0..n).map(|i| xi[i] * alpha_jet.grad[i]).sum::<f64>();
        let h = self.engine().outer_step();
        let mut d_rho = vec![0.0; n];
        for i in 0..n {
            let mut q = p.to_vec();
            q[i] += h;
            let plus = self.rho_at(&q)?;
            q[i] -= 2.0 * h;
            let minus = self.rho_at(&q)?;
            d_rho[i] = (plus - minus) / (2.0 * h);
        }
        let beta = -linalg::pairing(&xi, &d_rho);

        Ok(StructurePoint {
            n,
            point: p.to_vec(),
            metric,
            conn,
            frame,
            g,
            xi_jet,
            eta_jet,
            nabla_xi,
            phi_jet,
            alpha_jet,
            alpha_ls,
            ls_residual,
            rho,
            d_rho,
            beta,
        })
    }
}

/// Recovers `(ξ, η, φ, α, ρ, β)` from `g` and a unit timelike `ξ`, verifying
/// at every point in `points` that `∇ξ` is proportional to `I + η⊗ξ`.
pub fn derive_structure(
    g: &MetricField,
    xi: &TensorFieldHandle,
    points: &[Vec<f64>],
    tolerance: f64,
) -> Result<LcsStructure> {
    if xi.valence() != Valence::VECTOR {
        return Err(GeomError::Input(format!(
            "structure field must be a vector, got valence {}",
            xi.valence()
        )));
    }
    let structure = LcsStructure {
        metric: g.clone(),
        connection: levi_civita(g),
        xi: xi.clone(),
    };
    for p in points {
        g.validate_at(p)?;
        let gv = g.values(p)?;
        let x = xi.values(p)?;
        let norm = gdot(&gv, &x, &x);
        if (norm + 1.0).abs() > tolerance {
            return Err(GeomError::NotLcs(format!(
                "ξ is not unit timelike at {p:?}: g(ξ,ξ) = {norm}"
            )));
        }
        let sp = structure.at(p)?;
        if sp.ls_residual > tolerance {
            return Err(GeomError::NotLcs(format!(
                "∇ξ is not proportional to I + η⊗ξ at {p:?} (residual {:e})",
                sp.ls_residual
            )));
        }
    }
    Ok(structure)
}

/// `a = trace φ` at `p`.
pub fn trace_phi(structure: &LcsStructure, p: &[f64]) -> Result<f64> {
    Ok(structure.at(p)?.trace_phi())
}

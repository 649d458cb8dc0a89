use crate::connectalg::CurvatureValue;
use crate::fieldcore::{gdot, linalg, Jet};

/// Structure tensors at a point, in coordinate components.
#[derive(Debug, Clone)]
pub struct StructureValues {
    pub n: usize,
    pub g: Vec<f64>,
    pub xi: Vec<f64>,
    pub eta: Vec<f64>,
    /// `φ^k_i` at `k*n + i`.
    pub phi: Vec<f64>,
    pub alpha: f64,
}

impl StructureValues {
    pub fn phi_of(&self, x: &[f64]) -> Vec<f64> {
        linalg::endo_apply(&self.phi, x)
    }

    pub fn eta_of(&self, x: &[f64]) -> f64 {
        linalg::pairing(&self.eta, x)
    }

    pub fn dot(&self, x: &[f64], y: &[f64]) -> f64 {
        gdot(&self.g, x, y)
    }

    /// `U(X,Y) = η(Y)φX - g(φX,Y)ξ`.
    pub fn u_tensor(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let phix = self.phi_of(x);
        linalg::lincomb(&[(self.eta_of(y), &phix), (-self.dot(&phix, y), &self.xi)])
    }

    /// `T(X,Y) = η(Y)φX - η(X)φY`.
    pub fn torsion(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        linalg::lincomb(&[(self.eta_of(y), &self.phi_of(x)), (-self.eta_of(x), &self.phi_of(y))])
    }

    /// `T'(X,Y) = η(X)φY - g(Y,φX)ξ`.
    pub fn torsion_dual(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let phix = self.phi_of(x);
        linalg::lincomb(&[(self.eta_of(x), &self.phi_of(y)), (-self.dot(y, &phix), &self.xi)])
    }

    /// `a = tr φ`.
    pub fn trace_phi(&self) -> f64 {
        (0..self.n).map(|i| self.phi[i * self.n + i]).sum()
    }

    /// Correction terms of the curvature transform, added to `R(X,Y)Z`:
    /// `(2α-1)[g(φX,Z)φY - g(φY,Z)φX] + α[η(Y)X - η(X)Y]η(Z) + α[g(Y,Z)η(X) - g(X,Z)η(Y)]ξ`.
    pub fn curvature_correction(&self, x: &[f64], y: &[f64], z: &[f64]) -> Vec<f64> {
        let a = self.alpha;
        let (phix, phiy) = (self.phi_of(x), self.phi_of(y));
        let (ex, ey, ez) = (self.eta_of(x), self.eta_of(y), self.eta_of(z));
        let mut out = linalg::lincomb(&[
            ((2.0 * a - 1.0) * self.dot(&phix, z), &phiy),
            (-(2.0 * a - 1.0) * self.dot(&phiy, z), &phix),
            (a * ey * ez, x),
            (-a * ex * ez, y),
        ]);
        let c = a * (self.dot(y, z) * ex - self.dot(x, z) * ey);
        for k in 0..self.n {
            out[k] += c * self.xi[k];
        }
        out
    }

    /// `R(X,Y)Z` plus the correction terms.
    pub fn curvature_rhs(&self, curv: &CurvatureValue, x: &[f64], y: &[f64], z: &[f64]) -> Vec<f64> {
        linalg::add(&curv.apply(x, y, z), &self.curvature_correction(x, y, z))
    }

    /// Trace over the first slot of the curvature RHS, stored at `y*n + z`.
    pub fn contracted_rhs(&self, curv: &CurvatureValue) -> Vec<f64> {
        let n = self.n;
        let mut s = vec![0.0; n * n];
        for y in 0..n {
            for z in 0..n {
                let (ey, ez) = (linalg::unit(n, y), linalg::unit(n, z));
                s[y * n + z] = (0..n)
                    .map(|l| self.curvature_rhs(curv, &linalg::unit(n, l), &ey, &ez)[l])
                    .sum();
            }
        }
        s
    }

    /// `g`, `η⊗η` and `g(φ·,·)` in coordinates.
    pub fn basis_tensors(&self) -> [Vec<f64>; 3] {
        let n = self.n;
        let ee: Vec<f64> = (0..n * n).map(|k| self.eta[k / n] * self.eta[k % n]).collect();
        let gphi: Vec<f64> = (0..n * n)
            .map(|k| {
                let (y, z) = (k / n, k % n);
                // g(φ∂y, ∂z) = g_{zl} φ^l_y
                (0..n).map(|l| self.g[z * n + l] * self.phi[l * n + y]).sum()
            })
            .collect();
        [self.g.clone(), ee, gphi]
    }

    /// `S + c_g g + c_η η⊗η - c_φ g(φ·,·)` in coordinates.
    pub fn ricci_rhs(&self, ricci: &[f64], cg: f64, ce: f64, cphi: f64) -> Vec<f64> {
        let [g, ee, gphi] = self.basis_tensors();
        (0..self.n * self.n)
            .map(|k| ricci[k] + cg * g[k] + ce * ee[k] - cphi * gphi[k])
            .collect()
    }

    /// The transform's Ricci coefficients `(α-1, nα-1, (2α-1)a)` for dimension `n`.
    pub fn ricci_coefficients(&self) -> (f64, f64, f64) {
        let (a, n) = (self.alpha, self.n as f64);
        (a - 1.0, n * a - 1.0, (2.0 * a - 1.0) * self.trace_phi())
    }
}

/// `Γ̄^k_{ij} = Γ^k_{ij} + η_j φ^k_i - g_{jl} φ^l_i ξ^k` as jets.
pub fn quarter_symmetric_coefficients(n: usize, gamma: &[Jet], g: &[Jet], xi: &[Jet], phi: &[Jet]) -> Vec<Jet> {
    let eta: Vec<Jet> = (0..n)
        .map(|j| {
            let mut s = Jet::zero();
            for l in 0..n {
                s.add_product(&g[j * n + l], &xi[l]);
            }
            s
        })
        .collect();
    let mut out = gamma.to_vec();
    for i in 0..n {
        for j in 0..n {
            let mut gphi = Jet::zero();
            for l in 0..n {
                gphi.add_product(&g[j * n + l], &phi[l * n + i]);
            }
            for k in 0..n {
                let idx = k * n * n + i * n + j;
                out[idx] = out[idx] + eta[j] * phi[k * n + i] - gphi * xi[k];
            }
        }
    }
    out
}

/// `φ = I + η⊗ξ` as jets, from `g` and `ξ`.
pub fn algebraic_phi(n: usize, g: &[Jet], xi: &[Jet]) -> Vec<Jet> {
    let mut phi = vec![Jet::zero(); n * n];
    for k in 0..n {
        for i in 0..n {
            let mut eta_i = Jet::zero();
            for l in 0..n {
                eta_i.add_product(&g[i * n + l], &xi[l]);
            }
            phi[k * n + i] = eta_i * xi[k] + if k == i { 1.0 } else { 0.0 };
        }
    }
    phi
}

use crate::connectalg::connection::{ConnectionField, ConnectionPoint};
use crate::error::Result;

/// `R^l_{kij}` at a point, with `R(∂_i, ∂_j)∂_k = R^l_{kij} ∂_l`.
#[derive(Debug, Clone)]
pub struct CurvatureValue {
    pub n: usize,
    /// Stored at `((l*n + k)*n + i)*n + j`.
    pub components: Vec<f64>,
}

impl CurvatureValue {
    #[inline]
    pub fn get(&self, l: usize, k: usize, i: usize, j: usize) -> f64 {
        let n = self.n;
        self.components[((l * n + k) * n + i) * n + j]
    }

    /// `R(X,Y)Z`.
    pub fn apply(&self, x: &[f64], y: &[f64], z: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n];
        for l in 0..n {
            let mut s = 0.0;
            for k in 0..n {
                if z[k] == 0.0 {
                    continue;
                }
                for i in 0..n {
                    if x[i] == 0.0 {
                        continue;
                    }
                    for j in 0..n {
                        s += self.get(l, k, i, j) * z[k] * x[i] * y[j];
                    }
                }
            }
            out[l] = s;
        }
        out
    }

    /// Trace over the first slot: `S(Y,Z) = tr(X ↦ R(X,Y)Z)`, stored at `y*n + z`.
    ///
    /// Equals `Σ ε_a g(R(e_a,Y)Z, e_a)` over any orthonormal frame.
    pub fn ricci(&self) -> Vec<f64> {
        let n = self.n;
        let mut s = vec![0.0; n * n];
        for y in 0..n {
            for z in 0..n {
                s[y * n + z] = (0..n).map(|l| self.get(l, z, l, y)).sum();
            }
        }
        s
    }
}

/// Curvature from the coordinate formula
/// `R^l_{kij} = ∂_iΓ^l_{jk} - ∂_jΓ^l_{ik} + Γ^l_{im}Γ^m_{jk} - Γ^l_{jm}Γ^m_{ik}`.
///
/// Applies unchanged to connections with torsion.
pub fn curvature_from_point(cp: &ConnectionPoint) -> CurvatureValue {
    let n = cp.n;
    let mut r = vec![0.0; n * n * n * n];
    for l in 0..n {
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut s = cp.g(l, j, k).grad[i] - cp.g(l, i, k).grad[j];
                    for m in 0..n {
                        s += cp.g(l, i, m).value * cp.g(m, j, k).value
                            - cp.g(l, j, m).value * cp.g(m, i, k).value;
                    }
                    r[((l * n + k) * n + i) * n + j] = s;
                }
            }
        }
    }
    CurvatureValue { n, components: r }
}

pub fn curvature(conn: &ConnectionField, p: &[f64]) -> Result<CurvatureValue> {
    Ok(curvature_from_point(&conn.at(p)?))
}

/// Ricci tensor of `conn` at `p` by signed trace over the first curvature slot.
///
/// Not symmetrised; torsionful connections can produce an antisymmetric part.
pub fn ricci(conn: &ConnectionField, p: &[f64]) -> Result<Vec<f64>> {
    Ok(curvature(conn, p)?.ricci())
}

/// `Σ_a ε_a g(R(e_a, Y) Z, e_a)` evaluated literally over a frame.
pub fn ricci_over_frame(
    curv: &CurvatureValue,
    g: &[f64],
    frame: &crate::fieldcore::FramePoint,
) -> Vec<f64> {
    let n = curv.n;
    let mut s = vec![0.0; n * n];
    let unit = |i: usize| {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        v
    };
    for y in 0..n {
        for z in 0..n {
            let (ey, ez) = (unit(y), unit(z));
            s[y * n + z] = frame
                .basis
                .iter()
                .zip(&frame.signs)
                .map(|(e, &eps)| eps * crate::fieldcore::gdot(g, &curv.apply(e, &ey, &ez), e))
                .sum();
        }
    }
    s
}

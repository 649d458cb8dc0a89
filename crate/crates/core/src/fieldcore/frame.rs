use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{GeomError, Result};

/// `g(u, v)` for row-major metric components.
pub fn gdot(g: &[f64], u: &[f64], v: &[f64]) -> f64 {
    let n = u.len();
    let mut s = 0.0;
    for i in 0..n {
        if u[i] == 0.0 {
            continue;
        }
        for j in 0..n {
            s += u[i] * g[i * n + j] * v[j];
        }
    }
    s
}

/// Lowers a vector: `X_i = g_ij X^j`.
pub fn lower(g: &[f64], v: &[f64]) -> Vec<f64> {
    let n = v.len();
    (0..n).map(|i| (0..n).map(|j| g[i * n + j] * v[j]).sum()).collect()
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn symmetric_eigenvalues(g: &[f64], n: usize) -> Vec<f64> {
    let m = DMatrix::from_row_slice(n, n, g);
    let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

/// Checks symmetry, nondegeneracy and signature `(-,+,...,+)`.
pub fn check_lorentzian(g: &[f64], n: usize) -> Result<()> {
    let scale = g.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
    for i in 0..n {
        for j in 0..i {
            if (g[i * n + j] - g[j * n + i]).abs() > 1e-12 * scale {
                return Err(GeomError::Signature(format!(
                    "metric is not symmetric in ({i},{j})"
                )));
            }
        }
    }
    let ev = symmetric_eigenvalues(g, n);
    let big = ev.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if ev.iter().any(|x| x.abs() <= 1e-12 * big.max(1e-300)) {
        return Err(GeomError::Signature("metric is degenerate".into()));
    }
    let negatives = ev.iter().filter(|&&x| x < 0.0).count();
    if negatives != 1 {
        return Err(GeomError::Signature(format!(
            "expected exactly one negative eigenvalue, found {negatives}"
        )));
    }
    Ok(())
}

/// An orthonormal frame at a point: `g(e_a, e_b) = signs[a] δ_ab`.
#[derive(Debug, Clone, PartialEq)]
pub struct FramePoint {
    pub point: Vec<f64>,
    pub basis: Vec<Vec<f64>>,
    pub signs: Vec<f64>,
}

impl FramePoint {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Frame components `c_a = ε_a g(v, e_a)`, so that `v = Σ c_a e_a`.
    pub fn components(&self, g: &[f64], v: &[f64]) -> Vec<f64> {
        self.basis
            .iter()
            .zip(&self.signs)
            .map(|(e, &s)| s * gdot(g, v, e))
            .collect()
    }

    /// Coordinate vector `Σ c_a e_a`.
    pub fn combine(&self, coeffs: &[f64]) -> Vec<f64> {
        let n = self.point.len();
        let mut v = vec![0.0; n];
        for (c, e) in coeffs.iter().zip(&self.basis) {
            for k in 0..n {
                v[k] += c * e[k];
            }
        }
        v
    }

    /// Largest `|g(e_a,e_b) - ε_a δ_ab|`.
    pub fn orthonormality_residual(&self, g: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (a, ea) in self.basis.iter().enumerate() {
            for (b, eb) in self.basis.iter().enumerate() {
                let target = if a == b { self.signs[a] } else { 0.0 };
                worst = worst.max((gdot(g, ea, eb) - target).abs());
            }
        }
        worst
    }

    /// Largest frame component of `v` in absolute value.
    pub fn max_norm(&self, g: &[f64], v: &[f64]) -> f64 {
        self.components(g, v)
            .into_iter()
            .fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Largest frame component `|B(e_a,e_b)|` of a bilinear form.
    pub fn bilinear_max(&self, b: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for ea in &self.basis {
            for eb in &self.basis {
                worst = worst.max(gdot(b, ea, eb).abs());
            }
        }
        worst
    }

    /// Frame components `B(e_a, e_b)` as a flat `dim x dim` array.
    pub fn bilinear_components(&self, b: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dim() * self.dim());
        for ea in &self.basis {
            for eb in &self.basis {
                out.push(gdot(b, ea, eb));
            }
        }
        out
    }
}

fn candidates(n: usize) -> Vec<Vec<f64>> {
    let unit = |i: usize| {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        v
    };
    let mut out: Vec<Vec<f64>> = (0..n).map(unit).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            for s in [1.0, -1.0] {
                let mut v = unit(i);
                v[j] = s;
                out.push(v);
            }
        }
    }
    out
}

/// Gram–Schmidt adapted to Lorentzian signature.
///
/// The timelike vector (`prefer` if given, else the first timelike coordinate
/// candidate) is placed first; the coordinate basis follows in index order.
pub fn orthonormal_frame(g: &[f64], point: &[f64], prefer: Option<&[f64]>) -> Result<FramePoint> {
    let n = point.len();
    if g.len() != n * n {
        return Err(GeomError::Input(format!(
            "metric has {} components for dimension {n}",
            g.len()
        )));
    }
    check_lorentzian(g, n)?;

    let first = match prefer {
        Some(v) => {
            let q = gdot(g, v, v);
            let scale = v.iter().map(|x| x * x).sum::<f64>();
            if q.partial_cmp(&(-1e-12 * scale.max(1e-300))) != Some(std::cmp::Ordering::Less) {
                return Err(GeomError::Input(format!(
                    "preferred vector is not timelike (g(v,v) = {q:e})"
                )));
            }
            v.to_vec()
        }
        None => match candidates(n).into_iter().find(|v| gdot(g, v, v) < 0.0) {
            Some(v) => v,
            None => {
                let m = DMatrix::from_row_slice(n, n, g);
                let eig = SymmetricEigen::new(m);
                let (k, _) = eig
                    .eigenvalues
                    .iter()
                    .enumerate()
                    .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                    .unwrap();
                eig.eigenvectors.column(k).iter().copied().collect()
            }
        },
    };

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut signs: Vec<f64> = Vec::with_capacity(n);
    let q = gdot(g, &first, &first);
    basis.push(first.iter().map(|x| x / (-q).sqrt()).collect());
    signs.push(-1.0);

    for cand in candidates(n) {
        if basis.len() == n {
            break;
        }
        let mut w = cand.clone();
        for _ in 0..2 {
            for (e, &s) in basis.iter().zip(&signs) {
                let c = s * gdot(g, &w, e);
                for k in 0..n {
                    w[k] -= c * e[k];
                }
            }
        }
        let q = gdot(g, &w, &w);
        let euclid: f64 = w.iter().map(|x| x * x).sum();
        if euclid < 1e-20 || q.abs() <= 1e-8 * euclid {
            continue;
        }
        if q < 0.0 {
            return Err(GeomError::Signature(
                "found a second timelike direction".into(),
            ));
        }
        let norm = q.sqrt();
        basis.push(w.iter().map(|x| x / norm).collect());
        signs.push(1.0);
    }
    if basis.len() != n {
        return Err(GeomError::Signature("could not complete the frame".into()));
    }
    Ok(FramePoint {
        point: point.to_vec(),
        basis,
        signs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minkowski(n: usize) -> Vec<f64> {
        let mut g = vec![0.0; n * n];
        for i in 0..n {
            g[i * n + i] = if i == 0 { -1.0 } else { 1.0 };
        }
        g
    }

    #[test]
    fn minkowski_with_dt() {
        let g = minkowski(5);
        let mut dt = vec![0.0; 5];
        dt[0] = 1.0;
        let f = orthonormal_frame(&g, &[0.0; 5], Some(&dt)).unwrap();
        assert_eq!(f.signs, vec![-1.0, 1.0, 1.0, 1.0, 1.0]);
        for (i, e) in f.basis.iter().enumerate() {
            for (k, &x) in e.iter().enumerate() {
                assert_eq!(x, if i == k { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn grw_at_t_zero_uses_coordinate_fibers() {
        // -dt^2 + e^{2t} δ at t = 0 is Minkowski; away from zero the fibers rescale.
        for t in [0.0f64, 0.7] {
            let mut g = minkowski(4);
            for i in 1..4 {
                g[i * 4 + i] = (2.0 * t).exp();
            }
            let f = orthonormal_frame(&g, &[t, 0.0, 0.0, 0.0], None).unwrap();
            for i in 1..4 {
                for k in 0..4 {
                    let expect = if i == k { (-t).exp() } else { 0.0 };
                    assert!((f.basis[i][k] - expect).abs() < 1e-15);
                }
            }
            assert!(f.orthonormality_residual(&g) < 1e-12);
        }
    }

    #[test]
    fn spacelike_preference_is_input_error() {
        let g = minkowski(5);
        let mut dx = vec![0.0; 5];
        dx[1] = 1.0;
        assert!(matches!(
            orthonormal_frame(&g, &[0.0; 5], Some(&dx)),
            Err(GeomError::Input(_))
        ));
    }

    #[test]
    fn riemannian_and_degenerate_rejected() {
        let g = vec![1.0, 0.0, 0.0, 1.0];
        assert!(matches!(orthonormal_frame(&g, &[0.0, 0.0], None), Err(GeomError::Signature(_))));
        let g = vec![-1.0, 0.0, 0.0, 0.0];
        assert!(matches!(orthonormal_frame(&g, &[0.0, 0.0], None), Err(GeomError::Signature(_))));
    }

    #[test]
    fn null_coordinate_basis_still_completes() {
        // g = dt dx + dy^2: both coordinate directions t, x are null.
        let g = vec![0.0, 0.5, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0, 1.0];
        let f = orthonormal_frame(&g, &[0.0; 3], None).unwrap();
        assert!(f.orthonormality_residual(&g) < 1e-12);
        assert_eq!(f.signs[0], -1.0);
    }
}

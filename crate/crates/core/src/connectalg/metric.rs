use crate::error::{GeomError, Result};
use crate::fieldcore::frame::{check_lorentzian, orthonormal_frame, FramePoint};
use crate::fieldcore::{ChartDomain, Engine, Jet, TensorFieldHandle, Valence};

/// Expected signature of a metric field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Signature {
    /// `(-,+,...,+)`.
    Lorentzian,
    /// Positive definite; used for spacelike slices and fiber test blocks.
    Riemannian,
}

/// A symmetric nondegenerate `(0,2)` field.
#[derive(Debug, Clone)]
pub struct MetricField {
    field: TensorFieldHandle,
    signature: Signature,
}

/// Metric components and inverse at one point, with jets.
#[derive(Debug, Clone)]
pub struct MetricPoint {
    pub n: usize,
    pub point: Vec<f64>,
    pub g: Vec<Jet>,
    pub ginv: Vec<Jet>,
}

impl MetricField {
    pub fn new(field: TensorFieldHandle, signature: Signature) -> Result<Self> {
        if field.valence() != Valence::BILINEAR {
            return Err(GeomError::Input(format!(
                "metric must have valence (0,2), got {}",
                field.valence()
            )));
        }
        Ok(MetricField {
            field: field.declare_symmetric(),
            signature,
        })
    }

    pub fn lorentzian(field: TensorFieldHandle) -> Result<Self> {
        Self::new(field, Signature::Lorentzian)
    }

    pub fn with_engine(&self, engine: Engine) -> Self {
        MetricField {
            field: self.field.clone().with_engine(engine),
            signature: self.signature,
        }
    }

    pub fn field(&self) -> &TensorFieldHandle {
        &self.field
    }

    pub fn signature(&self) -> Signature {
        self.signature
    }

    pub fn dim(&self) -> usize {
        self.field.dim()
    }

    pub fn domain(&self) -> &ChartDomain {
        self.field.domain()
    }

    pub fn engine(&self) -> Engine {
        self.field.engine()
    }

    pub fn values(&self, p: &[f64]) -> Result<Vec<f64>> {
        self.field.values(p)
    }

    /// Components, inverse and jets at `p`; fails on a degenerate matrix.
    pub fn at(&self, p: &[f64]) -> Result<MetricPoint> {
        let n = self.dim();
        let g = self.field.eval(p)?;
        let ginv = invert_jets(&g, n).ok_or_else(|| {
            GeomError::Signature(format!("metric is degenerate at {p:?}"))
        })?;
        Ok(MetricPoint {
            n,
            point: p.to_vec(),
            g,
            ginv,
        })
    }

    /// Checks symmetry, nondegeneracy and the declared signature at `p`.
    pub fn validate_at(&self, p: &[f64]) -> Result<()> {
        let n = self.dim();
        let g = self.values(p)?;
        match self.signature {
            Signature::Lorentzian => check_lorentzian(&g, n),
            Signature::Riemannian => {
                let ev = crate::fieldcore::frame::symmetric_eigenvalues(&g, n);
                if ev[0] > 1e-12 * ev[n - 1].abs().max(1.0) {
                    Ok(())
                } else {
                    Err(GeomError::Signature(format!(
                        "metric is not positive definite at {p:?}"
                    )))
                }
            }
        }
    }
}

impl MetricPoint {
    pub fn values(&self) -> Vec<f64> {
        self.g.iter().map(|j| j.value).collect()
    }

    pub fn inverse_values(&self) -> Vec<f64> {
        self.ginv.iter().map(|j| j.value).collect()
    }

    /// Orthonormal frame, timelike vector first (Lorentzian) or plain
    /// Gram–Schmidt (Riemannian).
    pub fn frame(&self, prefer: Option<&[f64]>) -> Result<FramePoint> {
        let g = self.values();
        match orthonormal_frame(&g, &self.point, prefer) {
            Ok(f) => Ok(f),
            Err(GeomError::Signature(msg)) => {
                riemannian_frame(&g, &self.point).ok_or(GeomError::Signature(msg))
            }
            Err(e) => Err(e),
        }
    }
}

fn riemannian_frame(g: &[f64], point: &[f64]) -> Option<FramePoint> {
    let n = point.len();
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for i in 0..n {
        let mut w = vec![0.0; n];
        w[i] = 1.0;
        for _ in 0..2 {
            for e in &basis {
                let c = crate::fieldcore::gdot(g, &w, e);
                for k in 0..n {
                    w[k] -= c * e[k];
                }
            }
        }
        let q = crate::fieldcore::gdot(g, &w, &w);
        if q <= 1e-14 {
            return None;
        }
        basis.push(w.iter().map(|x| x / q.sqrt()).collect());
    }
    Some(FramePoint {
        point: point.to_vec(),
        basis,
        signs: vec![1.0; n],
    })
}

/// Gauss–Jordan inverse of an `n x n` jet matrix with partial pivoting on values.
pub fn invert_jets(a: &[Jet], n: usize) -> Option<Vec<Jet>> {
    let mut m: Vec<Jet> = a.to_vec();
    let mut inv: Vec<Jet> = (0..n * n)
        .map(|k| Jet::constant(if k / n == k % n { 1.0 } else { 0.0 }))
        .collect();
    let scale = a.iter().fold(0.0f64, |s, j| s.max(j.value.abs())).max(1e-300);
    for col in 0..n {
        let pivot = (col..n).max_by(|&r, &s| {
            m[r * n + col]
                .value
                .abs()
                .partial_cmp(&m[s * n + col].value.abs())
                .unwrap()
        })?;
        if m[pivot * n + col].value.abs() <= 1e-13 * scale {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                m.swap(pivot * n + k, col * n + k);
                inv.swap(pivot * n + k, col * n + k);
            }
        }
        let r = m[col * n + col].recip();
        for k in 0..n {
            m[col * n + k] *= r;
            inv[col * n + k] *= r;
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = m[row * n + col];
            if factor.value == 0.0 && factor.is_constant() {
                continue;
            }
            for k in 0..n {
                let a = m[col * n + k];
                let b = inv[col * n + k];
                m[row * n + k] -= factor * a;
                inv[row * n + k] -= factor * b;
            }
        }
    }
    Some(inv)
}

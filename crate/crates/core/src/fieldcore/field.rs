use std::fmt;
use std::sync::Arc;

use crate::error::{GeomError, Result};
use crate::fieldcore::chart::ChartDomain;
use crate::fieldcore::jet::Jet;

/// Step for first-derivative central differences.
pub const FD_STEP: f64 = 1e-5;
/// Step for second-derivative stencils.
pub const FD_STEP2: f64 = 1e-4;

/// Components as functions of coordinate jets; composes with other jet maps.
pub type JetFn = Arc<dyn Fn(&[Jet]) -> Result<Vec<Jet>> + Send + Sync>;
/// Components with jets at a concrete point.
pub type PointFn = Arc<dyn Fn(&[f64]) -> Result<Vec<Jet>> + Send + Sync>;

/// `(r, s)`: `r` contravariant and `s` covariant slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Valence {
    pub contra: usize,
    pub co: usize,
}

impl Valence {
    pub const SCALAR: Valence = Valence { contra: 0, co: 0 };
    pub const VECTOR: Valence = Valence { contra: 1, co: 0 };
    pub const COVECTOR: Valence = Valence { contra: 0, co: 1 };
    pub const ENDO: Valence = Valence { contra: 1, co: 1 };
    pub const BILINEAR: Valence = Valence { contra: 0, co: 2 };

    pub fn rank(&self) -> usize {
        self.contra + self.co
    }
}

impl fmt::Display for Valence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.contra, self.co)
    }
}

/// How derivatives of field components are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Engine {
    /// Forward-mode order-2 jets (exact).
    #[default]
    Jet,
    /// Central finite differences on component values.
    Fd,
}

impl Engine {
    /// Pass threshold for identity residuals under this engine.
    pub fn tolerance(&self) -> f64 {
        match self {
            Engine::Jet => 1e-8,
            Engine::Fd => 1e-4,
        }
    }

    /// Step for differencing quantities that are already first derivatives of
    /// the metric (e.g. the scalar `rho`).
    pub fn outer_step(&self) -> f64 {
        match self {
            Engine::Jet => FD_STEP,
            Engine::Fd => 1e-3,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Engine::Jet => "jet",
            Engine::Fd => "fd",
        }
    }
}

#[derive(Clone)]
enum Evaluator {
    Composable(JetFn),
    Pointwise(PointFn),
}

/// A smooth field of multilinear components on a chart.
///
/// Components are stored row-major over the index slots, contravariant slots
/// first, so a `(1,2)` field `T^k_{ij}` lives at `k*n*n + i*n + j`.
#[derive(Clone)]
pub struct TensorFieldHandle {
    valence: Valence,
    domain: ChartDomain,
    symmetric: bool,
    engine: Engine,
    evaluator: Evaluator,
}

impl fmt::Debug for TensorFieldHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TensorFieldHandle")
            .field("valence", &self.valence)
            .field("dim", &self.dim())
            .field("symmetric", &self.symmetric)
            .field("engine", &self.engine)
            .finish()
    }
}

impl TensorFieldHandle {
    pub fn from_jet_fn(valence: Valence, domain: ChartDomain, f: JetFn) -> Self {
        TensorFieldHandle {
            valence,
            domain,
            symmetric: false,
            engine: Engine::Jet,
            evaluator: Evaluator::Composable(f),
        }
    }

    pub fn from_point_fn(valence: Valence, domain: ChartDomain, f: PointFn) -> Self {
        TensorFieldHandle {
            valence,
            domain,
            symmetric: false,
            engine: Engine::Jet,
            evaluator: Evaluator::Pointwise(f),
        }
    }

    /// A field with the same components everywhere.
    pub fn constant(valence: Valence, domain: ChartDomain, components: Vec<f64>) -> Self {
        let comps: Vec<Jet> = components.into_iter().map(Jet::constant).collect();
        Self::from_jet_fn(valence, domain, Arc::new(move |_| Ok(comps.clone())))
    }

    pub fn declare_symmetric(mut self) -> Self {
        self.symmetric = true;
        self
    }

    pub fn with_engine(mut self, engine: Engine) -> Self {
        self.engine = engine;
        self
    }

    pub fn valence(&self) -> Valence {
        self.valence
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn domain(&self) -> &ChartDomain {
        &self.domain
    }

    pub fn engine(&self) -> Engine {
        self.engine
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn component_count(&self) -> usize {
        self.dim().pow(self.valence.rank() as u32)
    }

    /// Components with order-2 jets at `p`, using the configured engine.
    pub fn eval(&self, p: &[f64]) -> Result<Vec<Jet>> {
        self.domain.check(p)?;
        match self.engine {
            Engine::Jet => self.eval_exact(p),
            Engine::Fd => self.eval_fd(p),
        }
    }

    /// Plain component values at `p`.
    pub fn values(&self, p: &[f64]) -> Result<Vec<f64>> {
        self.domain.check(p)?;
        Ok(self.eval_exact(p)?.iter().map(|j| j.value).collect())
    }

    /// Evaluate on arbitrary input jets (composition with a coordinate map).
    pub fn eval_composed(&self, coords: &[Jet]) -> Result<Vec<Jet>> {
        match &self.evaluator {
            Evaluator::Composable(f) => f(coords),
            Evaluator::Pointwise(_) => Err(GeomError::Unsupported(
                "field was built pointwise and cannot be composed".into(),
            )),
        }
    }

    pub fn is_composable(&self) -> bool {
        matches!(self.evaluator, Evaluator::Composable(_))
    }

    fn eval_exact(&self, p: &[f64]) -> Result<Vec<Jet>> {
        let out = match &self.evaluator {
            Evaluator::Composable(f) => f(&Jet::variables(p))?,
            Evaluator::Pointwise(f) => f(p)?,
        };
        if out.len() != self.component_count() {
            return Err(GeomError::Input(format!(
                "field of valence {} returned {} components, expected {}",
                self.valence,
                out.len(),
                self.component_count()
            )));
        }
        Ok(out)
    }

    fn raw_values(&self, p: &[f64]) -> Result<Vec<f64>> {
        Ok(self.eval_exact(p)?.iter().map(|j| j.value).collect())
    }

    fn eval_fd(&self, p: &[f64]) -> Result<Vec<Jet>> {
        let n = self.dim();
        let center = self.raw_values(p)?;
        let mut out: Vec<Jet> = center.iter().map(|&v| Jet::constant(v)).collect();
        let shifted = |offsets: &[(usize, f64)]| -> Result<Vec<f64>> {
            let mut q = p.to_vec();
            for &(i, d) in offsets {
                q[i] += d;
            }
            self.raw_values(&q)
        };
        let (h, h2) = (FD_STEP, FD_STEP2);
        for i in 0..n {
            let plus = shifted(&[(i, h)])?;
            let minus = shifted(&[(i, -h)])?;
            let plus2 = shifted(&[(i, h2)])?;
            let minus2 = shifted(&[(i, -h2)])?;
            for c in 0..out.len() {
                out[c].grad[i] = (plus[c] - minus[c]) / (2.0 * h);
                out[c].hess[i][i] = (plus2[c] - 2.0 * center[c] + minus2[c]) / (h2 * h2);
            }
            for j in 0..i {
                let pp = shifted(&[(i, h2), (j, h2)])?;
                let pm = shifted(&[(i, h2), (j, -h2)])?;
                let mp = shifted(&[(i, -h2), (j, h2)])?;
                let mm = shifted(&[(i, -h2), (j, -h2)])?;
                for c in 0..out.len() {
                    let d = (pp[c] - pm[c] - mp[c] + mm[c]) / (4.0 * h2 * h2);
                    out[c].hess[i][j] = d;
                    out[c].hess[j][i] = d;
                }
            }
        }
        Ok(out)
    }

    /// Largest `|T_ij - T_ji|` at `p` for a bilinear field.
    pub fn max_asymmetry(&self, p: &[f64]) -> Result<f64> {
        if self.valence != Valence::BILINEAR {
            return Err(GeomError::Unsupported(format!(
                "symmetry check on valence {}",
                self.valence
            )));
        }
        let n = self.dim();
        let v = self.values(p)?;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..i {
                worst = worst.max((v[i * n + j] - v[j * n + i]).abs());
            }
        }
        Ok(worst)
    }
}

/// Components of `field` at `p` with first and second partial derivatives.
pub fn jet_eval(field: &TensorFieldHandle, p: &[f64]) -> Result<Vec<Jet>> {
    field.eval(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line() -> ChartDomain {
        ChartDomain::new(vec!["t".into(), "x".into()], vec![(-5.0, 5.0), (-5.0, 5.0)]).unwrap()
    }

    fn scalar(f: impl Fn(&[Jet]) -> Jet + Send + Sync + 'static) -> TensorFieldHandle {
        TensorFieldHandle::from_jet_fn(Valence::SCALAR, line(), Arc::new(move |x| Ok(vec![f(x)])))
    }

    #[test]
    fn constant_field_has_zero_jets() {
        let c = TensorFieldHandle::constant(Valence::SCALAR, line(), vec![4.0]);
        let j = jet_eval(&c, &[1.0, 2.0]).unwrap();
        assert_eq!(j[0].value, 4.0);
        assert!(j[0].is_constant());
    }

    #[test]
    fn t_squared_at_three() {
        let f = scalar(|x| x[0] * x[0]);
        let j = f.eval(&[3.0, 0.0]).unwrap()[0];
        assert_eq!((j.value, j.grad[0], j.hess[0][0]), (9.0, 6.0, 2.0));
    }

    #[test]
    fn exp_t_at_zero() {
        let f = scalar(|x| x[0].exp());
        let j = f.eval(&[0.0, 0.0]).unwrap()[0];
        assert_eq!((j.value, j.grad[0], j.hess[0][0]), (1.0, 1.0, 1.0));
    }

    #[test]
    fn outside_domain_is_rejected() {
        let f = scalar(|x| x[0]);
        assert!(matches!(f.eval(&[9.0, 0.0]), Err(GeomError::Domain { .. })));
    }

    #[test]
    fn fd_engine_tracks_jets() {
        let f = scalar(|x| (x[0] * x[1]).sin() + x[0].exp());
        let p = [0.4, -0.3];
        let exact = f.eval(&p).unwrap()[0];
        let fd = f.clone().with_engine(Engine::Fd).eval(&p).unwrap()[0];
        for i in 0..2 {
            assert!((exact.grad[i] - fd.grad[i]).abs() < 1e-8);
            for j in 0..2 {
                assert!((exact.hess[i][j] - fd.hess[i][j]).abs() < 1e-6);
            }
        }
    }
}

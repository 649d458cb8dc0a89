use std::sync::Arc;

use crate::connectalg::MetricField;
use crate::error::{GeomError, Result};
use crate::expr::CompiledExpr;
use crate::fieldcore::{ChartDomain, Jet, TensorFieldHandle, Valence};

/// Grid resolution used to gate `f > 0` and `f' ≠ 0` on the time interval.
const WARP_GRID: usize = 4000;

/// Metric on the fiber `F` of `I ×_f F`.
#[derive(Debug, Clone, PartialEq)]
pub enum Fiber {
    /// `δ_ab` in coordinates `x1..x_{n-1}`.
    Flat,
    /// `dθ² + sin²θ dφ²` on the first two fiber coordinates, flat on the rest.
    SphereBlock,
    /// Row-major `(n-1)²` expression strings over `x1..x_{n-1}`.
    Explicit(Vec<String>),
}

impl Fiber {
    pub fn coordinate_names(&self, fiber_dim: usize) -> Vec<String> {
        match self {
            Fiber::SphereBlock => {
                let mut names = vec!["theta".to_string(), "phi".to_string()];
                names.extend((3..=fiber_dim).map(|i| format!("x{i}")));
                names
            }
            _ => (1..=fiber_dim).map(|i| format!("x{i}")).collect(),
        }
    }

    fn default_bounds(&self, index: usize) -> (f64, f64) {
        match (self, index) {
            (Fiber::SphereBlock, 0) => (0.4, 2.6),
            (Fiber::SphereBlock, 1) => (0.0, 6.0),
            _ => (0.0, 1.0),
        }
    }
}

/// A generalized Robertson–Walker chart `-dt² + f(t)² g_F`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrwSpec {
    pub dim: usize,
    pub warp: String,
    pub t_interval: (f64, f64),
    pub fiber: Fiber,
    /// Fiber coordinate boxes; defaults per fiber kind when `None`.
    pub fiber_box: Option<Vec<(f64, f64)>>,
}

impl GrwSpec {
    pub fn flat(dim: usize, warp: &str, t_interval: (f64, f64)) -> Self {
        GrwSpec {
            dim,
            warp: warp.to_string(),
            t_interval,
            fiber: Fiber::Flat,
            fiber_box: None,
        }
    }

    pub fn coordinate_names(&self) -> Vec<String> {
        let mut names = vec!["t".to_string()];
        names.extend(self.fiber.coordinate_names(self.dim.saturating_sub(1)));
        names
    }
}

/// Output of [`build_grw`]: the metric and the candidate `ξ = ∂_t`.
#[derive(Debug, Clone)]
pub struct GrwManifold {
    pub spec: GrwSpec,
    pub metric: MetricField,
    pub xi: TensorFieldHandle,
    pub warp: CompiledExpr,
}

impl GrwManifold {
    pub fn domain(&self) -> &ChartDomain {
        self.metric.domain()
    }

    pub fn dim(&self) -> usize {
        self.spec.dim
    }

    /// `f(t)`, `f'(t)`, `f''(t)`.
    pub fn warp_jet(&self, t: f64) -> Result<Jet> {
        self.warp
            .eval(&[Jet::variable(t, 0)])
            .map_err(|e| GeomError::Expr(e.to_string()))
    }
}

enum FiberMetric {
    Flat,
    Sphere,
    Explicit(Vec<CompiledExpr>),
}

/// Builds `-dt² + f(t)² g_F` and checks that `α = f'/f` cannot vanish on the chart.
pub fn build_grw(spec: &GrwSpec) -> Result<GrwManifold> {
    let n = spec.dim;
    if n < 2 {
        return Err(GeomError::Input(format!("GRW dimension must be at least 2, got {n}")));
    }
    let fdim = n - 1;
    if spec.fiber == Fiber::SphereBlock && fdim < 2 {
        return Err(GeomError::Input("sphere fiber block needs dimension ≥ 3".into()));
    }
    let names = spec.coordinate_names();
    let warp = CompiledExpr::parse(&spec.warp, &["t".to_string()])
        .map_err(|e| GeomError::Expr(format!("warp: {e}")))?;

    let (t0, t1) = spec.t_interval;
    let mut bounds = vec![(t0, t1)];
    match &spec.fiber_box {
        Some(b) if b.len() == fdim => bounds.extend(b.iter().copied()),
        Some(b) => {
            return Err(GeomError::Input(format!(
                "fiber box has {} intervals, fiber dimension is {fdim}",
                b.len()
            )))
        }
        None => bounds.extend((0..fdim).map(|i| spec.fiber.default_bounds(i))),
    }
    let domain = ChartDomain::new(names.clone(), bounds)?;

    gate_warp(&warp, t0, t1)?;

    let fiber = match &spec.fiber {
        Fiber::Flat => FiberMetric::Flat,
        Fiber::SphereBlock => FiberMetric::Sphere,
        Fiber::Explicit(entries) => {
            if entries.len() != fdim * fdim {
                return Err(GeomError::Input(format!(
                    "explicit fiber needs {} entries, got {}",
                    fdim * fdim,
                    entries.len()
                )));
            }
            let fnames = &names[1..];
            let compiled = entries
                .iter()
                .map(|e| {
                    CompiledExpr::parse(e, fnames).map_err(|err| GeomError::Expr(format!("fiber entry \"{e}\": {err}")))
                })
                .collect::<Result<Vec<_>>>()?;
            for a in 0..fdim {
                for b in 0..a {
                    if compiled[a * fdim + b].ast() != compiled[b * fdim + a].ast() {
                        return Err(GeomError::Input(format!(
                            "explicit fiber metric is not symmetric in ({a},{b})"
                        )));
                    }
                }
            }
            FiberMetric::Explicit(compiled)
        }
    };

    let warp_fn = warp.clone();
    let g = move |x: &[Jet]| -> Result<Vec<Jet>> {
        let f = warp_fn
            .eval(&x[..1])
            .map_err(|e| GeomError::Expr(e.to_string()))?;
        let f2 = f * f;
        let mut g = vec![Jet::zero(); n * n];
        g[0] = Jet::constant(-1.0);
        match &fiber {
            FiberMetric::Flat => {
                for a in 1..n {
                    g[a * n + a] = f2;
                }
            }
            FiberMetric::Sphere => {
                for a in 1..n {
                    g[a * n + a] = f2;
                }
                let s = x[1].sin();
                g[2 * n + 2] = f2 * s * s;
            }
            FiberMetric::Explicit(entries) => {
                for a in 0..fdim {
                    for b in 0..fdim {
                        let e = entries[a * fdim + b]
                            .eval(&x[1..])
                            .map_err(|e| GeomError::Expr(e.to_string()))?;
                        g[(a + 1) * n + b + 1] = f2 * e;
                    }
                }
            }
        }
        Ok(g)
    };
    let field = TensorFieldHandle::from_jet_fn(Valence::BILINEAR, domain.clone(), Arc::new(g));
    let metric = MetricField::lorentzian(field)?;
    let mut dt = vec![0.0; n];
    dt[0] = 1.0;
    let xi = TensorFieldHandle::constant(Valence::VECTOR, domain, dt);
    Ok(GrwManifold {
        spec: spec.clone(),
        metric,
        xi,
        warp,
    })
}

fn gate_warp(warp: &CompiledExpr, t0: f64, t1: f64) -> Result<()> {
    let mut prev: Option<f64> = None;
    for k in 0..=WARP_GRID {
        let t = t0 + (t1 - t0) * k as f64 / WARP_GRID as f64;
        let j = warp
            .eval(&[Jet::variable(t, 0)])
            .map_err(|e| GeomError::Expr(format!("warp at t={t}: {e}")))?;
        if j.value <= 0.0 {
            return Err(GeomError::Structure(format!(
                "warp f must be positive; f({t}) = {}",
                j.value
            )));
        }
        let d = j.grad[0];
        if d.abs() < 1e-10 || prev.is_some_and(|p| p.signum() != d.signum()) {
            return Err(GeomError::Structure(format!(
                "f' vanishes on [{t0}, {t1}] near t = {t}; alpha = f'/f would be zero"
            )));
        }
        prev = Some(d);
    }
    Ok(())
}

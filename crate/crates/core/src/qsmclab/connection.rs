use std::sync::Arc;

use crate::connectalg::{
    connection_lie_components, curvature_from_point, metric_compat_residual, ConnectionField, ConnectionPoint,
    Provenance,
};
use crate::error::{GeomError, Result};
use crate::fieldcore::{linalg, Jet};
use crate::lcsstruct::{LcsStructure, StructurePoint};
use crate::qsmclab::algebra::{quarter_symmetric_coefficients, StructureValues};
use crate::qsmclab::fit::{fit_coefficients, BasisSample, CoefficientFit};
use crate::report::{
    entries_from_rows, map_points, point_rng, random_coeffs, CheckEntry, CheckReport, VerifyConfig,
};

/// Frame norm of `dα` below which α counts as constant, for the jet engine.
pub const ALPHA_CONSTANT_GATE: f64 = 1e-10;

/// The constancy gate scaled with the engine tolerance (FD noise in `dα` is ~1e-8).
pub fn alpha_gate(engine: crate::fieldcore::Engine) -> f64 {
    ALPHA_CONSTANT_GATE * engine.tolerance() / crate::fieldcore::Engine::Jet.tolerance()
}

/// The quarter-symmetric metric connection `∇̄_X Y = ∇_X Y + η(Y)φX - g(φX,Y)ξ`.
#[derive(Debug, Clone)]
pub struct QsmConnection {
    structure: LcsStructure,
    field: ConnectionField,
}

impl QsmConnection {
    pub fn structure(&self) -> &LcsStructure {
        &self.structure
    }

    pub fn field(&self) -> &ConnectionField {
        &self.field
    }

    pub fn base(&self) -> &ConnectionField {
        self.structure.connection()
    }

    pub fn at(&self, p: &[f64]) -> Result<ConnectionPoint> {
        self.field.at(p)
    }
}

impl From<&StructurePoint> for StructureValues {
    fn from(st: &StructurePoint) -> Self {
        StructureValues {
            n: st.n,
            g: st.g.clone(),
            xi: st.xi(),
            eta: st.eta(),
            phi: st.phi(),
            alpha: st.alpha(),
        }
    }
}

/// Builds `Γ̄` from the structure's Levi-Civita connection, `ξ` and `φ = ∇ξ/α`.
pub fn qsm_connection(structure: &LcsStructure) -> QsmConnection {
    let s = structure.clone();
    let n = structure.dim();
    let coeffs = Arc::new(move |p: &[f64]| -> Result<Vec<Jet>> {
        let mp = s.metric().at(p)?;
        let cp = s.connection().at(p)?;
        let xi = s.xi_field().eval(p)?;
        let nabla = cp.nabla_vector(&xi);
        let mut div = Jet::zero();
        for i in 0..n {
            div += nabla[i * n + i];
        }
        let alpha = div / (n as f64 - 1.0);
        if alpha.value.abs() < crate::lcsstruct::ALPHA_FLOOR {
            return Err(GeomError::AlphaDegenerate {
                alpha: alpha.value,
                point: p.to_vec(),
            });
        }
        let phi: Vec<Jet> = (0..n * n).map(|idx| nabla[(idx % n) * n + idx / n] / alpha).collect();
        Ok(quarter_symmetric_coefficients(n, &cp.gamma, &mp.g, &xi, &phi))
    });
    QsmConnection {
        structure: structure.clone(),
        field: ConnectionField::new(structure.metric().domain().clone(), Provenance::QuarterSymmetric, coeffs),
    }
}

/// `(£̄_V g)(Y,Z) = g(∇̄_Y V, Z) + g(Y, ∇̄_Z V)`, the connection-based form.
pub fn connection_lie(cp: &ConnectionPoint, g: &[f64], v: &[Jet]) -> Vec<f64> {
    connection_lie_components(cp, g, v)
}

/// `T'` recovered from `g(T'(X,Y),Z) = g(T(Z,X),Y)` by raising the free slot.
fn torsion_dual_from_adjoint(sv: &StructureValues, ginv: &[f64], x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = sv.n;
    let lowered: Vec<f64> = (0..n).map(|z| sv.dot(&sv.torsion(&linalg::unit(n, z), x), y)).collect();
    (0..n).map(|k| (0..n).map(|z| ginv[k * n + z] * lowered[z]).sum()).collect()
}

pub const CONNECTION_CHECKS: [(&str, &str); 6] = [
    ("eq_1_2", "T̄(X,Y) = η(Y)φX - η(X)φY"),
    ("qsmc_metric", "∇̄g = 0"),
    ("eq_2_26", "T'(X,Y) = η(X)φY - g(Y,φX)ξ"),
    ("eq_2_27", "∇̄_X Y - ∇_X Y = U(X,Y) = ½[T(X,Y) + T'(X,Y) + T'(Y,X)] = η(Y)φX - g(Y,φX)ξ"),
    ("qsmc_nabla_xi", "∇̄_X ξ = (α-1)φX"),
    ("qsmc_lie_xi", "(£̄_ξ g)(Y,Z) = 2(α-1)[g(Y,Z) + η(Y)η(Z)]"),
];

/// Torsion, metric compatibility, the U-tensor chain and `∇̄ξ` at every sample.
pub fn verify_qsm_connection(qsm: &QsmConnection, points: &[Vec<f64>], cfg: &VerifyConfig) -> CheckReport {
    let rows: Vec<Result<Vec<f64>>> = map_points(points, cfg.parallel, |i, p| {
        let st = qsm.structure.at(p)?;
        let qp = qsm.at(p)?;
        let sv = StructureValues::from(&st);
        let ginv = st.metric.inverse_values();
        let n = st.n;
        let mut rng = point_rng(cfg.seed, i);
        let mut r = vec![0.0f64; 6];
        let xi_dot = qp.nabla_vector(&st.xi_jet);
        for _ in 0..cfg.trials {
            let x = st.frame.combine(&random_coeffs(&mut rng, n));
            let y = st.frame.combine(&random_coeffs(&mut rng, n));
            r[0] = r[0].max(st.frame_norm(&linalg::sub(&qp.torsion_apply(&x, &y), &sv.torsion(&x, &y))));
            let tdual = torsion_dual_from_adjoint(&sv, &ginv, &x, &y);
            r[2] = r[2].max(st.frame_norm(&linalg::sub(&tdual, &sv.torsion_dual(&x, &y))));
            let diff = linalg::sub(&qp.apply(&x, &y), &st.conn.apply(&x, &y));
            let tdual_yx = torsion_dual_from_adjoint(&sv, &ginv, &y, &x);
            let u_chain = linalg::lincomb(&[(0.5, &sv.torsion(&x, &y)), (0.5, &tdual), (0.5, &tdual_yx)]);
            let u = sv.u_tensor(&x, &y);
            r[3] = r[3]
                .max(st.frame_norm(&linalg::sub(&diff, &u)))
                .max(st.frame_norm(&linalg::sub(&u_chain, &u)));
            let along: Vec<f64> = (0..n).map(|k| (0..n).map(|j| x[j] * xi_dot[j * n + k].value).sum()).collect();
            let target = linalg::scale(&sv.phi_of(&x), sv.alpha - 1.0);
            r[4] = r[4].max(st.frame_norm(&linalg::sub(&along, &target)));
        }
        r[1] = metric_compat_residual(qsm.field(), qsm.structure.metric(), p)?;
        let lie = connection_lie(&qp, &st.g, &st.xi_jet);
        let [g, ee, _] = sv.basis_tensors();
        let c = 2.0 * (sv.alpha - 1.0);
        let lie_res: Vec<f64> = (0..n * n).map(|k| lie[k] - c * (g[k] + ee[k])).collect();
        r[5] = st.frame.bilinear_max(&lie_res);
        Ok(r)
    });
    CheckReport {
        entries: entries_from_rows(&CONNECTION_CHECKS, &rows, cfg.tolerance),
    }
}

/// Largest frame norm of `dα` over the samples.
pub fn alpha_variation(structure: &LcsStructure, points: &[Vec<f64>], parallel: bool) -> Result<f64> {
    let per: Vec<Result<f64>> = map_points(points, parallel, |_, p| {
        let st = structure.at(p)?;
        let da = st.d_alpha();
        Ok(st.frame.basis.iter().map(|e| linalg::pairing(&da, e).abs()).fold(0.0, f64::max))
    });
    per.into_iter().try_fold(0.0f64, |m, r| Ok(m.max(r?)))
}

pub(crate) fn gate(entry: CheckEntry, variation: f64, threshold: f64) -> CheckEntry {
    if variation < threshold {
        entry.with_coefficient("d_alpha_max", variation)
    } else {
        entry
            .diagnostic()
            .with_coefficient("d_alpha_max", variation)
            .with_message(format!(
                "α is not constant (|dα| up to {variation:.3e}); the transform carries no dα terms, so the residual is reported only"
            ))
    }
}

pub(crate) fn failed_all(ids: &[(&str, &str)], tol: f64, e: &GeomError) -> CheckReport {
    CheckReport {
        entries: ids.iter().map(|(id, eq)| CheckEntry::failed(id, eq, tol, e.to_string())).collect(),
    }
}

pub const CURVATURE_CHECKS: [(&str, &str); 1] = [(
    "eq_2_29",
    "R̄(X,Y)Z = R(X,Y)Z + (2α-1)[g(φX,Z)φY - g(φY,Z)φX] + α[η(Y)X - η(X)Y]η(Z) + α[g(Y,Z)η(X) - g(X,Z)η(Y)]ξ",
)];

/// Numeric curvature of `Γ̄` against the transform formula over all frame triples.
///
/// Asserted only where α is constant on the samples; otherwise diagnostic.
pub fn curvature_transform_check(qsm: &QsmConnection, points: &[Vec<f64>], cfg: &VerifyConfig) -> CheckReport {
    let variation = match alpha_variation(&qsm.structure, points, cfg.parallel) {
        Ok(v) => v,
        Err(e) => return failed_all(&CURVATURE_CHECKS, cfg.tolerance, &e),
    };
    let rows: Vec<Result<Vec<f64>>> = map_points(points, cfg.parallel, |_, p| {
        let st = qsm.structure.at(p)?;
        let bar = curvature_from_point(&qsm.at(p)?);
        let base = st.curvature();
        let sv = StructureValues::from(&st);
        let mut worst = 0.0f64;
        for x in &st.frame.basis {
            for y in &st.frame.basis {
                for z in &st.frame.basis {
                    let d = linalg::sub(&bar.apply(x, y, z), &sv.curvature_rhs(&base, x, y, z));
                    worst = worst.max(st.frame_norm(&d));
                }
            }
        }
        Ok(vec![worst])
    });
    let mut entries = entries_from_rows(&CURVATURE_CHECKS, &rows, cfg.tolerance);
    let e = entries.remove(0);
    CheckReport {
        entries: vec![gate(e, variation, alpha_gate(qsm.structure.engine()))],
    }
}

pub const RICCI_CHECKS: [(&str, &str); 3] = [
    ("eq_2_30", "S̄ = S + (α-1)g + (nα-1)η⊗η - (2α-1)a g(φ·,·)"),
    ("eq_2_30_contraction", "trace of the curvature-transform RHS = S + (α-1)g + (nα-1)η⊗η - (2α-1)a g(φ·,·)"),
    ("eq_2_30_fit", "S̄ - S = c_g g + c_η η⊗η - c_φ g(φ·,·), c_φ fixed at (2α-1)a"),
];

pub const RICCI_BASIS: [&str; 3] = ["g", "eta_eta", "g_phi"];

struct RicciPoint {
    residual: f64,
    contraction: f64,
    antisym: f64,
    c_phi: f64,
    coefficients: (f64, f64, f64),
    sample: BasisSample,
}

/// `S̄` (raw signed trace, unsymmetrised) against the Ricci transform, the
/// exact algebraic contraction of the curvature transform, and a coefficient fit.
pub fn ricci_transform_check(
    qsm: &QsmConnection,
    points: &[Vec<f64>],
    cfg: &VerifyConfig,
) -> (CheckReport, Option<CoefficientFit>) {
    let variation = match alpha_variation(&qsm.structure, points, cfg.parallel) {
        Ok(v) => v,
        Err(e) => return (failed_all(&RICCI_CHECKS, cfg.tolerance, &e), None),
    };
    let per: Vec<Result<RicciPoint>> = map_points(points, cfg.parallel, |_, p| {
        let st = qsm.structure.at(p)?;
        let bar = curvature_from_point(&qsm.at(p)?).ricci();
        let base_curv = st.curvature();
        let base = base_curv.ricci();
        let sv = StructureValues::from(&st);
        let (cg, ce, cphi) = sv.ricci_coefficients();
        let rhs = sv.ricci_rhs(&base, cg, ce, cphi);
        let n = st.n;
        let d: Vec<f64> = (0..n * n).map(|k| bar[k] - rhs[k]).collect();
        let c: Vec<f64> = linalg::sub(&sv.contracted_rhs(&base_curv), &rhs);
        let anti: Vec<f64> = (0..n * n).map(|k| 0.5 * (bar[k] - bar[(k % n) * n + k / n])).collect();
        let fc = |b: &[f64]| st.frame.bilinear_components(b);
        let [g, ee, gphi] = sv.basis_tensors();
        let neg_gphi = linalg::scale(&gphi, -1.0);
        Ok(RicciPoint {
            residual: st.frame.bilinear_max(&d),
            contraction: st.frame.bilinear_max(&c),
            antisym: st.frame.bilinear_max(&anti),
            c_phi: cphi,
            coefficients: (cg, ce, cphi),
            sample: BasisSample {
                target: fc(&linalg::sub(&bar, &base)),
                basis: vec![fc(&g), fc(&ee), fc(&neg_gphi)],
            },
        })
    });
    let ok: Vec<&RicciPoint> = match per.iter().map(|r| r.as_ref()).collect::<std::result::Result<Vec<_>, _>>() {
        Ok(v) => v,
        Err(e) => return (failed_all(&RICCI_CHECKS, cfg.tolerance, e), None),
    };
    let tol = cfg.tolerance;
    let residuals: Vec<f64> = ok.iter().map(|p| p.residual).collect();
    let contraction: Vec<f64> = ok.iter().map(|p| p.contraction).collect();
    let antisym = ok.iter().map(|p| p.antisym).fold(0.0, f64::max);
    let (id, eq) = RICCI_CHECKS[0];
    let main = gate(CheckEntry::from_residuals(id, eq, &residuals, tol), variation, alpha_gate(qsm.structure.engine()))
        .with_coefficient("antisymmetric_max", antisym);
    let (id, eq) = RICCI_CHECKS[1];
    let contraction_entry = CheckEntry::from_residuals(id, eq, &contraction, 1e-10);

    let count = ok.len().max(1) as f64;
    let c_phi = ok.iter().map(|p| p.c_phi).sum::<f64>() / count;
    let samples: Vec<BasisSample> = ok.iter().map(|p| p.sample.clone()).collect();
    let fit = fit_coefficients(&RICCI_BASIS, &samples, &[None, None, Some(c_phi)]);
    let predicted = ok.iter().fold((0.0, 0.0, 0.0), |acc, p| {
        (acc.0 + p.coefficients.0 / count, acc.1 + p.coefficients.1 / count, acc.2 + p.coefficients.2 / count)
    });
    let pred = [predicted.0, predicted.1, predicted.2];
    let dev: Vec<f64> = fit.coefficients.iter().zip(&pred).map(|(f, p)| (f - p).abs()).collect();
    let (id, eq) = RICCI_CHECKS[2];
    let mut fit_entry = CheckEntry::from_residuals(id, eq, &dev, tol).diagnostic();
    for (name, v) in RICCI_BASIS.iter().zip(&fit.coefficients) {
        fit_entry = fit_entry.with_coefficient(&format!("fitted_{name}"), *v);
    }
    for (name, v) in RICCI_BASIS.iter().zip(&pred) {
        fit_entry = fit_entry.with_coefficient(&format!("predicted_{name}"), *v);
    }
    fit_entry = fit_entry
        .with_coefficient("fit_residual", fit.residual)
        .with_coefficient("gram_condition", fit.gram_condition)
        .with_message(
            "g(φ·,·) = g + η⊗η, so the three-tensor basis is dependent; the g(φ·,·) coefficient is held at (2α-1)a",
        );
    (
        CheckReport {
            entries: vec![main, contraction_entry, fit_entry],
        },
        Some(fit),
    )
}

use crate::connectalg::{ConnectionField, MetricField};
use crate::error::{GeomError, Result};
use crate::fieldcore::{linalg, Jet};
use crate::report::{
    entries_from_rows, map_points, point_rng, random_coeffs, CheckEntry, CheckReport, VerifyConfig,
};
use crate::subman::fields::projected_normal;
use crate::subman::immersion::{induced_levi_civita, ImmersionRecord, SubPoint};

/// `(∇_X Y` in parameter components, `h(X,Y)` ambient`)`.
pub fn gauss_split(sp: &SubPoint, xu: &[f64], yu: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let d = sp.ambient_derivative(xu, yu);
    (sp.tangent_coords(&d), sp.normal(&d))
}

/// Second fundamental form `h(X,Y)` (ambient components).
pub fn second_fundamental(sp: &SubPoint, xu: &[f64], yu: &[f64]) -> Vec<f64> {
    gauss_split(sp, xu, yu).1
}

/// `∇̃_X V` for an ambient vector field along M given as jets in `u`.
pub fn ambient_derivative_of(sp: &SubPoint, xu: &[f64], v: &[Jet]) -> Vec<f64> {
    let (n, m) = (sp.n, sp.m);
    let xa = sp.push(xu);
    (0..n)
        .map(|i| {
            let mut s: f64 = (0..m).map(|a| xu[a] * v[i].grad[a]).sum();
            for j in 0..n {
                for k in 0..n {
                    s += sp.gamma[i * n * n + j * n + k] * xa[j] * v[k].value;
                }
            }
            s
        })
        .collect()
}

/// `(A_V X` in parameter components, `∇^⊥_X V` ambient`)`.
///
/// `V` must be normal at the point; otherwise an input error is returned.
pub fn weingarten(sp: &SubPoint, xu: &[f64], v: &[Jet], tolerance: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let vv: Vec<f64> = v.iter().map(|j| j.value).collect();
    let leak = sp.norm(&sp.tangential(&vv));
    if leak > tolerance {
        return Err(GeomError::Input(format!(
            "Weingarten field is not normal at u = {:?} (tangential part {leak:e})",
            sp.u
        )));
    }
    let d = ambient_derivative_of(sp, xu, v);
    let a: Vec<f64> = sp.tangent_coords(&d).iter().map(|c| -c).collect();
    Ok((a, sp.normal(&d)))
}

/// `H = (1/m) Σ ε_a h(e_a, e_a)` over the induced orthonormal frame.
pub fn mean_curvature(sp: &SubPoint) -> Vec<f64> {
    let mut hsum = vec![0.0; sp.n];
    for (e, &s) in sp.frame.basis.iter().zip(&sp.frame.signs) {
        let h = second_fundamental(sp, e, e);
        for i in 0..sp.n {
            hsum[i] += s * h[i];
        }
    }
    linalg::scale(&hsum, 1.0 / sp.m as f64)
}

/// `(id, equation)` for the submanifold geometry checks.
pub const GAUSS_CHECKS: [(&str, &str); 4] = [
    ("eq_2_17", "∇̃_X Y = ∇_X Y + h(X,Y), ∇ = Levi-Civita of the induced metric"),
    ("eq_2_20", "h symmetric, normal, h(fX,Y) = f h(X,Y)"),
    ("eq_2_18", "∇̃_X V = -A_V X + ∇^⊥_X V"),
    ("eq_2_19", "g(h(X,Y),V) = g(A_V X,Y)"),
];

/// Per-point magnitudes used by the minimality and umbilicity probes.
#[derive(Debug, Clone, Copy)]
pub struct ShapeSummary {
    pub h_max: f64,
    pub mean_curvature: f64,
    pub umbilic_residual: f64,
}

fn gauss_point(
    imm: &ImmersionRecord,
    ambient: &MetricField,
    conn: &ConnectionField,
    induced: &ConnectionField,
    u: &[f64],
    cfg: &VerifyConfig,
    index: usize,
) -> Result<(Vec<f64>, ShapeSummary)> {
    let sp = SubPoint::new(imm, ambient, conn, u)?;
    let m = sp.m;
    let lc = induced.at(u)?;
    let mut rng = point_rng(cfg.seed, index);
    let mut r = [0.0f64; 4];
    let bump = |r: &mut [f64; 4], k: usize, v: f64| r[k] = r[k].max(v);
    let hh = mean_curvature(&sp);
    let mut summary = ShapeSummary {
        h_max: 0.0,
        mean_curvature: sp.norm(&hh),
        umbilic_residual: 0.0,
    };
    for a in 0..m {
        for b in 0..m {
            let ea = &sp.frame.basis[a];
            let eb = &sp.frame.basis[b];
            let h = second_fundamental(&sp, ea, eb);
            summary.h_max = summary.h_max.max(sp.norm(&h));
            let g_ab = crate::fieldcore::gdot(&sp.gm, ea, eb);
            let um = linalg::sub(&h, &linalg::scale(&hh, g_ab));
            summary.umbilic_residual = summary.umbilic_residual.max(sp.norm(&um));
        }
    }
    for _ in 0..cfg.trials {
        let xu = sp.frame.combine(&random_coeffs(&mut rng, m));
        let yu = sp.frame.combine(&random_coeffs(&mut rng, m));
        let (t, h) = gauss_split(&sp, &xu, &yu);
        let intrinsic = lc.apply(&xu, &yu);
        bump(&mut r, 0, sp.frame.max_norm(&sp.gm, &linalg::sub(&t, &intrinsic)));

        let (_, h_yx) = gauss_split(&sp, &yu, &xu);
        let f = 1.0 + rng_scalar(&mut rng);
        let (_, h_fx) = gauss_split(&sp, &linalg::scale(&xu, f), &yu);
        bump(&mut r, 1, sp.norm(&linalg::sub(&h, &h_yx)));
        bump(&mut r, 1, sp.norm(&sp.tangential(&h)));
        bump(&mut r, 1, sp.norm(&linalg::sub(&h_fx, &linalg::scale(&h, f))));

        // A normal field from projecting a random ambient vector.
        let w = sp.ambient_frame.combine(&random_coeffs(&mut rng, sp.n));
        let v = projected_normal(imm, ambient, u, &w)?;
        let vv: Vec<f64> = v.iter().map(|j| j.value).collect();
        let (a_x, nabla_perp) = weingarten(&sp, &xu, &v, cfg.tolerance.max(1e-10))?;
        let d = ambient_derivative_of(&sp, &xu, &v);
        let recon = linalg::add(&linalg::scale(&sp.push(&a_x), -1.0), &nabla_perp);
        bump(&mut r, 2, sp.norm(&linalg::sub(&d, &recon)));
        bump(&mut r, 2, sp.norm(&sp.tangential(&nabla_perp)));
        let lhs = sp.dot(&h, &vv);
        let rhs = crate::fieldcore::gdot(&sp.gm, &a_x, &yu);
        bump(&mut r, 3, (lhs - rhs).abs());
    }
    Ok((r.to_vec(), summary))
}

fn rng_scalar(rng: &mut rand_chacha::ChaCha8Rng) -> f64 {
    random_coeffs(rng, 1)[0]
}

/// Gauss–Weingarten consistency plus the minimality and umbilicity probes.
pub fn verify_gauss(
    imm: &ImmersionRecord,
    ambient: &MetricField,
    conn: &ConnectionField,
    points: &[Vec<f64>],
    cfg: &VerifyConfig,
) -> (CheckReport, Vec<ShapeSummary>) {
    let induced = match induced_levi_civita(imm, ambient) {
        Ok((_, lc)) => lc,
        Err(e) => {
            let mut rep = CheckReport::default();
            for (id, eq) in GAUSS_CHECKS.iter().chain(PROBES.iter()) {
                rep.push(CheckEntry::failed(id, eq, cfg.tolerance, e.to_string()));
            }
            return (rep, Vec::new());
        }
    };
    let per: Vec<Result<(Vec<f64>, ShapeSummary)>> = map_points(points, cfg.parallel, |i, u| {
        gauss_point(imm, ambient, conn, &induced, u, cfg, i)
    });
    let rows: Vec<Result<Vec<f64>>> = per.iter().map(|r| r.as_ref().map(|x| x.0.clone()).map_err(Clone::clone)).collect();
    let mut rep = CheckReport {
        entries: entries_from_rows(&GAUSS_CHECKS, &rows, cfg.tolerance),
    };
    let shapes: Vec<ShapeSummary> = per.iter().filter_map(|r| r.as_ref().ok().map(|x| x.1)).collect();
    if shapes.len() != per.len() {
        let msg = per.iter().find_map(|r| r.as_ref().err()).map(|e| e.to_string()).unwrap_or_default();
        for (id, eq) in PROBES {
            rep.push(CheckEntry::failed(id, eq, cfg.tolerance, msg.clone()));
        }
        return (rep, shapes);
    }
    let h_max = shapes.iter().fold(0.0f64, |m, s| m.max(s.h_max));
    let hs: Vec<f64> = shapes.iter().map(|s| s.mean_curvature).collect();
    let mut minimal = CheckEntry::from_residuals(PROBES[0].0, PROBES[0].1, &hs, cfg.tolerance)
        .with_coefficient("mean_curvature_max", hs.iter().cloned().fold(0.0, f64::max))
        .with_coefficient("second_fundamental_max", h_max);
    if h_max >= cfg.tolerance {
        minimal = minimal.diagnostic().with_message(
            "not totally geodesic: minimality does not follow from h(X,ξ) = 0; H is reported, not asserted",
        );
    }
    rep.push(minimal);
    let um: Vec<f64> = shapes.iter().map(|s| s.umbilic_residual).collect();
    rep.push(
        CheckEntry::from_residuals(PROBES[1].0, PROBES[1].1, &um, cfg.tolerance)
            .diagnostic()
            .with_message("umbilicity is a property of the example, reported only"),
    );
    (rep, shapes)
}

/// Minimality and umbilicity probes appended by [`verify_gauss`].
pub const PROBES: [(&str, &str); 2] = [
    ("thm_3_1_minimal", "H = 0"),
    ("eq_2_21", "h(X,Y) = g(X,Y)H"),
];

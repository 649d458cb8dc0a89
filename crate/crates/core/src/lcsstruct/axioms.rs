use crate::error::GeomError;
use crate::fieldcore::linalg::{lincomb, sub};
use crate::lcsstruct::structure::{LcsStructure, StructurePoint};
use crate::report::{
    entries_from_rows, map_points, max_abs, point_rng, random_coeffs, CheckEntry, CheckReport,
    ScalarFit, VerifyConfig,
};

/// `(id, equation)` for every structure identity, in report order.
pub const AXIOM_CHECKS: [(&str, &str); 16] = [
    ("eq_2_1", "g(ξ,ξ) = -1"),
    ("eq_2_2", "η(X) = g(X,ξ)"),
    ("eq_2_3", "(∇_X η)(Y) = α{g(X,Y) + η(X)η(Y)}"),
    ("eq_2_4", "∇_X ξ = α{X + η(X)ξ}"),
    ("eq_2_5", "dα(X) = ρη(X), ρ = -(ξα)"),
    ("eq_2_7", "(1/α)∇_X ξ = X + η(X)ξ"),
    ("eq_2_8", "g(φX,Y) = g(X,φY)"),
    ("eq_2_9", "η(ξ) = -1, φξ = 0, η(φX) = 0, g(φX,φY) = g(X,Y) + η(X)η(Y)"),
    ("eq_2_10", "φ²X = X + η(X)ξ"),
    ("eq_2_11", "S(X,ξ) = (n-1)(α²-ρ)η(X)"),
    ("eq_2_12", "R(X,Y)ξ = (α²-ρ)[η(Y)X - η(X)Y]"),
    ("eq_2_13", "R(ξ,Y)Z = (α²-ρ)[g(Y,Z)ξ - η(Z)Y]"),
    ("eq_2_14", "(∇_X φ)Y = α{g(X,Y)ξ + 2η(X)η(Y)ξ + η(Y)X}"),
    ("eq_2_15", "dρ(X) = βη(X), β = -(ξρ)"),
    ("eq_2_16", "R(X,Y)Z = φR(X,Y)Z - (α²-ρ){g(Y,Z)η(X) - g(X,Z)η(Y)}ξ"),
    ("eq_2_16_printed", "R(X,Y)Z = φR(X,Y)Z + (α²-ρ){g(Y,Z)η(X) - g(X,Z)η(Y)}ξ"),
];

struct PointAxioms {
    residuals: Vec<f64>,
    fits: [ScalarFit; 3],
    alpha: f64,
    coefficient: f64,
}

fn axioms_at(sp: &StructurePoint, cfg: &VerifyConfig, index: usize) -> PointAxioms {
    let n = sp.n;
    let xi = sp.xi();
    let alpha = sp.alpha();
    let c = sp.curvature_coefficient();
    let curv = sp.curvature();
    let ricci = curv.ricci();
    let nabla_eta: Vec<f64> = sp.conn.nabla_covector(&sp.eta_jet).iter().map(|j| j.value).collect();
    let nabla_phi: Vec<f64> = sp.conn.nabla_endo(&sp.phi_jet).iter().map(|j| j.value).collect();

    let mut rng = point_rng(cfg.seed, index);
    let mut r = vec![0.0f64; AXIOM_CHECKS.len()];
    let mut fits = [ScalarFit::default(); 3];
    let bump = |r: &mut Vec<f64>, k: usize, v: f64| {
        r[k] = if r[k].is_nan() || v.is_nan() { f64::NAN } else { r[k].max(v) };
    };

    bump(&mut r, 0, (sp.dot(&xi, &xi) + 1.0).abs());
    bump(&mut r, 4, max_abs(&sub(&sp.d_alpha(), &lincomb(&[(sp.rho, &sp.eta())]))));
    bump(&mut r, 13, max_abs(&sub(&sp.d_rho, &lincomb(&[(sp.beta, &sp.eta())]))));
    bump(&mut r, 7, (sp.eta_of(&xi) + 1.0).abs());
    bump(&mut r, 7, sp.frame_norm(&sp.phi_of(&xi)));

    for _ in 0..cfg.trials {
        let x = sp.frame.combine(&random_coeffs(&mut rng, n));
        let y = sp.frame.combine(&random_coeffs(&mut rng, n));
        let z = sp.frame.combine(&random_coeffs(&mut rng, n));
        let (ex, ey, ez) = (sp.eta_of(&x), sp.eta_of(&y), sp.eta_of(&z));
        let (gxy, gyz, gxz) = (sp.dot(&x, &y), sp.dot(&y, &z), sp.dot(&x, &z));
        let phix = sp.phi_of(&x);
        let phiy = sp.phi_of(&y);

        bump(&mut r, 1, (ex - sp.dot(&x, &xi)).abs());

        let mut de = 0.0;
        for i in 0..n {
            for j in 0..n {
                de += nabla_eta[i * n + j] * x[i] * y[j];
            }
        }
        bump(&mut r, 2, (de - alpha * (gxy + ex * ey)).abs());

        let nx = sp.nabla_xi_along(&x);
        let rhs = lincomb(&[(alpha, &x), (alpha * ex, &xi)]);
        bump(&mut r, 3, sp.frame_norm(&sub(&nx, &rhs)));

        bump(&mut r, 5, sp.frame_norm(&sub(&phix, &sp.phi_algebraic(&x))));
        bump(&mut r, 6, (sp.dot(&phix, &y) - sp.dot(&x, &phiy)).abs());
        bump(&mut r, 7, sp.eta_of(&phix).abs());
        bump(&mut r, 7, (sp.dot(&phix, &phiy) - gxy - ex * ey).abs());
        bump(&mut r, 8, sp.frame_norm(&sub(&sp.phi_of(&phix), &sp.phi_algebraic(&x))));

        // S(X,ξ) against (n-1)η(X).
        let mut s_xxi = 0.0;
        for a in 0..n {
            for b in 0..n {
                s_xxi += ricci[a * n + b] * x[a] * xi[b];
            }
        }
        let basis11 = (n as f64 - 1.0) * ex;
        bump(&mut r, 9, (s_xxi - c * basis11).abs());
        fits[0].add(&[s_xxi], &[basis11]);

        let rxy_xi = curv.apply(&x, &y, &xi);
        let b12 = lincomb(&[(ey, &x), (-ex, &y)]);
        bump(&mut r, 10, sp.frame_norm(&sub(&rxy_xi, &lincomb(&[(c, &b12)]))));
        fits[1].add(&sp.frame.components(&sp.g, &rxy_xi), &sp.frame.components(&sp.g, &b12));

        let rxi = curv.apply(&xi, &y, &z);
        let b13 = lincomb(&[(gyz, &xi), (-ez, &y)]);
        bump(&mut r, 11, sp.frame_norm(&sub(&rxi, &lincomb(&[(c, &b13)]))));
        fits[2].add(&sp.frame.components(&sp.g, &rxi), &sp.frame.components(&sp.g, &b13));

        let mut dphi = vec![0.0; n];
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    dphi[k] += nabla_phi[i * n * n + k * n + j] * x[i] * y[j];
                }
            }
        }
        let rhs14 = lincomb(&[(alpha * (gxy + 2.0 * ex * ey), &xi), (alpha * ey, &x)]);
        bump(&mut r, 12, sp.frame_norm(&sub(&dphi, &rhs14)));

        let rxyz = curv.apply(&x, &y, &z);
        let phir = sp.phi_of(&rxyz);
        let curly = c * (gyz * ex - gxz * ey);
        let corrected = lincomb(&[(1.0, &phir), (-curly, &xi)]);
        let printed = lincomb(&[(1.0, &phir), (curly, &xi)]);
        bump(&mut r, 14, sp.frame_norm(&sub(&rxyz, &corrected)));
        bump(&mut r, 15, sp.frame_norm(&sub(&rxyz, &printed)));
    }
    PointAxioms {
        residuals: r,
        fits,
        alpha,
        coefficient: c,
    }
}

/// Evaluates every structure identity over `points` with random frame vectors.
///
/// Failures are entries, not errors: a point whose structure cannot be
/// evaluated fails every check with the underlying message.
pub fn verify_axioms(structure: &LcsStructure, points: &[Vec<f64>], cfg: &VerifyConfig) -> CheckReport {
    let per_point: Vec<Result<PointAxioms, GeomError>> = map_points(points, cfg.parallel, |i, p| {
        structure.at(p).map(|sp| axioms_at(&sp, cfg, i))
    });
    let rows: Vec<Result<Vec<f64>, GeomError>> = per_point
        .iter()
        .map(|r| r.as_ref().map(|a| a.residuals.clone()).map_err(Clone::clone))
        .collect();
    let mut entries = entries_from_rows(&AXIOM_CHECKS, &rows, cfg.tolerance);

    let ok: Vec<&PointAxioms> = per_point.iter().filter_map(|r| r.as_ref().ok()).collect();
    if !ok.is_empty() {
        let mut fits = [ScalarFit::default(); 3];
        for a in &ok {
            for (f, g) in fits.iter_mut().zip(&a.fits) {
                f.merge(g);
            }
        }
        let count = ok.len() as f64;
        let mean_c = ok.iter().map(|a| a.coefficient).sum::<f64>() / count;
        let mean_alpha = ok.iter().map(|a| a.alpha).sum::<f64>() / count;
        for e in entries.iter_mut() {
            let fit = match e.id.as_str() {
                "eq_2_11" => Some(fits[0].value()),
                "eq_2_12" => Some(fits[1].value()),
                "eq_2_13" => Some(fits[2].value()),
                _ => None,
            };
            if let Some(v) = fit {
                e.coefficients.push(("fitted_alpha2_minus_rho".into(), v));
                e.coefficients.push(("structure_alpha2_minus_rho_mean".into(), mean_c));
            }
            if e.id == "eq_2_4" {
                e.coefficients.push(("alpha_mean".into(), mean_alpha));
            }
        }
    }
    if let Some(e) = entries.iter_mut().find(|e| e.id == "eq_2_16_printed") {
        *e = e.clone().diagnostic().with_message(
            "literal sign of the ξ-term; contradicts the R(X,Y)ξ identity, corrected form is eq_2_16",
        );
    }
    CheckReport { entries }
}

/// Single-entry helper used by callers that only want one equation.
pub fn axiom_entry(report: &CheckReport, id: &str) -> Option<CheckEntry> {
    report.get(id).cloned()
}

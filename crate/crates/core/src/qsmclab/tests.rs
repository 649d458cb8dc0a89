use super::*;
use crate::connectalg::curvature_from_point;
use crate::fieldcore::Engine;
use crate::lcsstruct::{build_grw, derive_structure, GrwSpec, LcsStructure};
use crate::report::{Status, VerifyConfig};

fn structure(dim: usize, warp: &str, t: (f64, f64), engine: Engine) -> (LcsStructure, Vec<Vec<f64>>) {
    let m = build_grw(&GrwSpec::flat(dim, warp, t)).unwrap();
    let pts = m.domain().sample_points(6, 3);
    let metric = m.metric.with_engine(engine);
    let xi = m.xi.clone().with_engine(engine);
    let s = derive_structure(&metric, &xi, &pts, engine.tolerance()).unwrap();
    (s, pts)
}

fn cfg(engine: Engine) -> VerifyConfig {
    VerifyConfig {
        parallel: false,
        ..VerifyConfig::for_engine(engine)
    }
}

#[test]
fn connection_checks_hold_on_both_warps() {
    for warp in ["exp(t)", "cosh(t)"] {
        let (s, pts) = structure(5, warp, (0.5, 1.5), Engine::Jet);
        let rep = verify_qsm_connection(&qsm_connection(&s), &pts, &cfg(Engine::Jet));
        for e in &rep.entries {
            assert_eq!(e.status, Status::Pass, "{warp} {}: {:e}", e.id, e.max_residual);
        }
    }
}

#[test]
fn unit_alpha_parallelises_xi() {
    let (s, _) = structure(5, "exp(t)", (0.0, 1.0), Engine::Jet);
    let q = qsm_connection(&s);
    let p = [0.4, 0.1, 0.2, 0.3, 0.5];
    let st = s.at(&p).unwrap();
    let d = q.at(&p).unwrap().nabla_vector(&st.xi_jet);
    assert!(d.iter().all(|j| j.value.abs() < 1e-12));
}

#[test]
fn cosh_connection_lie() {
    let (s, _) = structure(4, "cosh(t)", (0.5, 1.5), Engine::Jet);
    let q = qsm_connection(&s);
    let p = [1.0, 0.2, 0.3, 0.4];
    let st = s.at(&p).unwrap();
    let lie = connection_lie(&q.at(&p).unwrap(), &st.g, &st.xi_jet);
    let fc = st.frame.bilinear_components(&lie);
    // ξ = e_0: the time component of g + η⊗η vanishes, spatial ones are 1.
    let c = 2.0 * (1f64.tanh() - 1.0);
    for a in 0..4 {
        for b in 0..4 {
            let want = if a == b && a > 0 { c } else { 0.0 };
            assert!((fc[a * 4 + b] - want).abs() < 1e-12, "{a}{b}: {}", fc[a * 4 + b]);
        }
    }
}

#[test]
fn exponential_curvature_transform_is_asserted() {
    let (s, pts) = structure(5, "exp(t)", (0.0, 1.0), Engine::Jet);
    let q = qsm_connection(&s);
    let rep = curvature_transform_check(&q, &pts, &cfg(Engine::Jet));
    let e = rep.get("eq_2_29").unwrap();
    assert_eq!(e.status, Status::Pass, "{:e}", e.max_residual);
    assert!(e.max_residual < 1e-8);
}

#[test]
fn exponential_ricci_transform_vanishes() {
    let (s, pts) = structure(5, "exp(t)", (0.0, 1.0), Engine::Jet);
    let q = qsm_connection(&s);
    let (rep, fit) = ricci_transform_check(&q, &pts, &cfg(Engine::Jet));
    for id in ["eq_2_30", "eq_2_30_contraction"] {
        assert_eq!(rep.get(id).unwrap().status, Status::Pass, "{id}");
    }
    assert_eq!(rep.get("eq_2_30_fit").unwrap().status, Status::Diagnostic);
    let fit = fit.unwrap();
    assert!(fit.coefficient("g").unwrap().abs() < 1e-6);
    assert!((fit.coefficient("eta_eta").unwrap() - 4.0).abs() < 1e-6);
    assert!((fit.coefficient("g_phi").unwrap() - 4.0).abs() < 1e-6);
    assert!(fit.gram_condition.is_infinite());
    // S̄ itself is zero.
    for p in &pts {
        let sbar = curvature_from_point(&q.at(p).unwrap()).ricci();
        assert!(sbar.iter().all(|v| v.abs() < 1e-8), "{sbar:?}");
    }
}

#[test]
fn nonconstant_alpha_is_diagnostic() {
    let (s, pts) = structure(4, "cosh(t)", (0.5, 1.5), Engine::Jet);
    let q = qsm_connection(&s);
    let c = cfg(Engine::Jet);
    let e = curvature_transform_check(&q, &pts, &c).entries.remove(0);
    assert_eq!(e.status, Status::Diagnostic);
    assert!(e.coefficient("d_alpha_max").unwrap() > 0.1);
    let (rep, _) = ricci_transform_check(&q, &pts, &c);
    assert_eq!(rep.get("eq_2_30").unwrap().status, Status::Diagnostic);
    // the algebraic contraction holds regardless of α
    assert_eq!(rep.get("eq_2_30_contraction").unwrap().status, Status::Pass);
}

#[test]
fn fd_engine_agrees() {
    let (s, pts) = structure(4, "exp(t)", (0.0, 1.0), Engine::Fd);
    let rep = verify_qsm_connection(&qsm_connection(&s), &pts, &cfg(Engine::Fd));
    for e in &rep.entries {
        assert_eq!(e.status, Status::Pass, "{}: {:e}", e.id, e.max_residual);
    }
}

#[test]
fn fit_recovers_planted_coefficients() {
    let samples: Vec<BasisSample> = (0..5)
        .map(|i| {
            let a = vec![1.0, i as f64, 0.5];
            let b = vec![0.0, 1.0, (i * i) as f64];
            let target = a.iter().zip(&b).map(|(x, y)| 2.0 * x - 3.0 * y).collect();
            BasisSample { target, basis: vec![a, b] }
        })
        .collect();
    let fit = fit_coefficients(&["a", "b"], &samples, &[None, None]);
    assert!((fit.coefficients[0] - 2.0).abs() < 1e-12);
    assert!((fit.coefficients[1] + 3.0).abs() < 1e-12);
    assert!(fit.residual < 1e-12);
    assert!(fit.gram_condition.is_finite());
}


mod submanifold {
    use super::*;
    use crate::error::GeomError;
    use crate::subman::{classify, ImmersionRecord, SubmanifoldKind};

    fn setup(warp: &str, names: &[&str]) -> (LcsStructure, ImmersionRecord, Vec<Vec<f64>>) {
        let m = build_grw(&GrwSpec::flat(4, warp, (0.5, 1.5))).unwrap();
        let pts = m.domain().sample_points(4, 0);
        let s = derive_structure(&m.metric, &m.xi, &pts, 1e-8).unwrap();
        let names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let imm = ImmersionRecord::slice("sub", m.domain(), &names, &[]).unwrap();
        let upts = imm.params.sample_points(5, 7);
        (s, imm, upts)
    }

    #[test]
    fn exponential_slab_induced_connection() {
        let (s, imm, pts) = setup("exp(t)", &["t", "x1", "x2"]);
        let c = cfg(Engine::Jet);
        let class = classify(&imm, &s, &pts, c.tolerance, false).unwrap();
        assert_eq!(class.kind, SubmanifoldKind::Invariant);
        let q = qsm_connection(&s);
        let rep = induced_qsm_check(&imm, &q, &class, &pts, &c).unwrap();
        for e in &rep.entries {
            assert_eq!(e.status, Status::Pass, "{}: {:e}", e.id, e.max_residual);
        }
        assert!(rep.get("eq_3_9_normal").unwrap().max_residual < 1e-10);
    }

    #[test]
    fn exponential_slab_ricci_vanishes() {
        let (s, imm, pts) = setup("exp(t)", &["t", "x1", "x2"]);
        let c = cfg(Engine::Jet);
        let class = classify(&imm, &s, &pts, c.tolerance, false).unwrap();
        let q = qsm_connection(&s);
        let (rep, fit) = qsm_submanifold_soliton_check(&imm, &q, &class, &pts, None, &c).unwrap();
        let con = rep.get("eq_3_12_contraction").unwrap();
        assert_eq!(con.status, Status::Pass);
        assert!(con.coefficient("ricci_bar_max").unwrap() < 1e-6);
        assert!((con.coefficient("trace_phi").unwrap() - 2.0).abs() < 1e-10);
        assert_eq!(rep.get("eq_4_7").unwrap().status, Status::Pass);
        // S̄ - S = -S = -2g: the contraction reading, not the printed one.
        let fit = fit.unwrap();
        assert!((fit.coefficients[0] + 2.0).abs() < 1e-6);
        assert!(fit.coefficients[1].abs() < 1e-6);
        let printed = rep.get("eq_3_12_fit").unwrap();
        assert_eq!(printed.status, Status::Diagnostic);
        assert!((printed.coefficient("printed_g").unwrap() + 1.0).abs() < 1e-10);
        assert!((printed.coefficient("contraction_g").unwrap() + 2.0).abs() < 1e-10);
        // a steady soliton under £̄ with S̄ = 0
        let sol = rep.get("eq_3_7").unwrap();
        assert!(sol.coefficient("best_lambda").unwrap().abs() < 1e-8);
        let ric = rep.get("eq_3_13").unwrap();
        assert!((ric.coefficient("fitted_g").unwrap() - 2.0).abs() < 1e-6);
        assert!((ric.coefficient("contraction_g").unwrap() - 2.0).abs() < 1e-6);
        assert!((ric.coefficient("printed_g").unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn cosh_slab_lie_and_gating() {
        let (s, imm, pts) = setup("cosh(t)", &["t", "x1", "x2"]);
        let c = cfg(Engine::Jet);
        let class = classify(&imm, &s, &pts, c.tolerance, false).unwrap();
        let q = qsm_connection(&s);
        let rep = induced_qsm_check(&imm, &q, &class, &pts, &c).unwrap();
        assert!(rep.all_assertable_pass());
        let (rep, _) = qsm_submanifold_soliton_check(&imm, &q, &class, &pts, None, &c).unwrap();
        assert_eq!(rep.get("eq_3_12_contraction").unwrap().status, Status::Diagnostic);
        assert!(rep.get("eq_3_12_contraction").unwrap().max_residual < 1e-8);
    }

    #[test]
    fn curve_satisfies_anti_invariant_chain() {
        let (s, imm, pts) = setup("exp(t)", &["t"]);
        let c = cfg(Engine::Jet);
        let class = classify(&imm, &s, &pts, c.tolerance, false).unwrap();
        assert_eq!(class.kind, SubmanifoldKind::AntiInvariant);
        let q = qsm_connection(&s);
        let (rep, fit) = qsm_submanifold_soliton_check(&imm, &q, &class, &pts, None, &c).unwrap();
        assert_eq!(rep.get("eq_3_14").unwrap().status, Status::Pass);
        assert_eq!(rep.get("eq_3_14_nabla_xi").unwrap().status, Status::Pass);
        let f = rep.get("thm_4_2_fit").unwrap();
        assert!(f.coefficient("lambda_from_fit").unwrap().abs() < 1e-8);
        assert!(fit.unwrap().coefficients[0].abs() < 1e-8);
        assert!(matches!(
            induced_qsm_check(&imm, &q, &class, &pts, &c),
            Err(GeomError::Misuse(_))
        ));
    }

    #[test]
    fn neither_is_rejected() {
        let (s, imm, pts) = setup("exp(t)", &["x1", "x2"]);
        let c = cfg(Engine::Jet);
        let class = classify(&imm, &s, &pts, c.tolerance, false).unwrap();
        assert_eq!(class.kind, SubmanifoldKind::Neither);
        let q = qsm_connection(&s);
        assert!(matches!(
            qsm_submanifold_soliton_check(&imm, &q, &class, &pts, None, &c),
            Err(GeomError::Misuse(_))
        ));
    }
}

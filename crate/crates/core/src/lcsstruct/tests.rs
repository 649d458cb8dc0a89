use super::*;
use crate::error::GeomError;
use crate::fieldcore::ChartDomain;
use crate::report::VerifyConfig;
use crate::fieldcore::Engine;

fn structure(dim: usize, warp: &str, t: (f64, f64)) -> (GrwManifold, LcsStructure) {
    let m = build_grw(&GrwSpec::flat(dim, warp, t)).unwrap();
    let pts = m.domain().sample_points(8, 1);
    let s = derive_structure(&m.metric, &m.xi, &pts, 1e-8).unwrap();
    (m, s)
}

#[test]
fn exponential_warp_has_unit_alpha() {
    let (_, s) = structure(4, "exp(t)", (0.0, 1.0));
    let sp = s.at(&[0.3, 0.1, 0.2, 0.7]).unwrap();
    assert!((sp.alpha() - 1.0).abs() < 1e-12);
    assert!(sp.rho.abs() < 1e-12);
    assert!(sp.beta.abs() < 1e-6);
    assert!((sp.trace_phi() - 3.0).abs() < 1e-12);
}

#[test]
fn cosh_warp_coefficients() {
    let (_, s) = structure(3, "cosh(t)", (0.5, 1.5));
    let sp = s.at(&[1.0, 0.5, 0.5]).unwrap();
    assert!((sp.alpha() - 1f64.tanh()).abs() < 1e-12);
    // α² - ρ = f''/f = 1
    assert!((sp.curvature_coefficient() - 1.0).abs() < 1e-10);
}

#[test]
fn linear_warp_is_flat_in_time() {
    let (_, s) = structure(3, "t", (1.0, 2.0));
    let t = 1.4;
    let sp = s.at(&[t, 0.5, 0.5]).unwrap();
    assert!((sp.alpha() - 1.0 / t).abs() < 1e-12);
    assert!((sp.rho - 1.0 / (t * t)).abs() < 1e-12);
    assert!(sp.curvature_coefficient().abs() < 1e-12);
    // β = -(ξρ) = 2/t³
    assert!((sp.beta - 2.0 / (t * t * t)).abs() < 1e-6);
}

#[test]
fn minkowski_is_alpha_degenerate() {
    let domain = ChartDomain::cube(3, -1.0, 1.0).unwrap();
    let mut g = vec![0.0; 9];
    g[0] = -1.0;
    g[4] = 1.0;
    g[8] = 1.0;
    let metric = crate::connectalg::MetricField::lorentzian(crate::fieldcore::TensorFieldHandle::constant(
        crate::fieldcore::Valence::BILINEAR,
        domain.clone(),
        g,
    ))
    .unwrap();
    let xi = crate::fieldcore::TensorFieldHandle::constant(
        crate::fieldcore::Valence::VECTOR,
        domain,
        vec![1.0, 0.0, 0.0],
    );
    let err = derive_structure(&metric, &xi, &[vec![0.0, 0.0, 0.0]], 1e-8).unwrap_err();
    assert!(matches!(err, GeomError::AlphaDegenerate { .. }));
}

#[test]
fn non_geodesic_field_is_rejected() {
    let m = build_grw(&GrwSpec::flat(3, "exp(t)", (0.0, 1.0))).unwrap();
    let s = (2f64).sqrt();
    let bad = crate::fieldcore::TensorFieldHandle::constant(
        crate::fieldcore::Valence::VECTOR,
        m.domain().clone(),
        vec![s, 0.0, 0.0],
    );
    assert!(matches!(
        derive_structure(&m.metric, &bad, &[vec![0.5, 0.5, 0.5]], 1e-8),
        Err(GeomError::NotLcs(_))
    ));
}

fn assert_axioms(warp: &str, t: (f64, f64), dim: usize, engine: Engine) {
    let m = build_grw(&GrwSpec::flat(dim, warp, t)).unwrap();
    let metric = m.metric.clone().with_engine(engine);
    let pts = m.domain().sample_points(6, 3);
    let s = derive_structure(&metric, &m.xi, &pts, engine.tolerance()).unwrap();
    let cfg = VerifyConfig::for_engine(engine);
    let report = verify_axioms(&s, &pts, &cfg);
    for e in &report.entries {
        assert!(
            e.status != crate::report::Status::Fail,
            "{warp} {}: {} max {:e}",
            engine.name(),
            e.id,
            e.max_residual
        );
    }
    let printed = report.get("eq_2_16_printed").unwrap();
    let c = report.get("eq_2_12").unwrap().coefficient("fitted_alpha2_minus_rho").unwrap();
    if c.abs() > 1e-3 {
        assert!(printed.max_residual > 1e-3);
    }
}

#[test]
fn axioms_hold_on_sample_warps() {
    assert_axioms("exp(t)", (0.0, 1.0), 4, Engine::Jet);
    assert_axioms("cosh(t)", (0.5, 1.5), 3, Engine::Jet);
    assert_axioms("t", (1.0, 2.0), 3, Engine::Jet);
    assert_axioms("t^2 + exp(t)", (0.2, 1.0), 4, Engine::Jet);
}

#[test]
fn axioms_hold_with_finite_differences() {
    assert_axioms("cosh(t)", (0.5, 1.5), 3, Engine::Fd);
}

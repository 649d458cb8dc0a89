use super::*;
use crate::error::GeomError;
use crate::fieldcore::Engine;
use crate::lcsstruct::{build_grw, derive_structure, GrwManifold, GrwSpec, LcsStructure};
use crate::report::{Status, VerifyConfig};
use crate::subman::{classify, ImmersionRecord, SubmanifoldKind};

fn setup(warp: &str, t: (f64, f64)) -> (GrwManifold, LcsStructure) {
    let m = build_grw(&GrwSpec::flat(4, warp, t)).unwrap();
    let pts = m.domain().sample_points(4, 0);
    let s = derive_structure(&m.metric, &m.xi, &pts, 1e-8).unwrap();
    (m, s)
}

fn slab(m: &GrwManifold) -> ImmersionRecord {
    let names: Vec<String> = ["t", "x1", "x2"].iter().map(|s| s.to_string()).collect();
    ImmersionRecord::slice("slab", m.domain(), &names, &[]).unwrap()
}

#[test]
fn synthetic_soliton_is_exact() {
    for &(alpha, lambda, m) in &[(1.0, -2.0, 3usize), (0.3, 5.0, 4), (-2.0, 0.0, 2)] {
        let (g, eta) = standard_frame(m);
        let s = synthetic_eta_einstein(alpha, lambda, &g, &eta);
        let r = soliton_residual(&s.lie, &s.ricci, &s.g, lambda);
        assert!(r.iter().all(|x| x.abs() < 1e-12));
        assert!((best_lambda(&[s]) - lambda).abs() < 1e-12);
    }
}

#[test]
fn einstein_fiber_with_zero_field() {
    let (g, _) = standard_frame(3);
    let s: Vec<f64> = g.iter().map(|x| 1.5 * x).collect();
    let r = soliton_residual(&[0.0; 9], &s, &g, -1.5);
    assert!(r.iter().all(|x| *x == 0.0));
}

#[test]
fn desitter_slab_residual_at_minus_two() {
    // S = 2g, £_ξ g = 2(g + η⊗η): residual at λ = -2 is 2(g + η⊗η).
    let (g, eta) = standard_frame(3);
    let ee: Vec<f64> = (0..9).map(|k| eta[k / 3] * eta[k % 3]).collect();
    let lie: Vec<f64> = g.iter().zip(&ee).map(|(a, b)| 2.0 * (a + b)).collect();
    let ric: Vec<f64> = g.iter().map(|x| 2.0 * x).collect();
    let r = soliton_residual(&lie, &ric, &g, -2.0);
    for k in 0..9 {
        assert!((r[k] - 2.0 * (g[k] + ee[k])).abs() < 1e-15);
    }
    assert_eq!(crate::report::max_abs(&r), 2.0);
    let best = best_lambda(&[SolitonSample { lie, ricci: ric, g }]);
    assert!((best + 8.0 / 3.0).abs() < 1e-14);
}

#[test]
fn eta_einstein_fits() {
    let (g, eta) = standard_frame(3);
    let two_g: Vec<f64> = g.iter().map(|x| 2.0 * x).collect();
    let f = eta_einstein_fit(&[FitSample { s: two_g, g: g.clone(), eta: eta.clone() }]);
    assert!((f.a - 2.0).abs() < 1e-14 && f.b.abs() < 1e-14 && f.residual < 1e-14);

    let syn = synthetic_eta_einstein(1.0, -2.0, &g, &eta);
    let f = eta_einstein_fit(&[FitSample { s: syn.ricci, g: g.clone(), eta: eta.clone() }]);
    assert!((f.a - 1.0).abs() < 1e-14 && (f.b + 1.0).abs() < 1e-14);

    let f = eta_einstein_fit(&[FitSample { s: vec![0.0; 9], g, eta }]);
    assert_eq!((f.a, f.b), (0.0, 0.0));

    // One dimension: η⊗η ∥ g, the fit degrades to Einstein-only.
    let f = eta_einstein_fit(&[FitSample { s: vec![-3.0], g: vec![-1.0], eta: vec![-1.0] }]);
    assert!(f.einstein_only && (f.a - 3.0).abs() < 1e-14);
}

#[test]
fn lambda_classes() {
    assert_eq!(SolitonClass::from_lambda(-2.0), SolitonClass::Shrinking);
    assert_eq!(SolitonClass::from_lambda(5e-9), SolitonClass::Steady);
    assert_eq!(SolitonClass::from_lambda(0.1), SolitonClass::Expanding);
    assert_eq!(SolitonClass::from_lambda(f64::NAN), SolitonClass::Indeterminate);
}

#[test]
fn desitter_invariant_chain() {
    let (m, s) = setup("exp(t)", (0.0, 1.0));
    let imm = slab(&m);
    let pts = imm.params.sample_points(8, 2);
    let cfg = VerifyConfig::for_engine(Engine::Jet);
    let class = classify(&imm, &s, &pts, 1e-8, true).unwrap();
    let rep = invariant_chain_check(&imm, &s, &class, &pts, None, &cfg).unwrap();
    for e in &rep.entries {
        assert_ne!(e.status, Status::Fail, "{} {:e} {:?}", e.id, e.max_residual, e.message);
    }
    let lam = rep.get("thm_3_2_lambda").unwrap();
    assert!((lam.coefficient("lambda_relation").unwrap() + 2.0).abs() < 1e-12);
    assert!(lam.message.as_deref().unwrap().contains("shrinking"));
    let best = rep.get("soliton_best_lambda").unwrap().coefficient("best_lambda").unwrap();
    assert!((best + 8.0 / 3.0).abs() < 1e-8, "{best}");
    let fit = rep.get("eq_3_5_fit").unwrap();
    assert!((fit.coefficient("a").unwrap() - 2.0).abs() < 1e-8);
    assert!(rep.get("eq_3_5_einstein").unwrap().passed());

    // The wrong λ fails the relation honestly.
    let rep = invariant_chain_check(&imm, &s, &class, &pts, Some(-1.0), &cfg).unwrap();
    assert!(!rep.get("thm_3_2_lambda").unwrap().passed());
}

#[test]
fn linear_warp_is_steady() {
    let (m, s) = setup("t", (1.0, 2.0));
    let imm = slab(&m);
    let pts = imm.params.sample_points(6, 2);
    let cfg = VerifyConfig::for_engine(Engine::Jet);
    let class = classify(&imm, &s, &pts, 1e-8, true).unwrap();
    let rep = invariant_chain_check(&imm, &s, &class, &pts, None, &cfg).unwrap();
    for e in &rep.entries {
        assert_ne!(e.status, Status::Fail, "{} {:e} {:?}", e.id, e.max_residual, e.message);
    }
    let lam = rep.get("thm_3_2_lambda").unwrap();
    assert!(lam.coefficient("lambda_relation").unwrap().abs() < 1e-12);
    assert!(lam.message.as_deref().unwrap().contains("steady"));
}

#[test]
fn curve_chain_is_steady() {
    let (m, s) = setup("exp(t)", (0.0, 1.0));
    let curve = ImmersionRecord::slice("curve", m.domain(), &["t".to_string()], &[]).unwrap();
    let pts = curve.params.sample_points(6, 2);
    let cfg = VerifyConfig::for_engine(Engine::Jet);
    let class = classify(&curve, &s, &pts, 1e-8, true).unwrap();
    assert_eq!(class.kind, SubmanifoldKind::AntiInvariant);
    let rep = anti_invariant_chain_check(&curve, &s, &class, &pts, &cfg).unwrap();
    for e in &rep.entries {
        assert!(e.passed(), "{} {:e} {:?}", e.id, e.max_residual, e.message);
    }
    assert_eq!(rep.get("thm_3_4_einstein").unwrap().coefficient("a"), Some(0.0));
    assert!(rep.get("thm_3_4_steady").unwrap().message.as_deref().unwrap().contains("steady"));

    assert!(matches!(
        invariant_chain_check(&curve, &s, &class, &pts, None, &cfg),
        Err(GeomError::Misuse(_))
    ));
}

//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use std::process::ExitCode;

use lcsgeom::expr::parse_expr;
use lcsgeom::fieldcore::Engine;
use lcsgeom::lcsstruct::{build_grw, derive_structure, verify_axioms, GrwManifold, GrwSpec, LcsStructure};
use lcsgeom::qsmclab::{
    curvature_transform_check, induced_qsm_check, qsm_connection, qsm_submanifold_soliton_check,
    ricci_transform_check, verify_qsm_connection,
};
use lcsgeom::report::{CheckReport, Status, VerifyConfig};
use lcsgeom::scenario::{load_scenario, report_json, run_checks, RunOptions, ScenarioReport};
use lcsgeom::solitonlab::{
    anti_invariant_chain_check, best_lambda, invariant_chain_check, SolitonClass,
};
use lcsgeom::subman::{classify, verify_gauss, ImmersionRecord, SubmanifoldKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(), String>;
type Criterion = (&'static str, fn() -> Outcome);

const TOL: f64 = 1e-8;

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

struct Setup {
    manifold: GrwManifold,
    structure: LcsStructure,
    points: Vec<Vec<f64>>,
}

fn setup(dim: usize, warp: &str, t: (f64, f64), engine: Engine) -> Result<Setup, String> {
    let manifold = build_grw(&GrwSpec::flat(dim, warp, t)).map_err(|e| e.to_string())?;
    let points = manifold.domain().sample_points(32, 42);
    let metric = manifold.metric.with_engine(engine);
    let xi = manifold.xi.clone().with_engine(engine);
    let structure = derive_structure(&metric, &xi, &points, engine.tolerance()).map_err(|e| e.to_string())?;
    Ok(Setup {
        manifold,
        structure,
        points,
    })
}

fn cfg(engine: Engine) -> VerifyConfig {
    VerifyConfig::for_engine(engine)
}

/// Every listed id is present, passes, and stays below `tol`.
fn all_below(rep: &CheckReport, ids: &[&str], tol: f64, label: &str) -> Outcome {
    for id in ids {
        let e = rep.get(id).ok_or_else(|| format!("{label}: {id} missing"))?;
        ensure(e.status == Status::Pass && e.max_residual < tol, || {
            format!("{label}: {id} {} max {:e} {:?}", e.status.as_str(), e.max_residual, e.message)
        })?;
    }
    Ok(())
}

fn coefficient(rep: &CheckReport, id: &str, name: &str) -> Result<f64, String> {
    rep.get(id)
        .and_then(|e| e.coefficient(name))
        .ok_or_else(|| format!("{id}.{name} missing"))
}

fn slice(s: &Setup, name: &str, coords: &[&str], fixed: &[(&str, f64)]) -> Result<ImmersionRecord, String> {
    let coords: Vec<String> = coords.iter().map(|c| c.to_string()).collect();
    let fixed: Vec<(String, f64)> = fixed.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    ImmersionRecord::slice(name, s.manifold.domain(), &coords, &fixed).map_err(|e| e.to_string())
}

fn run_bundled(name: &str, parallel: bool) -> Result<ScenarioReport, String> {
    let sc = load_scenario(&common::bundled(name)).map_err(|e| e.to_string())?;
    Ok(run_checks(
        &sc,
        &RunOptions {
            parallel,
            ..RunOptions::default()
        },
    ))
}

const AXIOM_IDS: [&str; 13] = [
    "eq_2_1", "eq_2_2", "eq_2_3", "eq_2_7", "eq_2_8", "eq_2_9", "eq_2_10", "eq_2_11", "eq_2_12", "eq_2_13",
    "eq_2_14", "eq_2_15", "eq_2_16",
];

fn structure_derivation() -> Outcome {
    let s = setup(5, "exp(t)", (0.0, 1.0), Engine::Jet)?;
    for p in &s.points {
        let st = s.structure.at(p).map_err(|e| e.to_string())?;
        ensure((st.alpha() - 1.0).abs() < TOL && st.rho.abs() < TOL && st.beta.abs() < TOL, || {
            format!("e^t: α {} ρ {:e} β {:e}", st.alpha(), st.rho, st.beta)
        })?;
    }
    let c = setup(5, "cosh(t)", (0.5, 1.5), Engine::Jet)?;
    let at1 = c.structure.at(&[1.0, 0.5, 0.5, 0.5, 0.5]).map_err(|e| e.to_string())?;
    ensure((at1.alpha() - 1f64.tanh()).abs() < TOL, || format!("cosh: α(1) = {}", at1.alpha()))?;
    for p in &c.points {
        let st = c.structure.at(p).map_err(|e| e.to_string())?;
        ensure((st.curvature_coefficient() - 1.0).abs() < TOL, || {
            format!("cosh: α²-ρ = {}", st.curvature_coefficient())
        })?;
    }
    Ok(())
}

fn axiom_suite() -> Outcome {
    for (warp, t) in [("exp(t)", (0.0, 1.0)), ("cosh(t)", (0.5, 1.5))] {
        let s = setup(5, warp, t, Engine::Jet)?;
        all_below(&verify_axioms(&s.structure, &s.points, &cfg(Engine::Jet)), &AXIOM_IDS, TOL, warp)?;
        let f = setup(5, warp, t, Engine::Fd)?;
        all_below(&verify_axioms(&f.structure, &f.points, &cfg(Engine::Fd)), &AXIOM_IDS, 1e-4, warp)?;
        let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(1.0);
        for p in &s.points {
            let (a, b) = (s.structure.at(p).map_err(|e| e.to_string())?, f.structure.at(p).map_err(|e| e.to_string())?);
            let (ra, rb) = (a.curvature().ricci(), b.curvature().ricci());
            let mut gap = rel(a.alpha(), b.alpha()).max(rel(a.rho, b.rho));
            for (x, y) in ra.iter().zip(&rb) {
                gap = gap.max(rel(*x, *y));
            }
            ensure(gap < 1e-4, || format!("{warp}: jet/FD gap {gap:e}"))?;
        }
    }
    Ok(())
}

fn ambient_curvature() -> Outcome {
    let s = setup(5, "exp(t)", (0.0, 1.0), Engine::Jet)?;
    for p in &s.points {
        let st = s.structure.at(p).map_err(|e| e.to_string())?;
        let diff: Vec<f64> = st.curvature().ricci().iter().zip(&st.g).map(|(r, g)| r - 4.0 * g).collect();
        let r = st.frame.bilinear_max(&diff);
        ensure(r < TOL, || format!("S - 4g = {r:e}"))?;
    }
    let rep = verify_axioms(&s.structure, &s.points, &cfg(Engine::Jet));
    for id in ["eq_2_11", "eq_2_12", "eq_2_13"] {
        let c = coefficient(&rep, id, "fitted_alpha2_minus_rho")?;
        ensure((c - 1.0).abs() < TOL, || format!("{id}: α²-ρ = {c}"))?;
    }
    Ok(())
}

fn invariant_chain() -> Outcome {
    let s = setup(4, "exp(t)", (0.0, 1.0), Engine::Jet)?;
    let slab = slice(&s, "slab", &["t", "x1", "x2"], &[])?;
    let pts = slab.params.sample_points(32, 42);
    let c = cfg(Engine::Jet);
    let (gauss, _) = verify_gauss(&slab, s.structure.metric(), s.structure.connection(), &pts, &c);
    let h = coefficient(&gauss, "thm_3_1_minimal", "second_fundamental_max")?;
    let hm = coefficient(&gauss, "thm_3_1_minimal", "mean_curvature_max")?;
    ensure(h < TOL && hm < TOL, || format!("h {h:e}, H {hm:e}"))?;
    let class = classify(&slab, &s.structure, &pts, TOL, true).map_err(|e| e.to_string())?;
    let rep = invariant_chain_check(&slab, &s.structure, &class, &pts, Some(-2.0), &c).map_err(|e| e.to_string())?;
    all_below(&rep, &["eq_3_3_nabla_xi", "thm_3_1_h_xi", "eq_3_6"], TOL, "slab")?;
    let rel = coefficient(&rep, "thm_3_2_lambda", "lambda_relation")?;
    ensure((rel + 2.0).abs() < 1e-12, || format!("λ relation {rel}"))?;
    ensure(SolitonClass::from_lambda(rel) == SolitonClass::Shrinking, || "not shrinking".into())?;
    let w = rep.get("thm_3_2_wording").ok_or("thm_3_2_wording missing")?;
    ensure(w.status == Status::Diagnostic, || format!("wording status {}", w.status.as_str()))
}

fn synthetic_soliton() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let (alpha, lambda, m) = (rng.gen_range(-3.0..3.0), rng.gen_range(-5.0..5.0), rng.gen_range(2..=7));
        let r = common::synthetic_residual(alpha, lambda, m);
        ensure(r < 1e-12, || format!("(α, λ, m) = ({alpha}, {lambda}, {m}): {r:e}"))?;
    }
    Ok(())
}

fn best_lambda_recovery() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..20 {
        let planted = rng.gen_range(-10.0..10.0);
        let m = rng.gen_range(1..=6);
        let got = best_lambda(&common::planted_samples(&mut rng, planted, m, 8));
        ensure((got - planted).abs() < TOL, || format!("planted {planted}, got {got}"))?;
    }
    let s = setup(4, "exp(t)", (0.0, 1.0), Engine::Jet)?;
    let slab = slice(&s, "slab", &["t", "x1", "x2"], &[])?;
    let pts = slab.params.sample_points(32, 42);
    let class = classify(&slab, &s.structure, &pts, TOL, true).map_err(|e| e.to_string())?;
    let rep = invariant_chain_check(&slab, &s.structure, &class, &pts, None, &cfg(Engine::Jet)).map_err(|e| e.to_string())?;
    let bl = coefficient(&rep, "soliton_best_lambda", "best_lambda")?;
    ensure((bl + 8.0 / 3.0).abs() < 1e-6, || format!("best λ {bl}"))
}

fn anti_invariant_chain() -> Outcome {
    let s = setup(4, "exp(t)", (0.0, 1.0), Engine::Jet)?;
    let curve = slice(&s, "curve", &["t"], &[])?;
    let pts = curve.params.sample_points(32, 42);
    let class = classify(&curve, &s.structure, &pts, TOL, true).map_err(|e| e.to_string())?;
    ensure(class.kind == SubmanifoldKind::AntiInvariant, || format!("curve classified {}", class.kind))?;
    let rep = anti_invariant_chain_check(&curve, &s.structure, &class, &pts, &cfg(Engine::Jet)).map_err(|e| e.to_string())?;
    all_below(&rep, &["thm_3_3_killing", "thm_3_4_ricci_xi", "thm_3_4_steady", "thm_3_4_einstein"], TOL, "curve")?;
    let lambda = coefficient(&rep, "thm_3_4_steady", "lambda")?;
    ensure(SolitonClass::from_lambda(lambda) == SolitonClass::Steady, || format!("λ {lambda}"))?;

    for (name, coords, fixed, want) in [
        ("slab", &["t", "x1", "x2"][..], &[][..], SubmanifoldKind::Invariant),
        ("fiber", &["x1", "x2", "x3"][..], &[("t", 0.5)][..], SubmanifoldKind::Neither),
    ] {
        let imm = slice(&s, name, coords, fixed)?;
        let pts = imm.params.sample_points(32, 42);
        let k = classify(&imm, &s.structure, &pts, TOL, true).map_err(|e| e.to_string())?.kind;
        ensure(k == want, || format!("{name} classified {k}"))?;
    }
    Ok(())
}

fn qsmc_ambient() -> Outcome {
    let c = cfg(Engine::Jet);
    for (warp, t) in [("exp(t)", (0.0, 1.0)), ("cosh(t)", (0.5, 1.5)), ("t", (0.5, 1.5))] {
        let s = setup(5, warp, t, Engine::Jet)?;
        let q = qsm_connection(&s.structure);
        if warp != "t" {
            all_below(&verify_qsm_connection(&q, &s.points, &c), &["eq_1_2", "qsmc_metric"], TOL, warp)?;
        }
        let (ricci, _) = ricci_transform_check(&q, &s.points, &c);
        all_below(&ricci, &["eq_2_30_contraction"], 1e-10, warp)?;
        if warp == "exp(t)" {
            all_below(&curvature_transform_check(&q, &s.points, &c), &["eq_2_29"], 1e-6, warp)?;
            all_below(&ricci, &["eq_2_30"], 1e-6, warp)?;
        }
    }
    Ok(())
}

fn qsmc_submanifold() -> Outcome {
    let s = setup(4, "exp(t)", (0.0, 1.0), Engine::Jet)?;
    let slab = slice(&s, "slab", &["t", "x1", "x2"], &[])?;
    let pts = slab.params.sample_points(32, 42);
    let c = cfg(Engine::Jet);
    let q = qsm_connection(&s.structure);
    let class = classify(&slab, &s.structure, &pts, TOL, true).map_err(|e| e.to_string())?;
    let ind = induced_qsm_check(&slab, &q, &class, &pts, &c).map_err(|e| e.to_string())?;
    all_below(&ind, &["eq_3_10", "eq_3_9_normal", "qsm_sub_nabla_xi", "eq_3_11"], TOL, "slab")?;
    let (sub, _) = qsm_submanifold_soliton_check(&slab, &q, &class, &pts, None, &c).map_err(|e| e.to_string())?;
    let sbar = coefficient(&sub, "eq_3_12_contraction", "ricci_bar_max")?;
    ensure(sbar < 1e-6, || format!("S̄ max {sbar:e}"))?;
    let fit = sub.get("eq_3_12_fit").ok_or("eq_3_12_fit missing")?;
    ensure(fit.status == Status::Diagnostic, || "eq_3_12_fit not diagnostic".into())?;
    for name in ["fitted_g", "fitted_eta_eta", "printed_g", "contraction_g"] {
        ensure(fit.coefficient(name).is_some_and(f64::is_finite), || format!("eq_3_12_fit.{name} missing"))?;
    }
    Ok(())
}

fn diagnostic_probes() -> Outcome {
    let sphere = run_bundled("sphere_fiber_errata", true)?;
    ensure(sphere.exit_code() == 0, || "sphere_fiber_errata exits nonzero".into())?;
    let min = sphere.row("thm_3_1_minimal", Some("sphere")).ok_or("thm_3_1_minimal@sphere missing")?;
    let h = min.entry.coefficient("mean_curvature_max").unwrap_or(0.0);
    ensure(min.entry.status == Status::Diagnostic && h > 0.1, || format!("‖H‖ {h}, {}", min.entry.status.as_str()))?;
    let fit = sphere.row("eq_3_12_fit", Some("sphere")).ok_or("eq_3_12_fit@sphere missing")?;
    ensure(
        fit.entry.status == Status::Diagnostic && fit.entry.coefficient("printed_g").is_some(),
        || "(3.12) comparison not reported".into(),
    )?;
    let cosh = run_bundled("cosh_structure", true)?;
    ensure(cosh.exit_code() == 0, || "cosh_structure exits nonzero".into())?;
    let r = cosh.row("eq_2_29", None).ok_or("eq_2_29 missing")?;
    ensure(r.entry.status == Status::Diagnostic && r.entry.max_residual.is_finite(), || {
        format!("eq_2_29 on cosh: {}", r.entry.status.as_str())
    })
}

fn infrastructure() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let ast = common::random_ast(&mut rng, 4);
        let text = ast.to_string();
        let back = parse_expr(&text).map_err(|e| format!("{text}: {e}"))?;
        ensure(back == ast, || format!("round trip changed {text}"))?;
        let p = [rng.gen_range(0.5..1.5), rng.gen_range(0.5..1.5)];
        let gap = common::jet_fd_gap(&ast, p);
        ensure(gap < 1e-5, || format!("{text} at {p:?}: jet/FD gap {gap:e}"))?;
    }
    let a = report_json(&run_bundled("desitter_invariant", true)?);
    let b = report_json(&run_bundled("desitter_invariant", true)?);
    let c = report_json(&run_bundled("desitter_invariant", false)?);
    ensure(a == b, || "reports differ across runs".into())?;
    ensure(a == c, || "serial and parallel reports differ".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("structure derivation", structure_derivation),
        ("axiom suite", axiom_suite),
        ("ambient curvature", ambient_curvature),
        ("invariant submanifold chain", invariant_chain),
        ("synthetic soliton algebra", synthetic_soliton),
        ("best_lambda", best_lambda_recovery),
        ("anti-invariant chain", anti_invariant_chain),
        ("QSMC ambient", qsmc_ambient),
        ("QSMC submanifold", qsmc_submanifold),
        ("diagnostic probes", diagnostic_probes),
        ("infrastructure", infrastructure),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(()) => println!("PASS  {:>2}. {name}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL  {:>2}. {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} acceptance criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

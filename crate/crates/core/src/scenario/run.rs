use std::collections::BTreeMap;

use crate::error::Result;
use crate::fieldcore::Engine;
use crate::lcsstruct::{derive_structure, verify_axioms, LcsStructure};
use crate::qsmclab::{
    curvature_transform_check, induced_qsm_check, qsm_connection, qsm_submanifold_soliton_check,
    ricci_transform_check, verify_qsm_connection,
};
use crate::report::{map_points, CheckEntry, CheckReport, Status, VerifyConfig};
use crate::scenario::doc::{EngineName, Scenario};
use crate::scenario::registry::{
    Assertability, CheckSpec, Group, AMBIENT_RICCI_CHECKS, CLASSIFICATION_CHECKS, ENGINE_CHECKS, STRUCTURE_CHECKS,
};
use crate::solitonlab::{anti_invariant_chain_check, eta_einstein_fit, invariant_chain_check, FitSample, SolitonClass};
use crate::subman::{classify, verify_gauss, SubmanifoldClass, SubmanifoldKind};

/// Command-line overrides of the scenario's engine, seed and sample count.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub engine: Option<Engine>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub parallel: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            engine: None,
            seed: None,
            samples: None,
            parallel: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub target: Option<String>,
    pub assertability: Assertability,
    pub entry: CheckEntry,
}

/// One row of the submanifold × connection summary.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixRow {
    pub submanifold: String,
    pub kind: Option<SubmanifoldKind>,
    pub connection: &'static str,
    pub lambda: Option<f64>,
    pub soliton: Option<SolitonClass>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioReport {
    pub scenario: String,
    pub engine: Engine,
    pub seed: u64,
    pub samples: usize,
    pub tolerance: f64,
    pub matrix: Vec<MatrixRow>,
    pub rows: Vec<ReportRow>,
}

impl ScenarioReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.entry.status != Status::Fail)
    }

    pub fn count(&self, status: Status) -> usize {
        self.rows.iter().filter(|r| r.entry.status == status).count()
    }

    pub fn row(&self, id: &str, target: Option<&str>) -> Option<&ReportRow> {
        self.rows
            .iter()
            .find(|r| r.entry.id == id && r.target.as_deref() == target)
    }

    /// 0 when every assertable check passes, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }
}

struct Ctx<'a> {
    sc: &'a Scenario,
    cfg: VerifyConfig,
    points: Vec<Vec<f64>>,
    structure: Result<LcsStructure>,
    sub_points: Vec<Vec<Vec<f64>>>,
    classes: BTreeMap<usize, Result<SubmanifoldClass>>,
}

fn build_structure(sc: &Scenario, engine: Engine, points: &[Vec<f64>], tol: f64) -> Result<LcsStructure> {
    let metric = sc.manifold.metric.with_engine(engine);
    let xi = sc.manifold.xi.clone().with_engine(engine);
    derive_structure(&metric, &xi, points, tol)
}

/// Executes the requested checks in declared order.
///
/// Component errors become failed entries carrying the error message.
pub fn run_checks(scenario: &Scenario, opts: &RunOptions) -> ScenarioReport {
    let mut sc = scenario.clone();
    if let Some(e) = opts.engine {
        sc.doc.engine = match e {
            Engine::Jet => EngineName::Jet,
            Engine::Fd => EngineName::Fd,
        };
    }
    if let Some(s) = opts.seed {
        sc.doc.seed = s;
    }
    if let Some(n) = opts.samples {
        sc.doc.samples = n.max(1);
    }
    let engine = sc.engine();
    let cfg = VerifyConfig {
        tolerance: sc.tolerance(),
        seed: sc.doc.seed,
        trials: sc.doc.trials,
        parallel: opts.parallel,
    };
    let points = sc.manifold.domain().sample_points(sc.doc.samples, sc.doc.seed);
    let validate = sc.doc.structure.validate_tolerance.unwrap_or(cfg.tolerance);
    let structure = build_structure(&sc, engine, &points, validate);
    let sub_points = sc
        .submanifolds
        .iter()
        .map(|s| s.imm.params.sample_points(sc.doc.samples, sc.doc.seed))
        .collect();
    let mut ctx = Ctx {
        sc: &sc,
        cfg,
        points,
        structure,
        sub_points,
        classes: BTreeMap::new(),
    };
    for t in sc.checks.iter().filter_map(|c| c.target) {
        if !ctx.classes.contains_key(&t) {
            let class = match &ctx.structure {
                Ok(s) => classify(&sc.submanifolds[t].imm, s, &ctx.sub_points[t], ctx.cfg.tolerance, ctx.cfg.parallel),
                Err(e) => Err(e.clone()),
            };
            ctx.classes.insert(t, class);
        }
    }

    let mut groups: BTreeMap<(Group, Option<usize>), Result<CheckReport>> = BTreeMap::new();
    for c in &sc.checks {
        groups
            .entry((c.spec.group, c.target))
            .or_insert_with(|| run_group(&ctx, c.spec.group, c.target));
    }

    let rows = sc
        .checks
        .iter()
        .map(|c| {
            let entry = match &groups[&(c.spec.group, c.target)] {
                Ok(rep) => match rep.get(c.spec.id) {
                    Some(e) => e.clone(),
                    None => CheckEntry::failed(
                        c.spec.id,
                        c.spec.equation,
                        ctx.cfg.tolerance,
                        not_applicable(&ctx, c.spec, c.target),
                    ),
                },
                Err(e) => CheckEntry::failed(c.spec.id, c.spec.equation, ctx.cfg.tolerance, e.to_string()),
            };
            let entry = if c.spec.assertability == Assertability::Diagnostic && entry.status != Status::Diagnostic {
                entry.diagnostic()
            } else {
                entry
            };
            ReportRow {
                target: c.target.map(|t| sc.submanifolds[t].imm.name.clone()),
                assertability: c.spec.assertability,
                entry,
            }
        })
        .collect();

    ScenarioReport {
        scenario: sc.doc.name.clone(),
        engine,
        seed: sc.doc.seed,
        samples: sc.doc.samples,
        tolerance: ctx.cfg.tolerance,
        matrix: matrix(&ctx, &groups),
        rows,
    }
}

fn not_applicable(ctx: &Ctx, spec: &CheckSpec, target: Option<usize>) -> String {
    match target.and_then(|t| ctx.classes.get(&t)) {
        Some(Ok(class)) => format!("{} does not apply to a {} submanifold", spec.id, class.kind),
        _ => format!("{} produced no result", spec.id),
    }
}

fn run_group(ctx: &Ctx, group: Group, target: Option<usize>) -> Result<CheckReport> {
    let s = ctx.structure.as_ref().map_err(Clone::clone)?;
    let cfg = &ctx.cfg;
    let pts = &ctx.points;
    let class = || -> Result<&SubmanifoldClass> {
        let t = target.expect("submanifold group without target");
        ctx.classes[&t].as_ref().map_err(Clone::clone)
    };
    let sub = || {
        let t = target.expect("submanifold group without target");
        (&ctx.sc.submanifolds[t], &ctx.sub_points[t][..])
    };
    match group {
        Group::Structure => structure_values(s, pts, cfg),
        Group::Axioms => Ok(verify_axioms(s, pts, cfg)),
        Group::AmbientRicci => ambient_ricci(s, pts, cfg),
        Group::EngineAgreement => engine_agreement(ctx),
        Group::QsmConnection => Ok(verify_qsm_connection(&qsm_connection(s), pts, cfg)),
        Group::QsmCurvature => Ok(curvature_transform_check(&qsm_connection(s), pts, cfg)),
        Group::QsmRicci => Ok(ricci_transform_check(&qsm_connection(s), pts, cfg).0),
        Group::Classification => {
            let (entry, _) = sub();
            Ok(classification_entry(class()?, entry.expect, cfg.tolerance))
        }
        Group::Gauss => {
            let (entry, upts) = sub();
            Ok(verify_gauss(&entry.imm, s.metric(), s.connection(), upts, cfg).0)
        }
        Group::InvariantChain => {
            let (entry, upts) = sub();
            invariant_chain_check(&entry.imm, s, class()?, upts, entry.lambda, cfg)
        }
        Group::AntiInvariantChain => {
            let (entry, upts) = sub();
            anti_invariant_chain_check(&entry.imm, s, class()?, upts, cfg)
        }
        Group::QsmInduced => {
            let (entry, upts) = sub();
            induced_qsm_check(&entry.imm, &qsm_connection(s), class()?, upts, cfg)
        }
        Group::QsmSubmanifold => {
            let (entry, upts) = sub();
            qsm_submanifold_soliton_check(&entry.imm, &qsm_connection(s), class()?, upts, entry.lambda, cfg)
                .map(|r| r.0)
        }
    }
}

fn structure_values(s: &LcsStructure, pts: &[Vec<f64>], cfg: &VerifyConfig) -> Result<CheckReport> {
    let per: Vec<Result<[f64; 6]>> = map_points(pts, cfg.parallel, |_, p| {
        let st = s.at(p)?;
        Ok([st.alpha(), st.rho, st.beta, st.trace_phi(), st.curvature_coefficient(), st.ls_residual])
    });
    let vals = per.into_iter().collect::<Result<Vec<_>>>()?;
    let count = vals.len().max(1) as f64;
    let mean = |k: usize| vals.iter().map(|v| v[k]).sum::<f64>() / count;
    let (id, eq) = STRUCTURE_CHECKS[0];
    let ls: Vec<f64> = vals.iter().map(|v| v[5]).collect();
    let entry = CheckEntry::from_residuals(id, eq, &ls, cfg.tolerance)
        .diagnostic()
        .with_coefficient("alpha_mean", mean(0))
        .with_coefficient("alpha_min", vals.iter().map(|v| v[0]).fold(f64::INFINITY, f64::min))
        .with_coefficient("alpha_max", vals.iter().map(|v| v[0]).fold(f64::NEG_INFINITY, f64::max))
        .with_coefficient("rho_mean", mean(1))
        .with_coefficient("beta_mean", mean(2))
        .with_coefficient("trace_phi_mean", mean(3))
        .with_coefficient("alpha2_minus_rho_mean", mean(4))
        .with_message("residual: frame least-squares misfit of ∇ξ = α(I + η⊗ξ)");
    Ok(CheckReport { entries: vec![entry] })
}

fn ambient_ricci(s: &LcsStructure, pts: &[Vec<f64>], cfg: &VerifyConfig) -> Result<CheckReport> {
    let per: Vec<Result<FitSample>> = map_points(pts, cfg.parallel, |_, p| {
        let st = s.at(p)?;
        Ok(FitSample {
            s: st.frame.bilinear_components(&st.curvature().ricci()),
            g: st.frame.bilinear_components(&st.g),
            eta: st.frame.basis.iter().map(|e| st.eta_of(e)).collect(),
        })
    });
    let samples = per.into_iter().collect::<Result<Vec<_>>>()?;
    let fit = eta_einstein_fit(&samples);
    let (id, eq) = AMBIENT_RICCI_CHECKS[0];
    let entry = CheckEntry::from_residuals(id, eq, &[fit.residual], cfg.tolerance)
        .diagnostic()
        .with_coefficient("a", fit.a)
        .with_coefficient("b", fit.b);
    Ok(CheckReport { entries: vec![entry] })
}

fn engine_agreement(ctx: &Ctx) -> Result<CheckReport> {
    let sc = ctx.sc;
    let tol = sc.doc.tolerances.fd.unwrap_or(Engine::Fd.tolerance());
    let validate = sc.doc.structure.validate_tolerance.unwrap_or(tol);
    let jet = build_structure(sc, Engine::Jet, &ctx.points, validate)?;
    let fd = build_structure(sc, Engine::Fd, &ctx.points, validate)?;
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(1.0);
    let per: Vec<Result<f64>> = map_points(&ctx.points, ctx.cfg.parallel, |_, p| {
        let (a, b) = (jet.at(p)?, fd.at(p)?);
        let mut worst = rel(a.alpha(), b.alpha()).max(rel(a.rho, b.rho));
        for (x, y) in a.conn.values().iter().zip(b.conn.values()) {
            worst = worst.max(rel(*x, y));
        }
        let (sa, sb) = (a.curvature().ricci(), b.curvature().ricci());
        for (x, y) in a.frame.bilinear_components(&sa).iter().zip(a.frame.bilinear_components(&sb)) {
            worst = worst.max(rel(*x, y));
        }
        Ok(worst)
    });
    let res = per.into_iter().collect::<Result<Vec<_>>>()?;
    let (id, eq) = ENGINE_CHECKS[0];
    Ok(CheckReport {
        entries: vec![CheckEntry::from_residuals(id, eq, &res, tol)],
    })
}

fn classification_entry(class: &SubmanifoldClass, expect: Option<SubmanifoldKind>, tol: f64) -> CheckReport {
    let (id, eq) = CLASSIFICATION_CHECKS[0];
    let mut entry = match expect {
        Some(k) if k == class.kind => CheckEntry::from_residuals(id, eq, &[0.0], tol),
        Some(k) => CheckEntry::failed(id, eq, tol, format!("expected {k}, classified as {}", class.kind)),
        None => CheckEntry::from_residuals(id, eq, &[0.0], tol).diagnostic(),
    }
    .with_coefficient("xi_normal_max", class.xi_normal_max)
    .with_coefficient("phi_tangential_max", class.phi_tangential_max)
    .with_coefficient("phi_normal_max", class.phi_normal_max);
    if entry.message.is_none() {
        let mut m = format!("classified as {}", class.kind);
        if let Some(note) = &class.message {
            m.push_str("; ");
            m.push_str(note);
        }
        entry = entry.with_message(m);
    }
    CheckReport { entries: vec![entry] }
}

fn matrix(ctx: &Ctx, groups: &BTreeMap<(Group, Option<usize>), Result<CheckReport>>) -> Vec<MatrixRow> {
    let mut rows = Vec::new();
    for (t, class) in &ctx.classes {
        let name = ctx.sc.submanifolds[*t].imm.name.clone();
        let kind = class.as_ref().ok().map(|c| c.kind);
        let lookup = |g: Group, id: &str, coef: &str| -> Option<f64> {
            groups.get(&(g, Some(*t)))?.as_ref().ok()?.get(id)?.coefficient(coef)
        };
        let lc = lookup(Group::InvariantChain, "thm_3_2_lambda", "lambda")
            .or_else(|| lookup(Group::AntiInvariantChain, "thm_3_4_steady", "lambda"));
        let qs = lookup(Group::QsmSubmanifold, "eq_3_7", "lambda")
            .or_else(|| lookup(Group::QsmSubmanifold, "thm_4_2_fit", "lambda_from_fit"));
        let ran = |g: Group| groups.contains_key(&(g, Some(*t)));
        if lc.is_some() || ran(Group::InvariantChain) || ran(Group::AntiInvariantChain) || qs.is_none() {
            rows.push(MatrixRow {
                submanifold: name.clone(),
                kind,
                connection: "levi-civita",
                lambda: lc,
                soliton: lc.map(SolitonClass::from_lambda),
            });
        }
        if qs.is_some() || ran(Group::QsmSubmanifold) {
            rows.push(MatrixRow {
                submanifold: name,
                kind,
                connection: "quarter-symmetric",
                lambda: qs,
                soliton: qs.map(SolitonClass::from_lambda),
            });
        }
    }
    rows
}

#![allow(dead_code)]

use std::path::PathBuf;

use lcsgeom::expr::{BinOp, CompiledExpr, ExprAst, Func};
use lcsgeom::fieldcore::Jet;
use lcsgeom::solitonlab::{standard_frame, synthetic_eta_einstein, SolitonSample};
use rand::Rng;

pub const VARS: [&str; 2] = ["t", "x"];

pub fn bundled(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(format!("{name}.json"))
}

fn num(v: f64) -> ExprAst {
    ExprAst::Num(v)
}

fn bin(op: BinOp, a: ExprAst, b: ExprAst) -> ExprAst {
    ExprAst::Bin(op, Box::new(a), Box::new(b))
}

fn call(f: Func, args: Vec<ExprAst>) -> ExprAst {
    ExprAst::Call(f, args)
}

/// `1 + a^2`: strictly positive, keeps log/sqrt/div/pow inside their domains.
fn positive(a: ExprAst) -> ExprAst {
    bin(BinOp::Add, num(1.0), bin(BinOp::Pow, a, num(2.0)))
}

/// A random expression over `t, x` that is smooth and finite on `[0.5, 1.5]²`.
pub fn random_ast<R: Rng>(rng: &mut R, depth: u32) -> ExprAst {
    if depth == 0 || rng.gen_bool(0.25) {
        return if rng.gen_bool(0.5) {
            ExprAst::Var(VARS[rng.gen_range(0..2)].to_string())
        } else {
            // Short decimals so that printing is exact in both directions.
            num(rng.gen_range(0..400) as f64 / 100.0)
        };
    }
    let sub = |rng: &mut R| random_ast(rng, depth - 1);
    match rng.gen_range(0..14) {
        0 => bin(BinOp::Add, sub(rng), sub(rng)),
        1 => bin(BinOp::Sub, sub(rng), sub(rng)),
        2 => bin(BinOp::Mul, sub(rng), sub(rng)),
        3 => bin(BinOp::Div, sub(rng), positive(sub(rng))),
        4 => bin(BinOp::Pow, positive(sub(rng)), num(rng.gen_range(0..5) as f64 / 2.0)),
        5 => ExprAst::Neg(Box::new(sub(rng))),
        6 => call(Func::Exp, vec![call(Func::Tanh, vec![sub(rng)])]),
        7 => call(Func::Log, vec![positive(sub(rng))]),
        8 => call(Func::Sin, vec![sub(rng)]),
        9 => call(Func::Cos, vec![sub(rng)]),
        10 => call(Func::Sinh, vec![call(Func::Tanh, vec![sub(rng)])]),
        11 => call(Func::Cosh, vec![call(Func::Tanh, vec![sub(rng)])]),
        12 => call(Func::Sqrt, vec![positive(sub(rng))]),
        _ => call(Func::Pow, vec![positive(sub(rng)), call(Func::Tanh, vec![sub(rng)])]),
    }
}

/// Largest relative gap between jet derivatives (first and second) and central differences.
pub fn jet_fd_gap(ast: &ExprAst, p: [f64; 2]) -> f64 {
    let names: Vec<String> = VARS.iter().map(|s| s.to_string()).collect();
    let e = ast.compile(&names).unwrap();
    let jet = e.eval(&Jet::variables(&p)).unwrap();
    let f = |q: [f64; 2]| e.eval_f64(&q).unwrap();
    let shift = |i: usize, h: f64| {
        let mut q = p;
        q[i] += h;
        q
    };
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(1.0);
    let mut gap = 0.0f64;
    let h1 = 1e-5;
    let h2 = 1e-4;
    for i in 0..2 {
        let d = (f(shift(i, h1)) - f(shift(i, -h1))) / (2.0 * h1);
        gap = gap.max(rel(jet.grad[i], d));
        let dd = (f(shift(i, h2)) - 2.0 * f(p) + f(shift(i, -h2))) / (h2 * h2);
        gap = gap.max(rel(jet.hess[i][i], dd));
    }
    let mixed = |a: f64, b: f64| {
        let q = [p[0] + a, p[1] + b];
        f(q)
    };
    let dxy = (mixed(h2, h2) - mixed(h2, -h2) - mixed(-h2, h2) + mixed(-h2, -h2)) / (4.0 * h2 * h2);
    gap.max(rel(jet.hess[0][1], dxy))
}

pub fn compiled(ast: &ExprAst) -> CompiledExpr {
    let names: Vec<String> = VARS.iter().map(|s| s.to_string()).collect();
    ast.compile(&names).unwrap()
}

/// `£ + 2S + 2λg` for the η-Einstein soliton built from `(α, λ, m)`.
pub fn synthetic_residual(alpha: f64, lambda: f64, m: usize) -> f64 {
    let (g, eta) = standard_frame(m);
    let s = synthetic_eta_einstein(alpha, lambda, &g, &eta);
    lcsgeom::solitonlab::soliton_residual(&s.lie, &s.ricci, &s.g, lambda)
        .iter()
        .fold(0.0, |a, v| a.max(v.abs()))
}

/// Exact soliton samples with a planted λ: `£ = -2S - 2λg` for random `S` and `g`.
pub fn planted_samples<R: Rng>(rng: &mut R, lambda: f64, m: usize, count: usize) -> Vec<SolitonSample> {
    (0..count)
        .map(|_| {
            let g: Vec<f64> = (0..m * m).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let ricci: Vec<f64> = (0..m * m).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let lie = ricci.iter().zip(&g).map(|(s, gg)| -2.0 * s - 2.0 * lambda * gg).collect();
            SolitonSample { lie, ricci, g }
        })
        .collect()
}

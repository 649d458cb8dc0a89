// Index expressions spell out the k*n*n + i*n + j layout.
#![allow(clippy::erasing_op, clippy::identity_op)]

use std::sync::Arc;

use super::*;
use crate::error::GeomError;
use crate::fieldcore::{ChartDomain, Jet, TensorFieldHandle, Valence};
use crate::lcsstruct::{build_grw, GrwSpec};

fn sphere() -> MetricField {
    let domain = ChartDomain::new(vec!["theta".into(), "phi".into()], vec![(0.4, 2.6), (0.0, 6.0)]).unwrap();
    let f = TensorFieldHandle::from_jet_fn(
        Valence::BILINEAR,
        domain,
        Arc::new(|x: &[Jet]| {
            let s = x[0].sin();
            Ok(vec![Jet::constant(1.0), Jet::zero(), Jet::zero(), s * s])
        }),
    );
    MetricField::new(f, Signature::Riemannian).unwrap()
}

#[test]
fn minkowski_christoffels_vanish() {
    let domain = ChartDomain::cube(3, -1.0, 1.0).unwrap();
    let g = TensorFieldHandle::constant(
        Valence::BILINEAR,
        domain,
        vec![-1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
    );
    let m = MetricField::lorentzian(g).unwrap();
    let cp = levi_civita(&m).at(&[0.1, 0.2, 0.3]).unwrap();
    assert!(cp.values().iter().all(|v| *v == 0.0));
}

#[test]
fn grw_christoffels() {
    let m = build_grw(&GrwSpec::flat(3, "exp(t)", (0.0, 1.0))).unwrap();
    let t = 0.4;
    let cp = levi_civita(&m.metric).at(&[t, 0.5, 0.5]).unwrap();
    // Γ^t_xx = f f' = e^{2t}, Γ^x_tx = f'/f = 1
    assert!((cp.g(0, 1, 1).value - (2.0 * t).exp()).abs() < 1e-12);
    assert!((cp.g(1, 0, 1).value - 1.0).abs() < 1e-12);
    assert!((cp.g(1, 1, 0).value - 1.0).abs() < 1e-12);
    // ∂_t Γ^t_xx = 2 e^{2t}
    assert!((cp.g(0, 1, 1).grad[0] - 2.0 * (2.0 * t).exp()).abs() < 1e-10);

    let c = build_grw(&GrwSpec::flat(3, "cosh(t)", (0.5, 1.5))).unwrap();
    let cp = levi_civita(&c.metric).at(&[1.0, 0.5, 0.5]).unwrap();
    assert!((cp.g(1, 0, 1).value - 1f64.tanh()).abs() < 1e-12);
}

#[test]
fn exponential_grw_is_einstein() {
    // -dt² + e^{2t}δ is de Sitter: S = (n-1) g.
    let n = 5;
    let m = build_grw(&GrwSpec::flat(n, "exp(t)", (0.0, 1.0))).unwrap();
    let p = [0.3, 0.2, 0.4, 0.6, 0.8];
    let s = ricci(&levi_civita(&m.metric), &p).unwrap();
    let g = m.metric.values(&p).unwrap();
    for i in 0..n * n {
        assert!((s[i] - (n as f64 - 1.0) * g[i]).abs() < 1e-10, "{i}: {} vs {}", s[i], g[i]);
    }
}

#[test]
fn round_sphere_has_unit_curvature() {
    let m = sphere();
    let p = [1.1, 2.0];
    let r = curvature(&levi_civita(&m), &p).unwrap();
    let g = m.values(&p).unwrap();
    // K = g(R(X,Y)Y, X) / (g(X,X)g(Y,Y) - g(X,Y)²)
    let (x, y) = ([1.0, 0.0], [0.0, 1.0]);
    let ryy = r.apply(&x, &y, &y);
    let k = crate::fieldcore::gdot(&g, &ryy, &x) / (g[0] * g[3]);
    assert!((k - 1.0).abs() < 1e-12, "K = {k}");
}

#[test]
fn killing_field_has_zero_lie_derivative() {
    let m = sphere();
    let v = TensorFieldHandle::constant(Valence::VECTOR, m.domain().clone(), vec![0.0, 1.0]);
    let lie = lie_derivative_metric(&levi_civita(&m), &m, &v, &[0.9, 1.0]).unwrap();
    assert!(lie.iter().all(|x| x.abs() < 1e-12));
    let w = TensorFieldHandle::constant(Valence::VECTOR, m.domain().clone(), vec![1.0, 0.0]);
    let lie = lie_derivative_metric(&levi_civita(&m), &m, &w, &[0.9, 1.0]).unwrap();
    // £_{∂θ} g = 2 sinθ cosθ dφ²
    assert!((lie[3] - (2.0 * 0.9f64).sin()).abs() < 1e-12);
}

#[test]
fn flat_connection_on_grw_is_not_metric() {
    let m = build_grw(&GrwSpec::flat(3, "exp(t)", (0.0, 1.0))).unwrap();
    let zero = ConnectionField::constant(m.domain().clone(), vec![0.0; 27]);
    assert!(metric_compat_residual(&zero, &m.metric, &[0.5, 0.5, 0.5]).unwrap() > 0.1);
    let lc = levi_civita(&m.metric);
    assert!(metric_compat_residual(&lc, &m.metric, &[0.5, 0.5, 0.5]).unwrap() < 1e-12);
}

#[test]
fn torsion_of_custom_connection() {
    let domain = ChartDomain::cube(2, -1.0, 1.0).unwrap();
    let mut gamma = vec![0.0; 8];
    gamma[0 * 4 + 0 * 2 + 1] = 1.0; // Γ^0_01
    let conn = ConnectionField::constant(domain.clone(), gamma);
    let t = conn.torsion().values(&[0.0, 0.0]).unwrap();
    assert_eq!(t[0 * 4 + 0 * 2 + 1], 1.0);
    assert_eq!(t[0 * 4 + 1 * 2 + 0], -1.0);
    let g = MetricField::new(
        TensorFieldHandle::constant(Valence::BILINEAR, domain.clone(), vec![1.0, 0.0, 0.0, 1.0]),
        Signature::Riemannian,
    )
    .unwrap();
    let v = TensorFieldHandle::constant(Valence::VECTOR, domain, vec![1.0, 0.0]);
    assert!(matches!(
        lie_derivative_metric(&conn, &g, &v, &[0.0, 0.0]),
        Err(GeomError::Misuse(_))
    ));
}

#[test]
fn lc_curvature_symmetries() {
    let mut spec = GrwSpec::flat(4, "t^2 + 1", (0.5, 1.5));
    spec.fiber = crate::lcsstruct::Fiber::SphereBlock;
    let m = build_grw(&spec).unwrap();
    let p = [1.0, 1.2, 0.7, 0.3];
    let n = 4;
    let r = curvature(&levi_civita(&m.metric), &p).unwrap();
    let g = m.metric.values(&p).unwrap();
    let lower = |a: usize, b: usize, c: usize, d: usize| -> f64 {
        // R_{abcd} = g_{al} R^l_{bcd}
        (0..n).map(|l| g[a * n + l] * r.get(l, b, c, d)).sum()
    };
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    assert!((r.get(a, b, c, d) + r.get(a, b, d, c)).abs() < 1e-10);
                    assert!((lower(a, b, c, d) + lower(b, a, c, d)).abs() < 1e-10);
                    assert!((lower(a, b, c, d) - lower(c, d, a, b)).abs() < 1e-10);
                    // first Bianchi: R^a_{bcd} + R^a_{cdb} + R^a_{dbc} = 0
                    let bianchi = r.get(a, b, c, d) + r.get(a, c, d, b) + r.get(a, d, b, c);
                    assert!(bianchi.abs() < 1e-10);
                }
            }
        }
    }
    let s = r.ricci();
    for i in 0..n {
        for j in 0..n {
            assert!((s[i * n + j] - s[j * n + i]).abs() < 1e-10);
        }
    }
    let frame = m.metric.at(&p).unwrap().frame(None).unwrap();
    let sf = ricci_over_frame(&r, &g, &frame);
    for i in 0..n * n {
        assert!((s[i] - sf[i]).abs() < 1e-10);
    }
}

#[test]
fn curvature_matches_differenced_christoffels() {
    let mut spec = GrwSpec::flat(3, "cosh(t)", (0.5, 1.5));
    spec.fiber = crate::lcsstruct::Fiber::Explicit(vec!["1+x2^2".into(), "x1*x2".into(), "x1*x2".into(), "2".into()]);
    let m = build_grw(&spec).unwrap();
    let lc = levi_civita(&m.metric);
    let p = [1.0, 0.4, 0.6];
    let n = 3;
    let r = curvature(&lc, &p).unwrap();
    let gam = |q: &[f64]| lc.at(q).unwrap().values();
    let g0 = gam(&p);
    let h = 1e-5;
    let dgam = |i: usize| {
        let mut a = p.to_vec();
        let mut b = p.to_vec();
        a[i] += h;
        b[i] -= h;
        let (ga, gb) = (gam(&a), gam(&b));
        ga.iter().zip(&gb).map(|(x, y)| (x - y) / (2.0 * h)).collect::<Vec<_>>()
    };
    let d: Vec<Vec<f64>> = (0..n).map(dgam).collect();
    let idx = |k: usize, i: usize, j: usize| k * n * n + i * n + j;
    for l in 0..n {
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut s = d[i][idx(l, j, k)] - d[j][idx(l, i, k)];
                    for q in 0..n {
                        s += g0[idx(l, i, q)] * g0[idx(q, j, k)] - g0[idx(l, j, q)] * g0[idx(q, i, k)];
                    }
                    assert!((s - r.get(l, k, i, j)).abs() < 1e-7);
                }
            }
        }
    }
}

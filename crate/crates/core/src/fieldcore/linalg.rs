//! Small dense helpers for coordinate vectors.

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

/// `Σ c_i v_i`.
pub fn lincomb(terms: &[(f64, &[f64])]) -> Vec<f64> {
    let n = terms.first().map_or(0, |(_, v)| v.len());
    let mut out = vec![0.0; n];
    for (c, v) in terms {
        for k in 0..n {
            out[k] += c * v[k];
        }
    }
    out
}

/// `A v` for a row-major `(1,1)` tensor `A[k*n + i]`.
pub fn endo_apply(a: &[f64], v: &[f64]) -> Vec<f64> {
    let n = v.len();
    (0..n).map(|k| (0..n).map(|i| a[k * n + i] * v[i]).sum()).collect()
}

/// `ω(v)`.
pub fn pairing(w: &[f64], v: &[f64]) -> f64 {
    w.iter().zip(v).map(|(a, b)| a * b).sum()
}

pub fn unit(n: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[i] = 1.0;
    v
}

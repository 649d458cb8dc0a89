use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Coefficients of a tensor in a declared basis of structure tensors.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientFit {
    pub basis: Vec<String>,
    pub coefficients: Vec<f64>,
    /// Coefficients held at a prescribed value rather than fitted.
    pub fixed: Vec<bool>,
    /// Largest component of `target - Σ c_i B_i` over all samples.
    pub residual: f64,
    /// Condition number of the Gram matrix of the full declared basis; infinite when dependent.
    pub gram_condition: f64,
}

impl CoefficientFit {
    pub fn coefficient(&self, name: &str) -> Option<f64> {
        self.basis.iter().position(|b| b == name).map(|i| self.coefficients[i])
    }
}

/// One sample: a target tensor and the basis tensors, all in the same components.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisSample {
    pub target: Vec<f64>,
    pub basis: Vec<Vec<f64>>,
}

fn gram(samples: &[BasisSample], cols: &[usize]) -> (DMatrix<f64>, DVector<f64>) {
    let k = cols.len();
    let mut a = DMatrix::zeros(k, k);
    let mut b = DVector::zeros(k);
    for s in samples {
        for (r, &i) in cols.iter().enumerate() {
            b[r] += dot(&s.basis[i], &s.target);
            for (c, &j) in cols.iter().enumerate() {
                a[(r, c)] += dot(&s.basis[i], &s.basis[j]);
            }
        }
    }
    (a, b)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `λ_max / λ_min` of a symmetric positive semidefinite matrix.
pub fn condition_number(a: &DMatrix<f64>) -> f64 {
    if a.nrows() == 0 {
        return 1.0;
    }
    let ev = SymmetricEigen::new(a.clone()).eigenvalues;
    let max = ev.iter().cloned().fold(f64::MIN, f64::max);
    let min = ev.iter().cloned().fold(f64::MAX, f64::min);
    if min <= max * 1e-14 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Least squares over the free basis elements with the `fixed` ones held at
/// their given values. Dependent free columns are resolved by the minimum-norm
/// solution.
pub fn fit_coefficients(names: &[&str], samples: &[BasisSample], fixed: &[Option<f64>]) -> CoefficientFit {
    let k = names.len();
    let all: Vec<usize> = (0..k).collect();
    let gram_condition = condition_number(&gram(samples, &all).0);

    let shifted: Vec<BasisSample> = samples
        .iter()
        .map(|s| {
            let mut t = s.target.clone();
            for (i, f) in fixed.iter().enumerate() {
                if let Some(c) = f {
                    for (x, b) in t.iter_mut().zip(&s.basis[i]) {
                        *x -= c * b;
                    }
                }
            }
            BasisSample { target: t, basis: s.basis.clone() }
        })
        .collect();
    let free: Vec<usize> = (0..k).filter(|&i| fixed[i].is_none()).collect();
    let (a, b) = gram(&shifted, &free);
    let mut coefficients: Vec<f64> = fixed.iter().map(|f| f.unwrap_or(0.0)).collect();
    if !free.is_empty() {
        let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        let sol = a
            .svd(true, true)
            .solve(&b, 1e-12 * scale)
            .unwrap_or_else(|_| DVector::from_element(free.len(), f64::NAN));
        for (r, &i) in free.iter().enumerate() {
            coefficients[i] = sol[r];
        }
    }

    let mut residual = 0.0f64;
    for s in samples {
        for (c, t) in s.target.iter().enumerate() {
            let model: f64 = (0..k).map(|i| coefficients[i] * s.basis[i][c]).sum();
            let r = (t - model).abs();
            residual = if residual.is_nan() || r.is_nan() { f64::NAN } else { residual.max(r) };
        }
    }
    CoefficientFit {
        basis: names.iter().map(|s| s.to_string()).collect(),
        coefficients,
        fixed: fixed.iter().map(Option::is_some).collect(),
        residual,
        gram_condition,
    }
}

use std::fmt;

/// Half-width of the band in which λ counts as zero.
pub const STEADY_BAND: f64 = 1e-8;

/// Determinant guard of the `{g, η⊗η}` normal equations, relative to the diagonal.
pub const FIT_DET_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolitonClass {
    Shrinking,
    Steady,
    Expanding,
    Indeterminate,
}

impl SolitonClass {
    /// By the sign of λ: negative shrinks, zero is steady, positive expands.
    pub fn from_lambda(lambda: f64) -> Self {
        if !lambda.is_finite() {
            SolitonClass::Indeterminate
        } else if lambda.abs() < STEADY_BAND {
            SolitonClass::Steady
        } else if lambda < 0.0 {
            SolitonClass::Shrinking
        } else {
            SolitonClass::Expanding
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            SolitonClass::Shrinking => "shrinking",
            SolitonClass::Steady => "steady",
            SolitonClass::Expanding => "expanding",
            SolitonClass::Indeterminate => "indeterminate",
        }
    }

    /// The label with shrinking and expanding swapped.
    pub fn opposite(&self) -> Self {
        match self {
            SolitonClass::Shrinking => SolitonClass::Expanding,
            SolitonClass::Expanding => SolitonClass::Shrinking,
            c => *c,
        }
    }
}

impl fmt::Display for SolitonClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `£_V g + 2S + 2λg`, componentwise in whatever basis the inputs share.
pub fn soliton_residual(lie: &[f64], ricci: &[f64], g: &[f64], lambda: f64) -> Vec<f64> {
    lie.iter()
        .zip(ricci)
        .zip(g)
        .map(|((l, s), gg)| l + 2.0 * s + 2.0 * lambda * gg)
        .collect()
}

/// Frame components of `(£_V g, S, g)` at one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SolitonSample {
    pub lie: Vec<f64>,
    pub ricci: Vec<f64>,
    pub g: Vec<f64>,
}

/// Running sums for the λ least squares `min Σ |£ + 2S + 2λg|²`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LambdaFit {
    num: f64,
    den: f64,
}

impl LambdaFit {
    pub fn add(&mut self, s: &SolitonSample) {
        for ((l, r), g) in s.lie.iter().zip(&s.ricci).zip(&s.g) {
            self.num += (l + 2.0 * r) * g;
            self.den += g * g;
        }
    }

    pub fn merge(&mut self, other: &LambdaFit) {
        self.num += other.num;
        self.den += other.den;
    }

    pub fn lambda(&self) -> f64 {
        if self.den > 0.0 {
            -self.num / (2.0 * self.den)
        } else {
            f64::NAN
        }
    }
}

/// λ minimising the Euclideanised frame norm of the soliton residual over all samples.
pub fn best_lambda(samples: &[SolitonSample]) -> f64 {
    let mut fit = LambdaFit::default();
    for s in samples {
        fit.add(s);
    }
    fit.lambda()
}

/// `S ≈ a g + b η⊗η` in frame components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaEinsteinFit {
    pub a: f64,
    pub b: f64,
    /// Largest frame component of `S - a g - b η⊗η`.
    pub residual: f64,
    /// The normal equations were singular and only `a` was fitted.
    pub einstein_only: bool,
}

/// Frame components of `(S, g, η)` at one sample; `η` has one entry per frame vector.
#[derive(Debug, Clone, PartialEq)]
pub struct FitSample {
    pub s: Vec<f64>,
    pub g: Vec<f64>,
    pub eta: Vec<f64>,
}

impl FitSample {
    fn eta_eta(&self) -> Vec<f64> {
        let m = self.eta.len();
        (0..m * m).map(|k| self.eta[k / m] * self.eta[k % m]).collect()
    }
}

/// Least-squares η-Einstein fit with a 2×2 explicit inverse.
pub fn eta_einstein_fit(samples: &[FitSample]) -> EtaEinsteinFit {
    let (mut gg, mut ge, mut ee, mut sg, mut se) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for smp in samples {
        let e = smp.eta_eta();
        for k in 0..smp.s.len() {
            gg += smp.g[k] * smp.g[k];
            ge += smp.g[k] * e[k];
            ee += e[k] * e[k];
            sg += smp.s[k] * smp.g[k];
            se += smp.s[k] * e[k];
        }
    }
    let det = gg * ee - ge * ge;
    let (a, b, einstein_only) = if det.abs() <= FIT_DET_GUARD * (gg * ee).max(f64::MIN_POSITIVE) {
        (if gg > 0.0 { sg / gg } else { f64::NAN }, 0.0, true)
    } else {
        ((ee * sg - ge * se) / det, (gg * se - ge * sg) / det, false)
    };
    let residual = fit_residual(samples, a, b);
    EtaEinsteinFit { a, b, residual, einstein_only }
}

/// Einstein-only fit `S ≈ a g`.
pub fn einstein_fit(samples: &[FitSample]) -> EtaEinsteinFit {
    let (mut gg, mut sg) = (0.0, 0.0);
    for smp in samples {
        for k in 0..smp.s.len() {
            gg += smp.g[k] * smp.g[k];
            sg += smp.s[k] * smp.g[k];
        }
    }
    let a = if gg > 0.0 { sg / gg } else { f64::NAN };
    EtaEinsteinFit {
        a,
        b: 0.0,
        residual: fit_residual(samples, a, 0.0),
        einstein_only: true,
    }
}

fn fit_residual(samples: &[FitSample], a: f64, b: f64) -> f64 {
    let mut worst = 0.0f64;
    for smp in samples {
        let e = smp.eta_eta();
        for k in 0..smp.s.len() {
            let r = (smp.s[k] - a * smp.g[k] - b * e[k]).abs();
            worst = if worst.is_nan() || r.is_nan() { f64::NAN } else { worst.max(r) };
        }
    }
    worst
}

/// `-(α+λ) g - α η⊗η` and `2α(g + η⊗η)` in frame components, as a soliton sample.
pub fn synthetic_eta_einstein(alpha: f64, lambda: f64, g: &[f64], eta: &[f64]) -> SolitonSample {
    let m = eta.len();
    let ee: Vec<f64> = (0..m * m).map(|k| eta[k / m] * eta[k % m]).collect();
    SolitonSample {
        lie: g.iter().zip(&ee).map(|(a, b)| 2.0 * alpha * (a + b)).collect(),
        ricci: g.iter().zip(&ee).map(|(a, b)| -(alpha + lambda) * a - alpha * b).collect(),
        g: g.to_vec(),
    }
}

/// Frame components of a Lorentzian frame's `g` and `η` for `ξ = e_0`.
pub fn standard_frame(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut g = vec![0.0; m * m];
    for a in 0..m {
        g[a * m + a] = if a == 0 { -1.0 } else { 1.0 };
    }
    let mut eta = vec![0.0; m];
    eta[0] = -1.0;
    (g, eta)
}

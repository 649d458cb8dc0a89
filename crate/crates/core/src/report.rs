//! Per-check residual records shared by every verifier.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Pass,
    Fail,
    /// Reported for inspection; never affects the exit status.
    Diagnostic,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Diagnostic => "diagnostic",
        }
    }
}

/// One verified identity: residual statistics over the sample set.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckEntry {
    pub id: String,
    pub equation: String,
    pub status: Status,
    pub max_residual: f64,
    pub mean_residual: f64,
    pub tolerance: f64,
    pub samples: usize,
    /// Named fitted or derived values, in insertion order.
    pub coefficients: Vec<(String, f64)>,
    pub message: Option<String>,
}

impl CheckEntry {
    /// Status from residuals: pass iff `max < tolerance` (NaN fails).
    pub fn from_residuals(id: &str, equation: &str, residuals: &[f64], tolerance: f64) -> Self {
        let stats = Stats::of(residuals);
        let status = if stats.max < tolerance && residuals.iter().all(|r| r.is_finite()) {
            Status::Pass
        } else {
            Status::Fail
        };
        CheckEntry {
            id: id.to_string(),
            equation: equation.to_string(),
            status,
            max_residual: stats.max,
            mean_residual: stats.mean,
            tolerance,
            samples: residuals.len(),
            coefficients: Vec::new(),
            message: None,
        }
    }

    pub fn failed(id: &str, equation: &str, tolerance: f64, message: impl Into<String>) -> Self {
        CheckEntry {
            id: id.to_string(),
            equation: equation.to_string(),
            status: Status::Fail,
            max_residual: f64::NAN,
            mean_residual: f64::NAN,
            tolerance,
            samples: 0,
            coefficients: Vec::new(),
            message: Some(message.into()),
        }
    }

    pub fn diagnostic(mut self) -> Self {
        self.status = Status::Diagnostic;
        self
    }

    pub fn with_coefficient(mut self, name: &str, value: f64) -> Self {
        self.coefficients.push((name.to_string(), value));
        self
    }

    pub fn with_message(mut self, message: impl Into<String>) -> Self {
        self.message = Some(message.into());
        self
    }

    pub fn coefficient(&self, name: &str) -> Option<f64> {
        self.coefficients
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| *v)
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Ordered collection of entries.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CheckReport {
    pub entries: Vec<CheckEntry>,
}

impl CheckReport {
    pub fn push(&mut self, entry: CheckEntry) {
        self.entries.push(entry);
    }

    pub fn extend(&mut self, other: CheckReport) {
        self.entries.extend(other.entries);
    }

    pub fn get(&self, id: &str) -> Option<&CheckEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    pub fn all_assertable_pass(&self) -> bool {
        self.entries.iter().all(|e| e.status != Status::Fail)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stats {
    pub max: f64,
    pub mean: f64,
}

impl Stats {
    /// Max and mean in sample order; NaN propagates into `max`.
    pub fn of(values: &[f64]) -> Stats {
        if values.is_empty() {
            return Stats { max: 0.0, mean: 0.0 };
        }
        let max = values.iter().fold(0.0f64, |m, &v| {
            if m.is_nan() || v.is_nan() {
                f64::NAN
            } else {
                m.max(v)
            }
        });
        let sum: f64 = values.iter().sum();
        Stats {
            max,
            mean: sum / values.len() as f64,
        }
    }
}

/// Shared knobs for every sampled verifier.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub tolerance: f64,
    pub seed: u64,
    /// Random frame-vector tuples drawn per sample point.
    pub trials: usize,
    pub parallel: bool,
}

impl VerifyConfig {
    pub fn for_engine(engine: crate::fieldcore::Engine) -> Self {
        VerifyConfig {
            tolerance: engine.tolerance(),
            seed: 42,
            trials: 4,
            parallel: true,
        }
    }
}

/// Uniform coefficients in `[-1, 1]` for a random combination of frame vectors.
pub fn random_coeffs(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    use rand::Rng;
    (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect()
}

/// One entry per `(id, equation)` column of per-point residual rows.
///
/// A point that failed to evaluate fails every column with its error message.
pub fn entries_from_rows(
    columns: &[(&str, &str)],
    rows: &[Result<Vec<f64>, crate::error::GeomError>],
    tolerance: f64,
) -> Vec<CheckEntry> {
    if let Some(Err(e)) = rows.iter().find(|r| r.is_err()) {
        return columns
            .iter()
            .map(|(id, eq)| CheckEntry::failed(id, eq, tolerance, e.to_string()))
            .collect();
    }
    columns
        .iter()
        .enumerate()
        .map(|(c, (id, eq))| {
            let col: Vec<f64> = rows
                .iter()
                .map(|r| r.as_ref().map(|v| v[c]).unwrap_or(f64::NAN))
                .collect();
            CheckEntry::from_residuals(id, eq, &col, tolerance)
        })
        .collect()
}

/// Running one-dimensional least squares `c = Σ⟨a,b⟩ / Σ⟨b,b⟩`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ScalarFit {
    pub num: f64,
    pub den: f64,
}

impl ScalarFit {
    pub fn add(&mut self, a: &[f64], b: &[f64]) {
        for (x, y) in a.iter().zip(b) {
            self.num += x * y;
            self.den += y * y;
        }
    }

    pub fn merge(&mut self, other: &ScalarFit) {
        self.num += other.num;
        self.den += other.den;
    }

    pub fn value(&self) -> f64 {
        if self.den > 0.0 {
            self.num / self.den
        } else {
            f64::NAN
        }
    }
}

/// Deterministic per-point random stream, independent of evaluation order.
pub fn point_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64 + 1);
    rng
}

/// Maps `f` over sample points, preserving order whether or not it runs in parallel.
pub fn map_points<T, F>(points: &[Vec<f64>], parallel: bool, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &[f64]) -> T + Sync + Send,
{
    if parallel {
        points
            .par_iter()
            .enumerate()
            .map(|(i, p)| f(i, p))
            .collect()
    } else {
        points.iter().enumerate().map(|(i, p)| f(i, p)).collect()
    }
}

/// Euclideanised max-abs over a list of frame components.
pub fn max_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0f64, |m, v| {
        if m.is_nan() || v.is_nan() {
            f64::NAN
        } else {
            m.max(v.abs())
        }
    })
}

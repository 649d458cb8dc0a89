use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{GeomError, Result};
use crate::fieldcore::jet::MAX_DIM;

/// Fraction of each interval kept clear of sample points on both sides.
pub const SAMPLE_MARGIN: f64 = 0.05;

/// A single coordinate box `[lo_i, hi_i]` with named coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartDomain {
    names: Vec<String>,
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl ChartDomain {
    pub fn new(names: Vec<String>, bounds: Vec<(f64, f64)>) -> Result<Self> {
        Self::with_min_dim(names, bounds, 2)
    }

    /// Parameter domains of curves are one-dimensional; ambient charts are not.
    pub fn with_min_dim(names: Vec<String>, bounds: Vec<(f64, f64)>, min_dim: usize) -> Result<Self> {
        if names.len() != bounds.len() {
            return Err(GeomError::Input(format!(
                "{} coordinate names for {} intervals",
                names.len(),
                bounds.len()
            )));
        }
        if names.len() < min_dim || names.len() > MAX_DIM {
            return Err(GeomError::Input(format!(
                "chart dimension {} outside [{min_dim}, {MAX_DIM}]",
                names.len()
            )));
        }
        for (name, &(lo, hi)) in names.iter().zip(&bounds) {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(GeomError::Input(format!(
                    "interval for {name} must be finite and nonempty, got [{lo}, {hi}]"
                )));
            }
        }
        let (lo, hi) = bounds.into_iter().unzip();
        Ok(ChartDomain { names, lo, hi })
    }

    /// Unit-named box helper: coordinates `x0, x1, ...`.
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        let names = (0..dim).map(|i| format!("x{i}")).collect();
        Self::new(names, vec![(lo, hi); dim])
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn bounds(&self, i: usize) -> (f64, f64) {
        (self.lo[i], self.hi[i])
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dim()
            && p.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(&x, (&lo, &hi))| x >= lo && x <= hi)
    }

    pub fn check(&self, p: &[f64]) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(GeomError::Domain { point: p.to_vec() })
        }
    }

    /// Deterministic uniform samples in the box interior, shrunk by [`SAMPLE_MARGIN`].
    pub fn sample_points(&self, count: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                (0..self.dim())
                    .map(|i| {
                        let width = self.hi[i] - self.lo[i];
                        let lo = self.lo[i] + SAMPLE_MARGIN * width;
                        let hi = self.hi[i] - SAMPLE_MARGIN * width;
                        rng.gen_range(lo..hi)
                    })
                    .collect()
            })
            .collect()
    }
}

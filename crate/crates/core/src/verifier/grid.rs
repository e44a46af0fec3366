use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::VerifierError;

/// Grid products larger than this are Latin-hypercube subsampled.
pub const DEFAULT_MAX_POINTS: usize = 10_000;

/// Finite sample of exponents `p ≥ 1` standing in for "for every `p ≥ 1`",
/// with geometric widening up to a cap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PGrid {
    pub values: Vec<f64>,
    pub escalation: f64,
    pub cap: f64,
}

impl Default for PGrid {
    fn default() -> Self {
        Self {
            values: vec![1.0, 1.5, 2.0, 4.0, 8.0],
            escalation: 2.0,
            cap: 64.0,
        }
    }
}

impl PGrid {
    pub fn new(mut values: Vec<f64>, escalation: f64, cap: f64) -> Result<Self, VerifierError> {
        if values.is_empty() {
            return Err(VerifierError::InvalidArgument("empty grid".into()));
        }
        if let Some(bad) = values.iter().find(|v| !(**v >= 1.0) || !v.is_finite()) {
            return Err(VerifierError::InvalidArgument(format!(
                "grid values must be finite and ≥ 1, got {bad}"
            )));
        }
        if !(escalation > 1.0) || !escalation.is_finite() {
            return Err(VerifierError::InvalidArgument(format!(
                "escalation factor must exceed 1, got {escalation}"
            )));
        }
        values.sort_by(f64::total_cmp);
        values.dedup();
        Ok(Self {
            values,
            escalation,
            cap,
        })
    }

    /// Grid with the default escalation rule.
    pub fn from_values(values: Vec<f64>) -> Result<Self, VerifierError> {
        let d = Self::default();
        Self::new(values, d.escalation, d.cap)
    }

    pub fn max(&self) -> f64 {
        *self.values.last().expect("grids are non-empty")
    }

    /// One widening step: appends `max · escalation` if it stays within the
    /// cap.
    pub fn escalate(&self) -> Option<Self> {
        let next = self.max() * self.escalation;
        (next <= self.cap * (1.0 + 1e-12)).then(|| {
            let mut g = self.clone();
            g.values.push(next.min(self.cap));
            g
        })
    }

    /// The grid widened until the cap.
    pub fn escalated(&self) -> Self {
        let mut g = self.clone();
        while let Some(next) = g.escalate() {
            g = next;
        }
        g
    }

    /// Every point of `values^len`, or a Latin-hypercube subsample of
    /// `max_points` of them when the product is larger.
    pub fn vectors(&self, len: usize, max_points: usize, seed: u64) -> Vec<Vec<f64>> {
        let m = self.values.len();
        let total = (m as f64).powi(len as i32);
        if total <= max_points as f64 {
            let total = total as usize;
            (0..total)
                .map(|mut idx| {
                    let mut v = vec![0.0; len];
                    for slot in v.iter_mut().rev() {
                        *slot = self.values[idx % m];
                        idx /= m;
                    }
                    v
                })
                .collect()
        } else {
            latin_hypercube(len, max_points, seed)
                .into_iter()
                .map(|u| u.iter().map(|&x| self.values[((x * m as f64) as usize).min(m - 1)]).collect())
                .collect()
        }
    }
}

/// `samples` points in `[0,1)^dims`, one per stratum in every coordinate.
pub fn latin_hypercube(dims: usize, samples: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = vec![vec![0.0; dims]; samples];
    for d in 0..dims {
        let mut strata: Vec<usize> = (0..samples).collect();
        strata.shuffle(&mut rng);
        for (point, s) in points.iter_mut().zip(strata) {
            point[d] = (s as f64 + rng.random::<f64>()) / samples as f64;
        }
    }
    points
}

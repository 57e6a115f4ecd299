//! Finite metric spaces over indexed points.
//!
//! Every algorithm in this crate works on the metric closure of the input, so
//! a metric is just a dense symmetric matrix. [`MetricSpace::from_matrix`] and
//! [`MetricSpace::from_points`] validate the input and rescale it so that the
//! smallest distance between two distinct positions is exactly 1. Coincident
//! points (distance 0) are allowed.

use crate::error::MetricError;
use serde::{Deserialize, Serialize};

/// Relative slack for the triangle-inequality check; inputs computed in
/// floating point (Euclidean, shortest paths) carry rounding noise.
const TRIANGLE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSpace {
    n: usize,
    d: Vec<f64>,
    scale: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl MetricSpace {
    /// Validates a raw distance matrix and normalizes it.
    pub fn from_matrix(raw: &[Vec<f64>]) -> Result<Self, MetricError> {
        let n = raw.len();
        if n == 0 || raw.iter().any(|row| row.len() != n) {
            return Err(MetricError::Malformed);
        }
        for u in 0..n {
            for v in 0..n {
                let x = raw[u][v];
                if !x.is_finite() {
                    return Err(MetricError::NonFinite { u, v });
                }
                if x < 0.0 {
                    return Err(MetricError::NegativeDistance { u, v, value: x });
                }
            }
            if raw[u][u] != 0.0 {
                return Err(MetricError::NonZeroDiagonal(u));
            }
        }
        for u in 0..n {
            for v in (u + 1)..n {
                let (a, b) = (raw[u][v], raw[v][u]);
                if (a - b).abs() > 1e-12 * a.max(b).max(1.0) {
                    return Err(MetricError::AsymmetricInput { u, v });
                }
            }
        }
        let mut d = vec![0.0; n * n];
        for u in 0..n {
            for v in (u + 1)..n {
                let x = raw[u][v];
                d[u * n + v] = x;
                d[v * n + u] = x;
            }
        }
        check_triangle(n, &d)?;
        Ok(Self::normalized(n, d))
    }

    /// Euclidean distances between points of a common dimension.
    pub fn from_points(points: &[Vec<f64>]) -> Result<Self, MetricError> {
        let n = points.len();
        if n == 0 {
            return Err(MetricError::Malformed);
        }
        let dim = points[0].len();
        if points.iter().any(|p| p.len() != dim) {
            return Err(MetricError::RaggedPoints);
        }
        let mut d = vec![0.0; n * n];
        for u in 0..n {
            for v in (u + 1)..n {
                let x = points[u]
                    .iter()
                    .zip(&points[v])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                if !x.is_finite() {
                    return Err(MetricError::NonFinite { u, v });
                }
                d[u * n + v] = x;
                d[v * n + u] = x;
            }
        }
        check_triangle(n, &d)?;
        Ok(Self::normalized(n, d))
    }

    fn normalized(n: usize, mut d: Vec<f64>) -> Self {
        let min = d.iter().copied().filter(|&x| x > 0.0).fold(f64::INFINITY, f64::min);
        let mut scale = 1.0;
        if min.is_finite() && min != 1.0 {
            // Division keeps the closest pair at exactly 1.0.
            for x in d.iter_mut() {
                *x /= min;
            }
            scale = 1.0 / min;
        }
        Self { n, d, scale, labels: None }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        self.labels = Some(labels);
        self
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn d(&self, u: usize, v: usize) -> f64 {
        self.d[u * self.n + v]
    }

    /// Factor the raw input was multiplied by during normalization.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn to_matrix(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|u| self.d[u * self.n..(u + 1) * self.n].to_vec()).collect()
    }

    /// Largest distance among the given points (0 for fewer than two).
    pub fn diameter_of(&self, points: &[usize]) -> f64 {
        let mut best = 0.0f64;
        for (i, &u) in points.iter().enumerate() {
            for &v in &points[i + 1..] {
                best = best.max(self.d(u, v));
            }
        }
        best
    }

    pub fn diameter(&self) -> f64 {
        self.d.iter().copied().fold(0.0, f64::max)
    }

    /// Minimum distance between two distinct positions (`None` if every
    /// point coincides).
    pub fn min_positive_distance(&self) -> Option<f64> {
        let m = self.d.iter().copied().filter(|&x| x > 0.0).fold(f64::INFINITY, f64::min);
        m.is_finite().then_some(m)
    }

    /// Submetric over `points`, in the given order.
    pub fn restrict(&self, points: &[usize]) -> Vec<Vec<f64>> {
        points.iter().map(|&u| points.iter().map(|&v| self.d(u, v)).collect()).collect()
    }
}

fn check_triangle(n: usize, d: &[f64]) -> Result<(), MetricError> {
    for u in 0..n {
        for v in (u + 1)..n {
            let duv = d[u * n + v];
            for w in 0..n {
                if w == u || w == v {
                    continue;
                }
                let via = d[u * n + w] + d[w * n + v];
                if duv > via + TRIANGLE_SLACK * duv.max(1.0) {
                    return Err(MetricError::TriangleViolation { u, v, via: w });
                }
            }
        }
    }
    Ok(())
}

/// `⌊log₂ a⌋` with exact power-of-two thresholds: class `j` iff
/// `2^j <= a < 2^(j+1)`. Zero (or negative) distances have no class.
pub fn class_of(a: f64) -> Option<i32> {
    if !(a > 0.0) || !a.is_finite() {
        return None;
    }
    let mut j = a.log2().floor() as i32;
    while pow2(j) > a {
        j -= 1;
    }
    while pow2(j + 1) <= a {
        j += 1;
    }
    Some(j)
}

#[inline]
pub fn pow2(j: i32) -> f64 {
    2f64.powi(j)
}

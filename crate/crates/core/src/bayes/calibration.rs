use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kge::{log_sigmoid, sigmoid};

/// Score to probability map `σ(a·score + b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub a: f64,
    pub b: f64,
}

impl Default for Calibration {
    fn default() -> Self {
        Self { a: 1.0, b: 0.0 }
    }
}

impl Calibration {
    pub fn probability(&self, score: f64) -> f64 {
        sigmoid(self.a * score + self.b)
    }

    pub fn log_probability(&self, score: f64) -> f64 {
        log_sigmoid(self.a * score + self.b)
    }

    /// Mean negative log-likelihood of binary labels.
    pub fn log_loss(&self, scores: &[f64], labels: &[bool]) -> f64 {
        scores
            .iter()
            .zip(labels)
            .map(|(&s, &y)| {
                let z = self.a * s + self.b;
                if y {
                    -log_sigmoid(z)
                } else {
                    -log_sigmoid(-z)
                }
            })
            .sum::<f64>()
            / scores.len().max(1) as f64
    }

    /// Platt scaling: Newton's method on the log-loss with Platt's smoothed
    /// targets and a small ridge for separable data.
    pub fn fit_platt(scores: &[f64], labels: &[bool]) -> Result<Self> {
        if scores.len() != labels.len() || scores.is_empty() {
            return Err(Error::InvalidInput("Platt fit needs matching, non-empty inputs".into()));
        }
        let pos = labels.iter().filter(|y| **y).count() as f64;
        let neg = labels.len() as f64 - pos;
        if pos == 0.0 || neg == 0.0 {
            return Err(Error::InvalidInput("Platt fit needs both classes".into()));
        }
        let hi = (pos + 1.0) / (pos + 2.0);
        let lo = 1.0 / (neg + 2.0);
        let targets: Vec<f64> = labels.iter().map(|&y| if y { hi } else { lo }).collect();
        let (mut a, mut b) = (0.0, ((pos + 1.0) / (neg + 1.0)).ln());
        let ridge = 1e-9;
        let objective = |a: f64, b: f64| {
            scores
                .iter()
                .zip(&targets)
                .map(|(&s, &t)| {
                    let z = a * s + b;
                    -(t * log_sigmoid(z) + (1.0 - t) * log_sigmoid(-z))
                })
                .sum::<f64>()
                + 0.5 * ridge * (a * a + b * b)
        };
        let mut f = objective(a, b);
        for _ in 0..100 {
            let (mut ga, mut gb, mut haa, mut hab, mut hbb) = (ridge * a, ridge * b, ridge, 0.0, ridge);
            for (&s, &t) in scores.iter().zip(&targets) {
                let p = sigmoid(a * s + b);
                let d = p - t;
                let w = p * (1.0 - p);
                ga += d * s;
                gb += d;
                haa += w * s * s;
                hab += w * s;
                hbb += w;
            }
            let det = haa * hbb - hab * hab;
            if det.abs() < 1e-300 {
                break;
            }
            let da = (hbb * ga - hab * gb) / det;
            let db = (haa * gb - hab * ga) / det;
            let mut step = 1.0;
            let mut improved = false;
            while step > 1e-10 {
                let (na, nb) = (a - step * da, b - step * db);
                let nf = objective(na, nb);
                if nf <= f {
                    a = na;
                    b = nb;
                    improved = (f - nf) > 1e-12 * f.abs().max(1.0);
                    f = nf;
                    break;
                }
                step /= 2.0;
            }
            if !improved {
                break;
            }
        }
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidInput("Platt fit diverged".into()));
        }
        Ok(Self { a, b })
    }
}

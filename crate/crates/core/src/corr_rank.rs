//! Correlation-based iterative ranking (the CR baseline).
//!
//! Alternates two updates until reputations stop moving:
//!
//! 1. object quality = reputation-weighted mean of the object's ratings;
//! 2. user reputation = Pearson correlation between the user's ratings and the
//!    qualities of the objects they rated, clipped below at 0.
//!
//! Plain fixed-point iteration with no damping, uniform initial reputations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rating_graph::RatingMatrix;
use crate::reputation::{Method, Reputation, ReputationVector};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrConfig {
    pub max_iterations: usize,
    /// Stop once the largest absolute reputation change falls below this.
    pub convergence_epsilon: f64,
    pub initial_reputation: f64,
    /// Clip negative correlations to 0. Disable for the signed ablation, where
    /// negative reputations are kept for ranking but weigh 0 in the quality.
    pub clip_negative: bool,
}

impl Default for CrConfig {
    fn default() -> Self {
        CrConfig {
            max_iterations: 200,
            convergence_epsilon: 1e-6,
            initial_reputation: 1.0,
            clip_negative: true,
        }
    }
}

impl CrConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::Config("CR max iterations must be at least 1".into()));
        }
        if !(self.convergence_epsilon > 0.0) {
            return Err(Error::Config("CR epsilon must be positive".into()));
        }
        if !(self.initial_reputation >= 0.0) || !self.initial_reputation.is_finite() {
            return Err(Error::Config(
                "CR initial reputation must be finite and non-negative".into(),
            ));
        }
        Ok(())
    }
}

/// Estimated quality per object.
#[derive(Debug, Clone, PartialEq)]
pub struct QualityVector(pub Vec<f64>);

impl QualityVector {
    pub fn get(&self, object: u32) -> f64 {
        self.0[object as usize]
    }
}

/// Reputation-weighted mean rating of every object.
///
/// Negative weights count as 0. An object whose raters all weigh 0 falls back
/// to its unweighted mean; an object without raters gets the scale midpoint.
pub fn weighted_quality(matrix: &RatingMatrix, weights: &[f64]) -> QualityVector {
    let n = matrix.n_objects();
    let mut num = vec![0.0f64; n];
    let mut den = vec![0.0f64; n];
    let mut plain_sum = vec![0.0f64; n];
    let mut count = vec![0u32; n];
    let scale = matrix.scale();
    for (i, obj, lv) in matrix.entries() {
        let a = scale.value(lv) as f64;
        let w = weights[i].max(0.0);
        let o = obj as usize;
        num[o] += w * a;
        den[o] += w;
        plain_sum[o] += a;
        count[o] += 1;
    }
    let midpoint = (scale.min() as f64 + scale.max() as f64) / 2.0;
    QualityVector(
        (0..n)
            .map(|o| {
                if den[o] > 0.0 {
                    num[o] / den[o]
                } else if count[o] > 0 {
                    plain_sum[o] / count[o] as f64
                } else {
                    midpoint
                }
            })
            .collect(),
    )
}

/// Pearson correlation of two equally long slices; `None` if either has zero variance.
pub(crate) fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let k = xs.len();
    if k < 2 || ys.len() != k {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / k as f64;
    let my = ys.iter().sum::<f64>() / k as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    // Relative cutoff: means of identical values can differ from them by an ulp.
    let tiny = |s: f64, m: f64| s <= (m.abs().max(1.0) * 1e-12).powi(2) * k as f64;
    if tiny(sxx, mx) || tiny(syy, my) {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// One correlation update: reputation of every user given the qualities.
fn correlation_update(
    matrix: &RatingMatrix,
    quality: &QualityVector,
    clip: bool,
    out: &mut [f64],
    xs: &mut Vec<f64>,
    ys: &mut Vec<f64>,
) {
    let scale = matrix.scale();
    for (i, rep) in out.iter_mut().enumerate() {
        xs.clear();
        ys.clear();
        for (obj, lv) in matrix.row(i) {
            xs.push(scale.value(lv) as f64);
            ys.push(quality.get(obj));
        }
        let r = pearson(xs, ys).unwrap_or(0.0);
        *rep = if clip { r.max(0.0) } else { r };
    }
}

/// Runs the correlation-based iteration on `matrix`.
///
/// Users with fewer than two ratings, constant ratings, or constant qualities
/// get reputation 0 in that iteration. Users without ratings are left out.
pub fn cr_rank(matrix: &RatingMatrix, config: &CrConfig) -> Result<ReputationVector> {
    config.validate()?;
    let m = matrix.n_users();
    let mut reps = vec![config.initial_reputation; m];
    let mut next = vec![0.0; m];
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    let mut iterations = 0;
    while iterations < config.max_iterations {
        let quality = weighted_quality(matrix, &reps);
        correlation_update(
            matrix,
            &quality,
            config.clip_negative,
            &mut next,
            &mut xs,
            &mut ys,
        );
        iterations += 1;
        let change = reps
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        std::mem::swap(&mut reps, &mut next);
        if change < config.convergence_epsilon {
            break;
        }
    }
    let values = (0..m)
        .map(|i| (matrix.user_degree(i) > 0).then_some(Reputation::Finite(reps[i])))
        .collect();
    Ok(ReputationVector {
        method: Method::Cr,
        values,
        tie_order: matrix.user_order().to_vec(),
        iterations: Some(iterations),
    })
}

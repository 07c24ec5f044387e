//! Evaluation metrics: rating error, recall of the suspect list, AUC, the
//! reputation/rating-error correlation, and recall-difference grids.

use std::cmp::Ordering;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::corr_rank::pearson;
use crate::error::{Error, Result};
use crate::rating_graph::RatingMatrix;
use crate::reputation::ReputationVector;

/// Mean absolute deviation of each user's ratings from the objects' mean ratings.
///
/// `None` for users without ratings.
pub fn rating_error(matrix: &RatingMatrix) -> Vec<Option<f64>> {
    let n = matrix.n_objects();
    let mut sum = vec![0.0f64; n];
    let mut count = vec![0u32; n];
    let scale = matrix.scale();
    for (_, obj, lv) in matrix.entries() {
        sum[obj as usize] += scale.value(lv) as f64;
        count[obj as usize] += 1;
    }
    let mean: Vec<f64> = sum
        .iter()
        .zip(&count)
        .map(|(&s, &c)| if c > 0 { s / c as f64 } else { 0.0 })
        .collect();
    (0..matrix.n_users())
        .map(|i| {
            let k = matrix.user_degree(i);
            (k > 0).then(|| {
                matrix
                    .row(i)
                    .map(|(obj, lv)| (scale.value(lv) as f64 - mean[obj as usize]).abs())
                    .sum::<f64>()
                    / k as f64
            })
        })
        .collect()
}

fn spammer_mask(n_users: usize, truth: &[usize]) -> Vec<bool> {
    let mut mask = vec![false; n_users];
    for &s in truth {
        mask[s] = true;
    }
    mask
}

/// Fraction of the true spammers among the `len` most suspicious users.
///
/// `None` when there are no spammers.
pub fn recall_at(reps: &ReputationVector, truth: &[usize], len: usize) -> Option<f64> {
    recall_curve(reps, truth, &[len]).map(|c| c[0].1)
}

/// Recall for several list lengths from one ranking; lengths are clamped to
/// the number of ranked users.
pub fn recall_curve(
    reps: &ReputationVector,
    truth: &[usize],
    lengths: &[usize],
) -> Option<Vec<(usize, f64)>> {
    if truth.is_empty() {
        return None;
    }
    let mask = spammer_mask(reps.len(), truth);
    let ranking = reps.ranking();
    // hits[j] = spammers among the first j ranked users
    let mut hits = Vec::with_capacity(ranking.len() + 1);
    hits.push(0usize);
    for &u in &ranking {
        hits.push(hits.last().unwrap() + mask[u] as usize);
    }
    let d = truth.len() as f64;
    Some(
        lengths
            .iter()
            .map(|&l| (l, hits[l.min(ranking.len())] as f64 / d))
            .collect(),
    )
}

/// Exact AUC: probability that a spammer has a lower reputation than a
/// non-spammer, ties counted half, over all spammer × non-spammer pairs.
///
/// Users without a reputation are ignored. `None` if either class is empty.
pub fn auc(reps: &ReputationVector, truth: &[usize]) -> Option<f64> {
    let mask = spammer_mask(reps.len(), truth);
    let mut users: Vec<(crate::reputation::Reputation, bool)> = reps
        .values
        .iter()
        .zip(&mask)
        .filter_map(|(r, &s)| r.map(|r| (r, s)))
        .collect();
    let spam_total = users.iter().filter(|u| u.1).count();
    let honest_total = users.len() - spam_total;
    if spam_total == 0 || honest_total == 0 {
        return None;
    }
    users.sort_by(|a, b| a.0.auc_cmp(&b.0));
    let mut honest_seen = 0usize;
    let (mut lower, mut ties) = (0u128, 0u128);
    let mut start = 0;
    while start < users.len() {
        let mut end = start + 1;
        while end < users.len() && users[end].0.auc_cmp(&users[start].0) == Ordering::Equal {
            end += 1;
        }
        let spam = users[start..end].iter().filter(|u| u.1).count();
        let honest = (end - start) - spam;
        honest_seen += honest;
        lower += (spam * (honest_total - honest_seen)) as u128;
        ties += (spam * honest) as u128;
        start = end;
    }
    let pairs = (spam_total * honest_total) as f64;
    Some((lower as f64 + 0.5 * ties as f64) / pairs)
}

/// AUC estimated from `samples` random spammer/non-spammer comparisons.
pub fn auc_sampled<R: Rng + ?Sized>(
    reps: &ReputationVector,
    truth: &[usize],
    samples: usize,
    rng: &mut R,
) -> Option<f64> {
    let mask = spammer_mask(reps.len(), truth);
    let (mut spam, mut honest) = (Vec::new(), Vec::new());
    for (i, r) in reps.values.iter().enumerate() {
        if let Some(r) = r {
            if mask[i] {
                spam.push(*r);
            } else {
                honest.push(*r);
            }
        }
    }
    if spam.is_empty() || honest.is_empty() || samples == 0 {
        return None;
    }
    let mut score = 0.0;
    for _ in 0..samples {
        let s = spam[rng.random_range(0..spam.len())];
        let h = honest[rng.random_range(0..honest.len())];
        score += match s.auc_cmp(&h) {
            Ordering::Less => 1.0,
            Ordering::Equal => 0.5,
            Ordering::Greater => 0.0,
        };
    }
    Some(score / samples as f64)
}

/// Reputation/rating-error correlation with its bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhoReport {
    pub rho: f64,
    /// Nonempty bins (binned mode) or users (raw mode) entering the correlation.
    pub points: usize,
    /// Users left out because their reputation is not finite.
    pub excluded: usize,
}

fn finite_pairs(reps: &ReputationVector, delta: &[Option<f64>]) -> (Vec<(f64, f64)>, usize) {
    let mut pairs = Vec::new();
    let mut excluded = 0;
    for (i, d) in delta.iter().enumerate() {
        match (reps.finite(i), d) {
            (Some(r), Some(d)) => pairs.push((*d, r)),
            _ => excluded += 1,
        }
    }
    (pairs, excluded)
}

fn min_max(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    })
}

/// How δ and R are rescaled before binning.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Divide by the maximum.
    #[default]
    Max,
    /// Map [min, max] onto [0, 1].
    MinMax,
}

impl Normalization {
    fn scaler(self, values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
        let (lo, hi) = min_max(values);
        match self {
            Normalization::Max if hi > 0.0 && hi > lo => Some((0.0, hi)),
            Normalization::MinMax if hi > lo => Some((lo, hi - lo)),
            _ => None,
        }
    }
}

/// Pearson correlation of per-bin means, binning users by normalized δ.
///
/// Uses [`Normalization::Max`]; see [`binned_rho_with`].
pub fn binned_rho(
    reps: &ReputationVector,
    delta: &[Option<f64>],
    bin_width: f64,
) -> Option<RhoReport> {
    binned_rho_with(reps, delta, bin_width, Normalization::default())
}

/// Normalizes δ and R, splits users into δ-bins of `bin_width`, and correlates
/// the per-bin mean δ with the per-bin mean R.
///
/// Empty bins are skipped. `None` with fewer than two bins or a constant coordinate.
pub fn binned_rho_with(
    reps: &ReputationVector,
    delta: &[Option<f64>],
    bin_width: f64,
    normalization: Normalization,
) -> Option<RhoReport> {
    if !(bin_width > 0.0) {
        return None;
    }
    let (pairs, excluded) = finite_pairs(reps, delta);
    if pairs.len() < 2 {
        return None;
    }
    let (d_off, d_span) = normalization.scaler(pairs.iter().map(|p| p.0))?;
    let (r_off, r_span) = normalization.scaler(pairs.iter().map(|p| p.1))?;
    let n_bins = (1.0 / bin_width).ceil() as usize;
    let mut sums = vec![(0.0f64, 0.0f64, 0usize); n_bins];
    for &(d, r) in &pairs {
        let dn = (d - d_off) / d_span;
        let rn = (r - r_off) / r_span;
        let bin = ((dn.max(0.0) / bin_width) as usize).min(n_bins - 1);
        let cell = &mut sums[bin];
        cell.0 += dn;
        cell.1 += rn;
        cell.2 += 1;
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = sums
        .iter()
        .filter(|c| c.2 > 0)
        .map(|c| (c.0 / c.2 as f64, c.1 / c.2 as f64))
        .unzip();
    let rho = pearson(&xs, &ys)?;
    Some(RhoReport {
        rho,
        points: xs.len(),
        excluded,
    })
}

/// Pearson correlation of raw per-user (δ, R) pairs.
pub fn raw_rho(reps: &ReputationVector, delta: &[Option<f64>]) -> Option<RhoReport> {
    let (pairs, excluded) = finite_pairs(reps, delta);
    let (xs, ys): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    let rho = pearson(&xs, &ys)?;
    Some(RhoReport {
        rho,
        points: xs.len(),
        excluded,
    })
}

/// Values on a (p, q) grid, row-major over `q` then `p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub p_axis: Vec<f64>,
    pub q_axis: Vec<f64>,
    pub values: Vec<f64>,
}

impl Grid {
    pub fn new(p_axis: Vec<f64>, q_axis: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.len() != p_axis.len() * q_axis.len() {
            return Err(Error::Usage(format!(
                "{} grid values for a {}x{} grid",
                values.len(),
                q_axis.len(),
                p_axis.len()
            )));
        }
        Ok(Grid {
            p_axis,
            q_axis,
            values,
        })
    }

    pub fn get(&self, p_index: usize, q_index: usize) -> f64 {
        self.values[q_index * self.p_axis.len() + p_index]
    }

    /// Fraction of cells strictly above zero.
    pub fn positive_fraction(&self) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        self.values.iter().filter(|&&v| v > 0.0).count() as f64 / self.values.len() as f64
    }
}

/// Elementwise `gr - cr`.
pub fn recall_difference(gr: &Grid, cr: &Grid) -> Result<Grid> {
    if gr.p_axis != cr.p_axis || gr.q_axis != cr.q_axis {
        return Err(Error::Usage("recall grids have different axes".into()));
    }
    Grid::new(
        gr.p_axis.clone(),
        gr.q_axis.clone(),
        gr.values
            .iter()
            .zip(&cr.values)
            .map(|(a, b)| a - b)
            .collect(),
    )
}

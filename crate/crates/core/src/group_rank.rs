//! Group-based ranking.
//!
//! For every object, the users who gave the same rating form a group. The
//! fraction of the object's raters that fall in a user's group is the
//! *rewarding* of that rating. A user's reputation is the mean of their
//! rewardings divided by their (population) standard deviation, i.e. the
//! inverse coefficient of variation. Users that keep landing in large groups
//! get high reputations; users that keep dissenting, or whose agreement is
//! erratic, get low ones.
//!
//! The pipeline is a single pass in `O(l + z·n + m)`:
//! [`group_sizes`] → [`rewarding_matrix`] → [`reputations`], composed by [`gr_rank`].

use std::io::Write;

use crate::error::{Error, Result};
use crate::rating_graph::RatingMatrix;
use crate::reputation::{Method, Reputation, ReputationVector};

/// Group sizes per (rating level, object) and their column-normalized rewards.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupRewardTable {
    matrix_id: u64,
    levels: usize,
    // object-major: sizes[obj * levels + level]
    sizes: Vec<u32>,
    object_degrees: Vec<u32>,
}

impl GroupRewardTable {
    pub fn n_levels(&self) -> usize {
        self.levels
    }

    pub fn n_objects(&self) -> usize {
        self.object_degrees.len()
    }

    /// Number of users who gave `level` to `object`.
    pub fn size(&self, level: u8, object: u32) -> u32 {
        self.sizes[object as usize * self.levels + level as usize]
    }

    pub fn object_degree(&self, object: u32) -> u32 {
        self.object_degrees[object as usize]
    }

    /// Fraction of `object`'s raters who gave `level`; `None` when nobody did.
    pub fn reward(&self, level: u8, object: u32) -> Option<f64> {
        match self.size(level, object) {
            0 => None,
            s => Some(s as f64 / self.object_degree(object) as f64),
        }
    }

    /// Non-empty groups as `(level, object, size, reward)`.
    pub fn groups(&self) -> impl Iterator<Item = (u8, u32, u32, f64)> + '_ {
        (0..self.n_objects() as u32).flat_map(move |obj| {
            (0..self.levels as u8).filter_map(move |lv| {
                self.reward(lv, obj)
                    .map(|r| (lv, obj, self.size(lv, obj), r))
            })
        })
    }
}

/// Counts, for each object, how many users gave each rating level.
pub fn group_sizes(matrix: &RatingMatrix) -> GroupRewardTable {
    let levels = matrix.scale().len();
    let n = matrix.n_objects();
    let mut sizes = vec![0u32; n * levels];
    let mut object_degrees = vec![0u32; n];
    for (_, obj, lv) in matrix.entries() {
        sizes[obj as usize * levels + lv as usize] += 1;
        object_degrees[obj as usize] += 1;
    }
    GroupRewardTable {
        matrix_id: matrix.id(),
        levels,
        sizes,
        object_degrees,
    }
}

/// The rating matrix with each rating replaced by its reward.
#[derive(Debug, Clone, PartialEq)]
pub struct RewardingMatrix {
    matrix_id: u64,
    row_ptr: Vec<usize>,
    values: Vec<f64>,
    tie_order: Vec<u32>,
}

impl RewardingMatrix {
    pub fn n_users(&self) -> usize {
        self.row_ptr.len() - 1
    }

    /// Rewardings of one user, aligned with [`RatingMatrix::row_objects`].
    pub fn row(&self, user: usize) -> &[f64] {
        &self.values[self.row_ptr[user]..self.row_ptr[user + 1]]
    }
}

/// Maps every rating to the reward of the group it falls in.
///
/// `table` must have been built from `matrix` (or a clone of it).
pub fn rewarding_matrix(
    matrix: &RatingMatrix,
    table: &GroupRewardTable,
) -> Result<RewardingMatrix> {
    if table.matrix_id != matrix.id() {
        return Err(Error::Usage(
            "group table was built from a different rating matrix".into(),
        ));
    }
    let values = matrix
        .entries()
        .map(|(_, obj, lv)| table.size(lv, obj) as f64 / table.object_degree(obj) as f64)
        .collect();
    Ok(RewardingMatrix {
        matrix_id: matrix.id(),
        row_ptr: matrix.row_ptr().to_vec(),
        values,
        tie_order: matrix.user_order().to_vec(),
    })
}

/// Mean and population standard deviation of a non-empty slice.
pub(crate) fn mean_std(values: &[f64]) -> (f64, f64) {
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / k;
    (mean, var.sqrt())
}

/// Reputation of one rewarding vector; `None` for an empty vector.
pub fn reputation_of(rewards: &[f64]) -> Option<Reputation> {
    let first = *rewards.first()?;
    let (mean, std) = mean_std(rewards);
    // Exact equality test: the float std of equal values need not be exactly 0.
    if rewards.iter().all(|&r| r == first) || std == 0.0 {
        Some(Reputation::Consistent { mean })
    } else {
        Some(Reputation::Finite(mean / std))
    }
}

/// Inverse coefficient of variation of every user's rewardings.
pub fn reputations(rewards: &RewardingMatrix) -> ReputationVector {
    let mut unrated = 0usize;
    let values = (0..rewards.n_users())
        .map(|i| {
            let r = reputation_of(rewards.row(i));
            unrated += r.is_none() as usize;
            r
        })
        .collect();
    if unrated > 0 {
        log::warn!("{unrated} users without ratings left out of the reputation vector");
    }
    ReputationVector {
        method: Method::Gr,
        values,
        tie_order: rewards.tie_order.clone(),
        iterations: None,
    }
}

/// Group-based reputations of every user of `matrix`.
pub fn gr_rank(matrix: &RatingMatrix) -> ReputationVector {
    let table = group_sizes(matrix);
    let rewards = rewarding_matrix(matrix, &table).expect("table built from this matrix");
    reputations(&rewards)
}

/// Writes `user, object, rating, reward` rows with 6-decimal rewards.
pub fn write_rewards<W: Write>(
    matrix: &RatingMatrix,
    rewards: &RewardingMatrix,
    mut out: W,
) -> Result<()> {
    if rewards.matrix_id != matrix.id() {
        return Err(Error::Usage(
            "rewarding matrix was built from a different rating matrix".into(),
        ));
    }
    let io = |e| Error::io("<rewards>", e);
    writeln!(out, "user_id\titem_id\trating\treward").map_err(io)?;
    for i in 0..matrix.n_users() {
        for ((obj, lv), reward) in matrix.row(i).zip(rewards.row(i)) {
            writeln!(
                out,
                "{}\t{}\t{}\t{:.6}",
                matrix.user_ids()[i],
                matrix.object_ids()[obj as usize],
                matrix.scale().value(lv),
                reward
            )
            .map_err(io)?;
        }
    }
    Ok(())
}

/// Writes `object, rating, size, reward` rows of the non-empty groups.
pub fn write_group_table<W: Write>(
    matrix: &RatingMatrix,
    table: &GroupRewardTable,
    mut out: W,
) -> Result<()> {
    let io = |e| Error::io("<groups>", e);
    writeln!(out, "item_id\trating\tsize\treward").map_err(io)?;
    for (lv, obj, size, reward) in table.groups() {
        writeln!(
            out,
            "{}\t{}\t{}\t{:.6}",
            matrix.object_ids()[obj as usize],
            matrix.scale().value(lv),
            size,
            reward
        )
        .map_err(io)?;
    }
    Ok(())
}

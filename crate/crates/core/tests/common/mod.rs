#![allow(dead_code)]

use std::path::PathBuf;

use grouprank_core::{RatingMatrix, RatingScale, Reputation, ReputationVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Dense ratings, `None` = unrated. Row i is user i + 1.
pub type Dense = Vec<Vec<Option<i32>>>;

pub fn to_matrix(dense: &Dense, scale: &RatingScale) -> RatingMatrix {
    let n = dense.first().map_or(0, Vec::len);
    let rows: Vec<Vec<(u32, i32)>> = dense
        .iter()
        .map(|r| {
            r.iter()
                .enumerate()
                .filter_map(|(a, v)| v.map(|v| (a as u32, v)))
                .collect()
        })
        .collect();
    RatingMatrix::from_values(n, scale.clone(), &rows).unwrap()
}

pub fn random_dense(rng: &mut impl Rng, m: usize, n: usize, density: f64, scale: &[i32]) -> Dense {
    (0..m)
        .map(|_| {
            (0..n)
                .map(|_| {
                    rng.random_bool(density)
                        .then(|| scale[rng.random_range(0..scale.len())])
                })
                .collect()
        })
        .collect()
}

/// A sparse matrix where every user has `degree` ratings drawn around a
/// hidden per-object quality.
pub fn synthetic(users: usize, objects: usize, degree: usize, seed: u64) -> RatingMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let quality: Vec<f64> = (0..objects).map(|_| rng.random_range(1.0..5.0)).collect();
    let rows: Vec<Vec<(u32, i32)>> = (0..users)
        .map(|_| {
            rand::seq::index::sample(&mut rng, objects, degree)
                .into_iter()
                .map(|o| {
                    let noise: f64 = rng.random_range(-1.0..1.0);
                    let v = (quality[o] + noise).round().clamp(1.0, 5.0) as i32;
                    (o as u32, v)
                })
                .collect()
        })
        .collect();
    RatingMatrix::from_values(objects, RatingScale::default(), &rows).unwrap()
}

/// What the oracle says about one user.
#[derive(Debug, Clone, PartialEq)]
pub enum OracleRep {
    Unrated,
    Degenerate,
    Finite(f64),
}

/// Group-based reputation computed by listing every group explicitly.
///
/// For each rating (i, a) the group is the list of users who gave a the same
/// value; the reward is its length over the number of raters of a. Rewards
/// are kept as exact fractions to decide degeneracy.
pub fn brute_force_gr(dense: &Dense) -> Vec<OracleRep> {
    let m = dense.len();
    dense
        .iter()
        .map(|row| {
            let mut rewards: Vec<(usize, usize)> = Vec::new();
            for (a, v) in row.iter().enumerate() {
                let Some(v) = v else { continue };
                let raters: Vec<usize> = (0..m).filter(|&j| dense[j][a].is_some()).collect();
                let group: Vec<usize> = raters
                    .iter()
                    .copied()
                    .filter(|&j| dense[j][a] == Some(*v))
                    .collect();
                rewards.push((group.len(), raters.len()));
            }
            if rewards.is_empty() {
                return OracleRep::Unrated;
            }
            let (g0, k0) = rewards[0];
            if rewards.iter().all(|&(g, k)| g * k0 == g0 * k) {
                return OracleRep::Degenerate;
            }
            let xs: Vec<f64> = rewards.iter().map(|&(g, k)| g as f64 / k as f64).collect();
            let n = xs.len() as f64;
            let mean = xs.iter().sum::<f64>() / n;
            let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
            OracleRep::Finite(mean / var.sqrt())
        })
        .collect()
}

/// First disagreement between the implementation and the oracle, if any.
pub fn oracle_mismatch(reps: &ReputationVector, oracle: &[OracleRep], tol: f64) -> Option<String> {
    if reps.len() != oracle.len() {
        return Some(format!(
            "{} users vs {} in oracle",
            reps.len(),
            oracle.len()
        ));
    }
    for (i, want) in oracle.iter().enumerate() {
        let got = reps.get(i);
        let ok = match (want, got) {
            (OracleRep::Unrated, None) => true,
            (OracleRep::Degenerate, Some(Reputation::Consistent { .. })) => true,
            (OracleRep::Finite(w), Some(Reputation::Finite(g))) => {
                (w - g).abs() <= tol * w.abs().max(1.0)
            }
            _ => false,
        };
        if !ok {
            return Some(format!("user {i}: oracle {want:?}, got {got:?}"));
        }
    }
    None
}

/// Reputation vector over plain values with identity tie order.
pub fn finite_reps(values: &[f64]) -> ReputationVector {
    ReputationVector {
        method: grouprank_core::Method::Gr,
        values: values
            .iter()
            .map(|&v| Some(Reputation::Finite(v)))
            .collect(),
        tie_order: (0..values.len() as u32).collect(),
        iterations: None,
    }
}

/// MovieLens-100K ratings file, from `GROUPRANK_ML100K` or `data/ml-100k/u.data`
/// at the workspace root.
pub fn movielens_path() -> PathBuf {
    if let Some(p) = std::env::var_os("GROUPRANK_ML100K") {
        return PathBuf::from(p);
    }
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/ml-100k/u.data")
}

pub fn require_movielens() -> PathBuf {
    let path = movielens_path();
    assert!(
        path.is_file(),
        "MovieLens-100K not found at {}. Download ml-100k.zip from grouplens.org, \
         extract u.data there, or set GROUPRANK_ML100K to its path.",
        path.display()
    );
    path
}

//! Artificial spammer injection with ground truth.
//!
//! `d` users are drawn uniformly without replacement. Each one is given
//! exactly `k` distorted ratings: if they rated at least `k` objects, a random
//! `k` of those are kept and redrawn while the rest are dropped; otherwise all
//! their ratings are redrawn and distorted ratings are added on random
//! previously unrated objects until the degree reaches `k`.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rating_graph::{RatingMatrix, RatingScale};

/// Random generator used for every realization.
pub type SpamRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpamType {
    /// Minimum or maximum rating with equal probability.
    Malicious,
    /// Uniform over the scale.
    Random,
}

impl fmt::Display for SpamType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpamType::Malicious => "malicious",
            SpamType::Random => "random",
        })
    }
}

impl FromStr for SpamType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "malicious" => Ok(SpamType::Malicious),
            "random" => Ok(SpamType::Random),
            other => Err(Error::Config(format!(
                "unknown spam type {other:?} (expected malicious or random)"
            ))),
        }
    }
}

/// Draws one distorted rating level.
pub fn draw_distorted_level<R: Rng + ?Sized>(
    spam_type: SpamType,
    scale: &RatingScale,
    rng: &mut R,
) -> u8 {
    match spam_type {
        SpamType::Malicious => {
            if rng.random_bool(0.5) {
                scale.max_level()
            } else {
                scale.min_level()
            }
        }
        SpamType::Random => rng.random_range(0..scale.len()) as u8,
    }
}

/// Parameters of one injection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpamScenario {
    pub spam_type: SpamType,
    /// Number of spammers, d.
    pub spammers: usize,
    /// Ratings per spammer, k.
    pub degree: usize,
    pub seed: u64,
}

impl SpamScenario {
    /// Spammer ratio q = d/m.
    pub fn ratio(&self, n_users: usize) -> f64 {
        self.spammers as f64 / n_users as f64
    }

    /// Spammer activity p = k/n.
    pub fn activity(&self, n_objects: usize) -> f64 {
        self.degree as f64 / n_objects as f64
    }

    pub fn validate(&self, matrix: &RatingMatrix) -> Result<()> {
        let (m, n) = (matrix.n_users(), matrix.n_objects());
        if self.spammers == 0 || self.spammers > m {
            return Err(Error::Config(format!(
                "spammer count d={} must be in 1..={m}",
                self.spammers
            )));
        }
        if self.degree == 0 || self.degree > n {
            return Err(Error::Config(format!(
                "spammer degree k={} must be in 1..={n}",
                self.degree
            )));
        }
        Ok(())
    }
}

/// A rating matrix with injected spammers and their ground-truth identities.
#[derive(Debug, Clone, PartialEq)]
pub struct InjectedDataset {
    pub matrix: RatingMatrix,
    /// Spammer user indices, ascending.
    pub spammers: Vec<usize>,
    pub scenario: SpamScenario,
}

impl InjectedDataset {
    /// Boolean mask over users.
    pub fn spammer_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.matrix.n_users()];
        for &s in &self.spammers {
            mask[s] = true;
        }
        mask
    }
}

/// Replaces `d` random users' rows with `k` distorted ratings each.
pub fn inject_spammers(matrix: &RatingMatrix, scenario: &SpamScenario) -> Result<InjectedDataset> {
    scenario.validate(matrix)?;
    let mut rng = SpamRng::seed_from_u64(scenario.seed);
    let (m, n, k) = (matrix.n_users(), matrix.n_objects(), scenario.degree);
    let mut spammers = index::sample(&mut rng, m, scenario.spammers).into_vec();
    spammers.sort_unstable();

    let mut replacements = Vec::with_capacity(spammers.len());
    let mut rated = vec![false; n];
    for &user in &spammers {
        let own = matrix.row_objects(user);
        let mut objects: Vec<u32> = if k <= own.len() {
            index::sample(&mut rng, own.len(), k)
                .into_iter()
                .map(|pos| own[pos])
                .collect()
        } else {
            for &o in own {
                rated[o as usize] = true;
            }
            let unrated: Vec<u32> = (0..n as u32).filter(|&o| !rated[o as usize]).collect();
            for &o in own {
                rated[o as usize] = false;
            }
            let mut objects = own.to_vec();
            objects.extend(
                index::sample(&mut rng, unrated.len(), k - own.len())
                    .into_iter()
                    .map(|pos| unrated[pos]),
            );
            objects
        };
        objects.sort_unstable();
        let row = objects
            .into_iter()
            .map(|o| {
                (
                    o,
                    draw_distorted_level(scenario.spam_type, matrix.scale(), &mut rng),
                )
            })
            .collect();
        replacements.push((user, row));
    }
    Ok(InjectedDataset {
        matrix: matrix.with_rows_replaced(replacements)?,
        spammers,
        scenario: *scenario,
    })
}

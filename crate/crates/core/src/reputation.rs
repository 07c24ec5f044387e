//! Reputation values shared by the ranking methods and the suspect ranking.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Ranking method that produced a reputation vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    /// Group-based ranking.
    #[serde(rename = "GR")]
    Gr,
    /// Correlation-based iterative ranking.
    #[serde(rename = "CR")]
    Cr,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Gr => "GR",
            Method::Cr => "CR",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gr" => Ok(Method::Gr),
            "cr" => Ok(Method::Cr),
            other => Err(Error::Config(format!(
                "unknown method {other:?} (expected gr or cr)"
            ))),
        }
    }
}

/// A single user's reputation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reputation {
    Finite(f64),
    /// All of the user's rewardings are equal, so the dispersion is zero and
    /// the ratio is unbounded. Sorts above every finite reputation.
    Consistent {
        mean: f64,
    },
}

impl Reputation {
    pub fn finite(self) -> Option<f64> {
        match self {
            Reputation::Finite(v) => Some(v),
            Reputation::Consistent { .. } => None,
        }
    }

    pub fn is_consistent(self) -> bool {
        matches!(self, Reputation::Consistent { .. })
    }

    /// Total order from most to least suspicious.
    pub fn rank_cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Reputation::Finite(a), Reputation::Finite(b)) => a.total_cmp(b),
            (Reputation::Finite(_), Reputation::Consistent { .. }) => Ordering::Less,
            (Reputation::Consistent { .. }, Reputation::Finite(_)) => Ordering::Greater,
            (Reputation::Consistent { mean: a }, Reputation::Consistent { mean: b }) => {
                a.total_cmp(b)
            }
        }
    }

    /// Order used for pairwise comparisons in AUC: consistent users tie with each other.
    pub fn auc_cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Reputation::Consistent { .. }, Reputation::Consistent { .. }) => Ordering::Equal,
            _ => self.rank_cmp(other),
        }
    }
}

/// Per-user reputations for one matrix.
///
/// `None` marks a user without ratings; such users are left out of rankings
/// and metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReputationVector {
    pub method: Method,
    pub values: Vec<Option<Reputation>>,
    /// Tie-break rank of each user (identifier order).
    pub tie_order: Vec<u32>,
    /// Number of refinement iterations, for iterative methods.
    pub iterations: Option<usize>,
}

impl ReputationVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, user: usize) -> Option<Reputation> {
        self.values[user]
    }

    /// Finite reputation of `user`, if any.
    pub fn finite(&self, user: usize) -> Option<f64> {
        self.values[user].and_then(Reputation::finite)
    }

    /// All ranked users, most suspicious first.
    ///
    /// Ascending reputation; ties go to the smaller user identifier.
    pub fn ranking(&self) -> Vec<usize> {
        let mut users: Vec<usize> = (0..self.values.len())
            .filter(|&i| self.values[i].is_some())
            .collect();
        users.sort_by(|&a, &b| {
            let (ra, rb) = (self.values[a].unwrap(), self.values[b].unwrap());
            ra.rank_cmp(&rb)
                .then_with(|| self.tie_order[a].cmp(&self.tie_order[b]))
        });
        users
    }
}

/// The `len` most suspicious users, ascending by reputation.
///
/// `len` larger than the number of ranked users is clamped with a warning.
pub fn rank_suspects(reps: &ReputationVector, len: usize) -> Vec<usize> {
    let mut ranking = reps.ranking();
    if len > ranking.len() {
        log::warn!(
            "suspect list length {len} exceeds {} ranked users; clamping",
            ranking.len()
        );
    }
    ranking.truncate(len);
    ranking
}

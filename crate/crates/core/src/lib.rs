//! User reputation ranking for online rating systems.
//!
//! The central method is group-based ranking ([`gr_rank`]): users who give an
//! object the same rating form a group, each rating is rewarded with the
//! relative size of its group, and a user's reputation is the mean of their
//! rewards over their standard deviation. Low-reputation users are reported as
//! suspected spammers.
//!
//! Around it the crate provides:
//!
//! - [`rating_graph`]: the sparse bipartite rating matrix, file loading,
//!   core filtering and dataset statistics;
//! - [`corr_rank`]: the iterative correlation-based baseline ([`cr_rank`]);
//! - [`spam_gen`]: malicious/random spammer injection with ground truth;
//! - [`metrics`]: recall of the suspect list, exact AUC, rating error and
//!   the reputation/error correlation;
//! - [`experiment`] and [`emit`]: seeded multi-realization runs, (p, q)
//!   sweeps and CSV/JSON output.
//!
//! ```
//! use grouprank_core::{fixtures, gr_rank, rank_suspects};
//!
//! let matrix = fixtures::worked_example();
//! let reps = gr_rank(&matrix);
//! let suspects: Vec<&str> = rank_suspects(&reps, 2)
//!     .into_iter()
//!     .map(|u| matrix.user_ids()[u].as_str())
//!     .collect();
//! assert_eq!(suspects, ["U5", "U3"]);
//! ```

pub mod corr_rank;
pub mod emit;
pub mod error;
pub mod experiment;
pub mod fixtures;
pub mod group_rank;
pub mod metrics;
pub mod rating_graph;
pub mod reputation;
pub mod spam_gen;

pub use corr_rank::{cr_rank, weighted_quality, CrConfig, QualityVector};
pub use error::{Error, Result};
pub use experiment::{
    run_scenario, run_sweep, DegreeSpec, ExperimentConfig, ExperimentResult, ListLength,
    SpammerSpec, SweepConfig, SweepResult,
};
pub use group_rank::{
    gr_rank, group_sizes, reputations, rewarding_matrix, GroupRewardTable, RewardingMatrix,
};
pub use metrics::{
    auc, binned_rho, binned_rho_with, rating_error, raw_rho, recall_at, recall_curve,
    recall_difference, Grid, Normalization, RhoReport,
};
pub use rating_graph::{
    filter_core, load_ratings, load_ratings_path, stats, DatasetStats, Delimiter, RatingMatrix,
    RatingScale,
};
pub use reputation::{rank_suspects, Method, Reputation, ReputationVector};
pub use spam_gen::{inject_spammers, InjectedDataset, SpamScenario, SpamType};

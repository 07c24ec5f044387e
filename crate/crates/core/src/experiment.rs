//! Seeded multi-realization experiments and (p, q) sweeps.
//!
//! Realization `r` of a scenario injects spammers with seed `base_seed + r`,
//! ranks the users with every configured method and scores the ranking
//! against the ground truth. Realizations are independent, so running them on
//! a thread pool gives the same records, in the same order, as running them
//! serially.

use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corr_rank::{cr_rank, CrConfig};
use crate::error::{Error, Result};
use crate::group_rank::gr_rank;
use crate::metrics::{auc, recall_curve, recall_difference, Grid};
use crate::rating_graph::{
    filter_core, load_ratings_path, stats, DatasetStats, Delimiter, RatingMatrix, RatingScale,
};
use crate::reputation::{Method, ReputationVector};
use crate::spam_gen::{inject_spammers, SpamScenario, SpamType};

/// Where the ratings come from and how they are cleaned.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetConfig {
    pub input: PathBuf,
    pub delimiter: Delimiter,
    pub min_user_degree: usize,
    pub scale: RatingScale,
}

impl DatasetConfig {
    pub fn new(input: impl Into<PathBuf>) -> Self {
        DatasetConfig {
            input: input.into(),
            delimiter: Delimiter::Auto,
            min_user_degree: 20,
            scale: RatingScale::default(),
        }
    }

    /// Loads and core-filters the ratings.
    pub fn prepare(&self) -> Result<RatingMatrix> {
        if self.min_user_degree == 0 {
            return Err(Error::Config(
                "minimum user degree must be at least 1".into(),
            ));
        }
        let raw = load_ratings_path(&self.input, self.delimiter, &self.scale)?;
        let matrix = filter_core(&raw, self.min_user_degree);
        if matrix.n_users() == 0 {
            return Err(Error::Config(format!(
                "no user of {} has {} or more ratings",
                self.input.display(),
                self.min_user_degree
            )));
        }
        Ok(matrix)
    }
}

/// Number of spammers: absolute (d) or as a fraction of users (q).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpammerSpec {
    Count(usize),
    Ratio(f64),
}

/// Spammer degree: absolute (k) or as a fraction of objects (p).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegreeSpec {
    Count(usize),
    Activity(f64),
}

/// Which suspect-list lengths L to score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ListLength {
    /// L = d.
    SpammerCount,
    Lengths(Vec<usize>),
    /// L = 1..=3d.
    Curve,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub methods: Vec<Method>,
    pub spam_type: SpamType,
    pub spammers: SpammerSpec,
    pub degree: DegreeSpec,
    pub list_length: ListLength,
    pub realizations: usize,
    pub base_seed: u64,
    pub cr: CrConfig,
    /// Worker threads for realizations; 0 or 1 runs serially.
    pub workers: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            methods: vec![Method::Gr, Method::Cr],
            spam_type: SpamType::Malicious,
            spammers: SpammerSpec::Count(50),
            degree: DegreeSpec::Activity(0.05),
            list_length: ListLength::SpammerCount,
            realizations: 100,
            base_seed: 42,
            cr: CrConfig::default(),
            workers: 1,
        }
    }
}

/// Parameters of a configuration resolved against a concrete matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedScenario {
    pub spammers: usize,
    pub degree: usize,
    /// q = d/m
    pub ratio: f64,
    /// p = k/n
    pub activity: f64,
    pub lengths: Vec<usize>,
}

impl ExperimentConfig {
    /// Turns ratios into counts and picks the list lengths; fails before any work
    /// if the result is out of range.
    pub fn resolve(&self, matrix: &RatingMatrix) -> Result<ResolvedScenario> {
        let (m, n) = (matrix.n_users(), matrix.n_objects());
        if self.realizations == 0 {
            return Err(Error::Config("at least one realization is required".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("no ranking method selected".into()));
        }
        self.cr.validate()?;
        let d = match self.spammers {
            SpammerSpec::Count(d) => d,
            SpammerSpec::Ratio(q) => round_count(q, m, "q")?,
        };
        let k = match self.degree {
            DegreeSpec::Count(k) => k,
            DegreeSpec::Activity(p) => round_count(p, n, "p")?,
        };
        if d == 0 || d > m {
            return Err(Error::Config(format!("d={d} spammers must be in 1..={m}")));
        }
        if k == 0 || k > n {
            return Err(Error::Config(format!(
                "spammer degree k={k} must be in 1..={n}"
            )));
        }
        let lengths = match &self.list_length {
            ListLength::SpammerCount => vec![d],
            ListLength::Lengths(ls) => {
                if let Some(&bad) = ls.iter().find(|&&l| l > m) {
                    return Err(Error::Config(format!(
                        "list length {bad} exceeds {m} users"
                    )));
                }
                ls.clone()
            }
            ListLength::Curve => (1..=(3 * d).min(m)).collect(),
        };
        Ok(ResolvedScenario {
            spammers: d,
            degree: k,
            ratio: d as f64 / m as f64,
            activity: k as f64 / n as f64,
            lengths,
        })
    }
}

fn round_count(fraction: f64, total: usize, name: &str) -> Result<usize> {
    if !(fraction.is_finite() && fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::Config(format!(
            "{name}={fraction} must be in (0, 1]"
        )));
    }
    Ok((fraction * total as f64).round() as usize)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecallPoint {
    pub length: usize,
    pub recall: f64,
}

/// Scores of one method in one realization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodOutcome {
    pub method: Method,
    pub auc: Option<f64>,
    pub recall: Vec<RecallPoint>,
    /// Refinement iterations used (CR only).
    pub iterations: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealizationRecord {
    pub index: usize,
    pub seed: u64,
    pub outcomes: Vec<MethodOutcome>,
}

/// Mean and sample standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
    pub count: usize,
}

impl Summary {
    /// `None` for an empty sample; a single value has std 0.
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Some(Summary {
            mean,
            std,
            count: values.len(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecallSummary {
    pub length: usize,
    pub summary: Summary,
}

/// Per-method aggregate over all realizations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodAggregate {
    pub method: Method,
    pub auc: Option<Summary>,
    pub recall: Vec<RecallSummary>,
}

impl MethodAggregate {
    /// Mean recall at list length `length`, if it was scored.
    pub fn recall_mean(&self, length: usize) -> Option<f64> {
        self.recall
            .iter()
            .find(|r| r.length == length)
            .map(|r| r.summary.mean)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub dataset: DatasetStats,
    pub scenario: ResolvedScenario,
    pub realizations: Vec<RealizationRecord>,
    pub aggregates: Vec<MethodAggregate>,
}

impl ExperimentResult {
    pub fn aggregate(&self, method: Method) -> Option<&MethodAggregate> {
        self.aggregates.iter().find(|a| a.method == method)
    }
}

/// Reputations of `matrix` under `method`.
pub fn rank_with(method: Method, matrix: &RatingMatrix, cr: &CrConfig) -> Result<ReputationVector> {
    match method {
        Method::Gr => Ok(gr_rank(matrix)),
        Method::Cr => cr_rank(matrix, cr),
    }
}

fn run_realization(
    matrix: &RatingMatrix,
    config: &ExperimentConfig,
    resolved: &ResolvedScenario,
    index: usize,
) -> Result<RealizationRecord> {
    let seed = config.base_seed.wrapping_add(index as u64);
    let scenario = SpamScenario {
        spam_type: config.spam_type,
        spammers: resolved.spammers,
        degree: resolved.degree,
        seed,
    };
    let injected = inject_spammers(matrix, &scenario)?;
    let outcomes = config
        .methods
        .iter()
        .map(|&method| {
            let reps = rank_with(method, &injected.matrix, &config.cr)?;
            let recall = recall_curve(&reps, &injected.spammers, &resolved.lengths)
                .unwrap_or_default()
                .into_iter()
                .map(|(length, recall)| RecallPoint { length, recall })
                .collect();
            Ok(MethodOutcome {
                method,
                auc: auc(&reps, &injected.spammers),
                recall,
                iterations: reps.iterations,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RealizationRecord {
        index,
        seed,
        outcomes,
    })
}

fn aggregate(
    methods: &[Method],
    lengths: &[usize],
    records: &[RealizationRecord],
) -> Vec<MethodAggregate> {
    methods
        .iter()
        .enumerate()
        .map(|(mi, &method)| {
            let aucs: Vec<f64> = records.iter().filter_map(|r| r.outcomes[mi].auc).collect();
            let recall = lengths
                .iter()
                .enumerate()
                .filter_map(|(li, &length)| {
                    let values: Vec<f64> = records
                        .iter()
                        .filter_map(|r| r.outcomes[mi].recall.get(li).map(|p| p.recall))
                        .collect();
                    Summary::of(&values).map(|summary| RecallSummary { length, summary })
                })
                .collect();
            MethodAggregate {
                method,
                auc: Summary::of(&aucs),
                recall,
            }
        })
        .collect()
}

fn run_indexed<T, F>(count: usize, workers: usize, job: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync,
{
    if workers <= 1 {
        return (0..count).map(job).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {workers} workers: {e}")))?;
    pool.install(|| (0..count).into_par_iter().map(&job).collect())
}

/// Runs every realization of one scenario on an already prepared matrix.
pub fn run_scenario(matrix: &RatingMatrix, config: &ExperimentConfig) -> Result<ExperimentResult> {
    let resolved = config.resolve(matrix)?;
    let records = run_indexed(config.realizations, config.workers, |r| {
        run_realization(matrix, config, &resolved, r)
    })?;
    let aggregates = aggregate(&config.methods, &resolved.lengths, &records);
    Ok(ExperimentResult {
        config: config.clone(),
        dataset: stats(matrix),
        scenario: resolved,
        realizations: records,
        aggregates,
    })
}

/// Inclusive arithmetic range `start:end:step`, values rounded to 10 decimals.
pub fn parse_range(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Error::Config(format!("range {spec:?} must look like start:end:step"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    let (start, end, step) = match parts.as_slice() {
        [a] => {
            let a = num(a)?;
            (a, a, 1.0)
        }
        [a, b, s] => (num(a)?, num(b)?, num(s)?),
        _ => return Err(bad()),
    };
    if !(step > 0.0) || end < start || !start.is_finite() || !end.is_finite() {
        return Err(bad());
    }
    let count = ((end - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count)
        .map(|i| ((start + i as f64 * step) * 1e10).round() / 1e10)
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    /// Per-cell settings; `spammers`, `degree` and `list_length` are overridden.
    pub base: ExperimentConfig,
    pub p_axis: Vec<f64>,
    pub q_axis: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub p: f64,
    pub q: f64,
    pub scenario: ResolvedScenario,
    pub aggregates: Vec<MethodAggregate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub config: SweepConfig,
    pub dataset: DatasetStats,
    /// Row-major over q, then p.
    pub cells: Vec<SweepCell>,
    /// Mean recall at L = d per method.
    pub recall_grids: Vec<(Method, Grid)>,
    /// GR minus CR recall, when both ran.
    pub recall_difference: Option<Grid>,
}

/// Runs one scenario per (p, q) cell with L = d.
///
/// A failing cell aborts the sweep with its coordinates in the error.
pub fn run_sweep(matrix: &RatingMatrix, config: &SweepConfig) -> Result<SweepResult> {
    if config.p_axis.is_empty() || config.q_axis.is_empty() {
        return Err(Error::Config("sweep ranges must not be empty".into()));
    }
    let cell_config = |p: f64, q: f64| ExperimentConfig {
        spammers: SpammerSpec::Ratio(q),
        degree: DegreeSpec::Activity(p),
        list_length: ListLength::SpammerCount,
        ..config.base.clone()
    };
    let tag = |p: f64, q: f64, e: Error| match e {
        Error::Config(msg) => Error::Config(format!("sweep cell p={p}, q={q}: {msg}")),
        other => other,
    };
    // Validate every cell before running any of them.
    for &q in &config.q_axis {
        for &p in &config.p_axis {
            cell_config(p, q)
                .resolve(matrix)
                .map_err(|e| tag(p, q, e))?;
        }
    }
    let mut cells = Vec::with_capacity(config.p_axis.len() * config.q_axis.len());
    for &q in &config.q_axis {
        for &p in &config.p_axis {
            log::info!("sweep cell p={p} q={q}");
            let result = run_scenario(matrix, &cell_config(p, q)).map_err(|e| tag(p, q, e))?;
            cells.push(SweepCell {
                p,
                q,
                scenario: result.scenario,
                aggregates: result.aggregates,
            });
        }
    }
    let recall_grids: Vec<(Method, Grid)> = config
        .base
        .methods
        .iter()
        .map(|&method| {
            let values = cells
                .iter()
                .map(|c| {
                    c.aggregates
                        .iter()
                        .find(|a| a.method == method)
                        .and_then(|a| a.recall_mean(c.scenario.spammers))
                        .unwrap_or(f64::NAN)
                })
                .collect();
            Grid::new(config.p_axis.clone(), config.q_axis.clone(), values).map(|g| (method, g))
        })
        .collect::<Result<_>>()?;
    let grid_of = |m: Method| recall_grids.iter().find(|(x, _)| *x == m).map(|(_, g)| g);
    let difference = match (grid_of(Method::Gr), grid_of(Method::Cr)) {
        (Some(gr), Some(cr)) => Some(recall_difference(gr, cr)?),
        _ => None,
    };
    Ok(SweepResult {
        config: config.clone(),
        dataset: stats(matrix),
        cells,
        recall_grids,
        recall_difference: difference,
    })
}

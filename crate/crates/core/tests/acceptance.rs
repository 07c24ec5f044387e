//! Reproduction targets, one line per criterion.
//!
//! Runs without the libtest harness so every verdict is printed even when all
//! pass. Pass substrings as arguments to run a subset:
//! `cargo test --test acceptance -- gr_auc`.

mod common;

use std::time::{Duration, Instant};

use common::*;
use grouprank_core::emit::{write_aggregate_csv, write_auc_csv, write_realizations_csv};
use grouprank_core::experiment::parse_range;
use grouprank_core::experiment::DatasetConfig;
use grouprank_core::fixtures::worked_example;
use grouprank_core::{
    auc, binned_rho, cr_rank, gr_rank, group_sizes, rank_suspects, rating_error, recall_curve,
    rewarding_matrix, run_scenario, run_sweep, stats, CrConfig, DatasetStats, DegreeSpec,
    ExperimentConfig, ExperimentResult, ListLength, Method, RatingMatrix, RatingScale, SpamType,
    SpammerSpec, SweepConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Tolerances and targets.
const DATASET_STATS: (usize, usize, i64, i64, f64) = (943, 1682, 106, 60, 0.063);
const STATS_BUDGET: Duration = Duration::from_secs(5);
const GR_AUC_MALICIOUS: (f64, f64) = (0.994, 0.01);
const GR_AUC_RANDOM: (f64, f64) = (0.959, 0.02);
const GR_BUDGET: Duration = Duration::from_secs(600);
const CR_AUC_MALICIOUS: (f64, f64) = (0.876, 0.05);
const CR_AUC_RANDOM: (f64, f64) = (0.914, 0.05);
const GR_RHO: (f64, f64) = (-0.956, 0.03);
const CR_RHO: (f64, f64) = (-0.949, 0.05);
const RHO_BIN_WIDTH: f64 = 0.05;
const EXAMPLE_TOL: f64 = 1e-9;
const SWEEP_AXIS: &str = "0.01:0.10:0.01";
const SWEEP_POSITIVE_FRACTION: f64 = 0.70;
const ORACLE_CASES: usize = 1000;
const ORACLE_TOL: f64 = 1e-12;
const RANDOM_AUC: (f64, f64) = (0.5, 0.02);
const RANDOM_AUC_TRIALS: usize = 1000;
const PROPERTY_INSTANCES: usize = 100;
const REALIZATIONS: usize = 100;
const SEED: u64 = 42;
const SPAMMERS: usize = 50;
const ACTIVITY: f64 = 0.05;

type Criterion = (&'static str, fn() -> Verdict);

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Verdict {
            pass,
            detail: detail.into(),
        }
    }
}

fn within(value: f64, (target, tol): (f64, f64)) -> bool {
    (value - target).abs() <= tol
}

fn movielens() -> RatingMatrix {
    DatasetConfig::new(require_movielens()).prepare().unwrap()
}

fn auc_config(methods: Vec<Method>, spam_type: SpamType, cr: CrConfig) -> ExperimentConfig {
    ExperimentConfig {
        methods,
        spam_type,
        spammers: SpammerSpec::Count(SPAMMERS),
        degree: DegreeSpec::Activity(ACTIVITY),
        list_length: ListLength::SpammerCount,
        realizations: REALIZATIONS,
        base_seed: SEED,
        cr,
        workers: 1,
    }
}

fn mean_auc(result: &ExperimentResult, method: Method) -> f64 {
    result
        .aggregate(method)
        .and_then(|a| a.auc)
        .map(|s| s.mean)
        .unwrap()
}

fn dataset_statistics() -> Verdict {
    let start = Instant::now();
    let matrix = movielens();
    let s: DatasetStats = stats(&matrix);
    let elapsed = start.elapsed();
    let (m, n, ku, ko, sp) = DATASET_STATS;
    let checks = [
        ("m", s.users == m, s.users.to_string()),
        ("n", s.objects == n, s.objects.to_string()),
        (
            "<k_U>",
            s.mean_user_degree.round() as i64 == ku,
            format!("{:.2}", s.mean_user_degree),
        ),
        (
            "<k_O>",
            s.mean_object_degree.round() as i64 == ko,
            format!("{:.2}", s.mean_object_degree),
        ),
        (
            "S",
            format!("{:.3}", s.sparsity) == format!("{sp:.3}"),
            format!("{:.4}", s.sparsity),
        ),
        (
            "time",
            elapsed < STATS_BUDGET,
            format!("{:.2}s", elapsed.as_secs_f64()),
        ),
    ];
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    let shown: Vec<String> = checks.iter().map(|c| format!("{}={}", c.0, c.2)).collect();
    let mut detail = format!("{} (l={})", shown.join(" "), s.ratings);
    if !failed.is_empty() {
        detail.push_str(&format!("; mismatched: {}", failed.join(", ")));
    }
    Verdict::new(failed.is_empty(), detail)
}

fn gr_auc() -> Verdict {
    let matrix = movielens();
    let start = Instant::now();
    let mal = run_scenario(
        &matrix,
        &auc_config(vec![Method::Gr], SpamType::Malicious, CrConfig::default()),
    )
    .unwrap();
    let rnd = run_scenario(
        &matrix,
        &auc_config(vec![Method::Gr], SpamType::Random, CrConfig::default()),
    )
    .unwrap();
    let elapsed = start.elapsed();
    let (a_mal, a_rnd) = (mean_auc(&mal, Method::Gr), mean_auc(&rnd, Method::Gr));
    let pass =
        within(a_mal, GR_AUC_MALICIOUS) && within(a_rnd, GR_AUC_RANDOM) && elapsed < GR_BUDGET;
    Verdict::new(
        pass,
        format!(
            "k={} malicious AUC={a_mal:.4} (target {}±{}), random AUC={a_rnd:.4} (target {}±{}), {:.1}s",
            mal.scenario.degree,
            GR_AUC_MALICIOUS.0,
            GR_AUC_MALICIOUS.1,
            GR_AUC_RANDOM.0,
            GR_AUC_RANDOM.1,
            elapsed.as_secs_f64()
        ),
    )
}

fn cr_auc() -> Verdict {
    let matrix = movielens();
    let signed = CrConfig {
        clip_negative: false,
        ..CrConfig::default()
    };
    let mut pass = true;
    let mut parts = Vec::new();
    for (spam_type, target) in [
        (SpamType::Malicious, CR_AUC_MALICIOUS),
        (SpamType::Random, CR_AUC_RANDOM),
    ] {
        let clipped = run_scenario(
            &matrix,
            &auc_config(vec![Method::Cr], spam_type, CrConfig::default()),
        )
        .unwrap();
        let a = mean_auc(&clipped, Method::Cr);
        if within(a, target) {
            parts.push(format!(
                "{spam_type} AUC={a:.4} (target {}±{})",
                target.0, target.1
            ));
            continue;
        }
        let ablation =
            run_scenario(&matrix, &auc_config(vec![Method::Cr], spam_type, signed)).unwrap();
        let b = mean_auc(&ablation, Method::Cr);
        let ok = within(b, target);
        pass &= ok;
        parts.push(format!(
            "{spam_type} AUC={a:.4} outside {}±{}, signed ablation AUC={b:.4} {}",
            target.0,
            target.1,
            if ok {
                "inside (pass via ablation)"
            } else {
                "also outside"
            }
        ));
    }
    Verdict::new(pass, parts.join("; "))
}

fn reputation_error_correlation() -> Verdict {
    let matrix = movielens();
    let delta = rating_error(&matrix);
    let gr = binned_rho(&gr_rank(&matrix), &delta, RHO_BIN_WIDTH).unwrap();
    let cr_reps = cr_rank(&matrix, &CrConfig::default()).unwrap();
    let cr = binned_rho(&cr_reps, &delta, RHO_BIN_WIDTH).unwrap();
    Verdict::new(
        within(gr.rho, GR_RHO) && within(cr.rho, CR_RHO),
        format!(
            "GR rho={:.4} over {} bins (target {}±{}), CR rho={:.4} over {} bins after {} iterations (target {}±{})",
            gr.rho,
            gr.points,
            GR_RHO.0,
            GR_RHO.1,
            cr.rho,
            cr.points,
            cr_reps.iterations.unwrap(),
            CR_RHO.0,
            CR_RHO.1
        ),
    )
}

fn worked_example_check() -> Verdict {
    let matrix = worked_example();
    let user = |id: &str| matrix.user_ids().iter().position(|u| u == id).unwrap();
    let object = |id: &str| matrix.object_ids().iter().position(|o| o == id).unwrap() as u32;
    let four = matrix.scale().level_of(4).unwrap();
    let o2 = object("O2");
    let table = group_sizes(&matrix);
    let size = table.size(four, o2);
    let reward = table.reward(four, o2).unwrap();
    let rewards = rewarding_matrix(&matrix, &table).unwrap();
    let u4 = user("U4");
    let pos = matrix
        .row_objects(u4)
        .iter()
        .position(|&o| o == o2)
        .unwrap();
    let a = rewards.row(u4)[pos];
    let reps = gr_rank(&matrix);
    let r3 = reps.finite(user("U3")).unwrap();
    let top: Vec<&str> = rank_suspects(&reps, 2)
        .into_iter()
        .map(|u| matrix.user_ids()[u].as_str())
        .collect();
    let pass = size == 2
        && (reward - 0.4).abs() <= EXAMPLE_TOL
        && (a - 0.4).abs() <= EXAMPLE_TOL
        && (r3 - 3.75).abs() <= EXAMPLE_TOL
        && top == ["U5", "U3"];
    Verdict::new(
        pass,
        format!("group size={size}, group reward={reward:.6}, U4 reward on O2={a:.6}, R(U3)={r3:.12}, top-2={top:?}"),
    )
}

fn recall_difference_sign() -> Verdict {
    let matrix = movielens();
    let axis = parse_range(SWEEP_AXIS).unwrap();
    let config = SweepConfig {
        base: auc_config(
            vec![Method::Gr, Method::Cr],
            SpamType::Malicious,
            CrConfig::default(),
        ),
        p_axis: axis.clone(),
        q_axis: axis,
    };
    let start = Instant::now();
    let result = run_sweep(&matrix, &config).unwrap();
    let grid = result.recall_difference.unwrap();
    let positive = grid.positive_fraction();
    let (lo, hi) = grid
        .values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| {
            (l.min(v), h.max(v))
        });
    Verdict::new(
        positive >= SWEEP_POSITIVE_FRACTION,
        format!(
            "{:.0}% of {} cells have GR-CR recall > 0 (need {:.0}%), range [{lo:.3}, {hi:.3}], {:.0}s",
            positive * 100.0,
            grid.values.len(),
            SWEEP_POSITIVE_FRACTION * 100.0,
            start.elapsed().as_secs_f64()
        ),
    )
}

fn oracle_equivalence() -> Verdict {
    let scale = RatingScale::range(1, 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut degenerate = 0;
    let mut finite = 0;
    for case in 0..ORACLE_CASES {
        let m = rng.random_range(1..=6);
        let n = rng.random_range(1..=4);
        let density = rng.random_range(0.3..=1.0);
        let dense = random_dense(&mut rng, m, n, density, &[1, 2, 3]);
        let oracle = brute_force_gr(&dense);
        let reps = gr_rank(&to_matrix(&dense, &scale));
        if let Some(why) = oracle_mismatch(&reps, &oracle, ORACLE_TOL) {
            return Verdict::new(false, format!("case {case} ({m}x{n}): {why}"));
        }
        degenerate += oracle
            .iter()
            .filter(|o| **o == OracleRep::Degenerate)
            .count();
        finite += oracle
            .iter()
            .filter(|o| matches!(o, OracleRep::Finite(_)))
            .count();
    }
    Verdict::new(
        true,
        format!("{ORACLE_CASES} matrices agree ({finite} finite, {degenerate} degenerate users)"),
    )
}

fn metric_properties() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (m, d) = (993, 50);
    let truth: Vec<usize> = (0..d).collect();
    let mut total = 0.0;
    for _ in 0..RANDOM_AUC_TRIALS {
        let values: Vec<f64> = (0..m).map(|_| rng.random()).collect();
        total += auc(&finite_reps(&values), &truth).unwrap();
    }
    let mean = total / RANDOM_AUC_TRIALS as f64;

    let mut monotone_recall = 0;
    let mut transform_invariant = 0;
    for _ in 0..PROPERTY_INSTANCES {
        let size = rng.random_range(10..200);
        let values: Vec<f64> = (0..size)
            .map(|_| rng.random_range(-30..30) as f64)
            .collect();
        let spam = rng.random_range(1..size / 2);
        let mut truth: Vec<usize> = rand::seq::index::sample(&mut rng, size, spam).into_vec();
        truth.sort_unstable();
        let reps = finite_reps(&values);
        let lengths: Vec<usize> = (0..=size).collect();
        let curve = recall_curve(&reps, &truth, &lengths).unwrap();
        monotone_recall += curve.windows(2).all(|w| w[0].1 <= w[1].1) as usize;
        let bent: Vec<f64> = values.iter().map(|x| (x / 7.0).exp() - 3.0).collect();
        transform_invariant += (auc(&reps, &truth) == auc(&finite_reps(&bent), &truth)) as usize;
    }
    Verdict::new(
        within(mean, RANDOM_AUC)
            && monotone_recall == PROPERTY_INSTANCES
            && transform_invariant == PROPERTY_INSTANCES,
        format!(
            "random AUC mean={mean:.4} over {RANDOM_AUC_TRIALS} trials (target {}±{}), \
             nondecreasing recall {monotone_recall}/{PROPERTY_INSTANCES}, \
             transform-invariant AUC {transform_invariant}/{PROPERTY_INSTANCES}",
            RANDOM_AUC.0, RANDOM_AUC.1
        ),
    )
}

fn csv_bytes(result: &ExperimentResult) -> Vec<u8> {
    let mut out = Vec::new();
    write_realizations_csv(result, &mut out).unwrap();
    write_auc_csv(result, &mut out).unwrap();
    write_aggregate_csv(result, &mut out).unwrap();
    out
}

fn determinism() -> Verdict {
    let matrix = movielens();
    let mut config = auc_config(
        vec![Method::Gr, Method::Cr],
        SpamType::Random,
        CrConfig::default(),
    );
    config.realizations = 16;
    config.list_length = ListLength::Curve;
    let serial_a = csv_bytes(&run_scenario(&matrix, &config).unwrap());
    let serial_b = csv_bytes(&run_scenario(&matrix, &config).unwrap());
    config.workers = 8;
    let parallel = csv_bytes(&run_scenario(&matrix, &config).unwrap());
    Verdict::new(
        serial_a == serial_b && serial_a == parallel,
        format!(
            "{} CSV bytes; serial repeat identical={}, 8 workers identical={}",
            serial_a.len(),
            serial_a == serial_b,
            serial_a == parallel
        ),
    )
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("dataset_statistics", dataset_statistics),
        ("gr_auc", gr_auc),
        ("cr_auc", cr_auc),
        ("reputation_error_correlation", reputation_error_correlation),
        ("worked_example", worked_example_check),
        ("recall_difference_sign", recall_difference_sign),
        ("oracle_equivalence", oracle_equivalence),
        ("metric_properties", metric_properties),
        ("determinism", determinism),
    ];
    let filters: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failures = 0;
    let mut ran = 0;
    for (name, check) in criteria {
        if !filters.is_empty() && !filters.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        ran += 1;
        let verdict = match std::panic::catch_unwind(check) {
            Ok(v) => v,
            Err(e) => {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_else(|| "panicked".into());
                Verdict::new(false, msg)
            }
        };
        failures += !verdict.pass as usize;
        println!(
            "{} {name}: {}",
            if verdict.pass { "PASS" } else { "FAIL" },
            verdict.detail
        );
    }
    println!("acceptance: {} of {ran} criteria passed", ran - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}

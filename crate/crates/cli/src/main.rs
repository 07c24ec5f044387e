//! `grouprank`: run spam-detection experiments on rating files.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use grouprank_core::emit::{emit_run, emit_sweep, EmitFormat, Provenance};
use grouprank_core::experiment::{parse_range, rank_with, DatasetConfig};
use grouprank_core::group_rank::{group_sizes, rewarding_matrix, write_group_table, write_rewards};
use grouprank_core::{
    binned_rho_with, rating_error, raw_rho, run_scenario, run_sweep, CrConfig, DegreeSpec,
    Delimiter, Error, ExperimentConfig, ListLength, Method, Normalization, SpamType, SpammerSpec,
    SweepConfig,
};

#[derive(Parser)]
#[command(
    name = "grouprank",
    version,
    about = "Group-based reputation ranking and spam-detection experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Inject spammers, rank users and score the rankings over many realizations.
    Run(RunArgs),
    /// Run one scenario per (p, q) cell with L = d.
    Sweep(SweepArgs),
    /// Print dataset statistics after filtering.
    Stats(DataArgs),
    /// Correlation between reputation and rating error on the filtered data.
    Rho(RhoArgs),
    /// Write the group table and per-rating rewards of the filtered data.
    Dump(DumpArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Auto,
    Tsv,
    Csv,
}

#[derive(Args)]
struct DataArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    format: FormatArg,
    #[arg(long = "min-degree", default_value_t = 20)]
    min_degree: usize,
}

impl DataArgs {
    fn dataset(&self) -> DatasetConfig {
        DatasetConfig {
            delimiter: match self.format {
                FormatArg::Auto => Delimiter::Auto,
                FormatArg::Tsv => Delimiter::Tab,
                FormatArg::Csv => Delimiter::Comma,
            },
            min_user_degree: self.min_degree,
            ..DatasetConfig::new(&self.input)
        }
    }
}

#[derive(Args)]
struct CommonArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, value_delimiter = ',', default_value = "gr,cr")]
    method: Vec<String>,
    #[arg(long = "spam-type", default_value = "malicious")]
    spam_type: String,
    #[arg(long, default_value_t = 100)]
    realizations: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value = "results")]
    out: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "csv,json")]
    emit: Vec<String>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long = "cr-max-iter", default_value_t = 200)]
    cr_max_iter: usize,
    #[arg(long = "cr-epsilon", default_value_t = 1e-6)]
    cr_epsilon: f64,
    /// Keep negative CR correlations instead of clipping them to 0.
    #[arg(long = "cr-signed")]
    cr_signed: bool,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Number of spammers.
    #[arg(long, conflicts_with = "q")]
    d: Option<usize>,
    /// Spammer ratio d/m.
    #[arg(long)]
    q: Option<f64>,
    /// Spammer activity k/n; k = round(p n).
    #[arg(long, conflicts_with = "k")]
    p: Option<f64>,
    /// Ratings per spammer.
    #[arg(long)]
    k: Option<usize>,
    /// Suspect-list lengths: `d`, `curve` (1..=3d) or a comma-separated list.
    #[arg(long = "L", default_value = "d")]
    list_length: String,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// p values as start:end:step.
    #[arg(long = "p-range", default_value = "0.01:0.10:0.01")]
    p_range: String,
    /// q values as start:end:step.
    #[arg(long = "q-range", default_value = "0.01:0.10:0.01")]
    q_range: String,
}

#[derive(Args)]
struct RhoArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, value_delimiter = ',', default_value = "gr,cr")]
    method: Vec<String>,
    #[arg(long = "bin-width", default_value_t = 0.05)]
    bin_width: f64,
    #[arg(long = "cr-max-iter", default_value_t = 200)]
    cr_max_iter: usize,
    #[arg(long = "cr-epsilon", default_value_t = 1e-6)]
    cr_epsilon: f64,
    #[arg(long = "cr-signed")]
    cr_signed: bool,
    /// Rescaling of rating error and reputation before binning.
    #[arg(long, value_enum, default_value = "max")]
    normalize: NormalizeArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum NormalizeArg {
    Max,
    MinMax,
}

#[derive(Args)]
struct DumpArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Per-rating rewards.
    #[arg(long)]
    out: PathBuf,
    /// Group sizes and rewards per (item, rating).
    #[arg(long)]
    groups: Option<PathBuf>,
}

fn parse_methods(raw: &[String]) -> Result<Vec<Method>, Error> {
    let mut methods = Vec::new();
    for m in raw {
        let m: Method = m.parse()?;
        if !methods.contains(&m) {
            methods.push(m);
        }
    }
    Ok(methods)
}

fn parse_formats(raw: &[String]) -> Result<Vec<EmitFormat>, Error> {
    raw.iter().map(|f| f.parse()).collect()
}

fn parse_lengths(raw: &str) -> Result<ListLength, Error> {
    match raw.trim() {
        "d" => Ok(ListLength::SpammerCount),
        "curve" => Ok(ListLength::Curve),
        list => list
            .split(',')
            .map(|l| {
                l.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Config(format!("invalid list length {l:?}")))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(ListLength::Lengths),
    }
}

impl CommonArgs {
    fn experiment(&self) -> Result<ExperimentConfig, Error> {
        Ok(ExperimentConfig {
            methods: parse_methods(&self.method)?,
            spam_type: self.spam_type.parse::<SpamType>()?,
            realizations: self.realizations,
            base_seed: self.seed,
            cr: CrConfig {
                max_iterations: self.cr_max_iter,
                convergence_epsilon: self.cr_epsilon,
                clip_negative: !self.cr_signed,
                ..CrConfig::default()
            },
            workers: self.workers,
            ..ExperimentConfig::default()
        })
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|v| format!("{v:.4}")).unwrap_or_else(|| "-".into())
}

fn run(args: RunArgs) -> Result<(), Error> {
    let formats = parse_formats(&args.common.emit)?;
    let config = ExperimentConfig {
        spammers: match (args.d, args.q) {
            (_, Some(q)) => SpammerSpec::Ratio(q),
            (Some(d), None) => SpammerSpec::Count(d),
            (None, None) => SpammerSpec::Count(50),
        },
        degree: match (args.p, args.k) {
            (_, Some(k)) => DegreeSpec::Count(k),
            (Some(p), None) => DegreeSpec::Activity(p),
            (None, None) => DegreeSpec::Activity(0.05),
        },
        list_length: parse_lengths(&args.list_length)?,
        ..args.common.experiment()?
    };
    let dataset = args.common.data.dataset();
    let matrix = dataset.prepare()?;
    let result = run_scenario(&matrix, &config)?;
    let s = &result.scenario;
    println!(
        "m={} n={} d={} k={} q={:.4} p={:.4} realizations={}",
        result.dataset.users,
        result.dataset.objects,
        s.spammers,
        s.degree,
        s.ratio,
        s.activity,
        config.realizations
    );
    for agg in &result.aggregates {
        let recall_d = agg.recall_mean(s.spammers);
        println!(
            "{}  AUC {} ± {}  R_c(L=d) {}",
            agg.method,
            fmt_opt(agg.auc.map(|a| a.mean)),
            fmt_opt(agg.auc.map(|a| a.std)),
            fmt_opt(recall_d),
        );
    }
    let files = emit_run(
        &result,
        &formats,
        &args.common.out,
        Provenance::now(Some(dataset.input)),
    )?;
    for f in files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn sweep(args: SweepArgs) -> Result<(), Error> {
    let formats = parse_formats(&args.common.emit)?;
    let config = SweepConfig {
        base: args.common.experiment()?,
        p_axis: parse_range(&args.p_range)?,
        q_axis: parse_range(&args.q_range)?,
    };
    let dataset = args.common.data.dataset();
    let matrix = dataset.prepare()?;
    let result = run_sweep(&matrix, &config)?;
    for (method, grid) in &result.recall_grids {
        let mean = grid.values.iter().sum::<f64>() / grid.values.len() as f64;
        println!(
            "{method}  mean R_c(L=d) over {} cells: {mean:.4}",
            grid.values.len()
        );
    }
    if let Some(diff) = &result.recall_difference {
        println!(
            "GR-CR  cells with positive difference: {:.1}%",
            100.0 * diff.positive_fraction()
        );
    }
    let files = emit_sweep(
        &result,
        &formats,
        &args.common.out,
        Provenance::now(Some(dataset.input)),
    )?;
    for f in files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn stats(args: DataArgs) -> Result<(), Error> {
    let matrix = args.dataset().prepare()?;
    let s = grouprank_core::stats(&matrix);
    println!("m\tn\tl\t<k_U>\t<k_O>\tS");
    println!(
        "{}\t{}\t{}\t{:.0}\t{:.0}\t{:.3}",
        s.users, s.objects, s.ratings, s.mean_user_degree, s.mean_object_degree, s.sparsity
    );
    log::info!(
        "unrounded: <k_U>={} <k_O>={} S={}",
        s.mean_user_degree,
        s.mean_object_degree,
        s.sparsity
    );
    Ok(())
}

fn rho(args: RhoArgs) -> Result<(), Error> {
    let matrix = args.data.dataset().prepare()?;
    let cr = CrConfig {
        max_iterations: args.cr_max_iter,
        convergence_epsilon: args.cr_epsilon,
        clip_negative: !args.cr_signed,
        ..CrConfig::default()
    };
    let normalization = match args.normalize {
        NormalizeArg::Max => Normalization::Max,
        NormalizeArg::MinMax => Normalization::MinMax,
    };
    let delta = rating_error(&matrix);
    println!("method\trho_binned\tbins\trho_raw\texcluded");
    for method in parse_methods(&args.method)? {
        let reps = rank_with(method, &matrix, &cr)?;
        let binned = binned_rho_with(&reps, &delta, args.bin_width, normalization);
        let raw = raw_rho(&reps, &delta);
        println!(
            "{method}\t{}\t{}\t{}\t{}",
            fmt_opt(binned.map(|r| r.rho)),
            binned.map(|r| r.points).unwrap_or(0),
            fmt_opt(raw.map(|r| r.rho)),
            raw.map(|r| r.excluded).unwrap_or(0),
        );
    }
    Ok(())
}

fn dump(args: DumpArgs) -> Result<(), Error> {
    let matrix = args.data.dataset().prepare()?;
    let table = group_sizes(&matrix);
    let rewards = rewarding_matrix(&matrix, &table)?;
    let open = |path: &PathBuf| {
        std::fs::File::create(path)
            .map(std::io::BufWriter::new)
            .map_err(|e| Error::Io {
                path: path.clone(),
                source: e,
            })
    };
    write_rewards(&matrix, &rewards, open(&args.out)?)?;
    if let Some(path) = &args.groups {
        write_group_table(&matrix, &table, open(path)?)?;
    }
    Ok(())
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config(_) | Error::Usage(_) => 2,
        Error::Parse { .. } | Error::Domain { .. } => 3,
        Error::Io { .. } | Error::Json(_) => 4,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(a) => run(a),
        Command::Sweep(a) => sweep(a),
        Command::Stats(a) => stats(a),
        Command::Rho(a) => rho(a),
        Command::Dump(a) => dump(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

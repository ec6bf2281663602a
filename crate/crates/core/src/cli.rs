//! Command-line front end: configuration resolution, the five study
//! subcommands, and report emission.
//!
//! Configuration comes from an optional JSON file plus flags; flags win.
//! Every command writes into a fresh timestamped directory under the
//! output root, containing a `manifest.json` sufficient to reproduce the
//! run plus the command's CSV outputs. Numeric CSVs carry full precision;
//! rendered tables round to two decimals.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::cutoff::{equilibrium_sampling, ModelKind, CURVE_PAIRS};
use crate::dataset::{ingest_csv, ColumnMap, Dataset, Sex};
use crate::error::Error;
use crate::harness::{ratio_study, run, Algorithm, ExperimentSpec, SexFilter};
use crate::hierarchy::{exhaustive_search, greedy_search, Metric, SearchConfig};
use crate::metrics::PerformanceMatrix;
use crate::splitter::Scenario;

/// Environment variable naming the default data CSV.
pub const DATA_ENV: &str = "DDSBENCH_DATA";

#[derive(Debug, Parser)]
#[command(
    name = "ddsbench",
    version,
    about = "Classification benchmarking: scenario splits, equilibrium cutoffs, \
             double discriminant scoring and variable hierarchies"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ingest the data CSV and print group counts and prevalence.
    Ingest(CommonArgs),
    /// Sweep classifier cutoffs and estimate the equilibrium cutoff.
    Cutoff(CutoffArgs),
    /// Compare algorithms across scenarios (and training ratios).
    Compare(CompareArgs),
    /// Search for the optimal variable hierarchy.
    Hierarchy(HierarchyArgs),
    /// Render the mean classification performance matrix.
    Report(CommonArgs),
}

#[derive(Debug, Args, Default, Clone)]
pub struct CommonArgs {
    /// Data CSV path (falls back to DDSBENCH_DATA, then the config file).
    #[arg(long)]
    pub data: Option<PathBuf>,

    /// JSON config file; every field can be overridden by a flag.
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Column mapping overrides, canonical=header (repeatable).
    #[arg(long = "column", value_name = "CANONICAL=HEADER")]
    pub columns: Vec<String>,

    /// prop-prop | eq-prop | prop-eq | eq-eq | all
    #[arg(long)]
    pub scenario: Option<String>,

    /// Training ratio in (0, 1).
    #[arg(long)]
    pub tau: Option<f64>,

    /// Simulations per sampling distribution.
    #[arg(long)]
    pub sims: Option<usize>,

    /// Master seed; every stream derives from it.
    #[arg(long)]
    pub seed: Option<u64>,

    /// all | male | female
    #[arg(long)]
    pub sex: Option<String>,

    /// Variable subset, comma-separated 1-based indices (e.g. 1,2,4).
    #[arg(long, value_delimiter = ',')]
    pub vars: Option<Vec<usize>>,

    /// Output root; each run gets a timestamped subdirectory.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Worker thread cap (default: machine parallelism).
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CutoffArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// logistic | forest | both
    #[arg(long)]
    pub model: Option<String>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Algorithms, comma-separated (xgb,svm,rf,logit,ld,qd,dds1,dds2) or "all".
    #[arg(long, value_delimiter = ',')]
    pub algos: Option<Vec<String>>,

    /// Training-ratio grid for the ratio study, comma-separated.
    #[arg(long = "tau-list", value_delimiter = ',')]
    pub tau_list: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct HierarchyArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Algorithm whose hierarchy is searched.
    #[arg(long)]
    pub algo: Option<String>,

    /// tpr | tnr | acc | pprec
    #[arg(long)]
    pub metric: Option<String>,

    /// Score all 2^p - 1 subsets instead of the greedy search.
    #[arg(long)]
    pub exhaustive: bool,
}

/// JSON config file schema; flags override any field.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub data: Option<PathBuf>,
    pub columns: Option<HashMap<String, String>>,
    pub scenario: Option<String>,
    pub tau: Option<f64>,
    pub tau_list: Option<Vec<f64>>,
    pub algos: Option<Vec<String>>,
    pub sims: Option<usize>,
    pub seed: Option<u64>,
    pub metric: Option<String>,
    pub sex: Option<String>,
    pub vars: Option<Vec<usize>>,
    pub exhaustive: Option<bool>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub model: Option<String>,
}

/// Failure classes with distinct exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Invalid configuration; all problems reported together.
    Config(Vec<String>),
    Data(Error),
    Compute(Error),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Compute(_) => 4,
            CliError::Io(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(problems) => {
                writeln!(f, "configuration invalid:")?;
                for p in problems {
                    writeln!(f, "  - {p}")?;
                }
                Ok(())
            }
            CliError::Data(e) => write!(f, "data error: {e}"),
            CliError::Compute(e) => write!(f, "computation error: {e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Fully resolved settings for one invocation.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub data: Option<PathBuf>,
    #[serde(skip)]
    pub columns: ColumnMap,
    pub scenarios: Vec<Scenario>,
    pub tau: f64,
    pub tau_list: Option<Vec<f64>>,
    pub algorithms: Vec<Algorithm>,
    pub n_sims: usize,
    pub master_seed: u64,
    pub metric: Metric,
    pub sex: SexFilter,
    pub vars: Option<Vec<usize>>,
    pub exhaustive: bool,
    pub out_root: PathBuf,
    pub workers: Option<usize>,
    pub models: Vec<ModelKind>,
}

fn parse_scenarios(raw: &str, problems: &mut Vec<String>) -> Vec<Scenario> {
    if raw.eq_ignore_ascii_case("all") {
        return Scenario::ALL.to_vec();
    }
    match raw.parse::<Scenario>() {
        Ok(s) => vec![s],
        Err(e) => {
            problems.push(e);
            vec![]
        }
    }
}

fn parse_algorithms(raw: &[String], problems: &mut Vec<String>) -> Vec<Algorithm> {
    if raw.len() == 1 && raw[0].eq_ignore_ascii_case("all") {
        return Algorithm::ALL.to_vec();
    }
    let mut out = Vec::new();
    for token in raw {
        match token.parse::<Algorithm>() {
            Ok(a) => out.push(a),
            Err(e) => problems.push(e),
        }
    }
    out
}

fn parse_models(raw: &str, problems: &mut Vec<String>) -> Vec<ModelKind> {
    if raw.eq_ignore_ascii_case("both") || raw.eq_ignore_ascii_case("all") {
        return vec![ModelKind::Logistic, ModelKind::Forest];
    }
    match raw.parse::<ModelKind>() {
        Ok(m) => vec![m],
        Err(e) => {
            problems.push(e);
            vec![]
        }
    }
}

/// Merge file config, environment and flags (flags win) and validate;
/// every problem is reported, not just the first.
pub fn resolve(
    common: &CommonArgs,
    algos: Option<&[String]>,
    tau_list: Option<&[f64]>,
    model: Option<&str>,
    algo: Option<&str>,
    metric: Option<&str>,
    exhaustive: bool,
    default_sims: usize,
) -> CliResult<RunConfig> {
    let mut problems = Vec::new();

    let file: FileConfig = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::Config(vec![format!("cannot read config {}: {e}", path.display())])
            })?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Config(vec![format!("config JSON invalid: {e}")]))?
        }
        None => FileConfig::default(),
    };

    let data = common
        .data
        .clone()
        .or_else(|| std::env::var(DATA_ENV).ok().map(PathBuf::from))
        .or(file.data);

    let mut column_overrides: HashMap<String, String> = file.columns.unwrap_or_default();
    for pair in &common.columns {
        match pair.split_once('=') {
            Some((canonical, header)) => {
                column_overrides.insert(canonical.trim().into(), header.trim().into());
            }
            None => problems.push(format!("--column {pair:?} is not CANONICAL=HEADER")),
        }
    }
    let columns = match ColumnMap::default().with_overrides(&column_overrides) {
        Ok(c) => c,
        Err(e) => {
            problems.push(format!("column mapping: {e}"));
            ColumnMap::default()
        }
    };

    let scenario_raw = common
        .scenario
        .clone()
        .or(file.scenario)
        .unwrap_or_else(|| "all".into());
    let scenarios = parse_scenarios(&scenario_raw, &mut problems);

    let tau = common.tau.or(file.tau).unwrap_or(0.8);
    if !(tau > 0.0 && tau < 1.0) {
        problems.push(format!("tau {tau} outside (0, 1)"));
    }
    let tau_list: Option<Vec<f64>> = tau_list.map(<[f64]>::to_vec).or(file.tau_list);
    if let Some(list) = &tau_list {
        for &t in list {
            if !(t > 0.0 && t < 1.0) {
                problems.push(format!("tau-list entry {t} outside (0, 1)"));
            }
        }
        if list.is_empty() {
            problems.push("tau-list is empty".into());
        }
    }

    let algorithms = match (algos, algo) {
        (Some(list), _) => parse_algorithms(list, &mut problems),
        (None, Some(single)) => parse_algorithms(&[single.to_string()], &mut problems),
        (None, None) => match &file.algos {
            Some(list) => parse_algorithms(list, &mut problems),
            None => Algorithm::ALL.to_vec(),
        },
    };
    if algorithms.is_empty() && problems.is_empty() {
        problems.push("algorithm list is empty".into());
    }

    let n_sims = common.sims.or(file.sims).unwrap_or(default_sims);
    if n_sims == 0 {
        problems.push("sims must be at least 1".into());
    }

    let metric = match metric.map(str::to_string).or(file.metric) {
        Some(raw) => raw.parse::<Metric>().unwrap_or_else(|e| {
            problems.push(e);
            Metric::Tpr
        }),
        None => Metric::Tpr,
    };

    let sex = match common.sex.clone().or(file.sex) {
        Some(raw) => raw.parse::<SexFilter>().unwrap_or_else(|e| {
            problems.push(e);
            SexFilter::All
        }),
        None => SexFilter::All,
    };

    let vars = common.vars.clone().or(file.vars);
    if let Some(v) = &vars {
        if v.is_empty() {
            problems.push("vars is empty".into());
        }
        for &idx in v {
            if !(1..=7).contains(&idx) {
                problems.push(format!("variable index {idx} outside 1..=7"));
            }
        }
    }

    let models = match model.map(str::to_string).or(file.model) {
        Some(raw) => parse_models(&raw, &mut problems),
        None => vec![ModelKind::Logistic, ModelKind::Forest],
    };

    let workers = common.workers.or(file.workers);
    if workers == Some(0) {
        problems.push("workers must be at least 1".into());
    }

    if !problems.is_empty() {
        return Err(CliError::Config(problems));
    }

    Ok(RunConfig {
        data,
        columns,
        scenarios,
        tau,
        tau_list,
        algorithms,
        n_sims,
        master_seed: common.seed.or(file.seed).unwrap_or(20240622),
        metric,
        sex,
        vars,
        exhaustive: exhaustive || file.exhaustive.unwrap_or(false),
        out_root: common
            .out
            .clone()
            .or(file.out)
            .unwrap_or_else(|| PathBuf::from("runs")),
        workers,
        models,
    })
}

fn classify_error(e: Error, during_ingest: bool) -> CliError {
    if during_ingest {
        CliError::Data(e)
    } else {
        CliError::Compute(e)
    }
}

fn load_data(config: &RunConfig) -> CliResult<(Dataset, PathBuf)> {
    let path = config.data.clone().ok_or_else(|| {
        CliError::Config(vec![format!(
            "no data path: pass --data, set {DATA_ENV}, or put \"data\" in the config file"
        )])
    })?;
    let dataset = ingest_csv(&path, &config.columns).map_err(|e| classify_error(e, true))?;
    if dataset.n() == 0 {
        return Err(CliError::Data(Error::EmptyDataset));
    }
    Ok((dataset, path))
}

fn init_workers(config: &RunConfig) {
    if let Some(w) = config.workers {
        // ignore the error when a global pool already exists (tests)
        let _ = rayon::ThreadPoolBuilder::new().num_threads(w).build_global();
    }
}

/// Timestamped run directory under the output root; never clobbers.
fn make_run_dir(root: &Path, command: &str) -> CliResult<PathBuf> {
    let stamp = chrono::Utc::now().format("%Y%m%d-%H%M%S");
    let mut dir = root.join(format!("{command}-{stamp}"));
    let mut suffix = 1;
    while dir.exists() {
        suffix += 1;
        dir = root.join(format!("{command}-{stamp}-{suffix}"));
    }
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

#[derive(Serialize)]
struct DatasetSummary {
    path: String,
    n: usize,
    n1: usize,
    n2: usize,
    prevalence: f64,
    fingerprint: String,
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    created_utc: String,
    config: &'a RunConfig,
    dataset: Option<DatasetSummary>,
    outputs: Vec<String>,
    notes: Vec<String>,
    exclusions: serde_json::Value,
}

/// Manifest note pinning the size-formula convention against the two
/// deviating printed table cells.
pub const ROUNDING_NOTE: &str = "split sizes follow the rounding-half-away formulas; two printed \
     cells of the study's size tables (overall prop-training n2=2819, male eq-prop n2=1165) \
     differ from the formula values (2816 and 270) and are not imitated";

fn write_manifest(dir: &Path, manifest: &Manifest) -> CliResult<()> {
    let text = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    std::fs::write(dir.join("manifest.json"), text)?;
    Ok(())
}

fn summarize(dataset: &Dataset, path: &Path) -> DatasetSummary {
    DatasetSummary {
        path: path.display().to_string(),
        n: dataset.n(),
        n1: dataset.n1(),
        n2: dataset.n2(),
        prevalence: dataset.prevalence().unwrap_or(0.0),
        fingerprint: dataset.fingerprint(),
    }
}

fn csv_writer(path: &Path) -> CliResult<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).map_err(|e| CliError::Compute(Error::Csv(e)))
}

fn finish_csv(mut w: csv::Writer<std::fs::File>) -> CliResult<()> {
    w.flush()?;
    Ok(())
}

fn write_record(
    w: &mut csv::Writer<std::fs::File>,
    record: &[String],
) -> CliResult<()> {
    w.write_record(record)
        .map_err(|e| CliError::Compute(Error::Csv(e)))
}

/// `ingest`: counts and prevalence, overall and per sex.
pub fn cmd_ingest(common: &CommonArgs) -> CliResult<i32> {
    let config = resolve(common, None, None, None, None, None, false, 100)?;
    init_workers(&config);
    let (dataset, path) = load_data(&config)?;

    let scoped = config.sex.apply(&dataset);
    if scoped.n() == 0 {
        return Err(CliError::Data(Error::EmptyDataset));
    }
    let line = |d: &Dataset| -> String {
        format!(
            "N={} N1={} N2={} prevalence={:.2}%",
            d.n(),
            d.n1(),
            d.n2(),
            100.0 * d.prevalence().unwrap_or(0.0)
        )
    };
    println!("{}", line(&scoped));
    if matches!(config.sex, SexFilter::All) {
        let male = dataset.filter_by_sex(Sex::Male);
        let female = dataset.filter_by_sex(Sex::Female);
        if male.n() > 0 {
            println!("male: {}", line(&male));
        }
        if female.n() > 0 {
            println!("female: {}", line(&female));
        }
    }

    let dir = make_run_dir(&config.out_root, "ingest")?;
    write_manifest(
        &dir,
        &Manifest {
            command: "ingest",
            created_utc: chrono::Utc::now().to_rfc3339(),
            config: &config,
            dataset: Some(summarize(&dataset, &path)),
            outputs: vec![],
            notes: vec![
                "dataset counts above are the ingested complete-case counts; any deviation \
                 from previously published counts is visible here rather than forced"
                    .into(),
            ],
            exclusions: serde_json::Value::Null,
        },
    )?;
    println!("manifest: {}", dir.join("manifest.json").display());
    Ok(0)
}

/// `cutoff`: curve sweeps and equilibrium summary per model x scenario.
pub fn cmd_cutoff(args: &CutoffArgs) -> CliResult<i32> {
    let config = resolve(
        &args.common,
        None,
        None,
        args.model.as_deref(),
        None,
        None,
        false,
        100,
    )?;
    init_workers(&config);
    let (dataset, path) = load_data(&config)?;
    let scoped = config.sex.apply(&dataset);

    let dir = make_run_dir(&config.out_root, "cutoff")?;
    let mut outputs = Vec::new();

    let summary_path = dir.join("equilibrium.csv");
    let mut summary = csv_writer(&summary_path)?;
    let mut header = vec![
        "model".to_string(),
        "scenario".to_string(),
        "tau".to_string(),
        "sims".to_string(),
        "failed".to_string(),
        "equilibrium_cutoff".to_string(),
    ];
    for (a, b) in CURVE_PAIRS {
        header.push(format!("{a}_{b}_x"));
        header.push(format!("{a}_{b}_y"));
    }
    write_record(&mut summary, &header)?;

    for &model in &config.models {
        for &scenario in &config.scenarios {
            let (sampling, curves) = equilibrium_sampling(
                &scoped,
                scenario,
                config.tau,
                model,
                config.n_sims,
                config.master_seed,
                true,
            )
            .map_err(|e| classify_error(e, false))?;

            let model_name = match model {
                ModelKind::Logistic => "logistic",
                ModelKind::Forest => "forest",
            };
            println!(
                "{model_name} {} tau={} -> equilibrium cutoff {:.2}% ({} sims, {} failed)",
                scenario.cli_name(),
                config.tau,
                100.0 * sampling.equilibrium_cutoff,
                config.n_sims,
                sampling.failures.len()
            );

            let curve_name = format!("curves-{model_name}-{}.csv", scenario.cli_name());
            let curve_path = dir.join(&curve_name);
            let mut curve_csv = csv_writer(&curve_path)?;
            write_record(
                &mut curve_csv,
                &["sim", "cutoff", "tp", "fp", "fn", "tn"].map(String::from),
            )?;
            for sim in &curves {
                for (i, &c) in sim.curves.grid.iter().enumerate() {
                    write_record(
                        &mut curve_csv,
                        &[
                            sim.sim.to_string(),
                            format!("{c}"),
                            format!("{}", sim.curves.tp[i]),
                            format!("{}", sim.curves.fp[i]),
                            format!("{}", sim.curves.fn_[i]),
                            format!("{}", sim.curves.tn[i]),
                        ],
                    )?;
                }
            }
            finish_csv(curve_csv)?;
            outputs.push(curve_name);

            let mut row = vec![
                model_name.to_string(),
                scenario.cli_name().to_string(),
                format!("{}", config.tau),
                config.n_sims.to_string(),
                sampling.failures.len().to_string(),
                format!("{}", sampling.equilibrium_cutoff),
            ];
            for point in sampling.mean_pair_points {
                match point {
                    Some((x, y)) => {
                        row.push(format!("{x}"));
                        row.push(format!("{y}"));
                    }
                    None => {
                        row.push(String::new());
                        row.push(String::new());
                    }
                }
            }
            write_record(&mut summary, &row)?;
        }
    }
    finish_csv(summary)?;
    outputs.push("equilibrium.csv".into());

    write_manifest(
        &dir,
        &Manifest {
            command: "cutoff",
            created_utc: chrono::Utc::now().to_rfc3339(),
            config: &config,
            dataset: Some(summarize(&dataset, &path)),
            outputs,
            notes: vec![ROUNDING_NOTE.into()],
            exclusions: serde_json::Value::Null,
        },
    )?;
    println!("outputs in {}", dir.display());
    Ok(0)
}

fn performance_row(
    algo: Algorithm,
    scenario: Scenario,
    tau: f64,
    mean: &PerformanceMatrix,
    n: usize,
    excluded: &[usize; 7],
) -> Vec<String> {
    let mut row = vec![
        algo.name().to_string(),
        scenario.cli_name().to_string(),
        format!("{tau}"),
        n.to_string(),
    ];
    row.extend(mean.csv_cells());
    row.push(excluded.iter().map(usize::to_string).collect::<Vec<_>>().join("|"));
    row
}

/// `compare`: Table-5-style CSV, one row per algorithm x scenario x tau.
pub fn cmd_compare(args: &CompareArgs) -> CliResult<i32> {
    let config = resolve(
        &args.common,
        args.algos.as_deref(),
        args.tau_list.as_deref(),
        None,
        None,
        None,
        false,
        100,
    )?;
    init_workers(&config);
    let (dataset, path) = load_data(&config)?;

    let dir = make_run_dir(&config.out_root, "compare")?;
    let csv_path = dir.join("compare.csv");
    let mut w = csv_writer(&csv_path)?;
    let mut header = vec![
        "algorithm".to_string(),
        "scenario".to_string(),
        "tau".to_string(),
        "sims".to_string(),
    ];
    header.extend(PerformanceMatrix::csv_header());
    header.push("excluded".into());
    write_record(&mut w, &header)?;

    let taus: Vec<f64> = config.tau_list.clone().unwrap_or_else(|| vec![config.tau]);
    let mut exclusions = serde_json::Map::new();
    for &scenario in &config.scenarios {
        let spec = ExperimentSpec {
            sex: config.sex,
            scenario,
            tau: config.tau,
            algorithms: config.algorithms.clone(),
            vars: config.vars.clone(),
            n_sims: config.n_sims,
            master_seed: config.master_seed,
        };
        let points = ratio_study(&dataset, &spec, &taus).map_err(|e| classify_error(e, false))?;
        for point in points {
            write_record(
                &mut w,
                &performance_row(
                    point.algorithm,
                    scenario,
                    point.tau,
                    &point.mean.mean,
                    point.mean.n,
                    &point.mean.excluded,
                ),
            )?;
            if point.mean.n < config.n_sims {
                exclusions.insert(
                    format!("{}-{}-{}", point.algorithm.name(), scenario.cli_name(), point.tau),
                    serde_json::json!(config.n_sims - point.mean.n),
                );
            }
        }
    }
    finish_csv(w)?;

    write_manifest(
        &dir,
        &Manifest {
            command: "compare",
            created_utc: chrono::Utc::now().to_rfc3339(),
            config: &config,
            dataset: Some(summarize(&dataset, &path)),
            outputs: vec!["compare.csv".into()],
            notes: vec![ROUNDING_NOTE.into()],
            exclusions: serde_json::Value::Object(exclusions),
        },
    )?;
    println!("outputs in {}", dir.display());
    Ok(0)
}

/// `hierarchy`: greedy trace (default) or exhaustive ranking.
pub fn cmd_hierarchy(args: &HierarchyArgs) -> CliResult<i32> {
    let config = resolve(
        &args.common,
        None,
        None,
        None,
        Some(args.algo.as_deref().unwrap_or("dds1")),
        args.metric.as_deref(),
        args.exhaustive,
        1000,
    )?;
    init_workers(&config);
    let (dataset, path) = load_data(&config)?;

    let dir = make_run_dir(&config.out_root, "hierarchy")?;
    let mut outputs = Vec::new();

    for &scenario in &config.scenarios {
        let search = SearchConfig {
            sex: config.sex,
            scenario,
            tau: config.tau,
            algorithm: config.algorithms[0],
            metric: config.metric,
            n_sims: config.n_sims,
            master_seed: config.master_seed,
        };
        if config.exhaustive {
            let ranked =
                exhaustive_search(&dataset, &search).map_err(|e| classify_error(e, false))?;
            let name = format!("exhaustive-{}.csv", scenario.cli_name());
            let mut w = csv_writer(&dir.join(&name))?;
            write_record(
                &mut w,
                &["rank", "vars", "mean_metric", "sims"].map(String::from),
            )?;
            for (rank, score) in ranked.iter().enumerate() {
                write_record(
                    &mut w,
                    &[
                        (rank + 1).to_string(),
                        score
                            .vars
                            .iter()
                            .map(usize::to_string)
                            .collect::<Vec<_>>()
                            .join(","),
                        format!("{}", score.mean_metric),
                        score.n_sims.to_string(),
                    ],
                )?;
            }
            finish_csv(w)?;
            let top = &ranked[0];
            println!(
                "{} exhaustive top subset ({}): ({}) mean {} = {:.2}%",
                scenario.cli_name(),
                ranked.len(),
                top.vars
                    .iter()
                    .map(usize::to_string)
                    .collect::<Vec<_>>()
                    .join(","),
                config.metric.name(),
                100.0 * top.mean_metric
            );
            outputs.push(name);
        } else {
            let trace = greedy_search(&dataset, &search).map_err(|e| classify_error(e, false))?;
            let name = format!("greedy-{}.csv", scenario.cli_name());
            let mut w = csv_writer(&dir.join(&name))?;
            write_record(
                &mut w,
                &["step", "variable", "mean_metric", "evaluations"].map(String::from),
            )?;
            for (step, (&var, &score)) in
                trace.order.iter().zip(&trace.prefix_scores).enumerate()
            {
                write_record(
                    &mut w,
                    &[
                        (step + 1).to_string(),
                        format!("X{var}"),
                        format!("{score}"),
                        trace.evaluations.to_string(),
                    ],
                )?;
            }
            finish_csv(w)?;
            let json_name = format!("greedy-{}.json", scenario.cli_name());
            std::fs::write(
                dir.join(&json_name),
                serde_json::to_string_pretty(&trace).expect("trace serializes"),
            )?;
            let mut order = String::new();
            for (i, v) in trace.order.iter().enumerate() {
                if i > 0 {
                    order.push(',');
                }
                let _ = write!(order, "{v}");
            }
            println!(
                "{} greedy order ({order}) stopped: {:?}, {} evaluations",
                scenario.cli_name(),
                trace.stopped_because,
                trace.evaluations
            );
            outputs.push(name);
            outputs.push(json_name);
        }
    }

    write_manifest(
        &dir,
        &Manifest {
            command: "hierarchy",
            created_utc: chrono::Utc::now().to_rfc3339(),
            config: &config,
            dataset: Some(summarize(&dataset, &path)),
            outputs,
            notes: vec![ROUNDING_NOTE.into()],
            exclusions: serde_json::Value::Null,
        },
    )?;
    println!("outputs in {}", dir.display());
    Ok(0)
}

/// `report`: mean classification performance matrix for the six-variable
/// double-discriminant model under equal training / proportional testing.
pub fn cmd_report(common: &CommonArgs) -> CliResult<i32> {
    let mut common = common.clone();
    if common.scenario.is_none() {
        common.scenario = Some("eq-prop".into());
    }
    let config = resolve(&common, None, None, None, Some("dds1"), None, false, 1000)?;
    init_workers(&config);
    let (dataset, path) = load_data(&config)?;

    let vars = config.vars.clone().unwrap_or_else(|| vec![1, 2, 4, 5, 6, 7]);
    let dir = make_run_dir(&config.out_root, "report")?;
    let mut outputs = Vec::new();

    for &scenario in &config.scenarios {
        let spec = ExperimentSpec {
            sex: config.sex,
            scenario,
            tau: config.tau,
            algorithms: vec![config.algorithms[0]],
            vars: Some(vars.clone()),
            n_sims: config.n_sims,
            master_seed: config.master_seed,
        };
        let result = run(&dataset, &spec).map_err(|e| classify_error(e, false))?;
        let mean = &result.means[&config.algorithms[0]];
        let table = mean.mean.render_table();
        println!("{} ({} sims):", scenario.cli_name(), mean.n);
        println!("{table}");

        let base = format!("matrix-{}", scenario.cli_name());
        std::fs::write(dir.join(format!("{base}.txt")), &table)?;
        let mut w = csv_writer(&dir.join(format!("{base}.csv")))?;
        let mut header = vec!["sims".to_string()];
        header.extend(PerformanceMatrix::csv_header());
        write_record(&mut w, &header)?;
        let mut row = vec![mean.n.to_string()];
        row.extend(mean.mean.csv_cells());
        write_record(&mut w, &row)?;
        finish_csv(w)?;
        outputs.push(format!("{base}.txt"));
        outputs.push(format!("{base}.csv"));
    }

    write_manifest(
        &dir,
        &Manifest {
            command: "report",
            created_utc: chrono::Utc::now().to_rfc3339(),
            config: &config,
            dataset: Some(summarize(&dataset, &path)),
            outputs,
            notes: vec![ROUNDING_NOTE.into()],
            exclusions: serde_json::Value::Null,
        },
    )?;
    println!("outputs in {}", dir.display());
    Ok(0)
}

/// Dispatch a parsed command line; the returned code is the process exit.
pub fn execute(cli: &Cli) -> CliResult<i32> {
    match &cli.command {
        Command::Ingest(common) => cmd_ingest(common),
        Command::Cutoff(args) => cmd_cutoff(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Hierarchy(args) => cmd_hierarchy(args),
        Command::Report(common) => cmd_report(common),
    }
}

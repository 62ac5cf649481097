//! Experiment commands behind the `simbias` binary.
//!
//! Each command takes a typed configuration and writes its artifacts
//! atomically (temp file + rename). Every output echoes the configuration and
//! seed that produced it, so re-running with the same inputs reproduces the
//! files byte for byte.
//!
//! Files written by [`cmd_simulate`] into the output directory:
//!
//! - `dataset.csv`: `pattern,count,probability,c_lz,k_tilde`
//! - `scale.json`: the [`ComplexityScale`] used for `k_tilde`
//! - `run.json`: the [`ExperimentConfig`] plus sample summary

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complexity::{ComplexityScale, MaxMethod};
use crate::error::{Error, Result};
use crate::estimator::{
    bias_metrics, build_dataset, fit_upper_bound, sample_distribution_sharded, BinPoint, Dataset, FitOptions,
    DEFAULT_SAMPLES, DEFAULT_SHARD_SIZE,
};
use crate::induction::{compare_predictors, PredictionReport, RunScenario};
use crate::map_engine::{BoundaryPolicy, MapParams};

/// Environment variable holding the sweep worker budget.
pub const WORKERS_ENV: &str = "SIMBIAS_WORKERS";

pub const DATASET_FILE: &str = "dataset.csv";
pub const SCALE_FILE: &str = "scale.json";
pub const RUN_FILE: &str = "run.json";
pub const FIT_FILE: &str = "fit.json";
pub const SUMMARY_FILE: &str = "summary.csv";

/// Where the maximum `C_LZ` for `K~` comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    #[default]
    Corpus,
    Exhaustive,
}

impl Normalization {
    pub fn method(self) -> MaxMethod {
        match self {
            Normalization::Corpus => MaxMethod::default_corpus(),
            Normalization::Exhaustive => MaxMethod::Exhaustive,
        }
    }
}

impl std::str::FromStr for Normalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "corpus" => Ok(Normalization::Corpus),
            "exhaustive" => Ok(Normalization::Exhaustive),
            other => Err(Error::Config(format!("unknown normalization {other:?}"))),
        }
    }
}

/// Everything needed to regenerate one dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub params: MapParams,
    pub samples: u64,
    pub seed: u64,
    pub shard_size: u64,
    pub normalization: Normalization,
    pub fit: FitOptions,
}

impl ExperimentConfig {
    pub fn new(params: MapParams) -> Self {
        ExperimentConfig {
            params,
            samples: DEFAULT_SAMPLES,
            seed: 0,
            shard_size: DEFAULT_SHARD_SIZE,
            normalization: Normalization::default(),
            fit: FitOptions::default(),
        }
    }

    pub fn samples(mut self, samples: u64) -> Self {
        self.samples = samples;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn normalization(mut self, norm: Normalization) -> Self {
        self.normalization = norm;
        self
    }

    pub fn fit(mut self, fit: FitOptions) -> Self {
        self.fit = fit;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::Config("samples must be at least 1".into()));
        }
        if self.shard_size == 0 {
            return Err(Error::Config("shard size must be at least 1".into()));
        }
        if self.params.len() < 2 {
            return Err(Error::Config("complexity analysis needs n >= 2".into()));
        }
        Ok(())
    }
}

/// Contents of `run.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub tool: String,
    pub version: String,
    pub config: ExperimentConfig,
    pub total_samples: u64,
    pub distinct_patterns: usize,
}

/// Samples, scores and analyzes one configuration in memory.
pub fn run_experiment(config: &ExperimentConfig) -> Result<(Dataset, ComplexityScale)> {
    config.validate()?;
    let table = sample_distribution_sharded(&config.params, config.samples, config.seed, config.shard_size)?;
    let scale = ComplexityScale::cached(config.params.len(), config.normalization.method())?;
    let dataset = build_dataset(&table, &scale)?;
    Ok((dataset, scale))
}

#[derive(Debug, Clone)]
pub struct SimulateOutput {
    pub dataset: Dataset,
    pub scale: ComplexityScale,
    pub dataset_path: PathBuf,
    pub scale_path: PathBuf,
    pub run_path: PathBuf,
}

/// Runs one experiment and writes `dataset.csv`, `scale.json` and
/// `run.json` into `out_dir`.
pub fn cmd_simulate(config: &ExperimentConfig, out_dir: &Path) -> Result<SimulateOutput> {
    let (dataset, scale) = run_experiment(config)?;
    fs::create_dir_all(out_dir)?;

    let mut csv = Vec::new();
    dataset.write_csv(&mut csv)?;
    let dataset_path = out_dir.join(DATASET_FILE);
    write_atomic(&dataset_path, &csv)?;

    let scale_path = out_dir.join(SCALE_FILE);
    write_json(&scale_path, &scale)?;

    let record = RunRecord {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        total_samples: dataset.total_samples,
        distinct_patterns: dataset.len(),
    };
    let run_path = out_dir.join(RUN_FILE);
    write_json(&run_path, &record)?;

    Ok(SimulateOutput {
        dataset,
        scale,
        dataset_path,
        scale_path,
        run_path,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceBound {
    pub a: f64,
    pub b: f64,
}

/// Contents of `fit.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub slope: Option<f64>,
    pub slope_log10: Option<f64>,
    pub intercept: Option<f64>,
    pub bin_width: f64,
    pub bins: Vec<BinPoint>,
    pub fit_method: Option<String>,
    pub fit_error: Option<String>,
    pub entropy_bits: f64,
    pub distinct_patterns: usize,
    pub max_probability: f64,
    pub spearman_rho: Option<f64>,
    pub reference_bound: ReferenceBound,
    pub total_samples: u64,
    pub params: Option<MapParams>,
    pub seed: Option<u64>,
    pub samples: Option<u64>,
}

/// Fits the envelope and computes bias metrics for an in-memory dataset.
///
/// A failed fit is reported in `fit_error`; the metrics are still filled in.
pub fn analyze_dataset(dataset: &Dataset, fit: &FitOptions, run: Option<&RunRecord>) -> Result<AnalysisReport> {
    let metrics = bias_metrics(dataset)?;
    let (slope, slope_log10, intercept, bins, method, fit_error) = match fit_upper_bound(dataset, fit) {
        Ok(f) => (
            Some(f.slope),
            Some(f.slope_log10()),
            Some(f.intercept),
            f.bin_points,
            Some(f.method),
            None,
        ),
        Err(Error::Fit(msg)) => (None, None, None, Vec::new(), None, Some(msg)),
        Err(e) => return Err(e),
    };
    Ok(AnalysisReport {
        slope,
        slope_log10,
        intercept,
        bin_width: fit.bin_width,
        bins,
        fit_method: method,
        fit_error,
        entropy_bits: metrics.entropy_bits,
        distinct_patterns: metrics.distinct_patterns,
        max_probability: metrics.max_probability,
        spearman_rho: metrics.spearman_rho,
        reference_bound: ReferenceBound { a: 1.0, b: 0.0 },
        total_samples: dataset.total_samples,
        params: run.map(|r| r.config.params),
        seed: run.map(|r| r.config.seed),
        samples: run.map(|r| r.config.samples),
    })
}

/// Reads a dataset CSV (and its sibling `run.json`, if any) and writes the
/// analysis JSON to `out`.
pub fn cmd_analyze(dataset_path: &Path, fit: &FitOptions, out: &Path) -> Result<AnalysisReport> {
    let dataset = Dataset::read_csv(fs::File::open(dataset_path)?)?;
    if dataset.is_empty() {
        return Err(Error::Parse(format!("{} holds no rows", dataset_path.display())));
    }
    let run_path = dataset_path.with_file_name(RUN_FILE);
    let run: Option<RunRecord> = if run_path.exists() {
        Some(serde_json::from_slice(&fs::read(&run_path)?)?)
    } else {
        None
    };
    let report = analyze_dataset(&dataset, fit, run.as_ref())?;
    write_json(out, &report)?;
    Ok(report)
}

/// Cartesian grid over map parameters; everything else is shared.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub mus: Vec<f64>,
    pub epss: Vec<f64>,
    pub deltas: Vec<f64>,
    pub skips: Vec<usize>,
    pub n: usize,
    pub boundary_policy: BoundaryPolicy,
    pub samples: u64,
    pub seed: u64,
    pub normalization: Normalization,
    pub fit: FitOptions,
}

impl SweepConfig {
    pub fn cells(&self) -> Vec<SweepCell> {
        let mut cells = Vec::new();
        for &mu in &self.mus {
            for &eps in &self.epss {
                for &delta in &self.deltas {
                    for &skip in &self.skips {
                        cells.push(SweepCell { mu, eps, delta, skip });
                    }
                }
            }
        }
        cells
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub mu: f64,
    pub eps: f64,
    pub delta: f64,
    pub skip: usize,
}

impl SweepCell {
    pub fn dir_name(&self) -> String {
        format!("mu{}_eps{}_delta{}_skip{}", self.mu, self.eps, self.delta, self.skip)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellOutcome {
    pub cell: SweepCell,
    pub result: std::result::Result<AnalysisReport, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummary {
    pub outcomes: Vec<CellOutcome>,
    pub summary_path: PathBuf,
}

impl SweepSummary {
    pub fn failures(&self) -> usize {
        self.outcomes.iter().filter(|o| o.result.is_err()).count()
    }
}

/// Reads the worker budget from [`WORKERS_ENV`].
pub fn worker_budget_from_env() -> Option<usize> {
    std::env::var(WORKERS_ENV).ok()?.parse().ok().filter(|&w| w > 0)
}

/// Runs every grid cell into `out_dir/<cell>/` and writes `summary.csv`.
///
/// A failing cell is recorded in the summary and does not stop the sweep.
pub fn cmd_sweep(config: &SweepConfig, out_dir: &Path, workers: Option<usize>) -> Result<SweepSummary> {
    fs::create_dir_all(out_dir)?;
    let cells = config.cells();
    if cells.is_empty() {
        return Err(Error::Config("sweep grid is empty".into()));
    }
    let run_cells = || -> Vec<CellOutcome> {
        cells
            .par_iter()
            .map(|&cell| CellOutcome {
                cell,
                result: run_cell(config, cell, out_dir).map_err(|e| e.to_string()),
            })
            .collect()
    };
    let outcomes = match workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::Config(format!("cannot start {w} workers: {e}")))?
            .install(run_cells),
        None => run_cells(),
    };

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "mu",
        "eps",
        "delta",
        "skip",
        "status",
        "distinct_patterns",
        "entropy_bits",
        "max_probability",
        "spearman_rho",
        "slope",
        "slope_log10",
        "intercept",
        "error",
    ])?;
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for o in &outcomes {
        let c = o.cell;
        let head = [
            c.mu.to_string(),
            c.eps.to_string(),
            c.delta.to_string(),
            c.skip.to_string(),
        ];
        let tail = match &o.result {
            Ok(r) => [
                if r.fit_error.is_some() { "no-fit" } else { "ok" }.to_string(),
                r.distinct_patterns.to_string(),
                r.entropy_bits.to_string(),
                r.max_probability.to_string(),
                opt(r.spearman_rho),
                opt(r.slope),
                opt(r.slope_log10),
                opt(r.intercept),
                r.fit_error.clone().unwrap_or_default(),
            ],
            Err(e) => {
                let mut cols: [String; 9] = Default::default();
                cols[0] = "failed".into();
                cols[8] = e.clone();
                cols
            }
        };
        w.write_record(head.iter().chain(tail.iter()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    let summary_path = out_dir.join(SUMMARY_FILE);
    write_atomic(&summary_path, &bytes)?;
    Ok(SweepSummary { outcomes, summary_path })
}

fn run_cell(config: &SweepConfig, cell: SweepCell, out_dir: &Path) -> Result<AnalysisReport> {
    let params = MapParams::builder(cell.mu, cell.eps)
        .delta(cell.delta)
        .len(config.n)
        .transient_skip(cell.skip)
        .boundary_policy(config.boundary_policy)
        .build()?;
    let exp = ExperimentConfig {
        params,
        samples: config.samples,
        seed: config.seed,
        shard_size: DEFAULT_SHARD_SIZE,
        normalization: config.normalization,
        fit: config.fit,
    };
    let dir = out_dir.join(cell.dir_name());
    let sim = cmd_simulate(&exp, &dir)?;
    cmd_analyze(&sim.dataset_path, &config.fit, &dir.join(FIT_FILE))
}

/// Computes the predictor comparison and, if `out` is given, writes it as
/// JSON.
pub fn cmd_induct(scenario: &RunScenario, out: Option<&Path>) -> Result<PredictionReport> {
    let report = compare_predictors(scenario)?;
    if let Some(path) = out {
        write_json(path, &report)?;
    }
    Ok(report)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

/// Writes through a temp file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

//! Monte Carlo estimation of pattern probabilities and the complexity-probability
//! analysis built on top of them.
//!
//! Sampling is split into fixed-size shards. Shard `i` draws everything
//! (initial condition, dynamical noise, measurement noise) from
//! `RngStream::new(seed, i)`, and per-shard tables are merged by adding
//! counts. The result therefore depends on `(params, N, seed, shard_size)`
//! and not on how many threads ran the shards.

use std::collections::{BTreeMap, HashMap};
use std::io::{Read, Write};
use std::ops::Range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complexity::{c_lz, k_tilde_from_c, ComplexityScale};
use crate::error::{Error, Result};
use crate::map_engine::{iterate_into, sample_x0, MapParams, RngStream};
use crate::symbolizer::{digitize_values, perturb_in_place, SymbolString};

/// Default number of samples per shard.
pub const DEFAULT_SHARD_SIZE: u64 = 1 << 16;

/// Default Monte Carlo sample count.
pub const DEFAULT_SAMPLES: u64 = 1_000_000;

pub const CSV_HEADER: [&str; 5] = ["pattern", "count", "probability", "c_lz", "k_tilde"];

/// Counts of observed strings over `total_samples` draws.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyTable {
    params: MapParams,
    total_samples: u64,
    counts: HashMap<SymbolString, u64>,
}

impl FrequencyTable {
    pub fn new(params: MapParams) -> Self {
        FrequencyTable {
            params,
            total_samples: 0,
            counts: HashMap::new(),
        }
    }

    pub fn params(&self) -> &MapParams {
        &self.params
    }

    pub fn total_samples(&self) -> u64 {
        self.total_samples
    }

    pub fn counts(&self) -> &HashMap<SymbolString, u64> {
        &self.counts
    }

    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    pub fn count(&self, pattern: &SymbolString) -> u64 {
        self.counts.get(pattern).copied().unwrap_or(0)
    }

    pub fn record(&mut self, pattern: SymbolString) -> Result<()> {
        if pattern.len() != self.params.len() {
            return Err(Error::Domain(format!(
                "pattern {pattern} does not have length {}",
                self.params.len()
            )));
        }
        *self.counts.entry(pattern).or_insert(0) += 1;
        self.total_samples += 1;
        Ok(())
    }

    /// Adds the counts of `other`, which must come from the same parameters.
    pub fn merge(&mut self, other: FrequencyTable) -> Result<()> {
        if other.params != self.params {
            return Err(Error::Config(
                "cannot merge tables sampled with different parameters".into(),
            ));
        }
        self.total_samples += other.total_samples;
        for (pattern, count) in other.counts {
            *self.counts.entry(pattern).or_insert(0) += count;
        }
        Ok(())
    }
}

/// Samples `samples` trajectories with the default shard size.
pub fn sample_distribution(params: &MapParams, samples: u64, seed: u64) -> Result<FrequencyTable> {
    sample_distribution_sharded(params, samples, seed, DEFAULT_SHARD_SIZE)
}

/// Samples `samples` trajectories split into shards of `shard_size`.
pub fn sample_distribution_sharded(
    params: &MapParams,
    samples: u64,
    seed: u64,
    shard_size: u64,
) -> Result<FrequencyTable> {
    if samples == 0 {
        return Err(Error::Config("sample count must be at least 1".into()));
    }
    let shards = samples.div_ceil(shard_size.max(1));
    sample_shards(params, seed, 0..shards, samples, shard_size)
}

/// Samples the shards in `shards` of a run of `total` samples. Merging the
/// tables of disjoint ranges that cover the run gives the full run's table.
pub fn sample_shards(
    params: &MapParams,
    seed: u64,
    shards: Range<u64>,
    total: u64,
    shard_size: u64,
) -> Result<FrequencyTable> {
    if shard_size == 0 {
        return Err(Error::Config("shard size must be at least 1".into()));
    }
    shards
        .into_par_iter()
        .map(|shard| {
            let start = shard.saturating_mul(shard_size).min(total);
            let count = shard_size.min(total - start);
            sample_shard(params, seed, shard, count)
        })
        .try_reduce(
            || FrequencyTable::new(*params),
            |mut a, b| {
                a.merge(b)?;
                Ok(a)
            },
        )
}

/// `count` samples from stream `shard`.
pub fn sample_shard(params: &MapParams, seed: u64, shard: u64, count: u64) -> Result<FrequencyTable> {
    let mut rng = RngStream::new(seed, shard);
    let mut table = FrequencyTable::new(*params);
    let mut buf = Vec::with_capacity(params.len());
    for _ in 0..count {
        let x0 = sample_x0(&mut rng);
        iterate_into(params, x0, &mut rng, &mut buf)?;
        perturb_in_place(&mut buf, params.delta(), &mut rng);
        table.record(digitize_values(&buf)?)?;
    }
    Ok(table)
}

/// One observed pattern with its probability and complexity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetRow {
    pub pattern: SymbolString,
    pub count: u64,
    pub probability: f64,
    pub c_lz: f64,
    pub k_tilde: f64,
}

impl DatasetRow {
    pub fn log2_probability(&self) -> f64 {
        self.probability.log2()
    }
}

/// Rows sorted by descending probability, ties by ascending pattern value.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub total_samples: u64,
    pub rows: Vec<DatasetRow>,
}

pub fn build_dataset(ft: &FrequencyTable, scale: &ComplexityScale) -> Result<Dataset> {
    if scale.n != ft.params.len() {
        return Err(Error::Config(format!(
            "scale n = {} does not match table n = {}",
            scale.n,
            ft.params.len()
        )));
    }
    let total = ft.total_samples;
    let mut rows = ft
        .counts
        .iter()
        .map(|(&pattern, &count)| {
            let c = c_lz(&pattern)?;
            Ok(DatasetRow {
                pattern,
                count,
                probability: count as f64 / total as f64,
                c_lz: c,
                k_tilde: k_tilde_from_c(c, scale),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    sort_rows(&mut rows);
    Ok(Dataset {
        total_samples: total,
        rows,
    })
}

fn sort_rows(rows: &mut [DatasetRow]) {
    rows.sort_by(|a, b| b.count.cmp(&a.count).then(a.pattern.bits().cmp(&b.pattern.bits())));
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(CSV_HEADER)?;
        for row in &self.rows {
            w.write_record([
                row.pattern.to_string(),
                row.count.to_string(),
                sig17(row.probability),
                sig17(row.c_lz),
                sig17(row.k_tilde),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Parses the CSV written by [`Dataset::write_csv`]. The sample total is
    /// recovered as the sum of counts.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let header = r.headers()?.clone();
        for (i, expected) in CSV_HEADER.iter().enumerate() {
            match header.get(i) {
                Some(col) if col == *expected => {}
                Some(col) => {
                    return Err(Error::Parse(format!(
                        "column {} is {col:?}, expected {expected:?}",
                        i + 1
                    )))
                }
                None => return Err(Error::Parse(format!("missing column {expected:?}"))),
            }
        }
        if header.len() > CSV_HEADER.len() {
            return Err(Error::Parse(format!(
                "unexpected column {:?}",
                &header[CSV_HEADER.len()]
            )));
        }
        let mut rows = Vec::new();
        for (line, record) in r.records().enumerate() {
            let record = record?;
            let field = |i: usize| {
                record
                    .get(i)
                    .ok_or_else(|| Error::Parse(format!("row {}: missing {}", line + 1, CSV_HEADER[i])))
            };
            let num = |i: usize| -> Result<f64> {
                field(i)?
                    .parse()
                    .map_err(|e| Error::Parse(format!("row {}: {}: {e}", line + 1, CSV_HEADER[i])))
            };
            rows.push(DatasetRow {
                pattern: field(0)?.parse()?,
                count: field(1)?
                    .parse()
                    .map_err(|e| Error::Parse(format!("row {}: count: {e}", line + 1)))?,
                probability: num(2)?,
                c_lz: num(3)?,
                k_tilde: num(4)?,
            });
        }
        let total_samples = rows.iter().map(|r| r.count).sum();
        sort_rows(&mut rows);
        Ok(Dataset { total_samples, rows })
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub bin_width: f64,
    pub exclude_singletons: bool,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            bin_width: 1.0,
            exclude_singletons: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinPoint {
    pub k_center: f64,
    pub max_log2_p: f64,
}

/// Line through the per-bin maxima of `log2 P` against `K~`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundFit {
    pub slope: f64,
    pub intercept: f64,
    pub bin_width: f64,
    pub bin_points: Vec<BinPoint>,
    pub method: String,
}

impl BoundFit {
    /// Envelope value of `log2 P` at complexity `k`.
    pub fn log2_bound_at(&self, k: f64) -> f64 {
        self.slope * k + self.intercept
    }

    /// Slope expressed against `log10 P`, as read off a base-10 probability axis.
    pub fn slope_log10(&self) -> f64 {
        self.slope * std::f64::consts::LOG10_2
    }
}

/// Bins `K~` into `[i w, (i+1) w)`, keeps the largest `log2 P` per non-empty
/// bin and fits those points by ordinary least squares.
pub fn fit_upper_bound(ds: &Dataset, opts: &FitOptions) -> Result<BoundFit> {
    let w = opts.bin_width;
    if !(w > 0.0 && w.is_finite()) {
        return Err(Error::Config(format!("bin width must be positive, got {w}")));
    }
    let mut bins: BTreeMap<u64, f64> = BTreeMap::new();
    for row in ds.rows.iter().filter(|r| !(opts.exclude_singletons && r.count == 1)) {
        let idx = (row.k_tilde.max(0.0) / w).floor() as u64;
        let lp = row.log2_probability();
        bins.entry(idx).and_modify(|m| *m = m.max(lp)).or_insert(lp);
    }
    if bins.len() < 2 {
        return Err(Error::Fit(format!(
            "need at least 2 non-empty complexity bins, found {}",
            bins.len()
        )));
    }
    let bin_points: Vec<BinPoint> = bins
        .into_iter()
        .map(|(i, m)| BinPoint {
            k_center: (i as f64 + 0.5) * w,
            max_log2_p: m,
        })
        .collect();
    let (slope, intercept) = ols(bin_points.iter().map(|b| (b.k_center, b.max_log2_p)));
    let mut method = format!("binned-max-OLS/{w:?}");
    if opts.exclude_singletons {
        method.push_str("+no-singletons");
    }
    Ok(BoundFit {
        slope,
        intercept,
        bin_width: w,
        bin_points,
        method,
    })
}

fn ols(points: impl Iterator<Item = (f64, f64)> + Clone) -> (f64, f64) {
    let n = points.clone().count() as f64;
    let (sx, sy) = points.clone().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let (sxy, sxx) = points.fold((0.0, 0.0), |(a, b), (x, y)| {
        (a + (x - mx) * (y - my), b + (x - mx) * (x - mx))
    });
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// `2^(-a k - b)`.
pub fn bound_curve(a: f64, b: f64, k: f64) -> f64 {
    (-a * k - b).exp2()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiasMetrics {
    pub distinct_patterns: usize,
    pub entropy_bits: f64,
    pub max_probability: f64,
    /// Spearman correlation of `K~` with `log2 P`; `None` when either has no
    /// spread.
    pub spearman_rho: Option<f64>,
}

pub fn bias_metrics(ds: &Dataset) -> Result<BiasMetrics> {
    if ds.rows.is_empty() {
        return Err(Error::Domain("bias metrics need a non-empty dataset".into()));
    }
    let entropy_bits = -ds
        .rows
        .iter()
        .map(|r| r.probability * r.probability.log2())
        .sum::<f64>();
    let max_probability = ds.rows.iter().map(|r| r.probability).fold(0.0, f64::max);
    let ks: Vec<f64> = ds.rows.iter().map(|r| r.k_tilde).collect();
    let lps: Vec<f64> = ds.rows.iter().map(|r| r.log2_probability()).collect();
    Ok(BiasMetrics {
        distinct_patterns: ds.rows.len(),
        entropy_bits: entropy_bits.max(0.0),
        max_probability,
        spearman_rho: spearman(&ks, &lps),
    })
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Option<f64> {
    assert_eq!(xs.len(), ys.len());
    let rx = ranks(xs);
    let ry = ranks(ys);
    let n = xs.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut out = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = avg;
        }
        i = j + 1;
    }
    out
}

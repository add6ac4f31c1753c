//! Abstraction pipeline from raw series to symbolic series: weighted-mean
//! filtering, optional temporal reduction, min-max normalization, k-means
//! discretization of quantitative parameters, and temporal aggregation gated
//! by the symbol minimum distance.
//!
//! Aggregation collapses each longest prefix of near-constant discrete
//! vectors into one duration-stamped symbol, which is what later lets the
//! projection stage find motifs whose instances stretch in time.

use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::distances::{normalize, SymbolDistanceTable};
use crate::schema::{ParameterDomain, ParameterSchema, Series, Span, Stage, Value};
use crate::{derive_seed, Error, Result};

/// Knobs of the representation stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RepresentationConfig {
    /// Length of the centered triangular weighted-mean filter, in samples.
    /// Must be odd; 1 disables smoothing.
    pub filter_len: usize,
    /// Keep every k-th sample after filtering; 1 disables reduction.
    pub reduction_factor: usize,
    /// Number of discretization intervals fitted per quantitative parameter.
    pub k_per_param: usize,
    /// Maximum mindist tolerated between a window and its repeated aggregate.
    pub aggregation_threshold: f64,
    /// Seed for the k-means initialization.
    pub kmeans_seed: u64,
}

impl Default for RepresentationConfig {
    fn default() -> Self {
        Self {
            filter_len: 5,
            reduction_factor: 1,
            k_per_param: 4,
            aggregation_threshold: 0.0,
            kmeans_seed: 0,
        }
    }
}

impl RepresentationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.filter_len == 0 || self.filter_len % 2 == 0 {
            return Err(Error::InvalidConfig(format!(
                "filter_len {} must be odd",
                self.filter_len
            )));
        }
        if self.reduction_factor == 0 {
            return Err(Error::InvalidConfig("reduction_factor must be >= 1".into()));
        }
        if self.k_per_param < 2 {
            return Err(Error::InvalidConfig("k_per_param must be >= 2".into()));
        }
        if self.aggregation_threshold < 0.0 {
            return Err(Error::InvalidConfig(
                "aggregation_threshold must be >= 0".into(),
            ));
        }
        Ok(())
    }
}

/// A discretized series: every cell replaced by its 1-based interval or
/// alphabet code. Kept alongside the preprocessed series it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSeries {
    pub schema: Vec<ParameterSchema>,
    pub timestamps: Vec<f64>,
    pub codes: Vec<Vec<u32>>,
}

impl DiscreteSeries {
    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }
}

/// One aggregated symbol: a p-dimensional code vector holding for `duration`
/// seconds from `start_time`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Symbol {
    pub codes: Vec<u32>,
    pub start_time: f64,
    pub duration: f64,
}

/// Time-stamped sequence of aggregated symbols plus, per symbol, the span of
/// preprocessed samples it covers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolicSeries {
    #[serde(skip)]
    pub schema: Vec<ParameterSchema>,
    pub symbols: Vec<Symbol>,
    pub source_spans: Vec<Span>,
}

impl SymbolicSeries {
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn total_duration(&self) -> f64 {
        self.symbols.iter().map(|s| s.duration).sum()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str, schema: &[ParameterSchema]) -> Result<Self> {
        let mut s: SymbolicSeries = serde_json::from_str(text)?;
        s.schema = schema.to_vec();
        Ok(s)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn read(path: &Path, schema: &[ParameterSchema]) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?, schema)
    }
}

/// Smooths, decimates and normalizes a raw series.
///
/// Quantitative columns go through a centered triangular weighted mean with
/// replicated boundary samples, then every `reduction_factor`-th sample is
/// kept and values are min-max normalized. Qualitative columns are not
/// filtered; reduction takes the majority code of each decimation window.
pub fn preprocess(s: &Series, cfg: &RepresentationConfig) -> Result<Series> {
    cfg.validate()?;
    if s.stage != Stage::Raw {
        return Err(Error::InvalidConfig(format!(
            "preprocess expects a raw series, got {:?}",
            s.stage
        )));
    }
    let n = s.len();
    if cfg.filter_len > n {
        return Err(Error::InvalidConfig(format!(
            "filter_len {} exceeds series length {n}",
            cfg.filter_len
        )));
    }
    let half = (cfg.filter_len / 2) as isize;
    let weights: Vec<f64> = (-half..=half)
        .map(|k| (half + 1 - k.abs()) as f64)
        .collect();
    let weight_sum: f64 = weights.iter().sum();

    // Filter quantitative columns in place, column by column.
    let mut filtered: Vec<Vec<f64>> = Vec::new();
    for (c, schema) in s.schema.iter().enumerate() {
        if !schema.is_quantitative() {
            filtered.push(Vec::new());
            continue;
        }
        let col: Vec<f64> = s.rows.iter().map(|r| r[c].as_f64()).collect();
        let smoothed = (0..n)
            .map(|i| {
                let mut acc = 0.0;
                for (w, k) in weights.iter().zip(-half..=half) {
                    let idx = (i as isize + k).clamp(0, n as isize - 1) as usize;
                    acc += w * col[idx];
                }
                acc / weight_sum
            })
            .collect();
        filtered.push(smoothed);
    }

    let r = cfg.reduction_factor;
    let kept = n.div_ceil(r);
    let mut timestamps = Vec::with_capacity(kept);
    let mut rows = Vec::with_capacity(kept);
    for w in 0..kept {
        let lo = w * r;
        let hi = (lo + r).min(n);
        timestamps.push(s.timestamps[lo]);
        let mut row = Vec::with_capacity(s.dims());
        for (c, schema) in s.schema.iter().enumerate() {
            if schema.is_quantitative() {
                row.push(Value::Real(normalize(filtered[c][lo], schema)?));
            } else {
                // Majority code over the decimation window, earliest first on
                // ties.
                let v = schema.cardinality().unwrap() as usize;
                let mut counts = vec![0u32; v + 1];
                let mut first = vec![usize::MAX; v + 1];
                for (pos, row) in s.rows[lo..hi].iter().enumerate() {
                    let code = row[c].as_code() as usize;
                    counts[code] += 1;
                    if first[code] == usize::MAX {
                        first[code] = pos;
                    }
                }
                let mut best = 0usize;
                for code in 1..=v {
                    if counts[code] > counts[best]
                        || (counts[code] == counts[best] && first[code] < first[best])
                    {
                        best = code;
                    }
                }
                row.push(Value::Code(best as u32));
            }
        }
        rows.push(row);
    }

    let out = Series::new(s.schema.clone(), timestamps, rows, Stage::Normalized);
    out.validate()?;
    Ok(out)
}

/// Fits discretization breakpoints for one quantitative parameter by 1-D
/// k-means over a normalized training column. Breakpoints are the midpoints
/// between sorted adjacent cluster centers.
///
/// When the column has fewer than `k` distinct values the cluster count is
/// reduced with a warning; fewer than two distinct values is an error.
pub fn fit_breakpoints(train: &Series, param: usize, k: usize, seed: u64) -> Result<Vec<f64>> {
    let schema = &train.schema[param];
    if !schema.is_quantitative() {
        return Err(Error::BadSchema {
            name: schema.name.clone(),
            reason: "breakpoint fitting requires a quantitative parameter".into(),
        });
    }
    let data: Vec<f64> = train.rows.iter().map(|r| r[param].as_f64()).collect();
    if data.len() < k {
        return Err(Error::InvalidConfig(format!(
            "{} samples cannot support k = {k}",
            data.len()
        )));
    }
    let mut distinct: Vec<f64> = data.clone();
    distinct.sort_by(|a, b| a.partial_cmp(b).unwrap());
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(Error::InvalidConfig(format!(
            "parameter {} is constant; cannot fit breakpoints",
            schema.name
        )));
    }
    let k_eff = if distinct.len() < k {
        log::warn!(
            "parameter {}: only {} distinct values, reducing k from {k}",
            schema.name,
            distinct.len()
        );
        distinct.len()
    } else {
        k
    };

    let centers = kmeans_1d(&data, k_eff, seed);
    let mut breakpoints: Vec<f64> = centers.windows(2).map(|w| (w[0] + w[1]) / 2.0).collect();
    breakpoints.dedup();
    Ok(breakpoints)
}

/// k-means++ seeded Lloyd iterations specialized to one dimension. Returns
/// the sorted, deduplicated cluster centers.
fn kmeans_1d(data: &[f64], k: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = data.len();
    let mut centers: Vec<f64> = Vec::with_capacity(k);
    centers.push(data[rng.random_range(0..n)]);
    while centers.len() < k {
        let d2: Vec<f64> = data
            .iter()
            .map(|&x| {
                centers
                    .iter()
                    .map(|&c| (x - c) * (x - c))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        let total: f64 = d2.iter().sum();
        if total == 0.0 {
            break;
        }
        let mut target = rng.random::<f64>() * total;
        let mut chosen = n - 1;
        for (i, &w) in d2.iter().enumerate() {
            target -= w;
            if target <= 0.0 {
                chosen = i;
                break;
            }
        }
        centers.push(data[chosen]);
    }
    centers.sort_by(|a, b| a.partial_cmp(b).unwrap());
    centers.dedup();

    let mut assign = vec![0usize; n];
    for _ in 0..100 {
        let mut changed = false;
        for (i, &x) in data.iter().enumerate() {
            let mut best = 0usize;
            let mut best_d = f64::INFINITY;
            for (j, &c) in centers.iter().enumerate() {
                let d = (x - c).abs();
                // Strict improvement keeps the lower center on ties.
                if d < best_d {
                    best_d = d;
                    best = j;
                }
            }
            if assign[i] != best {
                assign[i] = best;
                changed = true;
            }
        }
        let mut sums = vec![0.0; centers.len()];
        let mut counts = vec![0usize; centers.len()];
        for (i, &x) in data.iter().enumerate() {
            sums[assign[i]] += x;
            counts[assign[i]] += 1;
        }
        let mut next: Vec<f64> = sums
            .iter()
            .zip(&counts)
            .filter(|(_, &c)| c > 0)
            .map(|(&s, &c)| s / c as f64)
            .collect();
        next.sort_by(|a, b| a.partial_cmp(b).unwrap());
        next.dedup();
        let shrunk = next.len() != centers.len();
        centers = next;
        if !changed && !shrunk {
            break;
        }
    }
    centers
}

/// Installs freshly fitted breakpoints into a copy of the schema, one
/// sub-seed per parameter.
pub fn fit_all_breakpoints(
    train: &Series,
    k: usize,
    seed: u64,
) -> Result<Vec<ParameterSchema>> {
    let mut fitted = train.schema.clone();
    for (i, schema) in fitted.iter_mut().enumerate() {
        if schema.is_quantitative() {
            let b = fit_breakpoints(train, i, k, derive_seed(seed, &schema.name))?;
            if let ParameterDomain::Quantitative {
                ref mut breakpoints,
                ..
            } = schema.domain
            {
                *breakpoints = b;
            }
        }
    }
    Ok(fitted)
}

/// Maps a normalized value to its 1-based interval code under the half-open
/// rule: a value equal to a breakpoint belongs to the interval above it.
pub fn discretize_value(x: f64, breakpoints: &[f64]) -> u32 {
    1 + breakpoints.iter().filter(|&&b| b <= x).count() as u32
}

/// Discretizes a normalized series using the fitted schema: quantitative
/// cells map to interval codes, qualitative cells pass through.
pub fn discretize(s: &Series, fitted: &[ParameterSchema]) -> Result<DiscreteSeries> {
    let codes = s
        .rows
        .iter()
        .enumerate()
        .map(|(r, row)| {
            row.iter()
                .zip(fitted)
                .map(|(v, schema)| match &schema.domain {
                    ParameterDomain::Quantitative { breakpoints, .. } => {
                        if breakpoints.is_empty() {
                            Err(Error::MissingBreakpoints {
                                name: schema.name.clone(),
                            })
                        } else {
                            Ok(discretize_value(v.as_f64(), breakpoints))
                        }
                    }
                    _ => {
                        let _ = r;
                        Ok(v.as_code())
                    }
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DiscreteSeries {
        schema: fitted.to_vec(),
        timestamps: s.timestamps.clone(),
        codes,
    })
}

/// Per-sample durations: each sample holds until the next one, the last as
/// long as the step before it.
fn sample_durations(timestamps: &[f64]) -> Vec<f64> {
    let n = timestamps.len();
    (0..n)
        .map(|i| {
            if i + 1 < n {
                timestamps[i + 1] - timestamps[i]
            } else if n >= 2 {
                timestamps[n - 1] - timestamps[n - 2]
            } else {
                0.0
            }
        })
        .collect()
}

/// Computes the per-component aggregate vector of a window: quantitative
/// components take the discretized mean of the underlying preprocessed
/// values, qualitative ones the most frequent code (earliest first on ties).
pub fn aggregate_vector(
    d: &DiscreteSeries,
    pre: &Series,
    start: usize,
    end: usize,
) -> Result<Vec<u32>> {
    let mut out = Vec::with_capacity(d.schema.len());
    for (c, schema) in d.schema.iter().enumerate() {
        match &schema.domain {
            ParameterDomain::Quantitative { breakpoints, .. } => {
                let sum: f64 = pre.rows[start..=end].iter().map(|r| r[c].as_f64()).sum();
                let mean = sum / (end - start + 1) as f64;
                out.push(discretize_value(mean, breakpoints));
            }
            _ => {
                let v = schema.cardinality().unwrap() as usize;
                let mut counts = vec![0u32; v + 1];
                let mut first = vec![usize::MAX; v + 1];
                for (pos, row) in d.codes[start..=end].iter().enumerate() {
                    let code = row[c] as usize;
                    counts[code] += 1;
                    if first[code] == usize::MAX {
                        first[code] = pos;
                    }
                }
                let mut best = 1usize;
                for code in 2..=v {
                    if counts[code] > counts[best]
                        || (counts[code] == counts[best] && first[code] < first[best])
                    {
                        best = code;
                    }
                }
                out.push(best as u32);
            }
        }
    }
    Ok(out)
}

/// Incremental per-column state for one candidate aggregation window.
struct WindowState {
    /// Code histogram per column (index 0 unused).
    hist: Vec<Vec<u32>>,
    first_seen: Vec<Vec<usize>>,
    quant_sum: Vec<f64>,
    len: usize,
}

impl WindowState {
    fn new(schema: &[ParameterSchema], tables: &SymbolDistanceTable) -> Self {
        let hist = (0..schema.len())
            .map(|c| vec![0u32; tables.alphabet(c) + 1])
            .collect();
        let first_seen = (0..schema.len())
            .map(|c| vec![usize::MAX; tables.alphabet(c) + 1])
            .collect();
        Self {
            hist,
            first_seen,
            quant_sum: vec![0.0; schema.len()],
            len: 0,
        }
    }

    fn push(&mut self, codes: &[u32], pre_row: &[Value], schema: &[ParameterSchema]) {
        for (c, &code) in codes.iter().enumerate() {
            self.hist[c][code as usize] += 1;
            if self.first_seen[c][code as usize] == usize::MAX {
                self.first_seen[c][code as usize] = self.len;
            }
            if schema[c].is_quantitative() {
                self.quant_sum[c] += pre_row[c].as_f64();
            }
        }
        self.len += 1;
    }

    fn aggregate(&self, schema: &[ParameterSchema]) -> Vec<u32> {
        schema
            .iter()
            .enumerate()
            .map(|(c, s)| match &s.domain {
                ParameterDomain::Quantitative { breakpoints, .. } => {
                    discretize_value(self.quant_sum[c] / self.len as f64, breakpoints)
                }
                _ => {
                    let mut best = 0usize;
                    for code in 1..self.hist[c].len() {
                        if self.hist[c][code] > 0
                            && (best == 0
                                || self.hist[c][code] > self.hist[c][best]
                                || (self.hist[c][code] == self.hist[c][best]
                                    && self.first_seen[c][code] < self.first_seen[c][best]))
                        {
                            best = code;
                        }
                    }
                    best as u32
                }
            })
            .collect()
    }

    /// Squared mindist of the window against its repeated aggregate vector
    /// (`n = omega`, so the length factor is 1).
    fn mindist_sq(&self, aggr: &[u32], tables: &SymbolDistanceTable) -> f64 {
        let mut sum = 0.0;
        for (c, &a) in aggr.iter().enumerate() {
            for (code, &count) in self.hist[c].iter().enumerate().skip(1) {
                if count > 0 {
                    let d = tables.distance(c, code as u32, a);
                    sum += f64::from(count) * d * d;
                }
            }
        }
        sum
    }

    /// Once true, no extension of the window can reach mindist zero again:
    /// a qualitative column saw two values, or a quantitative column spans
    /// more than two adjacent intervals.
    fn permanently_infeasible(&self, schema: &[ParameterSchema]) -> bool {
        for (c, s) in schema.iter().enumerate() {
            let present: Vec<usize> = self.hist[c]
                .iter()
                .enumerate()
                .filter(|(_, &n)| n > 0)
                .map(|(code, _)| code)
                .collect();
            if s.is_quantitative() {
                if present.last().unwrap() - present.first().unwrap() > 2 {
                    return true;
                }
            } else if present.len() > 1 {
                return true;
            }
        }
        false
    }
}

/// Greedy temporal aggregation: starting at the first unconsumed sample, the
/// longest prefix whose mindist against its repeated aggregate stays within
/// the threshold becomes one symbol; the scan then restarts after it.
pub fn aggregate(
    d: &DiscreteSeries,
    pre: &Series,
    tables: &SymbolDistanceTable,
    threshold: f64,
) -> Result<SymbolicSeries> {
    if d.len() != pre.len() {
        return Err(Error::SchemaMismatch(format!(
            "discrete series has {} samples, preprocessed {}",
            d.len(),
            pre.len()
        )));
    }
    if d.is_empty() {
        return Err(Error::EmptyInput("aggregate".into()));
    }
    let schema = &d.schema;
    let durations = sample_durations(&d.timestamps);
    let threshold_sq = threshold * threshold;
    // With a positive threshold permanent infeasibility cannot be detected
    // exactly, so the scan gives up after this many samples without progress.
    const LOOKAHEAD: usize = 64;

    let mut symbols = Vec::new();
    let mut source_spans = Vec::new();
    let mut start = 0usize;
    while start < d.len() {
        let mut state = WindowState::new(schema, tables);
        let mut best_len = 1usize;
        let mut best_aggr: Option<Vec<u32>> = None;
        let mut pos = start;
        while pos < d.len() {
            state.push(&d.codes[pos], &pre.rows[pos], schema);
            let aggr = state.aggregate(schema);
            if state.mindist_sq(&aggr, tables) <= threshold_sq {
                best_len = state.len;
                best_aggr = Some(aggr);
            }
            pos += 1;
            if threshold == 0.0 {
                if state.permanently_infeasible(schema) {
                    break;
                }
            } else if state.len >= best_len + LOOKAHEAD {
                break;
            }
        }
        let aggr = match best_aggr {
            Some(a) => a,
            // A single sample always aggregates to itself.
            None => aggregate_vector(d, pre, start, start)?,
        };
        let end = start + best_len - 1;
        let duration: f64 = durations[start..=end].iter().sum();
        symbols.push(Symbol {
            codes: aggr,
            start_time: d.timestamps[start],
            duration,
        });
        source_spans.push(Span::new(
            start,
            end,
            d.timestamps[start],
            d.timestamps[end],
        ));
        start = end + 1;
    }

    Ok(SymbolicSeries {
        schema: schema.clone(),
        symbols,
        source_spans,
    })
}

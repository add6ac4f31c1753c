//! Parameter schemas, heterogeneous series containers and subsequence spans.
//!
//! Every monitored parameter is one of three kinds. Qualitative values are
//! stored as 1-based integer codes (`1..=v`); labels, when present, are
//! presentation-only. Quantitative cells hold reals; once a series is
//! normalized they live in `[0, 1]`. A cell is a tagged scalar and its kind is
//! always resolved through the schema, never inferred from the cell itself.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// The three supported parameter kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParameterKind {
    Quantitative,
    OrderedQualitative,
    UnorderedQualitative,
}

/// Per-kind payload of a parameter schema.
#[derive(Debug, Clone, PartialEq)]
pub enum ParameterDomain {
    /// Bounded real values; `breakpoints` (sorted, strictly inside `(0, 1)`)
    /// define the discretization intervals once fitted.
    Quantitative {
        min: f64,
        max: f64,
        breakpoints: Vec<f64>,
    },
    OrderedQualitative { cardinality: u32 },
    UnorderedQualitative { cardinality: u32 },
}

/// Description of one monitored parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterSchema {
    pub name: String,
    pub domain: ParameterDomain,
    pub labels: Vec<String>,
}

impl ParameterSchema {
    pub fn quantitative(name: &str, min: f64, max: f64) -> Self {
        Self {
            name: name.to_string(),
            domain: ParameterDomain::Quantitative {
                min,
                max,
                breakpoints: Vec::new(),
            },
            labels: Vec::new(),
        }
    }

    pub fn ordered(name: &str, cardinality: u32) -> Self {
        Self {
            name: name.to_string(),
            domain: ParameterDomain::OrderedQualitative { cardinality },
            labels: Vec::new(),
        }
    }

    pub fn unordered(name: &str, cardinality: u32) -> Self {
        Self {
            name: name.to_string(),
            domain: ParameterDomain::UnorderedQualitative { cardinality },
            labels: Vec::new(),
        }
    }

    pub fn with_labels(mut self, labels: &[&str]) -> Self {
        self.labels = labels.iter().map(|s| s.to_string()).collect();
        self
    }

    pub fn with_breakpoints(mut self, breakpoints: Vec<f64>) -> Self {
        if let ParameterDomain::Quantitative {
            breakpoints: ref mut b,
            ..
        } = self.domain
        {
            *b = breakpoints;
        }
        self
    }

    pub fn kind(&self) -> ParameterKind {
        match self.domain {
            ParameterDomain::Quantitative { .. } => ParameterKind::Quantitative,
            ParameterDomain::OrderedQualitative { .. } => ParameterKind::OrderedQualitative,
            ParameterDomain::UnorderedQualitative { .. } => ParameterKind::UnorderedQualitative,
        }
    }

    pub fn is_quantitative(&self) -> bool {
        matches!(self.domain, ParameterDomain::Quantitative { .. })
    }

    /// Bounds of a quantitative parameter.
    pub fn bounds(&self) -> Option<(f64, f64)> {
        match self.domain {
            ParameterDomain::Quantitative { min, max, .. } => Some((min, max)),
            _ => None,
        }
    }

    /// Alphabet size of a qualitative parameter.
    pub fn cardinality(&self) -> Option<u32> {
        match self.domain {
            ParameterDomain::OrderedQualitative { cardinality }
            | ParameterDomain::UnorderedQualitative { cardinality } => Some(cardinality),
            ParameterDomain::Quantitative { .. } => None,
        }
    }

    pub fn breakpoints(&self) -> Option<&[f64]> {
        match &self.domain {
            ParameterDomain::Quantitative { breakpoints, .. } if !breakpoints.is_empty() => {
                Some(breakpoints)
            }
            _ => None,
        }
    }

    /// Alphabet size of the discrete codes this parameter maps to.
    pub fn code_alphabet(&self) -> Result<u32> {
        match &self.domain {
            ParameterDomain::Quantitative { breakpoints, .. } => {
                if breakpoints.is_empty() {
                    Err(Error::MissingBreakpoints {
                        name: self.name.clone(),
                    })
                } else {
                    Ok(breakpoints.len() as u32 + 1)
                }
            }
            ParameterDomain::OrderedQualitative { cardinality }
            | ParameterDomain::UnorderedQualitative { cardinality } => Ok(*cardinality),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match &self.domain {
            ParameterDomain::Quantitative {
                min,
                max,
                breakpoints,
            } => {
                if !(min < max) {
                    return Err(Error::BadSchema {
                        name: self.name.clone(),
                        reason: format!("min_bound {min} must be below max_bound {max}"),
                    });
                }
                for w in breakpoints.windows(2) {
                    if !(w[0] < w[1]) {
                        return Err(Error::BadSchema {
                            name: self.name.clone(),
                            reason: "breakpoints not strictly increasing".into(),
                        });
                    }
                }
                if breakpoints.iter().any(|&b| b <= 0.0 || b >= 1.0) {
                    return Err(Error::BadSchema {
                        name: self.name.clone(),
                        reason: "breakpoints must lie strictly inside (0, 1)".into(),
                    });
                }
            }
            ParameterDomain::OrderedQualitative { cardinality }
            | ParameterDomain::UnorderedQualitative { cardinality } => {
                if *cardinality < 2 {
                    return Err(Error::BadSchema {
                        name: self.name.clone(),
                        reason: format!("cardinality {cardinality} must be at least 2"),
                    });
                }
            }
        }
        Ok(())
    }
}

/// A heterogeneous cell: a real for quantitative columns, a 1-based code for
/// qualitative ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Real(f64),
    Code(u32),
}

impl Value {
    pub fn as_f64(self) -> f64 {
        match self {
            Value::Real(x) => x,
            Value::Code(c) => f64::from(c),
        }
    }

    pub fn as_code(self) -> u32 {
        match self {
            Value::Code(c) => c,
            Value::Real(x) => x.round() as u32,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Real(x) => write!(f, "{x}"),
            Value::Code(c) => write!(f, "{c}"),
        }
    }
}

/// Processing stage of a series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Raw,
    Preprocessed,
    Normalized,
}

/// A timestamped p-dimensional heterogeneous sequence.
///
/// Timestamps are explicit instants in seconds: aggregation later produces
/// variable-duration symbols, so sample counts alone are not enough. Raw
/// input is expected at a fixed sampling period (one sample per minute by
/// default).
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub schema: Vec<ParameterSchema>,
    pub timestamps: Vec<f64>,
    pub rows: Vec<Vec<Value>>,
    pub stage: Stage,
}

impl Series {
    pub fn new(
        schema: Vec<ParameterSchema>,
        timestamps: Vec<f64>,
        rows: Vec<Vec<Value>>,
        stage: Stage,
    ) -> Self {
        Self {
            schema,
            timestamps,
            rows,
            stage,
        }
    }

    /// Number of samples.
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Number of parameters.
    pub fn dims(&self) -> usize {
        self.schema.len()
    }

    pub fn row(&self, i: usize) -> &[Value] {
        &self.rows[i]
    }

    /// Sampling step, estimated from the first two timestamps.
    pub fn time_step(&self) -> f64 {
        if self.timestamps.len() >= 2 {
            self.timestamps[1] - self.timestamps[0]
        } else {
            0.0
        }
    }

    /// Duration covered by the series, counting the trailing sample as one
    /// full step.
    pub fn duration(&self) -> f64 {
        match self.timestamps.len() {
            0 => 0.0,
            1 => 0.0,
            n => {
                let last_step = self.timestamps[n - 1] - self.timestamps[n - 2];
                self.timestamps[n - 1] - self.timestamps[0] + last_step
            }
        }
    }

    /// Checks every container invariant, reporting the first violation.
    pub fn validate(&self) -> Result<()> {
        for schema in &self.schema {
            schema.validate()?;
        }
        if self.timestamps.len() != self.rows.len() {
            return Err(Error::RowWidth {
                row: 0,
                expected: self.timestamps.len(),
                found: self.rows.len(),
            });
        }
        for (i, w) in self.timestamps.windows(2).enumerate() {
            if !(w[0] < w[1]) {
                return Err(Error::TimestampsNotIncreasing {
                    row: i + 1,
                    prev: w[0],
                    next: w[1],
                });
            }
        }
        for (r, row) in self.rows.iter().enumerate() {
            if row.len() != self.schema.len() {
                return Err(Error::RowWidth {
                    row: r,
                    expected: self.schema.len(),
                    found: row.len(),
                });
            }
            for (c, (value, schema)) in row.iter().zip(&self.schema).enumerate() {
                match (&schema.domain, value) {
                    (ParameterDomain::Quantitative { .. }, Value::Real(x)) => {
                        if !x.is_finite() {
                            return Err(Error::BadCell {
                                row: r,
                                col: c,
                                name: schema.name.clone(),
                                reason: format!("non-finite value {x}"),
                            });
                        }
                        if self.stage == Stage::Normalized && !(0.0..=1.0).contains(x) {
                            return Err(Error::BadCell {
                                row: r,
                                col: c,
                                name: schema.name.clone(),
                                reason: format!("normalized value {x} outside [0, 1]"),
                            });
                        }
                    }
                    (ParameterDomain::Quantitative { .. }, Value::Code(_)) => {
                        return Err(Error::BadCell {
                            row: r,
                            col: c,
                            name: schema.name.clone(),
                            reason: "qualitative cell in quantitative column".into(),
                        });
                    }
                    (
                        ParameterDomain::OrderedQualitative { cardinality }
                        | ParameterDomain::UnorderedQualitative { cardinality },
                        Value::Code(code),
                    ) => {
                        if *code < 1 || code > cardinality {
                            return Err(Error::ValueOutOfAlphabet {
                                row: r,
                                col: c,
                                name: schema.name.clone(),
                                value: *code,
                                cardinality: *cardinality,
                            });
                        }
                    }
                    (
                        ParameterDomain::OrderedQualitative { .. }
                        | ParameterDomain::UnorderedQualitative { .. },
                        Value::Real(_),
                    ) => {
                        return Err(Error::BadCell {
                            row: r,
                            col: c,
                            name: schema.name.clone(),
                            reason: "real cell in qualitative column".into(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Contiguous sub-series over an inclusive index span. Shares the schema
    /// and preserves the stage.
    pub fn slice(&self, span: &Span) -> Result<Series> {
        if span.start_index > span.end_index || span.end_index >= self.len() {
            return Err(Error::BadSpan {
                start: span.start_index,
                end: span.end_index,
                len: self.len(),
            });
        }
        Ok(Series {
            schema: self.schema.clone(),
            timestamps: self.timestamps[span.start_index..=span.end_index].to_vec(),
            rows: self.rows[span.start_index..=span.end_index].to_vec(),
            stage: self.stage,
        })
    }

    pub fn slice_indices(&self, start: usize, end: usize) -> Result<Series> {
        self.slice(&Span::over(self, start, end)?)
    }

    pub fn same_schema(&self, other: &Series) -> Result<()> {
        if self.schema.len() != other.schema.len() {
            return Err(Error::SchemaMismatch(format!(
                "{} vs {} parameters",
                self.schema.len(),
                other.schema.len()
            )));
        }
        for (a, b) in self.schema.iter().zip(&other.schema) {
            if a.kind() != b.kind() {
                return Err(Error::SchemaMismatch(format!(
                    "parameter {} has kind {:?} vs {:?}",
                    a.name,
                    a.kind(),
                    b.kind()
                )));
            }
        }
        Ok(())
    }
}

/// Inclusive index range into a series, with the matching instants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Span {
    pub start_index: usize,
    pub end_index: usize,
    pub start_time: f64,
    pub end_time: f64,
}

impl Span {
    pub fn new(start_index: usize, end_index: usize, start_time: f64, end_time: f64) -> Self {
        Self {
            start_index,
            end_index,
            start_time,
            end_time,
        }
    }

    /// Span over `[start, end]` of a series, taking times from its timestamps.
    pub fn over(series: &Series, start: usize, end: usize) -> Result<Self> {
        if start > end || end >= series.len() {
            return Err(Error::BadSpan {
                start,
                end,
                len: series.len(),
            });
        }
        Ok(Self {
            start_index: start,
            end_index: end,
            start_time: series.timestamps[start],
            end_time: series.timestamps[end],
        })
    }

    /// Number of samples covered.
    pub fn len(&self) -> usize {
        self.end_index - self.start_index + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn duration(&self) -> f64 {
        self.end_time - self.start_time
    }

    pub fn overlaps(&self, other: &Span) -> bool {
        self.start_index <= other.end_index && other.start_index <= self.end_index
    }

    /// Overlap measured in seconds.
    pub fn time_overlap(&self, other: &Span) -> f64 {
        (self.end_time.min(other.end_time) - self.start_time.max(other.start_time)).max(0.0)
    }
}

// ---------------------------------------------------------------------------
// File formats
// ---------------------------------------------------------------------------

/// Flat serde image of a parameter schema, used by the JSON schema file.
#[derive(Debug, Serialize, Deserialize)]
struct ParameterRecord {
    name: String,
    kind: ParameterKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    min_bound: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    max_bound: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cardinality: Option<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    breakpoints: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    labels: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct SchemaFile {
    parameters: Vec<ParameterRecord>,
}

impl From<&ParameterSchema> for ParameterRecord {
    fn from(s: &ParameterSchema) -> Self {
        let (min_bound, max_bound, cardinality, breakpoints) = match &s.domain {
            ParameterDomain::Quantitative {
                min,
                max,
                breakpoints,
            } => (Some(*min), Some(*max), None, breakpoints.clone()),
            ParameterDomain::OrderedQualitative { cardinality }
            | ParameterDomain::UnorderedQualitative { cardinality } => {
                (None, None, Some(*cardinality), Vec::new())
            }
        };
        ParameterRecord {
            name: s.name.clone(),
            kind: s.kind(),
            min_bound,
            max_bound,
            cardinality,
            breakpoints,
            labels: s.labels.clone(),
        }
    }
}

impl TryFrom<ParameterRecord> for ParameterSchema {
    type Error = Error;

    fn try_from(r: ParameterRecord) -> Result<Self> {
        let domain = match r.kind {
            ParameterKind::Quantitative => {
                let (min, max) = match (r.min_bound, r.max_bound) {
                    (Some(min), Some(max)) => (min, max),
                    _ => {
                        return Err(Error::BadSchema {
                            name: r.name,
                            reason: "quantitative parameter needs min_bound and max_bound".into(),
                        })
                    }
                };
                ParameterDomain::Quantitative {
                    min,
                    max,
                    breakpoints: r.breakpoints,
                }
            }
            ParameterKind::OrderedQualitative => ParameterDomain::OrderedQualitative {
                cardinality: r.cardinality.ok_or_else(|| Error::BadSchema {
                    name: r.name.clone(),
                    reason: "qualitative parameter needs cardinality".into(),
                })?,
            },
            ParameterKind::UnorderedQualitative => ParameterDomain::UnorderedQualitative {
                cardinality: r.cardinality.ok_or_else(|| Error::BadSchema {
                    name: r.name.clone(),
                    reason: "qualitative parameter needs cardinality".into(),
                })?,
            },
        };
        let schema = ParameterSchema {
            name: r.name,
            domain,
            labels: r.labels,
        };
        schema.validate()?;
        Ok(schema)
    }
}

/// Serializes a schema list to the JSON schema-file format.
pub fn schema_to_json(schema: &[ParameterSchema]) -> Result<String> {
    let file = SchemaFile {
        parameters: schema.iter().map(ParameterRecord::from).collect(),
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

pub fn schema_from_json(text: &str) -> Result<Vec<ParameterSchema>> {
    let file: SchemaFile = serde_json::from_str(text)?;
    file.parameters
        .into_iter()
        .map(ParameterSchema::try_from)
        .collect()
}

pub fn write_schema(path: &Path, schema: &[ParameterSchema]) -> Result<()> {
    std::fs::write(path, schema_to_json(schema)?)?;
    Ok(())
}

pub fn read_schema(path: &Path) -> Result<Vec<ParameterSchema>> {
    schema_from_json(&std::fs::read_to_string(path)?)
}

/// Writes a series in the CSV exchange format: a `timestamp,<name1>,…` header
/// then one row per sample, qualitative values as integers.
pub fn write_series_csv(path: &Path, series: &Series) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["timestamp".to_string()];
    header.extend(series.schema.iter().map(|s| s.name.clone()));
    w.write_record(&header)?;
    for (t, row) in series.timestamps.iter().zip(&series.rows) {
        let mut record = vec![t.to_string()];
        record.extend(row.iter().map(|v| v.to_string()));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a series back from CSV; cell types come from the schema, and the
/// caller states the stage the file holds.
pub fn read_series_csv(path: &Path, schema: &[ParameterSchema], stage: Stage) -> Result<Series> {
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.clone();
    if header.len() != schema.len() + 1 || &header[0] != "timestamp" {
        return Err(Error::Parse(format!(
            "csv header {:?} does not match schema ({} parameters)",
            header,
            schema.len()
        )));
    }
    for (h, s) in header.iter().skip(1).zip(schema) {
        if h != s.name {
            return Err(Error::Parse(format!(
                "csv column {h:?} does not match schema parameter {:?}",
                s.name
            )));
        }
    }
    let mut timestamps = Vec::new();
    let mut rows = Vec::new();
    for (i, record) in r.records().enumerate() {
        let record = record?;
        let t: f64 = record[0]
            .parse()
            .map_err(|e| Error::Parse(format!("row {i} timestamp: {e}")))?;
        timestamps.push(t);
        let mut row = Vec::with_capacity(schema.len());
        for (c, s) in schema.iter().enumerate() {
            let field = &record[c + 1];
            let value = if s.is_quantitative() {
                Value::Real(
                    field
                        .parse()
                        .map_err(|e| Error::Parse(format!("row {i} column {}: {e}", s.name)))?,
                )
            } else {
                Value::Code(
                    field
                        .parse()
                        .map_err(|e| Error::Parse(format!("row {i} column {}: {e}", s.name)))?,
                )
            };
            row.push(value);
        }
        rows.push(row);
    }
    let series = Series::new(schema.to_vec(), timestamps, rows, stage);
    series.validate()?;
    Ok(series)
}

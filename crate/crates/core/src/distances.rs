//! Similarity machinery: per-kind point distances, min-max normalization, the
//! LCSS sequence distance with a symmetric temporal window, a DTW baseline,
//! and the breakpoint-based minimum distance between symbolic words.
//!
//! All point distances fall in `[0, 1]` whatever the parameter kind, so the
//! per-parameter match thresholds compose coherently across heterogeneous
//! dimensions.

use serde::{Deserialize, Serialize};

use crate::schema::{ParameterDomain, ParameterSchema, Series, Value};
use crate::{Error, Result};

/// Matching thresholds for the LCSS similarity.
///
/// `delta` bounds the index shift allowed when pairing points, counted in
/// samples. `epsilon` holds one threshold per parameter; qualitative entries
/// are fixed by kind (`1/(v-1)` ordered, `1` unordered) so that two
/// qualitative values only match when equal, while the quantitative threshold
/// is caller-chosen in `(0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LcssParams {
    pub delta: usize,
    pub epsilon: Vec<f64>,
    /// Keep the window constraint anchored at the sequence ends as well as
    /// the starts. Disabling it reproduces the unrestricted-in-time variant
    /// used for the DTW comparison experiment.
    pub end_anchored: bool,
}

impl LcssParams {
    /// Builds the per-parameter thresholds for a schema, with `quant_epsilon`
    /// applied to every quantitative parameter.
    pub fn for_schema(schema: &[ParameterSchema], quant_epsilon: f64, delta: usize) -> Result<Self> {
        if !(0.0 < quant_epsilon && quant_epsilon < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "quantitative epsilon {quant_epsilon} must lie in (0, 1)"
            )));
        }
        let epsilon = schema
            .iter()
            .map(|s| match &s.domain {
                ParameterDomain::Quantitative { .. } => Ok(quant_epsilon),
                ParameterDomain::OrderedQualitative { cardinality } => {
                    Ok(1.0 / (f64::from(*cardinality) - 1.0))
                }
                ParameterDomain::UnorderedQualitative { .. } => Ok(1.0),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            delta,
            epsilon,
            end_anchored: true,
        })
    }
}

/// Min-max normalization of a quantitative value; out-of-bound readings are
/// clamped since they stand for noisy or erroneous measurements.
pub fn normalize(x: f64, schema: &ParameterSchema) -> Result<f64> {
    let (min, max) = schema.bounds().ok_or_else(|| Error::BadSchema {
        name: schema.name.clone(),
        reason: "normalize requires a quantitative parameter".into(),
    })?;
    Ok((x.min(max) - min).max(0.0) / (max - min))
}

/// Distance between two values of one parameter, in `[0, 1]`.
///
/// Quantitative inputs are expected already normalized.
pub fn point_distance(a: Value, b: Value, schema: &ParameterSchema) -> f64 {
    match &schema.domain {
        ParameterDomain::Quantitative { .. } => (a.as_f64() - b.as_f64()).abs(),
        ParameterDomain::OrderedQualitative { cardinality } => {
            (a.as_f64() - b.as_f64()).abs() / (f64::from(*cardinality) - 1.0)
        }
        ParameterDomain::UnorderedQualitative { .. } => (a.as_f64() - b.as_f64()).abs().min(1.0),
    }
}

fn vectors_match(a: &[Value], b: &[Value], schema: &[ParameterSchema], eps: &[f64]) -> bool {
    a.iter()
        .zip(b)
        .zip(schema.iter().zip(eps))
        .all(|((x, y), (s, &e))| point_distance(*x, *y, s) < e)
}

/// LCSS match count over row slices sharing one schema.
pub(crate) fn lcss_count_rows(
    a: &[Vec<Value>],
    b: &[Vec<Value>],
    schema: &[ParameterSchema],
    p: &LcssParams,
) -> usize {
    let (n_len, m_len) = (a.len(), b.len());
    if n_len == 0 || m_len == 0 {
        return 0;
    }
    let delta = p.delta as isize;
    let (big_n, big_m) = (n_len as isize, m_len as isize);
    let mut prev = vec![0usize; m_len + 1];
    let mut cur = vec![0usize; m_len + 1];
    for n in 1..=n_len {
        for m in 1..=m_len {
            let (ni, mi) = (n as isize, m as isize);
            let in_window = (ni - mi).abs() <= delta
                && (!p.end_anchored || (big_n - ni - big_m + mi).abs() <= delta);
            if in_window && vectors_match(&a[n - 1], &b[m - 1], schema, &p.epsilon) {
                cur[m] = prev[m - 1] + 1;
            } else {
                cur[m] = prev[m].max(cur[m - 1]);
            }
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[m_len]
}

/// `LCSS` similarity count between two series: the maximum number of
/// non-overlapping, time-ordered point pairs whose per-parameter distances
/// all fall below their thresholds, with both index shifts (`|n-m|` and the
/// end-anchored counterpart) bounded by `delta`.
pub fn lcss_count(a: &Series, b: &Series, p: &LcssParams) -> Result<usize> {
    a.same_schema(b)?;
    if p.epsilon.len() != a.dims() {
        return Err(Error::InvalidConfig(format!(
            "{} epsilon thresholds for {} parameters",
            p.epsilon.len(),
            a.dims()
        )));
    }
    Ok(lcss_count_rows(&a.rows, &b.rows, &a.schema, p))
}

pub(crate) fn lcss_distance_rows(
    a: &[Vec<Value>],
    b: &[Vec<Value>],
    schema: &[ParameterSchema],
    p: &LcssParams,
) -> f64 {
    let count = lcss_count_rows(a, b, schema, p);
    1.0 - count as f64 / a.len().min(b.len()) as f64
}

/// Normalized LCSS distance `1 - LCSS/min(n, m)`, in `[0, 1]`.
pub fn lcss_distance(a: &Series, b: &Series, p: &LcssParams) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput("lcss_distance".into()));
    }
    let count = lcss_count(a, b, p)?;
    Ok(1.0 - count as f64 / a.len().min(b.len()) as f64)
}

/// Matched index pairs of one optimal LCSS alignment, recovered by a
/// deterministic traceback that prefers the diagonal.
pub fn lcss_matches(a: &Series, b: &Series, p: &LcssParams) -> Result<Vec<(usize, usize)>> {
    a.same_schema(b)?;
    let (n_len, m_len) = (a.len(), b.len());
    let delta = p.delta as isize;
    let (big_n, big_m) = (n_len as isize, m_len as isize);
    let mut dp = vec![vec![0usize; m_len + 1]; n_len + 1];
    let matches = |n: usize, m: usize| -> bool {
        let (ni, mi) = (n as isize, m as isize);
        let in_window = (ni - mi).abs() <= delta
            && (!p.end_anchored || (big_n - ni - big_m + mi).abs() <= delta);
        in_window && vectors_match(a.row(n - 1), b.row(m - 1), &a.schema, &p.epsilon)
    };
    for n in 1..=n_len {
        for m in 1..=m_len {
            dp[n][m] = if matches(n, m) {
                dp[n - 1][m - 1] + 1
            } else {
                dp[n - 1][m].max(dp[n][m - 1])
            };
        }
    }
    let mut pairs = Vec::new();
    let (mut n, mut m) = (n_len, m_len);
    while n > 0 && m > 0 {
        if matches(n, m) && dp[n][m] == dp[n - 1][m - 1] + 1 {
            pairs.push((n - 1, m - 1));
            n -= 1;
            m -= 1;
        } else if dp[n - 1][m] >= dp[n][m - 1] {
            n -= 1;
        } else {
            m -= 1;
        }
    }
    pairs.reverse();
    Ok(pairs)
}

/// Classic dynamic time warping distance: every point is matched, multiple
/// associations are allowed, and the per-step cost is the sum of the
/// per-parameter point distances. Costs accumulate at order 2, so the result
/// is the root of the minimal sum of squared step costs.
pub fn dtw_distance(a: &Series, b: &Series) -> Result<f64> {
    a.same_schema(b)?;
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput("dtw_distance".into()));
    }
    let (n, m) = (a.len(), b.len());
    let cost = |i: usize, j: usize| -> f64 {
        let c: f64 = a
            .row(i)
            .iter()
            .zip(b.row(j))
            .zip(&a.schema)
            .map(|((x, y), s)| point_distance(*x, *y, s))
            .sum();
        c * c
    };
    let mut prev = vec![f64::INFINITY; m];
    let mut cur = vec![f64::INFINITY; m];
    for i in 0..n {
        for j in 0..m {
            let best = if i == 0 && j == 0 {
                0.0
            } else {
                let diag = if i > 0 && j > 0 { prev[j - 1] } else { f64::INFINITY };
                let up = if i > 0 { prev[j] } else { f64::INFINITY };
                let left = if j > 0 { cur[j - 1] } else { f64::INFINITY };
                diag.min(up).min(left)
            };
            cur[j] = cost(i, j) + best;
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    Ok(prev[m - 1].sqrt())
}

// ---------------------------------------------------------------------------
// Symbol lookup tables and minimum distance
// ---------------------------------------------------------------------------

/// Per-parameter square lookup tables giving the distance between discrete
/// symbols.
///
/// Quantitative tables come from the breakpoints: adjacent intervals are at
/// distance zero, farther pairs at the gap between the separating
/// breakpoints. Qualitative tables apply the per-kind point distance to the
/// codes.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolDistanceTable {
    sizes: Vec<usize>,
    tables: Vec<Vec<f64>>,
}

impl SymbolDistanceTable {
    /// Distance between 1-based codes `a` and `b` of parameter `param`.
    pub fn distance(&self, param: usize, a: u32, b: u32) -> f64 {
        let size = self.sizes[param];
        self.tables[param][(a as usize - 1) * size + (b as usize - 1)]
    }

    pub fn alphabet(&self, param: usize) -> usize {
        self.sizes[param]
    }

    pub fn dims(&self) -> usize {
        self.sizes.len()
    }
}

/// Builds the per-parameter symbol distance tables for a schema. Quantitative
/// parameters must carry fitted breakpoints.
pub fn build_symbol_tables(schema: &[ParameterSchema]) -> Result<SymbolDistanceTable> {
    let mut sizes = Vec::with_capacity(schema.len());
    let mut tables = Vec::with_capacity(schema.len());
    for s in schema {
        let a = s.code_alphabet()? as usize;
        let mut table = vec![0.0; a * a];
        for i in 1..=a {
            for j in 1..=a {
                let d = match &s.domain {
                    ParameterDomain::Quantitative { breakpoints, .. } => {
                        if i.abs_diff(j) <= 1 {
                            0.0
                        } else {
                            breakpoints[i.max(j) - 2] - breakpoints[i.min(j) - 1]
                        }
                    }
                    ParameterDomain::OrderedQualitative { cardinality } => {
                        i.abs_diff(j) as f64 / (f64::from(*cardinality) - 1.0)
                    }
                    ParameterDomain::UnorderedQualitative { .. } => {
                        if i == j {
                            0.0
                        } else {
                            1.0
                        }
                    }
                };
                table[(i - 1) * a + (j - 1)] = d;
            }
        }
        sizes.push(a);
        tables.push(table);
    }
    Ok(SymbolDistanceTable { sizes, tables })
}

/// Minimum distance between two equal-length symbolic words standing for
/// original series of `n` samples:
/// `sqrt(n/w) * sqrt(sum_i sum_j d(q[i][j], c[i][j])^2)`.
///
/// It lower-bounds the distance between the originals, which is what licenses
/// using it as the aggregation gate.
pub fn mindist(q: &[Vec<u32>], c: &[Vec<u32>], n: usize, tables: &SymbolDistanceTable) -> Result<f64> {
    if q.len() != c.len() {
        return Err(Error::WordLengthMismatch(q.len(), c.len()));
    }
    if q.is_empty() {
        return Err(Error::EmptyInput("mindist".into()));
    }
    let omega = q.len();
    let mut sum = 0.0;
    for (qi, ci) in q.iter().zip(c) {
        for (j, (&qc, &cc)) in qi.iter().zip(ci).enumerate() {
            let d = tables.distance(j, qc, cc);
            sum += d * d;
        }
    }
    Ok((n as f64 / omega as f64).sqrt() * sum.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::Stage;

    fn quant(name: &str, min: f64, max: f64) -> ParameterSchema {
        ParameterSchema::quantitative(name, min, max)
    }

    fn series_1d_quant(values: &[f64]) -> Series {
        let schema = vec![quant("x", 0.0, 1.0)];
        let timestamps = (0..values.len()).map(|i| i as f64).collect();
        let rows = values.iter().map(|&v| vec![Value::Real(v)]).collect();
        Series::new(schema, timestamps, rows, Stage::Normalized)
    }

    #[test]
    fn normalize_bounds_and_midpoint() {
        let s = quant("hr", 40.0, 140.0);
        assert_eq!(normalize(40.0, &s).unwrap(), 0.0);
        assert_eq!(normalize(240.0, &s).unwrap(), 1.0);
        assert_eq!(normalize(90.0, &s).unwrap(), 0.5);
        assert_eq!(normalize(-5.0, &s).unwrap(), 0.0);
    }

    #[test]
    fn normalize_rejects_qualitative() {
        let s = ParameterSchema::ordered("p", 3);
        assert!(normalize(1.0, &s).is_err());
    }

    #[test]
    fn point_distance_per_kind() {
        let ordered = ParameterSchema::ordered("p", 3);
        assert_eq!(
            point_distance(Value::Code(1), Value::Code(3), &ordered),
            1.0
        );
        assert_eq!(
            point_distance(Value::Code(1), Value::Code(2), &ordered),
            0.5
        );
        let unordered = ParameterSchema::unordered("m", 8);
        assert_eq!(
            point_distance(Value::Code(2), Value::Code(7), &unordered),
            1.0
        );
        assert_eq!(
            point_distance(Value::Code(4), Value::Code(4), &unordered),
            0.0
        );
        let q = quant("x", 0.0, 1.0);
        assert_eq!(point_distance(Value::Real(0.3), Value::Real(0.3), &q), 0.0);
    }

    #[test]
    fn identical_sequences_fully_match() {
        let a = series_1d_quant(&[0.1, 0.5, 0.9, 0.4]);
        let p = LcssParams::for_schema(&a.schema, 0.2, 0).unwrap();
        assert_eq!(lcss_count(&a, &a, &p).unwrap(), 4);
        assert_eq!(lcss_distance(&a, &a, &p).unwrap(), 0.0);
    }

    #[test]
    fn disjoint_qualitative_values_never_match() {
        let schema = vec![ParameterSchema::unordered("m", 6)];
        let mk = |codes: &[u32]| {
            Series::new(
                schema.clone(),
                (0..codes.len()).map(|i| i as f64).collect(),
                codes.iter().map(|&c| vec![Value::Code(c)]).collect(),
                Stage::Normalized,
            )
        };
        let a = mk(&[1, 2, 1, 2]);
        let b = mk(&[3, 4, 5, 6]);
        let p = LcssParams::for_schema(&schema, 0.5, 4).unwrap();
        assert_eq!(lcss_count(&a, &b, &p).unwrap(), 0);
        assert_eq!(lcss_distance(&a, &b, &p).unwrap(), 1.0);
    }

    #[test]
    fn outlier_substitution_bounds_distance() {
        // Substituting k points so every epsilon test there fails can lose at
        // most k matches.
        let values: Vec<f64> = (0..10).map(|i| 0.05 + (i as f64) * 0.09).collect();
        let a = series_1d_quant(&values);
        let mut noisy = values.clone();
        for &i in &[2usize, 6, 7] {
            noisy[i] = if values[i] < 0.5 { values[i] + 0.45 } else { values[i] - 0.45 };
        }
        let b = series_1d_quant(&noisy);
        let p = LcssParams::for_schema(&a.schema, 0.2, 3).unwrap();
        let d = lcss_distance(&a, &b, &p).unwrap();
        assert!(d <= 3.0 / 10.0 + 1e-12, "distance {d} exceeds k/n");
    }

    #[test]
    fn dtw_identity_and_singletons() {
        let a = series_1d_quant(&[0.2, 0.7, 0.4]);
        assert_eq!(dtw_distance(&a, &a).unwrap(), 0.0);
        let s1 = series_1d_quant(&[0.2]);
        let s2 = series_1d_quant(&[0.9]);
        let d = dtw_distance(&s1, &s2).unwrap();
        assert!((d - 0.7).abs() < 1e-12);
    }

    #[test]
    fn dtw_rejects_empty() {
        let a = series_1d_quant(&[]);
        let b = series_1d_quant(&[0.5]);
        assert!(matches!(dtw_distance(&a, &b), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn quantitative_table_matches_breakpoint_gaps() {
        let schema = vec![quant("x", 0.0, 1.0).with_breakpoints(vec![0.12, 0.37, 0.69])];
        let t = build_symbol_tables(&schema).unwrap();
        assert_eq!(t.distance(0, 1, 2), 0.0);
        assert_eq!(t.distance(0, 1, 3), 0.25);
        assert_eq!(t.distance(0, 1, 4), 0.57);
        assert!((t.distance(0, 2, 4) - 0.32).abs() < 1e-15);
        for i in 1..=4 {
            assert_eq!(t.distance(0, i, i), 0.0);
            for j in 1..=4 {
                assert_eq!(t.distance(0, i, j), t.distance(0, j, i));
            }
        }
    }

    #[test]
    fn unordered_table_is_all_ones_off_diagonal() {
        let schema = vec![ParameterSchema::unordered("m", 4)];
        let t = build_symbol_tables(&schema).unwrap();
        for i in 1..=4 {
            for j in 1..=4 {
                assert_eq!(t.distance(0, i, j), if i == j { 0.0 } else { 1.0 });
            }
        }
    }

    #[test]
    fn ordered_table_scales_by_cardinality() {
        let schema = vec![ParameterSchema::ordered("p", 3)];
        let t = build_symbol_tables(&schema).unwrap();
        assert_eq!(t.distance(0, 1, 2), 0.5);
        assert_eq!(t.distance(0, 1, 3), 1.0);
        assert_eq!(t.distance(0, 2, 2), 0.0);
    }

    #[test]
    fn tables_require_breakpoints() {
        let schema = vec![quant("x", 0.0, 1.0)];
        assert!(matches!(
            build_symbol_tables(&schema),
            Err(Error::MissingBreakpoints { .. })
        ));
    }

    #[test]
    fn mindist_zero_for_equal_words() {
        let schema = vec![
            quant("x", 0.0, 1.0).with_breakpoints(vec![0.12, 0.37, 0.69]),
            ParameterSchema::unordered("m", 4),
        ];
        let t = build_symbol_tables(&schema).unwrap();
        let word = vec![vec![2, 1], vec![3, 1], vec![2, 4]];
        assert_eq!(mindist(&word, &word, 3, &t).unwrap(), 0.0);
    }

    #[test]
    fn mindist_single_difference() {
        let schema = vec![quant("x", 0.0, 1.0).with_breakpoints(vec![0.12, 0.37, 0.69])];
        let t = build_symbol_tables(&schema).unwrap();
        let q = vec![vec![1], vec![1], vec![1]];
        let c = vec![vec![1], vec![3], vec![1]];
        // One differing pair at table distance 0.25, omega = n.
        assert!((mindist(&q, &c, 3, &t).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn mindist_adjacent_intervals_vanish() {
        let schema = vec![quant("x", 0.0, 1.0).with_breakpoints(vec![0.12, 0.37, 0.69])];
        let t = build_symbol_tables(&schema).unwrap();
        let q = vec![vec![1], vec![2], vec![3], vec![4]];
        let c = vec![vec![2], vec![3], vec![4], vec![3]];
        assert_eq!(mindist(&q, &c, 4, &t).unwrap(), 0.0);
    }

    #[test]
    fn mindist_rejects_length_mismatch() {
        let schema = vec![ParameterSchema::ordered("p", 3)];
        let t = build_symbol_tables(&schema).unwrap();
        let q = vec![vec![1], vec![2]];
        let c = vec![vec![1]];
        assert!(matches!(
            mindist(&q, &c, 2, &t),
            Err(Error::WordLengthMismatch(2, 1))
        ));
    }

    #[test]
    fn traceback_pairs_are_monotone_matches() {
        let a = series_1d_quant(&[0.1, 0.3, 0.5, 0.7, 0.9]);
        let b = series_1d_quant(&[0.12, 0.52, 0.72, 0.88, 0.95]);
        let p = LcssParams::for_schema(&a.schema, 0.1, 2).unwrap();
        let pairs = lcss_matches(&a, &b, &p).unwrap();
        assert_eq!(pairs.len(), lcss_count(&a, &b, &p).unwrap());
        for w in pairs.windows(2) {
            assert!(w[0].0 < w[1].0 && w[0].1 < w[1].1);
        }
        for &(i, j) in &pairs {
            assert!((a.rows[i][0].as_f64() - b.rows[j][0].as_f64()).abs() < 0.1);
        }
    }
}

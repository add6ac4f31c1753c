//! Agglomerative classification of tentative motifs and per-class
//! representative sequences.
//!
//! Clusters start as singletons and merge while the complete linkage (the
//! maximum LCSS distance across the merged members) stays within the same
//! distance threshold used when examining the collision matrix, so no class
//! ever holds two members farther apart than the threshold.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::distances::{lcss_distance, lcss_matches, LcssParams};
use crate::mining::TentativeMotif;
use crate::schema::{ParameterDomain, ParameterSchema, Series, Stage, Value};
use crate::{Error, Result};

/// One motif: a class of similar tentative motifs plus its representative
/// sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct MotifClass {
    pub members: Vec<TentativeMotif>,
    pub representative: Series,
    /// Index into `members` of the reference the representative was built
    /// from.
    pub reference_member: usize,
    /// Linkage value observed when the class was finalized, kept for audit.
    pub linkage: f64,
}

/// Complete-linkage agglomerative clustering over the member index sets.
/// Returns the clusters and the linkage at which each was last merged.
fn cluster_indices(n: usize, dist: &[Vec<f64>], threshold: f64) -> Vec<(Vec<usize>, f64)> {
    let mut clusters: Vec<(Vec<usize>, f64)> = (0..n).map(|i| (vec![i], 0.0)).collect();
    loop {
        let mut best: Option<(f64, usize, usize)> = None;
        for a in 0..clusters.len() {
            for b in a + 1..clusters.len() {
                let linkage = clusters[a]
                    .0
                    .iter()
                    .flat_map(|&i| clusters[b].0.iter().map(move |&j| dist[i][j]))
                    .fold(0.0f64, f64::max);
                let better = match best {
                    None => true,
                    Some((d, _, _)) => linkage < d,
                };
                if better {
                    best = Some((linkage, a, b));
                }
            }
        }
        match best {
            Some((linkage, a, b)) if linkage <= threshold => {
                let merged = clusters.swap_remove(b).0;
                clusters[a].0.extend(merged);
                clusters[a].0.sort_unstable();
                clusters[a].1 = linkage;
            }
            _ => break,
        }
    }
    // Deterministic order regardless of merge history.
    clusters.sort_by_key(|(members, _)| members[0]);
    clusters
}

/// Clusters tentative motifs into classes with complete linkage under
/// `distance_threshold`, dropping classes smaller than `min_class_size`.
/// Distances are the LCSS distances between the preprocessed subsequences.
pub fn cluster(
    motifs: &[TentativeMotif],
    pre: &Series,
    lcss: &LcssParams,
    distance_threshold: f64,
    min_class_size: usize,
) -> Result<Vec<MotifClass>> {
    let subs: Vec<Series> = motifs
        .iter()
        .map(|m| pre.slice(&m.span))
        .collect::<Result<Vec<_>>>()?;
    let n = subs.len();
    let mut dist = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let d = lcss_distance(&subs[i], &subs[j], lcss)?;
            dist[i][j] = d;
            dist[j][i] = d;
        }
    }
    let mut classes = Vec::new();
    for (members, linkage) in cluster_indices(n, &dist, distance_threshold) {
        if members.len() < min_class_size {
            continue;
        }
        let member_series: Vec<&Series> = members.iter().map(|&i| &subs[i]).collect();
        let (rep, reference) = representative(&member_series, lcss)?;
        classes.push(MotifClass {
            members: members.iter().map(|&i| motifs[i].clone()).collect(),
            representative: rep,
            reference_member: reference,
            linkage,
        });
    }
    Ok(classes)
}

/// Mean representative sequence of a class.
///
/// The reference is the member whose duration is closest to the mean member
/// duration (earlier member on ties). Every other member is aligned to the
/// reference by LCSS; each reference vector is then replaced by the
/// per-component aggregate of itself and its matched vectors (mean for
/// quantitative components, earliest-first mode for qualitative ones).
pub fn representative(members: &[&Series], lcss: &LcssParams) -> Result<(Series, usize)> {
    if members.is_empty() {
        return Err(Error::EmptyInput("representative".into()));
    }
    let durations: Vec<f64> = members.iter().map(|m| m.duration()).collect();
    let mean = durations.iter().sum::<f64>() / durations.len() as f64;
    let reference = durations
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| {
            (*a - mean)
                .abs()
                .partial_cmp(&(*b - mean).abs())
                .unwrap()
        })
        .map(|(i, _)| i)
        .unwrap();
    let reference_series = members[reference];

    // Matched vectors collected per reference position, the reference vector
    // first.
    let mut gathered: Vec<Vec<&[Value]>> = (0..reference_series.len())
        .map(|i| vec![reference_series.row(i)])
        .collect();
    for (k, member) in members.iter().enumerate() {
        if k == reference {
            continue;
        }
        for (ref_idx, mem_idx) in lcss_matches(reference_series, member, lcss)? {
            gathered[ref_idx].push(member.row(mem_idx));
        }
    }

    let rows: Vec<Vec<Value>> = gathered
        .iter()
        .map(|vectors| aggregate_vectors(vectors, &reference_series.schema))
        .collect();
    let rep = Series::new(
        reference_series.schema.clone(),
        reference_series.timestamps.clone(),
        rows,
        reference_series.stage,
    );
    Ok((rep, reference))
}

/// Per-component aggregate of a set of vectors: mean for quantitative
/// components, most frequent code (earliest first on ties) for qualitative
/// ones.
fn aggregate_vectors(vectors: &[&[Value]], schema: &[ParameterSchema]) -> Vec<Value> {
    schema
        .iter()
        .enumerate()
        .map(|(c, s)| match &s.domain {
            ParameterDomain::Quantitative { .. } => {
                let sum: f64 = vectors.iter().map(|v| v[c].as_f64()).sum();
                Value::Real(sum / vectors.len() as f64)
            }
            _ => {
                let v = s.cardinality().unwrap() as usize;
                let mut counts = vec![0u32; v + 1];
                let mut first = vec![usize::MAX; v + 1];
                for (pos, vector) in vectors.iter().enumerate() {
                    let code = vector[c].as_code() as usize;
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
                Value::Code(best as u32)
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

/// Serializable image of a series: row values flattened to reals, retyped on
/// load through the schema.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeriesData {
    pub stage: Stage,
    pub timestamps: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
}

impl SeriesData {
    pub fn from_series(s: &Series) -> Self {
        Self {
            stage: s.stage,
            timestamps: s.timestamps.clone(),
            rows: s
                .rows
                .iter()
                .map(|r| r.iter().map(|v| v.as_f64()).collect())
                .collect(),
        }
    }

    pub fn into_series(self, schema: &[ParameterSchema]) -> Series {
        let rows = self
            .rows
            .into_iter()
            .map(|r| {
                r.into_iter()
                    .zip(schema)
                    .map(|(x, s)| {
                        if s.is_quantitative() {
                            Value::Real(x)
                        } else {
                            Value::Code(x.round() as u32)
                        }
                    })
                    .collect()
            })
            .collect();
        Series::new(schema.to_vec(), self.timestamps, rows, self.stage)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct MotifClassData {
    members: Vec<TentativeMotif>,
    representative: SeriesData,
    reference_member: usize,
    linkage: f64,
}

/// The final output of extraction: every motif class with its members and
/// representative.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MotifSet {
    classes: Vec<MotifClassData>,
}

impl MotifSet {
    pub fn from_classes(classes: &[MotifClass]) -> Self {
        Self {
            classes: classes
                .iter()
                .map(|c| MotifClassData {
                    members: c.members.clone(),
                    representative: SeriesData::from_series(&c.representative),
                    reference_member: c.reference_member,
                    linkage: c.linkage,
                })
                .collect(),
        }
    }

    pub fn into_classes(self, schema: &[ParameterSchema]) -> Vec<MotifClass> {
        self.classes
            .into_iter()
            .map(|c| MotifClass {
                members: c.members,
                representative: c.representative.into_series(schema),
                reference_member: c.reference_member,
                linkage: c.linkage,
            })
            .collect()
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

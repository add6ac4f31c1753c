//! Ground-truth evaluation of extraction and clustering: sample-level
//! sensitivity/specificity, split-rate-weighted confusion matrices,
//! entropy-based class indexes, recognition rates and the segmentation index.
//!
//! All indexes fall in `[0, 1]`, 1 being perfect. Logs are natural; the base
//! cancels inside the entropy ratios.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::mining::TentativeMotif;
use crate::clustering::MotifClass;
use crate::schema::Span;
use crate::{Error, Result};

/// Injected motifs and the exact spans their instances occupy, in raw-sample
/// index space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    /// Total sample count of the analyzed series.
    pub n_samples: usize,
    /// First timestamp of the series, seconds.
    pub start_time: f64,
    /// Sampling period, seconds.
    pub period: f64,
    pub motifs: Vec<InjectedMotif>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InjectedMotif {
    pub motif_id: String,
    pub instances: Vec<Span>,
}

impl GroundTruth {
    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    /// Maps a time span onto this ground truth's sample grid.
    pub fn to_sample_range(&self, span: &Span) -> (usize, usize) {
        let lo = ((span.start_time - self.start_time) / self.period).round() as i64;
        let hi = ((span.end_time - self.start_time) / self.period).round() as i64;
        let lo = lo.clamp(0, self.n_samples as i64 - 1) as usize;
        let hi = hi.clamp(0, self.n_samples as i64 - 1) as usize;
        (lo, hi)
    }
}

/// Sample-level sensitivity and specificity of tentative-motif extraction.
///
/// Each of the `n` samples is labeled by whether it falls inside a
/// ground-truth instance and whether it falls inside a found motif;
/// `Se = TP/(TP+FN)`, `Sp = TN/(TN+FP)`. Vacuous denominators yield 1.
pub fn extraction_sensitivity_specificity(
    gt: &GroundTruth,
    found: &[Span],
    n: usize,
) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::Evaluation("no samples to evaluate".into()));
    }
    let mut in_gt = vec![false; n];
    for motif in &gt.motifs {
        for inst in &motif.instances {
            let (lo, hi) = gt.to_sample_range(inst);
            in_gt[lo..=hi].iter_mut().for_each(|b| *b = true);
        }
    }
    let mut in_found = vec![false; n];
    for span in found {
        let (lo, hi) = gt.to_sample_range(span);
        in_found[lo..=hi].iter_mut().for_each(|b| *b = true);
    }
    let (mut tp, mut fp, mut tn, mut fn_) = (0usize, 0usize, 0usize, 0usize);
    for i in 0..n {
        match (in_gt[i], in_found[i]) {
            (true, true) => tp += 1,
            (true, false) => fn_ += 1,
            (false, true) => fp += 1,
            (false, false) => tn += 1,
        }
    }
    let se = if tp + fn_ == 0 {
        1.0
    } else {
        tp as f64 / (tp + fn_) as f64
    };
    let sp = if tn + fp == 0 {
        1.0
    } else {
        tn as f64 / (tn + fp) as f64
    };
    Ok((se, sp))
}

/// Confusion matrices and association bookkeeping between ground-truth
/// instances and class elements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionMatrices {
    /// Whole associations: `c[i][j]` counts elements of class `j` associated
    /// to instances of motif `i`.
    pub c: Vec<Vec<u32>>,
    /// Split-rate-weighted associations: each association adds `1/eta_ik`.
    pub c_prime: Vec<Vec<f64>>,
    /// `eta[i][k]`: number of class elements associated to instance `k` of
    /// motif `i`, across all classes.
    pub eta: Vec<Vec<u32>>,
    /// `m'[i]`: instances of motif `i` identified by no class element.
    pub unidentified: Vec<u32>,
    /// `n'[j]`: elements of class `j` matching no instance.
    pub spurious: Vec<u32>,
    /// Classes holding at least one element associated to instance `k` of
    /// motif `i`.
    pub instance_classes: Vec<Vec<Vec<usize>>>,
}

/// Associates class elements to ground-truth instances and fills both
/// confusion matrices. An element is associated to an instance when their
/// spans overlap by more than half of the instance's duration.
pub fn build_confusion(gt: &GroundTruth, classes: &[MotifClass]) -> ConfusionMatrices {
    let m = gt.motifs.len();
    let n = classes.len();
    let elements: Vec<(usize, Span)> = classes
        .iter()
        .enumerate()
        .flat_map(|(j, class)| class.members.iter().map(move |e| (j, e.span)))
        .collect();

    // Pass 1: per-instance association lists.
    let mut assoc: Vec<Vec<Vec<usize>>> = gt
        .motifs
        .iter()
        .map(|motif| vec![Vec::new(); motif.instances.len()])
        .collect();
    for (i, motif) in gt.motifs.iter().enumerate() {
        for (k, inst) in motif.instances.iter().enumerate() {
            for (e, (_, span)) in elements.iter().enumerate() {
                if span.time_overlap(inst) > 0.5 * inst.duration() {
                    assoc[i][k].push(e);
                }
            }
        }
    }

    let mut c = vec![vec![0u32; n]; m];
    let mut c_prime = vec![vec![0.0f64; n]; m];
    let eta: Vec<Vec<u32>> = assoc
        .iter()
        .map(|per_inst| per_inst.iter().map(|a| a.len() as u32).collect())
        .collect();
    let mut unidentified = vec![0u32; m];
    let mut matched_elements = vec![false; elements.len()];
    let mut instance_classes: Vec<Vec<Vec<usize>>> = gt
        .motifs
        .iter()
        .map(|motif| vec![Vec::new(); motif.instances.len()])
        .collect();

    for (i, per_inst) in assoc.iter().enumerate() {
        for (k, element_ids) in per_inst.iter().enumerate() {
            if element_ids.is_empty() {
                unidentified[i] += 1;
                continue;
            }
            let split = f64::from(eta[i][k]);
            for &e in element_ids {
                let j = elements[e].0;
                c[i][j] += 1;
                c_prime[i][j] += 1.0 / split;
                matched_elements[e] = true;
                if !instance_classes[i][k].contains(&j) {
                    instance_classes[i][k].push(j);
                }
            }
        }
    }
    let mut spurious = vec![0u32; n];
    for (e, matched) in matched_elements.iter().enumerate() {
        if !matched {
            spurious[elements[e].0] += 1;
        }
    }

    ConfusionMatrices {
        c,
        c_prime,
        eta,
        unidentified,
        spurious,
        instance_classes,
    }
}

/// Per-motif and per-class entropy indexes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyMetrics {
    pub se_per_motif: Vec<f64>,
    pub sp_per_class: Vec<f64>,
    pub rho_e: Vec<f64>,
    pub rho_p: Vec<f64>,
    pub mean_se: f64,
    pub mean_sp: f64,
}

/// Entropy term `1 + (1/ln(states)) * sum q ln q` over the normalized
/// nonzero shares `q`; defined as 1 when there are fewer than two states
/// (the system has no disorder to measure).
fn entropy_factor(shares: &[f64], states: usize) -> f64 {
    let total: f64 = shares.iter().sum();
    if total <= 0.0 || states <= 1 {
        return 1.0;
    }
    let mut acc = 0.0;
    for &s in shares {
        if s > 0.0 {
            let q = s / total;
            acc += q * q.ln();
        }
    }
    (1.0 + acc / (states as f64).ln()).clamp(0.0, 1.0)
}

/// Computes the adapted sensitivity/specificity indexes from the weighted
/// confusion matrix: `Se_i = rho_e_i * entropy(row i)` and
/// `Sp_j = rho_p_j * entropy(column j)`, with the recognition rates
/// discounting unidentified instances and spurious elements.
pub fn entropy_metrics(cm: &ConfusionMatrices) -> Result<EntropyMetrics> {
    let m = cm.c_prime.len();
    let n = cm.c_prime.first().map_or(0, |row| row.len());
    if m == 0 {
        return Err(Error::Evaluation("empty confusion matrix".into()));
    }
    let mut se_per_motif = Vec::with_capacity(m);
    let mut rho_e = Vec::with_capacity(m);
    for i in 0..m {
        let row_sum: f64 = cm.c_prime[i].iter().sum();
        let rho = if row_sum + f64::from(cm.unidentified[i]) == 0.0 {
            0.0
        } else {
            row_sum / (row_sum + f64::from(cm.unidentified[i]))
        };
        let se = rho * entropy_factor(&cm.c_prime[i], n);
        rho_e.push(rho);
        se_per_motif.push(se);
    }
    let mut sp_per_class = Vec::with_capacity(n);
    let mut rho_p = Vec::with_capacity(n);
    for j in 0..n {
        let col: Vec<f64> = (0..m).map(|i| cm.c_prime[i][j]).collect();
        let col_sum: f64 = col.iter().sum();
        let rho = if col_sum + f64::from(cm.spurious[j]) == 0.0 {
            0.0
        } else {
            col_sum / (col_sum + f64::from(cm.spurious[j]))
        };
        let sp = rho * entropy_factor(&col, m);
        rho_p.push(rho);
        sp_per_class.push(sp);
    }
    let mean_se = if se_per_motif.is_empty() {
        1.0
    } else {
        se_per_motif.iter().sum::<f64>() / se_per_motif.len() as f64
    };
    let mean_sp = if sp_per_class.is_empty() {
        1.0
    } else {
        sp_per_class.iter().sum::<f64>() / sp_per_class.len() as f64
    };
    Ok(EntropyMetrics {
        se_per_motif,
        sp_per_class,
        rho_e,
        rho_p,
        mean_se,
        mean_sp,
    })
}

/// Segmentation index: mean of `c'_ij / c_ij` over all cells. Cells with
/// `c_ij = 0` admit no split and contribute the neutral value 1; their count
/// is reported alongside.
pub fn segmentation_index(cm: &ConfusionMatrices) -> (f64, usize) {
    let m = cm.c.len();
    let n = cm.c.first().map_or(0, |row| row.len());
    if m == 0 || n == 0 {
        return (1.0, 0);
    }
    let mut sum = 0.0;
    let mut skipped = 0usize;
    for i in 0..m {
        for j in 0..n {
            if cm.c[i][j] > 0 {
                sum += cm.c_prime[i][j] / f64::from(cm.c[i][j]);
            } else {
                sum += 1.0;
                skipped += 1;
            }
        }
    }
    (sum / (m * n) as f64, skipped)
}

/// Full evaluation report for one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub extraction_se: f64,
    pub extraction_sp: f64,
    pub classification: EntropyMetrics,
    pub lambda: f64,
    /// Cells skipped by the segmentation index because `c_ij = 0`.
    pub lambda_skipped_cells: usize,
    pub confusion: ConfusionMatrices,
    pub n_motifs: usize,
    pub n_classes: usize,
}

impl EvalReport {
    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    /// Flat CSV row for aggregation across seeded runs.
    pub fn csv_header() -> &'static str {
        "label,extraction_se,extraction_sp,mean_se,mean_sp,lambda,n_motifs,n_classes"
    }

    pub fn csv_row(&self, label: &str) -> String {
        format!(
            "{label},{},{},{},{},{},{},{}",
            self.extraction_se,
            self.extraction_sp,
            self.classification.mean_se,
            self.classification.mean_sp,
            self.lambda,
            self.n_motifs,
            self.n_classes
        )
    }
}

/// Evaluates an extraction run against ground truth: the tentative motifs
/// drive the sample-level identification indexes, the classes the
/// classification indexes.
pub fn evaluate(
    gt: &GroundTruth,
    tentative: &[TentativeMotif],
    classes: &[MotifClass],
) -> Result<EvalReport> {
    let found: Vec<Span> = tentative.iter().map(|t| t.span).collect();
    let (extraction_se, extraction_sp) =
        extraction_sensitivity_specificity(gt, &found, gt.n_samples)?;
    let confusion = build_confusion(gt, classes);
    let classification = entropy_metrics(&confusion)?;
    let (lambda, lambda_skipped_cells) = segmentation_index(&confusion);
    Ok(EvalReport {
        extraction_se,
        extraction_sp,
        classification,
        lambda,
        lambda_skipped_cells,
        confusion,
        n_motifs: gt.motifs.len(),
        n_classes: classes.len(),
    })
}

/// True when one threshold on the distances separates the two groups
/// perfectly: every close distance strictly below every far one.
pub fn threshold_separable(close: &[f64], far: &[f64]) -> bool {
    let max_close = close.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min_far = far.iter().copied().fold(f64::INFINITY, f64::min);
    max_close < min_far
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::{ParameterSchema, Series, Stage, Value};

    fn gt_with(instances: &[(f64, f64)], n: usize) -> GroundTruth {
        GroundTruth {
            n_samples: n,
            start_time: 0.0,
            period: 1.0,
            motifs: vec![InjectedMotif {
                motif_id: "m0".into(),
                instances: instances
                    .iter()
                    .map(|&(a, b)| Span::new(a as usize, b as usize, a, b))
                    .collect(),
            }],
        }
    }

    #[test]
    fn exact_recovery_is_perfect() {
        let gt = gt_with(&[(10.0, 59.0), (200.0, 249.0)], 1000);
        let found: Vec<Span> = gt.motifs[0].instances.clone();
        let (se, sp) = extraction_sensitivity_specificity(&gt, &found, 1000).unwrap();
        assert_eq!((se, sp), (1.0, 1.0));
    }

    #[test]
    fn nothing_found_is_fully_specific() {
        let gt = gt_with(&[(10.0, 59.0)], 1000);
        let (se, sp) = extraction_sensitivity_specificity(&gt, &[], 1000).unwrap();
        assert_eq!((se, sp), (0.0, 1.0));
    }

    #[test]
    fn partial_overlap_counts_samples() {
        // Ground truth covers 0..=99, found covers 50..=149 of 1000 samples:
        // TP=50, FN=50, FP=50, TN=850.
        let gt = gt_with(&[(0.0, 99.0)], 1000);
        let found = vec![Span::new(50, 149, 50.0, 149.0)];
        let (se, sp) = extraction_sensitivity_specificity(&gt, &found, 1000).unwrap();
        assert!((se - 0.5).abs() < 1e-12);
        assert!((sp - 850.0 / 900.0).abs() < 1e-12);
    }

    /// A class whose members sit exactly on the given spans.
    fn class_at(spans: &[(f64, f64)]) -> MotifClass {
        let schema = vec![ParameterSchema::quantitative("x", 0.0, 1.0)];
        let rep = Series::new(
            schema,
            vec![0.0],
            vec![vec![Value::Real(0.0)]],
            Stage::Normalized,
        );
        MotifClass {
            members: spans
                .iter()
                .map(|&(a, b)| TentativeMotif {
                    span: Span::new(a as usize, b as usize, a, b),
                    symbol_span: (0, 0),
                    support: Vec::new(),
                })
                .collect(),
            representative: rep,
            reference_member: 0,
            linkage: 0.0,
        }
    }

    #[test]
    fn perfect_assignment_gives_diagonal_matrices() {
        let gt = gt_with(&[(0.0, 99.0), (200.0, 299.0), (400.0, 499.0)], 1000);
        let classes = vec![class_at(&[(0.0, 99.0), (200.0, 299.0), (400.0, 499.0)])];
        let cm = build_confusion(&gt, &classes);
        assert_eq!(cm.c, vec![vec![3]]);
        assert_eq!(cm.c_prime, vec![vec![3.0]]);
        assert_eq!(cm.unidentified, vec![0]);
        assert_eq!(cm.spurious, vec![0]);
        let metrics = entropy_metrics(&cm).unwrap();
        assert_eq!(metrics.mean_se, 1.0);
        assert_eq!(metrics.mean_sp, 1.0);
        let (lambda, _) = segmentation_index(&cm);
        assert_eq!(lambda, 1.0);
    }

    #[test]
    fn split_instance_gets_half_credit() {
        // One instance recognized as two elements of the same class: eta = 2
        // and both associations add 1/2 to c'.
        let gt = gt_with(&[(0.0, 99.0)], 1000);
        let classes = vec![class_at(&[(0.0, 60.0), (30.0, 99.0)])];
        let cm = build_confusion(&gt, &classes);
        assert_eq!(cm.eta, vec![vec![2]]);
        assert_eq!(cm.c, vec![vec![2]]);
        assert!((cm.c_prime[0][0] - 1.0).abs() < 1e-12);
        let (lambda, _) = segmentation_index(&cm);
        assert!((lambda - 0.5).abs() < 1e-12);
    }

    #[test]
    fn unmatched_element_is_spurious_only() {
        let gt = gt_with(&[(0.0, 99.0)], 1000);
        let classes = vec![class_at(&[(0.0, 99.0), (500.0, 550.0)])];
        let cm = build_confusion(&gt, &classes);
        assert_eq!(cm.c, vec![vec![1]]);
        assert_eq!(cm.spurious, vec![1]);
        let metrics = entropy_metrics(&cm).unwrap();
        assert!((metrics.rho_p[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn even_split_across_two_of_four_classes_halves_sensitivity() {
        // All instances found, half in class 0 and half in class 1 of four:
        // Se_i = 1 - ln(2)/ln(4) = 0.5.
        let cm = ConfusionMatrices {
            c: vec![vec![2, 2, 0, 0]],
            c_prime: vec![vec![2.0, 2.0, 0.0, 0.0]],
            eta: vec![vec![1, 1, 1, 1]],
            unidentified: vec![0],
            spurious: vec![0, 0, 0, 0],
            instance_classes: vec![vec![vec![0], vec![0], vec![1], vec![1]]],
        };
        let metrics = entropy_metrics(&cm).unwrap();
        assert!((metrics.se_per_motif[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn half_missed_single_class_motif() {
        let cm = ConfusionMatrices {
            c: vec![vec![2]],
            c_prime: vec![vec![2.0]],
            eta: vec![vec![1, 1, 0, 0]],
            unidentified: vec![2],
            spurious: vec![0],
            instance_classes: vec![vec![vec![0], vec![0], vec![], vec![]]],
        };
        let metrics = entropy_metrics(&cm).unwrap();
        assert!((metrics.rho_e[0] - 0.5).abs() < 1e-12);
        assert!((metrics.se_per_motif[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn empty_confusion_is_an_error() {
        let cm = ConfusionMatrices {
            c: vec![],
            c_prime: vec![],
            eta: vec![],
            unidentified: vec![],
            spurious: vec![],
            instance_classes: vec![],
        };
        assert!(entropy_metrics(&cm).is_err());
    }

    #[test]
    fn label_permutation_preserves_means() {
        let cm = |perm: [usize; 2]| {
            let mut c = vec![vec![0u32; 2]; 2];
            let mut cp = vec![vec![0.0; 2]; 2];
            c[0][perm[0]] = 3;
            c[1][perm[1]] = 2;
            cp[0][perm[0]] = 3.0;
            cp[1][perm[1]] = 2.0;
            ConfusionMatrices {
                c,
                c_prime: cp,
                eta: vec![vec![1; 3], vec![1; 2]],
                unidentified: vec![0, 0],
                spurious: vec![0, 0],
                instance_classes: vec![],
            }
        };
        let a = entropy_metrics(&cm([0, 1])).unwrap();
        let b = entropy_metrics(&cm([1, 0])).unwrap();
        assert!((a.mean_se - b.mean_se).abs() < 1e-12);
        assert!((a.mean_sp - b.mean_sp).abs() < 1e-12);
        let (la, _) = segmentation_index(&cm([0, 1]));
        let (lb, _) = segmentation_index(&cm([1, 0]));
        assert!((la - lb).abs() < 1e-12);
    }

    #[test]
    fn separability_helper() {
        assert!(threshold_separable(&[0.1, 0.2], &[0.3, 0.9]));
        assert!(!threshold_separable(&[0.1, 0.5], &[0.3, 0.9]));
    }
}

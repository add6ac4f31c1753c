//! End-to-end extraction glue: representation, projection, examination,
//! tentative-motif synthesis and clustering in one seeded, reproducible call.

use serde::{Deserialize, Serialize};

use crate::clustering::{cluster, MotifClass};
use crate::distances::{build_symbol_tables, LcssParams};
use crate::mining::{
    examine, extract_tentative_motifs, project, CollisionMatrix, GrownPair, MiningThresholds,
    ProjectionConfig, TentativeMotif,
};
use crate::representation::{
    aggregate, discretize, fit_all_breakpoints, preprocess, RepresentationConfig, SymbolicSeries,
};
use crate::schema::{ParameterSchema, Series};
use crate::{derive_seed, Result};

/// LCSS knobs of a run; the per-parameter thresholds are derived from the
/// schema at run time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LcssConfig {
    /// Maximum index shift, in samples.
    pub delta: usize,
    /// Matching threshold for quantitative parameters.
    pub quant_epsilon: f64,
    pub end_anchored: bool,
}

impl Default for LcssConfig {
    fn default() -> Self {
        Self {
            delta: 45,
            quant_epsilon: 0.15,
            end_anchored: true,
        }
    }
}

impl LcssConfig {
    pub fn params(&self, schema: &[ParameterSchema]) -> Result<LcssParams> {
        let mut p = LcssParams::for_schema(schema, self.quant_epsilon, self.delta)?;
        p.end_anchored = self.end_anchored;
        Ok(p)
    }
}

/// Clustering knobs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClusteringConfig {
    /// Minimum members per emitted class.
    pub min_class_size: usize,
}

impl Default for ClusteringConfig {
    fn default() -> Self {
        // Two members are theoretically enough for a motif, but a lone
        // background coincidence also produces exactly two; three keeps
        // single accidental pairs out while any motif with three instances
        // still comes through.
        Self { min_class_size: 3 }
    }
}

/// Full configuration of one extraction run.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub representation: RepresentationConfig,
    pub lcss: LcssConfig,
    pub projection: ProjectionConfig,
    pub mining: MiningThresholds,
    pub clustering: ClusteringConfig,
}

/// Everything an extraction run produces, intermediate stages included.
#[derive(Debug, Clone)]
pub struct ExtractionOutput {
    pub preprocessed: Series,
    pub fitted_schema: Vec<ParameterSchema>,
    pub symbolic: SymbolicSeries,
    pub collisions: CollisionMatrix,
    pub grown_pairs: Vec<GrownPair>,
    pub tentative: Vec<TentativeMotif>,
    pub classes: Vec<MotifClass>,
}

/// Runs the whole extraction pipeline on a raw series. Sub-seeds for the
/// k-means initialization and the projections derive from `seed`, so one
/// seed pins the entire run.
pub fn run_extraction(raw: &Series, cfg: &PipelineConfig, seed: u64) -> Result<ExtractionOutput> {
    let preprocessed = preprocess(raw, &cfg.representation)?;
    let fitted_schema = fit_all_breakpoints(
        &preprocessed,
        cfg.representation.k_per_param,
        derive_seed(seed, "kmeans"),
    )?;
    let tables = build_symbol_tables(&fitted_schema)?;
    let discrete = discretize(&preprocessed, &fitted_schema)?;
    let symbolic = aggregate(
        &discrete,
        &preprocessed,
        &tables,
        cfg.representation.aggregation_threshold,
    )?;

    let projection = ProjectionConfig {
        rng_seed: derive_seed(seed, "projection"),
        ..cfg.projection.clone()
    };
    let collisions = project(&symbolic, &projection)?;

    let lcss = cfg.lcss.params(&fitted_schema)?;
    let grown_pairs = examine(&collisions, &symbolic, &preprocessed, &cfg.mining, &lcss)?;
    let tentative = extract_tentative_motifs(&grown_pairs, &symbolic, &cfg.mining);
    let classes = cluster(
        &tentative,
        &preprocessed,
        &lcss,
        cfg.mining.distance_threshold,
        cfg.clustering.min_class_size,
    )?;

    Ok(ExtractionOutput {
        preprocessed,
        fitted_schema,
        symbolic,
        collisions,
        grown_pairs,
        tentative,
        classes,
    })
}

//! One replicate of the simulation pipeline: generate, embed, measure,
//! cluster, score.

use crate::blockmodel::BlockModelSpec;
use crate::clustering::{adjusted_rand_index, choose_k_by_gap, complete_linkage, cut_at_k, Dendrogram, Partition};
use crate::error::Result;
use crate::hypergraph::InteractionHypergraph;
use crate::sampler::{generate_design, SimulationDesign};
use crate::spectral::{
    diagnostics, embed_interactions, signal_gap, theoretical_embedding, DiagnosticsReport, EmbeddingResult, Selection,
    SignalGap,
};

/// How the grid picks eigenvalues when the model is known.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SelectionMode {
    /// Farthest from the bulk values `-μ_r`.
    #[default]
    BulkDistance,
    /// Strict interval filter with radius `b`; fails when the count is off.
    Oracle,
    /// Model-free nearest-neighbour gap rule.
    Empirical,
}

impl SelectionMode {
    pub fn selection(&self, spec: &BlockModelSpec) -> Result<Selection> {
        Ok(match self {
            SelectionMode::BulkDistance => Selection::bulk_distance(spec),
            SelectionMode::Oracle => Selection::oracle(spec, None)?,
            SelectionMode::Empirical => Selection::Empirical,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            SelectionMode::BulkDistance => "bulk-distance",
            SelectionMode::Oracle => "oracle",
            SelectionMode::Empirical => "empirical",
        }
    }
}

/// Everything measured on one replicate.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateOutcome {
    /// Number of distinct type vectors present.
    pub k_true: usize,
    pub ari_true_k: f64,
    pub k_gap: usize,
    pub ari_gap_k: f64,
    /// Whether the cut at `k_true` reproduces the type partition exactly.
    pub perfect_cut: bool,
    pub diagnostics: DiagnosticsReport,
    pub gap: SignalGap,
}

/// Intermediate objects of a replicate, for callers that export them.
#[derive(Debug, Clone)]
pub struct ReplicateArtifacts {
    pub spec: BlockModelSpec,
    pub hypergraph: InteractionHypergraph,
    pub embedding: EmbeddingResult,
    pub dendrogram: Dendrogram,
    pub truth: Partition,
}

/// Upper end of the `k` search: four times the number of possible types,
/// capped at `m`.
pub fn gap_search_limit(design: &SimulationDesign) -> usize {
    (4 * design.possible_type_count()).min(design.m)
}

pub fn run_replicate_with_artifacts(
    design: &SimulationDesign,
    mode: SelectionMode,
) -> Result<(ReplicateOutcome, ReplicateArtifacts)> {
    let (spec, hypergraph) = generate_design(design, &design.stream())?;
    let r = hypergraph.incidence_matrix();
    let embedding = embed_interactions(&r, spec.d(), &mode.selection(&spec)?)?;
    let theo = theoretical_embedding(&spec)?;
    let report = diagnostics(&r, &spec, &embedding, &theo)?;
    let gap = signal_gap(&spec, None)?;

    let dendrogram = complete_linkage(&embedding.embedding)?;
    let (type_labels, k_true) = spec.types().distinct_type_labels();
    let truth = Partition::from_labels(&type_labels);
    let at_true = cut_at_k(&dendrogram, k_true)?;
    let ari_true_k = adjusted_rand_index(&at_true, &truth)?;
    let k_gap = choose_k_by_gap(&dendrogram, gap_search_limit(design));
    let ari_gap_k = adjusted_rand_index(&cut_at_k(&dendrogram, k_gap)?, &truth)?;

    let outcome = ReplicateOutcome {
        k_true,
        ari_true_k,
        k_gap,
        ari_gap_k,
        perfect_cut: at_true == truth,
        diagnostics: report,
        gap,
    };
    let artifacts = ReplicateArtifacts {
        spec,
        hypergraph,
        embedding,
        dendrogram,
        truth,
    };
    Ok((outcome, artifacts))
}

pub fn run_replicate(design: &SimulationDesign, mode: SelectionMode) -> Result<ReplicateOutcome> {
    run_replicate_with_artifacts(design, mode).map(|(o, _)| o)
}

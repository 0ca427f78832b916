//! Spectral embedding of interactions through the hollowed Gram matrix.

pub mod diagnostics;
pub mod embed;
pub mod expected;
pub mod gram;
pub mod linalg;
pub mod procrustes;
pub mod select;

pub use diagnostics::{diagnostics, DiagnosticsReport, ALIGNMENT_NOTE};
pub use embed::{embed_interactions, theoretical_embedding, EmbeddingResult, TheoreticalEmbedding};
pub use expected::{
    condition_number, expected_gram, expected_gram_block_form, expected_gram_structure, signal_gap,
    ExpectedGramStructure, SignalGap,
};
pub use gram::{hollowed_gram, HollowedGram, InteractionData};
pub use procrustes::procrustes_align;
pub use select::{select_signal_eigenpairs, SelectedEigenpairs, Selection};

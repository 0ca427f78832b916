//! Choosing the `d` signal eigenpairs of `H(R R^T)`.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::blockmodel::BlockModelSpec;
use crate::error::{Error, Result};
use crate::spectral::expected::{expected_gram_structure, signal_gap};
use crate::spectral::gram::HollowedGram;
use crate::spectral::linalg::symmetric_eigen;

/// Eigenvalue selection rule.
#[derive(Debug, Clone, PartialEq)]
pub enum Selection {
    /// Keep the eigenvalues outside every interval `[-μ_r - radius, -μ_r + radius]`.
    /// Exactly `d` must remain.
    Oracle { mu: Vec<f64>, radius: f64 },
    /// Keep the `d` eigenvalues farthest from the nearest bulk value `-μ_r`.
    /// Agrees with `Oracle` whenever the latter succeeds.
    BulkDistance { mu: Vec<f64> },
    /// No model knowledge: keep the `d` eigenvalues with the widest gap to
    /// their nearest neighbour in the sorted spectrum, ties to the larger
    /// magnitude.
    Empirical,
}

impl Selection {
    /// Oracle rule with `μ_r` and radius `b` computed from the model.
    pub fn oracle(spec: &BlockModelSpec, c_tilde: Option<f64>) -> Result<Self> {
        let gap = signal_gap(spec, c_tilde)?;
        Ok(Selection::Oracle {
            mu: expected_gram_structure(spec).mu,
            radius: gap.b,
        })
    }

    pub fn bulk_distance(spec: &BlockModelSpec) -> Self {
        Selection::BulkDistance {
            mu: expected_gram_structure(spec).mu,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Selection::Oracle { .. } => "oracle",
            Selection::BulkDistance { .. } => "bulk-distance",
            Selection::Empirical => "empirical",
        }
    }
}

/// Selected eigenpairs plus the full spectrum they were picked from.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectedEigenpairs {
    /// `n x d`, orthonormal columns.
    pub vectors: DMatrix<f64>,
    /// Selected eigenvalues, descending.
    pub values: DVector<f64>,
    /// All eigenvalues, descending.
    pub spectrum: DVector<f64>,
    /// Distance from each spectrum entry to its nearest neighbour.
    pub gaps: Vec<f64>,
}

/// Distance from each entry of a descending list to its nearest neighbour.
pub fn neighbour_gaps(sorted_desc: &[f64]) -> Vec<f64> {
    let n = sorted_desc.len();
    (0..n)
        .map(|i| {
            let above = if i > 0 {
                sorted_desc[i - 1] - sorted_desc[i]
            } else {
                f64::INFINITY
            };
            let below = if i + 1 < n {
                sorted_desc[i] - sorted_desc[i + 1]
            } else {
                f64::INFINITY
            };
            above.min(below)
        })
        .collect()
}

fn bulk_distance(lambda: f64, mu: &[f64]) -> f64 {
    mu.iter().map(|&m| (lambda + m).abs()).fold(f64::INFINITY, f64::min)
}

/// Indices (into the descending spectrum) of the `d` entries with the
/// largest score; ties go to the larger magnitude, then the lower index.
fn top_by_score(spectrum: &[f64], scores: &[f64], d: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..spectrum.len()).collect();
    idx.sort_by(|&a, &b| {
        scores[b]
            .total_cmp(&scores[a])
            .then(spectrum[b].abs().total_cmp(&spectrum[a].abs()))
            .then(a.cmp(&b))
    });
    idx.truncate(d);
    idx.sort_unstable();
    idx
}

pub fn select_signal_eigenpairs(gram: &HollowedGram, d: usize, selection: &Selection) -> Result<SelectedEigenpairs> {
    let n = gram.n();
    if d == 0 || d > n {
        return Err(Error::DimensionTooLarge { d, available: n });
    }
    let (values, vectors) = symmetric_eigen(gram.matrix.clone());
    let spectrum: Vec<f64> = values.iter().copied().collect();
    let gaps = neighbour_gaps(&spectrum);
    let chosen: Vec<usize> = match selection {
        Selection::Oracle { mu, radius } => {
            let outside: Vec<usize> = (0..n).filter(|&i| bulk_distance(spectrum[i], mu) > *radius).collect();
            if outside.len() != d {
                return Err(Error::SelectionMismatch {
                    expected: d,
                    found: outside.len(),
                });
            }
            outside
        }
        Selection::BulkDistance { mu } => {
            let scores: Vec<f64> = spectrum.iter().map(|&l| bulk_distance(l, mu)).collect();
            top_by_score(&spectrum, &scores, d)
        }
        Selection::Empirical => top_by_score(&spectrum, &gaps, d),
    };
    Ok(SelectedEigenpairs {
        vectors: vectors.select_columns(&chosen),
        values: DVector::from_iterator(d, chosen.iter().map(|&i| spectrum[i])),
        spectrum: values,
        gaps,
    })
}

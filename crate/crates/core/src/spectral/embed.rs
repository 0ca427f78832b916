use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::blockmodel::BlockModelSpec;
use crate::error::{Error, Result};
use crate::spectral::gram::InteractionData;
use crate::spectral::linalg::thin_svd_tall;
use crate::spectral::select::{select_signal_eigenpairs, Selection};

/// Output of [`embed_interactions`].
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingResult {
    /// `Û`, `n x d`.
    pub u_hat: DMatrix<f64>,
    /// `Λ̂`, descending.
    pub lambda_hat: DVector<f64>,
    /// `Ŝ`, descending.
    pub s_hat: DVector<f64>,
    /// `V̂`, `m x d`.
    pub v_hat: DMatrix<f64>,
    /// `X̂`, `d x d`, with `Û^T R = X̂ Ŝ V̂^T`.
    pub x_hat: DMatrix<f64>,
    /// Rows of `V̂ Ŝ`, `m x d`.
    pub embedding: DMatrix<f64>,
    /// Full spectrum of `H(R R^T)`, descending.
    pub spectrum: DVector<f64>,
    /// Nearest-neighbour gap of each spectrum entry.
    pub gaps: Vec<f64>,
}

impl EmbeddingResult {
    pub fn d(&self) -> usize {
        self.s_hat.len()
    }

    /// `||Û^T R - X̂ Ŝ V̂^T||_F`.
    pub fn svd_residual<D: InteractionData + ?Sized>(&self, r: &D) -> f64 {
        let projected = r.left_project(&self.u_hat);
        let rebuilt = &self.x_hat * DMatrix::from_diagonal(&self.s_hat) * self.v_hat.transpose();
        (projected - rebuilt).norm()
    }
}

/// Embeds the `m` interactions of `r` in `R^d`.
///
/// The embedding is formed as `R^T (Û X̂)`, one column of `R` at a time,
/// so interactions with identical member sets land on bitwise-identical rows.
pub fn embed_interactions<D: InteractionData + ?Sized>(
    r: &D,
    d: usize,
    selection: &Selection,
) -> Result<EmbeddingResult> {
    let m = r.ncols();
    if d > m {
        return Err(Error::DimensionTooLarge { d, available: m });
    }
    let gram = r.hollowed_gram();
    let selected = select_signal_eigenpairs(&gram, d, selection)?;
    let projected = r.left_project(&selected.vectors);
    // Û^T R = (V̂ Ŝ X̂^T)^T
    let (v_hat, s_hat, x_hat) = thin_svd_tall(projected.transpose());
    let embedding = r.left_project(&(&selected.vectors * &x_hat)).transpose();
    Ok(EmbeddingResult {
        u_hat: selected.vectors,
        lambda_hat: selected.values,
        s_hat,
        v_hat,
        x_hat,
        embedding,
        spectrum: selected.spectrum,
        gaps: selected.gaps,
    })
}

/// Thin SVD `Γ = U S V^T` of the mean matrix, truncated to `d` columns.
#[derive(Debug, Clone, PartialEq)]
pub struct TheoreticalEmbedding {
    /// `n x d`.
    pub u: DMatrix<f64>,
    /// Descending; entries past `rank` are numerically zero.
    pub s: DVector<f64>,
    /// `m x d`.
    pub v: DMatrix<f64>,
    pub rank: usize,
}

impl TheoreticalEmbedding {
    /// Rows of `V S`: the noiseless interaction positions.
    pub fn scaled(&self) -> DMatrix<f64> {
        let mut out = self.v.clone();
        for (mut col, &s) in out.column_iter_mut().zip(self.s.iter()) {
            col *= s;
        }
        out
    }
}

/// Computed from the `d x m` matrix `B^{1/2} T`: with `B^{1/2} T = Y S V^T`
/// and `Z B^{1/2}` having orthonormal columns, `U = Z B^{1/2} Y`.
pub fn theoretical_embedding(spec: &BlockModelSpec) -> Result<TheoreticalEmbedding> {
    let d = spec.d();
    let m = spec.m();
    if d > m {
        return Err(Error::DimensionTooLarge { d, available: m });
    }
    let (v, s, y) = thin_svd_tall(spec.scaled_types().transpose());
    let sizes = spec.class_sizes();
    let u = DMatrix::from_fn(spec.n(), d, |i, c| {
        let r = spec.class_of(i);
        y[(r, c)] / libm::sqrt(sizes[r] as f64)
    });
    let tol = s.iter().copied().fold(0.0, f64::max) * (m.max(d) as f64) * f64::EPSILON;
    let rank = s.iter().filter(|&&x| x > tol).count();
    Ok(TheoreticalEmbedding { u, s, v, rank })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blockmodel::TypeMatrix;
    use crate::fixtures::{figure_one, figure_one_labels};
    use crate::spectral::procrustes::procrustes_align;
    use alloc::vec;

    fn spec() -> BlockModelSpec {
        let t = TypeMatrix::from_columns(
            2,
            &[
                vec![2, 0],
                vec![0, 2],
                vec![1, 1],
                vec![2, 0],
                vec![1, 1],
                vec![0, 2],
                vec![2, 1],
            ],
        )
        .unwrap();
        BlockModelSpec::new(&[1, 1, 1, 2, 2, 2], t).unwrap()
    }

    #[test]
    fn noiseless_rows_match_theory() {
        let spec = spec();
        let gamma = spec.mean_matrix().gamma;
        let emb = embed_interactions(&gamma, 2, &Selection::bulk_distance(&spec)).unwrap();
        let theo = theoretical_embedding(&spec).unwrap();
        let w = procrustes_align(&emb.embedding, &theo.scaled()).unwrap();
        assert!((&emb.embedding - theo.scaled() * w).amax() < 1e-10);
        // columns 0 and 3 share a type
        let diff = emb.embedding.row(0) - emb.embedding.row(3);
        assert!(diff.norm() < 1e-10);
    }

    #[test]
    fn orthonormal_factors_and_residual() {
        let r = figure_one().incidence_matrix();
        let emb = embed_interactions(&r, 2, &Selection::Empirical).unwrap();
        assert!((emb.u_hat.tr_mul(&emb.u_hat) - DMatrix::identity(2, 2)).amax() < 1e-10);
        assert!((emb.v_hat.tr_mul(&emb.v_hat) - DMatrix::identity(2, 2)).amax() < 1e-10);
        assert!(emb.svd_residual(&r) <= 1e-9 * 2.0 * 3.0);
        assert!(emb.s_hat[0] >= emb.s_hat[1] && emb.s_hat[1] >= 0.0);
        let vs = &emb.v_hat * DMatrix::from_diagonal(&emb.s_hat);
        assert!((vs - &emb.embedding).amax() < 1e-10);
        assert!(embed_interactions(&r, 5, &Selection::Empirical).is_err());
    }

    #[test]
    fn separation_identity() {
        let spec = BlockModelSpec::from_hypergraph(&figure_one(), &figure_one_labels()).unwrap();
        let vs = theoretical_embedding(&spec).unwrap().scaled();
        for p in 0..spec.m() {
            for q in 0..spec.m() {
                let lhs = (vs.row(p) - vs.row(q)).norm_squared();
                let rhs: f64 = (0..2)
                    .map(|r| {
                        let diff = f64::from(spec.types().get(r, p)) - f64::from(spec.types().get(r, q));
                        diff * diff / 3.0
                    })
                    .sum();
                assert!((lhs - rhs).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn singular_values_against_dense_svd() {
        let spec = spec();
        let theo = theoretical_embedding(&spec).unwrap();
        let dense = spec.mean_matrix().gamma.singular_values();
        let mut dense: Vec<f64> = dense.iter().copied().collect();
        dense.sort_by(|a, b| b.total_cmp(a));
        assert!((theo.s[0] - dense[0]).abs() < 1e-10);
        assert!((theo.s[1] - dense[1]).abs() < 1e-10);
        assert!(dense[2..].iter().all(|x| x.abs() < 1e-10));
        assert_eq!(theo.rank, 2);
    }
}

//! Error norms of one embedding against its noiseless counterpart.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::blockmodel::BlockModelSpec;
use crate::error::{Error, Result};
use crate::spectral::embed::{EmbeddingResult, TheoreticalEmbedding};
use crate::spectral::expected::expected_gram;
use crate::spectral::gram::InteractionData;
use crate::spectral::linalg::{symmetric_eigenvalues, symmetric_spectral_norm, two_to_infinity};
use crate::spectral::procrustes::procrustes_align;

/// How the alignment matrices are chosen.
pub const ALIGNMENT_NOTE: &str = "W is the orthogonal Procrustes minimizer of ||V̂Ŝ - VSW||_F \
and W* the minimizer of ||V̂ - VW*||_F; both are the best orthogonal alignments, so every \
reported error is no larger than under any other orthogonal alignment.";

const COLUMN_BLOCK: usize = 256;

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsReport {
    /// `||R - Γ||_2`.
    pub norm_r_gamma: f64,
    /// `||H(R R^T) - H(E[R R^T])||_2`.
    pub norm_hollow: f64,
    /// `||S W - W* Ŝ||_F`.
    pub norm_sw: f64,
    /// `||S^{-1} W - W* Ŝ^{-1}||_F`; infinite if a singular value is zero.
    pub norm_sinv: f64,
    /// `||V̂ - V W*||_{2->inf}`.
    pub norm_v_2inf: f64,
    /// `||V̂ Ŝ - V S W||_{2->inf}`.
    pub norm_vs_2inf: f64,
    /// `||U^T (R - Γ)||_F`, zero up to rounding.
    pub identical_actions: f64,
    /// Smallest distance between rows of `V S` for distinct type vectors;
    /// infinite when all types coincide.
    pub min_type_distance: f64,
    pub w: DMatrix<f64>,
    pub w_star: DMatrix<f64>,
}

impl DiagnosticsReport {
    /// The six headline metrics, by name.
    pub fn metrics(&self) -> [(&'static str, f64); 6] {
        [
            ("norm_R_Gamma", self.norm_r_gamma),
            ("norm_hollow", self.norm_hollow),
            ("norm_SW", self.norm_sw),
            ("norm_Sinv", self.norm_sinv),
            ("norm_V_2inf", self.norm_v_2inf),
            ("norm_VS_2inf", self.norm_vs_2inf),
        ]
    }
}

/// `(R - Γ)(R - Γ)^T`, accumulated over blocks of columns.
fn residual_gram<D: InteractionData + ?Sized>(r: &D, spec: &BlockModelSpec) -> DMatrix<f64> {
    let n = r.nrows();
    let m = r.ncols();
    let mut gram = DMatrix::zeros(n, n);
    // rows of `block` are columns of R - Γ
    let mut block = DMatrix::zeros(COLUMN_BLOCK.min(m.max(1)), n);
    let mut data = vec![0.0; n];
    let mut mean = vec![0.0; n];
    let mut start = 0;
    while start < m {
        let width = COLUMN_BLOCK.min(m - start);
        if block.nrows() != width {
            block = DMatrix::zeros(width, n);
        }
        for c in 0..width {
            r.write_column(start + c, &mut data);
            spec.mean_column(start + c, &mut mean);
            for i in 0..n {
                block[(c, i)] = data[i] - mean[i];
            }
        }
        gram.gemm_tr(1.0, &block, &block, 1.0);
        start += width;
    }
    gram
}

/// `||R - Γ||_2`, without materializing `Γ`.
pub fn residual_norm<D: InteractionData + ?Sized>(r: &D, spec: &BlockModelSpec) -> f64 {
    let ev = symmetric_eigenvalues(residual_gram(r, spec));
    libm::sqrt(ev.first().copied().unwrap_or(0.0).max(0.0))
}

/// `||U^T (R - Γ)||_F`.
pub fn identical_actions_residual<D: InteractionData + ?Sized>(r: &D, spec: &BlockModelSpec, u: &DMatrix<f64>) -> f64 {
    let projected = r.left_project(u);
    let mut mean = vec![0.0; r.nrows()];
    let mut total = 0.0;
    for p in 0..r.ncols() {
        spec.mean_column(p, &mut mean);
        let mean = DVector::from_column_slice(&mean);
        let diff = projected.column(p) - u.tr_mul(&mean);
        total += diff.norm_squared();
    }
    libm::sqrt(total)
}

/// `min ||(VS)_p - (VS)_q||` over distinct type vectors, evaluated through
/// `sqrt(Σ_r (τ_rp - τ_rq)^2 / n_r)`.
pub fn min_type_distance(spec: &BlockModelSpec) -> f64 {
    let mut distinct: Vec<&[u32]> = spec.types().columns().collect();
    distinct.sort_unstable();
    distinct.dedup();
    let sizes = spec.class_sizes();
    let mut best = f64::INFINITY;
    for (a, x) in distinct.iter().enumerate() {
        for y in &distinct[a + 1..] {
            let sq: f64 = x
                .iter()
                .zip(y.iter())
                .zip(sizes)
                .map(|((&s, &t), &nr)| {
                    let diff = f64::from(s) - f64::from(t);
                    diff * diff / nr as f64
                })
                .sum();
            best = best.min(sq);
        }
    }
    libm::sqrt(best)
}

fn scale_columns(m: &DMatrix<f64>, s: &DVector<f64>) -> DMatrix<f64> {
    let mut out = m.clone();
    for (mut col, &x) in out.column_iter_mut().zip(s.iter()) {
        col *= x;
    }
    out
}

fn inverse(s: &DVector<f64>) -> Option<DVector<f64>> {
    if s.iter().any(|&x| x <= 0.0) {
        None
    } else {
        Some(s.map(|x| 1.0 / x))
    }
}

pub fn diagnostics<D: InteractionData + ?Sized>(
    r: &D,
    spec: &BlockModelSpec,
    embedding: &EmbeddingResult,
    theo: &TheoreticalEmbedding,
) -> Result<DiagnosticsReport> {
    let d = spec.d();
    if r.nrows() != spec.n() || r.ncols() != spec.m() {
        return Err(Error::DimensionMismatch("data matrix does not match the block model"));
    }
    if embedding.d() != d || embedding.v_hat.nrows() != spec.m() {
        return Err(Error::DimensionMismatch("embedding does not match the block model"));
    }
    if theo.v.shape() != embedding.v_hat.shape() || theo.u.nrows() != spec.n() {
        return Err(Error::DimensionMismatch(
            "theoretical embedding does not match the block model",
        ));
    }

    let (expected, _) = expected_gram(spec);
    let norm_hollow = symmetric_spectral_norm(&(r.hollowed_gram().matrix - expected));

    let vs = theo.scaled();
    let w = procrustes_align(&embedding.embedding, &vs)?;
    let w_star = procrustes_align(&embedding.v_hat, &theo.v)?;

    let s = DMatrix::from_diagonal(&theo.s);
    let s_hat = DMatrix::from_diagonal(&embedding.s_hat);
    let norm_sw = (&s * &w - &w_star * &s_hat).norm();
    let norm_sinv = match (inverse(&theo.s), inverse(&embedding.s_hat)) {
        (Some(si), Some(shi)) => (DMatrix::from_diagonal(&si) * &w - &w_star * DMatrix::from_diagonal(&shi)).norm(),
        _ => f64::INFINITY,
    };

    Ok(DiagnosticsReport {
        norm_r_gamma: residual_norm(r, spec),
        norm_hollow,
        norm_sw,
        norm_sinv,
        norm_v_2inf: two_to_infinity(&(&embedding.v_hat - &theo.v * &w_star)),
        norm_vs_2inf: two_to_infinity(&(&embedding.embedding - scale_columns(&theo.v, &theo.s) * &w)),
        identical_actions: identical_actions_residual(r, spec, &theo.u),
        min_type_distance: min_type_distance(spec),
        w,
        w_star,
    })
}

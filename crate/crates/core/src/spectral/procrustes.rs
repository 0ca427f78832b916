use nalgebra::{DMatrix, SVD};

use crate::error::{Error, Result};

/// Orthogonal `W` minimizing `||a - target * W||_F`, from the SVD
/// `target^T a = P Σ Q^T` as `W = P Q^T`.
pub fn procrustes_align(a: &DMatrix<f64>, target: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if a.shape() != target.shape() {
        return Err(Error::DimensionMismatch("procrustes operands differ in shape"));
    }
    let cross = target.tr_mul(a);
    let svd = SVD::new(cross, true, true);
    let p = svd.u.expect("left singular vectors requested");
    let qt = svd.v_t.expect("right singular vectors requested");
    Ok(p * qt)
}

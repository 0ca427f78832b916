//! Dense helpers shared by the spectral pipeline.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};

use crate::rng::mix;

/// Flips each column so its largest-magnitude entry is positive (ties go to
/// the lowest index). Returns which columns were flipped.
pub fn normalize_signs(m: &mut DMatrix<f64>) -> Vec<bool> {
    let mut flips = Vec::with_capacity(m.ncols());
    for mut col in m.column_iter_mut() {
        let mut best = 0;
        for (i, x) in col.iter().enumerate() {
            if x.abs() > col[best].abs() {
                best = i;
            }
        }
        let flip = !col.is_empty() && col[best] < 0.0;
        if flip {
            col.neg_mut();
        }
        flips.push(flip);
    }
    flips
}

pub(crate) fn apply_flips(m: &mut DMatrix<f64>, flips: &[bool]) {
    for (mut col, &f) in m.column_iter_mut().zip(flips) {
        if f {
            col.neg_mut();
        }
    }
}

/// Eigendecomposition of a symmetric matrix with eigenvalues in descending
/// order and eigenvector signs normalized.
pub fn symmetric_eigen(m: DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = eig.eigenvectors.select_columns(&order);
    normalize_signs(&mut vectors);
    (values, vectors)
}

/// Eigenvalues of a symmetric matrix, descending.
pub fn symmetric_eigenvalues(m: DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Thin SVD `a = left * diag(values) * right^T` of a tall `m x d` matrix,
/// singular values descending, signs normalized on `left`.
pub(crate) fn thin_svd_tall(a: DMatrix<f64>) -> (DMatrix<f64>, DVector<f64>, DMatrix<f64>) {
    debug_assert!(a.nrows() >= a.ncols());
    let d = a.ncols();
    let svd = SVD::new(a, true, true);
    let u = svd.u.expect("left singular vectors requested");
    let vt = svd.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| {
        svd.singular_values[j]
            .total_cmp(&svd.singular_values[i])
            .then(i.cmp(&j))
    });
    let values = DVector::from_iterator(d, order.iter().map(|&i| svd.singular_values[i]));
    let mut left = u.select_columns(&order);
    let mut right = vt.transpose().select_columns(&order);
    let flips = normalize_signs(&mut left);
    apply_flips(&mut right, &flips);
    (left, values, right)
}

/// Spectral norm via the dense eigensolver on the smaller Gram matrix.
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let gram = if m.nrows() <= m.ncols() {
        m * m.transpose()
    } else {
        m.transpose() * m
    };
    libm::sqrt(symmetric_eigenvalues(gram)[0].max(0.0))
}

/// Spectral norm of a symmetric matrix: the largest eigenvalue magnitude.
pub fn symmetric_spectral_norm(m: &DMatrix<f64>) -> f64 {
    let ev = symmetric_eigenvalues(m.clone());
    match (ev.first(), ev.last()) {
        (Some(hi), Some(lo)) => hi.abs().max(lo.abs()),
        _ => 0.0,
    }
}

/// Spectral norm by power iteration on `m^T m`, started from a fixed
/// pseudo-random vector. Stops when the Rayleigh quotient changes by less
/// than `tol` relative, or after `max_iter` steps.
pub fn spectral_norm_power(m: &DMatrix<f64>, tol: f64, max_iter: usize) -> f64 {
    let cols = m.ncols();
    if m.is_empty() {
        return 0.0;
    }
    let mut x = DVector::from_fn(cols, |i, _| {
        0.5 + (mix(&[i as u64, 0x5eed]) >> 11) as f64 / (1u64 << 53) as f64
    });
    x /= x.norm();
    let mut previous = 0.0;
    for _ in 0..max_iter {
        let y = m * &x;
        let rayleigh = y.norm_squared();
        let mut z = m.tr_mul(&y);
        let norm = z.norm();
        if norm == 0.0 {
            return 0.0;
        }
        z /= norm;
        x = z;
        if (rayleigh - previous).abs() <= tol * rayleigh {
            previous = rayleigh;
            break;
        }
        previous = rayleigh;
    }
    libm::sqrt((m * &x).norm_squared().max(previous))
}

/// The 2-to-infinity norm: the largest Euclidean row norm.
pub fn two_to_infinity(m: &DMatrix<f64>) -> f64 {
    m.row_iter().map(|r| r.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_convention() {
        let mut m = DMatrix::from_row_slice(3, 2, &[0.1, 2.0, -0.5, -2.0, 0.2, 1.0]);
        let flips = normalize_signs(&mut m);
        assert_eq!(flips, [true, false]);
        assert_eq!(m[(1, 0)], 0.5);
        // ties resolve to the first index, which is positive already
        assert_eq!(m[(0, 1)], 2.0);
    }

    #[test]
    fn eigen_descending() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let (v, u) = symmetric_eigen(m);
        assert!((v[0] - 3.0).abs() < 1e-12 && (v[1] - 1.0).abs() < 1e-12);
        assert!(u[(0, 0)] > 0.0);
    }

    #[test]
    fn norms_agree_on_small_matrix() {
        let m = DMatrix::from_fn(5, 7, |i, j| libm::sin((i * 7 + j) as f64));
        let dense = spectral_norm(&m);
        let power = spectral_norm_power(&m, 1e-15, 100_000);
        let svd = m.singular_values().max();
        assert!((dense - svd).abs() < 1e-10);
        assert!((power - svd).abs() < 1e-8);
        assert_eq!(
            two_to_infinity(&DMatrix::from_row_slice(2, 2, &[3.0, 4.0, 1.0, 0.0])),
            5.0
        );
    }
}

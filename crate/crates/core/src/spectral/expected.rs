//! The expected hollowed Gram matrix of a Hyper-SBM and its exact spectrum.
//!
//! `H(E[R R^T])` acts on two orthogonal invariant subspaces: on
//! `range(Z)` it equals `Z B Σ_T B Z^T` with `Σ_T = T T^T - diag(T j)`,
//! giving the `d` eigenvalues of `B^{1/2} Σ_T B^{1/2}`; on the class-centred
//! vectors of class `r` it is `-μ_r` with multiplicity `n_r - 1`, where
//! `μ_r = Σ_p τ_rp (τ_rp - 1) / (n_r (n_r - 1))`.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::blockmodel::BlockModelSpec;
use crate::error::{Error, Result};
use crate::spectral::linalg::symmetric_eigen;

/// Closed-form eigenstructure of `H(E[R R^T])`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedGramStructure {
    /// `Σ_T`, `d x d`.
    pub sigma_t: DMatrix<f64>,
    /// `B^{1/2} Σ_T B^{1/2}`.
    pub signal_matrix: DMatrix<f64>,
    /// Eigenvalues of `signal_matrix`, descending.
    pub signal_eigenvalues: DVector<f64>,
    /// `μ_r` per class; the bulk eigenvalues are `-μ_r`.
    pub mu: Vec<f64>,
    /// `n_r - 1` per class.
    pub multiplicities: Vec<usize>,
    /// Orthonormal eigenvectors for the signal eigenvalues, `n x d`, inside
    /// `range(Z)`.
    pub signal_basis: DMatrix<f64>,
}

impl ExpectedGramStructure {
    /// Full spectrum as a multiset, descending.
    pub fn spectrum(&self) -> Vec<f64> {
        let mut all: Vec<f64> = self.signal_eigenvalues.iter().copied().collect();
        for (&mu, &mult) in self.mu.iter().zip(&self.multiplicities) {
            all.extend(core::iter::repeat_n(-mu, mult));
        }
        all.sort_by(|a, b| b.total_cmp(a));
        all
    }
}

/// `(T T^T)` as floats.
fn type_outer(spec: &BlockModelSpec) -> DMatrix<f64> {
    let d = spec.d();
    let mut out = DMatrix::zeros(d, d);
    for tau in spec.types().columns() {
        for r in 0..d {
            for s in 0..d {
                out[(r, s)] += f64::from(tau[r]) * f64::from(tau[s]);
            }
        }
    }
    out
}

fn mu(spec: &BlockModelSpec) -> Vec<f64> {
    let sizes = spec.class_sizes();
    (0..spec.d())
        .map(|r| {
            let nr = sizes[r] as f64;
            if sizes[r] < 2 {
                return 0.0;
            }
            let pairs: f64 = spec
                .types()
                .columns()
                .map(|tau| {
                    let t = f64::from(tau[r]);
                    t * (t - 1.0)
                })
                .sum();
            pairs / (nr * (nr - 1.0))
        })
        .collect()
}

pub fn expected_gram_structure(spec: &BlockModelSpec) -> ExpectedGramStructure {
    let d = spec.d();
    let sizes = spec.class_sizes();
    let totals = spec.types().class_totals();
    let mut sigma_t = type_outer(spec);
    for r in 0..d {
        sigma_t[(r, r)] -= totals[r] as f64;
    }
    let sqrt_b = DVector::from_iterator(d, sizes.iter().map(|&s| 1.0 / libm::sqrt(s as f64)));
    let signal_matrix = DMatrix::from_fn(d, d, |r, s| sqrt_b[r] * sigma_t[(r, s)] * sqrt_b[s]);
    let (signal_eigenvalues, y) = symmetric_eigen(signal_matrix.clone());
    // Z B^{1/2} has orthonormal columns, so it carries eigenvectors of the
    // d x d problem to eigenvectors in range(Z).
    let signal_basis = DMatrix::from_fn(spec.n(), d, |i, c| {
        let r = spec.class_of(i);
        y[(r, c)] * sqrt_b[r]
    });
    ExpectedGramStructure {
        sigma_t,
        signal_matrix,
        signal_eigenvalues,
        mu: mu(spec),
        multiplicities: sizes.iter().map(|&s| s - 1).collect(),
        signal_basis,
    }
}

/// Assembles `H(E[R R^T])` entry by entry: zero on the diagonal, `μ_r`
/// between distinct nodes of class `r`, and `Σ_p τ_rp τ_sp / (n_r n_s)`
/// across classes `r != s`. Returned together with its closed-form
/// eigenstructure.
pub fn expected_gram(spec: &BlockModelSpec) -> (DMatrix<f64>, ExpectedGramStructure) {
    let n = spec.n();
    let sizes = spec.class_sizes();
    let outer = type_outer(spec);
    let mu = mu(spec);
    let matrix = DMatrix::from_fn(n, n, |i, j| {
        let (r, s) = (spec.class_of(i), spec.class_of(j));
        if i == j {
            0.0
        } else if r == s {
            mu[r]
        } else {
            outer[(r, s)] / (sizes[r] as f64 * sizes[s] as f64)
        }
    });
    (matrix, expected_gram_structure(spec))
}

/// The same matrix through the invariant-subspace form
/// `Z B Σ_T B Z^T - ⊕_r μ_r (I - J / n_r)`.
pub fn expected_gram_block_form(spec: &BlockModelSpec) -> DMatrix<f64> {
    let structure = expected_gram_structure(spec);
    let n = spec.n();
    let d = spec.d();
    let sizes = spec.class_sizes();
    let z = DMatrix::from_fn(n, d, |i, r| if spec.class_of(i) == r { 1.0 } else { 0.0 });
    let b = DMatrix::from_diagonal(&DVector::from_iterator(d, sizes.iter().map(|&s| 1.0 / s as f64)));
    let zb = &z * &b;
    let mut out = &zb * &structure.sigma_t * zb.transpose();
    for i in 0..n {
        for j in 0..n {
            let r = spec.class_of(i);
            if r != spec.class_of(j) {
                continue;
            }
            let centred = if i == j { 1.0 } else { 0.0 } - 1.0 / sizes[r] as f64;
            out[(i, j)] -= structure.mu[r] * centred;
        }
    }
    out
}

/// Signal strength `Δ` and the trapping radius `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalGap {
    /// `min_{r,s} |λ_r(B^{1/2} Σ_T B^{1/2}) + μ_s|`.
    pub delta: f64,
    /// `7 sqrt(m ln(m) k_max k̄ / c̃)`.
    pub b: f64,
    pub k_max: u32,
    pub k_bar: f64,
    pub c_tilde: f64,
    /// Whether `Δ >= 3b`.
    pub strong_signal: bool,
}

/// Computes `Δ` and `b`. `c_tilde` defaults to `min_r n_r / n` and must lie in
/// `(0, min_r n_r / n]`.
pub fn signal_gap(spec: &BlockModelSpec, c_tilde: Option<f64>) -> Result<SignalGap> {
    let balance = spec.balance();
    let c_tilde = c_tilde.unwrap_or(balance);
    if !(c_tilde > 0.0 && c_tilde <= balance) {
        return Err(Error::InvalidParameter("c_tilde must lie in (0, min_r n_r / n]"));
    }
    let structure = expected_gram_structure(spec);
    let delta = structure
        .signal_eigenvalues
        .iter()
        .flat_map(|&l| structure.mu.iter().map(move |&mu| (l + mu).abs()))
        .fold(f64::INFINITY, f64::min);
    let m = spec.m() as f64;
    let k_max = spec.k_max();
    let k_bar = spec.k_bar();
    let b = 7.0 * libm::sqrt(m * libm::log(m) * f64::from(k_max) * k_bar / c_tilde);
    Ok(SignalGap {
        delta,
        b,
        k_max,
        k_bar,
        c_tilde,
        strong_signal: delta >= 3.0 * b,
    })
}

/// `κ = σ_1(Γ) / σ_d(Γ)`; infinite when `Γ` has rank below `d`.
pub fn condition_number(spec: &BlockModelSpec) -> f64 {
    let sv = spec.scaled_types().singular_values();
    let max = sv.max();
    let min = sv.min();
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blockmodel::TypeMatrix;
    use crate::spectral::linalg::symmetric_eigenvalues;
    use alloc::vec;

    #[test]
    fn one_class_pair() {
        let spec = BlockModelSpec::new(&[1, 1], TypeMatrix::from_columns(1, &[vec![2]]).unwrap()).unwrap();
        let (g, s) = expected_gram(&spec);
        assert_eq!(s.mu, [1.0]);
        assert_eq!(g, DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]));
    }

    #[test]
    fn two_saturated_classes() {
        let t = TypeMatrix::from_columns(2, &[vec![2, 0], vec![0, 2]]).unwrap();
        let spec = BlockModelSpec::new(&[1, 1, 2, 2], t).unwrap();
        let (g, s) = expected_gram(&spec);
        assert_eq!(s.mu, [1.0, 1.0]);
        assert_eq!(g[(0, 2)], 0.0);
        assert_eq!(g[(1, 3)], 0.0);
        assert_eq!(s.sigma_t, DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 2.0]));
        assert!((s.signal_eigenvalues[0] - 1.0).abs() < 1e-12);
        assert!((s.signal_eigenvalues[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn assembly_routes_and_dense_spectrum_agree() {
        let t = TypeMatrix::from_columns(2, &[vec![2, 1], vec![0, 3], vec![1, 1], vec![3, 0]]).unwrap();
        let spec = BlockModelSpec::new(&[1, 2, 1, 2, 2, 1, 2], t).unwrap();
        let (g, s) = expected_gram(&spec);
        assert!((&g - expected_gram_block_form(&spec)).amax() < 1e-12);
        let dense = symmetric_eigenvalues(g);
        for (a, b) in dense.iter().zip(s.spectrum()) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
        let basis = &s.signal_basis;
        assert!((basis.tr_mul(basis) - DMatrix::identity(2, 2)).amax() < 1e-12);
    }

    #[test]
    fn delta_matches_pairwise_minimum() {
        let t = TypeMatrix::from_columns(2, &[vec![3, 0], vec![0, 2], vec![2, 0]]).unwrap();
        let spec = BlockModelSpec::new(&[1, 1, 1, 2, 2, 2], t).unwrap();
        let s = expected_gram_structure(&spec);
        assert_eq!(s.sigma_t[(0, 1)], 0.0);
        let mut brute = f64::INFINITY;
        for r in 0..2 {
            for q in 0..2 {
                brute = brute.min((s.signal_eigenvalues[r] + s.mu[q]).abs());
            }
        }
        let gap = signal_gap(&spec, None).unwrap();
        assert_eq!(gap.delta, brute);
        assert_eq!(gap.k_max, 3);
        assert!((gap.k_bar - 7.0 / 3.0).abs() < 1e-15);
        assert_eq!(gap.c_tilde, 0.5);
        assert!(signal_gap(&spec, Some(0.6)).is_err());
        assert!(signal_gap(&spec, Some(0.0)).is_err());
    }
}

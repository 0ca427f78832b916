use alloc::vec;

use nalgebra::DMatrix;

use crate::hypergraph::IncidenceMatrix;

/// `H(R R^T) = R R^T - diag(R R^T)`: symmetric with a zero diagonal. Entry
/// `(i, j)` counts the interactions containing both `i` and `j` when `R`
/// is binary.
#[derive(Debug, Clone, PartialEq)]
pub struct HollowedGram {
    pub matrix: DMatrix<f64>,
}

impl HollowedGram {
    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }
}

/// The operations the embedding pipeline needs from an `n x m` data matrix.
/// Implemented by the sparse [`IncidenceMatrix`] and by dense real matrices
/// (the latter so the noiseless case `R = Γ` runs through the same code).
pub trait InteractionData {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;
    fn hollowed_gram(&self) -> HollowedGram;
    /// `a^T R` for an `n x k` matrix `a`. Column `p` of the result depends
    /// only on column `p` of `R`.
    fn left_project(&self, a: &DMatrix<f64>) -> DMatrix<f64>;
    fn write_column(&self, p: usize, out: &mut [f64]);
    fn frobenius_norm(&self) -> f64;
}

impl InteractionData for IncidenceMatrix {
    fn nrows(&self) -> usize {
        IncidenceMatrix::nrows(self)
    }

    fn ncols(&self) -> usize {
        IncidenceMatrix::ncols(self)
    }

    /// Accumulated one interaction at a time: each column adds a clique on
    /// its members.
    fn hollowed_gram(&self) -> HollowedGram {
        let n = IncidenceMatrix::nrows(self);
        let mut upper = vec![0u32; n * n];
        for col in self.columns() {
            for (a, &i) in col.iter().enumerate() {
                let row = &mut upper[i * n..(i + 1) * n];
                for &j in &col[a + 1..] {
                    row[j] += 1;
                }
            }
        }
        let matrix = DMatrix::from_fn(n, n, |i, j| {
            let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
            f64::from(upper[lo * n + hi])
        });
        HollowedGram { matrix }
    }

    fn left_project(&self, a: &DMatrix<f64>) -> DMatrix<f64> {
        let k = a.ncols();
        let mut out = DMatrix::zeros(k, IncidenceMatrix::ncols(self));
        for (p, col) in self.columns().enumerate() {
            for c in 0..k {
                let mut acc = 0.0;
                for &i in col {
                    acc += a[(i, c)];
                }
                out[(c, p)] = acc;
            }
        }
        out
    }

    fn write_column(&self, p: usize, out: &mut [f64]) {
        out.fill(0.0);
        for &i in self.column(p) {
            out[i] = 1.0;
        }
    }

    fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.nnz() as f64)
    }
}

impl InteractionData for DMatrix<f64> {
    fn nrows(&self) -> usize {
        self.nrows()
    }

    fn ncols(&self) -> usize {
        self.ncols()
    }

    fn hollowed_gram(&self) -> HollowedGram {
        let mut matrix = self * self.transpose();
        matrix.fill_diagonal(0.0);
        HollowedGram { matrix }
    }

    fn left_project(&self, a: &DMatrix<f64>) -> DMatrix<f64> {
        a.tr_mul(self)
    }

    fn write_column(&self, p: usize, out: &mut [f64]) {
        out.copy_from_slice(self.column(p).as_slice());
    }

    fn frobenius_norm(&self) -> f64 {
        self.norm()
    }
}

pub fn hollowed_gram<D: InteractionData + ?Sized>(r: &D) -> HollowedGram {
    r.hollowed_gram()
}

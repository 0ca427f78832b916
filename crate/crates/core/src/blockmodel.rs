//! Hyper-SBM ground truth: node classes, type vectors and the mean matrix.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::hypergraph::InteractionHypergraph;

/// The `d x m` matrix of type vectors. Column `p` counts, per class, how
/// many nodes of that class interaction `p` contains.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TypeMatrix {
    d: usize,
    data: Vec<u32>,
}

impl TypeMatrix {
    pub fn from_columns(d: usize, columns: &[Vec<u32>]) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidBlockModel("at least one class is required"));
        }
        let mut data = Vec::with_capacity(d * columns.len());
        for c in columns {
            if c.len() != d {
                return Err(Error::DimensionMismatch("type vector length differs from d"));
            }
            data.extend_from_slice(c);
        }
        Ok(Self { d, data })
    }

    pub(crate) fn from_raw(d: usize, data: Vec<u32>) -> Self {
        debug_assert_eq!(data.len() % d, 0);
        Self { d, data }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> usize {
        self.data.len() / self.d
    }

    pub fn column(&self, p: usize) -> &[u32] {
        &self.data[p * self.d..(p + 1) * self.d]
    }

    pub fn columns(&self) -> impl ExactSizeIterator<Item = &[u32]> + '_ {
        self.data.chunks_exact(self.d)
    }

    pub fn get(&self, r: usize, p: usize) -> u32 {
        self.data[p * self.d + r]
    }

    /// `k_p`, the column sums.
    pub fn interaction_sizes(&self) -> Vec<u32> {
        self.columns().map(|c| c.iter().sum()).collect()
    }

    /// The binarized type matrix: entry 1 iff the class is represented.
    pub fn basic(&self) -> TypeMatrix {
        TypeMatrix {
            d: self.d,
            data: self.data.iter().map(|&t| u32::from(t > 0)).collect(),
        }
    }

    /// Row sums, i.e. the vector `T j`.
    pub fn class_totals(&self) -> Vec<u64> {
        let mut out = vec![0u64; self.d];
        for c in self.columns() {
            for (o, &t) in out.iter_mut().zip(c) {
                *o += u64::from(t);
            }
        }
        out
    }

    /// Labels interactions by distinct type vector, numbered `1..=K` in
    /// order of first appearance. Returns the labels and `K`.
    pub fn distinct_type_labels(&self) -> (Vec<usize>, usize) {
        let mut seen: BTreeMap<&[u32], usize> = BTreeMap::new();
        let labels = self
            .columns()
            .map(|c| {
                let next = seen.len() + 1;
                *seen.entry(c).or_insert(next)
            })
            .collect();
        (labels, seen.len())
    }
}

/// Counts class memberships of every interaction. `labels` gives the
/// 1-based class of each node; `d` is the largest label.
pub fn type_matrix(h: &InteractionHypergraph, labels: &[usize]) -> Result<TypeMatrix> {
    if labels.len() != h.n() {
        return Err(Error::DimensionMismatch("one class label per node is required"));
    }
    if labels.contains(&0) {
        return Err(Error::InvalidBlockModel("class labels are 1-based"));
    }
    let d = labels.iter().copied().max().unwrap_or(0);
    let mut data = vec![0u32; d * h.m()];
    for (p, e) in h.interactions().enumerate() {
        for &v in e {
            data[p * d + labels[v - 1] - 1] += 1;
        }
    }
    Ok(TypeMatrix::from_raw(d, data))
}

/// Community assignment, class sizes and type matrix of a Hyper-SBM.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockModelSpec {
    labels: Vec<usize>,
    class_sizes: Vec<usize>,
    members: Vec<Vec<usize>>,
    types: TypeMatrix,
}

impl BlockModelSpec {
    /// `labels` are 1-based class labels per node; the number of classes is
    /// `types.d()`.
    pub fn new(labels: &[usize], types: TypeMatrix) -> Result<Self> {
        let d = types.d();
        if labels.is_empty() {
            return Err(Error::NoNodes);
        }
        if types.m() == 0 {
            return Err(Error::NoInteractions);
        }
        let mut members = vec![Vec::new(); d];
        for (i, &z) in labels.iter().enumerate() {
            if z == 0 || z > d {
                return Err(Error::InvalidBlockModel("class label outside 1..=d"));
            }
            members[z - 1].push(i);
        }
        if members.iter().any(Vec::is_empty) {
            return Err(Error::InvalidBlockModel("every class needs at least one node"));
        }
        let class_sizes: Vec<usize> = members.iter().map(Vec::len).collect();
        for (p, c) in types.columns().enumerate() {
            if c.iter().all(|&t| t == 0) {
                return Err(Error::EmptyInteraction { interaction: p });
            }
            for (r, (&t, &size)) in c.iter().zip(&class_sizes).enumerate() {
                if t as usize > size {
                    return Err(Error::TypeExceedsClass {
                        interaction: p,
                        class: r + 1,
                        count: t,
                        size,
                    });
                }
            }
        }
        Ok(Self {
            labels: labels.iter().map(|&z| z - 1).collect(),
            class_sizes,
            members,
            types,
        })
    }

    /// The ground truth implied by a hypergraph and a node labelling.
    pub fn from_hypergraph(h: &InteractionHypergraph, labels: &[usize]) -> Result<Self> {
        let types = type_matrix(h, labels)?;
        Self::new(labels, types)
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn m(&self) -> usize {
        self.types.m()
    }

    pub fn d(&self) -> usize {
        self.types.d()
    }

    /// 0-based class of 0-based node `i`.
    pub fn class_of(&self, i: usize) -> usize {
        self.labels[i]
    }

    /// 1-based labels, as accepted by [`BlockModelSpec::new`].
    pub fn labels(&self) -> Vec<usize> {
        self.labels.iter().map(|&z| z + 1).collect()
    }

    pub fn class_sizes(&self) -> &[usize] {
        &self.class_sizes
    }

    /// 0-based nodes of 0-based class `r`, ascending.
    pub fn members(&self, r: usize) -> &[usize] {
        &self.members[r]
    }

    pub fn types(&self) -> &TypeMatrix {
        &self.types
    }

    pub fn basic_types(&self) -> TypeMatrix {
        self.types.basic()
    }

    /// Largest interaction size.
    pub fn k_max(&self) -> u32 {
        self.types.interaction_sizes().into_iter().max().unwrap_or(0)
    }

    /// Mean interaction size.
    pub fn k_bar(&self) -> f64 {
        let total: u64 = self.types.class_totals().iter().sum();
        total as f64 / self.m() as f64
    }

    /// `min_r n_r / n`, the balance constant.
    pub fn balance(&self) -> f64 {
        *self.class_sizes.iter().min().unwrap() as f64 / self.n() as f64
    }

    /// Writes column `p` of the mean matrix into `out`.
    pub fn mean_column(&self, p: usize, out: &mut [f64]) {
        let tau = self.types.column(p);
        for (o, &r) in out.iter_mut().zip(&self.labels) {
            *o = f64::from(tau[r]) / self.class_sizes[r] as f64;
        }
    }

    /// The `d x m` matrix with entries `tau_rp / sqrt(n_r)`; the mean matrix
    /// factors through it as `(Z B^{1/2}) (B^{1/2} T)`.
    pub fn scaled_types(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.d(), self.m(), |r, p| {
            f64::from(self.types.get(r, p)) / libm::sqrt(self.class_sizes[r] as f64)
        })
    }

    /// Materializes `Γ = Z B T`.
    pub fn mean_matrix(&self) -> MeanMatrix {
        let mut gamma = DMatrix::zeros(self.n(), self.m());
        let mut col = vec![0.0; self.n()];
        for p in 0..self.m() {
            self.mean_column(p, &mut col);
            gamma.column_mut(p).copy_from_slice(&col);
        }
        MeanMatrix { gamma }
    }
}

/// Dense `Γ = E[R | T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanMatrix {
    pub gamma: DMatrix<f64>,
}

/// Convenience for `spec.mean_matrix()`.
pub fn mean_matrix(spec: &BlockModelSpec) -> MeanMatrix {
    spec.mean_matrix()
}

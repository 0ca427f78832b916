//! Interaction hypergraphs and their incidence matrices.
//!
//! Node ids are 1-based in this module's public interface. Interaction
//! indices are 0-based positions in the interaction list. The incidence
//! matrix uses 0-based row indices, like any other matrix in the crate.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// A node count plus an ordered multiset of interactions (vertex subsets).
///
/// Each interaction is stored sorted, so two interactions over the same
/// vertex set compare equal regardless of input order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InteractionHypergraph {
    n: usize,
    interactions: Vec<Vec<usize>>,
}

impl InteractionHypergraph {
    /// Builds a hypergraph from 1-based node ids.
    pub fn new(n: usize, interactions: Vec<Vec<usize>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::NoNodes);
        }
        if interactions.is_empty() {
            return Err(Error::NoInteractions);
        }
        let mut interactions = interactions;
        for (p, e) in interactions.iter_mut().enumerate() {
            if e.is_empty() {
                return Err(Error::EmptyInteraction { interaction: p });
            }
            e.sort_unstable();
            for w in e.windows(2) {
                if w[0] == w[1] {
                    return Err(Error::DuplicateNode {
                        interaction: p,
                        node: w[0],
                    });
                }
            }
            if e[0] == 0 || e[e.len() - 1] > n {
                let node = if e[0] == 0 { 0 } else { e[e.len() - 1] };
                return Err(Error::NodeOutOfRange {
                    interaction: p,
                    node,
                    n,
                });
            }
        }
        Ok(Self { n, interactions })
    }

    /// Nodes are `1..=n`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.interactions.len()
    }

    /// Sorted 1-based members of interaction `p`.
    pub fn interaction(&self, p: usize) -> Result<&[usize]> {
        self.interactions
            .get(p)
            .map(Vec::as_slice)
            .ok_or(Error::IndexOutOfRange {
                what: "interaction",
                index: p,
                size: self.m(),
            })
    }

    pub fn interactions(&self) -> impl ExactSizeIterator<Item = &[usize]> + '_ {
        self.interactions.iter().map(Vec::as_slice)
    }

    /// Number of interactions containing node `v` (1-based).
    pub fn node_degree(&self, v: usize) -> Result<usize> {
        self.check_node(v)?;
        Ok(self.interactions.iter().filter(|e| e.binary_search(&v).is_ok()).count())
    }

    /// Number of other interactions `q != p` that share at least one node
    /// with interaction `p`.
    pub fn interaction_degree(&self, p: usize) -> Result<usize> {
        let members = self.interaction(p)?;
        let mut hit = vec![false; self.n + 1];
        for &v in members {
            hit[v] = true;
        }
        Ok(self
            .interactions
            .iter()
            .enumerate()
            .filter(|&(q, e)| q != p && e.iter().any(|&v| hit[v]))
            .count())
    }

    pub fn interaction_size(&self, p: usize) -> Result<usize> {
        self.interaction(p).map(<[usize]>::len)
    }

    pub fn incidence_matrix(&self) -> IncidenceMatrix {
        IncidenceMatrix::from_sorted_columns(
            self.n,
            self.interactions
                .iter()
                .map(|e| e.iter().map(|&v| v - 1).collect())
                .collect(),
        )
    }

    fn check_node(&self, v: usize) -> Result<()> {
        if v == 0 || v > self.n {
            return Err(Error::IndexOutOfRange {
                what: "node",
                index: v,
                size: self.n,
            });
        }
        Ok(())
    }
}

/// Sparse binary `n x m` incidence matrix stored by column.
///
/// Column `p` lists the sorted 0-based rows `i` with `R[i, p] = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IncidenceMatrix {
    n: usize,
    columns: Vec<Vec<usize>>,
}

impl IncidenceMatrix {
    /// Builds the matrix from 0-based sorted, duplicate-free columns.
    pub fn from_columns(n: usize, columns: Vec<Vec<usize>>) -> Result<Self> {
        let mut cols = columns;
        for (p, c) in cols.iter_mut().enumerate() {
            c.sort_unstable();
            if c.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::DuplicateNode {
                    interaction: p,
                    node: c.windows(2).find(|w| w[0] == w[1]).map_or(0, |w| w[0] + 1),
                });
            }
            if let Some(&last) = c.last() {
                if last >= n {
                    return Err(Error::NodeOutOfRange {
                        interaction: p,
                        node: last + 1,
                        n,
                    });
                }
            }
        }
        Ok(Self { n, columns: cols })
    }

    pub(crate) fn from_sorted_columns(n: usize, columns: Vec<Vec<usize>>) -> Self {
        debug_assert!(columns
            .iter()
            .all(|c| c.windows(2).all(|w| w[0] < w[1]) && c.last().is_none_or(|&i| i < n)));
        Self { n, columns }
    }

    pub fn nrows(&self) -> usize {
        self.n
    }

    pub fn ncols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, p: usize) -> &[usize] {
        &self.columns[p]
    }

    pub fn columns(&self) -> impl ExactSizeIterator<Item = &[usize]> + '_ {
        self.columns.iter().map(Vec::as_slice)
    }

    pub fn get(&self, i: usize, p: usize) -> u8 {
        u8::from(self.columns[p].binary_search(&i).is_ok())
    }

    /// Total number of ones, i.e. the squared Frobenius norm.
    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut out = nalgebra::DMatrix::zeros(self.n, self.ncols());
        for (p, c) in self.columns.iter().enumerate() {
            for &i in c {
                out[(i, p)] = 1.0;
            }
        }
        out
    }

    /// Recovers the hypergraph the matrix was built from. Fails if some
    /// column is empty.
    pub fn to_hypergraph(&self) -> Result<InteractionHypergraph> {
        InteractionHypergraph::new(
            self.n,
            self.columns
                .iter()
                .map(|c| c.iter().map(|&i| i + 1).collect())
                .collect(),
        )
    }
}

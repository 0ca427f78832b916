//! Complete-linkage agglomerative clustering.
//!
//! At every step the two clusters with the smallest complete-linkage
//! distance merge. Ties go to the pair whose smallest members `(a, b)`,
//! `a < b`, are lexicographically smallest. A cluster is named by its
//! smallest member, so each merge is recorded as `(a, b, height)`.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    /// Smallest member of the first cluster; always `a < b`.
    pub a: usize,
    /// Smallest member of the second cluster.
    pub b: usize,
    pub height: f64,
    /// Size of the merged cluster.
    pub size: usize,
}

/// Merge history over `leaves` items, `leaves - 1` steps.
#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    leaves: usize,
    steps: Vec<Merge>,
}

impl Dendrogram {
    /// Validates that each step joins two live clusters named by their
    /// smallest members.
    pub fn from_steps(leaves: usize, steps: Vec<Merge>) -> Result<Self> {
        if leaves == 0 {
            return Err(Error::InvalidParameter("a dendrogram needs at least one leaf"));
        }
        if steps.len() != leaves - 1 {
            return Err(Error::InvalidParameter("a dendrogram over m leaves has m - 1 merges"));
        }
        let mut live = vec![true; leaves];
        for s in &steps {
            if s.a >= s.b || s.b >= leaves || !live[s.a] || !live[s.b] || !s.height.is_finite() {
                return Err(Error::InvalidParameter("merge does not join two live clusters"));
            }
            live[s.b] = false;
        }
        Ok(Self { leaves, steps })
    }

    pub fn leaves(&self) -> usize {
        self.leaves
    }

    pub fn steps(&self) -> &[Merge] {
        &self.steps
    }

    pub fn heights(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        self.steps.iter().map(|s| s.height)
    }
}

/// Euclidean distance, computed with scaling so that distinct rows never
/// round to zero. Symmetric bit for bit.
pub fn distance(x: &[f64], y: &[f64]) -> f64 {
    let scale = x.iter().zip(y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    let sum: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let t = (a - b) / scale;
            t * t
        })
        .sum();
    scale * libm::sqrt(sum)
}

pub(crate) fn rows(points: &DMatrix<f64>) -> Result<Vec<Vec<f64>>> {
    (0..points.nrows())
        .map(|i| {
            let row: Vec<f64> = points.row(i).iter().map(|&x| x + 0.0).collect();
            if row.iter().all(|x| x.is_finite()) {
                Ok(row)
            } else {
                Err(Error::NonFinite { point: i })
            }
        })
        .collect()
}

/// Condensed strict upper triangle of a symmetric matrix.
struct Condensed {
    n: usize,
    data: Vec<f64>,
}

impl Condensed {
    fn offset(&self, i: usize) -> usize {
        i * (2 * self.n - i - 1) / 2
    }

    fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        self.data[self.offset(i) + j - i - 1]
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        let k = self.offset(i) + j - i - 1;
        self.data[k] = v;
    }
}

const NONE: usize = usize::MAX;

/// Generic greedy agglomeration with a cached nearest neighbour per row:
/// `nn[i]` is the smallest `(D[i, j], j)` over live `j > i`.
fn agglomerate(dist: &mut Condensed, order_ids: &[usize], sizes: &mut [usize], out: &mut Vec<Merge>) {
    let g = dist.n;
    let mut active = vec![true; g];
    let mut nn = vec![NONE; g];
    let mut nn_dist = vec![f64::INFINITY; g];

    let refresh = |i: usize, dist: &Condensed, active: &[bool], nn: &mut [usize], nn_dist: &mut [f64]| {
        let mut best = NONE;
        let mut best_d = f64::INFINITY;
        let base = dist.offset(i);
        for (j, &live) in active.iter().enumerate().skip(i + 1) {
            if live {
                let d = dist.data[base + j - i - 1];
                if best == NONE || d < best_d {
                    best = j;
                    best_d = d;
                }
            }
        }
        nn[i] = best;
        nn_dist[i] = best_d;
    };

    for i in 0..g {
        refresh(i, dist, &active, &mut nn, &mut nn_dist);
    }

    for _ in 1..g {
        let mut a = NONE;
        for i in 0..g {
            if active[i] && nn[i] != NONE && (a == NONE || nn_dist[i] < nn_dist[a]) {
                a = i;
            }
        }
        let b = nn[a];
        let height = nn_dist[a];
        sizes[a] += sizes[b];
        out.push(Merge {
            a: order_ids[a],
            b: order_ids[b],
            height,
            size: sizes[a],
        });
        active[b] = false;
        for (x, &live) in active.iter().enumerate() {
            if live && x != a {
                let merged = dist.get(a, x).max(dist.get(b, x));
                dist.set(a, x, merged);
            }
        }
        refresh(a, dist, &active, &mut nn, &mut nn_dist);
        for i in 0..b {
            if active[i] && i != a && (nn[i] == a || nn[i] == b) {
                refresh(i, dist, &active, &mut nn, &mut nn_dist);
            }
        }
    }
}

/// Complete-linkage dendrogram of the rows of `points`.
///
/// Identical rows merge first at height zero. The remaining distinct rows
/// are clustered on a cached condensed distance matrix, `O(u^2)` memory for
/// `u` distinct rows.
pub fn complete_linkage(points: &DMatrix<f64>) -> Result<Dendrogram> {
    let m = points.nrows();
    if m == 0 {
        return Err(Error::InvalidParameter("complete linkage needs at least one point"));
    }
    let rows = rows(points)?;

    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| {
        rows[i]
            .iter()
            .zip(&rows[j])
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(i.cmp(&j))
    });
    // group representative (smallest member) per item
    let mut rep = vec![0usize; m];
    let mut start = 0;
    while start < m {
        let mut end = start + 1;
        while end < m && rows[order[end]] == rows[order[start]] {
            end += 1;
        }
        for &i in &order[start..end] {
            rep[i] = order[start];
        }
        start = end;
    }

    let mut steps = Vec::with_capacity(m - 1);
    let mut zero_merges: Vec<(usize, usize)> = (0..m).filter(|&i| rep[i] != i).map(|i| (rep[i], i)).collect();
    zero_merges.sort_unstable();
    let mut group_size = vec![1usize; m];
    for &(a, b) in &zero_merges {
        group_size[a] += 1;
        steps.push(Merge {
            a,
            b,
            height: 0.0,
            size: group_size[a],
        });
    }

    let reps: Vec<usize> = (0..m).filter(|&i| rep[i] == i).collect();
    let g = reps.len();
    let mut dist = Condensed {
        n: g,
        data: vec![0.0; g * g.saturating_sub(1) / 2],
    };
    let mut k = 0;
    for a in 0..g {
        for b in a + 1..g {
            dist.data[k] = distance(&rows[reps[a]], &rows[reps[b]]);
            k += 1;
        }
    }
    let mut sizes: Vec<usize> = reps.iter().map(|&r| group_size[r]).collect();
    agglomerate(&mut dist, &reps, &mut sizes, &mut steps);
    Ok(Dendrogram { leaves: m, steps })
}

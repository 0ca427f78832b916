use alloc::vec::Vec;

use crate::clustering::linkage::Dendrogram;
use crate::error::{Error, Result};

/// Flat clustering with labels `1..=k`, numbered by first appearance.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    labels: Vec<usize>,
    k: usize,
}

impl Partition {
    /// Relabels arbitrary ids to `1..=k` in order of first appearance.
    pub fn from_labels<T: Ord + Clone>(raw: &[T]) -> Self {
        let mut seen: alloc::collections::BTreeMap<T, usize> = alloc::collections::BTreeMap::new();
        let labels = raw
            .iter()
            .map(|x| {
                let next = seen.len() + 1;
                *seen.entry(x.clone()).or_insert(next)
            })
            .collect();
        Self { labels, k: seen.len() }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Whether every cluster of `self` lies inside one cluster of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        if self.len() != coarser.len() {
            return false;
        }
        let mut image = alloc::vec![0usize; self.k + 1];
        self.labels.iter().zip(&coarser.labels).all(|(&a, &b)| {
            if image[a] == 0 {
                image[a] = b;
            }
            image[a] == b
        })
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// The partition left after the first `m - k` merges.
pub fn cut_at_k(dend: &Dendrogram, k: usize) -> Result<Partition> {
    let m = dend.leaves();
    if k == 0 || k > m {
        return Err(Error::IndexOutOfRange {
            what: "cluster count",
            index: k,
            size: m,
        });
    }
    let mut parent: Vec<usize> = (0..m).collect();
    for s in &dend.steps()[..m - k] {
        let (ra, rb) = (find(&mut parent, s.a), find(&mut parent, s.b));
        parent[rb] = ra;
    }
    let roots: Vec<usize> = (0..m).map(|i| find(&mut parent, i)).collect();
    Ok(Partition::from_labels(&roots))
}

const ZERO_HEIGHT: f64 = 1e-12;

/// Picks `k` in `2..=k_max` maximizing `h[m-k+1] / h[m-k]`, where `h[j]` is
/// the height of the `j`-th merge (1-based).
///
/// When some candidate has a denominator below `1e-12` and a numerator at or
/// above it, the largest additive jump `h[m-k+1] - h[m-k]` among those
/// candidates wins instead. Returns 1 when every candidate height is below
/// `1e-12` (for instance when all points coincide). Ties go to the smaller `k`.
pub fn choose_k_by_gap(dend: &Dendrogram, k_max: usize) -> usize {
    let m = dend.leaves();
    let h: Vec<f64> = dend.heights().collect();
    let upper = k_max.min(m.saturating_sub(1));
    let jump = |k: usize| (h[m - k], h[m - k - 1]);

    let mut best_add: Option<(f64, usize)> = None;
    for k in 2..=upper {
        let (num, den) = jump(k);
        if den < ZERO_HEIGHT && num >= ZERO_HEIGHT && best_add.is_none_or(|(g, _)| num - den > g) {
            best_add = Some((num - den, k));
        }
    }
    if let Some((_, k)) = best_add {
        return k;
    }

    let mut best: Option<(f64, usize)> = None;
    for k in 2..=upper {
        let (num, den) = jump(k);
        if den < ZERO_HEIGHT {
            continue;
        }
        let ratio = num / den;
        if best.is_none_or(|(r, _)| ratio > r) {
            best = Some((ratio, k));
        }
    }
    best.map_or(1, |(_, k)| k)
}

use alloc::vec::Vec;

use crate::clustering::partition::Partition;
use crate::error::{Error, Result};

fn pairs(x: u64) -> i128 {
    let x = i128::from(x);
    x * (x - 1).max(0) / 2
}

/// Sum of `C(run, 2)` over runs of equal values in a sorted slice.
fn run_pairs<T: PartialEq>(sorted: &[T]) -> i128 {
    let mut total = 0;
    let mut start = 0;
    for i in 1..=sorted.len() {
        if i == sorted.len() || sorted[i] != sorted[start] {
            total += pairs((i - start) as u64);
            start = i;
        }
    }
    total
}

/// Hubert-Arabie adjusted Rand index of two labelings of the same items.
/// Returns 1 when the chance-corrected denominator vanishes, which only
/// happens when both labelings are all singletons or all one cluster.
///
/// The pair counts are integers, so the index is formed as one exact
/// integer ratio and rounded once.
pub fn adjusted_rand_index_labels<A: Ord, B: Ord>(a: &[A], b: &[B]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let mut joint: Vec<(&A, &B)> = a.iter().zip(b).collect();
    joint.sort_unstable();
    let mut left: Vec<&A> = a.iter().collect();
    left.sort_unstable();
    let mut right: Vec<&B> = b.iter().collect();
    right.sort_unstable();

    let index = run_pairs(&joint);
    let sum_a = run_pairs(&left);
    let sum_b = run_pairs(&right);
    let total = pairs(a.len() as u64);
    if total == 0 {
        return Ok(1.0);
    }
    // (index - sa sb / total) / ((sa + sb) / 2 - sa sb / total), scaled by 2 total
    let num = 2 * (index * total - sum_a * sum_b);
    let den = (sum_a + sum_b) * total - 2 * sum_a * sum_b;
    if den == 0 {
        return Ok(1.0);
    }
    Ok(ratio(num, den))
}

/// `num / den` rounded once: both fit in an `f64` exactly at any realistic
/// size, otherwise they are reduced by their gcd first.
fn ratio(num: i128, den: i128) -> f64 {
    const EXACT: i128 = 1 << 53;
    let (mut n, mut d) = (num, den);
    if n.abs() >= EXACT || d.abs() >= EXACT {
        let g = gcd(n.unsigned_abs(), d.unsigned_abs()) as i128;
        n /= g;
        d /= g;
    }
    n as f64 / d as f64
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

pub fn adjusted_rand_index(a: &Partition, b: &Partition) -> Result<f64> {
    adjusted_rand_index_labels(a.labels(), b.labels())
}

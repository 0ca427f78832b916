use hyperclust_core::clustering::linkage::distance;
use hyperclust_core::clustering::{
    adjusted_rand_index, adjusted_rand_index_labels, choose_k_by_gap, complete_linkage, cut_at_k, Dendrogram, Merge,
    Partition,
};
use hyperclust_core::experiment::{run_replicate, SelectionMode};
use hyperclust_core::nalgebra::DMatrix;
use hyperclust_core::sampler::{Regime, SimulationDesign};
use hyperclust_core::RngStream;
use proptest::prelude::*;
use rand::Rng;

/// Recomputes every cluster-to-cluster distance from the points at every
/// step. Clusters are kept as sorted member lists.
fn naive_complete_linkage(points: &DMatrix<f64>) -> Vec<Merge> {
    let rows: Vec<Vec<f64>> = points.row_iter().map(|r| r.iter().copied().collect()).collect();
    let mut clusters: Vec<Vec<usize>> = (0..rows.len()).map(|i| vec![i]).collect();
    let mut merges = Vec::new();
    while clusters.len() > 1 {
        let mut best: Option<(f64, usize, usize, usize, usize)> = None;
        for x in 0..clusters.len() {
            for y in x + 1..clusters.len() {
                let mut h: f64 = 0.0;
                for &p in &clusters[x] {
                    for &q in &clusters[y] {
                        h = h.max(distance(&rows[p], &rows[q]));
                    }
                }
                let (a, b) = {
                    let (ma, mb) = (clusters[x][0], clusters[y][0]);
                    (ma.min(mb), ma.max(mb))
                };
                let better = match best {
                    None => true,
                    Some((bh, ba, bb, _, _)) => h < bh || (h == bh && (a, b) < (ba, bb)),
                };
                if better {
                    best = Some((h, a, b, x, y));
                }
            }
        }
        let (height, a, b, x, y) = best.unwrap();
        let mut joined = clusters[x].clone();
        joined.extend_from_slice(&clusters[y]);
        joined.sort_unstable();
        clusters.remove(y);
        clusters[x] = joined;
        merges.push(Merge {
            a,
            b,
            height,
            size: clusters[x].len(),
        });
    }
    merges
}

fn point_set() -> impl Strategy<Value = DMatrix<f64>> {
    (1usize..=8, 1usize..=3, any::<bool>()).prop_flat_map(|(m, d, lattice)| {
        let coord = if lattice {
            (-2i32..=2).prop_map(f64::from).boxed()
        } else {
            (-10.0f64..10.0).boxed()
        };
        prop::collection::vec(coord, m * d).prop_map(move |v| DMatrix::from_row_slice(m, d, &v))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn linkage_matches_naive_oracle(points in point_set()) {
        let dend = complete_linkage(&points).unwrap();
        let naive = naive_complete_linkage(&points);
        prop_assert_eq!(dend.steps(), naive.as_slice());
    }

    #[test]
    fn heights_nondecreasing_and_cuts_nest(points in point_set()) {
        let dend = complete_linkage(&points).unwrap();
        let h: Vec<f64> = dend.heights().collect();
        prop_assert!(h.windows(2).all(|w| w[0] <= w[1]));
        let m = points.nrows();
        for k in 2..=m {
            let fine = cut_at_k(&dend, k).unwrap();
            let coarse = cut_at_k(&dend, k - 1).unwrap();
            prop_assert_eq!(fine.k(), k);
            prop_assert!(fine.refines(&coarse));
        }
        prop_assert_eq!(cut_at_k(&dend, m).unwrap().k(), m);
        prop_assert_eq!(cut_at_k(&dend, 1).unwrap().k(), 1);
        let k = choose_k_by_gap(&dend, m);
        prop_assert!((1..=m).contains(&k));
    }

    #[test]
    fn ari_symmetric_and_relabel_invariant(
        a in prop::collection::vec(0u8..5, 1..50),
        seed in any::<u64>(),
    ) {
        let mut rng = RngStream::new(seed).rng();
        let b: Vec<u8> = a.iter().map(|_| rng.random_range(0..4)).collect();
        let ab = adjusted_rand_index_labels(&a, &b).unwrap();
        let ba = adjusted_rand_index_labels(&b, &a).unwrap();
        prop_assert_eq!(ab, ba);
        let renamed: Vec<u32> = a.iter().map(|&x| 100 - 7 * u32::from(x)).collect();
        prop_assert!((adjusted_rand_index_labels(&renamed, &b).unwrap() - ab).abs() < 1e-12);
        prop_assert!((adjusted_rand_index_labels(&a, &renamed).unwrap() - 1.0).abs() < 1e-12);
        prop_assert!((-1.0..=1.0).contains(&ab));
    }
}

fn choose2(x: u64) -> f64 {
    (x * x.saturating_sub(1)) as f64 / 2.0
}

/// ARI evaluated from an explicit contingency table.
fn contingency_ari(a: &[usize], b: &[usize]) -> f64 {
    let ka = a.iter().max().unwrap() + 1;
    let kb = b.iter().max().unwrap() + 1;
    let mut table = vec![vec![0u64; kb]; ka];
    for (&x, &y) in a.iter().zip(b) {
        table[x][y] += 1;
    }
    let index: f64 = table.iter().flatten().map(|&c| choose2(c)).sum();
    let rows: f64 = table.iter().map(|r| choose2(r.iter().sum())).sum();
    let cols: f64 = (0..kb).map(|j| choose2(table.iter().map(|r| r[j]).sum())).sum();
    let total = choose2(a.len() as u64);
    let expected = rows * cols / total;
    let max = (rows + cols) / 2.0;
    (index - expected) / (max - expected)
}

#[test]
fn ari_matches_contingency_formula() {
    let mut rng = RngStream::new(909).rng();
    let mut checked = 0;
    while checked < 500 {
        let m = rng.random_range(2..=50);
        let (ka, kb) = (rng.random_range(1..=m), rng.random_range(1..=m));
        let a: Vec<usize> = (0..m).map(|_| rng.random_range(0..ka)).collect();
        let b: Vec<usize> = (0..m).map(|_| rng.random_range(0..kb)).collect();
        let direct = contingency_ari(&a, &b);
        if !direct.is_finite() {
            continue;
        }
        let ours = adjusted_rand_index(&Partition::from_labels(&a), &Partition::from_labels(&b)).unwrap();
        assert!((ours - direct).abs() < 1e-12, "{ours} vs {direct}");
        checked += 1;
    }
    assert_eq!(adjusted_rand_index_labels(&[0, 0, 1, 1], &[0, 1, 0, 1]).unwrap(), -0.5);
    assert!((contingency_ari(&[0, 0, 1, 1], &[0, 1, 0, 1]) + 0.5).abs() < 1e-12);
}

#[test]
fn null_ari_centred_at_zero() {
    let mut rng = RngStream::new(1010).rng();
    let trials = 100;
    let mean: f64 = (0..trials)
        .map(|_| {
            let a: Vec<u8> = (0..1000).map(|_| rng.random_range(0..5)).collect();
            let b: Vec<u8> = (0..1000).map(|_| rng.random_range(0..5)).collect();
            adjusted_rand_index_labels(&a, &b).unwrap()
        })
        .sum::<f64>()
        / trials as f64;
    assert!(mean.abs() <= 0.02, "{mean}");
}

#[test]
fn gap_rule_on_planted_blobs() {
    let mut rng = RngStream::new(1111).rng();
    let mut pts = Vec::new();
    for centre in [0.0, 100.0] {
        for _ in 0..20 {
            pts.push(centre + rng.random_range(-1.0..1.0));
            pts.push(rng.random_range(-1.0..1.0));
        }
    }
    let dend = complete_linkage(&DMatrix::from_row_slice(40, 2, &pts)).unwrap();
    assert_eq!(choose_k_by_gap(&dend, 40), 2);
    let same = complete_linkage(&DMatrix::from_element(6, 2, 3.5)).unwrap();
    assert_eq!(choose_k_by_gap(&same, 6), 1);
}

#[test]
fn gap_rule_finds_type_count_on_small_design() {
    for seed in 0..10 {
        let design = SimulationDesign::new(10, 999, Regime::Growing, seed);
        let out = run_replicate(&design, SelectionMode::BulkDistance).unwrap();
        assert_eq!(out.k_gap, out.k_true, "seed {seed}");
        assert_eq!(out.ari_gap_k, 1.0);
    }
}

#[test]
fn dendrogram_steps_validate() {
    let good = vec![
        Merge {
            a: 0,
            b: 1,
            height: 1.0,
            size: 2,
        },
        Merge {
            a: 0,
            b: 2,
            height: 2.0,
            size: 3,
        },
    ];
    assert!(Dendrogram::from_steps(3, good).is_ok());
    let dead = vec![
        Merge {
            a: 0,
            b: 1,
            height: 1.0,
            size: 2,
        },
        Merge {
            a: 1,
            b: 2,
            height: 2.0,
            size: 3,
        },
    ];
    assert!(Dendrogram::from_steps(3, dead).is_err());
    assert!(complete_linkage(&DMatrix::from_row_slice(2, 1, &[0.0, f64::NAN])).is_err());
}

//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line for
//! each with the measured numbers, and exits non-zero if any failed.

use std::panic;
use std::process::{Command, ExitCode};
use std::sync::OnceLock;
use std::time::Instant;

use hyperclust::grid::{run_cell_replicate, Cell, CellResult, ExperimentGrid};
use hyperclust_core::clustering::linkage::distance;
use hyperclust_core::clustering::{
    adjusted_rand_index, adjusted_rand_index_labels, complete_linkage, Merge, Partition,
};
use hyperclust_core::nalgebra::DMatrix;
use hyperclust_core::sampler::{generate_design, sample_hyper_sbm, weighted_draw_sequence, Regime, SimulationDesign};
use hyperclust_core::spectral::diagnostics::identical_actions_residual;
use hyperclust_core::spectral::linalg::symmetric_eigenvalues;
use hyperclust_core::spectral::{
    expected_gram, expected_gram_structure, hollowed_gram, select_signal_eigenpairs, signal_gap, theoretical_embedding,
    InteractionData, Selection,
};
use hyperclust_core::{BlockModelSpec, Error, RngStream, TypeMatrix};
use rand::Rng;
use rayon::prelude::*;

const SEED: u64 = 1;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn within_time(v: Verdict, start: Instant, limit_s: f64) -> Verdict {
    let took = start.elapsed().as_secs_f64();
    if took < limit_s {
        v
    } else {
        verdict(false, format!("{}; took {took:.1}s, limit {limit_s}s", v.detail))
    }
}

fn random_spec(rng: &mut impl Rng) -> BlockModelSpec {
    let d = rng.random_range(1..=3);
    let sizes: Vec<usize> = (0..d).map(|_| rng.random_range(1..=10)).collect();
    let m = rng.random_range(1..=20);
    let mut cols = Vec::with_capacity(m);
    while cols.len() < m {
        let tau: Vec<u32> = sizes.iter().map(|&s| rng.random_range(0..=s as u32)).collect();
        if tau.iter().any(|&t| t > 0) {
            cols.push(tau);
        }
    }
    let mut labels: Vec<usize> = sizes
        .iter()
        .enumerate()
        .flat_map(|(r, &s)| std::iter::repeat_n(r + 1, s))
        .collect();
    for i in (1..labels.len()).rev() {
        labels.swap(i, rng.random_range(0..=i));
    }
    BlockModelSpec::new(&labels, TypeMatrix::from_columns(d, &cols).unwrap()).unwrap()
}

fn expected_gram_spectrum() -> Verdict {
    let start = Instant::now();
    let mut rng = RngStream::with_key(SEED, 1).rng();
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let spec = random_spec(&mut rng);
        let (g, structure) = expected_gram(&spec);
        let dense = symmetric_eigenvalues(g);
        let closed = structure.spectrum();
        if dense.len() != closed.len() {
            return verdict(false, "spectrum sizes differ");
        }
        for (a, b) in dense.iter().zip(&closed) {
            worst = worst.max((a - b).abs());
        }
    }
    within_time(
        verdict(worst < 1e-9, format!("200 specs, max eigenvalue gap {worst:.2e}")),
        start,
        10.0,
    )
}

fn expected_incidence() -> Verdict {
    let start = Instant::now();
    let cols = [vec![2, 1], vec![0, 3], vec![1, 1], vec![4, 0], vec![2, 2], vec![5, 1]];
    let spec = BlockModelSpec::new(
        &[1, 1, 1, 1, 1, 2, 2, 2, 2, 2],
        TypeMatrix::from_columns(2, &cols).unwrap(),
    )
    .unwrap();
    let draws = 20_000;
    let mut rng = RngStream::with_key(SEED, 2).rng();
    let mut sum = DMatrix::<f64>::zeros(spec.n(), spec.m());
    for _ in 0..draws {
        sum += sample_hyper_sbm(&spec, &mut rng).incidence_matrix().to_dense();
    }
    let mean = sum / draws as f64;
    let gamma = spec.mean_matrix().gamma;
    let mut outside = 0;
    let mut worst: f64 = 0.0;
    for i in 0..spec.n() {
        for p in 0..spec.m() {
            let q = gamma[(i, p)];
            let se = (q * (1.0 - q) / draws as f64).sqrt();
            let err = (mean[(i, p)] - q).abs();
            if err > 3.0 * se {
                outside += 1;
            }
            if se > 0.0 {
                worst = worst.max(err / se);
            }
        }
    }
    within_time(
        verdict(
            outside == 0,
            format!("{outside}/60 entries beyond 3 SE, largest {worst:.2} SE"),
        ),
        start,
        20.0,
    )
}

fn second_draw_probability() -> Verdict {
    let start = Instant::now();
    let trials = 100_000;
    let mut rng = RngStream::with_key(SEED, 3).rng();
    let hits = (0..trials)
        .filter(|_| weighted_draw_sequence(&[1.0, 2.0, 3.0], 2, &mut rng).unwrap()[1] == 2)
        .count();
    let p = 7.0 / 20.0;
    let sigma = (p * (1.0 - p) / trials as f64).sqrt();
    let freq = hits as f64 / trials as f64;
    within_time(
        verdict(
            (freq - p).abs() <= 3.0 * sigma,
            format!("frequency {freq:.5} vs 0.35, sigma {sigma:.5}"),
        ),
        start,
        5.0,
    )
}

fn eigenvalue_trapping() -> Verdict {
    let start = Instant::now();
    let cell = Cell {
        regime: Regime::Growing,
        n: 10,
        m: 999,
    };
    let mut good = 0;
    let mut counts = Vec::new();
    let mut delta_b = (0.0, 0.0);
    let mut farthest: f64 = 0.0;
    for rep in 0..20 {
        let design = cell.design(cell.replicate_seed(SEED, rep));
        let (spec, h) = generate_design(&design, &design.stream()).unwrap();
        let gap = signal_gap(&spec, None).unwrap();
        delta_b = (gap.delta, gap.b);
        let structure = expected_gram_structure(&spec);
        let signal = &structure.signal_eigenvalues;
        let gram = hollowed_gram(&h.incidence_matrix());
        for &l in &symmetric_eigenvalues(gram.matrix.clone()) {
            let d = structure
                .mu
                .iter()
                .map(|&mu| (l + mu).abs())
                .fold(f64::INFINITY, f64::min);
            farthest = farthest.max(d);
        }
        let selection = Selection::oracle(&spec, None).unwrap();
        match select_signal_eigenpairs(&gram, 2, &selection) {
            Ok(out) => {
                counts.push(2);
                if out
                    .values
                    .iter()
                    .zip(signal.iter())
                    .all(|(a, b)| (a - b).abs() <= gap.b)
                {
                    good += 1;
                }
            }
            Err(Error::SelectionMismatch { found, .. }) => counts.push(found),
            Err(e) => return verdict(false, e.to_string()),
        }
    }
    counts.sort_unstable();
    counts.dedup();
    within_time(
        verdict(
            good >= 19,
            format!(
                "{good}/20 instances trapped; eigenvalues outside the bulk intervals: {counts:?}; \
                 farthest eigenvalue from its nearest bulk value {farthest:.1}; \
                 last instance delta {:.1}, b {:.1}",
                delta_b.0, delta_b.1
            ),
        ),
        start,
        120.0,
    )
}

/// Cells of the ARI table with their check: `(regime, n, m, target, tolerance)`.
/// A tolerance of `None` means "at least `target`".
const ARI_CELLS: [(Regime, usize, usize, f64, Option<f64>); 6] = [
    (Regime::Growing, 10, 999, 0.99, None),
    (Regime::Growing, 20, 999, 0.99, None),
    (Regime::Growing, 40, 999, 0.97, None),
    (Regime::Fixed(5), 10, 999, 0.99, None),
    (Regime::Fixed(5), 40, 8991, 0.99, None),
    (Regime::Fixed(5), 80, 999, 0.745, Some(0.15)),
];

fn run_cells(cells: &[Cell], reps: usize) -> Vec<CellResult> {
    let grid = ExperimentGrid::desk(SEED);
    let tasks: Vec<(Cell, usize)> = cells.iter().flat_map(|&c| (0..reps).map(move |r| (c, r))).collect();
    tasks
        .par_iter()
        .map(|&(c, r)| run_cell_replicate(c, r, &grid))
        .collect()
}

fn ari_results() -> &'static (Vec<CellResult>, f64) {
    static RESULTS: OnceLock<(Vec<CellResult>, f64)> = OnceLock::new();
    RESULTS.get_or_init(|| {
        let start = Instant::now();
        let cells: Vec<Cell> = ARI_CELLS
            .iter()
            .map(|&(regime, n, m, _, _)| Cell { regime, n, m })
            .collect();
        let results = run_cells(&cells, 10);
        (results, start.elapsed().as_secs_f64())
    })
}

fn ari_table() -> Verdict {
    let (results, took) = ari_results();
    let mut pass = *took < 30.0 * 60.0;
    let mut parts = Vec::new();
    for &(regime, n, m, target, tol) in &ARI_CELLS {
        let cell: Vec<&CellResult> = results
            .iter()
            .filter(|r| r.cell.regime == regime && r.cell.n == n && r.cell.m == m)
            .collect();
        let aris: Vec<f64> = cell
            .iter()
            .map(|r| r.outcome.as_ref().map_or(f64::NAN, |o| o.ari_true_k))
            .collect();
        let mean = aris.iter().sum::<f64>() / aris.len() as f64;
        let ok = match tol {
            None => mean >= target,
            Some(t) => (mean - target).abs() <= t,
        };
        pass &= ok;
        parts.push(format!(
            "{} ({n}, {m}) {mean:.3}{}",
            regime.name(),
            if ok { "" } else { " !" }
        ));
    }
    verdict(pass, format!("{} in {took:.0}s", parts.join(", ")))
}

fn convergence_trend() -> Verdict {
    let start = Instant::now();
    let ms = [999usize, 2997, 8991];
    let cells: Vec<Cell> = ms
        .iter()
        .map(|&m| Cell {
            regime: Regime::Fixed(5),
            n: 20,
            m,
        })
        .collect();
    let results = run_cells(&cells, 10);
    let means: Vec<f64> = ms
        .iter()
        .map(|&m| {
            let vals: Vec<f64> = results
                .iter()
                .filter(|r| r.cell.m == m)
                .map(|r| r.outcome.as_ref().map_or(f64::NAN, |o| o.diagnostics.norm_vs_2inf))
                .collect();
            vals.iter().sum::<f64>() / vals.len() as f64
        })
        .collect();
    let xs: Vec<f64> = ms.iter().map(|&m| (m as f64).ln()).collect();
    let ys: Vec<f64> = means.iter().map(|v| v.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / 3.0, ys.iter().sum::<f64>() / 3.0);
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    let decreasing = means.windows(2).all(|w| w[1] < w[0]);
    within_time(
        verdict(
            decreasing && slope <= -0.3,
            format!(
                "means {:.4} > {:.4} > {:.4}, log-log slope {slope:.3}",
                means[0], means[1], means[2]
            ),
        ),
        start,
        15.0 * 60.0,
    )
}

fn perfect_clustering() -> Verdict {
    let (results, _) = ari_results();
    let mut qualifying = 0;
    let mut violations = 0;
    for r in results {
        let Ok(o) = &r.outcome else { continue };
        let d = &o.diagnostics;
        if 2.0 * d.norm_vs_2inf < 0.8 * d.min_type_distance {
            qualifying += 1;
            if !o.perfect_cut {
                violations += 1;
            }
        }
    }
    verdict(
        violations == 0,
        format!(
            "{qualifying}/{} replicates meet the separation condition, {violations} without a perfect cut",
            results.len()
        ),
    )
}

fn naive_complete_linkage(points: &DMatrix<f64>) -> Vec<Merge> {
    let rows: Vec<Vec<f64>> = points.row_iter().map(|r| r.iter().copied().collect()).collect();
    let mut clusters: Vec<Vec<usize>> = (0..rows.len()).map(|i| vec![i]).collect();
    let mut merges = Vec::new();
    while clusters.len() > 1 {
        let mut best: Option<(f64, usize, usize, usize, usize)> = None;
        for x in 0..clusters.len() {
            for y in x + 1..clusters.len() {
                let h = clusters[x]
                    .iter()
                    .flat_map(|&p| clusters[y].iter().map(move |&q| (p, q)))
                    .map(|(p, q)| distance(&rows[p], &rows[q]))
                    .fold(0.0, f64::max);
                let (ma, mb) = (clusters[x][0], clusters[y][0]);
                let (a, b) = (ma.min(mb), ma.max(mb));
                if best.is_none_or(|(bh, ba, bb, _, _)| h < bh || (h == bh && (a, b) < (ba, bb))) {
                    best = Some((h, a, b, x, y));
                }
            }
        }
        let (height, a, b, x, y) = best.unwrap();
        let mut joined = clusters.remove(y);
        joined.extend_from_slice(&clusters[x]);
        joined.sort_unstable();
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

fn clustering_oracle() -> Verdict {
    let start = Instant::now();
    let mut rng = RngStream::with_key(SEED, 8).rng();
    let mut mismatches = 0;
    for trial in 0..500 {
        let m = rng.random_range(1..=8);
        let d = rng.random_range(1..=3);
        // every other set sits on a small lattice so ties and duplicates occur
        let coords: Vec<f64> = (0..m * d)
            .map(|_| {
                if trial % 2 == 0 {
                    f64::from(rng.random_range(-2i32..=2))
                } else {
                    rng.random_range(-10.0..10.0)
                }
            })
            .collect();
        let points = DMatrix::from_row_slice(m, d, &coords);
        if complete_linkage(&points).unwrap().steps() != naive_complete_linkage(&points).as_slice() {
            mismatches += 1;
        }
    }
    within_time(
        verdict(mismatches == 0, format!("{mismatches}/500 merge sequences differ")),
        start,
        10.0,
    )
}

fn choose2(x: u64) -> f64 {
    (x * x.saturating_sub(1)) as f64 / 2.0
}

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
    let expected = rows * cols / choose2(a.len() as u64);
    (index - expected) / ((rows + cols) / 2.0 - expected)
}

fn ari_correctness() -> Verdict {
    let mut rng = RngStream::with_key(SEED, 9).rng();
    let mut worst: f64 = 0.0;
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
        worst = worst.max((ours - direct).abs());
        checked += 1;
    }
    let crossed = adjusted_rand_index_labels(&[0, 0, 1, 1], &[0, 1, 0, 1]).unwrap();
    verdict(
        worst <= 1e-12 && crossed == -0.5,
        format!("max difference {worst:.1e} over 500 pairs, crossed halves {crossed}"),
    )
}

fn identical_actions() -> Verdict {
    let designs = [
        (10, 99, Regime::Growing),
        (20, 300, Regime::Fixed(5)),
        (40, 999, Regime::Growing),
        (80, 999, Regime::Fixed(5)),
        (10, 999, Regime::Fixed(5)),
    ];
    let mut worst: f64 = 0.0;
    for (i, &(n, m, regime)) in designs.iter().cycle().take(50).enumerate() {
        let design = SimulationDesign::new(n, m, regime, hyperclust_core::rng::mix(&[SEED, 10, i as u64]));
        let (spec, h) = generate_design(&design, &design.stream()).unwrap();
        let r = h.incidence_matrix();
        let u = theoretical_embedding(&spec).unwrap().u;
        worst = worst.max(identical_actions_residual(&r, &spec, &u) / r.frobenius_norm());
    }
    verdict(
        worst <= 1e-9,
        format!("largest ||U^T(R - Gamma)||_F / ||R||_F = {worst:.2e} over 50 instances"),
    )
}

fn determinism() -> Verdict {
    let dir = std::env::temp_dir().join(format!("hyperclust-acceptance-{}", std::process::id()));
    let run = |threads: &str| -> Result<Vec<u8>, String> {
        let out_dir = dir.join(format!("threads-{threads}"));
        let status = Command::new(env!("CARGO_BIN_EXE_hyperclust"))
            .args([
                "grid",
                "--n",
                "10,20",
                "--m",
                "99,300",
                "--reps",
                "3",
                "--seed",
                "11",
                "--threads",
                threads,
            ])
            .arg("--out")
            .arg(&out_dir)
            .env("RUST_LOG", "warn")
            .status()
            .map_err(|e| e.to_string())?;
        if !status.success() {
            return Err(format!("grid exited with {status}"));
        }
        std::fs::read(out_dir.join("grid.csv")).map_err(|e| e.to_string())
    };
    let result = run("1").and_then(|a| run("2").map(|b| (a, b)));
    let _ = std::fs::remove_dir_all(&dir);
    match result {
        Ok((a, b)) => {
            let lines = a.iter().filter(|&&c| c == b'\n').count();
            verdict(
                a == b && lines == 1 + 24,
                format!("{} bytes, {} rows, identical: {}", a.len(), lines - 1, a == b),
            )
        }
        Err(e) => verdict(false, e),
    }
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        (
            "expected Gram spectrum splits into signal and bulk",
            expected_gram_spectrum,
        ),
        ("Monte Carlo mean of R matches the mean matrix", expected_incidence),
        ("weighted sampler second-draw probability", second_draw_probability),
        ("eigenvalue trapping on the n=10, m=999 design", eigenvalue_trapping),
        ("ARI table at desk scale", ari_table),
        ("2-to-infinity error shrinks with m", convergence_trend),
        ("perfect clustering under the separation condition", perfect_clustering),
        ("complete linkage matches the naive oracle", clustering_oracle),
        ("ARI matches the contingency formula", ari_correctness),
        ("identical actions of U on R - Gamma", identical_actions),
        ("grid output independent of thread count", determinism),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = panic::catch_unwind(check).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            verdict(false, format!("panicked: {msg}"))
        });
        let status = if v.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {:>2} {status} {name} [{:.1}s]: {}",
            i + 1,
            start.elapsed().as_secs_f64(),
            v.detail
        );
        if !v.pass {
            failed.push(i + 1);
        }
    }
    println!(
        "\n{} of {} criteria passed",
        criteria.len() - failed.len(),
        criteria.len()
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failed: {failed:?}");
        ExitCode::FAILURE
    }
}

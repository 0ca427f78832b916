//! The simulation grid: cells of `(regime, n, m)`, replicates per cell,
//! run on a worker pool and reported in a fixed order.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use hyperclust_core::experiment::{run_replicate, ReplicateOutcome, SelectionMode};
use hyperclust_core::rng::mix;
use hyperclust_core::sampler::{Regime, SimulationDesign, DEFAULT_FIXED_KMAX};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Interaction counts `999 * 3^i`, `i = 0..count`.
pub fn default_m_values(count: u32) -> Vec<usize> {
    (0..count).map(|i| 999 * 3usize.pow(i)).collect()
}

/// Node counts `10 * 2^i`, `i = 0..count`.
pub fn default_n_values(count: u32) -> Vec<usize> {
    (0..count).map(|i| 10 * 2usize.pow(i)).collect()
}

pub fn parse_regime(name: &str, fixed_k_max: u32) -> Result<Regime> {
    match name {
        "growing" => Ok(Regime::Growing),
        "fixed" => Ok(Regime::Fixed(fixed_k_max)),
        other => Err(Error::Usage(format!(
            "unknown regime `{other}` (expected growing or fixed)"
        ))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentGrid {
    pub m_values: Vec<usize>,
    pub n_values: Vec<usize>,
    pub regimes: Vec<Regime>,
    pub replicates: usize,
    pub seed: u64,
    pub selection: SelectionMode,
    /// Record wall-clock time per replicate. Off by default so that output
    /// files are reproducible byte for byte.
    pub timing: bool,
}

impl ExperimentGrid {
    /// `m <= 8991`, `n <= 80`, both regimes, 10 replicates.
    pub fn desk(seed: u64) -> Self {
        Self {
            m_values: default_m_values(3),
            n_values: default_n_values(4),
            regimes: vec![Regime::Growing, Regime::Fixed(DEFAULT_FIXED_KMAX)],
            replicates: 10,
            seed,
            selection: SelectionMode::default(),
            timing: false,
        }
    }

    /// All 36 cells per regime.
    pub fn full(seed: u64) -> Self {
        Self {
            m_values: default_m_values(6),
            n_values: default_n_values(6),
            ..Self::desk(seed)
        }
    }

    /// Retained cells in output order (regime, then n, then m), and the
    /// skipped ones with a reason.
    pub fn cells(&self) -> (Vec<Cell>, Vec<(Cell, String)>) {
        let mut kept = Vec::new();
        let mut skipped = Vec::new();
        for &regime in &self.regimes {
            for &n in &self.n_values {
                for &m in &self.m_values {
                    let cell = Cell { regime, n, m };
                    if m < n {
                        skipped.push((cell, "m < n".to_string()));
                        continue;
                    }
                    match cell.design(0).validate() {
                        Ok(()) => kept.push(cell),
                        Err(e) => skipped.push((cell, e.to_string())),
                    }
                }
            }
        }
        (kept, skipped)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub regime: Regime,
    pub n: usize,
    pub m: usize,
}

impl Cell {
    pub fn design(&self, seed: u64) -> SimulationDesign {
        SimulationDesign::new(self.n, self.m, self.regime, seed)
    }

    fn regime_code(&self) -> u64 {
        match self.regime {
            Regime::Growing => 0,
            Regime::Fixed(k) => 1 + u64::from(k),
        }
    }

    /// Seed of replicate `rep`; depends only on the master seed, the cell
    /// and `rep`, not on the rest of the grid.
    pub fn replicate_seed(&self, master: u64, rep: usize) -> u64 {
        mix(&[master, self.regime_code(), self.n as u64, self.m as u64, rep as u64])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub cell: Cell,
    pub rep: usize,
    pub seed: u64,
    /// Pipeline failures are kept per replicate rather than aborting the grid.
    pub outcome: std::result::Result<ReplicateOutcome, String>,
    pub runtime_ms: u64,
}

pub fn run_cell_replicate(cell: Cell, rep: usize, grid: &ExperimentGrid) -> CellResult {
    let seed = cell.replicate_seed(grid.seed, rep);
    let start = Instant::now();
    let outcome = run_replicate(&cell.design(seed), grid.selection).map_err(|e| e.to_string());
    let runtime_ms = if grid.timing {
        start.elapsed().as_millis() as u64
    } else {
        0
    };
    if let Err(e) = &outcome {
        log::warn!("{} n={} m={} rep={rep}: {e}", cell.regime.name(), cell.n, cell.m);
    }
    CellResult {
        cell,
        rep,
        seed,
        outcome,
        runtime_ms,
    }
}

/// Runs every retained cell and replicate. `threads = 0` uses rayon's
/// default. Results come back ordered by (cell, replicate) whatever the
/// scheduling.
pub fn run_grid(grid: &ExperimentGrid, threads: usize) -> Result<Vec<CellResult>> {
    if grid.replicates == 0 {
        return Err(Error::Usage("replicates must be positive".into()));
    }
    let (cells, skipped) = grid.cells();
    for (cell, reason) in &skipped {
        log::warn!("skipping {} n={} m={}: {reason}", cell.regime.name(), cell.n, cell.m);
    }
    let tasks: Vec<(Cell, usize)> = cells
        .iter()
        .flat_map(|&c| (0..grid.replicates).map(move |r| (c, r)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Data(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| {
        tasks
            .par_iter()
            .map(|&(cell, rep)| run_cell_replicate(cell, rep, grid))
            .collect()
    }))
}

/// One line of the grid CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub regime: String,
    pub n: usize,
    pub m: usize,
    pub rep: usize,
    pub seed: u64,
    pub ari_true_k: f64,
    pub ari_gap_k: f64,
    pub k_gap: usize,
    #[serde(rename = "norm_R_Gamma")]
    pub norm_r_gamma: f64,
    pub norm_hollow: f64,
    #[serde(rename = "norm_SW")]
    pub norm_sw: f64,
    #[serde(rename = "norm_Sinv")]
    pub norm_sinv: f64,
    #[serde(rename = "norm_V_2inf")]
    pub norm_v_2inf: f64,
    #[serde(rename = "norm_VS_2inf")]
    pub norm_vs_2inf: f64,
    pub delta: f64,
    pub b: f64,
    pub runtime_ms: u64,
}

pub const GRID_COLUMNS: [&str; 17] = [
    "regime",
    "n",
    "m",
    "rep",
    "seed",
    "ari_true_k",
    "ari_gap_k",
    "k_gap",
    "norm_R_Gamma",
    "norm_hollow",
    "norm_SW",
    "norm_Sinv",
    "norm_V_2inf",
    "norm_VS_2inf",
    "delta",
    "b",
    "runtime_ms",
];

impl From<&CellResult> for GridRow {
    fn from(r: &CellResult) -> Self {
        let mut row = GridRow {
            regime: r.cell.regime.name().to_string(),
            n: r.cell.n,
            m: r.cell.m,
            rep: r.rep,
            seed: r.seed,
            ari_true_k: f64::NAN,
            ari_gap_k: f64::NAN,
            k_gap: 0,
            norm_r_gamma: f64::NAN,
            norm_hollow: f64::NAN,
            norm_sw: f64::NAN,
            norm_sinv: f64::NAN,
            norm_v_2inf: f64::NAN,
            norm_vs_2inf: f64::NAN,
            delta: f64::NAN,
            b: f64::NAN,
            runtime_ms: r.runtime_ms,
        };
        if let Ok(o) = &r.outcome {
            let d = &o.diagnostics;
            row.ari_true_k = o.ari_true_k;
            row.ari_gap_k = o.ari_gap_k;
            row.k_gap = o.k_gap;
            row.norm_r_gamma = d.norm_r_gamma;
            row.norm_hollow = d.norm_hollow;
            row.norm_sw = d.norm_sw;
            row.norm_sinv = d.norm_sinv;
            row.norm_v_2inf = d.norm_v_2inf;
            row.norm_vs_2inf = d.norm_vs_2inf;
            row.delta = o.gap.delta;
            row.b = o.gap.b;
        }
        row
    }
}

pub fn write_grid_csv(path: &Path, rows: &[GridRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
    if rows.is_empty() {
        w.write_record(GRID_COLUMNS).map_err(|e| Error::csv(path, e))?;
    }
    for row in rows {
        w.serialize(row).map_err(|e| Error::csv(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_grid_csv(path: &Path) -> Result<Vec<GridRow>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::csv(path, e))?;
    let header = r.headers().map_err(|e| Error::csv(path, e))?;
    if header.iter().ne(GRID_COLUMNS) {
        return Err(Error::Data(format!("{}: not a grid results file", path.display())));
    }
    r.deserialize()
        .map(|rec| rec.map_err(|e| Error::csv(path, e)))
        .collect()
}

/// Per-cell means over replicates that produced numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub replicates: usize,
    pub ari_true_k: f64,
    pub ari_gap_k: f64,
    pub norms: [f64; 6],
}

pub const NORM_NAMES: [&str; 6] = [
    "norm_R_Gamma",
    "norm_hollow",
    "norm_SW",
    "norm_Sinv",
    "norm_V_2inf",
    "norm_VS_2inf",
];

fn norms(row: &GridRow) -> [f64; 6] {
    [
        row.norm_r_gamma,
        row.norm_hollow,
        row.norm_sw,
        row.norm_sinv,
        row.norm_v_2inf,
        row.norm_vs_2inf,
    ]
}

/// Keyed by (regime, n, m).
pub fn summarize(rows: &[GridRow]) -> BTreeMap<(String, usize, usize), CellSummary> {
    let mut groups: BTreeMap<(String, usize, usize), Vec<&GridRow>> = BTreeMap::new();
    for row in rows.iter().filter(|r| r.ari_true_k.is_finite()) {
        groups.entry((row.regime.clone(), row.n, row.m)).or_default().push(row);
    }
    groups
        .into_iter()
        .map(|(key, rows)| {
            let count = rows.len() as f64;
            let mean = |f: &dyn Fn(&GridRow) -> f64| rows.iter().map(|r| f(r)).sum::<f64>() / count;
            let mut norm_means = [0.0; 6];
            for (i, slot) in norm_means.iter_mut().enumerate() {
                *slot = mean(&|r| norms(r)[i]);
            }
            let summary = CellSummary {
                replicates: rows.len(),
                ari_true_k: mean(&|r| r.ari_true_k),
                ari_gap_k: mean(&|r| r.ari_gap_k),
                norms: norm_means,
            };
            (key, summary)
        })
        .collect()
}

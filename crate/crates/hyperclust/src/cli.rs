//! Command-line interface.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use hyperclust_core::clustering::{adjusted_rand_index, choose_k_by_gap, complete_linkage, cut_at_k, Partition};
use hyperclust_core::experiment::{run_replicate_with_artifacts, SelectionMode};
use hyperclust_core::sampler::{generate_design, Regime, SimulationDesign, DEFAULT_ALPHA, DEFAULT_FIXED_KMAX};
use hyperclust_core::spectral::{embed_interactions, Selection, ALIGNMENT_NOTE};
use hyperclust_core::BlockModelSpec;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::formats::{self, DiagnosticRow, EmbeddingTable};
use crate::grid::{self, parse_regime, Cell, ExperimentGrid, GridRow};
use crate::svg;

#[derive(Debug, Parser)]
#[command(
    name = "hyperclust",
    version,
    about = "Spectral clustering of interactions in hypergraph blockmodels"
)]
pub struct Cli {
    /// Master random seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (0: one per core).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// key=value file; its entries override command-line flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample one hypergraph from the simulation design.
    Simulate(SimulateArgs),
    /// Run the simulation grid and write grid.csv.
    Grid(GridArgs),
    /// Embed the interactions of an interaction file.
    Embed(EmbedArgs),
    /// Complete-linkage clustering of an embedding CSV.
    Cluster(ClusterArgs),
    /// Render SVG plots from grid or embedding CSVs.
    Plot(PlotArgs),
    /// Diagnostic norms for one design cell.
    Diagnose(DiagnoseArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    #[arg(long, default_value_t = 999)]
    pub m: usize,
    #[arg(long, default_value = "growing")]
    pub regime: String,
    /// Size cap in the fixed regime.
    #[arg(long, default_value_t = DEFAULT_FIXED_KMAX)]
    pub kmax: u32,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    pub alpha: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    BulkDistance,
    Oracle,
    Empirical,
}

impl Mode {
    fn parse(s: &str) -> Result<Self> {
        <Mode as ValueEnum>::from_str(s, false).map_err(|_| Error::Usage(format!("unknown selection mode `{s}`")))
    }

    fn selection_mode(self) -> SelectionMode {
        match self {
            Mode::BulkDistance => SelectionMode::BulkDistance,
            Mode::Oracle => SelectionMode::Oracle,
            Mode::Empirical => SelectionMode::Empirical,
        }
    }
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// growing, fixed or both.
    #[arg(long, default_value = "both")]
    pub regime: String,
    /// Comma-separated node counts.
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    /// Comma-separated interaction counts.
    #[arg(long, value_delimiter = ',')]
    pub m: Option<Vec<usize>>,
    #[arg(long, default_value_t = 10)]
    pub reps: usize,
    /// Use the full 6 x 6 axes instead of the desk-scale ones.
    #[arg(long)]
    pub full: bool,
    #[arg(long, default_value_t = DEFAULT_FIXED_KMAX)]
    pub kmax: u32,
    /// Record wall-clock milliseconds per replicate.
    #[arg(long)]
    pub timing: bool,
    #[arg(long, value_enum, default_value = "bulk-distance")]
    pub selection: Mode,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Eigenvalue selection; the model-based modes need --communities.
    #[arg(long, value_enum, default_value = "empirical")]
    pub mode: Mode,
    /// Community file; adds a type column to the output.
    #[arg(long)]
    pub communities: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Number of clusters; chosen from the dendrogram when absent.
    #[arg(long)]
    pub k: Option<usize>,
    /// Upper end of the automatic search (default: number of rows).
    #[arg(long)]
    pub kmax: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlotKind {
    AriTable,
    Convergence,
    Scatter,
    Diagnostics,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub kind: Option<PlotKind>,
    /// Leave out the generation-time comment.
    #[arg(long)]
    pub no_timestamp: bool,
    /// Tabulate ARI at the gap-selected k instead of the true k.
    #[arg(long)]
    pub gap_k: bool,
}

#[derive(Debug, Args)]
pub struct DiagnoseArgs {
    #[arg(long, default_value_t = 20)]
    pub n: usize,
    #[arg(long, default_value_t = 999)]
    pub m: usize,
    #[arg(long, default_value = "fixed")]
    pub regime: String,
    #[arg(long, default_value_t = DEFAULT_FIXED_KMAX)]
    pub kmax: u32,
    #[arg(long, default_value_t = 1)]
    pub reps: usize,
    #[arg(long, value_enum, default_value = "bulk-distance")]
    pub selection: Mode,
}

/// Settings shared by all commands after config overrides.
#[derive(Debug, Clone)]
struct Global {
    seed: u64,
    threads: usize,
    out: PathBuf,
}

const GLOBAL_KEYS: [&str; 3] = ["seed", "threads", "out"];

fn keys<'a>(extra: &[&'a str]) -> Vec<&'a str> {
    GLOBAL_KEYS.iter().copied().chain(extra.iter().copied()).collect()
}

fn apply_path(config: &Config, key: &str, slot: &mut Option<PathBuf>) {
    if let Some(v) = config.raw(key) {
        *slot = Some(PathBuf::from(v));
    }
}

fn required(path: Option<PathBuf>, flag: &str) -> Result<PathBuf> {
    path.ok_or_else(|| Error::Usage(format!("missing --{flag}")))
}

fn prepare_out(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return Ok(());
        }
        Err(e) => {
            let text = e.to_string();
            let text = text.strip_prefix("error: ").unwrap_or(&text);
            return Err(Error::Usage(text.trim_end().to_string()));
        }
    };
    execute(cli)
}

pub fn execute(cli: Cli) -> Result<()> {
    let config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let mut global = Global {
        seed: cli.seed.unwrap_or(1),
        threads: cli.threads.unwrap_or(0),
        out: cli.out.clone().unwrap_or_else(|| PathBuf::from(".")),
    };
    config.apply("seed", &mut global.seed)?;
    config.apply("threads", &mut global.threads)?;
    config.apply("out", &mut global.out)?;

    match cli.command {
        Command::Simulate(args) => simulate(args, &config, &global),
        Command::Grid(args) => run_grid(args, &config, &global),
        Command::Embed(args) => embed(args, &config, &global),
        Command::Cluster(args) => cluster(args, &config, &global),
        Command::Plot(args) => plot(args, &config, &global),
        Command::Diagnose(args) => diagnose(args, &config, &global),
    }
}

fn simulate(mut a: SimulateArgs, config: &Config, g: &Global) -> Result<()> {
    config.check_keys(&keys(&["n", "m", "regime", "kmax", "alpha"]))?;
    config.apply("n", &mut a.n)?;
    config.apply("m", &mut a.m)?;
    config.apply("regime", &mut a.regime)?;
    config.apply("kmax", &mut a.kmax)?;
    config.apply("alpha", &mut a.alpha)?;
    let mut design = SimulationDesign::new(a.n, a.m, parse_regime(&a.regime, a.kmax)?, g.seed);
    design.alpha = a.alpha;
    let (spec, h) = generate_design(&design, &design.stream())?;
    prepare_out(&g.out)?;
    formats::write_interactions(&g.out.join("hypergraph.txt"), &h)?;
    formats::write_communities(&g.out.join("communities.txt"), &spec.labels())?;
    log::info!("wrote {} interactions on {} nodes to {}", h.m(), h.n(), g.out.display());
    Ok(())
}

fn regimes(name: &str, k_max: u32) -> Result<Vec<Regime>> {
    match name {
        "both" => Ok(vec![Regime::Growing, Regime::Fixed(k_max)]),
        other => Ok(vec![parse_regime(other, k_max)?]),
    }
}

fn run_grid(mut a: GridArgs, config: &Config, g: &Global) -> Result<()> {
    config.check_keys(&keys(&[
        "regime",
        "n",
        "m",
        "reps",
        "full",
        "kmax",
        "timing",
        "selection",
    ]))?;
    config.apply("regime", &mut a.regime)?;
    config.apply("reps", &mut a.reps)?;
    config.apply("full", &mut a.full)?;
    config.apply("kmax", &mut a.kmax)?;
    config.apply("timing", &mut a.timing)?;
    if let Some(v) = config.raw("selection") {
        a.selection = Mode::parse(v)?;
    }
    if let Some(n) = config.list("n")? {
        a.n = Some(n);
    }
    if let Some(m) = config.list("m")? {
        a.m = Some(m);
    }

    let mut grid = if a.full {
        ExperimentGrid::full(g.seed)
    } else {
        ExperimentGrid::desk(g.seed)
    };
    if let Some(n) = a.n {
        grid.n_values = n;
    }
    if let Some(m) = a.m {
        grid.m_values = m;
    }
    grid.regimes = regimes(&a.regime, a.kmax)?;
    grid.replicates = a.reps;
    grid.timing = a.timing;
    grid.selection = a.selection.selection_mode();

    let results = grid::run_grid(&grid, g.threads)?;
    let rows: Vec<GridRow> = results.iter().map(GridRow::from).collect();
    prepare_out(&g.out)?;
    let path = g.out.join("grid.csv");
    grid::write_grid_csv(&path, &rows)?;
    let failed = results.iter().filter(|r| r.outcome.is_err()).count();
    log::info!(
        "wrote {} rows to {} ({failed} failed replicates)",
        rows.len(),
        path.display()
    );
    Ok(())
}

fn embed(mut a: EmbedArgs, config: &Config, g: &Global) -> Result<()> {
    config.check_keys(&keys(&["input", "d", "mode", "communities"]))?;
    apply_path(config, "input", &mut a.input);
    apply_path(config, "communities", &mut a.communities);
    config.apply("d", &mut a.d)?;
    if let Some(v) = config.raw("mode") {
        a.mode = Mode::parse(v)?;
    }
    let input = required(a.input, "input")?;
    let h = formats::read_interactions(&input)?;
    let spec = match &a.communities {
        Some(path) => {
            let labels = formats::read_communities(path)?;
            if labels.len() != h.n() {
                return Err(Error::Data(format!(
                    "{}: {} labels for {} nodes",
                    path.display(),
                    labels.len(),
                    h.n()
                )));
            }
            Some(BlockModelSpec::from_hypergraph(&h, &labels)?)
        }
        None => None,
    };
    let selection = match (a.mode, &spec) {
        (Mode::Empirical, _) => Selection::Empirical,
        (Mode::Oracle, Some(spec)) => Selection::oracle(spec, None)?,
        (Mode::BulkDistance, Some(spec)) => Selection::bulk_distance(spec),
        (_, None) => return Err(Error::Usage("this selection mode needs --communities".into())),
    };
    let r = h.incidence_matrix();
    let emb = embed_interactions(&r, a.d, &selection)?;
    log::info!(
        "selection {}: eigenvalues {:?}",
        selection.name(),
        emb.lambda_hat.as_slice()
    );
    log::info!("singular values {:?}", emb.s_hat.as_slice());
    let shown = emb.spectrum.len().min(10);
    log::info!(
        "leading spectrum {:?} with neighbour gaps {:?}",
        &emb.spectrum.as_slice()[..shown],
        &emb.gaps[..shown]
    );
    let table = EmbeddingTable {
        coords: emb.embedding,
        types: spec.map(|s| s.types().distinct_type_labels().0),
    };
    prepare_out(&g.out)?;
    formats::write_embedding(&g.out.join("embedding.csv"), &table)
}

fn cluster(mut a: ClusterArgs, config: &Config, g: &Global) -> Result<()> {
    config.check_keys(&keys(&["input", "k", "kmax"]))?;
    apply_path(config, "input", &mut a.input);
    if let Some(k) = config.get("k")? {
        a.k = Some(k);
    }
    if let Some(k) = config.get("kmax")? {
        a.kmax = Some(k);
    }
    let input = required(a.input, "input")?;
    let table = formats::read_embedding(&input)?;
    let dend = complete_linkage(&table.coords)?;
    let m = table.coords.nrows();
    let k = match a.k {
        Some(k) => k,
        None => {
            let k = choose_k_by_gap(&dend, a.kmax.unwrap_or(m));
            let ties = dend.heights().filter(|&h| h < 1e-12).count();
            if ties > 0 && a.kmax.is_none() {
                log::warn!(
                    "{ties} merges at height 0 (repeated rows); the gap search may stop at them, set --kmax or --k"
                );
            }
            k
        }
    };
    let partition = cut_at_k(&dend, k).map_err(|_| Error::Usage(format!("k must lie in 1..={m}")))?;
    log::info!("{k} clusters");
    if let Some(types) = &table.types {
        let ari = adjusted_rand_index(&partition, &Partition::from_labels(types))?;
        log::info!("ARI against the type column: {ari}");
    }
    prepare_out(&g.out)?;
    formats::write_dendrogram(&g.out.join("dendrogram.csv"), &dend)?;
    formats::write_partition(&g.out.join("partition.csv"), &partition)
}

fn plot(mut a: PlotArgs, config: &Config, g: &Global) -> Result<()> {
    config.check_keys(&keys(&["input", "kind", "timestamp", "gap_k"]))?;
    apply_path(config, "input", &mut a.input);
    if let Some(v) = config.raw("kind") {
        a.kind = Some(
            <PlotKind as ValueEnum>::from_str(v, false)
                .map_err(|_| Error::Usage(format!("unknown plot kind `{v}`")))?,
        );
    }
    if let Some(t) = config.get::<bool>("timestamp")? {
        a.no_timestamp = !t;
    }
    config.apply("gap_k", &mut a.gap_k)?;
    let input = required(a.input, "input")?;
    let kind = a.kind.ok_or_else(|| Error::Usage("missing --kind".into()))?;
    let stamp = !a.no_timestamp;

    let outputs: Vec<(String, String)> = match kind {
        PlotKind::Scatter => vec![(
            "scatter.svg".into(),
            svg::scatter_plot(&formats::read_embedding(&input)?, stamp)?,
        )],
        PlotKind::AriTable => {
            let rows = grid::read_grid_csv(&input)?;
            vec![("ari-table.svg".into(), svg::ari_table(&rows, a.gap_k, stamp)?)]
        }
        PlotKind::Convergence | PlotKind::Diagnostics => {
            let rows = grid::read_grid_csv(&input)?;
            let regimes = svg::regimes(&rows);
            if regimes.is_empty() {
                return Err(Error::Data(format!("{}: no results", input.display())));
            }
            regimes
                .iter()
                .map(|r| {
                    Ok(if kind == PlotKind::Convergence {
                        (format!("convergence-{r}.svg"), svg::convergence_plot(&rows, r, stamp)?)
                    } else {
                        (format!("diagnostics-{r}.svg"), svg::diagnostics_plot(&rows, r, stamp)?)
                    })
                })
                .collect::<Result<_>>()?
        }
    };
    prepare_out(&g.out)?;
    for (name, doc) in outputs {
        formats::write_file(&g.out.join(&name), doc.as_bytes())?;
        log::info!("wrote {}", g.out.join(&name).display());
    }
    Ok(())
}

fn diagnose(mut a: DiagnoseArgs, config: &Config, g: &Global) -> Result<()> {
    config.check_keys(&keys(&["n", "m", "regime", "kmax", "reps", "selection"]))?;
    config.apply("n", &mut a.n)?;
    config.apply("m", &mut a.m)?;
    config.apply("regime", &mut a.regime)?;
    config.apply("kmax", &mut a.kmax)?;
    config.apply("reps", &mut a.reps)?;
    if let Some(v) = config.raw("selection") {
        a.selection = Mode::parse(v)?;
    }
    let cell = Cell {
        regime: parse_regime(&a.regime, a.kmax)?,
        n: a.n,
        m: a.m,
    };
    log::info!("{ALIGNMENT_NOTE}");
    let mut rows = Vec::new();
    for rep in 0..a.reps {
        let seed = cell.replicate_seed(g.seed, rep);
        let (out, _) = run_replicate_with_artifacts(&cell.design(seed), a.selection.selection_mode())?;
        let d = &out.diagnostics;
        let mut metrics: Vec<(&str, f64)> = d.metrics().to_vec();
        metrics.extend([
            ("identical_actions", d.identical_actions),
            ("min_type_distance", d.min_type_distance),
            ("delta", out.gap.delta),
            ("b", out.gap.b),
            ("ari_true_k", out.ari_true_k),
        ]);
        for (metric, value) in metrics {
            rows.push(DiagnosticRow {
                n: a.n,
                m: a.m,
                regime: cell.regime.name().to_string(),
                seed,
                metric: metric.to_string(),
                value,
            });
        }
    }
    prepare_out(&g.out)?;
    formats::write_diagnostics(&g.out.join("diagnostics.csv"), &rows)
}

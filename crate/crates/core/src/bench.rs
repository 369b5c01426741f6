//! Parameter sweeps comparing shared-nothing and sharing aggregation on
//! generated graphs.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::generator::{generate, GenConfig};
use crate::query::{execute, parse, Dataset, ExecOptions, ExecStats, PhaseTimes, Strategy};

pub const DEFAULT_QUERY: &str = "SELECT TopMaxDegreeVertices({sv}) FROM G GROUP BY betweeness() \
SUMMARIZE BY SumVMrByVGrpEGrp(), SumEMrByVGrpEGrp()";

fn default_repetitions() -> usize {
    3
}

fn default_warmup() -> bool {
    true
}

fn default_query() -> String {
    DEFAULT_QUERY.to_string()
}

fn default_seed() -> u64 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentGrid {
    pub sv: Vec<usize>,
    pub cardinality: Vec<u64>,
    pub degree: Vec<usize>,
    pub n: Vec<usize>,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    /// Run each cell once untimed before measuring.
    #[serde(default = "default_warmup")]
    pub warmup: bool,
    #[serde(default)]
    pub cycle_fraction: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Query text; `{sv}` is replaced by the hub budget.
    #[serde(default = "default_query")]
    pub query: String,
}

#[derive(Debug, Error)]
pub enum GridError {
    #[error("grid list `{0}` is empty")]
    EmptyList(&'static str),
    #[error("repetitions must be at least 1")]
    NoRepetitions,
    #[error("cycle_fraction {0} outside [0, 1]")]
    BadFraction(f64),
    #[error("cannot read grid: {0}")]
    Toml(#[from] toml::de::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl ExperimentGrid {
    pub fn from_toml(text: &str) -> Result<Self, GridError> {
        let grid: Self = toml::from_str(text)?;
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<(), GridError> {
        for (name, empty) in [
            ("sv", self.sv.is_empty()),
            ("cardinality", self.cardinality.is_empty()),
            ("degree", self.degree.is_empty()),
            ("n", self.n.is_empty()),
        ] {
            if empty {
                return Err(GridError::EmptyList(name));
            }
        }
        if self.repetitions == 0 {
            return Err(GridError::NoRepetitions);
        }
        if !(0.0..=1.0).contains(&self.cycle_fraction) {
            return Err(GridError::BadFraction(self.cycle_fraction));
        }
        Ok(())
    }

    /// Generator settings for one `(n, degree, C)` combination.
    pub fn gen_config(&self, n: usize, degree: usize, cardinality: u64) -> GenConfig {
        GenConfig {
            n,
            degree,
            cardinality,
            cycle_fraction: self.cycle_fraction,
            seed: self.seed,
        }
    }
}

/// One grid cell. Times are averages over the measured repetitions, in
/// milliseconds; add-op counts are deterministic.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CellResult {
    pub n: usize,
    pub degree: usize,
    pub cardinality: u64,
    pub sv: usize,
    pub sn_ms: f64,
    pub as_ms: f64,
    pub sn_ops: u64,
    pub as_ops: u64,
    pub as_deliveries: u64,
    pub as_merges: u64,
    pub savings: f64,
    pub elements: usize,
    pub groups: usize,
    pub clusters: usize,
    pub tag_ms: f64,
    pub sg_ext_ms: f64,
    pub plan_ms: f64,
    pub agg_ms: f64,
    pub total_ms: f64,
    pub error: Option<String>,
}

impl CellResult {
    pub fn phase_sum_ms(&self) -> f64 {
        self.tag_ms + self.sg_ext_ms + self.plan_ms + self.agg_ms
    }
}

fn ms(secs: f64) -> f64 {
    secs * 1e3
}

struct Measured {
    stats: ExecStats,
    times: PhaseTimes,
}

fn measure(ds: &Dataset, text: &str, strategy: Strategy, grid: &ExperimentGrid) -> Result<Measured, String> {
    let spec = parse(text).map_err(|e| e.to_string())?;
    let opts = ExecOptions {
        strategy,
        ..Default::default()
    };
    let run = || execute(ds, &spec, &opts).map(|ha| ha.stats).map_err(|e| e.to_string());
    if grid.warmup {
        run()?;
    }
    let mut first: Option<ExecStats> = None;
    let mut sum = PhaseTimes::default();
    for _ in 0..grid.repetitions {
        let s = run()?;
        if let Some(f) = &first {
            if (f.ops, f.sn_ops) != (s.ops, s.sn_ops) {
                return Err(format!("add-op counts differ between repetitions: {:?} vs {:?}", f.ops, s.ops));
            }
        }
        let t = s.times;
        sum.select += t.select;
        sum.tag += t.tag;
        sum.sg_ext += t.sg_ext;
        sum.plan += t.plan;
        sum.agg += t.agg;
        sum.total += t.total;
        first.get_or_insert(s);
    }
    let r = grid.repetitions as f64;
    let times = PhaseTimes {
        select: sum.select / r,
        tag: sum.tag / r,
        sg_ext: sum.sg_ext / r,
        plan: sum.plan / r,
        agg: sum.agg / r,
        total: sum.total / r,
    };
    Ok(Measured {
        stats: first.expect("at least one repetition"),
        times,
    })
}

fn run_cell(ds: &Dataset, grid: &ExperimentGrid, cell: &mut CellResult) -> Result<(), String> {
    let text = grid.query.replace("{sv}", &cell.sv.to_string());
    let sn = measure(ds, &text, Strategy::SharedNothing, grid)?;
    let sharing = measure(ds, &text, Strategy::default(), grid)?;
    if sn.stats.ops.total() != sn.stats.sn_ops {
        return Err(format!(
            "shared-nothing spent {} add-ops but the closed form gives {}",
            sn.stats.ops.total(),
            sn.stats.sn_ops
        ));
    }
    let s = &sharing.stats;
    cell.sn_ops = sn.stats.sn_ops;
    cell.as_ops = s.ops.total();
    cell.as_deliveries = s.ops.deliveries;
    cell.as_merges = s.ops.merges;
    cell.savings = if cell.sn_ops == 0 {
        0.0
    } else {
        1.0 - cell.as_ops as f64 / cell.sn_ops as f64
    };
    cell.elements = s.elements;
    cell.groups = s.groups;
    cell.clusters = s.clusters;
    cell.sn_ms = ms(sn.times.total);
    cell.as_ms = ms(sharing.times.total);
    cell.tag_ms = ms(sharing.times.tag);
    cell.sg_ext_ms = ms(sharing.times.sg_ext);
    cell.plan_ms = ms(sharing.times.plan);
    cell.agg_ms = ms(sharing.times.agg);
    cell.total_ms = ms(sharing.times.total);
    Ok(())
}

/// Runs every cell in order; a failing cell is recorded and the grid goes on.
pub fn run_grid(grid: &ExperimentGrid, mut progress: impl FnMut(&CellResult)) -> Vec<CellResult> {
    let mut out = Vec::new();
    for &n in &grid.n {
        for &degree in &grid.degree {
            for &cardinality in &grid.cardinality {
                let ds = Dataset::new("bench", generate(&grid.gen_config(n, degree, cardinality)));
                for &sv in &grid.sv {
                    let mut cell = CellResult {
                        n,
                        degree,
                        cardinality,
                        sv,
                        ..Default::default()
                    };
                    if let Err(e) = run_cell(&ds, grid, &mut cell) {
                        cell.error = Some(e);
                    }
                    progress(&cell);
                    out.push(cell);
                }
            }
        }
    }
    out
}

#[derive(Serialize)]
struct PhaseRow {
    n: usize,
    degree: usize,
    cardinality: u64,
    sv: usize,
    tag_ms: f64,
    sg_ext_ms: f64,
    plan_ms: f64,
    agg_ms: f64,
    total_ms: f64,
    plan_fraction: f64,
    phase_sum_error: f64,
}

/// C×SV table of add-ops and savings for one degree.
pub fn markdown_table(results: &[CellResult], degree: usize, n: usize) -> String {
    let cells: Vec<&CellResult> = results.iter().filter(|c| c.degree == degree && c.n == n).collect();
    let mut svs: Vec<usize> = cells.iter().map(|c| c.sv).collect();
    svs.sort_unstable();
    svs.dedup();
    let mut cs: Vec<u64> = cells.iter().map(|c| c.cardinality).collect();
    cs.sort_unstable();
    cs.dedup();

    let mut s = format!("Add-ops, n={n}, degree={degree} (SN / AS / savings)\n\n| C \\ SV |");
    for sv in &svs {
        let _ = write!(s, " {sv} |");
    }
    s.push_str("\n|---|");
    s.push_str(&"---|".repeat(svs.len()));
    s.push('\n');
    for c in &cs {
        let _ = write!(s, "| {c} |");
        for sv in &svs {
            match cells.iter().find(|x| x.cardinality == *c && x.sv == *sv) {
                Some(x) if x.error.is_none() => {
                    let _ = write!(s, " {} / {} / {:.1}% |", x.sn_ops, x.as_ops, 100.0 * x.savings);
                }
                Some(_) => s.push_str(" error |"),
                None => s.push_str(" - |"),
            }
        }
        s.push('\n');
    }
    s
}

/// Writes `results.csv`, `phases.csv`, `table_dense.md` (largest degree)
/// and `table_sparse.md` (smallest degree), both at the first `n`.
pub fn write_reports(grid: &ExperimentGrid, results: &[CellResult], dir: &Path) -> Result<(), GridError> {
    fs::create_dir_all(dir)?;
    let mut w = csv::Writer::from_path(dir.join("results.csv"))?;
    for r in results {
        w.serialize(r)?;
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(dir.join("phases.csv"))?;
    for r in results.iter().filter(|r| r.error.is_none()) {
        w.serialize(PhaseRow {
            n: r.n,
            degree: r.degree,
            cardinality: r.cardinality,
            sv: r.sv,
            tag_ms: r.tag_ms,
            sg_ext_ms: r.sg_ext_ms,
            plan_ms: r.plan_ms,
            agg_ms: r.agg_ms,
            total_ms: r.total_ms,
            plan_fraction: if r.total_ms > 0.0 { r.plan_ms / r.total_ms } else { 0.0 },
            phase_sum_error: if r.total_ms > 0.0 {
                (r.phase_sum_ms() - r.total_ms).abs() / r.total_ms
            } else {
                0.0
            },
        })?;
    }
    w.flush()?;

    let n = grid.n[0];
    let dense = *grid.degree.iter().max().expect("validated");
    let sparse = *grid.degree.iter().min().expect("validated");
    fs::write(dir.join("table_dense.md"), markdown_table(results, dense, n))?;
    fs::write(dir.join("table_sparse.md"), markdown_table(results, sparse, n))?;
    Ok(())
}

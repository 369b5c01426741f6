use std::fs;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use hubgraph_core::bench::{run_grid, write_reports, ExperimentGrid};
use hubgraph_core::generator::{generate, GenConfig};
use hubgraph_core::graph_store::{load_graph, write_graph, GraphFiles};
use hubgraph_core::query::{execute, parse, Dataset, ExecOptions, Strategy};
use hubgraph_core::samples::{closeness_graph, figure3_graph, social_graph};
use hubgraph_server::Manifest;

#[derive(Parser)]
#[command(name = "hubgraph", version, about = "Hub-graph exploration over attributed directed graphs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    SharedNothing,
    Sharing,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a synthetic graph as vertices.tsv and edges.tsv.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        degree: usize,
        #[arg(long)]
        cardinality: u64,
        #[arg(long, default_value_t = 0.05)]
        cycles: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a parameter grid and write CSV and markdown reports.
    Bench {
        #[arg(long)]
        grid: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one query against a graph on disk and print the hub graph as JSON.
    Query {
        #[arg(long)]
        vertices: PathBuf,
        #[arg(long)]
        edges: PathBuf,
        #[arg(long, default_value = "\t")]
        delimiter: char,
        /// Query text; `@FILE` reads it from a file.
        #[arg(long)]
        text: String,
        #[arg(long, value_enum, default_value = "sharing")]
        strategy: StrategyArg,
    },
    /// Serve the HTTP API over the datasets of a manifest.
    Serve {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, default_value = "127.0.0.1:8080")]
        bind: SocketAddr,
    },
    /// Write the bundled sample graphs and a manifest listing them.
    Sample {
        #[arg(long, default_value = "data")]
        out: PathBuf,
    },
}

fn byte(c: char) -> Result<u8, String> {
    u8::try_from(c).map_err(|_| format!("delimiter `{c}` is not a single byte"))
}

fn gen(cfg: GenConfig, out: &Path) -> Result<(), String> {
    let g = generate(&cfg);
    write_graph(&g, &GraphFiles::in_dir(out)).map_err(|e| e.to_string())?;
    println!("{} vertices, {} edges -> {}", g.vertex_count(), g.edge_count(), out.display());
    Ok(())
}

fn bench(grid: &Path, out: &Path) -> Result<(), String> {
    let text = fs::read_to_string(grid).map_err(|e| format!("{}: {e}", grid.display()))?;
    let grid = ExperimentGrid::from_toml(&text).map_err(|e| e.to_string())?;
    let results = run_grid(&grid, |c| match &c.error {
        Some(e) => eprintln!("n={} degree={} C={} SV={}: {e}", c.n, c.degree, c.cardinality, c.sv),
        None => eprintln!(
            "n={} degree={} C={} SV={}: SN {} AS {} ops ({:.1}% saved), plan {:.2} of {:.2} ms",
            c.n,
            c.degree,
            c.cardinality,
            c.sv,
            c.sn_ops,
            c.as_ops,
            c.savings * 100.0,
            c.plan_ms,
            c.total_ms
        ),
    });
    write_reports(&grid, &results, out).map_err(|e| e.to_string())?;
    println!("{} cells -> {}", results.len(), out.display());
    Ok(())
}

fn query(files: &GraphFiles, text: &str, strategy: StrategyArg) -> Result<(), String> {
    let text = match text.strip_prefix('@') {
        Some(path) => fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?,
        None => text.to_string(),
    };
    let spec = parse(&text).map_err(|e| e.to_string())?;
    let ds = Dataset::new("G", load_graph(files).map_err(|e| e.to_string())?);
    let opts = ExecOptions {
        strategy: match strategy {
            StrategyArg::SharedNothing => Strategy::SharedNothing,
            StrategyArg::Sharing => Strategy::default(),
        },
        ..Default::default()
    };
    let ha = execute(&ds, &spec, &opts).map_err(|e| e.to_string())?;
    let out = serde_json::json!({ "hubs": ha.hubs, "edges": ha.edges, "stats": ha.stats });
    println!("{}", serde_json::to_string_pretty(&out).expect("hub graph serializes"));
    Ok(())
}

fn serve(manifest: &Path, bind: SocketAddr) -> Result<(), String> {
    let m = Manifest::from_file(manifest).map_err(|e| e.to_string())?;
    let rt = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
    eprintln!("listening on http://{bind}");
    rt.block_on(hubgraph_server::serve(bind, &m)).map_err(|e| e.to_string())
}

fn sample(out: &Path) -> Result<(), String> {
    let mut manifest = String::new();
    for (name, g) in [("twitter", social_graph()), ("closeness", closeness_graph()), ("tags", figure3_graph())] {
        write_graph(&g, &GraphFiles::in_dir(out.join(name))).map_err(|e| e.to_string())?;
        manifest.push_str(&format!(
            "[[dataset]]\nname = \"{name}\"\nvertices = \"{name}/vertices.tsv\"\nedges = \"{name}/edges.tsv\"\n\n"
        ));
    }
    fs::write(out.join("datasets.toml"), manifest).map_err(|e| e.to_string())?;
    println!("samples and datasets.toml -> {}", out.display());
    Ok(())
}

fn main() -> ExitCode {
    let result = match Cli::parse().cmd {
        Cmd::Gen {
            n,
            degree,
            cardinality,
            cycles,
            seed,
            out,
        } => {
            if !(0.0..=1.0).contains(&cycles) {
                Err(format!("--cycles {cycles} outside [0, 1]"))
            } else {
                let cfg = GenConfig {
                    n,
                    degree,
                    cardinality,
                    cycle_fraction: cycles,
                    seed,
                };
                gen(cfg, &out)
            }
        }
        Cmd::Bench { grid, out } => bench(&grid, &out),
        Cmd::Query {
            vertices,
            edges,
            delimiter,
            text,
            strategy,
        } => byte(delimiter).and_then(|delimiter| {
            let files = GraphFiles {
                vertices,
                edges,
                delimiter,
            };
            query(&files, &text, strategy)
        }),
        Cmd::Serve { manifest, bind } => serve(&manifest, bind),
        Cmd::Sample { out } => sample(&out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

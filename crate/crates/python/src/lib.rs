//! Python bindings: load or generate a dataset, run queries, zoom.

use std::sync::Arc;

use pyo3::exceptions::{PyKeyError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

use hubgraph_core::generator::{generate, GenConfig};
use hubgraph_core::graph_store::{load_graph, GraphFiles, Vid};
use hubgraph_core::query::{self, ExecOptions, Strategy, ZoomOverrides};
use hubgraph_core::samples;

fn value_err(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, value: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(value_err)?;
    py.import("json")?.call_method1("loads", (text,))
}

fn strategy(name: &str) -> PyResult<Strategy> {
    match name {
        "sharing" => Ok(Strategy::default()),
        "shared_nothing" => Ok(Strategy::SharedNothing),
        other => Err(value_err(format!("unknown strategy `{other}`"))),
    }
}

/// A graph with its condensation and reachability index.
#[pyclass(frozen)]
struct Dataset {
    inner: Arc<query::Dataset>,
}

#[pymethods]
impl Dataset {
    /// Loads vertex and edge tables from disk.
    #[staticmethod]
    #[pyo3(signature = (name, vertices, edges, delimiter = "\t"))]
    fn load(name: &str, vertices: &str, edges: &str, delimiter: &str) -> PyResult<Self> {
        let delimiter = match delimiter.as_bytes() {
            [b] => *b,
            _ => return Err(value_err("delimiter must be a single byte")),
        };
        let files = GraphFiles {
            vertices: vertices.into(),
            edges: edges.into(),
            delimiter,
        };
        let g = load_graph(&files).map_err(value_err)?;
        Ok(Self {
            inner: Arc::new(query::Dataset::new(name, g)),
        })
    }

    #[staticmethod]
    #[pyo3(signature = (n, degree, cardinality, cycles = 0.05, seed = 1))]
    fn generate(n: usize, degree: usize, cardinality: u64, cycles: f64, seed: u64) -> PyResult<Self> {
        if !(0.0..=1.0).contains(&cycles) {
            return Err(value_err(format!("cycles {cycles} outside [0, 1]")));
        }
        let g = generate(&GenConfig {
            n,
            degree,
            cardinality,
            cycle_fraction: cycles,
            seed,
        });
        Ok(Self {
            inner: Arc::new(query::Dataset::new("generated", g)),
        })
    }

    /// One of the bundled graphs: `twitter`, `closeness` or `tags`.
    #[staticmethod]
    fn sample(name: &str) -> PyResult<Self> {
        let g = match name {
            "twitter" => samples::social_graph(),
            "closeness" => samples::closeness_graph(),
            "tags" => samples::figure3_graph(),
            other => return Err(PyKeyError::new_err(other.to_string())),
        };
        Ok(Self {
            inner: Arc::new(query::Dataset::new(name, g)),
        })
    }

    fn info<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.info())
    }

    #[pyo3(signature = (text, strategy = "sharing"))]
    fn query(&self, py: Python<'_>, text: &str, strategy: &str) -> PyResult<HubGraph> {
        let spec = query::parse(text).map_err(value_err)?;
        let opts = ExecOptions {
            strategy: self::strategy(strategy)?,
            ..Default::default()
        };
        let ds = self.inner.clone();
        let graph = py.detach(|| query::execute(&ds, &spec, &opts)).map_err(value_err)?;
        Ok(HubGraph { dataset: ds, graph })
    }
}

/// The result of a query: hubs and one summarized edge per connected pair.
#[pyclass(frozen)]
struct HubGraph {
    dataset: Arc<query::Dataset>,
    graph: query::HaGraph,
}

#[pymethods]
impl HubGraph {
    #[getter]
    fn hubs<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.graph.hubs)
    }

    #[getter]
    fn edges<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.graph.edges)
    }

    #[getter]
    fn stats<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.graph.stats)
    }

    /// Summaries of edge `(x, y)` keyed by name, or `None`.
    fn edge<'py>(&self, py: Python<'py>, x: Vid, y: Vid) -> PyResult<Option<Bound<'py, PyAny>>> {
        let Some(e) = self.graph.edge(x, y) else {
            return Ok(None);
        };
        let map: serde_json::Map<String, serde_json::Value> = e
            .summaries
            .iter()
            .map(|(n, v)| Ok((n.clone(), serde_json::to_value(v)?)))
            .collect::<Result<_, serde_json::Error>>()
            .map_err(value_err)?;
        to_py(py, &map).map(Some)
    }

    /// Vid of the hub with this label.
    fn vid(&self, name: &str) -> PyResult<Vid> {
        self.graph
            .hubs
            .iter()
            .find(|h| h.name.as_deref() == Some(name))
            .map(|h| h.vid)
            .ok_or_else(|| PyKeyError::new_err(name.to_string()))
    }

    #[pyo3(signature = (x, y, k = None))]
    fn zoom(&self, py: Python<'_>, x: Vid, y: Vid, k: Option<usize>) -> PyResult<HubGraph> {
        let over = ZoomOverrides {
            k,
            ..Default::default()
        };
        let ds = self.dataset.clone();
        let graph = py
            .detach(|| query::zoom_edge(&ds, &self.graph, x, y, &over, &ExecOptions::default()))
            .map_err(value_err)?;
        Ok(HubGraph { dataset: ds, graph })
    }

    fn __len__(&self) -> usize {
        self.graph.hubs.len()
    }
}

#[pymodule]
fn hubgraph(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Dataset>()?;
    m.add_class::<HubGraph>()?;
    m.add("SQ1", samples::SQ1)?;
    Ok(())
}

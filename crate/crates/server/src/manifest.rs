use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use hubgraph_core::graph_store::{load_graph, GraphFiles, LoadError, DEFAULT_DELIMITER};
use hubgraph_core::query::Dataset;

/// Datasets to load at startup. Relative paths resolve against the manifest's
/// directory.
///
/// ```toml
/// [[dataset]]
/// name = "twitter"
/// vertices = "twitter/vertices.tsv"
/// edges = "twitter/edges.tsv"
/// ```
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    #[serde(rename = "dataset", default)]
    pub datasets: Vec<DatasetEntry>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetEntry {
    pub name: String,
    pub vertices: PathBuf,
    pub edges: PathBuf,
    /// Single-character column delimiter; tab when absent.
    pub delimiter: Option<char>,
}

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("cannot read manifest {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("malformed manifest {path}: {source}")]
    Parse { path: String, source: toml::de::Error },
    #[error("dataset `{name}`: {source}")]
    Load { name: String, source: LoadError },
    #[error("dataset `{0}` listed twice")]
    Duplicate(String),
    #[error("dataset `{name}`: delimiter `{delimiter}` is not a single byte")]
    Delimiter { name: String, delimiter: char },
}

impl Manifest {
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, ManifestError> {
        let path = path.as_ref();
        let shown = path.display().to_string();
        let text = fs::read_to_string(path).map_err(|source| ManifestError::Read {
            path: shown.clone(),
            source,
        })?;
        let mut m: Manifest = toml::from_str(&text).map_err(|source| ManifestError::Parse { path: shown, source })?;
        let base = path.parent().unwrap_or(Path::new("."));
        for d in &mut m.datasets {
            d.vertices = base.join(&d.vertices);
            d.edges = base.join(&d.edges);
        }
        Ok(m)
    }

    /// Loads, condenses and indexes every dataset.
    pub fn load(&self) -> Result<Vec<Dataset>, ManifestError> {
        let mut out: Vec<Dataset> = Vec::with_capacity(self.datasets.len());
        for d in &self.datasets {
            if out.iter().any(|ds| ds.name() == d.name) {
                return Err(ManifestError::Duplicate(d.name.clone()));
            }
            let delimiter = match d.delimiter {
                None => DEFAULT_DELIMITER,
                Some(c) if c.is_ascii() => c as u8,
                Some(c) => {
                    return Err(ManifestError::Delimiter {
                        name: d.name.clone(),
                        delimiter: c,
                    })
                }
            };
            let files = GraphFiles {
                vertices: d.vertices.clone(),
                edges: d.edges.clone(),
                delimiter,
            };
            let graph = load_graph(&files).map_err(|source| ManifestError::Load {
                name: d.name.clone(),
                source,
            })?;
            out.push(Dataset::new(d.name.clone(), graph));
        }
        Ok(out)
    }
}

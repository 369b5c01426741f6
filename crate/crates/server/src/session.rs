use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, RwLock};

use hubgraph_core::query::{Dataset, HaGraph};

/// A stored hub graph with its navigation lineage.
#[derive(Debug)]
pub struct Session {
    pub id: String,
    pub dataset: Arc<Dataset>,
    pub parent: Option<String>,
    pub graph: HaGraph,
}

/// Loaded datasets plus every hub graph produced so far. Datasets are fixed at
/// startup; hub graphs are only ever added.
#[derive(Debug, Default)]
pub struct SessionStore {
    datasets: Vec<Arc<Dataset>>,
    graphs: RwLock<HashMap<String, Arc<Session>>>,
    next: AtomicU64,
}

impl SessionStore {
    pub fn new(datasets: Vec<Dataset>) -> Self {
        Self {
            datasets: datasets.into_iter().map(Arc::new).collect(),
            ..Default::default()
        }
    }

    pub fn datasets(&self) -> &[Arc<Dataset>] {
        &self.datasets
    }

    pub fn dataset(&self, name: &str) -> Option<&Arc<Dataset>> {
        self.datasets.iter().find(|d| d.name() == name)
    }

    pub fn insert(&self, dataset: Arc<Dataset>, parent: Option<String>, graph: HaGraph) -> Arc<Session> {
        let n = self.next.fetch_add(1, Ordering::Relaxed) + 1;
        let session = Arc::new(Session {
            id: format!("ha-{n}"),
            dataset,
            parent,
            graph,
        });
        self.graphs
            .write()
            .expect("session lock poisoned")
            .insert(session.id.clone(), session.clone());
        session
    }

    pub fn get(&self, id: &str) -> Option<Arc<Session>> {
        self.graphs.read().expect("session lock poisoned").get(id).cloned()
    }

    pub fn len(&self) -> usize {
        self.graphs.read().expect("session lock poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

//! Synthetic attributed graphs: a random topological order, forward edges
//! between uniformly chosen vertex pairs and an optional share of back-edges.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph_store::{AttributedGraph, EdgeRecord, Vertex};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub n: usize,
    /// Average out-degree.
    pub degree: usize,
    /// Target number of distinct `(v_grp, e_grp)` combinations.
    pub cardinality: u64,
    /// Share of edges pointing backwards in the topological order.
    pub cycle_fraction: f64,
    pub seed: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            n: 1000,
            degree: 8,
            cardinality: 100,
            cycle_fraction: 0.05,
            seed: 1,
        }
    }
}

impl GenConfig {
    /// `(C_v, C_e)`: vertex groups get `⌈√C⌉` values and edge groups the rest.
    pub fn group_split(&self) -> (u32, u32) {
        let c = self.cardinality.max(1);
        let cv = (c as f64).sqrt().ceil() as u64;
        let ce = ((c as f64 / cv as f64).round() as u64).max(1);
        (cv as u32, ce as u32)
    }
}

/// Topology and attributes come from separate streams of the seed, so
/// changing `cardinality` leaves the edge structure unchanged.
pub fn generate(cfg: &GenConfig) -> AttributedGraph {
    let mut topo = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut attrs = ChaCha8Rng::seed_from_u64(cfg.seed);
    attrs.set_stream(1);
    let (cv, ce) = cfg.group_split();
    let n = cfg.n;
    let vertices: Vec<Vertex> = (0..n as u64)
        .map(|vid| Vertex::new(vid, attrs.gen_range(0..cv), attrs.gen_range(1..=100)))
        .collect();
    let mut order: Vec<u64> = (0..n as u64).collect();
    order.shuffle(&mut topo);

    let m = if n < 2 { 0 } else { n * cfg.degree };
    let fraction = cfg.cycle_fraction.clamp(0.0, 1.0);
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let i = topo.gen_range(0..n);
        let mut j = topo.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let (lo, hi) = (i.min(j), i.max(j));
        let back = fraction > 0.0 && topo.gen_bool(fraction);
        let (s, t) = if back { (order[hi], order[lo]) } else { (order[lo], order[hi]) };
        edges.push(EdgeRecord::new(s, t, attrs.gen_range(0..ce), attrs.gen_range(1..=100)));
    }
    AttributedGraph::new(vertices, edges).expect("generated ids are unique and in range")
}

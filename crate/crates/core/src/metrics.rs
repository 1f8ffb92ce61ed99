//! Network-level statistics.
//!
//! Clustering, components and distances treat the network as an undirected
//! simple graph: edge direction and multiplicity are ignored and self-loops
//! dropped. Degree histograms keep both direction and multiplicity.

use std::collections::{BTreeMap, VecDeque};

use num_rational::Ratio;
use thiserror::Error;

use crate::network::Network;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("the network has no nodes")]
    EmptyNetwork,
    #[error("network format error: {0}")]
    Format(String),
}

/// Undirected simple adjacency: sorted, deduplicated, no self-loops.
pub fn undirected_neighbors(net: &Network) -> Vec<Vec<usize>> {
    (0..net.node_count())
        .map(|v| {
            let mut adj: Vec<usize> = net
                .successor_indices(v)
                .iter()
                .chain(net.predecessor_indices(v))
                .copied()
                .filter(|&w| w != v)
                .collect();
            adj.sort_unstable();
            adj.dedup();
            adj
        })
        .collect()
}

/// Triangle and connected-triple counts behind the clustering coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Clustering {
    pub triangles: u64,
    /// Σ_v C(deg v, 2).
    pub triples: u64,
}

impl Clustering {
    /// 3·N△ / N∧, defined as 0 when there are no connected triples.
    pub fn ratio(&self) -> Ratio<u64> {
        if self.triples == 0 {
            Ratio::from_integer(0)
        } else {
            Ratio::new(3 * self.triangles, self.triples)
        }
    }

    pub fn value(&self) -> f64 {
        let r = self.ratio();
        *r.numer() as f64 / *r.denom() as f64
    }
}

pub fn clustering_coefficient(net: &Network) -> Clustering {
    let adj = undirected_neighbors(net);
    let triples = adj
        .iter()
        .map(|a| {
            let d = a.len() as u64;
            d * d.saturating_sub(1) / 2
        })
        .sum();
    let mut mark = vec![false; adj.len()];
    let mut triangles = 0u64;
    for (u, nu) in adj.iter().enumerate() {
        for &w in nu {
            mark[w] = true;
        }
        for &v in nu.iter().filter(|&&v| v > u) {
            triangles += adj[v].iter().filter(|&&w| w > v && mark[w]).count() as u64;
        }
        for &w in nu {
            mark[w] = false;
        }
    }
    Clustering { triangles, triples }
}

/// Weakly connected components, largest first; ties go to the component
/// holding the smallest key. Each component lists node indices ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentDecomposition {
    pub components: Vec<Vec<usize>>,
}

impl ComponentDecomposition {
    pub fn giant(&self) -> Option<&[usize]> {
        self.components.first().map(Vec::as_slice)
    }
}

pub fn components(net: &Network) -> ComponentDecomposition {
    let adj = undirected_neighbors(net);
    let n = adj.len();
    let mut seen = vec![false; n];
    let mut comps = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s];
        let mut i = 0;
        while i < comp.len() {
            let u = comp[i];
            i += 1;
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    comp.push(w);
                }
            }
        }
        comp.sort_unstable();
        comps.push(comp);
    }
    // Index order is key order, so comparing first elements compares keys.
    comps.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
    ComponentDecomposition { components: comps }
}

/// Breadth-first distances inside the giant component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Geodesics {
    pub diameter: u64,
    /// Sum of distances over unordered pairs of distinct nodes.
    pub total_distance: u64,
    pub pairs: u64,
}

impl Geodesics {
    pub fn mean(&self) -> Ratio<u64> {
        if self.pairs == 0 {
            Ratio::from_integer(0)
        } else {
            Ratio::new(self.total_distance, self.pairs)
        }
    }
}

pub fn geodesics(net: &Network) -> Result<Geodesics, MetricsError> {
    let decomposition = components(net);
    let giant = decomposition.giant().ok_or(MetricsError::EmptyNetwork)?;
    let adj = undirected_neighbors(net);
    let mut dist = vec![u64::MAX; adj.len()];
    let mut diameter = 0;
    let mut ordered_total = 0;
    let mut queue = VecDeque::new();
    for &s in giant {
        for &v in giant {
            dist[v] = u64::MAX;
        }
        dist[s] = 0;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            diameter = diameter.max(dist[u]);
            ordered_total += dist[u];
            for &w in &adj[u] {
                if dist[w] == u64::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
    }
    let k = giant.len() as u64;
    Ok(Geodesics {
        diameter,
        total_distance: ordered_total / 2,
        pairs: k * (k - 1) / 2,
    })
}

/// Largest shortest-path length within the giant component.
pub fn diameter(net: &Network) -> Result<u64, MetricsError> {
    Ok(geodesics(net)?.diameter)
}

/// Average shortest-path length over distinct pairs in the giant component.
pub fn mean_geodesic(net: &Network) -> Result<Ratio<u64>, MetricsError> {
    Ok(geodesics(net)?.mean())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DegreeHistogram {
    /// degree → number of nodes.
    Undirected(BTreeMap<usize, usize>),
    Directed {
        out_degree: BTreeMap<usize, usize>,
        in_degree: BTreeMap<usize, usize>,
    },
}

fn histogram(degrees: &[usize]) -> BTreeMap<usize, usize> {
    let mut h = BTreeMap::new();
    for &d in degrees {
        *h.entry(d).or_insert(0) += 1;
    }
    h
}

/// Degrees counted per edge record; an undirected self-loop adds 2.
pub fn degree_histogram(net: &Network) -> DegreeHistogram {
    let n = net.node_count();
    if net.is_directed() {
        let mut out_d = vec![0; n];
        let mut in_d = vec![0; n];
        for e in net.edges() {
            out_d[e.from] += 1;
            in_d[e.to] += 1;
        }
        DegreeHistogram::Directed {
            out_degree: histogram(&out_d),
            in_degree: histogram(&in_d),
        }
    } else {
        let mut d = vec![0; n];
        for e in net.edges() {
            d[e.from] += 1;
            d[e.to] += 1;
        }
        DegreeHistogram::Undirected(histogram(&d))
    }
}

/// Whether a walk can traverse every edge exactly once: all edges in one
/// connected component and at most two nodes of odd degree. Edge weights
/// are read as multiplicities and must be positive integers. Direction is
/// ignored.
pub fn eulerian_path_exists(net: &Network) -> Result<bool, MetricsError> {
    let n = net.node_count();
    let mut degree = vec![0u64; n];
    for e in net.edges() {
        if e.weight.fract() != 0.0 || e.weight < 1.0 || e.weight > u32::MAX as f64 {
            return Err(MetricsError::Format(format!(
                "edge {} -> {}: weight {} is not a positive integer multiplicity",
                net.key(e.from),
                net.key(e.to),
                e.weight
            )));
        }
        let w = e.weight as u64;
        degree[e.from] += w;
        degree[e.to] += w;
    }
    let touched: Vec<usize> = (0..n).filter(|&v| degree[v] > 0).collect();
    if let Some(&first) = touched.first() {
        let comps = components(net);
        let holding = comps
            .components
            .iter()
            .find(|c| c.binary_search(&first).is_ok())
            .expect("every node is in a component");
        if touched.iter().any(|v| holding.binary_search(v).is_err()) {
            return Ok(false);
        }
    }
    let odd = degree.iter().filter(|&&d| d % 2 == 1).count();
    Ok(odd == 0 || odd == 2)
}

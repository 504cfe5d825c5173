//! Path pseudo metrics on the vertex set, the intrinsic-metric inequality
//! and distance balls.
//!
//! A positive edge weight rule `p` induces the path pseudo metric
//! `rho(u,v) = inf over connecting paths of sum p(e)`. For strictly positive
//! rules on a connected graph this is a genuine metric, computed by
//! single-source Dijkstra. Per-source results are cached; graphs are
//! immutable so the cache never invalidates.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::collections::BTreeSet;
use std::sync::{Arc, Mutex};

use thiserror::Error;

use crate::graph::{GraphError, MetricGraph};

#[derive(Debug, Error)]
pub enum MetricError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("custom rule must assign a positive weight to every edge")]
    NonPositiveWeight,
    #[error("custom rule needs one weight per edge ({want}), got {got}")]
    WeightCount { got: usize, want: usize },
}

/// Edge weight rules for path metrics.
#[derive(Debug, Clone, PartialEq)]
pub enum MetricRule {
    /// p(e) = |e| — the natural path metric; intrinsic with zero slack.
    Natural,
    /// p(e) = m(u) + m(v) — dominates the natural metric.
    MeasureSum,
    /// p(e) = sqrt(|e|).
    SqrtLength,
    /// p(e) = (Deg(u) max Deg(v))^(-1/2) — intrinsic by construction.
    IntrinsicDefault,
    /// Explicit positive weight per edge, in edge order.
    Custom(Vec<f64>),
}

impl MetricRule {
    pub fn name(&self) -> &'static str {
        match self {
            MetricRule::Natural => "natural",
            MetricRule::MeasureSum => "m_sum",
            MetricRule::SqrtLength => "sqrt",
            MetricRule::IntrinsicDefault => "intrinsic_default",
            MetricRule::Custom(_) => "custom",
        }
    }
}

/// A materializable path pseudo metric over a validated graph.
pub struct PathMetric<'g> {
    graph: &'g MetricGraph,
    rule_name: &'static str,
    /// Weight per edge, indexed like `graph.edges()`.
    weights: Vec<f64>,
    cache: Mutex<std::collections::HashMap<usize, Arc<Vec<f64>>>>,
}

#[derive(Copy, Clone, PartialEq)]
struct HeapItem {
    dist: f64,
    vertex: usize,
}

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        // Min-heap on distance.
        other
            .dist
            .partial_cmp(&self.dist)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Build the path metric for a rule. Rejects unvalidated graphs and
/// non-positive custom weights (zero weights would make the pseudo metric
/// degenerate between distinct vertices).
pub fn path_metric<'g>(
    g: &'g MetricGraph,
    rule: &MetricRule,
) -> Result<PathMetric<'g>, MetricError> {
    g.require_valid()?;
    let (vw, _) = g.weights()?;
    let weights: Vec<f64> = match rule {
        MetricRule::Natural => g.edges().iter().map(|e| e.length).collect(),
        MetricRule::MeasureSum => g
            .edges()
            .iter()
            .map(|e| vw.m[e.tail] + vw.m[e.head])
            .collect(),
        MetricRule::SqrtLength => g.edges().iter().map(|e| e.length.sqrt()).collect(),
        MetricRule::IntrinsicDefault => g
            .edges()
            .iter()
            .map(|e| {
                let d = vw.weighted_degree[e.tail].max(vw.weighted_degree[e.head]);
                1.0 / d.sqrt()
            })
            .collect(),
        MetricRule::Custom(w) => {
            if w.len() != g.edge_count() {
                return Err(MetricError::WeightCount {
                    got: w.len(),
                    want: g.edge_count(),
                });
            }
            w.clone()
        }
    };
    if weights.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
        return Err(MetricError::NonPositiveWeight);
    }
    Ok(PathMetric {
        graph: g,
        rule_name: rule.name(),
        weights,
        cache: Mutex::new(std::collections::HashMap::new()),
    })
}

impl<'g> PathMetric<'g> {
    pub fn rule_name(&self) -> &'static str {
        self.rule_name
    }

    pub fn edge_weight(&self, edge_index: usize) -> f64 {
        self.weights[edge_index]
    }

    /// All distances from a source vertex (Dijkstra, cached).
    pub fn distances_from(&self, source: usize) -> Arc<Vec<f64>> {
        if let Some(hit) = self.cache.lock().unwrap().get(&source) {
            return hit.clone();
        }
        let n = self.graph.vertex_count();
        let mut dist = vec![f64::INFINITY; n];
        dist[source] = 0.0;
        let mut heap = BinaryHeap::new();
        heap.push(HeapItem {
            dist: 0.0,
            vertex: source,
        });
        while let Some(HeapItem { dist: d, vertex: v }) = heap.pop() {
            if d > dist[v] {
                continue;
            }
            for &(u, ei) in self.graph.neighbors(v) {
                let nd = d + self.weights[ei];
                if nd < dist[u] {
                    dist[u] = nd;
                    heap.push(HeapItem { dist: nd, vertex: u });
                }
            }
        }
        let arc = Arc::new(dist);
        self.cache.lock().unwrap().insert(source, arc.clone());
        arc
    }

    pub fn distance(&self, u: usize, v: usize) -> f64 {
        self.distances_from(u)[v]
    }

    /// Materialize all pairwise distances (row per source).
    pub fn all_pairs(&self) -> Vec<Arc<Vec<f64>>> {
        (0..self.graph.vertex_count())
            .map(|v| self.distances_from(v))
            .collect()
    }

    /// The distance ball `{u : rho(u, v) <= r}`.
    pub fn ball(&self, center: usize, radius: f64) -> BTreeSet<usize> {
        assert!(radius >= 0.0, "radius must be nonnegative");
        self.distances_from(center)
            .iter()
            .enumerate()
            .filter(|&(_, d)| *d <= radius)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Per-vertex slack of the intrinsic-metric inequality:
/// `slack(v) = m(v) - sum over neighbors u of b(u,v) rho(u,v)^2`.
/// The metric is intrinsic exactly when every slack is nonnegative.
#[derive(Debug, Clone)]
pub struct SlackReport {
    pub slack: Vec<f64>,
    pub worst_vertex: usize,
    pub worst_slack: f64,
    pub intrinsic: bool,
}

pub fn is_intrinsic(g: &MetricGraph, metric: &PathMetric) -> Result<SlackReport, MetricError> {
    let (vw, ew) = g.weights()?;
    let n = g.vertex_count();
    let mut slack = vec![0.0; n];
    for v in 0..n {
        let mut s = vw.m[v];
        for &(u, _) in g.neighbors(v) {
            let rho = metric.distance(u, v);
            s -= ew.b(u, v) * rho * rho;
        }
        slack[v] = s;
    }
    let (worst_vertex, &worst_slack) = slack
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .unwrap();
    // Zero slack counts as intrinsic; tolerate accumulated rounding.
    let intrinsic = worst_slack >= -1e-12 * (1.0 + vw.m[worst_vertex]);
    Ok(SlackReport {
        slack,
        worst_vertex,
        worst_slack,
        intrinsic,
    })
}

/// Distance ball by vertex id.
pub fn distance_ball(
    g: &MetricGraph,
    metric: &PathMetric,
    center: &str,
    radius: f64,
) -> Result<BTreeSet<String>, MetricError> {
    let c = g
        .vertex_index(center)
        .ok_or_else(|| GraphError::NoSuchVertex(center.to_string()))?;
    Ok(metric
        .ball(c, radius)
        .into_iter()
        .map(|i| g.vertex_ids()[i].clone())
        .collect())
}

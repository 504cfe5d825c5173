//! Metric graphs: vertices with coupling strengths, oriented edges with
//! positive lengths, structural validation and the basic weight functions.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

/// Construction-time failures: problems that make a graph impossible to
/// index at all. Everything else is reported by [`MetricGraph::validate`]
/// as diagnostics instead of failing.
#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("duplicate vertex id `{0}`")]
    DuplicateVertexId(String),
    #[error("duplicate edge id `{0}`")]
    DuplicateEdgeId(String),
    #[error("edge `{edge}` references unknown vertex `{vertex}`")]
    UnknownVertex { edge: String, vertex: String },
    #[error("graph failed validation: {0:?}")]
    Invalid(Vec<Diagnostic>),
    #[error("unknown vertex id `{0}`")]
    NoSuchVertex(String),
}

/// A violated structural invariant, naming the offending vertex or edge.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub enum Diagnostic {
    NotConnected,
    LoopAt(String),
    MultiEdge(String, String),
    NonPositiveLength(String),
    NonFiniteLength(String),
    NonFiniteAlpha(String),
    IsolatedVertex(String),
    Empty,
}

#[derive(Debug, Clone)]
pub struct Edge {
    pub id: String,
    pub tail: usize,
    pub head: usize,
    pub length: f64,
}

/// A finite metric graph: simple connected combinatorial graph whose edges
/// carry positive lengths, plus a coupling strength `alpha` per vertex.
///
/// Vertex order (the matrix assembly basis) is the lexicographic order of
/// vertex ids, fixed at construction. Edge orientation is stored but has no
/// effect on any weight; it only fixes coordinate conventions on edges.
/// Immutable after construction, safe to share across threads.
#[derive(Debug, Clone)]
pub struct MetricGraph {
    ids: Vec<String>,
    alpha: Vec<f64>,
    edges: Vec<Edge>,
    /// adj[v] = (neighbor, edge index), sorted by neighbor basis index.
    adj: Vec<Vec<(usize, usize)>>,
    index: HashMap<String, usize>,
}

/// Per-vertex weights: the measure `m`, the weighted degree and the
/// combinatorial degree, indexed by the graph basis.
#[derive(Debug, Clone)]
pub struct VertexWeights {
    pub m: Vec<f64>,
    pub weighted_degree: Vec<f64>,
    pub degree: Vec<usize>,
}

/// Edge weights `b(u, v) = 1/|e|` for adjacent pairs (zero otherwise).
#[derive(Debug, Clone)]
pub struct EdgeWeights {
    n: usize,
    b: HashMap<(usize, usize), f64>,
}

impl EdgeWeights {
    /// `b(u, v)`: inverse edge length for adjacent pairs, 0 otherwise.
    pub fn b(&self, u: usize, v: usize) -> f64 {
        let key = if u <= v { (u, v) } else { (v, u) };
        self.b.get(&key).copied().unwrap_or(0.0)
    }

    pub fn dim(&self) -> usize {
        self.n
    }
}

impl MetricGraph {
    /// Build a graph from `(id, alpha)` vertices and
    /// `(id, tail_id, head_id, length)` edges. Fails only on indexing
    /// problems (duplicate ids, unknown endpoints); structural defects are
    /// left for [`validate`](Self::validate).
    pub fn new(
        vertices: Vec<(String, f64)>,
        edges: Vec<(String, String, String, f64)>,
    ) -> Result<Self, GraphError> {
        let mut sorted = vertices;
        sorted.sort_by(|a, b| a.0.cmp(&b.0));
        let mut index = HashMap::new();
        for (i, (id, _)) in sorted.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(GraphError::DuplicateVertexId(id.clone()));
            }
        }
        let ids: Vec<String> = sorted.iter().map(|(id, _)| id.clone()).collect();
        let alpha: Vec<f64> = sorted.iter().map(|&(_, a)| a).collect();
        let mut edge_ids = BTreeSet::new();
        let mut es = Vec::with_capacity(edges.len());
        for (id, tail, head, length) in edges {
            if !edge_ids.insert(id.clone()) {
                return Err(GraphError::DuplicateEdgeId(id));
            }
            let t = *index.get(&tail).ok_or_else(|| GraphError::UnknownVertex {
                edge: id.clone(),
                vertex: tail.clone(),
            })?;
            let h = *index.get(&head).ok_or_else(|| GraphError::UnknownVertex {
                edge: id.clone(),
                vertex: head.clone(),
            })?;
            es.push(Edge {
                id,
                tail: t,
                head: h,
                length,
            });
        }
        let mut adj = vec![Vec::new(); ids.len()];
        for (ei, e) in es.iter().enumerate() {
            adj[e.tail].push((e.head, ei));
            if e.head != e.tail {
                adj[e.head].push((e.tail, ei));
            }
        }
        for a in &mut adj {
            a.sort();
        }
        Ok(MetricGraph {
            ids,
            alpha,
            edges: es,
            adj,
            index,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Vertex ids in basis (lexicographic) order.
    pub fn vertex_ids(&self) -> &[String] {
        &self.ids
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Neighbors of `v` as (vertex, edge index), sorted by vertex index.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Total metric length of the graph.
    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).sum()
    }

    /// A graph with identical structure but different coupling strengths.
    pub fn with_alpha(&self, alpha: Vec<f64>) -> MetricGraph {
        assert_eq!(alpha.len(), self.ids.len());
        let mut g = self.clone();
        g.alpha = alpha;
        g
    }

    /// Check every structural invariant; an empty report means the graph is
    /// admissible for all spectral operations.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        if self.ids.is_empty() {
            out.push(Diagnostic::Empty);
            return out;
        }
        for e in &self.edges {
            if e.tail == e.head {
                out.push(Diagnostic::LoopAt(self.ids[e.tail].clone()));
            }
            if !e.length.is_finite() {
                out.push(Diagnostic::NonFiniteLength(e.id.clone()));
            } else if e.length <= 0.0 {
                out.push(Diagnostic::NonPositiveLength(e.id.clone()));
            }
        }
        let mut seen_pairs = BTreeSet::new();
        for e in &self.edges {
            if e.tail != e.head {
                let key = (e.tail.min(e.head), e.tail.max(e.head));
                if !seen_pairs.insert(key) {
                    out.push(Diagnostic::MultiEdge(
                        self.ids[key.0].clone(),
                        self.ids[key.1].clone(),
                    ));
                }
            }
        }
        for (v, a) in self.alpha.iter().enumerate() {
            if !a.is_finite() {
                out.push(Diagnostic::NonFiniteAlpha(self.ids[v].clone()));
            }
        }
        for v in 0..self.ids.len() {
            if self.adj[v].is_empty() {
                out.push(Diagnostic::IsolatedVertex(self.ids[v].clone()));
            }
        }
        if !self.is_connected() {
            out.push(Diagnostic::NotConnected);
        }
        out
    }

    fn is_connected(&self) -> bool {
        if self.ids.is_empty() {
            return false;
        }
        let mut seen = vec![false; self.ids.len()];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &(u, _) in &self.adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    count += 1;
                    stack.push(u);
                }
            }
        }
        count == self.ids.len()
    }

    /// Require an empty diagnostics report.
    pub fn require_valid(&self) -> Result<(), GraphError> {
        let d = self.validate();
        if d.is_empty() {
            Ok(())
        } else {
            Err(GraphError::Invalid(d))
        }
    }

    /// Vertex measure `m(v) = sum of incident lengths`, weighted degree
    /// `Deg(v) = (sum of inverse incident lengths) / m(v)` and combinatorial
    /// degree. Sums run over incident edges in basis order, so results are
    /// bit-reproducible.
    pub fn weights(&self) -> Result<(VertexWeights, EdgeWeights), GraphError> {
        self.require_valid()?;
        let n = self.ids.len();
        let mut m = vec![0.0f64; n];
        let mut inv = vec![0.0f64; n];
        let mut degree = vec![0usize; n];
        for v in 0..n {
            for &(_, ei) in &self.adj[v] {
                let l = self.edges[ei].length;
                m[v] += l;
                inv[v] += 1.0 / l;
                degree[v] += 1;
            }
        }
        let weighted_degree: Vec<f64> = inv.iter().zip(&m).map(|(i, mm)| i / mm).collect();
        let mut b = HashMap::new();
        for e in &self.edges {
            let key = (e.tail.min(e.head), e.tail.max(e.head));
            b.insert(key, 1.0 / e.length);
        }
        Ok((
            VertexWeights {
                m,
                weighted_degree,
                degree,
            },
            EdgeWeights { n, b },
        ))
    }

    /// Combinatorial neighborhood: `X` together with every vertex adjacent
    /// to some member of `X`.
    pub fn combinatorial_neighborhood(
        &self,
        x: &BTreeSet<String>,
    ) -> Result<BTreeSet<String>, GraphError> {
        let mut out = BTreeSet::new();
        for id in x {
            let v = self
                .vertex_index(id)
                .ok_or_else(|| GraphError::NoSuchVertex(id.clone()))?;
            out.insert(id.clone());
            for &(u, _) in &self.adj[v] {
                out.insert(self.ids[u].clone());
            }
        }
        Ok(out)
    }
}

/// Shorthand used throughout the tests: vertices `v0..v{n-1}` with the given
/// alphas, edges as (tail, head, length) index triples.
pub fn graph_from_indices(
    alphas: &[f64],
    edges: &[(usize, usize, f64)],
) -> Result<MetricGraph, GraphError> {
    let width = alphas.len().to_string().len();
    let vs: Vec<(String, f64)> = alphas
        .iter()
        .enumerate()
        .map(|(i, &a)| (format!("v{i:0width$}"), a))
        .collect();
    let es: Vec<(String, String, String, f64)> = edges
        .iter()
        .enumerate()
        .map(|(k, &(t, h, l))| {
            (
                format!("e{k}"),
                format!("v{t:0width$}"),
                format!("v{h:0width$}"),
                l,
            )
        })
        .collect();
    MetricGraph::new(vs, es)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge_is_valid() {
        let g = graph_from_indices(&[0.0, 0.0], &[(0, 1, 1.0)]).unwrap();
        assert!(g.validate().is_empty());
    }

    #[test]
    fn two_components_diagnosed_not_connected() {
        let g = graph_from_indices(&[0.0; 4], &[(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        assert_eq!(g.validate(), vec![Diagnostic::NotConnected]);
    }

    #[test]
    fn loop_diagnosed_at_vertex() {
        let g = graph_from_indices(&[0.0, 0.0], &[(0, 0, 1.0), (0, 1, 1.0)]).unwrap();
        assert!(g
            .validate()
            .contains(&Diagnostic::LoopAt("v0".to_string())));
    }

    #[test]
    fn multi_edge_and_bad_length_diagnosed() {
        let g = graph_from_indices(&[0.0, 0.0], &[(0, 1, 1.0), (1, 0, 2.0)]).unwrap();
        assert!(matches!(g.validate()[0], Diagnostic::MultiEdge(_, _)));
        let g = graph_from_indices(&[0.0, 0.0], &[(0, 1, -1.0)]).unwrap();
        assert!(g
            .validate()
            .contains(&Diagnostic::NonPositiveLength("e0".to_string())));
    }

    #[test]
    fn isolated_vertex_rejected() {
        let g = MetricGraph::new(
            vec![("a".into(), 0.0), ("b".into(), 0.0), ("c".into(), 0.0)],
            vec![("e".into(), "a".into(), "b".into(), 1.0)],
        )
        .unwrap();
        let d = g.validate();
        assert!(d.contains(&Diagnostic::IsolatedVertex("c".to_string())));
        assert!(d.contains(&Diagnostic::NotConnected));
    }

    #[test]
    fn single_edge_weights() {
        let l = 2.0;
        let g = graph_from_indices(&[0.0, 0.0], &[(0, 1, l)]).unwrap();
        let (vw, ew) = g.weights().unwrap();
        assert_eq!(vw.m, vec![l, l]);
        assert_eq!(ew.b(0, 1), 1.0 / l);
        assert_eq!(ew.b(1, 0), 1.0 / l);
        for v in 0..2 {
            assert!((vw.weighted_degree[v] - 1.0 / (l * l)).abs() < 1e-15);
        }
    }

    #[test]
    fn star_weights() {
        // 3-star, all lengths 1: m(center)=3, m(leaf)=1, Deg(center)=1.
        let g = graph_from_indices(
            &[0.0; 4],
            &[(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)],
        )
        .unwrap();
        let (vw, _) = g.weights().unwrap();
        assert_eq!(vw.m[0], 3.0);
        assert_eq!(vw.m[1], 1.0);
        assert_eq!(vw.weighted_degree[0], 1.0);
        assert_eq!(vw.degree[0], 3);
    }

    #[test]
    fn measure_sums_to_twice_total_length() {
        let g = graph_from_indices(
            &[0.0; 4],
            &[(0, 1, 0.3), (1, 2, 1.7), (2, 3, 0.9), (3, 0, 2.2)],
        )
        .unwrap();
        let (vw, ew) = g.weights().unwrap();
        let total: f64 = vw.m.iter().sum();
        assert!((total - 2.0 * g.total_length()).abs() < 1e-14);
        // Deg(v) * m(v) = sum of b over neighbors.
        for v in 0..4 {
            let s: f64 = g.neighbors(v).iter().map(|&(u, _)| ew.b(u, v)).sum();
            assert!((vw.weighted_degree[v] * vw.m[v] - s).abs() < 1e-14);
        }
    }

    #[test]
    fn neighborhood_of_path_midpoint() {
        let g = graph_from_indices(&[0.0; 3], &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let x: BTreeSet<String> = ["v1".to_string()].into();
        let om = g.combinatorial_neighborhood(&x).unwrap();
        assert_eq!(om.len(), 3);
        let empty = g.combinatorial_neighborhood(&BTreeSet::new()).unwrap();
        assert!(empty.is_empty());
        let leaf: BTreeSet<String> = ["v2".to_string()].into();
        let om = g.combinatorial_neighborhood(&leaf).unwrap();
        assert_eq!(
            om,
            ["v1".to_string(), "v2".to_string()].into_iter().collect()
        );
    }

    #[test]
    fn unknown_vertex_in_neighborhood_errors() {
        let g = graph_from_indices(&[0.0, 0.0], &[(0, 1, 1.0)]).unwrap();
        let x: BTreeSet<String> = ["nope".to_string()].into();
        assert!(matches!(
            g.combinatorial_neighborhood(&x),
            Err(GraphError::NoSuchVertex(_))
        ));
    }
}

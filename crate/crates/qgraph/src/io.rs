//! The JSON graph schema, report envelopes and CSV emitters.
//!
//! Graph documents:
//!
//! ```json
//! {
//!   "vertices": [{"id": "a", "alpha": 0.0}],
//!   "edges": [{"id": "e1", "tail": "a", "head": "b", "length": 1.0}]
//! }
//! ```
//!
//! Lengths and couplings are decimal literals parsed as binary floating
//! point. Emission is normalized: vertices in basis (lexicographic) order,
//! edges sorted by id, so parse-emit round-trips are stable.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::estimates::{ClrRow, DecayFit};
use crate::graph::{GraphError, MetricGraph};
use crate::metrics::PathMetric;
use crate::operator::WeightedOperator;
use crate::secular::SpectrumResult;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("edge `{0}` has non-positive length")]
    NonPositiveLength(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct VertexDoc {
    id: String,
    #[serde(default)]
    alpha: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct EdgeDoc {
    id: String,
    tail: String,
    head: String,
    length: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct GraphDoc {
    vertices: Vec<VertexDoc>,
    edges: Vec<EdgeDoc>,
}

/// Parse a UTF-8 JSON document into a metric graph. Rejects duplicate ids,
/// unknown endpoints and non-positive lengths; structural defects like
/// loops survive parsing and are reported by validation.
pub fn parse_graph(text: &str) -> Result<MetricGraph, IoError> {
    let doc: GraphDoc = serde_json::from_str(text)?;
    for e in &doc.edges {
        if !(e.length > 0.0) || !e.length.is_finite() {
            return Err(IoError::NonPositiveLength(e.id.clone()));
        }
    }
    let vertices = doc.vertices.into_iter().map(|v| (v.id, v.alpha)).collect();
    let edges = doc
        .edges
        .into_iter()
        .map(|e| (e.id, e.tail, e.head, e.length))
        .collect();
    Ok(MetricGraph::new(vertices, edges)?)
}

/// Emit the normalized JSON document of a graph.
pub fn emit_graph(g: &MetricGraph) -> String {
    let vertices: Vec<VertexDoc> = g
        .vertex_ids()
        .iter()
        .zip(g.alpha())
        .map(|(id, &alpha)| VertexDoc {
            id: id.clone(),
            alpha,
        })
        .collect();
    let mut edges: Vec<EdgeDoc> = g
        .edges()
        .iter()
        .map(|e| EdgeDoc {
            id: e.id.clone(),
            tail: g.vertex_ids()[e.tail].clone(),
            head: g.vertex_ids()[e.head].clone(),
            length: e.length,
        })
        .collect();
    edges.sort_by(|a, b| a.id.cmp(&b.id));
    serde_json::to_string_pretty(&GraphDoc { vertices, edges }).expect("serializable")
}

/// The numeric regimes under which report values were computed; attached to
/// every emitted report.
#[derive(Debug, Clone, Serialize)]
pub struct Tolerances {
    pub zero_band_rel: f64,
    pub bisect_rel: f64,
    pub pole_guard: f64,
    pub quantum_zero_band: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            zero_band_rel: crate::operator::ZERO_BAND_REL,
            bisect_rel: crate::secular::BISECT_REL,
            pole_guard: crate::secular::POLE_GUARD,
            quantum_zero_band: crate::secular::QUANTUM_ZERO_BAND,
        }
    }
}

/// Envelope tying a payload to its tolerance regime.
#[derive(Debug, Clone, Serialize)]
pub struct Report<T: Serialize> {
    pub tolerances: Tolerances,
    pub payload: T,
}

pub fn report<T: Serialize>(payload: T) -> Report<T> {
    Report {
        tolerances: Tolerances::default(),
        payload,
    }
}

/// Coordinate-triplet dump of the weighted-space matrix.
pub fn matrix_csv(op: &WeightedOperator) -> String {
    let mut out = String::from("row_id,col_id,value\n");
    let n = op.dim();
    for i in 0..n {
        for j in 0..n {
            let v = op.h_entry(i, j);
            if v != 0.0 {
                out.push_str(&format!("{},{},{}\n", op.basis()[i], op.basis()[j], v));
            }
        }
    }
    out
}

/// Sidecar of the matrix dump: measure and coupling per vertex.
pub fn measure_csv(op: &WeightedOperator) -> String {
    let mut out = String::from("vertex_id,m,alpha\n");
    for i in 0..op.dim() {
        out.push_str(&format!(
            "{},{},{}\n",
            op.basis()[i],
            op.measure()[i],
            op.alpha()[i]
        ));
    }
    out
}

/// All-pairs distance table of a materialized path metric.
pub fn distance_csv(g: &MetricGraph, metric: &PathMetric) -> String {
    let mut out = String::from("source_id,target_id,distance\n");
    for u in 0..g.vertex_count() {
        let row = metric.distances_from(u);
        for v in 0..g.vertex_count() {
            out.push_str(&format!(
                "{},{},{}\n",
                g.vertex_ids()[u],
                g.vertex_ids()[v],
                row[v]
            ));
        }
    }
    out
}

/// Located eigenvalues with brackets and flags.
pub fn spectrum_csv(res: &SpectrumResult) -> String {
    let mut out = String::from("index,lambda,method,bracket_lo,bracket_hi,flags\n");
    for (i, hit) in res.eigenvalues.iter().enumerate() {
        let method = match hit.method {
            crate::secular::Method::Secular => "secular",
            crate::secular::Method::Fem => "fem",
        };
        let flags = if hit.near_pole { "near_pole" } else { "" };
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            i, hit.lambda, method, hit.bracket_lo, hit.bracket_hi, flags
        ));
    }
    out
}

/// Coupling sweep table.
pub fn clr_csv(rows: &[ClrRow]) -> String {
    let mut out = String::from("lambda,kappa_discrete,kappa_quantum,rhs_D,weak_norm_q\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.lambda, r.kappa_discrete, r.kappa_quantum, r.rhs, r.weak_norm
        ));
    }
    out
}

/// Heat decay profile with fit-window membership.
pub fn decay_csv(fit: &DecayFit) -> String {
    let mut out = String::from("t,g,fitted_flag\n");
    for ((t, g), fitted) in fit.t.iter().zip(&fit.g).zip(&fit.fitted) {
        out.push_str(&format!("{},{},{}\n", t, g, fitted));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{CorpusSampler, CorpusSpec};
    use crate::graph::Diagnostic;

    #[test]
    fn minimal_document_parses() {
        let text = r#"{
            "vertices": [{"id": "a", "alpha": 0.5}, {"id": "b"}],
            "edges": [{"id": "e", "tail": "a", "head": "b", "length": 2.0}]
        }"#;
        let g = parse_graph(text).unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.alpha()[0], 0.5);
        assert!(g.validate().is_empty());
    }

    #[test]
    fn duplicate_edge_id_rejected() {
        let text = r#"{
            "vertices": [{"id": "a"}, {"id": "b"}],
            "edges": [
                {"id": "e", "tail": "a", "head": "b", "length": 1.0},
                {"id": "e", "tail": "b", "head": "a", "length": 1.0}
            ]
        }"#;
        assert!(matches!(
            parse_graph(text),
            Err(IoError::Graph(GraphError::DuplicateEdgeId(_)))
        ));
    }

    #[test]
    fn bad_length_and_missing_field_rejected() {
        let text = r#"{
            "vertices": [{"id": "a"}, {"id": "b"}],
            "edges": [{"id": "e", "tail": "a", "head": "b", "length": -1.0}]
        }"#;
        assert!(matches!(
            parse_graph(text),
            Err(IoError::NonPositiveLength(_))
        ));
        let text = r#"{
            "vertices": [{"id": "a"}],
            "edges": [{"id": "e", "tail": "a", "head": "b"}]
        }"#;
        assert!(matches!(parse_graph(text), Err(IoError::Json(_))));
    }

    #[test]
    fn loop_survives_parsing_for_validation() {
        let text = r#"{
            "vertices": [{"id": "a"}],
            "edges": [{"id": "e", "tail": "a", "head": "a", "length": 1.0}]
        }"#;
        let g = parse_graph(text).unwrap();
        assert!(g
            .validate()
            .contains(&Diagnostic::LoopAt("a".to_string())));
    }

    #[test]
    fn round_trip_is_stable_on_random_instances() {
        let mut sampler = CorpusSampler::new(11, CorpusSpec::default());
        for _ in 0..5 {
            let g = sampler.next_graph();
            let text = emit_graph(&g);
            let back = parse_graph(&text).unwrap();
            assert_eq!(emit_graph(&back), text);
            assert_eq!(back.vertex_ids(), g.vertex_ids());
            assert_eq!(back.alpha(), g.alpha());
            assert_eq!(back.edge_count(), g.edge_count());
        }
    }

    #[test]
    fn csv_headers_are_pinned() {
        let g = crate::graph::graph_from_indices(&[0.0, 0.0], &[(0, 1, 1.0)]).unwrap();
        let op = crate::operator::assemble(&g).unwrap();
        assert!(matrix_csv(&op).starts_with("row_id,col_id,value\n"));
        assert!(measure_csv(&op).starts_with("vertex_id,m,alpha\n"));
        let metric = crate::metrics::path_metric(&g, &crate::metrics::MetricRule::Natural).unwrap();
        assert!(distance_csv(&g, &metric).starts_with("source_id,target_id,distance\n"));
    }
}

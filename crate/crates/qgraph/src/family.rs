//! Deterministic shell-by-shell generators for infinite graph families,
//! plus the symbolic tail descriptors the criteria engine reasons over.
//!
//! Infinite graphs are never materialized: a family is a pure function from
//! depth to a finite prefix, together with declared tail classes for its
//! scalar sequences. Generating to depth d and then d+1 yields prefixes
//! where the shallower graph is an induced subgraph of the deeper one, with
//! identical ids, lengths and couplings on the overlap.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{GraphError, MetricGraph};

/// Hard caps for the generators.
pub const DEPTH_CAP: usize = 64;
pub const VERTEX_CAP: usize = 200_000;

#[derive(Debug, Error)]
pub enum FamilyError {
    #[error("depth {0} exceeds the hard cap {DEPTH_CAP}")]
    DepthExceedsCap(usize),
    #[error("depth must be at least 1")]
    DepthZero,
    #[error("generation would exceed the vertex cap {VERTEX_CAP}")]
    VertexCapExceeded,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Scalar sequence rule, indexed from k = 1. Every rule knows its exact
/// symbolic tail behavior; anything outside this set must use `Custom`
/// generators and is treated as undecidable by the criteria engine.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeqRule {
    /// a_k = c
    Constant { value: f64 },
    /// a_k = scale * ratio^(k-1)
    Geometric { scale: f64, ratio: f64 },
    /// a_k = scale / k
    Harmonic { scale: f64 },
    /// a_k = scale * k^(-exponent); negative exponents grow
    Power { scale: f64, exponent: f64 },
    /// a_k = slope * k + intercept
    Affine { slope: f64, intercept: f64 },
    /// Base rule with finitely many overridden indices.
    FinitelyModified {
        base: Box<SeqRule>,
        changes: Vec<(usize, f64)>,
    },
}

/// The five symbolic tail classes the rule engine is allowed to reason over.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailClass {
    Geometric,
    Harmonic,
    Power,
    Constant,
    Unknown,
}

impl fmt::Display for TailClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TailClass::Geometric => "geometric",
            TailClass::Harmonic => "harmonic",
            TailClass::Power => "power",
            TailClass::Constant => "constant",
            TailClass::Unknown => "unknown",
        };
        f.write_str(s)
    }
}

impl SeqRule {
    pub fn value(&self, k: usize) -> f64 {
        debug_assert!(k >= 1);
        match self {
            SeqRule::Constant { value } => *value,
            SeqRule::Geometric { scale, ratio } => scale * ratio.powi(k as i32 - 1),
            SeqRule::Harmonic { scale } => scale / k as f64,
            SeqRule::Power { scale, exponent } => scale * (k as f64).powf(-exponent),
            SeqRule::Affine { slope, intercept } => slope * k as f64 + intercept,
            SeqRule::FinitelyModified { base, changes } => changes
                .iter()
                .find(|(i, _)| *i == k)
                .map(|&(_, v)| v)
                .unwrap_or_else(|| base.value(k)),
        }
    }

    /// Tail class label used in verdict evidence.
    pub fn tail_class(&self) -> TailClass {
        match self {
            SeqRule::Constant { .. } => TailClass::Constant,
            SeqRule::Geometric { ratio, .. } if ratio.abs() < 1.0 => TailClass::Geometric,
            SeqRule::Geometric { .. } => TailClass::Unknown,
            SeqRule::Harmonic { .. } => TailClass::Harmonic,
            SeqRule::Power { .. } => TailClass::Power,
            SeqRule::Affine { slope, .. } if *slope == 0.0 => TailClass::Constant,
            SeqRule::Affine { .. } => TailClass::Power,
            SeqRule::FinitelyModified { base, .. } => base.tail_class(),
        }
    }

    fn geometric(scale: f64, ratio: f64) -> bool {
        scale != 0.0 && ratio.abs() < 1.0
    }

    /// Does the sequence tend to zero?
    pub fn tends_to_zero(&self) -> Option<bool> {
        match self {
            SeqRule::Constant { value } => Some(*value == 0.0),
            SeqRule::Geometric { scale, ratio } => {
                if *scale == 0.0 || ratio.abs() < 1.0 {
                    Some(true)
                } else {
                    Some(false)
                }
            }
            SeqRule::Harmonic { .. } => Some(true),
            SeqRule::Power { scale, exponent } => Some(*scale == 0.0 || *exponent > 0.0),
            SeqRule::Affine { slope, intercept } => Some(*slope == 0.0 && *intercept == 0.0),
            SeqRule::FinitelyModified { base, .. } => base.tends_to_zero(),
        }
    }

    /// Is `sum |a_k|` finite?
    pub fn abs_summable(&self) -> Option<bool> {
        match self {
            SeqRule::Constant { value } => Some(*value == 0.0),
            SeqRule::Geometric { scale, ratio } => Some(*scale == 0.0 || ratio.abs() < 1.0),
            SeqRule::Harmonic { scale } => Some(*scale == 0.0),
            SeqRule::Power { scale, exponent } => Some(*scale == 0.0 || *exponent > 1.0),
            SeqRule::Affine { slope, intercept } => Some(*slope == 0.0 && *intercept == 0.0),
            SeqRule::FinitelyModified { base, .. } => base.abs_summable(),
        }
    }

    /// Is `sum a_k^2` divergent?
    pub fn square_sum_divergent(&self) -> Option<bool> {
        match self {
            SeqRule::Constant { value } => Some(*value != 0.0),
            SeqRule::Geometric { scale, ratio } => {
                Some(*scale != 0.0 && ratio.abs() >= 1.0)
            }
            SeqRule::Harmonic { .. } => Some(false),
            SeqRule::Power { scale, exponent } => Some(*scale != 0.0 && *exponent <= 0.5),
            SeqRule::Affine { slope, intercept } => Some(*slope != 0.0 || *intercept != 0.0),
            SeqRule::FinitelyModified { base, .. } => base.square_sum_divergent(),
        }
    }

    /// Is `inf a_k > 0` (for positive sequences)?
    pub fn inf_positive(&self) -> Option<bool> {
        match self {
            SeqRule::Constant { value } => Some(*value > 0.0),
            SeqRule::Geometric { scale, ratio } => {
                if Self::geometric(*scale, *ratio) || *scale <= 0.0 {
                    Some(false)
                } else {
                    Some(*ratio >= 1.0)
                }
            }
            SeqRule::Harmonic { .. } => Some(false),
            SeqRule::Power { scale, exponent } => Some(*scale > 0.0 && *exponent <= 0.0),
            SeqRule::Affine { slope, intercept } => {
                Some((*slope > 0.0 && *slope + *intercept > 0.0) || (*slope == 0.0 && *intercept > 0.0))
            }
            SeqRule::FinitelyModified { base, changes } => {
                match base.inf_positive() {
                    Some(true) => Some(changes.iter().all(|&(_, v)| v > 0.0)),
                    other => other,
                }
            }
        }
    }

    /// Is the sequence bounded from below?
    pub fn bounded_below(&self) -> Option<bool> {
        match self {
            SeqRule::Constant { .. } | SeqRule::Harmonic { .. } => Some(true),
            SeqRule::Geometric { scale, ratio } => {
                Some(ratio.abs() < 1.0 || *scale == 0.0 || (*scale > 0.0 && *ratio >= 1.0))
            }
            SeqRule::Power { scale, exponent } => Some(*exponent >= 0.0 || *scale >= 0.0),
            SeqRule::Affine { slope, .. } => Some(*slope >= 0.0),
            SeqRule::FinitelyModified { base, .. } => base.bounded_below(),
        }
    }

    /// Does |a_k| tend to +infinity?
    pub fn abs_diverges(&self) -> Option<bool> {
        match self {
            SeqRule::Constant { .. } | SeqRule::Harmonic { .. } => Some(false),
            SeqRule::Geometric { scale, ratio } => Some(*scale != 0.0 && ratio.abs() > 1.0),
            SeqRule::Power { scale, exponent } => Some(*scale != 0.0 && *exponent < 0.0),
            SeqRule::Affine { slope, .. } => Some(*slope != 0.0),
            SeqRule::FinitelyModified { base, .. } => base.abs_diverges(),
        }
    }
}

/// Integer sequence rule for branching numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntSeqRule {
    Constant { value: usize },
    /// n_k = slope * k + intercept
    Affine { slope: usize, intercept: usize },
}

impl IntSeqRule {
    pub fn value(&self, k: usize) -> usize {
        match self {
            IntSeqRule::Constant { value } => *value,
            IntSeqRule::Affine { slope, intercept } => slope * k + intercept,
        }
    }

    pub fn unbounded(&self) -> bool {
        matches!(self, IntSeqRule::Affine { slope, .. } if *slope > 0)
    }
}

/// Edge-length rule inside a rooted tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TreeLengthRule {
    /// All edges share one length.
    Constant { value: f64 },
    /// Each vertex at level k-1 emits n_k edges: one of length 1/n_k, the
    /// rest of length 1.
    ShortEdge,
}

/// Pure generator trait for user-supplied families.
pub trait GraphGenerator: Send + Sync {
    fn generate(&self, depth: usize) -> Result<MetricGraph, FamilyError>;
    /// Vertex ids strictly inside the prefix (full neighborhood present).
    fn interior_ids(&self, depth: usize) -> Vec<String>;
}

/// Family kinds. All named kinds are radially layered: couplings are
/// assigned per shell by `alpha` (shell 0 is the root/first column and is
/// pinned to 0 for the half-line kind).
#[derive(Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    /// Interaction points on a half-line: vertices x_0 < x_1 < ..., edge k
    /// has length `lengths(k)`, coupling `alpha(k)` at x_k (zero at x_0).
    DeltaLine { lengths: SeqRule, alpha: SeqRule },
    /// Rooted tree: each level-(k-1) vertex emits `branching(k)` edges.
    RootedTree {
        branching: IntSeqRule,
        lengths: TreeLengthRule,
        alpha: SeqRule,
    },
    /// Three parallel rails: a horizontal spine with gaps `gaps(k)` and unit
    /// vertical edges to the two side rails at every column.
    Ladder { gaps: SeqRule, alpha: SeqRule },
    /// N-dimensional box of equilateral edges; depth acts as the side, capped
    /// by `side` when given.
    LatticeBox {
        dim: usize,
        side: Option<usize>,
        edge_length: f64,
        alpha: SeqRule,
    },
    /// Opaque user generator; every tail question is undecidable.
    #[serde(skip)]
    Custom(Arc<dyn GraphGenerator>),
}

impl fmt::Debug for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyKind::DeltaLine { lengths, alpha } => f
                .debug_struct("DeltaLine")
                .field("lengths", lengths)
                .field("alpha", alpha)
                .finish(),
            FamilyKind::RootedTree {
                branching,
                lengths,
                alpha,
            } => f
                .debug_struct("RootedTree")
                .field("branching", branching)
                .field("lengths", lengths)
                .field("alpha", alpha)
                .finish(),
            FamilyKind::Ladder { gaps, alpha } => f
                .debug_struct("Ladder")
                .field("gaps", gaps)
                .field("alpha", alpha)
                .finish(),
            FamilyKind::LatticeBox {
                dim,
                side,
                edge_length,
                alpha,
            } => f
                .debug_struct("LatticeBox")
                .field("dim", dim)
                .field("side", side)
                .field("edge_length", edge_length)
                .field("alpha", alpha)
                .finish(),
            FamilyKind::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// A family plus its generation limit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphFamily {
    pub kind: FamilyKind,
    #[serde(default = "default_depth_limit")]
    pub depth_limit: usize,
}

fn default_depth_limit() -> usize {
    DEPTH_CAP
}

impl GraphFamily {
    pub fn new(kind: FamilyKind) -> Self {
        GraphFamily {
            kind,
            depth_limit: DEPTH_CAP,
        }
    }

    /// The coupling rule of the family (None for custom generators).
    pub fn alpha_rule(&self) -> Option<&SeqRule> {
        match &self.kind {
            FamilyKind::DeltaLine { alpha, .. }
            | FamilyKind::RootedTree { alpha, .. }
            | FamilyKind::Ladder { alpha, .. }
            | FamilyKind::LatticeBox { alpha, .. } => Some(alpha),
            FamilyKind::Custom(_) => None,
        }
    }

    /// Replace the coupling rule, keeping the geometry.
    pub fn with_alpha_rule(&self, alpha: SeqRule) -> GraphFamily {
        let mut kind = self.kind.clone();
        match &mut kind {
            FamilyKind::DeltaLine { alpha: a, .. }
            | FamilyKind::RootedTree { alpha: a, .. }
            | FamilyKind::Ladder { alpha: a, .. }
            | FamilyKind::LatticeBox { alpha: a, .. } => *a = alpha,
            FamilyKind::Custom(_) => {}
        }
        GraphFamily {
            kind,
            depth_limit: self.depth_limit,
        }
    }

    /// Generate the depth-d prefix. Deterministic; the depth-d graph is an
    /// induced prefix of the depth-(d+1) graph.
    pub fn generate(&self, depth: usize) -> Result<MetricGraph, FamilyError> {
        if depth == 0 {
            return Err(FamilyError::DepthZero);
        }
        if depth > self.depth_limit || depth > DEPTH_CAP {
            return Err(FamilyError::DepthExceedsCap(depth));
        }
        match &self.kind {
            FamilyKind::DeltaLine { lengths, alpha } => {
                let mut vs = Vec::with_capacity(depth + 1);
                let mut es = Vec::with_capacity(depth);
                for k in 0..=depth {
                    let a = if k == 0 { 0.0 } else { alpha.value(k) };
                    vs.push((line_id(k), a));
                }
                for k in 1..=depth {
                    es.push((
                        format!("e{k:03}"),
                        line_id(k - 1),
                        line_id(k),
                        lengths.value(k),
                    ));
                }
                Ok(MetricGraph::new(vs, es)?)
            }
            FamilyKind::RootedTree {
                branching,
                lengths,
                alpha,
            } => {
                let mut vs = vec![("t".to_string(), 0.0)];
                let mut es = Vec::new();
                // Shells generated breadth-first; child i of a vertex gets
                // suffix ".i". The first child edge is the short one under
                // the short-edge rule.
                let mut frontier = vec!["t".to_string()];
                for level in 1..=depth {
                    let n = branching.value(level);
                    if vs.len() + frontier.len() * n > VERTEX_CAP {
                        return Err(FamilyError::VertexCapExceeded);
                    }
                    let a = alpha.value(level);
                    let mut next = Vec::with_capacity(frontier.len() * n);
                    for parent in &frontier {
                        for i in 0..n {
                            let child = format!("{parent}.{i}");
                            let len = match lengths {
                                TreeLengthRule::Constant { value } => *value,
                                TreeLengthRule::ShortEdge => {
                                    if i == 0 {
                                        1.0 / n as f64
                                    } else {
                                        1.0
                                    }
                                }
                            };
                            vs.push((child.clone(), a));
                            es.push((
                                format!("e:{child}"),
                                parent.clone(),
                                child.clone(),
                                len,
                            ));
                            next.push(child);
                        }
                    }
                    frontier = next;
                }
                Ok(MetricGraph::new(vs, es)?)
            }
            FamilyKind::Ladder { gaps, alpha } => {
                let mut vs = Vec::new();
                let mut es = Vec::new();
                for k in 1..=depth {
                    let a = alpha.value(k);
                    for rail in ["a", "m", "b"] {
                        vs.push((ladder_id(rail, k), a));
                    }
                    es.push((
                        format!("v{k:03}a"),
                        ladder_id("m", k),
                        ladder_id("a", k),
                        1.0,
                    ));
                    es.push((
                        format!("v{k:03}b"),
                        ladder_id("m", k),
                        ladder_id("b", k),
                        1.0,
                    ));
                    if k > 1 {
                        es.push((
                            format!("h{k:03}"),
                            ladder_id("m", k - 1),
                            ladder_id("m", k),
                            gaps.value(k - 1),
                        ));
                    }
                }
                Ok(MetricGraph::new(vs, es)?)
            }
            FamilyKind::LatticeBox {
                dim,
                side,
                edge_length,
                alpha,
            } => {
                let s = side.map_or(depth, |cap| depth.min(cap));
                let n_vertices = s.pow(*dim as u32);
                if n_vertices > VERTEX_CAP {
                    return Err(FamilyError::VertexCapExceeded);
                }
                let mut vs = Vec::with_capacity(n_vertices);
                let mut es = Vec::new();
                let mut coord = vec![0usize; *dim];
                loop {
                    let id = lattice_id(&coord);
                    // Shell index = sup-norm distance from the origin corner.
                    let shell = coord.iter().copied().max().unwrap_or(0);
                    let a = if shell == 0 { alpha.value(1) } else { alpha.value(shell) };
                    vs.push((id.clone(), a));
                    for d in 0..*dim {
                        if coord[d] + 1 < s {
                            let mut c2 = coord.clone();
                            c2[d] += 1;
                            es.push((
                                format!("e:{id}:{d}"),
                                id.clone(),
                                lattice_id(&c2),
                                *edge_length,
                            ));
                        }
                    }
                    // Odometer increment.
                    let mut d = 0;
                    loop {
                        if d == *dim {
                            return Ok(MetricGraph::new(vs, es)?);
                        }
                        coord[d] += 1;
                        if coord[d] < s {
                            break;
                        }
                        coord[d] = 0;
                        d += 1;
                    }
                }
            }
            FamilyKind::Custom(g) => g.generate(depth),
        }
    }

    /// Ids of vertices whose full edge neighborhood is present in the
    /// depth-d prefix. Weighted-degree evidence is computed on these only,
    /// because frontier vertices are missing their outgoing shells.
    pub fn interior_ids(&self, depth: usize) -> Vec<String> {
        match &self.kind {
            FamilyKind::DeltaLine { .. } => (0..depth).map(line_id).collect(),
            FamilyKind::RootedTree { branching, .. } => {
                let mut out = vec!["t".to_string()];
                let mut frontier = vec!["t".to_string()];
                for level in 1..depth {
                    let n = branching.value(level);
                    let mut next = Vec::new();
                    for parent in &frontier {
                        for i in 0..n {
                            let child = format!("{parent}.{i}");
                            out.push(child.clone());
                            next.push(child);
                        }
                    }
                    frontier = next;
                }
                out
            }
            FamilyKind::Ladder { .. } => {
                let mut out = Vec::new();
                for k in 1..depth {
                    out.push(ladder_id("a", k));
                    out.push(ladder_id("m", k));
                    out.push(ladder_id("b", k));
                }
                out
            }
            FamilyKind::LatticeBox { .. } => Vec::new(),
            FamilyKind::Custom(g) => g.interior_ids(depth),
        }
    }
}

fn line_id(k: usize) -> String {
    format!("x{k:03}")
}

fn ladder_id(rail: &str, k: usize) -> String {
    format!("{rail}{k:03}")
}

fn lattice_id(coord: &[usize]) -> String {
    let parts: Vec<String> = coord.iter().map(|c| format!("{c:03}")).collect();
    format!("g{}", parts.join("_"))
}

/// Spot-check that a declared rule reproduces the prefix values it claims;
/// used by tests and by evidence assembly.
pub fn rule_matches_prefix(rule: &SeqRule, values: &[f64], rel_tol: f64) -> bool {
    values.iter().enumerate().all(|(i, &v)| {
        let expect = rule.value(i + 1);
        (v - expect).abs() <= rel_tol * (1.0 + expect.abs())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_line(depth: usize) -> MetricGraph {
        GraphFamily::new(FamilyKind::DeltaLine {
            lengths: SeqRule::Constant { value: 1.0 },
            alpha: SeqRule::Constant { value: 0.0 },
        })
        .generate(depth)
        .unwrap()
    }

    #[test]
    fn delta_line_depth_three_is_a_path() {
        let g = unit_line(3);
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(g.edge_count(), 3);
        assert!(g.validate().is_empty());
        for e in g.edges() {
            assert_eq!(e.length, 1.0);
        }
    }

    #[test]
    fn lattice_box_counts() {
        let f = GraphFamily::new(FamilyKind::LatticeBox {
            dim: 2,
            side: None,
            edge_length: 1.0,
            alpha: SeqRule::Constant { value: 0.0 },
        });
        let g = f.generate(3).unwrap();
        assert_eq!(g.vertex_count(), 9);
        assert_eq!(g.edge_count(), 12);
        assert!(g.validate().is_empty());
    }

    #[test]
    fn ladder_measure_at_least_one() {
        let f = GraphFamily::new(FamilyKind::Ladder {
            gaps: SeqRule::Harmonic { scale: 1.0 },
            alpha: SeqRule::Constant { value: 0.0 },
        });
        for depth in [2, 5, 9] {
            let g = f.generate(depth).unwrap();
            let (vw, _) = g.weights().unwrap();
            for &m in &vw.m {
                assert!(m >= 1.0 - 1e-15);
            }
        }
    }

    #[test]
    fn prefix_property_across_depths() {
        let families = vec![
            GraphFamily::new(FamilyKind::DeltaLine {
                lengths: SeqRule::Geometric {
                    scale: 1.0,
                    ratio: 0.5,
                },
                alpha: SeqRule::Affine {
                    slope: -2.0,
                    intercept: -1.0,
                },
            }),
            GraphFamily::new(FamilyKind::RootedTree {
                branching: IntSeqRule::Affine {
                    slope: 1,
                    intercept: 1,
                },
                lengths: TreeLengthRule::ShortEdge,
                alpha: SeqRule::Constant { value: 0.0 },
            }),
            GraphFamily::new(FamilyKind::Ladder {
                gaps: SeqRule::Harmonic { scale: 1.0 },
                alpha: SeqRule::Constant { value: 0.0 },
            }),
            GraphFamily::new(FamilyKind::LatticeBox {
                dim: 2,
                side: None,
                edge_length: 0.7,
                alpha: SeqRule::Constant { value: 0.0 },
            }),
        ];
        for f in &families {
            for d in 1..4 {
                let small = f.generate(d).unwrap();
                let big = f.generate(d + 1).unwrap();
                // Every vertex of the shallow prefix appears with the same
                // coupling, every edge with the same length.
                for (id, &a) in small.vertex_ids().iter().zip(small.alpha()) {
                    let big_idx = big.vertex_index(id).expect("vertex must persist");
                    assert_eq!(big.alpha()[big_idx], a, "alpha changed for {id}");
                }
                for e in small.edges() {
                    let tid = &small.vertex_ids()[e.tail];
                    let hid = &small.vertex_ids()[e.head];
                    let bt = big.vertex_index(tid).unwrap();
                    let bh = big.vertex_index(hid).unwrap();
                    let found = big.edges().iter().any(|be| {
                        ((be.tail == bt && be.head == bh) || (be.tail == bh && be.head == bt))
                            && be.length == e.length
                    });
                    assert!(found, "edge {tid}-{hid} must persist");
                }
                // Induced: no extra edges among the old vertex set.
                let old_edges_in_big = big
                    .edges()
                    .iter()
                    .filter(|be| {
                        small.vertex_index(&big.vertex_ids()[be.tail]).is_some()
                            && small.vertex_index(&big.vertex_ids()[be.head]).is_some()
                    })
                    .count();
                assert_eq!(old_edges_in_big, small.edge_count());
            }
        }
    }

    #[test]
    fn declared_tail_classes_match_generated_prefixes() {
        let cases = vec![
            (
                SeqRule::Geometric {
                    scale: 2.0,
                    ratio: 0.5,
                },
                TailClass::Geometric,
            ),
            (SeqRule::Harmonic { scale: 1.0 }, TailClass::Harmonic),
            (
                SeqRule::Power {
                    scale: 1.0,
                    exponent: 0.5,
                },
                TailClass::Power,
            ),
            (SeqRule::Constant { value: 3.0 }, TailClass::Constant),
        ];
        for (rule, class) in cases {
            assert_eq!(rule.tail_class(), class);
            let prefix: Vec<f64> = (1..=20).map(|k| rule.value(k)).collect();
            assert!(rule_matches_prefix(&rule, &prefix, 1e-14));
        }
    }

    #[test]
    fn depth_caps_enforced() {
        let f = GraphFamily::new(FamilyKind::DeltaLine {
            lengths: SeqRule::Constant { value: 1.0 },
            alpha: SeqRule::Constant { value: 0.0 },
        });
        assert!(matches!(f.generate(0), Err(FamilyError::DepthZero)));
        assert!(matches!(
            f.generate(DEPTH_CAP + 1),
            Err(FamilyError::DepthExceedsCap(_))
        ));
        let t = GraphFamily::new(FamilyKind::RootedTree {
            branching: IntSeqRule::Constant { value: 9 },
            lengths: TreeLengthRule::Constant { value: 1.0 },
            alpha: SeqRule::Constant { value: 0.0 },
        });
        assert!(matches!(
            t.generate(8),
            Err(FamilyError::VertexCapExceeded)
        ));
    }

    #[test]
    fn finitely_modified_rule_overrides_then_reverts() {
        let rule = SeqRule::FinitelyModified {
            base: Box::new(SeqRule::Constant { value: 1.0 }),
            changes: vec![(2, 5.0)],
        };
        assert_eq!(rule.value(1), 1.0);
        assert_eq!(rule.value(2), 5.0);
        assert_eq!(rule.value(3), 1.0);
        assert_eq!(rule.tail_class(), TailClass::Constant);
    }
}

//! Verdict engine for self-adjointness, lower semiboundedness and
//! spectral-type claims over infinite graph families.
//!
//! Every verdict is produced by one named rule whose hypothesis is decided
//! symbolically from the declared tail rules of the family — the engine
//! never extrapolates numerically from a finite prefix to an infinite
//! claim. A sufficient condition whose hypothesis cannot be decided (or is
//! decidably false) yields `Inconclusive`, never `Fails`; the only
//! two-sided rule is the coupling-ratio criterion under bounded weighted
//! degree. Finite prefix scalars (interior degree suprema, partial sums)
//! travel along as evidence but never decide anything.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::family::{FamilyError, FamilyKind, GraphFamily, IntSeqRule, SeqRule, TreeLengthRule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Claim {
    SelfAdjoint,
    NotSelfAdjoint,
    LowerSemibounded,
    NotLowerSemibounded,
    AcSpectrumEmpty,
    SameEssentialSpectrum,
    SameAcSpectrum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    Holds,
    Fails,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Evidence {
    Number(f64),
    Text(String),
}

impl From<f64> for Evidence {
    fn from(x: f64) -> Self {
        Evidence::Number(x)
    }
}

impl From<&str> for Evidence {
    fn from(s: &str) -> Self {
        Evidence::Text(s.to_string())
    }
}

/// A claim, its status, the rule key that produced it, and the computed
/// scalars backing the decision.
#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub claim: Claim,
    pub status: Status,
    pub rule: &'static str,
    pub evidence: BTreeMap<String, Evidence>,
}

impl Verdict {
    fn new(claim: Claim, status: Status, rule: &'static str) -> Self {
        Verdict {
            claim,
            status,
            rule,
            evidence: BTreeMap::new(),
        }
    }

    fn with(mut self, key: &str, value: impl Into<Evidence>) -> Self {
        self.evidence.insert(key.to_string(), value.into());
        self
    }
}

/// Symbolically decided structural facts of a family. `None` means the
/// declared rules cannot decide the question.
#[derive(Debug, Clone, Default)]
struct FamilyFacts {
    sup_edge_finite: Option<bool>,
    inf_edge_positive: Option<bool>,
    deg_bounded: Option<bool>,
    inf_m_positive: Option<bool>,
    natural_complete: Option<bool>,
    m_complete: Option<bool>,
    total_length_finite: Option<bool>,
    sq_length_divergent: Option<bool>,
    /// Measure stays bounded above along the family.
    m_bounded_above: Option<bool>,
    /// Combinatorial degree stays bounded.
    comb_deg_bounded: Option<bool>,
    /// Interaction points on a half-line (the only kind for which the
    /// boundary-trace witness is auto-supplied).
    is_half_line: bool,
}

fn bounded_above(rule: &SeqRule) -> Option<bool> {
    match rule {
        SeqRule::Constant { .. } | SeqRule::Harmonic { .. } => Some(true),
        SeqRule::Geometric { scale, ratio } => Some(*scale == 0.0 || ratio.abs() <= 1.0),
        SeqRule::Power { exponent, .. } => Some(*exponent >= 0.0),
        SeqRule::Affine { slope, .. } => Some(*slope <= 0.0),
        SeqRule::FinitelyModified { base, .. } => bounded_above(base),
    }
}

fn facts(kind: &FamilyKind) -> FamilyFacts {
    match kind {
        FamilyKind::DeltaLine { lengths, .. } => {
            let inf_pos = lengths.inf_positive();
            let summable = lengths.abs_summable();
            FamilyFacts {
                sup_edge_finite: bounded_above(lengths),
                inf_edge_positive: inf_pos,
                // Two edges per vertex: the weighted degree stays bounded
                // exactly when lengths stay away from zero.
                deg_bounded: inf_pos,
                inf_m_positive: inf_pos,
                natural_complete: summable.map(|s| !s),
                m_complete: summable.map(|s| !s),
                total_length_finite: summable,
                sq_length_divergent: lengths.square_sum_divergent(),
                m_bounded_above: bounded_above(lengths),
                comb_deg_bounded: Some(true),
                is_half_line: true,
            }
        }
        FamilyKind::RootedTree {
            branching, lengths, ..
        } => {
            let unbounded_branching = branching.unbounded();
            match lengths {
                TreeLengthRule::Constant { value } => FamilyFacts {
                    sup_edge_finite: Some(true),
                    inf_edge_positive: Some(*value > 0.0),
                    // All incident edges share one length, so the weighted
                    // degree is 1/length^2 everywhere.
                    deg_bounded: Some(true),
                    inf_m_positive: Some(*value > 0.0),
                    natural_complete: Some(true),
                    m_complete: Some(true),
                    total_length_finite: Some(false),
                    sq_length_divergent: Some(true),
                    m_bounded_above: Some(!unbounded_branching),
                    comb_deg_bounded: Some(!unbounded_branching),
                    is_half_line: false,
                },
                TreeLengthRule::ShortEdge => FamilyFacts {
                    sup_edge_finite: Some(true),
                    inf_edge_positive: Some(!unbounded_branching),
                    // Unit edges dominate both sums at every vertex; the
                    // single short edge cannot push the ratio past a
                    // constant once the branching number is at least two.
                    deg_bounded: Some(branching.value(1) >= 2),
                    inf_m_positive: Some(branching.value(1) >= 2),
                    // Descending geodesics collect at worst harmonically
                    // many short steps plus unit steps.
                    natural_complete: Some(true),
                    m_complete: Some(true),
                    total_length_finite: Some(false),
                    sq_length_divergent: Some(true),
                    m_bounded_above: Some(!unbounded_branching),
                    comb_deg_bounded: Some(!unbounded_branching),
                    is_half_line: false,
                },
            }
        }
        FamilyKind::Ladder { gaps, .. } => {
            let inf_pos = gaps.inf_positive();
            let summable = gaps.abs_summable();
            FamilyFacts {
                sup_edge_finite: bounded_above(gaps),
                inf_edge_positive: inf_pos.map(|p| p), // vertical edges are unit
                deg_bounded: inf_pos,
                // Every vertex touches a unit vertical edge.
                inf_m_positive: Some(true),
                natural_complete: summable.map(|s| !s),
                m_complete: Some(true),
                total_length_finite: Some(false),
                sq_length_divergent: Some(true),
                m_bounded_above: bounded_above(gaps),
                comb_deg_bounded: Some(true),
                is_half_line: false,
            }
        }
        FamilyKind::LatticeBox { edge_length, .. } => FamilyFacts {
            sup_edge_finite: Some(true),
            inf_edge_positive: Some(*edge_length > 0.0),
            deg_bounded: Some(true),
            inf_m_positive: Some(*edge_length > 0.0),
            natural_complete: Some(true),
            m_complete: Some(true),
            total_length_finite: Some(false),
            sq_length_divergent: Some(true),
            m_bounded_above: Some(true),
            comb_deg_bounded: Some(true),
            is_half_line: false,
        },
        FamilyKind::Custom(_) => FamilyFacts::default(),
    }
}

/// Finite-prefix scalars attached to verdicts as evidence.
struct PrefixEvidence {
    sup_deg_interior: f64,
    inf_m: f64,
    inf_len: f64,
    partial_length: f64,
    partial_length_sq: f64,
}

fn prefix_evidence(f: &GraphFamily, depth: usize) -> Result<PrefixEvidence, FamilyError> {
    let g = f.generate(depth)?;
    let (vw, _) = g.weights().map_err(FamilyError::Graph)?;
    let interior = f.interior_ids(depth);
    let mut sup_deg: f64 = 0.0;
    if interior.is_empty() {
        for &d in &vw.weighted_degree {
            sup_deg = sup_deg.max(d);
        }
    } else {
        for id in &interior {
            if let Some(v) = g.vertex_index(id) {
                sup_deg = sup_deg.max(vw.weighted_degree[v]);
            }
        }
    }
    let inf_m = vw.m.iter().cloned().fold(f64::INFINITY, f64::min);
    let inf_len = g
        .edges()
        .iter()
        .map(|e| e.length)
        .fold(f64::INFINITY, f64::min);
    let partial_length = g.total_length();
    let partial_length_sq = g.edges().iter().map(|e| e.length * e.length).sum();
    Ok(PrefixEvidence {
        sup_deg_interior: sup_deg,
        inf_m,
        inf_len,
        partial_length,
        partial_length_sq,
    })
}

fn decide(claim: Claim, rule: &'static str, hypothesis: Option<bool>) -> Verdict {
    match hypothesis {
        Some(true) => Verdict::new(claim, Status::Holds, rule),
        Some(false) => Verdict::new(claim, Status::Inconclusive, rule)
            .with("note", "hypothesis decidably absent"),
        None => Verdict::new(claim, Status::Inconclusive, rule)
            .with("note", "tail class undecided"),
    }
}

/// Self-adjointness verdicts, one per rule, fired in fixed order.
pub fn check_self_adjointness(
    f: &GraphFamily,
    depth: usize,
) -> Result<Vec<Verdict>, FamilyError> {
    let fx = facts(&f.kind);
    let ev = prefix_evidence(f, depth)?;
    let lengths_class = match &f.kind {
        FamilyKind::DeltaLine { lengths, .. } => lengths.tail_class().to_string(),
        FamilyKind::Ladder { gaps, .. } => gaps.tail_class().to_string(),
        FamilyKind::RootedTree { lengths, .. } => match lengths {
            TreeLengthRule::Constant { .. } => "constant".to_string(),
            TreeLengthRule::ShortEdge => "short_edge".to_string(),
        },
        FamilyKind::LatticeBox { .. } => "constant".to_string(),
        FamilyKind::Custom(_) => "unknown".to_string(),
    };
    let mut out = Vec::new();

    out.push(
        decide(Claim::SelfAdjoint, "bounded_weighted_degree", fx.deg_bounded)
            .with("sup_deg_interior_prefix", ev.sup_deg_interior)
            .with("length_tail_class", lengths_class.as_str()),
    );
    out.push(
        decide(
            Claim::SelfAdjoint,
            "edge_length_lower_bound",
            fx.inf_edge_positive,
        )
        .with("inf_len_prefix", ev.inf_len),
    );
    out.push(
        decide(
            Claim::SelfAdjoint,
            "vertex_measure_lower_bound",
            fx.inf_m_positive,
        )
        .with("inf_m_prefix", ev.inf_m),
    );
    out.push(
        decide(
            Claim::SelfAdjoint,
            "natural_metric_complete",
            fx.natural_complete,
        )
        .with("partial_length", ev.partial_length),
    );
    out.push(
        decide(Claim::SelfAdjoint, "measure_metric_complete", fx.m_complete)
            .with("partial_length", ev.partial_length),
    );
    // Incomplete square-root metric with finite total length: the constant
    // function has finite form energy and a nonzero boundary trace, so the
    // operator fails to be self-adjoint. The witness is auto-supplied only
    // on the half-line kind.
    let neg_hypothesis = match (fx.total_length_finite, fx.is_half_line) {
        (Some(true), true) => Some(true),
        (Some(false), _) => Some(false),
        _ => None,
    };
    out.push(
        decide(
            Claim::NotSelfAdjoint,
            "sqrt_metric_finite_total_length",
            neg_hypothesis,
        )
        .with("partial_length", ev.partial_length)
        .with("witness", "constant function"),
    );
    let ismagilov = if fx.is_half_line {
        fx.sq_length_divergent
    } else {
        Some(false)
    };
    out.push(
        decide(Claim::SelfAdjoint, "square_length_divergence", ismagilov)
            .with("partial_length_sq", ev.partial_length_sq),
    );
    Ok(out)
}

fn nonnegative(rule: &SeqRule) -> Option<bool> {
    match rule {
        SeqRule::Constant { value } => Some(*value >= 0.0),
        SeqRule::Geometric { scale, ratio } => Some(*scale >= 0.0 && *ratio >= 0.0 || *scale == 0.0),
        SeqRule::Harmonic { scale } => Some(*scale >= 0.0),
        SeqRule::Power { scale, .. } => Some(*scale >= 0.0),
        SeqRule::Affine { slope, intercept } => {
            Some(*slope >= 0.0 && *slope + *intercept >= 0.0)
        }
        SeqRule::FinitelyModified { base, changes } => match nonnegative(base) {
            Some(true) => Some(changes.iter().all(|&(_, v)| v >= 0.0)),
            other => other,
        },
    }
}

/// Is inf over the family of alpha(v)/m(v) finite?
fn ratio_bounded_below(alpha: &SeqRule, fx: &FamilyFacts) -> Option<bool> {
    if nonnegative(alpha) == Some(true) {
        return Some(true);
    }
    match (alpha.bounded_below(), fx.inf_m_positive, fx.m_bounded_above) {
        (Some(true), Some(true), _) => Some(true),
        (Some(false), _, Some(true)) => Some(false),
        _ => None,
    }
}

/// One verdict on lower semiboundedness of the coupled operator. Under
/// bounded weighted degree the coupling-ratio criterion is two-sided.
pub fn check_semiboundedness(
    f: &GraphFamily,
    alpha: Option<&SeqRule>,
    depth: usize,
) -> Result<Verdict, FamilyError> {
    let fx = facts(&f.kind);
    let a = match alpha.or_else(|| f.alpha_rule()) {
        Some(rule) => rule,
        None => {
            return Ok(Verdict::new(
                Claim::LowerSemibounded,
                Status::Inconclusive,
                "coupling_ratio_bounded_below",
            )
            .with("note", "no declared coupling rule"))
        }
    };
    let ev = prefix_evidence(f, depth)?;
    let g = f.with_alpha_rule(a.clone()).generate(depth)?;
    let (vw, _) = g.weights().map_err(FamilyError::Graph)?;
    let mut worst_ratio = f64::INFINITY;
    for (v, &m) in vw.m.iter().enumerate() {
        worst_ratio = worst_ratio.min(g.alpha()[v] / m);
    }
    let bounded = ratio_bounded_below(a, &fx);
    let verdict = match bounded {
        Some(true) => Verdict::new(
            Claim::LowerSemibounded,
            Status::Holds,
            "coupling_ratio_bounded_below",
        ),
        Some(false) => {
            if fx.deg_bounded == Some(true) {
                // Two-sided under bounded weighted degree.
                Verdict::new(
                    Claim::NotLowerSemibounded,
                    Status::Holds,
                    "coupling_ratio_bounded_below",
                )
            } else {
                Verdict::new(
                    Claim::LowerSemibounded,
                    Status::Inconclusive,
                    "coupling_ratio_bounded_below",
                )
                .with("note", "ratio unbounded below but degree growth undecided")
            }
        }
        None => Verdict::new(
            Claim::LowerSemibounded,
            Status::Inconclusive,
            "coupling_ratio_bounded_below",
        )
        .with("note", "tail class undecided"),
    };
    Ok(verdict
        .with("alpha_tail_class", a.tail_class().to_string().as_str())
        .with("worst_ratio_prefix", worst_ratio)
        .with("sup_deg_interior_prefix", ev.sup_deg_interior))
}

fn negate_rule(r: &SeqRule) -> SeqRule {
    match r {
        SeqRule::Constant { value } => SeqRule::Constant { value: -value },
        SeqRule::Geometric { scale, ratio } => SeqRule::Geometric {
            scale: -scale,
            ratio: *ratio,
        },
        SeqRule::Harmonic { scale } => SeqRule::Harmonic { scale: -scale },
        SeqRule::Power { scale, exponent } => SeqRule::Power {
            scale: -scale,
            exponent: *exponent,
        },
        SeqRule::Affine { slope, intercept } => SeqRule::Affine {
            slope: -slope,
            intercept: -intercept,
        },
        SeqRule::FinitelyModified { base, changes } => SeqRule::FinitelyModified {
            base: Box::new(negate_rule(base)),
            changes: changes.iter().map(|&(k, v)| (k, -v)).collect(),
        },
    }
}

fn is_zero_rule(r: &SeqRule) -> bool {
    matches!(r, SeqRule::Constant { value } if *value == 0.0)
}

/// Symbolic difference of two coupling rules, when representable.
fn rule_difference(a: &SeqRule, b: &SeqRule) -> Option<SeqRule> {
    if a == b {
        return Some(SeqRule::Constant { value: 0.0 });
    }
    if is_zero_rule(b) {
        return Some(a.clone());
    }
    if is_zero_rule(a) {
        return Some(negate_rule(b));
    }
    match (a, b) {
        (SeqRule::FinitelyModified { base, changes }, other) if **base == *other => {
            Some(SeqRule::FinitelyModified {
                base: Box::new(SeqRule::Constant { value: 0.0 }),
                changes: changes
                    .iter()
                    .map(|&(k, v)| (k, v - other.value(k)))
                    .collect(),
            })
        }
        (other, SeqRule::FinitelyModified { base, changes }) if **base == *other => {
            Some(SeqRule::FinitelyModified {
                base: Box::new(SeqRule::Constant { value: 0.0 }),
                changes: changes
                    .iter()
                    .map(|&(k, v)| (k, other.value(k) - v))
                    .collect(),
            })
        }
        (SeqRule::Constant { value: v1 }, SeqRule::Constant { value: v2 }) => {
            Some(SeqRule::Constant { value: v1 - v2 })
        }
        _ => None,
    }
}

/// Spectral-type verdicts: absence of absolutely continuous spectrum via
/// path coupling divergence, and essential/absolutely-continuous spectrum
/// comparison between two coupling rules via vanishing or summable
/// differences.
pub fn check_spectral_type(
    f: &GraphFamily,
    alpha: Option<&SeqRule>,
    alt_alpha: Option<&SeqRule>,
) -> Result<Vec<Verdict>, FamilyError> {
    let fx = facts(&f.kind);
    let default = SeqRule::Constant { value: 0.0 };
    let a = alpha.or_else(|| f.alpha_rule()).unwrap_or(&default).clone();
    let tilde = alt_alpha.cloned().unwrap_or(SeqRule::Constant { value: 0.0 });
    let mut out = Vec::new();

    // Purely singular spectrum: along every infinite path the coupling to
    // combinatorial degree ratio must be unbounded; side conditions pin the
    // edge lengths away from zero and infinity.
    let side = match (fx.inf_edge_positive, fx.sup_edge_finite, fx.comb_deg_bounded) {
        (Some(true), Some(true), Some(true)) => Some(true),
        (Some(false), _, _) | (_, Some(false), _) => Some(false),
        _ => None,
    };
    let stolz = match side {
        Some(true) => a.abs_diverges(),
        other => other,
    };
    out.push(
        decide(Claim::AcSpectrumEmpty, "coupling_path_divergence", stolz)
            .with("alpha_tail_class", a.tail_class().to_string().as_str()),
    );

    let diff = rule_difference(&a, &tilde);
    let (c0, l1) = match (&diff, fx.inf_m_positive) {
        (Some(d), Some(true)) => (d.tends_to_zero(), d.abs_summable()),
        (Some(d), _) => {
            // Without a lower bound on the measure only the exactly
            // eventually-zero difference decides anything.
            let zero = matches!(d.tail_class(), crate::family::TailClass::Constant)
                && d.tends_to_zero() == Some(true);
            if zero {
                (Some(true), Some(true))
            } else {
                (None, None)
            }
        }
        (None, _) => (None, None),
    };
    let diff_class = diff
        .as_ref()
        .map(|d| d.tail_class().to_string())
        .unwrap_or_else(|| "unknown".to_string());
    out.push(
        decide(
            Claim::SameEssentialSpectrum,
            "coupling_difference_vanishing",
            c0,
        )
        .with("difference_tail_class", diff_class.as_str()),
    );
    out.push(
        decide(
            Claim::SameAcSpectrum,
            "coupling_difference_summable",
            l1,
        )
        .with("difference_tail_class", diff_class.as_str()),
    );
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{FamilyKind, GraphFamily, IntSeqRule, SeqRule, TreeLengthRule};

    fn tree_short_edge() -> GraphFamily {
        GraphFamily::new(FamilyKind::RootedTree {
            branching: IntSeqRule::Affine {
                slope: 1,
                intercept: 1,
            },
            lengths: TreeLengthRule::ShortEdge,
            alpha: SeqRule::Constant { value: 0.0 },
        })
    }

    fn ladder_harmonic() -> GraphFamily {
        GraphFamily::new(FamilyKind::Ladder {
            gaps: SeqRule::Harmonic { scale: 1.0 },
            alpha: SeqRule::Constant { value: 0.0 },
        })
    }

    fn delta_line(lengths: SeqRule) -> GraphFamily {
        GraphFamily::new(FamilyKind::DeltaLine {
            lengths,
            alpha: SeqRule::Constant { value: 0.0 },
        })
    }

    fn verdict<'a>(vs: &'a [Verdict], rule: &str) -> &'a Verdict {
        vs.iter().find(|v| v.rule == rule).unwrap()
    }

    #[test]
    fn short_edge_tree_self_adjoint_via_bounded_degree() {
        let vs = check_self_adjointness(&tree_short_edge(), 5).unwrap();
        let v = verdict(&vs, "bounded_weighted_degree");
        assert_eq!(v.claim, Claim::SelfAdjoint);
        assert_eq!(v.status, Status::Holds);
        match v.evidence.get("sup_deg_interior_prefix") {
            Some(Evidence::Number(x)) => assert!(*x < 4.0, "sup Deg {x}"),
            _ => panic!("missing evidence"),
        }
    }

    #[test]
    fn ladder_self_adjoint_via_measure_bound() {
        let vs = check_self_adjointness(&ladder_harmonic(), 8).unwrap();
        let v = verdict(&vs, "vertex_measure_lower_bound");
        assert_eq!(v.status, Status::Holds);
        match v.evidence.get("inf_m_prefix") {
            Some(Evidence::Number(x)) => assert!(*x >= 1.0 - 1e-15),
            _ => panic!("missing evidence"),
        }
        // Degree rule cannot decide: gaps shrink to zero.
        assert_eq!(
            verdict(&vs, "bounded_weighted_degree").status,
            Status::Inconclusive
        );
    }

    #[test]
    fn geometric_line_not_self_adjoint() {
        let f = delta_line(SeqRule::Geometric {
            scale: 0.5,
            ratio: 0.5,
        });
        let vs = check_self_adjointness(&f, 10).unwrap();
        let neg = verdict(&vs, "sqrt_metric_finite_total_length");
        assert_eq!(neg.claim, Claim::NotSelfAdjoint);
        assert_eq!(neg.status, Status::Holds);
        // No positive rule may hold simultaneously.
        for v in &vs {
            if v.claim == Claim::SelfAdjoint {
                assert_ne!(v.status, Status::Holds, "{} also holds", v.rule);
            }
        }
    }

    #[test]
    fn slow_decay_line_self_adjoint_via_square_divergence() {
        let f = delta_line(SeqRule::Power {
            scale: 1.0,
            exponent: 0.5,
        });
        let vs = check_self_adjointness(&f, 10).unwrap();
        let v = verdict(&vs, "square_length_divergence");
        assert_eq!(v.status, Status::Holds);
        // Lengths shrink, so the first three rules stay inconclusive.
        assert_eq!(
            verdict(&vs, "bounded_weighted_degree").status,
            Status::Inconclusive
        );
        assert_eq!(
            verdict(&vs, "edge_length_lower_bound").status,
            Status::Inconclusive
        );
    }

    #[test]
    fn no_contradictory_verdicts_across_families() {
        let families = vec![
            tree_short_edge(),
            ladder_harmonic(),
            delta_line(SeqRule::Constant { value: 1.0 }),
            delta_line(SeqRule::Geometric {
                scale: 1.0,
                ratio: 0.5,
            }),
            delta_line(SeqRule::Harmonic { scale: 1.0 }),
            delta_line(SeqRule::Power {
                scale: 1.0,
                exponent: 0.5,
            }),
        ];
        for f in &families {
            let vs = check_self_adjointness(f, 6).unwrap();
            let pos = vs
                .iter()
                .any(|v| v.claim == Claim::SelfAdjoint && v.status == Status::Holds);
            let neg = vs
                .iter()
                .any(|v| v.claim == Claim::NotSelfAdjoint && v.status == Status::Holds);
            assert!(!(pos && neg), "contradiction for {:?}", f.kind);
        }
    }

    #[test]
    fn deepening_never_flips_decided_verdicts() {
        let f = tree_short_edge();
        let shallow = check_self_adjointness(&f, 3).unwrap();
        let deep = check_self_adjointness(&f, 5).unwrap();
        for (s, d) in shallow.iter().zip(&deep) {
            assert_eq!(s.rule, d.rule);
            if s.status != Status::Inconclusive {
                assert_eq!(s.status, d.status, "rule {} flipped", s.rule);
            }
        }
    }

    #[test]
    fn semibounded_for_zero_coupling() {
        let v = check_semiboundedness(&delta_line(SeqRule::Constant { value: 1.0 }), None, 6)
            .unwrap();
        assert_eq!(v.claim, Claim::LowerSemibounded);
        assert_eq!(v.status, Status::Holds);
    }

    #[test]
    fn diverging_attraction_on_bounded_degree_family_unbounded_below() {
        let alpha = SeqRule::Affine {
            slope: -2.0,
            intercept: -1.0,
        };
        let v = check_semiboundedness(
            &delta_line(SeqRule::Constant { value: 1.0 }),
            Some(&alpha),
            6,
        )
        .unwrap();
        assert_eq!(v.claim, Claim::NotLowerSemibounded);
        assert_eq!(v.status, Status::Holds);
    }

    #[test]
    fn custom_family_is_inconclusive() {
        use crate::family::GraphGenerator;
        use crate::graph::{graph_from_indices, MetricGraph};
        struct Two;
        impl GraphGenerator for Two {
            fn generate(&self, _d: usize) -> Result<MetricGraph, FamilyError> {
                Ok(graph_from_indices(&[0.0, 0.0], &[(0, 1, 1.0)]).unwrap())
            }
            fn interior_ids(&self, _d: usize) -> Vec<String> {
                vec![]
            }
        }
        let f = GraphFamily::new(FamilyKind::Custom(std::sync::Arc::new(Two)));
        let v = check_semiboundedness(&f, None, 2).unwrap();
        assert_eq!(v.status, Status::Inconclusive);
    }

    #[test]
    fn radial_coupling_growth_kills_ac_spectrum() {
        let f = GraphFamily::new(FamilyKind::RootedTree {
            branching: IntSeqRule::Constant { value: 2 },
            lengths: TreeLengthRule::Constant { value: 1.0 },
            alpha: SeqRule::Power {
                scale: 1.0,
                exponent: -2.0,
            },
        });
        let vs = check_spectral_type(&f, None, None).unwrap();
        let v = verdict(&vs, "coupling_path_divergence");
        assert_eq!(v.claim, Claim::AcSpectrumEmpty);
        assert_eq!(v.status, Status::Holds);
    }

    #[test]
    fn finitely_supported_difference_preserves_both_spectra() {
        let base = SeqRule::Constant { value: 2.0 };
        let modified = SeqRule::FinitelyModified {
            base: Box::new(base.clone()),
            changes: vec![(1, 5.0), (3, -1.0)],
        };
        let f = delta_line(SeqRule::Constant { value: 1.0 });
        let vs = check_spectral_type(&f, Some(&base), Some(&modified)).unwrap();
        assert_eq!(
            verdict(&vs, "coupling_difference_vanishing").status,
            Status::Holds
        );
        assert_eq!(
            verdict(&vs, "coupling_difference_summable").status,
            Status::Holds
        );
    }

    #[test]
    fn harmonic_ratio_separates_the_two_comparisons() {
        let f = delta_line(SeqRule::Constant { value: 1.0 });
        let alpha = SeqRule::Harmonic { scale: 1.0 };
        let vs = check_spectral_type(&f, Some(&alpha), None).unwrap();
        assert_eq!(
            verdict(&vs, "coupling_difference_vanishing").status,
            Status::Holds
        );
        assert_eq!(
            verdict(&vs, "coupling_difference_summable").status,
            Status::Inconclusive
        );
    }

    #[test]
    fn every_verdict_names_exactly_one_rule() {
        let f = tree_short_edge();
        let vs = check_self_adjointness(&f, 4).unwrap();
        let mut rules: Vec<&str> = vs.iter().map(|v| v.rule).collect();
        rules.sort();
        rules.dedup();
        assert_eq!(rules.len(), vs.len());
    }
}

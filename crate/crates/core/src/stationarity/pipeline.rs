use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mappings::anchors;
use crate::scalar::{to_strings, Scalar};
use crate::stationarity::checks::Session;
use crate::stationarity::program::{ImplicitProgram, Structure};
use crate::stationarity::verdict::{CheckKind, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeStatus {
    /// A decided check came out true.
    Holds,
    /// A decided check came out false.
    Fails,
    /// A hypothesis established by a named result.
    Certified,
    /// A hypothesis for which no certificate is available.
    Uncertified,
    /// Derived through an implication.
    Concluded,
    /// Ruled out by the contrapositive of a necessary condition.
    Excluded,
    Undetermined,
}

impl NodeStatus {
    fn truth(self) -> Option<bool> {
        match self {
            NodeStatus::Holds | NodeStatus::Certified | NodeStatus::Concluded => Some(true),
            NodeStatus::Fails | NodeStatus::Excluded => Some(false),
            NodeStatus::Uncertified | NodeStatus::Undetermined => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeStatus {
    /// All premises hold and so does the conclusion.
    Applies,
    /// Some premise fails.
    Vacuous,
    #[serde(rename = "hypothesis uncertified")]
    HypothesisUncertified,
    /// The premises other than local minimality hold but the conclusion
    /// fails, so the point is not a local minimizer.
    Contrapositive,
    /// All premises hold and the conclusion fails: an internal inconsistency.
    Violated,
}

#[derive(Debug, Clone, Serialize)]
pub struct PipelineNode {
    pub id: String,
    pub label: String,
    pub status: NodeStatus,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub certificates: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PipelineEdge {
    pub from: Vec<String>,
    pub to: String,
    pub anchor: String,
    pub status: EdgeStatus,
}

#[derive(Debug, Clone)]
pub struct PipelineReport<S> {
    pub point: Vec<S>,
    pub nodes: Vec<PipelineNode>,
    pub edges: Vec<PipelineEdge>,
    pub verdicts: Vec<Verdict<S>>,
    pub conclusions: Vec<String>,
    /// No implication was violated.
    pub consistent: bool,
}

impl<S: Scalar> PipelineReport<S> {
    pub fn node(&self, id: &str) -> Option<&PipelineNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn status(&self, id: &str) -> Option<NodeStatus> {
        self.node(id).map(|n| n.status)
    }

    pub fn edge(&self, to: &str, anchor: &str) -> Vec<&PipelineEdge> {
        self.edges.iter().filter(|e| e.to == to && e.anchor == anchor).collect()
    }

    pub fn verdict(&self, kind: CheckKind) -> Option<&Verdict<S>> {
        self.verdicts.iter().find(|v| v.kind == kind)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let status: BTreeMap<&str, NodeStatus> = self.nodes.iter().map(|n| (n.id.as_str(), n.status)).collect();
        serde_json::json!({
            "point": to_strings(&self.point),
            "nodes": self.nodes,
            "edges": self.edges,
            "status": status,
            "conclusions": self.conclusions,
            "consistent": self.consistent,
            "verdicts": self.verdicts.iter().map(|v| v.to_json()).collect::<Vec<_>>(),
        })
    }
}

struct Graph {
    nodes: Vec<PipelineNode>,
    edges: Vec<PipelineEdge>,
}

impl Graph {
    fn node(&mut self, id: &str, label: &str, status: NodeStatus, certificates: &[&str]) {
        self.nodes.push(PipelineNode {
            id: id.into(),
            label: label.into(),
            status,
            certificates: certificates.iter().map(|s| s.to_string()).collect(),
        });
    }

    fn status(&self, id: &str) -> NodeStatus {
        self.nodes.iter().find(|n| n.id == id).map(|n| n.status).unwrap_or_else(|| panic!("node {id}"))
    }

    fn set(&mut self, id: &str, status: NodeStatus) {
        if let Some(n) = self.nodes.iter_mut().find(|n| n.id == id) {
            n.status = status;
        }
    }

    /// Evaluates `premises ⟹ to`. The pseudo-premise `local_minimizer`
    /// makes the edge conditional.
    fn edge(&mut self, premises: &[&str], to: &str, anchor: &str) {
        let conditional = premises.contains(&LOCAL_MIN);
        let truths: Vec<Option<bool>> =
            premises.iter().filter(|p| **p != LOCAL_MIN).map(|p| self.status(p).truth()).collect();
        let conclusion = self.status(to).truth();
        let status = if truths.iter().any(|t| *t == Some(false)) {
            EdgeStatus::Vacuous
        } else if truths.iter().any(|t| t.is_none()) {
            EdgeStatus::HypothesisUncertified
        } else if conclusion == Some(true) {
            EdgeStatus::Applies
        } else if conditional {
            self.set(LOCAL_MIN, NodeStatus::Excluded);
            EdgeStatus::Contrapositive
        } else if conclusion.is_none() {
            self.set(to, NodeStatus::Concluded);
            EdgeStatus::Applies
        } else {
            EdgeStatus::Violated
        };
        self.edges.push(PipelineEdge {
            from: premises.iter().map(|s| s.to_string()).collect(),
            to: to.into(),
            anchor: anchor.into(),
            status,
        });
    }
}

const LOCAL_MIN: &str = "local_minimizer";

fn holds(b: bool) -> NodeStatus {
    if b {
        NodeStatus::Holds
    } else {
        NodeStatus::Fails
    }
}

fn certified(b: bool) -> NodeStatus {
    if b {
        NodeStatus::Certified
    } else {
        NodeStatus::Uncertified
    }
}

/// Runs every check at `z̄` and evaluates the implications between them.
pub fn pipeline<S: Scalar>(program: &ImplicitProgram<S>, z: &[S]) -> Result<PipelineReport<S>> {
    let session = Session::new(program, z)?;
    let s = program.s();
    let zw: Vec<S> = z.iter().cloned().chain(std::iter::repeat(S::zero()).take(s)).collect();
    let d = program.derived();
    let k_hat_bounded = d.k_hat.locally_bounded_at(&zw)?;
    let aux_bounded = d.aux.locally_bounded_at(&zw)?;

    let kinds = CheckKind::ALL;
    let verdicts: Vec<Verdict<S>> = kinds.iter().map(|&k| session.check(k, None)).collect::<Result<_>>()?;
    let get = |k: CheckKind| verdicts.iter().find(|v| v.kind == k).expect("all kinds run");
    let some = |k: CheckKind| get(k).holds;
    let all = |k: CheckKind| get(k).holds_for_all.unwrap_or(get(k).holds);

    let mut g = Graph { nodes: Vec::new(), edges: Vec::new() };
    let robinson = anchors::POLYHEDRAL_SUBREGULARITY;
    g.node("k_hat_isc", "K̂ inner semicompact at (z̄,0)", certified(k_hat_bounded), &[anchors::LOCAL_BOUNDEDNESS]);
    g.node("aux_isc", "(z,w) ⇉ F̃(z) ∩ G⁻¹(w) inner semicompact at (z̄,0)", certified(aux_bounded), &[anchors::LOCAL_BOUNDEDNESS]);
    g.node("implicit", "implicitly M-stationary", holds(some(CheckKind::Implicit)), &[]);
    g.node("fuzzy_some", "fuzzily M-stationary for some λ̄", holds(some(CheckKind::Fuzzy)), &[]);
    g.node("fuzzy_all", "fuzzily M-stationary for every λ̄", holds(all(CheckKind::Fuzzy)), &[]);
    g.node("explicit_some", "explicitly M-stationary for some λ̄", holds(some(CheckKind::Explicit)), &[]);
    g.node("explicit_all", "explicitly M-stationary for every λ̄", holds(all(CheckKind::Explicit)), &[]);
    g.node("mordukhovich_i", "Mordukhovich criterion for H_M", holds(some(CheckKind::MordukhovichI)), &[]);
    g.node("sigma", "range intersection condition for H and z − M", holds(some(CheckKind::Sigma)), &[]);
    for (id, k) in [
        ("mordukhovich_ii", CheckKind::MordukhovichIi),
        ("mordukhovich_iii", CheckKind::MordukhovichIii),
        ("abstract_cq", CheckKind::AbstractCq),
        ("mr_cq", CheckKind::MrCq),
        ("strong_cq", CheckKind::StrongCq),
        ("inc", CheckKind::IncLambda),
    ] {
        g.node(&format!("{id}_some"), &format!("{id} for some λ̄"), holds(some(k)), &[]);
        g.node(&format!("{id}_all"), &format!("{id} for every λ̄"), holds(all(k)), &[]);
    }
    g.node("h_m_subregular", "H_M metrically subregular at (z̄,(0,0))", NodeStatus::Certified, &[robinson]);
    g.node("cal_h_m_subregular_all", "𝓗_M metrically subregular at every ((z̄,λ),0)", NodeStatus::Certified, &[robinson]);
    g.node("frak_h_m_subregular_all", "𝕳_M metrically subregular at every ((z̄,λ),0)", NodeStatus::Certified, &[robinson]);
    g.node("hat_h_subregular_all", "Ĥ metrically subregular at every ((z̄,0,λ),(0,0))", NodeStatus::Certified, &[robinson]);
    g.node("feas_map_subregular_all", "(z,w,q,λ) ⇉ (z−q, F(z)−λ, G(q,λ)−w) metrically subregular", NodeStatus::Certified, &[robinson]);

    let inc_all = all(CheckKind::IncLambda);
    let branch_a = if !inc_all { NodeStatus::Fails } else { certified(k_hat_bounded) };
    g.node("branch_a", "H_M subregular, K̂ inner semicompact, Ĥ subregular and Inc(λ) for every λ", branch_a, &[anchors::CQ_BRANCHES]);
    g.node("branch_b", "H_M subregular, auxiliary map inner semicompact, feasibility map subregular", certified(aux_bounded), &[anchors::CQ_BRANCHES]);
    let c_ok = get(CheckKind::IncLambda).strata.iter().any(|v| v.holds);
    g.node("branch_c", "𝓗_M subregular and Inc(λ̄) for some λ̄", if c_ok { NodeStatus::Certified } else { NodeStatus::Fails }, &[anchors::CQ_BRANCHES]);
    g.node("branch_d", "𝕳_M subregular for some λ̄", NodeStatus::Certified, &[anchors::CQ_BRANCHES, robinson]);

    let structure = program.structure();
    g.node("structure_smooth_minus_set", "G(z,λ) = g(z,λ) − Θ", holds(structure == Some(Structure::SmoothMinusSet)), &[]);
    g.node("structure_additive_split", "G(z,λ) = G̃(λ) + g̃(z)", holds(structure == Some(Structure::AdditiveSplit)), &[]);
    g.node("convex", "convex data", holds(program.is_convex()), &[]);
    let any_stationary = some(CheckKind::Implicit) || some(CheckKind::Fuzzy) || some(CheckKind::Explicit);
    g.node("stationary_any", "M-stationary in some sense", holds(any_stationary), &[]);
    g.node(LOCAL_MIN, "z̄ local minimizer", NodeStatus::Undetermined, &[]);
    g.node("global_minimizer", "z̄ global minimizer", NodeStatus::Undetermined, &[]);

    // necessary conditions
    g.edge(&["h_m_subregular", LOCAL_MIN], "implicit", anchors::SUBREGULARITY_NECESSARY);
    g.edge(&["cal_h_m_subregular_all", LOCAL_MIN], "fuzzy_all", anchors::SUBREGULARITY_NECESSARY);
    g.edge(&["frak_h_m_subregular_all", LOCAL_MIN], "explicit_all", anchors::SUBREGULARITY_NECESSARY);
    for b in ["branch_a", "branch_b", "branch_c", "branch_d"] {
        g.edge(&[b, LOCAL_MIN], "explicit_some", anchors::CQ_BRANCHES);
    }
    // implicit to fuzzy/explicit
    g.edge(&["implicit", "k_hat_isc", "hat_h_subregular_all"], "fuzzy_some", anchors::IMPLICIT_TO_FUZZY);
    g.edge(&["implicit", "k_hat_isc", "hat_h_subregular_all", "inc_all"], "explicit_some", anchors::IMPLICIT_TO_FUZZY);
    g.edge(&["implicit", "aux_isc", "feas_map_subregular_all"], "explicit_some", anchors::AUX_MAP_ROUTE);
    g.edge(&["implicit", "k_hat_isc", "abstract_cq_all"], "fuzzy_some", anchors::MORDUKHOVICH_METRIC_REGULARITY);
    g.edge(&["implicit", "k_hat_isc", "inc_all", "mr_cq_all"], "explicit_some", anchors::MORDUKHOVICH_METRIC_REGULARITY);
    g.edge(&["implicit", "k_hat_isc", "strong_cq_all"], "explicit_some", anchors::MORDUKHOVICH_METRIC_REGULARITY);
    g.edge(&["structure_smooth_minus_set", "implicit", "k_hat_isc"], "explicit_some", anchors::STRUCTURED_IMPLICIT_TO_EXPLICIT);
    g.edge(
        &["structure_additive_split", "implicit", "k_hat_isc", "hat_h_subregular_all"],
        "explicit_some",
        anchors::STRUCTURED_IMPLICIT_TO_EXPLICIT,
    );
    g.edge(&["structure_smooth_minus_set"], "inc_all", anchors::STRUCTURED_INCLUSION_EQUALITY);
    g.edge(&["structure_additive_split"], "inc_all", anchors::STRUCTURED_INCLUSION_EQUALITY);
    // fuzzy and explicit
    g.edge(&["fuzzy_some", "inc_all"], "explicit_some", anchors::INCLUSION_FUZZY_EXPLICIT);
    g.edge(&["fuzzy_all", "inc_all"], "explicit_all", anchors::INCLUSION_FUZZY_EXPLICIT);
    g.edge(&["strong_cq_all"], "inc_all", anchors::STRONG_CQ_INCLUSION);
    g.edge(&["mordukhovich_i"], "h_m_subregular", anchors::MORDUKHOVICH_METRIC_REGULARITY);
    g.edge(&["convex", "stationary_any"], "global_minimizer", anchors::CONVEX_SUFFICIENCY);

    let fuzzy_strata = &get(CheckKind::Fuzzy).strata;
    let inc_strata = &get(CheckKind::IncLambda).strata;
    let explicit_strata = &get(CheckKind::Explicit).strata;
    let mut per_stratum_ok = true;
    for ((f, i), e) in fuzzy_strata.iter().zip(inc_strata).zip(explicit_strata) {
        if f.holds && i.holds && !e.holds {
            per_stratum_ok = false;
        }
    }

    let mut conclusions = Vec::new();
    if g.status(LOCAL_MIN) == NodeStatus::Excluded {
        g.nodes.iter_mut().find(|n| n.id == LOCAL_MIN).expect("node").certificates.push(anchors::SUBOPTIMALITY.into());
        conclusions.push("z̄ is not a local minimizer: a necessary condition certified by subregularity fails".into());
    }
    if g.status("global_minimizer") == NodeStatus::Concluded {
        g.set(LOCAL_MIN, NodeStatus::Concluded);
        conclusions.push("z̄ is a global minimizer (convex data and M-stationarity)".into());
    }
    if program.has_custom_feasibility_map() {
        conclusions.push("implicit conditions refer to the supplied feasibility map H, not the union of G over F".into());
    }
    if g.edges.iter().any(|e| e.status == EdgeStatus::HypothesisUncertified) {
        conclusions.push("some implications depend on an uncertified inner semicompactness hypothesis".into());
    }
    let consistent = per_stratum_ok && g.edges.iter().all(|e| e.status != EdgeStatus::Violated);
    if !consistent {
        conclusions.push("inconsistent verdicts: an implication with certified premises has a failing conclusion".into());
    }
    Ok(PipelineReport { point: z.to_vec(), nodes: g.nodes, edges: g.edges, verdicts, conclusions, consistent })
}

/// Declares `z̄` a global minimizer when the data are convex and some
/// M-stationarity notion holds. The returned verdict carries the notion that
/// held; `holds` is false when none does.
pub fn convex_sufficiency<S: Scalar>(program: &ImplicitProgram<S>, z: &[S]) -> Result<Verdict<S>> {
    if !program.is_convex() {
        return Err(Error::pre(
            "convex sufficiency needs single-piece gph F, gph G and M and a convex objective",
        ));
    }
    let session = Session::new(program, z)?;
    let mut last = None;
    for kind in [CheckKind::Implicit, CheckKind::Explicit, CheckKind::Fuzzy] {
        let mut v = session.check(kind, None)?;
        if v.holds {
            v.certify(anchors::CONVEX_SUFFICIENCY, "z̄ is a global minimizer");
            return Ok(v);
        }
        last = Some(v);
    }
    Ok(last.expect("three notions checked"))
}

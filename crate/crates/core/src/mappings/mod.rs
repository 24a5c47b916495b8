//! Polyhedral set-valued mappings given by their graphs, with coderivatives
//! and the calculus rules used by the stationarity engine.

mod calculus;
mod coderivative;

pub use calculus::{
    chain_rule_bound, compose, product, product_report, product_sum_bound, same_coderivative, sigma_subregularity_check,
    ChainRuleReport, Composition, ProductReport, SigmaReport,
};
pub(crate) use calculus::slice_pieces;
pub use coderivative::{Criterion, CoderivativeGraph};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{project_union_onto, ConvexPolyhedron, PolyUnion, PolyUnionDto, MAX_DIM};
use crate::linalg;
use crate::scalar::{format_vector, Scalar};
use crate::system::DisjunctiveSystem;

/// Named certificate anchors attached to verdicts.
pub mod anchors {
    pub const POLYHEDRAL_SUBREGULARITY: &str = "robinson-polyhedral-subregularity";
    pub const MORDUKHOVICH_AUBIN: &str = "mordukhovich-criterion-aubin";
    pub const MORDUKHOVICH_METRIC_REGULARITY: &str = "mordukhovich-criterion-metric-regularity";
    pub const LOCAL_BOUNDEDNESS: &str = "local-boundedness-inner-semicompactness";
    pub const PRODUCT_QUALIFICATION: &str = "product-rule-qualification";
    pub const PRODUCT_POLYHEDRAL: &str = "product-rule-polyhedral";
    pub const SHIFTED_IDENTITY_PRODUCT: &str = "product-rule-shifted-identity-equality";
    pub const DECOUPLED_PRODUCT: &str = "product-rule-decoupled-equality";
    pub const RANGE_INTERSECTION: &str = "range-intersection-product-subregularity";
    pub const CHAIN_RULE: &str = "coderivative-chain-rule";
    pub const SUBREGULARITY_NECESSARY: &str = "subregularity-necessary-m-stationarity";
    pub const CQ_BRANCHES: &str = "cq-branches-explicit-m-stationarity";
    pub const IMPLICIT_TO_FUZZY: &str = "implicit-to-fuzzy-via-feasibility-map";
    pub const AUX_MAP_ROUTE: &str = "implicit-to-explicit-via-auxiliary-map";
    pub const INCLUSION_FUZZY_EXPLICIT: &str = "inclusion-fuzzy-to-explicit";
    pub const STRONG_CQ_INCLUSION: &str = "strong-cq-implies-inclusion";
    pub const STRUCTURED_IMPLICIT_TO_EXPLICIT: &str = "structured-implicit-to-explicit";
    pub const STRUCTURED_INCLUSION_EQUALITY: &str = "structured-inclusion-equality";
    pub const CONVEX_SUFFICIENCY: &str = "convex-sufficiency-global-minimizer";
    pub const SUBOPTIMALITY: &str = "failed-necessary-condition-not-local-minimizer";
}

/// A set-valued map `ℝ^n_in ⇉ ℝ^n_out` with polyhedral graph, input
/// coordinates first. Polyhedral maps are metrically subregular at every
/// point of their graph, so no numerical subregularity test is needed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyMapping<S> {
    n_in: usize,
    n_out: usize,
    graph: PolyUnion<S>,
}

impl<S: Scalar> PolyMapping<S> {
    pub fn new(n_in: usize, n_out: usize, graph: PolyUnion<S>) -> Result<Self> {
        if graph.dim() != n_in + n_out {
            return Err(Error::dim(format!("graph of dim {} for map {n_in} → {n_out}", graph.dim())));
        }
        if graph.dim() > MAX_DIM {
            return Err(Error::Resource(format!("graph dimension {} exceeds {MAX_DIM}", graph.dim())));
        }
        Ok(PolyMapping { n_in, n_out, graph })
    }

    /// `z ↦ {Az + c}`.
    pub fn affine(a: &[Vec<S>], c: &[S], n_in: usize) -> Result<Self> {
        let n_out = c.len();
        let mut p = ConvexPolyhedron::universe(n_in + n_out);
        for i in 0..n_out {
            let mut row: Vec<S> = a[i].iter().map(|x| -x.clone()).collect();
            if row.len() != n_in {
                return Err(Error::dim("affine map matrix shape"));
            }
            row.extend((0..n_out).map(|j| if i == j { S::one() } else { S::zero() }));
            p.push_eq(row, c[i].clone());
        }
        Self::new(n_in, n_out, PolyUnion::single(p))
    }

    pub fn identity(n: usize) -> Self {
        Self::affine(&linalg::identity(n), &vec![S::zero(); n], n).expect("identity")
    }

    /// `z ↦ set` for every `z`.
    pub fn constant(n_in: usize, set: &PolyUnion<S>) -> Result<Self> {
        let graph = PolyUnion::single(ConvexPolyhedron::universe(n_in)).product(set)?;
        Self::new(n_in, set.dim(), graph)
    }

    /// `z ↦ Az + c − set`.
    pub fn affine_minus_set(a: &[Vec<S>], c: &[S], set: &PolyUnion<S>) -> Result<Self> {
        let n_in = a.first().map_or(0, |r| r.len());
        let n_out = c.len();
        // w = Az + c − θ with θ ∈ set  ⟺  Az + c − w ∈ set
        let mut t = vec![vec![S::zero(); n_in + n_out]; n_out];
        for i in 0..n_out {
            for j in 0..n_in {
                t[i][j] = a[i][j].clone();
            }
            t[i][n_in + i] = -S::one();
        }
        let graph = set.pullback(n_in + n_out, &t, Some(c))?;
        Self::new(n_in, n_out, graph)
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }
    pub fn n_out(&self) -> usize {
        self.n_out
    }
    pub fn graph(&self) -> &PolyUnion<S> {
        &self.graph
    }

    pub fn contains(&self, z: &[S], w: &[S]) -> bool {
        let mut x = z.to_vec();
        x.extend_from_slice(w);
        self.graph.contains(&x)
    }

    /// `{w : (z, w) ∈ gph}`, possibly empty.
    pub fn image_at(&self, z: &[S]) -> Result<PolyUnion<S>> {
        if z.len() != self.n_in {
            return Err(Error::dim(format!("input of length {} for map with n_in {}", z.len(), self.n_in)));
        }
        let t = linalg::block_selector(self.n_in, self.n_out, self.n_in + self.n_out);
        let t = linalg::transpose(&t, self.n_in + self.n_out);
        let mut shift = z.to_vec();
        shift.extend(std::iter::repeat(S::zero()).take(self.n_out));
        self.graph.pullback(self.n_out, &t, Some(&shift))
    }

    pub fn in_domain(&self, z: &[S]) -> Result<bool> {
        Ok(!self.image_at(z)?.is_empty())
    }

    pub fn domain(&self) -> Result<PolyUnion<S>> {
        let keep: Vec<usize> = (0..self.n_in).collect();
        project_union_onto(&self.graph, &keep)
    }

    pub fn inverse(&self) -> Self {
        let n = self.n_in + self.n_out;
        let mut order: Vec<usize> = (self.n_in..n).collect();
        order.extend(0..self.n_in);
        // new coordinates (w, z); old = T·new
        let mut t = vec![vec![S::zero(); n]; n];
        for (new_pos, &old) in order.iter().enumerate() {
            t[old][new_pos] = S::one();
        }
        let graph = self.graph.pullback(n, &t, None).expect("square shape");
        PolyMapping { n_in: self.n_out, n_out: self.n_in, graph }
    }

    fn require_on_graph(&self, z: &[S], w: &[S]) -> Result<()> {
        if z.len() != self.n_in || w.len() != self.n_out {
            return Err(Error::dim("base point dimensions"));
        }
        if !self.contains(z, w) {
            return Err(Error::pre(format!("({}, {}) is not on the graph", format_vector(z), format_vector(w))));
        }
        Ok(())
    }

    /// Sufficient test for inner semicompactness: images are bounded near `z`.
    pub fn locally_bounded_at(&self, z: &[S]) -> Result<bool> {
        if !self.in_domain(z)? {
            return Err(Error::pre(format!("{} is not in the domain", format_vector(z))));
        }
        let n = self.n_in + self.n_out;
        for piece in self.graph.pieces() {
            let touches = piece
                .pullback(self.n_out, &linalg::transpose(&linalg::block_selector(self.n_in, self.n_out, n), n), Some(&pad(z, self.n_out)))?
                .feasible_point()
                .is_some();
            if !touches {
                continue;
            }
            let mut sys = DisjunctiveSystem::new(n);
            sys.add_polyhedron(&piece.recession_cone())?;
            for i in 0..self.n_in {
                sys.fix(i, S::zero());
            }
            let outputs: Vec<usize> = (self.n_in..n).collect();
            if sys.find_nonzero(&outputs).is_some() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(PolyMappingDto::from(self)).expect("serializable")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let dto: PolyMappingDto = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        dto.to_mapping()
    }
}

fn pad<S: Scalar>(z: &[S], extra: usize) -> Vec<S> {
    let mut v = z.to_vec();
    v.extend(std::iter::repeat(S::zero()).take(extra));
    v
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PolyMappingDto {
    pub n_in: usize,
    pub n_out: usize,
    pub graph: PolyUnionDto,
}

impl<S: Scalar> From<&PolyMapping<S>> for PolyMappingDto {
    fn from(m: &PolyMapping<S>) -> Self {
        PolyMappingDto { n_in: m.n_in, n_out: m.n_out, graph: PolyUnionDto::from(&m.graph) }
    }
}

impl PolyMappingDto {
    pub fn to_mapping<S: Scalar>(&self) -> Result<PolyMapping<S>> {
        PolyMapping::new(self.n_in, self.n_out, self.graph.to_union()?)
    }
}

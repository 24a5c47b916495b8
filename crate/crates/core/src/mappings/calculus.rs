use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{contains_union, hyperplanes_of, project_onto, project_out, strata_within, union_eq, ConvexPolyhedron, PolyUnion};
use crate::linalg;
use crate::mappings::{anchors, CoderivativeGraph, PolyMapping};
use crate::scalar::Scalar;
use crate::system::DisjunctiveSystem;

/// `S₂ ∘ S₁` together with the intermediate map `Ξ(z,w) = S₁(z) ∩ S₂⁻¹(w)`.
#[derive(Debug, Clone)]
pub struct Composition<S> {
    pub map: PolyMapping<S>,
    pub intermediate: PolyMapping<S>,
}

pub fn compose<S: Scalar>(s1: &PolyMapping<S>, s2: &PolyMapping<S>) -> Result<Composition<S>> {
    if s1.n_out() != s2.n_in() {
        return Err(Error::dim(format!("compose {} → {} with {} → {}", s1.n_in(), s1.n_out(), s2.n_in(), s2.n_out())));
    }
    let (n, k, m) = (s1.n_in(), s1.n_out(), s2.n_out());
    let total = n + k + m;
    let first = s1.graph().pullback(total, &linalg::block_selector(0, n + k, total), None)?;
    let second = s2.graph().pullback(total, &linalg::block_selector(n, k + m, total), None)?;
    let lifted = first.intersect(&second)?;
    let mid: Vec<usize> = (n..n + k).collect();
    let mut map_pieces = Vec::new();
    let mut xi_pieces = Vec::new();
    let mut order: Vec<usize> = (0..n).collect();
    order.extend(n + k..total);
    order.extend(n..n + k);
    for p in lifted.pieces() {
        map_pieces.push(project_out(p, &mid)?);
        xi_pieces.push(project_onto(p, &order)?);
    }
    let map = PolyMapping::new(n, m, PolyUnion::possibly_empty(n + m, map_pieces)?.simplify())?;
    let intermediate = PolyMapping::new(n + m, k, PolyUnion::possibly_empty(total, xi_pieces)?)?;
    Ok(Composition { map, intermediate })
}

/// `z ⇉ Γ₁(z) × Γ₂(z)`.
pub fn product<S: Scalar>(g1: &PolyMapping<S>, g2: &PolyMapping<S>) -> Result<PolyMapping<S>> {
    if g1.n_in() != g2.n_in() {
        return Err(Error::dim("product factors have different input dims"));
    }
    let (n, m1, m2) = (g1.n_in(), g1.n_out(), g2.n_out());
    let total = n + m1 + m2;
    let first = g1.graph().pullback(total, &linalg::block_selector(0, n + m1, total), None)?;
    let mut sel: Vec<usize> = (0..n).collect();
    sel.extend(n + m1..total);
    let second = g2.graph().pullback(total, &linalg::selector(&sel, total), None)?;
    PolyMapping::new(n, m1 + m2, first.intersect(&second)?)
}

#[derive(Debug, Clone, Serialize)]
pub struct ProductReport {
    /// `D*Γ₁(0) ∩ (−D*Γ₂(0)) = {0}`.
    pub qualification: bool,
    /// Both factors are polyhedral, which certifies the product-rule estimate on its own.
    pub polyhedral: bool,
    /// `D*Γ(ξ₁,ξ₂) ⊆ D*Γ₁(ξ₁) + D*Γ₂(ξ₂)` for all `(ξ₁,ξ₂)`.
    pub inclusion: bool,
    /// The inclusion holds with equality.
    pub equality: bool,
    pub certificates: Vec<String>,
}

/// Graph of `(η₁,η₂) ↦ D*Γ₁(η₁) + D*Γ₂(η₂)` over `(η₁, η₂, ξ)`.
pub fn product_sum_bound<S: Scalar>(cd1: &CoderivativeGraph<S>, cd2: &CoderivativeGraph<S>) -> Result<PolyUnion<S>> {
    let (m1, m2, n) = (cd1.n_out, cd2.n_out, cd1.n_in);
    // variables (η₁, η₂, ξ, ξ₁, ξ₂)
    let total = m1 + m2 + 3 * n;
    let (eta1, eta2, xi, xi1, xi2) = (0, m1, m1 + m2, m1 + m2 + n, m1 + m2 + 2 * n);
    let mut sys = DisjunctiveSystem::new(total);
    let c1: Vec<(usize, bool)> = (eta1..eta1 + m1).chain(xi1..xi1 + n).map(|i| (i, false)).collect();
    sys.add_block_on(&c1, &cd1.cone)?;
    let c2: Vec<(usize, bool)> = (eta2..eta2 + m2).chain(xi2..xi2 + n).map(|i| (i, false)).collect();
    sys.add_block_on(&c2, &cd2.cone)?;
    sys.add_linear_identity(n, &[(S::one(), xi), (-S::one(), xi1), (-S::one(), xi2)], &vec![S::zero(); n]);
    let keep: Vec<usize> = (0..m1 + m2 + n).collect();
    sys.solution_union(&keep)
}

pub fn product_report<S: Scalar>(
    g1: &PolyMapping<S>,
    g2: &PolyMapping<S>,
    z: &[S],
    w1: &[S],
    w2: &[S],
) -> Result<ProductReport> {
    let cd1 = g1.coderivative_graph(z, w1)?;
    let cd2 = g2.coderivative_graph(z, w2)?;
    let qualification = opposite_intersection_trivial(&cd1, &cd2, true)?;
    let gamma = product(g1, g2)?;
    let mut w = w1.to_vec();
    w.extend_from_slice(w2);
    let lhs = gamma.coderivative_graph(z, &w)?;
    let rhs = product_sum_bound(&cd1, &cd2)?;
    let inclusion = contains_union(&lhs.cone, &rhs)?;
    let equality = inclusion && contains_union(&rhs, &lhs.cone)?;
    let mut certificates = vec![anchors::PRODUCT_POLYHEDRAL.to_string()];
    if qualification {
        certificates.push(anchors::PRODUCT_QUALIFICATION.to_string());
    }
    Ok(ProductReport { qualification, polyhedral: true, inclusion, equality, certificates })
}

/// Whether `A ∩ (−B) = {0}` where `A`, `B` are either the zero slices
/// (`zero_slice`) or the ranges of the two coderivatives.
fn opposite_intersection_trivial<S: Scalar>(cd1: &CoderivativeGraph<S>, cd2: &CoderivativeGraph<S>, zero_slice: bool) -> Result<bool> {
    Ok(opposite_intersection_witness(cd1, cd2, zero_slice)?.is_none())
}

fn opposite_intersection_witness<S: Scalar>(
    cd1: &CoderivativeGraph<S>,
    cd2: &CoderivativeGraph<S>,
    zero_slice: bool,
) -> Result<Option<Vec<S>>> {
    let (m1, m2, n) = (cd1.n_out, cd2.n_out, cd1.n_in);
    // variables (η₁, ξ, η₂)
    let total = m1 + n + m2;
    let mut sys = DisjunctiveSystem::new(total);
    let c1: Vec<(usize, bool)> = (0..m1 + n).map(|i| (i, false)).collect();
    sys.add_block_on(&c1, &cd1.cone)?;
    let c2: Vec<(usize, bool)> = (m1 + n..total).map(|i| (i, false)).chain((m1..m1 + n).map(|i| (i, true))).collect();
    sys.add_block_on(&c2, &cd2.cone)?;
    if zero_slice {
        for i in (0..m1).chain(m1 + n..total) {
            sys.fix(i, S::zero());
        }
    }
    let xi: Vec<usize> = (m1..m1 + n).collect();
    Ok(sys.find_nonzero(&xi).map(|p| p[m1..m1 + n].to_vec()))
}

#[derive(Debug, Clone, Serialize)]
pub struct SigmaReport {
    /// `rge D*Γ₁ ∩ (−rge D*Γ₂) = {0}`.
    pub range_condition: bool,
    /// A nonzero common element when the range condition fails.
    pub witness: Option<Vec<String>>,
    /// Each factor is polyhedral, hence subregular.
    pub factors_subregular: bool,
    /// The product `Γ` is certified metrically subregular.
    pub product_subregular: bool,
    pub certificates: Vec<String>,
}

pub fn sigma_subregularity_check<S: Scalar>(
    g1: &PolyMapping<S>,
    g2: &PolyMapping<S>,
    z: &[S],
    w1: &[S],
    w2: &[S],
) -> Result<SigmaReport> {
    let cd1 = g1.coderivative_graph(z, w1)?;
    let cd2 = g2.coderivative_graph(z, w2)?;
    let witness = opposite_intersection_witness(&cd1, &cd2, false)?;
    let range_condition = witness.is_none();
    let mut certificates = vec![anchors::POLYHEDRAL_SUBREGULARITY.to_string()];
    if range_condition {
        certificates.push(anchors::RANGE_INTERSECTION.to_string());
    }
    Ok(SigmaReport {
        range_condition,
        witness: witness.map(|w| crate::scalar::to_strings(&w)),
        factors_subregular: true,
        // the product of polyhedral maps is itself polyhedral
        product_subregular: true,
        certificates,
    })
}

/// Representatives of the strata of `region`, refined by the hyperplanes of
/// the `defining` pieces.
pub(crate) fn region_representatives<S: Scalar>(defining: &[ConvexPolyhedron<S>], region: &PolyUnion<S>) -> Vec<Vec<S>> {
    let hs = hyperplanes_of(defining);
    strata_within(&hs, region).into_iter().map(|s| s.representative).collect()
}

/// Slices every piece of `g` at a fixed block of coordinates, leaving the
/// remaining ones free: returns pieces over the free coordinates.
pub(crate) fn slice_pieces<S: Scalar>(
    g: &PolyUnion<S>,
    free: &[usize],
    fixed: &[(usize, S)],
) -> Result<Vec<ConvexPolyhedron<S>>> {
    let n = g.dim();
    let mut t = vec![vec![S::zero(); free.len()]; n];
    for (j, &c) in free.iter().enumerate() {
        t[c][j] = S::one();
    }
    let mut shift = vec![S::zero(); n];
    for (c, v) in fixed {
        shift[*c] = v.clone();
    }
    g.pieces().iter().map(|p| p.pullback(free.len(), &t, Some(&shift))).collect()
}

#[derive(Debug, Clone)]
pub struct ChainRuleReport<S> {
    /// `{(w*, z*) : z* ∈ D*(S₂∘S₁)(z̄,w̄)(w*)}`.
    pub lhs: PolyUnion<S>,
    /// `⋃_ȳ (D*S₁(z̄,ȳ) ∘ D*S₂(ȳ,w̄))` as a graph over `(w*, z*)`.
    pub rhs: PolyUnion<S>,
    pub holds: bool,
    pub intermediate_locally_bounded: bool,
    pub representatives: Vec<Vec<S>>,
    pub certificates: Vec<String>,
}

/// Computes both sides of the coderivative chain rule at `(z̄, w̄)`.
/// `Ξ(z̄,w̄)` is covered by finitely many strata on which both coderivatives
/// are constant, so the union on the right is finite.
pub fn chain_rule_bound<S: Scalar>(s1: &PolyMapping<S>, s2: &PolyMapping<S>, z: &[S], w: &[S]) -> Result<ChainRuleReport<S>> {
    let comp = compose(s1, s2)?;
    let lhs = comp.map.coderivative_graph(z, w)?.cone;
    let mut zw = z.to_vec();
    zw.extend_from_slice(w);
    let region = comp.intermediate.image_at(&zw)?;
    let (n, k, m) = (s1.n_in(), s1.n_out(), s2.n_out());
    let fixed1: Vec<(usize, S)> = z.iter().cloned().enumerate().collect();
    let mut defining = slice_pieces(s1.graph(), &(n..n + k).collect::<Vec<_>>(), &fixed1)?;
    let fixed2: Vec<(usize, S)> = w.iter().cloned().enumerate().map(|(i, v)| (k + i, v)).collect();
    defining.extend(slice_pieces(s2.graph(), &(0..k).collect::<Vec<_>>(), &fixed2)?);
    let region_pieces: Vec<ConvexPolyhedron<S>> = {
        let a = slice_pieces(s1.graph(), &(n..n + k).collect::<Vec<_>>(), &fixed1)?;
        let b = slice_pieces(s2.graph(), &(0..k).collect::<Vec<_>>(), &fixed2)?;
        let mut out = Vec::new();
        for p in &a {
            for q in &b {
                out.push(p.intersect(q)?);
            }
        }
        out
    };
    let raw_region = PolyUnion::possibly_empty(k, region_pieces)?;
    debug_assert_eq!(raw_region.is_empty(), region.is_empty());
    let reps = region_representatives(&defining, &raw_region);
    let mut rhs = PolyUnion::empty(m + n);
    for y in &reps {
        let cd2 = s2.coderivative_graph(y, w)?;
        let cd1 = s1.coderivative_graph(z, y)?;
        // variables (w*, y*, z*)
        let mut sys = DisjunctiveSystem::new(m + k + n);
        let c2: Vec<(usize, bool)> = (0..m + k).map(|i| (i, false)).collect();
        sys.add_block_on(&c2, &cd2.cone)?;
        let c1: Vec<(usize, bool)> = (m..m + k + n).map(|i| (i, false)).collect();
        sys.add_block_on(&c1, &cd1.cone)?;
        let keep: Vec<usize> = (0..m).chain(m + k..m + k + n).collect();
        rhs = rhs.union_with(&sys.solution_union(&keep)?)?;
    }
    let rhs = rhs.simplify();
    let holds = contains_union(&lhs, &rhs)?;
    let intermediate_locally_bounded = comp.intermediate.locally_bounded_at(&zw)?;
    let mut certificates = vec![anchors::POLYHEDRAL_SUBREGULARITY.to_string()];
    if intermediate_locally_bounded {
        certificates.push(anchors::LOCAL_BOUNDEDNESS.to_string());
        certificates.push(anchors::CHAIN_RULE.to_string());
    }
    Ok(ChainRuleReport { lhs, rhs, holds, intermediate_locally_bounded, representatives: reps, certificates })
}

/// Set equality of two coderivative graphs.
pub fn same_coderivative<S: Scalar>(a: &PolyUnion<S>, b: &PolyUnion<S>) -> Result<bool> {
    union_eq(a, b)
}

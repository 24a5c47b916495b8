use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::{limiting_normal_cone, project_union_onto, PolyUnion};
use crate::mappings::PolyMapping;
use crate::scalar::Scalar;
use crate::system::DisjunctiveSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    Aubin,
    MetricRegularity,
}

/// The graph `{(η, ξ) : ξ ∈ D*Υ(z̄,w̄)(η)}` of a coderivative, a union of
/// cones in `ℝ^{n_out} × ℝ^{n_in}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoderivativeGraph<S> {
    pub n_in: usize,
    pub n_out: usize,
    pub cone: PolyUnion<S>,
}

impl<S: Scalar> PolyMapping<S> {
    /// Computes the limiting normal cone to the graph once and reorders it
    /// into coderivative coordinates.
    pub fn coderivative_graph(&self, z: &[S], w: &[S]) -> Result<CoderivativeGraph<S>> {
        self.require_on_graph(z, w)?;
        let mut x = z.to_vec();
        x.extend_from_slice(w);
        let normal = limiting_normal_cone(&self.graph, &x)?;
        // (ξ, −η) ∈ N  with new coordinates (η, ξ)
        let n = self.n_in + self.n_out;
        let mut t = vec![vec![S::zero(); n]; n];
        for i in 0..self.n_in {
            t[i][self.n_out + i] = S::one();
        }
        for j in 0..self.n_out {
            t[self.n_in + j][j] = -S::one();
        }
        let cone = normal.pullback(n, &t, None)?;
        Ok(CoderivativeGraph { n_in: self.n_in, n_out: self.n_out, cone })
    }

    pub fn coderivative_at(&self, z: &[S], w: &[S], eta: &[S]) -> Result<PolyUnion<S>> {
        self.coderivative_graph(z, w)?.apply(eta)
    }

    pub fn criterion_check(&self, z: &[S], w: &[S], kind: Criterion) -> Result<bool> {
        let g = self.coderivative_graph(z, w)?;
        Ok(match kind {
            Criterion::Aubin => g.aubin(),
            Criterion::MetricRegularity => g.kernel_trivial(),
        })
    }
}

impl<S: Scalar> CoderivativeGraph<S> {
    pub fn dim(&self) -> usize {
        self.n_in + self.n_out
    }

    /// `D*Υ(z̄,w̄)(η)` as a set of `ξ`, possibly empty.
    pub fn apply(&self, eta: &[S]) -> Result<PolyUnion<S>> {
        let n = self.dim();
        let mut t = vec![vec![S::zero(); self.n_in]; n];
        for i in 0..self.n_in {
            t[self.n_out + i][i] = S::one();
        }
        let mut shift = eta.to_vec();
        shift.extend(std::iter::repeat(S::zero()).take(self.n_in));
        Ok(self.cone.pullback(self.n_in, &t, Some(&shift))?.simplify())
    }

    pub fn contains(&self, eta: &[S], xi: &[S]) -> bool {
        let mut x = eta.to_vec();
        x.extend_from_slice(xi);
        self.cone.contains(&x)
    }

    fn system(&self) -> DisjunctiveSystem<S> {
        let n = self.dim();
        let mut sys = DisjunctiveSystem::new(n);
        let coords: Vec<(usize, bool)> = (0..n).map(|i| (i, false)).collect();
        sys.add_block_on(&coords, &self.cone).expect("matching dims");
        sys
    }

    /// A nonzero `ξ ∈ D*Υ(0)`, if any.
    pub fn aubin_violation(&self) -> Option<Vec<S>> {
        let mut sys = self.system();
        for j in 0..self.n_out {
            sys.fix(j, S::zero());
        }
        let xi: Vec<usize> = (self.n_out..self.dim()).collect();
        sys.find_nonzero(&xi).map(|p| p[self.n_out..].to_vec())
    }

    /// Aubin property by the Mordukhovich criterion: `D*Υ(0) = {0}`.
    pub fn aubin(&self) -> bool {
        self.aubin_violation().is_none()
    }

    /// A nonzero `η` with `0 ∈ D*Υ(η)`, if any.
    pub fn kernel_violation(&self) -> Option<Vec<S>> {
        let mut sys = self.system();
        for j in self.n_out..self.dim() {
            sys.fix(j, S::zero());
        }
        let eta: Vec<usize> = (0..self.n_out).collect();
        sys.find_nonzero(&eta).map(|p| p[..self.n_out].to_vec())
    }

    /// Metric regularity by the Mordukhovich criterion: `ker D*Υ = {0}`.
    pub fn kernel_trivial(&self) -> bool {
        self.kernel_violation().is_none()
    }

    /// `rge D*Υ = ⋃_η D*Υ(η)`.
    pub fn range(&self) -> Result<PolyUnion<S>> {
        let keep: Vec<usize> = (self.n_out..self.dim()).collect();
        Ok(project_union_onto(&self.cone, &keep)?.simplify())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ConvexPolyhedron;
    use crate::scalar::rat;
    use num::BigRational;

    type P = ConvexPolyhedron<BigRational>;

    fn v(xs: &[i64]) -> Vec<BigRational> {
        xs.iter().map(|&x| rat(x, 1)).collect()
    }

    #[test]
    fn affine_coderivative_is_transpose() {
        let a = vec![v(&[1, 2]), v(&[0, 3])];
        let h = PolyMapping::affine(&a, &v(&[1, 1]), 2).unwrap();
        let z = v(&[1, 1]);
        let w = v(&[4, 4]);
        let d = h.coderivative_at(&z, &w, &v(&[1, -1])).unwrap();
        // Aᵀη = (1, 2 − 3)
        assert_eq!(d.pieces().len(), 1);
        assert!(d.pieces()[0].set_eq(&P::point(&v(&[1, -1]))));
        assert!(h.criterion_check(&z, &w, Criterion::MetricRegularity).unwrap());
        assert!(h.criterion_check(&z, &w, Criterion::Aubin).unwrap());
    }

    #[test]
    fn constant_map_has_aubin_but_not_metric_regularity() {
        let h = PolyMapping::constant(1, &PolyUnion::single(P::origin(1))).unwrap();
        assert!(h.criterion_check(&v(&[3]), &v(&[0]), Criterion::Aubin).unwrap());
        assert!(!h.criterion_check(&v(&[3]), &v(&[0]), Criterion::MetricRegularity).unwrap());
    }

    #[test]
    fn normal_cone_map_lacks_aubin() {
        // a ⇉ N̂_{ℝ₋}(a): graph (ℝ₋×{0}) ∪ ({0}×ℝ₊)
        let g = PolyUnion::new(
            2,
            vec![
                P::universe(2).with_ineq(v(&[1, 0]), rat(0, 1)).with_eq(v(&[0, 1]), rat(0, 1)),
                P::universe(2).with_ineq(v(&[0, -1]), rat(0, 1)).with_eq(v(&[1, 0]), rat(0, 1)),
            ],
        )
        .unwrap();
        let m = PolyMapping::new(1, 1, g).unwrap();
        assert!(!m.criterion_check(&v(&[0]), &v(&[0]), Criterion::Aubin).unwrap());
    }
}

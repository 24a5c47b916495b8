//! Disjunctive linear systems: a base polyhedron intersected with one piece
//! from each of several unions, all over a common variable vector.
//!
//! Stationarity conditions and constraint qualifications are all of this
//! form once every normal cone is expanded into its pieces.

use crate::error::{Error, Result};
use crate::geometry::{project_onto, ConvexPolyhedron, PolyUnion};
use crate::lp::LpOutcome;
use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub struct DisjunctiveSystem<S> {
    nvars: usize,
    base: ConvexPolyhedron<S>,
    blocks: Vec<PolyUnion<S>>,
}

impl<S: Scalar> DisjunctiveSystem<S> {
    pub fn new(nvars: usize) -> Self {
        DisjunctiveSystem { nvars, base: ConvexPolyhedron::universe(nvars), blocks: Vec::new() }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn add_eq(&mut self, row: Vec<S>, rhs: S) {
        self.base.push_eq(row, rhs);
    }

    pub fn add_ineq(&mut self, row: Vec<S>, rhs: S) {
        self.base.push_ineq(row, rhs);
    }

    pub fn fix(&mut self, var: usize, value: S) {
        let mut row = vec![S::zero(); self.nvars];
        row[var] = S::one();
        self.base.push_eq(row, value);
    }

    /// Requires `Σ coeffs[k]·v[vars_k[i]] = rhs[i]` for every `i`, where
    /// `terms` pairs a coefficient with the first index of a variable block.
    pub fn add_linear_identity(&mut self, len: usize, terms: &[(S, usize)], rhs: &[S]) {
        for i in 0..len {
            let mut row = vec![S::zero(); self.nvars];
            for (c, start) in terms {
                row[start + i] = row[start + i].clone() + c;
            }
            self.base.push_eq(row, rhs[i].clone());
        }
    }

    /// Requires `T v ∈ u`, with `t` having `u.dim()` rows.
    pub fn add_block(&mut self, t: &[Vec<S>], u: &PolyUnion<S>) -> Result<()> {
        let pulled = u.pullback(self.nvars, t, None)?;
        self.blocks.push(pulled);
        Ok(())
    }

    /// Requires `(v[c] for c in coords) ∈ u`; a coordinate may be given
    /// with a negative sign through `negate`.
    pub fn add_block_on(&mut self, coords: &[(usize, bool)], u: &PolyUnion<S>) -> Result<()> {
        if coords.len() != u.dim() {
            return Err(Error::dim(format!("{} coordinates for a set of dim {}", coords.len(), u.dim())));
        }
        let mut t = vec![vec![S::zero(); self.nvars]; coords.len()];
        for (i, &(c, negate)) in coords.iter().enumerate() {
            t[i][c] = if negate { -S::one() } else { S::one() };
        }
        self.add_block(&t, u)
    }

    pub fn add_polyhedron(&mut self, p: &ConvexPolyhedron<S>) -> Result<()> {
        self.base = self.base.intersect(p)?;
        Ok(())
    }

    /// Visits every feasible piece combination until `visit` returns `Some`.
    fn search<T>(&self, visit: &mut dyn FnMut(&ConvexPolyhedron<S>) -> Option<T>) -> Option<T> {
        if self.base.is_empty() {
            return None;
        }
        self.descend(0, &self.base, visit)
    }

    fn descend<T>(&self, level: usize, acc: &ConvexPolyhedron<S>, visit: &mut dyn FnMut(&ConvexPolyhedron<S>) -> Option<T>) -> Option<T> {
        if level == self.blocks.len() {
            return visit(acc);
        }
        for piece in self.blocks[level].pieces() {
            let next = acc.intersect(piece).expect("same dim");
            if next.is_empty() {
                continue;
            }
            if let Some(t) = self.descend(level + 1, &next, visit) {
                return Some(t);
            }
        }
        None
    }

    /// Every feasible piece combination as a polyhedron in the variables.
    pub fn combinations(&self) -> Vec<ConvexPolyhedron<S>> {
        let mut out = Vec::new();
        self.search::<()>(&mut |p| {
            out.push(p.clone());
            None
        });
        out
    }

    pub fn find_solution(&self) -> Option<Vec<S>> {
        self.search(&mut |p| p.feasible_point())
    }

    /// A solution with some listed variable nonzero.
    pub fn find_nonzero(&self, vars: &[usize]) -> Option<Vec<S>> {
        self.search(&mut |p| nonzero_in(p, vars))
    }

    /// Projection of the solution set onto `keep`, in that order.
    pub fn solution_union(&self, keep: &[usize]) -> Result<PolyUnion<S>> {
        let pieces = self
            .combinations()
            .iter()
            .map(|p| project_onto(p, keep))
            .collect::<Result<Vec<_>>>()?;
        Ok(PolyUnion::possibly_empty(keep.len(), pieces)?.simplify())
    }
}

fn nonzero_in<S: Scalar>(p: &ConvexPolyhedron<S>, vars: &[usize]) -> Option<Vec<S>> {
    let n = p.dim();
    for &j in vars {
        for sign in [S::one(), -S::one()] {
            let mut obj = vec![S::zero(); n];
            obj[j] = sign.clone();
            match p.maximize(&obj) {
                LpOutcome::Optimal { point, value } if value.is_positive() => return Some(point),
                LpOutcome::Unbounded { .. } => {
                    let mut row = vec![S::zero(); n];
                    row[j] = -sign.clone();
                    let q = p.clone().with_ineq(row, -S::one());
                    if let Some(x) = q.feasible_point() {
                        return Some(x);
                    }
                }
                _ => {}
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use num::BigRational;

    type P = ConvexPolyhedron<BigRational>;

    fn v(xs: &[i64]) -> Vec<BigRational> {
        xs.iter().map(|&x| rat(x, 1)).collect()
    }

    #[test]
    fn axes_and_antidiagonal_meet_only_at_zero() {
        let axes = PolyUnion::new(
            2,
            vec![P::universe(2).with_eq(v(&[0, 1]), rat(0, 1)), P::universe(2).with_eq(v(&[1, 0]), rat(0, 1))],
        )
        .unwrap();
        let mut sys = DisjunctiveSystem::new(2);
        sys.add_block_on(&[(0, false), (1, false)], &axes).unwrap();
        sys.add_eq(v(&[1, 1]), rat(0, 1));
        assert!(sys.find_solution().is_some());
        assert!(sys.find_nonzero(&[0, 1]).is_none());
        sys.add_eq(v(&[1, 0]), rat(3, 1));
        assert!(sys.find_solution().is_none());
    }

    #[test]
    fn solution_union_projects_each_combination() {
        let axes = PolyUnion::new(
            2,
            vec![P::universe(2).with_eq(v(&[0, 1]), rat(0, 1)), P::universe(2).with_eq(v(&[1, 0]), rat(0, 1))],
        )
        .unwrap();
        let mut sys = DisjunctiveSystem::new(3);
        sys.add_block_on(&[(0, false), (1, false)], &axes).unwrap();
        sys.add_eq(v(&[1, 1, -1]), rat(0, 1));
        let u = sys.solution_union(&[2]).unwrap();
        assert_eq!(u.pieces().len(), 1);
        assert!(u.contains(&v(&[-7])));
    }
}

//! The two one-dimensional counterexamples on local minimizers.

use crate::error::Result;
use crate::geometry::{ConvexPolyhedron, PolyUnion};
use crate::mappings::PolyMapping;
use crate::scalar::Scalar;
use crate::stationarity::{ImplicitProgram, Objective, Structure};

use super::oracle::ProgramOracle;

/// `gph F = (ℝ₊×{0}) ∪ (ℝ₋×{1})`, `G(z,λ) = [−z−λ, ∞)`, `f(z) = z`, `M = ℝ`.
///
/// The feasible set is `[−1, ∞)` with minimizer `z = −1`, while `(0, 0)` is a
/// local minimizer once `λ` is explicit.
pub fn example_a<S: Scalar>() -> Result<ImplicitProgram<S>> {
    let one = S::one;
    let zero = S::zero;
    let right = ConvexPolyhedron::universe(2).with_ineq(vec![-one(), zero()], zero()).with_eq(vec![zero(), one()], zero());
    let left = ConvexPolyhedron::universe(2).with_ineq(vec![one(), zero()], zero()).with_eq(vec![zero(), one()], one());
    let f = PolyMapping::new(1, 1, PolyUnion::new(2, vec![right, left])?)?;
    let g_graph = ConvexPolyhedron::universe(3).with_ineq(vec![-one(), -one(), -one()], zero());
    let g = PolyMapping::new(2, 1, PolyUnion::single(g_graph))?;
    ImplicitProgram::new(
        Objective::linear(vec![one()]),
        f,
        g,
        PolyUnion::single(ConvexPolyhedron::universe(1)),
        Some(Structure::SmoothMinusSet),
    )
}

/// `F(z) = {0}` for `z ≥ 0` and `{−1/z}` for `z < 0`, `G(z,λ) = [−1, 1+z]`,
/// `f(z) = z`, `M = ℝ`. The graph of `F` is not polyhedral, so this program
/// is only available to the grid oracle; membership is decided exactly.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExampleB;

impl ExampleB {
    /// The single element of `F(z)`.
    pub fn f_value<S: Scalar>(&self, z: &S) -> S {
        if z.is_negative() {
            -(S::one() / z.clone())
        } else {
            S::zero()
        }
    }

    /// `K(z)`, empty for `z < −1`.
    pub fn k_value<S: Scalar>(&self, z: &S) -> Option<S> {
        (*z >= -S::one()).then(|| self.f_value(z))
    }
}

impl<S: Scalar> ProgramOracle<S> for ExampleB {
    fn n(&self) -> usize {
        1
    }
    fn m(&self) -> usize {
        1
    }
    fn objective_value(&self, z: &[S]) -> S {
        z[0].clone()
    }
    fn p_feasible(&self, z: &[S]) -> Result<bool> {
        Ok(self.k_value(&z[0]).is_some())
    }
    fn q_feasible(&self, z: &[S], lambda: &[S]) -> bool {
        let z = &z[0];
        // λ ∈ F(z) tested as zλ = −1 on the negative branch
        let in_f = if z.is_negative() { z.clone() * lambda[0].clone() == -S::one() } else { lambda[0].is_zero() };
        in_f && *z >= -S::one()
    }
}

//! Exact polyhedral geometry: convex polyhedra in H-representation, finite
//! unions of them, projection, cones and the stratification engine.

mod arrangement;
mod cones;
mod contains;
mod json;
mod polyhedron;
mod project;
mod union;

pub use arrangement::{hyperplanes_of, limiting_normal_cone, normal_strata, strata_within, Hyperplane, NormalStratum, Sign, Stratum};
pub use cones::{polar_cone, polar_of_piece, regular_normal_cone, tangent_cone};
pub use contains::{contains_union, find_uncovered, union_eq};
pub use json::{PolyUnionDto, PolyhedronDto};
pub use polyhedron::ConvexPolyhedron;
pub use project::{minkowski_sum, project_onto, project_out, project_union_onto, project_union_out};
pub use union::PolyUnion;

/// Largest ambient dimension accepted by the builders.
pub const MAX_DIM: usize = 40;
/// Largest number of pieces in a union.
pub const MAX_PIECES: usize = 256;

/// Convex polyhedral cone (a polyhedron with zero right-hand sides).
pub type PolyCone<S> = ConvexPolyhedron<S>;
/// Finite union of convex polyhedral cones.
pub type ConeUnion<S> = PolyUnion<S>;

/// Membership of a point in a union.
pub fn membership<S: crate::Scalar>(u: &PolyUnion<S>, x: &[S]) -> bool {
    u.contains(x)
}

/// Feasibility of a single polyhedron with an exact witness.
pub fn lp_feasible<S: crate::Scalar>(p: &ConvexPolyhedron<S>) -> Option<Vec<S>> {
    p.feasible_point()
}

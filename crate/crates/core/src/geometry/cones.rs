use crate::error::{Error, Result};
use crate::geometry::project::project_out;
use crate::geometry::{ConvexPolyhedron, PolyUnion};
use crate::scalar::{format_vector, Scalar};

pub(crate) fn require_member<S: Scalar>(u: &PolyUnion<S>, x: &[S]) -> Result<()> {
    if x.len() != u.dim() {
        return Err(Error::dim(format!("point of length {} for set of dim {}", x.len(), u.dim())));
    }
    if !u.contains(x) {
        return Err(Error::pre(format!("point {} is not in the set", format_vector(x))));
    }
    Ok(())
}

/// Bouligand tangent cone: the union of active-row cones of the pieces
/// containing `x`.
pub fn tangent_cone<S: Scalar>(u: &PolyUnion<S>, x: &[S]) -> Result<PolyUnion<S>> {
    require_member(u, x)?;
    let pieces: Vec<_> = u.pieces_containing(x).map(|p| p.tangent_cone_at(x)).collect();
    Ok(PolyUnion::new(u.dim(), pieces)?.simplify())
}

/// Polar of a convex cone `{d : Ad ≤ 0, Ed = 0}`, i.e. `cone(rows of A) + span(rows of E)`.
pub fn polar_of_piece<S: Scalar>(c: &ConvexPolyhedron<S>) -> Result<ConvexPolyhedron<S>> {
    let n = c.dim();
    let rows_a = c.a().len();
    let rows_e = c.e().len();
    if rows_a + rows_e == 0 {
        return Ok(ConvexPolyhedron::origin(n));
    }
    // coordinates (y, α, β): y = Aᵀα + Eᵀβ, α ≥ 0
    let total = n + rows_a + rows_e;
    let mut lifted = ConvexPolyhedron::universe(total);
    for j in 0..n {
        let mut row = vec![S::zero(); total];
        row[j] = S::one();
        for (i, r) in c.a().iter().enumerate() {
            row[n + i] = -r[j].clone();
        }
        for (i, r) in c.e().iter().enumerate() {
            row[n + rows_a + i] = -r[j].clone();
        }
        lifted.push_eq(row, S::zero());
    }
    for i in 0..rows_a {
        let mut row = vec![S::zero(); total];
        row[n + i] = -S::one();
        lifted.push_ineq(row, S::zero());
    }
    let elim: Vec<usize> = (n..total).collect();
    project_out(&lifted, &elim)
}

/// Polar of a union of cones: the intersection of the piece polars.
pub fn polar_cone<S: Scalar>(c: &PolyUnion<S>) -> Result<ConvexPolyhedron<S>> {
    if !c.is_cone() {
        return Err(Error::pre("polar_cone expects a union of cones"));
    }
    let mut out = ConvexPolyhedron::universe(c.dim());
    for p in c.pieces() {
        out = out.intersect(&polar_of_piece(p)?)?;
    }
    Ok(out.simplify())
}

/// Fréchet normal cone, the polar of the tangent cone.
pub fn regular_normal_cone<S: Scalar>(u: &PolyUnion<S>, x: &[S]) -> Result<ConvexPolyhedron<S>> {
    polar_cone(&tangent_cone(u, x)?)
}

//! Fourier–Motzkin projection.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::geometry::{ConvexPolyhedron, PolyUnion};
use crate::scalar::Scalar;

/// Eliminates `coords` from `p`. The result lives in the remaining
/// coordinates, in their original order.
pub fn project_out<S: Scalar>(p: &ConvexPolyhedron<S>, coords: &[usize]) -> Result<ConvexPolyhedron<S>> {
    let n = p.dim();
    let elim: HashSet<usize> = coords.iter().copied().collect();
    if elim.iter().any(|&c| c >= n) {
        return Err(Error::dim(format!("coordinate out of range for dim {n}")));
    }
    let out_dim = n - elim.len();
    if elim.is_empty() {
        return Ok(p.simplify());
    }
    let mut cur = p.simplify();
    if cur.is_empty() {
        return Ok(ConvexPolyhedron::empty(out_dim));
    }
    let mut pending: Vec<usize> = elim.iter().copied().collect();
    pending.sort_unstable();
    while !pending.is_empty() {
        // equalities first: substitution does not grow the system
        let by_eq = pending.iter().position(|&c| cur.e().iter().any(|r| !r[c].is_zero()));
        let pos = match by_eq {
            Some(pos) => pos,
            None => {
                // fewest generated rows
                let cost = |c: usize| {
                    let pos = cur.a().iter().filter(|r| r[c].is_positive()).count();
                    let neg = cur.a().iter().filter(|r| r[c].is_negative()).count();
                    pos * neg
                };
                (0..pending.len()).min_by_key(|&i| cost(pending[i])).expect("pending nonempty")
            }
        };
        let c = pending.remove(pos);
        cur = eliminate(&cur, c);
        cur = cur.simplify();
        if cur.is_empty() {
            return Ok(ConvexPolyhedron::empty(out_dim));
        }
    }
    Ok(cur.drop_free_coords(&elim))
}

/// Eliminates one coordinate, keeping the ambient dimension (column `c`
/// becomes zero).
fn eliminate<S: Scalar>(p: &ConvexPolyhedron<S>, c: usize) -> ConvexPolyhedron<S> {
    let n = p.dim();
    if let Some(k) = p.e().iter().position(|r| !r[c].is_zero()) {
        let piv_row = p.e()[k].clone();
        let piv_rhs = p.d()[k].clone();
        let piv = piv_row[c].clone();
        let subst = |row: &[S], rhs: &S| -> (Vec<S>, S) {
            if row[c].is_zero() {
                return (row.to_vec(), rhs.clone());
            }
            let f = row[c].clone() / &piv;
            let r: Vec<S> = row.iter().zip(&piv_row).map(|(x, y)| x.clone() - f.clone() * y).collect();
            (r, rhs.clone() - f * &piv_rhs)
        };
        let mut out = ConvexPolyhedron::universe(n);
        for (row, rhs) in p.a().iter().zip(p.b()) {
            let (r, b) = subst(row, rhs);
            out.push_ineq(r, b);
        }
        for (i, (row, rhs)) in p.e().iter().zip(p.d()).enumerate() {
            if i != k {
                let (r, d) = subst(row, rhs);
                out.push_eq(r, d);
            }
        }
        return out;
    }
    let mut out = ConvexPolyhedron::universe(n);
    for (row, rhs) in p.e().iter().zip(p.d()) {
        out.push_eq(row.clone(), rhs.clone());
    }
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for (row, rhs) in p.a().iter().zip(p.b()) {
        if row[c].is_zero() {
            out.push_ineq(row.clone(), rhs.clone());
        } else if row[c].is_positive() {
            pos.push((row, rhs));
        } else {
            neg.push((row, rhs));
        }
    }
    for (pr, pb) in &pos {
        for (nr, nb) in &neg {
            let wp = -nr[c].clone();
            let wn = pr[c].clone();
            let row: Vec<S> = pr.iter().zip(nr.iter()).map(|(x, y)| x.clone() * &wp + y.clone() * &wn).collect();
            let rhs = (*pb).clone() * &wp + (*nb).clone() * &wn;
            out.push_ineq(row, rhs);
        }
    }
    out
}

/// Keeps only `keep` (in the given order) by projecting out the rest.
pub fn project_onto<S: Scalar>(p: &ConvexPolyhedron<S>, keep: &[usize]) -> Result<ConvexPolyhedron<S>> {
    let n = p.dim();
    let elim: Vec<usize> = (0..n).filter(|c| !keep.contains(c)).collect();
    let projected = project_out(p, &elim)?;
    // reorder the kept coordinates
    let mut sorted = keep.to_vec();
    sorted.sort_unstable();
    if sorted.as_slice() == keep {
        return Ok(projected);
    }
    let k = keep.len();
    let mut t = vec![vec![S::zero(); k]; k];
    for (new_pos, &orig) in keep.iter().enumerate() {
        let sorted_pos = sorted.iter().position(|&x| x == orig).expect("kept coordinate");
        t[sorted_pos][new_pos] = S::one();
    }
    projected.pullback(k, &t, None)
}

pub fn project_union_out<S: Scalar>(u: &PolyUnion<S>, coords: &[usize]) -> Result<PolyUnion<S>> {
    let out_dim = u.dim() - coords.len();
    u.map_pieces(out_dim, |p| project_out(p, coords))
}

pub fn project_union_onto<S: Scalar>(u: &PolyUnion<S>, keep: &[usize]) -> Result<PolyUnion<S>> {
    u.map_pieces(keep.len(), |p| project_onto(p, keep))
}

/// Pairwise Minkowski sums of the pieces.
pub fn minkowski_sum<S: Scalar>(l: &PolyUnion<S>, r: &PolyUnion<S>) -> Result<PolyUnion<S>> {
    if l.dim() != r.dim() {
        return Err(Error::dim("Minkowski sum of different dims"));
    }
    let n = l.dim();
    let mut pieces = Vec::new();
    for p in l.pieces() {
        for q in r.pieces() {
            pieces.push(minkowski_pair(p, q)?);
        }
    }
    PolyUnion::possibly_empty(n, pieces)
}

fn minkowski_pair<S: Scalar>(p: &ConvexPolyhedron<S>, q: &ConvexPolyhedron<S>) -> Result<ConvexPolyhedron<S>> {
    let n = p.dim();
    // coordinates (x, u, v) with u ∈ p, v ∈ q, x = u + v
    let mut lifted = ConvexPolyhedron::universe(n).product(p).product(q);
    for i in 0..n {
        let mut row = vec![S::zero(); 3 * n];
        row[i] = S::one();
        row[n + i] = -S::one();
        row[2 * n + i] = -S::one();
        lifted.push_eq(row, S::zero());
    }
    let elim: Vec<usize> = (n..3 * n).collect();
    project_out(&lifted, &elim)
}

//! Exact union containment by adaptive cell refinement.

use crate::error::{Error, Result};
use crate::geometry::arrangement::{hyperplanes_of, Hyperplane, Sign};
use crate::geometry::{ConvexPolyhedron, PolyUnion};
use crate::lp::{self, LinearSystem, LpOutcome};
use crate::scalar::Scalar;

/// A piece of `L` cut by sign conditions on hyperplanes of `R`.
#[derive(Clone)]
struct Cell<S> {
    dim: usize,
    a: Vec<Vec<S>>,
    b: Vec<S>,
    strict: Vec<bool>,
    e: Vec<Vec<S>>,
    d: Vec<S>,
    fixed: Vec<bool>,
}

impl<S: Scalar> Cell<S> {
    fn sys(&self) -> LinearSystem<'_, S> {
        LinearSystem { dim: self.dim, a: &self.a, b: &self.b, e: &self.e, d: &self.d }
    }

    fn representative(&self) -> Option<Vec<S>> {
        match lp::max_min_slack(self.sys(), &self.strict) {
            Some((p, t)) if t.is_positive() => Some(p),
            _ => None,
        }
    }

    fn with_sign(&self, j: usize, h: &Hyperplane<S>, s: Sign) -> Cell<S> {
        let mut c = self.clone();
        c.fixed[j] = true;
        match s {
            Sign::Zero => {
                c.e.push(h.normal.clone());
                c.d.push(h.offset.clone());
            }
            Sign::Neg => {
                c.a.push(h.normal.clone());
                c.b.push(h.offset.clone());
                c.strict.push(true);
            }
            Sign::Pos => {
                c.a.push(h.normal.iter().map(|x| -x.clone()).collect());
                c.b.push(-h.offset.clone());
                c.strict.push(true);
            }
        }
        c
    }

    /// Closure of the cell lies in `q`.
    fn closure_inside(&self, q: &ConvexPolyhedron<S>) -> bool {
        let sys = self.sys();
        for (row, rhs) in q.a().iter().zip(q.b()) {
            match lp::maximize(sys, Some(row)) {
                LpOutcome::Optimal { value, .. } if value <= *rhs => {}
                _ => return false,
            }
        }
        for (row, rhs) in q.e().iter().zip(q.d()) {
            let neg: Vec<S> = row.iter().map(|x| -x.clone()).collect();
            let up = matches!(lp::maximize(sys, Some(row)), LpOutcome::Optimal { ref value, .. } if value == rhs);
            let down = matches!(lp::maximize(sys, Some(&neg)), LpOutcome::Optimal { ref value, .. } if -value.clone() == *rhs);
            if !(up && down) {
                return false;
            }
        }
        true
    }

    /// Signs of `h` attained on the cell, from the extent of `h` over its closure.
    fn signs_met(&self, h: &Hyperplane<S>) -> Vec<Sign> {
        let sys = self.sys();
        let neg: Vec<S> = h.normal.iter().map(|x| -x.clone()).collect();
        let sup = match lp::maximize(sys, Some(&h.normal)) {
            LpOutcome::Optimal { value, .. } => Some(value - &h.offset),
            _ => None,
        };
        let inf = match lp::maximize(sys, Some(&neg)) {
            LpOutcome::Optimal { value, .. } => Some(-value - &h.offset),
            _ => None,
        };
        let above = sup.as_ref().map_or(true, |v| v.is_positive());
        let below = inf.as_ref().map_or(true, |v| v.is_negative());
        let touches = sup.as_ref().map_or(true, |v| !v.is_negative()) && inf.as_ref().map_or(true, |v| !v.is_positive());
        let mut out = Vec::new();
        if below {
            out.push(Sign::Neg);
        }
        if touches {
            out.push(Sign::Zero);
        }
        if above {
            out.push(Sign::Pos);
        }
        out
    }
}

/// A point of `L` outside `R`, or `None` when `L ⊆ R`.
pub fn find_uncovered<S: Scalar>(l: &PolyUnion<S>, r: &PolyUnion<S>) -> Result<Option<Vec<S>>> {
    if l.dim() != r.dim() {
        return Err(Error::dim("containment between unions of different dims"));
    }
    let hyperplanes = hyperplanes_of(r.pieces());
    for piece in l.pieces() {
        let cell = Cell {
            dim: l.dim(),
            a: piece.a().to_vec(),
            b: piece.b().to_vec(),
            strict: vec![false; piece.a().len()],
            e: piece.e().to_vec(),
            d: piece.d().to_vec(),
            fixed: vec![false; hyperplanes.len()],
        };
        if let Some(w) = uncovered_in(cell, &hyperplanes, r) {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

fn uncovered_in<S: Scalar>(cell: Cell<S>, hyperplanes: &[Hyperplane<S>], r: &PolyUnion<S>) -> Option<Vec<S>> {
    let rep = cell.representative()?;
    for q in r.pieces() {
        if q.contains(&rep) && cell.closure_inside(q) {
            return None;
        }
    }
    for (j, h) in hyperplanes.iter().enumerate() {
        if cell.fixed[j] {
            continue;
        }
        let met = cell.signs_met(h);
        if met.len() > 1 {
            return met.into_iter().find_map(|s| uncovered_in(cell.with_sign(j, h, s), hyperplanes, r));
        }
    }
    // the cell is on one side of every hyperplane of R, so it is inside or
    // outside each piece as a whole
    if r.contains(&rep) {
        None
    } else {
        Some(rep)
    }
}

pub fn contains_union<S: Scalar>(l: &PolyUnion<S>, r: &PolyUnion<S>) -> Result<bool> {
    Ok(find_uncovered(l, r)?.is_none())
}

/// Set equality by mutual containment.
pub fn union_eq<S: Scalar>(l: &PolyUnion<S>, r: &PolyUnion<S>) -> Result<bool> {
    Ok(contains_union(l, r)? && contains_union(r, l)?)
}

//! Sign-vector strata of hyperplane arrangements and the limiting normal cone.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use crate::error::Result;
use crate::geometry::cones::{polar_cone, require_member};
use crate::geometry::{ConvexPolyhedron, PolyUnion};
use crate::lp::{self, LinearSystem};
use crate::scalar::{dot, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Neg,
    Zero,
    Pos,
}

impl Sign {
    pub fn of<S: Scalar>(v: &S) -> Sign {
        if v.is_negative() {
            Sign::Neg
        } else if v.is_zero() {
            Sign::Zero
        } else {
            Sign::Pos
        }
    }
}

/// `{x : normal · x = offset}`, stored with the first nonzero coefficient equal to one.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Hyperplane<S> {
    pub normal: Vec<S>,
    pub offset: S,
}

impl<S: Scalar> Hyperplane<S> {
    /// Canonical form of `row · x = rhs` and the factor `f` with
    /// `row = f · normal`. `None` for a zero row.
    pub fn canonical(row: &[S], rhs: &S) -> Option<(Hyperplane<S>, S)> {
        let lead = row.iter().find(|x| !x.is_zero())?.clone();
        let normal = row.iter().map(|x| x.clone() / &lead).collect();
        Some((Hyperplane { normal, offset: rhs.clone() / &lead }, lead))
    }

    pub fn side(&self, x: &[S]) -> Sign {
        Sign::of(&(dot(&self.normal, x) - &self.offset))
    }
}

/// A relatively open cell of an arrangement, with an exact interior point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stratum<S> {
    pub signs: Vec<Sign>,
    pub representative: Vec<S>,
}

impl<S: Scalar> Stratum<S> {
    /// The closure of the cell as a polyhedron.
    pub fn closure(&self, hyperplanes: &[Hyperplane<S>]) -> ConvexPolyhedron<S> {
        let dim = self.representative.len();
        let mut p = ConvexPolyhedron::universe(dim);
        for (h, s) in hyperplanes.iter().zip(&self.signs) {
            match s {
                Sign::Zero => p.push_eq(h.normal.clone(), h.offset.clone()),
                Sign::Neg => p.push_ineq(h.normal.clone(), h.offset.clone()),
                Sign::Pos => p.push_ineq(h.normal.iter().map(|x| -x.clone()).collect(), -h.offset.clone()),
            }
        }
        p
    }
}

/// Deduplicated hyperplanes supporting the rows of the given pieces.
pub fn hyperplanes_of<S: Scalar>(pieces: &[ConvexPolyhedron<S>]) -> Vec<Hyperplane<S>> {
    let mut set = std::collections::BTreeSet::new();
    for p in pieces {
        for (r, b) in p.a().iter().zip(p.b()).chain(p.e().iter().zip(p.d())) {
            if let Some((h, _)) = Hyperplane::canonical(r, b) {
                set.insert(h);
            }
        }
    }
    set.into_iter().collect()
}

/// Signs a piece allows on each hyperplane.
fn allowed_signs<S: Scalar>(piece: &ConvexPolyhedron<S>, hyperplanes: &[Hyperplane<S>]) -> Vec<Vec<Sign>> {
    let index: HashMap<&Hyperplane<S>, usize> = hyperplanes.iter().enumerate().map(|(i, h)| (h, i)).collect();
    let mut allowed = vec![vec![Sign::Neg, Sign::Zero, Sign::Pos]; hyperplanes.len()];
    for (r, b) in piece.a().iter().zip(piece.b()) {
        if let Some((h, f)) = Hyperplane::canonical(r, b) {
            let Some(&j) = index.get(&h) else { continue };
            // row ≤ rhs  ⟺  f·(n·x − o) ≤ 0
            let bad = if f.is_positive() { Sign::Pos } else { Sign::Neg };
            allowed[j].retain(|s| *s != bad);
        }
    }
    for (r, d) in piece.e().iter().zip(piece.d()) {
        if let Some((h, _)) = Hyperplane::canonical(r, d) {
            let Some(&j) = index.get(&h) else { continue };
            allowed[j].retain(|s| *s == Sign::Zero);
        }
    }
    allowed
}

struct OpenSystem<S> {
    dim: usize,
    a: Vec<Vec<S>>,
    b: Vec<S>,
    e: Vec<Vec<S>>,
    d: Vec<S>,
}

impl<S: Scalar> OpenSystem<S> {
    fn push(&mut self, h: &Hyperplane<S>, s: Sign) {
        match s {
            Sign::Zero => {
                self.e.push(h.normal.clone());
                self.d.push(h.offset.clone());
            }
            Sign::Neg => {
                self.a.push(h.normal.clone());
                self.b.push(h.offset.clone());
            }
            Sign::Pos => {
                self.a.push(h.normal.iter().map(|x| -x.clone()).collect());
                self.b.push(-h.offset.clone());
            }
        }
    }

    fn pop(&mut self, s: Sign) {
        if s == Sign::Zero {
            self.e.pop();
            self.d.pop();
        } else {
            self.a.pop();
            self.b.pop();
        }
    }

    /// Interior point of the relatively open system, if any.
    fn interior_point(&self) -> Option<Vec<S>> {
        let sys = LinearSystem { dim: self.dim, a: &self.a, b: &self.b, e: &self.e, d: &self.d };
        let strict = vec![true; self.a.len()];
        match lp::max_min_slack(sys, &strict) {
            Some((p, t)) if t.is_positive() => Some(p),
            _ => None,
        }
    }
}

/// All nonempty relatively open cells of the arrangement that lie inside
/// `region`. Every row of every region piece must be supported by one of
/// the hyperplanes.
pub fn strata_within<S: Scalar>(hyperplanes: &[Hyperplane<S>], region: &PolyUnion<S>) -> Vec<Stratum<S>> {
    let dim = region.dim();
    let per_piece: Vec<Vec<Stratum<S>>> = region
        .pieces()
        .par_iter()
        .map(|piece| {
            let allowed = allowed_signs(piece, hyperplanes);
            let mut out = Vec::new();
            let mut sys = OpenSystem { dim, a: Vec::new(), b: Vec::new(), e: Vec::new(), d: Vec::new() };
            let Some(start) = sys.interior_point() else { return out };
            let mut signs = Vec::with_capacity(hyperplanes.len());
            dfs(hyperplanes, &allowed, &mut sys, &mut signs, start, &mut out);
            out.retain(|s| piece.contains(&s.representative));
            out
        })
        .collect();
    let mut seen: BTreeMap<Vec<Sign>, Vec<S>> = BTreeMap::new();
    for s in per_piece.into_iter().flatten() {
        seen.entry(s.signs).or_insert(s.representative);
    }
    seen.into_iter().map(|(signs, representative)| Stratum { signs, representative }).collect()
}

fn dfs<S: Scalar>(
    hyperplanes: &[Hyperplane<S>],
    allowed: &[Vec<Sign>],
    sys: &mut OpenSystem<S>,
    signs: &mut Vec<Sign>,
    rep: Vec<S>,
    out: &mut Vec<Stratum<S>>,
) {
    let j = signs.len();
    if j == hyperplanes.len() {
        out.push(Stratum { signs: signs.clone(), representative: rep });
        return;
    }
    let h = &hyperplanes[j];
    let current = h.side(&rep);
    for &s in &allowed[j] {
        sys.push(h, s);
        let child = if s == current { Some(rep.clone()) } else { sys.interior_point() };
        if let Some(p) = child {
            signs.push(s);
            dfs(hyperplanes, allowed, sys, signs, p, out);
            signs.pop();
        }
        sys.pop(s);
    }
}

/// One stratum of the local model of a set around a point: a direction
/// `representative` in the stratum and the regular normal cone there.
#[derive(Debug, Clone)]
pub struct NormalStratum<S> {
    pub signs: Vec<Sign>,
    pub representative: Vec<S>,
    pub normal_cone: ConvexPolyhedron<S>,
}

/// Strata of the tangent model of `u` at `x` with their regular normal cones.
/// Points `x + t·representative` for small `t > 0` lie in `u` and carry the
/// listed regular normal cone.
pub fn normal_strata<S: Scalar>(u: &PolyUnion<S>, x: &[S]) -> Result<Vec<NormalStratum<S>>> {
    require_member(u, x)?;
    let local: Vec<ConvexPolyhedron<S>> = u.pieces_containing(x).map(|p| p.tangent_cone_at(x).simplify()).collect();
    let region = PolyUnion::new(u.dim(), local)?;
    let hyperplanes = hyperplanes_of(region.pieces());
    let strata = strata_within(&hyperplanes, &region);

    // the regular normal cone depends only on which local pieces contain the
    // point and which of their rows are active
    let signature = |d: &[S]| -> Vec<(usize, Vec<usize>)> {
        region
            .pieces()
            .iter()
            .enumerate()
            .filter(|(_, p)| p.contains(d))
            .map(|(i, p)| (i, p.active_rows(d)))
            .collect()
    };
    let keyed: Vec<_> = strata.into_iter().map(|s| (signature(&s.representative), s)).collect();
    let mut distinct: BTreeMap<Vec<(usize, Vec<usize>)>, Vec<S>> = BTreeMap::new();
    for (k, s) in &keyed {
        distinct.entry(k.clone()).or_insert_with(|| s.representative.clone());
    }
    let cones: Vec<(Vec<(usize, Vec<usize>)>, ConvexPolyhedron<S>)> = distinct
        .into_par_iter()
        .map(|(k, rep)| {
            let tangent: Vec<_> = k.iter().map(|(i, _)| region.pieces()[*i].tangent_cone_at(&rep)).collect();
            let t = PolyUnion::new(u.dim(), tangent)?;
            Ok((k, polar_cone(&t)?))
        })
        .collect::<Result<_>>()?;
    let cone_of: BTreeMap<_, _> = cones.into_iter().collect();
    Ok(keyed
        .into_iter()
        .map(|(k, s)| NormalStratum { signs: s.signs, representative: s.representative, normal_cone: cone_of[&k].clone() })
        .collect())
}

/// Mordukhovich normal cone by stratification of the local conic model.
pub fn limiting_normal_cone<S: Scalar>(u: &PolyUnion<S>, x: &[S]) -> Result<PolyUnion<S>> {
    let strata = normal_strata(u, x)?;
    let mut pieces: Vec<ConvexPolyhedron<S>> = Vec::new();
    for s in strata {
        if !pieces.contains(&s.normal_cone) {
            pieces.push(s.normal_cone);
        }
    }
    Ok(PolyUnion::new(u.dim(), pieces)?.simplify())
}

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::lp::{self, LinearSystem, LpOutcome};
use crate::scalar::{dot, Scalar};

/// `{x ∈ ℝ^dim : Ax ≤ b, Ex = d}` in exact arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConvexPolyhedron<S> {
    dim: usize,
    a: Matrix<S>,
    b: Vec<S>,
    e: Matrix<S>,
    d: Vec<S>,
}

impl<S: Scalar> ConvexPolyhedron<S> {
    pub fn new(dim: usize, a: Matrix<S>, b: Vec<S>, e: Matrix<S>, d: Vec<S>) -> Result<Self> {
        if a.len() != b.len() || e.len() != d.len() {
            return Err(Error::dim("row count differs from right-hand side length"));
        }
        if a.iter().chain(e.iter()).any(|r| r.len() != dim) {
            return Err(Error::dim(format!("row length differs from dim {dim}")));
        }
        Ok(ConvexPolyhedron { dim, a, b, e, d })
    }

    pub fn universe(dim: usize) -> Self {
        ConvexPolyhedron { dim, a: Vec::new(), b: Vec::new(), e: Vec::new(), d: Vec::new() }
    }

    /// The canonical empty set `{x : 0·x ≤ −1}`.
    pub fn empty(dim: usize) -> Self {
        ConvexPolyhedron { dim, a: vec![vec![S::zero(); dim]], b: vec![-S::one()], e: Vec::new(), d: Vec::new() }
    }

    pub fn point(x: &[S]) -> Self {
        let n = x.len();
        ConvexPolyhedron { dim: n, a: Vec::new(), b: Vec::new(), e: linalg::identity(n), d: x.to_vec() }
    }

    pub fn origin(dim: usize) -> Self {
        Self::point(&vec![S::zero(); dim])
    }

    /// `{x : lo ≤ x ≤ hi}` coordinatewise.
    pub fn boxed(lo: &[S], hi: &[S]) -> Self {
        let n = lo.len();
        let mut p = Self::universe(n);
        for i in 0..n {
            let mut up = vec![S::zero(); n];
            up[i] = S::one();
            p.push_ineq(up, hi[i].clone());
            let mut down = vec![S::zero(); n];
            down[i] = -S::one();
            p.push_ineq(down, -lo[i].clone());
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn a(&self) -> &[Vec<S>] {
        &self.a
    }
    pub fn b(&self) -> &[S] {
        &self.b
    }
    pub fn e(&self) -> &[Vec<S>] {
        &self.e
    }
    pub fn d(&self) -> &[S] {
        &self.d
    }

    pub fn push_ineq(&mut self, row: Vec<S>, rhs: S) {
        assert_eq!(row.len(), self.dim, "inequality row length");
        self.a.push(row);
        self.b.push(rhs);
    }

    pub fn push_eq(&mut self, row: Vec<S>, rhs: S) {
        assert_eq!(row.len(), self.dim, "equality row length");
        self.e.push(row);
        self.d.push(rhs);
    }

    pub fn with_ineq(mut self, row: Vec<S>, rhs: S) -> Self {
        self.push_ineq(row, rhs);
        self
    }

    pub fn with_eq(mut self, row: Vec<S>, rhs: S) -> Self {
        self.push_eq(row, rhs);
        self
    }

    pub fn system(&self) -> LinearSystem<'_, S> {
        LinearSystem { dim: self.dim, a: &self.a, b: &self.b, e: &self.e, d: &self.d }
    }

    pub fn num_rows(&self) -> usize {
        self.a.len() + self.e.len()
    }

    pub fn is_cone(&self) -> bool {
        self.b.iter().chain(self.d.iter()).all(|x| x.is_zero())
    }

    pub fn feasible_point(&self) -> Option<Vec<S>> {
        lp::feasible_point(self.system())
    }

    pub fn is_empty(&self) -> bool {
        self.feasible_point().is_none()
    }

    pub fn maximize(&self, objective: &[S]) -> LpOutcome<S> {
        lp::maximize(self.system(), Some(objective))
    }

    /// Supremum of `objective · x`; `None` when unbounded or empty.
    pub fn sup(&self, objective: &[S]) -> Option<S> {
        match self.maximize(objective) {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }

    pub fn contains(&self, x: &[S]) -> bool {
        x.len() == self.dim
            && self.a.iter().zip(&self.b).all(|(r, b)| dot(r, x) <= *b)
            && self.e.iter().zip(&self.d).all(|(r, d)| dot(r, x) == *d)
    }

    /// Indices of inequality rows tight at `x`.
    pub fn active_rows(&self, x: &[S]) -> Vec<usize> {
        (0..self.a.len()).filter(|&i| dot(&self.a[i], x) == self.b[i]).collect()
    }

    pub fn intersect(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::dim(format!("intersect {} with {}", self.dim, other.dim)));
        }
        let mut p = self.clone();
        p.a.extend(other.a.iter().cloned());
        p.b.extend(other.b.iter().cloned());
        p.e.extend(other.e.iter().cloned());
        p.d.extend(other.d.iter().cloned());
        Ok(p)
    }

    /// `{(x, y) : x ∈ self, y ∈ other}`.
    pub fn product(&self, other: &Self) -> Self {
        let n = self.dim + other.dim;
        let pad_left = |r: &Vec<S>| {
            let mut v = r.clone();
            v.extend(std::iter::repeat(S::zero()).take(other.dim));
            v
        };
        let pad_right = |r: &Vec<S>| {
            let mut v = vec![S::zero(); self.dim];
            v.extend(r.iter().cloned());
            v
        };
        ConvexPolyhedron {
            dim: n,
            a: self.a.iter().map(pad_left).chain(other.a.iter().map(pad_right)).collect(),
            b: self.b.iter().chain(other.b.iter()).cloned().collect(),
            e: self.e.iter().map(pad_left).chain(other.e.iter().map(pad_right)).collect(),
            d: self.d.iter().chain(other.d.iter()).cloned().collect(),
        }
    }

    /// Preimage under the affine map `y ↦ T y + shift`, i.e.
    /// `{y ∈ ℝ^new_dim : T y + shift ∈ self}`. `t` has `self.dim` rows.
    pub fn pullback(&self, new_dim: usize, t: &[Vec<S>], shift: Option<&[S]>) -> Result<Self> {
        if t.len() != self.dim || t.iter().any(|r| r.len() != new_dim) {
            return Err(Error::dim("pullback matrix shape"));
        }
        let map_row = |row: &Vec<S>, rhs: &S| {
            let new_row = linalg::vec_mat(row, t, new_dim);
            let new_rhs = match shift {
                Some(s) => rhs.clone() - dot(row, s),
                None => rhs.clone(),
            };
            (new_row, new_rhs)
        };
        let (a, b): (Vec<_>, Vec<_>) = self.a.iter().zip(&self.b).map(|(r, x)| map_row(r, x)).unzip();
        let (e, d): (Vec<_>, Vec<_>) = self.e.iter().zip(&self.d).map(|(r, x)| map_row(r, x)).unzip();
        Ok(ConvexPolyhedron { dim: new_dim, a, b, e, d })
    }

    /// `{x : x + shift ∈ self}`.
    pub fn translate_back(&self, shift: &[S]) -> Self {
        self.pullback(self.dim, &linalg::identity(self.dim), Some(shift)).expect("square shape")
    }

    /// `{x + v : x ∈ self}`.
    pub fn translate(&self, v: &[S]) -> Self {
        self.translate_back(&linalg::neg_vec(v))
    }

    pub fn recession_cone(&self) -> Self {
        ConvexPolyhedron {
            dim: self.dim,
            a: self.a.clone(),
            b: vec![S::zero(); self.b.len()],
            e: self.e.clone(),
            d: vec![S::zero(); self.d.len()],
        }
    }

    /// Tangent cone at a point of the polyhedron: active rows and equalities.
    pub fn tangent_cone_at(&self, x: &[S]) -> Self {
        let active = self.active_rows(x);
        ConvexPolyhedron {
            dim: self.dim,
            a: active.iter().map(|&i| self.a[i].clone()).collect(),
            b: vec![S::zero(); active.len()],
            e: self.e.clone(),
            d: vec![S::zero(); self.e.len()],
        }
    }

    /// Whether `other ⊆ self`.
    pub fn contains_polyhedron(&self, other: &Self) -> bool {
        if other.is_empty() {
            return true;
        }
        for (row, rhs) in self.a.iter().zip(&self.b) {
            match other.maximize(row) {
                LpOutcome::Optimal { value, .. } if value <= *rhs => {}
                _ => return false,
            }
        }
        for (row, rhs) in self.e.iter().zip(&self.d) {
            let up = other.sup(row);
            let down = other.sup(&linalg::neg_vec(row)).map(|v| -v);
            if up.as_ref() != Some(rhs) || down.as_ref() != Some(rhs) {
                return false;
            }
        }
        true
    }

    pub fn set_eq(&self, other: &Self) -> bool {
        self.contains_polyhedron(other) && other.contains_polyhedron(self)
    }

    /// Canonical cleanup: normalized rows, reduced equalities, no duplicate or
    /// LP-redundant inequalities. Empty inputs become [`ConvexPolyhedron::empty`].
    pub fn simplify(&self) -> Self {
        let n = self.dim;
        let mut eq: Matrix<S> = self
            .e
            .iter()
            .zip(&self.d)
            .map(|(r, d)| {
                let mut v = r.clone();
                v.push(d.clone());
                v
            })
            .collect();
        let pivots = linalg::rref(&mut eq, n + 1);
        if pivots.contains(&n) {
            return Self::empty(n);
        }
        // eliminate equality pivots from the inequalities so rows are canonical
        let mut ineq: Vec<(Vec<S>, S)> = Vec::with_capacity(self.a.len());
        for (row, rhs) in self.a.iter().zip(&self.b) {
            let mut r = row.clone();
            let mut b = rhs.clone();
            for (er, &p) in eq.iter().zip(&pivots) {
                if !r[p].is_zero() {
                    let f = r[p].clone();
                    for j in 0..n {
                        r[j] = r[j].clone() - f.clone() * &er[j];
                    }
                    b = b - f * &er[n];
                }
            }
            match normalize_row(&r) {
                None => {
                    if b.is_negative() {
                        return Self::empty(n);
                    }
                }
                Some(scale) => {
                    let r: Vec<S> = r.iter().map(|x| x.clone() / &scale).collect();
                    ineq.push((r, b / &scale));
                }
            }
        }
        // keep the tightest copy of each direction
        ineq.sort_by(|x, y| x.0.cmp(&y.0).then(x.1.cmp(&y.1)));
        ineq.dedup_by(|later, earlier| later.0 == earlier.0);
        let e: Matrix<S> = eq.iter().map(|r| r[..n].to_vec()).collect();
        let d: Vec<S> = eq.iter().map(|r| r[n].clone()).collect();
        let mut a: Matrix<S> = ineq.iter().map(|x| x.0.clone()).collect();
        let mut b: Vec<S> = ineq.iter().map(|x| x.1.clone()).collect();
        if lp::feasible_point(LinearSystem { dim: n, a: &a, b: &b, e: &e, d: &d }).is_none() {
            return Self::empty(n);
        }
        let mut i = 0;
        while i < a.len() {
            let row = a.remove(i);
            let rhs = b.remove(i);
            let sys = LinearSystem { dim: n, a: &a, b: &b, e: &e, d: &d };
            let redundant = matches!(lp::maximize(sys, Some(&row)), LpOutcome::Optimal { ref value, .. } if *value <= rhs);
            if !redundant {
                a.insert(i, row);
                b.insert(i, rhs);
                i += 1;
            }
        }
        ConvexPolyhedron { dim: n, a, b, e, d }
    }

    /// Drops the listed coordinates from a polyhedron that does not constrain
    /// them (all their coefficients are zero).
    pub(crate) fn drop_free_coords(&self, coords: &HashSet<usize>) -> Self {
        let keep = |r: &Vec<S>| r.iter().enumerate().filter(|(j, _)| !coords.contains(j)).map(|(_, x)| x.clone()).collect::<Vec<S>>();
        ConvexPolyhedron {
            dim: self.dim - coords.len(),
            a: self.a.iter().map(keep).collect(),
            b: self.b.clone(),
            e: self.e.iter().map(keep).collect(),
            d: self.d.clone(),
        }
    }

    /// Largest `t ≤ 1` such that some point has slack at least `t` in every
    /// inequality row, together with that point.
    pub fn max_min_slack(&self) -> Option<(Vec<S>, S)> {
        lp::max_min_slack(self.system(), &vec![true; self.a.len()])
    }

    /// A point in the relative interior.
    pub fn relative_interior_point(&self) -> Option<Vec<S>> {
        // rows that are implicit equalities keep zero slack; find them iteratively
        let mut strict: Vec<bool> = vec![true; self.a.len()];
        loop {
            let (p, t) = lp::max_min_slack(self.system(), &strict)?;
            if t.is_positive() {
                return Some(p);
            }
            // some strict row is an implicit equality; demote rows that cannot be strict
            let mut changed = false;
            for i in 0..self.a.len() {
                if !strict[i] {
                    continue;
                }
                let mut only = vec![false; self.a.len()];
                only[i] = true;
                let (_, ti) = lp::max_min_slack(self.system(), &only)?;
                if !ti.is_positive() {
                    strict[i] = false;
                    changed = true;
                }
            }
            if !changed {
                return Some(p);
            }
        }
    }
}

/// Positive scale that makes the first nonzero coefficient ±1, or `None` for
/// an all-zero row.
pub(crate) fn normalize_row<S: Scalar>(row: &[S]) -> Option<S> {
    row.iter().find(|x| !x.is_zero()).map(|x| x.abs())
}


fn fmt_row<S: Scalar>(row: &[S]) -> String {
    let mut out = String::new();
    for (j, c) in row.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
        let var = format!("x{}", j + 1);
        let mag = c.abs();
        let term = if mag.is_one() { var } else { format!("{mag}·{var}") };
        if out.is_empty() {
            out = if c.is_negative() { format!("-{term}") } else { term };
        } else {
            out.push_str(if c.is_negative() { " - " } else { " + " });
            out.push_str(&term);
        }
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

/// Constraints joined by `, `, e.g. `x1 + x2 ≤ 1, x3 = 0`; `ℝ^n` if none.
impl<S: Scalar> std::fmt::Display for ConvexPolyhedron<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts: Vec<String> = self.e.iter().zip(&self.d).map(|(r, d)| format!("{} = {d}", fmt_row(r))).collect();
        parts.extend(self.a.iter().zip(&self.b).map(|(r, b)| format!("{} ≤ {b}", fmt_row(r))));
        if parts.is_empty() {
            write!(f, "ℝ^{}", self.dim)
        } else {
            write!(f, "{}", parts.join(", "))
        }
    }
}

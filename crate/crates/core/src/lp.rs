//! Dense exact simplex method (two phases, Bland's rule).
//!
//! Solves `max cᵀx` subject to `Ax ≤ b`, `Ex = d` with every variable free.
//! Free variables are split as `x = x⁺ − x⁻`. Bland's rule guarantees
//! termination, which matters more here than pivot counts: the problems are
//! small and every answer must be exact.

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome<S> {
    Infeasible,
    /// The objective is unbounded above; `point` is some feasible point.
    Unbounded { point: Vec<S> },
    Optimal { point: Vec<S>, value: S },
}

impl<S: Scalar> LpOutcome<S> {
    pub fn point(&self) -> Option<&[S]> {
        match self {
            LpOutcome::Infeasible => None,
            LpOutcome::Unbounded { point } | LpOutcome::Optimal { point, .. } => Some(point),
        }
    }

    pub fn is_feasible(&self) -> bool {
        !matches!(self, LpOutcome::Infeasible)
    }
}

/// Borrowed view of a linear system `Ax ≤ b, Ex = d` over `dim` variables.
#[derive(Debug)]
pub struct LinearSystem<'a, S> {
    pub dim: usize,
    pub a: &'a [Vec<S>],
    pub b: &'a [S],
    pub e: &'a [Vec<S>],
    pub d: &'a [S],
}

impl<S> Clone for LinearSystem<'_, S> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<S> Copy for LinearSystem<'_, S> {}

struct Tableau<S> {
    rows: Vec<Vec<S>>,
    basis: Vec<usize>,
    obj: Vec<S>,
    ncols: usize,
}

impl<S: Scalar> Tableau<S> {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        if !p.is_one() {
            for v in self.rows[r].iter_mut() {
                if !v.is_zero() {
                    *v = v.clone() / &p;
                }
            }
        }
        let pivot_row = self.rows[r].clone();
        let nz: Vec<usize> = (0..=self.ncols).filter(|&j| !pivot_row[j].is_zero()).collect();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for &j in &nz {
                row[j] = row[j].clone() - f.clone() * &pivot_row[j];
            }
        }
        if !self.obj[c].is_zero() {
            let f = self.obj[c].clone();
            for &j in &nz {
                self.obj[j] = self.obj[j].clone() - f.clone() * &pivot_row[j];
            }
        }
        self.basis[r] = c;
    }

    fn set_objective(&mut self, costs: &[S]) {
        let mut obj: Vec<S> = costs.to_vec();
        obj.push(S::zero());
        for (i, &bv) in self.basis.iter().enumerate() {
            let cb = &costs[bv];
            if cb.is_zero() {
                continue;
            }
            for j in 0..=self.ncols {
                if !self.rows[i][j].is_zero() {
                    obj[j] = obj[j].clone() - cb.clone() * &self.rows[i][j];
                }
            }
        }
        self.obj = obj;
    }

    /// Runs simplex iterations over columns `< allowed`. Returns false when
    /// the objective is unbounded.
    fn optimize(&mut self, allowed: usize) -> bool {
        loop {
            let entering = (0..allowed).find(|&j| self.obj[j].is_positive());
            let Some(c) = entering else { return true };
            let mut best: Option<(usize, S)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[c].is_positive() {
                    let ratio = row[self.ncols].clone() / &row[c];
                    let better = match &best {
                        None => true,
                        Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            match best {
                None => return false,
                Some((r, _)) => self.pivot(r, c),
            }
        }
    }

    fn value_of(&self, col: usize) -> S {
        self.basis
            .iter()
            .position(|&b| b == col)
            .map(|i| self.rows[i][self.ncols].clone())
            .unwrap_or_else(S::zero)
    }
}

/// Maximizes `objective · x` over the system. `None` means pure feasibility.
pub fn maximize<S: Scalar>(sys: LinearSystem<'_, S>, objective: Option<&[S]>) -> LpOutcome<S> {
    let n = sys.dim;
    let mi = sys.a.len();
    let me = sys.e.len();
    let nrows = mi + me;
    let art_start = 2 * n + mi;

    // which rows need an artificial variable
    let mut needs_art = Vec::with_capacity(nrows);
    for i in 0..mi {
        needs_art.push(sys.b[i].is_negative());
    }
    for _ in 0..me {
        needs_art.push(true);
    }
    let n_art = needs_art.iter().filter(|&&x| x).count();
    let ncols = art_start + n_art;

    let mut rows = Vec::with_capacity(nrows);
    let mut basis = Vec::with_capacity(nrows);
    let mut next_art = art_start;
    for i in 0..nrows {
        let mut row = vec![S::zero(); ncols + 1];
        let (coeffs, rhs, slack) = if i < mi {
            (&sys.a[i], sys.b[i].clone(), Some(2 * n + i))
        } else {
            (&sys.e[i - mi], sys.d[i - mi].clone(), None)
        };
        let negate = rhs.is_negative();
        let sign = |v: S| if negate { -v } else { v };
        for j in 0..n {
            if !coeffs[j].is_zero() {
                row[j] = sign(coeffs[j].clone());
                row[n + j] = -row[j].clone();
            }
        }
        if let Some(sc) = slack {
            row[sc] = sign(S::one());
        }
        row[ncols] = sign(rhs);
        if needs_art[i] {
            row[next_art] = S::one();
            basis.push(next_art);
            next_art += 1;
        } else {
            basis.push(slack.expect("inequality row"));
        }
        rows.push(row);
    }

    let mut tab = Tableau { rows, basis, obj: Vec::new(), ncols };

    if n_art > 0 {
        let mut costs = vec![S::zero(); ncols];
        for c in costs.iter_mut().skip(art_start) {
            *c = -S::one();
        }
        tab.set_objective(&costs);
        tab.optimize(ncols);
        // obj[rhs] holds minus the phase-one value
        if !tab.obj[ncols].is_zero() {
            return LpOutcome::Infeasible;
        }
        // drive artificials out of the basis, dropping redundant rows
        let mut i = 0;
        while i < tab.rows.len() {
            if tab.basis[i] >= art_start {
                match (0..art_start).find(|&j| !tab.rows[i][j].is_zero()) {
                    Some(j) => {
                        tab.pivot(i, j);
                        i += 1;
                    }
                    None => {
                        tab.rows.remove(i);
                        tab.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
    }

    let extract = |tab: &Tableau<S>| -> Vec<S> {
        (0..n).map(|j| tab.value_of(j) - tab.value_of(n + j)).collect()
    };

    let Some(c) = objective else {
        return LpOutcome::Optimal { point: extract(&tab), value: S::zero() };
    };
    let mut costs = vec![S::zero(); ncols];
    for j in 0..n {
        costs[j] = c[j].clone();
        costs[n + j] = -c[j].clone();
    }
    tab.set_objective(&costs);
    if !tab.optimize(art_start) {
        return LpOutcome::Unbounded { point: extract(&tab) };
    }
    let point = extract(&tab);
    let value = crate::scalar::dot(c, &point);
    LpOutcome::Optimal { point, value }
}

pub fn feasible_point<S: Scalar>(sys: LinearSystem<'_, S>) -> Option<Vec<S>> {
    match maximize(sys, None) {
        LpOutcome::Infeasible => None,
        o => o.point().map(|p| p.to_vec()),
    }
}

/// Finds a point of `{Ax ≤ b, Ex = d}` that maximizes the minimum slack of
/// the rows flagged in `strict`, capped at one. Returns the point and the
/// achieved slack; the slack is positive iff the system with the flagged rows
/// made strict is nonempty.
pub fn max_min_slack<S: Scalar>(sys: LinearSystem<'_, S>, strict: &[bool]) -> Option<(Vec<S>, S)> {
    let n = sys.dim;
    if !strict.iter().any(|&s| s) {
        return feasible_point(sys).map(|p| (p, S::one()));
    }
    let mut a = Vec::with_capacity(sys.a.len() + 1);
    for (row, &st) in sys.a.iter().zip(strict) {
        let mut r = row.clone();
        r.push(if st { S::one() } else { S::zero() });
        a.push(r);
    }
    let mut cap = vec![S::zero(); n + 1];
    cap[n] = S::one();
    a.push(cap);
    let mut b = sys.b.to_vec();
    b.push(S::one());
    let e: Vec<Vec<S>> = sys
        .e
        .iter()
        .map(|row| {
            let mut r = row.clone();
            r.push(S::zero());
            r
        })
        .collect();
    let mut obj = vec![S::zero(); n + 1];
    obj[n] = S::one();
    let lifted = LinearSystem { dim: n + 1, a: &a, b: &b, e: &e, d: sys.d };
    match maximize(lifted, Some(&obj)) {
        LpOutcome::Optimal { mut point, value } => {
            point.pop();
            Some((point, value))
        }
        LpOutcome::Infeasible => None,
        LpOutcome::Unbounded { .. } => unreachable!("slack is capped"),
    }
}

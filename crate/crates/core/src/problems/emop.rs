use crate::error::{Error, Result};
use crate::geometry::{project_out, ConvexPolyhedron, PolyUnion};
use crate::linalg::{self, Matrix};
use crate::mappings::PolyMapping;
use crate::scalar::{format_vector, Scalar};
use crate::stationarity::{ImplicitProgram, Objective, Structure};

/// Rows of `A` beyond this count give too many complementarity patterns.
pub const EMOP_MAX_ROWS: usize = 8;

/// Linear multiobjective problem `min_z f(z)` over the weakly efficient set
/// of `min J z  s.t.  Az ≤ b`, with `λ` ranging over the standard simplex
/// `Δ` as scalarization weights.
#[derive(Debug, Clone)]
pub struct EmopLinear<S> {
    pub j: Matrix<S>,
    pub gamma: ConvexPolyhedron<S>,
    psi: PolyUnion<S>,
    program: ImplicitProgram<S>,
}

/// The standard simplex `{λ ≥ 0 : eᵀλ = 1}`.
pub fn simplex<S: Scalar>(m: usize) -> ConvexPolyhedron<S> {
    let mut p = ConvexPolyhedron::universe(m).with_eq(vec![S::one(); m], S::one());
    for i in 0..m {
        let mut r = vec![S::zero(); m];
        r[i] = -S::one();
        p.push_ineq(r, S::zero());
    }
    p
}

fn is_bounded<S: Scalar>(p: &ConvexPolyhedron<S>) -> bool {
    let rec = p.recession_cone();
    (0..p.dim()).all(|i| {
        let mut e = vec![S::zero(); p.dim()];
        e[i] = S::one();
        let up = rec.sup(&e);
        let down = rec.sup(&linalg::neg_vec(&e));
        matches!((up, down), (Some(u), Some(d)) if u.is_zero() && d.is_zero())
    })
}

impl<S: Scalar> EmopLinear<S> {
    /// `gamma` must be a nonempty polytope given by inequalities only.
    pub fn new(j: Matrix<S>, gamma: ConvexPolyhedron<S>, objective: Option<Objective<S>>) -> Result<Self> {
        let m = j.len();
        let n = gamma.dim();
        if m < 2 {
            return Err(Error::pre(format!("at least two objectives are required, got {m}")));
        }
        if j.iter().any(|r| r.len() != n) {
            return Err(Error::dim(format!("J must have {n} columns")));
        }
        if !gamma.e().is_empty() {
            return Err(Error::pre("Γ must be written as Az ≤ b without equations"));
        }
        if gamma.a().len() > EMOP_MAX_ROWS {
            return Err(Error::Resource(format!("at most {EMOP_MAX_ROWS} constraints, got {}", gamma.a().len())));
        }
        if gamma.is_empty() {
            return Err(Error::pre("Γ is empty"));
        }
        if !is_bounded(&gamma) {
            return Err(Error::pre("Γ is unbounded"));
        }
        let psi = Self::psi_graph(&j, &gamma)?;

        // gph F = ℝⁿ × Δ
        let f_graph = simplex::<S>(m).pullback(n + m, &linalg::block_selector(n, m, n + m), None)?;
        let f = PolyMapping::new(n, m, PolyUnion::single(f_graph))?;
        // gph G = {(z, λ, w) : (λ, z + w) ∈ gph Ψ}
        let dim = 2 * n + m;
        let mut t = vec![vec![S::zero(); dim]; m + n];
        for i in 0..m {
            t[i][n + i] = S::one();
        }
        for k in 0..n {
            t[m + k][k] = S::one();
            t[m + k][n + m + k] = S::one();
        }
        let g = PolyMapping::new(n + m, n, psi.pullback(dim, &t, None)?)?;
        let objective = objective.unwrap_or_else(|| Objective::linear(vec![S::zero(); n]));
        let m_set = PolyUnion::single(ConvexPolyhedron::universe(n));
        let program = ImplicitProgram::new(objective, f, g, m_set, Some(Structure::AdditiveSplit))?;
        Ok(EmopLinear { j, gamma, psi, program })
    }

    /// `gph Ψ` over `(λ, z)`: `z` minimizes `λᵀJz` over `Γ`, written through
    /// KKT multipliers `μ` for each active set and with `μ` projected out.
    fn psi_graph(j: &Matrix<S>, gamma: &ConvexPolyhedron<S>) -> Result<PolyUnion<S>> {
        let m = j.len();
        let n = gamma.dim();
        let rows = gamma.a().len();
        let dim = m + n + rows;
        let mut pieces = Vec::new();
        for mask in 0u32..(1 << rows) {
            let mut p = simplex::<S>(m).pullback(dim, &linalg::block_selector(0, m, dim), None)?;
            for (r, (row, rhs)) in gamma.a().iter().zip(gamma.b()).enumerate() {
                let mut lifted = vec![S::zero(); dim];
                lifted[m..m + n].clone_from_slice(row);
                let mut mu = vec![S::zero(); dim];
                mu[m + n + r] = S::one();
                if mask & (1 << r) != 0 {
                    p.push_eq(lifted, rhs.clone());
                    p.push_ineq(linalg::neg_vec(&mu), S::zero());
                } else {
                    p.push_ineq(lifted, rhs.clone());
                    p.push_eq(mu, S::zero());
                }
            }
            // Jᵀλ + Aᵀμ = 0
            for k in 0..n {
                let mut r = vec![S::zero(); dim];
                for i in 0..m {
                    r[i] = j[i][k].clone();
                }
                for (l, row) in gamma.a().iter().enumerate() {
                    r[m + n + l] = row[k].clone();
                }
                p.push_eq(r, S::zero());
            }
            if p.is_empty() {
                continue;
            }
            let q = project_out(&p, &(m + n..dim).collect::<Vec<_>>())?.simplify();
            if !pieces.iter().any(|old: &ConvexPolyhedron<S>| old.contains_polyhedron(&q)) {
                pieces.retain(|old| !q.contains_polyhedron(old));
                pieces.push(q);
            }
        }
        PolyUnion::new(m + n, pieces)
    }

    pub fn program(&self) -> &ImplicitProgram<S> {
        &self.program
    }

    /// `gph Ψ` over `(λ, z)`.
    pub fn psi(&self) -> &PolyUnion<S> {
        &self.psi
    }

    pub fn psi_at(&self, lambda: &[S]) -> Result<PolyUnion<S>> {
        let m = self.j.len();
        if lambda.len() != m {
            return Err(Error::dim("weight vector has the wrong length"));
        }
        let fixed: Vec<(usize, S)> = lambda.iter().cloned().enumerate().collect();
        let pieces = crate::mappings::slice_pieces(&self.psi, &(m..m + self.gamma.dim()).collect::<Vec<_>>(), &fixed)?;
        PolyUnion::possibly_empty(self.gamma.dim(), pieces)
    }

    /// The weakly efficient set `dom K`.
    pub fn weakly_efficient_set(&self) -> Result<PolyUnion<S>> {
        Ok(self.program.derived().k.domain()?.simplify())
    }

    /// `J z`.
    pub fn criteria(&self, z: &[S]) -> Vec<S> {
        linalg::mat_vec(&self.j, z)
    }

    /// Grid test for weak efficiency: no grid point of `Γ` in the box
    /// `[lo, hi]` with spacing `step` strictly dominates `z` in every criterion.
    pub fn grid_weakly_efficient(&self, z: &[S], lo: &[S], hi: &[S], step: &S) -> Result<bool> {
        let n = self.gamma.dim();
        if z.len() != n || lo.len() != n || hi.len() != n {
            return Err(Error::dim("point and box must live in the space of z"));
        }
        if !self.gamma.contains(z) {
            return Err(Error::pre(format!("{} is not in Γ", format_vector(z))));
        }
        let grid = super::oracle::GridAxes::new(lo, hi, step)?;
        if grid.len() > super::oracle::GRID_MAX_POINTS {
            return Err(Error::Resource(format!("{} grid points exceed the limit", grid.len())));
        }
        let jz = self.criteria(z);
        Ok(!(0..grid.len()).any(|idx| {
            let x = grid.point(idx);
            self.gamma.contains(&x) && self.criteria(&x).iter().zip(&jz).all(|(a, b)| a < b)
        }))
    }
}

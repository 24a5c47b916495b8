use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{limiting_normal_cone, ConvexPolyhedron, PolyUnion};
use crate::linalg::{self, Matrix};
use crate::mappings::PolyMapping;
use crate::scalar::{dot, format_vector, Scalar};
use crate::stationarity::{ImplicitProgram, Objective, Session, Structure, Witnesses};
use crate::system::DisjunctiveSystem;

/// Lower-level constraints beyond this count make `gph F` too large (`2^m` pieces).
pub const BILEVEL_MAX_M: usize = 6;

/// Upper level `min f(x,y)` over `x ∈ S` with `y` solving the lower level
/// `min ½yᵀQy + xᵀPy + cᵀy  s.t.  Ay ≤ b`, the lower-level solution set
/// described through its Lagrange multipliers `λ`.
#[derive(Debug, Clone)]
pub struct BilevelLq<S> {
    pub n1: usize,
    pub n2: usize,
    pub m: usize,
    pub q: Matrix<S>,
    pub p: Matrix<S>,
    pub c: Vec<S>,
    pub a: Matrix<S>,
    pub b: Vec<S>,
    pub s_set: PolyUnion<S>,
    program: ImplicitProgram<S>,
}

/// `x ∈ S`, `Qy + Pᵀx + c + Aᵀλ = 0`, `(Ay − b, λ) ∈ gph N̂_{ℝᵐ₋}`.
#[derive(Debug, Clone)]
pub struct MpccReformulation<S> {
    pub s_set: PolyUnion<S>,
    /// Rows over `(x, y, λ)` with right-hand side `−c`.
    pub stationarity: Matrix<S>,
    pub rhs: Vec<S>,
    /// `gph N̂_{ℝᵐ₋}` over `(a, b) ∈ ℝᵐ × ℝᵐ`.
    pub complementarity: PolyUnion<S>,
    /// The feasible set over `(x, y, λ)`.
    pub feasible_set: PolyUnion<S>,
}

/// `{(a, b) : a ≤ 0, b ≥ 0, aᵀb = 0}` with one two-piece factor per coordinate.
pub fn complementarity_graph<S: Scalar>(m: usize) -> PolyUnion<S> {
    let dim = 2 * m;
    let mut pieces = Vec::new();
    for mask in 0u32..(1 << m) {
        let mut p = ConvexPolyhedron::universe(dim);
        for i in 0..m {
            let mut ai = vec![S::zero(); dim];
            ai[i] = S::one();
            let mut bi = vec![S::zero(); dim];
            bi[m + i] = S::one();
            if mask & (1 << i) == 0 {
                // active: a = 0, b ≥ 0
                p.push_eq(ai, S::zero());
                p.push_ineq(linalg::neg_vec(&bi), S::zero());
            } else {
                p.push_ineq(ai, S::zero());
                p.push_eq(bi, S::zero());
            }
        }
        pieces.push(p);
    }
    PolyUnion::new(dim, pieces).expect("nonempty pieces")
}

#[derive(Debug, Clone)]
pub struct FullyExplicitReport<S> {
    pub holds: bool,
    /// `nu`, `mu` and `xi` (the normal to `S`), plus the chosen subgradient.
    pub witnesses: Witnesses<S>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MultiplierConditions {
    /// Strict Mangasarian–Fromovitz condition at `λ̄`.
    pub strict_mf: bool,
    /// Active lower-level constraint gradients are linearly independent.
    pub licq: bool,
    /// `K(x̄, ȳ) = {λ̄}`.
    pub singleton: bool,
    pub active: Vec<usize>,
}

fn check_shape<S>(m: &Matrix<S>, rows: usize, cols: usize, what: &str) -> Result<()> {
    if m.len() != rows || m.iter().any(|r| r.len() != cols) {
        return Err(Error::dim(format!("{what} must be {rows}×{cols}")));
    }
    Ok(())
}

impl<S: Scalar> BilevelLq<S> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        q: Matrix<S>,
        p: Matrix<S>,
        c: Vec<S>,
        a: Matrix<S>,
        b: Vec<S>,
        objective: Objective<S>,
        s_set: Option<PolyUnion<S>>,
    ) -> Result<Self> {
        let n2 = c.len();
        let n1 = p.len();
        let m = b.len();
        check_shape(&q, n2, n2, "Q")?;
        check_shape(&p, n1, n2, "P")?;
        check_shape(&a, m, n2, "A")?;
        if m > BILEVEL_MAX_M {
            return Err(Error::Resource(format!("at most {BILEVEL_MAX_M} lower-level constraints, got {m}")));
        }
        if (0..n2).any(|i| (0..n2).any(|j| q[i][j] != q[j][i])) || !linalg::is_psd(&q) {
            return Err(Error::pre("Q must be symmetric positive semidefinite"));
        }
        let n = n1 + n2;
        let s_set = s_set.unwrap_or_else(|| PolyUnion::single(ConvexPolyhedron::universe(n1)));
        if s_set.dim() != n1 {
            return Err(Error::dim("S must live in the space of x"));
        }

        // gph F over (x, y, λ): λ ∈ N̂_{ℝᵐ₋}(Ay − b), i.e. (Ay − b, λ) complementary
        let dim_f = n + m;
        let mut t = vec![vec![S::zero(); dim_f]; 2 * m];
        for i in 0..m {
            for k in 0..n2 {
                t[i][n1 + k] = a[i][k].clone();
            }
            t[m + i][n + i] = S::one();
        }
        let mut shift = linalg::neg_vec(&b);
        shift.extend(vec![S::zero(); m]);
        let f_graph = complementarity_graph::<S>(m).pullback(dim_f, &t, Some(&shift))?;
        let f = PolyMapping::new(n, m, f_graph)?;

        // G(x, y, λ) = Qy + Pᵀx + c + Aᵀλ
        let rows: Matrix<S> = (0..n2)
            .map(|k| {
                let mut r: Vec<S> = (0..n1).map(|i| p[i][k].clone()).collect();
                r.extend(q[k].iter().cloned());
                r.extend((0..m).map(|i| a[i][k].clone()));
                r
            })
            .collect();
        let g = PolyMapping::affine(&rows, &c, n + m)?;
        let m_set = s_set.product(&PolyUnion::single(ConvexPolyhedron::universe(n2)))?;
        let program = ImplicitProgram::new(objective, f, g, m_set, Some(Structure::SmoothMinusSet))?;
        Ok(BilevelLq { n1, n2, m, q, p, c, a, b, s_set, program })
    }

    pub fn program(&self) -> &ImplicitProgram<S> {
        &self.program
    }

    /// Constraint values `Ay − b`.
    pub fn slack(&self, y: &[S]) -> Vec<S> {
        linalg::sub_vec(&linalg::mat_vec(&self.a, y), &self.b)
    }

    pub fn mpcc(&self) -> Result<MpccReformulation<S>> {
        let (n1, n2, m) = (self.n1, self.n2, self.m);
        let dim = n1 + n2 + m;
        let stationarity: Matrix<S> = (0..n2)
            .map(|k| {
                let mut r: Vec<S> = (0..n1).map(|i| self.p[i][k].clone()).collect();
                r.extend(self.q[k].iter().cloned());
                r.extend((0..m).map(|i| self.a[i][k].clone()));
                r
            })
            .collect();
        let rhs = linalg::neg_vec(&self.c);
        let complementarity = complementarity_graph::<S>(m);
        let mut base = ConvexPolyhedron::universe(dim);
        for (r, v) in stationarity.iter().zip(&rhs) {
            base.push_eq(r.clone(), v.clone());
        }
        let mut t = vec![vec![S::zero(); dim]; 2 * m];
        for i in 0..m {
            for k in 0..n2 {
                t[i][n1 + k] = self.a[i][k].clone();
            }
            t[m + i][n1 + n2 + i] = S::one();
        }
        let mut shift = linalg::neg_vec(&self.b);
        shift.extend(vec![S::zero(); m]);
        let comp = complementarity.pullback(dim, &t, Some(&shift))?;
        let s_lift = self.s_set.pullback(dim, &linalg::block_selector(0, n1, dim), None)?;
        let feasible_set = comp.intersect(&s_lift)?.intersect_polyhedron(&base)?.simplify();
        Ok(MpccReformulation { s_set: self.s_set.clone(), stationarity, rhs, complementarity, feasible_set })
    }

    /// The fully explicit M-stationarity system at `(z̄, λ̄)`:
    /// `0 = ∂ₓf + Pν + ξ`, `0 = ∂_y f + Qν + Aᵀμ`, `ξ ∈ N_S(x̄)`,
    /// `(μ, −Aν) ∈ N_{gph N̂}(Aȳ − b, λ̄)`.
    pub fn fully_explicit(&self, z: &[S], lambda: &[S]) -> Result<FullyExplicitReport<S>> {
        let (n1, n2, m) = (self.n1, self.n2, self.m);
        let n = n1 + n2;
        if !self.program.is_multiplier(z, lambda) {
            return Err(Error::pre(format!("{} is not a lower-level multiplier at {}", format_vector(lambda), format_vector(z))));
        }
        let session = Session::new(&self.program, z)?;
        let mut base_point = self.slack(&z[n1..]);
        base_point.extend_from_slice(lambda);
        let normal = limiting_normal_cone(&complementarity_graph::<S>(m), &base_point)?;
        let normal_s = limiting_normal_cone(&self.s_set, &z[..n1])?;
        // variables: g[n], ν[n2], μ[m], ξ[n1], t[m]
        let (g0, nu0, mu0, xi0, t0) = (0, n, n + n2, n + n2 + m, n + n2 + m + n1);
        let total = t0 + m;
        let mut sys = DisjunctiveSystem::new(total);
        sys.add_polyhedron(&session.subdifferential().pullback(total, &linalg::block_selector(g0, n, total), None)?)?;
        for i in 0..n1 {
            let mut r = vec![S::zero(); total];
            r[g0 + i] = S::one();
            r[xi0 + i] = S::one();
            for k in 0..n2 {
                r[nu0 + k] = self.p[i][k].clone();
            }
            sys.add_eq(r, S::zero());
        }
        for k in 0..n2 {
            let mut r = vec![S::zero(); total];
            r[g0 + n1 + k] = S::one();
            for l in 0..n2 {
                r[nu0 + l] = self.q[k][l].clone();
            }
            for i in 0..m {
                r[mu0 + i] = self.a[i][k].clone();
            }
            sys.add_eq(r, S::zero());
        }
        for i in 0..m {
            // t = −Aν
            let mut r = vec![S::zero(); total];
            r[t0 + i] = S::one();
            for k in 0..n2 {
                r[nu0 + k] = self.a[i][k].clone();
            }
            sys.add_eq(r, S::zero());
        }
        let coords: Vec<(usize, bool)> = (mu0..mu0 + m).chain(t0..t0 + m).map(|c| (c, false)).collect();
        sys.add_block_on(&coords, &normal)?;
        sys.add_block_on(&(xi0..xi0 + n1).map(|c| (c, false)).collect::<Vec<_>>(), &normal_s)?;
        let sol = sys.find_solution();
        let mut witnesses = Witnesses::default();
        if let Some(x) = &sol {
            witnesses.lambda = Some(lambda.to_vec());
            witnesses.nu = Some(x[nu0..nu0 + n2].to_vec());
            witnesses.mu = Some(x[mu0..mu0 + m].to_vec());
            witnesses.xi = Some(x[xi0..xi0 + n1].to_vec());
            witnesses.extra.insert("grad".into(), x[g0..g0 + n].to_vec());
        }
        Ok(FullyExplicitReport { holds: sol.is_some(), witnesses })
    }

    pub fn multiplier_conditions(&self, z: &[S], lambda: &[S]) -> Result<MultiplierConditions> {
        let (n1, m) = (self.n1, self.m);
        if !self.program.is_multiplier(z, lambda) {
            return Err(Error::pre(format!("{} is not a lower-level multiplier at {}", format_vector(lambda), format_vector(z))));
        }
        let slack = self.slack(&z[n1..]);
        let active: Vec<usize> = (0..m).filter(|&i| slack[i].is_zero()).collect();
        // strict MF: Aᵀθ = 0, θᵀ(Aȳ − b) = 0, θᵢ ≥ 0 where λ̄ᵢ = 0  ⟹  θ = 0
        let mut p = ConvexPolyhedron::universe(m);
        for k in 0..self.n2 {
            p.push_eq((0..m).map(|i| self.a[i][k].clone()).collect(), S::zero());
        }
        p.push_eq(slack.clone(), S::zero());
        for i in 0..m {
            if lambda[i].is_zero() {
                let mut r = vec![S::zero(); m];
                r[i] = -S::one();
                p.push_ineq(r, S::zero());
            }
        }
        let mut sys = DisjunctiveSystem::new(m);
        sys.add_polyhedron(&p)?;
        let strict_mf = sys.find_nonzero(&(0..m).collect::<Vec<_>>()).is_none();
        let rows: Matrix<S> = active.iter().map(|&i| self.a[i].clone()).collect();
        let licq = linalg::rank(&rows, self.n2) == active.len();
        let image = self.program.k_image(z)?;
        let singleton = image.pieces().iter().all(|piece| piece.set_eq(&ConvexPolyhedron::point(lambda)));
        Ok(MultiplierConditions { strict_mf, licq, singleton, active })
    }

    /// Lower-level objective `½yᵀQy + xᵀPy + cᵀy`.
    pub fn lower_objective(&self, x: &[S], y: &[S]) -> S {
        let qy = linalg::mat_vec(&self.q, y);
        let py = linalg::mat_vec(&self.p, y);
        dot(&qy, y) / S::int(2) + dot(x, &py) + dot(&self.c, y)
    }
}

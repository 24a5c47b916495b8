use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{contains_union, limiting_normal_cone, union_eq, ConvexPolyhedron, PolyUnion};
use crate::mappings::PolyMapping;
use crate::scalar::{format_vector, Scalar};
use crate::stationarity::{CheckKind, ImplicitProgram, Objective, Session, Structure};
use crate::system::DisjunctiveSystem;

/// Largest dimension accepted; `D_κ` has `C(n,κ)` pieces and `gph G` has `2ⁿ`.
pub const CCMP_MAX_N: usize = 4;

/// `min f(z)  s.t.  ‖z‖₀ ≤ κ,  z ∈ M`, with the cardinality constraint
/// expressed through implicit variables `λ ∈ [0,1]ⁿ`, `eᵀλ ≥ n−κ` and the
/// per-coordinate complementarity set `𝒞 = {(a,b) : ab = 0, b ∈ [0,1]}`.
#[derive(Debug, Clone)]
pub struct Ccmp<S> {
    n: usize,
    kappa: usize,
    program: ImplicitProgram<S>,
}

fn unit<S: Scalar>(len: usize, j: usize) -> Vec<S> {
    let mut v = vec![S::zero(); len];
    v[j] = S::one();
    v
}

fn neg_unit<S: Scalar>(len: usize, j: usize) -> Vec<S> {
    let mut v = vec![S::zero(); len];
    v[j] = -S::one();
    v
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize == k {
            out.push((0..n).filter(|i| mask & (1 << i) != 0).collect());
        }
    }
    out
}

impl<S: Scalar> Ccmp<S> {
    pub fn new(n: usize, kappa: usize, objective: Objective<S>, m_set: Option<PolyUnion<S>>) -> Result<Self> {
        if n < 2 || n > CCMP_MAX_N {
            return Err(Error::Resource(format!("cardinality problems are limited to 2 ≤ n ≤ {CCMP_MAX_N}, got {n}")));
        }
        if kappa < 1 || kappa > n - 1 {
            return Err(Error::pre(format!("κ must lie in 1..={}, got {kappa}", n - 1)));
        }
        let m_set = m_set.unwrap_or_else(|| PolyUnion::single(ConvexPolyhedron::universe(n)));

        // gph F = {(z, λ) : eᵀλ ≥ n − κ}
        let mut row = vec![S::zero(); n];
        row.extend(vec![-S::one(); n]);
        let f_graph = ConvexPolyhedron::universe(2 * n).with_ineq(row, -S::int((n - kappa) as i64));
        let f = PolyMapping::new(n, n, PolyUnion::single(f_graph))?;

        // gph G over (z, λ, a₁, b₁, …, aₙ, bₙ): (zᵢ + aᵢ, λᵢ + bᵢ) ∈ 𝒞
        let dim = 4 * n;
        let a = |i: usize| 2 * n + 2 * i;
        let b = |i: usize| 2 * n + 2 * i + 1;
        let mut pieces = Vec::new();
        for mask in 0u32..(1 << n) {
            let mut p = ConvexPolyhedron::universe(dim);
            for i in 0..n {
                let mut lb = unit::<S>(dim, n + i);
                lb[b(i)] = S::one();
                if mask & (1 << i) == 0 {
                    let mut za = unit::<S>(dim, i);
                    za[a(i)] = S::one();
                    p.push_eq(za, S::zero());
                    p.push_ineq(lb.clone(), S::one());
                    p.push_ineq(lb.iter().map(|x| -x.clone()).collect(), S::zero());
                } else {
                    p.push_eq(lb, S::zero());
                }
            }
            pieces.push(p);
        }
        let g = PolyMapping::new(2 * n, 2 * n, PolyUnion::new(dim, pieces)?)?;
        let literal = ImplicitProgram::new(objective, f, g, m_set, Some(Structure::SmoothMinusSet))?;
        let mut ccmp = Ccmp { n, kappa, program: literal };
        ccmp.program = ccmp.literal_program().with_feasibility_map(ccmp.disjunctive_map()?)?;
        Ok(ccmp)
    }

    /// `H(z) = D_κ − z`, the feasibility map of the disjunctive
    /// reformulation. The program uses it for the implicit conditions.
    pub fn disjunctive_map(&self) -> Result<PolyMapping<S>> {
        let n = self.n;
        let t: Vec<Vec<S>> = (0..n)
            .map(|i| {
                let mut r = vec![S::zero(); 2 * n];
                r[i] = S::one();
                r[n + i] = S::one();
                r
            })
            .collect();
        PolyMapping::new(n, n, self.d_kappa().pullback(2 * n, &t, None)?)
    }

    /// The program with `H` left as the union of `G(z,·)` over `F(z)`.
    /// Its coderivative at `z̄ = 0` is larger than that of `D_κ − z`, so the
    /// implicit conditions become weaker.
    pub fn literal_program(&self) -> ImplicitProgram<S> {
        let p = &self.program;
        ImplicitProgram::new(p.objective().clone(), p.f().clone(), p.g().clone(), p.m_set().clone(), p.structure())
            .expect("data already validated")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kappa(&self) -> usize {
        self.kappa
    }

    pub fn program(&self) -> &ImplicitProgram<S> {
        &self.program
    }

    /// `{z : ‖z‖₀ ≤ κ}` as one coordinate subspace per support.
    pub fn d_kappa(&self) -> PolyUnion<S> {
        let n = self.n;
        let pieces = subsets(n, self.kappa)
            .into_iter()
            .map(|support| {
                let mut p = ConvexPolyhedron::universe(n);
                for j in (0..n).filter(|j| !support.contains(j)) {
                    p.push_eq(unit(n, j), S::zero());
                }
                p
            })
            .collect();
        PolyUnion::new(n, pieces).expect("nonempty subspaces")
    }

    fn support(&self, z: &[S]) -> Result<Vec<usize>> {
        if z.len() != self.n {
            return Err(Error::dim("point has the wrong length"));
        }
        let s: Vec<usize> = (0..self.n).filter(|&i| !z[i].is_zero()).collect();
        if s.len() > self.kappa {
            return Err(Error::pre(format!("{} has more than κ = {} nonzeros", format_vector(z), self.kappa)));
        }
        Ok(s)
    }

    /// `K(z) = {λ ∈ [0,1]ⁿ : Σ_{I⁰(z)} λᵢ ≥ n−κ, λᵢ = 0 on I^±(z)}`.
    pub fn k_closed_form(&self, z: &[S]) -> Result<ConvexPolyhedron<S>> {
        let support = self.support(z)?;
        let n = self.n;
        let mut p = ConvexPolyhedron::universe(n);
        let mut sum = vec![S::zero(); n];
        for i in 0..n {
            p.push_ineq(unit(n, i), S::one());
            p.push_ineq(neg_unit(n, i), S::zero());
            if support.contains(&i) {
                p.push_eq(unit(n, i), S::zero());
            } else {
                sum[i] = -S::one();
            }
        }
        p.push_ineq(sum, -S::int((n - self.kappa) as i64));
        Ok(p)
    }

    /// `N_{D_κ}(z) = {ν : ‖ν‖₀ ≤ n−κ, νᵢ = 0 on I^±(z)}`.
    pub fn normal_cone_closed_form(&self, z: &[S]) -> Result<PolyUnion<S>> {
        let support = self.support(z)?;
        let n = self.n;
        let zeros: Vec<usize> = (0..n).filter(|i| !support.contains(i)).collect();
        let k = (n - self.kappa).min(zeros.len());
        let pieces = subsets(zeros.len(), k)
            .into_iter()
            .map(|pick| {
                let free: Vec<usize> = pick.iter().map(|&j| zeros[j]).collect();
                let mut p = ConvexPolyhedron::universe(n);
                for j in (0..n).filter(|j| !free.contains(j)) {
                    p.push_eq(unit(n, j), S::zero());
                }
                p
            })
            .collect();
        PolyUnion::new(n, pieces)
    }

    /// `0 ∈ ∂f(z̄) + {ν : νᵢ = 0 on I^±(z̄)} + N_M(z̄)`.
    pub fn explicit_closed_form(&self, z: &[S]) -> Result<bool> {
        let support = self.support(z)?;
        let n = self.n;
        let session = Session::new(&self.program, z)?;
        let total = 3 * n;
        let mut sys = DisjunctiveSystem::new(total);
        let grad = session.subdifferential().pullback(total, &crate::linalg::block_selector(0, n, total), None)?;
        sys.add_polyhedron(&grad)?;
        for &i in &support {
            sys.fix(n + i, S::zero());
        }
        sys.add_block_on(&(2 * n..3 * n).map(|c| (c, false)).collect::<Vec<_>>(), session.normal_cone_m())?;
        sys.add_linear_identity(n, &[(S::one(), 0), (S::one(), n), (S::one(), 2 * n)], &vec![S::zero(); n]);
        Ok(sys.find_solution().is_some())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CcmpCrossCheck {
    pub point: Vec<String>,
    /// Closed-form `N_{D_κ}(z̄)` equals the engine's limiting normal cone.
    pub normal_cone_equal: bool,
    /// Closed-form `K(z̄)` equals the image of the derived map `K`.
    pub k_equal: bool,
    /// `dom K` equals `D_κ ∩ M`.
    pub domain_equal: bool,
    pub strata: usize,
    /// Explicit verdicts per stratum.
    pub explicit_per_stratum: Vec<bool>,
    /// The explicit verdict does not depend on the stratum.
    pub explicit_uniform: bool,
    /// It also agrees with the closed-form explicit system.
    pub explicit_matches_closed_form: bool,
    pub k_locally_bounded: bool,
}

impl CcmpCrossCheck {
    pub fn all_pass(&self) -> bool {
        self.normal_cone_equal
            && self.k_equal
            && self.domain_equal
            && self.explicit_uniform
            && self.explicit_matches_closed_form
            && self.k_locally_bounded
    }
}

pub fn ccmp_cross_check<S: Scalar>(ccmp: &Ccmp<S>, z: &[S]) -> Result<CcmpCrossCheck> {
    let program = ccmp.program();
    program.require_feasible(z)?;
    let d = ccmp.d_kappa();
    let engine_normal = limiting_normal_cone(&d, z)?;
    let closed_normal = ccmp.normal_cone_closed_form(z)?;
    let normal_cone_equal = contains_union(&engine_normal, &closed_normal)? && contains_union(&closed_normal, &engine_normal)?;
    let k_engine = program.k_image(z)?;
    let k_closed = PolyUnion::single(ccmp.k_closed_form(z)?);
    let k_equal = union_eq(&k_engine, &k_closed)?;
    let dom = program.derived().k.domain()?;
    let domain_equal = union_eq(&dom.intersect(program.m_set())?, &d.intersect(program.m_set())?)?;
    let session = Session::new(program, z)?;
    let verdict = session.check(CheckKind::Explicit, None)?;
    let explicit_per_stratum: Vec<bool> = verdict.strata.iter().map(|v| v.holds).collect();
    let explicit_uniform = explicit_per_stratum.windows(2).all(|w| w[0] == w[1]);
    let closed = ccmp.explicit_closed_form(z)?;
    let explicit_matches_closed_form = explicit_per_stratum.iter().all(|&h| h == closed);
    Ok(CcmpCrossCheck {
        point: crate::scalar::to_strings(z),
        normal_cone_equal,
        k_equal,
        domain_equal,
        strata: explicit_per_stratum.len(),
        explicit_per_stratum,
        explicit_uniform,
        explicit_matches_closed_form,
        k_locally_bounded: program.derived().k.locally_bounded_at(z)?,
    })
}

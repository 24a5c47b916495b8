use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{hyperplanes_of, project_union_out, strata_within, ConvexPolyhedron, Hyperplane, PolyUnion, PolyUnionDto, Sign};
use crate::mappings::{PolyMapping, PolyMappingDto};
use crate::scalar::{format_vector, Scalar};
use crate::stationarity::objective::{Objective, ObjectiveDto};

/// Extra structure of `G` that the implication pipeline can exploit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Structure {
    /// `G(z,λ) = g(z,λ) − Θ` with `g` smooth.
    SmoothMinusSet,
    /// `G(z,λ) = G̃(λ) + g̃(z)` with `g̃` smooth.
    AdditiveSplit,
}

/// `min f(z)  s.t.  0 ∈ G(z,λ) for some λ ∈ F(z),  z ∈ M`.
#[derive(Debug, Clone)]
pub struct ImplicitProgram<S> {
    n: usize,
    m: usize,
    s: usize,
    objective: Objective<S>,
    f: PolyMapping<S>,
    g: PolyMapping<S>,
    m_set: PolyUnion<S>,
    structure: Option<Structure>,
    /// Set when `H` was replaced by a mapping with the same zero set.
    custom_h: bool,
    derived: DerivedMaps<S>,
}

/// Every mapping built from the program data. Coordinates:
///
/// | map | input | output |
/// |-----|-------|--------|
/// | `h` | `z` | `w` |
/// | `h_m` | `z` | `(w, u)` with `z − u ∈ M` |
/// | `cal_h` | `(z, λ)` | `(a, w)` with `λ + a ∈ F(z)`, `w ∈ G(z,λ)` |
/// | `cal_h_m` | `(z, λ)` | `(a, w, u)` |
/// | `frak_h_m` | `(z, λ)` | `(p_z, p_λ, q_z, q_λ, q_w, u)` |
/// | `hat_h` | `(z, w, λ)` | `(a, b)` with `λ + a ∈ F(z)`, `w + b ∈ G(z,λ)` |
/// | `k` | `z` | `λ` |
/// | `k_hat` | `(z, w)` | `λ` |
/// | `aux` | `(z, w)` | `(z', λ)` with `z' = z`, `λ ∈ F(z)`, `w ∈ G(z,λ)` |
#[derive(Debug, Clone)]
pub struct DerivedMaps<S> {
    pub h: PolyMapping<S>,
    pub h_m: PolyMapping<S>,
    pub cal_h: PolyMapping<S>,
    pub cal_h_m: PolyMapping<S>,
    pub frak_h_m: PolyMapping<S>,
    pub hat_h: PolyMapping<S>,
    pub k: PolyMapping<S>,
    pub k_hat: PolyMapping<S>,
    pub aux: PolyMapping<S>,
}

/// A linear expression list: each entry lists `(variable, coefficient)`.
type Rows = Vec<Vec<(usize, i64)>>;

fn dense<S: Scalar>(rows: &Rows, total: usize) -> Vec<Vec<S>> {
    rows.iter()
        .map(|r| {
            let mut out = vec![S::zero(); total];
            for &(j, c) in r {
                out[j] = out[j].clone() + S::int(c);
            }
            out
        })
        .collect()
}

fn lift<S: Scalar>(u: &PolyUnion<S>, total: usize, rows: &Rows) -> Result<PolyUnion<S>> {
    u.pullback(total, &dense(rows, total), None)
}

fn ident(start: usize, len: usize) -> Rows {
    (start..start + len).map(|j| vec![(j, 1)]).collect()
}

/// `x − y` coordinatewise for blocks starting at `x` and `y`.
fn diff(x: usize, y: usize, len: usize) -> Rows {
    (0..len).map(|i| vec![(x + i, 1), (y + i, -1)]).collect()
}

fn sum(x: usize, y: usize, len: usize) -> Rows {
    (0..len).map(|i| vec![(x + i, 1), (y + i, 1)]).collect()
}

fn zero_rows(len: usize) -> Rows {
    vec![Vec::new(); len]
}

fn cat(parts: Vec<Rows>) -> Rows {
    parts.into_iter().flatten().collect()
}

fn intersect_all<S: Scalar>(parts: Vec<PolyUnion<S>>) -> Result<PolyUnion<S>> {
    let mut it = parts.into_iter();
    let mut acc = it.next().expect("at least one part");
    for p in it {
        acc = acc.intersect(&p)?;
    }
    Ok(acc)
}

impl<S: Scalar> DerivedMaps<S> {
    /// `H_M(z) = H(z) × (z − M)` over `(z, w, u)`.
    fn h_m_of(h: &PolyMapping<S>, mset: &PolyUnion<S>) -> Result<PolyMapping<S>> {
        let (n, s) = (h.n_in(), h.n_out());
        let t = n + s + n;
        let graph = intersect_all(vec![lift(h.graph(), t, &ident(0, n + s))?, lift(mset, t, &diff(0, n + s, n))?])?;
        PolyMapping::new(n, s + n, graph)
    }

    fn build(n: usize, m: usize, s: usize, f: &PolyUnion<S>, g: &PolyUnion<S>, mset: &PolyUnion<S>) -> Result<Self> {
        // k: (z, λ)
        let t = n + m;
        let k_graph = intersect_all(vec![lift(f, t, &ident(0, t))?, lift(g, t, &cat(vec![ident(0, t), zero_rows(s)]))?])?;
        let k = PolyMapping::new(n, m, k_graph)?;

        // k_hat: (z, w, λ)
        let t = n + s + m;
        let zl = cat(vec![ident(0, n), ident(n + s, m)]);
        let k_hat_graph =
            intersect_all(vec![lift(f, t, &zl)?, lift(g, t, &cat(vec![zl.clone(), ident(n, s)]))?])?;
        let k_hat = PolyMapping::new(n + s, m, k_hat_graph.clone())?;

        // h: project λ out of gph K̂
        let h_graph = project_union_out(&k_hat_graph, &(n + s..t).collect::<Vec<_>>())?.simplify();
        let h = PolyMapping::new(n, s, h_graph.clone())?;

        let h_m = Self::h_m_of(&h, mset)?;

        // cal_h: (z, λ, a, w)
        let t = n + 2 * m + s;
        let f_shift = cat(vec![ident(0, n), sum(n, n + m, m)]);
        let g_rows = cat(vec![ident(0, n + m), ident(n + 2 * m, s)]);
        let cal_h_graph = intersect_all(vec![lift(f, t, &f_shift)?, lift(g, t, &g_rows)?])?;
        let cal_h = PolyMapping::new(n + m, m + s, cal_h_graph.clone())?;

        // cal_h_m: (z, λ, a, w, u)
        let t = n + 2 * m + s + n;
        let cal_h_m_graph = intersect_all(vec![
            lift(&cal_h_graph, t, &ident(0, n + 2 * m + s))?,
            lift(mset, t, &diff(0, n + 2 * m + s, n))?,
        ])?;
        let cal_h_m = PolyMapping::new(n + m, m + s + n, cal_h_m_graph)?;

        // frak_h_m: (z, λ, p_z, p_λ, q_z, q_λ, q_w, u)
        let (p0, q0) = (n + m, 2 * (n + m));
        let u0 = q0 + n + m + s;
        let t = u0 + n;
        let q_w: Rows = (0..s).map(|i| vec![(q0 + n + m + i, -1)]).collect();
        let frak_graph = intersect_all(vec![
            lift(f, t, &diff(0, p0, n + m))?,
            lift(g, t, &cat(vec![diff(0, q0, n + m), q_w]))?,
            lift(mset, t, &diff(0, u0, n))?,
        ])?;
        let frak_h_m = PolyMapping::new(n + m, 2 * (n + m) + s + n, frak_graph)?;

        // hat_h: (z, w, λ, a, b)
        let (w0, l0, a0, b0) = (n, n + s, n + s + m, n + s + 2 * m);
        let t = b0 + s;
        let hat_graph = intersect_all(vec![
            lift(f, t, &cat(vec![ident(0, n), sum(l0, a0, m)]))?,
            lift(g, t, &cat(vec![ident(0, n), ident(l0, m), sum(w0, b0, s)]))?,
        ])?;
        let hat_h = PolyMapping::new(n + s + m, m + s, hat_graph)?;

        // aux: (z, w, z', λ)
        let t = n + s + n + m;
        let mut aux_base = ConvexPolyhedron::universe(t);
        for row in dense::<S>(&diff(0, n + s, n), t) {
            aux_base.push_eq(row, S::zero());
        }
        let zl = cat(vec![ident(0, n), ident(n + s + n, m)]);
        let aux_graph = intersect_all(vec![
            PolyUnion::single(aux_base),
            lift(f, t, &zl)?,
            lift(g, t, &cat(vec![zl.clone(), ident(n, s)]))?,
        ])?;
        let aux = PolyMapping::new(n + s, n + m, aux_graph)?;

        Ok(DerivedMaps { h, h_m, cal_h, cal_h_m, frak_h_m, hat_h, k, k_hat, aux })
    }
}

/// One stratum of `K(z̄)`: a representative and its sign vector with
/// respect to the boundary hyperplanes of the `F` and `G` slices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KStratum<S> {
    pub id: usize,
    pub signs: Vec<Sign>,
    pub representative: Vec<S>,
}

impl<S: Scalar> ImplicitProgram<S> {
    pub fn new(
        objective: Objective<S>,
        f: PolyMapping<S>,
        g: PolyMapping<S>,
        m_set: PolyUnion<S>,
        structure: Option<Structure>,
    ) -> Result<Self> {
        objective.validate()?;
        let n = f.n_in();
        let m = f.n_out();
        if g.n_in() != n + m {
            return Err(Error::dim(format!("G takes {} inputs, expected n + m = {}", g.n_in(), n + m)));
        }
        if m_set.dim() != n || objective.dim() != n {
            return Err(Error::dim("objective or M does not live in the space of z"));
        }
        let s = g.n_out();
        let derived = DerivedMaps::build(n, m, s, f.graph(), g.graph(), &m_set)?;
        Ok(ImplicitProgram { n, m, s, objective, f, g, m_set, structure, custom_h: false, derived })
    }

    /// Replaces the feasibility map `H(z) = ⋃_{λ∈F(z)} G(z,λ)` by another
    /// polyhedral `H'` with `H'⁻¹(0) = dom K`. Implicit M-stationarity, the
    /// first Mordukhovich criterion and the range condition then refer to `H'`.
    pub fn with_feasibility_map(mut self, h: PolyMapping<S>) -> Result<Self> {
        if h.n_in() != self.n {
            return Err(Error::dim(format!("H must take {} inputs", self.n)));
        }
        let z_coords: Vec<usize> = (0..self.n).collect();
        let fixed: Vec<(usize, S)> = (0..h.n_out()).map(|i| (self.n + i, S::zero())).collect();
        let zeros = PolyUnion::possibly_empty(self.n, crate::mappings::slice_pieces(h.graph(), &z_coords, &fixed)?)?;
        if !crate::geometry::union_eq(&zeros, &self.derived.k.domain()?)? {
            return Err(Error::pre("the zero set of H differs from the domain of K"));
        }
        self.derived.h_m = DerivedMaps::h_m_of(&h, &self.m_set)?;
        self.derived.h = h;
        self.custom_h = true;
        Ok(self)
    }

    /// Whether `H` was supplied through [`Self::with_feasibility_map`].
    pub fn has_custom_feasibility_map(&self) -> bool {
        self.custom_h
    }

    /// Output dimension of `H`; equals `s` unless `H` was replaced.
    pub fn h_dim(&self) -> usize {
        self.derived.h.n_out()
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn s(&self) -> usize {
        self.s
    }
    pub fn objective(&self) -> &Objective<S> {
        &self.objective
    }
    pub fn f(&self) -> &PolyMapping<S> {
        &self.f
    }
    pub fn g(&self) -> &PolyMapping<S> {
        &self.g
    }
    pub fn m_set(&self) -> &PolyUnion<S> {
        &self.m_set
    }
    pub fn structure(&self) -> Option<Structure> {
        self.structure
    }
    pub fn derived(&self) -> &DerivedMaps<S> {
        &self.derived
    }

    pub fn k_image(&self, z: &[S]) -> Result<PolyUnion<S>> {
        self.derived.k.image_at(z)
    }

    /// `z ∈ M` and `K(z) ≠ ∅`.
    pub fn is_feasible(&self, z: &[S]) -> Result<bool> {
        if z.len() != self.n {
            return Err(Error::dim("point has the wrong length"));
        }
        Ok(self.m_set.contains(z) && !self.k_image(z)?.is_empty())
    }

    pub(crate) fn require_feasible(&self, z: &[S]) -> Result<()> {
        if !self.is_feasible(z)? {
            return Err(Error::pre(format!("{} is not feasible", format_vector(z))));
        }
        Ok(())
    }

    /// `λ ∈ F(z)` and `0 ∈ G(z,λ)`.
    pub fn is_multiplier(&self, z: &[S], lambda: &[S]) -> bool {
        lambda.len() == self.m && self.derived.k.contains(z, lambda)
    }

    /// `(z, λ)` is feasible for the problem with explicit `λ`.
    pub fn is_feasible_explicit(&self, z: &[S], lambda: &[S]) -> bool {
        self.m_set.contains(z) && self.is_multiplier(z, lambda)
    }

    /// Slices of `gph F` at `z` and of `gph G` at `(z, ·, 0)`, as pieces over `λ`.
    fn k_slices(&self, z: &[S]) -> Result<(Vec<ConvexPolyhedron<S>>, Vec<ConvexPolyhedron<S>>)> {
        let (n, m) = (self.n, self.m);
        let lam: Vec<usize> = (n..n + m).collect();
        let fixed_z: Vec<(usize, S)> = z.iter().cloned().enumerate().collect();
        let fs = crate::mappings::slice_pieces(self.f.graph(), &lam, &fixed_z)?;
        let mut fixed_g = fixed_z;
        fixed_g.extend((0..self.s).map(|i| (n + m + i, S::zero())));
        let gs = crate::mappings::slice_pieces(self.g.graph(), &lam, &fixed_g)?;
        Ok((fs, gs))
    }

    fn k_arrangement(&self, z: &[S]) -> Result<(Vec<Hyperplane<S>>, PolyUnion<S>)> {
        let (fs, gs) = self.k_slices(z)?;
        let mut region = Vec::new();
        for p in &fs {
            for q in &gs {
                region.push(p.intersect(q)?);
            }
        }
        let mut defining = fs;
        defining.extend(gs);
        Ok((hyperplanes_of(&defining), PolyUnion::possibly_empty(self.m, region)?))
    }

    /// One relative-interior representative per stratum of `K(z)`.
    pub fn k_strata(&self, z: &[S]) -> Result<Vec<KStratum<S>>> {
        if z.len() != self.n {
            return Err(Error::dim("point has the wrong length"));
        }
        let (hs, region) = self.k_arrangement(z)?;
        if region.is_empty() {
            return Err(Error::pre(format!("{} is not in dom K", format_vector(z))));
        }
        Ok(strata_within(&hs, &region)
            .into_iter()
            .enumerate()
            .map(|(id, s)| KStratum { id, signs: s.signs, representative: s.representative })
            .collect())
    }

    /// The stratum of `K(z)` containing `λ`.
    pub fn stratum_of(&self, z: &[S], lambda: &[S]) -> Result<Option<usize>> {
        if !self.is_multiplier(z, lambda) {
            return Err(Error::pre(format!("{} is not in K({})", format_vector(lambda), format_vector(z))));
        }
        let (hs, _) = self.k_arrangement(z)?;
        let signs: Vec<Sign> = hs.iter().map(|h| h.side(lambda)).collect();
        Ok(self.k_strata(z)?.into_iter().find(|s| s.signs == signs).map(|s| s.id))
    }

    /// Convex data: one piece for each of `gph F`, `gph G`, `M` and a convex objective.
    pub fn is_convex(&self) -> bool {
        self.f.graph().pieces().len() == 1
            && self.g.graph().pieces().len() == 1
            && self.m_set.pieces().len() == 1
            && self.objective.is_convex()
    }

    pub fn to_dto(&self) -> ProgramDto {
        ProgramDto {
            objective: self.objective.to_dto(),
            f: PolyMappingDto::from(&self.f),
            g: PolyMappingDto::from(&self.g),
            m_set: PolyUnionDto::from(&self.m_set),
            structure: self.structure,
            h: self.custom_h.then(|| PolyMappingDto::from(&self.derived.h)),
        }
    }
}

/// Generic program file: all data given explicitly.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProgramDto {
    pub objective: ObjectiveDto,
    #[serde(rename = "F")]
    pub f: PolyMappingDto,
    #[serde(rename = "G")]
    pub g: PolyMappingDto,
    #[serde(rename = "M")]
    pub m_set: PolyUnionDto,
    #[serde(default)]
    pub structure: Option<Structure>,
    /// Optional replacement for the feasibility map `H`.
    #[serde(rename = "H", default, skip_serializing_if = "Option::is_none")]
    pub h: Option<PolyMappingDto>,
}

impl ProgramDto {
    pub fn to_program<S: Scalar>(&self) -> Result<ImplicitProgram<S>> {
        let p = ImplicitProgram::new(
            self.objective.to_objective()?,
            self.f.to_mapping()?,
            self.g.to_mapping()?,
            self.m_set.to_union()?,
            self.structure,
        )?;
        match &self.h {
            Some(h) => p.with_feasibility_map(h.to_mapping()?),
            None => Ok(p),
        }
    }
}

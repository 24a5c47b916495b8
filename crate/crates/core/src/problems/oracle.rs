//! Brute-force grid oracle comparing minimizers of the implicit problem
//! (over `z`) and the explicit problem (over `(z, λ)`).

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{ConvexPolyhedron, PolyUnion};
use crate::scalar::{format_vector, to_strings, Scalar};
use crate::stationarity::ImplicitProgram;

/// Upper bound on the number of grid points enumerated in one pass.
pub const GRID_MAX_POINTS: usize = 4_000_000;

/// Anything the oracle can query: objective values and exact feasibility.
pub trait ProgramOracle<S>: Sync {
    fn n(&self) -> usize;
    fn m(&self) -> usize;
    fn objective_value(&self, z: &[S]) -> S;
    /// `z ∈ M` and `K(z) ≠ ∅`.
    fn p_feasible(&self, z: &[S]) -> Result<bool>;
    /// `z ∈ M`, `λ ∈ F(z)` and `0 ∈ G(z, λ)`.
    fn q_feasible(&self, z: &[S], lambda: &[S]) -> bool;
    /// A set known to contain every `λ` with `q_feasible(z, λ)`, used to
    /// prune the scan. `None` scans the whole `λ`-box.
    fn lambda_candidates(&self, _z: &[S]) -> Result<Option<PolyUnion<S>>> {
        Ok(None)
    }
}

impl<S: Scalar> ProgramOracle<S> for ImplicitProgram<S> {
    fn n(&self) -> usize {
        ImplicitProgram::n(self)
    }
    fn m(&self) -> usize {
        ImplicitProgram::m(self)
    }
    fn objective_value(&self, z: &[S]) -> S {
        self.objective().value(z)
    }
    fn p_feasible(&self, z: &[S]) -> Result<bool> {
        self.is_feasible(z)
    }
    fn q_feasible(&self, z: &[S], lambda: &[S]) -> bool {
        self.is_feasible_explicit(z, lambda)
    }
    fn lambda_candidates(&self, z: &[S]) -> Result<Option<PolyUnion<S>>> {
        if !self.m_set().contains(z) {
            return Ok(Some(PolyUnion::empty(self.m())));
        }
        self.k_image(z).map(Some)
    }
}

/// Axis-aligned grid `lo + step·i` with `lo + step·i ≤ hi`.
#[derive(Debug, Clone)]
pub struct GridAxes<S> {
    lo: Vec<S>,
    step: S,
    counts: Vec<usize>,
}

impl<S: Scalar> GridAxes<S> {
    pub fn new(lo: &[S], hi: &[S], step: &S) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::dim("box bounds differ in length"));
        }
        if !step.is_positive() {
            return Err(Error::pre("grid step must be positive"));
        }
        let mut counts = Vec::with_capacity(lo.len());
        for (l, h) in lo.iter().zip(hi) {
            if h < l {
                return Err(Error::pre(format!("empty box side [{l}, {h}]")));
            }
            // nonnegative, so truncation is the floor
            let k = ((h.clone() - l.clone()) / step.clone()).to_usize();
            let k = k.ok_or_else(|| Error::Resource("grid side too long".into()))?;
            counts.push(k + 1);
        }
        Ok(GridAxes { lo: lo.to_vec(), step: step.clone(), counts })
    }

    pub fn dim(&self) -> usize {
        self.counts.len()
    }

    /// Number of grid points, saturating.
    pub fn len(&self) -> usize {
        self.counts.iter().fold(1usize, |acc, &c| acc.saturating_mul(c))
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for k in (0..self.dim()).rev() {
            idx[k] = flat % self.counts[k];
            flat /= self.counts[k];
        }
        idx
    }

    pub fn coords(&self, idx: &[usize]) -> Vec<S> {
        idx.iter().zip(&self.lo).map(|(&i, l)| l.clone() + self.step.clone() * S::int(i as i64)).collect()
    }

    pub fn point(&self, flat: usize) -> Vec<S> {
        self.coords(&self.index(flat))
    }

    /// Index of `x` if it is a grid point.
    pub fn locate(&self, x: &[S]) -> Option<Vec<usize>> {
        if x.len() != self.dim() {
            return None;
        }
        x.iter()
            .zip(&self.lo)
            .zip(&self.counts)
            .map(|((v, l), &c)| {
                let q = (v.clone() - l.clone()) / self.step.clone();
                let i = q.to_usize()?;
                (S::int(i as i64) == q && i < c).then_some(i)
            })
            .collect()
    }
}

/// Box over `(z, λ)`, a step and a locality radius in multiples of the step.
#[derive(Debug, Clone)]
pub struct GridOracleConfig<S> {
    pub lo: Vec<S>,
    pub hi: Vec<S>,
    pub step: S,
    pub radius: usize,
}

impl<S: Scalar> GridOracleConfig<S> {
    /// The same interval `[lo, hi]` on each of `dim` coordinates.
    pub fn cube(dim: usize, lo: S, hi: S, step: S, radius: usize) -> Self {
        GridOracleConfig { lo: vec![lo; dim], hi: vec![hi; dim], step, radius }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridRow<S> {
    pub point: Vec<S>,
    pub value: S,
    pub local_min: bool,
    pub global_min: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct GridRowDto {
    pub point: Vec<String>,
    pub feasible: bool,
    pub local_min: bool,
    pub global_min: bool,
}

#[derive(Debug, Clone)]
pub struct GridSummary<S> {
    pub grid_points: usize,
    /// Feasible grid points only, in grid order.
    pub rows: Vec<GridRow<S>>,
    pub min_value: S,
}

impl<S: Scalar> GridSummary<S> {
    pub fn row(&self, x: &[S]) -> Option<&GridRow<S>> {
        self.rows.iter().find(|r| r.point == x)
    }

    pub fn local_minimizers(&self) -> Vec<&[S]> {
        self.rows.iter().filter(|r| r.local_min).map(|r| r.point.as_slice()).collect()
    }

    pub fn global_minimizers(&self) -> Vec<&[S]> {
        self.rows.iter().filter(|r| r.global_min).map(|r| r.point.as_slice()).collect()
    }

    pub fn table(&self) -> Vec<GridRowDto> {
        self.rows
            .iter()
            .map(|r| GridRowDto { point: to_strings(&r.point), feasible: true, local_min: r.local_min, global_min: r.global_min })
            .collect()
    }
}

/// Grid-scale comparison of the minimizers of both problems.
#[derive(Debug, Clone)]
pub struct RelationReport<S> {
    pub n: usize,
    pub m: usize,
    pub step: S,
    pub radius: usize,
    pub p: GridSummary<S>,
    pub q: GridSummary<S>,
    /// Global minimizers of the implicit problem without a partner among
    /// the explicit global minimizers.
    pub global_missing_in_q: Vec<Vec<S>>,
    /// `z`-parts of explicit global minimizers that are not implicit ones.
    pub global_missing_in_p: Vec<Vec<S>>,
    /// `(z, λ)` explicit-feasible with `z` an implicit local minimizer but
    /// `(z, λ)` not an explicit local minimizer.
    pub direction_violations: Vec<(Vec<S>, Vec<S>)>,
    /// `(z, λ)` explicit local minimizer with `z` not an implicit one.
    pub counterexamples: Vec<(Vec<S>, Vec<S>)>,
}

impl<S: Scalar> RelationReport<S> {
    pub fn global_correspondence(&self) -> bool {
        self.global_missing_in_q.is_empty() && self.global_missing_in_p.is_empty()
    }

    pub fn is_p_local(&self, z: &[S]) -> bool {
        self.p.row(z).is_some_and(|r| r.local_min)
    }

    pub fn is_p_global(&self, z: &[S]) -> bool {
        self.p.row(z).is_some_and(|r| r.global_min)
    }

    pub fn is_q_local(&self, z: &[S], lambda: &[S]) -> bool {
        self.q.row(&[z, lambda].concat()).is_some_and(|r| r.local_min)
    }

    pub fn is_q_global(&self, z: &[S], lambda: &[S]) -> bool {
        self.q.row(&[z, lambda].concat()).is_some_and(|r| r.global_min)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let pairs = |v: &[(Vec<S>, Vec<S>)]| -> Vec<serde_json::Value> {
            v.iter().map(|(z, l)| serde_json::json!({"z": to_strings(z), "lambda": to_strings(l)})).collect()
        };
        let points = |v: &[Vec<S>]| -> Vec<Vec<String>> { v.iter().map(|x| to_strings(x)).collect() };
        serde_json::json!({
            "step": self.step.to_string(),
            "radius": self.radius,
            "P": {
                "grid_points": self.p.grid_points,
                "min_value": self.p.min_value.to_string(),
                "table": self.p.table(),
            },
            "Q": {
                "grid_points": self.q.grid_points,
                "min_value": self.q.min_value.to_string(),
                "table": self.q.table(),
            },
            "global_correspondence": self.global_correspondence(),
            "global_missing_in_q": points(&self.global_missing_in_q),
            "global_missing_in_p": points(&self.global_missing_in_p),
            "direction_violations": pairs(&self.direction_violations),
            "counterexamples": pairs(&self.counterexamples),
        })
    }
}

/// Grid-local minimality: no feasible grid point within `radius` steps in
/// the max-norm has a smaller objective value.
fn summarize<S: Scalar>(
    axes: &GridAxes<S>,
    feasible: Vec<(Vec<usize>, Vec<S>, S)>,
    radius: usize,
    what: &str,
) -> Result<GridSummary<S>> {
    let min_value = feasible
        .iter()
        .map(|(_, _, v)| v.clone())
        .min()
        .ok_or_else(|| Error::NoData(format!("no feasible grid point for {what}; refine the grid or enlarge the box")))?;
    let lookup: HashMap<&[usize], usize> = feasible.iter().enumerate().map(|(i, (idx, _, _))| (idx.as_slice(), i)).collect();
    let d = axes.dim();
    let r = radius as i64;
    let offsets_count = (2 * radius + 1).checked_pow(d as u32).unwrap_or(usize::MAX);
    let use_offsets = offsets_count <= feasible.len();
    let local: Vec<bool> = feasible
        .par_iter()
        .map(|(idx, _, v)| {
            if use_offsets {
                let mut off = vec![-r; d];
                loop {
                    let nb: Option<Vec<usize>> =
                        idx.iter().zip(&off).map(|(&i, &o)| usize::try_from(i as i64 + o).ok()).collect();
                    if let Some(j) = nb.as_deref().and_then(|nb| lookup.get(nb)) {
                        if feasible[*j].2 < *v {
                            return false;
                        }
                    }
                    let mut k = 0;
                    while k < d && off[k] == r {
                        off[k] = -r;
                        k += 1;
                    }
                    if k == d {
                        return true;
                    }
                    off[k] += 1;
                }
            } else {
                !feasible.iter().any(|(jdx, _, w)| {
                    w < v && idx.iter().zip(jdx).all(|(&a, &b)| (a as i64 - b as i64).abs() <= r)
                })
            }
        })
        .collect();
    let rows = feasible
        .into_iter()
        .zip(local)
        .map(|((_, point, value), local_min)| {
            let global_min = value == min_value;
            GridRow { point, value, local_min, global_min }
        })
        .collect();
    Ok(GridSummary { grid_points: axes.len(), rows, min_value })
}

fn scan<S, F>(axes: &GridAxes<S>, test: F) -> Result<Vec<(Vec<usize>, Vec<S>)>>
where
    S: Scalar,
    F: Fn(&[S]) -> Result<bool> + Sync,
{
    let total = axes.len();
    if total > GRID_MAX_POINTS {
        return Err(Error::Resource(format!("{total} grid points exceed the limit of {GRID_MAX_POINTS}")));
    }
    let hits: Vec<Option<(Vec<usize>, Vec<S>)>> = (0..total)
        .into_par_iter()
        .map(|flat| {
            let idx = axes.index(flat);
            let x = axes.coords(&idx);
            Ok(test(&x)?.then_some((idx, x)))
        })
        .collect::<Result<_>>()?;
    Ok(hits.into_iter().flatten().collect())
}

/// Grid index ranges of `piece ∩ box` along each axis, or `None` if empty.
fn index_ranges<S: Scalar>(axes: &GridAxes<S>, piece: &ConvexPolyhedron<S>) -> Option<Vec<(usize, usize)>> {
    let d = axes.dim();
    let hi: Vec<S> = axes.coords(&axes.counts.iter().map(|c| c - 1).collect::<Vec<_>>());
    let clipped = piece.intersect(&ConvexPolyhedron::boxed(&axes.lo, &hi)).ok()?;
    let mut out = Vec::with_capacity(d);
    for k in 0..d {
        let mut e = vec![S::zero(); d];
        e[k] = S::one();
        let up = clipped.sup(&e)?;
        let down = -clipped.sup(&crate::linalg::neg_vec(&e))?;
        let to_index = |v: S| (v - axes.lo[k].clone()) / axes.step.clone();
        // ceil of the lower bound, floor of the upper bound
        let lo_q = to_index(down);
        let mut lo_i = lo_q.to_usize().unwrap_or(0);
        if S::int(lo_i as i64) < lo_q {
            lo_i += 1;
        }
        let hi_i = to_index(up).to_usize().unwrap_or(0).min(axes.counts[k] - 1);
        if lo_i > hi_i {
            return None;
        }
        out.push((lo_i, hi_i));
    }
    Some(out)
}


/// Feasible points of the explicit problem. When the oracle supplies
/// candidate sets for `λ`, only grid points in their bounding boxes are
/// tested; every feasible point lies in one of them, so nothing is missed.
fn scan_q<S: Scalar, O: ProgramOracle<S> + ?Sized>(
    oracle: &O,
    p_axes: &GridAxes<S>,
    l_axes: &GridAxes<S>,
) -> Result<Vec<(Vec<usize>, Vec<S>)>> {
    let n = p_axes.dim();
    let per_z: Vec<Vec<(Vec<usize>, Vec<S>)>> = (0..p_axes.len())
        .into_par_iter()
        .map(|flat| -> Result<Vec<(Vec<usize>, Vec<S>)>> {
            let zi = p_axes.index(flat);
            let z = p_axes.coords(&zi);
            let mut hits = Vec::new();
            let mut test = |li: Vec<usize>| {
                let lambda = l_axes.coords(&li);
                if oracle.q_feasible(&z, &lambda) {
                    hits.push(([zi.clone(), li].concat(), [z.clone(), lambda].concat()));
                }
            };
            match oracle.lambda_candidates(&z)? {
                None => (0..l_axes.len()).for_each(|f| test(l_axes.index(f))),
                Some(u) => {
                    let mut seen = std::collections::HashSet::new();
                    for piece in u.pieces() {
                        let Some(ranges) = index_ranges(l_axes, piece) else { continue };
                        let mut li: Vec<usize> = ranges.iter().map(|r| r.0).collect();
                        loop {
                            if seen.insert(li.clone()) {
                                test(li.clone());
                            }
                            let mut k = 0;
                            while k < li.len() && li[k] == ranges[k].1 {
                                li[k] = ranges[k].0;
                                k += 1;
                            }
                            if k == li.len() {
                                break;
                            }
                            li[k] += 1;
                        }
                    }
                }
            }
            debug_assert!(hits.iter().all(|h| h.0.len() == n + l_axes.dim()));
            Ok(hits)
        })
        .collect::<Result<_>>()?;
    let mut all: Vec<_> = per_z.into_iter().flatten().collect();
    all.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(all)
}

/// Enumerate both problems on the grid and relate their minimizers.
pub fn oracle_relate<S: Scalar, O: ProgramOracle<S> + ?Sized>(oracle: &O, config: &GridOracleConfig<S>) -> Result<RelationReport<S>> {
    let (n, m) = (oracle.n(), oracle.m());
    if config.lo.len() != n + m || config.hi.len() != n + m {
        return Err(Error::dim(format!("the box needs {} coordinates (z then λ)", n + m)));
    }
    if config.radius == 0 {
        return Err(Error::pre("locality radius must be at least one step"));
    }
    let p_axes = GridAxes::new(&config.lo[..n], &config.hi[..n], &config.step)?;
    let q_axes = GridAxes::new(&config.lo, &config.hi, &config.step)?;
    let l_axes = GridAxes::new(&config.lo[n..], &config.hi[n..], &config.step)?;
    if q_axes.len() > GRID_MAX_POINTS {
        return Err(Error::Resource(format!("{} grid points exceed the limit of {GRID_MAX_POINTS}", q_axes.len())));
    }

    let p_hits = scan(&p_axes, |z| oracle.p_feasible(z))?;
    let p_feasible = p_hits.into_iter().map(|(i, z)| (i, z.clone(), oracle.objective_value(&z))).collect();
    let p = summarize(&p_axes, p_feasible, config.radius, "the implicit problem")?;

    let q_hits = scan_q(oracle, &p_axes, &l_axes)?;
    let q_feasible = q_hits.into_iter().map(|(i, x)| (i, x.clone(), oracle.objective_value(&x[..n]))).collect();
    let q = summarize(&q_axes, q_feasible, config.radius, "the explicit problem")?;

    let p_rows: HashMap<&[S], &GridRow<S>> = p.rows.iter().map(|r| (r.point.as_slice(), r)).collect();
    let mut global_missing_in_q = Vec::new();
    for z in p.global_minimizers() {
        if !q.rows.iter().any(|r| r.global_min && &r.point[..n] == z) {
            global_missing_in_q.push(z.to_vec());
        }
    }
    let mut global_missing_in_p = Vec::new();
    let mut direction_violations = Vec::new();
    let mut counterexamples = Vec::new();
    for r in &q.rows {
        let (z, lambda) = r.point.split_at(n);
        let pr = p_rows.get(z);
        if r.global_min && !pr.is_some_and(|p| p.global_min) && !global_missing_in_p.iter().any(|x: &Vec<S>| x == z) {
            global_missing_in_p.push(z.to_vec());
        }
        if pr.is_some_and(|p| p.local_min) && !r.local_min {
            direction_violations.push((z.to_vec(), lambda.to_vec()));
        }
        if r.local_min && !pr.is_some_and(|p| p.local_min) {
            counterexamples.push((z.to_vec(), lambda.to_vec()));
        }
    }
    Ok(RelationReport {
        n,
        m,
        step: config.step.clone(),
        radius: config.radius,
        p,
        q,
        global_missing_in_q,
        global_missing_in_p,
        direction_violations,
        counterexamples,
    })
}

/// Human-readable point list for reports.
pub fn format_points<S: Scalar>(points: &[&[S]]) -> String {
    points.iter().map(|p| format_vector(p)).collect::<Vec<_>>().join(", ")
}

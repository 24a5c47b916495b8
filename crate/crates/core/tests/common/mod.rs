//! Shared builders and independent oracles for the integration tests.
//!
//! The oracles here avoid the stratification engine: they decide normal
//! vectors by sampling inner products against nearby members of a set,
//! enumerate supports by hand, and test minimality by brute force.

#![allow(dead_code)]

pub mod suites;

use mstat::geometry::{ConvexPolyhedron, PolyUnion};
use mstat::mappings::PolyMapping;
use mstat::stationarity::{ImplicitProgram, Objective, Structure};
use mstat::{Polyhedron, Rational, Union};

pub fn r(num: i64, den: i64) -> Rational {
    mstat::scalar::rat(num, den)
}

pub fn v(xs: &[i64]) -> Vec<Rational> {
    xs.iter().map(|&x| r(x, 1)).collect()
}

pub fn zero(n: usize) -> Vec<Rational> {
    vec![r(0, 1); n]
}

/// `{x : rows·x ≤ rhs, eq_rows·x = eq_rhs}` from integer data.
pub fn poly(dim: usize, ineqs: &[(&[i64], i64)], eqs: &[(&[i64], i64)]) -> Polyhedron {
    let mut p = ConvexPolyhedron::universe(dim);
    for (row, rhs) in ineqs {
        p.push_ineq(v(row), r(*rhs, 1));
    }
    for (row, rhs) in eqs {
        p.push_eq(v(row), r(*rhs, 1));
    }
    p
}

pub fn union(dim: usize, pieces: Vec<Polyhedron>) -> Union {
    PolyUnion::new(dim, pieces).expect("nonempty union")
}

/// The coordinate axis `{x : xⱼ = 0 for j ≠ i}`.
pub fn axis(dim: usize, i: usize) -> Polyhedron {
    let mut p = ConvexPolyhedron::universe(dim);
    for j in (0..dim).filter(|&j| j != i) {
        p.push_eq(unit(dim, j), r(0, 1));
    }
    p
}

pub fn axes(dim: usize) -> Union {
    union(dim, (0..dim).map(|i| axis(dim, i)).collect())
}

pub fn unit(dim: usize, i: usize) -> Vec<Rational> {
    let mut e = zero(dim);
    e[i] = r(1, 1);
    e
}

/// `(ℝ₋×{0}) ∪ ({0}×ℝ₊)`, the graph of the normal cone map of `ℝ₋`.
pub fn complementarity() -> Union {
    union(2, vec![poly(2, &[(&[1, 0], 0)], &[(&[0, 1], 0)]), poly(2, &[(&[0, -1], 0)], &[(&[1, 0], 0)])])
}

/// `ℝ₊×ℝ₋ ∪ ({0}×ℝ) ∪ (ℝ×{0})` as stated for the complementarity graph.
pub fn complementarity_normal_closed_form() -> Union {
    union(
        2,
        vec![poly(2, &[], &[(&[1, 0], 0)]), poly(2, &[], &[(&[0, 1], 0)]), poly(2, &[(&[-1, 0], 0), (&[0, 1], 0)], &[])],
    )
}

/// Every `k`-subset of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..(1 << n))
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|i| m & (1 << i) != 0).collect())
        .collect()
}

/// `{z ∈ ℝⁿ : ‖z‖₀ ≤ κ}` built from the coordinate supports.
pub fn sparse_set(n: usize, kappa: usize) -> Union {
    union(
        n,
        subsets(n, kappa)
            .into_iter()
            .map(|s| {
                let mut p = ConvexPolyhedron::universe(n);
                for j in (0..n).filter(|j| !s.contains(j)) {
                    p.push_eq(unit(n, j), r(0, 1));
                }
                p
            })
            .collect(),
    )
}

/// Normal cone to the sparse set: `{ν : ‖ν‖₀ ≤ n−κ, νᵢ = 0 where zᵢ ≠ 0}`.
/// Built as the union of coordinate subspaces spanned by the admissible
/// supports, which is how the formula reads.
pub fn sparse_normal_closed_form(n: usize, kappa: usize, z: &[Rational]) -> Union {
    let zeros: Vec<usize> = (0..n).filter(|&i| z[i] == r(0, 1)).collect();
    let k = (n - kappa).min(zeros.len());
    let pieces = subsets(zeros.len(), k)
        .into_iter()
        .map(|pick| {
            let free: Vec<usize> = pick.iter().map(|&j| zeros[j]).collect();
            let mut p = ConvexPolyhedron::universe(n);
            for j in (0..n).filter(|j| !free.contains(j)) {
                p.push_eq(unit(n, j), r(0, 1));
            }
            p
        })
        .collect();
    union(n, pieces)
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// All points `y + t·d` with `d ∈ {−k..k}^dim / k` and `t = radius`.
pub fn neighbourhood(y: &[Rational], radius: &Rational, k: i64) -> Vec<Vec<Rational>> {
    let dim = y.len();
    let side = (2 * k + 1) as usize;
    let mut out = Vec::new();
    for flat in 0..side.pow(dim as u32) {
        let mut f = flat;
        let mut p = y.to_vec();
        for c in p.iter_mut() {
            let step = (f % side) as i64 - k;
            f /= side;
            *c += radius * r(step, k);
        }
        out.push(p);
    }
    out
}

/// Regular normal by sampling: `v·(u − y) ≤ 0` for every sampled `u ∈ U`
/// within `radius` of `y`. Exact for locally conic sets once `radius` is
/// below the distance from `y` to the faces not through `y`.
pub fn sampled_regular_normal(u: &Union, y: &[Rational], vec: &[Rational], radius: &Rational) -> bool {
    neighbourhood(y, radius, 4).iter().filter(|p| u.contains(p)).all(|p| {
        let d: Vec<Rational> = p.iter().zip(y).map(|(a, b)| a - b).collect();
        dot(vec, &d) <= r(0, 1)
    })
}

/// Points `x + t·p` of `U` with `p ∈ {−1, −1/2, 0, 1/2, 1}^dim`.
pub fn nearby_members(u: &Union, x: &[Rational], t: &Rational) -> Vec<Vec<Rational>> {
    neighbourhood(x, t, 2).into_iter().filter(|p| u.contains(p)).collect()
}

/// Outer limit of sampled regular normals: every integer direction in
/// `[−3,3]^dim` that is a sampled regular normal at some member of `U`
/// within `t` of `x`.
pub fn sampled_limiting_directions(u: &Union, x: &[Rational], t: &Rational) -> Vec<Vec<Rational>> {
    let dirs = integer_directions(x.len(), 3);
    let ys = nearby_members(u, x, t);
    dirs.into_iter()
        .filter(|d| ys.iter().any(|y| sampled_regular_normal(u, y, d, &(t / r(8, 1)))))
        .collect()
}

pub fn integer_directions(dim: usize, k: i64) -> Vec<Vec<Rational>> {
    neighbourhood(&zero(dim), &r(k, 1), k)
}

/// Example (a) data rebuilt from its description: `gph F = (ℝ₊×{0}) ∪ (ℝ₋×{1})`,
/// `G(z,λ) = [−z−λ, ∞)`, `f = id`, `M = ℝ`.
pub fn example_a_by_hand() -> ImplicitProgram<Rational> {
    let f = PolyMapping::new(
        1,
        1,
        union(2, vec![poly(2, &[(&[-1, 0], 0)], &[(&[0, 1], 0)]), poly(2, &[(&[1, 0], 0)], &[(&[0, 1], 1)])]),
    )
    .unwrap();
    let g = PolyMapping::new(2, 1, union(3, vec![poly(3, &[(&[-1, -1, -1], 0)], &[])])).unwrap();
    ImplicitProgram::new(
        Objective::linear(v(&[1])),
        f,
        g,
        union(1, vec![ConvexPolyhedron::universe(1)]),
        Some(Structure::SmoothMinusSet),
    )
    .unwrap()
}

/// `min z s.t. z ≥ 0` written with `F(z) = {z}` and `G(z,λ) = [−λ, ∞)`.
pub fn convex_line() -> ImplicitProgram<Rational> {
    let f = PolyMapping::new(1, 1, union(2, vec![poly(2, &[], &[(&[1, -1], 0)])])).unwrap();
    let g = PolyMapping::new(2, 1, union(3, vec![poly(3, &[(&[0, -1, -1], 0)], &[])])).unwrap();
    ImplicitProgram::new(Objective::linear(v(&[1])), f, g, union(1, vec![ConvexPolyhedron::universe(1)]), None).unwrap()
}

/// `min (z₁−1)² + (z₂−1)² s.t. z₁ + z₂ ≤ 1` with `F(z) = {z}` and
/// `G(z,λ) = [λ₁+λ₂−1, ∞)`, over `M = [−1,1]²`.
pub fn convex_plane() -> ImplicitProgram<Rational> {
    let f = PolyMapping::new(2, 2, union(4, vec![poly(4, &[], &[(&[1, 0, -1, 0], 0), (&[0, 1, 0, -1], 0)])])).unwrap();
    let g = PolyMapping::new(4, 1, union(5, vec![poly(5, &[(&[0, 0, 1, 1, -1], 1)], &[])])).unwrap();
    let m = union(2, vec![ConvexPolyhedron::boxed(&v(&[-1, -1]), &v(&[1, 1]))]);
    let objective = Objective::Quadratic { q: vec![v(&[2, 0]), v(&[0, 2])], c: v(&[-2, -2]) };
    ImplicitProgram::new(objective, f, g, m, None).unwrap()
}

/// `min max(z, −z) + z/2 s.t. z ∈ [−2, 2]` with a trivial implicit variable
/// `F(z) = [0,1]`, `G(z,λ) = [λ − 1, ∞)`.
pub fn convex_kink() -> ImplicitProgram<Rational> {
    let f = PolyMapping::new(1, 1, union(2, vec![poly(2, &[(&[0, 1], 1), (&[0, -1], 0)], &[])])).unwrap();
    let g = PolyMapping::new(2, 1, union(3, vec![poly(3, &[(&[0, 1, -1], 1)], &[])])).unwrap();
    let m = union(1, vec![ConvexPolyhedron::boxed(&v(&[-2]), &v(&[2]))]);
    let objective = Objective::MaxAffine { pieces: vec![(vec![r(3, 2)], r(0, 1)), (vec![r(-1, 2)], r(0, 1))] };
    ImplicitProgram::new(objective, f, g, m, None).unwrap()
}

/// All grid points of `[lo, hi]^dim` with the given step denominator.
pub fn grid(dim: usize, lo: i64, hi: i64, den: i64) -> Vec<Vec<Rational>> {
    let side = ((hi - lo) * den + 1) as usize;
    (0..side.pow(dim as u32))
        .map(|flat| {
            let mut f = flat;
            (0..dim)
                .map(|_| {
                    let k = (f % side) as i64;
                    f /= side;
                    r(lo * den + k, den)
                })
                .collect()
        })
        .collect()
}

//! Property suites shared by the `properties` and `acceptance` targets.
//! Each suite returns a one-line summary on success and the first
//! counterexample on failure.

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mstat::geometry::{limiting_normal_cone, lp_feasible, polar_of_piece, project_out, ConvexPolyhedron};
use mstat::problems::{example_a, BilevelLq, Ccmp, EmopLinear};
use mstat::stationarity::{CheckKind, Objective, Session, Verdict};
use mstat::{Polyhedron, Program, Rational, Union};

use super::*;

pub type Outcome = std::result::Result<String, String>;

const SEED: u64 = 0x5eed_2024;

fn runner(cases: u32) -> TestRunner {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    let mut seed = [0u8; 32];
    seed[..8].copy_from_slice(&SEED.to_le_bytes());
    TestRunner::new_with_rng(config, TestRng::from_seed(RngAlgorithm::ChaCha, &seed))
}

fn cone_from_rows(ineqs: &[Vec<i64>], eqs: &[Vec<i64>]) -> Polyhedron {
    let mut c = ConvexPolyhedron::universe(3);
    for row in ineqs {
        c.push_ineq(v(row), r(0, 1));
    }
    for row in eqs {
        c.push_eq(v(row), r(0, 1));
    }
    c
}

/// `C°° = C` for random polyhedral cones in ℝ³.
pub fn biduality() -> Outcome {
    let row = prop::collection::vec(-3i64..=3, 3);
    let strategy = (prop::collection::vec(row.clone(), 0..5), prop::collection::vec(row, 0..2));
    let cases = std::cell::Cell::new(0usize);
    runner(64)
        .run(&strategy, |(ineqs, eqs)| {
            let c = cone_from_rows(&ineqs, &eqs);
            let back = polar_of_piece(&polar_of_piece(&c).unwrap()).unwrap();
            prop_assert!(back.set_eq(&c), "C°° ≠ C for ineqs {:?}, eqs {:?}", ineqs, eqs);
            cases.set(cases.get() + 1);
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok(format!("{} random cones in R^3", cases.get()))
}

/// `y ∈ proj(P)` exactly when fixing the kept coordinates to `y` leaves a
/// feasible system.
pub fn projection_membership() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut inside, mut outside) = (0usize, 0usize);
    let mut built = 0;
    while built < 5 {
        let mut p = ConvexPolyhedron::universe(3);
        for _ in 0..rng.gen_range(2..6) {
            let row: Vec<i64> = (0..3).map(|_| rng.gen_range(-3..=3)).collect();
            p.push_ineq(v(&row), r(rng.gen_range(-2..=4), 1));
        }
        if lp_feasible(&p).is_none() {
            continue;
        }
        built += 1;
        let q = project_out(&p, &[1]).map_err(|e| e.to_string())?;
        for _ in 0..200 {
            let y = vec![r(rng.gen_range(-12..=12), 4), r(rng.gen_range(-12..=12), 4)];
            let mut fixed = p.clone();
            fixed.push_eq(unit(3, 0), y[0].clone());
            fixed.push_eq(unit(3, 2), y[1].clone());
            let lifted = lp_feasible(&fixed).is_some();
            if q.contains(&y) != lifted {
                return Err(format!("projection disagrees at {y:?} for {p:?}"));
            }
            if lifted {
                inside += 1;
            } else {
                outside += 1;
            }
        }
    }
    if inside == 0 || outside == 0 {
        return Err(format!("degenerate sample: {inside} inside, {outside} outside"));
    }
    Ok(format!("1000 samples ({inside} inside, {outside} outside)"))
}

/// Same as [`sampled_regular_normal`] with a coarser neighbourhood, used
/// in three dimensions.
fn sampled_regular_normal_k(u: &Union, y: &[Rational], vec: &[Rational], radius: &Rational, k: i64) -> bool {
    neighbourhood(y, radius, k).iter().filter(|p| u.contains(p)).all(|p| {
        let d: Vec<Rational> = p.iter().zip(y).map(|(a, b)| a - b).collect();
        dot(vec, &d) <= r(0, 1)
    })
}

/// Sample vectors of a cone piece: a relative interior point and optimal
/// points of a few objectives over the piece cut to `[−1,1]^dim`.
fn piece_samples(piece: &Polyhedron) -> Vec<Vec<Rational>> {
    let dim = piece.dim();
    let cut = piece.intersect(&ConvexPolyhedron::boxed(&vec![r(-1, 1); dim], &vec![r(1, 1); dim])).unwrap();
    let mut out: Vec<Vec<Rational>> = cut.relative_interior_point().into_iter().collect();
    let mut objectives: Vec<Vec<Rational>> = (0..dim).flat_map(|i| [unit(dim, i), unit(dim, i).iter().map(|x| -x).collect()]).collect();
    objectives.push(vec![r(1, 1); dim]);
    for c in objectives {
        if let Some(p) = cut.maximize(&c).point() {
            if !out.iter().any(|q| q.as_slice() == p) {
                out.push(p.to_vec());
            }
        }
    }
    out
}

/// Every vector of each limiting-cone piece is a sampled regular normal at
/// a member of `U` within `2⁻ᵏ` of `x̄`, for `k = 1..10`.
pub fn stratification_soundness() -> Outcome {
    let l_shape = union(2, vec![poly(2, &[(&[1, 0], 0)], &[]), poly(2, &[(&[0, 1], 0)], &[])]);
    let cases: Vec<(&str, Union, Vec<Rational>)> = vec![
        ("complementarity", complementarity(), zero(2)),
        ("axes at origin", axes(2), zero(2)),
        ("axes at (1,0)", axes(2), v(&[1, 0])),
        ("L-shape", l_shape, zero(2)),
        ("sparse n=3 k=1", sparse_set(3, 1), zero(3)),
        ("sparse n=3 k=2", sparse_set(3, 2), zero(3)),
    ];
    let mut checked = 0usize;
    for (name, u, x) in &cases {
        let lim = limiting_normal_cone(u, x).map_err(|e| e.to_string())?;
        let k_fine = if x.len() <= 2 { 4 } else { 2 };
        for piece in lim.pieces() {
            for vec in piece_samples(piece) {
                for k in 1..=10u32 {
                    let t = r(1, 1 << k);
                    let radius = &t / r(4, 1);
                    let found = nearby_members(u, x, &t).iter().any(|y| sampled_regular_normal_k(u, y, &vec, &radius, k_fine));
                    if !found {
                        return Err(format!("{name}: {vec:?} is not a nearby regular normal at scale 2^-{k}"));
                    }
                    checked += 1;
                }
            }
        }
        // the other direction on the integer directions, at a coarse scale
        if x.len() <= 2 {
            let sampled = sampled_limiting_directions(u, x, &r(1, 4));
            for d in integer_directions(x.len(), 3) {
                if lim.contains(&d) != sampled.contains(&d) {
                    return Err(format!("{name}: direction {d:?} disagrees with the sampled outer limit"));
                }
            }
        }
    }
    Ok(format!("{} sets, {checked} (vector, scale) pairs", cases.len()))
}

/// Programs and feasible points used for witness replay.
pub fn replay_instances() -> Vec<(String, Program, Vec<Vec<Rational>>)> {
    let sum = Ccmp::new(2, 1, Objective::linear(v(&[1, 1])), None).unwrap();
    let second = Ccmp::new(2, 1, Objective::linear(v(&[0, 1])), None).unwrap();
    let objective = Objective::Quadratic { q: vec![v(&[2, 0]), v(&[0, 2])], c: v(&[-2, 0]) };
    let bilevel = BilevelLq::new(vec![v(&[1])], vec![v(&[-1])], v(&[0]), vec![v(&[-1])], v(&[0]), objective, None).unwrap();
    let square = ConvexPolyhedron::boxed(&zero(2), &v(&[1, 1]));
    let emop = EmopLinear::new(vec![v(&[1, 0]), v(&[0, 1])], square, None).unwrap();
    let halves = |xs: &[(i64, i64)]| -> Vec<Vec<Rational>> { xs.iter().map(|&(a, b)| vec![r(a, 2), r(b, 2)]).collect() };
    vec![
        ("example (a)".into(), example_a::<Rational>().unwrap(), vec![v(&[-1]), vec![r(-1, 2)], v(&[0]), v(&[1])]),
        ("ccmp sum".into(), sum.program().clone(), grid(2, -1, 1, 1).into_iter().filter(|z| z.iter().filter(|x| **x != r(0, 1)).count() <= 1).collect()),
        ("ccmp second coordinate".into(), second.program().clone(), vec![v(&[-1, 0]), v(&[0, 1]), zero(2)]),
        ("bilevel".into(), bilevel.program().clone(), vec![v(&[1, 1]), v(&[-1, 0]), zero(2), v(&[2, 2])]),
        ("convex line".into(), convex_line(), vec![v(&[0]), v(&[1])]),
        ("convex plane".into(), convex_plane(), halves(&[(1, 1), (0, 0), (-2, 2)])),
        ("convex kink".into(), convex_kink(), vec![v(&[0]), v(&[1]), v(&[-2])]),
        ("emop square".into(), emop.program().clone(), halves(&[(0, 0), (0, 1), (1, 0)])),
    ]
}

/// Substitutes implicit and explicit witnesses into freshly computed cones,
/// without going through the session caches.
fn resubstitute(p: &Program, session: &Session<'_, Rational>, v: &Verdict<Rational>) -> std::result::Result<bool, String> {
    let w = &v.witnesses;
    let get = |name: &str| -> std::result::Result<Vec<Rational>, String> {
        let part = match name {
            "mu" => w.mu.clone(),
            "nu" => w.nu.clone(),
            "xi" => w.xi.clone(),
            "lambda" => w.lambda.clone(),
            other => w.extra.get(other).cloned(),
        };
        part.ok_or_else(|| format!("{} verdict lacks witness {name}", v.kind))
    };
    let z = &v.point;
    let (n, m) = (p.n(), p.m());
    let normal_m = limiting_normal_cone(p.m_set(), z).map_err(|e| e.to_string())?;
    let grad = get("grad")?;
    let xi = get("xi")?;
    let in_subdiff = session.subdifferential().contains(&grad) && p.objective().subdifferential_at(z).unwrap().contains(&grad);
    let ok = match v.kind {
        CheckKind::Implicit => {
            let (nu, xh) = (get("nu")?, get("xi_h")?);
            let cd = p.derived().h.coderivative_graph(z, &zero(p.h_dim())).map_err(|e| e.to_string())?;
            let sum: Vec<Rational> = (0..n).map(|i| &grad[i] + &xh[i] + &xi[i]).collect();
            cd.contains(&nu, &xh) && sum.iter().all(|x| *x == r(0, 1))
        }
        CheckKind::Explicit => {
            let (lam, mu, nu, xf, xg) = (get("lambda")?, get("mu")?, get("nu")?, get("xi_f")?, get("xi_g")?);
            let mut zl = z.clone();
            zl.extend(lam.iter().cloned());
            let cd_f = p.f().coderivative_graph(z, &lam).map_err(|e| e.to_string())?;
            let cd_g = p.g().coderivative_graph(&zl, &zero(p.s())).map_err(|e| e.to_string())?;
            let sum: Vec<Rational> = (0..n).map(|i| &grad[i] + &xf[i] + &xg[i] + &xi[i]).collect();
            cd_f.contains(&mu, &xf) && cd_g.contains(&nu, &xg) && xg[n..n + m] == mu[..] && sum.iter().all(|x| *x == r(0, 1))
        }
        _ => true,
    };
    Ok(ok && in_subdiff && normal_m.contains(&xi))
}

/// Every holding verdict, and every failing condition with a
/// counterexample, survives replay; stationarity witnesses also survive
/// substitution into freshly computed cones and a JSON round trip.
pub fn witness_replay() -> Outcome {
    let mut replayed = 0usize;
    for (name, p, points) in replay_instances() {
        for z in points {
            if !p.is_feasible(&z).unwrap() {
                return Err(format!("{name}: replay point {z:?} is infeasible"));
            }
            let session = Session::new(&p, &z).map_err(|e| e.to_string())?;
            for kind in CheckKind::ALL {
                let agg = session.check(kind, None).map_err(|e| format!("{name} {kind}: {e}"))?;
                let leaves: Vec<&Verdict<Rational>> = if agg.is_aggregate() { agg.strata.iter().collect() } else { vec![&agg] };
                for leaf in leaves {
                    let replay = session.reverify(leaf).map_err(|e| e.to_string())?;
                    if replay != leaf.holds {
                        return Err(format!("{name} at {z:?}: {kind} verdict {} replays as {replay}", leaf.holds));
                    }
                    let back = Verdict::from_json(&leaf.to_json()).map_err(|e| e.to_string())?;
                    if session.reverify(&back).map_err(|e| e.to_string())? != leaf.holds {
                        return Err(format!("{name} at {z:?}: {kind} verdict changes after a JSON round trip"));
                    }
                    if leaf.holds && matches!(kind, CheckKind::Implicit | CheckKind::Explicit) && !resubstitute(&p, &session, leaf)? {
                        return Err(format!("{name} at {z:?}: {kind} witnesses fail substitution: {:?}", leaf.witnesses));
                    }
                    replayed += 1;
                }
            }
        }
    }
    Ok(format!("{replayed} verdicts replayed"))
}

/// Random multipliers in `K(z̄)` get the verdict of their stratum
/// representative.
pub fn strata_sufficiency() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0xa5);
    let objective = Objective::Quadratic { q: vec![v(&[2, 0]), v(&[0, 2])], c: zero(2) };
    let dup = BilevelLq::new(vec![v(&[1])], vec![v(&[-1])], v(&[0]), vec![v(&[-1]), v(&[-1])], v(&[0, 0]), objective, None).unwrap();
    let cases: Vec<(&str, Program, Vec<Rational>, usize)> = vec![
        ("ccmp n=2", Ccmp::new(2, 1, Objective::linear(v(&[1, 1])), None).unwrap().program().clone(), zero(2), 40),
        ("ccmp n=3", Ccmp::new(3, 1, Objective::linear(v(&[1, -1, 1])), None).unwrap().program().clone(), zero(3), 30),
        ("bilevel duplicated row", dup.program().clone(), v(&[-1, 0]), 30),
    ];
    let kinds = [CheckKind::Fuzzy, CheckKind::Explicit, CheckKind::AbstractCq, CheckKind::MrCq, CheckKind::IncLambda];
    let mut total = 0usize;
    for (name, p, z, want) in &cases {
        let session = Session::new(p, z).map_err(|e| e.to_string())?;
        let strata = session.strata().map_err(|e| e.to_string())?.to_vec();
        if strata.len() < 2 {
            return Err(format!("{name}: expected several strata, found {}", strata.len()));
        }
        let mut got = 0usize;
        let mut tries = 0usize;
        while got < *want {
            tries += 1;
            if tries > 100_000 {
                return Err(format!("{name}: could not sample multipliers"));
            }
            let lambda: Vec<Rational> = (0..p.m()).map(|_| r(rng.gen_range(0..=12), 12)).collect();
            if !p.is_multiplier(z, &lambda) {
                continue;
            }
            got += 1;
            let id = p.stratum_of(z, &lambda).map_err(|e| e.to_string())?.ok_or(format!("{name}: {lambda:?} has no stratum"))?;
            let rep = &strata.iter().find(|s| s.id == id).ok_or("unknown stratum id")?.representative;
            for kind in kinds {
                let here = session.check_at(kind, &lambda).map_err(|e| e.to_string())?.holds;
                let there = session.check_at(kind, rep).map_err(|e| e.to_string())?.holds;
                if here != there {
                    return Err(format!("{name}: {kind} at {lambda:?} is {here}, at representative {rep:?} it is {there}"));
                }
            }
            total += 1;
        }
    }
    Ok(format!("{total} random multipliers agree with their representatives"))
}

pub fn all() -> Vec<(&'static str, fn() -> Outcome)> {
    vec![
        ("biduality", biduality as fn() -> Outcome),
        ("projection membership", projection_membership),
        ("stratification soundness", stratification_soundness),
        ("witness replay", witness_replay),
        ("strata sufficiency", strata_sufficiency),
    ]
}

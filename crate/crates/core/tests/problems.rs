mod common;

use common::*;
use mstat::geometry::{limiting_normal_cone, union_eq, ConvexPolyhedron};
use mstat::problems::*;
use mstat::stationarity::{CheckKind, Objective, Session};
use mstat::{Error, Rational};

fn ccmp(n: usize, kappa: usize) -> Ccmp<Rational> {
    Ccmp::new(n, kappa, Objective::linear(vec![r(1, 1); n]), None).unwrap()
}

#[test]
fn ccmp_normal_cone_examples() {
    let c = ccmp(3, 1);
    let z = v(&[1, 0, 0]);
    let engine = limiting_normal_cone(&c.d_kappa(), &z).unwrap();
    let first_zero = union(3, vec![poly(3, &[], &[(&[1, 0, 0], 0)])]);
    assert!(union_eq(&engine, &first_zero).unwrap());
    assert!(union_eq(&c.normal_cone_closed_form(&z).unwrap(), &first_zero).unwrap());

    let c = ccmp(2, 1);
    let engine = limiting_normal_cone(&c.d_kappa(), &zero(2)).unwrap();
    assert!(union_eq(&engine, &axes(2)).unwrap());
    assert!(union_eq(&c.d_kappa(), &sparse_set(2, 1)).unwrap());
}

#[test]
fn ccmp_multiplier_examples() {
    let c = ccmp(2, 1);
    let k = c.program().k_image(&v(&[1, 0])).unwrap();
    assert!(union_eq(&k, &union(2, vec![ConvexPolyhedron::point(&v(&[0, 1]))])).unwrap());
    assert!(c.k_closed_form(&v(&[1, 0])).unwrap().set_eq(&ConvexPolyhedron::point(&v(&[0, 1]))));
}

#[test]
fn ccmp_bad_kappa() {
    let f = || Objective::linear(v(&[1, 1]));
    assert!(matches!(Ccmp::<Rational>::new(2, 0, f(), None), Err(Error::Precondition(_))));
    assert!(matches!(Ccmp::<Rational>::new(2, 2, f(), None), Err(Error::Precondition(_))));
}

#[test]
fn ccmp_cross_check_sweep_small() {
    let c = ccmp(2, 1);
    for z in grid(2, -1, 1, 1).into_iter().filter(|z| c.program().is_feasible(z).unwrap()) {
        let rep = ccmp_cross_check(&c, &z).unwrap();
        assert!(rep.all_pass(), "{z:?}: {rep:?}");
        assert!(rep.k_locally_bounded);
        let support = z.iter().filter(|x| **x != r(0, 1)).count();
        if support == c.kappa() {
            assert_eq!(rep.strata, 1, "{z:?}");
        }
    }
    let rep = ccmp_cross_check(&c, &zero(2)).unwrap();
    assert!(rep.explicit_per_stratum.iter().all(|&b| b == rep.explicit_per_stratum[0]));
}

#[test]
fn ccmp_local_boundedness_of_k_on_sweep() {
    for (n, kappa) in [(2, 1), (3, 1), (3, 2)] {
        let c = ccmp(n, kappa);
        for z in grid(n, -1, 1, 1).into_iter().filter(|z| c.program().is_feasible(z).unwrap()) {
            assert!(c.program().derived().k.locally_bounded_at(&z).unwrap(), "n={n} κ={kappa} {z:?}");
        }
    }
}

/// `j(x,y) = ½y² + pxy`, single constraint `−y ≤ 0`.
fn bilevel_scalar(p: i64) -> BilevelLq<Rational> {
    let objective = Objective::Quadratic { q: vec![v(&[2, 0]), v(&[0, 2])], c: v(&[-2, 0]) };
    BilevelLq::new(vec![v(&[1])], vec![v(&[p])], v(&[0]), vec![v(&[-1])], v(&[0]), objective, None).unwrap()
}

#[test]
fn bilevel_lower_level_kkt() {
    let b = bilevel_scalar(0);
    for x in [-2, 0, 3] {
        let k = b.program().k_image(&v(&[x, 0])).unwrap();
        assert!(union_eq(&k, &union(1, vec![ConvexPolyhedron::origin(1)])).unwrap(), "x = {x}");
    }
    // with a coupling term the multiplier at y = 0 is λ = px when px ≥ 0
    let b = bilevel_scalar(-1);
    let k = b.program().k_image(&v(&[-2, 0])).unwrap();
    assert!(union_eq(&k, &union(1, vec![ConvexPolyhedron::point(&v(&[2]))])).unwrap());
    assert!(!b.program().is_feasible(&v(&[2, 0])).unwrap());
}

#[test]
fn complementarity_graph_cones() {
    let c = complementarity_graph::<Rational>(1);
    assert!(union_eq(&c, &complementarity()).unwrap());
    let n = limiting_normal_cone(&c, &zero(2)).unwrap();
    assert!(union_eq(&n, &complementarity_normal_closed_form()).unwrap());

    // strict complementarity: (a, b) = ((0, −1), (1, 0))
    let c2 = complementarity_graph::<Rational>(2);
    let pt = v(&[0, -1, 1, 0]);
    let n = limiting_normal_cone(&c2, &pt).unwrap();
    assert_eq!(n.pieces().len(), 1);
    assert!(n.pieces()[0].a().is_empty());
    let expected = union(4, vec![poly(4, &[], &[(&[0, 1, 0, 0], 0), (&[0, 0, 1, 0], 0)])]);
    assert!(union_eq(&n, &expected).unwrap());
}

#[test]
fn bilevel_multiplier_examples() {
    // one active constraint with gradient −1
    let b = bilevel_scalar(-1);
    let mc = b.multiplier_conditions(&v(&[-2, 0]), &v(&[2])).unwrap();
    assert!(mc.licq && mc.strict_mf && mc.singleton);
    assert_eq!(mc.active, vec![0]);

    // the same constraint listed twice
    let objective = Objective::Quadratic { q: vec![v(&[2, 0]), v(&[0, 2])], c: zero(2) };
    let dup = BilevelLq::new(vec![v(&[1])], vec![v(&[-1])], v(&[0]), vec![v(&[-1]), v(&[-1])], v(&[0, 0]), objective, None).unwrap();
    let z = v(&[-1, 0]);
    let l = vec![r(1, 2), r(1, 2)];
    let mc = dup.multiplier_conditions(&z, &l).unwrap();
    assert!(!mc.licq && !mc.strict_mf && !mc.singleton);
    assert_eq!(mc.active, vec![0, 1]);
    let k = dup.program().k_image(&z).unwrap();
    let segment = union(2, vec![poly(2, &[(&[-1, 0], 0), (&[0, -1], 0)], &[(&[1, 1], 1)])]);
    assert!(union_eq(&k, &segment).unwrap());

    assert!(matches!(dup.multiplier_conditions(&z, &v(&[1, 1])), Err(Error::Precondition(_))));
}

#[test]
fn bilevel_licq_implies_singleton() {
    let b = bilevel_scalar(-1);
    for z in grid(2, -2, 2, 2).into_iter().filter(|z| b.program().is_feasible(z).unwrap()) {
        for piece in b.program().k_image(&z).unwrap().pieces() {
            let l = piece.feasible_point().unwrap();
            let mc = b.multiplier_conditions(&z, &l).unwrap();
            if mc.licq || mc.strict_mf {
                assert!(mc.singleton, "{z:?}");
            }
        }
    }
}

#[test]
fn bilevel_reformulation_and_explicit_check() {
    let b = bilevel_scalar(-1);
    let mpcc = b.mpcc().unwrap();
    for p in grid(3, -2, 2, 2) {
        let (z, l) = (&p[..2], &p[2..]);
        assert_eq!(mpcc.feasible_set.contains(&p), b.program().is_feasible_explicit(z, l), "{p:?}");
    }
    for z in grid(2, -2, 2, 2).into_iter().filter(|z| b.program().is_feasible(z).unwrap()) {
        let s = Session::new(b.program(), &z).unwrap();
        for st in s.strata().unwrap() {
            let l = &st.representative;
            let fe = b.fully_explicit(&z, l).unwrap();
            assert_eq!(fe.holds, s.check_at(CheckKind::Explicit, l).unwrap().holds, "{z:?} {l:?}");
        }
    }
}

#[test]
fn bilevel_rejects_indefinite_q() {
    let objective = Objective::linear(v(&[0, 0]));
    let e = BilevelLq::<Rational>::new(vec![v(&[-1])], vec![v(&[1])], v(&[0]), vec![v(&[-1])], v(&[0]), objective, None);
    assert!(matches!(e, Err(Error::Precondition(_))));
}

fn unit_square() -> mstat::Polyhedron {
    ConvexPolyhedron::boxed(&zero(2), &v(&[1, 1]))
}

/// Weak efficiency by brute force over the grid points of `Γ`.
fn grid_weakly_efficient(j: &[Vec<Rational>], gamma: &mstat::Polyhedron, z: &[Rational], pts: &[Vec<Rational>]) -> bool {
    let crit = |x: &[Rational]| j.iter().map(|row| dot(row, x)).collect::<Vec<_>>();
    let jz = crit(z);
    !pts.iter().filter(|x| gamma.contains(x)).any(|x| crit(x).iter().zip(&jz).all(|(a, b)| a < b))
}

#[test]
fn emop_unit_square() {
    let j = vec![v(&[1, 0]), v(&[0, 1])];
    let e = EmopLinear::new(j.clone(), unit_square(), None).unwrap();
    let we = e.weakly_efficient_set().unwrap();
    let edges = union(
        2,
        vec![
            poly(2, &[(&[0, 1], 1), (&[0, -1], 0)], &[(&[1, 0], 0)]),
            poly(2, &[(&[1, 0], 1), (&[-1, 0], 0)], &[(&[0, 1], 0)]),
        ],
    );
    assert!(union_eq(&we, &edges).unwrap());
    let pts = grid(2, 0, 1, 4);
    for z in &pts {
        assert_eq!(we.contains(z), grid_weakly_efficient(&j, &unit_square(), z, &pts), "{z:?}");
    }

    let left = e.psi_at(&v(&[1, 0])).unwrap();
    assert!(union_eq(&left, &union(2, vec![edges.pieces()[0].clone()])).unwrap());
}

#[test]
fn emop_identical_rows() {
    let j = vec![v(&[1, 1]), v(&[1, 1])];
    let e = EmopLinear::new(j.clone(), unit_square(), None).unwrap();
    let we = e.weakly_efficient_set().unwrap();
    assert!(union_eq(&we, &union(2, vec![ConvexPolyhedron::origin(2)])).unwrap());
    let pts = grid(2, 0, 1, 4);
    for z in &pts {
        assert_eq!(we.contains(z), grid_weakly_efficient(&j, &unit_square(), z, &pts));
    }
}

/// Exact weak efficiency: `max t` over `x ∈ Γ`, `Jx ≤ Jz − t·e` is zero.
fn lp_weakly_efficient(j: &[Vec<Rational>], gamma: &mstat::Polyhedron, z: &[Rational]) -> bool {
    let n = z.len();
    let mut p = ConvexPolyhedron::universe(n + 1);
    for (row, rhs) in gamma.a().iter().zip(gamma.b()) {
        let mut r0 = row.clone();
        r0.push(r(0, 1));
        p.push_ineq(r0, rhs.clone());
    }
    for row in j {
        let mut r0 = row.clone();
        r0.push(r(1, 1));
        p.push_ineq(r0, dot(row, z));
    }
    let mut obj = zero(n);
    obj.push(r(1, 1));
    p.sup(&obj).unwrap() == r(0, 1)
}

#[test]
fn emop_triangle() {
    // Γ = {z ≥ 0, z₁ + z₂ ≤ 2}, minimize (z₁ − z₂, z₂)
    let gamma = poly(2, &[(&[-1, 0], 0), (&[0, -1], 0), (&[1, 1], 2)], &[]);
    let j = vec![v(&[1, -1]), v(&[0, 1])];
    let e = EmopLinear::new(j.clone(), gamma.clone(), None).unwrap();
    let we = e.weakly_efficient_set().unwrap();
    let pts = grid(2, 0, 2, 4);
    for z in pts.iter().filter(|z| gamma.contains(z)) {
        assert_eq!(we.contains(z), lp_weakly_efficient(&j, &gamma, z), "{z:?}");
        // a grid dominator is a real one, so the grid test can only be more lenient
        if we.contains(z) {
            assert!(e.grid_weakly_efficient(z, &zero(2), &v(&[2, 2]), &r(1, 4)).unwrap());
        }
    }
}

#[test]
fn emop_preconditions() {
    let half = poly(2, &[(&[-1, 0], 0)], &[]);
    let j = vec![v(&[1, 0]), v(&[0, 1])];
    assert!(matches!(EmopLinear::new(j, half, None), Err(Error::Precondition(_))));
    assert!(EmopLinear::new(vec![v(&[1, 0])], unit_square(), None).is_err());
}

#[test]
fn example_b_values() {
    let b = ExampleB;
    assert_eq!(b.k_value(&r(-1, 2)), Some(r(2, 1)));
    assert_eq!(b.k_value(&r(-2, 1)), None);
    assert_eq!(b.k_value(&r(1, 1)), Some(r(0, 1)));
    let o: &dyn ProgramOracle<Rational> = &b;
    assert!(o.q_feasible(&[r(-1, 2)], &v(&[2])));
    assert!(!o.q_feasible(&[r(-1, 2)], &v(&[1])));
    assert!(o.p_feasible(&[r(-1, 1)]).unwrap());
    assert!(!o.p_feasible(&[r(-3, 2)]).unwrap());
}

#[test]
fn oracle_on_convex_programs() {
    for (p, dim, lo, hi, den) in [(convex_line(), 2, -2, 2, 4), (convex_kink(), 2, -2, 2, 4), (convex_plane(), 4, -1, 1, 4)] {
        let cfg = GridOracleConfig { lo: vec![r(lo, 1); dim], hi: vec![r(hi, 1); dim], step: r(1, den), radius: 1 };
        let rep = oracle_relate(&p, &cfg).unwrap();
        assert!(rep.global_correspondence());
        let mins = rep.p.global_minimizers();
        assert_eq!(mins.len(), 1);
    }
}

#[test]
fn oracle_errors() {
    let a = example_a::<Rational>().unwrap();
    let cfg = GridOracleConfig::cube(2, r(-3, 1), r(-2, 1), r(1, 10), 1);
    assert!(matches!(oracle_relate(&a, &cfg), Err(Error::NoData(_))));
    let cfg = GridOracleConfig::cube(2, r(-3, 1), r(3, 1), r(1, 100_000), 1);
    assert!(matches!(oracle_relate(&a, &cfg), Err(Error::Resource(_))));
    let cfg = GridOracleConfig::cube(2, r(-3, 1), r(3, 1), r(1, 10), 0);
    assert!(matches!(oracle_relate(&a, &cfg), Err(Error::Precondition(_))));
}

#[test]
fn instance_files_load() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../instances");
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        if value.get("type").is_none() {
            continue;
        }
        let inst = Instance::from_json_str(&text).unwrap();
        let loaded = inst.build::<Rational>().unwrap();
        assert!(loaded.oracle().n() >= 1, "{path:?}");
        seen += 1;
    }
    assert!(seen >= 5);
}

#[test]
fn instance_parse_errors() {
    let e = Instance::from_json_str("{\"type\": \"ccmp\", \"n\": 2, \"kappa\": 1, \"extra\": 3}").unwrap_err();
    assert!(matches!(e, Error::Parse(_)));
    let e = Instance::from_json_str("{\n\"type\": \"ccmp\",\n\"n\": }").unwrap_err();
    assert!(e.to_string().contains("line 3"), "{e}");
    let inst = Instance::from_json_str("{\"type\": \"ccmp\", \"n\": 2, \"kappa\": 2}").unwrap();
    assert!(matches!(inst.build::<Rational>(), Err(Error::Precondition(_))));
}

#[test]
fn program_instance_round_trip() {
    let c = ccmp(2, 1);
    let dto = c.program().to_dto();
    let text = serde_json::to_string(&serde_json::json!({"type": "program", "objective": dto.objective, "F": dto.f, "G": dto.g, "M": dto.m_set, "H": dto.h})).unwrap();
    let back = Instance::from_json_str(&text).unwrap().build::<Rational>().unwrap();
    let p = back.program().unwrap();
    assert!(p.has_custom_feasibility_map());
    assert!(union_eq(p.derived().h.graph(), c.program().derived().h.graph()).unwrap());
}

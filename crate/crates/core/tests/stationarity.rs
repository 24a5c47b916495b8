mod common;

use common::*;
use mstat::geometry::{union_eq, ConvexPolyhedron, PolyUnion};
use mstat::mappings::PolyMapping;
use mstat::problems::{example_a, BilevelLq, Ccmp};
use mstat::stationarity::*;
use mstat::{Error, Program, Rational};

fn ccmp_sum() -> Ccmp<Rational> {
    Ccmp::new(2, 1, Objective::linear(v(&[1, 1])), None).unwrap()
}

fn bilevel_1d() -> BilevelLq<Rational> {
    let objective = Objective::Quadratic { q: vec![v(&[2, 0]), v(&[0, 2])], c: v(&[-2, 0]) };
    BilevelLq::new(vec![v(&[1])], vec![v(&[-1])], v(&[0]), vec![v(&[-1])], v(&[0]), objective, None).unwrap()
}

/// `min ½z² s.t. z ≥ −1` via `F(z) = {z}` and `G(z,λ) = [−λ−1, ∞)`.
fn interior_quadratic() -> Program {
    let f = PolyMapping::new(1, 1, union(2, vec![poly(2, &[], &[(&[1, -1], 0)])])).unwrap();
    let g = PolyMapping::new(2, 1, union(3, vec![poly(3, &[(&[0, -1, -1], 1)], &[])])).unwrap();
    let objective = Objective::Quadratic { q: vec![v(&[1])], c: v(&[0]) };
    ImplicitProgram::new(objective, f, g, union(1, vec![ConvexPolyhedron::universe(1)]), None).unwrap()
}

#[test]
fn subdifferential_examples() {
    let id: Objective<Rational> = Objective::linear(v(&[1]));
    for z in [-3, 0, 5] {
        assert!(id.subdifferential_at(&v(&[z])).unwrap().set_eq(&ConvexPolyhedron::point(&v(&[1]))));
    }
    let abs = Objective::MaxAffine { pieces: vec![(v(&[1]), r(0, 1)), (v(&[-1]), r(0, 1))] };
    let expected = ConvexPolyhedron::boxed(&v(&[-1]), &v(&[1]));
    assert!(abs.subdifferential_at(&v(&[0])).unwrap().set_eq(&expected));
    let q = Objective::Quadratic { q: vec![v(&[1, 0]), v(&[0, 1])], c: zero(2) };
    assert!(q.subdifferential_at(&v(&[2, 3])).unwrap().set_eq(&ConvexPolyhedron::point(&v(&[2, 3]))));
}

#[test]
fn derived_maps_of_example_a() {
    let p = example_a::<Rational>().unwrap();
    let k = &p.derived().k;
    let dom = k.domain().unwrap();
    assert!(union_eq(&dom, &union(1, vec![poly(1, &[(&[-1], 1)], &[])])).unwrap());
    let pts = |xs: &[Rational]| PolyUnion::new(1, xs.iter().map(|x| ConvexPolyhedron::point(&[x.clone()])).collect()).unwrap();
    assert!(union_eq(&k.image_at(&v(&[0])).unwrap(), &pts(&[r(0, 1), r(1, 1)])).unwrap());
    assert!(union_eq(&k.image_at(&[r(-1, 2)]).unwrap(), &pts(&[r(1, 1)])).unwrap());
    assert!(k.image_at(&v(&[-2])).unwrap().is_empty());
    assert!(!p.is_feasible(&v(&[-2])).unwrap());

    // same program written out from its description
    let hand = example_a_by_hand();
    assert!(union_eq(hand.derived().h.graph(), p.derived().h.graph()).unwrap());
}

#[test]
fn ccmp_multiplier_set_at_origin() {
    let c = ccmp_sum();
    let k0 = c.program().k_image(&zero(2)).unwrap();
    let triangle = union(2, vec![poly(2, &[(&[-1, -1], -1), (&[1, 0], 1), (&[0, 1], 1)], &[])]);
    assert!(union_eq(&k0, &triangle).unwrap());
}

#[test]
fn stratum_representatives() {
    let c = ccmp_sum();
    let strata = c.program().k_strata(&zero(2)).unwrap();
    assert_eq!(strata.len(), 7);
    // vertex enumeration of the triangle by brute force over the defining lines
    let lines = [(v(&[1, 1]), r(1, 1)), (v(&[1, 0]), r(1, 1)), (v(&[0, 1]), r(1, 1))];
    let triangle = poly(2, &[(&[-1, -1], -1), (&[1, 0], 1), (&[0, 1], 1)], &[]);
    let mut vertices = Vec::new();
    for i in 0..3 {
        for j in i + 1..3 {
            let (a, b) = (&lines[i], &lines[j]);
            let det = &a.0[0] * &b.0[1] - &a.0[1] * &b.0[0];
            if det == r(0, 1) {
                continue;
            }
            let x = (&a.1 * &b.0[1] - &b.1 * &a.0[1]) / &det;
            let y = (&a.0[0] * &b.1 - &b.0[0] * &a.1) / &det;
            if triangle.contains(&[x.clone(), y.clone()]) {
                vertices.push(vec![x, y]);
            }
        }
    }
    assert_eq!(vertices.len(), 3);
    for vert in &vertices {
        assert!(strata.iter().any(|s| &s.representative == vert), "{vert:?}");
    }
    let interior: Vec<_> = strata
        .iter()
        .filter(|s| {
            let l = &s.representative;
            &l[0] + &l[1] > r(1, 1) && l[0] < r(1, 1) && l[1] < r(1, 1)
        })
        .collect();
    assert_eq!(interior.len(), 1);

    let a = example_a::<Rational>().unwrap();
    let reps: Vec<_> = a.k_strata(&v(&[0])).unwrap().into_iter().map(|s| s.representative).collect();
    assert_eq!(reps.len(), 2);
    assert!(reps.contains(&v(&[0])) && reps.contains(&v(&[1])));

    assert_eq!(c.program().k_strata(&v(&[1, 0])).unwrap().len(), 1);
}

#[test]
fn implicit_stationarity_of_example_a() {
    let p = example_a::<Rational>().unwrap();
    let v1 = check_stationarity(&p, &v(&[-1]), CheckKind::Implicit, None).unwrap();
    assert!(v1.holds);
    assert_eq!(v1.witnesses.nu.as_deref(), Some(&v(&[1])[..]));
    assert_eq!(v1.witnesses.extra["xi_h"], v(&[-1]));
}

#[test]
fn ccmp_stationarity_contrast() {
    let c = ccmp_sum();
    let s = Session::new(c.program(), &zero(2)).unwrap();
    let e = s.check(CheckKind::Explicit, None).unwrap();
    assert_eq!(e.strata.len(), 7);
    assert_eq!(e.holds_for_all, Some(true));
    assert!(!s.check(CheckKind::Implicit, None).unwrap().holds);
}

#[test]
fn interior_point_with_zero_gradient() {
    let p = interior_quadratic();
    let s = Session::new(&p, &zero(1)).unwrap();
    for kind in [CheckKind::Implicit, CheckKind::Fuzzy, CheckKind::Explicit] {
        let verdict = s.check(kind, None).unwrap();
        assert!(verdict.holds, "{kind}");
        let w = &verdict.witnesses;
        for part in [&w.mu, &w.nu, &w.xi].into_iter().flatten() {
            assert!(part.iter().all(|x| *x == r(0, 1)), "{kind}: {part:?}");
        }
        for part in w.extra.values() {
            assert!(part.iter().all(|x| *x == r(0, 1)), "{kind}: {part:?}");
        }
    }
}

#[test]
fn constraint_qualification_examples() {
    let c = ccmp_sum();
    // the literal feasibility map has nonzero normals in its kernel at 0
    let m1 = check_cq(&c.literal_program(), &zero(2), None, CheckKind::MordukhovichI).unwrap();
    assert!(!m1.holds);
    assert!(m1.certificates.iter().any(|a| a == mstat::mappings::anchors::POLYHEDRAL_SUBREGULARITY));
    // z ↦ D_κ − z is metrically regular everywhere
    let m2 = check_cq(c.program(), &zero(2), None, CheckKind::MordukhovichI).unwrap();
    assert!(m2.holds);

    for z in grid(2, -1, 1, 1).into_iter().filter(|z| c.program().is_feasible(z).unwrap()) {
        let inc = check_cq(c.program(), &z, None, CheckKind::IncLambda).unwrap();
        assert_eq!(inc.holds_for_all, Some(true), "{z:?}");
    }

    let b = bilevel_1d();
    let z = v(&[1, 1]);
    assert!(b.program().is_feasible(&z).unwrap());
    let mr = check_cq(b.program(), &z, None, CheckKind::MrCq).unwrap();
    assert_eq!(mr.holds_for_all, Some(true));
}

#[test]
fn pipeline_reports() {
    let c = ccmp_sum();
    let rep = pipeline(c.program(), &zero(2)).unwrap();
    assert_eq!(rep.status("explicit_all"), Some(NodeStatus::Holds));
    assert_eq!(rep.status("implicit"), Some(NodeStatus::Fails));
    assert_eq!(rep.status("branch_c"), Some(NodeStatus::Certified));
    assert_eq!(rep.status("branch_d"), Some(NodeStatus::Certified));
    for e in rep.edges.iter().filter(|e| e.from.first().map(String::as_str) == Some("implicit")) {
        assert_eq!(e.status, EdgeStatus::Vacuous, "{e:?}");
    }
    assert!(rep.consistent);

    let a = example_a::<Rational>().unwrap();
    let rep = pipeline(&a, &v(&[-1])).unwrap();
    assert_eq!(rep.status("implicit"), Some(NodeStatus::Holds));
    assert_eq!(rep.status("k_hat_isc"), Some(NodeStatus::Certified));
    assert!(matches!(rep.status("explicit_some"), Some(NodeStatus::Holds)));
    assert!(rep.consistent);

    let rep = pipeline(&convex_line(), &zero(1)).unwrap();
    assert!(rep.conclusions.iter().any(|c| c.contains("global minimizer")));
    assert_eq!(rep.status("global_minimizer"), Some(NodeStatus::Concluded));
}

#[test]
fn convex_sufficiency_examples() {
    let v0 = convex_sufficiency(&convex_line(), &zero(1)).unwrap();
    assert!(v0.holds && v0.kind == CheckKind::Implicit);
    assert!(v0.certificates.iter().any(|a| a == mstat::mappings::anchors::CONVEX_SUFFICIENCY));
    let v1 = convex_sufficiency(&interior_quadratic(), &zero(1)).unwrap();
    assert!(v1.holds);
    let err = convex_sufficiency(ccmp_sum().program(), &zero(2)).unwrap_err();
    assert!(matches!(err, Error::Precondition(_)));
}

#[test]
fn fuzzy_then_explicit_under_the_inclusion() {
    let cases: Vec<(Program, Vec<Rational>)> = vec![
        (ccmp_sum().program().clone(), zero(2)),
        (ccmp_sum().program().clone(), v(&[1, 0])),
        (example_a::<Rational>().unwrap(), v(&[0])),
        (example_a::<Rational>().unwrap(), v(&[-1])),
        (bilevel_1d().program().clone(), v(&[1, 1])),
        (bilevel_1d().program().clone(), v(&[-1, 0])),
    ];
    for (p, z) in &cases {
        let s = Session::new(p, z).unwrap();
        for st in s.strata().unwrap() {
            let l = &st.representative;
            let inc = s.check_at(CheckKind::IncLambda, l).unwrap();
            let fuzzy = s.check_at(CheckKind::Fuzzy, l).unwrap();
            let explicit = s.check_at(CheckKind::Explicit, l).unwrap();
            if inc.holds && fuzzy.holds {
                assert!(explicit.holds, "{z:?} {l:?}");
            }
            // fuzzy stationarity is M-stationarity of the problem in (z, λ)
            assert_eq!(fuzzy.holds, s.explicit_problem_stationary(l).unwrap(), "{z:?} {l:?}");
        }
    }
}

#[test]
fn structured_implicit_gives_explicit() {
    let cases: Vec<(Program, Vec<Rational>)> = vec![
        (example_a::<Rational>().unwrap(), v(&[-1])),
        (bilevel_1d().program().clone(), v(&[1, 1])),
        (bilevel_1d().program().clone(), v(&[0, 0])),
        (Ccmp::new(2, 1, Objective::linear(v(&[0, 1])), None).unwrap().program().clone(), v(&[-1, 0])),
    ];
    let mut used = 0;
    for (p, z) in &cases {
        let zw: Vec<Rational> = z.iter().cloned().chain(zero(p.s())).collect();
        let s = Session::new(p, z).unwrap();
        if p.structure().is_some() && p.derived().k_hat.locally_bounded_at(&zw).unwrap() && s.check(CheckKind::Implicit, None).unwrap().holds {
            used += 1;
            assert!(s.check(CheckKind::Explicit, None).unwrap().holds, "{z:?}");
        }
    }
    assert!(used >= 2);
}

#[test]
fn infeasible_point_is_an_error() {
    let p = example_a::<Rational>().unwrap();
    assert!(matches!(Session::new(&p, &v(&[-2])), Err(Error::Precondition(_))));
}

#[test]
fn verdict_json_round_trip() {
    let p = example_a::<Rational>().unwrap();
    let s = Session::new(&p, &v(&[0])).unwrap();
    for kind in CheckKind::ALL {
        let verdict = s.check(kind, None).unwrap();
        let back: Verdict<Rational> = Verdict::from_json(&verdict.to_json()).unwrap();
        assert_eq!(back.holds, verdict.holds);
        assert_eq!(s.reverify(&back).unwrap(), verdict.holds, "{kind}");
    }
}

mod common;

use common::*;
use mstat::geometry::*;
use mstat::Union;

#[test]
fn lp_feasibility_examples() {
    assert!(lp_feasible(&poly(1, &[(&[1], 1), (&[-1], -2)], &[])).is_none());
    let w = lp_feasible(&poly(2, &[], &[(&[1, 0], 0)])).unwrap();
    assert_eq!(w[0], r(0, 1));
    let simplex = poly(2, &[(&[1, 1], 1), (&[-1, 0], 0), (&[0, -1], 0)], &[]);
    let w = lp_feasible(&simplex).unwrap();
    assert!(simplex.contains(&w));
}

#[test]
fn projection_examples() {
    let p = poly(2, &[(&[1, -1], 0)], &[(&[0, 1], 1)]);
    let q = project_out(&p, &[1]).unwrap();
    assert!(q.set_eq(&poly(1, &[(&[1], 1)], &[])));

    // (z, λ, w) with w ≥ −z−λ and λ = 0
    let p = poly(3, &[(&[-1, -1, -1], 0)], &[(&[0, 1, 0], 0)]);
    let q = project_out(&p, &[1]).unwrap();
    for pt in grid(2, -3, 3, 1) {
        let expected = pt[1] >= -pt[0].clone();
        assert_eq!(q.contains(&pt), expected, "{pt:?}");
    }

    let same = project_out(&p, &[]).unwrap();
    assert!(same.set_eq(&p));
}

#[test]
fn membership_examples() {
    let d = sparse_set(2, 1);
    assert!(membership(&d, &v(&[0, 3])));
    assert!(!membership(&d, &v(&[1, 1])));
    for piece in d.pieces() {
        let w = lp_feasible(piece).unwrap();
        assert!(membership(&d, &w));
    }
}

#[test]
fn tangent_cone_examples() {
    let half = union(2, vec![poly(2, &[(&[1, 0], 0)], &[])]);
    let t = tangent_cone(&half, &v(&[0, 5])).unwrap();
    assert!(union_eq(&t, &half).unwrap());

    let t = tangent_cone(&axes(2), &zero(2)).unwrap();
    assert!(union_eq(&t, &axes(2)).unwrap());
    // difference quotients along sampled members
    for p in nearby_members(&axes(2), &zero(2), &r(1, 1)) {
        assert!(t.contains(&p));
    }

    let t = tangent_cone(&half, &v(&[-1, 2])).unwrap();
    assert!(union_eq(&t, &union(2, vec![ConvexPolyhedron::universe(2)])).unwrap());
}

#[test]
fn polar_examples() {
    let half = union(2, vec![poly(2, &[(&[1, 0], 0)], &[])]);
    let expected = poly(2, &[(&[-1, 0], 0)], &[(&[0, 1], 0)]);
    assert!(polar_cone(&half).unwrap().set_eq(&expected));

    let p = polar_cone(&axes(2)).unwrap();
    assert!(p.set_eq(&ConvexPolyhedron::origin(2)));
    for d in integer_directions(2, 2) {
        let in_polar = axes(2).pieces().iter().all(|piece| {
            [unit(2, 0), unit(2, 1)]
                .iter()
                .chain([v(&[-1, 0]), v(&[0, -1])].iter())
                .filter(|x| piece.contains(x))
                .all(|x| dot(&d, x) <= r(0, 1))
        });
        assert_eq!(in_polar, p.contains(&d));
    }

    let p = polar_cone(&union(2, vec![ConvexPolyhedron::origin(2)])).unwrap();
    assert!(p.set_eq(&ConvexPolyhedron::universe(2)));
}

#[test]
fn regular_normal_examples() {
    let half = union(2, vec![poly(2, &[(&[1, 0], 0)], &[])]);
    let n = regular_normal_cone(&half, &v(&[0, 5])).unwrap();
    assert!(n.set_eq(&poly(2, &[(&[-1, 0], 0)], &[(&[0, 1], 0)])));
    assert!(regular_normal_cone(&axes(2), &zero(2)).unwrap().set_eq(&ConvexPolyhedron::origin(2)));
    assert!(regular_normal_cone(&half, &v(&[-1, 0])).unwrap().set_eq(&ConvexPolyhedron::origin(2)));
}

#[test]
fn limiting_normal_examples() {
    let n = limiting_normal_cone(&sparse_set(2, 1), &zero(2)).unwrap();
    assert!(union_eq(&n, &axes(2)).unwrap());

    let n = limiting_normal_cone(&complementarity(), &zero(2)).unwrap();
    assert!(union_eq(&n, &complementarity_normal_closed_form()).unwrap());

    let simplex = union(2, vec![poly(2, &[(&[1, 1], 1), (&[-1, 0], 0), (&[0, -1], 0)], &[])]);
    for x in [v(&[0, 0]), v(&[1, 0]), v(&[0, 1]), vec![r(1, 2), r(1, 2)], vec![r(1, 4), r(1, 4)]] {
        let lim = limiting_normal_cone(&simplex, &x).unwrap();
        let reg = union(2, vec![regular_normal_cone(&simplex, &x).unwrap()]);
        assert!(union_eq(&lim, &reg).unwrap(), "{x:?}");
    }
}

#[test]
fn regular_cone_sits_inside_limiting_cone() {
    let sets = [complementarity(), axes(2), sparse_set(3, 1), sparse_set(3, 2)];
    for u in &sets {
        let dim = u.dim();
        for x in grid(dim, -1, 1, 1).into_iter().filter(|x| u.contains(x)) {
            let reg = union(dim, vec![regular_normal_cone(u, &x).unwrap()]);
            let lim = limiting_normal_cone(u, &x).unwrap();
            assert!(contains_union(&reg, &lim).unwrap());
        }
    }
}

#[test]
fn containment_examples() {
    let a1 = union(2, vec![axis(2, 0)]);
    assert!(contains_union(&a1, &axes(2)).unwrap());

    let plane = union(2, vec![ConvexPolyhedron::universe(2)]);
    let halves = union(2, vec![poly(2, &[(&[1, -1], 0)], &[]), poly(2, &[(&[-1, 1], 0)], &[])]);
    assert!(contains_union(&plane, &halves).unwrap());
    for p in grid(2, -2, 2, 2) {
        assert!(halves.contains(&p));
    }

    let quadrant = union(2, vec![poly(2, &[(&[-1, 0], 0), (&[0, 1], 0)], &[])]);
    assert!(!contains_union(&quadrant, &axes(2)).unwrap());
    let w = find_uncovered(&quadrant, &axes(2)).unwrap().unwrap();
    assert!(w[0] > r(0, 1) && w[1] < r(0, 1));
    assert!(quadrant.contains(&v(&[1, -1])) && !axes(2).contains(&v(&[1, -1])));
}

#[test]
fn minkowski_examples() {
    let u = complementarity();
    let s = minkowski_sum(&u, &union(2, vec![ConvexPolyhedron::origin(2)])).unwrap();
    assert!(union_eq(&s, &u).unwrap());

    let ray1 = union(2, vec![poly(2, &[(&[-1, 0], 0)], &[(&[0, 1], 0)])]);
    let ray2 = union(2, vec![poly(2, &[(&[0, -1], 0)], &[(&[1, 0], 0)])]);
    let orthant = union(2, vec![poly(2, &[(&[-1, 0], 0), (&[0, -1], 0)], &[])]);
    assert!(union_eq(&minkowski_sum(&ray1, &ray2).unwrap(), &orthant).unwrap());

    let shifted = minkowski_sum(&axes(2), &union(2, vec![ConvexPolyhedron::point(&v(&[1, 1]))])).unwrap();
    for p in grid(2, -3, 3, 2) {
        let expected = p[0] == r(1, 1) || p[1] == r(1, 1);
        assert_eq!(shifted.contains(&p), expected, "{p:?}");
    }
}

#[test]
fn limiting_cone_matches_sampled_regular_normals() {
    // sampled outer limit over integer directions, compared both ways
    let cases = [(complementarity(), zero(2)), (axes(2), zero(2)), (axes(2), v(&[1, 0])), (sparse_set(3, 1), zero(3))];
    for (u, x) in &cases {
        let lim = limiting_normal_cone(u, x).unwrap();
        let sampled = sampled_limiting_directions(u, x, &r(1, 4));
        for d in integer_directions(x.len(), 3) {
            assert_eq!(lim.contains(&d), sampled.contains(&d), "set {u} at {x:?}, direction {d:?}");
        }
    }
}

#[test]
fn json_round_trip() {
    let u = complementarity();
    let back: Union = PolyUnion::from_json(&u.to_json()).unwrap();
    assert!(union_eq(&u, &back).unwrap());
}

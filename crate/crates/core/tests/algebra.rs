mod common;

use biasrank::linalg::rank;
use biasrank::{Budget, Polynomial, PrimeModulus, Subspace};
use common::{modulus, point, polynomial};
use proptest::prelude::*;

fn all_points(p: PrimeModulus, n: usize) -> Vec<Vec<u32>> {
    Subspace::full(p, n).points(Budget::DEFAULT).unwrap().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn span_is_canonical(
        (p, vs, scales) in modulus().prop_flat_map(|p| (
            Just(p),
            prop::collection::vec(point(p, 4), 0..5),
            prop::collection::vec(1..p.get(), 5),
        )),
    ) {
        let a = Subspace::span(p, 4, vs.clone()).unwrap();
        // scaled, reversed and with a combined vector appended
        let mut ws: Vec<Vec<u32>> = vs.iter().rev().zip(&scales).map(|(v, &s)| p.scale_vec(s, v)).collect();
        if vs.len() >= 2 {
            ws.push(p.add_vec(&vs[0], &vs[1]));
        }
        let b = Subspace::span(p, 4, ws).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.dim(), rank(p, &vs, 4));
        let pts: Vec<_> = a.points(Budget::DEFAULT).unwrap().collect();
        prop_assert_eq!(pts.len() as u128, a.size());
        let mut idx: Vec<usize> = pts.iter().map(|x| p.point_index(x)).collect();
        idx.sort_unstable();
        idx.dedup();
        prop_assert_eq!(idx.len(), pts.len());
        prop_assert!(pts.iter().all(|x| a.contains(x)));
    }

    #[test]
    fn intersection_and_sum_dimensions(
        (p, us, vs) in modulus().prop_flat_map(|p| (
            Just(p),
            prop::collection::vec(point(p, 4), 0..4),
            prop::collection::vec(point(p, 4), 0..4),
        )),
    ) {
        let u = Subspace::span(p, 4, us).unwrap();
        let v = Subspace::span(p, 4, vs).unwrap();
        let i = u.intersect(&v).unwrap();
        let s = u.sum(&v).unwrap();
        prop_assert_eq!(i.dim() + s.dim(), u.dim() + v.dim());
        prop_assert!(u.contains_subspace(&i) && v.contains_subspace(&i));
        prop_assert!(s.contains_subspace(&u) && s.contains_subspace(&v));
    }

    #[test]
    fn derivative_matches_pointwise_difference(
        (p, f, h) in modulus().prop_flat_map(|p| (Just(p), polynomial(p, 3, 4, 6), point(p, 3))),
    ) {
        let d = f.discrete_derivative(&h).unwrap();
        for x in all_points(p, 3) {
            let shifted = p.add_vec(&x, &h);
            prop_assert_eq!(d.evaluate(&x).unwrap(), p.sub(f.evaluate(&shifted).unwrap(), f.evaluate(&x).unwrap()));
        }
        if f.degree() > 0 {
            prop_assert!(d.degree() < f.degree());
        }
    }

    #[test]
    fn derivatives_commute_and_are_linear(
        (_p, f, g, a, b) in modulus().prop_flat_map(|p| (
            Just(p), polynomial(p, 3, 4, 6), polynomial(p, 3, 4, 6), point(p, 3), point(p, 3),
        )),
    ) {
        let ab = f.iterated_derivative(&[a.clone(), b.clone()]).unwrap();
        let ba = f.iterated_derivative(&[b.clone(), a.clone()]).unwrap();
        prop_assert_eq!(ab, ba);
        let lhs = f.add(&g).unwrap().discrete_derivative(&a).unwrap();
        let rhs = f.discrete_derivative(&a).unwrap().add(&g.discrete_derivative(&a).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn degree_d_killed_by_d_plus_one_derivatives(
        (_p, f, hs) in modulus().prop_flat_map(|p| (
            Just(p), polynomial(p, 2, 2, 5), prop::collection::vec(point(p, 2), 3),
        )),
    ) {
        prop_assert!(f.iterated_derivative(&hs).unwrap().is_zero());
    }

    #[test]
    fn table_round_trip(
        (p, f) in modulus().prop_flat_map(|p| (Just(p), polynomial(p, 3, 6, 8))),
    ) {
        let t = f.to_table(Budget::DEFAULT).unwrap();
        prop_assert_eq!(t.interpolate(Budget::DEFAULT).unwrap(), f.clone());
        for (i, &v) in t.values.iter().enumerate() {
            prop_assert_eq!(v, f.evaluate(&p.index_point(i, 3)).unwrap());
        }
    }

    #[test]
    fn text_and_json_round_trip(
        (p, f) in modulus().prop_flat_map(|p| (Just(p), polynomial(p, 3, 4, 6))),
    ) {
        prop_assert_eq!(Polynomial::parse(p, 3, &f.to_string()).unwrap(), f.clone());
        let json = serde_json::to_string(&f).unwrap();
        prop_assert_eq!(serde_json::from_str::<Polynomial>(&json).unwrap(), f);
    }

    #[test]
    fn polarization_is_symmetric_and_multilinear(
        (f, hs, c, g) in polynomial(PrimeModulus::new(5).unwrap(), 3, 4, 8).prop_flat_map(|f| {
            let p = f.modulus();
            (Just(f), prop::collection::vec(point(p, 3), 4), 0..p.get(), point(p, 3))
        }),
    ) {
        let p = f.modulus();
        let d = f.polarization(4);
        let args: Vec<&[u32]> = hs.iter().map(Vec::as_slice).collect();
        let base = d.eval(&args);
        // symmetric under swapping the first and the last slot
        prop_assert_eq!(d.eval(&[args[3], args[1], args[2], args[0]]), base);
        prop_assert_eq!(d.eval(&[args[0], args[2], args[1], args[3]]), base);
        // linear in the first slot
        let mixed = p.add_vec(&p.scale_vec(c, &hs[0]), &g);
        let lhs = d.eval(&[&mixed, args[1], args[2], args[3]]);
        let rhs = p.add(p.mul(c, base), d.eval(&[&g, args[1], args[2], args[3]]));
        prop_assert_eq!(lhs, rhs);
        // agrees with four discrete derivatives
        let fourth = f.iterated_derivative(&hs).unwrap();
        prop_assert!(fourth.degree() <= 0);
        prop_assert_eq!(fourth.evaluate(&[0, 0, 0]).unwrap(), base);
    }

    #[test]
    fn quartic_taylor_identity(
        (f, x) in polynomial(PrimeModulus::new(5).unwrap(), 3, 4, 8)
            .prop_flat_map(|f| (Just(f), point(PrimeModulus::new(5).unwrap(), 3))),
    ) {
        let p = f.modulus();
        let fourth = f.iterated_derivative(&vec![x.clone(); 4]).unwrap();
        let top = f.homogeneous_part(4).evaluate(&x).unwrap();
        prop_assert_eq!(fourth.evaluate(&[0, 0, 0]).unwrap(), p.mul(24 % 5, top));
    }

    #[test]
    fn restriction_agrees_with_evaluation(
        (p, f, basis, offset) in modulus().prop_flat_map(|p| (
            Just(p), polynomial(p, 3, 3, 6), prop::collection::vec(point(p, 3), 0..3), point(p, 3),
        )),
    ) {
        let dir = Subspace::span(p, 3, basis).unwrap();
        let a = biasrank::AffineSubspace::new(offset, dir).unwrap();
        let g = f.restrict(&a).unwrap();
        for c in all_points(p, a.dim()) {
            prop_assert_eq!(g.evaluate(&c).unwrap(), f.evaluate(&a.point(&c)).unwrap());
        }
    }
}

#[test]
fn subspace_counts_are_gaussian_binomials() {
    let p = PrimeModulus::new(3).unwrap();
    let counts: Vec<usize> = (0..=4).map(|k| Subspace::enumerate_all(p, 4, k).count()).collect();
    assert_eq!(counts, vec![1, 40, 130, 40, 1]);
}

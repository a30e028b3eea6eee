mod common;

use biasrank::charsum::{bias_equals_power_check, level_counts, Domain, PowerClass};
use biasrank::family::QuadFamily;
use biasrank::linalg::rank;
use biasrank::quadform::QuadraticPoly;
use biasrank::{Budget, PrimeModulus, Subspace};
use common::{matrix, modulus, point, polynomial, quadratic, substitute};
use proptest::prelude::*;

const B: Budget = Budget::DEFAULT;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn certificate_reexpands_and_matches_formula(
        q in modulus().prop_flat_map(|p| quadratic(p, 4)),
    ) {
        let c = q.schmidt_rank();
        prop_assert!(c.verify(&q));
        prop_assert_eq!(c.gram_rank, q.gram_rank());
        prop_assert_eq!(c.schmidt_rank, biasrank::quadform::RankCertificate::formula(c.gram_rank, c.witt));
        prop_assert_eq!(c.schmidt_rank, q.homogeneous().schmidt_rank().schmidt_rank);
    }

    #[test]
    fn rank_invariant_under_linear_change(
        (q, a) in modulus().prop_flat_map(|p| (quadratic(p, 3), matrix(p, 3))),
    ) {
        let p = q.modulus();
        prop_assume!(rank(p, &a, 3) == 3);
        let moved = QuadraticPoly::from_polynomial(&substitute(&q.to_polynomial(), &a)).unwrap();
        let (c1, c2) = (q.schmidt_rank(), moved.schmidt_rank());
        prop_assert_eq!(c1.gram_rank, c2.gram_rank);
        prop_assert_eq!(c1.witt, c2.witt);
        prop_assert_eq!(c1.schmidt_rank, c2.schmidt_rank);
    }

    #[test]
    fn pairing_is_symmetric_bilinear(
        (q, s, t, u, c) in modulus().prop_flat_map(|p| (
            quadratic(p, 3), point(p, 3), point(p, 3), point(p, 3), 0..p.get(),
        )),
    ) {
        let p = q.modulus();
        let st = q.gram_pair(&s, &t).unwrap();
        prop_assert_eq!(st, q.gram_pair(&t, &s).unwrap());
        let mixed = p.add_vec(&p.scale_vec(c, &s), &u);
        prop_assert_eq!(
            q.gram_pair(&mixed, &t).unwrap(),
            p.add(p.mul(c, st), q.gram_pair(&u, &t).unwrap())
        );
        let h = q.homogeneous();
        let direct = p.sub(p.sub(h.eval(&p.add_vec(&s, &t)), h.eval(&s)), h.eval(&t));
        prop_assert_eq!(direct, st);
        prop_assert_eq!(q.pairing_form(&t).unwrap().eval(p, &s), st);
    }

    #[test]
    fn quadratic_bias_is_a_power(
        q in modulus().prop_flat_map(|p| quadratic(p, 3)),
    ) {
        let f = q.to_polynomial();
        let counts = level_counts(&f, Domain::Full(3), B).unwrap();
        let m = q.gram_rank() as u32;
        match counts.power_class() {
            PowerClass::Zero => {}
            PowerClass::Power(k) => prop_assert_eq!(k, m),
            PowerClass::Other => prop_assert!(false, "bias^2 is not a power of p"),
        }
        if q.linear().is_zero() {
            prop_assert!(bias_equals_power_check(&q.homogeneous().to_polynomial(), Domain::Full(3), m, B).unwrap());
        }
    }

    #[test]
    fn squared_modulus_is_product_with_conjugate(
        f in modulus().prop_flat_map(|p| polynomial(p, 2, 4, 6)),
    ) {
        let counts = level_counts(&f, Domain::Full(2), B).unwrap();
        let s = counts.character_sum();
        prop_assert_eq!(s.mul(&s.conj()), counts.squared_modulus());
        let float = s.to_complex().norm_sqr();
        prop_assert!((counts.squared_modulus().to_complex().re - float).abs() < 1e-6);
        prop_assert!(counts.bias() <= 1.0);
    }

    #[test]
    fn single_member_regularity_is_rank(q in modulus().prop_flat_map(|p| quadratic(p, 3))) {
        let p = q.modulus();
        let fam = QuadFamily::on_full_space(p, 3, vec![q.clone()]).unwrap();
        prop_assert_eq!(fam.regularity(B).unwrap().rank, q.schmidt_rank().schmidt_rank);
    }

    #[test]
    fn regularity_ignores_reindexing_and_scaling(
        (a, b, s) in modulus().prop_flat_map(|p| (quadratic(p, 3), quadratic(p, 3), 1..p.get())),
    ) {
        let p = a.modulus();
        let scaled = QuadraticPoly::linear_combination(p, 3, &[s], std::slice::from_ref(&a)).unwrap();
        let f1 = QuadFamily::on_full_space(p, 3, vec![a.clone(), b.clone()]).unwrap();
        let f2 = QuadFamily::on_full_space(p, 3, vec![b, scaled]).unwrap();
        prop_assert_eq!(f1.regularity(B).unwrap().rank, f2.regularity(B).unwrap().rank);
    }

    #[test]
    fn regularize_meets_target_within_codim_budget(
        (qs, target) in modulus().prop_flat_map(|p| (prop::collection::vec(quadratic(p, 4), 1..4), 1usize..3)),
    ) {
        let p = qs[0].modulus();
        let hom: Vec<_> = qs.iter().map(QuadraticPoly::homogeneous).collect();
        let fam = QuadFamily::on_full_space(p, 4, hom).unwrap();
        let out = fam.regularize(target, B).unwrap();
        prop_assert!(out.family.is_empty() || out.family.regularity(B).unwrap().rank >= target);
        let removed = fam.len() - out.family.len();
        prop_assert!(out.family.ambient().codim() <= target * removed);
        prop_assert_eq!(out.steps.len(), removed);
        // the regularized zero set sits inside the original one
        let before = fam.zero_set(B).unwrap();
        for x in out.family.zero_set(B).unwrap().points() {
            prop_assert!(before.contains(x));
        }
    }

    #[test]
    fn parallelepiped_directions_are_admissible(
        (qs, x, h) in Just(PrimeModulus::new(5).unwrap()).prop_flat_map(|p| (
            prop::collection::vec(quadratic(p, 3), 1..3), point(p, 3), prop::collection::vec(point(p, 3), 2..4),
        )),
    ) {
        let p = qs[0].modulus();
        let hom: Vec<_> = qs.iter().map(QuadraticPoly::homogeneous).collect();
        let fam = QuadFamily::on_full_space(p, 3, hom).unwrap();
        let zeros = fam.zero_set(B).unwrap();
        let corners_in = (0..1usize << h.len()).all(|mask| {
            let corner = h.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).fold(x.clone(), |acc, (_, v)| p.add_vec(&acc, v));
            zeros.contains(&corner)
        });
        if corners_in {
            prop_assert!(fam.admissible(&h).unwrap());
        }
    }
}

#[test]
fn parallelepipeds_inside_a_zero_set_are_admissible() {
    // exhaustive version on one family: every 2-parallelepiped in X has admissible sides
    let p = PrimeModulus::new(5).unwrap();
    let q = QuadraticPoly::from_polynomial(&biasrank::Polynomial::parse(p, 3, "x1*x2 + 2*x3^2").unwrap()).unwrap();
    let fam = QuadFamily::on_full_space(p, 3, vec![q]).unwrap();
    let zeros = fam.zero_set(B).unwrap();
    let pts: Vec<_> = Subspace::full(p, 3).points(B).unwrap().collect();
    let mut checked = 0;
    for x in zeros.points() {
        for a in &pts {
            let xa = p.add_vec(x, a);
            if !zeros.contains(&xa) {
                continue;
            }
            for b in &pts {
                if zeros.contains(&p.add_vec(x, b)) && zeros.contains(&p.add_vec(&xa, b)) {
                    assert!(fam.admissible(&[a.clone(), b.clone()]).unwrap());
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 100);
}

#[test]
fn pairing_on_shifted_zero_set() {
    // for x in X_t: (t, x) = -Q(t)
    let p = PrimeModulus::new(5).unwrap();
    for (qs, t) in [("x1*x2 + x3^2", [1u32, 2, 0]), ("2*x1^2 + x2*x3 + 3*x1*x3", [0, 1, 4]), ("x1*x3", [3, 3, 3])] {
        let q = QuadraticPoly::from_polynomial(&biasrank::Polynomial::parse(p, 3, qs).unwrap()).unwrap();
        let fam = QuadFamily::on_full_space(p, 3, vec![q.clone()]).unwrap();
        let xt = fam.zero_set(B).unwrap().shifted(&t).unwrap();
        for x in xt.points() {
            assert_eq!(q.gram_pair(&t, x).unwrap(), p.neg(q.eval(&t)));
        }
    }
}

use biasrank::sumset::{bogolyubov_search, rep_counts, rep_counts_via_transform, search_gamma, spectrum, GroupSubset};
use biasrank::{Budget, PrimeModulus};
use proptest::prelude::*;

const B: Budget = Budget::DEFAULT;

fn subset() -> impl Strategy<Value = GroupSubset> {
    prop::sample::select(vec![(3u32, 3usize), (5, 2), (5, 3), (3, 4)]).prop_flat_map(|(p, n)| {
        let p = PrimeModulus::new(p).unwrap();
        let order = p.power_count(n) as usize;
        prop::collection::vec(any::<bool>(), order).prop_map(move |m| GroupSubset::new(p, n, m).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn representation_totals_and_symmetry(e in subset(), b in 1usize..=2) {
        let p = e.modulus();
        let r = rep_counts(&e, b, B).unwrap();
        prop_assert_eq!(r.total(), (e.size() as u128).pow(2 * b as u32));
        for t in 0..e.group_order() {
            let x = p.index_point(t, e.ambient());
            prop_assert_eq!(r.get(p, &x), r.get(p, &p.neg_vec(&x)));
        }
        if e.size() > 0 {
            prop_assert_eq!(r.counts[0], r.counts.iter().copied().max().unwrap());
        }
    }

    #[test]
    fn transform_agrees_with_direct_convolution(e in subset()) {
        let direct = rep_counts(&e, 2, B).unwrap();
        prop_assert_eq!(rep_counts_via_transform(&e, 2, B).unwrap(), direct);
    }

    #[test]
    fn spectrum_respects_chang_bound(e in subset()) {
        prop_assume!(e.size() > 0);
        let mu = e.density();
        let gamma = search_gamma(mu);
        let spec = spectrum(&e, gamma);
        prop_assert!(spec[0].iter().all(|&c| c == 0));
        prop_assert!(spec.len() as f64 <= 1.0 / (gamma * gamma * mu) + 1e-9);
    }

    #[test]
    fn returned_subspaces_are_contained(e in subset()) {
        prop_assume!(e.size() > 0);
        let p = e.modulus();
        if let Some(found) = bogolyubov_search(&e, 3, 3, B).unwrap() {
            let r = rep_counts(&e, found.b, B).unwrap();
            let mut min = u128::MAX;
            for t in found.subspace.points(B).unwrap() {
                min = min.min(r.get(p, &t));
            }
            prop_assert!(min > 0);
            prop_assert_eq!(min, found.min_reps);
            prop_assert!(found.codim <= 3);
        }
    }

    #[test]
    fn subset_json_round_trip(e in subset()) {
        let back: GroupSubset = serde_json::from_str(&serde_json::to_string(&e).unwrap()).unwrap();
        prop_assert_eq!(&back, &e);
        prop_assert_eq!(GroupSubset::from_hex(e.modulus(), e.ambient(), &e.to_hex()).unwrap(), e);
    }
}

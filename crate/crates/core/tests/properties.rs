mod common;

use common::*;
use k2design::design::{self, binomial, Block};
use k2design::grouplib::{self, Variant, PGAMMAL28_PAPER36, PSL28_PAPER36};
use k2design::isomorph;
use k2design::permcore::PermGroup;
use num_traits::ToPrimitive;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn orbit_stabilizer(seed in any::<u64>(), point_seed in any::<usize>()) {
        let g = random_subgroup(seed);
        let alpha = point_seed % g.degree();
        let orbit = g.orbit(alpha).unwrap();
        let stab = g.point_stabilizer(alpha).unwrap();
        prop_assert_eq!(g.order(), stab.order() * orbit.len());
        prop_assert!(stab.generators().iter().all(|s| s.apply(alpha) == alpha));
        prop_assert!(stab.generators().iter().all(|s| g.contains(s).unwrap()));
        if let Some(order) = g.order_u64().filter(|&o| o <= 5000) {
            prop_assert_eq!(order as usize, closure_size(g.generators()));
        }
    }
}

#[test]
fn burnside_matches_orbit_scan_on_36_points() {
    for name in [PSL28_PAPER36, PGAMMAL28_PAPER36] {
        let g = grouplib::builtin(name).unwrap();
        let order = g.order_u64().unwrap() as usize;
        for k in 1..=6 {
            let reps = design::representatives(&g, k, 2).unwrap();
            assert_eq!(reps.len() as u128, design::burnside_orbit_count(&g, k).unwrap(), "{name} k={k}");
            let total: u128 = reps.iter().map(|r| r.orbit_size as u128).sum();
            assert_eq!(total, binomial(36, k));
            assert!(reps.iter().all(|r| order % r.orbit_size == 0));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn burnside_on_random_subgroups(seed in any::<u64>(), k in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pgl = grouplib::builtin(PGAMMAL28_PAPER36).unwrap();
        let gens: Vec<_> = (0..2).map(|_| random_word(&mut rng, pgl.generators(), 10)).collect();
        let g = PermGroup::new(gens).unwrap();
        let reps = design::representatives(&g, k, 1).unwrap();
        prop_assert_eq!(reps.len() as u128, design::burnside_orbit_count(&g, k).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn certificate_agrees_with_brute_force(seed in any::<u64>()) {
        let (a, other) = random_design_pair(seed);
        let fast = isomorph::are_isomorphic(&a, &other).unwrap();
        let slow = isomorph::brute_force_isomorphic(&a, &other).unwrap();
        prop_assert_eq!(fast, slow);
        if fast {
            let sigma = isomorph::isomorphism(&a, &other).unwrap().unwrap();
            prop_assert_eq!(a.relabel(&sigma), other);
        }
    }
}

fn action(q: u32, variant: Variant, pairs: bool) -> PermGroup {
    let (g, labeling) = grouplib::projective_group(q, variant).unwrap();
    if pairs {
        grouplib::pair_action(&g, &labeling).unwrap().0
    } else {
        g
    }
}

#[test]
fn emitted_designs_satisfy_integrality_identities() {
    let cases = [
        (4, Variant::Socle, true, 3..=4),
        (7, Variant::Socle, false, 3..=4),
        (9, Variant::Full, false, 3..=5),
        (11, Variant::Socle, false, 4..=5),
        (8, Variant::Socle, true, 5..=5),
    ];
    let mut checked = 0;
    for (q, variant, pairs, ks) in cases {
        let g = action(q, variant, pairs);
        let v = g.degree();
        let order = g.order_u64().unwrap() as usize;
        for k in ks {
            for c in design::classify(&g, k, 2, 2).unwrap() {
                let d = design::orbit_design(&g, c.base).unwrap();
                let lambda = c.lambda as usize;
                let r = d.replication()[0];
                assert!(integrality_holds(&d, c.lambda), "q={q} k={k}");
                assert_eq!(order % d.b(), 0);
                assert_eq!(d.b() * k * (k - 1) / 2, lambda * v * (v - 1) / 2);
                let lv = design::lambda_vector(v, k, 2, c.lambda);
                assert!(lv.is_integral());
                assert_eq!(lv.b().to_integer().to_usize(), Some(d.b()));
                assert_eq!(lv.r().unwrap().to_integer().to_usize(), Some(r));
                checked += 1;
            }
        }
    }
    assert!(checked >= 20, "only {checked} designs checked");
}

#[test]
fn classification_is_independent_of_worker_count() {
    let pairs = action(8, Variant::Socle, true);
    let key = |w| {
        design::classify(&pairs, 5, 2, w)
            .unwrap()
            .into_iter()
            .map(|c| (c.base, c.lambda, c.orbit_count, c.certificate))
            .collect::<Vec<_>>()
    };
    let one = key(1);
    assert_eq!(one.len(), 12);
    assert_eq!(one, key(3));
    assert_eq!(one, key(8));
}

#[test]
fn no_three_designs_with_six_point_blocks() {
    for name in [PSL28_PAPER36, PGAMMAL28_PAPER36] {
        let g = grouplib::builtin(name).unwrap();
        assert!(design::classify(&g, 6, 3, 2).unwrap().is_empty(), "{name}");
    }
}

#[test]
fn known_orbit_designs() {
    let g = grouplib::builtin(PSL28_PAPER36).unwrap();
    let block = |pts: &[usize]| Block::from_points(&pts.iter().map(|p| p - 1).collect::<Vec<_>>()).unwrap();
    let d44 = design::orbit_design(&g, block(&[1, 2, 4, 16, 26, 31])).unwrap();
    assert_eq!(d44.b(), 84);
    assert_eq!(design::lambda_of(&d44, 2).unwrap(), Some(2));
    assert!(design::is_flag_transitive(&g, &d44).unwrap());
    let d1 = design::orbit_design(&g, block(&[1, 2, 3, 4, 15, 16])).unwrap();
    assert_eq!(d1.b(), 504);
    assert_eq!(design::lambda_of(&d1, 2).unwrap(), Some(12));
    assert!(!design::is_flag_transitive(&g, &d1).unwrap());
    let d38 = design::orbit_design(&g, block(&[1, 2, 3, 16, 28, 36])).unwrap();
    assert_eq!(design::lambda_of(&d38, 2).unwrap(), Some(6));
}

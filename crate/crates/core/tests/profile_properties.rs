//! Torsion profiles: validity checks, fixtures and the splitting simulation.

use isopoly_core::hnfilt::{check_first_level_below_hodge, check_torsion_profile, simulate_torsion_split};
use isopoly_core::rational::from_usize;
use isopoly_core::sampling::{converging_profile, instance_rng, random_torsion_profile, violation_fixtures};
use proptest::prelude::*;

#[test]
fn fixtures_are_rejected_where_expected() {
    let fixtures = violation_fixtures().unwrap();
    assert!(fixtures.len() >= 5);
    for fx in fixtures {
        let report = match &fx.hodge {
            Some(hdg) => check_first_level_below_hodge(&fx.profile, hdg).unwrap(),
            None => check_torsion_profile(&fx.profile).unwrap(),
        };
        let first = report.first().unwrap_or_else(|| panic!("{} passed", fx.name));
        assert_eq!(first.kind, fx.kind, "{}", fx.name);
        assert_eq!(first.abscissa, fx.abscissa, "{}", fx.name);
    }
}

#[test]
fn converging_profiles_pass_at_every_depth() {
    for depth in 1..=12 {
        assert!(check_torsion_profile(&converging_profile(depth).unwrap()).unwrap().holds());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn synthetic_profiles_recover_the_split(seed in any::<u64>(), depth in 8u32..=12) {
        let sp = random_torsion_profile(&mut instance_rng(seed, 0), depth).unwrap();
        prop_assert!(check_torsion_profile(&sp.profile).unwrap().holds());
        let trace = simulate_torsion_split(&sp.profile, &sp.z).unwrap();
        prop_assert_eq!(&trace.answer, &sp.expected, "{}", trace);
        prop_assert_eq!(trace.dualized, sp.expect_dualized);
        prop_assert!(trace.increments.windows(2).all(|w| w[0] >= w[1]), "{:?}", trace.increments);
        let d = from_usize(sp.profile.d() as usize);
        for rec in &trace.levels {
            let i = from_usize(rec.level as usize);
            prop_assert_eq!(&rec.height, &(&i * &d * &rec.point.0));
            prop_assert_eq!(&rec.degree, &(&i * &d * &rec.point.1));
        }
    }

    #[test]
    fn profile_dual_is_an_involution(seed in any::<u64>()) {
        let sp = random_torsion_profile(&mut instance_rng(seed, 1), 4).unwrap();
        let back = sp.profile.dual().dual();
        prop_assert_eq!(back.limit(), sp.profile.limit());
        prop_assert_eq!(back.levels(), sp.profile.levels());
        prop_assert!(check_torsion_profile(&sp.profile.dual()).unwrap().holds());
    }
}

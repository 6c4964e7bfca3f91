//! Newton polygons of monomial isocrystals against the characteristic-polynomial route.

use isopoly_core::isoc::{charpoly_newton, StandardIsocrystal};
use isopoly_core::polycalc::NewtonVector;
use isopoly_core::rational::{int, is_integer, Rational};
use isopoly_core::sampling::{instance_rng, random_isocrystal};
use proptest::prelude::*;

fn isocrystal(max_height: usize) -> impl Strategy<Value = StandardIsocrystal> {
    (any::<u64>(), prop::sample::select(vec![2u64, 3, 5, 7]))
        .prop_map(move |(seed, p)| random_isocrystal(&mut instance_rng(seed, 0), p, max_height).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn newton_end_is_minus_dimension(m in isocrystal(8)) {
        let newt = m.newton_polygon();
        prop_assert_eq!(newt.len(), m.height());
        prop_assert_eq!(newt.sum(), int(-m.dimension()));
    }

    #[test]
    fn newton_breaks_are_integral(m in isocrystal(8)) {
        for (x, y) in m.newton_polygon().to_polygon().breakpoints_with_ends() {
            prop_assert!(is_integer(x) && is_integer(y), "break ({}, {}) of {}", x, y, m);
        }
    }

    #[test]
    fn dual_slopes_are_complements(m in isocrystal(8)) {
        let mut expected: Vec<(Rational, usize)> =
            m.slope_decomposition().into_iter().map(|(s, h)| (int(1) - s, h)).collect();
        expected.sort();
        prop_assert_eq!(m.dual_isocrystal().slope_decomposition(), expected);
        prop_assert_eq!(m.dual_isocrystal().dual_isocrystal(), m);
    }

    #[test]
    fn charpoly_route_agrees(m in isocrystal(6)) {
        let f = m.residue_degree();
        prop_assert_eq!(charpoly_newton(&m.matrix(), m.p(), f).unwrap(), m.newton_polygon());
    }

    #[test]
    fn direct_sum_unions_slopes(seed in any::<u64>()) {
        let mut rng = instance_rng(seed, 1);
        let a = random_isocrystal(&mut rng, 3, 5).unwrap();
        let b = random_isocrystal(&mut rng, 3, 5).unwrap().with_residue_degree(a.residue_degree()).unwrap();
        let sum = a.direct_sum(&b).unwrap();
        let mut all = a.newton_polygon().entries().to_vec();
        all.extend_from_slice(b.newton_polygon().entries());
        prop_assert_eq!(sum.newton_polygon(), NewtonVector::from_unsorted(all));
        prop_assert_eq!(sum.dimension(), a.dimension() + b.dimension());
    }

    #[test]
    fn shifting_moves_every_slope(m in isocrystal(6), k in -2i64..=2) {
        let shifted: Vec<Rational> = m.newton_polygon().entries().iter().map(|a| a - int(k)).collect();
        prop_assert_eq!(m.shift(k).newton_polygon().entries().to_vec(), shifted);
    }
}

//! Smith normal forms and lengths of torsion modules over ramified rings.

use isopoly_core::dvrmod::{cokernel_length, degree_of_pgroup, smith_normal_form, InnerQuotient, RamifiedTower};
use isopoly_core::field::{EisensteinExt, Field, NfElem};
use isopoly_core::linalg::{self, Matrix};
use isopoly_core::poly::QPoly;
use isopoly_core::rational::{from_usize, Rational};
use isopoly_core::sampling::{instance_rng, random_inner_quotient, tower_catalogue};
use num_traits::Zero;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;
use std::sync::OnceLock;

fn towers() -> &'static [RamifiedTower] {
    static TOWERS: OnceLock<Vec<RamifiedTower>> = OnceLock::new();
    TOWERS.get_or_init(|| tower_catalogue().unwrap())
}

/// An integral element `u · ϖ^k` with `u` a small polynomial in the uniformizer.
fn random_integral(rng: &mut impl Rng, k: &EisensteinExt, max_power: usize) -> NfElem {
    let coeffs: Vec<i64> = (0..k.e()).map(|_| rng.gen_range(-3..=3)).collect();
    let mut x = k.reduce(&QPoly::from_ints(&coeffs));
    for _ in 0..rng.gen_range(0..=max_power) {
        x = k.mul(&x, &k.uniformizer());
    }
    x
}

fn random_matrix(rng: &mut impl Rng, k: &EisensteinExt, n: usize) -> Matrix<NfElem> {
    let rows = (0..n).map(|_| (0..n).map(|_| random_integral(rng, k, 2)).collect()).collect();
    Matrix::from_rows(rows, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn smith_divisors_carry_the_determinant(seed in any::<u64>()) {
        let mut rng = instance_rng(seed, 0);
        let tower = towers().choose(&mut rng).unwrap();
        let k = if rng.gen_bool(0.5) { tower.outer() } else { tower.inner() };
        let n = rng.gen_range(1..=3);
        let m = random_matrix(&mut rng, k, n);
        let det = linalg::det(k, &m);
        prop_assume!(!k.is_zero(&det));
        let snf = smith_normal_form(k, &m).unwrap();
        let total = snf.diagonal.iter().fold(Rational::zero(), |acc, x| acc + k.valuation(x).unwrap());
        prop_assert_eq!(total.clone(), k.valuation(&det).unwrap());
        let vals: Vec<Rational> = snf.diagonal.iter().map(|x| k.valuation(x).unwrap()).collect();
        prop_assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        let product = linalg::mat_mul(k, &snf.u, &linalg::mat_mul(k, &m, &snf.v));
        for r in 0..n {
            for c in 0..n {
                let expected = if r == c { snf.diagonal[r].clone() } else { k.zero() };
                prop_assert_eq!(product.get(r, c), &expected);
            }
        }
        prop_assert_eq!(linalg::mat_mul(k, &snf.u, &snf.u_inv), linalg::identity(k, n));
        let length = cokernel_length(k, &m).unwrap().value;
        prop_assert_eq!(Rational::from_integer(length.into()), total * from_usize(k.e()));
    }

    #[test]
    fn multiplication_cokernel_matches_embeddings(seed in any::<u64>()) {
        let mut rng = instance_rng(seed, 1);
        let tower = towers().choose(&mut rng).unwrap();
        let a = random_integral(&mut rng, tower.inner(), 3);
        prop_assume!(!tower.inner().is_zero(&a));
        let k = tower.outer();
        let length = cokernel_length(k, &tower.multiplication_matrix(&a)).unwrap().value;
        let sum = tower.embed(&a).iter().fold(Rational::zero(), |acc, x| acc + k.valuation(x).unwrap());
        prop_assert_eq!(Rational::from_integer(length.into()), sum * from_usize(k.e()));
    }

    #[test]
    fn degrees_add_over_annihilator_lists(seed in any::<u64>()) {
        let mut rng = instance_rng(seed, 2);
        let k = towers().choose(&mut rng).unwrap().outer().clone();
        let a: Vec<NfElem> = (0..rng.gen_range(0..=3)).map(|_| random_integral(&mut rng, &k, 3)).collect();
        let b: Vec<NfElem> = (0..rng.gen_range(0..=3)).map(|_| random_integral(&mut rng, &k, 3)).collect();
        prop_assume!(a.iter().chain(&b).all(|x| !k.is_zero(x)));
        let joined: Vec<NfElem> = a.iter().chain(&b).cloned().collect();
        prop_assert_eq!(
            degree_of_pgroup(&k, &joined).unwrap(),
            degree_of_pgroup(&k, &a).unwrap() + degree_of_pgroup(&k, &b).unwrap()
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn eigen_part_lengths_agree(seed in any::<u64>()) {
        let q = random_inner_quotient(&mut instance_rng(seed, 3), towers()).unwrap();
        for lengths in q.all_subsets().unwrap() {
            prop_assert!(lengths.agrees(), "{:?}", lengths);
        }
    }

    #[test]
    fn lengths_add_over_diagonal_sums(seed in any::<u64>()) {
        let mut rng = instance_rng(seed, 4);
        let tower = towers().choose(&mut rng).unwrap().clone();
        let inner = tower.inner().clone();
        let a = random_integral(&mut rng, &inner, 2);
        let b = random_integral(&mut rng, &inner, 2);
        prop_assume!(!inner.is_zero(&a) && !inner.is_zero(&b));
        let single = |x: &NfElem| InnerQuotient::new(tower.clone(), &Matrix::from_rows(vec![vec![x.clone()]], 1)).unwrap();
        let sum = InnerQuotient::new(
            tower.clone(),
            &Matrix::from_rows(vec![vec![a.clone(), inner.zero()], vec![inner.zero(), b.clone()]], 2),
        )
        .unwrap();
        let (qa, qb) = (single(&a), single(&b));
        prop_assert_eq!(sum.total_length().unwrap(), qa.total_length().unwrap() + qb.total_length().unwrap());
        for subset in [vec![0], (0..tower.degree()).collect::<Vec<_>>()] {
            let whole = sum.lengths(&subset).unwrap().direct;
            prop_assert_eq!(whole, qa.lengths(&subset).unwrap().direct + qb.lengths(&subset).unwrap().direct);
        }
    }
}

//! Algebraic laws of concave polygons, Newton vectors and filtration profiles.

use isopoly_core::filvect::{subspace_degree_bound, GradedProfile};
use isopoly_core::polycalc::{self, ConcavePolygon, NewtonVector, Point};
use isopoly_core::rational::{from_usize, int, rat, Rational};
use num_traits::Zero;
use proptest::prelude::*;

/// Strictly decreasing slopes with positive lengths.
fn polygon() -> impl Strategy<Value = ConcavePolygon> {
    prop::collection::btree_map((-12i64..=16, 1i64..=4), (1i64..=6, 1i64..=3), 1..=5).prop_map(|segs| {
        let mut segs: Vec<(Rational, Rational)> =
            segs.into_iter().map(|((sn, sd), (ln, ld))| (rat(sn, sd), rat(ln, ld))).collect();
        segs.sort_by(|a, b| b.0.cmp(&a.0));
        segs.dedup_by(|b, a| {
            // equal slopes after reduction: merge lengths
            if a.0 == b.0 {
                a.1 += b.1.clone();
                true
            } else {
                false
            }
        });
        ConcavePolygon::from_slopes(&segs).unwrap()
    })
}

fn newton_vector() -> impl Strategy<Value = NewtonVector> {
    prop::collection::vec((-6i64..=8, 1i64..=4), 1..=8)
        .prop_map(|v| NewtonVector::from_unsorted(v.into_iter().map(|(n, d)| rat(n, d)).collect()))
}

/// Value at `x` recomputed from the slope list.
fn eval_by_slopes(p: &ConcavePolygon, x: &Rational) -> Rational {
    let mut y = Rational::zero();
    let mut left = x.clone();
    for (s, len) in p.slopes() {
        let step = if left < len { left.clone() } else { len };
        y += s * &step;
        left -= step;
        if left.is_zero() {
            break;
        }
    }
    y
}

/// A point strictly inside `[0, N]` on or above `p`.
fn lift_point(p: &ConcavePolygon, t: (i64, i64), bump: i64) -> Point {
    let x = p.domain_end() * rat(t.0, t.1);
    let y = p.eval(&x).unwrap() + rat(bump, 3);
    (x, y)
}

fn envelope_above(p: &ConcavePolygon, extra: &[Point]) -> ConcavePolygon {
    let mut pts = p.breakpoints_with_ends().to_vec();
    pts.extend_from_slice(extra);
    ConcavePolygon::concave_envelope(&pts).unwrap()
}

fn interior_points(n: usize) -> impl Strategy<Value = Vec<((i64, i64), i64)>> {
    prop::collection::vec(((1i64..=6).prop_map(|a| (a, 7)), 0i64..=4), 0..=n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn dual_is_an_involution(p in polygon()) {
        prop_assert_eq!(p.dual().dual(), p.clone());
        prop_assert_eq!(p.dual().domain_end().clone(), p.domain_end().clone());
    }

    #[test]
    fn dual_reverses_and_complements_entries(v in newton_vector()) {
        let n = v.len();
        let expected: Vec<Rational> = (0..n).map(|i| int(1) - &v.entries()[n - 1 - i]).collect();
        let dual = NewtonVector::from_polygon(&v.to_polygon().dual()).unwrap();
        prop_assert_eq!(dual.entries(), &expected[..]);
    }

    #[test]
    fn newton_vectors_round_trip(v in newton_vector()) {
        let p = v.to_polygon();
        prop_assert_eq!(NewtonVector::from_polygon(&p).unwrap(), v.clone());
        prop_assert_eq!(p.end_point(), &(from_usize(v.len()), v.sum()));
    }

    #[test]
    fn eval_matches_slope_sums(p in polygon(), t in 0i64..=12) {
        let x = p.domain_end() * rat(t, 12);
        prop_assert_eq!(p.eval(&x).unwrap(), eval_by_slopes(&p, &x));
    }

    #[test]
    fn order_is_reflexive_and_transitive(
        p in polygon(),
        first in interior_points(3),
        second in interior_points(3),
    ) {
        let q = envelope_above(&p, &first.iter().map(|&(t, b)| lift_point(&p, t, b)).collect::<Vec<_>>());
        let r = envelope_above(&q, &second.iter().map(|&(t, b)| lift_point(&q, t, b)).collect::<Vec<_>>());
        prop_assert!(p.leq(&p).unwrap());
        prop_assert!(p.leq(&q).unwrap());
        prop_assert!(q.leq(&r).unwrap());
        prop_assert!(p.leq(&r).unwrap());
    }

    #[test]
    fn order_is_antisymmetric(p in polygon(), extra in interior_points(2)) {
        let q = envelope_above(&p, &extra.iter().map(|&(t, b)| lift_point(&p, t, b)).collect::<Vec<_>>());
        if p.leq(&q).unwrap() && q.leq(&p).unwrap() {
            prop_assert_eq!(&p, &q);
        }
        if p != q {
            prop_assert!(!q.leq(&p).unwrap());
        }
    }

    #[test]
    fn order_requires_equal_end_values(p in polygon(), lift in 1i64..=5) {
        let (n, y) = p.end_point().clone();
        let raised = ConcavePolygon::concave_envelope(&[
            (Rational::zero(), Rational::zero()),
            (n.clone(), y + rat(lift, 2)),
        ]).unwrap();
        let raised = envelope_above(&raised, p.breakpoints_with_ends());
        prop_assert!(p.below(&raised).unwrap());
        prop_assert!(!p.leq(&raised).unwrap());
    }

    #[test]
    fn envelope_is_idempotent_and_dominates(
        pts in prop::collection::vec(((0i64..=12), (-20i64..=20, 1i64..=3)), 1..=8),
    ) {
        let mut points: Vec<Point> = pts.iter().map(|&(x, (yn, yd))| (int(x), rat(yn, yd))).collect();
        points.retain(|(x, _)| !x.is_zero());
        points.push((Rational::zero(), Rational::zero()));
        let env = ConcavePolygon::concave_envelope(&points).unwrap();
        for (x, y) in &points {
            prop_assert!(env.eval(x).unwrap() >= *y);
        }
        for b in env.breakpoints_with_ends() {
            prop_assert!(points.contains(b));
        }
        let again = ConcavePolygon::concave_envelope(env.breakpoints_with_ends()).unwrap();
        prop_assert_eq!(again, env);
    }

    #[test]
    fn rescale_commutes_with_restrict(p in polygon(), d in 1u64..=5, t in 0i64..=8) {
        let x = p.domain_end() * rat(t, 8);
        let dr = Rational::from_integer(d.into());
        let left = p.rescale(d).unwrap().restrict(&(&x / &dr)).unwrap();
        let right = p.restrict(&x).unwrap().rescale(d).unwrap();
        prop_assert_eq!(&left, &right);
        prop_assert_eq!(p.rescale(d).unwrap().unrescale(d).unwrap(), p);
    }

    #[test]
    fn splits_reassemble(p in polygon(), t in 0i64..=10) {
        let x = p.domain_end() * rat(t, 10);
        let z = (x.clone(), p.eval(&x).unwrap());
        let head = p.restrict(&x).unwrap();
        let tail = p.rest_after(&z).unwrap();
        prop_assert_eq!(head.join(&tail).unwrap(), p.clone());
        prop_assert_eq!(head.end_point(), &z);
    }

    #[test]
    fn average_ends_at_mean_end_point(vs in prop::collection::vec(newton_vector(), 1..=4), n in 1usize..=6) {
        let vs: Vec<NewtonVector> = vs
            .into_iter()
            .map(|v| {
                let mut e = v.entries().to_vec();
                e.resize(n, int(-7));
                NewtonVector::from_unsorted(e)
            })
            .collect();
        let avg = polycalc::average(&vs).unwrap();
        let mean = vs.iter().fold(Rational::zero(), |a, v| a + v.sum()) / from_usize(vs.len());
        prop_assert_eq!(avg.sum(), mean.clone());
        prop_assert_eq!(avg.len(), n);
        let polys: Vec<ConcavePolygon> = vs.iter().map(NewtonVector::to_polygon).collect();
        prop_assert_eq!(ConcavePolygon::average(&polys).unwrap().end_value().clone(), mean);
    }

    #[test]
    fn merge_is_the_union_of_slopes(a in newton_vector(), b in newton_vector()) {
        let mut all = a.entries().to_vec();
        all.extend_from_slice(b.entries());
        let merged = a.to_polygon().merge(&b.to_polygon());
        prop_assert_eq!(merged, NewtonVector::from_unsorted(all).to_polygon());
    }
}

fn profile() -> impl Strategy<Value = GradedProfile> {
    prop::collection::btree_map(-4i64..=4, 1usize..=3, 1..=4).prop_map(GradedProfile::new)
}

/// A profile together with a componentwise smaller one.
fn profile_and_sub() -> impl Strategy<Value = (GradedProfile, GradedProfile)> {
    profile().prop_flat_map(|f| {
        let dims: Vec<(i64, usize)> = f.graded().iter().map(|(&i, &n)| (i, n)).collect();
        let subs: Vec<_> = dims.iter().map(|&(i, n)| (Just(i), 0..=n)).collect();
        (Just(f), subs).prop_map(|(f, sub)| (f, GradedProfile::new(sub)))
    })
}

/// The `k` smallest jumps of `f`, the least degree a `k`-dimensional subspace can have.
fn least_degree(f: &GradedProfile, k: usize) -> i64 {
    let mut jumps: Vec<i64> = f.graded().iter().flat_map(|(&i, &n)| std::iter::repeat_n(i, n)).collect();
    jumps.sort();
    jumps[..k].iter().sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn subspace_degree_bound_matches_sorting((f, sub) in profile_and_sub()) {
        let bound = subspace_degree_bound(&f, &sub).unwrap();
        prop_assert!(bound.holds);
        let k = sub.total_dim();
        prop_assert!(sub.degree() >= least_degree(&f, k));
        prop_assert_eq!(bound.equality, sub.degree() == least_degree(&f, k));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn type_ends_at_minus_degree(f in profile()) {
        prop_assert_eq!(f.type_of().sum(), int(-f.degree()));
        prop_assert_eq!(f.type_of().len(), f.total_dim());
    }

    #[test]
    fn degree_is_additive((f, sub) in profile_and_sub(), g in profile()) {
        let q = f.quotient_profile(&sub).unwrap();
        prop_assert_eq!(f.degree(), sub.degree() + q.degree());
        prop_assert_eq!(f.sum(&g).degree(), f.degree() + g.degree());
        prop_assert_eq!(f.shift(2).degree(), f.degree() + 2 * f.total_dim() as i64);
    }
}

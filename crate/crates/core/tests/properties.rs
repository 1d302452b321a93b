mod common;

use atsp_core::instance::{
    convex_combination, parse_tsplib, point_from_tour, random_dfj_point, random_tour, serialize_tsplib, AtspInstance,
    FractionalPoint,
};
use atsp_core::lift::{lift_point, LiftResult};
use atsp_core::lp::{lp_solve, Bound, LpModel, LpStatus, Relation};
use atsp_core::mtz::{mtz_check, mtz_slack, Potentials};
use atsp_core::{Rational, Scalar};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Q = Rational;

fn cost_matrix(n: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(0i64..1000, n), n).prop_map(|mut m| {
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 0;
        }
        m
    })
}

fn weights(k: usize) -> impl Strategy<Value = Vec<Q>> {
    prop::collection::vec(1i64..50, k).prop_map(|raw| {
        let total: i64 = raw.iter().sum();
        raw.into_iter().map(|w| Q::from_ratio(w, total)).collect()
    })
}

fn tour_point(n: usize, seed: u64) -> FractionalPoint<Q> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    point_from_tour(&random_tour(n, &mut rng), n).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tsplib_round_trip(costs in cost_matrix(5)) {
        let inst = AtspInstance::<Q>::from_integers("rt", &costs).unwrap();
        let text = serialize_tsplib(&inst);
        let back = parse_tsplib::<Q>(&text).unwrap();
        prop_assert_eq!(back, inst);
    }

    #[test]
    fn convex_combinations_keep_degrees(n in 3usize..9, (seeds, w) in (1usize..5).prop_flat_map(|k| (prop::collection::vec(any::<u64>(), k), weights(k)))) {
        let points: Vec<_> = seeds.iter().map(|&s| tour_point(n, s)).collect();
        let p = convex_combination(&points, &w).unwrap();
        prop_assert!(common::degrees_ok(&p));
        prop_assert!(!common::violates_dfj(&p));
    }

    #[test]
    fn generators_are_reproducible(n in 3usize..9, k in 1usize..6, seed in any::<u64>()) {
        let a: FractionalPoint<Q> = random_dfj_point(n, k, seed).unwrap();
        let b: FractionalPoint<Q> = random_dfj_point(n, k, seed).unwrap();
        prop_assert_eq!(a, b);
    }

    /// The slack is affine in `x`: mixing points mixes slacks with the same weights.
    #[test]
    fn slack_is_affine_in_x(n in 3usize..8, s1 in any::<u64>(), s2 in any::<u64>(), w in 0i64..=12, shifts in prop::collection::vec(-20i64..20, 8)) {
        let (a, b) = (tour_point(n, s1), tour_point(n, s2));
        let lam = Q::from_ratio(w, 12);
        let mut rest = Q::from_i64(1);
        rest -= &lam;
        let mix = convex_combination(&[a.clone(), b.clone()], &[lam.clone(), rest.clone()]).unwrap();
        let u = Potentials::new(shifts[..n].iter().map(|&v| Q::from_i64(v)).collect());
        for i in 1..=n {
            for j in 2..=n {
                if i == j { continue; }
                let mut expect = mtz_slack(&a, &u, i, j).unwrap();
                expect *= &lam;
                let mut other = mtz_slack(&b, &u, i, j).unwrap();
                other *= &rest;
                expect += &other;
                prop_assert_eq!(mtz_slack(&mix, &u, i, j).unwrap(), expect);
            }
        }
    }

    #[test]
    fn potentials_translate_freely(n in 3usize..9, seed in any::<u64>(), k in 1usize..5, delta in -100i64..100, flip in any::<bool>()) {
        let p: FractionalPoint<Q> = random_dfj_point(n, k, seed).unwrap();
        let LiftResult::Potentials(mut u) = lift_point(&p) else { panic!("lift failed on a DFJ point") };
        if flip {
            // Perturb one potential so both feasible and infeasible cases are covered.
            let mut vals = u.values().to_vec();
            vals[n - 1] += &Q::from_i64(n as i64);
            u = Potentials::new(vals);
        }
        let shifted = u.translate(&Q::from_i64(delta));
        prop_assert_eq!(mtz_check(&p, &u).unwrap(), mtz_check(&p, &shifted).unwrap());
        for i in 1..=n {
            for j in 2..=n {
                if i != j {
                    prop_assert_eq!(mtz_slack(&p, &u, i, j).unwrap(), mtz_slack(&p, &shifted, i, j).unwrap());
                }
            }
        }
    }

    #[test]
    fn tours_lift_to_visit_order(n in 3usize..10, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tour = random_tour(n, &mut rng);
        let p: FractionalPoint<Q> = point_from_tour(&tour, n).unwrap();
        let LiftResult::Potentials(u) = lift_point(&p) else { panic!("tour did not lift") };
        prop_assert_eq!(u, Potentials::visit_order(&tour));
    }

    #[test]
    fn float_lift_tracks_exact_lift(n in 3usize..9, k in 1usize..5, seed in any::<u64>()) {
        let exact: FractionalPoint<Q> = random_dfj_point(n, k, seed).unwrap();
        let float = FractionalPoint::<f64>::new(exact.rows().iter().map(|r| r.iter().map(Scalar::to_f64).collect()).collect()).unwrap();
        let (LiftResult::Potentials(ue), LiftResult::Potentials(uf)) = (lift_point(&exact), lift_point(&float)) else {
            panic!("lift failed on a DFJ point");
        };
        for (a, b) in ue.values().iter().zip(uf.values()) {
            prop_assert!((a.to_f64() - b).abs() < 1e-9);
        }
        prop_assert_eq!(mtz_check(&float, &uf).unwrap(), None);
    }

    #[test]
    fn row_order_does_not_change_the_optimum(rows in prop::collection::vec((prop::collection::vec(-5i64..=5, 3), 0usize..3, -6i64..=6), 1..6), obj in prop::collection::vec(-4i64..=4, 3), perm_seed in any::<u64>()) {
        let relations = [Relation::Le, Relation::Eq, Relation::Ge];
        let build = |order: &[usize]| {
            let mut m = LpModel::new(obj.iter().map(|&c| Q::from_i64(c)).collect());
            for v in 0..3 {
                m.set_bounds(v, Bound::between(Q::from_i64(-3), Q::from_i64(3))).unwrap();
            }
            for &r in order {
                let (a, rel, b) = &rows[r];
                m.add_constraint(a.iter().map(|&c| Q::from_i64(c)).collect(), relations[*rel], Q::from_i64(*b)).unwrap();
            }
            m
        };
        let identity: Vec<usize> = (0..rows.len()).collect();
        let mut shuffled = identity.clone();
        rand::seq::SliceRandom::shuffle(&mut shuffled[..], &mut ChaCha8Rng::seed_from_u64(perm_seed));
        let (s1, s2) = (lp_solve(&build(&identity)), lp_solve(&build(&shuffled)));
        prop_assert_eq!(s1.status, s2.status);
        prop_assert!(s1.status != LpStatus::Unbounded);
        prop_assert_eq!(s1.objective_value, s2.objective_value);
    }
}

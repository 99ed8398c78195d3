use proptest::prelude::*;

use levybar::dividend::{dividend_bound, dividend_levels};
use levybar::estimator::ContrastCurve;
use levybar::quasi::{permutation_at, sample_permutation};
use levybar::{
    barrier_outcome, build_quasi_path, contrast, path_from_increments, BarrierParams,
    IncrementSeries, PathProfile, SamplingScheme, StepPath,
};

fn arb_path() -> impl Strategy<Value = StepPath> {
    (
        0.0..20.0f64,
        prop::sample::select(vec![0.01, 0.1, 0.25, 1.0]),
        prop::collection::vec(
            prop_oneof![3 => -1.0..2.0f64, 1 => -8.0..0.0f64, 1 => 0.0..3.0f64],
            1..200,
        ),
    )
        .prop_map(|(u0, h, deltas)| {
            let scheme = SamplingScheme::new(h, deltas.len()).unwrap();
            path_from_increments(u0, &IncrementSeries::new(scheme, deltas).unwrap())
        })
}

fn bp(theta: f64, r: f64) -> BarrierParams {
    BarrierParams::new(theta, r).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn value_is_nonnegative_and_bounded(path in arb_path(), dtheta in 0.0..15.0f64, r in 0.01..2.0f64) {
        let theta = path.u0() + dtheta;
        let out = barrier_outcome(&path, bp(theta, r));
        prop_assert!(out.value >= 0.0);
        prop_assert!(out.value <= dividend_bound(&path, r));
    }

    #[test]
    fn higher_barriers_pay_less_cumulatively(path in arb_path(), a in 0.0..15.0f64, b in 0.0..15.0f64) {
        let (lo, hi) = (path.u0() + a.min(b), path.u0() + a.max(b));
        let xi_hi = dividend_levels(&path, hi);
        let xi_lo = dividend_levels(&path, lo);
        prop_assert!(xi_hi.iter().zip(&xi_lo).all(|(h, l)| h <= l));
    }

    #[test]
    fn higher_barriers_never_hasten_ruin(path in arb_path(), a in 0.0..15.0f64, b in 0.0..15.0f64, r in 0.01..2.0f64) {
        let (lo, hi) = (path.u0() + a.min(b), path.u0() + a.max(b));
        let early = barrier_outcome(&path, bp(lo, r));
        let late = barrier_outcome(&path, bp(hi, r));
        prop_assert!(late.ruin_index >= early.ruin_index);
        prop_assert!(!late.ruined || early.ruined);
    }

    #[test]
    fn profile_agrees_with_direct_evaluation(path in arb_path(), dtheta in -2.0..15.0f64, r in 0.01..2.0f64) {
        let theta = path.u0() + dtheta;
        let direct = barrier_outcome(&path, bp(theta, r));
        let fast = PathProfile::new(&path, r).outcome(theta);
        prop_assert_eq!((fast.ruin_index, fast.ruined), (direct.ruin_index, direct.ruined));
        prop_assert!((fast.value - direct.value).abs() <= 1e-12 * (1.0 + direct.value));
    }

    #[test]
    fn value_only_increases_across_breakpoints(path in arb_path(), r in 0.01..2.0f64, picks in prop::collection::vec(0.0..1.0f64, 2)) {
        let lo = path.u0();
        let hi = lo + 15.0;
        let profile = PathProfile::new(&path, r);
        let mut edges = vec![lo];
        edges.extend(profile.breakpoints(lo, hi));
        edges.push(hi);
        for w in edges.windows(2) {
            let (a, b) = (w[0], w[1]);
            let t1 = a + picks[0].min(picks[1]) * (b - a);
            let t2 = a + picks[0].max(picks[1]) * (b - a);
            prop_assert!(profile.value(t2) <= profile.value(t1) + 1e-12);
        }
    }

    #[test]
    fn quasi_paths_rearrange_the_increments(path in arb_path(), seed in any::<u64>()) {
        let inc = path.increments();
        let perm = permutation_at(inc.len(), seed, 0);
        prop_assert!(perm.is_bijection());
        let q = build_quasi_path(path.u0(), &inc, &perm).unwrap();

        let mut original: Vec<f64> = inc.deltas().to_vec();
        let mut rebuilt: Vec<f64> = q.increments().deltas().to_vec();
        original.sort_by(f64::total_cmp);
        rebuilt.sort_by(f64::total_cmp);
        let scale = q.values().iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for (a, b) in original.iter().zip(&rebuilt) {
            prop_assert!((a - b).abs() <= 4.0 * f64::EPSILON * scale);
        }

        let n = inc.len() as f64;
        let tol = n * f64::EPSILON * scale;
        prop_assert!((q.terminal() - path.terminal()).abs() <= tol);
    }

    #[test]
    fn cumulative_sum_inverts_differences(path in arb_path()) {
        let rebuilt = path_from_increments(path.u0(), &path.increments());
        let scale = path.values().iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for (a, b) in path.values().iter().zip(rebuilt.values()) {
            prop_assert!((a - b).abs() <= path.n() as f64 * f64::EPSILON * scale);
        }
    }

    #[test]
    fn argmax_ignores_grid_order(path in arb_path(), seed in any::<u64>()) {
        let grid: Vec<f64> = (0..40).map(|j| path.u0() + 0.25 * j as f64).collect();
        let curve = contrast(std::slice::from_ref(&path), &grid, 0.2).unwrap();
        let perm = permutation_at(grid.len(), seed, 1);
        let shuffled = ContrastCurve {
            thetas: perm.as_slice().iter().map(|&i| curve.thetas[i]).collect(),
            values: perm.as_slice().iter().map(|&i| curve.values[i]).collect(),
            alpha: 1,
        };
        prop_assert_eq!(shuffled.argmax(), curve.argmax());
    }

    #[test]
    fn sampled_permutations_are_bijections(n in 1usize..500, seed in any::<u64>()) {
        let mut rng = levybar::rng::stream(seed, 0, 0);
        prop_assert!(sample_permutation(n, &mut rng).is_bijection());
    }
}

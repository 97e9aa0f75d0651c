use missmass::csv::fmt_f64;
use missmass::distribution::DistributionSpec;
use missmass::inequality::{
    centered_bernoulli_mgf_log, h_s_second_derivative, h_s_value, hoeffding_log_bound,
    ks_coefficient, ks_gap, refined_gap,
};
use missmass::lab::{wilson_interval, Z_99};
use missmass::numeric::golden_section_maximize;
use missmass::{expected_missing_mass, OccupancyBounds};
use proptest::prelude::*;

const TOL: f64 = 1e-9;

fn interior() -> impl Strategy<Value = f64> {
    1e-6f64..(1.0 - 1e-6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn mgf_mirror_symmetry(p in interior(), t in -60.0f64..60.0) {
        let a = centered_bernoulli_mgf_log(p, t).unwrap();
        let b = centered_bernoulli_mgf_log(1.0 - p, -t).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()), "{a} vs {b}");
    }

    #[test]
    fn mgf_below_hoeffding(p in interior(), t in -60.0f64..60.0) {
        let lhs = centered_bernoulli_mgf_log(p, t).unwrap();
        let rhs = hoeffding_log_bound(t, -p, 1.0 - p).unwrap();
        prop_assert!(rhs - lhs >= -TOL);
    }

    #[test]
    fn ks_gap_nonnegative(p in interior(), t in -60.0f64..60.0) {
        prop_assert!(ks_gap(p, t).unwrap() >= -TOL);
    }

    #[test]
    fn ks_coefficient_symmetric_and_below_an_eighth(p in 0.0f64..=1.0) {
        let c = ks_coefficient(p).unwrap();
        prop_assert!((c - ks_coefficient(1.0 - p).unwrap()).abs() <= 1e-12);
        prop_assert!((0.0..=0.125).contains(&c));
    }

    #[test]
    fn refined_gap_nonnegative(p in 0.5f64..=1.0, t in 0.0f64..60.0) {
        prop_assert!(refined_gap(p, t).unwrap() >= -TOL);
    }

    #[test]
    fn h_s_nonnegative_and_convex(p in interior(), s in -10.0f64..10.0) {
        prop_assert!(h_s_value(p, s).unwrap() >= -TOL);
        prop_assert!(h_s_second_derivative(p, s).unwrap() >= 0.0);
    }

    #[test]
    fn lamp_gaps_nonnegative(n in 1u64..2048, p in interior(), frac in 0.0f64..1.0) {
        let bounds = OccupancyBounds::from_extremal();
        let lambda = frac * 10.0 * n as f64;
        prop_assert!(bounds.lamp_gap_a(n, p, lambda).unwrap() >= -TOL);
        prop_assert!(bounds.lamp_gap_b(n, p, lambda).unwrap() >= -TOL);
    }

    #[test]
    fn tail_bounds_ordered(n in 1u64..10_000, eps in 1e-4f64..1.0) {
        let t = OccupancyBounds::from_extremal().lower_tail_bound(n, eps).unwrap();
        prop_assert!(t.lower <= t.legacy_lower);
        prop_assert!(t.upper <= 1.0 && t.lower <= 1.0);
    }

    #[test]
    fn expected_mass_in_unit_interval_and_nonincreasing(k in 1usize..40, alpha in 0.1f64..3.0, n in 1u64..500) {
        let d = DistributionSpec::Zipf { k, alpha }.build().unwrap();
        let now = expected_missing_mass(&d, n).unwrap();
        let next = expected_missing_mass(&d, n + 1).unwrap();
        prop_assert!((0.0..=1.0).contains(&now));
        prop_assert!(next <= now + 1e-15);
    }

    #[test]
    fn spec_strings_round_trip(k in 1usize..1000, alpha in 0.01f64..5.0, rho in 0.01f64..0.99) {
        for spec in [
            DistributionSpec::Uniform { k },
            DistributionSpec::Zipf { k, alpha },
            DistributionSpec::TruncatedGeometric { k, rho },
        ] {
            prop_assert_eq!(spec.to_string().parse::<DistributionSpec>().unwrap(), spec);
        }
    }

    #[test]
    fn csv_floats_round_trip(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
        prop_assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), if x == 0.0 { 0.0 } else { x });
    }

    #[test]
    fn wilson_contains_point_estimate(trials in 1u64..1_000_000, frac in 0.0f64..=1.0) {
        let successes = ((trials as f64) * frac).floor() as u64;
        let (lo, hi) = wilson_interval(successes, trials, Z_99);
        let phat = successes as f64 / trials as f64;
        prop_assert!(0.0 <= lo && lo <= phat + 1e-15 && phat <= hi + 1e-15 && hi <= 1.0);
    }

    #[test]
    fn golden_section_finds_parabola_peak(center in 0.1f64..0.9) {
        let r = golden_section_maximize(|x| -(x - center) * (x - center), 0.0, 1.0, 1e-10, 500).unwrap();
        prop_assert!((r.argmax - center).abs() < 1e-8);
    }
}

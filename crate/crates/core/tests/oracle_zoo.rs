//! Exact laws on tiny instances, checked against closed forms and against a
//! brute-force enumeration written independently of the library.

use missmass::distribution::zoo;
use missmass::oracle::{
    default_lambda_grid, exact_mgf, exact_tail, OracleComparison, TailDirection,
};
use missmass::{expected_missing_mass, extremal, OccupancyBounds};

// Walks all k^n sequences by base-k counting; no grouping, no merging.
fn brute_force_moments(atoms: &[f64], n: u32) -> (f64, f64) {
    let k = atoms.len();
    let total = k.pow(n);
    let (mut m1, mut m2) = (0.0, 0.0);
    for code in 0..total {
        let mut c = code;
        let mut prob = 1.0;
        let mut seen = vec![false; k];
        for _ in 0..n {
            let j = c % k;
            c /= k;
            prob *= atoms[j];
            seen[j] = true;
        }
        let u: f64 = atoms
            .iter()
            .zip(&seen)
            .filter(|(_, &s)| !s)
            .map(|(&p, _)| p)
            .sum();
        m1 += prob * u;
        m2 += prob * u * u;
    }
    (m1, m2 - m1 * m1)
}

#[test]
fn zoo_means_mgfs_and_variances() {
    let lambdas = default_lambda_grid();
    for k in 1..=4 {
        for spec in zoo(k) {
            let dist = spec.build().unwrap();
            for n in 1..=8u64 {
                let cmp = OracleComparison::new(&dist, n, &lambdas).unwrap();
                let formula = expected_missing_mass(&dist, n).unwrap();
                assert!(
                    (cmp.dependent.mean() - formula).abs() <= 1e-12,
                    "{spec} n={n}"
                );
                assert!(
                    (cmp.independent.mean() - formula).abs() <= 1e-12,
                    "{spec} n={n}"
                );
                assert!((cmp.dependent.total_probability() - 1.0).abs() <= 1e-12);
                assert!(
                    cmp.mgf_dominated(1e-12),
                    "{spec} n={n}: slack {} at {}",
                    cmp.mgf_slack,
                    cmp.mgf_slack_lambda
                );
                assert!(
                    cmp.dependent.variance() <= cmp.independent.variance() + 1e-15,
                    "{spec} n={n}: {} > {}",
                    cmp.dependent.variance(),
                    cmp.independent.variance()
                );

                let (bf_mean, bf_var) = brute_force_moments(dist.atoms(), n as u32);
                assert!((cmp.dependent.mean() - bf_mean).abs() <= 1e-12);
                assert!((cmp.dependent.variance() - bf_var).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn exact_tails_respect_both_tail_bounds() {
    let dist = "uniform:3"
        .parse::<missmass::DistributionSpec>()
        .unwrap()
        .build()
        .unwrap();
    let n = 6;
    let cmp = OracleComparison::new(&dist, n, &[0.0]).unwrap();
    let mean = cmp.dependent.mean();
    let bounds = OccupancyBounds::new(extremal::c0()).unwrap();
    for i in 1..=10 {
        let eps = 0.05 * i as f64;
        let t = bounds.lower_tail_bound(n, eps).unwrap();
        assert!(exact_tail(&cmp.dependent, TailDirection::Above, mean + eps) <= t.upper);
        assert!(exact_tail(&cmp.dependent, TailDirection::Below, mean - eps) <= t.lower);
    }
}

#[test]
fn counterexample_to_raw_tail_domination() {
    let dist = "uniform:2"
        .parse::<missmass::DistributionSpec>()
        .unwrap()
        .build()
        .unwrap();
    let cmp = OracleComparison::new(&dist, 2, &default_lambda_grid()).unwrap();
    assert_eq!(exact_tail(&cmp.dependent, TailDirection::Above, 0.45), 0.5);
    assert_eq!(
        exact_tail(&cmp.independent, TailDirection::Above, 0.45),
        0.4375
    );
    for &l in &default_lambda_grid() {
        assert!(exact_mgf(&cmp.dependent, l) <= exact_mgf(&cmp.independent, l) + 1e-12);
    }
}

//! Monte Carlo against exact enumeration, with exact binomial acceptance
//! bands, plus the moment checks on the zoo.

use missmass::distribution::zoo;
use missmass::lab::{trial_rng, Moments, Sampler};
use missmass::oracle::{exact_missing_mass_distribution, exact_tail, TailDirection};
use missmass::{expected_missing_mass, DistributionSpec};
use statrs::distribution::{Binomial, DiscreteCDF};

const SEED: u64 = 20_240_917;

fn draws(
    dist: &missmass::DiscreteDistribution,
    n: u64,
    trials: u64,
    independent: bool,
) -> Vec<f64> {
    let sampler = Sampler::new(dist, n).unwrap();
    let mut seen = Vec::new();
    (0..trials)
        .map(|i| {
            let mut rng = trial_rng(SEED, i + if independent { trials } else { 0 });
            if independent {
                sampler.independent_analogue(&mut rng)
            } else {
                sampler.missing_mass(&mut rng, &mut seen)
            }
        })
        .collect()
}

// Two-sided band holding `1 - alpha` of Binomial(trials, p).
fn binomial_band(trials: u64, p: f64, alpha: f64) -> (u64, u64) {
    let b = Binomial::new(p, trials).unwrap();
    (b.inverse_cdf(alpha / 2.0), b.inverse_cdf(1.0 - alpha / 2.0))
}

#[test]
fn empirical_tails_match_exact_tails() {
    let trials = 20_000;
    for spec in zoo(3) {
        let dist = spec.build().unwrap();
        for n in [2u64, 5] {
            let law = exact_missing_mass_distribution(&dist, n).unwrap();
            let mean = law.mean();
            let sample = draws(&dist, n, trials, false);
            for eps in [0.0, 0.05, 0.1] {
                for dir in [TailDirection::Above, TailDirection::Below] {
                    let (threshold, exact) = match dir {
                        TailDirection::Above => (mean + eps, exact_tail(&law, dir, mean + eps)),
                        TailDirection::Below => (mean - eps, exact_tail(&law, dir, mean - eps)),
                    };
                    let count = sample
                        .iter()
                        .filter(|&&u| match dir {
                            TailDirection::Above => u > threshold,
                            TailDirection::Below => u < threshold,
                        })
                        .count() as u64;
                    let (lo, hi) = binomial_band(trials, exact.clamp(0.0, 1.0), 1e-4);
                    assert!(
                        (lo..=hi).contains(&count),
                        "{spec} n={n} eps={eps} {dir:?}: {count} outside [{lo}, {hi}] (p={exact})"
                    );
                }
            }
        }
    }
}

#[test]
fn zoo_means_and_dispersions() {
    let trials = 100_000;
    for spec in zoo(10) {
        let dist = spec.build().unwrap();
        for n in [1u64, 5, 20] {
            let expected = expected_missing_mass(&dist, n).unwrap();
            let dep = draws(&dist, n, trials, false);
            let ind = draws(&dist, n, trials, true);
            let (md, mi) = (Moments::of(&dep), Moments::of(&ind));

            assert!(
                (md.mean - expected).abs() <= 4.0 * md.standard_error() + 1e-15,
                "{spec} n={n}"
            );
            let combined = (md.standard_error().powi(2) + mi.standard_error().powi(2)).sqrt();
            assert!(
                (md.mean - mi.mean).abs() <= 4.0 * combined + 1e-15,
                "{spec} n={n}"
            );

            let var_se = (Moments::variance_standard_error(&dep).powi(2)
                + Moments::variance_standard_error(&ind).powi(2))
            .sqrt();
            assert!(
                md.variance <= mi.variance + 4.0 * var_se + 1e-15,
                "{spec} n={n}"
            );
        }
    }
}

#[test]
fn single_atom_is_never_missing() {
    let dist = DistributionSpec::Uniform { k: 1 }.build().unwrap();
    assert!(draws(&dist, 3, 100, false).iter().all(|&u| u == 0.0));
    assert!(draws(&dist, 3, 100, true).iter().all(|&u| u == 0.0));
}

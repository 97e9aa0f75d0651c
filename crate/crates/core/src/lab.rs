//! Monte Carlo simulation of the missing mass `U_n` and of its independent
//! analogue `U_n'`, with empirical tail frequencies set against the bounds.
//!
//! Trial `i` draws from a ChaCha8 stream keyed by `(seed, i)`, so results do
//! not depend on the order in which trials are run.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::distribution::{expected_missing_mass, DiscreteDistribution};
use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;
use crate::occupancy::{survival, OccupancyBounds};

/// Two-sided 99% standard normal quantile, `Φ⁻¹(0.995)`.
pub const Z_99: f64 = 2.575_829_303_548_900_4;

/// The RNG stream for trial `trial` under `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Inverse-CDF sampler over a fixed distribution.
#[derive(Debug, Clone)]
pub struct Sampler<'a> {
    dist: &'a DiscreteDistribution,
    cumulative: Vec<f64>,
    survival: Vec<f64>,
    n: u64,
}

impl<'a> Sampler<'a> {
    pub fn new(dist: &'a DiscreteDistribution, n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain {
                name: "n",
                value: 0.0,
                expected: "n >= 1",
            });
        }
        Ok(Sampler {
            dist,
            cumulative: dist.cumulative(),
            survival: dist.atoms().iter().map(|&p| survival(p, n)).collect(),
            n,
        })
    }

    /// Index of the atom hit by a uniform draw `u ∈ [0, 1)`.
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        self.cumulative
            .partition_point(|&c| c <= u)
            .min(self.cumulative.len() - 1)
    }

    /// Draws `n` indices and returns the total mass of atoms never drawn.
    /// `seen` is scratch space and is resized as needed.
    pub fn missing_mass<R: Rng + ?Sized>(&self, rng: &mut R, seen: &mut Vec<bool>) -> f64 {
        seen.clear();
        seen.resize(self.dist.len(), false);
        for _ in 0..self.n {
            seen[self.draw(rng)] = true;
        }
        self.dist
            .atoms()
            .iter()
            .zip(seen.iter())
            .filter(|(_, &hit)| !hit)
            .map(|(&p, _)| p)
            .sum()
    }

    /// Draws each indicator independently with probability `(1-p_j)^n` and
    /// returns the weighted sum.
    pub fn independent_analogue<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.dist
            .atoms()
            .iter()
            .zip(&self.survival)
            .filter(|&(_, &q)| rng.random::<f64>() < q)
            .map(|(&p, _)| p)
            .sum()
    }
}

/// One draw of `U_n`.
pub fn sample_missing_mass<R: Rng + ?Sized>(
    dist: &DiscreteDistribution,
    n: u64,
    rng: &mut R,
) -> Result<f64> {
    let sampler = Sampler::new(dist, n)?;
    Ok(sampler.missing_mass(rng, &mut Vec::new()))
}

/// One draw of `U_n'`.
pub fn sample_independent_analogue<R: Rng + ?Sized>(
    dist: &DiscreteDistribution,
    n: u64,
    rng: &mut R,
) -> Result<f64> {
    let sampler = Sampler::new(dist, n)?;
    Ok(sampler.independent_analogue(rng))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleConfig {
    pub n: u64,
    pub trials: u64,
    pub seed: u64,
    pub epsilons: Vec<f64>,
}

impl SampleConfig {
    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Domain {
                name: "n",
                value: 0.0,
                expected: "n >= 1",
            });
        }
        if self.trials == 0 {
            return Err(Error::Domain {
                name: "trials",
                value: 0.0,
                expected: "trials >= 1",
            });
        }
        if let Some(&e) = self
            .epsilons
            .iter()
            .find(|e| !(**e > 0.0) || !e.is_finite())
        {
            return Err(Error::Domain {
                name: "epsilon",
                value: e,
                expected: "epsilon > 0",
            });
        }
        Ok(())
    }
}

/// Wilson score interval for `successes` out of `trials` at normal quantile `z`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / denom;
    let half = z / denom * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Sample mean and unbiased variance of a set of draws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Moments {
    pub trials: u64,
    pub mean: f64,
    pub variance: f64,
}

impl Moments {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().copied().collect::<CompensatedSum>().value() / n;
        let ss = values
            .iter()
            .map(|v| (v - mean) * (v - mean))
            .collect::<CompensatedSum>()
            .value();
        Moments {
            trials: values.len() as u64,
            mean,
            variance: if values.len() > 1 {
                ss / (n - 1.0)
            } else {
                0.0
            },
        }
    }

    pub fn standard_error(&self) -> f64 {
        (self.variance / self.trials as f64).sqrt()
    }

    /// Standard error of the sample variance, from the fourth central moment.
    pub fn variance_standard_error(values: &[f64]) -> f64 {
        let m = Moments::of(values);
        let n = values.len() as f64;
        let m4 = values
            .iter()
            .map(|v| (v - m.mean).powi(4))
            .collect::<CompensatedSum>()
            .value()
            / n;
        ((m4 - m.variance * m.variance).max(0.0) / n).sqrt()
    }
}

/// Empirical tails at one `ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailRow {
    pub epsilon: f64,
    pub upper_count: u64,
    pub empirical_upper: f64,
    pub wilson_upper_ci: (f64, f64),
    pub bound_upper: f64,
    pub lower_count: u64,
    pub empirical_lower: f64,
    pub wilson_lower_ci: (f64, f64),
    pub bound_lower: f64,
}

impl TailRow {
    /// Point estimates and Wilson lower limits both sit at or below the bounds.
    pub fn dominated(&self) -> bool {
        self.empirical_upper <= self.bound_upper
            && self.empirical_lower <= self.bound_lower
            && self.wilson_upper_ci.0 <= self.bound_upper
            && self.wilson_lower_ci.0 <= self.bound_lower
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailExperimentResult {
    pub n: u64,
    pub trials: u64,
    pub seed: u64,
    pub expected_mass: f64,
    pub rows: Vec<TailRow>,
    pub dependent: Moments,
    /// Moments of `U_n'` from an independent set of streams, when requested.
    pub independent: Option<Moments>,
}

impl TailExperimentResult {
    pub fn all_dominated(&self) -> bool {
        self.rows.iter().all(TailRow::dominated)
    }
}

/// Simulates `config.trials` copies of `U_n`, counts the strict tail events
/// `U_n > E U_n + ε` and `U_n < E U_n - ε`, and sets them against the bounds.
///
/// With `with_independent`, the same number of `U_n'` draws is taken from
/// streams `trials..2·trials` and their moments are reported.
pub fn run_tail_experiment(
    dist: &DiscreteDistribution,
    config: &SampleConfig,
    bounds: &OccupancyBounds,
    with_independent: bool,
) -> Result<TailExperimentResult> {
    config.validate()?;
    let sampler = Sampler::new(dist, config.n)?;
    let expected = expected_missing_mass(dist, config.n)?;

    let mut seen = Vec::new();
    let draws: Vec<f64> = (0..config.trials)
        .map(|i| sampler.missing_mass(&mut trial_rng(config.seed, i), &mut seen))
        .collect();

    let rows = config
        .epsilons
        .iter()
        .map(|&epsilon| {
            let bound = bounds.lower_tail_bound(config.n, epsilon)?;
            let upper_count = draws.iter().filter(|&&u| u > expected + epsilon).count() as u64;
            let lower_count = draws.iter().filter(|&&u| u < expected - epsilon).count() as u64;
            let trials = config.trials as f64;
            Ok(TailRow {
                epsilon,
                upper_count,
                empirical_upper: upper_count as f64 / trials,
                wilson_upper_ci: wilson_interval(upper_count, config.trials, Z_99),
                bound_upper: bound.upper,
                lower_count,
                empirical_lower: lower_count as f64 / trials,
                wilson_lower_ci: wilson_interval(lower_count, config.trials, Z_99),
                bound_lower: bound.lower,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let independent = with_independent.then(|| {
        let values: Vec<f64> = (config.trials..2 * config.trials)
            .map(|i| sampler.independent_analogue(&mut trial_rng(config.seed, i)))
            .collect();
        Moments::of(&values)
    });

    Ok(TailExperimentResult {
        n: config.n,
        trials: config.trials,
        seed: config.seed,
        expected_mass: expected,
        rows,
        dependent: Moments::of(&draws),
        independent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::DistributionSpec;

    fn dist(s: &str) -> DiscreteDistribution {
        s.parse::<DistributionSpec>().unwrap().build().unwrap()
    }

    #[test]
    fn single_atom_is_always_observed() {
        let d = dist("uniform:1");
        let mut rng = trial_rng(1, 0);
        for n in [1, 5, 100] {
            assert_eq!(sample_missing_mass(&d, n, &mut rng).unwrap(), 0.0);
            assert_eq!(sample_independent_analogue(&d, n, &mut rng).unwrap(), 0.0);
        }
    }

    #[test]
    fn two_atoms_two_draws_support() {
        let d = dist("uniform:2");
        for i in 0..2000 {
            let u = sample_missing_mass(&d, 2, &mut trial_rng(3, i)).unwrap();
            assert!(u == 0.0 || u == 0.5, "{u}");
            let v = sample_independent_analogue(&d, 2, &mut trial_rng(3, i)).unwrap();
            assert!(v == 0.0 || v == 0.5 || v == 1.0, "{v}");
        }
    }

    #[test]
    fn zero_mass_atoms_are_never_drawn() {
        let d = dist("explicit:0,1,0");
        for i in 0..500 {
            assert_eq!(
                sample_missing_mass(&d, 1, &mut trial_rng(9, i)).unwrap(),
                0.0
            );
        }
    }

    #[test]
    fn fixed_seed_is_reproducible() {
        let d = dist("zipf:30:1.1");
        let a: Vec<f64> = (0..50)
            .map(|i| sample_missing_mass(&d, 20, &mut trial_rng(42, i)).unwrap())
            .collect();
        let b: Vec<f64> = (0..50)
            .map(|i| sample_missing_mass(&d, 20, &mut trial_rng(42, i)).unwrap())
            .collect();
        assert_eq!(a, b);
        let c: Vec<f64> = (0..50)
            .map(|i| sample_missing_mass(&d, 20, &mut trial_rng(43, i)).unwrap())
            .collect();
        assert_ne!(a, c);
    }

    #[test]
    fn independent_analogue_mean_matches() {
        let d = dist("uniform:2");
        let sampler = Sampler::new(&d, 2).unwrap();
        let values: Vec<f64> = (0..1_000_000)
            .map(|i| sampler.independent_analogue(&mut trial_rng(5, i)))
            .collect();
        let m = Moments::of(&values);
        assert!((m.mean - 0.25).abs() <= 3.0 * m.standard_error(), "{m:?}");
    }

    #[test]
    fn wilson_interval_contains_estimate() {
        for &(k, n) in &[
            (0u64, 100u64),
            (1, 100),
            (50, 100),
            (100, 100),
            (3, 100_000),
        ] {
            let (lo, hi) = wilson_interval(k, n, Z_99);
            let phat = k as f64 / n as f64;
            assert!(lo <= phat && phat <= hi, "{k}/{n}");
            assert!((0.0..=1.0).contains(&lo) && (0.0..=1.0).contains(&hi));
        }
        let (lo, _) = wilson_interval(0, 100, Z_99);
        assert_eq!(lo, 0.0);
    }

    #[test]
    fn wilson_matches_hand_value() {
        // 10/100 at z = 1.96: center 0.1147, half-width 0.0607 (textbook value)
        let (lo, hi) = wilson_interval(10, 100, 1.96);
        assert!(
            (lo - 0.0552).abs() < 1e-4 && (hi - 0.1744).abs() < 1e-4,
            "{lo} {hi}"
        );
    }

    #[test]
    fn experiment_examples() {
        let d = dist("uniform:20");
        let config = SampleConfig {
            n: 50,
            trials: 20_000,
            seed: 7,
            epsilons: vec![0.1, 1.5],
        };
        let bounds = OccupancyBounds::from_extremal();
        let r = run_tail_experiment(&d, &config, &bounds, true).unwrap();
        assert!(r.rows[0].empirical_upper <= (-0.5f64).exp());
        assert_eq!(r.rows[1].upper_count, 0);
        assert_eq!(r.rows[1].lower_count, 0);
        assert!(r.all_dominated());
        assert!((r.expected_mass - 0.95f64.powi(50)).abs() < 1e-15);
        let again = run_tail_experiment(&d, &config, &bounds, true).unwrap();
        assert_eq!(r, again);
    }

    #[test]
    fn experiment_rejects_zero_trials() {
        let d = dist("uniform:2");
        let bounds = OccupancyBounds::from_extremal();
        let config = SampleConfig {
            n: 2,
            trials: 0,
            seed: 1,
            epsilons: vec![0.1],
        };
        assert!(run_tail_experiment(&d, &config, &bounds, false).is_err());
        let config = SampleConfig {
            n: 2,
            trials: 1,
            seed: 1,
            epsilons: vec![0.0],
        };
        assert!(run_tail_experiment(&d, &config, &bounds, false).is_err());
    }
}

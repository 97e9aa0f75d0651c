//! Exact laws of `U_n` and `U_n'` on tiny instances, by enumeration.
//!
//! `U_n` is obtained from every sample sequence in `{1..k}^n` (lexicographic
//! order); `U_n'` from every indicator pattern in `{0,1}^k`. Probabilities are
//! accumulated with compensated summation and values closer than
//! [`MERGE_TOLERANCE`] are merged.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::distribution::DiscreteDistribution;
use crate::error::{Error, Result};
use crate::numeric::{log_sum_exp, CompensatedSum};
use crate::occupancy::survival;

/// Maximum number of enumerated cases.
pub const ENUMERATION_LIMIT: u128 = 10_000_000;

pub const MERGE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    DependentEnumeration,
    IndependentEnumeration,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::DependentEnumeration => "dependent-enumeration",
            Provenance::IndependentEnumeration => "independent-enumeration",
        })
    }
}

/// A finitely supported law: strictly increasing `support`, positive `probs`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactDistribution {
    support: Vec<f64>,
    probs: Vec<f64>,
    provenance: Provenance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailDirection {
    Above,
    Below,
}

impl ExactDistribution {
    /// Sorts `(value, probability)` pairs, merges near-equal values and
    /// drops zero-probability outcomes.
    fn from_pairs(mut pairs: Vec<(f64, CompensatedSum)>, provenance: Provenance) -> Self {
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut support: Vec<f64> = Vec::new();
        let mut sums: Vec<CompensatedSum> = Vec::new();
        let mut anchor = f64::NEG_INFINITY;
        for (value, prob) in pairs {
            if prob.value() <= 0.0 {
                continue;
            }
            if value - anchor <= MERGE_TOLERANCE {
                sums.last_mut().expect("anchor set").merge(prob);
            } else {
                anchor = value;
                support.push(value);
                sums.push(prob);
            }
        }
        ExactDistribution {
            support,
            probs: sums.iter().map(CompensatedSum::value).collect(),
            provenance,
        }
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.support.iter().copied().zip(self.probs.iter().copied())
    }

    pub fn total_probability(&self) -> f64 {
        self.probs
            .iter()
            .copied()
            .collect::<CompensatedSum>()
            .value()
    }

    pub fn mean(&self) -> f64 {
        self.iter()
            .map(|(v, p)| v * p)
            .collect::<CompensatedSum>()
            .value()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.iter()
            .map(|(v, p)| (v - m) * (v - m) * p)
            .collect::<CompensatedSum>()
            .value()
    }

    /// Mass at a support value (exact match), 0 off the support.
    pub fn point_mass(&self, x: f64) -> f64 {
        self.iter().filter(|&(v, _)| v == x).map(|(_, p)| p).sum()
    }
}

/// `P(U > x)` or `P(U < x)` under the law, strict inequality.
pub fn exact_tail(law: &ExactDistribution, direction: TailDirection, threshold: f64) -> f64 {
    law.iter()
        .filter(|&(v, _)| match direction {
            TailDirection::Above => v > threshold,
            TailDirection::Below => v < threshold,
        })
        .map(|(_, p)| p)
        .collect::<CompensatedSum>()
        .value()
}

/// `log E e^{λU}`.
pub fn exact_log_mgf(law: &ExactDistribution, lambda: f64) -> f64 {
    let terms: Vec<f64> = law.iter().map(|(v, p)| p.ln() + lambda * v).collect();
    log_sum_exp(&terms)
}

/// `E e^{λU}`, evaluated through [`exact_log_mgf`].
pub fn exact_mgf(law: &ExactDistribution, lambda: f64) -> f64 {
    if lambda == 0.0 {
        return 1.0;
    }
    exact_log_mgf(law, lambda).exp()
}

fn guard(cases: Option<u128>) -> Result<()> {
    match cases {
        Some(c) if c <= ENUMERATION_LIMIT => Ok(()),
        Some(c) => Err(Error::InstanceTooLarge {
            cases: c,
            limit: ENUMERATION_LIMIT,
        }),
        None => Err(Error::InstanceTooLarge {
            cases: u128::MAX,
            limit: ENUMERATION_LIMIT,
        }),
    }
}

fn check_n(n: u64) -> Result<u32> {
    if n == 0 {
        return Err(Error::Domain {
            name: "n",
            value: 0.0,
            expected: "n >= 1",
        });
    }
    if n as u128 > ENUMERATION_LIMIT {
        return Err(Error::InstanceTooLarge {
            cases: n as u128,
            limit: ENUMERATION_LIMIT,
        });
    }
    Ok(n as u32)
}

/// Exact law of `U_n` by enumerating all sample sequences.
///
/// Zero-mass atoms are never drawn, so only sequences over the positive atoms
/// are enumerated and the size guard applies to `(#positive atoms)^n`.
pub fn exact_missing_mass_distribution(
    dist: &DiscreteDistribution,
    n: u64,
) -> Result<ExactDistribution> {
    let n32 = check_n(n)?;
    let atoms = dist.atoms();
    let positive: Vec<usize> = (0..atoms.len()).filter(|&j| atoms[j] > 0.0).collect();
    let m = positive.len();
    guard((m as u128).checked_pow(n32))?;

    let n = n as usize;
    let words = atoms.len().div_ceil(64);
    // observed-set bitmask -> probability of all sequences producing it
    let mut by_observed: BTreeMap<Vec<u64>, CompensatedSum> = BTreeMap::new();
    let mut digits = vec![0usize; n];
    // prefix[i] = product of the probabilities of the first i draws
    let mut prefix = vec![1.0f64; n + 1];
    let mut valid = 0; // prefix[..=valid] is current
    loop {
        for i in valid..n {
            prefix[i + 1] = prefix[i] * atoms[positive[digits[i]]];
        }
        let mut mask = vec![0u64; words];
        for &d in &digits {
            let j = positive[d];
            mask[j / 64] |= 1 << (j % 64);
        }
        by_observed.entry(mask).or_default().add(prefix[n]);

        // odometer: advance the last digit, carrying leftwards
        let mut pos = n;
        loop {
            if pos == 0 {
                let pairs = by_observed
                    .into_iter()
                    .map(|(mask, prob)| (unobserved_mass(atoms, &mask), prob))
                    .collect();
                return Ok(ExactDistribution::from_pairs(
                    pairs,
                    Provenance::DependentEnumeration,
                ));
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < m {
                break;
            }
            digits[pos] = 0;
        }
        valid = pos;
    }
}

fn unobserved_mass(atoms: &[f64], mask: &[u64]) -> f64 {
    atoms
        .iter()
        .enumerate()
        .filter(|(j, _)| mask[j / 64] & (1 << (j % 64)) == 0)
        .map(|(_, &p)| p)
        .sum()
}

/// Exact law of `U_n' = Σ p_j ξ_j'` with independent `ξ_j' ~ Bernoulli((1-p_j)^n)`.
pub fn exact_independent_distribution(
    dist: &DiscreteDistribution,
    n: u64,
) -> Result<ExactDistribution> {
    check_n(n)?;
    let atoms = dist.atoms();
    let k = atoms.len();
    let cases = u32::try_from(k).ok().and_then(|k| 2u128.checked_pow(k));
    guard(cases)?;
    let q: Vec<f64> = atoms.iter().map(|&p| survival(p, n)).collect();

    let mut pairs = Vec::with_capacity(1 << k);
    for pattern in 0u64..(1u64 << k) {
        let mut prob = 1.0;
        let mut value = 0.0;
        for j in 0..k {
            if pattern & (1 << j) != 0 {
                prob *= q[j];
                value += atoms[j];
            } else {
                prob *= 1.0 - q[j];
            }
        }
        let mut acc = CompensatedSum::default();
        acc.add(prob);
        pairs.push((value, acc));
    }
    Ok(ExactDistribution::from_pairs(
        pairs,
        Provenance::IndependentEnumeration,
    ))
}

/// Dependent and independent laws for one instance, with the comparisons
/// that the Chernoff argument relies on.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleComparison {
    pub dependent: ExactDistribution,
    pub independent: ExactDistribution,
    pub formula_mean: f64,
    /// `min over λ of E e^{λU'} - E e^{λU}`
    pub mgf_slack: f64,
    pub mgf_slack_lambda: f64,
}

impl OracleComparison {
    pub fn new(dist: &DiscreteDistribution, n: u64, lambdas: &[f64]) -> Result<Self> {
        let dependent = exact_missing_mass_distribution(dist, n)?;
        let independent = exact_independent_distribution(dist, n)?;
        let formula_mean = crate::distribution::expected_missing_mass(dist, n)?;
        let (mgf_slack_lambda, mgf_slack) = lambdas
            .iter()
            .map(|&l| (l, exact_mgf(&independent, l) - exact_mgf(&dependent, l)))
            .fold((f64::NAN, f64::INFINITY), |best, cur| {
                if cur.1 < best.1 {
                    cur
                } else {
                    best
                }
            });
        Ok(OracleComparison {
            dependent,
            independent,
            formula_mean,
            mgf_slack,
            mgf_slack_lambda,
        })
    }

    pub fn mgf_dominated(&self, tolerance: f64) -> bool {
        self.mgf_slack >= -tolerance
    }

    /// Largest `P(U > x) - P(U' > x)` over thresholds `x` placed midway
    /// between consecutive points of the two supports, with its threshold.
    ///
    /// A positive value means the raw upper tail of `U_n` is *not* dominated
    /// by that of `U_n'` at `x`, even though the MGFs are ordered.
    pub fn max_raw_tail_excess(&self) -> (f64, f64) {
        let mut points: Vec<f64> = self
            .dependent
            .support()
            .iter()
            .chain(self.independent.support())
            .copied()
            .collect();
        points.sort_by(f64::total_cmp);
        points.dedup();
        points
            .windows(2)
            .map(|w| {
                let x = 0.5 * (w[0] + w[1]);
                let excess = exact_tail(&self.dependent, TailDirection::Above, x)
                    - exact_tail(&self.independent, TailDirection::Above, x);
                (x, excess)
            })
            .fold((f64::NAN, f64::NEG_INFINITY), |best, cur| {
                if cur.1 > best.1 {
                    cur
                } else {
                    best
                }
            })
    }
}

/// `[-20, 20]` in steps of 0.1.
pub fn default_lambda_grid() -> Vec<f64> {
    (-200..=200).map(|i| i as f64 / 10.0).collect()
}

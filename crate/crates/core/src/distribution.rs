//! Finite sampling laws over atoms `1..=k`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;
use crate::occupancy::survival;

/// How a distribution was built. Infinite families are truncated to `k`
/// atoms and renormalized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    tag = "kind",
    content = "params",
    rename_all = "kebab-case",
    deny_unknown_fields
)]
pub enum DistributionSpec {
    Uniform { k: usize },
    Zipf { k: usize, alpha: f64 },
    TruncatedGeometric { k: usize, rho: f64 },
    Explicit { atoms: Vec<f64> },
}

impl DistributionSpec {
    pub fn build(&self) -> Result<DiscreteDistribution> {
        make_distribution(self)
    }
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistributionSpec::Uniform { k } => write!(f, "uniform:{k}"),
            DistributionSpec::Zipf { k, alpha } => write!(f, "zipf:{k}:{alpha}"),
            DistributionSpec::TruncatedGeometric { k, rho } => write!(f, "geometric:{k}:{rho}"),
            DistributionSpec::Explicit { atoms } => {
                write!(f, "explicit:")?;
                for (i, a) in atoms.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                Ok(())
            }
        }
    }
}

/// Parses `uniform:K`, `zipf:K:ALPHA`, `geometric:K:RHO` or
/// `explicit:P1,P2,...`.
impl FromStr for DistributionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidDistribution(format!("cannot parse distribution spec {s:?}"));
        let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
        let parts: Vec<&str> = rest.split(':').collect();
        let k = |x: &str| x.trim().parse::<usize>().map_err(|_| bad());
        let real = |x: &str| x.trim().parse::<f64>().map_err(|_| bad());
        match (kind.trim(), parts.as_slice()) {
            ("uniform", [n]) => Ok(DistributionSpec::Uniform { k: k(n)? }),
            ("zipf", [n, a]) => Ok(DistributionSpec::Zipf {
                k: k(n)?,
                alpha: real(a)?,
            }),
            ("geometric" | "truncated-geometric", [n, r]) => {
                Ok(DistributionSpec::TruncatedGeometric {
                    k: k(n)?,
                    rho: real(r)?,
                })
            }
            ("explicit", [list]) => Ok(DistributionSpec::Explicit {
                atoms: list.split(',').map(real).collect::<Result<_>>()?,
            }),
            _ => Err(bad()),
        }
    }
}

/// Atom probabilities `p_1, …, p_k` summing to 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteDistribution {
    atoms: Vec<f64>,
    spec: DistributionSpec,
}

/// Builds and normalizes a distribution.
///
/// Zipf atoms are proportional to `j^{-α}`, truncated-geometric atoms to
/// `ρ^{j-1}(1-ρ)`, both for `j = 1..=k`. Explicit lists are divided by their sum.
pub fn make_distribution(spec: &DistributionSpec) -> Result<DiscreteDistribution> {
    let weights: Vec<f64> = match *spec {
        DistributionSpec::Uniform { k } => {
            check_k(k)?;
            vec![1.0; k]
        }
        DistributionSpec::Zipf { k, alpha } => {
            check_k(k)?;
            if !(alpha > 0.0) || !alpha.is_finite() {
                return Err(Error::InvalidDistribution(format!(
                    "zipf exponent must be positive, got {alpha}"
                )));
            }
            (1..=k).map(|j| (j as f64).powf(-alpha)).collect()
        }
        DistributionSpec::TruncatedGeometric { k, rho } => {
            check_k(k)?;
            if !(rho > 0.0 && rho < 1.0) {
                return Err(Error::InvalidDistribution(format!(
                    "geometric ratio must lie in (0, 1), got {rho}"
                )));
            }
            (0..k).map(|j| rho.powi(j as i32) * (1.0 - rho)).collect()
        }
        DistributionSpec::Explicit { ref atoms } => {
            check_k(atoms.len())?;
            if let Some(bad) = atoms.iter().find(|a| !(**a >= 0.0) || !a.is_finite()) {
                return Err(Error::InvalidDistribution(format!(
                    "explicit atoms must be finite and nonnegative, got {bad}"
                )));
            }
            atoms.clone()
        }
    };
    let total = weights.iter().copied().collect::<CompensatedSum>().value();
    if !(total > 0.0) {
        return Err(Error::InvalidDistribution(
            "all atoms have zero mass".into(),
        ));
    }
    Ok(DiscreteDistribution {
        atoms: weights.into_iter().map(|w| w / total).collect(),
        spec: spec.clone(),
    })
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        Err(Error::InvalidDistribution("need at least one atom".into()))
    } else {
        Ok(())
    }
}

impl DiscreteDistribution {
    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn spec(&self) -> &DistributionSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// True when some atom has zero mass. Such atoms are never sampled and
    /// contribute nothing to the missing mass.
    pub fn has_zero_mass_atoms(&self) -> bool {
        self.atoms.contains(&0.0)
    }

    /// Cumulative table for inverse-CDF sampling. Entries from the last
    /// positive atom onward are pinned to exactly 1.
    pub fn cumulative(&self) -> Vec<f64> {
        let last_positive = self.atoms.iter().rposition(|&p| p > 0.0).unwrap_or(0);
        let mut acc = CompensatedSum::default();
        self.atoms
            .iter()
            .enumerate()
            .map(|(j, &p)| {
                acc.add(p);
                if j >= last_positive {
                    1.0
                } else {
                    acc.value().min(1.0)
                }
            })
            .collect()
    }
}

/// `E U_n = Σ_j p_j (1-p_j)^n`.
pub fn expected_missing_mass(dist: &DiscreteDistribution, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain {
            name: "n",
            value: 0.0,
            expected: "n >= 1",
        });
    }
    Ok(dist
        .atoms
        .iter()
        .map(|&p| p * survival(p, n))
        .collect::<CompensatedSum>()
        .value())
}

/// A small, fixed collection of shapes used across the checks: flat, heavy-
/// and light-tailed, and irregular explicit laws with `k` atoms.
pub fn zoo(k: usize) -> Vec<DistributionSpec> {
    let mut explicit: Vec<f64> = (1..=k).map(|j| (j * j) as f64).collect();
    explicit.reverse();
    vec![
        DistributionSpec::Uniform { k },
        DistributionSpec::Zipf { k, alpha: 1.0 },
        DistributionSpec::Zipf { k, alpha: 2.0 },
        DistributionSpec::TruncatedGeometric { k, rho: 0.5 },
        DistributionSpec::Explicit { atoms: explicit },
    ]
}

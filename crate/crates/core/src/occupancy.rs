//! MGF bounds for the centered occupancy indicator of a single atom and the
//! Chernoff tail bounds on the missing mass built from them.
//!
//! An atom of mass `p` is missed by `n` i.i.d. draws with probability
//! `q = (1-p)^n`. Writing `X = ξ - q` for the centered indicator and scaling by
//! the atom's weight `p`, the per-atom bounds are
//!
//! ```text
//! (a)  E e^{λ p X}  <= exp(p λ² / 4n)
//! (b)  E e^{-λ p X} <= exp(p λ² / C₀ n)
//! ```
//!
//! Summing over atoms and optimizing the Chernoff parameter gives
//! `P(U_n > E U_n + ε) <= e^{-nε²}` at `λ = 2nε` and
//! `P(U_n < E U_n - ε) <= e^{-C₀nε²/4}` at `λ = C₀nε/2`.

use serde::Serialize;

use crate::error::{finite, Error, Result};
use crate::extremal::{self, LEGACY_EXPONENT};
use crate::gap::{CheckOutcome, DeviationReport, GapAccumulator, GapEntry, GapReport};
use crate::inequality::{ks_coeff, log_mgf, BernoulliParam};

/// `(1-p)^n`, computed as `exp(n log1p(-p))`; exactly 0 at `p = 1`.
pub fn survival_prob(p: f64, n: u64) -> Result<f64> {
    let p = BernoulliParam::new(p)?.get();
    check_n(n)?;
    Ok(survival(p, n))
}

pub(crate) fn survival(p: f64, n: u64) -> f64 {
    if p == 1.0 {
        0.0
    } else {
        (n as f64 * (-p).ln_1p()).exp()
    }
}

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        Err(Error::Domain {
            name: "n",
            value: 0.0,
            expected: "n >= 1",
        })
    } else {
        Ok(())
    }
}

fn check_lambda(lambda: f64) -> Result<f64> {
    let lambda = finite("lambda", lambda)?;
    if lambda < 0.0 {
        return Err(Error::Domain {
            name: "lambda",
            value: lambda,
            expected: "lambda >= 0",
        });
    }
    Ok(lambda)
}

/// A validated `(n, p, λ)` triple with its survival probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OccupancyPoint {
    pub n: u64,
    pub p: f64,
    pub q: f64,
    pub lambda: f64,
}

impl OccupancyPoint {
    pub fn new(n: u64, p: f64, lambda: f64) -> Result<Self> {
        check_n(n)?;
        let p = BernoulliParam::new(p)?.get();
        let lambda = check_lambda(lambda)?;
        Ok(OccupancyPoint {
            n,
            p,
            q: survival(p, n),
            lambda,
        })
    }

    /// `log[q e^{λ(p-pq)} + (1-q) e^{-λpq}]`: the upper-direction log-MGF.
    fn upper_log_mgf(&self) -> f64 {
        log_mgf(self.q, self.lambda * self.p)
    }

    /// `log[q e^{λ(pq-p)} + (1-q) e^{λpq}]`: the lower-direction log-MGF.
    fn lower_log_mgf(&self) -> f64 {
        log_mgf(self.q, -self.lambda * self.p)
    }

    fn upper_rhs(&self) -> f64 {
        self.p * self.lambda * self.lambda / (4.0 * self.n as f64)
    }

    fn lower_rhs(&self, c0: f64) -> f64 {
        self.p * self.lambda * self.lambda / (c0 * self.n as f64)
    }
}

/// Tail bounds for one `(n, ε)` pair together with the Chernoff parameters
/// that produce them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailBound {
    pub n: u64,
    pub epsilon: f64,
    /// `e^{-nε²}`
    pub upper: f64,
    /// `e^{-C₀nε²/4}`
    pub lower: f64,
    /// `e^{-(e/2)nε²}`
    pub legacy_lower: f64,
    pub lambda_upper: f64,
    pub lambda_lower: f64,
}

/// Occupancy MGF bounds parametrized by the extremal constant `C₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OccupancyBounds {
    c0: f64,
}

impl OccupancyBounds {
    pub fn new(c0: f64) -> Result<Self> {
        let c0 = finite("c0", c0)?;
        if c0 <= 0.0 {
            return Err(Error::Domain {
                name: "c0",
                value: c0,
                expected: "c0 > 0",
            });
        }
        Ok(OccupancyBounds { c0 })
    }

    /// Uses `C₀` from the default golden-section search.
    pub fn from_extremal() -> Self {
        OccupancyBounds { c0: extremal::c0() }
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    /// `pλ²/4n - log[q e^{λ(p-pq)} + (1-q) e^{-λpq}]`.
    pub fn lamp_gap_a(&self, n: u64, p: f64, lambda: f64) -> Result<f64> {
        let pt = OccupancyPoint::new(n, p, lambda)?;
        Ok(pt.upper_rhs() - pt.upper_log_mgf())
    }

    /// `pλ²/(C₀n) - log[q e^{λ(pq-p)} + (1-q) e^{λpq}]`.
    pub fn lamp_gap_b(&self, n: u64, p: f64, lambda: f64) -> Result<f64> {
        let pt = OccupancyPoint::new(n, p, lambda)?;
        Ok(pt.lower_rhs(self.c0) - pt.lower_log_mgf())
    }

    /// The exponent `λ²/4n - λε` of the upper-tail Chernoff bound.
    pub fn upper_chernoff_exponent(n: u64, epsilon: f64, lambda: f64) -> f64 {
        lambda * lambda / (4.0 * n as f64) - lambda * epsilon
    }

    /// The exponent `λ²/(C₀n) - λε` of the lower-tail Chernoff bound.
    pub fn lower_chernoff_exponent(&self, n: u64, epsilon: f64, lambda: f64) -> f64 {
        lambda * lambda / (self.c0 * n as f64) - lambda * epsilon
    }

    /// Upper-tail bound `e^{-nε²}` with `λ = 2nε`. The lower-tail fields are
    /// filled in as well.
    pub fn upper_tail_bound(&self, n: u64, epsilon: f64) -> Result<TailBound> {
        self.tail_bound(n, epsilon)
    }

    /// Lower-tail bound `e^{-C₀nε²/4}` with `λ = C₀nε/2`, alongside the legacy
    /// `e^{-(e/2)nε²}`.
    pub fn lower_tail_bound(&self, n: u64, epsilon: f64) -> Result<TailBound> {
        self.tail_bound(n, epsilon)
    }

    fn tail_bound(&self, n: u64, epsilon: f64) -> Result<TailBound> {
        check_n(n)?;
        let epsilon = finite("epsilon", epsilon)?;
        if epsilon <= 0.0 {
            return Err(Error::Domain {
                name: "epsilon",
                value: epsilon,
                expected: "epsilon > 0",
            });
        }
        let nf = n as f64;
        let exponent = nf * epsilon * epsilon;
        let lambda_upper = 2.0 * nf * epsilon;
        let lambda_lower = self.c0 * nf * epsilon / 2.0;

        let chernoff = Self::upper_chernoff_exponent(n, epsilon, lambda_upper);
        if (chernoff + exponent).abs() > 1e-12 * exponent.max(1.0) {
            return Err(Error::Internal(format!(
                "upper Chernoff exponent {chernoff} at λ = 2nε differs from -nε² = {}",
                -exponent
            )));
        }
        let chernoff = self.lower_chernoff_exponent(n, epsilon, lambda_lower);
        let lower_exponent = self.c0 * exponent / 4.0;
        if (chernoff + lower_exponent).abs() > 1e-12 * lower_exponent.max(1.0) {
            return Err(Error::Internal(format!(
                "lower Chernoff exponent {chernoff} at λ = C₀nε/2 differs from -C₀nε²/4 = {}",
                -lower_exponent
            )));
        }

        Ok(TailBound {
            n,
            epsilon,
            upper: (-exponent).exp(),
            lower: (-lower_exponent).exp(),
            legacy_lower: (-LEGACY_EXPONENT * exponent).exp(),
            lambda_upper,
            lambda_lower,
        })
    }

    /// Scans both per-atom bounds over `n_values × p_grid × λ ∈ [0, λ_span·n]`.
    ///
    /// Returns the reports for (a) and (b); the `t` column holds `λ` and the
    /// `p` column holds the atom mass.
    pub fn scan_lamp(
        &self,
        n_values: &[u64],
        p_grid: &[f64],
        lambda_points: usize,
        lambda_span: f64,
        tolerance: f64,
    ) -> Result<(GapReport, GapReport)> {
        let mut upper = GapAccumulator::new(tolerance);
        let mut lower = GapAccumulator::new(tolerance);
        for &n in n_values {
            let lambdas = crate::numeric::linspace(0.0, lambda_span * n as f64, lambda_points);
            for &p in p_grid {
                for &lambda in &lambdas {
                    let pt = OccupancyPoint::new(n, p, lambda)?;
                    upper.push(GapEntry::new(p, lambda, pt.upper_log_mgf(), pt.upper_rhs()));
                    lower.push(GapEntry::new(
                        p,
                        lambda,
                        pt.lower_log_mgf(),
                        pt.lower_rhs(self.c0),
                    ));
                }
            }
        }
        Ok((upper.finish(), lower.finish()))
    }
}

/// `n ∈ {1, 2, 4, …, 1024}`.
pub fn default_lamp_sizes() -> Vec<u64> {
    (0..=10).map(|k| 1u64 << k).collect()
}

pub const DEFAULT_LAMBDA_POINTS: usize = 400;
pub const DEFAULT_LAMBDA_SPAN: f64 = 10.0;

/// `(1-2q) log(1/q) / log((1-q)/q)`, continuous at `q = 1/2`.
pub fn survival_factor(q: f64) -> Result<f64> {
    let q = BernoulliParam::interior(q)?.get();
    Ok(4.0 * ks_coeff(q) * -q.ln())
}

/// `log(1/(1-p)) / p`.
pub fn mass_factor(p: f64) -> Result<f64> {
    let p = BernoulliParam::interior(p)?.get();
    Ok(-(-p).ln_1p() / p)
}

/// `log(q/(1-q)) / ((2q-1) log(1/q))`, continuous at `q = 1/2` with value `2/ln 2`.
pub fn monotone_factor(q: f64) -> Result<f64> {
    let q = BernoulliParam::interior(q)?.get();
    Ok(1.0 / (4.0 * ks_coeff(q) * -q.ln()))
}

/// `log((1-q)/q) - (1-2q) log(1/q)`.
pub fn convexity_witness(q: f64) -> Result<f64> {
    let q = BernoulliParam::interior(q)?.get();
    Ok(((1.0 - q) / q).ln() + (1.0 - 2.0 * q) * q.ln())
}

/// The four auxiliary facts behind the per-atom bounds, each on its own grid
/// of `points` interior points:
///
/// 1. `survival_factor(q) <= 1` on `(0, 1)`;
/// 2. `mass_factor(p) >= 1` on `(0, 1)`;
/// 3. `monotone_factor` nondecreasing on `(1/2, 1)`, starting from `2/ln 2`,
///    so that `8/ln 2 > C₀`;
/// 4. `convexity_witness(q) >= 0` on `(0, 1/2)`.
pub fn check_internal_facts(points: usize, c0: f64, tolerance: f64) -> Result<Vec<CheckOutcome>> {
    let unit = open_grid(0.0, 1.0, points);
    let upper_half = open_grid(0.5, 1.0, points);
    let lower_half = open_grid(0.0, 0.5, points);

    let mut out = Vec::new();

    let mut acc = GapAccumulator::new(tolerance);
    for &q in &unit {
        acc.push(GapEntry::new(q, 0.0, survival_factor(q)?, 1.0));
    }
    out.push(acc.finish().outcome("survival_factor<=1"));

    let mut acc = GapAccumulator::new(tolerance);
    for &p in &unit {
        acc.push(GapEntry::new(p, 0.0, 1.0, mass_factor(p)?));
    }
    out.push(acc.finish().outcome("mass_factor>=1"));

    let values = upper_half
        .iter()
        .map(|&q| monotone_factor(q))
        .collect::<Result<Vec<_>>>()?;
    let mut acc = GapAccumulator::new(tolerance);
    for (w, q) in values.windows(2).zip(&upper_half[1..]) {
        // relative increment, so the check is scale-free as the factor grows
        acc.push(GapEntry::new(*q, 0.0, w[0], w[1]).relative());
    }
    out.push(acc.finish().outcome("monotone_factor_nondecreasing"));

    let limit = 4.0 * monotone_factor(0.5 + 1e-9)?;
    let limit_dev =
        DeviationReport::from_deviations(1e-6, [(0.5, 0.0, limit - extremal::eight_over_ln2())]);
    out.push(limit_dev.outcome("monotone_factor_limit_8/ln2"));
    out.push(CheckOutcome::fact(
        "8/ln2>c0",
        extremal::eight_over_ln2() - c0,
        limit > c0,
    ));

    let mut acc = GapAccumulator::new(tolerance);
    for &q in &lower_half {
        acc.push(GapEntry::new(q, 0.0, 0.0, convexity_witness(q)?));
    }
    out.push(acc.finish().outcome("convexity_witness>=0"));

    Ok(out)
}

/// `points` equally spaced points strictly inside `(lo, hi)`.
fn open_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let step = (hi - lo) / (points + 1) as f64;
    (1..=points).map(|i| lo + step * i as f64).collect()
}

impl GapEntry {
    fn relative(self) -> GapEntry {
        GapEntry {
            gap: self.gap / self.lhs_log.abs().max(1.0),
            ..self
        }
    }
}

//! Moment-generating-function inequalities for a centered Bernoulli variable.
//!
//! With `X = B - p`, `B ~ Bernoulli(p)`, the log-MGF is
//!
//! ```text
//! log f(t) = log[(1-p) e^{-tp} + p e^{t(1-p)}]
//! ```
//!
//! and this module compares it against three quadratic majorants:
//!
//! | bound | coefficient of `t²` | domain |
//! |-------|---------------------|--------|
//! | Hoeffding | `1/8` | all `p`, `t` |
//! | Kearns–Saul | `c(p) = (1-2p) / (4 log((1-p)/p))` | all `p`, `t` |
//! | refined | `p(1-p)/2` | `p >= 1/2`, `t >= 0` |
//!
//! It also carries the reparametrized form `h_s(p)` in which the Kearns–Saul
//! bound becomes a convexity statement in `p`, the normalized exponent
//! `g(t) = log f(t) / t²`, and a numerical sign scan of `g'`.
//!
//! Every check is carried out in the log domain with an absolute tolerance.

use std::io::{self, Write};

use serde::Serialize;

use crate::csv::fmt_f64;
use crate::error::{finite, Error, Result};
use crate::gap::{DeviationReport, GapAccumulator, GapEntry, GapReport};
use crate::numeric::log_add_exp;

/// Below this distance from 1/2 the Kearns–Saul coefficient uses its
/// second-order expansion.
pub const KS_SERIES_RADIUS: f64 = 1e-4;

/// Below this `|t|` the normalized exponent `g` uses its cumulant expansion.
pub const G_SERIES_RADIUS: f64 = 1e-5;

/// Central-difference step for `g'`.
pub const G_PRIME_STEP: f64 = 1e-4;

/// `|g'|` at or below this is classified as zero.
pub const G_PRIME_ZERO: f64 = 1e-7;

/// Sign-scan grids must stay this far from `t = 0`, where `g` is a limit.
pub const SCAN_EXCLUSION_RADIUS: f64 = 5e-3;

/// Label attached to every sign-scan output.
pub const SIGN_SCAN_NOTE: &str =
    "numerical evidence only: sign pattern of g' observed on a finite grid, not a proof";

/// A Bernoulli success probability, guaranteed to lie in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct BernoulliParam(f64);

impl BernoulliParam {
    pub fn new(p: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&p) {
            Ok(BernoulliParam(p))
        } else {
            Err(Error::Domain {
                name: "p",
                value: p,
                expected: "[0, 1]",
            })
        }
    }

    /// Accepts only the open interval `(0, 1)`.
    pub fn interior(p: f64) -> Result<Self> {
        if p > 0.0 && p < 1.0 {
            Ok(BernoulliParam(p))
        } else {
            Err(Error::Domain {
                name: "p",
                value: p,
                expected: "(0, 1)",
            })
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// `log[(1-p) e^{-tp} + p e^{t(1-p)}]`, the log-MGF of a centered Bernoulli(p).
///
/// Exactly 0 at `t = 0` and for the degenerate laws `p ∈ {0, 1}`.
pub fn centered_bernoulli_mgf_log(p: f64, t: f64) -> Result<f64> {
    let p = BernoulliParam::new(p)?.get();
    let t = finite("t", t)?;
    Ok(log_mgf(p, t))
}

pub(crate) fn log_mgf(p: f64, t: f64) -> f64 {
    if t == 0.0 || p == 0.0 || p == 1.0 {
        return 0.0;
    }
    if t.abs() <= 1.0 {
        // Factor out the leading exponential; the remainder 1 + p·expm1(t)
        // stays above e^{-1} here, so log1p loses nothing.
        if t < 0.0 {
            -t * p + (p * t.exp_m1()).ln_1p()
        } else {
            t * (1.0 - p) + ((1.0 - p) * (-t).exp_m1()).ln_1p()
        }
    } else {
        let miss = (-p).ln_1p() - t * p;
        let hit = p.ln() + t * (1.0 - p);
        log_add_exp(miss, hit)
    }
}

/// `(b-a)² t² / 8`, the log of Hoeffding's bound for an `[a, b]`-valued
/// centered variable.
pub fn hoeffding_log_bound(t: f64, a: f64, b: f64) -> Result<f64> {
    let t = finite("t", t)?;
    let a = finite("a", a)?;
    let b = finite("b", b)?;
    if a > b {
        return Err(Error::Domain {
            name: "a",
            value: a,
            expected: "a <= b",
        });
    }
    let width = b - a;
    Ok(width * width * t * t / 8.0)
}

/// The Kearns–Saul coefficient `c(p) = (1-2p) / (4 log((1-p)/p))`, extended
/// by continuity: `c(0) = c(1) = 0`, `c(1/2) = 1/8`.
pub fn ks_coefficient(p: f64) -> Result<f64> {
    let p = BernoulliParam::new(p)?.get();
    Ok(ks_coeff(p))
}

pub(crate) fn ks_coeff(p: f64) -> f64 {
    if p == 0.0 || p == 1.0 {
        return 0.0;
    }
    let d = p - 0.5;
    if d.abs() < KS_SERIES_RADIUS {
        0.125 - d * d / 6.0
    } else {
        (1.0 - 2.0 * p) / (4.0 * ((1.0 - p) / p).ln())
    }
}

/// `c(p) t² - log f(t)`; nonnegative by the Kearns–Saul inequality.
pub fn ks_gap(p: f64, t: f64) -> Result<f64> {
    let p = BernoulliParam::new(p)?.get();
    let t = finite("t", t)?;
    Ok(ks_coeff(p) * t * t - log_mgf(p, t))
}

/// `p(1-p) t²/2 - log f(t)` for `p >= 1/2`, `t >= 0`.
pub fn refined_gap(p: f64, t: f64) -> Result<f64> {
    let p = BernoulliParam::new(p)?.get();
    let t = finite("t", t)?;
    if p < 0.5 {
        return Err(Error::Domain {
            name: "p",
            value: p,
            expected: "[1/2, 1]",
        });
    }
    if t < 0.0 {
        return Err(Error::Domain {
            name: "t",
            value: t,
            expected: "t >= 0",
        });
    }
    Ok(p * (1.0 - p) * t * t / 2.0 - log_mgf(p, t))
}

/// `g(t) = log f(t) / t²`.
///
/// For `|t| <` [`G_SERIES_RADIUS`] returns `κ₂/2 + κ₃ t/6` with the cumulants
/// `κ₂ = p(1-p)`, `κ₃ = p(1-p)(1-2p)`.
pub fn g_exponent(p: f64, t: f64) -> Result<f64> {
    let p = BernoulliParam::interior(p)?.get();
    let t = finite("t", t)?;
    Ok(g_unchecked(p, t))
}

fn g_unchecked(p: f64, t: f64) -> f64 {
    if t.abs() < G_SERIES_RADIUS {
        let k2 = p * (1.0 - p);
        let k3 = k2 * (1.0 - 2.0 * p);
        k2 / 2.0 + k3 * t / 6.0
    } else {
        log_mgf(p, t) / (t * t)
    }
}

/// The critical point `t* = 2 log((1-p)/p)` at which `g(t*) = c(p)`.
pub fn t_star(p: f64) -> Result<f64> {
    let p = BernoulliParam::interior(p)?.get();
    Ok(2.0 * log_odds(p))
}

/// `log((1-p)/p)`.
fn log_odds(p: f64) -> f64 {
    ((1.0 - p) / p).ln()
}

/// Returns `(lhs, rhs)` of the reparametrized inequality
/// `log(1 - p + p r^{2s}) <= s (s + 2p(1-s)) log r`, `r = (1-p)/p`.
fn h_s_sides(p: f64, s: f64) -> (f64, f64) {
    let l = log_odds(p);
    let rhs = s * (s + 2.0 * p * (1.0 - s)) * l;
    let lhs = log_add_exp((-p).ln_1p(), p.ln() + 2.0 * s * l);
    (lhs, rhs)
}

/// `h_s(p) = s(s + 2p(1-s)) log r - log(1 - p + p r^{2s})` with `r = (1-p)/p`.
///
/// Substituting `t = 2s log r` into the Kearns–Saul inequality (after
/// multiplying through by `e^{tp}`) turns it into `h_s(p) >= 0`.
pub fn h_s_value(p: f64, s: f64) -> Result<f64> {
    let p = BernoulliParam::interior(p)?.get();
    let s = finite("s", s)?;
    let (lhs, rhs) = h_s_sides(p, s);
    Ok(rhs - lhs)
}

/// Closed form of `∂²h_s/∂p²`:
///
/// ```text
/// [((μ-1)p² - s + p(1 - μ + s + μs)) / (p(1-p)(1 + (μ-1)p))]²,  μ = ((1-p)/p)^{2s}
/// ```
///
/// Evaluated with `μ` factored out of numerator and denominator when `μ > 1`
/// so large `|s|` cannot overflow.
pub fn h_s_second_derivative(p: f64, s: f64) -> Result<f64> {
    let p = BernoulliParam::interior(p)?.get();
    let s = finite("s", s)?;
    let log_mu = 2.0 * s * log_odds(p);
    // numerator = μ·a + b
    let a = p * (p - 1.0 + s);
    let b = -p * p - s + p + p * s;
    let (num, den) = if log_mu > 0.0 {
        let inv_mu = (-log_mu).exp();
        (a + b * inv_mu, p * (1.0 - p) * (p + (1.0 - p) * inv_mu))
    } else {
        let mu = log_mu.exp();
        (a * mu + b, p * (1.0 - p) * (1.0 - p + mu * p))
    };
    if !(den > 0.0) || !den.is_finite() {
        return Err(Error::Degenerate { p, s, value: den });
    }
    let ratio = num / den;
    Ok(ratio * ratio)
}

/// `t²/2 - log cosh t`, nonnegative since `cosh t <= e^{t²/2}`.
pub fn cosh_gap(t: f64) -> Result<f64> {
    let t = finite("t", t)?;
    Ok(t * t / 2.0 - log_cosh(t))
}

fn log_cosh(t: f64) -> f64 {
    let a = t.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// Sign of a numerically estimated derivative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DerivativeSign {
    Positive,
    Zero,
    Negative,
}

impl DerivativeSign {
    pub fn classify(value: f64) -> Self {
        if value.abs() <= G_PRIME_ZERO {
            DerivativeSign::Zero
        } else if value > 0.0 {
            DerivativeSign::Positive
        } else {
            DerivativeSign::Negative
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            DerivativeSign::Positive => "+",
            DerivativeSign::Zero => "0",
            DerivativeSign::Negative => "-",
        }
    }
}

/// Numerical evidence on the sign pattern of `g'` around `t*`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignScanReport {
    pub p: f64,
    pub t_grid: Vec<f64>,
    pub derivative_signs: Vec<DerivativeSign>,
    pub derivative_values: Vec<f64>,
    pub t_star: f64,
    pub g_at_t_star: f64,
    pub g_prime_at_t_star: f64,
    /// `(t, g'(t))` wherever the observed sign contradicts
    /// `+` before `t*`, `0` at `t*`, `-` after `t*`.
    pub violations: Vec<(f64, f64)>,
}

impl SignScanReport {
    /// Writes `p,t,sign` rows, preceded by a comment line labelling the data
    /// as evidence.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "# {SIGN_SCAN_NOTE}")?;
        writeln!(out, "p,t,sign")?;
        for (t, sign) in self.t_grid.iter().zip(&self.derivative_signs) {
            writeln!(out, "{},{},{}", fmt_f64(self.p), fmt_f64(*t), sign.symbol())?;
        }
        Ok(())
    }
}

fn g_prime(p: f64, t: f64) -> f64 {
    (g_unchecked(p, t + G_PRIME_STEP) - g_unchecked(p, t - G_PRIME_STEP)) / (2.0 * G_PRIME_STEP)
}

/// Classifies the sign of a central-difference estimate of `g'` on `t_grid`
/// and records every point contradicting the conjectured pattern. `g'(t*)`
/// itself is also estimated and must classify as zero.
///
/// Points classified as zero away from `t*` are not counted as violations.
pub fn scan_g_prime_signs(p: f64, t_grid: &[f64]) -> Result<SignScanReport> {
    let p = BernoulliParam::interior(p)?.get();
    for (i, &t) in t_grid.iter().enumerate() {
        finite("t", t)?;
        if t.abs() < SCAN_EXCLUSION_RADIUS {
            return Err(Error::PuncturedGrid {
                t,
                radius: SCAN_EXCLUSION_RADIUS,
            });
        }
        if i > 0 && !(t_grid[i - 1] < t) {
            return Err(Error::UnsortedGrid { index: i });
        }
    }

    let t_star = 2.0 * log_odds(p);
    let mut derivative_signs = Vec::with_capacity(t_grid.len());
    let mut derivative_values = Vec::with_capacity(t_grid.len());
    let mut violations = Vec::new();
    for &t in t_grid {
        let d = g_prime(p, t);
        let sign = DerivativeSign::classify(d);
        let contradicts = match sign {
            DerivativeSign::Positive => t >= t_star,
            DerivativeSign::Negative => t <= t_star,
            DerivativeSign::Zero => false,
        };
        if contradicts {
            violations.push((t, d));
        }
        derivative_signs.push(sign);
        derivative_values.push(d);
    }

    let g_prime_at_t_star = g_prime(p, t_star);
    if DerivativeSign::classify(g_prime_at_t_star) != DerivativeSign::Zero {
        violations.push((t_star, g_prime_at_t_star));
    }

    Ok(SignScanReport {
        p,
        t_grid: t_grid.to_vec(),
        derivative_signs,
        derivative_values,
        t_star,
        g_at_t_star: g_unchecked(p, t_star),
        g_prime_at_t_star,
        violations,
    })
}

/// `[-10, 10]` in steps of 0.01 with the neighborhood of 0 removed.
pub fn default_sign_scan_grid() -> Vec<f64> {
    (-1000..=1000)
        .map(|i| i as f64 / 100.0)
        .filter(|t: &f64| t.abs() >= SCAN_EXCLUSION_RADIUS)
        .collect()
}

fn check_grid(name: &'static str, grid: &[f64]) -> Result<()> {
    for &x in grid {
        finite(name, x)?;
    }
    Ok(())
}

/// Scans `log f(t) <= c(p) t²` over the product grid.
pub fn scan_ks(p_grid: &[f64], t_grid: &[f64], tolerance: f64, retain: bool) -> Result<GapReport> {
    check_grid("t", t_grid)?;
    let mut acc = accumulator(tolerance, retain);
    for &p in p_grid {
        let p = BernoulliParam::new(p)?.get();
        let c = ks_coeff(p);
        for &t in t_grid {
            acc.push(GapEntry::new(p, t, log_mgf(p, t), c * t * t));
        }
    }
    Ok(acc.finish())
}

/// `|ks_gap(p, t*(p))|` for every interior `p` of the grid.
pub fn scan_ks_equality(p_grid: &[f64], tolerance: f64) -> Result<DeviationReport> {
    let mut devs = Vec::with_capacity(p_grid.len());
    for &p in p_grid {
        let p = BernoulliParam::interior(p)?.get();
        let t = 2.0 * log_odds(p);
        devs.push((p, t, ks_coeff(p) * t * t - log_mgf(p, t)));
    }
    Ok(DeviationReport::from_deviations(tolerance, devs))
}

/// Scans `log f(t) <= p(1-p) t²/2` over `p >= 1/2`, `t >= 0`.
pub fn scan_refined(
    p_grid: &[f64],
    t_grid: &[f64],
    tolerance: f64,
    retain: bool,
) -> Result<GapReport> {
    let mut acc = accumulator(tolerance, retain);
    for &p in p_grid {
        for &t in t_grid {
            let gap = refined_gap(p, t)?;
            let lhs = log_mgf(p, t);
            acc.push(GapEntry {
                p,
                t,
                lhs_log: lhs,
                rhs_log: gap + lhs,
                gap,
            });
        }
    }
    Ok(acc.finish())
}

/// Scans `h_s(p) >= 0`; the `t` column of each entry carries `s`.
pub fn scan_h_s(p_grid: &[f64], s_grid: &[f64], tolerance: f64, retain: bool) -> Result<GapReport> {
    check_grid("s", s_grid)?;
    let mut acc = accumulator(tolerance, retain);
    for &p in p_grid {
        let p = BernoulliParam::interior(p)?.get();
        for &s in s_grid {
            let (lhs, rhs) = h_s_sides(p, s);
            acc.push(GapEntry::new(p, s, lhs, rhs));
        }
    }
    Ok(acc.finish())
}

/// Scans `log cosh t <= t²/2`; the `p` column is fixed at 1/2.
pub fn scan_cosh(t_grid: &[f64], tolerance: f64) -> Result<GapReport> {
    check_grid("t", t_grid)?;
    let mut acc = GapAccumulator::new(tolerance);
    for &t in t_grid {
        acc.push(GapEntry::new(0.5, t, log_cosh(t), t * t / 2.0));
    }
    Ok(acc.finish())
}

/// Compares the closed-form `∂²h_s/∂p²` with a central second difference of
/// `h_s` in `p`. The deviation is `|fd - exact| / max(1, |exact|)`.
pub fn check_h_s_curvature(
    points: &[(f64, f64)],
    step: f64,
    tolerance: f64,
) -> Result<DeviationReport> {
    let mut devs = Vec::with_capacity(points.len());
    for &(p, s) in points {
        let exact = h_s_second_derivative(p, s)?;
        // five-point stencil, O(step⁴)
        let h = |dp: f64| h_s_value(p + dp, s);
        let fd = (-h(2.0 * step)? + 16.0 * h(step)? - 30.0 * h(0.0)? + 16.0 * h(-step)?
            - h(-2.0 * step)?)
            / (12.0 * step * step);
        devs.push((p, s, (fd - exact) / exact.abs().max(1.0)));
    }
    Ok(DeviationReport::from_deviations(tolerance, devs))
}

fn accumulator(tolerance: f64, retain: bool) -> GapAccumulator {
    if retain {
        GapAccumulator::retaining(tolerance)
    } else {
        GapAccumulator::new(tolerance)
    }
}

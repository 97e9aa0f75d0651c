//! Named verification suites: each runs a family of grid checks and returns
//! one [`CheckOutcome`] per check.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extremal;
use crate::gap::{CheckOutcome, DeviationReport, GapAccumulator, GapEntry};
use crate::inequality::{
    self, check_h_s_curvature, default_sign_scan_grid, h_s_second_derivative, h_s_value,
    ks_coefficient, scan_g_prime_signs,
};
use crate::lab::trial_rng;
use crate::numeric::{linspace, logit_grid};
use crate::occupancy::{self, OccupancyBounds};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const P_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Ks,
    Refine,
    Hs,
    Lamp,
    Internal,
    Gprime,
    All,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Ks,
        Suite::Refine,
        Suite::Hs,
        Suite::Lamp,
        Suite::Internal,
        Suite::Gprime,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Ks => "ks",
            Suite::Refine => "refine",
            Suite::Hs => "hs",
            Suite::Lamp => "lamp",
            Suite::Internal => "internal",
            Suite::Gprime => "gprime",
            Suite::All => "all",
        }
    }

    /// Default `(primary, secondary)` axis sizes.
    pub fn default_grid(self) -> GridSpec {
        let (primary, secondary) = match self {
            Suite::Ks => (2001, 1201),
            Suite::Refine => (1001, 1201),
            Suite::Hs => (401, 401),
            Suite::Lamp => (2001, occupancy::DEFAULT_LAMBDA_POINTS),
            Suite::Internal => (10_000, 0),
            Suite::Gprime => (99, 0),
            Suite::All => (0, 0),
        };
        GridSpec { primary, secondary }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .chain([Suite::All])
            .find(|suite| suite.name() == s)
            .ok_or(Error::Domain {
                name: "suite",
                value: f64::NAN,
                expected: "one of ks, refine, hs, lamp, internal, gprime, all",
            })
    }
}

/// Grid sizes, written `PRIMARYxSECONDARY` (e.g. `2001x1201`).
///
/// The primary axis is `p` (or `q`), the secondary axis is `t`, `s` or `λ`.
/// `internal` uses only the primary size; `gprime` ignores the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub primary: usize,
    pub secondary: usize,
}

impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Domain {
            name: "grid",
            value: f64::NAN,
            expected: "PRIMARYxSECONDARY with both sizes >= 2",
        };
        let (a, b) = s.split_once('x').ok_or_else(bad)?;
        let primary: usize = a.trim().parse().map_err(|_| bad())?;
        let secondary: usize = b.trim().parse().map_err(|_| bad())?;
        if primary < 2 || secondary < 2 {
            return Err(bad());
        }
        Ok(GridSpec { primary, secondary })
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.primary, self.secondary)
    }
}

/// A check outcome tagged with the suite that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteCheck {
    pub suite: Suite,
    #[serde(flatten)]
    pub outcome: CheckOutcome,
}

/// Runs `suite` (every suite for [`Suite::All`]). `grid` overrides the
/// per-suite defaults; `tolerance` applies to the inequality checks.
pub fn run_suite(suite: Suite, grid: Option<GridSpec>, tolerance: f64) -> Result<Vec<SuiteCheck>> {
    if !(tolerance >= 0.0) {
        return Err(Error::Domain {
            name: "tolerance",
            value: tolerance,
            expected: "tolerance >= 0",
        });
    }
    if suite == Suite::All {
        let mut out = Vec::new();
        for s in Suite::ALL {
            out.extend(run_suite(s, grid, tolerance)?);
        }
        return Ok(out);
    }
    let g = grid.unwrap_or_else(|| suite.default_grid());
    let outcomes = match suite {
        Suite::Ks => ks_suite(g, tolerance)?,
        Suite::Refine => refine_suite(g, tolerance)?,
        Suite::Hs => hs_suite(g, tolerance)?,
        Suite::Lamp => lamp_suite(g, tolerance)?,
        Suite::Internal => occupancy::check_internal_facts(g.primary, extremal::c0(), tolerance)?,
        Suite::Gprime => gprime_suite()?,
        Suite::All => unreachable!(),
    };
    Ok(outcomes
        .into_iter()
        .map(|outcome| SuiteCheck { suite, outcome })
        .collect())
}

fn ks_suite(g: GridSpec, tol: f64) -> Result<Vec<CheckOutcome>> {
    let p_grid = logit_grid(P_MARGIN, g.primary);
    let t_grid = linspace(-60.0, 60.0, g.secondary);
    let mut out = vec![
        inequality::scan_ks(&p_grid, &t_grid, tol, false)?.outcome("ks_gap>=0"),
        inequality::scan_ks_equality(&p_grid, tol)?.outcome("ks_gap(t*)=0"),
    ];

    let mut with_ends = vec![0.0];
    with_ends.extend(&p_grid);
    with_ends.push(1.0);
    let sym = with_ends
        .iter()
        .map(|&p| Ok((p, 0.0, ks_coefficient(p)? - ks_coefficient(1.0 - p)?)))
        .collect::<Result<Vec<_>>>()?;
    out.push(DeviationReport::from_deviations(1e-12, sym).outcome("ks_coefficient_symmetric"));

    // c(p) <= 1/8 everywhere, strictly below 1/8 - 1e-12 once |p - 1/2| > 1e-3
    let mut hoeffding = GapAccumulator::new(0.0);
    let mut strict = GapAccumulator::new(0.0);
    for &p in &with_ends {
        let c = ks_coefficient(p)?;
        hoeffding.push(GapEntry::new(p, 0.0, c, 0.125));
        if (p - 0.5).abs() > 1e-3 {
            strict.push(GapEntry::new(p, 0.0, c, 0.125 - 1e-12));
        }
    }
    out.push(hoeffding.finish().outcome("ks_coefficient<=1/8"));
    out.push(strict.finish().outcome("ks_coefficient<1/8_off_center"));

    out.push(inequality::scan_cosh(&t_grid, tol)?.outcome("log_cosh<=t^2/2"));
    Ok(out)
}

fn refine_suite(g: GridSpec, tol: f64) -> Result<Vec<CheckOutcome>> {
    let p_grid = linspace(0.5, 1.0, g.primary);
    let t_grid = linspace(0.0, 60.0, g.secondary);
    let mut out =
        vec![inequality::scan_refined(&p_grid, &t_grid, tol, false)?.outcome("refined_gap>=0")];
    let mut major = GapAccumulator::new(tol);
    for &p in &p_grid {
        major.push(GapEntry::new(
            p,
            0.0,
            p * (1.0 - p) / 2.0,
            ks_coefficient(p)?,
        ));
    }
    out.push(major.finish().outcome("p(1-p)/2<=ks_coefficient"));
    Ok(out)
}

/// Sample size and ranges for the finite-difference curvature check.
pub const CURVATURE_POINTS: usize = 1000;
pub const CURVATURE_SEED: u64 = 0x5eed;
pub const CURVATURE_STEP: f64 = 1e-3;
pub const CURVATURE_TOLERANCE: f64 = 1e-4;
pub const CURVATURE_P_RANGE: (f64, f64) = (0.02, 0.98);
pub const CURVATURE_S_RANGE: (f64, f64) = (-5.0, 5.0);

/// Seeded `(p, s)` points for the curvature check.
pub fn curvature_points() -> Vec<(f64, f64)> {
    let mut rng = trial_rng(CURVATURE_SEED, 0);
    (0..CURVATURE_POINTS)
        .map(|_| {
            let p = rng.random_range(CURVATURE_P_RANGE.0..CURVATURE_P_RANGE.1);
            let s = rng.random_range(CURVATURE_S_RANGE.0..CURVATURE_S_RANGE.1);
            (p, s)
        })
        .collect()
}

fn hs_suite(g: GridSpec, tol: f64) -> Result<Vec<CheckOutcome>> {
    let p_grid = logit_grid(P_MARGIN, g.primary);
    let s_grid = linspace(-10.0, 10.0, g.secondary);
    let mut out = vec![inequality::scan_h_s(&p_grid, &s_grid, tol, false)?.outcome("h_s>=0")];

    let at_half = s_grid
        .iter()
        .map(|&s| Ok((0.5, s, h_s_value(0.5, s)?)))
        .collect::<Result<Vec<_>>>()?;
    out.push(DeviationReport::from_deviations(1e-12, at_half).outcome("h_s(1/2)=0"));

    let mut ends = Vec::with_capacity(2 * p_grid.len());
    for &p in &p_grid {
        ends.push((p, 0.0, h_s_value(p, 0.0)?));
        ends.push((p, 1.0, h_s_value(p, 1.0)?));
    }
    out.push(DeviationReport::from_deviations(1e-10, ends).outcome("h_s(s=0)=h_s(s=1)=0"));

    let points = curvature_points();
    let mut convex = GapAccumulator::new(0.0);
    for &(p, s) in &points {
        convex.push(GapEntry::new(p, s, 0.0, h_s_second_derivative(p, s)?));
    }
    for &p in &p_grid {
        for &s in &s_grid {
            convex.push(GapEntry::new(p, s, 0.0, h_s_second_derivative(p, s)?));
        }
    }
    out.push(convex.finish().outcome("h_s''>=0"));
    out.push(
        check_h_s_curvature(&points, CURVATURE_STEP, CURVATURE_TOLERANCE)?
            .outcome("h_s''_matches_finite_differences"),
    );
    Ok(out)
}

fn lamp_suite(g: GridSpec, tol: f64) -> Result<Vec<CheckOutcome>> {
    let bounds = OccupancyBounds::from_extremal();
    let p_grid = logit_grid(P_MARGIN, g.primary);
    let (a, b) = bounds.scan_lamp(
        &occupancy::default_lamp_sizes(),
        &p_grid,
        g.secondary,
        occupancy::DEFAULT_LAMBDA_SPAN,
        tol,
    )?;
    Ok(vec![a.outcome("lamp_gap_a>=0"), b.outcome("lamp_gap_b>=0")])
}

/// `p = 0.01, 0.02, …, 0.99`.
pub fn gprime_p_values() -> Vec<f64> {
    (1..=99).map(|i| i as f64 / 100.0).collect()
}

fn gprime_suite() -> Result<Vec<CheckOutcome>> {
    let t_grid = default_sign_scan_grid();
    let mut points = 0;
    let mut violations = 0;
    let mut first = None;
    for p in gprime_p_values() {
        let report = scan_g_prime_signs(p, &t_grid)?;
        points += report.t_grid.len() + 1;
        violations += report.violations.len();
        if first.is_none() {
            first = report.violations.first().map(|&(t, _)| (p, t));
        }
    }
    Ok(vec![CheckOutcome {
        name: "g'_sign_pattern (evidence only, not a proof)".into(),
        points,
        worst: violations as f64,
        tolerance: 0.0,
        location: first,
        pass: violations == 0,
    }])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_suites_and_grids() {
        assert_eq!("ks".parse::<Suite>().unwrap(), Suite::Ks);
        assert_eq!("all".parse::<Suite>().unwrap(), Suite::All);
        assert!("nope".parse::<Suite>().is_err());
        assert_eq!(
            "11x7".parse::<GridSpec>().unwrap(),
            GridSpec {
                primary: 11,
                secondary: 7
            }
        );
        assert!("11".parse::<GridSpec>().is_err());
        assert!("1x7".parse::<GridSpec>().is_err());
        assert_eq!(
            GridSpec {
                primary: 3,
                secondary: 4
            }
            .to_string(),
            "3x4"
        );
    }

    #[test]
    fn small_grids_pass_every_suite() {
        let checks = run_suite(
            Suite::All,
            Some(GridSpec {
                primary: 41,
                secondary: 31,
            }),
            1e-9,
        )
        .unwrap();
        assert!(checks.len() > 10);
        for c in &checks {
            assert!(c.outcome.pass, "{c:?}");
        }
    }

    #[test]
    fn curvature_points_are_seeded() {
        assert_eq!(curvature_points(), curvature_points());
        assert_eq!(curvature_points().len(), CURVATURE_POINTS);
    }
}

//! The extremal constant `C₀ = inf_{0<x<1/2} 2 / (x(1-x) log(1/x))` and its
//! optimizer `x₀`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::golden_section_maximize;

/// Search bracket for `x₀`.
pub const SEARCH_LO: f64 = 1e-6;
pub const SEARCH_HI: f64 = 0.5 - 1e-6;
pub const DEFAULT_TOLERANCE: f64 = 1e-12;
pub const MAX_ITERATIONS: usize = 500;

/// Exponent constant of the legacy lower-tail bound, `e/2`.
pub const LEGACY_EXPONENT: f64 = std::f64::consts::E / 2.0;

/// `8 / ln 2`, the value the monotone factor in the lower-tail argument
/// starts from at `q = 1/2`.
pub fn eight_over_ln2() -> f64 {
    8.0 / std::f64::consts::LN_2
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtremalResult {
    pub x0: f64,
    pub f_at_x0: f64,
    /// `2 / f_at_x0`
    pub c0: f64,
    pub iterations: usize,
    pub tolerance: f64,
}

/// `x(1-x) log(1/x)` on `(0, 1)`.
pub fn f_objective(x: f64) -> Result<f64> {
    if x > 0.0 && x < 1.0 {
        Ok(objective(x))
    } else {
        Err(Error::Domain {
            name: "x",
            value: x,
            expected: "(0, 1)",
        })
    }
}

fn objective(x: f64) -> f64 {
    -x * (1.0 - x) * x.ln()
}

/// Locates the maximizer of [`f_objective`] on `(0, 1/2)` by golden-section
/// search; the bracket is shrunk until narrower than `tolerance`.
pub fn find_x0(tolerance: f64) -> Result<ExtremalResult> {
    if !(tolerance > 0.0) {
        return Err(Error::Domain {
            name: "tolerance",
            value: tolerance,
            expected: "tolerance > 0",
        });
    }
    let search =
        golden_section_maximize(objective, SEARCH_LO, SEARCH_HI, tolerance, MAX_ITERATIONS)
            .map_err(|s| Error::NonConvergence {
                iterations: s.iterations,
                width: s.width,
            })?;
    Ok(ExtremalResult {
        x0: search.argmax,
        f_at_x0: search.max,
        c0: 2.0 / search.max,
        iterations: search.iterations,
        tolerance,
    })
}

/// `C₀ = 2 / f(x₀)`.
pub fn compute_c0(tolerance: f64) -> Result<f64> {
    find_x0(tolerance).map(|r| r.c0)
}

/// `C₀` at the default tolerance.
pub fn c0() -> f64 {
    compute_c0(DEFAULT_TOLERANCE).expect("default search parameters converge")
}

//! # missmass
//!
//! Concentration of the missing mass: the total probability `U_n` of the
//! atoms of a discrete law that do not appear in `n` i.i.d. draws.
//!
//! The crate evaluates and checks, in the log domain and on dense grids,
//! the chain of inequalities that leads to
//!
//! ```text
//! P(U_n > E U_n + ε) <= exp(-n ε²)
//! P(U_n < E U_n - ε) <= exp(-C₀ n ε² / 4),   C₀ ≈ 7.6821
//! ```
//!
//! | module | contents |
//! |--------|----------|
//! | [`inequality`] | centered-Bernoulli log-MGF, Hoeffding / Kearns–Saul / refined bounds, `h_s`, `g` and its sign scan |
//! | [`extremal`] | `C₀` and its optimizer `x₀` by golden-section search |
//! | [`occupancy`] | per-atom occupancy MGF bounds and the Chernoff tail bounds |
//! | [`distribution`] | sampling laws and `E U_n` |
//! | [`lab`] | Monte Carlo for `U_n` and its independent analogue `U_n'` |
//! | [`oracle`] | exact laws of `U_n`, `U_n'` on tiny instances |
//! | [`verify`] | named grid-check suites |
//!
//! ```
//! let c0 = missmass::extremal::compute_c0(1e-12).unwrap();
//! assert!((c0 - 7.6821).abs() < 5e-4);
//!
//! let gap = missmass::inequality::ks_gap(0.25, 2.0 * 3f64.ln()).unwrap();
//! assert!(gap.abs() < 1e-12);
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod csv;
pub mod distribution;
pub mod error;
pub mod extremal;
pub mod gap;
pub mod inequality;
pub mod lab;
pub mod numeric;
pub mod occupancy;
pub mod oracle;
pub mod verify;

pub use distribution::{
    expected_missing_mass, make_distribution, DiscreteDistribution, DistributionSpec,
};
pub use error::{Error, Result};
pub use extremal::{compute_c0, find_x0, ExtremalResult};
pub use gap::{CheckOutcome, GapReport};
pub use occupancy::{OccupancyBounds, TailBound};
pub use oracle::{
    exact_independent_distribution, exact_missing_mass_distribution, ExactDistribution,
};

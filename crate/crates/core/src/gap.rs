//! Grid-scan bookkeeping: log-domain gaps between the two sides of an
//! inequality, their minimum, and a uniform pass/fail outcome record.

use std::io::{self, Write};

use serde::Serialize;

use crate::csv::fmt_f64;

/// One evaluated grid point. `gap = rhs_log - lhs_log`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapEntry {
    pub p: f64,
    pub t: f64,
    pub lhs_log: f64,
    pub rhs_log: f64,
    pub gap: f64,
}

impl GapEntry {
    pub fn new(p: f64, t: f64, lhs_log: f64, rhs_log: f64) -> Self {
        GapEntry {
            p,
            t,
            lhs_log,
            rhs_log,
            gap: rhs_log - lhs_log,
        }
    }
}

/// Result of scanning an inequality `lhs <= rhs` over a grid.
///
/// `entries` holds every evaluated point when the scan was asked to retain
/// them and is empty otherwise; `points` always counts every evaluation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapReport {
    pub entries: Vec<GapEntry>,
    pub points: usize,
    pub min_gap: f64,
    pub argmin: Option<(f64, f64)>,
    pub tolerance: f64,
    pub pass: bool,
}

impl GapReport {
    pub fn outcome(&self, name: impl Into<String>) -> CheckOutcome {
        CheckOutcome {
            name: name.into(),
            points: self.points,
            worst: self.min_gap,
            tolerance: self.tolerance,
            location: self.argmin,
            pass: self.pass,
        }
    }

    /// Writes `p,t,lhs_log,rhs_log,gap` rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "p,t,lhs_log,rhs_log,gap")?;
        for e in &self.entries {
            writeln!(
                out,
                "{},{},{},{},{}",
                fmt_f64(e.p),
                fmt_f64(e.t),
                fmt_f64(e.lhs_log),
                fmt_f64(e.rhs_log),
                fmt_f64(e.gap)
            )?;
        }
        Ok(())
    }
}

/// Streaming minimum-gap tracker. Accumulators over disjoint parts of a grid
/// can be merged in any order.
#[derive(Debug, Clone)]
pub struct GapAccumulator {
    tolerance: f64,
    points: usize,
    min_gap: f64,
    argmin: Option<(f64, f64)>,
    saw_nan: bool,
    entries: Option<Vec<GapEntry>>,
}

impl GapAccumulator {
    pub fn new(tolerance: f64) -> Self {
        GapAccumulator {
            tolerance,
            points: 0,
            min_gap: f64::INFINITY,
            argmin: None,
            saw_nan: false,
            entries: None,
        }
    }

    /// Like [`GapAccumulator::new`] but keeps every entry for CSV export.
    pub fn retaining(tolerance: f64) -> Self {
        GapAccumulator {
            entries: Some(Vec::new()),
            ..GapAccumulator::new(tolerance)
        }
    }

    pub fn push(&mut self, entry: GapEntry) {
        self.points += 1;
        if entry.gap.is_nan() {
            self.saw_nan = true;
            self.argmin.get_or_insert((entry.p, entry.t));
        } else if entry.gap < self.min_gap {
            self.min_gap = entry.gap;
            self.argmin = Some((entry.p, entry.t));
        }
        if let Some(entries) = self.entries.as_mut() {
            entries.push(entry);
        }
    }

    pub fn merge(&mut self, other: GapAccumulator) {
        self.points += other.points;
        self.saw_nan |= other.saw_nan;
        if other.min_gap < self.min_gap {
            self.min_gap = other.min_gap;
            self.argmin = other.argmin;
        }
        if let (Some(mine), Some(theirs)) = (self.entries.as_mut(), other.entries) {
            mine.extend(theirs);
        }
    }

    pub fn finish(self) -> GapReport {
        let min_gap = if self.saw_nan { f64::NAN } else { self.min_gap };
        GapReport {
            entries: self.entries.unwrap_or_default(),
            points: self.points,
            min_gap,
            argmin: self.argmin,
            tolerance: self.tolerance,
            pass: !self.saw_nan && self.min_gap >= -self.tolerance,
        }
    }
}

/// Largest deviation of a quantity that should vanish (or match a reference).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeviationReport {
    pub points: usize,
    pub max_deviation: f64,
    pub argmax: Option<(f64, f64)>,
    pub tolerance: f64,
    pub pass: bool,
}

impl DeviationReport {
    /// Builds the report from `(p, t, deviation)` triples; deviations are
    /// compared by absolute value and NaN always fails.
    pub fn from_deviations(
        tolerance: f64,
        deviations: impl IntoIterator<Item = (f64, f64, f64)>,
    ) -> Self {
        let mut points = 0;
        let mut max_deviation: f64 = 0.0;
        let mut argmax = None;
        for (p, t, d) in deviations {
            points += 1;
            let d = d.abs();
            // NaN is sticky: once seen it stays the reported worst
            if !max_deviation.is_nan() && (d.is_nan() || d > max_deviation || argmax.is_none()) {
                max_deviation = d;
                argmax = Some((p, t));
            }
        }
        DeviationReport {
            points,
            max_deviation,
            argmax,
            tolerance,
            pass: max_deviation <= tolerance,
        }
    }

    pub fn outcome(&self, name: impl Into<String>) -> CheckOutcome {
        CheckOutcome {
            name: name.into(),
            points: self.points,
            worst: self.max_deviation,
            tolerance: self.tolerance,
            location: self.argmax,
            pass: self.pass,
        }
    }
}

/// A named check with its worst observed statistic.
///
/// For gap checks `worst` is the minimum gap and the check passes when it is
/// at least `-tolerance`; for deviation checks it is the maximum deviation and
/// passes when at most `tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub points: usize,
    pub worst: f64,
    pub tolerance: f64,
    pub location: Option<(f64, f64)>,
    pub pass: bool,
}

impl CheckOutcome {
    /// A check that is a single boolean fact about one value.
    pub fn fact(name: impl Into<String>, value: f64, pass: bool) -> Self {
        CheckOutcome {
            name: name.into(),
            points: 1,
            worst: value,
            tolerance: 0.0,
            location: None,
            pass,
        }
    }
}

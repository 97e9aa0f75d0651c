//! Small numerical helpers shared by the scanning and enumeration code.

/// `log(e^a + e^b)` without overflow. Either argument may be `-inf`.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// `log Σ exp(x_i)` over a slice, factoring out the largest term.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let mut acc = CompensatedSum::default();
    for &x in xs {
        acc.add((x - hi).exp());
    }
    hi + acc.value().ln()
}

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: CompensatedSum) {
        self.add(other.sum);
        self.add(other.compensation);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::default();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// `count` evenly spaced points from `start` to `end` inclusive.
pub fn linspace(start: f64, end: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (end - start) / (count - 1) as f64;
            (0..count)
                .map(|i| {
                    if i == count - 1 {
                        end
                    } else {
                        start + step * i as f64
                    }
                })
                .collect()
        }
    }
}

/// Probabilities on `[margin, 1 - margin]` spaced evenly in logit coordinates.
///
/// The lower half is computed directly and mirrored, so `grid[count - 1 - i] == 1 - grid[i]`. With an odd `count` the middle point is exactly 1/2.
pub fn logit_grid(margin: f64, count: usize) -> Vec<f64> {
    assert!(margin > 0.0 && margin < 0.5, "margin must lie in (0, 1/2)");
    if count == 0 {
        return Vec::new();
    }
    if count == 1 {
        return vec![0.5];
    }
    let z_max = ((1.0 - margin) / margin).ln();
    let z = linspace(-z_max, z_max, count);
    let mut grid = vec![0.0; count];
    for i in 0..count.div_ceil(2) {
        let lower = 1.0 / (1.0 + (-z[i]).exp());
        grid[i] = lower;
        grid[count - 1 - i] = 1.0 - lower;
    }
    if count % 2 == 1 {
        grid[count / 2] = 0.5;
    }
    grid
}

/// Outcome of a golden-section search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoldenSection {
    /// Best probe seen during the search.
    pub argmax: f64,
    pub max: f64,
    pub iterations: usize,
    /// Final bracket width.
    pub width: f64,
}

/// Maximizes a unimodal `f` on `[lo, hi]` by golden-section search.
///
/// Returns `Err` carrying the best probe when the bracket does not shrink below `tolerance` within
/// `max_iterations`. The reported point is the best of every probe evaluated.
pub fn golden_section_maximize(
    f: impl Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    tolerance: f64,
    max_iterations: usize,
) -> std::result::Result<GoldenSection, GoldenSection> {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;

    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let (mut best_x, mut best_f) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };

    let mut iterations = 0;
    while hi - lo > tolerance {
        if iterations == max_iterations {
            return Err(GoldenSection {
                argmax: best_x,
                max: best_f,
                iterations,
                width: hi - lo,
            });
        }
        iterations += 1;
        let probe = if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
            (x1, f1)
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
            (x2, f2)
        };
        if probe.1 > best_f {
            (best_x, best_f) = probe;
        }
    }

    Ok(GoldenSection {
        argmax: best_x,
        max: best_f,
        iterations,
        width: hi - lo,
    })
}

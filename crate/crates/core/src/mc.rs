//! Monte Carlo estimators: empirical TCE, empirical allocations and the
//! Kolmogorov–Smirnov distance to a stable law.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::quad::neumaier_sum;
use crate::stable::{cdf, pdf, StableParams};

pub const MIN_EXCEEDANCES: usize = 100;

/// Row-major matrix of simulated line losses.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
    seed: Option<u64>,
}

impl SampleMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>, seed: Option<u64>) -> Result<Self> {
        let cols = match rows.first() {
            Some(r) if !r.is_empty() => r.len(),
            _ => return invalid("sample matrix needs at least one non-empty row"),
        };
        let n = rows.len();
        let mut values = Vec::with_capacity(n * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, got: r.len() });
            }
            values.extend(r);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return invalid("sample matrix values must be finite");
        }
        Ok(Self { rows: n, cols, values, seed })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn seed(&self) -> Option<u64> {
        self.seed
    }
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.rows).map(|i| neumaier_sum(self.row(i).iter().copied())).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

impl Estimate {
    /// Whether `x` lies in the two-sided normal interval at critical value z.
    pub fn covers(&self, x: f64, z: f64) -> bool {
        (x - self.value).abs() <= z * self.std_error
    }
}

/// Two-sided 99% normal critical value.
pub const Z99: f64 = 2.575_829_303_548_901;

fn exceedance_count(n: usize, q: f64) -> Result<usize> {
    if !(q > 0.0 && q < 1.0) {
        return invalid(format!("prudence level must lie in (0, 1), got {q}"));
    }
    let m = n - ((q * n as f64).ceil() as usize).min(n);
    if m < MIN_EXCEEDANCES {
        return Err(Error::InsufficientExceedances { found: m, required: MIN_EXCEEDANCES });
    }
    Ok(m)
}

/// Indices of the `m` largest values.
fn top_indices(values: &[f64], m: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    let k = values.len() - m;
    idx.select_nth_unstable_by(k, |&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    idx.split_off(k)
}

fn mean_and_se(xs: impl Iterator<Item = f64> + Clone, m: usize) -> Estimate {
    let mean = neumaier_sum(xs.clone()) / m as f64;
    let ss = neumaier_sum(xs.map(|x| (x - mean) * (x - mean)));
    let sd = if m > 1 { (ss / (m - 1) as f64).sqrt() } else { 0.0 };
    Estimate { value: mean, std_error: sd / (m as f64).sqrt() }
}

/// Mean of the n - ⌈qn⌉ largest samples.
pub fn empirical_tce(samples: &[f64], q: f64) -> Result<Estimate> {
    let m = exceedance_count(samples.len(), q)?;
    let top = top_indices(samples, m);
    Ok(mean_and_se(top.iter().map(|&i| samples[i]), m))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalAllocation {
    pub tce: Estimate,
    pub lines: Vec<Estimate>,
}

/// Per-column means over the rows whose sum is among the n - ⌈qn⌉ largest.
pub fn empirical_allocation(m: &SampleMatrix, q: f64) -> Result<EmpiricalAllocation> {
    let sums = m.row_sums();
    let k = exceedance_count(m.rows, q)?;
    let top = top_indices(&sums, k);
    let tce = mean_and_se(top.iter().map(|&i| sums[i]), k);
    let lines = (0..m.cols).map(|c| mean_and_se(top.iter().map(|&i| m.row(i)[c]), k)).collect();
    Ok(EmpiricalAllocation { tce, lines })
}

/// sup_x |F_n(x) - F(x)|.
///
/// F is evaluated exactly at roughly 2000 order statistics and by cubic
/// Hermite interpolation (values and densities at the nodes) in between.
pub fn ks_distance(samples: &[f64], p: &StableParams) -> f64 {
    if samples.is_empty() {
        return f64::NAN;
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    let stride = (n / 2000).max(1);
    let mut nodes: Vec<usize> = (0..n).step_by(stride).collect();
    if *nodes.last().unwrap() != n - 1 {
        nodes.push(n - 1);
    }
    let exact: Vec<(f64, f64)> = nodes.iter().map(|&i| (cdf(p, xs[i]), pdf(p, xs[i]))).collect();
    let nf = n as f64;
    let mut d = 0.0f64;
    let mut check = |i: usize, f: f64| {
        d = d.max((f - i as f64 / nf).abs()).max(((i + 1) as f64 / nf - f).abs());
    };
    for w in 0..nodes.len() {
        let (i0, (f0, g0)) = (nodes[w], exact[w]);
        check(i0, f0);
        let Some(&i1) = nodes.get(w + 1) else { break };
        let (f1, g1) = exact[w + 1];
        let (x0, x1) = (xs[i0], xs[i1]);
        let h = x1 - x0;
        for i in i0 + 1..i1 {
            let f = if h > 0.0 {
                let t = (xs[i] - x0) / h;
                let (t2, t3) = (t * t, t * t * t);
                let v = (2.0 * t3 - 3.0 * t2 + 1.0) * f0
                    + (t3 - 2.0 * t2 + t) * h * g0
                    + (-2.0 * t3 + 3.0 * t2) * f1
                    + (t3 - t2) * h * g1;
                v.clamp(f0, f1)
            } else {
                f0
            };
            check(i, f);
        }
    }
    d
}

/// [`ks_distance`] with every sample evaluated exactly.
pub fn ks_distance_exact(samples: &[f64], p: &StableParams) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let nf = xs.len() as f64;
    xs.iter().enumerate().fold(0.0f64, |d, (i, &x)| {
        let f = cdf(p, x);
        d.max((f - i as f64 / nf).abs()).max(((i + 1) as f64 / nf - f).abs())
    })
}

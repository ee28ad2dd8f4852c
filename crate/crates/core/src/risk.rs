//! Value-at-risk, tail conditional expectation and covariation-based capital
//! allocation.
//!
//! For X ~ S_α(σ, β, μ) with α > 1 and threshold s ≥ μ,
//!
//! ```text
//! E[X 1{X > s}] = μ P(X > s) + unit · H^{1,1}_{2,2}[y | (1/α, 1/α), (ρ, ρ); (0, 1), (ρ, ρ)]
//! ```
//!
//! with `unit = σ r^{1/α}` and `y = (s - μ)/unit`.

use std::f64::consts::PI;

use serde::Serialize;
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use crate::error::{invalid, Error, Result};
use crate::foxh::FoxH;
use crate::quad::{integrate_panels, neumaier_sum};
use crate::special::{ln_gamma_real, sin_pi_real};
use crate::stable::{pdf, quantile, StableParams};
use crate::vector::SpectralMeasure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TceMethod {
    Gaussian,
    #[serde(rename = "h")]
    HFunction,
    Series,
    Quadrature,
}

impl TceMethod {
    pub fn name(&self) -> &'static str {
        match self {
            TceMethod::Gaussian => "gaussian",
            TceMethod::HFunction => "h",
            TceMethod::Series => "series",
            TceMethod::Quadrature => "quadrature",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TceEval {
    pub q: f64,
    pub var: f64,
    pub value: f64,
    pub method: TceMethod,
    /// Error estimate of `value`.
    pub error: f64,
    pub converged: bool,
}

pub fn var(p: &StableParams, q: f64) -> Result<f64> {
    quantile(p, q)
}

fn check(p: &StableParams, q: f64) -> Result<()> {
    if p.alpha() <= 1.0 {
        return invalid(format!("TCE requires a finite mean (alpha > 1), got alpha = {}", p.alpha()));
    }
    if !(q > 0.0 && q < 1.0) {
        return invalid(format!("prudence level must lie in (0, 1), got {q}"));
    }
    Ok(())
}

fn gaussian_tce(p: &StableParams, q: f64) -> Result<TceEval> {
    let sd = std::f64::consts::SQRT_2 * p.sigma();
    let n = Normal::new(0.0, 1.0).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let z = n.inverse_cdf(q);
    Ok(TceEval {
        q,
        var: p.mu() + sd * z,
        value: p.mu() + sd * n.pdf(z) / (1.0 - q),
        method: TceMethod::Gaussian,
        error: 0.0,
        converged: true,
    })
}

/// Mellin–Barnes kernel of the unnormalized tail mean at reduced threshold y.
pub fn tce_kernel(alpha: f64, rho: f64) -> Result<FoxH> {
    FoxH::new(1, 1, vec![(1.0 / alpha, 1.0 / alpha), (rho, rho)], vec![(0.0, 1.0), (rho, rho)])
}

/// TCE from the H-function closed form, evaluated by contour inversion.
/// Falls back to [`tce_quadrature`] below μ, near α = 1 or when the contour
/// is truncated.
pub fn tce_h(p: &StableParams, q: f64) -> Result<TceEval> {
    check(p, q)?;
    if p.is_gaussian() {
        return gaussian_tce(p, q);
    }
    let s_q = var(p, q)?;
    if p.near_one() || s_q <= p.mu() {
        return tce_quadrature_at(p, q, s_q);
    }
    let skew = p.skew()?;
    let y = (s_q - p.mu()) / skew.unit;
    let e = tce_kernel(p.alpha(), skew.rho)?.eval(y)?;
    if !e.converged() {
        return tce_quadrature_at(p, q, s_q);
    }
    let tail = 1.0 - q;
    Ok(TceEval {
        q,
        var: s_q,
        value: p.mu() + skew.unit * e.value / tail,
        method: TceMethod::HFunction,
        error: skew.unit * (e.imag_residue + e.endpoint_ratio * e.value.abs()) / tail,
        converged: true,
    })
}

/// TCE by the convergent power series in the reduced threshold.
pub fn tce_series(p: &StableParams, q: f64, kmax: usize) -> Result<TceEval> {
    check(p, q)?;
    let s_q = var(p, q)?;
    let skew = p.skew()?;
    let y = (s_q - p.mu()) / skew.unit;
    if y < 0.0 {
        return invalid("series form needs the threshold at or above the location");
    }
    let alpha = p.alpha();
    let (sum, err, _, ok) = crate::stable::tce_power_sum(alpha, skew.rho, y, kmax);
    let scale = skew.unit / (PI * (1.0 - q));
    let value = p.mu() + scale * sum;
    let error = scale * err;
    Ok(TceEval {
        q,
        var: s_q,
        value,
        method: TceMethod::Series,
        error,
        converged: ok && error <= 1e-10 * value.abs().max(skew.unit),
    })
}

/// TCE by adaptive quadrature of s·f(s) above the VaR plus the term-wise
/// integrated tail expansion beyond a cutoff.
pub fn tce_quadrature(p: &StableParams, q: f64) -> Result<TceEval> {
    check(p, q)?;
    if p.is_gaussian() {
        return gaussian_tce(p, q);
    }
    let s_q = var(p, q)?;
    tce_quadrature_at(p, q, s_q)
}

fn tce_quadrature_at(p: &StableParams, q: f64, s_q: f64) -> Result<TceEval> {
    let (partial, error, converged) = partial_expectation(p, s_q)?;
    let tail = 1.0 - q;
    Ok(TceEval { q, var: s_q, value: partial / tail, method: TceMethod::Quadrature, error: error / tail, converged })
}

/// E[X 1{X > s}] by quadrature. Returns (value, error estimate, converged).
pub fn partial_expectation(p: &StableParams, s: f64) -> Result<(f64, f64, bool)> {
    if p.alpha() <= 1.0 {
        return invalid("partial expectation requires alpha > 1");
    }
    let (mu, unit, rho) = match p.skew() {
        Ok(k) => (p.mu(), k.unit, k.rho),
        Err(e) => return Err(e),
    };
    let alpha = p.alpha();
    // cutoff where either the integrated tail expansion is accurate or the
    // density is negligible
    let y0 = ((s - mu) / unit).max(0.0);
    let mut y_cut = (y0 + 8.0).max(16.0);
    let mut tail = None;
    for _ in 0..40 {
        if let Some(t) = integrated_tail(alpha, rho, y_cut, mu, unit) {
            tail = Some(t);
            break;
        }
        let x = mu + unit * y_cut;
        if pdf(p, x) * x * x < 1e-18 * unit {
            tail = Some((0.0, 0.0));
            break;
        }
        y_cut *= 1.5;
    }
    let (tail_value, tail_error) = tail.ok_or(Error::QuadratureFailure { error: f64::INFINITY })?;
    let upper = mu + unit * y_cut;
    if s >= upper {
        return Ok((tail_value, tail_error, true));
    }
    let mut points = vec![s];
    let mut step = 0.5 * unit;
    let mut x = s;
    while x + step < upper {
        x += step;
        points.push(x);
        step *= 1.6;
    }
    points.push(upper);
    let r = integrate_panels(|x| x * pdf(p, x), &points, 1e-14 * unit, 1e-12, 3000);
    Ok((r.value + tail_value, r.error + tail_error, r.converged))
}

/// ∫_{μ+unit·y}^∞ x f(x) dx from the optimally truncated tail expansion, or
/// None when its relative error exceeds 1e-12.
fn integrated_tail(alpha: f64, rho: f64, y: f64, mu: f64, unit: f64) -> Option<(f64, f64)> {
    let ln_y = y.ln();
    // k-th envelopes of ∫ y g(y) and ∫ g(y): Γ(1+αk)/k!/(αk-1) y^{1-αk} and Γ(αk)/k! y^{-αk}
    let env = |k: f64| (ln_gamma_real(1.0 + alpha * k) - ln_gamma_real(k + 1.0) + (1.0 - alpha * k) * ln_y).exp() / (alpha * k - 1.0);
    let env_s = |k: f64| (ln_gamma_real(alpha * k) - ln_gamma_real(k + 1.0) - alpha * k * ln_y).exp();
    let (mut first, mut zeroth) = (0.0, 0.0);
    let mut prev = f64::INFINITY;
    let mut last_err = f64::INFINITY;
    for k in 1..400 {
        let kf = k as f64;
        let e = env(kf) * unit + env_s(kf) * mu.abs();
        if e >= prev {
            last_err = prev;
            break;
        }
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        let s = sin_pi_real(rho * alpha * kf);
        first += sign * env(kf) * s;
        zeroth += sign * env_s(kf) * s;
        prev = e;
        if e < 1e-18 * (first.abs() * unit + zeroth.abs() * mu.abs()) {
            last_err = e;
            break;
        }
    }
    let value = (unit * first + mu * zeroth) / PI;
    let error = last_err / PI;
    (value != 0.0 && error <= 1e-12 * value.abs()).then_some((value, error))
}

/// TCE with the default method chain (closed form, then quadrature).
pub fn tce(p: &StableParams, q: f64) -> Result<TceEval> {
    tce_h(p, q)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LineAllocation {
    pub index: usize,
    pub kappa: f64,
    pub expected_value: f64,
    pub allocation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AllocationReport {
    pub q: f64,
    pub var_value: f64,
    pub tce_value: f64,
    pub tce_method: TceMethod,
    pub per_line: Vec<LineAllocation>,
    pub additivity_residual: f64,
}

/// Splits the TCE of the aggregate Σ X_i + Σ means into
/// allocation_i = E[X_i] + κ_i (TCE - E[S]), κ_i the covariation of line i on
/// the sum.
pub fn allocate(m: &SpectralMeasure, means: &[f64], q: f64) -> Result<AllocationReport> {
    let d = m.dim();
    if means.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: means.len() });
    }
    if m.alpha() <= 1.0 {
        return invalid("allocation requires alpha > 1");
    }
    let augmented = m.augment_with_sum()?;
    if augmented.points().iter().any(|p| p.direction()[d] < 0.0) {
        return Err(Error::MixedSignSupport { coordinate: d });
    }
    let expected: Vec<f64> = means.iter().zip(m.shift()).map(|(a, b)| a + b).collect();
    let total_mean = neumaier_sum(expected.iter().copied());
    let s_law = augmented.marginal(d)?.with_mu(total_mean)?;
    let t = tce(&s_law, q)?;
    let excess = t.value - total_mean;
    let per_line = (0..d)
        .map(|i| {
            let (kappa, _) = augmented.covariation(i, d)?;
            Ok(LineAllocation { index: i, kappa, expected_value: expected[i], allocation: expected[i] + kappa * excess })
        })
        .collect::<Result<Vec<_>>>()?;
    let residual = neumaier_sum(per_line.iter().map(|l| l.allocation).chain(std::iter::once(-t.value)));
    Ok(AllocationReport {
        q,
        var_value: t.var,
        tce_value: t.value,
        tce_method: t.method,
        per_line,
        additivity_residual: residual,
    })
}

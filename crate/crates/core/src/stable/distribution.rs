//! Distribution function and quantiles.

use std::f64::consts::PI;

use statrs::distribution::{ContinuousCDF, Normal};

use super::density::{inverse_power_sum, reduce, SeriesEval, DEFAULT_TERMS};
use super::zolotarev::cdf_zolotarev;
use super::StableParams;
use crate::error::{invalid, Error, Result};
use crate::quad::find_root;

/// Tail probability on one side of μ at reduced distance `y`:
/// (1/π) Σ_{k≥1} (-1)^{k+1} Γ(αk) sin(πραk) y^{-αk} / k!.
pub fn survival_series(alpha: f64, rho: f64, y: f64, kmax: usize) -> Result<SeriesEval> {
    if !(y > 0.0) {
        return Err(Error::SeriesDivergence { terms: 0 });
    }
    if alpha == 1.0 {
        return invalid("tail series is undefined at alpha = 1");
    }
    let (sum, error, terms, ok) = inverse_power_sum(alpha, rho, y, kmax, |k| alpha * k);
    let value = sum / PI;
    let error = error / PI;
    Ok(SeriesEval { value, error, terms, converged: ok && error <= 1e-10 * value.abs().max(1e-300) })
}

/// P(X ≤ x) with its error estimate.
pub fn cdf_eval(p: &StableParams, x: f64) -> Result<SeriesEval> {
    let exact = |v: f64| Ok(SeriesEval { value: v, error: 0.0, terms: 0, converged: true });
    if p.alpha() == 2.0 {
        let n = Normal::new(p.mu(), std::f64::consts::SQRT_2 * p.sigma())
            .map_err(|e| Error::InvalidParameter(e.to_string()))?;
        return exact(n.cdf(x));
    }
    if p.alpha() == 1.0 && p.beta() == 0.0 {
        return exact(0.5 + ((x - p.mu()) / p.sigma()).atan() / PI);
    }
    if p.alpha() != 1.0 && !p.near_one() {
        let r = reduce(p, x)?;
        if r.rho == 0.0 {
            // no mass beyond μ on this side
            return exact(if x >= p.mu() { 1.0 } else { 0.0 });
        }
        if r.y == 0.0 {
            return exact(1.0 - r.rho);
        }
        let tail_ok = r.alpha < 1.0 || r.y >= 1.5;
        if tail_ok {
            let s = survival_series(r.alpha, r.rho, r.y, DEFAULT_TERMS)?;
            if s.error <= 1e-14 && s.error <= 1e-8 * s.value.abs() {
                let v = if x >= p.mu() { 1.0 - s.value } else { s.value };
                return Ok(SeriesEval { value: v.clamp(0.0, 1.0), ..s });
            }
        }
    }
    cdf_zolotarev(p, x)
}

pub fn cdf(p: &StableParams, x: f64) -> f64 {
    cdf_eval(p, x).map(|e| e.value).unwrap_or(f64::NAN)
}

/// Smallest x with P(X ≤ x) = q, by bracket expansion and Illinois
/// regula falsi.
pub fn quantile(p: &StableParams, q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return invalid(format!("quantile level must lie in (0, 1), got {q}"));
    }
    if p.alpha() == 2.0 {
        let n = Normal::new(p.mu(), std::f64::consts::SQRT_2 * p.sigma())
            .map_err(|e| Error::InvalidParameter(e.to_string()))?;
        return Ok(n.inverse_cdf(q));
    }
    if p.alpha() == 1.0 && p.beta() == 0.0 {
        return Ok(p.mu() + p.sigma() * (PI * (q - 0.5)).tan());
    }
    let g = |x: f64| cdf(p, x) - q;
    let start = p.mu();
    let f0 = g(start);
    if f0 == 0.0 {
        return Ok(start);
    }
    let dir = if f0 < 0.0 { 1.0 } else { -1.0 };
    let mut step = p.sigma();
    let mut near = start;
    let mut far = start + dir * step;
    let mut found = false;
    for _ in 0..400 {
        let v = g(far);
        if v.is_nan() {
            break;
        }
        if (v > 0.0) == (dir > 0.0) || v == 0.0 {
            found = true;
            break;
        }
        near = far;
        step *= 2.0;
        far = near + dir * step;
        if !far.is_finite() {
            break;
        }
    }
    if !found {
        return Err(Error::BracketFailure { target: q });
    }
    let (lo, hi) = if dir > 0.0 { (near, far) } else { (far, near) };
    find_root(g, lo, hi, 1e-15, 1e-14).map_err(|_| Error::BracketFailure { target: q })
}

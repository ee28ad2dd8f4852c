//! Density evaluation: closed forms, convergent and asymptotic series,
//! Mellin–Barnes contour inversion and characteristic-function quadrature.
//!
//! All series and contour forms work with the reduced argument
//! `y = |x - μ| / (σ r^{1/α})` and the mass exponent `ρ` of the side of μ that
//! `x` lies on (ρ for x ≥ μ, 1 - ρ for x < μ).

use std::f64::consts::PI;

use statrs::distribution::{Continuous, Normal};

use super::zolotarev::pdf_zolotarev;
use super::{StableParams, NEAR_ONE_BAND};
use crate::error::{invalid, Error, Result};
use crate::foxh::FoxH;
use crate::quad::integrate_panels;
use crate::special::{ln_gamma_real, sin_pi_real};

const EPS: f64 = f64::EPSILON;
pub(crate) const DEFAULT_TERMS: usize = 400;
/// Relative optimal-truncation error below which the asymptotic series is
/// trusted by the dispatcher.
pub const ASYMPTOTIC_SWITCH: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PdfMethod {
    Normal,
    Cauchy,
    PowerSeries,
    Contour,
    Asymptotic,
    Quadrature,
    /// The θ-integral representation.
    Integral,
    /// Outside the support of a totally skewed law with α < 1.
    Support,
}

impl PdfMethod {
    pub fn name(&self) -> &'static str {
        match self {
            PdfMethod::Normal => "normal",
            PdfMethod::Cauchy => "cauchy",
            PdfMethod::PowerSeries => "series",
            PdfMethod::Contour => "contour",
            PdfMethod::Asymptotic => "asymptotic",
            PdfMethod::Quadrature => "quadrature",
            PdfMethod::Integral => "integral",
            PdfMethod::Support => "support",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdfEval {
    pub value: f64,
    pub method: PdfMethod,
    pub converged: bool,
}

/// A truncated expansion or quadrature with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesEval {
    pub value: f64,
    pub error: f64,
    /// Terms summed (series) or panels used (contour, quadrature).
    pub terms: usize,
    pub converged: bool,
}

impl SeriesEval {
    fn relative_error(&self) -> f64 {
        if self.error == 0.0 {
            0.0
        } else {
            self.error / self.value.abs()
        }
    }
}

pub(crate) struct Reduced {
    pub alpha: f64,
    pub y: f64,
    pub rho: f64,
    pub unit: f64,
}

pub(crate) fn reduce(p: &StableParams, x: f64) -> Result<Reduced> {
    let skew = p.skew()?;
    let d = x - p.mu();
    let (y, rho) = if d >= 0.0 { (d, skew.rho) } else { (-d, 1.0 - skew.rho) };
    Ok(Reduced { alpha: p.alpha(), y: y / skew.unit, rho, unit: skew.unit })
}

fn finish(sum: f64, error: f64, terms: usize, truncated_ok: bool, scale: f64) -> SeriesEval {
    let value = sum * scale;
    let error = error * scale;
    let converged = truncated_ok && (error == 0.0 || error <= 1e-10 * value.abs());
    SeriesEval { value, error, terms, converged }
}

/// Convergent series around μ for α > 1:
/// f = 1/(απ·unit) Σ_k Γ((1+k)/α) sin(πρ(1+k)) (-y)^k / k!.
pub fn pdf_series_power(p: &StableParams, x: f64, kmax: usize) -> Result<SeriesEval> {
    if p.alpha() <= 1.0 {
        return invalid("power series requires alpha > 1");
    }
    let r = reduce(p, x)?;
    let (sum, error, terms, ok) = power_sum(r.alpha, r.rho, r.y, kmax, |k| (1.0 + k) / r.alpha, |k| 1.0 + k);
    Ok(finish(sum, error, terms, ok, 1.0 / (r.alpha * PI * r.unit)))
}

/// Σ_k Γ(g(k)) sin(π ρ s(k)) (-y)^k / k! with envelope-based stopping.
/// Returns (sum, error estimate, terms, stopped before kmax).
pub(crate) fn power_sum(
    _alpha: f64,
    rho: f64,
    y: f64,
    kmax: usize,
    gamma_arg: impl Fn(f64) -> f64,
    sine_arg: impl Fn(f64) -> f64,
) -> (f64, f64, usize, bool) {
    let ln_y = y.ln();
    let mut sum = 0.0f64;
    let mut comp = 0.0;
    let mut max_env = 0.0f64;
    for k in 0..=kmax {
        let kf = k as f64;
        let ln_env = ln_gamma_real(gamma_arg(kf)) - ln_gamma_real(kf + 1.0) + if k == 0 { 0.0 } else { kf * ln_y };
        let env = ln_env.exp();
        if k >= 2 && (env <= EPS * 0.01 * sum.abs() || env == 0.0) {
            return (sum + comp, env + 4.0 * EPS * max_env, k, true);
        }
        max_env = max_env.max(env);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let term = sign * env * sin_pi_real(rho * sine_arg(kf));
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
    }
    let kf = (kmax + 1) as f64;
    let tail = (ln_gamma_real(gamma_arg(kf)) - ln_gamma_real(kf + 1.0) + kf * ln_y).exp();
    (sum + comp, tail + 4.0 * EPS * max_env, kmax + 1, false)
}

/// Σ_k Γ((k+α-1)/α) sin(πρ(1-k)) (-y)^k / k!, the tail-mean series.
pub(crate) fn tce_power_sum(alpha: f64, rho: f64, y: f64, kmax: usize) -> (f64, f64, usize, bool) {
    power_sum(alpha, rho, y, kmax, |k| (k + alpha - 1.0) / alpha, |k| 1.0 - k)
}

/// Σ_{k≥1} (-1)^{k+1} Γ(g(k)) sin(πραk) y^{-αk} / k!. Convergent for α < 1;
/// optimally truncated (stop before the smallest envelope) for α > 1.
pub(crate) fn inverse_power_sum(
    alpha: f64,
    rho: f64,
    y: f64,
    kmax: usize,
    gamma_arg: impl Fn(f64) -> f64,
) -> (f64, f64, usize, bool) {
    let ln_y = y.ln();
    let env_at = |k: usize| {
        let kf = k as f64;
        (ln_gamma_real(gamma_arg(kf)) - ln_gamma_real(kf + 1.0) - alpha * kf * ln_y).exp()
    };
    let mut sum = 0.0f64;
    let mut max_env = 0.0f64;
    let mut env = env_at(1);
    for k in 1..=kmax {
        let next = env_at(k + 1);
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        sum += sign * env * sin_pi_real(rho * alpha * k as f64);
        max_env = max_env.max(env);
        if alpha > 1.0 && next >= env {
            // next term would be past the smallest one
            return (sum, next.min(env) + 4.0 * EPS * max_env, k, true);
        }
        if next <= EPS * 0.01 * sum.abs() || next == 0.0 {
            return (sum, next + 4.0 * EPS * max_env, k, true);
        }
        env = next;
    }
    (sum, env + 4.0 * EPS * max_env, kmax, false)
}

/// Convergent large-|x| series for α < 1:
/// f = 1/(π·unit) Σ_{k≥1} (-1)^{k+1} Γ(1+αk) sin(πραk) y^{-1-αk} / k!.
pub fn pdf_series_small_alpha(p: &StableParams, x: f64, kmax: usize) -> Result<SeriesEval> {
    if p.alpha() >= 1.0 {
        return invalid("small-alpha series requires alpha < 1");
    }
    tail_density(p, x, kmax)
}

/// Same expansion as [`pdf_series_small_alpha`] used asymptotically for
/// α > 1, truncated before its smallest term.
pub fn pdf_asymptotic(p: &StableParams, x: f64, kmax: usize) -> Result<SeriesEval> {
    if p.alpha() <= 1.0 {
        return invalid("asymptotic series requires alpha > 1");
    }
    tail_density(p, x, kmax)
}

fn tail_density(p: &StableParams, x: f64, kmax: usize) -> Result<SeriesEval> {
    let r = reduce(p, x)?;
    if r.y == 0.0 {
        return Err(Error::SeriesDivergence { terms: 0 });
    }
    let (sum, error, terms, ok) = inverse_power_sum(r.alpha, r.rho, r.y, kmax, |k| 1.0 + r.alpha * k);
    let scale = 1.0 / (PI * r.unit * r.y);
    Ok(finish(sum, error, terms, ok, scale))
}

/// Mellin–Barnes kernel of the standardized density at reduced argument y:
/// f = H^{1,1}_{2,2}[y | (1-1/α, 1/α), (1-ρ, ρ); (0, 1), (1-ρ, ρ)] / (α·unit).
pub fn density_kernel(alpha: f64, rho: f64) -> Result<FoxH> {
    FoxH::new(
        1,
        1,
        vec![(1.0 - 1.0 / alpha, 1.0 / alpha), (1.0 - rho, rho)],
        vec![(0.0, 1.0), (1.0 - rho, rho)],
    )
}

/// Density by contour inversion on re s = 1/2.
pub fn pdf_contour(p: &StableParams, x: f64) -> Result<SeriesEval> {
    if p.alpha() == 1.0 {
        return invalid("contour form is undefined at alpha = 1");
    }
    let r = reduce(p, x)?;
    if r.rho == 0.0 {
        return Ok(SeriesEval { value: 0.0, error: 0.0, terms: 0, converged: true });
    }
    if r.y == 0.0 {
        return Ok(density_at_location(&r));
    }
    let h = density_kernel(r.alpha, r.rho)?;
    let e = h.eval(r.y)?;
    let scale = 1.0 / (r.alpha * r.unit);
    let value = e.value * scale;
    let error = (e.imag_residue + e.endpoint_ratio * e.value.abs()) * scale;
    Ok(SeriesEval { value, error, terms: e.contour.steps, converged: e.converged() })
}

fn density_at_location(r: &Reduced) -> SeriesEval {
    let v = (ln_gamma_real(1.0 + 1.0 / r.alpha)).exp() * sin_pi_real(r.rho) / (PI * r.unit);
    SeriesEval { value: v, error: 4.0 * EPS * v.abs(), terms: 1, converged: true }
}

/// Oscillatory Fourier inversion pieces shared with the distribution
/// function: returns ∫_0^U e^{-(σt)^α} trig(θ(t)) w(t) dt where
/// θ(t) is the phase of e^{-itx} φ(t).
pub(crate) fn inversion_integral(
    p: &StableParams,
    x: f64,
    use_sine_over_t: bool,
    abs_tol: f64,
) -> crate::quad::QuadResult {
    let alpha = p.alpha();
    let sigma = p.sigma();
    let beta = p.beta();
    let d = x - p.mu();
    let a = if alpha == 1.0 || alpha == 2.0 { 0.0 } else { (std::f64::consts::FRAC_PI_2 * alpha).tan() };
    let phase = move |t: f64| -> f64 {
        if alpha == 1.0 {
            -sigma * beta * 2.0 / PI * t * t.ln() - d * t
        } else {
            (sigma * t).powf(alpha) * beta * a - d * t
        }
    };
    let upper = 39f64.powf(1.0 / alpha) / sigma;
    let swing = if alpha == 1.0 {
        sigma * beta.abs() * 2.0 / PI * upper * upper.ln().abs()
    } else {
        39.0 * (beta * a).abs()
    };
    let total = d.abs() * upper + swing;
    let panels = ((total / PI).ceil() as usize + 8).min(20_000);
    // quadratic spacing concentrates panels where the amplitude lives
    let points: Vec<f64> = (0..=panels)
        .map(|i| {
            let u = i as f64 / panels as f64;
            upper * (0.25 * u + 0.75 * u * u)
        })
        .collect();
    let f = move |t: f64| -> f64 {
        if t == 0.0 {
            return 0.0;
        }
        let amp = (-(sigma * t).powf(alpha)).exp();
        let th = phase(t);
        if use_sine_over_t {
            amp * th.sin() / t
        } else {
            amp * th.cos()
        }
    };
    integrate_panels(f, &points, abs_tol, 0.0, 4 * panels + 4000)
}

/// Density by numerical Fourier inversion (1/π) ∫_0^∞ Re[e^{-itx} φ(t)] dt.
pub fn pdf_cf_quadrature(p: &StableParams, x: f64) -> Result<SeriesEval> {
    let r = inversion_integral(p, x, false, 1e-15 / p.sigma());
    Ok(SeriesEval {
        value: r.value / PI,
        error: r.error / PI,
        terms: 0,
        converged: r.converged,
    })
}

/// Density with regime dispatch.
pub fn pdf_eval(p: &StableParams, x: f64) -> Result<PdfEval> {
    let alpha = p.alpha();
    if alpha == 2.0 {
        let n = Normal::new(p.mu(), std::f64::consts::SQRT_2 * p.sigma())
            .map_err(|e| Error::InvalidParameter(e.to_string()))?;
        return Ok(PdfEval { value: n.pdf(x), method: PdfMethod::Normal, converged: true });
    }
    if alpha == 1.0 && p.beta() == 0.0 {
        let s = p.sigma();
        let d = x - p.mu();
        return Ok(PdfEval { value: s / (PI * (s * s + d * d)), method: PdfMethod::Cauchy, converged: true });
    }
    if alpha == 1.0 || (alpha - 1.0).abs() < NEAR_ONE_BAND {
        return Ok(integral_eval(p, x));
    }
    let r = reduce(p, x)?;
    if r.rho == 0.0 {
        return Ok(PdfEval { value: 0.0, method: PdfMethod::Support, converged: true });
    }
    if r.y == 0.0 {
        let v = density_at_location(&r);
        return Ok(PdfEval { value: v.value, method: PdfMethod::PowerSeries, converged: true });
    }
    let accept = |e: &SeriesEval, tol: f64| e.converged && e.relative_error() <= tol;
    if alpha > 1.0 {
        if r.y <= 1.0 {
            let e = pdf_series_power(p, x, DEFAULT_TERMS)?;
            if accept(&e, 1e-11) {
                return Ok(series(e, PdfMethod::PowerSeries));
            }
        } else {
            let e = pdf_asymptotic(p, x, DEFAULT_TERMS)?;
            if e.value > 0.0 && e.relative_error() <= ASYMPTOTIC_SWITCH {
                return Ok(series(e, PdfMethod::Asymptotic));
            }
            if r.y <= 3.0 {
                let e = pdf_series_power(p, x, DEFAULT_TERMS)?;
                if accept(&e, 1e-11) {
                    return Ok(series(e, PdfMethod::PowerSeries));
                }
            }
        }
    } else {
        let e = pdf_series_small_alpha(p, x, DEFAULT_TERMS)?;
        if accept(&e, 1e-11) {
            return Ok(series(e, PdfMethod::Asymptotic));
        }
    }
    match pdf_contour(p, x) {
        Ok(e) if e.converged => Ok(PdfEval { value: e.value.max(0.0), method: PdfMethod::Contour, converged: true }),
        _ => Ok(integral_eval(p, x)),
    }
}

fn series(e: SeriesEval, method: PdfMethod) -> PdfEval {
    PdfEval { value: e.value.max(0.0), method, converged: true }
}

fn integral_eval(p: &StableParams, x: f64) -> PdfEval {
    match pdf_zolotarev(p, x) {
        Ok(e) => PdfEval { value: e.value.max(0.0), method: PdfMethod::Integral, converged: e.converged },
        Err(_) => PdfEval { value: f64::NAN, method: PdfMethod::Integral, converged: false },
    }
}

/// Density value; see [`pdf_eval`] for the method and convergence flag.
pub fn pdf(p: &StableParams, x: f64) -> f64 {
    pdf_eval(p, x).map(|e| e.value).unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn sp(alpha: f64, beta: f64) -> StableParams {
        StableParams::standard(alpha, beta).unwrap()
    }

    fn levy(x: f64) -> f64 {
        (1.0 / (2.0 * PI)).sqrt() * (-0.5 / x).exp() * x.powf(-1.5)
    }

    #[test]
    fn closed_forms() {
        assert_relative_eq!(pdf(&sp(2.0, 0.0), 0.0), 0.282_094_791_773_878_14, max_relative = 1e-14);
        let c = StableParams::new(1.0, 0.0, 2.0, 0.0).unwrap();
        assert_relative_eq!(pdf(&c, 0.0), 0.159_154_943_091_895_34, max_relative = 1e-14);
        assert!((pdf(&sp(0.5, 1.0), 1.0) - 0.241_970_724_519_143_37).abs() < 1e-9);
        assert_eq!(pdf(&sp(0.5, 1.0), -1.0), 0.0);
    }

    #[test]
    fn power_series_at_origin() {
        let e = pdf_series_power(&sp(2.0, 0.0), 0.0, 10).unwrap();
        assert_relative_eq!(e.value, 1.0 / (2.0 * PI.sqrt()), max_relative = 1e-14);
        assert!(pdf_series_power(&sp(0.7, 0.0), 1.0, 10).is_err());
    }

    // Reference values: mpmath quadrature of the inversion integral.
    #[test]
    fn matches_inversion_oracle() {
        let cases = [
            (1.7, 1.0, 0.5, 0.206_809_788_626_055),
            (1.5, 0.0, 1.0, 0.202_038_159_607_840),
            (1.3, -0.5, 0.25, 0.218_188_275_757_561),
            (0.8, 0.0, 10.0, 0.004_101_911_594_169_6),
            (1.7, 1.0, 1.0, 0.152_841_091_172_477),
        ];
        for (alpha, beta, x, expect) in cases {
            let p = sp(alpha, beta);
            let v = pdf(&p, x);
            assert!((v - expect).abs() < 2e-9, "α={alpha} β={beta} x={x}: {v} vs {expect}");
            let q = pdf_cf_quadrature(&p, x).unwrap().value;
            assert!((q - expect).abs() < 2e-9, "quadrature α={alpha} β={beta} x={x}: {q}");
        }
    }

    #[test]
    fn contour_matches_normal() {
        // α = 2 via the contour path directly
        let p = sp(2.0, 0.0);
        let n = Normal::new(0.0, std::f64::consts::SQRT_2).unwrap();
        for x in [0.5, 1.0, 2.0] {
            let v = pdf_contour(&p, x).unwrap();
            assert!((v.value - n.pdf(x)).abs() < 1e-8, "x={x}");
        }
    }

    #[test]
    fn series_agreement() {
        let p = sp(1.7, 1.0);
        let s = pdf_series_power(&p, 0.5, 80).unwrap();
        let c = pdf_contour(&p, 0.5).unwrap();
        assert!(s.converged && c.converged);
        assert_relative_eq!(s.value, c.value, max_relative = 1e-8);

        let a = pdf_asymptotic(&p, 30.0, DEFAULT_TERMS).unwrap();
        let c = pdf_contour(&p, 30.0).unwrap();
        assert_relative_eq!(a.value, c.value, max_relative = 1e-4);
    }

    #[test]
    fn levy_series() {
        let p = sp(0.5, 1.0);
        let e = pdf_series_small_alpha(&p, 4.0, DEFAULT_TERMS).unwrap();
        assert!(e.converged);
        assert_relative_eq!(e.value, levy(4.0), max_relative = 1e-10);
        assert_relative_eq!(levy(4.0), 0.044_008_165_845_537_4, max_relative = 1e-12);
        let small = pdf_series_small_alpha(&p, 0.01, DEFAULT_TERMS).unwrap();
        assert!(!small.converged);
    }

    #[test]
    fn pareto_tail_ratio() {
        let p = sp(1.5, 0.0);
        let ratio = pdf(&p, 400.0) / pdf(&p, 200.0);
        assert_relative_eq!(ratio, 2f64.powf(-2.5), max_relative = 1e-3);
    }

    #[test]
    fn asymptotic_degenerates_at_gaussian_boundary() {
        // every sine factor vanishes at α = 2: the expansion carries no
        // information about the Gaussian tail
        let r = Reduced { alpha: 2.0, y: 5.0, rho: 0.5, unit: 1.0 };
        let (sum, _, _, _) = inverse_power_sum(r.alpha, r.rho, r.y, 50, |k| 1.0 + 2.0 * k);
        assert!(sum.abs() < 1e-15);
    }

    #[test]
    fn dispatch_methods() {
        let p = sp(1.7, 1.0);
        assert_eq!(pdf_eval(&p, 0.5).unwrap().method, PdfMethod::PowerSeries);
        assert_eq!(pdf_eval(&p, 100.0).unwrap().method, PdfMethod::Asymptotic);
        assert_eq!(pdf_eval(&p, 5.0).unwrap().method, PdfMethod::Contour);
        assert_eq!(pdf_eval(&sp(1.0, 0.5), 0.5).unwrap().method, PdfMethod::Integral);
        assert_eq!(pdf_eval(&sp(1.01, 0.0), 0.5).unwrap().method, PdfMethod::Integral);
    }

    #[test]
    fn location_shift() {
        let p = StableParams::new(1.4, 0.3, 2.0, 5.0).unwrap();
        let q = StableParams::new(1.4, 0.3, 2.0, 0.0).unwrap();
        for x in [-3.0, 0.0, 1.0, 7.5] {
            assert_relative_eq!(pdf(&p, x + 5.0), pdf(&q, x), max_relative = 1e-12);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn reflection_and_positivity(
            alpha in 0.3f64..2.0, beta in -1.0f64..=1.0, x in -20.0f64..20.0,
        ) {
            let p = sp(alpha, beta);
            let q = sp(alpha, -beta);
            let a = pdf(&p, x);
            let b = pdf(&q, -x);
            prop_assert!(a >= 0.0);
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300) + 1e-15);
        }
    }
}

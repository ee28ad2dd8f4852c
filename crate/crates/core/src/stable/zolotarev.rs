//! Non-oscillatory integral representation over θ (Zolotarev's form).
//!
//! For the standardized law and x > 0 both the density and the distribution
//! function are integrals of a unimodal function of g(θ), where log g is
//! monotone in θ. This stays cheap in the far tails and across α = 1, where
//! the series and contour forms break down and Fourier inversion oscillates.

use std::f64::consts::{FRAC_PI_2, PI};

use super::density::SeriesEval;
use super::StableParams;
use crate::error::Result;
use crate::quad::{find_root, integrate_panels, QuadResult};
use crate::special::ln_gamma_real;

const REL_TOL: f64 = 1e-12;
const MAX_PANELS: usize = 2000;

/// log g(θ) on (lo, hi) for the standardized argument z ≥ 0 (any z at α = 1
/// with β > 0).
///
/// θ is passed as its distances u = θ - lo and v = hi - θ: far in the tails
/// the peak of g e^{-g} is much narrower than the spacing of doubles near
/// ±π/2, so each half of the range is integrated in the distance from its
/// own endpoint.
struct Kernel {
    alpha: f64,
    beta: f64,
    z: f64,
    theta0: f64,
    lo: f64,
    hi: f64,
}

impl Kernel {
    fn new(alpha: f64, beta: f64, z: f64) -> Self {
        if alpha == 1.0 {
            return Kernel { alpha, beta, z, theta0: 0.0, lo: -FRAC_PI_2, hi: FRAC_PI_2 };
        }
        let theta0 = (beta * (FRAC_PI_2 * alpha).tan()).atan() / alpha;
        Kernel { alpha, beta, z, theta0, lo: -theta0, hi: FRAC_PI_2 }
    }

    fn log_g(&self, u: f64, v: f64) -> f64 {
        let (a, b) = (self.alpha, self.beta);
        let near_lo = u <= v;
        if a == 1.0 {
            let (cos_t, tan_t, w) = if near_lo {
                (u.sin(), -u.cos() / u.sin(), FRAC_PI_2 * (1.0 - b) + b * u)
            } else {
                (v.sin(), v.cos() / v.sin(), FRAC_PI_2 * (1.0 + b) - b * v)
            };
            return -PI * self.z / (2.0 * b) + (2.0 / PI).ln() + w.ln() - cos_t.ln() + w * tan_t / b;
        }
        let th0 = self.theta0;
        let t = if near_lo { self.lo + u } else { self.hi - v };
        let cos_t = if near_lo { t.cos() } else { v.sin() };
        let sin_shift = if near_lo { (a * u).sin() } else { (a * (th0 + t)).sin() };
        let e = a / (a - 1.0);
        e * self.z.ln() + (a * th0).cos().ln() / (a - 1.0) + e * (cos_t.ln() - sin_shift.ln())
            + (a * th0 + (a - 1.0) * t).cos().ln()
            - cos_t.ln()
    }

    /// ∫ f(log g) over one half, in the distance `r` from that half's endpoint.
    fn half(&self, f: &impl Fn(f64) -> f64, from_lo: bool) -> QuadResult {
        let len = self.hi - self.lo;
        let lg = |r: f64| if from_lo { self.log_g(r, len - r) } else { self.log_g(len - r, r) };
        let top = 0.5 * len;
        let mut pts = vec![0.0, top];
        // peak of g e^{-g} where log g = 0; located on a log scale in r
        let (la, lb) = ((1e-300f64).ln(), top.ln());
        let (ga, gb) = (lg(la.exp()), lg(lb.exp()));
        if !ga.is_nan() && !gb.is_nan() && ga.signum() != gb.signum() {
            if let Ok(l) = find_root(|l| lg(l.exp()), la, lb, 1e-15, 0.0) {
                let r = l.exp();
                pts.push(r);
                let h = 1e-6 * r;
                let slope = ((lg(r + h) - lg(r - h)) / (2.0 * h)).abs();
                if slope.is_finite() && slope > 0.0 {
                    let w = 1.0 / slope;
                    for k in [1.0, 4.0, 16.0, 64.0, 256.0] {
                        pts.extend([r - k * w, r + k * w].into_iter().filter(|&q| q > 0.0 && q < top));
                    }
                }
                // power-law flanks spanning many decades
                let mut k = 2.0;
                while k < 1e40 {
                    pts.extend([r / k, r * k].into_iter().filter(|&q| q > 0.0 && q < top));
                    k *= 2.0;
                }
                pts.sort_by(f64::total_cmp);
            }
        }
        integrate_panels(|r| f(lg(r)), &pts, 0.0, REL_TOL, MAX_PANELS)
    }

    fn integrate(&self, f: impl Fn(f64) -> f64) -> QuadResult {
        if self.hi <= self.lo {
            return QuadResult { value: 0.0, error: 0.0, converged: true };
        }
        let (a, b) = (self.half(&f, true), self.half(&f, false));
        QuadResult { value: a.value + b.value, error: a.error + b.error, converged: a.converged && b.converged }
    }
}

fn density_part(l: f64) -> f64 {
    if l.is_finite() {
        (l - l.exp()).exp()
    } else {
        0.0
    }
}

fn survival_part(l: f64) -> f64 {
    if l.is_nan() {
        0.0
    } else {
        (-l.exp()).exp()
    }
}

/// Standardized argument and the Jacobian 1/σ.
fn standardize(p: &StableParams, x: f64) -> f64 {
    let (alpha, beta, sigma) = (p.alpha(), p.beta(), p.sigma());
    if alpha == 1.0 {
        (x - p.mu() - 2.0 / PI * beta * sigma * sigma.ln()) / sigma
    } else {
        (x - p.mu()) / sigma
    }
}

fn pdf_std(alpha: f64, beta: f64, z: f64) -> QuadResult {
    if alpha == 1.0 {
        if beta < 0.0 {
            return pdf_std(alpha, -beta, -z);
        }
        let r = Kernel::new(alpha, beta, z).integrate(density_part);
        return scale(r, 1.0 / (2.0 * beta));
    }
    if z < 0.0 {
        return pdf_std(alpha, -beta, -z);
    }
    let k = Kernel::new(alpha, beta, z);
    if z == 0.0 {
        let zeta = beta * (FRAC_PI_2 * alpha).tan();
        let v = ln_gamma_real(1.0 + 1.0 / alpha).exp() * k.theta0.cos()
            / (PI * (1.0 + zeta * zeta).powf(0.5 / alpha));
        return QuadResult { value: v, error: 0.0, converged: true };
    }
    let r = k.integrate(density_part);
    scale(r, alpha / (PI * (alpha - 1.0).abs() * z))
}

fn cdf_std(alpha: f64, beta: f64, z: f64) -> QuadResult {
    let flip = |r: QuadResult| QuadResult { value: 1.0 - r.value, ..r };
    if alpha == 1.0 {
        if beta < 0.0 {
            return flip(cdf_std(alpha, -beta, -z));
        }
        let r = Kernel::new(alpha, beta, z).integrate(survival_part);
        return scale(r, 1.0 / PI);
    }
    if z < 0.0 {
        return flip(cdf_std(alpha, -beta, -z));
    }
    let k = Kernel::new(alpha, beta, z);
    let c1 = if alpha < 1.0 { (FRAC_PI_2 - k.theta0) / PI } else { 1.0 };
    if z == 0.0 {
        return QuadResult { value: (FRAC_PI_2 - k.theta0) / PI, error: 0.0, converged: true };
    }
    let r = scale(k.integrate(survival_part), (1.0 - alpha).signum() / PI);
    QuadResult { value: c1 + r.value, ..r }
}

fn scale(r: QuadResult, s: f64) -> QuadResult {
    QuadResult { value: r.value * s, error: r.error * s.abs(), converged: r.converged }
}

/// Density from the θ-integral representation; valid for every α < 2 but
/// used by the dispatcher near α = 1 and as the last resort elsewhere.
pub fn pdf_zolotarev(p: &StableParams, x: f64) -> Result<SeriesEval> {
    if p.beta() == 0.0 && p.alpha() == 1.0 {
        let d = x - p.mu();
        let s = p.sigma();
        return Ok(SeriesEval { value: s / (PI * (s * s + d * d)), error: 0.0, terms: 0, converged: true });
    }
    let r = pdf_std(p.alpha(), p.beta(), standardize(p, x));
    let s = p.sigma();
    Ok(SeriesEval { value: r.value / s, error: r.error / s, terms: 0, converged: r.converged })
}

/// Distribution function from the θ-integral representation.
pub fn cdf_zolotarev(p: &StableParams, x: f64) -> Result<SeriesEval> {
    if p.beta() == 0.0 && p.alpha() == 1.0 {
        let v = 0.5 + ((x - p.mu()) / p.sigma()).atan() / PI;
        return Ok(SeriesEval { value: v, error: 0.0, terms: 0, converged: true });
    }
    let r = cdf_std(p.alpha(), p.beta(), standardize(p, x));
    Ok(SeriesEval { value: r.value.clamp(0.0, 1.0), error: r.error, terms: 0, converged: r.converged })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stable::{cdf, pdf_cf_quadrature, pdf_contour};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn sp(alpha: f64, beta: f64) -> StableParams {
        StableParams::standard(alpha, beta).unwrap()
    }

    #[test]
    fn matches_fourier_inversion() {
        for (a, b) in [(1.5, 0.5), (0.7, -0.3), (1.3, 1.0), (0.6, 1.0), (1.0, 0.5), (1.0, -0.7), (1.01, 0.4)] {
            let p = sp(a, b);
            for x in [-5.0, -1.0, -0.2, 0.3, 2.0, 10.0] {
                let z = pdf_zolotarev(&p, x).unwrap();
                let r = pdf_cf_quadrature(&p, x).unwrap().value;
                assert!((z.value - r).abs() <= 1e-12 + 1e-10 * r.abs(), "{a} {b} {x}: {} vs {r}", z.value);
            }
        }
    }

    #[test]
    fn location_value_matches_contour_limit() {
        let p = sp(1.5, 0.5);
        let at = pdf_zolotarev(&p, 0.0).unwrap().value;
        assert_relative_eq!(at, pdf_contour(&p, 1e-9).unwrap().value, max_relative = 1e-8);
        assert_relative_eq!(at, pdf_zolotarev(&p, 1e-9).unwrap().value, max_relative = 1e-8);
    }

    #[test]
    fn scale_and_shift_at_alpha_one() {
        let (sigma, mu, beta) = (2.5, 0.7, 0.6);
        let p = StableParams::new(1.0, beta, sigma, mu).unwrap();
        let shift = mu + 2.0 / PI * beta * sigma * sigma.ln();
        for x in [-4.0, 0.0, 3.0, 40.0] {
            let std = pdf_zolotarev(&sp(1.0, beta), (x - shift) / sigma).unwrap().value / sigma;
            assert_relative_eq!(pdf_zolotarev(&p, x).unwrap().value, std, max_relative = 1e-14);
            assert_relative_eq!(pdf_cf_quadrature(&p, x).unwrap().value, std, max_relative = 1e-9);
        }
    }

    #[test]
    fn far_tails_follow_the_power_law() {
        // P(X > x) ~ (1+β) C_α x^{-α} with C_1 = 1/π
        let x = 1e8;
        let s = 1.0 - cdf_zolotarev(&sp(1.0, 0.5), x).unwrap().value;
        assert_relative_eq!(s * x, 1.5 / PI, max_relative = 1e-6);
        let f = pdf_zolotarev(&sp(1.0, 0.5), x).unwrap().value;
        assert_relative_eq!(f * x * x, 1.5 / PI, max_relative = 1e-6);
        assert_eq!(pdf_zolotarev(&sp(0.6, 1.0), -1.0).unwrap().value, 0.0);
        assert_eq!(cdf_zolotarev(&sp(0.6, 1.0), -1.0).unwrap().value, 0.0);
    }

    proptest! {
        #[test]
        fn cdf_agrees_with_series_dispatch(a in 1.1f64..1.9, b in -1.0f64..1.0, x in -20.0f64..20.0) {
            let p = sp(a, b);
            let z = cdf_zolotarev(&p, x).unwrap();
            prop_assert!(z.converged);
            prop_assert!((z.value - cdf(&p, x)).abs() < 1e-10);
        }
    }
}

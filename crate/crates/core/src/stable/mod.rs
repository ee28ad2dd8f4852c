//! Univariate stable laws S_α(σ, β, μ) with characteristic function
//!
//! ```text
//! φ(t) = exp(-|σt|^α (1 - iβ sign(t) tan(πα/2)) + iμt)           α ≠ 1
//! φ(t) = exp(-σ|t| (1 + iβ (2/π) sign(t) ln|t|) + iμt)            α = 1
//! ```

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

mod density;
mod distribution;
mod sample;
mod zolotarev;

pub use density::{
    density_kernel, pdf, pdf_asymptotic, pdf_cf_quadrature, pdf_contour, pdf_eval, pdf_series_power,
    pdf_series_small_alpha, PdfEval, PdfMethod, SeriesEval,
};
pub(crate) use density::tce_power_sum;
pub use distribution::{cdf, cdf_eval, quantile, survival_series};
pub use sample::{draw, sample, standard_draw};
pub use zolotarev::{cdf_zolotarev, pdf_zolotarev};

/// Half-width of the band around α = 1 handled by CF quadrature.
pub const NEAR_ONE_BAND: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct StableParams {
    alpha: f64,
    beta: f64,
    sigma: f64,
    mu: f64,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    alpha: f64,
    beta: f64,
    sigma: f64,
    #[serde(default)]
    mu: f64,
}

impl TryFrom<RawParams> for StableParams {
    type Error = Error;
    fn try_from(r: RawParams) -> Result<Self> {
        StableParams::new(r.alpha, r.beta, r.sigma, r.mu)
    }
}

impl From<StableParams> for RawParams {
    fn from(p: StableParams) -> Self {
        RawParams { alpha: p.alpha, beta: p.beta, sigma: p.sigma, mu: p.mu }
    }
}

/// Skew constants shared by the density, distribution and TCE formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedSkew {
    /// tan(πα/2)
    pub a: f64,
    /// √(1 + (aβ)²)
    pub r: f64,
    /// arctan(aβ)
    pub phi: f64,
    /// 1/2 - φ/(απ)
    pub gamma_exp: f64,
    /// 1 - gamma_exp = P(X > μ)
    pub rho: f64,
    /// 1 - iβa
    pub xi: Complex64,
    /// σ r^{1/α}, the natural unit of the series and H-function arguments
    pub unit: f64,
}

impl StableParams {
    pub fn new(alpha: f64, beta: f64, sigma: f64, mu: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return invalid(format!("alpha must lie in (0, 2], got {alpha}"));
        }
        if !(-1.0..=1.0).contains(&beta) {
            return invalid(format!("beta must lie in [-1, 1], got {beta}"));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return invalid(format!("sigma must be positive and finite, got {sigma}"));
        }
        if !mu.is_finite() {
            return invalid(format!("mu must be finite, got {mu}"));
        }
        Ok(Self { alpha, beta, sigma, mu })
    }

    /// S_α(1, β, 0).
    pub fn standard(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(alpha, beta, 1.0, 0.0)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn sigma(&self) -> f64 {
        self.sigma
    }
    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn with_mu(self, mu: f64) -> Result<Self> {
        Self::new(self.alpha, self.beta, self.sigma, mu)
    }
    pub fn with_sigma(self, sigma: f64) -> Result<Self> {
        Self::new(self.alpha, self.beta, sigma, self.mu)
    }

    /// Law of -X.
    pub fn reflected(self) -> Self {
        Self { beta: -self.beta, mu: -self.mu, ..self }
    }

    pub fn is_gaussian(&self) -> bool {
        self.alpha == 2.0
    }

    pub fn near_one(&self) -> bool {
        (self.alpha - 1.0).abs() < NEAR_ONE_BAND
    }

    /// Mean for α > 1.
    pub fn mean(&self) -> Option<f64> {
        (self.alpha > 1.0).then_some(self.mu)
    }

    /// Skew constants; undefined at α = 1.
    pub fn skew(&self) -> Result<DerivedSkew> {
        if self.alpha == 1.0 {
            return invalid("skew constants are undefined at alpha = 1");
        }
        let a = if self.alpha == 2.0 { 0.0 } else { (FRAC_PI_2 * self.alpha).tan() };
        let ab = a * self.beta;
        let r = ab.hypot(1.0);
        let phi = ab.atan();
        let gamma_exp = 0.5 - phi / (self.alpha * PI);
        Ok(DerivedSkew {
            a,
            r,
            phi,
            gamma_exp,
            rho: 1.0 - gamma_exp,
            xi: Complex64::new(1.0, -ab),
            unit: self.sigma * r.powf(1.0 / self.alpha),
        })
    }
}

/// Characteristic function E[e^{itX}].
pub fn cf(p: &StableParams, t: f64) -> Complex64 {
    if t == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let (alpha, beta, sigma) = (p.alpha, p.beta, p.sigma);
    let exponent = if alpha == 1.0 {
        let st = sigma * t.abs();
        Complex64::new(-st, -st * beta * 2.0 / PI * t.signum() * t.abs().ln())
    } else {
        let a = if alpha == 2.0 { 0.0 } else { (FRAC_PI_2 * alpha).tan() };
        let m = (sigma * t.abs()).powf(alpha);
        Complex64::new(-m, m * beta * t.signum() * a)
    };
    (exponent + Complex64::new(0.0, t * p.mu)).exp()
}

/// Law of X₁ + X₂ for independent stable summands with a common α.
pub fn convolve(p1: &StableParams, p2: &StableParams) -> Result<StableParams> {
    if p1.alpha != p2.alpha {
        return Err(Error::AlphaMismatch(p1.alpha, p2.alpha));
    }
    let alpha = p1.alpha;
    let s1 = p1.sigma.powf(alpha);
    let s2 = p2.sigma.powf(alpha);
    let total = s1 + s2;
    let beta = ((p1.beta * s1 + p2.beta * s2) / total).clamp(-1.0, 1.0);
    StableParams::new(alpha, beta, total.powf(1.0 / alpha), p1.mu + p2.mu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn validation() {
        assert!(StableParams::new(0.0, 0.0, 1.0, 0.0).is_err());
        assert!(StableParams::new(2.1, 0.0, 1.0, 0.0).is_err());
        assert!(StableParams::new(1.5, 1.1, 1.0, 0.0).is_err());
        assert!(StableParams::new(1.5, 0.0, 0.0, 0.0).is_err());
        assert!(StableParams::new(1.5, 0.0, 1.0, f64::NAN).is_err());
        assert!(StableParams::new(2.0, -1.0, 3.0, -2.0).is_ok());
    }

    #[test]
    fn serde_round_trip_validates() {
        let p = StableParams::new(1.7, 0.5, 2.0, -1.0).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        let back: StableParams = serde_json::from_str(&s).unwrap();
        assert_eq!(p, back);
        let bad = r#"{"alpha": 2.5, "beta": 0.0, "sigma": 1.0}"#;
        assert!(serde_json::from_str::<StableParams>(bad).is_err());
    }

    #[test]
    fn skew_constants() {
        let g = StableParams::standard(2.0, 1.0).unwrap().skew().unwrap();
        assert_eq!(g.a, 0.0);
        assert_eq!(g.r, 1.0);
        assert_eq!(g.gamma_exp, 0.5);
        let s = StableParams::standard(1.5, 1.0).unwrap().skew().unwrap();
        assert_relative_eq!(s.a, -1.0, max_relative = 1e-14);
        assert_relative_eq!(s.r, 2f64.sqrt(), max_relative = 1e-14);
        // β = 1, α > 1: ρ = 1 - 1/α
        assert_relative_eq!(s.rho, 1.0 - 1.0 / 1.5, max_relative = 1e-14);
        let levy = StableParams::standard(0.5, 1.0).unwrap().skew().unwrap();
        assert_relative_eq!(levy.rho, 1.0, max_relative = 1e-14);
        assert!(StableParams::standard(1.0, 0.0).unwrap().skew().is_err());
    }

    #[test]
    fn cf_examples() {
        let g = StableParams::standard(2.0, 0.0).unwrap();
        assert_eq!(cf(&g, 0.0), Complex64::new(1.0, 0.0));
        assert_relative_eq!(cf(&g, 1.0).re, (-1f64).exp(), max_relative = 1e-15);
        let p = StableParams::standard(1.5, 1.0).unwrap();
        let v = cf(&p, 1.0);
        assert_relative_eq!(v.norm(), (-1f64).exp(), max_relative = 1e-14);
        assert_relative_eq!(v.arg(), -1.0, max_relative = 1e-13);
        let c = StableParams::new(1.0, 0.5, 2.0, 0.3).unwrap();
        assert_relative_eq!(cf(&c, 2.0).norm(), (-4f64).exp(), max_relative = 1e-14);
    }

    #[test]
    fn convolution_rule() {
        let p = StableParams::standard(1.5, 1.0).unwrap();
        let s = convolve(&p, &p).unwrap();
        assert_relative_eq!(s.sigma(), 2f64.powf(2.0 / 3.0), max_relative = 1e-14);
        assert_eq!(s.beta(), 1.0);
        let q = StableParams::standard(1.5, -1.0).unwrap();
        assert_eq!(convolve(&p, &q).unwrap().beta(), 0.0);
        let r = StableParams::standard(1.7, 0.0).unwrap();
        assert!(matches!(convolve(&p, &r), Err(Error::AlphaMismatch(_, _))));

        let a = StableParams::new(1.3, 0.4, 0.7, 1.0).unwrap();
        let b = StableParams::new(1.3, -0.9, 1.8, -0.2).unwrap();
        let ab = convolve(&a, &b).unwrap();
        for t in [0.3, 1.0, 2.7] {
            let lhs = cf(&ab, t);
            let rhs = cf(&a, t) * cf(&b, t);
            assert!((lhs - rhs).norm() < 1e-14);
        }
        let c1 = StableParams::new(1.0, 0.4, 0.7, 1.0).unwrap();
        let c2 = StableParams::new(1.0, -0.9, 1.8, -0.2).unwrap();
        let c12 = convolve(&c1, &c2).unwrap();
        for t in [-1.3, 0.3, 2.7] {
            assert!((cf(&c12, t) - cf(&c1, t) * cf(&c2, t)).norm() < 1e-14);
        }
    }

    proptest! {
        #[test]
        fn cf_modulus_is_skew_free(
            alpha in 0.1f64..=2.0, beta in -1.0f64..=1.0,
            sigma in 0.1f64..5.0, mu in -5.0f64..5.0, t in -10.0f64..10.0,
        ) {
            let p = StableParams::new(alpha, beta, sigma, mu).unwrap();
            let expect = if alpha == 1.0 { -(sigma * t.abs()) } else { -(sigma * t.abs()).powf(alpha) };
            let m = cf(&p, t).norm();
            prop_assert!((m - expect.exp()).abs() <= 1e-14);
        }

        #[test]
        fn skew_exponent_range(alpha in 0.1f64..=2.0, beta in -1.0f64..=1.0) {
            prop_assume!(alpha != 1.0);
            let s = StableParams::standard(alpha, beta).unwrap().skew().unwrap();
            prop_assert!(s.r >= 1.0);
            let half_width = 0.5 * alpha.min(2.0 - alpha) / alpha;
            prop_assert!(s.gamma_exp >= 0.5 - half_width - 1e-12);
            prop_assert!(s.gamma_exp <= 0.5 + half_width + 1e-12);
        }
    }
}

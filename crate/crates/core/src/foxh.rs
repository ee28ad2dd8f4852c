//! Fox H-functions.
//!
//! An [`FoxH`] stores the order `(m, n, p, q)`, the upper pairs `(a_j, A_j)`,
//! the lower pairs `(b_j, B_j)` and a scalar prefactor. Its value at `z > 0`
//! is the Mellin–Barnes integral
//!
//! ```text
//! prefactor / (2πi) ∫_{c-i∞}^{c+i∞} M(s) z^{-s} ds,
//! M(s) = Π_{j≤m} Γ(b_j + B_j s) Π_{j≤n} Γ(1 - a_j - A_j s)
//!      / (Π_{j>m} Γ(1 - b_j - B_j s) Π_{j>n} Γ(a_j + A_j s)),
//! ```
//!
//! evaluated on the vertical line `re s = c` with `s = c + it`, truncated to
//! `|t| <= half_width` and integrated with composite 16-point Gauss–Legendre
//! panels.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::GaussLegendre;
use crate::special::log_gamma;

/// Relative magnitude at which the integrand is considered negligible when
/// choosing the truncation bound.
pub const TRUNCATION_FLOOR: f64 = 1e-14;
/// Endpoint-to-peak ratio above which an evaluation is flagged as truncated.
pub const TRUNCATION_WARNING: f64 = 1e-12;
const MAX_HALF_WIDTH: f64 = 1e5;
const MIN_STEPS: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct FoxH {
    m: usize,
    n: usize,
    upper: Vec<(f64, f64)>,
    lower: Vec<(f64, f64)>,
    prefactor: f64,
}

/// Vertical integration line and its truncation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourSpec {
    pub c: f64,
    pub half_width: f64,
    pub steps: usize,
}

/// Result of a contour inversion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourEval {
    /// Real part of the inversion, prefactor included.
    pub value: f64,
    /// Magnitude of the imaginary part (zero for an exact real inversion).
    pub imag_residue: f64,
    /// Largest integrand magnitude at the truncation points over the peak.
    pub endpoint_ratio: f64,
    pub contour: ContourSpec,
}

impl ContourEval {
    /// False when the truncated tails may carry more than the warning floor.
    pub fn converged(&self) -> bool {
        self.endpoint_ratio <= TRUNCATION_WARNING
    }
}

impl FoxH {
    pub fn new(m: usize, n: usize, upper: Vec<(f64, f64)>, lower: Vec<(f64, f64)>) -> Result<Self> {
        let h = Self { m, n, upper, lower, prefactor: 1.0 };
        h.validate()?;
        Ok(h)
    }

    fn validate(&self) -> Result<()> {
        if self.m > self.lower.len() || self.n > self.upper.len() {
            return Err(Error::InvalidParameter(format!(
                "H-function order requires m <= q and n <= p (m={}, n={}, p={}, q={})",
                self.m,
                self.n,
                self.upper.len(),
                self.lower.len()
            )));
        }
        let all = self.upper.iter().chain(&self.lower);
        for &(coef, scale) in all {
            if !(coef.is_finite() && scale.is_finite() && scale > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "H-function pair ({coef}, {scale}) needs finite coefficient and positive scale"
                )));
            }
        }
        if !(self.prefactor.is_finite()) {
            return Err(Error::InvalidParameter("non-finite prefactor".into()));
        }
        Ok(())
    }

    pub fn m(&self) -> usize {
        self.m
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn p(&self) -> usize {
        self.upper.len()
    }
    pub fn q(&self) -> usize {
        self.lower.len()
    }
    pub fn upper(&self) -> &[(f64, f64)] {
        &self.upper
    }
    pub fn lower(&self) -> &[(f64, f64)] {
        &self.lower
    }
    pub fn prefactor(&self) -> f64 {
        self.prefactor
    }

    pub fn with_prefactor(mut self, prefactor: f64) -> Self {
        self.prefactor = prefactor;
        self
    }

    /// Gamma-ratio kernel M(s), prefactor excluded. Zero where a denominator
    /// gamma has a pole.
    pub fn mellin_integrand(&self, s: Complex64) -> Result<Complex64> {
        let one = Complex64::new(1.0, 0.0);
        let mut log_num = Complex64::new(0.0, 0.0);
        for &(b, bb) in &self.lower[..self.m] {
            log_num += log_gamma(s * bb + b)?;
        }
        for &(a, aa) in &self.upper[..self.n] {
            log_num += log_gamma(one - a - s * aa)?;
        }
        let mut log_den = Complex64::new(0.0, 0.0);
        for &(b, bb) in &self.lower[self.m..] {
            match log_gamma(one - b - s * bb) {
                Ok(v) => log_den += v,
                Err(Error::Pole { .. }) => return Ok(Complex64::new(0.0, 0.0)),
                Err(e) => return Err(e),
            }
        }
        for &(a, aa) in &self.upper[self.n..] {
            match log_gamma(s * aa + a) {
                Ok(v) => log_den += v,
                Err(Error::Pole { .. }) => return Ok(Complex64::new(0.0, 0.0)),
                Err(e) => return Err(e),
            }
        }
        Ok((log_num - log_den).exp())
    }

    /// Open interval of admissible abscissae: right of every pole of
    /// Γ(b_j + B_j s) (j ≤ m), left of every pole of Γ(1 - a_j - A_j s) (j ≤ n).
    pub fn admissible_strip(&self) -> (f64, f64) {
        let lo = self.lower[..self.m]
            .iter()
            .map(|&(b, bb)| -b / bb)
            .fold(f64::NEG_INFINITY, f64::max);
        let hi = self.upper[..self.n]
            .iter()
            .map(|&(a, aa)| (1.0 - a) / aa)
            .fold(f64::INFINITY, f64::min);
        (lo, hi)
    }

    /// Midpoint of the admissible strip (one unit inside when half-open).
    pub fn default_abscissa(&self) -> Result<f64> {
        let (lo, hi) = self.admissible_strip();
        if lo >= hi {
            return Err(Error::InvalidContour(format!(
                "pole families overlap: strip ({lo}, {hi}) is empty"
            )));
        }
        Ok(match (lo.is_finite(), hi.is_finite()) {
            (true, true) => 0.5 * (lo + hi),
            (true, false) => lo + 1.0,
            (false, true) => hi - 1.0,
            (false, false) => 0.0,
        })
    }

    fn check_contour(&self, contour: &ContourSpec) -> Result<()> {
        let (lo, hi) = self.admissible_strip();
        if !(contour.c > lo && contour.c < hi) {
            return Err(Error::InvalidContour(format!(
                "abscissa {} outside the pole-free strip ({lo}, {hi})",
                contour.c
            )));
        }
        if !(contour.half_width > 0.0 && contour.half_width.is_finite()) {
            return Err(Error::InvalidContour("half_width must be positive".into()));
        }
        if contour.steps < MIN_STEPS {
            return Err(Error::InvalidContour(format!("steps must be >= {MIN_STEPS}")));
        }
        Ok(())
    }

    /// Contour at the default abscissa with an adaptive truncation bound:
    /// the smallest half-width past which |M(c ± it)| e^{growth·|t|} stays
    /// below [`TRUNCATION_FLOOR`] times its peak near the real axis.
    pub fn default_contour(&self, log_z: f64, growth: f64) -> Result<ContourSpec> {
        let c = self.default_abscissa()?;
        self.contour_at(c, log_z, growth)
    }

    pub(crate) fn contour_at(&self, c: f64, log_z: f64, growth: f64) -> Result<ContourSpec> {
        let weight = |t: f64| -> Result<f64> {
            let up = self.mellin_integrand(Complex64::new(c, t))?.norm();
            let down = self.mellin_integrand(Complex64::new(c, -t))?.norm();
            Ok(up.max(down) * (growth * t).exp())
        };
        let mut peak = 0.0f64;
        for t in [0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0] {
            peak = peak.max(weight(t)?);
        }
        if peak == 0.0 || !peak.is_finite() {
            return Err(Error::InvalidContour("integrand vanishes or overflows near the real axis".into()));
        }
        let small = |t: f64| -> Result<bool> { Ok(weight(t)? <= TRUNCATION_FLOOR * peak) };
        let mut hi = 4.0;
        while !(small(hi)? && small(1.5 * hi)? && small(2.0 * hi)?) {
            hi *= 2.0;
            if hi > MAX_HALF_WIDTH {
                hi = MAX_HALF_WIDTH;
                break;
            }
        }
        let mut lo = 0.5 * hi;
        if hi < MAX_HALF_WIDTH && small(lo)? {
            lo = 0.0;
        }
        for _ in 0..20 {
            if hi - lo < 0.5 {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if small(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let half_width = hi;
        let spread: f64 = self.upper.iter().chain(&self.lower).map(|p| p.1).sum();
        let rate = log_z.abs() + spread * (2.0 + half_width).ln() + 1.0;
        let width = (4.0 / rate).min(1.0);
        let steps = ((2.0 * half_width / width).ceil() as usize).max(MIN_STEPS);
        Ok(ContourSpec { c, half_width, steps })
    }

    /// Real-argument inversion with a caller-supplied contour.
    pub fn eval_contour(&self, z: f64, contour: &ContourSpec) -> Result<ContourEval> {
        if !(z > 0.0 && z.is_finite()) {
            return Err(Error::InvalidParameter(format!("H-function argument must be positive, got {z}")));
        }
        let (v, ratio) = self.integrate_line(Complex64::new(z.ln(), 0.0), contour)?;
        Ok(ContourEval {
            value: self.prefactor * v.re,
            imag_residue: (self.prefactor * v.im).abs(),
            endpoint_ratio: ratio,
            contour: *contour,
        })
    }

    /// Real-argument inversion on the default contour.
    pub fn eval(&self, z: f64) -> Result<ContourEval> {
        if !(z > 0.0 && z.is_finite()) {
            return Err(Error::InvalidParameter(format!("H-function argument must be positive, got {z}")));
        }
        let contour = self.default_contour(z.ln(), 0.0)?;
        self.eval_contour(z, &contour)
    }

    /// Inversion at a complex argument `w` (principal branch of `w^{-s}`).
    /// Converges only while |arg w| is below the kernel's exponential decay
    /// rate.
    pub fn eval_complex(&self, w: Complex64) -> Result<Complex64> {
        if w.norm() == 0.0 || !w.norm().is_finite() {
            return Err(Error::InvalidParameter("complex H-function argument must be non-zero".into()));
        }
        let log_w = w.ln();
        let contour = self.default_contour(log_w.re, log_w.im.abs())?;
        let (v, _) = self.integrate_line(log_w, &contour)?;
        Ok(v * self.prefactor)
    }

    /// (1/2π) ∫ M(c+it) e^{-(c+it) log_w} dt over the truncated line. Returns
    /// the integral and the endpoint-to-peak magnitude ratio.
    fn integrate_line(&self, log_w: Complex64, contour: &ContourSpec) -> Result<(Complex64, f64)> {
        self.check_contour(contour)?;
        let rule = GaussLegendre::sixteen();
        let b = contour.half_width;
        let width = 2.0 * b / contour.steps as f64;
        let mut total = Complex64::new(0.0, 0.0);
        let mut peak = 0.0f64;
        for k in 0..contour.steps {
            let t0 = -b + width * k as f64;
            let mid = t0 + 0.5 * width;
            let mut panel = Complex64::new(0.0, 0.0);
            for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                let t = mid + 0.5 * width * x;
                let s = Complex64::new(contour.c, t);
                let val = self.mellin_integrand(s)? * (-s * log_w).exp();
                peak = peak.max(val.norm());
                panel += val * *w;
            }
            total += panel * (0.5 * width);
        }
        let edge = |t: f64| -> Result<f64> {
            let s = Complex64::new(contour.c, t);
            Ok((self.mellin_integrand(s)? * (-s * log_w).exp()).norm())
        };
        let end = edge(b)?.max(edge(-b)?);
        let ratio = if peak > 0.0 { end / peak } else { 0.0 };
        Ok((total / (2.0 * PI), ratio))
    }

    /// H[z^c; self] = H[z; result] for `c > 0` (the 1/c is carried in the
    /// prefactor).
    pub fn transform_power_arg(&self, c: f64) -> Result<FoxH> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!("power transform needs c > 0, got {c}")));
        }
        Ok(FoxH {
            m: self.m,
            n: self.n,
            upper: self.upper.iter().map(|&(a, aa)| (a, aa / c)).collect(),
            lower: self.lower.iter().map(|&(b, bb)| (b, bb / c)).collect(),
            prefactor: self.prefactor / c,
        })
    }

    /// H[1/z; self] = H[z; result].
    pub fn transform_reciprocal(&self) -> FoxH {
        FoxH {
            m: self.n,
            n: self.m,
            upper: self.lower.iter().map(|&(b, bb)| (1.0 - b, bb)).collect(),
            lower: self.upper.iter().map(|&(a, aa)| (1.0 - a, aa)).collect(),
            prefactor: self.prefactor,
        }
    }

    /// z^d H[z; self] = H[z; result].
    pub fn multiply_power(&self, d: f64) -> FoxH {
        FoxH {
            m: self.m,
            n: self.n,
            upper: self.upper.iter().map(|&(a, aa)| (a + d * aa, aa)).collect(),
            lower: self.lower.iter().map(|&(b, bb)| (b + d * bb, bb)).collect(),
            prefactor: self.prefactor,
        }
    }

    /// Laplace transform: the result evaluated at `r / scale` equals
    /// ∫_0^∞ e^{-rt} H[scale·t; self] dt.
    ///
    /// The image is (1/scale) H^{n+1,m}_{q,p+1} with upper pairs
    /// (1 - b_j - B_j, B_j) and lower pairs (0, 1), (1 - a_j - A_j, A_j).
    pub fn laplace(&self, scale: f64) -> Result<FoxH> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidParameter(format!("Laplace scale must be positive, got {scale}")));
        }
        // Numerator order on each side: the new Γ(s) pair joins the m-block,
        // the old upper pairs follow it in their original order.
        let lower_m: Vec<(f64, f64)> = std::iter::once((0.0, 1.0))
            .chain(self.upper[..self.n].iter().map(|&(a, aa)| (1.0 - a - aa, aa)))
            .chain(self.upper[self.n..].iter().map(|&(a, aa)| (1.0 - a - aa, aa)))
            .collect();
        let upper: Vec<(f64, f64)> = self.lower.iter().map(|&(b, bb)| (1.0 - b - bb, bb)).collect();
        Ok(FoxH {
            m: self.n + 1,
            n: self.m,
            upper,
            lower: lower_m,
            prefactor: self.prefactor / scale,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn exp_pair() -> FoxH {
        FoxH::new(1, 0, vec![], vec![(0.0, 1.0)]).unwrap()
    }

    #[test]
    fn integrand_examples() {
        let h = exp_pair();
        let v = h.mellin_integrand(Complex64::new(1.0, 0.0)).unwrap();
        assert_relative_eq!(v.re, 1.0, max_relative = 1e-14);
        assert!(matches!(
            h.mellin_integrand(Complex64::new(0.0, 0.0)),
            Err(Error::Pole { .. })
        ));
        // Γ(s) Γ((1-s)/α) with upper (1 - 1/α, 1/α), α = 2, at s = 1/2 is Γ(1/2)Γ(1/4)
        let h2 = FoxH::new(1, 1, vec![(0.5, 0.5)], vec![(0.0, 1.0)]).unwrap();
        let v = h2.mellin_integrand(Complex64::new(0.5, 0.0)).unwrap();
        assert_relative_eq!(v.re, 6.426_226_243_709_115_922_5, max_relative = 1e-13);
    }

    #[test]
    fn exponential_pair() {
        let h = exp_pair();
        let e1 = h.eval(1.0).unwrap();
        assert!((e1.value - (-1f64).exp()).abs() < 1e-8);
        assert!(e1.imag_residue <= 1e-8 * e1.value.abs());
        assert!(e1.converged());
        let e3 = h.eval(3.0).unwrap();
        assert!((e3.value - (-3f64).exp()).abs() < 1e-8);
    }

    #[test]
    fn half_scale_pair_is_gaussian_kernel() {
        // (1/2) H^{1,0}_{0,1}[z | (0, 1/2)] = e^{-z^2}
        let h = FoxH::new(1, 0, vec![], vec![(0.0, 0.5)]).unwrap().with_prefactor(0.5);
        let v = h.eval(1.0).unwrap().value;
        assert!((v - (-1f64).exp()).abs() < 1e-8);
    }

    #[test]
    fn invalid_inputs() {
        assert!(FoxH::new(2, 0, vec![], vec![(0.0, 1.0)]).is_err());
        assert!(FoxH::new(1, 0, vec![], vec![(0.0, -1.0)]).is_err());
        let h = exp_pair();
        let bad = ContourSpec { c: -0.5, half_width: 10.0, steps: 32 };
        assert!(matches!(h.eval_contour(1.0, &bad), Err(Error::InvalidContour(_))));
        let few = ContourSpec { c: 1.0, half_width: 10.0, steps: 4 };
        assert!(matches!(h.eval_contour(1.0, &few), Err(Error::InvalidContour(_))));
        assert!(h.eval(0.0).is_err());
        // overlapping pole families: Γ(s) Γ(-1 - s) has an empty strip
        let overlap = FoxH::new(1, 1, vec![(2.0, 1.0)], vec![(0.0, 1.0)]).unwrap();
        assert!(matches!(overlap.default_abscissa(), Err(Error::InvalidContour(_))));
    }

    #[test]
    fn truncation_flag_on_short_contour() {
        let h = exp_pair();
        let short = ContourSpec { c: 1.0, half_width: 2.0, steps: 16 };
        let e = h.eval_contour(1.0, &short).unwrap();
        assert!(!e.converged());
    }

    #[test]
    fn self_convergence_under_refinement() {
        let h = exp_pair();
        for z in [0.5, 1.0, 3.0] {
            let base = h.default_contour(f64::ln(z), 0.0).unwrap();
            let v0 = h.eval_contour(z, &base).unwrap().value;
            let finer = ContourSpec { steps: base.steps * 2, ..base };
            let wider = ContourSpec { half_width: base.half_width * 2.0, steps: base.steps * 2, ..base };
            assert!((h.eval_contour(z, &finer).unwrap().value - v0).abs() < 1e-9);
            assert!((h.eval_contour(z, &wider).unwrap().value - v0).abs() < 1e-9);
        }
    }

    #[test]
    fn power_transform_parameters() {
        let h = exp_pair();
        let same = h.transform_power_arg(1.0).unwrap();
        assert_eq!(same, h);
        let t = h.transform_power_arg(2.0).unwrap();
        assert_eq!(t.lower(), &[(0.0, 0.5)]);
        assert_relative_eq!(t.prefactor(), 0.5);
        assert!(h.transform_power_arg(0.0).is_err());
        // H[z^2] = e^{-z^2} at z = 1.3
        let z: f64 = 1.3;
        let v = t.eval(z).unwrap().value;
        assert!((v - (-z * z).exp()).abs() < 1e-8);
    }

    #[test]
    fn reciprocal_involution_and_value() {
        let h = FoxH::new(1, 1, vec![(0.375, 0.75)], vec![(0.125, 1.25)]).unwrap();
        assert_eq!(h.transform_reciprocal().transform_reciprocal(), h);
        let r = exp_pair().transform_reciprocal();
        assert_eq!((r.m(), r.n(), r.p(), r.q()), (0, 1, 1, 0));
        assert_eq!(r.upper(), &[(1.0, 1.0)]);
        let v = r.eval(2.0).unwrap().value;
        assert!((v - (-0.5f64).exp()).abs() < 1e-8);
    }

    #[test]
    fn multiply_power_parameters() {
        let h = FoxH::new(1, 1, vec![(0.3, 0.7)], vec![(0.1, 1.2)]).unwrap();
        assert_eq!(h.multiply_power(0.0), h);
        let g = h.multiply_power(-0.5);
        assert_relative_eq!(g.upper()[0].0, 0.3 - 0.35);
        assert_relative_eq!(g.lower()[0].0, 0.1 - 0.6);
        // z e^{-z} = H^{1,0}_{0,1}[z | (1, 1)]
        let zexp = exp_pair().multiply_power(1.0);
        assert_eq!(zexp.lower(), &[(1.0, 1.0)]);
        assert!((zexp.eval(1.0).unwrap().value - (-1f64).exp()).abs() < 1e-8);
    }

    #[test]
    fn laplace_of_exponential() {
        let l = exp_pair().laplace(1.0).unwrap();
        assert_eq!((l.m(), l.n(), l.p(), l.q()), (1, 1, 1, 1));
        assert!((l.eval(1.0).unwrap().value - 0.5).abs() < 1e-8);
        assert!((l.eval(1e-6).unwrap().value - 1.0).abs() < 1e-5);
        // ∫ e^{-rt} e^{-3t} dt = 1/(r+3)
        let l3 = exp_pair().laplace(3.0).unwrap();
        assert!((l3.eval(2.0 / 3.0).unwrap().value - 0.2).abs() < 1e-9);
        assert!(exp_pair().laplace(0.0).is_err());
    }

    #[test]
    fn complex_argument_matches_closed_form() {
        // H^{1,1}_{1,1}[w | (0,1); (0,1)] = 1/(1+w)
        let h = FoxH::new(1, 1, vec![(0.0, 1.0)], vec![(0.0, 1.0)]).unwrap();
        let w = Complex64::from_polar(1.7, 0.6);
        let v = h.eval_complex(w).unwrap();
        let expect = Complex64::new(1.0, 0.0) / (w + 1.0);
        assert!((v - expect).norm() < 1e-9 * expect.norm());
    }

    proptest! {
        #[test]
        fn default_contour_separates_poles(
            b1 in -2.0f64..2.0, bb1 in 0.1f64..3.0,
            a1 in -2.0f64..2.0, aa1 in 0.1f64..3.0,
            a2 in -1.0f64..2.0, aa2 in 0.1f64..2.0,
        ) {
            let h = FoxH::new(1, 1, vec![(a1, aa1), (a2, aa2)], vec![(b1, bb1), (a2, aa2)]).unwrap();
            let (lo, hi) = h.admissible_strip();
            prop_assume!(lo < hi);
            let c = h.default_abscissa().unwrap();
            prop_assert!(c > lo && c < hi);
            // no numerator pole on the line re s = c
            for k in 0..50 {
                let left = -(b1 + k as f64) / bb1;
                let right = (1.0 - a1 + k as f64) / aa1;
                prop_assert!((left - c).abs() > 1e-12);
                prop_assert!((right - c).abs() > 1e-12);
            }
            prop_assert!(h.mellin_integrand(Complex64::new(c, 0.0)).is_ok());
        }
    }
}

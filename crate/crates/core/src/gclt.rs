//! Multi-line portfolios driven by Pareto-tailed idiosyncratic and market
//! factors, and their stable approximation.
//!
//! Line i over n policies carries the loss Σ_j (a_i I_ij + b_i M_j). For
//! Pareto factors with P(Y > y) ~ C y^{-α}, 1 < α < 2,
//!
//! ```text
//! Σ_{j≤n} Y_j ≈ n E[Y] + p_n Z,   p_n = [π C n / (2 Γ(α) sin(απ/2))]^{1/α},
//! ```
//!
//! with Z ~ S_α(1, 1, 0).

use std::f64::consts::PI;

use rand::distr::Open01;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::rng;
use crate::special::gamma_real;
use crate::vector::{SpectralMeasure, SpectralPoint};

const TAIL_TOL: f64 = 1e-12;

/// Pareto factor `scale · U^{-1/α} + shift`, shifted so that its mean is
/// `mean` when one is given.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParetoFactor {
    tail_index: f64,
    scale: f64,
    right_constant: f64,
    left_constant: f64,
    mean: Option<f64>,
}

impl ParetoFactor {
    pub fn new(tail_index: f64, scale: f64, mean: Option<f64>) -> Result<Self> {
        if !(tail_index > 1.0 && tail_index < 2.0) {
            return invalid(format!("Pareto tail index must lie in (1, 2), got {tail_index}"));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return invalid(format!("Pareto scale must be positive, got {scale}"));
        }
        if mean.is_some_and(|m| !m.is_finite()) {
            return invalid("Pareto mean must be finite");
        }
        Ok(Self { tail_index, scale, right_constant: scale.powf(tail_index), left_constant: 0.0, mean })
    }

    /// As [`ParetoFactor::new`], checking a stated tail constant against
    /// `scale^α`.
    pub fn with_right_constant(tail_index: f64, scale: f64, right_constant: f64, mean: Option<f64>) -> Result<Self> {
        let f = Self::new(tail_index, scale, mean)?;
        if !((right_constant - f.right_constant).abs() <= 1e-9 * f.right_constant) {
            return invalid(format!(
                "right_constant {right_constant} disagrees with scale^alpha = {}",
                f.right_constant
            ));
        }
        Ok(f)
    }

    pub fn tail_index(&self) -> f64 {
        self.tail_index
    }
    pub fn scale(&self) -> f64 {
        self.scale
    }
    pub fn right_constant(&self) -> f64 {
        self.right_constant
    }
    pub fn left_constant(&self) -> f64 {
        self.left_constant
    }

    pub fn mean(&self) -> f64 {
        self.mean.unwrap_or_else(|| self.natural_mean())
    }

    fn natural_mean(&self) -> f64 {
        self.tail_index * self.scale / (self.tail_index - 1.0)
    }

    fn shift(&self) -> f64 {
        self.mean() - self.natural_mean()
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.sample(Open01);
        self.scale * (-u.ln() / self.tail_index).exp() + self.shift()
    }
}

/// (p_n, q_n) so that (Σ_{j≤n} Y_j - n q_n)/p_n → S_α(1, β, 0).
pub fn norming_constants(f: &ParetoFactor, n: u64) -> Result<(f64, f64)> {
    let alpha = f.tail_index;
    if alpha == 1.0 || alpha == 2.0 {
        return invalid("norming constants are undefined at tail index 1 or 2");
    }
    if n == 0 {
        return invalid("n must be at least 1");
    }
    let c = f.right_constant + f.left_constant;
    let denom = 2.0 * gamma_real(alpha)? * (PI * alpha / 2.0).sin();
    let p_n = (PI * c * n as f64 / denom).powf(1.0 / alpha);
    let q_n = if alpha > 1.0 { f.mean() } else { 0.0 };
    Ok((p_n, q_n))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PortfolioLine {
    pub a_exposure: f64,
    pub b_exposure: f64,
    pub idiosyncratic: ParetoFactor,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PortfolioModel {
    lines: Vec<PortfolioLine>,
    market: ParetoFactor,
    policies_per_line: u64,
}

/// True iff all tail indices agree within 1e-12.
pub fn check_common_tail(tail_indices: &[f64]) -> bool {
    match tail_indices.first() {
        Some(&first) => tail_indices.iter().all(|&a| (a - first).abs() <= TAIL_TOL),
        None => true,
    }
}

/// The prudent common index for mixed tails: the heaviest observed one.
pub fn prudent_tail_index(tail_indices: &[f64]) -> Option<f64> {
    tail_indices.iter().copied().reduce(f64::min)
}

impl PortfolioModel {
    pub fn new(lines: Vec<PortfolioLine>, market: ParetoFactor, policies_per_line: u64) -> Result<Self> {
        if lines.is_empty() {
            return invalid("portfolio needs at least one line");
        }
        if policies_per_line == 0 {
            return invalid("policies_per_line must be at least 1");
        }
        for (i, l) in lines.iter().enumerate() {
            if !(l.a_exposure >= 0.0 && l.a_exposure.is_finite() && l.b_exposure >= 0.0 && l.b_exposure.is_finite()) {
                return invalid(format!("line {i}: exposures must be finite and non-negative"));
            }
        }
        if lines.iter().all(|l| l.a_exposure == 0.0 && l.b_exposure == 0.0) {
            return invalid("all exposures are zero");
        }
        let alpha = market.tail_index;
        for l in &lines {
            if (l.idiosyncratic.tail_index - alpha).abs() > TAIL_TOL {
                return Err(Error::AlphaMismatch(alpha, l.idiosyncratic.tail_index));
            }
        }
        Ok(Self { lines, market, policies_per_line })
    }

    pub fn lines(&self) -> &[PortfolioLine] {
        &self.lines
    }
    pub fn market(&self) -> &ParetoFactor {
        &self.market
    }
    pub fn policies_per_line(&self) -> u64 {
        self.policies_per_line
    }
    pub fn alpha(&self) -> f64 {
        self.market.tail_index
    }
    pub fn dim(&self) -> usize {
        self.lines.len()
    }

    pub fn with_policies(&self, n: u64) -> Result<Self> {
        Self::new(self.lines.clone(), self.market.clone(), n)
    }

    /// Stable approximation of the aggregate line losses over n policies,
    /// returned as a centered spectral measure plus the per-line means.
    pub fn build_stable_approximation(&self) -> Result<(SpectralMeasure, Vec<f64>)> {
        let d = self.dim();
        let alpha = self.alpha();
        let n = self.policies_per_line;
        let (p_m, q_m) = norming_constants(&self.market, n)?;
        let mut points = Vec::with_capacity(d + 1);
        let mut means = Vec::with_capacity(d);
        for (i, l) in self.lines.iter().enumerate() {
            let (p_i, q_i) = norming_constants(&l.idiosyncratic, n)?;
            if l.a_exposure > 0.0 {
                let mut e = vec![0.0; d];
                e[i] = 1.0;
                points.push(SpectralPoint::new(e, (l.a_exposure * p_i).powf(alpha))?);
            }
            means.push(n as f64 * (l.a_exposure * q_i + l.b_exposure * q_m));
        }
        let b: Vec<f64> = self.lines.iter().map(|l| l.b_exposure).collect();
        let b_norm = b.iter().map(|x| x * x).sum::<f64>().sqrt();
        if b_norm > 0.0 {
            points.push(SpectralPoint::normalized(b, (b_norm * p_m).powf(alpha))?);
        }
        Ok((SpectralMeasure::new(alpha, points, vec![0.0; d])?, means))
    }

    /// `trials` draws of the per-line sums over n policies, in loss units,
    /// minus n·E[line loss] when `centered`.
    pub fn simulate_finite_n(&self, seed: u64, trials: usize, centered: bool) -> Vec<Vec<f64>> {
        let d = self.dim();
        let n = self.policies_per_line;
        let center: Vec<f64> = if centered {
            self.lines
                .iter()
                .map(|l| n as f64 * (l.a_exposure * l.idiosyncratic.mean() + l.b_exposure * self.market.mean()))
                .collect()
        } else {
            vec![0.0; d]
        };
        let any_market = self.lines.iter().any(|l| l.b_exposure > 0.0);
        (0..trials)
            .into_par_iter()
            .map(|t| {
                let mut r = rng::stream(seed, t as u64);
                let mut idio = vec![0.0; d];
                let mut market = 0.0;
                for _ in 0..n {
                    for (acc, l) in idio.iter_mut().zip(&self.lines) {
                        if l.a_exposure > 0.0 {
                            *acc += l.idiosyncratic.draw(&mut r);
                        }
                    }
                    if any_market {
                        market += self.market.draw(&mut r);
                    }
                }
                self.lines
                    .iter()
                    .zip(idio)
                    .zip(&center)
                    .map(|((l, s), c)| l.a_exposure * s + l.b_exposure * market - c)
                    .collect()
            })
            .collect()
    }
}

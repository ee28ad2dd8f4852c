//! Stable random vectors with a discrete spectral measure.
//!
//! A measure with atoms `(s_j, w_j)` on the unit sphere and shift μ has
//! characteristic function
//!
//! ```text
//! E e^{i⟨τ,X⟩} = exp(-Σ_j w_j |⟨τ,s_j⟩|^α (1 - i sign⟨τ,s_j⟩ tan(πα/2)) + i⟨μ,τ⟩)
//! ```
//!
//! and the representation X = Σ_j s_j w_j^{1/α} Z_j + μ with Z_j i.i.d.
//! S_α(1, 1, 0).

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rng;
use crate::stable::{standard_draw, StableParams};

const UNIT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPoint")]
pub struct SpectralPoint {
    direction: Vec<f64>,
    weight: f64,
}

#[derive(Deserialize)]
struct RawPoint {
    direction: Vec<f64>,
    weight: f64,
}

impl TryFrom<RawPoint> for SpectralPoint {
    type Error = Error;
    fn try_from(r: RawPoint) -> Result<Self> {
        SpectralPoint::new(r.direction, r.weight)
    }
}

impl SpectralPoint {
    pub fn new(direction: Vec<f64>, weight: f64) -> Result<Self> {
        if !(weight > 0.0 && weight.is_finite()) {
            return invalid(format!("spectral weight must be positive, got {weight}"));
        }
        if direction.is_empty() || direction.iter().any(|v| !v.is_finite()) {
            return invalid("spectral direction must be a non-empty finite vector");
        }
        let norm = norm(&direction);
        if (norm - 1.0).abs() > UNIT_TOL {
            return invalid(format!("spectral direction must be a unit vector, norm is {norm}"));
        }
        Ok(Self { direction, weight })
    }

    /// Atom at `v/|v|` with the given weight.
    pub fn normalized(v: Vec<f64>, weight: f64) -> Result<Self> {
        let n = norm(&v);
        if !(n > 0.0) {
            return invalid("cannot normalize a zero vector");
        }
        Self::new(v.iter().map(|x| x / n).collect(), weight)
    }

    pub fn direction(&self) -> &[f64] {
        &self.direction
    }
    pub fn weight(&self) -> f64 {
        self.weight
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMeasure")]
pub struct SpectralMeasure {
    alpha: f64,
    dim: usize,
    points: Vec<SpectralPoint>,
    shift: Vec<f64>,
}

#[derive(Deserialize)]
struct RawMeasure {
    alpha: f64,
    points: Vec<SpectralPoint>,
    #[serde(default)]
    shift: Option<Vec<f64>>,
}

impl TryFrom<RawMeasure> for SpectralMeasure {
    type Error = Error;
    fn try_from(r: RawMeasure) -> Result<Self> {
        let dim = r.points.first().map_or(0, |p| p.direction.len());
        SpectralMeasure::new(r.alpha, r.points, r.shift.unwrap_or_else(|| vec![0.0; dim]))
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn tan_half_pi(alpha: f64) -> f64 {
    if alpha == 2.0 {
        0.0
    } else {
        (FRAC_PI_2 * alpha).tan()
    }
}

impl SpectralMeasure {
    pub fn new(alpha: f64, points: Vec<SpectralPoint>, shift: Vec<f64>) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) || alpha == 1.0 {
            return invalid(format!("spectral measure needs alpha in (0, 2] other than 1, got {alpha}"));
        }
        let dim = match points.first() {
            Some(p) => p.direction.len(),
            None => return invalid("spectral measure needs at least one point"),
        };
        for p in &points {
            if p.direction.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: p.direction.len() });
            }
        }
        if shift.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: shift.len() });
        }
        if shift.iter().any(|v| !v.is_finite()) {
            return invalid("shift must be finite");
        }
        Ok(Self { alpha, dim, points, shift })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn points(&self) -> &[SpectralPoint] {
        &self.points
    }
    pub fn shift(&self) -> &[f64] {
        &self.shift
    }

    pub fn with_shift(&self, shift: Vec<f64>) -> Result<Self> {
        Self::new(self.alpha, self.points.clone(), shift)
    }

    fn check_dim(&self, len: usize) -> Result<()> {
        if len != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: len });
        }
        Ok(())
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.dim {
            return invalid(format!("coordinate {i} out of range for dimension {}", self.dim));
        }
        Ok(())
    }

    pub fn cf_vector(&self, tau: &[f64]) -> Result<Complex64> {
        self.check_dim(tau.len())?;
        let a = tan_half_pi(self.alpha);
        let mut exponent = Complex64::new(0.0, dot(&self.shift, tau));
        for p in &self.points {
            let u = dot(tau, &p.direction);
            if u != 0.0 {
                let m = p.weight * u.abs().powf(self.alpha);
                exponent -= Complex64::new(m, -m * a * u.signum());
            }
        }
        Ok(exponent.exp())
    }

    /// Law of ⟨τ, X⟩.
    pub fn project(&self, tau: &[f64]) -> Result<StableParams> {
        self.check_dim(tau.len())?;
        let (mut scale, mut skew) = (0.0, 0.0);
        for p in &self.points {
            let u = dot(tau, &p.direction);
            let m = p.weight * u.abs().powf(self.alpha);
            scale += m;
            skew += m * u.signum();
        }
        if !(scale > 0.0) {
            return Err(Error::DegenerateDirection);
        }
        let beta = (skew / scale).clamp(-1.0, 1.0);
        StableParams::new(self.alpha, beta, scale.powf(1.0 / self.alpha), dot(&self.shift, tau))
    }

    /// Law of coordinate `i`.
    pub fn marginal(&self, i: usize) -> Result<StableParams> {
        self.check_index(i)?;
        let mut e = vec![0.0; self.dim];
        e[i] = 1.0;
        self.project(&e)
    }

    pub fn is_symmetric(&self) -> bool {
        self.points.iter().all(|p| {
            self.points.iter().any(|q| {
                p.direction.iter().zip(&q.direction).all(|(a, b)| (a + b).abs() <= 1e-10)
                    && (p.weight - q.weight).abs() <= 1e-12 * p.weight.max(q.weight)
            })
        })
    }

    /// Covariation coefficients (κ, λ) of coordinate `i` on coordinate `k`.
    pub fn covariation(&self, i: usize, k: usize) -> Result<(f64, f64)> {
        self.check_index(i)?;
        self.check_index(k)?;
        if self.alpha <= 1.0 {
            return invalid("covariation requires alpha > 1");
        }
        let mut scale = 0.0;
        let (mut kappa, mut lambda) = (0.0, 0.0);
        for p in &self.points {
            let (si, sk) = (p.direction[i], p.direction[k]);
            let m = p.weight * sk.abs().powf(self.alpha - 1.0);
            scale += m * sk.abs();
            kappa += si * m * sk.signum();
            lambda += si * m;
        }
        if !(scale > 0.0) {
            return Err(Error::DegenerateDirection);
        }
        Ok((kappa / scale, lambda / scale))
    }

    /// Measure of (X_1, ..., X_d, Σ X_i).
    pub fn augment_with_sum(&self) -> Result<Self> {
        let points = self
            .points
            .iter()
            .filter_map(|p| {
                let mut v = p.direction.clone();
                v.push(p.direction.iter().sum());
                let n = norm(&v);
                (n > 0.0).then(|| SpectralPoint::normalized(v, p.weight * n.powf(self.alpha)))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut shift = self.shift.clone();
        shift.push(self.shift.iter().sum());
        Self::new(self.alpha, points, shift)
    }

    /// Slope κ of E[X_i | X_k = x] - E[X_i] in x, valid when every atom has the
    /// same sign in coordinate `k`.
    pub fn conditional_mean_slope(&self, i: usize, k: usize) -> Result<f64> {
        self.check_index(k)?;
        let pos = self.points.iter().any(|p| p.direction[k] > 0.0);
        let neg = self.points.iter().any(|p| p.direction[k] < 0.0);
        if pos && neg {
            return Err(Error::MixedSignSupport { coordinate: k });
        }
        self.covariation(i, k).map(|(kappa, _)| kappa)
    }

    /// One draw of X.
    pub fn draw<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut x = self.shift.clone();
        for p in &self.points {
            let z = p.weight.powf(1.0 / self.alpha) * standard_draw(rng, self.alpha, 1.0);
            for (xi, si) in x.iter_mut().zip(&p.direction) {
                *xi += si * z;
            }
        }
        x
    }

    /// `n` independent draws, reproducible from `seed`.
    pub fn sample_vector(&self, seed: u64, n: usize) -> Vec<Vec<f64>> {
        rng::generate(seed, n, |r| self.draw(r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stable::cf;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn point(v: &[f64], w: f64) -> SpectralPoint {
        SpectralPoint::normalized(v.to_vec(), w).unwrap()
    }

    fn two_lines(alpha: f64, g1: f64, g2: f64) -> SpectralMeasure {
        SpectralMeasure::new(alpha, vec![point(&[1.0, 0.0], g1), point(&[0.0, 1.0], g2)], vec![0.0, 0.0]).unwrap()
    }

    #[test]
    fn construction_checks() {
        assert!(SpectralPoint::new(vec![1.0, 1.0], 1.0).is_err());
        assert!(SpectralPoint::new(vec![1.0], 0.0).is_err());
        assert!(SpectralMeasure::new(1.0, vec![point(&[1.0], 1.0)], vec![0.0]).is_err());
        assert!(SpectralMeasure::new(1.5, vec![], vec![]).is_err());
        assert!(matches!(
            SpectralMeasure::new(1.5, vec![point(&[1.0], 1.0), point(&[1.0, 0.0], 1.0)], vec![0.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn serde_round_trip() {
        let m = two_lines(1.5, 1.0, 2.0);
        let s = serde_json::to_string(&m).unwrap();
        let back: SpectralMeasure = serde_json::from_str(&s).unwrap();
        assert_eq!(m, back);
        let bad = r#"{"alpha": 1.5, "points": [{"direction": [1.0, 1.0], "weight": 1.0}]}"#;
        assert!(serde_json::from_str::<SpectralMeasure>(bad).is_err());
    }

    #[test]
    fn cf_examples() {
        let alpha = 1.5;
        let m = SpectralMeasure::new(alpha, vec![point(&[1.0], 1.0)], vec![0.0]).unwrap();
        assert_eq!(m.cf_vector(&[0.0]).unwrap(), Complex64::new(1.0, 0.0));
        let expect = cf(&StableParams::standard(alpha, 1.0).unwrap(), 1.0);
        assert!((m.cf_vector(&[1.0]).unwrap() - expect).norm() < 1e-15);
        let sym = SpectralMeasure::new(alpha, vec![point(&[1.0], 1.0), point(&[-1.0], 1.0)], vec![0.0]).unwrap();
        assert_eq!(sym.cf_vector(&[1.0]).unwrap().im, 0.0);
        assert!(m.cf_vector(&[1.0, 0.0]).is_err());
    }

    #[test]
    fn projections() {
        let g: f64 = 0.7;
        let alpha = 1.6;
        let m = SpectralMeasure::new(alpha, vec![point(&[1.0, 0.0], g)], vec![0.0, 0.0]).unwrap();
        let p = m.project(&[1.0, 0.0]).unwrap();
        assert_relative_eq!(p.sigma(), g.powf(1.0 / alpha), max_relative = 1e-15);
        assert_eq!(p.beta(), 1.0);
        assert_eq!(m.project(&[0.0, 1.0]), Err(Error::DegenerateDirection));
        let sym = SpectralMeasure::new(alpha, vec![point(&[1.0], g), point(&[-1.0], g)], vec![0.0]).unwrap();
        let p = sym.project(&[1.0]).unwrap();
        assert_relative_eq!(p.sigma(), (2.0 * g).powf(1.0 / alpha), max_relative = 1e-15);
        assert_eq!(p.beta(), 0.0);
    }

    #[test]
    fn symmetry_detection() {
        let a = 1.5;
        let yes = SpectralMeasure::new(a, vec![point(&[1.0], 1.0), point(&[-1.0], 1.0)], vec![0.0]).unwrap();
        let one = SpectralMeasure::new(a, vec![point(&[1.0], 1.0)], vec![0.0]).unwrap();
        let uneven = SpectralMeasure::new(a, vec![point(&[1.0], 1.0), point(&[-1.0], 2.0)], vec![0.0]).unwrap();
        assert!(yes.is_symmetric());
        assert!(!one.is_symmetric());
        assert!(!uneven.is_symmetric());
    }

    #[test]
    fn covariation_examples() {
        let alpha = 1.7;
        let (g1, g2) = (0.4, 1.3);
        let c = 2f64.powf(alpha / 2.0);
        let m = SpectralMeasure::new(
            alpha,
            vec![point(&[1.0, 0.0, 1.0], g1 * c), point(&[0.0, 1.0, 1.0], g2 * c)],
            vec![0.0; 3],
        )
        .unwrap();
        let (kappa, lambda) = m.covariation(0, 2).unwrap();
        assert_relative_eq!(kappa, g1 / (g1 + g2), max_relative = 1e-14);
        assert_eq!(kappa, lambda);
        assert_relative_eq!(m.covariation(2, 2).unwrap().0, 1.0, max_relative = 1e-15);
        assert_relative_eq!(m.conditional_mean_slope(0, 2).unwrap(), g1 / (g1 + g2), max_relative = 1e-14);

        let augmented = two_lines(alpha, g1, g2).augment_with_sum().unwrap();
        assert_relative_eq!(augmented.covariation(0, 2).unwrap().0, g1 / (g1 + g2), max_relative = 1e-14);
        assert!(augmented.points()[0].direction()[0] - 1.0 / 2f64.sqrt() < 1e-15);

        let mixed = SpectralMeasure::new(alpha, vec![point(&[1.0, 1.0], 1.0), point(&[1.0, -1.0], 1.0)], vec![0.0; 2]).unwrap();
        assert!(matches!(mixed.conditional_mean_slope(0, 1), Err(Error::MixedSignSupport { coordinate: 1 })));
        let low = SpectralMeasure::new(0.8, vec![point(&[1.0], 1.0)], vec![0.0]).unwrap();
        assert!(low.covariation(0, 0).is_err());
    }

    #[test]
    fn augmentation_examples() {
        let alpha = 1.5;
        let m = SpectralMeasure::new(alpha, vec![point(&[1.0], 1.0)], vec![0.0]).unwrap();
        let a = m.augment_with_sum().unwrap();
        assert_relative_eq!(a.points()[0].weight(), 2f64.powf(alpha / 2.0), max_relative = 1e-15);
        assert_relative_eq!(a.marginal(1).unwrap().sigma(), 1.0, max_relative = 1e-14);
        let sym = SpectralMeasure::new(alpha, vec![point(&[1.0, 0.5], 1.0), point(&[-1.0, -0.5], 1.0)], vec![0.0; 2]).unwrap();
        assert!(sym.augment_with_sum().unwrap().marginal(2).unwrap().beta().abs() < 1e-15);
    }

    #[test]
    fn sampling_matches_cf() {
        let m = SpectralMeasure::new(
            1.6,
            vec![point(&[1.0, 0.0], 0.5), point(&[0.3, 1.0], 1.2), point(&[-1.0, 0.4], 0.3)],
            vec![0.5, -1.0],
        )
        .unwrap();
        let n = 200_000;
        let xs = m.sample_vector(17, n);
        let bound = 5.0 / (n as f64).sqrt();
        for tau in [[0.3, 0.1], [-0.5, 0.8], [1.0, 1.0], [0.0, -0.7], [0.9, -0.2]] {
            let (c, s) = xs.iter().fold((0.0, 0.0), |(c, s), x| {
                let u = dot(&tau, x);
                (c + u.cos(), s + u.sin())
            });
            let emp = Complex64::new(c, s) / n as f64;
            assert!((emp - m.cf_vector(&tau).unwrap()).norm() < bound, "τ={tau:?}");
        }
        assert_eq!(m.sample_vector(17, 10), m.sample_vector(17, 10));
    }

    fn measure_strategy() -> impl Strategy<Value = SpectralMeasure> {
        (
            1.05f64..2.0,
            prop::collection::vec((prop::collection::vec(-1.0f64..1.0, 3), 0.1f64..3.0), 1..5),
        )
            .prop_filter_map("zero direction", |(alpha, atoms)| {
                let points: Option<Vec<_>> = atoms
                    .into_iter()
                    .map(|(v, w)| SpectralPoint::normalized(v, w).ok())
                    .collect();
                SpectralMeasure::new(alpha, points?, vec![0.0; 3]).ok()
            })
    }

    proptest! {
        #[test]
        fn projection_invariants(m in measure_strategy(), tau in prop::collection::vec(-2.0f64..2.0, 3), c in 0.1f64..5.0) {
            prop_assume!(norm(&tau) > 1e-3);
            if let Ok(p) = m.project(&tau) {
                let scaled: Vec<f64> = tau.iter().map(|t| c * t).collect();
                let q = m.project(&scaled).unwrap();
                prop_assert!((q.sigma() - c * p.sigma()).abs() <= 1e-12 * q.sigma());
                prop_assert!((-1.0..=1.0).contains(&p.beta()));
                let lhs = m.cf_vector(&tau).unwrap();
                let rhs = cf(&p, 1.0);
                prop_assert!((lhs - rhs).norm() < 1e-13);
            }
        }

        #[test]
        fn augmented_kappas_sum_to_one(m in measure_strategy()) {
            let a = m.augment_with_sum().unwrap();
            let d = m.dim();
            if let Ok(total) = (0..d).map(|i| a.covariation(i, d).map(|c| c.0)).sum::<Result<f64>>() {
                prop_assert!((total - 1.0).abs() < 1e-12);
            }
        }

        #[test]
        fn symmetric_measures_have_no_skew(m in measure_strategy(), tau in prop::collection::vec(-2.0f64..2.0, 3)) {
            let mut points = m.points().to_vec();
            for p in m.points() {
                points.push(SpectralPoint::new(p.direction().iter().map(|v| -v).collect(), p.weight()).unwrap());
            }
            let sym = SpectralMeasure::new(m.alpha(), points, vec![0.0; 3]).unwrap();
            prop_assert!(sym.is_symmetric());
            if let Ok(p) = sym.project(&tau) {
                prop_assert!(p.beta().abs() < 1e-12);
            }
        }
    }
}

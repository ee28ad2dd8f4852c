//! Chambers–Mallows–Stuck sampling in the parameterization of [`super::cf`].

use std::f64::consts::{FRAC_PI_2, PI};

use rand::distr::Open01;
use rand::Rng;
use rand_distr::Exp1;

use super::StableParams;
use crate::rng;

/// One draw from S_α(1, β, 0).
pub fn standard_draw<R: Rng + ?Sized>(rng: &mut R, alpha: f64, beta: f64) -> f64 {
    let u: f64 = rng.sample(Open01);
    let v = PI * (u - 0.5);
    let w: f64 = rng.sample(Exp1);
    if alpha == 1.0 {
        let h = FRAC_PI_2 + beta * v;
        return (h * v.tan() - beta * (FRAC_PI_2 * w * v.cos() / h).ln()) * 2.0 / PI;
    }
    let t = beta * (FRAC_PI_2 * alpha).tan();
    let b = t.atan() / alpha;
    let s = (1.0 + t * t).powf(0.5 / alpha);
    let av = alpha * (v + b);
    s * av.sin() / v.cos().powf(1.0 / alpha) * ((v - av).cos() / w).powf((1.0 - alpha) / alpha)
}

pub fn draw<R: Rng + ?Sized>(rng: &mut R, p: &StableParams) -> f64 {
    let z = standard_draw(rng, p.alpha(), p.beta());
    let shift = if p.alpha() == 1.0 {
        2.0 / PI * p.beta() * p.sigma() * p.sigma().ln()
    } else {
        0.0
    };
    p.sigma() * z + shift + p.mu()
}

/// `n` independent draws, reproducible from `seed`.
pub fn sample(p: &StableParams, seed: u64, n: usize) -> Vec<f64> {
    rng::generate(seed, n, |r| draw(r, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stable::{cf, convolve};
    use num_complex::Complex64;

    fn empirical_cf(xs: &[f64], t: f64) -> Complex64 {
        let (c, s) = xs.iter().fold((0.0, 0.0), |(c, s), x| (c + (t * x).cos(), s + (t * x).sin()));
        Complex64::new(c, s) / xs.len() as f64
    }

    #[test]
    fn gaussian_variance() {
        let p = StableParams::standard(2.0, 0.0).unwrap();
        let n = 1_000_000;
        let xs = sample(&p, 11, n);
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        // Var of the sample variance for a normal: 2σ⁴/(n-1)
        let se = (2.0 * 4.0 / (n - 1) as f64).sqrt() / 2.0;
        assert!((var / 2.0 - 1.0).abs() < 5.0 * se, "var {var}");
    }

    #[test]
    fn levy_support() {
        let p = StableParams::standard(0.5, 1.0).unwrap();
        assert!(sample(&p, 3, 100_000).iter().all(|&x| x > 0.0));
    }

    #[test]
    fn empirical_cf_matches() {
        let n = 200_000;
        let bound = 5.0 / (n as f64).sqrt();
        for (alpha, beta, sigma, mu) in [(1.7, 1.0, 1.0, 0.0), (0.6, -0.5, 2.0, 1.0), (1.0, 0.7, 1.5, -0.5), (1.3, 0.2, 0.5, 0.0)] {
            let p = StableParams::new(alpha, beta, sigma, mu).unwrap();
            let xs = sample(&p, 99, n);
            for t in [0.3, 1.0] {
                let diff = (empirical_cf(&xs, t) - cf(&p, t)).norm();
                assert!(diff < bound, "α={alpha} β={beta} t={t}: {diff}");
            }
        }
    }

    #[test]
    fn sums_follow_convolution() {
        let p = StableParams::standard(1.5, 0.5).unwrap();
        let n = 100_000;
        let xs = sample(&p, 5, 3 * n);
        let sums: Vec<f64> = xs.chunks(3).map(|c| c.iter().sum()).collect();
        let s = convolve(&convolve(&p, &p).unwrap(), &p).unwrap();
        let bound = 5.0 / (n as f64).sqrt();
        for t in [0.2, 0.7] {
            assert!((empirical_cf(&sums, t) - cf(&s, t)).norm() < bound);
        }
    }

    #[test]
    fn deterministic() {
        let p = StableParams::standard(1.2, -0.3).unwrap();
        assert_eq!(sample(&p, 42, 10_000), sample(&p, 42, 10_000));
    }
}

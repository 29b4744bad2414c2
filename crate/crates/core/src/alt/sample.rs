use rand::Rng;
use rand_distr::{
    Beta, ChiSquared, Distribution, Gamma, Gumbel, LogNormal, Open01, StandardNormal, StudentT,
};

use super::copula::{morgenstern_conditional_inverse, pearvii_radial_inverse, GbplCopula};
use super::density::std_normal_quantile;
use super::{AlternativeSpec, TransformConstants};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::sample::SampleMatrix;

use AlternativeSpec as A;

fn dist_err(spec: &AlternativeSpec, e: impl std::fmt::Display) -> Error {
    Error::Domain(format!("{spec}: {e}"))
}

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// One draw of `BivN(mu1, mu2, s1, s2, rho)` through the Cholesky factor,
/// which stays valid at `rho = +-1`.
fn biv_normal<R: Rng + ?Sized>(rng: &mut R, mu: [f64; 2], sigma: [f64; 2], rho: f64) -> [f64; 2] {
    let z1 = normal(rng);
    let z2 = normal(rng);
    let c = (1.0 - rho * rho).max(0.0).sqrt();
    [
        mu[0] + sigma[0] * z1,
        mu[1] + sigma[1] * (rho * z1 + c * z2),
    ]
}

fn std_biv<R: Rng + ?Sized>(rng: &mut R, rho: f64) -> [f64; 2] {
    biv_normal(rng, [0.0, 0.0], [1.0, 1.0], rho)
}

fn coin<R: Rng + ?Sized>(rng: &mut R) -> bool {
    rng.random::<u64>() >> 63 == 1
}

/// Draws `n` i.i.d. rows from `spec`.
pub fn sample_alt(spec: &AlternativeSpec, n: usize, rng: &mut RngStream) -> Result<SampleMatrix> {
    spec.validate()?;
    let mut values = Vec::with_capacity(n * spec.dim());
    match *spec {
        A::MixN { p, mu, var } => {
            let sd = var.sqrt();
            for _ in 0..n {
                let u: f64 = rng.sample(Open01);
                let z = normal(rng);
                values.push(if u < p { mu + sd * z } else { z });
            }
        }
        A::StudentT { nu } => {
            let d = StudentT::new(nu).map_err(|e| dist_err(spec, e))?;
            values.extend(d.sample_iter(&mut *rng).take(n));
        }
        A::Uniform { a, b } => {
            for _ in 0..n {
                let u: f64 = rng.sample(Open01);
                values.push(a + (b - a) * u);
            }
        }
        A::ChiSq { nu } => {
            let d = ChiSquared::new(nu).map_err(|e| dist_err(spec, e))?;
            values.extend(d.sample_iter(&mut *rng).take(n));
        }
        A::Beta { a, b } => {
            let d = Beta::new(a, b).map_err(|e| dist_err(spec, e))?;
            values.extend(d.sample_iter(&mut *rng).take(n));
        }
        A::Gamma { shape, scale } => {
            let d = Gamma::new(shape, scale).map_err(|e| dist_err(spec, e))?;
            values.extend(d.sample_iter(&mut *rng).take(n));
        }
        A::Gumbel { mu, sigma } => {
            let d = Gumbel::new(mu, sigma).map_err(|e| dist_err(spec, e))?;
            values.extend(d.sample_iter(&mut *rng).take(n));
        }
        A::LogNormal { mu, sigma } => {
            let d = LogNormal::new(mu, sigma).map_err(|e| dist_err(spec, e))?;
            values.extend(d.sample_iter(&mut *rng).take(n));
        }
        A::Normal { mu, var } => {
            let sd = var.sqrt();
            values.extend((0..n).map(|_| mu + sd * normal(rng)));
        }
        A::StdNormal => values.extend((0..n).map(|_| normal(rng))),
        A::BivNorm {
            mu1,
            mu2,
            sigma1,
            sigma2,
            rho,
        } => {
            for _ in 0..n {
                values.extend(biv_normal(rng, [mu1, mu2], [sigma1, sigma2], rho));
            }
        }
        A::NMixA { rho } => {
            for _ in 0..n {
                let x = if coin(rng) {
                    biv_normal(rng, [1.0, 1.0], [1.0, 1.0], 0.9)
                } else {
                    std_biv(rng, rho)
                };
                values.extend(x);
            }
        }
        A::NMixB { rho } => {
            for _ in 0..n {
                let r = if coin(rng) { rho.abs() } else { -rho.abs() };
                values.extend(std_biv(rng, r));
            }
        }
        A::BivLogN {
            sigma1,
            sigma2,
            rho,
        } => {
            let c = TransformConstants::lognormal(sigma1, sigma2);
            for _ in 0..n {
                let l = biv_normal(rng, [0.0, 0.0], [sigma1, sigma2], rho);
                values.extend([0, 1].map(|i| (l[i].exp() - c.a[i]) / c.b[i]));
            }
        }
        A::SinhInvN {
            mu1,
            mu2,
            sigma1,
            sigma2,
            rho,
        } => {
            let c = TransformConstants::sinh_normal([mu1, mu2], [sigma1, sigma2]);
            for _ in 0..n {
                let z = biv_normal(rng, [mu1, mu2], [sigma1, sigma2], rho);
                values.extend([0, 1].map(|i| (z[i].sinh() - c.a[i]) / c.b[i]));
            }
        }
        A::Gbpl { alpha, beta } => {
            let cop = GbplCopula::new(alpha, beta)?;
            for _ in 0..n {
                let (u, v) = cop.sample(rng);
                values.push(std_normal_quantile(u));
                values.push(std_normal_quantile(v));
            }
        }
        A::Morgenstern { alpha } => {
            for _ in 0..n {
                let u: f64 = rng.sample(Open01);
                let w: f64 = rng.sample(Open01);
                let v = morgenstern_conditional_inverse(u, w, alpha);
                values.push(std_normal_quantile(u));
                values.push(std_normal_quantile(v));
            }
        }
        A::PearsonVII { alpha } => {
            for _ in 0..n {
                let u: f64 = rng.random();
                let r = pearvii_radial_inverse(u, alpha)?;
                let angle = std::f64::consts::TAU * rng.random::<f64>();
                let (s, c) = angle.sin_cos();
                values.push(r * c);
                values.push(r * s);
            }
        }
        A::IndepStdNormal2 => values.extend((0..2 * n).map(|_| normal(rng))),
    }
    SampleMatrix::new(n, spec.dim(), values)
}

use std::f64::consts::PI;

use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use super::copula::GbplCopula;
use super::{AlternativeSpec, TransformConstants};
use crate::error::{Error, Result};

use AlternativeSpec as A;

fn std_normal() -> Normal {
    Normal::standard()
}

pub fn std_normal_pdf(x: f64) -> f64 {
    std_normal().pdf(x)
}

pub fn std_normal_cdf(x: f64) -> f64 {
    std_normal().cdf(x)
}

/// `Phi^{-1}(p)`, with one Newton step on top of the library inverse,
/// which alone is only good to about 1e-11.
pub(crate) fn std_normal_quantile(p: f64) -> f64 {
    let n = std_normal();
    let x = n.inverse_cdf(p);
    let d = n.pdf(x);
    if x.is_finite() && d > 0.0 {
        x - (n.cdf(x) - p) / d
    } else {
        x
    }
}

/// Bivariate normal density; the quadratic form is divided by `2 (1 - rho^2)`.
fn g1(x: [f64; 2], mu: [f64; 2], sigma: [f64; 2], rho: f64) -> f64 {
    let z1 = (x[0] - mu[0]) / sigma[0];
    let z2 = (x[1] - mu[1]) / sigma[1];
    let one_m = 1.0 - rho * rho;
    let q = (z1 * z1 + z2 * z2 - 2.0 * rho * z1 * z2) / (2.0 * one_m);
    (-q).exp() / (2.0 * PI * sigma[0] * sigma[1] * one_m.sqrt())
}

fn g1_std(x: [f64; 2], rho: f64) -> f64 {
    g1(x, [0.0, 0.0], [1.0, 1.0], rho)
}

/// Density of a bivariate alternative at `x`; zero outside the support.
pub fn density_bivariate(spec: &AlternativeSpec, x: [f64; 2]) -> Result<f64> {
    spec.validate()?;
    if spec.dim() != 2 {
        return Err(Error::Domain(format!("{spec} is not a bivariate law")));
    }
    let singular = |rho: f64| {
        if rho.abs() >= 1.0 {
            Err(Error::Domain(format!("{spec}: no density when |rho| = 1")))
        } else {
            Ok(())
        }
    };
    Ok(match *spec {
        A::BivNorm {
            mu1,
            mu2,
            sigma1,
            sigma2,
            rho,
        } => {
            singular(rho)?;
            g1(x, [mu1, mu2], [sigma1, sigma2], rho)
        }
        A::NMixA { rho } => {
            singular(rho)?;
            0.5 * g1_std(x, rho) + 0.5 * g1(x, [1.0, 1.0], [1.0, 1.0], 0.9)
        }
        A::NMixB { rho } => {
            singular(rho)?;
            0.5 * g1_std(x, rho) + 0.5 * g1_std(x, -rho)
        }
        A::BivLogN {
            sigma1,
            sigma2,
            rho,
        } => {
            singular(rho)?;
            let c = TransformConstants::lognormal(sigma1, sigma2);
            let y = [0, 1].map(|i| c.b[i] * x[i] + c.a[i]);
            if y[0] <= 0.0 || y[1] <= 0.0 {
                return Ok(0.0);
            }
            let l = [y[0].ln(), y[1].ln()];
            c.b[0] * c.b[1] / (y[0] * y[1]) * g1(l, [0.0, 0.0], [sigma1, sigma2], rho)
        }
        A::SinhInvN {
            mu1,
            mu2,
            sigma1,
            sigma2,
            rho,
        } => {
            singular(rho)?;
            let c = TransformConstants::sinh_normal([mu1, mu2], [sigma1, sigma2]);
            let w = [0, 1].map(|i| c.b[i] * x[i] + c.a[i]);
            let jac = c.b[0] * c.b[1] / (w[0].hypot(1.0) * w[1].hypot(1.0));
            jac * g1(
                [w[0].asinh(), w[1].asinh()],
                [mu1, mu2],
                [sigma1, sigma2],
                rho,
            )
        }
        A::Gbpl { alpha, beta } => {
            let cop = GbplCopula::new(alpha, beta)?;
            let u = std_normal_cdf(x[0]);
            let v = std_normal_cdf(x[1]);
            cop.density(u, v) * std_normal_pdf(x[0]) * std_normal_pdf(x[1])
        }
        A::Morgenstern { alpha } => {
            let f1 = 2.0 * std_normal_cdf(x[0]) - 1.0;
            let f2 = 2.0 * std_normal_cdf(x[1]) - 1.0;
            std_normal_pdf(x[0]) * std_normal_pdf(x[1]) * (1.0 + alpha * f1 * f2)
        }
        A::PearsonVII { alpha } => {
            let r2 = x[0] * x[0] + x[1] * x[1];
            alpha / (2.0 * PI) * (-(alpha + 1.0) * (0.5 * r2).ln_1p()).exp()
        }
        A::IndepStdNormal2 => std_normal_pdf(x[0]) * std_normal_pdf(x[1]),
        _ => unreachable!("univariate laws rejected above"),
    })
}

/// The GBPL density with a plain `1 / (Phi(x1) Phi(x2))` prefactor in place
/// of `(Phi(x1) Phi(x2))^{-1/alpha - 1}`. It does not integrate to one and
/// is kept only to demonstrate that.
pub fn gbpl_printed_density(alpha: f64, beta: f64, x: [f64; 2]) -> Result<f64> {
    GbplCopula::new(alpha, beta)?;
    let u = std_normal_cdf(x[0]);
    let v = std_normal_cdf(x[1]);
    if u <= 0.0 || v <= 0.0 {
        return Ok(0.0);
    }
    let th = 1.0 / alpha;
    let (a, b) = (u.powf(-th), v.powf(-th));
    let p = -(alpha + 2.0);
    let sum = (1.0 + beta) * (a + b - 1.0).powf(p) + 4.0 * beta * (2.0 * a + 2.0 * b - 3.0).powf(p)
        - 2.0 * beta * (2.0 * a + b - 2.0).powf(p)
        - 2.0 * beta * (a + 2.0 * b - 2.0).powf(p);
    let val = (alpha + 1.0) / alpha * std_normal_pdf(x[0]) * std_normal_pdf(x[1]) / (u * v) * sum;
    Ok(if val.is_finite() { val } else { 0.0 })
}

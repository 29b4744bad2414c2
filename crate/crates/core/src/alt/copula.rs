//! Copula building blocks for the Morgenstern, GBPL and Pearson VII
//! alternatives.

use rand::Rng;
use rand_distr::Open01;

use crate::error::{Error, Result};

/// Solves `dC/du (u, v) = w` for `v`, where
/// `C(u, v) = u v (1 + alpha (1 - u)(1 - v))` is the Morgenstern copula.
///
/// The conditional CDF is `v (1 + k (1 - v))` with `k = alpha (1 - 2u)`; the
/// root in `[0, 1]` of `k v^2 - (1 + k) v + w = 0` is taken in the
/// cancellation-free form `2w / (1 + k + sqrt((1 + k)^2 - 4 k w))`.
pub fn morgenstern_conditional_inverse(u: f64, w: f64, alpha: f64) -> f64 {
    let k = alpha * (1.0 - 2.0 * u);
    let b = 1.0 + k;
    2.0 * w / (b + (b * b - 4.0 * k * w).max(0.0).sqrt())
}

/// `P(V <= v | U = u)` for the Morgenstern copula.
pub fn morgenstern_conditional_cdf(u: f64, v: f64, alpha: f64) -> f64 {
    v * (1.0 + alpha * (1.0 - 2.0 * u) * (1.0 - v))
}

/// Inverse of the Pearson VII radial CDF `F(r) = 1 - (1 + r^2/2)^{-alpha}`.
pub fn pearvii_radial_inverse(u: f64, alpha: f64) -> Result<f64> {
    if alpha.is_nan() || alpha <= 0.0 {
        return Err(Error::Domain(format!(
            "Pearson VII needs alpha > 0, got {alpha}"
        )));
    }
    if !(0.0..1.0).contains(&u) {
        return Err(Error::Domain(format!(
            "radial inverse needs u in [0, 1), got {u}"
        )));
    }
    // (1 - u)^{-1/alpha} - 1
    let t = (-(-u).ln_1p() / alpha).exp_m1();
    Ok((2.0 * t).sqrt())
}

/// `F(r) = 1 - (1 + r^2/2)^{-alpha}`.
pub fn pearvii_radial_cdf(r: f64, alpha: f64) -> f64 {
    -(-alpha * (0.5 * r * r).ln_1p()).exp_m1()
}

/// The GBPL copula with parameters `alpha > 0`, `beta` in `[-1, 1]`.
///
/// With `theta = 1/alpha` and `S(A, B, C) = A u^-theta + B v^-theta - C`,
/// the copula is
/// `K = (1 + beta) S(1,1,1)^-alpha + beta S(2,2,3)^-alpha - beta S(2,1,2)^-alpha - beta S(1,2,2)^-alpha`,
/// a Clayton copula perturbed so that both margins stay uniform. Every
/// term is evaluated after dividing `S` by `u^-theta`, which keeps the
/// arithmetic in range near the corners.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GbplCopula {
    alpha: f64,
    beta: f64,
}

impl GbplCopula {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::Domain(format!("GBPL needs alpha > 0, got {alpha}")));
        }
        if !(-1.0..=1.0).contains(&beta) {
            return Err(Error::Domain(format!(
                "GBPL needs beta in [-1, 1], got {beta}"
            )));
        }
        Ok(Self { alpha, beta })
    }

    /// `(1 + t - s, 2 + 2t - 3s, 2 + t - 2s, 1 + 2t - 2s)` with
    /// `s = u^theta`, `t = (u / v)^theta`, or `None` when `t` overflows.
    fn scaled_terms(&self, u: f64, v: f64) -> Option<(f64, [f64; 4])> {
        let theta = 1.0 / self.alpha;
        let ln_t = theta * (u.ln() - v.ln());
        if ln_t > 600.0 {
            return None;
        }
        let t = ln_t.exp();
        let s = (theta * u.ln()).exp();
        Some((
            ln_t,
            [
                1.0 + t - s,
                2.0 + 2.0 * t - 3.0 * s,
                2.0 + t - 2.0 * s,
                1.0 + 2.0 * t - 2.0 * s,
            ],
        ))
    }

    /// `P(V <= v | U = u) = dK/du`.
    pub fn conditional_cdf(&self, u: f64, v: f64) -> f64 {
        if v <= 0.0 {
            return 0.0;
        }
        if v >= 1.0 {
            return 1.0;
        }
        let Some((_, s)) = self.scaled_terms(u, v) else {
            return 0.0;
        };
        let p = -(self.alpha + 1.0);
        let b = self.beta;
        let h = (1.0 + b) * s[0].powf(p) + 2.0 * b * s[1].powf(p)
            - 2.0 * b * s[2].powf(p)
            - b * s[3].powf(p);
        h.clamp(0.0, 1.0)
    }

    /// Copula density `d^2 K / du dv`.
    pub fn density(&self, u: f64, v: f64) -> f64 {
        if !(u > 0.0 && u < 1.0 && v > 0.0 && v < 1.0) {
            return 0.0;
        }
        let Some((ln_t, s)) = self.scaled_terms(u, v) else {
            return 0.0;
        };
        let p = -(self.alpha + 2.0);
        let b = self.beta;
        // Each term is exp(p ln s_k + ln t - ln v), kept in log form so the
        // huge prefactor and tiny power never meet in floating point.
        let ln_pre = ln_t - v.ln();
        let term = |c: f64, sk: f64| {
            if c == 0.0 || sk <= 0.0 {
                0.0
            } else {
                c * (p * sk.ln() + ln_pre).exp()
            }
        };
        let sum =
            term(1.0 + b, s[0]) + term(4.0 * b, s[1]) - term(2.0 * b, s[2]) - term(2.0 * b, s[3]);
        ((self.alpha + 1.0) / self.alpha * sum).max(0.0)
    }

    /// Solves `conditional_cdf(u, v) = w` for `v` by Newton steps safeguarded
    /// with bisection.
    pub fn conditional_inverse(&self, u: f64, w: f64) -> f64 {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        let mut v = w;
        for _ in 0..200 {
            let f = self.conditional_cdf(u, v) - w;
            if f == 0.0 {
                return v;
            }
            if f > 0.0 {
                hi = v;
            } else {
                lo = v;
            }
            if hi - lo <= 1e-15 * hi {
                break;
            }
            let d = self.density(u, v);
            let newton = v - f / d;
            v = if d > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
        }
        v
    }

    /// One draw `(u, v)` from the copula by conditional inversion.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        let u: f64 = rng.sample(Open01);
        let w: f64 = rng.sample(Open01);
        let v = self.conditional_inverse(u, w);
        (u, v.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0))
    }
}

/// Draws `(u, v)` from the GBPL copula.
pub fn gbpl_sample_copula<R: Rng + ?Sized>(
    alpha: f64,
    beta: f64,
    rng: &mut R,
) -> Result<(f64, f64)> {
    Ok(GbplCopula::new(alpha, beta)?.sample(rng))
}

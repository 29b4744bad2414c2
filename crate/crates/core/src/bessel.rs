//! Bessel function of the first kind, order zero.
//!
//! For `|z| <= 8` the power series `sum (-1)^k (z^2/4)^k / (k!)^2` is summed
//! with compensation. Past that point the alternating terms grow large enough
//! to cost digits, so the Hankel asymptotic form with the Cephes rational
//! approximations for P0 and Q0 is used instead.

use std::f64::consts::FRAC_PI_4;

use crate::error::{Error, Result};
use crate::sum::Neumaier;

const SERIES_LIMIT: f64 = 8.0;

/// sqrt(2 / pi)
const SQRT_2_OVER_PI: f64 = 0.797_884_560_802_865_4;

/// Evaluates `J0(z)`.
///
/// Absolute error is below `1e-12` on `[0, 200]`. Returns a domain error for
/// non-finite input.
pub fn bessel_j0(z: f64) -> Result<f64> {
    if !z.is_finite() {
        return Err(Error::Domain(format!(
            "bessel_j0 requires finite input, got {z}"
        )));
    }
    Ok(j0(z))
}

pub(crate) fn j0(z: f64) -> f64 {
    let x = z.abs();
    if x <= SERIES_LIMIT {
        series(x)
    } else {
        asymptotic(x)
    }
}

fn series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut acc = Neumaier::default();
    let mut term = 1.0;
    acc.add(term);
    let mut k = 1.0;
    // 40 terms reach below 1e-30 at x = 8.
    while k < 60.0 {
        term *= -q / (k * k);
        acc.add(term);
        if term.abs() < 1e-20 {
            break;
        }
        k += 1.0;
    }
    acc.value()
}

fn asymptotic(x: f64) -> f64 {
    let w = 5.0 / x;
    let q = w * w;
    let p0 = polevl(q, &PP) / polevl(q, &PQ);
    let q0 = polevl(q, &QP) / p1evl(q, &QQ);
    let xn = x - FRAC_PI_4;
    let (s, c) = xn.sin_cos();
    (p0 * c - w * q0 * s) * SQRT_2_OVER_PI / x.sqrt()
}

/// Horner evaluation, coefficients ordered from the highest degree.
fn polevl(x: f64, coef: &[f64]) -> f64 {
    coef.iter().fold(0.0, |acc, &c| acc * x + c)
}

/// As [`polevl`] with an implicit leading coefficient of 1.
fn p1evl(x: f64, coef: &[f64]) -> f64 {
    coef.iter().fold(1.0, |acc, &c| acc * x + c)
}

const PP: [f64; 7] = [
    7.969367292973471e-4,
    8.283523921074408e-2,
    1.239533716464143,
    5.447250030587687,
    8.74716500199817,
    5.303240382353949,
    1.0,
];

const PQ: [f64; 7] = [
    9.244088105588637e-4,
    8.562884743544745e-2,
    1.2535274390105895,
    5.470977403304171,
    8.761908832370695,
    5.306052882353947,
    1.0,
];

const QP: [f64; 8] = [
    -1.1366383889846916e-2,
    -1.2825271867050931,
    -1.9553954425773597e1,
    -9.320601521237683e1,
    -1.7768116798048806e2,
    -1.4707750515495118e2,
    -5.141053267665993e1,
    -6.050143506007285,
];

const QQ: [f64; 7] = [
    6.43178256118178e1,
    8.564300259769806e2,
    3.8824018360540163e3,
    7.240467741956525e3,
    5.930727011873169e3,
    2.0620933166032783e3,
    2.420057402402914e2,
];

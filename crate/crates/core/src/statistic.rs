//! The `M_m` statistic and its evaluation routes.
//!
//! Production evaluation factors the double sum inside the integrand,
//! `(1/N^2) sum_{j,k} exp(i(<a,X_j> + <b,X_k>)) = phî(a) phî(b)`, so each
//! quadrature node costs `O(N m)`. [`m1_exact`] integrates the `m = 1` case
//! in closed form with `J0`, and [`mm_naive_oracle`] expands the squared
//! modulus into the literal cosine sums. The last two exist to cross-check
//! the first.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bessel::j0;
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::sample::{Divisor, StandardizedSample};
use crate::sphere::{
    circle_nodes, column_symmetric_nodes, surface_area, NodeMethod, SphereNodeSet,
};
use crate::sum::Neumaier;

/// `exp(-1/2)`: the N(0,1)^d characteristic function anywhere on the unit sphere.
pub const NULL_CF_ON_SPHERE: f64 = 0.606_530_659_712_633_4;

/// `exp(-1)`, the square of [`NULL_CF_ON_SPHERE`].
const NULL_CF_SQUARED: f64 = 0.367_879_441_171_442_33;

/// Default sample-size cap for the O(N^4) closed form.
pub const M1_EXACT_DEFAULT_CAP: usize = 128;

/// Largest sample accepted by [`mm_naive_oracle`].
pub const NAIVE_ORACLE_CAP: usize = 16;

/// How the sphere integral is discretized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub method: NodeMethod,
    #[serde(rename = "Q")]
    pub q: usize,
    pub node_seed: u64,
}

impl QuadratureConfig {
    pub const DEFAULT_CIRCLE_Q: usize = 512;
    pub const DEFAULT_SPHERE_Q: usize = 4096;

    pub fn circle(q: usize) -> Self {
        Self {
            method: NodeMethod::CircleTrapezoid,
            q,
            node_seed: 0,
        }
    }

    pub fn sphere_mc(q: usize, node_seed: u64) -> Self {
        Self {
            method: NodeMethod::SphereMc,
            q,
            node_seed,
        }
    }

    /// Trapezoid with 512 nodes for `m = 1`, 4096 Monte Carlo nodes otherwise.
    pub fn default_for(m: usize, node_seed: u64) -> Self {
        if m == 1 {
            Self::circle(Self::DEFAULT_CIRCLE_Q)
        } else {
            Self::sphere_mc(Self::DEFAULT_SPHERE_Q, node_seed)
        }
    }

    pub fn validate(&self, m: usize) -> Result<()> {
        match self.method {
            NodeMethod::CircleTrapezoid if m != 1 => Err(Error::Config(format!(
                "circle-trapezoid quadrature only applies to m = 1, got m = {m}"
            ))),
            NodeMethod::CircleTrapezoid if self.q < 4 => Err(Error::Config(format!(
                "circle-trapezoid needs Q >= 4, got {}",
                self.q
            ))),
            NodeMethod::SphereMc
                if m == 0 || m > 16 || self.q == 0 || !self.q.is_multiple_of(1 << m) =>
            {
                Err(Error::Config(format!(
                    "sphere-mc with m = {m} needs Q to be a positive multiple of 2^m, got {}",
                    self.q
                )))
            }
            _ => Ok(()),
        }
    }

    /// Builds the node set on `S_{2m}`.
    pub fn nodes(&self, m: usize) -> Result<SphereNodeSet> {
        self.validate(m)?;
        match self.method {
            NodeMethod::CircleTrapezoid => circle_nodes(self.q),
            NodeMethod::SphereMc => {
                column_symmetric_nodes(m, self.q, &mut RngStream::new(self.node_seed, 0))
            }
        }
    }

    /// True when both configurations produce the same node set.
    pub fn same_nodes(&self, other: &QuadratureConfig) -> bool {
        self.method == other.method
            && self.q == other.q
            && (self.method == NodeMethod::CircleTrapezoid || self.node_seed == other.node_seed)
    }

    fn from_nodes(nodes: &SphereNodeSet) -> Self {
        Self {
            method: nodes.method(),
            q: nodes.len(),
            node_seed: nodes.seed().unwrap_or(0),
        }
    }
}

impl std::fmt::Display for QuadratureConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.method {
            NodeMethod::CircleTrapezoid => write!(f, "{}(Q={})", self.method, self.q),
            NodeMethod::SphereMc => {
                write!(f, "{}(Q={}, seed={})", self.method, self.q, self.node_seed)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum StatMethod {
    Quadrature(QuadratureConfig),
    ClosedForm,
    NaiveOracle(QuadratureConfig),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatisticValue {
    pub value: f64,
    pub m: usize,
    pub n: usize,
    pub method: StatMethod,
    pub target_constant: f64,
    pub standardization: Divisor,
}

impl StatisticValue {
    /// Node count, when the value came from a quadrature.
    pub fn q(&self) -> Option<usize> {
        match self.method {
            StatMethod::Quadrature(c) | StatMethod::NaiveOracle(c) => Some(c.q),
            StatMethod::ClosedForm => None,
        }
    }

    /// Largest value the statistic can take: `N (1 + e^{-1/2})^2 |S_{2m}|`.
    pub fn upper_bound(m: usize, n: usize) -> f64 {
        let area = surface_area(2 * m).unwrap_or(f64::INFINITY);
        n as f64 * (1.0 + NULL_CF_ON_SPHERE).powi(2) * area
    }
}

/// `(1/N) sum_k exp(i <t, X_k>)`.
pub fn ecf_eval(sample: &StandardizedSample, t: &[f64]) -> Result<Complex64> {
    if t.len() != sample.n_cols() {
        return Err(Error::Shape(format!(
            "argument has length {}, sample has {} columns",
            t.len(),
            sample.n_cols()
        )));
    }
    if t.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain(
            "characteristic function argument must be finite".into(),
        ));
    }
    Ok(ecf(sample, t))
}

fn ecf(sample: &StandardizedSample, t: &[f64]) -> Complex64 {
    let (mut re, mut im) = (0.0, 0.0);
    for row in sample.rows() {
        let theta: f64 = row.iter().zip(t).map(|(x, a)| x * a).sum();
        let (s, c) = theta.sin_cos();
        re += c;
        im += s;
    }
    let n = sample.n_rows() as f64;
    Complex64::new(re / n, im / n)
}

/// `M_m` by quadrature with the nodes described by `cfg`.
pub fn m_stat(sample: &StandardizedSample, cfg: &QuadratureConfig) -> Result<StatisticValue> {
    let nodes = cfg.nodes(sample.n_cols())?;
    let mut v = m_stat_on_nodes(sample, &nodes)?;
    v.method = StatMethod::Quadrature(*cfg);
    Ok(v)
}

/// `M_m` by quadrature on a prebuilt node set of dimension `2m`.
pub fn m_stat_on_nodes(
    sample: &StandardizedSample,
    nodes: &SphereNodeSet,
) -> Result<StatisticValue> {
    let m = sample.n_cols();
    let value = m_stat_from_cf(|t| ecf(sample, t), sample.n_rows(), m, nodes)?;
    Ok(StatisticValue {
        value,
        m,
        n: sample.n_rows(),
        method: StatMethod::Quadrature(QuadratureConfig::from_nodes(nodes)),
        target_constant: NULL_CF_ON_SPHERE,
        standardization: sample.divisor(),
    })
}

/// `n * sum_q w_q |cf(a_q) cf(b_q) - e^{-1/2}|^2` for an arbitrary
/// characteristic function `cf` on `R^m`.
pub fn m_stat_from_cf(
    cf: impl Fn(&[f64]) -> Complex64,
    n: usize,
    m: usize,
    nodes: &SphereNodeSet,
) -> Result<f64> {
    if nodes.dim() != 2 * m {
        return Err(Error::Shape(format!(
            "node set lives in R^{}, statistic for m = {m} needs R^{}",
            nodes.dim(),
            2 * m
        )));
    }
    let integral = nodes.integrate(|node| {
        let (a, b) = node.split_at(m);
        (cf(a) * cf(b) - NULL_CF_ON_SPHERE).norm_sqr()
    });
    Ok(n as f64 * integral)
}

/// Exact `M_1` through the Bessel closed form. Rejects `N > 128`.
pub fn m1_exact(sample: &StandardizedSample) -> Result<StatisticValue> {
    m1_exact_with_cap(sample, M1_EXACT_DEFAULT_CAP)
}

/// `M_1 = 2 pi N [ N^-4 sum_{n,j,k,l} J0(d(X_n - X_k, X_j - X_l))
///               - 2 e^{-1/2} N^-2 sum_{n,j} J0(d(X_n, X_j)) + e^{-1} ]`
/// with `d(x, y) = sqrt(x^2 + y^2)`.
pub fn m1_exact_with_cap(sample: &StandardizedSample, cap: usize) -> Result<StatisticValue> {
    if sample.n_cols() != 1 {
        return Err(Error::Shape(format!(
            "closed-form M1 needs one column, got {}",
            sample.n_cols()
        )));
    }
    let n = sample.n_rows();
    if n > cap {
        return Err(Error::CostGuard { n, cap });
    }
    let mut xs = sample.values().to_vec();
    xs.sort_by(f64::total_cmp);

    // Squared pairwise differences with multiplicities: the diagonal gives 0
    // N times, each unordered pair appears twice.
    let mut d2: Vec<(f64, f64)> = Vec::with_capacity(1 + n * (n - 1) / 2);
    d2.push((0.0, n as f64));
    for i in 0..n {
        for j in i + 1..n {
            let d = xs[i] - xs[j];
            d2.push((d * d, 2.0));
        }
    }

    let mut quartic = Neumaier::default();
    for (p, &(dp, wp)) in d2.iter().enumerate() {
        quartic.add(wp * wp * j0((dp + dp).sqrt()));
        for &(dq, wq) in &d2[p + 1..] {
            quartic.add(2.0 * wp * wq * j0((dp + dq).sqrt()));
        }
    }

    let mut pairs = Neumaier::default();
    for (i, &xi) in xs.iter().enumerate() {
        pairs.add(j0((2.0 * xi * xi).sqrt()));
        for &xj in &xs[i + 1..] {
            pairs.add(2.0 * j0((xi * xi + xj * xj).sqrt()));
        }
    }

    let nf = n as f64;
    let n2 = nf * nf;
    let mut bracket = Neumaier::default();
    bracket.add(quartic.value() / (n2 * n2));
    bracket.add(-2.0 * NULL_CF_ON_SPHERE * pairs.value() / n2);
    bracket.add(NULL_CF_SQUARED);

    Ok(StatisticValue {
        value: 2.0 * PI * nf * bracket.value(),
        m: 1,
        n,
        method: StatMethod::ClosedForm,
        target_constant: NULL_CF_ON_SPHERE,
        standardization: sample.divisor(),
    })
}

/// Reference evaluation that expands the squared modulus into the quadruple
/// and double cosine sums per node, without factoring the ECF. `N <= 16`.
pub fn mm_naive_oracle(
    sample: &StandardizedSample,
    nodes: &SphereNodeSet,
) -> Result<StatisticValue> {
    let (n, m) = (sample.n_rows(), sample.n_cols());
    if n > NAIVE_ORACLE_CAP {
        return Err(Error::CostGuard {
            n,
            cap: NAIVE_ORACLE_CAP,
        });
    }
    if nodes.dim() != 2 * m {
        return Err(Error::Shape(format!(
            "node set lives in R^{}, statistic for m = {m} needs R^{}",
            nodes.dim(),
            2 * m
        )));
    }
    let dot = |u: &[f64], x: &[f64]| -> f64 { u.iter().zip(x).map(|(p, q)| p * q).sum() };
    let diff = |i: usize, k: usize| -> Vec<f64> {
        sample
            .row(i)
            .iter()
            .zip(sample.row(k))
            .map(|(p, q)| p - q)
            .collect()
    };
    let c = NULL_CF_ON_SPHERE;
    let nf = n as f64;

    let integral = nodes.integrate(|node| {
        let (a, b) = node.split_at(m);
        let mut quad = Neumaier::default();
        for i in 0..n {
            for k in 0..n {
                let ak = dot(a, &diff(i, k));
                for j in 0..n {
                    for l in 0..n {
                        quad.add((ak + dot(b, &diff(j, l))).cos());
                    }
                }
            }
        }
        let mut lin = Neumaier::default();
        for i in 0..n {
            for j in 0..n {
                lin.add((dot(a, sample.row(i)) + dot(b, sample.row(j))).cos());
            }
        }
        quad.value() / nf.powi(4) - 2.0 * c * lin.value() / (nf * nf) + c * c
    });

    Ok(StatisticValue {
        value: nf * integral,
        m,
        n,
        method: StatMethod::NaiveOracle(QuadratureConfig::from_nodes(nodes)),
        target_constant: NULL_CF_ON_SPHERE,
        standardization: sample.divisor(),
    })
}

/// `M_2` over `S_4` with Monte Carlo nodes.
pub fn m2(sample: &StandardizedSample, cfg: &QuadratureConfig) -> Result<StatisticValue> {
    if sample.n_cols() != 2 {
        return Err(Error::Shape(format!(
            "M2 needs two columns, got {}",
            sample.n_cols()
        )));
    }
    if cfg.method != NodeMethod::SphereMc {
        return Err(Error::Config("M2 is evaluated with sphere-mc nodes".into()));
    }
    m_stat(sample, cfg)
}

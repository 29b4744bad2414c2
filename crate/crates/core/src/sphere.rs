//! Quadrature node sets on the unit sphere `S^{dim-1}` in `R^dim`.

use std::f64::consts::PI;

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeMethod {
    /// Equispaced periodic trapezoid rule on the unit circle (`dim = 2`).
    CircleTrapezoid,
    /// Antithetic Monte Carlo points on the sphere.
    SphereMc,
}

impl std::fmt::Display for NodeMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            NodeMethod::CircleTrapezoid => "circle-trapezoid",
            NodeMethod::SphereMc => "sphere-mc",
        })
    }
}

/// Unit vectors in `R^dim` with positive weights summing to the sphere's
/// surface area.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereNodeSet {
    dim: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    method: NodeMethod,
    seed: Option<u64>,
}

impl SphereNodeSet {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, q: usize) -> &[f64] {
        &self.nodes[q * self.dim..(q + 1) * self.dim]
    }

    pub fn nodes(&self) -> std::slice::ChunksExact<'_, f64> {
        self.nodes.chunks_exact(self.dim)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn method(&self) -> NodeMethod {
        self.method
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Weighted sum of `f` over the nodes, accumulated in node order.
    pub fn integrate(&self, mut f: impl FnMut(&[f64]) -> f64) -> f64 {
        self.nodes()
            .zip(&self.weights)
            .fold(0.0, |acc, (x, w)| acc + w * f(x))
    }
}

/// Surface area of the unit sphere in `R^dim`: `2 pi^{dim/2} / Gamma(dim/2)`.
pub fn surface_area(dim: usize) -> Result<f64> {
    if dim == 0 {
        return Err(Error::Domain("surface_area requires dim >= 1".into()));
    }
    // Recurrence A(d + 2) = 2 pi A(d) / d keeps integer dimensions exact-ish.
    let mut area = if dim.is_multiple_of(2) { 2.0 * PI } else { 2.0 };
    let mut d = if dim.is_multiple_of(2) { 2 } else { 1 };
    while d < dim {
        area *= 2.0 * PI / d as f64;
        d += 2;
    }
    Ok(area)
}

/// Nodes `(cos a_q, sin a_q)` at `a_q = 2 pi q / Q`, each weighted `2 pi / Q`.
pub fn circle_nodes(q: usize) -> Result<SphereNodeSet> {
    if q < 4 {
        return Err(Error::Config(format!(
            "circle trapezoid needs Q >= 4, got {q}"
        )));
    }
    let mut nodes = Vec::with_capacity(2 * q);
    for i in 0..q {
        let (s, c) = circle_angle(i, q);
        nodes.push(c);
        nodes.push(s);
    }
    Ok(SphereNodeSet {
        dim: 2,
        nodes,
        weights: vec![2.0 * PI / q as f64; q],
        method: NodeMethod::CircleTrapezoid,
        seed: None,
    })
}

/// `(sin, cos)` of `2 pi i / q`. For even `q` the second half of the circle is
/// the exact negation of the first, and the axis points are exact.
fn circle_angle(i: usize, q: usize) -> (f64, f64) {
    if q.is_multiple_of(2) && i >= q / 2 {
        let (s, c) = circle_angle(i - q / 2, q);
        return (-s, -c);
    }
    if i == 0 {
        return (0.0, 1.0);
    }
    if 4 * i == q {
        return (1.0, 0.0);
    }
    (2.0 * PI * i as f64 / q as f64).sin_cos()
}

/// `q / 2` normalized standard-Gaussian directions in `R^dim`, each followed by
/// its negation. Every weight is `surface_area(dim) / q`.
pub fn sphere_mc_nodes(dim: usize, q: usize, rng: &mut RngStream) -> Result<SphereNodeSet> {
    if dim < 2 {
        return Err(Error::Config(format!(
            "sphere-mc needs dim >= 2, got {dim}"
        )));
    }
    if q < 2 || !q.is_multiple_of(2) {
        return Err(Error::Config(format!(
            "sphere-mc needs an even Q >= 2, got {q}"
        )));
    }
    let mut nodes = Vec::with_capacity(dim * q);
    let mut v = vec![0.0; dim];
    for _ in 0..q / 2 {
        let norm = loop {
            for x in v.iter_mut() {
                *x = StandardNormal.sample(rng);
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-300 {
                break norm;
            }
        };
        nodes.extend(v.iter().map(|x| x / norm));
        nodes.extend(v.iter().map(|x| -x / norm));
    }
    let area = surface_area(dim)?;
    Ok(SphereNodeSet {
        dim,
        nodes,
        weights: vec![area / q as f64; q],
        method: NodeMethod::SphereMc,
        seed: Some(rng.root_seed()),
    })
}

/// Monte Carlo nodes on `S_{2m}` closed under flipping the sign of any
/// column pair `(a_j, b_j)`.
///
/// Each of the `q / 2^m` normalized Gaussian draws in `R^{2m}` is expanded
/// into all `2^m` sign patterns over its column pairs. Flipping every pair is
/// plain negation, so the set is antithetic; closure under single-column
/// flips makes the statistic exactly invariant to a negative scale on one
/// column. Weights are `surface_area(2m) / q`.
pub fn column_symmetric_nodes(m: usize, q: usize, rng: &mut RngStream) -> Result<SphereNodeSet> {
    if m == 0 || m > 16 {
        return Err(Error::Config(format!(
            "column-symmetric nodes need 1 <= m <= 16, got {m}"
        )));
    }
    let orbit = 1usize << m;
    if q == 0 || !q.is_multiple_of(orbit) {
        return Err(Error::Config(format!(
            "sphere-mc with m = {m} needs Q to be a positive multiple of {orbit}, got {q}"
        )));
    }
    let dim = 2 * m;
    let mut nodes = Vec::with_capacity(dim * q);
    let mut v = vec![0.0; dim];
    for _ in 0..q / orbit {
        let norm = loop {
            for x in v.iter_mut() {
                *x = StandardNormal.sample(rng);
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-300 {
                break norm;
            }
        };
        let unit: Vec<f64> = v.iter().map(|x| x / norm).collect();
        for mask in 0..orbit {
            for (i, x) in unit.iter().enumerate() {
                let flipped = mask >> (i % m) & 1 == 1;
                nodes.push(if flipped { -x } else { *x });
            }
        }
    }
    let area = surface_area(dim)?;
    Ok(SphereNodeSet {
        dim,
        nodes,
        weights: vec![area / q as f64; q],
        method: NodeMethod::SphereMc,
        seed: Some(rng.root_seed()),
    })
}

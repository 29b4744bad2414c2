//! Empirical characteristic function test for joint normality and
//! independence of the columns of a sample.
//!
//! Under the null hypothesis every column is an independent N(0,1) variable
//! after standardization. For such data the product of characteristic
//! functions `phi(a) * phi(b)` equals `exp(-1/2)` everywhere on the unit
//! sphere `|a|^2 + |b|^2 = 1` in `R^{2m}`. The statistic
//!
//! ```text
//! M_m = N * integral over S_{2m} of |phî(a) phî(b) - exp(-1/2)|^2
//! ```
//!
//! measures the departure of the empirical characteristic function from that
//! constant. It is evaluated by quadrature over a [`SphereNodeSet`]; for
//! `m = 1` there is also an exact Bessel-function closed form
//! ([`m1_exact`]). Critical values are obtained by Monte Carlo simulation
//! ([`simulate_null`]) and power studies are run with [`power`].

pub mod alt;
mod bessel;
mod error;
pub mod null;
pub mod power;
mod rng;
mod sample;
mod sphere;
pub mod statistic;
mod sum;

pub use alt::{sample_alt, AlternativeSpec, TransformConstants};
pub use bessel::bessel_j0;
pub use error::{Error, Result};
pub use null::{
    decide, p_value, simulate_null, simulate_null_statistics, CriticalLevel, CriticalValueTable,
    Decision, NullSimConfig,
};
pub use power::{
    rho_symmetry_check, run_power_row, run_suite, PowerRow, PowerStudyConfig, PowerTable,
    RhoSymmetry,
};
pub use rng::RngStream;
pub use sample::{standardize, standardize_with, Divisor, SampleMatrix, StandardizedSample};
pub use sphere::{
    circle_nodes, column_symmetric_nodes, sphere_mc_nodes, surface_area, NodeMethod, SphereNodeSet,
};
pub use statistic::{
    ecf_eval, m1_exact, m1_exact_with_cap, m2, m_stat, m_stat_from_cf, m_stat_on_nodes,
    mm_naive_oracle, QuadratureConfig, StatMethod, StatisticValue, NULL_CF_ON_SPHERE,
};

//! Monte Carlo null distribution, critical values and p-values.
//!
//! Under the null every column is i.i.d. N(0,1). Replicate `r` draws from
//! `RngStream::new(root_seed, r)`, so the simulated statistics do not depend
//! on how rayon schedules the work.

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::sample::{standardize_with, Divisor, SampleMatrix};
use crate::sphere::SphereNodeSet;
use crate::statistic::{m_stat_on_nodes, QuadratureConfig, StatMethod, StatisticValue};

pub const TABLE_FORMAT_VERSION: u32 = 1;

/// Smallest replicate count accepted for a null simulation.
pub const MIN_REPLICATES: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullSimConfig {
    pub m: usize,
    pub n: usize,
    pub replicates: usize,
    pub levels: Vec<f64>,
    pub quadrature: QuadratureConfig,
    pub root_seed: u64,
    #[serde(default)]
    pub standardization: Divisor,
}

impl NullSimConfig {
    pub fn new(
        m: usize,
        n: usize,
        replicates: usize,
        levels: Vec<f64>,
        quadrature: QuadratureConfig,
        root_seed: u64,
    ) -> Self {
        Self {
            m,
            n,
            replicates,
            levels,
            quadrature,
            root_seed,
            standardization: Divisor::Population,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::Config("m must be positive".into()));
        }
        if self.n < 2 {
            return Err(Error::Config(format!(
                "n must be at least 2, got {}",
                self.n
            )));
        }
        if self.replicates < MIN_REPLICATES {
            return Err(Error::Config(format!(
                "need at least {MIN_REPLICATES} replicates, got {}",
                self.replicates
            )));
        }
        if self.levels.is_empty() {
            return Err(Error::Config("no significance levels requested".into()));
        }
        if self.levels.iter().any(|&a| !(a > 0.0 && a < 1.0)) {
            return Err(Error::Config("levels must lie in (0, 1)".into()));
        }
        if self.levels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("levels must be strictly ascending".into()));
        }
        for &a in &self.levels {
            quantile_rank(a, self.replicates)?;
        }
        self.quadrature.validate(self.m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalLevel {
    pub alpha: f64,
    pub critical_value: f64,
}

/// Simulated upper quantiles of `M_m` for one `(m, n)`, with provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalValueTable {
    pub format_version: u32,
    pub m: usize,
    pub n: usize,
    pub levels: Vec<CriticalLevel>,
    pub replicates: usize,
    pub root_seed: u64,
    pub quadrature: QuadratureConfig,
    pub standardization: Divisor,
    /// ISO-8601 build time.
    pub built_at: String,
}

impl CriticalValueTable {
    /// Critical value for `(m, n, alpha)`. No interpolation across `n` or `alpha`.
    pub fn lookup(&self, m: usize, n: usize, alpha: f64) -> Result<f64> {
        if m != self.m || n != self.n {
            return Err(Error::Lookup(format!(
                "table covers (m = {}, n = {}), requested (m = {m}, n = {n})",
                self.m, self.n
            )));
        }
        self.levels
            .iter()
            .find(|l| (l.alpha - alpha).abs() <= 1e-12)
            .map(|l| l.critical_value)
            .ok_or_else(|| {
                Error::Lookup(format!(
                    "alpha = {alpha} not in table (available: {:?})",
                    self.levels.iter().map(|l| l.alpha).collect::<Vec<_>>()
                ))
            })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let table: Self = serde_json::from_str(text)?;
        if table.format_version != TABLE_FORMAT_VERSION {
            return Err(Error::Parse(format!(
                "unsupported table format_version {}",
                table.format_version
            )));
        }
        Ok(table)
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// 1-based order statistic `ceil((1 - alpha) R)`, required to be at most `R - 1`.
fn quantile_rank(alpha: f64, replicates: usize) -> Result<usize> {
    let k = ((1.0 - alpha) * replicates as f64 - 1e-9).ceil() as usize;
    if k == 0 || k > replicates.saturating_sub(1) {
        return Err(Error::Config(format!(
            "R = {replicates} replicates are too few for alpha = {alpha}"
        )));
    }
    Ok(k)
}

/// Draws one standardized null sample and evaluates the statistic on `nodes`.
pub(crate) fn null_replicate(cfg: &NullSimConfig, nodes: &SphereNodeSet, r: u64) -> Result<f64> {
    let mut rng = RngStream::new(cfg.root_seed, r);
    let values: Vec<f64> = (0..cfg.n * cfg.m)
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();
    let x = SampleMatrix::new(cfg.n, cfg.m, values)?;
    let z = standardize_with(&x, cfg.standardization)?;
    Ok(m_stat_on_nodes(&z, nodes)?.value)
}

/// Simulated null statistics, sorted ascending.
pub fn simulate_null_statistics(cfg: &NullSimConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    let nodes = cfg.quadrature.nodes(cfg.m)?;
    let mut stats = (0..cfg.replicates as u64)
        .into_par_iter()
        .map(|r| null_replicate(cfg, &nodes, r))
        .collect::<Result<Vec<f64>>>()?;
    stats.sort_by(f64::total_cmp);
    Ok(stats)
}

pub fn simulate_null(cfg: &NullSimConfig) -> Result<CriticalValueTable> {
    let stats = simulate_null_statistics(cfg)?;
    table_from_statistics(cfg, &stats)
}

/// Builds the table from already simulated, sorted null statistics.
pub fn table_from_statistics(cfg: &NullSimConfig, sorted: &[f64]) -> Result<CriticalValueTable> {
    if sorted.len() != cfg.replicates {
        return Err(Error::Config(
            "statistic count differs from replicates".into(),
        ));
    }
    let levels = cfg
        .levels
        .iter()
        .map(|&alpha| {
            let k = quantile_rank(alpha, cfg.replicates)?;
            Ok(CriticalLevel {
                alpha,
                critical_value: sorted[k - 1].max(0.0),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CriticalValueTable {
        format_version: TABLE_FORMAT_VERSION,
        m: cfg.m,
        n: cfg.n,
        levels,
        replicates: cfg.replicates,
        root_seed: cfg.root_seed,
        quadrature: cfg.quadrature,
        standardization: cfg.standardization,
        built_at: build_timestamp(),
    })
}

/// Current UTC time, or `SOURCE_DATE_EPOCH` when set, in RFC 3339 form.
fn build_timestamp() -> String {
    let epoch = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse::<i64>().ok());
    let when = match epoch.and_then(|s| chrono::DateTime::from_timestamp(s, 0)) {
        Some(t) => t,
        None => chrono::Utc::now(),
    };
    when.to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

/// Monte Carlo p-value `(1 + #{null >= stat}) / (R + 1)`.
pub fn p_value(stat: f64, null_sorted: &[f64]) -> Result<f64> {
    if null_sorted.is_empty() {
        return Err(Error::Config("empty null sample".into()));
    }
    let below = null_sorted.partition_point(|&x| x < stat);
    let at_or_above = null_sorted.len() - below;
    Ok((1 + at_or_above) as f64 / (null_sorted.len() + 1) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub reject: bool,
    pub statistic: f64,
    pub critical_value: f64,
    pub alpha: f64,
}

/// Rejects when the statistic is strictly above the tabulated critical value.
///
/// The statistic must have been computed on the table's node set; a
/// closed-form `M_1` is accepted against a trapezoid table since both are the
/// same integral.
pub fn decide(stat: &StatisticValue, table: &CriticalValueTable, alpha: f64) -> Result<Decision> {
    let critical_value = table.lookup(stat.m, stat.n, alpha)?;
    check_provenance(stat, table)?;
    Ok(Decision {
        reject: stat.value > critical_value,
        statistic: stat.value,
        critical_value,
        alpha,
    })
}

fn check_provenance(stat: &StatisticValue, table: &CriticalValueTable) -> Result<()> {
    if stat.standardization != table.standardization {
        return Err(Error::Provenance(format!(
            "statistic uses {:?} standardization, table uses {:?}",
            stat.standardization, table.standardization
        )));
    }
    let ok = match stat.method {
        StatMethod::Quadrature(q) | StatMethod::NaiveOracle(q) => q.same_nodes(&table.quadrature),
        StatMethod::ClosedForm => {
            stat.m == 1 && table.quadrature.method == crate::sphere::NodeMethod::CircleTrapezoid
        }
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Provenance(format!(
            "statistic method {:?} does not match table quadrature {}",
            stat.method, table.quadrature
        )))
    }
}

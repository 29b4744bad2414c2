//! Size and power studies: rejection rates of `M_m` under alternatives.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alt::{sample_alt, AlternativeSpec};
use crate::error::{Error, Result};
use crate::null::{simulate_null, CriticalValueTable, NullSimConfig, MIN_REPLICATES};
use crate::rng::{label_key, RngStream};
use crate::sample::{standardize_with, Divisor};
use crate::sphere::SphereNodeSet;
use crate::statistic::{m_stat_on_nodes, QuadratureConfig};

pub const POWER_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerStudyConfig {
    pub alternatives: Vec<AlternativeSpec>,
    pub sample_sizes: Vec<usize>,
    pub alpha: f64,
    pub replicates: usize,
    pub root_seed: u64,
    /// Node sets used for `m = 1` and `m = 2` laws.
    pub quadrature_m1: QuadratureConfig,
    pub quadrature_m2: QuadratureConfig,
    /// Pre-built critical value tables; missing `(m, n)` keys are simulated
    /// with `critval_replicates` and `critval_seed`.
    pub tables: Vec<CriticalValueTable>,
    pub critval_replicates: usize,
    pub critval_seed: u64,
    #[serde(default)]
    pub standardization: Divisor,
}

impl PowerStudyConfig {
    /// Default quadrature for both dimensions, no tables supplied.
    pub fn new(
        alternatives: Vec<AlternativeSpec>,
        sample_sizes: Vec<usize>,
        alpha: f64,
        replicates: usize,
        root_seed: u64,
        critval_replicates: usize,
        node_seed: u64,
    ) -> Self {
        Self {
            alternatives,
            sample_sizes,
            alpha,
            replicates,
            root_seed,
            quadrature_m1: QuadratureConfig::default_for(1, node_seed),
            quadrature_m2: QuadratureConfig::default_for(2, node_seed),
            tables: Vec::new(),
            critval_replicates,
            critval_seed: root_seed,
            standardization: Divisor::default(),
        }
    }

    pub fn quadrature_for(&self, m: usize) -> Result<QuadratureConfig> {
        match m {
            1 => Ok(self.quadrature_m1),
            2 => Ok(self.quadrature_m2),
            _ => Err(Error::Config(format!(
                "no quadrature configured for m = {m}"
            ))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_replicates(self.replicates)?;
        if self.alternatives.is_empty() || self.sample_sizes.is_empty() {
            return Err(Error::Config(
                "power study needs alternatives and sample sizes".into(),
            ));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if let Some(&n) = self.sample_sizes.iter().find(|&&n| n < 2) {
            return Err(Error::Config(format!("sample size {n} is too small")));
        }
        for spec in &self.alternatives {
            spec.validate()?;
        }
        self.quadrature_m1.validate(1)?;
        self.quadrature_m2.validate(2)?;
        Ok(())
    }
}

fn check_replicates(r: usize) -> Result<()> {
    if r < MIN_REPLICATES {
        return Err(Error::Config(format!(
            "power studies need at least {MIN_REPLICATES} replicates, got {r}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerRow {
    pub alternative: String,
    pub m: usize,
    pub n: usize,
    /// Rejection percentage.
    pub power: f64,
    /// `100 sqrt(p (1 - p) / R)`.
    pub se: f64,
    pub rejections: usize,
    pub replicates: usize,
}

impl PowerRow {
    fn new(alternative: String, m: usize, n: usize, rejections: usize, replicates: usize) -> Self {
        let p = rejections as f64 / replicates as f64;
        Self {
            alternative,
            m,
            n,
            power: 100.0 * p,
            se: 100.0 * (p * (1.0 - p) / replicates as f64).sqrt(),
            rejections,
            replicates,
        }
    }
}

/// Where a row's critical value came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableProvenance {
    pub m: usize,
    pub n: usize,
    pub critical_value: f64,
    pub replicates: usize,
    pub root_seed: u64,
    pub quadrature: QuadratureConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerTable {
    pub schema_version: u32,
    pub alpha: f64,
    pub root_seed: u64,
    pub replicates: usize,
    pub standardization: Divisor,
    pub calibration: Vec<TableProvenance>,
    pub rows: Vec<PowerRow>,
}

impl PowerTable {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    /// Aligned plain-text rendering, one line per (alternative, n), with the
    /// alternative name printed once per group.
    pub fn to_text(&self) -> String {
        let alt_w = self
            .rows
            .iter()
            .map(|r| r.alternative.len())
            .chain(std::iter::once(4))
            .max()
            .unwrap_or(4);
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# alpha = {}, R = {}, seed = {}",
            self.alpha, self.replicates, self.root_seed
        );
        let _ = writeln!(
            out,
            "{:<alt_w$}  {:>5}  {:>4}  {:>6}  {:>5}",
            "Alt.", "n", "stat", "power", "se"
        );
        let mut prev: Option<&str> = None;
        for r in &self.rows {
            let name = if prev == Some(r.alternative.as_str()) {
                ""
            } else {
                &r.alternative
            };
            prev = Some(&r.alternative);
            let _ = writeln!(
                out,
                "{:<alt_w$}  {:>5}  {:>4}  {:>6.1}  {:>5.2}",
                name,
                r.n,
                format!("M{}", r.m),
                r.power,
                r.se
            );
        }
        out
    }
}

/// Powers of `spec` and of the same family at `-rho`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhoSymmetry {
    pub rho: f64,
    pub power_pos: f64,
    pub power_neg: f64,
    pub diff: f64,
}

fn row_key(spec: &AlternativeSpec, n: usize) -> u64 {
    label_key(&format!("{spec}#{n}"))
}

fn check_table(
    spec: &AlternativeSpec,
    n: usize,
    alpha: f64,
    table: &CriticalValueTable,
    quadrature: &QuadratureConfig,
    standardization: Divisor,
) -> Result<f64> {
    let crit = table.lookup(spec.dim(), n, alpha)?;
    if !quadrature.same_nodes(&table.quadrature) {
        return Err(Error::Provenance(format!(
            "table built with {} but the study evaluates with {}",
            table.quadrature, quadrature
        )));
    }
    if table.standardization != standardization {
        return Err(Error::Provenance(format!(
            "table uses {:?} standardization, study uses {:?}",
            table.standardization, standardization
        )));
    }
    Ok(crit)
}

/// Everything a row needs besides the law and the sample size.
struct RowPlan<'a> {
    crit: f64,
    nodes: &'a SphereNodeSet,
    replicates: usize,
    root_seed: u64,
    standardization: Divisor,
}

impl RowPlan<'_> {
    /// Counts rejections, replicate `r` reading stream `(root_seed, key, r)`.
    fn rejections(&self, spec: &AlternativeSpec, n: usize, key: u64) -> Result<usize> {
        let flags = (0..self.replicates as u64)
            .into_par_iter()
            .map(|r| {
                let mut rng = RngStream::keyed(self.root_seed, key, r);
                let x = sample_alt(spec, n, &mut rng)?;
                let z = standardize_with(&x, self.standardization)?;
                Ok(m_stat_on_nodes(&z, self.nodes)?.value > self.crit)
            })
            .collect::<Result<Vec<bool>>>()?;
        Ok(flags.into_iter().filter(|&b| b).count())
    }
}

/// Rejection percentage of the level-`alpha` test under `spec` at size `n`.
///
/// `quadrature` is the node set the caller intends to evaluate with; it must
/// match the one the table was built on.
pub fn run_power_row(
    spec: &AlternativeSpec,
    n: usize,
    alpha: f64,
    table: &CriticalValueTable,
    quadrature: &QuadratureConfig,
    replicates: usize,
    root_seed: u64,
) -> Result<PowerRow> {
    check_replicates(replicates)?;
    spec.validate()?;
    let crit = check_table(spec, n, alpha, table, quadrature, table.standardization)?;
    let nodes = table.quadrature.nodes(spec.dim())?;
    let plan = RowPlan {
        crit,
        nodes: &nodes,
        replicates,
        root_seed,
        standardization: table.standardization,
    };
    let hits = plan.rejections(spec, n, row_key(spec, n))?;
    Ok(PowerRow::new(
        spec.to_string(),
        spec.dim(),
        n,
        hits,
        replicates,
    ))
}

/// Runs `spec` (with correlation `rho`) and its mirror at `-rho` on the same
/// streams, keyed by `|rho|`.
pub fn rho_symmetry_check(
    spec: &AlternativeSpec,
    n: usize,
    alpha: f64,
    table: &CriticalValueTable,
    quadrature: &QuadratureConfig,
    replicates: usize,
    root_seed: u64,
) -> Result<RhoSymmetry> {
    check_replicates(replicates)?;
    let rho = spec
        .rho()
        .ok_or_else(|| Error::Config(format!("{spec} has no correlation parameter")))?;
    let pos = spec.with_rho(rho).expect("has rho");
    let neg = spec.with_rho(-rho).expect("has rho");
    neg.validate()?;
    let crit = check_table(spec, n, alpha, table, quadrature, table.standardization)?;
    let nodes = table.quadrature.nodes(spec.dim())?;
    let key = row_key(&spec.with_rho(rho.abs()).expect("has rho"), n);
    let plan = RowPlan {
        crit,
        nodes: &nodes,
        replicates,
        root_seed,
        standardization: table.standardization,
    };
    let run = |s: &AlternativeSpec| {
        plan.rejections(s, n, key)
            .map(|h| 100.0 * h as f64 / replicates as f64)
    };
    let power_pos = run(&pos)?;
    let power_neg = run(&neg)?;
    Ok(RhoSymmetry {
        rho,
        power_pos,
        power_neg,
        diff: (power_pos - power_neg).abs(),
    })
}

fn find_or_build_table(
    cfg: &PowerStudyConfig,
    built: &mut Vec<CriticalValueTable>,
    m: usize,
    n: usize,
) -> Result<CriticalValueTable> {
    let matches =
        |t: &CriticalValueTable| t.m == m && t.n == n && t.lookup(m, n, cfg.alpha).is_ok();
    if let Some(t) = cfg.tables.iter().chain(built.iter()).find(|t| matches(t)) {
        return Ok(t.clone());
    }
    if cfg.critval_replicates == 0 {
        return Err(Error::Lookup(format!(
            "no critical value table for m = {m}, n = {n}, alpha = {}",
            cfg.alpha
        )));
    }
    let mut null = NullSimConfig::new(
        m,
        n,
        cfg.critval_replicates,
        vec![cfg.alpha],
        cfg.quadrature_for(m)?,
        cfg.critval_seed,
    );
    null.standardization = cfg.standardization;
    let table = simulate_null(&null)?;
    built.push(table.clone());
    Ok(table)
}

/// Runs every (alternative, n) row in order, alternatives outermost.
pub fn run_suite(cfg: &PowerStudyConfig) -> Result<PowerTable> {
    cfg.validate()?;
    let mut built = Vec::new();
    let mut calibration: Vec<TableProvenance> = Vec::new();
    let mut rows = Vec::new();
    for spec in &cfg.alternatives {
        for &n in &cfg.sample_sizes {
            let m = spec.dim();
            let context = |e: Error| Error::Config(format!("row {spec}, n = {n}: {e}"));
            let table = find_or_build_table(cfg, &mut built, m, n).map_err(|e| match e {
                Error::Lookup(_) | Error::Provenance(_) => e,
                other => context(other),
            })?;
            let quadrature = cfg.quadrature_for(m)?;
            let crit = check_table(spec, n, cfg.alpha, &table, &quadrature, cfg.standardization)?;
            if !calibration.iter().any(|c| c.m == m && c.n == n) {
                calibration.push(TableProvenance {
                    m,
                    n,
                    critical_value: crit,
                    replicates: table.replicates,
                    root_seed: table.root_seed,
                    quadrature: table.quadrature,
                });
            }
            let nodes = table.quadrature.nodes(m)?;
            let plan = RowPlan {
                crit,
                nodes: &nodes,
                replicates: cfg.replicates,
                root_seed: cfg.root_seed,
                standardization: cfg.standardization,
            };
            let hits = plan
                .rejections(spec, n, row_key(spec, n))
                .map_err(context)?;
            rows.push(PowerRow::new(spec.to_string(), m, n, hits, cfg.replicates));
        }
    }
    Ok(PowerTable {
        schema_version: POWER_SCHEMA_VERSION,
        alpha: cfg.alpha,
        root_seed: cfg.root_seed,
        replicates: cfg.replicates,
        standardization: cfg.standardization,
        calibration,
        rows,
    })
}

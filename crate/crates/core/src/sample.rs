use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sum::neumaier_sum;

/// Raw `N x m` data, stored row-major. All entries finite, `N >= 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMatrix {
    n_rows: usize,
    n_cols: usize,
    values: Vec<f64>,
}

impl SampleMatrix {
    pub fn new(n_rows: usize, n_cols: usize, values: Vec<f64>) -> Result<Self> {
        if n_cols == 0 {
            return Err(Error::Shape("sample must have at least one column".into()));
        }
        if values.len() != n_rows * n_cols {
            return Err(Error::Shape(format!(
                "{} values cannot fill a {n_rows} x {n_cols} matrix",
                values.len()
            )));
        }
        if n_rows < 2 {
            return Err(Error::InsufficientData {
                needed: 2,
                got: n_rows,
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: i / n_cols,
                column: i % n_cols,
            });
        }
        Ok(Self {
            n_rows,
            n_cols,
            values,
        })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n_cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut values = Vec::with_capacity(rows.len() * n_cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != n_cols {
                return Err(Error::Shape(format!(
                    "row {i} has {} columns, expected {n_cols}",
                    r.len()
                )));
            }
            values.extend_from_slice(r);
        }
        Self::new(rows.len(), n_cols, values)
    }

    pub fn from_column(column: &[f64]) -> Result<Self> {
        Self::new(column.len(), 1, column.to_vec())
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.values[k * self.n_cols..(k + 1) * self.n_cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.values
            .iter()
            .skip(j)
            .step_by(self.n_cols)
            .copied()
            .collect()
    }

    /// Applies `x -> f(column, x)` to every entry.
    pub fn map_columns(&self, f: impl Fn(usize, f64) -> f64) -> Result<Self> {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, &x)| f(i % self.n_cols, x))
            .collect();
        Self::new(self.n_rows, self.n_cols, values)
    }

    pub fn permute_rows(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.n_rows {
            return Err(Error::Shape(
                "permutation length differs from row count".into(),
            ));
        }
        let mut values = Vec::with_capacity(self.values.len());
        for &k in order {
            values.extend_from_slice(self.row(k));
        }
        Self::new(self.n_rows, self.n_cols, values)
    }
}

/// Variance divisor used by [`standardize_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Divisor {
    /// Divide by `N` (the default).
    #[default]
    Population,
    /// Divide by `N - 1`.
    Sample,
}

/// A columnwise standardized sample (mean 0, variance 1 under its divisor).
#[derive(Debug, Clone, PartialEq)]
pub struct StandardizedSample {
    n_rows: usize,
    n_cols: usize,
    values: Vec<f64>,
    divisor: Divisor,
}

impl StandardizedSample {
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.values[k * self.n_cols..(k + 1) * self.n_cols]
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, f64> {
        self.values.chunks_exact(self.n_cols)
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.values
            .iter()
            .skip(j)
            .step_by(self.n_cols)
            .copied()
            .collect()
    }

    pub fn divisor(&self) -> Divisor {
        self.divisor
    }

    pub fn to_matrix(&self) -> SampleMatrix {
        SampleMatrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            values: self.values.clone(),
        }
    }
}

/// Standardizes every column to mean 0 and population variance 1.
pub fn standardize(x: &SampleMatrix) -> Result<StandardizedSample> {
    standardize_with(x, Divisor::Population)
}

pub fn standardize_with(x: &SampleMatrix, divisor: Divisor) -> Result<StandardizedSample> {
    let (n, m) = (x.n_rows, x.n_cols);
    let denom = match divisor {
        Divisor::Population => n as f64,
        Divisor::Sample => (n - 1) as f64,
    };
    let mut values = x.values.clone();
    for j in 0..m {
        // Sums run over sorted values so the result does not depend on row order.
        let mut col = x.column(j);
        col.sort_by(f64::total_cmp);
        let mean = neumaier_sum(col.iter().copied()) / n as f64;
        let mut sq: Vec<f64> = col.iter().map(|v| (v - mean) * (v - mean)).collect();
        sq.sort_by(f64::total_cmp);
        let var = neumaier_sum(sq) / denom;
        let scale = col.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if var.is_nan() || var.sqrt() <= 1e-14 * scale {
            return Err(Error::DegenerateColumn { column: j });
        }
        let sd = var.sqrt();
        for v in values.iter_mut().skip(j).step_by(m) {
            *v = (*v - mean) / sd;
        }
    }
    Ok(StandardizedSample {
        n_rows: n,
        n_cols: m,
        values,
        divisor,
    })
}

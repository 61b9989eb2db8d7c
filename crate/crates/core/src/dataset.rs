//! Immutable sparse dataset (CSR) with binary labels and per-component
//! smoothness constants.
//!
//! Rows store explicit nonzeros only, with strictly increasing 0-based column
//! indices. Labels are restricted to {-1, +1}. A dataset is immutable after
//! construction and safe to share across concurrent solver runs.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec::Vec;
use core::fmt;

/// Sparse design matrix in CSR layout plus labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
    labels: Vec<f64>,
    dim: usize,
}

/// Validation failures when building a [`Dataset`] or its smoothness profile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DatasetError {
    /// No rows at all.
    Empty,
    /// Zero feature dimension.
    ZeroDimension,
    /// indptr/indices/values/labels lengths are inconsistent.
    ShapeMismatch,
    /// Column indices within a row are not strictly increasing.
    NonIncreasingIndex { row: usize },
    /// A stored column index is >= the feature dimension.
    IndexOutOfRange { row: usize },
    /// A label is not exactly -1 or +1.
    BadLabel { row: usize },
    /// A feature value is NaN or infinite.
    NonFiniteValue { row: usize },
    /// A zero row with zero ridge weight has no positive smoothness constant.
    DegenerateRow { row: usize },
}

impl fmt::Display for DatasetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DatasetError::Empty => write!(f, "dataset has no rows"),
            DatasetError::ZeroDimension => write!(f, "dataset has zero feature dimension"),
            DatasetError::ShapeMismatch => write!(f, "CSR arrays have inconsistent lengths"),
            DatasetError::NonIncreasingIndex { row } => {
                write!(f, "row {row}: column indices not strictly increasing")
            }
            DatasetError::IndexOutOfRange { row } => {
                write!(f, "row {row}: column index out of range")
            }
            DatasetError::BadLabel { row } => write!(f, "row {row}: label must be -1 or +1"),
            DatasetError::NonFiniteValue { row } => {
                write!(f, "row {row}: non-finite feature value")
            }
            DatasetError::DegenerateRow { row } => {
                write!(f, "row {row}: zero row with zero ridge weight has L_i = 0")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for DatasetError {}

impl Dataset {
    /// Builds a dataset from raw CSR arrays, validating every invariant.
    pub fn new(
        indptr: Vec<usize>,
        indices: Vec<usize>,
        values: Vec<f64>,
        labels: Vec<f64>,
        dim: usize,
    ) -> Result<Self, DatasetError> {
        if labels.is_empty() {
            return Err(DatasetError::Empty);
        }
        if dim == 0 {
            return Err(DatasetError::ZeroDimension);
        }
        let n = labels.len();
        if indptr.len() != n + 1
            || indptr[0] != 0
            || *indptr.last().unwrap() != indices.len()
            || indices.len() != values.len()
        {
            return Err(DatasetError::ShapeMismatch);
        }
        for row in 0..n {
            let (lo, hi) = (indptr[row], indptr[row + 1]);
            if lo > hi || hi > indices.len() {
                return Err(DatasetError::ShapeMismatch);
            }
            let mut prev: Option<usize> = None;
            for k in lo..hi {
                let col = indices[k];
                if col >= dim {
                    return Err(DatasetError::IndexOutOfRange { row });
                }
                if let Some(p) = prev {
                    if col <= p {
                        return Err(DatasetError::NonIncreasingIndex { row });
                    }
                }
                prev = Some(col);
                if !values[k].is_finite() {
                    return Err(DatasetError::NonFiniteValue { row });
                }
            }
            if labels[row] != 1.0 && labels[row] != -1.0 {
                return Err(DatasetError::BadLabel { row });
            }
        }
        Ok(Dataset {
            indptr,
            indices,
            values,
            labels,
            dim,
        })
    }

    /// Builds a dataset from per-row `(label, [(col, value), ...])` entries.
    ///
    /// Columns are 0-based here; the on-disk 1-based convention is handled by
    /// the parser. When `dim_override` is absent the dimension is the largest
    /// stored column index plus one.
    pub fn from_rows(
        rows: &[(f64, Vec<(usize, f64)>)],
        dim_override: Option<usize>,
    ) -> Result<Self, DatasetError> {
        let mut indptr = Vec::with_capacity(rows.len() + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        let mut labels = Vec::with_capacity(rows.len());
        let mut max_col = 0usize;
        let mut any_col = false;
        indptr.push(0);
        for (label, entries) in rows {
            for &(col, val) in entries {
                indices.push(col);
                values.push(val);
                max_col = max_col.max(col);
                any_col = true;
            }
            indptr.push(indices.len());
            labels.push(*label);
        }
        let dim = dim_override.unwrap_or(if any_col { max_col + 1 } else { 0 });
        Dataset::new(indptr, indices, values, labels, dim)
    }

    /// Builds a dataset from dense rows, dropping exact zeros.
    pub fn from_dense(rows: &[Vec<f64>], labels: &[f64]) -> Result<Self, DatasetError> {
        if rows.len() != labels.len() {
            return Err(DatasetError::ShapeMismatch);
        }
        let dim = rows.first().map(|r| r.len()).unwrap_or(0);
        let entries: Vec<(f64, Vec<(usize, f64)>)> = rows
            .iter()
            .zip(labels)
            .map(|(row, &label)| {
                let cols = row
                    .iter()
                    .enumerate()
                    .filter(|(_, &v)| v != 0.0)
                    .map(|(j, &v)| (j, v))
                    .collect();
                (label, cols)
            })
            .collect();
        Dataset::from_rows(&entries, Some(dim.max(1)))
    }

    /// Number of samples.
    pub fn n(&self) -> usize {
        self.labels.len()
    }

    /// Feature dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Sparse row `i` as `(column indices, values)`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (lo, hi) = (self.indptr[i], self.indptr[i + 1]);
        (&self.indices[lo..hi], &self.values[lo..hi])
    }

    /// Label of row `i` (-1 or +1).
    pub fn label(&self, i: usize) -> f64 {
        self.labels[i]
    }

    /// All labels in row order.
    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    /// Squared Euclidean norm of row `i`.
    pub fn row_norm_sq(&self, i: usize) -> f64 {
        let (_, vals) = self.row(i);
        vals.iter().map(|v| v * v).sum()
    }

    /// Sparse dot product of row `i` with a dense vector.
    pub fn row_dot(&self, i: usize, w: &[f64]) -> f64 {
        debug_assert_eq!(w.len(), self.dim);
        let (cols, vals) = self.row(i);
        cols.iter().zip(vals).map(|(&c, &v)| v * w[c]).sum()
    }

    /// Dense copy of row `i`.
    pub fn row_dense(&self, i: usize) -> Vec<f64> {
        let mut out = alloc::vec![0.0; self.dim];
        let (cols, vals) = self.row(i);
        for (&c, &v) in cols.iter().zip(vals) {
            out[c] = v;
        }
        out
    }

    /// Copy of the dataset with every nonzero row scaled to unit Euclidean
    /// norm. Zero rows are kept as-is.
    pub fn normalized_rows(&self) -> Dataset {
        let mut values = self.values.clone();
        for i in 0..self.n() {
            let norm = self.row_norm_sq(i).sqrt();
            if norm > 0.0 {
                for k in self.indptr[i]..self.indptr[i + 1] {
                    values[k] /= norm;
                }
            }
        }
        Dataset {
            indptr: self.indptr.clone(),
            indices: self.indices.clone(),
            values,
            labels: self.labels.clone(),
            dim: self.dim,
        }
    }
}

/// Per-component smoothness constants `L_i` with their mean and max.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothnessProfile {
    per_component: Vec<f64>,
    mean: f64,
    max: f64,
}

impl SmoothnessProfile {
    pub fn per_component(&self) -> &[f64] {
        &self.per_component
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn n(&self) -> usize {
        self.per_component.len()
    }
}

/// Smoothness constants of the logistic-plus-ridge components:
/// `L_i = ||a_i||^2 / 4 + lambda2`.
///
/// Fails with [`DatasetError::DegenerateRow`] when a zero row meets
/// `lambda2 = 0`, since every `L_i` must be strictly positive.
pub fn component_lipschitz(ds: &Dataset, lambda2: f64) -> Result<SmoothnessProfile, DatasetError> {
    assert!(lambda2 >= 0.0, "ridge weight must be nonnegative");
    let mut per_component = Vec::with_capacity(ds.n());
    let mut sum = 0.0;
    let mut max = 0.0f64;
    for i in 0..ds.n() {
        let li = ds.row_norm_sq(i) / 4.0 + lambda2;
        if li <= 0.0 {
            return Err(DatasetError::DegenerateRow { row: i });
        }
        sum += li;
        max = max.max(li);
        per_component.push(li);
    }
    Ok(SmoothnessProfile {
        mean: sum / ds.n() as f64,
        max,
        per_component,
    })
}

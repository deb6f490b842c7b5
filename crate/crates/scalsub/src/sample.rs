//! Observed data. A [`Sample`] holds `n` observations in R^d in row-major
//! order; a [`Window`] is a borrowed contiguous run of observations, the unit
//! a [`Statistic`](crate::Statistic) is evaluated on.
//!
//! Observation indices are 1-based throughout the crate, matching the usual
//! X_1, ..., X_n notation; the conversion to 0-based storage happens in one
//! place, here.

use crate::error::{Error, Result};

/// An ordered sample of `n` observations in R^d.
///
/// Values are validated to be finite on construction so downstream sorting
/// and selection never meet a NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    data: Vec<f64>,
    n: usize,
    dim: usize,
}

impl Sample {
    /// A univariate sample. Errors on empty input or non-finite values.
    pub fn univariate(values: Vec<f64>) -> Result<Self> {
        Self::from_rows(values, 1)
    }

    /// A sample of `n = data.len() / dim` observations stored row-major.
    /// Errors if `dim` is zero, the length is not a multiple of `dim`, the
    /// sample is empty, or any value is non-finite.
    pub fn from_rows(data: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be at least 1".into()));
        }
        if data.is_empty() {
            return Err(Error::InvalidInput("sample is empty".into()));
        }
        if !data.len().is_multiple_of(dim) {
            return Err(Error::InvalidInput(format!(
                "{} values do not form whole rows of dimension {dim}",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite value at observation {}, coordinate {}",
                pos / dim + 1,
                pos % dim + 1
            )));
        }
        let n = data.len() / dim;
        Ok(Sample { data, n, dim })
    }

    /// Number of observations.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Dimension of each observation.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The raw row-major storage (`n * dim` values).
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// The whole sample as a window.
    pub fn full(&self) -> Window<'_> {
        Window {
            data: &self.data,
            dim: self.dim,
        }
    }

    /// Window of `len` observations starting at 1-based index `start`.
    pub fn window(&self, start: usize, len: usize) -> Result<Window<'_>> {
        if start == 0 || len == 0 || start + len - 1 > self.n {
            return Err(Error::InvalidInput(format!(
                "window [{start}, {}] out of range 1..={}",
                start + len.saturating_sub(1),
                self.n
            )));
        }
        let lo = (start - 1) * self.dim;
        let hi = lo + len * self.dim;
        Ok(Window {
            data: &self.data[lo..hi],
            dim: self.dim,
        })
    }

    /// Owned copy of a window, as a new sample. Used where a sub-range must
    /// itself be subsampled, e.g. the outer blocks of the two-level interval.
    pub fn subsample(&self, start: usize, len: usize) -> Result<Sample> {
        let w = self.window(start, len)?;
        Ok(Sample {
            data: w.data.to_vec(),
            n: len,
            dim: self.dim,
        })
    }
}

/// A borrowed contiguous run of observations.
#[derive(Debug, Clone, Copy)]
pub struct Window<'a> {
    data: &'a [f64],
    dim: usize,
}

impl<'a> Window<'a> {
    /// Number of observations in the window.
    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The window as a flat slice of scalars. Errors unless the sample is
    /// univariate; the built-in statistics all go through this.
    pub fn scalars(&self) -> Result<&'a [f64]> {
        if self.dim != 1 {
            return Err(Error::InvalidInput(format!(
                "statistic requires univariate data, sample has dimension {}",
                self.dim
            )));
        }
        Ok(self.data)
    }

    /// The `i`-th observation (0-based within the window) as a coordinate
    /// slice.
    pub fn row(&self, i: usize) -> &'a [f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }
}

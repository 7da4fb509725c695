//! Uniform 1D sample lattices and functions sampled on them.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("grid interval must satisfy b > a (got a = {a}, b = {b})")]
    EmptyInterval { a: f64, b: f64 },
    #[error("grid needs at least 2 samples (got {0})")]
    TooFewSamples(usize),
    #[error("grid endpoints must be finite")]
    NonFinite,
    #[error("sample count {got} does not match grid size {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("functions live on different grids")]
    GridMismatch,
}

/// Uniform lattice `a = x_0 < x_1 < ... < x_{n-1} = b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    a: f64,
    b: f64,
    n: usize,
    h: f64,
}

impl Grid {
    pub fn new(a: f64, b: f64, n: usize) -> Result<Self, GridError> {
        if !a.is_finite() || !b.is_finite() {
            return Err(GridError::NonFinite);
        }
        if b <= a {
            return Err(GridError::EmptyInterval { a, b });
        }
        if n < 2 {
            return Err(GridError::TooFewSamples(n));
        }
        let h = (b - a) / (n - 1) as f64;
        Ok(Self { a, b, n, h })
    }

    /// Grid on `[a, b]` whose spacing is as close as possible to `h`.
    pub fn with_spacing(a: f64, b: f64, h: f64) -> Result<Self, GridError> {
        if !(h.is_finite() && h > 0.0) {
            return Err(GridError::NonFinite);
        }
        let cells = ((b - a) / h).round().max(1.0) as usize;
        Self::new(a, b, cells + 1)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    /// Abscissa of sample `i`, computed directly from `a` so there is no drift.
    /// The last sample is pinned to `b`.
    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.b
        } else {
            self.a + i as f64 * self.h
        }
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.x(i))
    }

    /// Index of the first sample at or beyond `a + fraction * (b - a)`.
    pub fn index_from_fraction(&self, fraction: f64) -> usize {
        let target = self.a + fraction * self.length();
        (0..self.n).find(|&i| self.x(i) >= target - 1e-12 * self.length()).unwrap_or(self.n - 1)
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        self.n == other.n && self.a == other.a && self.b == other.b
    }
}

/// Scalar types a [`GridFunction`] may carry: `f64` or `Complex64`.
pub trait Sample:
    Copy
    + PartialEq
    + std::fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Neg<Output = Self>
    + Mul<f64, Output = Self>
    + Send
    + Sync
    + 'static
{
    fn zero() -> Self;
    fn is_nan(&self) -> bool;
    fn modulus(&self) -> f64;
}

impl Sample for f64 {
    fn zero() -> Self {
        0.0
    }
    fn is_nan(&self) -> bool {
        f64::is_nan(*self)
    }
    fn modulus(&self) -> f64 {
        self.abs()
    }
}

impl Sample for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn is_nan(&self) -> bool {
        Complex64::is_nan(*self)
    }
    fn modulus(&self) -> f64 {
        self.norm()
    }
}

/// Samples of a real- or complex-valued function on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction<T = f64> {
    grid: Grid,
    samples: Vec<T>,
}

impl<T: Sample> GridFunction<T> {
    pub fn new(grid: Grid, samples: Vec<T>) -> Result<Self, GridError> {
        if samples.len() != grid.len() {
            return Err(GridError::LengthMismatch { expected: grid.len(), got: samples.len() });
        }
        Ok(Self { grid, samples })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> T) -> Self {
        let samples = grid.points().map(f).collect();
        Self { grid, samples }
    }

    pub fn zeros(grid: Grid) -> Self {
        Self { grid, samples: vec![T::zero(); grid.len()] }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [T] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<T> {
        self.samples
    }

    pub fn map<U: Sample>(&self, f: impl Fn(T) -> U) -> GridFunction<U> {
        GridFunction { grid: self.grid, samples: self.samples.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_with<U: Sample, V: Sample>(
        &self,
        other: &GridFunction<U>,
        f: impl Fn(T, U) -> V,
    ) -> Result<GridFunction<V>, GridError> {
        if !self.grid.same_as(&other.grid) {
            return Err(GridError::GridMismatch);
        }
        let samples = self.samples.iter().zip(&other.samples).map(|(&x, &y)| f(x, y)).collect();
        Ok(GridFunction { grid: self.grid, samples })
    }

    /// Samples reversed: the value at `t` moves to `a + b - t`.
    pub fn reversed(&self) -> Self {
        let mut samples = self.samples.clone();
        samples.reverse();
        Self { grid: self.grid, samples }
    }

    pub fn has_nan(&self) -> bool {
        self.samples.iter().any(Sample::is_nan)
    }

    pub fn max_modulus(&self) -> f64 {
        self.samples.iter().map(Sample::modulus).fold(0.0, f64::max)
    }

    /// Largest pointwise `|self - other|`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64, GridError> {
        if !self.grid.same_as(&other.grid) {
            return Err(GridError::GridMismatch);
        }
        Ok(self.samples.iter().zip(&other.samples).map(|(&x, &y)| (x - y).modulus()).fold(0.0, f64::max))
    }

    /// Trapezoid-rule integral over the whole grid.
    pub fn integrate(&self) -> T {
        let n = self.samples.len();
        let mut acc = (self.samples[0] + self.samples[n - 1]) * 0.5;
        for &v in &self.samples[1..n - 1] {
            acc = acc + v;
        }
        acc * self.grid.h
    }
}

impl GridFunction<f64> {
    /// Number of sign changes among samples whose magnitude exceeds
    /// `threshold * max|f|`; samples below the threshold are skipped.
    pub fn sign_changes(&self, threshold: f64) -> usize {
        let cutoff = threshold * self.max_modulus();
        let mut last = 0.0_f64;
        let mut count = 0;
        for &v in &self.samples {
            if v.abs() <= cutoff {
                continue;
            }
            if last != 0.0 && last.signum() != v.signum() {
                count += 1;
            }
            last = v;
        }
        count
    }

    pub fn to_complex(&self) -> GridFunction<Complex64> {
        self.map(|v| Complex64::new(v, 0.0))
    }
}

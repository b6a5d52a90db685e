//! Uniform periodic grids.
//!
//! A grid covers the box `[0, L_1) x ... x [0, L_d)` with the same even
//! number of points on every axis. Sample `j` on axis `i` sits at
//! `x = j * L_i / n`; the right endpoint is identified with the left one.
//! Trapezoid quadrature on such a grid reduces to the midpoint-free
//! rectangle rule and is exact for band-limited integrands.

use crate::{Error, Result};

/// Default box edge (2 pi).
pub const DEFAULT_PERIOD: f64 = std::f64::consts::TAU;

/// Uniform periodic grid on a d-dimensional box.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    dimension: usize,
    points_per_axis: usize,
    periods: Vec<f64>,
}

impl Grid {
    /// Grid with the same period on every axis.
    ///
    /// `dimension` must be 2 or 3, `points_per_axis` even and at least 4,
    /// `period` strictly positive.
    pub fn new(dimension: usize, points_per_axis: usize, period: f64) -> Result<Self> {
        Self::with_periods(dimension, points_per_axis, &vec![period; dimension])
    }

    /// Grid with an explicit period per axis.
    pub fn with_periods(dimension: usize, points_per_axis: usize, periods: &[f64]) -> Result<Self> {
        if dimension != 2 && dimension != 3 {
            return Err(Error::DimensionError(format!(
                "dimension must be 2 or 3, got {dimension}"
            )));
        }
        if points_per_axis < 4 || !points_per_axis.is_multiple_of(2) {
            return Err(Error::InvalidField(format!(
                "points_per_axis must be even and at least 4, got {points_per_axis}"
            )));
        }
        if periods.len() != dimension {
            return Err(Error::DimensionError(format!(
                "expected {dimension} periods, got {}",
                periods.len()
            )));
        }
        for (axis, &period) in periods.iter().enumerate() {
            if !(period > 0.0) || !period.is_finite() {
                return Err(Error::OutOfRange(format!(
                    "period on axis {axis} must be positive and finite, got {period}"
                )));
            }
        }
        Ok(Self {
            dimension,
            points_per_axis,
            periods: periods.to_vec(),
        })
    }

    /// Number of axes (2 or 3).
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Points per axis (shared by all axes).
    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    /// Box edge length on `axis`.
    pub fn period(&self, axis: usize) -> f64 {
        self.periods[axis]
    }

    /// All box edge lengths.
    pub fn periods(&self) -> &[f64] {
        &self.periods
    }

    /// Shape vector `[n; dimension]` for array allocation.
    pub fn shape(&self) -> Vec<usize> {
        vec![self.points_per_axis; self.dimension]
    }

    /// Total sample count `n^d`.
    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.dimension as u32)
    }

    /// True when the grid holds no samples (never, by construction).
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Coordinate of sample `index` on `axis`.
    pub fn coordinate(&self, axis: usize, index: usize) -> f64 {
        self.periods[axis] * index as f64 / self.points_per_axis as f64
    }

    /// All coordinates along `axis`.
    pub fn axis_coordinates(&self, axis: usize) -> Vec<f64> {
        (0..self.points_per_axis)
            .map(|j| self.coordinate(axis, j))
            .collect()
    }

    /// Box volume `L_1 * ... * L_d`.
    pub fn volume(&self) -> f64 {
        self.periods.iter().product()
    }

    /// Quadrature weight of one sample (cell volume).
    pub fn cell_volume(&self) -> f64 {
        self.volume() / self.len() as f64
    }

    /// Physical angular wavenumber `2 pi m / L` for integer frequency `m` on `axis`.
    pub fn wavenumber(&self, axis: usize, m: i64) -> f64 {
        std::f64::consts::TAU * m as f64 / self.periods[axis]
    }

    /// Largest integer frequency representable without hitting Nyquist.
    pub fn max_resolved_frequency(&self) -> i64 {
        (self.points_per_axis / 2) as i64 - 1
    }

    /// True when both grids have identical layout.
    pub fn same_layout(&self, other: &Grid) -> bool {
        self == other
    }
}

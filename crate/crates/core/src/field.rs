//! Vector fields sampled on periodic grids, their exact spectral
//! derivatives, and quadrature norms.
//!
//! A field carries as many components as its grid has axes, except on a
//! 2D section grid where three components are allowed (in-plane velocity
//! plus the carried third component). Derivatives are derivatives of the
//! trigonometric interpolant, so they are exact for band-limited data.

use ndarray::{ArrayD, IxDyn};

use crate::grid::Grid;
use crate::spectral;
use crate::{Error, Result};

/// Vector field sampled on a grid, one dense array per component.
#[derive(Debug, Clone)]
pub struct PhysicalField {
    grid: Grid,
    components: Vec<ArrayD<f64>>,
}

/// All first derivatives `D_i v_c` (axis index `i`, component index `c`).
#[derive(Debug, Clone)]
pub struct GradientTensor {
    grid: Grid,
    n_axes: usize,
    n_components: usize,
    entries: Vec<ArrayD<f64>>,
}

/// Quadrature norms of a field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormReport {
    /// `L^2` norm of the pointwise Euclidean magnitude.
    pub l2: f64,
    /// `L^4` norm of the pointwise Euclidean magnitude.
    pub l4: f64,
    /// `H^1` seminorm: root sum of squared `L^2` norms of all `D_i v_c`.
    pub h1_semi: f64,
}

fn check_component_count(grid: &Grid, count: usize) -> Result<()> {
    let ok = count == grid.dimension() || (grid.dimension() == 2 && count == 3);
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidField(format!(
            "component count {count} invalid for a {}D grid (expected {} or, on 2D sections, 3)",
            grid.dimension(),
            grid.dimension()
        )))
    }
}

impl PhysicalField {
    /// Field from explicit component arrays; shapes must match the grid.
    pub fn new(grid: Grid, components: Vec<ArrayD<f64>>) -> Result<Self> {
        check_component_count(&grid, components.len())?;
        let shape = grid.shape();
        for (c, comp) in components.iter().enumerate() {
            if comp.shape() != shape.as_slice() {
                return Err(Error::InvalidField(format!(
                    "component {c} has shape {:?}, grid expects {:?}",
                    comp.shape(),
                    shape
                )));
            }
            if comp.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidField(format!(
                    "component {c} contains non-finite samples"
                )));
            }
        }
        Ok(Self { grid, components })
    }

    /// Zero field with `n_components` components.
    pub fn zeros(grid: Grid, n_components: usize) -> Result<Self> {
        check_component_count(&grid, n_components)?;
        let shape = IxDyn(&grid.shape());
        let components = (0..n_components).map(|_| ArrayD::zeros(shape.clone())).collect();
        Ok(Self { grid, components })
    }

    /// Field sampled from a closure of (component, coordinates).
    pub fn from_fn(
        grid: Grid,
        n_components: usize,
        f: impl Fn(usize, &[f64]) -> f64,
    ) -> Result<Self> {
        check_component_count(&grid, n_components)?;
        let shape = IxDyn(&grid.shape());
        let dim = grid.dimension();
        let components = (0..n_components)
            .map(|c| {
                ArrayD::from_shape_fn(shape.clone(), |idx| {
                    let mut local = vec![0.0; dim];
                    for axis in 0..dim {
                        local[axis] = grid.coordinate(axis, idx[axis]);
                    }
                    f(c, &local)
                })
            })
            .collect();
        Ok(Self { grid, components })
    }

    /// Grid the field lives on.
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Number of components.
    pub fn n_components(&self) -> usize {
        self.components.len()
    }

    /// Sample array of component `c`.
    pub fn component(&self, c: usize) -> &ArrayD<f64> {
        &self.components[c]
    }

    /// Mutable sample array of component `c`.
    pub fn component_mut(&mut self, c: usize) -> &mut ArrayD<f64> {
        &mut self.components[c]
    }

    /// All components.
    pub fn components(&self) -> &[ArrayD<f64>] {
        &self.components
    }

    /// All first derivatives, computed spectrally.
    pub fn gradient(&self) -> GradientTensor {
        let n_axes = self.grid.dimension();
        let n_components = self.components.len();
        let mut entries = Vec::with_capacity(n_axes * n_components);
        for axis in 0..n_axes {
            for comp in &self.components {
                entries.push(spectral::derivative(comp, &self.grid, axis));
            }
        }
        GradientTensor {
            grid: self.grid.clone(),
            n_axes,
            n_components,
            entries,
        }
    }

    /// Divergence `sum_i D_i v_i`; defined when components match axes.
    pub fn divergence(&self) -> Result<ArrayD<f64>> {
        if self.components.len() != self.grid.dimension() {
            return Err(Error::InvalidField(format!(
                "divergence needs one component per axis, got {} components on a {}D grid",
                self.components.len(),
                self.grid.dimension()
            )));
        }
        let mut out = ArrayD::zeros(IxDyn(&self.grid.shape()));
        for (axis, comp) in self.components.iter().enumerate() {
            out += &spectral::derivative(comp, &self.grid, axis);
        }
        Ok(out)
    }

    /// L2, L4, and H1-seminorm by exact quadrature.
    pub fn norms(&self) -> NormReport {
        let w = self.grid.cell_volume();
        let mut sum2 = 0.0;
        let mut sum4 = 0.0;
        for i in 0..self.grid.len() {
            let mut mag2 = 0.0;
            for comp in &self.components {
                let v = comp.as_slice().expect("standard layout")[i];
                mag2 += v * v;
            }
            sum2 += mag2;
            sum4 += mag2 * mag2;
        }
        let grad = self.gradient();
        let mut grad2 = 0.0;
        for entry in &grad.entries {
            for v in entry.iter() {
                grad2 += v * v;
            }
        }
        NormReport {
            l2: (sum2 * w).sqrt(),
            l4: (sum4 * w).sqrt().sqrt(),
            h1_semi: (grad2 * w).sqrt(),
        }
    }

    /// Largest pointwise Euclidean magnitude.
    pub fn max_magnitude(&self) -> f64 {
        let mut best = 0.0f64;
        for i in 0..self.grid.len() {
            let mut mag2 = 0.0;
            for comp in &self.components {
                let v = comp.as_slice().expect("standard layout")[i];
                mag2 += v * v;
            }
            best = best.max(mag2);
        }
        best.sqrt()
    }

    /// `self + factor * other`, on identical grids and component counts.
    pub fn add_scaled(&self, other: &PhysicalField, factor: f64) -> Result<PhysicalField> {
        if !self.grid.same_layout(&other.grid) {
            return Err(Error::GridMismatch(
                "add_scaled requires identical grids".to_string(),
            ));
        }
        if self.components.len() != other.components.len() {
            return Err(Error::InvalidField(format!(
                "component counts differ: {} vs {}",
                self.components.len(),
                other.components.len()
            )));
        }
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a + &(b * factor))
            .collect();
        PhysicalField::new(self.grid.clone(), components)
    }

    /// Field scaled by a constant.
    pub fn scaled(&self, factor: f64) -> PhysicalField {
        let components = self.components.iter().map(|a| a * factor).collect();
        Self {
            grid: self.grid.clone(),
            components,
        }
    }

    /// L2 inner product `integral of self . other`.
    pub fn inner(&self, other: &PhysicalField) -> Result<f64> {
        if !self.grid.same_layout(&other.grid) {
            return Err(Error::GridMismatch(
                "inner product requires identical grids".to_string(),
            ));
        }
        if self.components.len() != other.components.len() {
            return Err(Error::InvalidField(format!(
                "component counts differ: {} vs {}",
                self.components.len(),
                other.components.len()
            )));
        }
        let mut sum = 0.0;
        for (a, b) in self.components.iter().zip(&other.components) {
            for (x, y) in a.iter().zip(b.iter()) {
                sum += x * y;
            }
        }
        Ok(sum * self.grid.cell_volume())
    }
}

impl GradientTensor {
    /// Grid the entries live on.
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Number of derivative axes.
    pub fn n_axes(&self) -> usize {
        self.n_axes
    }

    /// Number of field components.
    pub fn n_components(&self) -> usize {
        self.n_components
    }

    /// Entry `D_axis v_component`.
    pub fn entry(&self, axis: usize, component: usize) -> &ArrayD<f64> {
        &self.entries[axis * self.n_components + component]
    }

    /// Pointwise trace `sum_i D_i v_i`; defined for square tensors.
    pub fn trace(&self) -> Result<ArrayD<f64>> {
        if self.n_axes != self.n_components {
            return Err(Error::DimensionError(format!(
                "trace needs a square tensor, got {} axes x {} components",
                self.n_axes, self.n_components
            )));
        }
        let mut out = ArrayD::zeros(IxDyn(&self.grid.shape()));
        for i in 0..self.n_axes {
            out += self.entry(i, i);
        }
        Ok(out)
    }

    /// `L^2` norm of a single entry.
    pub fn entry_l2(&self, axis: usize, component: usize) -> f64 {
        let w = self.grid.cell_volume();
        let sum: f64 = self.entry(axis, component).iter().map(|v| v * v).sum();
        (sum * w).sqrt()
    }
}

/// Largest absolute sample of a scalar array.
pub fn max_abs(values: &ArrayD<f64>) -> f64 {
    values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}

/// Classical cellular vortex pattern.
///
/// 2D: `(sin x1 cos x2, -cos x1 sin x2)`. 3D: the analogous
/// `(sin x1 cos x2 cos x3, -cos x1 sin x2 cos x3, 0)`. Both are
/// divergence-free and band-limited to `|k|_inf = 1` for the grid period.
pub fn taylor_green(grid: &Grid) -> Result<PhysicalField> {
    let tau = std::f64::consts::TAU;
    let scale: Vec<f64> = grid.periods().iter().map(|l| tau / l).collect();
    match grid.dimension() {
        2 => PhysicalField::from_fn(grid.clone(), 2, move |c, x| {
            let (a, b) = (scale[0] * x[0], scale[1] * x[1]);
            match c {
                0 => a.sin() * b.cos(),
                _ => -a.cos() * b.sin(),
            }
        }),
        _ => PhysicalField::from_fn(grid.clone(), 3, move |c, x| {
            let (a, b, g) = (scale[0] * x[0], scale[1] * x[1], scale[2] * x[2]);
            match c {
                0 => a.sin() * b.cos() * g.cos(),
                1 => -a.cos() * b.sin() * g.cos(),
                _ => 0.0,
            }
        }),
    }
}

//! Orthonormal divergence-free trigonometric bases on periodic boxes.
//!
//! A mode is `pol * sqrt(2/V) * sin(k.x)` or the cosine twin, where the
//! integer wavevector `k` ranges over half-space representatives with
//! `0 < |k|_inf <= k_max` (first nonzero entry positive; the `-k` twin
//! spans the same pair of functions) and the unit polarization is
//! orthogonal to `k`, so every mode is solenoidal and has unit L2 norm.
//! Mean (`k = 0`) modes are excluded; all spanned fields average to zero.
//!
//! Polarization rule, fixed for reproducibility: in 2D the single
//! polarization is `(-k2, k1)/|k|`; in 3D the pair is
//! `p1 = normalize(k x e)`, `p2 = normalize(k x p1)` with `e = z_hat`
//! (or `e = x_hat` when `k` is parallel to `z_hat`). Section bases
//! replace `k` by the constraint vector
//! `g = (k1, k2, -(a1^{-1} k1 + a2^{-1} k2))` and span its null space,
//! so every mode satisfies the section constraint identically.
//!
//! Mode order is frozen to the key (|k|^2, lexicographic k,
//! polarization index, parity with sin before cos); eigenvalues
//! `|2 pi k / period|^2` are therefore nondecreasing.

use std::io::Write;

use ndarray::{ArrayD, IxDyn};
use num_complex::Complex64;

use crate::field::PhysicalField;
use crate::grid::Grid;
use crate::restrict::Hyperplane;
use crate::spectral;
use crate::{Error, Result};

/// Trigonometric parity of a mode. Sin sorts before cos.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Parity {
    Sin,
    Cos,
}

impl Parity {
    /// Lowercase name used in manifests.
    pub fn name(&self) -> &'static str {
        match self {
            Parity::Sin => "sin",
            Parity::Cos => "cos",
        }
    }
}

/// One basis mode: wavevector, unit polarization, parity, eigenvalue.
#[derive(Debug, Clone)]
pub struct BasisMode {
    /// Integer wavevector (third entry 0 on 2D grids).
    pub wavevector: [i64; 3],
    /// Unit polarization over the field components (unused entries 0).
    pub polarization: [f64; 3],
    /// 0 or 1; 2D standard bases have a single polarization.
    pub polarization_index: usize,
    /// Sin or cos.
    pub parity: Parity,
    /// `|2 pi k / period|^2`.
    pub eigenvalue: f64,
}

/// Which constraint the polarizations satisfy.
#[derive(Debug, Clone, PartialEq)]
pub enum BasisKind {
    /// Polarizations orthogonal to the wavevector (divergence-free).
    Standard,
    /// Polarizations in the null space of the section constraint.
    Restricted(Hyperplane),
}

/// Ordered orthonormal mode system.
#[derive(Debug, Clone)]
pub struct BasisSet {
    dimension: usize,
    n_components: usize,
    k_max: i64,
    period: f64,
    kind: BasisKind,
    modes: Vec<BasisMode>,
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn normalize(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

/// Half-space representative rule: first nonzero entry positive.
fn is_representative(k: [i64; 3]) -> bool {
    if k[0] != 0 {
        return k[0] > 0;
    }
    if k[1] != 0 {
        return k[1] > 0;
    }
    k[2] > 0
}

fn wavevectors(dimension: usize, k_max: i64) -> Vec<[i64; 3]> {
    let mut out = Vec::new();
    let range = -k_max..=k_max;
    if dimension == 2 {
        for k1 in range.clone() {
            for k2 in range.clone() {
                let k = [k1, k2, 0];
                if is_representative(k) {
                    out.push(k);
                }
            }
        }
    } else {
        for k1 in range.clone() {
            for k2 in range.clone() {
                for k3 in range.clone() {
                    let k = [k1, k2, k3];
                    if is_representative(k) {
                        out.push(k);
                    }
                }
            }
        }
    }
    out
}

/// Polarizations orthogonal to `direction` (unit vectors, fixed rule).
fn orthogonal_pair(direction: [f64; 3]) -> [[f64; 3]; 2] {
    let e = if direction[0] == 0.0 && direction[1] == 0.0 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    let p1 = normalize(cross(direction, e));
    let p2 = normalize(cross(direction, p1));
    [p1, p2]
}

fn validate_shared(k_max: i64, period: f64) -> Result<()> {
    if k_max < 1 {
        return Err(Error::EmptyBasis);
    }
    if !(period > 0.0) || !period.is_finite() {
        return Err(Error::OutOfRange(format!(
            "basis period must be positive and finite, got {period}"
        )));
    }
    Ok(())
}

impl BasisSet {
    /// All divergence-free modes with `|k|_inf <= k_max` on a box of edge
    /// `period` in the given dimension.
    pub fn standard(dimension: usize, k_max: i64, period: f64) -> Result<Self> {
        if dimension != 2 && dimension != 3 {
            return Err(Error::DimensionError(format!(
                "basis dimension must be 2 or 3, got {dimension}"
            )));
        }
        validate_shared(k_max, period)?;
        let lam = (std::f64::consts::TAU / period).powi(2);
        let mut modes = Vec::new();
        for k in wavevectors(dimension, k_max) {
            let kf = [k[0] as f64, k[1] as f64, k[2] as f64];
            let eigenvalue = lam * (kf[0] * kf[0] + kf[1] * kf[1] + kf[2] * kf[2]);
            let pols: Vec<[f64; 3]> = if dimension == 2 {
                let n = (kf[0] * kf[0] + kf[1] * kf[1]).sqrt();
                vec![[-kf[1] / n, kf[0] / n, 0.0]]
            } else {
                orthogonal_pair(normalize(kf)).to_vec()
            };
            for (polarization_index, polarization) in pols.into_iter().enumerate() {
                for parity in [Parity::Sin, Parity::Cos] {
                    modes.push(BasisMode {
                        wavevector: k,
                        polarization,
                        polarization_index,
                        parity,
                        eigenvalue,
                    });
                }
            }
        }
        let mut basis = Self {
            dimension,
            n_components: dimension,
            k_max,
            period,
            kind: BasisKind::Standard,
            modes,
        };
        basis.sort_modes();
        Ok(basis)
    }

    /// All section-admissible 3-component modes over the 2D section.
    ///
    /// Each (wavevector, parity) slot carries the two unit polarizations
    /// spanning the null space of `g(k)`.
    pub fn restricted(k_max: i64, period: f64, plane: &Hyperplane) -> Result<Self> {
        validate_shared(k_max, period)?;
        let lam = (std::f64::consts::TAU / period).powi(2);
        let mut modes = Vec::new();
        for k in wavevectors(2, k_max) {
            let kf = [k[0] as f64, k[1] as f64, 0.0];
            let eigenvalue = lam * (kf[0] * kf[0] + kf[1] * kf[1]);
            let g = [
                kf[0],
                kf[1],
                -(plane.a1_inv() * kf[0] + plane.a2_inv() * kf[1]),
            ];
            let pols = orthogonal_pair(normalize(g));
            for (polarization_index, polarization) in pols.into_iter().enumerate() {
                for parity in [Parity::Sin, Parity::Cos] {
                    modes.push(BasisMode {
                        wavevector: k,
                        polarization,
                        polarization_index,
                        parity,
                    eigenvalue,
                    });
                }
            }
        }
        let mut basis = Self {
            dimension: 2,
            n_components: 3,
            k_max,
            period,
            kind: BasisKind::Restricted(*plane),
            modes,
        };
        basis.sort_modes();
        Ok(basis)
    }

    fn sort_modes(&mut self) {
        self.modes.sort_by_key(|m| {
            let k = m.wavevector;
            (
                k[0] * k[0] + k[1] * k[1] + k[2] * k[2],
                k,
                m.polarization_index,
                m.parity,
            )
        });
    }

    /// Grid dimension the basis lives on.
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Components per mode (d, or 3 on sections).
    pub fn n_components(&self) -> usize {
        self.n_components
    }

    /// Bandwidth bound `|k|_inf <= k_max`.
    pub fn k_max(&self) -> i64 {
        self.k_max
    }

    /// Box edge the modes are periodic over.
    pub fn period(&self) -> f64 {
        self.period
    }

    /// Standard or section-constrained.
    pub fn kind(&self) -> &BasisKind {
        &self.kind
    }

    /// Number of modes.
    pub fn len(&self) -> usize {
        self.modes.len()
    }

    /// True when the basis has no modes (never after construction).
    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// Ordered modes.
    pub fn modes(&self) -> &[BasisMode] {
        &self.modes
    }

    /// Eigenvalue of the diffusion operator on mode `index`.
    pub fn stokes_eigenvalue(&self, index: usize) -> f64 {
        self.modes[index].eigenvalue
    }

    /// Smallest eigenvalue (modes are sorted, so this is the head).
    pub fn min_eigenvalue(&self) -> f64 {
        self.modes[0].eigenvalue
    }

    /// Index of a mode by its identifying triple, if present.
    pub fn find_mode(
        &self,
        wavevector: [i64; 3],
        polarization_index: usize,
        parity: Parity,
    ) -> Option<usize> {
        self.modes.iter().position(|m| {
            m.wavevector == wavevector
                && m.polarization_index == polarization_index
                && m.parity == parity
        })
    }

    /// Reject grids with the wrong period or too few points to resolve
    /// the bandwidth.
    pub fn check_grid(&self, grid: &Grid) -> Result<()> {
        if grid.dimension() != self.dimension {
            return Err(Error::DimensionError(format!(
                "basis is {}D, grid is {}D",
                self.dimension,
                grid.dimension()
            )));
        }
        for axis in 0..grid.dimension() {
            if grid.period(axis) != self.period {
                return Err(Error::GridMismatch(format!(
                    "basis period {} differs from grid period {} on axis {axis}",
                    self.period,
                    grid.period(axis)
                )));
            }
        }
        if self.k_max > grid.max_resolved_frequency() {
            return Err(Error::Aliasing {
                points: grid.points_per_axis(),
                k_max: self.k_max,
                needed: (2 * self.k_max + 2) as usize,
            });
        }
        Ok(())
    }

    fn bins(&self, n: usize, k: [i64; 3], sign: i64) -> Vec<usize> {
        (0..self.dimension)
            .map(|ax| spectral::bin(n, sign * k[ax]))
            .collect()
    }

    /// Coefficients `<field, w_i>` for every mode, in mode order.
    pub fn analyze(&self, field: &PhysicalField) -> Result<Vec<f64>> {
        self.check_grid(field.grid())?;
        if field.n_components() != self.n_components {
            return Err(Error::InvalidField(format!(
                "basis expects {} components, field has {}",
                self.n_components,
                field.n_components()
            )));
        }
        let grid = field.grid();
        let n = grid.points_per_axis();
        let spectra: Vec<ArrayD<Complex64>> = (0..self.n_components)
            .map(|c| spectral::to_spectral(field.component(c)))
            .collect();
        let scale = (2.0 * grid.volume()).sqrt();
        let coeffs = self
            .modes
            .iter()
            .map(|mode| {
                let plus = self.bins(n, mode.wavevector, 1);
                let mut acc = 0.0;
                for (c, spec) in spectra.iter().enumerate() {
                    let pc = mode.polarization[c];
                    if pc == 0.0 {
                        continue;
                    }
                    let v = spec[IxDyn(&plus)];
                    acc += pc
                        * match mode.parity {
                            Parity::Cos => v.re,
                            Parity::Sin => -v.im,
                        };
                }
                acc * scale
            })
            .collect();
        Ok(coeffs)
    }

    /// Field `sum_i coeffs[i] w_i` sampled on `grid`.
    pub fn synthesize(&self, coeffs: &[f64], grid: &Grid) -> Result<PhysicalField> {
        self.check_grid(grid)?;
        if coeffs.len() != self.modes.len() {
            return Err(Error::InvalidCoefficients {
                expected: self.modes.len(),
                got: coeffs.len(),
            });
        }
        let n = grid.points_per_axis();
        let shape = IxDyn(&grid.shape());
        let mut spectra: Vec<ArrayD<Complex64>> = (0..self.n_components)
            .map(|_| ArrayD::zeros(shape.clone()))
            .collect();
        let s = (2.0 / grid.volume()).sqrt();
        for (a, mode) in coeffs.iter().zip(&self.modes) {
            if *a == 0.0 {
                continue;
            }
            let amp = a * s * 0.5;
            let plus = self.bins(n, mode.wavevector, 1);
            let minus = self.bins(n, mode.wavevector, -1);
            let (cp, cm) = match mode.parity {
                Parity::Cos => (Complex64::new(amp, 0.0), Complex64::new(amp, 0.0)),
                Parity::Sin => (Complex64::new(0.0, -amp), Complex64::new(0.0, amp)),
            };
            for (c, spec) in spectra.iter_mut().enumerate() {
                let pc = mode.polarization[c];
                if pc == 0.0 {
                    continue;
                }
                spec[IxDyn(&plus)] += cp * pc;
                spec[IxDyn(&minus)] += cm * pc;
            }
        }
        let components: Vec<ArrayD<f64>> = spectra.iter().map(spectral::to_physical).collect();
        PhysicalField::new(grid.clone(), components)
    }

    /// Text manifest: header plus one line per mode.
    pub fn write_manifest<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(
            out,
            "# basis dimension={} components={} k_max={} period={} modes={}",
            self.dimension,
            self.n_components,
            self.k_max,
            crate::io::fmt_float(self.period),
            self.modes.len()
        )?;
        writeln!(
            out,
            "# columns: index k1 k2 k3 pol_index parity pol1 pol2 pol3 eigenvalue"
        )?;
        for (i, m) in self.modes.iter().enumerate() {
            writeln!(
                out,
                "{} {} {} {} {} {} {} {} {} {}",
                i,
                m.wavevector[0],
                m.wavevector[1],
                m.wavevector[2],
                m.polarization_index,
                m.parity.name(),
                crate::io::fmt_float(m.polarization[0]),
                crate::io::fmt_float(m.polarization[1]),
                crate::io::fmt_float(m.polarization[2]),
                crate::io::fmt_float(m.eigenvalue),
            )?;
        }
        Ok(())
    }
}

/// Remove the gradient part of a field, mode by mode.
///
/// For every nonzero Fourier mode the component parallel to the
/// wavevector is removed: `u(k) -> u(k) - k (k . u(k)) / |k|^2`.
/// Constant (mean) parts are divergence-free and kept. The result is
/// solenoidal, the map is idempotent, and solenoidal fields are fixed.
pub fn leray_project(field: &PhysicalField) -> Result<PhysicalField> {
    let grid = field.grid();
    let dim = grid.dimension();
    if field.n_components() != dim {
        return Err(Error::DimensionError(format!(
            "projection needs one component per axis, got {} components over {}D",
            field.n_components(),
            dim
        )));
    }
    let n = grid.points_per_axis();
    let mut spectra: Vec<ArrayD<Complex64>> = (0..dim)
        .map(|c| spectral::to_spectral(field.component(c)))
        .collect();
    let mut project = |idx: &[usize]| {
        let mut k = vec![0.0; dim];
        let mut k2 = 0.0;
        for ax in 0..dim {
            k[ax] = grid.wavenumber(ax, spectral::frequency(n, idx[ax]));
            k2 += k[ax] * k[ax];
        }
        if k2 == 0.0 {
            return;
        }
        let mut dot = Complex64::new(0.0, 0.0);
        for (ax, spec) in spectra.iter().enumerate() {
            dot += spec[IxDyn(idx)] * k[ax];
        }
        for (ax, spec) in spectra.iter_mut().enumerate() {
            let delta = dot * (k[ax] / k2);
            let v = spec[IxDyn(idx)];
            spec[IxDyn(idx)] = v - delta;
        }
    };
    if dim == 2 {
        for i in 0..n {
            for j in 0..n {
                project(&[i, j]);
            }
        }
    } else {
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    project(&[i, j, l]);
                }
            }
        }
    }
    let components: Vec<ArrayD<f64>> = spectra.iter().map(spectral::to_physical).collect();
    PhysicalField::new(grid.clone(), components)
}

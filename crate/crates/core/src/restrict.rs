//! Restriction of 3D fields to an inclined plane section.
//!
//! A plane `a1 x1 + a2 x2 + a3 x3 = b` with `a3 != 0` is normalized to
//! `x3 = b - a1 x1 - a2 x2`. Substituting the section into derivatives
//! turns `D3` into `-a1^{-1} D1 - a2^{-1} D2`, the Laplacian into an
//! anisotropic elliptic operator, and the solenoidal constraint into
//! `D1 (u1 - a1^{-1} u3) + D2 (u2 - a2^{-1} u3) = 0`. Restricted fields
//! keep all three velocity components but vary over the two in-plane
//! variables only.

use ndarray::{ArrayD, IxDyn};
use num_complex::Complex64;

use crate::assembly::EllipticParams;
use crate::field::PhysicalField;
use crate::grid::Grid;
use crate::spectral;
use crate::{Error, Result};

/// Normalized section `x3 = b - a1 x1 - a2 x2` with `a1, a2 != 0`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Hyperplane {
    a1: f64,
    a2: f64,
    b: f64,
}

/// Replacement rules for `D3` on the section.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct D3Substitution {
    /// `D3 -> first_order[0] D1 + first_order[1] D2`.
    pub first_order: [f64; 2],
    /// `D3^2 -> second_order[0] D1^2 + second_order[1] D2^2 + second_order[2] D1 D2`.
    pub second_order: [f64; 3],
}

/// Restriction of an evolution problem to a plane section.
#[derive(Debug, Clone)]
pub struct RestrictedProblem {
    /// The normalized section.
    pub plane: Hyperplane,
    /// Coefficients of the induced elliptic operator.
    pub elliptic: EllipticParams,
    /// Initial data on the section, made admissible by constraint projection.
    pub u0: PhysicalField,
    /// Forcing sampled on the section (not projected; the Galerkin
    /// projection handles any constraint-violating part).
    pub forcing: Option<PhysicalField>,
    /// Largest pointwise constraint residual of `u0` after projection.
    pub constraint_residual: f64,
    /// L2 norm of the part removed from `u0` by constraint projection.
    pub removed_norm: f64,
}

/// Normalize a raw plane `a1 x1 + a2 x2 + a3 x3 = b`.
pub fn make_hyperplane(a1: f64, a2: f64, a3: f64, b: f64) -> Result<Hyperplane> {
    if a3 == 0.0 {
        return Err(Error::DegeneratePlane);
    }
    Hyperplane::new(a1 / a3, a2 / a3, b / a3)
}

impl Hyperplane {
    /// Section from already normalized coefficients.
    pub fn new(a1: f64, a2: f64, b: f64) -> Result<Self> {
        for (name, v) in [("a1", a1), ("a2", a2), ("b", b)] {
            if !v.is_finite() {
                return Err(Error::OutOfRange(format!(
                    "plane coefficient {name} must be finite, got {v}"
                )));
            }
        }
        if a1 == 0.0 {
            return Err(Error::UnsupportedOrientation { name: "a1" });
        }
        if a2 == 0.0 {
            return Err(Error::UnsupportedOrientation { name: "a2" });
        }
        Ok(Self { a1, a2, b })
    }

    /// Normalized coefficient of `x1`.
    pub fn a1(&self) -> f64 {
        self.a1
    }

    /// Normalized coefficient of `x2`.
    pub fn a2(&self) -> f64 {
        self.a2
    }

    /// Normalized offset.
    pub fn b(&self) -> f64 {
        self.b
    }

    /// `1 / a1`.
    pub fn a1_inv(&self) -> f64 {
        1.0 / self.a1
    }

    /// `1 / a2`.
    pub fn a2_inv(&self) -> f64 {
        1.0 / self.a2
    }

    /// Height of the section above `(x1, x2)`.
    pub fn height(&self, x1: f64, x2: f64) -> f64 {
        self.b - self.a1 * x1 - self.a2 * x2
    }

    /// Coefficients of the induced elliptic operator:
    /// `c11 = 1 + a1^{-2}`, `c22 = 1 + a2^{-2}`, `c12 = 2 a1^{-1} a2^{-1}`.
    pub fn elliptic_params(&self) -> EllipticParams {
        let i1 = self.a1_inv();
        let i2 = self.a2_inv();
        EllipticParams {
            c11: 1.0 + i1 * i1,
            c22: 1.0 + i2 * i2,
            c12: 2.0 * i1 * i2,
        }
    }

    /// Prefactor `1 + max(|a1^{-1}|, |a2^{-1}|)` of the convective bound
    /// on the section; it multiplies the interpolation constant.
    pub fn advection_factor(&self) -> f64 {
        1.0 + self.a1_inv().abs().max(self.a2_inv().abs())
    }
}

/// Replacement rules for `D3` induced by the section.
///
/// Applying the first-order rule twice reproduces the second-order
/// coefficients exactly (same products, in IEEE arithmetic).
pub fn substitute_d3(plane: &Hyperplane) -> D3Substitution {
    let i1 = plane.a1_inv();
    let i2 = plane.a2_inv();
    D3Substitution {
        first_order: [-i1, -i2],
        second_order: [i1 * i1, i2 * i2, 2.0 * (i1 * i2)],
    }
}

fn expect_section_field(field: &PhysicalField) -> Result<()> {
    if field.grid().dimension() != 2 || field.n_components() != 3 {
        return Err(Error::DimensionError(format!(
            "expected 3 components over a 2D section grid, got {} components over {}D",
            field.n_components(),
            field.grid().dimension()
        )));
    }
    Ok(())
}

/// Evaluate a 3D field's trigonometric interpolant on the section.
///
/// Output lives on `section_grid` with one component per input component,
/// sampled at `(x1, x2, b - a1 x1 - a2 x2)`.
pub fn restrict_field(
    field: &PhysicalField,
    plane: &Hyperplane,
    section_grid: &Grid,
) -> Result<PhysicalField> {
    if field.grid().dimension() != 3 || field.n_components() != 3 {
        return Err(Error::DimensionError(format!(
            "restriction needs a 3-component 3D field, got {} components over {}D",
            field.n_components(),
            field.grid().dimension()
        )));
    }
    if section_grid.dimension() != 2 {
        return Err(Error::DimensionError(
            "section grid must be 2D".to_string(),
        ));
    }
    let src = field.grid();
    let n = src.points_per_axis();
    let m = section_grid.points_per_axis();
    let x1: Vec<f64> = section_grid.axis_coordinates(0);
    let x2: Vec<f64> = section_grid.axis_coordinates(1);

    let mut components = Vec::with_capacity(3);
    for c in 0..3 {
        let spec = spectral::to_spectral(field.component(c));
        let mut out = vec![Complex64::new(0.0, 0.0); m * m];
        let mut partial = vec![Complex64::new(0.0, 0.0); n * m];
        for j3 in 0..n {
            let k3 = src.wavenumber(2, spectral::frequency(n, j3));
            // partial[j2][ix] = sum_{j1} S[j1, j2, j3] exp(i (k1 - k3 a1) x1)
            for slot in partial.iter_mut() {
                *slot = Complex64::new(0.0, 0.0);
            }
            for j1 in 0..n {
                let k1 = src.wavenumber(0, spectral::frequency(n, j1));
                let freq = k1 - k3 * plane.a1();
                for (ix, &x) in x1.iter().enumerate() {
                    let phase = Complex64::from_polar(1.0, freq * x);
                    for j2 in 0..n {
                        partial[j2 * m + ix] += spec[[j1, j2, j3]] * phase;
                    }
                }
            }
            let offset = Complex64::from_polar(1.0, k3 * plane.b());
            for j2 in 0..n {
                let k2 = src.wavenumber(1, spectral::frequency(n, j2));
                let freq = k2 - k3 * plane.a2();
                for (iy, &y) in x2.iter().enumerate() {
                    let phase = Complex64::from_polar(1.0, freq * y) * offset;
                    for ix in 0..m {
                        out[ix * m + iy] += partial[j2 * m + ix] * phase;
                    }
                }
            }
        }
        let values = ArrayD::from_shape_fn(IxDyn(&[m, m]), |idx| out[idx[0] * m + idx[1]].re);
        components.push(values);
    }
    PhysicalField::new(section_grid.clone(), components)
}

/// Constraint residual `D1 (u1 - a1^{-1} u3) + D2 (u2 - a2^{-1} u3)`.
pub fn restricted_divergence(field: &PhysicalField, plane: &Hyperplane) -> Result<ArrayD<f64>> {
    expect_section_field(field)?;
    let grid = field.grid();
    let e1 = field.component(0) - &(field.component(2) * plane.a1_inv());
    let e2 = field.component(1) - &(field.component(2) * plane.a2_inv());
    Ok(spectral::derivative(&e1, grid, 0) + spectral::derivative(&e2, grid, 1))
}

/// Mode-wise removal of the constraint-violating part of a section field.
///
/// In Fourier variables the constraint reads `g(k) . u(k) = 0` with
/// `g = (k1, k2, -(a1^{-1} k1 + a2^{-1} k2))`; the violating part
/// `g (g . u) / |g|^2` is removed per mode. Returns the projected field
/// and the L2 norm of the removed part. Admissible fields (and means)
/// are fixed points.
pub fn project_constraint(
    field: &PhysicalField,
    plane: &Hyperplane,
) -> Result<(PhysicalField, f64)> {
    expect_section_field(field)?;
    let grid = field.grid();
    let n = grid.points_per_axis();
    let mut spec: Vec<ArrayD<Complex64>> = (0..3)
        .map(|c| spectral::to_spectral(field.component(c)))
        .collect();
    for j1 in 0..n {
        let k1 = grid.wavenumber(0, spectral::frequency(n, j1));
        for j2 in 0..n {
            let k2 = grid.wavenumber(1, spectral::frequency(n, j2));
            if k1 == 0.0 && k2 == 0.0 {
                continue;
            }
            let g = [
                k1,
                k2,
                -(plane.a1_inv() * k1 + plane.a2_inv() * k2),
            ];
            let g2 = g[0] * g[0] + g[1] * g[1] + g[2] * g[2];
            let dot = spec[0][[j1, j2]] * g[0] + spec[1][[j1, j2]] * g[1] + spec[2][[j1, j2]] * g[2];
            for (c, gc) in g.iter().enumerate() {
                let delta = dot * (gc / g2);
                let v = spec[c][[j1, j2]];
                spec[c][[j1, j2]] = v - delta;
            }
        }
    }
    let components: Vec<ArrayD<f64>> = spec.iter().map(spectral::to_physical).collect();
    let projected = PhysicalField::new(grid.clone(), components)?;
    let removed = field.add_scaled(&projected, -1.0)?;
    Ok((projected, removed.norms().l2))
}

/// Admissible section field from a stream function and a third component:
/// `u1 = D2 psi + a1^{-1} u3`, `u2 = -D1 psi + a2^{-1} u3`.
///
/// The construction satisfies the constraint identically, because the
/// stream part contributes `D1 D2 psi - D2 D1 psi = 0`.
pub fn solenoidal_from_stream(
    psi: &ArrayD<f64>,
    u3: &ArrayD<f64>,
    plane: &Hyperplane,
    grid: &Grid,
) -> Result<PhysicalField> {
    if grid.dimension() != 2 {
        return Err(Error::DimensionError(
            "stream construction needs a 2D section grid".to_string(),
        ));
    }
    let shape = grid.shape();
    if psi.shape() != shape.as_slice() || u3.shape() != shape.as_slice() {
        return Err(Error::GridMismatch(
            "stream function and third component must live on the section grid".to_string(),
        ));
    }
    let u1 = spectral::derivative(psi, grid, 1) + &(u3 * plane.a1_inv());
    let u2 = -spectral::derivative(psi, grid, 0) + &(u3 * plane.a2_inv());
    PhysicalField::new(grid.clone(), vec![u1, u2, u3.clone()])
}

/// Restrict initial data (and optional forcing) to the section and make
/// the initial data admissible.
pub fn restrict_problem(
    u0: &PhysicalField,
    forcing: Option<&PhysicalField>,
    plane: &Hyperplane,
    section_grid: &Grid,
) -> Result<RestrictedProblem> {
    let raw = restrict_field(u0, plane, section_grid)?;
    let (projected, removed_norm) = project_constraint(&raw, plane)?;
    let residual = restricted_divergence(&projected, plane)?;
    let constraint_residual = crate::field::max_abs(&residual);
    let forcing = match forcing {
        Some(f) => Some(restrict_field(f, plane, section_grid)?),
        None => None,
    };
    Ok(RestrictedProblem {
        plane: *plane,
        elliptic: plane.elliptic_params(),
        u0: projected,
        forcing,
        constraint_residual,
        removed_norm,
    })
}

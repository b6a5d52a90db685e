//! Assembly of the discrete evolution system: diagonal stiffness, the
//! trilinear advection tensor, forcing projection, and the section
//! coercivity report.
//!
//! With an orthonormal basis the mass matrix is the identity, so the
//! system is fully described by the stiffness diagonal and the tensor
//! `h_ijk = <(adv(w_j) . grad) w_k, w_i>`. All quadratures run on a
//! padded grid sized so products of three band-limited factors are
//! integrated exactly.

use std::io::Write;

use ndarray::ArrayD;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::basis::{BasisKind, BasisSet};
use crate::field::{max_abs, GradientTensor, PhysicalField};
use crate::grid::Grid;
use crate::restrict::Hyperplane;
use crate::spectral;
use crate::{Error, Result};

/// Above this mode count the tensor is not stored; the quadratic term is
/// evaluated by quadrature on demand instead.
pub const DENSE_TENSOR_LIMIT: usize = 200;

/// Residual bound a field must meet before the coercivity check runs.
pub const SOLENOIDAL_TOLERANCE: f64 = 1e-10;

/// Coefficients of the second-order operator
/// `c11 D1^2 + c22 D2^2 + c12 D1 D2`.
///
/// The plain Laplacian is (1, 1, 0); a section substitution produces
/// `(1 + a1^{-2}, 1 + a2^{-2}, 2 a1^{-1} a2^{-1})`, whose symbol is a sum
/// of squares and hence positive away from zero.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct EllipticParams {
    pub c11: f64,
    pub c22: f64,
    pub c12: f64,
}

impl EllipticParams {
    /// The isotropic operator.
    pub fn laplacian() -> Self {
        Self {
            c11: 1.0,
            c22: 1.0,
            c12: 0.0,
        }
    }

    /// Symbol value at a physical wavevector `(kappa1, kappa2)`.
    pub fn symbol(&self, kappa1: f64, kappa2: f64) -> f64 {
        self.c11 * kappa1 * kappa1 + self.c22 * kappa2 * kappa2 + self.c12 * kappa1 * kappa2
    }
}

/// Smallest even point count integrating triple products of bandwidth
/// `k_max` exactly (and resolving the modes themselves).
pub fn quadrature_points(k_max: i64) -> usize {
    let needed = (3 * k_max + 1).max(2 * k_max + 2).max(4) as usize;
    needed + needed % 2
}

/// Quadrature grid matched to a basis.
pub fn quadrature_grid(basis: &BasisSet) -> Result<Grid> {
    Grid::new(
        basis.dimension(),
        quadrature_points(basis.k_max()),
        basis.period(),
    )
}

/// Diagonal of `<elliptic w_j, w_i>` in basis order.
///
/// Second-order operators with constant coefficients map each mode to a
/// multiple of itself, so the matrix is diagonal with entry equal to the
/// symbol at the mode's physical wavevector (the third axis, when
/// present, contributes its plain second derivative).
pub fn assemble_stiffness(basis: &BasisSet, elliptic: &EllipticParams) -> Result<Vec<f64>> {
    let scale = std::f64::consts::TAU / basis.period();
    basis
        .modes()
        .iter()
        .map(|m| {
            let kappa1 = scale * m.wavevector[0] as f64;
            let kappa2 = scale * m.wavevector[1] as f64;
            let kappa3 = scale * m.wavevector[2] as f64;
            let s = elliptic.symbol(kappa1, kappa2) + kappa3 * kappa3;
            if s <= 0.0 {
                Err(Error::NotElliptic {
                    symbol: s,
                    k1: m.wavevector[0],
                    k2: m.wavevector[1],
                })
            } else {
                Ok(s)
            }
        })
        .collect()
}

/// Dense advection tensor `h_ijk`, index order (test, advecting,
/// differentiated).
#[derive(Debug, Clone)]
pub struct TrilinearTensor {
    n: usize,
    values: Vec<f64>,
}

impl TrilinearTensor {
    /// Number of modes along each axis.
    pub fn n_modes(&self) -> usize {
        self.n
    }

    /// Entry `h_ijk`.
    pub fn entry(&self, i: usize, j: usize, k: usize) -> f64 {
        self.values[(i * self.n + j) * self.n + k]
    }

    /// Quadratic contraction `out_i = sum_jk h_ijk a_j a_k`.
    pub fn contract_quadratic(&self, a: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n];
        for (i, slot) in out.iter_mut().enumerate() {
            let base = i * n * n;
            let mut acc = 0.0;
            for (j, &aj) in a.iter().enumerate() {
                if aj == 0.0 {
                    continue;
                }
                let row = &self.values[base + j * n..base + (j + 1) * n];
                let mut inner = 0.0;
                for (k, &ak) in a.iter().enumerate() {
                    inner += row[k] * ak;
                }
                acc += aj * inner;
            }
            *slot = acc;
        }
        out
    }

    /// Full contraction `sum_ijk h_ijk u_j v_k w_i`.
    pub fn triple(&self, u: &[f64], v: &[f64], w: &[f64]) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for (i, &wi) in w.iter().enumerate() {
            if wi == 0.0 {
                continue;
            }
            let base = i * n * n;
            let mut row_acc = 0.0;
            for (j, &uj) in u.iter().enumerate() {
                if uj == 0.0 {
                    continue;
                }
                let row = &self.values[base + j * n..base + (j + 1) * n];
                let mut inner = 0.0;
                for (k, &vk) in v.iter().enumerate() {
                    inner += row[k] * vk;
                }
                row_acc += uj * inner;
            }
            acc += wi * row_acc;
        }
        acc
    }

    /// Text dump of entries with `|h| > 1e-14`, lines `i j k value`.
    pub fn write_dump<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let v = self.entry(i, j, k);
                    if v.abs() > 1e-14 {
                        writeln!(out, "{i} {j} {k} {}", crate::io::fmt_float(v))?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Effective advection velocity for the basis kind: the field itself, or
/// the section combination `(u1 - a1^{-1} u3, u2 - a2^{-1} u3)`.
fn advection_velocity(field: &PhysicalField, kind: &BasisKind) -> Vec<ArrayD<f64>> {
    match kind {
        BasisKind::Standard => (0..field.n_components())
            .map(|c| field.component(c).clone())
            .collect(),
        BasisKind::Restricted(plane) => {
            let u3 = field.component(2);
            vec![
                field.component(0) - &(u3 * plane.a1_inv()),
                field.component(1) - &(u3 * plane.a2_inv()),
            ]
        }
    }
}

/// `(adv . grad) u` as component arrays.
fn transport(adv: &[ArrayD<f64>], grad: &GradientTensor) -> Vec<ArrayD<f64>> {
    (0..grad.n_components())
        .map(|c| {
            let mut acc: ArrayD<f64> = adv[0].clone() * grad.entry(0, c);
            for (ax, a) in adv.iter().enumerate().skip(1) {
                acc = acc + a * grad.entry(ax, c);
            }
            acc
        })
        .collect()
}

/// Tensor on the default dealiased grid.
pub fn assemble_trilinear(basis: &BasisSet) -> Result<TrilinearTensor> {
    assemble_trilinear_with_points(basis, quadrature_points(basis.k_max()))
}

/// Tensor with an explicit quadrature resolution.
///
/// `points` must reach the dealiasing bound `3 k_max + 1`; below it the
/// triple products fold back onto resolved modes and the entries would be
/// silently wrong, so the call is rejected instead.
pub fn assemble_trilinear_with_points(basis: &BasisSet, points: usize) -> Result<TrilinearTensor> {
    let needed = quadrature_points(basis.k_max());
    if points < (3 * basis.k_max() + 1) as usize {
        return Err(Error::Aliasing {
            points,
            k_max: basis.k_max(),
            needed,
        });
    }
    let grid = Grid::new(basis.dimension(), points, basis.period())?;
    let n = basis.len();
    let mut unit = vec![0.0; n];
    let mut fields = Vec::with_capacity(n);
    for j in 0..n {
        unit[j] = 1.0;
        fields.push(basis.synthesize(&unit, &grid)?);
        unit[j] = 0.0;
    }
    let gradients: Vec<GradientTensor> = fields.iter().map(|f| f.gradient()).collect();
    let advections: Vec<Vec<ArrayD<f64>>> = fields
        .iter()
        .map(|f| advection_velocity(f, basis.kind()))
        .collect();

    let mut values = vec![0.0; n * n * n];
    for j in 0..n {
        for k in 0..n {
            let product = transport(&advections[j], &gradients[k]);
            let product_field = PhysicalField::new(grid.clone(), product)?;
            let coeffs = basis.analyze(&product_field)?;
            for (i, c) in coeffs.into_iter().enumerate() {
                values[(i * n + j) * n + k] = c;
            }
        }
    }
    Ok(TrilinearTensor { n, values })
}

/// Projection `<f(t), w_i>` for a sequence of sampled forcing fields.
pub fn project_forcing(basis: &BasisSet, fields: &[PhysicalField]) -> Result<Vec<Vec<f64>>> {
    fields.iter().map(|f| basis.analyze(f)).collect()
}

/// The assembled system: orthonormal basis (mass = identity), stiffness
/// diagonal, and the advection tensor (dense or evaluated on demand).
#[derive(Debug, Clone)]
pub struct GalerkinSystem {
    basis: BasisSet,
    elliptic: EllipticParams,
    stiffness: Vec<f64>,
    tensor: Option<TrilinearTensor>,
    quad_grid: Grid,
}

impl GalerkinSystem {
    /// Assemble for an explicit basis/operator pair.
    pub fn new(basis: BasisSet, elliptic: EllipticParams) -> Result<Self> {
        let stiffness = assemble_stiffness(&basis, &elliptic)?;
        let quad_grid = quadrature_grid(&basis)?;
        let tensor = if basis.len() <= DENSE_TENSOR_LIMIT {
            Some(assemble_trilinear(&basis)?)
        } else {
            None
        };
        Ok(Self {
            basis,
            elliptic,
            stiffness,
            tensor,
            quad_grid,
        })
    }

    /// Isotropic dynamics on the full box.
    pub fn standard(dimension: usize, k_max: i64, period: f64) -> Result<Self> {
        Self::new(
            BasisSet::standard(dimension, k_max, period)?,
            EllipticParams::laplacian(),
        )
    }

    /// Section dynamics induced by a hyperplane.
    pub fn restricted(k_max: i64, period: f64, plane: &Hyperplane) -> Result<Self> {
        Self::new(
            BasisSet::restricted(k_max, period, plane)?,
            plane.elliptic_params(),
        )
    }

    pub fn basis(&self) -> &BasisSet {
        &self.basis
    }

    pub fn elliptic(&self) -> &EllipticParams {
        &self.elliptic
    }

    /// Stiffness diagonal in mode order (no viscosity factor).
    pub fn stiffness(&self) -> &[f64] {
        &self.stiffness
    }

    /// Dense tensor, present iff the mode count is at most the limit.
    pub fn tensor(&self) -> Option<&TrilinearTensor> {
        self.tensor.as_ref()
    }

    pub fn n_modes(&self) -> usize {
        self.basis.len()
    }

    /// Dealiased grid used for on-demand quadrature.
    pub fn quadrature_grid(&self) -> &Grid {
        &self.quad_grid
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.basis.len() {
            return Err(Error::InvalidCoefficients {
                expected: self.basis.len(),
                got: len,
            });
        }
        Ok(())
    }

    /// Quadratic term `N_i(a) = sum_jk h_ijk a_j a_k`.
    pub fn nonlinear(&self, coeffs: &[f64]) -> Result<Vec<f64>> {
        self.check_len(coeffs.len())?;
        match &self.tensor {
            Some(t) => Ok(t.contract_quadratic(coeffs)),
            None => self.nonlinear_quadrature(coeffs),
        }
    }

    /// Quadratic term by synthesis, products, and re-projection. Agrees
    /// with the dense contraction to quadrature precision.
    pub fn nonlinear_quadrature(&self, coeffs: &[f64]) -> Result<Vec<f64>> {
        self.check_len(coeffs.len())?;
        let u = self.basis.synthesize(coeffs, &self.quad_grid)?;
        let grad = u.gradient();
        let adv = advection_velocity(&u, self.basis.kind());
        let product = PhysicalField::new(self.quad_grid.clone(), transport(&adv, &grad))?;
        self.basis.analyze(&product)
    }

    /// `b(u, v, w) = sum_ijk h_ijk u_j v_k w_i` for coefficient vectors.
    pub fn trilinear_value(&self, u: &[f64], v: &[f64], w: &[f64]) -> Result<f64> {
        self.check_len(u.len())?;
        self.check_len(v.len())?;
        self.check_len(w.len())?;
        let uf = self.basis.synthesize(u, &self.quad_grid)?;
        let vf = self.basis.synthesize(v, &self.quad_grid)?;
        let grad = vf.gradient();
        let adv = advection_velocity(&uf, self.basis.kind());
        let product = PhysicalField::new(self.quad_grid.clone(), transport(&adv, &grad))?;
        let coeffs = self.basis.analyze(&product)?;
        Ok(coeffs.iter().zip(w).map(|(c, wi)| c * wi).sum())
    }
}

/// Both sides of the section coercivity identity for one field.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct CoercivityReport {
    /// `<elliptic u, u>`, the substituted-operator energy.
    pub elliptic_energy: f64,
    /// Two-axis gradient energy `sum_c |D1 u_c|^2 + |D2 u_c|^2`.
    pub dirichlet_energy: f64,
    /// `b(u, u, u)` under section advection (zero on admissible fields).
    pub advection_term: f64,
    /// `elliptic + advection >= dirichlet - 1e-10`.
    pub holds: bool,
}

/// Check `<-elliptic u + (adv(u).grad) u, u> >= dirichlet energy` for a
/// section field.
///
/// The field must satisfy the section constraint to `1e-10`; the cubic
/// advection term is integrated on a spectrally upsampled grid so the
/// identity is exact for band-limited inputs.
pub fn coercivity_check(field: &PhysicalField, plane: &Hyperplane) -> Result<CoercivityReport> {
    let grid = field.grid();
    if grid.dimension() != 2 || field.n_components() != 3 {
        return Err(Error::DimensionError(format!(
            "coercivity check needs a 3-component section field on a 2D grid, got {} components over {}D",
            field.n_components(),
            grid.dimension()
        )));
    }
    let residual = max_abs(&crate::restrict::restricted_divergence(field, plane)?);
    if residual > SOLENOIDAL_TOLERANCE {
        return Err(Error::NonSolenoidalInput {
            residual,
            tolerance: SOLENOIDAL_TOLERANCE,
        });
    }

    let params = plane.elliptic_params();
    let grad = field.gradient();
    let cell = grid.cell_volume();
    let mut elliptic_energy = 0.0;
    let mut dirichlet_energy = 0.0;
    for c in 0..3 {
        let g1 = grad.entry(0, c);
        let g2 = grad.entry(1, c);
        for (a, b) in g1.iter().zip(g2.iter()) {
            elliptic_energy += params.c11 * a * a + params.c22 * b * b + params.c12 * a * b;
            dirichlet_energy += a * a + b * b;
        }
    }
    elliptic_energy *= cell;
    dirichlet_energy *= cell;

    // Cubic term on an upsampled grid: exact for bandwidth 3(n/2 - 1).
    let n = grid.points_per_axis();
    let needed = 3 * (n / 2 - 1) + 1;
    let padded_points = (needed + needed % 2).max(n);
    let padded_grid = Grid::new(2, padded_points, grid.period(0))?;
    let padded = PhysicalField::new(
        padded_grid.clone(),
        (0..3)
            .map(|c| spectral::resample(field.component(c), padded_points))
            .collect(),
    )?;
    let pgrad = padded.gradient();
    let adv1 = padded.component(0) - &(padded.component(2) * plane.a1_inv());
    let adv2 = padded.component(1) - &(padded.component(2) * plane.a2_inv());
    let mut advection_term = 0.0;
    for c in 0..3 {
        let g1 = pgrad.entry(0, c);
        let g2 = pgrad.entry(1, c);
        let uc = padded.component(c);
        for (((a1v, a2v), (d1, d2)), u) in adv1
            .iter()
            .zip(adv2.iter())
            .zip(g1.iter().zip(g2.iter()))
            .zip(uc.iter())
        {
            advection_term += (a1v * d1 + a2v * d2) * u;
        }
    }
    advection_term *= padded_grid.cell_volume();

    let holds = elliptic_energy + advection_term >= dirichlet_energy - 1e-10;
    Ok(CoercivityReport {
        elliptic_energy,
        dirichlet_energy,
        advection_term,
        holds,
    })
}

/// Empirical constant `c` with `|b(u, u, v)| <= c |u|_4^2 |v|_V` over
/// seeded coefficient samples (`|v|_V^2 = sum lambda_i v_i^2`).
///
/// This is a lower bound on the true constant: the max observed ratio.
pub fn advection_bound_constant(
    system: &GalerkinSystem,
    n_samples: usize,
    seed: u64,
) -> Result<f64> {
    let n = system.n_modes();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: f64 = 0.0;
    for _ in 0..n_samples {
        let u: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let b = system.trilinear_value(&u, &u, &v)?;
        let u_l4 = system.basis().synthesize(&u, system.quadrature_grid())?.norms().l4;
        let v_grad: f64 = v
            .iter()
            .enumerate()
            .map(|(i, vi)| system.basis().stokes_eigenvalue(i) * vi * vi)
            .sum::<f64>()
            .sqrt();
        let denom = u_l4 * u_l4 * v_grad;
        if denom > 0.0 {
            best = best.max(b.abs() / denom);
        }
    }
    Ok(best)
}

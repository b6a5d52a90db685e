//! Pointwise quadratic-form certificates for the symmetrized velocity
//! gradient, and the spectral smallness criterion built on them.
//!
//! At each grid point the symmetric matrix `S = (D_i v_j + D_j v_i)/2`
//! defines the form `F(w) = w' S w`. Completing squares diagonalizes it
//! with the Jacobi pivots `a1 = M1, a2 = M2/M1, a3 = M3/M2` (quotients of
//! leading principal minors); where a pivot is too small relative to the
//! matrix scale the factorization is flagged degenerate and definiteness
//! falls back to eigenvalues, which always agree where both apply.

use ndarray::ArrayD;

use crate::field::{GradientTensor, PhysicalField};
use crate::integrate::TrajectoryRecord;
use crate::{Error, Result};

/// Relative pivot threshold below which the square-completion is
/// considered degenerate.
const PIVOT_TOLERANCE: f64 = 1e-12;

/// Relative eigenvalue tolerance for semidefiniteness verdicts.
const CLASSIFY_TOLERANCE: f64 = 1e-12;

/// Pointwise symmetric part of a 3D velocity gradient, stored as six
/// component arrays.
#[derive(Debug, Clone)]
pub struct SymmetrizedGradient {
    pub s11: ArrayD<f64>,
    pub s22: ArrayD<f64>,
    pub s33: ArrayD<f64>,
    pub s12: ArrayD<f64>,
    pub s13: ArrayD<f64>,
    pub s23: ArrayD<f64>,
}

/// One symmetric 3x3 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymMatrix {
    pub m11: f64,
    pub m22: f64,
    pub m33: f64,
    pub m12: f64,
    pub m13: f64,
    pub m23: f64,
}

impl SymMatrix {
    pub fn zero() -> Self {
        Self {
            m11: 0.0,
            m22: 0.0,
            m33: 0.0,
            m12: 0.0,
            m13: 0.0,
            m23: 0.0,
        }
    }

    pub fn diagonal(d1: f64, d2: f64, d3: f64) -> Self {
        Self {
            m11: d1,
            m22: d2,
            m33: d3,
            m12: 0.0,
            m13: 0.0,
            m23: 0.0,
        }
    }

    pub fn trace(&self) -> f64 {
        self.m11 + self.m22 + self.m33
    }

    /// Largest absolute entry; the scale used by relative tolerances.
    pub fn max_abs_entry(&self) -> f64 {
        [self.m11, self.m22, self.m33, self.m12, self.m13, self.m23]
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// `w' S w`.
    pub fn apply(&self, w: [f64; 3]) -> f64 {
        self.m11 * w[0] * w[0]
            + self.m22 * w[1] * w[1]
            + self.m33 * w[2] * w[2]
            + 2.0 * (self.m12 * w[0] * w[1] + self.m13 * w[0] * w[2] + self.m23 * w[1] * w[2])
    }

    fn eigenvalues(&self) -> [f64; 3] {
        let m = nalgebra::Matrix3::new(
            self.m11, self.m12, self.m13, self.m12, self.m22, self.m23, self.m13, self.m23,
            self.m33,
        );
        let eig = m.symmetric_eigenvalues();
        let mut vals = [eig[0], eig[1], eig[2]];
        vals.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
        vals
    }

}

/// Definiteness class of one matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Definiteness {
    Zero,
    PositiveSemidefinite,
    NegativeSemidefinite,
    Indefinite,
}

/// Square-completion output for one matrix.
///
/// When `degenerate` is false the pivots are the minor quotients and
/// `F(w) = a1 wb1^2 + a2 wb2^2 + a3 wb3^2` with `wb = transform(w)`;
/// when true the pivots are meaningless and only `class` is reliable.
#[derive(Debug, Clone, Copy)]
pub struct LDLFactors {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    /// Upper unitriangular change of variables, rows applied to w.
    pub transform: [[f64; 3]; 3],
    pub degenerate: bool,
    pub class: Definiteness,
}

impl LDLFactors {
    /// Transformed coordinates `wb`.
    pub fn change_variables(&self, w: [f64; 3]) -> [f64; 3] {
        let t = &self.transform;
        [
            t[0][0] * w[0] + t[0][1] * w[1] + t[0][2] * w[2],
            t[1][0] * w[0] + t[1][1] * w[1] + t[1][2] * w[2],
            t[2][0] * w[0] + t[2][1] * w[1] + t[2][2] * w[2],
        ]
    }

    /// `F(w)` through the completed squares.
    pub fn apply(&self, w: [f64; 3]) -> f64 {
        let wb = self.change_variables(w);
        self.a1 * wb[0] * wb[0] + self.a2 * wb[1] * wb[1] + self.a3 * wb[2] * wb[2]
    }
}

/// Symmetric part of a 3-component gradient on a 3D grid.
pub fn symmetrize(grad: &GradientTensor) -> Result<SymmetrizedGradient> {
    if grad.n_axes() != 3 || grad.n_components() != 3 {
        return Err(Error::DimensionError(format!(
            "symmetrized gradient needs a 3D field, got {} axes and {} components",
            grad.n_axes(),
            grad.n_components()
        )));
    }
    let half = |a: &ArrayD<f64>, b: &ArrayD<f64>| -> ArrayD<f64> { (a + b) * 0.5 };
    Ok(SymmetrizedGradient {
        s11: grad.entry(0, 0).clone(),
        s22: grad.entry(1, 1).clone(),
        s33: grad.entry(2, 2).clone(),
        s12: half(grad.entry(0, 1), grad.entry(1, 0)),
        s13: half(grad.entry(0, 2), grad.entry(2, 0)),
        s23: half(grad.entry(1, 2), grad.entry(2, 1)),
    })
}

impl SymmetrizedGradient {
    /// Matrix at a flat storage index.
    pub fn at(&self, flat: usize) -> SymMatrix {
        SymMatrix {
            m11: self.s11.as_slice().expect("standard layout")[flat],
            m22: self.s22.as_slice().expect("standard layout")[flat],
            m33: self.s33.as_slice().expect("standard layout")[flat],
            m12: self.s12.as_slice().expect("standard layout")[flat],
            m13: self.s13.as_slice().expect("standard layout")[flat],
            m23: self.s23.as_slice().expect("standard layout")[flat],
        }
    }

    pub fn len(&self) -> usize {
        self.s11.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s11.is_empty()
    }

    /// Largest pointwise |trace| (solenoidal fields give ~0).
    pub fn max_trace(&self) -> f64 {
        let mut worst = 0.0f64;
        for flat in 0..self.len() {
            worst = worst.max(self.at(flat).trace().abs());
        }
        worst
    }
}

/// Completed-squares coefficients with degenerate-pivot fallback.
pub fn ldl_coefficients(s: &SymMatrix) -> LDLFactors {
    let class = classify(s);
    let scale = s.max_abs_entry();
    let minor1 = s.m11;
    let minor2 = s.m11 * s.m22 - s.m12 * s.m12;
    let minor3 = s.m11 * (s.m22 * s.m33 - s.m23 * s.m23)
        - s.m12 * (s.m12 * s.m33 - s.m23 * s.m13)
        + s.m13 * (s.m12 * s.m23 - s.m22 * s.m13);
    if minor1.abs() <= PIVOT_TOLERANCE * scale || minor2.abs() <= PIVOT_TOLERANCE * scale * scale {
        return LDLFactors {
            a1: f64::NAN,
            a2: f64::NAN,
            a3: f64::NAN,
            transform: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            degenerate: true,
            class,
        };
    }
    let a1 = minor1;
    let a2 = minor2 / minor1;
    let a3 = minor3 / minor2;
    // Rows of U in S = U' diag(a) U, found by eliminating w1 then w2.
    let t12 = s.m12 / a1;
    let t13 = s.m13 / a1;
    let b23 = s.m23 - s.m12 * s.m13 / a1;
    let t23 = b23 / a2;
    LDLFactors {
        a1,
        a2,
        a3,
        transform: [[1.0, t12, t13], [0.0, 1.0, t23], [0.0, 0.0, 1.0]],
        degenerate: false,
        class,
    }
}

/// Eigenvalue-based definiteness with scale-relative tolerance.
pub fn classify(s: &SymMatrix) -> Definiteness {
    let scale = s.max_abs_entry();
    if scale == 0.0 {
        return Definiteness::Zero;
    }
    let tol = CLASSIFY_TOLERANCE * scale;
    let eigs = s.eigenvalues();
    let psd = eigs[0] >= -tol;
    let nsd = eigs[2] <= tol;
    match (psd, nsd) {
        (true, true) => Definiteness::Zero,
        (true, false) => Definiteness::PositiveSemidefinite,
        (false, true) => Definiteness::NegativeSemidefinite,
        (false, false) => Definiteness::Indefinite,
    }
}

/// Counts of pointwise classes over a field.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
pub struct ClassHistogram {
    pub zero: usize,
    pub positive_semidefinite: usize,
    pub negative_semidefinite: usize,
    pub indefinite: usize,
}

impl ClassHistogram {
    fn add(&mut self, class: Definiteness) {
        match class {
            Definiteness::Zero => self.zero += 1,
            Definiteness::PositiveSemidefinite => self.positive_semidefinite += 1,
            Definiteness::NegativeSemidefinite => self.negative_semidefinite += 1,
            Definiteness::Indefinite => self.indefinite += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.zero + self.positive_semidefinite + self.negative_semidefinite + self.indefinite
    }
}

/// Classify every point of a symmetrized gradient.
pub fn classify_field(sym: &SymmetrizedGradient) -> ClassHistogram {
    let mut hist = ClassHistogram::default();
    for flat in 0..sym.len() {
        hist.add(classify(&sym.at(flat)));
    }
    hist
}

/// Quadrature of `w' S w` over the box.
pub fn integral_form(sym: &SymmetrizedGradient, w: &PhysicalField) -> Result<f64> {
    if w.n_components() != 3 || w.grid().dimension() != 3 {
        return Err(Error::DimensionError(
            "integral form needs a 3-component field on a 3D grid".to_string(),
        ));
    }
    if w.component(0).len() != sym.len() {
        return Err(Error::GridMismatch(format!(
            "form has {} points, field has {}",
            sym.len(),
            w.component(0).len()
        )));
    }
    let w1 = w.component(0).as_slice().expect("standard layout");
    let w2 = w.component(1).as_slice().expect("standard layout");
    let w3 = w.component(2).as_slice().expect("standard layout");
    let mut acc = 0.0;
    for flat in 0..sym.len() {
        acc += sym.at(flat).apply([w1[flat], w2[flat], w3[flat]]);
    }
    Ok(acc * w.grid().cell_volume())
}

/// One time level of the smallness criterion.
#[derive(Debug, Clone, serde::Serialize)]
pub struct QuadFormCertificate {
    pub time: f64,
    /// `c^2 * sum_ij |D_i v_j|_2`.
    pub lhs: f64,
    /// `nu * lambda1^(1/4)`.
    pub rhs: f64,
    pub holds: bool,
    pub c_used: f64,
    pub lambda1: f64,
    /// Pointwise classes of the symmetrized gradient (3D fields only).
    pub pointwise_class_histogram: Option<ClassHistogram>,
}

/// Evaluate the criterion `nu * lambda1^(1/4) >= c^2 sum_ij |D_i v_j|_2`
/// on every stored level of a trajectory.
///
/// The gradient-norm sum runs over all d^2 entries, so 2D runs are
/// accepted; the pointwise histogram is only defined for 3D fields. The
/// formula is dimensionally odd (a quarter power against a gradient
/// norm) but is applied exactly as stated.
pub fn criterion_theorem31(
    record: &TrajectoryRecord,
    system: &crate::assembly::GalerkinSystem,
    c_estimate: f64,
    nu: f64,
    lambda1: f64,
) -> Result<Vec<QuadFormCertificate>> {
    if !(c_estimate > 0.0) || !(nu > 0.0) || !(lambda1 > 0.0) {
        return Err(Error::OutOfRange(format!(
            "criterion needs positive c, nu, lambda1; got {c_estimate}, {nu}, {lambda1}"
        )));
    }
    let rhs = nu * lambda1.powf(0.25);
    let grid = system.quadrature_grid();
    let dim = grid.dimension();
    let cell = grid.cell_volume();
    record
        .times
        .iter()
        .zip(&record.states)
        .map(|(&time, state)| {
            let field = system.basis().synthesize(state, grid)?;
            let grad = field.gradient();
            let mut norm_sum = 0.0;
            for axis in 0..dim {
                for comp in 0..field.n_components() {
                    let entry = grad.entry(axis, comp);
                    let sq: f64 = entry.iter().map(|v| v * v).sum::<f64>() * cell;
                    norm_sum += sq.sqrt();
                }
            }
            let lhs = c_estimate * c_estimate * norm_sum;
            let pointwise_class_histogram = if dim == 3 {
                Some(classify_field(&symmetrize(&grad)?))
            } else {
                None
            };
            Ok(QuadFormCertificate {
                time,
                lhs,
                rhs,
                holds: rhs >= lhs,
                c_used: c_estimate,
                lambda1,
                pointwise_class_histogram,
            })
        })
        .collect()
}

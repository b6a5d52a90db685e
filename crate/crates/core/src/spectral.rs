//! Discrete Fourier plumbing shared by the field and basis machinery.
//!
//! Conventions: `to_spectral` returns Fourier-series coefficients, i.e. the
//! forward transform scaled by `1/n^d`, so `f(x) = sum_m F[m] exp(i k_m . x)`
//! with `k_m = 2 pi m / L` and integer frequencies `m = j` for `j <= n/2`,
//! `m = j - n` above. `to_physical` is the plain unnormalized inverse.
//! All loops run in fixed index order, so results are bitwise reproducible.

use ndarray::{ArrayD, Axis, IxDyn};
use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use crate::grid::Grid;

/// Signed integer frequency of bin `j` in an `n`-point transform.
pub fn frequency(n: usize, j: usize) -> i64 {
    let j = j as i64;
    let n = n as i64;
    if j <= n / 2 {
        j
    } else {
        j - n
    }
}

/// Bin index of signed integer frequency `m` in an `n`-point transform.
pub fn bin(n: usize, m: i64) -> usize {
    let n = n as i64;
    (((m % n) + n) % n) as usize
}

fn fft_along_all_axes(data: &mut ArrayD<Complex64>, direction: FftDirection) {
    let mut planner = FftPlanner::new();
    for axis in 0..data.ndim() {
        let n = data.shape()[axis];
        let fft = planner.plan_fft(n, direction);
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        for mut lane in data.lanes_mut(Axis(axis)) {
            for (b, v) in buf.iter_mut().zip(lane.iter()) {
                *b = *v;
            }
            fft.process(&mut buf);
            for (v, b) in lane.iter_mut().zip(buf.iter()) {
                *v = *b;
            }
        }
    }
}

/// Fourier-series coefficients of a real sample array.
pub fn to_spectral(values: &ArrayD<f64>) -> ArrayD<Complex64> {
    let mut data = values.mapv(|v| Complex64::new(v, 0.0));
    fft_along_all_axes(&mut data, FftDirection::Forward);
    let scale = 1.0 / values.len() as f64;
    data.mapv_inplace(|v| v * scale);
    data
}

/// Real samples of a coefficient array (imaginary parts are discarded).
pub fn to_physical(coeffs: &ArrayD<Complex64>) -> ArrayD<f64> {
    let mut data = coeffs.clone();
    fft_along_all_axes(&mut data, FftDirection::Inverse);
    data.mapv(|v| v.re)
}

/// Exact spectral derivative along `axis` of the trigonometric interpolant.
///
/// The Nyquist bin is zeroed: it carries no consistent odd derivative.
pub fn derivative(values: &ArrayD<f64>, grid: &Grid, axis: usize) -> ArrayD<f64> {
    let mut spec = to_spectral(values);
    differentiate_spectral(&mut spec, grid, axis);
    to_physical(&spec)
}

/// Trigonometric interpolation of `values` onto a grid with `points` per
/// axis. Sub-Nyquist content transfers exactly; Nyquist cosine content is
/// split evenly between the `+n/2` and `-n/2` bins of a finer target.
pub fn resample(values: &ArrayD<f64>, points: usize) -> ArrayD<f64> {
    let dim = values.ndim();
    let n = values.shape()[0];
    if points == n {
        return values.clone();
    }
    let spec = to_spectral(values);
    let mut out: ArrayD<Complex64> = ArrayD::zeros(IxDyn(&vec![points; dim]));
    let half = (n / 2).min(points / 2) as i64;
    for (idx, v) in spec.indexed_iter() {
        let mut weight = 1.0;
        let mut splits: Vec<(i64, i64)> = Vec::with_capacity(dim);
        for ax in 0..dim {
            let m = frequency(n, idx[ax]);
            if m.abs() > half {
                weight = 0.0;
                break;
            }
            if 2 * (m.unsigned_abs() as usize) == n && points > n {
                weight *= 0.5;
                splits.push((m, -m));
            } else {
                splits.push((m, m));
            }
        }
        if weight == 0.0 || *v == Complex64::new(0.0, 0.0) {
            continue;
        }
        // Distribute over every +-Nyquist combination.
        let n_split = splits.iter().filter(|(a, b)| a != b).count();
        for mask in 0..(1usize << n_split) {
            let mut bit = 0;
            let mut target = Vec::with_capacity(dim);
            for (a, b) in &splits {
                if a == b {
                    target.push(bin(points, *a));
                } else {
                    target.push(bin(points, if mask >> bit & 1 == 0 { *a } else { *b }));
                    bit += 1;
                }
            }
            out[IxDyn(&target)] += v * weight;
        }
    }
    to_physical(&out)
}

/// In-place multiplication by `i k` along `axis` (Nyquist bin zeroed).
pub fn differentiate_spectral(spec: &mut ArrayD<Complex64>, grid: &Grid, axis: usize) {
    let n = grid.points_per_axis();
    for (idx, v) in spec.indexed_iter_mut() {
        let j = idx[axis];
        if 2 * j == n {
            *v = Complex64::new(0.0, 0.0);
            continue;
        }
        let kappa = grid.wavenumber(axis, frequency(n, j));
        *v *= Complex64::new(0.0, kappa);
    }
}

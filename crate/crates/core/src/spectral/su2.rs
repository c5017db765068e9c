//! Identification of su(2) with R^3 and the reconstruction of a curve and its
//! Frenet frame from the fundamental matrix at lambda = -i tau.
//!
//! In the psi gauge the coefficient matrix at lambda = -i tau is
//! -(tau e_T + kappa e_B), so T, N, B are Phi^-1 e_k Phi and the curve is
//! i Phi^-1 dPhi/dlambda.

use nalgebra::{Matrix3, Vector3};

use super::linear::{c, fundamental_along, gauge_matrix, Gauge, M2};
use crate::C64;

/// Basis matrices (e_T, e_N, e_B) in the given gauge; tr(e_i e_j) = -delta_ij/2.
pub fn basis(gauge: Gauge) -> [M2; 3] {
    let h = 0.5;
    let z = c(0.0, 0.0);
    let psi = [
        M2::new(c(0.0, h), z, z, c(0.0, -h)),
        M2::new(z, c(0.0, h), c(0.0, h), z),
        M2::new(z, c(-h, 0.0), c(h, 0.0), z),
    ];
    match gauge {
        Gauge::Psi => psi,
        Gauge::Phi => {
            let a = gauge_matrix();
            let ai = a.try_inverse().expect("A is invertible");
            psi.map(|e| a * e * ai)
        }
    }
}

/// Coordinates of X in the basis; the imaginary parts (zero for X in su(2))
/// are returned separately.
pub fn coords(x: &M2, gauge: Gauge) -> (Vector3<f64>, Vector3<f64>) {
    let b = basis(gauge);
    let v: Vec<C64> = b.iter().map(|e| (x * e).trace() * -2.0).collect();
    (Vector3::new(v[0].re, v[1].re, v[2].re), Vector3::new(v[0].im, v[1].im, v[2].im))
}

/// Frame rows (T, N, B) relative to the frame at the base point.
pub fn frame_from_fundamental(phi: &M2, gauge: Gauge) -> Matrix3<f64> {
    let inv = phi.try_inverse().expect("fundamental matrices are unimodular");
    let rows: Vec<_> = basis(gauge)
        .iter()
        .map(|e| coords(&(inv * e * phi), gauge).0.transpose())
        .collect();
    Matrix3::from_rows(&rows)
}

/// Position i Phi^-1 dPhi/dlambda and frame along `grid`, with the
/// lambda-derivative taken by central differences of step `h`.
pub fn reconstruct_curve(
    kappa: &dyn Fn(f64) -> f64,
    tau: f64,
    gauge: Gauge,
    grid: &[f64],
    h: f64,
) -> Vec<(Vector3<f64>, Matrix3<f64>)> {
    let lam = c(0.0, -tau);
    let f0 = fundamental_along(kappa, lam, gauge, grid);
    let fp = fundamental_along(kappa, lam + h, gauge, grid);
    let fm = fundamental_along(kappa, lam - h, gauge, grid);
    f0.iter()
        .zip(fp.iter().zip(&fm))
        .map(|(f, (p, m))| {
            let d = (p - m) / c(2.0 * h, 0.0);
            let x = f.try_inverse().expect("unimodular") * d * c(0.0, 1.0);
            (coords(&x, gauge).0, frame_from_fundamental(f, gauge))
        })
        .collect()
}

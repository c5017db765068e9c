//! The associated 2x2 linear systems in the two gauges used throughout:
//!
//! psi gauge: dpsi/ds = 1/2 [[lambda, kappa], [-kappa, -lambda]] psi
//! phi gauge: dphi/ds = 1/2 [[i kappa, lambda], [lambda, -i kappa]] phi
//!
//! related by phi = A psi.

use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use crate::C64;

pub type M2 = Matrix2<C64>;
pub type V2 = Vector2<C64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gauge {
    Psi,
    Phi,
}

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn coefficient(kappa: f64, lambda: C64, gauge: Gauge) -> M2 {
    let h = 0.5;
    match gauge {
        Gauge::Psi => M2::new(lambda * h, c(h * kappa, 0.0), c(-h * kappa, 0.0), -lambda * h),
        Gauge::Phi => M2::new(c(0.0, h * kappa), lambda * h, lambda * h, c(0.0, -h * kappa)),
    }
}

/// The constant matrix A with phi = A psi.
pub fn gauge_matrix() -> M2 {
    M2::new(c(0.5, -0.5), c(-0.5, -0.5), c(0.5, -0.5), c(0.5, 0.5))
}

/// diag(1, -1): the twist applied to psi-gauge transfer matrices of odd curves.
pub fn twist_psi() -> M2 {
    M2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0))
}

/// [[0, 1], [1, 0]]: the phi-gauge counterpart of `twist_psi`.
pub fn twist_phi() -> M2 {
    M2::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0))
}

fn rk4_step(kappa: &dyn Fn(f64) -> f64, lambda: C64, gauge: Gauge, s: f64, h: f64, y: &M2) -> M2 {
    let a0 = coefficient(kappa(s), lambda, gauge);
    let am = coefficient(kappa(s + 0.5 * h), lambda, gauge);
    let a1 = coefficient(kappa(s + h), lambda, gauge);
    let hc = c(h, 0.0);
    let k1 = a0 * y;
    let k2 = am * (y + k1 * (hc * 0.5));
    let k3 = am * (y + k2 * (hc * 0.5));
    let k4 = a1 * (y + k3 * hc);
    y + (k1 + k2 * c(2.0, 0.0) + k3 * c(2.0, 0.0) + k4) * (hc / 6.0)
}

/// Fundamental matrix at every grid point, identity at grid[0].
pub fn fundamental_along(
    kappa: &dyn Fn(f64) -> f64,
    lambda: C64,
    gauge: Gauge,
    grid: &[f64],
) -> Vec<M2> {
    let mut out = Vec::with_capacity(grid.len());
    let mut y = M2::identity();
    out.push(y);
    for w in grid.windows(2) {
        y = rk4_step(kappa, lambda, gauge, w[0], w[1] - w[0], &y);
        out.push(y);
    }
    out
}

/// Fundamental matrix at s1 (identity at s0) using `steps` uniform RK4 steps.
pub fn fundamental_at(
    kappa: &dyn Fn(f64) -> f64,
    lambda: C64,
    gauge: Gauge,
    s0: f64,
    s1: f64,
    steps: usize,
) -> M2 {
    let h = (s1 - s0) / steps as f64;
    let mut y = M2::identity();
    for i in 0..steps {
        y = rk4_step(kappa, lambda, gauge, s0 + i as f64 * h, h, &y);
    }
    y
}

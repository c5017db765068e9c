//! Solutions of the linear systems along a grid, the scalar Riccati
//! equation for their component ratio, and the real angle equation
//! dbeta/ds = C sin(beta) - kappa.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::linear::{c, fundamental_along, Gauge, M2, V2};
use crate::error::{Error, Result};
use crate::C64;

/// A single solution vector along a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralSolution {
    pub grid: Vec<f64>,
    pub values: Vec<V2>,
    pub gauge: Gauge,
    /// z = v1/v2 in the phi gauge, y = -v1/v2 in the psi gauge
    pub ratio: Vec<C64>,
    /// continuous angle with z = -exp(-i beta) (phi) or y = tan(beta/2) (psi)
    pub beta: Option<Vec<f64>>,
}

/// Fundamental matrix of a linear system along a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FundamentalSolution {
    pub grid: Vec<f64>,
    pub gauge: Gauge,
    pub lambda: C64,
    pub fundamental: Vec<M2>,
}

fn ratio_of(v: &V2, gauge: Gauge) -> C64 {
    let r = v[0] / v[1];
    match gauge {
        Gauge::Phi => r,
        Gauge::Psi => -r,
    }
}

impl FundamentalSolution {
    /// The solution with initial value v0.
    pub fn solution(&self, v0: V2) -> SpectralSolution {
        let values: Vec<V2> = self.fundamental.iter().map(|f| f * v0).collect();
        let ratio = values.iter().map(|v| ratio_of(v, self.gauge)).collect();
        SpectralSolution { grid: self.grid.clone(), values, gauge: self.gauge, ratio, beta: None }
    }

    /// Largest |det - 1| over the grid.
    pub fn determinant_defect(&self) -> f64 {
        self.fundamental
            .iter()
            .map(|f| (f.determinant() - c(1.0, 0.0)).norm())
            .fold(0.0, f64::max)
    }
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.len() < 2 {
        return Err(Error::Input("grid needs at least two points".into()));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Input("grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Fundamental matrix (identity at grid[0]) of the linear system in `gauge`.
pub fn integrate_linear_system(
    kappa: &dyn Fn(f64) -> f64,
    lambda: C64,
    gauge: Gauge,
    grid: &[f64],
) -> Result<FundamentalSolution> {
    check_grid(grid)?;
    Ok(FundamentalSolution {
        grid: grid.to_vec(),
        gauge,
        lambda,
        fundamental: fundamental_along(kappa, lambda, gauge, grid),
    })
}

// Affine chart of the projective line: z itself, or w = 1/z near infinity.
#[derive(Clone, Copy)]
enum Chart {
    Z(C64),
    W(C64),
}

fn rk4_scalar(f: &dyn Fn(f64, C64) -> C64, s: f64, h: f64, y: C64) -> C64 {
    let k1 = f(s, y);
    let k2 = f(s + 0.5 * h, y + k1 * (0.5 * h));
    let k3 = f(s + 0.5 * h, y + k2 * (0.5 * h));
    let k4 = f(s + h, y + k3 * h);
    y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
}

/// Unwraps a sequence of angles known modulo 2 pi.
pub(crate) fn unwrap(angles: &mut [f64]) {
    for i in 1..angles.len() {
        let d = angles[i] - angles[i - 1];
        angles[i] -= (d / (2.0 * PI)).round() * 2.0 * PI;
    }
}

/// Solves dz/ds = i kappa z + nu (1 - z^2)/2 from z0. Near the pole the
/// equation is integrated for w = 1/z, which satisfies the same equation
/// with kappa negated.
pub fn riccati_solve(
    kappa: &dyn Fn(f64) -> f64,
    nu: C64,
    z0: C64,
    grid: &[f64],
    substeps: usize,
) -> Result<SpectralSolution> {
    check_grid(grid)?;
    if !z0.is_finite() {
        return Err(Error::Input("initial ratio must be finite".into()));
    }
    let i = c(0.0, 1.0);
    let fz = |s: f64, z: C64| i * kappa(s) * z + nu * (c(1.0, 0.0) - z * z) * 0.5;
    let fw = |s: f64, w: C64| -i * kappa(s) * w + nu * (c(1.0, 0.0) - w * w) * 0.5;
    let sub = substeps.max(1);
    let mut chart = if z0.norm() <= 1.0 { Chart::Z(z0) } else { Chart::W(z0.inv()) };
    let mut values = Vec::with_capacity(grid.len());
    let mut ratio = Vec::with_capacity(grid.len());
    let mut push = |chart: &Chart| {
        let (v, r) = match *chart {
            Chart::Z(z) => (V2::new(z, c(1.0, 0.0)), z),
            Chart::W(w) => (V2::new(c(1.0, 0.0), w), w.inv()),
        };
        let n = v.norm();
        values.push(v / c(n, 0.0));
        ratio.push(r);
    };
    push(&chart);
    for win in grid.windows(2) {
        let h = (win[1] - win[0]) / sub as f64;
        for j in 0..sub {
            let s = win[0] + j as f64 * h;
            chart = match chart {
                Chart::Z(z) => {
                    let z = rk4_scalar(&fz, s, h, z);
                    if z.norm() > 2.0 { Chart::W(z.inv()) } else { Chart::Z(z) }
                }
                Chart::W(w) => {
                    let w = rk4_scalar(&fw, s, h, w);
                    if w.norm() > 2.0 { Chart::Z(w.inv()) } else { Chart::W(w) }
                }
            };
        }
        match chart {
            Chart::Z(z) | Chart::W(z) if !z.is_finite() => {
                return Err(Error::Numeric(format!("Riccati solution overflowed near s = {}", win[1])))
            }
            _ => push(&chart),
        }
    }
    let unimodular = ratio.iter().all(|z| (z.norm() - 1.0).abs() < 1e-9);
    let beta = unimodular.then(|| {
        let mut b: Vec<f64> = ratio.iter().map(|z| -(-z).arg()).collect();
        unwrap(&mut b);
        b
    });
    Ok(SpectralSolution { grid: grid.to_vec(), values, gauge: Gauge::Phi, ratio, beta })
}

/// Solves dbeta/ds = C sin(beta) - kappa from beta0 (RK4, `substeps` per
/// grid interval). The values are the psi-gauge vector
/// (-sin(beta/2), cos(beta/2)), a solution of the linear system at lambda = C.
pub fn beta_solve(
    kappa: &dyn Fn(f64) -> f64,
    c_const: f64,
    beta0: f64,
    grid: &[f64],
    substeps: usize,
) -> Result<SpectralSolution> {
    check_grid(grid)?;
    let f = |s: f64, b: f64| c_const * b.sin() - kappa(s);
    let sub = substeps.max(1);
    let mut beta = Vec::with_capacity(grid.len());
    let mut b = beta0;
    beta.push(b);
    for win in grid.windows(2) {
        let h = (win[1] - win[0]) / sub as f64;
        for j in 0..sub {
            let s = win[0] + j as f64 * h;
            let k1 = f(s, b);
            let k2 = f(s + 0.5 * h, b + 0.5 * h * k1);
            let k3 = f(s + 0.5 * h, b + 0.5 * h * k2);
            let k4 = f(s + h, b + h * k3);
            b += h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
        }
        beta.push(b);
    }
    Ok(beta_solution(grid.to_vec(), beta))
}

/// Wraps a continuous beta(s) as a psi-gauge solution.
pub fn beta_solution(grid: Vec<f64>, beta: Vec<f64>) -> SpectralSolution {
    let values: Vec<V2> = beta
        .iter()
        .map(|b| V2::new(c(-(0.5 * b).sin(), 0.0), c((0.5 * b).cos(), 0.0)))
        .collect();
    let ratio = beta.iter().map(|b| c((0.5 * b).tan(), 0.0)).collect();
    SpectralSolution { grid, values, gauge: Gauge::Psi, ratio, beta: Some(beta) }
}

impl SpectralSolution {
    /// Largest relative deviation of the ratio from that of `other`, compared
    /// projectively so that poles do not count.
    pub fn ratio_mismatch(&self, other: &SpectralSolution) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| {
                let cross = a[0] * b[1] - a[1] * b[0];
                cross.norm() / (a.norm() * b.norm())
            })
            .fold(0.0, f64::max)
    }

    /// Residual of dbeta/ds = C sin(beta) - kappa by central differences,
    /// scaled to per-unit-length and with the O(h^2) difference error.
    pub fn beta_residual(&self, kappa: &dyn Fn(f64) -> f64, c_const: f64) -> Option<f64> {
        let b = self.beta.as_ref()?;
        let g = &self.grid;
        let mut worst: f64 = 0.0;
        for i in 1..b.len().saturating_sub(1) {
            let d = (b[i + 1] - b[i - 1]) / (g[i + 1] - g[i - 1]);
            worst = worst.max((d - c_const * b[i].sin() + kappa(g[i])).abs());
        }
        Some(worst)
    }
}

//! Carlson symmetric integrals and the incomplete Legendre integrals built on them.

use std::f64::consts::PI;

use super::modulus::complete_integrals;
use crate::error::{Error, Result};
use crate::C64;

/// R_F(x, y, z) for non-negative arguments, at most one of them zero.
pub fn carlson_rf(x: f64, y: f64, z: f64) -> f64 {
    let (mut x, mut y, mut z) = (x, y, z);
    for _ in 0..100 {
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lam = sx * (sy + sz) + sy * sz;
        x = 0.25 * (x + lam);
        y = 0.25 * (y + lam);
        z = 0.25 * (z + lam);
        let a = (x + y + z) / 3.0;
        let dev = (a - x).abs().max((a - y).abs()).max((a - z).abs());
        if dev < 1e-4 * a.abs() {
            break;
        }
    }
    let a = (x + y + z) / 3.0;
    let (dx, dy) = ((a - x) / a, (a - y) / a);
    let dz = -(dx + dy);
    let e2 = dx * dy - dz * dz;
    let e3 = dx * dy * dz;
    (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0) / a.sqrt()
}

/// R_D(x, y, z) for x, y >= 0 (not both zero) and z > 0.
pub fn carlson_rd(x: f64, y: f64, z: f64) -> f64 {
    let (mut x, mut y, mut z) = (x, y, z);
    let mut sum = 0.0;
    let mut fac = 1.0;
    for _ in 0..100 {
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lam = sx * (sy + sz) + sy * sz;
        sum += fac / (sz * (z + lam));
        fac *= 0.25;
        x = 0.25 * (x + lam);
        y = 0.25 * (y + lam);
        z = 0.25 * (z + lam);
        let a = (x + y + 3.0 * z) / 5.0;
        let dev = (a - x).abs().max((a - y).abs()).max((a - z).abs());
        if dev < 1e-4 * a.abs() {
            break;
        }
    }
    let a = (x + y + 3.0 * z) / 5.0;
    let dx = (a - x) / a;
    let dy = (a - y) / a;
    let dz = (a - z) / a;
    let ea = dx * dy;
    let eb = dz * dz;
    let ec = ea - eb;
    let ed = ea - 6.0 * eb;
    let ee = ed + ec + ec;
    let series = 1.0
        + ed * (-3.0 / 14.0 + 9.0 / 88.0 * ed - 4.5 / 26.0 * dz * ee)
        + dz * (ee / 6.0 + dz * (-9.0 / 22.0 * ec + dz * 3.0 / 26.0 * ea));
    3.0 * sum + fac * series / (a * a.sqrt())
}

/// R_F for complex arguments off the negative real axis (principal square roots).
pub fn carlson_rf_complex(x: C64, y: C64, z: C64) -> C64 {
    let (mut x, mut y, mut z) = (x, y, z);
    for _ in 0..200 {
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lam = sx * (sy + sz) + sy * sz;
        x = (x + lam) * 0.25;
        y = (y + lam) * 0.25;
        z = (z + lam) * 0.25;
        let a = (x + y + z) / 3.0;
        let dev = (a - x).norm().max((a - y).norm()).max((a - z).norm());
        if dev < 1e-4 * a.norm() {
            break;
        }
    }
    let a = (x + y + z) / 3.0;
    let dx = (a - x) / a;
    let dy = (a - y) / a;
    let dz = -(dx + dy);
    let e2 = dx * dy - dz * dz;
    let e3 = dx * dy * dz;
    (C64::new(1.0, 0.0) - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - e2 * e3 * (3.0 / 44.0))
        / a.sqrt()
}

fn check_modulus(k: f64) -> Result<()> {
    if !(0.0..1.0).contains(&k.abs()) {
        return Err(Error::Domain(format!("modulus k = {k} must satisfy |k| < 1")));
    }
    Ok(())
}

/// Splits phi = n pi + r with r in [-pi/2, pi/2].
fn reduce_amplitude(phi: f64) -> (f64, f64) {
    let n = (phi / PI).round();
    (n, phi - n * PI)
}

/// Incomplete integral of the first kind F(phi, k), any real amplitude.
pub fn incomplete_f(phi: f64, k: f64) -> Result<f64> {
    check_modulus(k)?;
    let (n, r) = reduce_amplitude(phi);
    let (s, c) = r.sin_cos();
    let f = s * carlson_rf(c * c, 1.0 - k * k * s * s, 1.0);
    let extra = if n != 0.0 { 2.0 * n * complete_integrals(k).0 } else { 0.0 };
    Ok(f + extra)
}

/// Incomplete integral of the second kind E(phi, k), any real amplitude.
pub fn incomplete_e(phi: f64, k: f64) -> Result<f64> {
    check_modulus(k)?;
    let (n, r) = reduce_amplitude(phi);
    let (s, c) = r.sin_cos();
    let (c2, d2) = (c * c, 1.0 - k * k * s * s);
    let e = s * carlson_rf(c2, d2, 1.0) - k * k * s * s * s * carlson_rd(c2, d2, 1.0) / 3.0;
    let extra = if n != 0.0 { 2.0 * n * complete_integrals(k).1 } else { 0.0 };
    Ok(e + extra)
}

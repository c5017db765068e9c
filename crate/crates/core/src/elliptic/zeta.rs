use std::f64::consts::PI;

use super::carlson::incomplete_e;
use super::jacobi::{jacobi, jacobi_real};
use super::modulus::EllipticModulus;
use crate::error::{Error, Result};
use crate::C64;

/// Z(x) = E(am x, k) - (E/K) x for real x.
pub fn jacobi_zeta_real(x: f64, m: &EllipticModulus) -> f64 {
    let am = jacobi_real(x, m.p).3;
    incomplete_e(am, m.p).expect("modulus checked at construction")
        - m.complete_e / m.complete_k * x
}

// Z(iy) by Jacobi's imaginary transformation, |y| < K'.
fn zeta_imaginary(y: f64, m: &EllipticModulus) -> Result<C64> {
    let (s1, c1, d1, _) = jacobi_real(y, m.p_prime);
    if c1.abs() < 1e-10 {
        return Err(Error::Pole(format!("u = {y}i")));
    }
    let zp = {
        let am = jacobi_real(y, m.p_prime).3;
        incomplete_e(am, m.p_prime)? - m.complete_e_prime / m.complete_k_prime * y
    };
    let v = d1 * s1 / c1 - zp - PI * y / (2.0 * m.complete_k * m.complete_k_prime);
    Ok(C64::new(0.0, v))
}

/// Jacobi zeta function at complex argument.
pub fn jacobi_zeta(u: C64, m: &EllipticModulus) -> Result<C64> {
    let kp = m.complete_k_prime;
    // Z(u + 2iK') = Z(u) - i pi/K
    let shifts = (u.im / (2.0 * kp)).round();
    let mut w = C64::new(u.re, u.im - 2.0 * kp * shifts);
    let mut acc = C64::new(0.0, -PI / m.complete_k * shifts);
    if w.im.abs() > 0.5 * kp {
        // Z(v + iK') = Z(v) + cn v dn v / sn v - i pi/(2K)
        let sgn = w.im.signum();
        let v = C64::new(w.re, w.im - sgn * kp);
        let j = jacobi(v, m)?;
        if j.sn.norm() < 1e-10 {
            return Err(Error::Pole(format!("u = {u}")));
        }
        acc += j.cn * j.dn / j.sn - C64::new(0.0, sgn * PI / (2.0 * m.complete_k));
        w = v;
    }
    if w.im == 0.0 {
        return Ok(acc + jacobi_zeta_real(w.re, m));
    }
    let za = jacobi_zeta_real(w.re, m);
    let zb = zeta_imaginary(w.im, m)?;
    let sa = jacobi_real(w.re, m.p).0;
    let sb = jacobi(C64::new(0.0, w.im), m)?.sn;
    let sab = jacobi(w, m)?.sn;
    Ok(acc + za + zb - sab * sb * (m.p * m.p * sa))
}

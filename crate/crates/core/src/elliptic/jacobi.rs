//! Jacobi elliptic functions. Real arguments use the descending Landen
//! (AGM) recursion for the amplitude; complex arguments are assembled from
//! real values at modulus p and p' through the addition formulas.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::carlson::{carlson_rf_complex, incomplete_f};
use super::modulus::EllipticModulus;
use crate::error::{Error, Result};
use crate::C64;

const POLE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacobiTriple {
    pub sn: C64,
    pub cn: C64,
    pub dn: C64,
}

/// (sn, cn, dn, am) at real argument `u` and modulus `k`.
pub fn jacobi_real(u: f64, k: f64) -> (f64, f64, f64, f64) {
    if k == 0.0 {
        let (s, c) = u.sin_cos();
        return (s, c, 1.0, u);
    }
    let mut a = [0.0f64; 32];
    let mut c = [0.0f64; 32];
    a[0] = 1.0;
    c[0] = k;
    let mut b = ((1.0 - k) * (1.0 + k)).sqrt();
    let mut n = 0;
    while c[n].abs() > 1e-16 * a[n] && n < 31 {
        a[n + 1] = 0.5 * (a[n] + b);
        c[n + 1] = 0.5 * (a[n] - b);
        b = (a[n] * b).sqrt();
        n += 1;
    }
    // reduce modulo the real period 4K; am gains 2 pi per period
    let quarter = PI / (2.0 * a[n]);
    let turns = (u / (4.0 * quarter)).round();
    let ur = u - 4.0 * quarter * turns;
    let mut phi = (1u64 << n) as f64 * a[n] * ur;
    for j in (1..=n).rev() {
        phi = 0.5 * (phi + (c[j] / a[j] * phi.sin()).asin());
    }
    let (s, cc) = phi.sin_cos();
    let dn = (1.0 - k * k * s * s).sqrt();
    (s, cc, dn, phi + 2.0 * PI * turns)
}

/// sn, cn, dn at complex argument.
pub fn jacobi(u: C64, m: &EllipticModulus) -> Result<JacobiTriple> {
    let (s, c, d, _) = jacobi_real(u.re, m.p);
    if u.im == 0.0 {
        return Ok(JacobiTriple {
            sn: C64::new(s, 0.0),
            cn: C64::new(c, 0.0),
            dn: C64::new(d, 0.0),
        });
    }
    let (s1, c1, d1, _) = jacobi_real(u.im, m.p_prime);
    let k2 = m.p * m.p;
    let delta = c1 * c1 + k2 * s * s * s1 * s1;
    if delta.abs() < POLE_TOL {
        return Err(Error::Pole(format!("u = {u}")));
    }
    Ok(JacobiTriple {
        sn: C64::new(s * d1, c * d * s1 * c1) / delta,
        cn: C64::new(c * c1, -s * d * s1 * d1) / delta,
        dn: C64::new(d * c1 * d1, -k2 * s * c * s1) / delta,
    })
}

/// One solution u of sn(u) = alpha.
pub fn inverse_sn(alpha: C64, m: &EllipticModulus) -> Result<C64> {
    let k = m.p;
    let guess = if alpha.im == 0.0 {
        let a = alpha.re;
        let sgn = a.signum();
        let aa = a.abs();
        if aa <= 1.0 {
            C64::new(incomplete_f(a.asin(), k)?, 0.0)
        } else if aa * k < 1.0 {
            // sn(K + iy) = 1/dn(y, p')
            let t = ((1.0 - 1.0 / (aa * aa)).sqrt() / m.p_prime).min(1.0);
            let y = incomplete_f(t.asin(), m.p_prime)?;
            C64::new(m.complete_k, y) * sgn
        } else {
            // sn(u + iK') = 1/(k sn u)
            let v = incomplete_f((1.0 / (k * aa)).asin(), k)?;
            C64::new(v, m.complete_k_prime) * sgn
        }
    } else {
        let one = C64::new(1.0, 0.0);
        alpha * carlson_rf_complex(one - alpha * alpha, one - alpha * alpha * (k * k), one)
    };
    let mut u = guess;
    for _ in 0..60 {
        let j = jacobi(u, m)?;
        let deriv = j.cn * j.dn;
        if deriv.norm() < 1e-300 {
            break;
        }
        let step = (j.sn - alpha) / deriv;
        u -= step;
        if step.norm() < 1e-15 * (1.0 + u.norm()) {
            break;
        }
    }
    let res = (jacobi(u, m)?.sn - alpha).norm();
    if !(res < 1e-10 * (1.0 + alpha.norm())) {
        return Err(Error::Branch(format!("sn^-1({alpha}) did not converge (residual {res:e})")));
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::make_modulus;

    #[test]
    fn origin_and_quarter_period() {
        let m = make_modulus(0.63093).unwrap();
        let j = jacobi(C64::new(0.0, 0.0), &m).unwrap();
        assert_eq!((j.sn.re, j.cn.re, j.dn.re), (0.0, 1.0, 1.0));
        let j = jacobi(C64::new(m.complete_k, 0.0), &m).unwrap();
        assert!((j.sn.re - 1.0).abs() < 1e-14);
        assert!(j.cn.re.abs() < 1e-14);
        assert!((j.dn.re - m.p_prime).abs() < 1e-14);
    }

    #[test]
    fn small_modulus_is_circular() {
        let (s, c, d, am) = jacobi_real(1.3, 1e-9);
        assert!((s - 1.3f64.sin()).abs() < 1e-12);
        assert!((c - 1.3f64.cos()).abs() < 1e-12);
        assert!((d - 1.0).abs() < 1e-12);
        assert!((am - 1.3).abs() < 1e-12);
    }

    #[test]
    fn real_period() {
        let m = make_modulus(0.8).unwrap();
        for &u in &[0.1, 1.7, -2.3, 40.0] {
            let a = jacobi_real(u, 0.8);
            let b = jacobi_real(u + 4.0 * m.complete_k, 0.8);
            assert!((a.0 - b.0).abs() < 1e-13 && (a.1 - b.1).abs() < 1e-13);
        }
    }

    #[test]
    fn pole_is_reported() {
        let m = make_modulus(0.5).unwrap();
        assert!(matches!(
            jacobi(C64::new(0.0, m.complete_k_prime), &m),
            Err(Error::Pole(_))
        ));
    }

    #[test]
    fn imaginary_transformation() {
        // sn(iy, k) = i sc(y, k')
        let m = make_modulus(0.6).unwrap();
        let y = 0.77;
        let j = jacobi(C64::new(0.0, y), &m).unwrap();
        let (s1, c1, d1, _) = jacobi_real(y, m.p_prime);
        assert!((j.sn - C64::new(0.0, s1 / c1)).norm() < 1e-14);
        assert!((j.cn - C64::new(1.0 / c1, 0.0)).norm() < 1e-14);
        assert!((j.dn - C64::new(d1 / c1, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn inverse_sn_round_trip() {
        let m = make_modulus(0.7398).unwrap();
        for &a in &[
            C64::new(0.4, 0.0),
            C64::new(1.2, 0.0),
            C64::new(-1.2, 0.0),
            C64::new(2.0, 0.0),
            C64::new(0.3, 0.8),
            C64::new(-1.5, 0.4),
            C64::new(2.5, -3.0),
        ] {
            let u = inverse_sn(a, &m).unwrap();
            assert!((jacobi(u, &m).unwrap().sn - a).norm() < 1e-12, "alpha {a}");
        }
    }
}

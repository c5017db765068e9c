//! Jacobi theta functions in the notation Theta, Theta_1, H, H_1 of argument u.
//! With v = pi u / (2K) and nome q = exp(-pi K'/K):
//! Theta(u) = th4(v), Theta_1(u) = th3(v), H(u) = th1(v), H_1(u) = th2(v).

use std::f64::consts::PI;

use super::modulus::EllipticModulus;
use crate::error::{Error, Result};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaSuite<T> {
    pub theta: T,
    pub theta1: T,
    pub h: T,
    pub h1: T,
    /// d Theta / du
    pub theta_prime: T,
}

const MAX_TERMS: usize = 400;

pub fn theta_suite_complex(u: C64, m: &EllipticModulus) -> Result<ThetaSuite<C64>> {
    let q = m.q_nome;
    if !(0.0..1.0).contains(&q) {
        return Err(Error::Domain(format!("theta nome q = {q} must lie in [0, 1)")));
    }
    let scale = PI / (2.0 * m.complete_k);
    let v = u * scale;
    let lnq = q.ln();
    // terms grow while n^2 ln q + 2n|Im v| increases
    let peak = if q > 0.0 { v.im.abs() / -lnq } else { 0.0 };

    let mut th3 = C64::new(1.0, 0.0);
    let mut th4 = C64::new(1.0, 0.0);
    let mut th4d = C64::new(0.0, 0.0);
    let mut mag = 1.0f64;
    for n in 1..MAX_TERMS {
        let nf = n as f64;
        let w = (nf * nf * lnq).exp();
        let arg = v * (2.0 * nf);
        let c = arg.cos() * w;
        let s = arg.sin() * w;
        let sgn = if n % 2 == 1 { -1.0 } else { 1.0 };
        th3 += c * 2.0;
        th4 += c * (2.0 * sgn);
        th4d += s * (-4.0 * sgn * nf);
        // bound on |cos|, |sin| of the term: a zero of cos must not stop the sum
        let bound = w * (2.0 * nf * v.im.abs()).exp();
        mag += bound;
        if nf > peak && bound * (1.0 + nf) < 1e-16 * mag {
            break;
        }
    }
    let mut th1 = C64::new(0.0, 0.0);
    let mut th2 = C64::new(0.0, 0.0);
    let mut mag = 0.0f64;
    for n in 0..MAX_TERMS {
        let h = n as f64 + 0.5;
        let w = (h * h * lnq).exp();
        let arg = v * (2.0 * h);
        let c = arg.cos() * w;
        let s = arg.sin() * w;
        let sgn = if n % 2 == 1 { -1.0 } else { 1.0 };
        th1 += s * (2.0 * sgn);
        th2 += c * 2.0;
        let bound = w * (2.0 * h * v.im.abs()).exp();
        mag += bound;
        if h > peak && bound < 1e-16 * mag {
            break;
        }
    }
    Ok(ThetaSuite {
        theta: th4,
        theta1: th3,
        h: th1,
        h1: th2,
        theta_prime: th4d * scale,
    })
}

/// Theta suite at real argument.
pub fn theta_suite(x: f64, m: &EllipticModulus) -> Result<ThetaSuite<f64>> {
    let t = theta_suite_complex(C64::new(x, 0.0), m)?;
    Ok(ThetaSuite {
        theta: t.theta.re,
        theta1: t.theta1.re,
        h: t.h.re,
        h1: t.h1.re,
        theta_prime: t.theta_prime.re,
    })
}

//! Closed forms along the rod: transfer matrices over k traversals, their
//! eigenvectors, and the explicit Riccati solutions z = -(dn x + i p sn x)
//! (dn(x-a) + i p sn(x-a)).

use serde::{Deserialize, Serialize};

use super::linear::{c, gauge_matrix, twist_psi, M2, V2};
use crate::elliptic::{inverse_sn, jacobi, jacobi_real};
use crate::error::{Error, Result};
use crate::rod::{period_monodromy, rod_m0, RodParams};
use crate::C64;

fn traversals(params: &RodParams, k: usize) -> usize {
    k * params.n_periods
}

/// Square of the (twisted) psi-gauge transfer matrix over k traversals of
/// the closed rod, i.e. the transfer over 2kn periods of 2K:
/// (-1)^{kn} (cos(x Lambda) I + sin(x Lambda) M0) at x = 2knK.
pub fn transfer_matrix_rod(params: &RodParams, k: usize) -> M2 {
    let kn = traversals(params, k);
    let x = 2.0 * kn as f64 * params.modulus.complete_k;
    let m0 = rod_m0(params.sigma, params.mu, params.lambda1);
    let xl = params.lambda * x;
    let sign = if kn % 2 == 0 { 1.0 } else { -1.0 };
    (M2::identity() * xl.cos() + m0 * xl.sin()) * c(sign, 0.0)
}

/// The same matrix from the integrated one-period monodromy.
pub fn transfer_matrix_rod_numeric(params: &RodParams, k: usize, steps_per_period: usize) -> M2 {
    let m = period_monodromy(&params.modulus, params.sigma, steps_per_period);
    let mut out = M2::identity();
    for _ in 0..2 * traversals(params, k) {
        out *= m;
    }
    out
}

/// Untwisted transfer matrix over k traversals, D^{kn} M^{kn}, from the
/// integrated monodromy.
pub fn transfer_over_covers(params: &RodParams, k: usize, steps_per_period: usize) -> M2 {
    let m = period_monodromy(&params.modulus, params.sigma, steps_per_period);
    let kn = traversals(params, k);
    let mut out = M2::identity();
    for _ in 0..kn {
        out *= m;
    }
    if kn % 2 == 1 {
        twist_psi() * out
    } else {
        out
    }
}

/// Eigenvalues of `transfer_matrix_rod` on (v+, v-).
pub fn transfer_eigenvalues(params: &RodParams, k: usize) -> (C64, C64) {
    let kn = traversals(params, k);
    let x = 2.0 * kn as f64 * params.modulus.complete_k;
    let xl = params.lambda * x;
    let sign = if kn % 2 == 0 { 1.0 } else { -1.0 };
    let i = c(0.0, 1.0);
    ((xl.cos() - i * xl.sin()) * sign, (xl.cos() + i * xl.sin()) * sign)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eigenvectors {
    pub psi_plus: V2,
    pub psi_minus: V2,
    pub phi_plus: V2,
    pub phi_minus: V2,
}

/// v+ = (-sigma/(2mu), i(1 + (1-2 lambda1)/(2mu))) and v- with the entries
/// exchanged; M0 v+ = -i v+, M0 v- = i v-.
pub fn eigenvectors_vpm(params: &RodParams) -> Eigenvectors {
    let mu2 = params.mu * 2.0;
    let e = params.sigma / mu2;
    let d = (c(1.0, 0.0) - params.lambda1 * 2.0) / mu2;
    let psi_plus = V2::new(-e, c(0.0, 1.0) * (d + 1.0));
    let psi_minus = V2::new(psi_plus[1], psi_plus[0]);
    let a = gauge_matrix();
    Eigenvectors { psi_plus, psi_minus, phi_plus: a * psi_plus, phi_minus: a * psi_minus }
}

/// The shift a with sn a/(1 + cn a) = 2 p nu, on the sheet nearest the origin.
pub fn a_from_nu(params: &RodParams, nu: C64) -> Result<C64> {
    let m = &params.modulus;
    let t = nu * (2.0 * m.p);
    let den = c(1.0, 0.0) + t * t;
    if den.norm() < 1e-12 {
        return Err(Error::Domain(format!("2 p nu = {t} puts a at a pole")));
    }
    if nu == c(0.0, 0.0) {
        return Ok(c(0.0, 0.0));
    }
    let sn_t = t * 2.0 / den;
    let cn_t = (c(1.0, 0.0) - t * t) / den;
    let u = inverse_sn(sn_t, m)?;
    let (k, kp) = (m.complete_k, m.complete_k_prime);
    let mut best: Option<C64> = None;
    for base in [u, c(2.0 * k, 0.0) - u] {
        for i in -1..=1 {
            for j in -1..=1 {
                let a = base + c(4.0 * k * i as f64, 2.0 * kp * j as f64);
                let Ok(tr) = jacobi(a, m) else { continue };
                let ok = (tr.cn - cn_t).norm() < 1e-8 * (1.0 + cn_t.norm())
                    && (tr.sn - sn_t).norm() < 1e-8 * (1.0 + sn_t.norm());
                if ok && best.is_none_or(|b| a.norm() < b.norm()) {
                    best = Some(a);
                }
            }
        }
    }
    let a = best.ok_or_else(|| Error::Domain(format!("no shift a solves sn a/(1+cn a) = {t}")))?;
    Ok(if nu.im == 0.0 { c(a.re, 0.0) } else { a })
}

/// z(x) = -(dn x + i p sn x)(dn(x-a) + i p sn(x-a)), x = s/(2p); it solves the
/// Riccati equation at the nu with 2 p nu = sn a/(1 + cn a).
pub fn riccati_rod_closed_form(params: &RodParams, a: C64, x: f64) -> Result<C64> {
    let m = &params.modulus;
    let ta = jacobi(a, m)?;
    if (ta.cn + 1.0).norm() < 1e-10 {
        return Err(Error::Domain(format!("cn(a) = -1 at a = {a}")));
    }
    let i = c(0.0, 1.0);
    let (sn, _, dn, _) = jacobi_real(x, m.p);
    let sh = jacobi(c(x, 0.0) - a, m)?;
    Ok(-(c(dn, 0.0) + i * (m.p * sn)) * (sh.dn + i * m.p * sh.sn))
}

/// beta(x) = c1 - [asin(p sn x) + asin(p sn(x-a))] for real a.
pub fn beta_rod_closed_form(params: &RodParams, a: f64, x: f64, c1: f64) -> f64 {
    let p = params.modulus.p;
    let s0 = jacobi_real(x, p).0;
    let s1 = jacobi_real(x - a, p).0;
    c1 - ((p * s0).asin() + (p * s1).asin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::riccati::{beta_solve, riccati_solve};

    fn rod13() -> RodParams {
        RodParams::physical(0.6309247559135254, 3).unwrap()
    }

    #[test]
    fn transfer_matches_integration() {
        let r = rod13();
        for sigma in [c(1.2283, 0.9688), c(0.5, 0.3), c(0.0, 0.2), r.sigma] {
            let q = r.with_sigma(sigma).unwrap();
            for k in 1..=2 {
                let closed = transfer_matrix_rod(&q, k);
                let num = transfer_matrix_rod_numeric(&q, k, 3000);
                let scale = 1.0 + num.norm();
                assert!((closed - num).norm() < 1e-6 * scale, "sigma {sigma} k {k}");
                let tr = closed.trace();
                let x = 2.0 * (k * 3) as f64 * q.modulus.complete_k;
                let sign = if (k * 3) % 2 == 0 { 1.0 } else { -1.0 };
                assert!((tr - (q.lambda * x).cos() * 2.0 * sign).norm() < 1e-9 * scale);
            }
        }
    }

    #[test]
    fn eigenvectors_are_independent_of_k() {
        let q = rod13().with_sigma(c(0.0, 0.2)).unwrap();
        let v = eigenvectors_vpm(&q);
        for k in 1..=3 {
            let t = transfer_matrix_rod(&q, k);
            let (lp, lm) = transfer_eigenvalues(&q, k);
            assert!((t * v.psi_plus - v.psi_plus * lp).norm() < 1e-9);
            assert!((t * v.psi_minus - v.psi_minus * lm).norm() < 1e-9);
            let a = gauge_matrix();
            let tphi = a * t * a.try_inverse().unwrap();
            assert!((tphi * v.phi_plus - v.phi_plus * lp).norm() < 1e-9);
        }
    }

    #[test]
    fn initial_beta_from_eigenvector() {
        // sin beta = 2q/(p^-2 + q^2) with q = 2C
        let r = rod13();
        let cc = 0.1;
        let q = r.with_sigma(c(0.0, 2.0 * cc)).unwrap();
        let v = eigenvectors_vpm(&q).psi_plus;
        let y = -v[0] / v[1];
        assert!(y.im.abs() < 1e-14);
        let b = 2.0 * y.re.atan();
        let qq = 2.0 * cc;
        let pm2 = 1.0 / (r.p() * r.p());
        assert!((b.sin() - 2.0 * qq / (pm2 + qq * qq)).abs() < 1e-13);
    }

    #[test]
    fn a_from_real_nu() {
        let r = rod13();
        assert_eq!(a_from_nu(&r, c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        let cc = 0.2;
        let a = a_from_nu(&r, c(cc, 0.0)).unwrap();
        assert_eq!(a.im, 0.0);
        let q = 2.0 * cc;
        let pm2 = 1.0 / (r.p() * r.p());
        let (sn, cn, _, _) = jacobi_real(a.re, r.p());
        assert!((cn - (pm2 - q * q) / (pm2 + q * q)).abs() < 1e-12);
        // half-angle form sn a/(1 + cn a) = sn b dn b/cn b at b = a/2
        let (sb, cb, db, _) = jacobi_real(0.5 * a.re, r.p());
        assert!((sn / (1.0 + cn) - sb * db / cb).abs() < 1e-12);
    }

    #[test]
    fn a_from_complex_nu() {
        let r = rod13();
        let nu = c(0.3, -0.25);
        let a = a_from_nu(&r, nu).unwrap();
        let t = jacobi(a, &r.modulus).unwrap();
        assert!((t.sn / (t.cn + 1.0) - nu * (2.0 * r.p())).norm() < 1e-10);
    }

    #[test]
    fn closed_form_riccati() {
        let r = rod13();
        let p = r.p();
        for nu in [c(0.2, 0.0), c(0.3, -0.25), c(-0.1, 0.4)] {
            let a = a_from_nu(&r, nu).unwrap();
            let t = jacobi(a, &r.modulus).unwrap();
            let z0 = riccati_rod_closed_form(&r, a, 0.0).unwrap();
            assert!((z0 - (c(0.0, p) * t.sn - t.dn)).norm() < 1e-14);
            let i = c(0.0, 1.0);
            for j in 0..200 {
                let x = -3.0 + 0.037 * j as f64;
                let z = riccati_rod_closed_form(&r, a, x).unwrap();
                let id = c(jacobi_real(x, p).1, 0.0) + i * nu * (z - z.inv());
                let target = jacobi(c(x, 0.0) - a, &r.modulus).unwrap().cn;
                assert!((id - target).norm() < 1e-9);
                // dz/ds = i kappa z + nu (1 - z^2)/2 with s = 2 p x
                let h = 1e-4;
                let zp = riccati_rod_closed_form(&r, a, x + h).unwrap();
                let zm = riccati_rod_closed_form(&r, a, x - h).unwrap();
                let dzds = (zp - zm) / (2.0 * h * 2.0 * p);
                let rhs = i * jacobi_real(x, p).1 * z + nu * (c(1.0, 0.0) - z * z) * 0.5;
                assert!((dzds - rhs).norm() < 1e-7);
            }
        }
    }

    #[test]
    fn closed_form_beta_matches_ode() {
        let r = rod13();
        let p = r.p();
        let cc = 0.2;
        let a = a_from_nu(&r, c(cc, 0.0)).unwrap().re;
        let len = r.length();
        let n = 6000;
        let grid: Vec<f64> = (0..=n).map(|i| len * i as f64 / n as f64).collect();
        let kappa = |s: f64| jacobi_real(s / (2.0 * p), p).1;
        let b0 = beta_rod_closed_form(&r, a, 0.0, 0.0);
        let num = beta_solve(&kappa, cc, b0, &grid, 1).unwrap();
        for (s, b) in grid.iter().zip(num.beta.unwrap()) {
            assert!((b - beta_rod_closed_form(&r, a, s / (2.0 * p), 0.0)).abs() < 1e-9);
        }
        // z = -exp(-i beta) from the complex formula
        let z = riccati_rod_closed_form(&r, c(a, 0.0), 0.7).unwrap();
        let b = beta_rod_closed_form(&r, a, 0.7, 0.0);
        assert!((z + c(0.0, -b).exp()).norm() < 1e-13);
        let z0 = riccati_rod_closed_form(&r, c(a, 0.0), 0.0).unwrap();
        let ric = riccati_solve(&kappa, c(cc, 0.0), z0, &grid, 1).unwrap();
        let rb = ric.beta.unwrap();
        for (s, b) in grid.iter().zip(rb).step_by(37) {
            let want = beta_rod_closed_form(&r, a, s / (2.0 * p), 0.0);
            assert!(((b - want) / (2.0 * std::f64::consts::PI)).round() == (b - want) / (2.0 * std::f64::consts::PI) || (b - want).abs() < 1e-8);
        }
    }
}

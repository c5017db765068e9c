//! Closed elastic rods of constant torsion with curvature cn(x, p).
//!
//! Scaling: maximum curvature 1, x = s/(2p), torsion tau = sigma/2. One 2K
//! period in x has arclength 4pK.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

use crate::curves::{CurveSample, SampledCurve};
use crate::elliptic::{
    incomplete_e, incomplete_f, inverse_sn, jacobi_real, jacobi_zeta, make_modulus,
    theta_suite, theta_suite_complex, EllipticModulus,
};
use crate::error::{Error, Result};
use crate::spectral::linear::{c, fundamental_at, twist_psi, Gauge, M2};
use crate::C64;

/// Below this |mu| the rod is treated as sitting on a point sigma = +-p'/p +- i.
pub const MU_RING: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RodParams {
    pub modulus: EllipticModulus,
    pub sigma: C64,
    pub kappa0: f64,
    pub mu: C64,
    pub m_param: C64,
    pub lambda1: C64,
    #[serde(rename = "Lambda")]
    pub lambda: C64,
    pub n_periods: usize,
    pub torus_type: Option<(i64, i64)>,
    /// amplitude xi of the incomplete integrals (real sigma only)
    pub xi: Option<f64>,
    /// F(xi, p') (real sigma only)
    pub f_hat: Option<f64>,
}

struct Derived {
    mu: C64,
    m_param: C64,
    lambda1: C64,
}

fn derived(p: f64, sigma: C64) -> Derived {
    let pm2 = 1.0 / (p * p);
    let s2 = sigma * sigma;
    let mu = ((pm2 - s2) * (pm2 - s2) + s2 * 4.0).sqrt() * 0.25;
    let m_param = mu * mu * 16.0 / ((s2 + pm2) * (s2 + pm2));
    let lambda1 = (s2 - pm2 + 2.0) * 0.25;
    Derived { mu, m_param, lambda1 }
}

/// The constant matrix M0 of the rod transfer matrices (M0^2 = -I).
pub fn rod_m0(sigma: C64, mu: C64, lambda1: C64) -> M2 {
    let d = (C64::new(1.0, 0.0) - lambda1 * 2.0) / (mu * 2.0);
    let e = sigma / (mu * 2.0);
    M2::new(d * c(0.0, 1.0), e, -e, d * c(0.0, -1.0))
}

/// Closure in the axial direction: sigma^2 = p^-2 (2E/K - 1).
pub fn sigma_from_closure(m: &EllipticModulus) -> Result<f64> {
    let g = 2.0 * m.complete_e / m.complete_k - 1.0;
    if !(g > 0.0) {
        return Err(Error::Domain(format!(
            "p = {} is beyond p_max; 2E/K - 1 = {g} has no real root",
            m.p
        )));
    }
    Ok(g.sqrt() / m.p)
}

/// The modulus at which 2E/K - 1 vanishes.
pub fn p_max() -> f64 {
    let g = |p: f64| {
        let (k, e) = crate::elliptic::complete_integrals(p);
        2.0 * e / k - 1.0
    };
    let (mut lo, mut hi) = (0.5, 0.99);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Amplitude xi = pi/2 - 2 atan(2 sigma/(p^-2 - sigma^2 + 4 mu)), principal branch.
pub fn xi_angle(p: f64, sigma: f64, mu: f64) -> f64 {
    let pm2 = 1.0 / (p * p);
    FRAC_PI_2 - 2.0 * (2.0 * sigma / (pm2 - sigma * sigma + 4.0 * mu)).atan()
}

/// Lambda from the incomplete-integral formula (real sigma, mu > 0).
pub fn lambda_incomplete(m: &EllipticModulus, sigma: f64) -> Result<f64> {
    let d = derived(m.p, C64::new(sigma, 0.0));
    let mu = d.mu.re;
    if mu < MU_RING {
        return Err(Error::Domain("mu vanishes; use the zeta-function formula".into()));
    }
    let xi = xi_angle(m.p, sigma, mu);
    let e = incomplete_e(xi, m.p_prime)?;
    let f = incomplete_f(xi, m.p_prime)?;
    Ok(e + (m.complete_e / m.complete_k - 1.0) * f + d.lambda1.re * m.p * sigma / mu)
}

/// The values -i Z(u) + p^2 sigma alpha, with sn u = alpha, over the sheets
/// of the inverse sn, together with their negatives and shifts by pi/K.
pub fn lambda_candidates(m: &EllipticModulus, sigma: C64, mu: C64) -> Result<Vec<C64>> {
    let p = m.p;
    let alpha = mu * 4.0 / ((sigma * sigma + 1.0 / (p * p)) * p);
    let u = inverse_sn(alpha, m)?;
    let z = jacobi_zeta(u, m)?;
    let lin = sigma * alpha * (p * p);
    let iz = z * c(0.0, 1.0);
    let shift = C64::new(PI / m.complete_k, 0.0);
    let mut out = Vec::with_capacity(8);
    for base in [lin - iz, lin + iz, -lin + iz, -lin - iz] {
        out.push(base);
        out.push(base + shift);
    }
    Ok(out)
}

/// D Psi over one 2K period (arclength 4pK) at lambda = -i sigma/2.
pub fn period_monodromy(m: &EllipticModulus, sigma: C64, steps: usize) -> M2 {
    let p = m.p;
    let kappa = move |s: f64| jacobi_real(s / (2.0 * p), p).1;
    let psi = fundamental_at(&kappa, sigma * c(0.0, -0.5), Gauge::Psi, 0.0, 4.0 * p * m.complete_k, steps);
    twist_psi() * psi
}

/// Predicted one-period monodromy -i (cos(K Lambda) I + sin(K Lambda) M0).
pub fn monodromy_from_lambda(m: &EllipticModulus, lambda: C64, m0: &M2) -> M2 {
    let kl = lambda * m.complete_k;
    (M2::identity() * kl.cos() + m0 * kl.sin()) * c(0.0, -1.0)
}

/// Lambda(sigma, p). The zeta-function formula is evaluated on every sheet
/// and the sheet reproducing the integrated one-period monodromy is kept;
/// on the real axis the incomplete-integral formula decides.
pub fn compute_lambda(m: &EllipticModulus, sigma: C64) -> Result<C64> {
    let d = derived(m.p, sigma);
    if d.mu.norm() == 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    if sigma.im == 0.0 && d.mu.norm() >= MU_RING {
        return Ok(C64::new(lambda_incomplete(m, sigma.re)?, 0.0));
    }
    let cands = lambda_candidates(m, sigma, d.mu);
    let cands = cands?;
    select_by_monodromy(m, sigma, d.mu, d.lambda1, &cands)
}

fn nearest(cands: &[C64], target: C64) -> Option<C64> {
    cands
        .iter()
        .copied()
        .min_by(|a, b| (a - target).norm().total_cmp(&(b - target).norm()))
}

fn select_by_monodromy(
    m: &EllipticModulus,
    sigma: C64,
    mu: C64,
    lambda1: C64,
    cands: &[C64],
) -> Result<C64> {
    let m0 = rod_m0(sigma, mu, lambda1);
    let steps = 600 + (200.0 * sigma.norm()) as usize;
    let num = period_monodromy(m, sigma, steps);
    let scale = 1.0 + num.norm();
    let (best, err) = cands
        .iter()
        .map(|&l| (l, (monodromy_from_lambda(m, l, &m0) - num).norm()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("candidate list is never empty");
    if err > 1e-6 * scale {
        return Err(Error::Branch(format!(
            "no sheet of the zeta formula matches the monodromy at sigma = {sigma} (mismatch {err:e})"
        )));
    }
    Ok(best)
}

/// Lambda on the sheet nearest to `near`, without integrating anything;
/// used for derivatives along a path where the sheet is already known.
pub fn lambda_near(m: &EllipticModulus, sigma: C64, near: C64) -> Result<C64> {
    let d = derived(m.p, sigma);
    if d.mu.norm() == 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let cands = lambda_candidates(m, sigma, d.mu)?;
    Ok(nearest(&cands, near).expect("non-empty"))
}

impl RodParams {
    /// Rod constants at modulus p and (possibly complex) sigma.
    pub fn new(p: f64, sigma: C64, n_periods: usize) -> Result<Self> {
        let modulus = make_modulus(p)?;
        let d = derived(p, sigma);
        let lambda = compute_lambda(&modulus, sigma)?;
        let (xi, f_hat) = if sigma.im == 0.0 && d.mu.re >= MU_RING {
            let xi = xi_angle(p, sigma.re, d.mu.re);
            (Some(xi), Some(incomplete_f(xi, modulus.p_prime)?))
        } else {
            (None, None)
        };
        Ok(RodParams {
            modulus,
            sigma,
            kappa0: 1.0,
            mu: d.mu,
            m_param: d.m_param,
            lambda1: d.lambda1,
            lambda,
            n_periods,
            torus_type: None,
            xi,
            f_hat,
        })
    }

    /// The physical rod at modulus p: sigma from the closure condition.
    pub fn physical(p: f64, n_periods: usize) -> Result<Self> {
        let m = make_modulus(p)?;
        let sigma = sigma_from_closure(&m)?;
        Self::new(p, C64::new(sigma, 0.0), n_periods)
    }

    /// Same modulus and period count at another sigma.
    pub fn with_sigma(&self, sigma: C64) -> Result<Self> {
        let mut out = Self::new(self.modulus.p, sigma, self.n_periods)?;
        out.torus_type = self.torus_type;
        Ok(out)
    }

    pub fn p(&self) -> f64 {
        self.modulus.p
    }

    pub fn tau(&self) -> C64 {
        self.sigma * 0.5
    }

    /// Arclength of one 2K period.
    pub fn period_length(&self) -> f64 {
        4.0 * self.modulus.p * self.modulus.complete_k
    }

    /// Arclength of the closed rod (n periods).
    pub fn length(&self) -> f64 {
        self.n_periods as f64 * self.period_length()
    }

    /// Change of the cylindrical angle over one period divided by 2 pi,
    /// i.e. -K Lambda / pi.
    pub fn delta_theta_over_2pi(&self) -> f64 {
        -self.modulus.complete_k * self.lambda.re / PI
    }

    /// |delta theta| / 2 pi.
    pub fn rotation_number(&self) -> f64 {
        self.delta_theta_over_2pi().abs()
    }

    /// Curvature at arclength s.
    pub fn kappa_at(&self, s: f64) -> f64 {
        jacobi_real(s / (2.0 * self.modulus.p), self.modulus.p).1
    }

    /// Closed-form r(x) = sqrt(1/m - sn^2 x)/mu.
    pub fn radius(&self, x: f64) -> f64 {
        let sn = jacobi_real(x, self.modulus.p).0;
        ((1.0 / self.m_param.re - sn * sn).sqrt()) / self.mu.re
    }

    fn require_physical(&self) -> Result<(f64, f64, f64)> {
        match self.f_hat {
            Some(f) if self.sigma.im == 0.0 => Ok((self.sigma.re, self.mu.re, f)),
            _ => Err(Error::Domain("positions need a real torsion parameter".into())),
        }
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// The modulus whose rod turns by m/n of a revolution per period.
pub fn find_torus_rod(m: i64, n: i64, tol: f64) -> Result<RodParams> {
    if n <= 0 || m == 0 {
        return Err(Error::Domain(format!("({m},{n}) is not a torus type with n > 0, m != 0")));
    }
    if gcd(m, n) != 1 {
        return Err(Error::Domain(format!("gcd({m},{n}) != 1")));
    }
    let target = m.abs() as f64 / n as f64;
    if target >= 0.5 {
        return Err(Error::Domain(format!(
            "|m/n| = {target} is not realizable (rods require |m/n| < 1/2)"
        )));
    }
    let rot = |p: f64| -> Result<f64> {
        let md = make_modulus(p)?;
        let sigma = sigma_from_closure(&md)?;
        Ok(md.complete_k * lambda_incomplete(&md, sigma)?.abs() / PI - target)
    };
    let (mut lo, mut hi) = (0.01, p_max() - 1e-6);
    let (flo, fhi) = (rot(lo)?, rot(hi)?);
    if !(flo < 0.0 && fhi > 0.0) {
        return Err(Error::Numeric(format!(
            "rotation number does not bracket {target} on [{lo}, {hi}] ({flo}, {fhi})"
        )));
    }
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if rot(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // secant polish inside the bracket
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (rot(a)?, rot(b)?);
    for _ in 0..30 {
        if fb.abs() < tol.min(1e-14) || (b - a).abs() < 1e-16 {
            break;
        }
        let next = b - fb * (b - a) / (fb - fa);
        if !(next > lo - 1e-9 && next < hi + 1e-9) {
            break;
        }
        a = b;
        fa = fb;
        b = next;
        fb = rot(b)?;
    }
    if fb.abs() > tol {
        return Err(Error::Numeric(format!("rotation number residual {fb:e} exceeds {tol:e}")));
    }
    let mut params = RodParams::physical(b, n as usize)?;
    params.torus_type = Some((m, n));
    Ok(params)
}

/// Position on the rod at parameter x.
pub fn rod_position(x: f64, params: &RodParams) -> Result<Vector3<f64>> {
    let (_, mu, f_hat) = params.require_physical()?;
    let md = &params.modulus;
    let p = md.p;
    let th = theta_suite(x, md)?;
    let shifted = theta_suite_complex(C64::new(x, -f_hat), md)?;
    let h1 = theta_suite_complex(C64::new(0.0, f_hat), md)?.h1;
    if th.theta.abs() < 1e-300 || h1.norm() < 1e-300 {
        return Err(Error::Pole(format!("theta quotient at x = {x}")));
    }
    let pref = (2.0 * md.complete_k * md.p_prime / (PI * p)).sqrt();
    let phase = (C64::new(0.0, -1.0) * params.lambda.re * x).exp();
    let w = phase * shifted.theta1 * pref / (h1 * (mu * th.theta));
    Ok(Vector3::new(w.re, w.im, th.theta_prime / (mu * p * th.theta)))
}

/// Frenet frame (rows T, N, B) at parameter x from the cylindrical-basis matrix.
pub fn rod_frame(x: f64, params: &RodParams) -> Result<Matrix3<f64>> {
    let (sigma, mu, _) = params.require_physical()?;
    let p = params.modulus.p;
    let pm2 = 1.0 / (p * p);
    let l1 = params.lambda1.re;
    let (sn, cn, dn, _) = jacobi_real(x, p);
    let r2 = (1.0 / params.m_param.re - sn * sn) / (mu * mu);
    if r2 < 1e-24 {
        return Err(Error::Numeric(format!("cylindrical basis degenerate at x = {x}")));
    }
    let pos = rod_position(x, params)?;
    let r = r2.sqrt();
    let theta = pos.y.atan2(pos.x);
    let e_r = Vector3::new(theta.cos(), theta.sin(), 0.0);
    let e_t = Vector3::new(-theta.sin(), theta.cos(), 0.0);
    let e_z = Vector3::z();
    let (mu2, mu3) = (mu * mu, mu * mu * mu);
    let rows = [
        [
            -cn * sn * dn / (2.0 * p * mu2 * r2),
            -sigma * (pm2 + sigma * sigma - 4.0 * l1 * sn * sn) / (8.0 * mu3 * r2),
            (cn * cn - 2.0 * l1) / (2.0 * mu),
        ],
        [
            -cn * (pm2 + sigma * sigma - 2.0 * sn * sn) / (4.0 * mu2 * r2),
            l1 * sigma * sn * dn / (2.0 * p * mu3 * r2),
            -sn * dn / (2.0 * p * mu),
        ],
        [
            sigma * sn * dn / (2.0 * p * mu2 * r2),
            -(pm2 * pm2 - sigma.powi(4)) * cn / (16.0 * mu3 * r2),
            -sigma * cn / (2.0 * mu),
        ],
    ];
    let vec = |row: &[f64; 3]| e_r * (row[0] * r) + e_t * (row[1] * r) + e_z * row[2];
    Ok(Matrix3::from_rows(&[
        vec(&rows[0]).transpose(),
        vec(&rows[1]).transpose(),
        vec(&rows[2]).transpose(),
    ]))
}

/// Samples `periods` periods of the rod with `samples_per_period` intervals each.
pub fn rod_curve(params: &RodParams, periods: usize, samples_per_period: usize) -> Result<SampledCurve> {
    if samples_per_period < 8 || periods == 0 {
        return Err(Error::Input("need at least one period and 8 samples per period".into()));
    }
    let p = params.modulus.p;
    let two_k = 2.0 * params.modulus.complete_k;
    let total = periods * samples_per_period;
    let tau = params.sigma.re * 0.5;
    let samples = (0..=total)
        .map(|j| {
            let x = two_k * j as f64 / samples_per_period as f64;
            let pos = rod_position(x, params)?;
            let fr = rod_frame(x, params)?;
            Ok(CurveSample {
                s: 2.0 * p * x,
                position: pos,
                tangent: fr.row(0).transpose(),
                normal: fr.row(1).transpose(),
                binormal: fr.row(2).transpose(),
                kappa: jacobi_real(x, p).1,
                tau,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut curve = SampledCurve::from_samples(samples, 1e-6)?;
    curve.length = 2.0 * p * two_k * periods as f64;
    Ok(curve)
}

/// The closed (m, n) torus-knot rod; negative m gives the mirror image.
pub fn build_rod(m: i64, n: i64, samples_per_period: usize) -> Result<SampledCurve> {
    let params = find_torus_rod(m, n, 1e-12)?;
    let curve = rod_curve(&params, n as usize, samples_per_period)?;
    Ok(if m < 0 { curve.reflected() } else { curve })
}

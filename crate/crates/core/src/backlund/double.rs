use serde::{Deserialize, Serialize};

use crate::curves::{CurveSample, SampledCurve, V3};
use crate::error::{Error, Result};
use crate::rod::{compute_lambda, RodParams};
use crate::spectral::closed_form::eigenvectors_vpm;
use crate::spectral::floquet::FloquetRoot;
use crate::spectral::linear::{c, Gauge, M2};
use crate::spectral::riccati::{riccati_solve, SpectralSolution};
use crate::spectral::su2::{basis, coords};
use crate::C64;

use super::single::Branch;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoubleBtSpec {
    pub nu: C64,
    /// c+/c- for the Case B mixture of fundamental-matrix columns
    pub omega: Option<C64>,
    pub k_covers: usize,
    pub alpha_const: C64,
}

impl DoubleBtSpec {
    pub fn new(nu: C64, tau: f64, omega: Option<C64>, k_covers: usize) -> Self {
        DoubleBtSpec { nu, omega, k_covers, alpha_const: alpha_constant(nu, tau) }
    }
}

/// alpha = i (nu^2 - conj(nu)^2)/((tau^2 + nu^2)(tau^2 + conj(nu)^2)), real.
pub fn alpha_constant(nu: C64, tau: f64) -> C64 {
    let nb = nu.conj();
    let t2 = tau * tau;
    c(0.0, 1.0) * (nu * nu - nb * nb) / ((nu * nu + t2) * (nb * nb + t2))
}

/// The ratio w = zeta1/zeta2 of the second gauge step, built from
/// f = swap(conj(chi)): w = z (conj(nu) - nu |z|^2)/(conj(nu) |z|^2 - nu).
fn second_ratio(nu: C64, z: C64) -> C64 {
    let r2 = z.norm_sqr();
    let nb = nu.conj();
    z * (nb - nu * r2) / (nb * r2 - nu)
}

/// Unnormalized composite gauge matrix at lambda (the normalization is a
/// scalar and drops out of everything below).
pub fn double_gauge(lambda: C64, nu: C64, z: C64) -> M2 {
    let w = second_ratio(nu, z);
    let nb = nu.conj();
    let n2 = nu.norm_sqr();
    let l2 = lambda * lambda;
    M2::new(
        l2 + w / z * n2,
        -lambda * (nu * z + nb * w),
        -lambda * (nu / z + nb / w),
        l2 + z / w * n2,
    )
}

fn double_gauge_dlambda(lambda: C64, nu: C64, z: C64) -> M2 {
    let w = second_ratio(nu, z);
    let nb = nu.conj();
    M2::new(lambda * 2.0, -(nu * z + nb * w), -(nu / z + nb / w), lambda * 2.0)
}

/// Closed form of the double transformation in terms of z = -rho exp(-i beta)
/// (so beta is the single-transformation angle when rho = 1):
/// gamma2 = gamma + alpha (p T + q N + r B), kappa2 = kappa + kappa_shift.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoubleBtComponents {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub kappa_shift: f64,
}

pub fn double_bt_components(nu: C64, tau: f64, z: C64) -> Result<DoubleBtComponents> {
    let rho = z.norm();
    let beta = -(-z).arg();
    let nb = nu.conj();
    let r2 = rho * rho;
    let den = (nu - nb * r2) * (nb - nu * r2);
    if den.norm() < 1e-300 {
        return Err(Error::Singular { s: f64::NAN, detail: format!("denominator vanishes at z = {z}") });
    }
    let n2 = nu.norm_sqr();
    let t2 = tau * tau;
    let im_part = (nu - nb) / c(0.0, 2.0);
    let re_part = (nu + nb) * 0.5;
    let (cb, sb) = (beta.cos(), beta.sin());
    let a1 = im_part * (t2 + n2) * (1.0 + r2) * rho;
    let a2 = re_part * (t2 - n2) * (1.0 - r2) * rho;
    let p = -(a1 * cb + a2 * sb) * 2.0 / den;
    let q = (a2 * cb - a1 * sb) * 2.0 / den;
    let r = c(2.0 * tau * n2 * (r2 * r2 - 1.0), 0.0) / den;
    let ks = c(0.0, 1.0) * (nu * nu - nb * nb) * rho / den
        * ((nu + nb) * (r2 - 1.0) * cb + c(0.0, 1.0) * (nb - nu) * (r2 + 1.0) * sb);
    Ok(DoubleBtComponents { p: p.re, q: q.re, r: r.re, kappa_shift: ks.re })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DoubleBt {
    pub curve: SampledCurve,
    /// samples evaluated by interpolation because the formula is singular there
    pub flagged: Vec<usize>,
    /// largest imaginary part discarded when reading vectors off su(2)
    pub max_imag: f64,
    pub spec: DoubleBtSpec,
}

fn quad_interp(xs: [f64; 3], ys: [f64; 3], x: f64) -> f64 {
    let l = |i: usize, j: usize, k: usize| (x - xs[j]) * (x - xs[k]) / ((xs[i] - xs[j]) * (xs[i] - xs[k]));
    ys[0] * l(0, 1, 2) + ys[1] * l(1, 0, 2) + ys[2] * l(2, 0, 1)
}

/// gamma^(2) = gamma + i T^-1 dT/dlambda read in the frame of gamma, where T is
/// the composite gauge built from z = chi1/chi2; the new frame is
/// T^-1 E T. Samples where (nu - conj(nu) rho^2)(conj(nu) - nu rho^2) is
/// within 1e-8 of zero are filled in by quadratic interpolation.
pub fn double_bt(curve: &SampledCurve, spec: &DoubleBtSpec, chi: &SpectralSolution) -> Result<DoubleBt> {
    if chi.gauge != Gauge::Phi || chi.ratio.len() != curve.len() {
        return Err(Error::Input("need a phi-gauge solution on the curve grid".into()));
    }
    let tau = curve.samples[0].tau;
    let nu = spec.nu;
    let nb = nu.conj();
    let lam = c(0.0, -tau);
    let e = basis(Gauge::Phi);
    let n = curve.len();
    let mut out: Vec<Option<CurveSample>> = vec![None; n];
    let mut flagged = Vec::new();
    let mut max_imag: f64 = 0.0;
    for (i, (smp, &z)) in curve.samples.iter().zip(&chi.ratio).enumerate() {
        let r2 = z.norm_sqr();
        let den = (nu - nb * r2) * (nb - nu * r2);
        let scale = nu.norm_sqr() * (1.0 + r2) * (1.0 + r2);
        if nu.im == 0.0 {
            out[i] = Some(smp.clone());
            continue;
        }
        if den.norm() < 1e-8 * scale || !z.is_finite() || z.norm() == 0.0 {
            flagged.push(i);
            continue;
        }
        let g = double_gauge(lam, nu, z);
        let Some(gi) = g.try_inverse() else {
            flagged.push(i);
            continue;
        };
        let fr = smp.frame();
        let to_space = |v: nalgebra::Vector3<f64>| -> V3 { fr.transpose() * v };
        let (d, di) = coords(&(gi * double_gauge_dlambda(lam, nu, z) * c(0.0, 1.0)), Gauge::Phi);
        let mut rows = [V3::zeros(); 3];
        for k in 0..3 {
            let (v, vi) = coords(&(gi * e[k] * g), Gauge::Phi);
            max_imag = max_imag.max(vi.norm());
            rows[k] = to_space(v);
        }
        max_imag = max_imag.max(di.norm());
        let w = second_ratio(nu, z);
        let i1 = c(0.0, 1.0);
        let k2 = smp.kappa + (i1 * nu * (z - z.inv()) + i1 * nb * (w - w.inv())).re;
        out[i] = Some(CurveSample {
            s: smp.s,
            position: smp.position + to_space(d),
            tangent: rows[0],
            normal: rows[1],
            binormal: rows[2],
            kappa: k2,
            tau,
        });
    }
    let good: Vec<usize> = (0..n).filter(|&i| out[i].is_some()).collect();
    if good.len() < 3 && !flagged.is_empty() {
        return Err(Error::Singular { s: curve.samples[0].s, detail: "too few regular samples".into() });
    }
    for &i in &flagged {
        // three nearest regular samples
        let mut near: Vec<usize> = good.clone();
        near.sort_by_key(|&j| (j as isize - i as isize).unsigned_abs());
        let idx = [near[0], near[1], near[2]];
        if idx.iter().any(|&j| (j as isize - i as isize).unsigned_abs() > 4) {
            return Err(Error::Singular {
                s: curve.samples[i].s,
                detail: "singular stretch too long to interpolate".into(),
            });
        }
        let xs = idx.map(|j| curve.samples[j].s);
        let s = curve.samples[i].s;
        let get = |f: &dyn Fn(&CurveSample) -> f64| {
            quad_interp(xs, idx.map(|j| f(out[j].as_ref().unwrap())), s)
        };
        let v = |f: &dyn Fn(&CurveSample) -> V3| {
            V3::new(get(&|c| f(c).x), get(&|c| f(c).y), get(&|c| f(c).z))
        };
        let t = v(&|c| c.tangent).normalize();
        let nn = v(&|c| c.normal);
        let nn = (nn - t * t.dot(&nn)).normalize();
        out[i] = Some(CurveSample {
            s,
            position: v(&|c| c.position),
            tangent: t,
            normal: nn,
            binormal: t.cross(&nn),
            kappa: get(&|c| c.kappa),
            tau,
        });
    }
    let samples: Vec<CurveSample> = out.into_iter().map(|o| o.unwrap()).collect();
    let mut curve2 = SampledCurve { samples, closed: false, parity: curve.parity, length: curve.length };
    curve2.classify(1e-5);
    Ok(DoubleBt { curve: curve2, flagged, max_imag, spec: *spec })
}

/// Case B: chi = Phi(s) (omega, 1) at a double root. The curve is built over
/// the fewest traversals d (a divisor of the root's k) after which the
/// transfer matrix is already scalar, so it is never traced twice; d is
/// recorded in the output spec.
pub fn closed_double_bt(
    rod: &SampledCurve,
    params: &RodParams,
    root: &FloquetRoot,
    omega: C64,
) -> Result<DoubleBt> {
    let lam = compute_lambda(&params.modulus, root.sigma_root)?;
    let closes = |d: usize| {
        let kn = (d * params.n_periods) as f64;
        (lam * (kn * params.modulus.complete_k)).sin().norm()
    };
    let k = root.k_covers.max(1);
    let res = closes(k);
    if res > 1e-8 {
        return Err(Error::Input(format!("sigma = {} is not a closing root (residual {res:e})", root.sigma_root)));
    }
    if !omega.is_finite() {
        return Err(Error::Input("omega must be finite".into()));
    }
    let d = (1..=k).find(|d| k % d == 0 && closes(*d) < 1e-8).unwrap_or(k);
    let covered = rod.covers(d)?;
    let nu = root.sigma_root * c(0.0, -0.5);
    let grid = covered.arclengths();
    let kappa = |s: f64| params.kappa_at(s);
    let chi = riccati_solve(&kappa, nu, omega, &grid, 1)?;
    let spec = DoubleBtSpec::new(nu, covered.samples[0].tau, Some(omega), d);
    double_bt(&covered, &spec, &chi)
}

/// Case A: chi starts on the eigenvector v+ or v- of the transfer matrix at
/// nu; the result is the rod again, with curvature cn(x - a - conj(a)).
pub fn case_a_double_bt(rod: &SampledCurve, params: &RodParams, nu: C64, which: Branch) -> Result<DoubleBt> {
    let at_nu = params.with_sigma(nu * c(0.0, 2.0))?;
    let ev = eigenvectors_vpm(&at_nu);
    let v = match which {
        Branch::Plus => ev.phi_plus,
        Branch::Minus => ev.phi_minus,
    };
    let z0 = v[0] / v[1];
    let grid = rod.arclengths();
    let kappa = |s: f64| params.kappa_at(s);
    let chi = riccati_solve(&kappa, nu, z0, &grid, 1)?;
    let spec = DoubleBtSpec::new(nu, rod.samples[0].tau, None, 1);
    double_bt(rod, &spec, &chi)
}

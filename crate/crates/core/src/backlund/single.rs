use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::curves::{CurveSample, SampledCurve, V3};
use crate::error::{Error, Result};
use crate::rod::RodParams;
use crate::spectral::closed_form::{a_from_nu, beta_rod_closed_form};
use crate::spectral::riccati::{beta_solution, unwrap, SpectralSolution};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaSource {
    Ode,
    ClosedFormRod,
    EigenvectorVplus,
    EigenvectorVminus,
}

/// Which eigenvector of the rod transfer matrix starts beta.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingleBtSpec {
    #[serde(rename = "C")]
    pub c: f64,
    /// angle between old and new binormals, tan(theta/2) = C/tau
    pub theta_angle: f64,
    pub beta0: f64,
    pub source: BetaSource,
}

impl SingleBtSpec {
    pub fn new(c: f64, tau: f64, beta0: f64, source: BetaSource) -> Self {
        SingleBtSpec { c, theta_angle: 2.0 * c.atan2(tau), beta0, source }
    }
}

/// 2C/(C^2 + tau^2), the length of the displacement.
pub fn displacement_scale(c: f64, tau: f64) -> f64 {
    if c == 0.0 {
        0.0
    } else {
        2.0 * c / (c * c + tau * tau)
    }
}

fn constant_tau(curve: &SampledCurve) -> Result<f64> {
    let tau = curve.samples[0].tau;
    if curve.samples.iter().any(|c| (c.tau - tau).abs() > 1e-12 * (1.0 + tau.abs())) {
        return Err(Error::Input("the transformation needs constant torsion".into()));
    }
    Ok(tau)
}

fn check_alignment(curve: &SampledCurve, sol: &SpectralSolution) -> Result<()> {
    if sol.grid.len() != curve.len() {
        return Err(Error::Input(format!(
            "solution has {} points, curve has {}",
            sol.grid.len(),
            curve.len()
        )));
    }
    let tol = 1e-9 * (1.0 + curve.length);
    if sol.grid.iter().zip(&curve.samples).any(|(g, c)| (g - c.s).abs() > tol) {
        return Err(Error::Input("solution grid does not match the curve arclength".into()));
    }
    Ok(())
}

/// Per-unit-length defect of beta against one RK4 step of
/// dbeta/ds = C sin(beta) - kappa between consecutive samples.
pub fn beta_step_residual(kappa: &dyn Fn(f64) -> f64, c: f64, grid: &[f64], beta: &[f64]) -> f64 {
    let f = |s: f64, b: f64| c * b.sin() - kappa(s);
    grid.windows(2)
        .zip(beta.windows(2))
        .map(|(g, b)| {
            let h = g[1] - g[0];
            let k1 = f(g[0], b[0]);
            let k2 = f(g[0] + 0.5 * h, b[0] + 0.5 * h * k1);
            let k3 = f(g[0] + 0.5 * h, b[0] + 0.5 * h * k2);
            let k4 = f(g[1], b[0] + h * k3);
            let next = b[0] + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
            (next - b[1]).abs() / h
        })
        .fold(0.0, f64::max)
}

/// gamma + 2C/(C^2+tau^2) (cos beta T + sin beta N), with the rotated frame
/// and curvature kappa - 2C sin beta.
pub fn single_bt(curve: &SampledCurve, spec: &SingleBtSpec, beta: &SpectralSolution) -> Result<SampledCurve> {
    check_alignment(curve, beta)?;
    let tau = constant_tau(curve)?;
    let b = beta
        .beta
        .as_ref()
        .ok_or_else(|| Error::Input("solution carries no real angle beta".into()))?;
    let kappa = curve.kappa_interpolant();
    let res = beta_step_residual(&kappa, spec.c, &beta.grid, b);
    if res > 1e-7 {
        return Err(Error::Input(format!("beta does not solve the angle equation (residual {res:e})")));
    }
    let d = displacement_scale(spec.c, tau);
    let th = 2.0 * spec.c.atan2(tau);
    let (ct, st) = (th.cos(), th.sin());
    let samples = curve
        .samples
        .iter()
        .zip(b)
        .map(|(c, &bb)| {
            let (cb, sb) = (bb.cos(), bb.sin());
            let (t, n, bn) = (c.tangent, c.normal, c.binormal);
            let u: V3 = n * cb - t * sb;
            CurveSample {
                s: c.s,
                position: c.position + (t * cb + n * sb) * d,
                tangent: t + u * ((1.0 - ct) * sb) + bn * (st * sb),
                normal: n - u * ((1.0 - ct) * cb) - bn * (st * cb),
                binormal: bn * ct + u * st,
                kappa: c.kappa - 2.0 * spec.c * sb,
                tau,
            }
        })
        .collect();
    let mut out = SampledCurve { samples, closed: false, parity: curve.parity, length: curve.length };
    out.classify(1e-6);
    Ok(out)
}

/// Nonlinear superposition: from solutions beta1, beta2 at C1, C2 on the same
/// curve, beta12 solves the angle equation on the C1-transform at C2 and
/// beta21 the one on the C2-transform at C1; beta12 - beta1 = beta21 - beta2.
/// At C1 = C2 the limit is beta + pi.
pub fn superpose(
    beta1: &SpectralSolution,
    beta2: &SpectralSolution,
    c1: f64,
    c2: f64,
) -> Result<(SpectralSolution, SpectralSolution)> {
    let (Some(b1), Some(b2)) = (beta1.beta.as_ref(), beta2.beta.as_ref()) else {
        return Err(Error::Input("superposition needs real angles".into()));
    };
    if beta1.grid != beta2.grid {
        return Err(Error::Input("solutions live on different grids".into()));
    }
    let inc: Vec<f64> = if c1 == c2 {
        vec![PI; b1.len()]
    } else {
        let k = (c1 + c2) / (c1 - c2);
        let mut v: Vec<f64> = b1
            .iter()
            .zip(b2)
            .map(|(x, y)| {
                let phi = 0.5 * (x - y);
                2.0 * (k * phi.sin()).atan2(phi.cos())
            })
            .collect();
        unwrap(&mut v);
        v
    };
    let b12 = b1.iter().zip(&inc).map(|(b, d)| b + d).collect();
    let b21 = b2.iter().zip(&inc).map(|(b, d)| b + d).collect();
    Ok((beta_solution(beta1.grid.clone(), b12), beta_solution(beta1.grid.clone(), b21)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosedSingleBt {
    pub curve: SampledCurve,
    /// shift with transformed curvature cn(x - a)
    pub a: f64,
    pub beta: SpectralSolution,
    pub spec: SingleBtSpec,
}

/// The closed transformation of a rod whose beta starts on an eigenvector of
/// the transfer matrix: beta = c1 - [asin(p sn x) + asin(p sn(x - a))] with
/// (a, c1) = (a+, 0) for v+ and (-a+, pi) for v-.
pub fn closed_single_bt_rod(
    rod: &SampledCurve,
    params: &RodParams,
    c: f64,
    which: Branch,
) -> Result<ClosedSingleBt> {
    if c == 0.0 {
        return Err(Error::Input("C = 0 is the identity".into()));
    }
    let a_plus = a_from_nu(params, C64::new(c, 0.0))?.re;
    let (a, c1, source) = match which {
        Branch::Plus => (a_plus, 0.0, BetaSource::EigenvectorVplus),
        Branch::Minus => (-a_plus, PI, BetaSource::EigenvectorVminus),
    };
    let p = params.p();
    let grid = rod.arclengths();
    let beta: Vec<f64> = grid
        .iter()
        .map(|s| beta_rod_closed_form(params, a, s / (2.0 * p), c1))
        .collect();
    let sol = beta_solution(grid, beta);
    let spec = SingleBtSpec::new(c, rod.samples[0].tau, sol.beta.as_ref().unwrap()[0], source);
    let curve = single_bt(rod, &spec, &sol)?;
    Ok(ClosedSingleBt { curve, a, beta: sol, spec })
}

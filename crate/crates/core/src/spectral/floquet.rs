//! Complex sigma at which every solution of the linear system closes up
//! after k traversals of the rod: the zeros of sin(k n K Lambda(sigma)).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::linear::{c, M2};
use crate::elliptic::{make_modulus, EllipticModulus};
use crate::error::{Error, Result};
use crate::rod::{compute_lambda, lambda_near, period_monodromy, MU_RING};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchBox {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl SearchBox {
    pub fn contains(&self, z: C64) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im >= self.im_min && z.im <= self.im_max
    }

    fn grown(&self, f: f64) -> SearchBox {
        let dr = f * (self.re_max - self.re_min);
        let di = f * (self.im_max - self.im_min);
        SearchBox {
            re_min: self.re_min - dr,
            re_max: self.re_max + dr,
            im_min: self.im_min - di,
            im_max: self.im_max + di,
        }
    }
}

impl Default for SearchBox {
    /// First quadrant away from the real axis, where the physical
    /// (real sigma) closures live.
    fn default() -> Self {
        SearchBox { re_min: 0.0, re_max: 2.5, im_min: 0.2, im_max: 2.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootKind {
    /// transfer matrix over k traversals is +-identity (up to the twist)
    DoubleRootIdentityTransfer,
    EigenvectorCase,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FloquetRoot {
    pub sigma_root: C64,
    pub k_covers: usize,
    pub n_periods: usize,
    /// |sin(k n K Lambda)|
    pub residual: f64,
    pub kind: RootKind,
    /// not already a root for a proper divisor of k
    pub new_at_k: bool,
}

/// Flat record for export.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootRecord {
    pub p: f64,
    pub n: usize,
    pub k: usize,
    pub sigma_re: f64,
    pub sigma_im: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootSearch {
    pub p: f64,
    pub roots: Vec<FloquetRoot>,
    pub seeds: usize,
    /// seeds whose Newton iteration met the residual bound
    pub converged: usize,
    pub diagnostics: Vec<String>,
}

impl RootSearch {
    pub fn records(&self) -> Vec<RootRecord> {
        self.roots
            .iter()
            .map(|r| RootRecord {
                p: self.p,
                n: r.n_periods,
                k: r.k_covers,
                sigma_re: r.sigma_root.re,
                sigma_im: r.sigma_root.im,
                residual: r.residual,
            })
            .collect()
    }
}

const RESIDUAL: f64 = 1e-10;
const DEDUP: f64 = 1e-6;

fn mu_of(p: f64, sigma: C64) -> C64 {
    let pm2 = 1.0 / (p * p);
    let s2 = sigma * sigma;
    ((pm2 - s2) * (pm2 - s2) + s2 * 4.0).sqrt() * 0.25
}

/// Newton on sin(N K Lambda) from `seed`, following one sheet of Lambda.
fn newton(m: &EllipticModulus, big_n: f64, seed: C64, bounds: &SearchBox) -> Option<(C64, f64)> {
    let kk = m.complete_k;
    let mut lam = compute_lambda(m, seed).ok()?;
    let mut z = seed;
    for _ in 0..60 {
        let g = (lam * (big_n * kk)).sin();
        if g.norm() < 1e-14 {
            break;
        }
        let h = 1e-6;
        let lp = lambda_near(m, z + h, lam).ok()?;
        let lm = lambda_near(m, z - h, lam).ok()?;
        let dl = (lp - lm) / (2.0 * h);
        let dg = (lam * (big_n * kk)).cos() * dl * (big_n * kk);
        if dg.norm() < 1e-300 {
            return None;
        }
        let mut step = g / dg;
        if step.norm() > 0.2 {
            step *= 0.2 / step.norm();
        }
        let next = z - step;
        if !bounds.contains(next) || mu_of(m.p, next).norm() < 1e3 * MU_RING {
            return None;
        }
        lam = lambda_near(m, next, lam).ok()?;
        z = next;
        if step.norm() < 1e-15 * (1.0 + z.norm()) {
            break;
        }
    }
    // nearest-candidate tracking can drift onto a spurious sheet of the
    // zeta formula; confirm with the monodromy-selected Lambda
    let lam = compute_lambda(m, z).ok()?;
    let res = (lam * (big_n * kk)).sin().norm();
    (res < RESIDUAL).then_some((z, res))
}

/// Whether the transfer matrix over k traversals (twisted for odd kn) is a
/// multiple of the identity.
pub fn classify(m: &EllipticModulus, sigma: C64, kn: usize, steps: usize) -> RootKind {
    let mono = period_monodromy(m, sigma, steps);
    let mut t = M2::identity();
    for _ in 0..kn {
        t *= mono;
    }
    let scalar = t.trace() * 0.5;
    let off = (t - M2::identity() * scalar).norm();
    let unit = (scalar.norm() - 1.0).abs();
    if off < 1e-8 * (1.0 + t.norm()) && unit < 1e-6 {
        RootKind::DoubleRootIdentityTransfer
    } else {
        RootKind::EigenvectorCase
    }
}

fn is_new(m: &EllipticModulus, sigma: C64, n: usize, k: usize) -> bool {
    let Ok(lam) = compute_lambda(m, sigma) else { return true };
    (1..k)
        .filter(|d| k % d == 0)
        .all(|d| (lam * ((d * n) as f64 * m.complete_k)).sin().norm() > 1e-6)
}

/// Zeros of sin(k n K Lambda(sigma)) inside `bounds`, found by Newton's
/// method from a 20 x 20 seed grid plus seeds around p'/p + i. The points
/// sigma = p'/p +- i (mu = 0) are excluded.
pub fn find_floquet_roots(p: f64, n: usize, k: usize, bounds: &SearchBox) -> Result<RootSearch> {
    if n == 0 || k == 0 {
        return Err(Error::Input("n and k must be positive".into()));
    }
    if !(bounds.re_min < bounds.re_max && bounds.im_min < bounds.im_max) {
        return Err(Error::Input("empty search box".into()));
    }
    let m = make_modulus(p)?;
    let big_n = (k * n) as f64;
    let mut seeds = Vec::with_capacity(420);
    for i in 0..20 {
        for j in 0..20 {
            let re = bounds.re_min + (i as f64 + 0.5) / 20.0 * (bounds.re_max - bounds.re_min);
            let im = bounds.im_min + (j as f64 + 0.5) / 20.0 * (bounds.im_max - bounds.im_min);
            seeds.push(c(re, im));
        }
    }
    let center = c(m.p_prime / p, 1.0);
    for r in [0.03, 0.08, 0.15] {
        for j in 0..8 {
            let a = std::f64::consts::PI * (j as f64 + 0.5) / 4.0;
            seeds.push(center + c(r * a.cos(), r * a.sin()));
        }
    }
    let outer = bounds.grown(0.25);
    let hits: Vec<(C64, f64)> = seeds
        .par_iter()
        .filter_map(|&s| newton(&m, big_n, s, &outer))
        .collect();
    let converged = hits.len();
    let mut roots: Vec<(C64, f64)> = Vec::new();
    for (z, res) in hits {
        if !bounds.contains(z) || (z - center).norm() < 1e-4 {
            continue;
        }
        match roots.iter_mut().find(|(w, _)| (*w - z).norm() < DEDUP) {
            Some(slot) if res < slot.1 => *slot = (z, res),
            Some(_) => {}
            None => roots.push((z, res)),
        }
    }
    roots.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    let kn = k * n;
    let out: Vec<FloquetRoot> = roots
        .par_iter()
        .map(|&(z, res)| FloquetRoot {
            sigma_root: z,
            k_covers: k,
            n_periods: n,
            residual: res,
            kind: classify(&m, z, kn, 4000),
            new_at_k: is_new(&m, z, n, k),
        })
        .collect();
    let mut diagnostics = Vec::new();
    if out.is_empty() {
        diagnostics.push(format!(
            "{} of {} seeds converged; none inside the box after excluding mu = 0",
            converged,
            seeds.len()
        ));
    }
    Ok(RootSearch { p, roots: out, seeds: seeds.len(), converged, diagnostics })
}

/// Newton from a single seed (a root read off a figure, say).
pub fn refine_floquet_root(p: f64, n: usize, k: usize, seed: C64) -> Result<FloquetRoot> {
    if n == 0 || k == 0 {
        return Err(Error::Input("n and k must be positive".into()));
    }
    let m = make_modulus(p)?;
    let r = seed.norm().max(1.0);
    let bounds = SearchBox { re_min: seed.re - r, re_max: seed.re + r, im_min: seed.im - r, im_max: seed.im + r };
    let (z, res) = newton(&m, (k * n) as f64, seed, &bounds)
        .ok_or_else(|| Error::Numeric(format!("Newton did not converge from sigma = {seed}")))?;
    Ok(FloquetRoot {
        sigma_root: z,
        k_covers: k,
        n_periods: n,
        residual: res,
        kind: classify(&m, z, k * n, 4000),
        new_at_k: is_new(&m, z, n, k),
    })
}

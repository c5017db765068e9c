//! Writhe, self-linking, Gauss linking, self-distance, projected crossings
//! and the order-1 Killing-field residual of sampled closed curves.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::backlund::{closed_single_bt_rod, displacement_scale, Branch};
use crate::curves::{closure_defect, ClosureDefect, Parity, SampledCurve, V3};
use crate::error::{Error, Result};
use crate::rod::RodParams;

/// Sample pairs within this cyclic index distance are skipped in Gauss sums.
pub const BAND: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelfDistance {
    pub distance: f64,
    pub pair: (usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossingRecord {
    pub count: usize,
    pub positive: usize,
    pub negative: usize,
    pub all_same_sign: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectionCrossings {
    pub direction: [f64; 3],
    pub record: CrossingRecord,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkingCheck {
    pub lk: f64,
    pub sl: f64,
    pub n: usize,
    /// |lk - (sl - n/2)|
    pub residual: f64,
    /// the displacement is not small against the rod's self-distance
    pub inconclusive: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KillingResidual {
    /// sup |a0 kappa - a1 (kappa'' + kappa^3/2)| for the given coefficients
    pub residual: f64,
    /// best (a0, a1) with a0^2 + a1^2 = 1, and its residual
    pub best: (f64, f64),
    pub best_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantsReport {
    pub writhe: f64,
    pub total_torsion_over_2pi: f64,
    pub self_linking: f64,
    pub linking: Option<f64>,
    pub min_self_distance: f64,
    pub min_self_distance_pair: (usize, usize),
    pub closure_defect: ClosureDefect,
    pub crossing_count: Option<Vec<DirectionCrossings>>,
}

fn require_closed(curve: &SampledCurve) -> Result<Vec<V3>> {
    if !curve.closed {
        return Err(Error::Input("invariant needs a closed curve".into()));
    }
    let pts = curve.loop_positions();
    if pts.len() < 2 * BAND + 3 {
        return Err(Error::Input("too few samples".into()));
    }
    Ok(pts)
}

fn cyclic_gap(i: usize, j: usize, n: usize) -> usize {
    let d = i.abs_diff(j);
    d.min(n - d)
}

/// Segment midpoints and edge vectors of the closed polygon.
fn edges(pts: &[V3]) -> (Vec<V3>, Vec<V3>) {
    let n = pts.len();
    (0..n)
        .map(|i| {
            let (a, b) = (pts[i], pts[(i + 1) % n]);
            ((a + b) * 0.5, b - a)
        })
        .unzip()
}

fn gauss_term(mi: &V3, di: &V3, mj: &V3, dj: &V3) -> f64 {
    let r = mi - mj;
    let d = r.norm();
    di.cross(dj).dot(&r) / (d * d * d)
}

/// Minimum distance between points of different strands: over pairs outside
/// the adjacency band where the distance is critical in the second index,
/// refined with segment-to-segment distances around each such pair. For a
/// round circle this is the diameter.
pub fn min_self_distance(curve: &SampledCurve) -> Result<SelfDistance> {
    let pts = require_closed(curve)?;
    let n = pts.len();
    let tangents: Vec<V3> = (0..n).map(|j| pts[(j + 1) % n] - pts[(j + n - 1) % n]).collect();
    let seg = |i: usize, j: usize| {
        segment_distance(&pts[i % n], &pts[(i + 1) % n], &pts[j % n], &pts[(j + 1) % n])
    };
    let best = (0..n)
        .into_par_iter()
        .map(|i| {
            let g = |j: usize| (pts[j] - pts[i]).dot(&tangents[j]);
            let mut best = (f64::INFINITY, (i, i));
            for j in 0..n {
                let k = (j + 1) % n;
                if cyclic_gap(i, j, n) <= BAND + 1 || cyclic_gap(i, k, n) <= BAND + 1 {
                    continue;
                }
                if g(j) * g(k) <= 0.0 {
                    for a in [i + n - 1, i + n] {
                        for b in [j + n - 1, j + n, j + n + 1] {
                            let d = seg(a, b);
                            if d < best.0 {
                                best = (d, (a % n, b % n));
                            }
                        }
                    }
                }
            }
            best
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold((f64::INFINITY, (0, 0)), |a, b| if b.0 < a.0 { b } else { a });
    if !best.0.is_finite() {
        return Err(Error::Numeric("no critical chord found".into()));
    }
    Ok(SelfDistance { distance: best.0, pair: best.1 })
}

fn check_embedded(curve: &SampledCurve) -> Result<()> {
    let d = min_self_distance(curve)?;
    if d.distance < 0.5 * curve.step() {
        return Err(Error::SelfIntersection { i: d.pair.0, j: d.pair.1, distance: d.distance });
    }
    Ok(())
}

/// Gauss double integral by the midpoint rule with the diagonal band
/// |i - j| <= 2 (cyclic) left out.
pub fn writhe(curve: &SampledCurve) -> Result<f64> {
    let pts = require_closed(curve)?;
    check_embedded(curve)?;
    let n = pts.len();
    let (mid, d) = edges(&pts);
    let sum: f64 = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .filter(|&j| cyclic_gap(i, j, n) > BAND)
                .map(|j| gauss_term(&mid[i], &d[i], &mid[j], &d[j]))
                .sum::<f64>()
        })
        .collect::<Vec<f64>>()
        .iter()
        .sum();
    Ok(sum / (4.0 * PI))
}

/// (1/2 pi) times the integral of the torsion, trapezoidal.
pub fn total_torsion_over_2pi(curve: &SampledCurve) -> f64 {
    let integral: f64 = curve
        .samples
        .windows(2)
        .map(|w| 0.5 * (w[0].tau + w[1].tau) * (w[1].s - w[0].s))
        .sum();
    integral / (2.0 * PI)
}

/// Wr + (1/2 pi) int tau ds.
pub fn self_linking(curve: &SampledCurve) -> Result<f64> {
    Ok(writhe(curve)? + total_torsion_over_2pi(curve))
}

/// Gauss integral over a pair of straight segments, in closed form: the
/// signed solid angle swept, over 4 pi.
fn segment_pair_gauss(p1: &V3, p2: &V3, p3: &V3, p4: &V3) -> f64 {
    let (r13, r14, r23, r24) = (p3 - p1, p4 - p1, p3 - p2, p4 - p2);
    let unit = |v: V3| {
        let n = v.norm();
        if n > 0.0 { v / n } else { v }
    };
    let n = [unit(r13.cross(&r14)), unit(r14.cross(&r24)), unit(r24.cross(&r23)), unit(r23.cross(&r13))];
    let omega: f64 = (0..4).map(|k| n[k].dot(&n[(k + 1) % 4]).clamp(-1.0, 1.0).asin()).sum();
    let sign = (p4 - p3).cross(&(p2 - p1)).dot(&r13);
    if sign == 0.0 {
        0.0
    } else {
        omega.copysign(sign) / (4.0 * PI)
    }
}

/// Gauss linking integral of two disjoint closed curves, evaluated exactly
/// on the sampled polygons (closed form per segment pair), so the result is
/// the polygons' linking number up to rounding even when the curves come
/// within a few sample spacings of each other.
pub fn linking(a: &SampledCurve, b: &SampledCurve) -> Result<f64> {
    let pa = require_closed(a)?;
    let pb = require_closed(b)?;
    let (na, nb) = (pa.len(), pb.len());
    let (sum, closest) = (0..na)
        .into_par_iter()
        .map(|i| {
            let (p1, p2) = (pa[i], pa[(i + 1) % na]);
            let mut s = 0.0;
            let mut close = f64::INFINITY;
            for j in 0..nb {
                let (p3, p4) = (pb[j], pb[(j + 1) % nb]);
                close = close.min(segment_distance(&p1, &p2, &p3, &p4));
                s += segment_pair_gauss(&p1, &p2, &p3, &p4);
            }
            (s, close)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold((0.0, f64::INFINITY), |x, y| (x.0 + y.0, x.1.min(y.1)));
    if closest < 1e-12 * (a.length + b.length) {
        return Err(Error::Input(format!("curves intersect (distance {closest:e})")));
    }
    Ok(sum)
}

/// Distance between segments [p1, p2] and [p3, p4].
fn segment_distance(p1: &V3, p2: &V3, p3: &V3, p4: &V3) -> f64 {
    let (d1, d2, r) = (p2 - p1, p4 - p3, p1 - p3);
    let (a, e, f) = (d1.dot(&d1), d2.dot(&d2), d2.dot(&r));
    let c = d1.dot(&r);
    let b = d1.dot(&d2);
    let den = a * e - b * b;
    let mut s = if den > 1e-300 { ((b * f - c * e) / den).clamp(0.0, 1.0) } else { 0.0 };
    let mut t = (b * s + f) / e;
    if t < 0.0 {
        t = 0.0;
        s = (-c / a).clamp(0.0, 1.0);
    } else if t > 1.0 {
        t = 1.0;
        s = ((b - c) / a).clamp(0.0, 1.0);
    }
    (p1 + d1 * s - (p3 + d2 * t)).norm()
}

/// Checks Lk(rod, rod~) = SL(rod) - n/2 for the closed single transform at C
/// with n the number of 2K periods.
pub fn verify_linking_theorem(rod: &SampledCurve, params: &RodParams, c: f64, which: Branch) -> Result<LinkingCheck> {
    let msd = min_self_distance(rod)?.distance;
    let tau = rod.samples[0].tau;
    let inconclusive = displacement_scale(c, tau).abs() >= 0.25 * msd;
    let bt = closed_single_bt_rod(rod, params, c, which)?;
    let lk = linking(rod, &bt.curve)?;
    let sl = self_linking(rod)?;
    let n = params.n_periods;
    Ok(LinkingCheck { lk, sl, n, residual: (lk - (sl - 0.5 * n as f64)).abs(), inconclusive })
}

fn orthonormal_pair(d: &V3) -> (V3, V3) {
    let helper = if d.x.abs() < 0.9 { V3::x() } else { V3::y() };
    let e1 = d.cross(&helper).normalize();
    (e1, d.cross(&e1))
}

enum Projection {
    Counted(CrossingRecord),
    Degenerate,
}

fn count_once(pts: &[V3], d: &V3) -> Projection {
    let n = pts.len();
    let (e1, e2) = orthonormal_pair(d);
    let q: Vec<(f64, f64)> = pts.iter().map(|p| (p.dot(&e1), p.dot(&e2))).collect();
    let h: Vec<f64> = pts.iter().map(|p| p.dot(d)).collect();
    let eps = 1e-10;
    let results: Vec<Option<(usize, usize)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let (a0, a1) = (q[i], q[(i + 1) % n]);
            let (mut pos, mut neg) = (0, 0);
            for j in i + 2..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                let (b0, b1) = (q[j], q[(j + 1) % n]);
                let r = (a1.0 - a0.0, a1.1 - a0.1);
                let s = (b1.0 - b0.0, b1.1 - b0.1);
                let den = r.0 * s.1 - r.1 * s.0;
                let w = (b0.0 - a0.0, b0.1 - a0.1);
                if den.abs() < 1e-14 {
                    // parallel: degenerate only if collinear and overlapping
                    let cross = w.0 * r.1 - w.1 * r.0;
                    if cross.abs() < 1e-14 {
                        let rr = r.0 * r.0 + r.1 * r.1;
                        let t0 = (w.0 * r.0 + w.1 * r.1) / rr;
                        let t1 = t0 + (s.0 * r.0 + s.1 * r.1) / rr;
                        if t0.max(t1) >= 0.0 && t0.min(t1) <= 1.0 {
                            return None;
                        }
                    }
                    continue;
                }
                let t = (w.0 * s.1 - w.1 * s.0) / den;
                let u = (w.0 * r.1 - w.1 * r.0) / den;
                if t < -eps || t > 1.0 + eps || u < -eps || u > 1.0 + eps {
                    continue;
                }
                if t.abs() < eps || (t - 1.0).abs() < eps || u.abs() < eps || (u - 1.0).abs() < eps {
                    return None;
                }
                let ha = h[i] + t * (h[(i + 1) % n] - h[i]);
                let hb = h[j] + u * (h[(j + 1) % n] - h[j]);
                if (ha - hb).abs() < 1e-12 {
                    return None;
                }
                // right-handed crossing: (T_over x T_under) . d > 0
                let (over, under) = if ha > hb { (r, s) } else { (s, r) };
                if over.0 * under.1 - over.1 * under.0 > 0.0 {
                    pos += 1;
                } else {
                    neg += 1;
                }
            }
            Some((pos, neg))
        })
        .collect();
    let mut pos = 0;
    let mut neg = 0;
    for r in results {
        match r {
            Some((p, m)) => {
                pos += p;
                neg += m;
            }
            None => return Projection::Degenerate,
        }
    }
    Projection::Counted(CrossingRecord {
        count: pos + neg,
        positive: pos,
        negative: neg,
        all_same_sign: pos == 0 || neg == 0,
    })
}

/// Transversal double points of the projection along `direction`, with
/// signs. Degenerate projections are retried with small deterministic
/// perturbations of the direction, at most five times.
pub fn crossing_count(curve: &SampledCurve, direction: &V3) -> Result<CrossingRecord> {
    let pts = require_closed(curve)?;
    if !(direction.norm() > 0.0) {
        return Err(Error::Input("projection direction must be nonzero".into()));
    }
    let mut d = direction.normalize();
    let (e1, e2) = orthonormal_pair(&d);
    for attempt in 0..=5 {
        if let Projection::Counted(r) = count_once(&pts, &d) {
            return Ok(r);
        }
        let a = 1e-4 * (1u32 << attempt) as f64;
        d = (d + e1 * a + e2 * (0.5 * a)).normalize();
    }
    Err(Error::Numeric("projection stays degenerate after 5 perturbations".into()))
}

/// The 26 directions of the 3 x 3 x 3 grid on the sphere.
pub fn sphere_directions() -> Vec<V3> {
    let mut out = Vec::with_capacity(26);
    for a in -1..=1 {
        for b in -1..=1 {
            for c in -1..=1 {
                if (a, b, c) != (0, 0, 0) {
                    out.push(V3::new(a as f64, b as f64, c as f64).normalize());
                }
            }
        }
    }
    out
}

pub fn crossings_over_sphere(curve: &SampledCurve) -> Result<Vec<DirectionCrossings>> {
    sphere_directions()
        .iter()
        .map(|d| {
            Ok(DirectionCrossings { direction: [d.x, d.y, d.z], record: crossing_count(curve, d)? })
        })
        .collect()
}

/// Curvature on the sample grid, extended across the seam of a closed curve
/// (with the sign flip of odd curves).
fn kappa_second_derivative(curve: &SampledCurve) -> Vec<(f64, f64)> {
    let h = curve.step();
    let k: Vec<f64> = curve.samples.iter().map(|c| c.kappa).collect();
    let m = if curve.closed { k.len() - 1 } else { k.len() };
    let at = |i: isize| -> Option<f64> {
        if curve.closed {
            let wraps = i.div_euclid(m as isize);
            let sign = if curve.parity == Parity::Odd && wraps % 2 != 0 { -1.0 } else { 1.0 };
            Some(sign * k[i.rem_euclid(m as isize) as usize])
        } else if i >= 0 && (i as usize) < m {
            Some(k[i as usize])
        } else {
            None
        }
    };
    (0..m as isize)
        .filter_map(|i| {
            let v = [at(i - 2)?, at(i - 1)?, at(i)?, at(i + 1)?, at(i + 2)?];
            let d2 = (-v[0] + 16.0 * v[1] - 30.0 * v[2] + 16.0 * v[3] - v[4]) / (12.0 * h * h);
            Some((v[2], d2))
        })
        .collect()
}

/// sup |a0 B0 + a1 B1| with B0 = kappa B and B1 = -(kappa'' + kappa^3/2) B,
/// plus the best-fit direction (a0 : a1).
pub fn killing_residual_order1(curve: &SampledCurve, a0: f64, a1: f64) -> Result<KillingResidual> {
    let tau = curve.samples[0].tau;
    if curve.samples.iter().any(|c| (c.tau - tau).abs() > 1e-12 * (1.0 + tau.abs())) {
        return Err(Error::Input("Killing residual needs constant torsion".into()));
    }
    let f: Vec<(f64, f64)> = kappa_second_derivative(curve)
        .into_iter()
        .map(|(k, d2)| (k, -(d2 + 0.5 * k * k * k)))
        .collect();
    if f.len() < 3 {
        return Err(Error::Input("too few samples".into()));
    }
    let sup = |a: f64, b: f64| f.iter().map(|(x, y)| (a * x + b * y).abs()).fold(0.0, f64::max);
    // smallest eigenvector of the 2x2 Gram matrix
    let (mut g00, mut g01, mut g11) = (0.0, 0.0, 0.0);
    for (x, y) in &f {
        g00 += x * x;
        g01 += x * y;
        g11 += y * y;
    }
    let tr = g00 + g11;
    let disc = ((g00 - g11).powi(2) + 4.0 * g01 * g01).sqrt();
    let lmin = 0.5 * (tr - disc);
    let (bx, by) = if g01.abs() > 1e-300 {
        (g01, lmin - g00)
    } else if g00 <= g11 {
        (1.0, 0.0)
    } else {
        (0.0, 1.0)
    };
    let nrm = bx.hypot(by);
    let best = (bx / nrm, by / nrm);
    Ok(KillingResidual { residual: sup(a0, a1), best, best_residual: sup(best.0, best.1) })
}

/// Everything for one curve; `pair` adds the Gauss linking with a second
/// curve and `crossings` the 26-direction crossing survey.
pub fn report(curve: &SampledCurve, pair: Option<&SampledCurve>, crossings: bool) -> Result<InvariantsReport> {
    let msd = min_self_distance(curve)?;
    let wr = writhe(curve)?;
    let tt = total_torsion_over_2pi(curve);
    Ok(InvariantsReport {
        writhe: wr,
        total_torsion_over_2pi: tt,
        self_linking: wr + tt,
        linking: pair.map(|b| linking(curve, b)).transpose()?,
        min_self_distance: msd.distance,
        min_self_distance_pair: msd.pair,
        closure_defect: closure_defect(curve),
        crossing_count: if crossings { Some(crossings_over_sphere(curve)?) } else { None },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::{integrate_frenet, CurveSample};
    use crate::rod::{find_torus_rod, rod_curve};

    fn circle(r: f64, centre: V3, n: usize, axis_z: bool) -> SampledCurve {
        let len = 2.0 * PI * r;
        let samples = (0..=n)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / n as f64;
                let (s, c) = t.sin_cos();
                let (pos, tan, nor) = if axis_z {
                    (V3::new(r * c, r * s, 0.0), V3::new(-s, c, 0.0), V3::new(-c, -s, 0.0))
                } else {
                    (V3::new(r * c, 0.0, r * s), V3::new(-s, 0.0, c), V3::new(-c, 0.0, -s))
                };
                CurveSample {
                    s: r * t,
                    position: centre + pos,
                    tangent: tan,
                    normal: nor,
                    binormal: tan.cross(&nor),
                    kappa: 1.0 / r,
                    tau: 0.0,
                }
            })
            .collect();
        let mut c = SampledCurve::from_samples(samples, 1e-9).unwrap();
        c.length = len;
        c
    }

    #[test]
    fn circle_basics() {
        let c = circle(1.5, V3::zeros(), 400, true);
        assert!(writhe(&c).unwrap().abs() < 1e-12);
        assert!(self_linking(&c).unwrap().abs() < 1e-12);
        let d = min_self_distance(&c).unwrap();
        assert!((d.distance - 3.0).abs() < 1e-3, "{d:?}");
        let r = crossing_count(&c, &V3::new(0.3, 0.2, 1.0)).unwrap();
        assert_eq!(r.count, 0);
    }

    #[test]
    fn hopf_pair() {
        let a = circle(1.0, V3::zeros(), 600, true);
        let b = circle(1.0, V3::new(1.0, 0.0, 0.0), 600, false);
        let lk = linking(&a, &b).unwrap();
        assert!((lk.abs() - 1.0).abs() < 1e-3, "{lk}");
        let far = circle(1.0, V3::new(5.0, 0.0, 0.0), 600, false);
        assert!(linking(&a, &far).unwrap().abs() < 1e-6);
        // rigid motion of both
        let rot = nalgebra::Rotation3::from_euler_angles(0.3, -0.7, 1.1).into_inner();
        let sh = V3::new(0.2, 3.0, -1.0);
        let lk2 = linking(&a.rigid_motion(&rot, &sh), &b.rigid_motion(&rot, &sh)).unwrap();
        assert!((lk - lk2).abs() < 1e-10);
    }

    #[test]
    fn rod_self_linking_is_quantized() {
        let params = find_torus_rod(2, 5, 1e-12).unwrap();
        let rod = rod_curve(&params, 5, 400).unwrap();
        let sl = self_linking(&rod).unwrap();
        // n = 5 is odd: half-integer
        assert!(((sl - 0.5).round() - (sl - 0.5)).abs() < 0.02, "{sl}");
        let wr = writhe(&rod).unwrap();
        assert!((writhe(&rod.reflected()).unwrap() + wr).abs() < 1e-9);
        let rec = crossing_count(&rod, &V3::new(0.05, 0.03, 1.0)).unwrap();
        assert!(rec.count >= 5, "{rec:?}");
    }

    #[test]
    fn helix_killing() {
        let k0 = 0.7;
        let h = integrate_frenet(&|_| k0, 0.4, 10.0, 1000).unwrap();
        let r = killing_residual_order1(&h, k0 * k0 / 2.0, 1.0).unwrap();
        assert!(r.residual < 1e-12);
        assert!(r.best_residual < 1e-12);
        assert!((r.best.0 / r.best.1 - k0 * k0 / 2.0).abs() < 1e-9);
    }

    #[test]
    fn rod_killing_and_control() {
        let params = find_torus_rod(1, 3, 1e-12).unwrap();
        let rod = rod_curve(&params, 3, 1000).unwrap();
        assert!(killing_residual_order1(&rod, 0.0, 0.0).unwrap().best_residual < 1e-4);
        let mut pert = rod.clone();
        for s in pert.samples.iter_mut() {
            s.kappa *= 1.0 + 0.01 * (2.0 * PI * 7.0 * s.s / rod.length).sin();
        }
        assert!(killing_residual_order1(&pert, 0.0, 0.0).unwrap().best_residual > 1e-2);
    }
}

//! Arclength-sampled space curves with generalized Frenet frames.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type V3 = Vector3<f64>;

/// Whether the frame returns to itself after one circuit (even) or comes
/// back with N, B and the curvature negated (odd).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveSample {
    pub s: f64,
    pub position: V3,
    pub tangent: V3,
    pub normal: V3,
    pub binormal: V3,
    pub kappa: f64,
    pub tau: f64,
}

/// Samples run from s = 0 to s = length inclusive; for a closed curve the
/// last sample repeats the first point.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledCurve {
    pub samples: Vec<CurveSample>,
    pub closed: bool,
    pub parity: Parity,
    pub length: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosureDefect {
    pub position_gap: f64,
    pub frame_gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeometryEstimate {
    /// unsigned curvature from positions
    pub kappa: Vec<f64>,
    /// curvature signed by the stored normal
    pub kappa_signed: Vec<f64>,
    pub tau: Vec<f64>,
    /// false where the curve is too straight for a torsion estimate
    pub reliable: Vec<bool>,
}

impl CurveSample {
    pub fn frame(&self) -> Matrix3<f64> {
        Matrix3::from_rows(&[
            self.tangent.transpose(),
            self.normal.transpose(),
            self.binormal.transpose(),
        ])
    }
}

impl SampledCurve {
    /// Builds a curve from samples, classifying closure and parity.
    pub fn from_samples(samples: Vec<CurveSample>, closure_tol: f64) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::Input("a curve needs at least two samples".into()));
        }
        let length = samples[samples.len() - 1].s - samples[0].s;
        let mut curve = SampledCurve { samples, closed: false, parity: Parity::Even, length };
        curve.classify(closure_tol);
        Ok(curve)
    }

    /// Sets `closed` and `parity` from the endpoint data.
    pub fn classify(&mut self, closure_tol: f64) {
        let first = &self.samples[0];
        let last = &self.samples[self.samples.len() - 1];
        let gap = (last.position - first.position).norm();
        let even = frame_distance(first, last, 1.0);
        let odd = frame_distance(first, last, -1.0);
        self.parity = if odd < even { Parity::Odd } else { Parity::Even };
        self.closed = gap <= closure_tol * self.length.max(1e-300)
            && even.min(odd) <= closure_tol.sqrt().max(1e-3);
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn positions(&self) -> Vec<V3> {
        self.samples.iter().map(|c| c.position).collect()
    }

    /// Positions of the closed polygon, without the repeated endpoint.
    pub fn loop_positions(&self) -> Vec<V3> {
        let n = if self.closed { self.samples.len() - 1 } else { self.samples.len() };
        self.samples[..n].iter().map(|c| c.position).collect()
    }

    pub fn arclengths(&self) -> Vec<f64> {
        self.samples.iter().map(|c| c.s).collect()
    }

    /// Mean sample spacing.
    pub fn step(&self) -> f64 {
        self.length / (self.samples.len() - 1) as f64
    }

    /// Mirror image in the plane y = 0; torsion changes sign.
    pub fn reflected(&self) -> SampledCurve {
        let r = |v: &V3| V3::new(v.x, -v.y, v.z);
        let samples = self
            .samples
            .iter()
            .map(|c| CurveSample {
                s: c.s,
                position: r(&c.position),
                tangent: r(&c.tangent),
                normal: r(&c.normal),
                binormal: -r(&c.binormal),
                kappa: c.kappa,
                tau: -c.tau,
            })
            .collect();
        SampledCurve { samples, ..self.clone() }
    }

    /// The closed curve traversed k times; on odd curves every other
    /// traversal carries the negated N, B and curvature.
    pub fn covers(&self, k: usize) -> Result<SampledCurve> {
        if !self.closed || k == 0 {
            return Err(Error::Input("covers need a closed curve and k >= 1".into()));
        }
        let m = self.samples.len() - 1;
        let mut samples = Vec::with_capacity(k * m + 1);
        for j in 0..k {
            let flip = self.parity == Parity::Odd && j % 2 == 1;
            let sg = if flip { -1.0 } else { 1.0 };
            let take = if j + 1 == k { m + 1 } else { m };
            for c in &self.samples[..take] {
                samples.push(CurveSample {
                    s: c.s + j as f64 * self.length,
                    normal: c.normal * sg,
                    binormal: c.binormal * sg,
                    kappa: c.kappa * sg,
                    ..c.clone()
                });
            }
        }
        let parity = if self.parity == Parity::Odd && k % 2 == 1 { Parity::Odd } else { Parity::Even };
        Ok(SampledCurve { samples, closed: true, parity, length: k as f64 * self.length })
    }

    /// Applies x -> R x + t.
    pub fn rigid_motion(&self, rot: &Matrix3<f64>, shift: &V3) -> SampledCurve {
        let samples = self
            .samples
            .iter()
            .map(|c| CurveSample {
                position: rot * c.position + shift,
                tangent: rot * c.tangent,
                normal: rot * c.normal,
                binormal: rot * c.binormal,
                ..c.clone()
            })
            .collect();
        SampledCurve { samples, ..self.clone() }
    }

    /// Largest violation of orthonormality or of B = T x N over all samples.
    pub fn frame_error(&self) -> f64 {
        self.samples
            .iter()
            .map(|c| {
                let (t, n, b) = (&c.tangent, &c.normal, &c.binormal);
                [
                    (t.norm() - 1.0).abs(),
                    (n.norm() - 1.0).abs(),
                    (b.norm() - 1.0).abs(),
                    t.dot(n).abs(),
                    t.dot(b).abs(),
                    n.dot(b).abs(),
                    (t.cross(n) - b).norm(),
                ]
                .into_iter()
                .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    /// Curvature as a function of arclength, by cubic interpolation of the
    /// sampled values on a uniform grid.
    pub fn kappa_interpolant(&self) -> impl Fn(f64) -> f64 + Sync + '_ {
        let n = self.samples.len();
        let s0 = self.samples[0].s;
        let h = self.step();
        move |s: f64| {
            let t = (s - s0) / h;
            if n < 4 {
                let j = (t.round().max(0.0) as usize).min(n - 1);
                return self.samples[j].kappa;
            }
            let i = (t.floor() as isize).clamp(1, n as isize - 3) as usize;
            let x = t - i as f64;
            let k = |j: usize| self.samples[j].kappa;
            let (y0, y1, y2, y3) = (k(i - 1), k(i), k(i + 1), k(i + 2));
            // Lagrange through nodes -1, 0, 1, 2
            -x * (x - 1.0) * (x - 2.0) / 6.0 * y0 + (x + 1.0) * (x - 1.0) * (x - 2.0) / 2.0 * y1
                - (x + 1.0) * x * (x - 2.0) / 2.0 * y2
                + (x + 1.0) * x * (x - 1.0) / 6.0 * y3
        }
    }
}

fn frame_distance(a: &CurveSample, b: &CurveSample, sign: f64) -> f64 {
    (a.tangent - b.tangent)
        .norm()
        .max((a.normal * sign - b.normal).norm())
        .max((a.binormal * sign - b.binormal).norm())
}

fn gram_schmidt(t: V3, n: V3) -> (V3, V3, V3) {
    let t = t.normalize();
    let n = (n - t * t.dot(&n)).normalize();
    (t, n, t.cross(&n))
}

/// Integrates the Frenet equations with classical RK4, starting from the
/// identity frame at the origin, re-orthonormalizing after every step.
pub fn integrate_frenet(
    kappa: &dyn Fn(f64) -> f64,
    tau: f64,
    length: f64,
    step_count: usize,
) -> Result<SampledCurve> {
    if step_count < 100 {
        return Err(Error::Input(format!("step_count = {step_count} < 100")));
    }
    if !tau.is_finite() || !(length > 0.0) {
        return Err(Error::Input("torsion must be finite and length positive".into()));
    }
    let h = length / step_count as f64;
    // state: position, T, N, B
    type St = [V3; 4];
    let rhs = |s: f64, y: &St| -> St {
        let k = kappa(s);
        [y[1], y[2] * k, -y[1] * k + y[3] * tau, -y[2] * tau]
    };
    let axpy = |y: &St, d: &St, a: f64| -> St {
        [y[0] + d[0] * a, y[1] + d[1] * a, y[2] + d[2] * a, y[3] + d[3] * a]
    };
    let mut y: St = [V3::zeros(), V3::x(), V3::y(), V3::z()];
    let mut samples = Vec::with_capacity(step_count + 1);
    let push = |samples: &mut Vec<CurveSample>, s: f64, y: &St| {
        samples.push(CurveSample {
            s,
            position: y[0],
            tangent: y[1],
            normal: y[2],
            binormal: y[3],
            kappa: kappa(s),
            tau,
        })
    };
    push(&mut samples, 0.0, &y);
    for i in 0..step_count {
        let s = i as f64 * h;
        let k1 = rhs(s, &y);
        let k2 = rhs(s + 0.5 * h, &axpy(&y, &k1, 0.5 * h));
        let k3 = rhs(s + 0.5 * h, &axpy(&y, &k2, 0.5 * h));
        let k4 = rhs(s + h, &axpy(&y, &k3, h));
        let mut next = y;
        for j in 0..4 {
            next[j] += (k1[j] + k2[j] * 2.0 + k3[j] * 2.0 + k4[j]) * (h / 6.0);
        }
        let (t, n, b) = gram_schmidt(next[1], next[2]);
        y = [next[0], t, n, b];
        push(&mut samples, (i + 1) as f64 * h, &y);
    }
    SampledCurve::from_samples(samples, 1e-6)
}

/// Curvature and torsion estimated from positions by second-order central
/// differences on the (assumed uniform) arclength grid.
pub fn measure_geometry(curve: &SampledCurve) -> Result<GeometryEstimate> {
    let n_all = curve.samples.len();
    if n_all < 5 {
        return Err(Error::Input("measure_geometry needs at least 5 samples".into()));
    }
    let h = curve.step();
    let pts = curve.loop_positions();
    let m = pts.len();
    let get = |i: isize| -> Option<V3> {
        if curve.closed {
            Some(pts[i.rem_euclid(m as isize) as usize])
        } else if i >= 0 && (i as usize) < n_all {
            Some(curve.samples[i as usize].position)
        } else {
            None
        }
    };
    let mut kappa = vec![f64::NAN; n_all];
    let mut signed = vec![f64::NAN; n_all];
    let mut tau = vec![f64::NAN; n_all];
    let mut reliable = vec![false; n_all];
    for i in 0..n_all {
        let ii = i as isize;
        let (Some(a), Some(b), Some(c), Some(d), Some(e)) =
            (get(ii - 2), get(ii - 1), get(ii), get(ii + 1), get(ii + 2))
        else {
            continue;
        };
        let d1 = (d - b) / (2.0 * h);
        let d2 = (d - c * 2.0 + b) / (h * h);
        let d3 = (e - d * 2.0 + b * 2.0 - a) / (2.0 * h * h * h);
        let cr = d1.cross(&d2);
        let sp = d1.norm();
        let k = cr.norm() / (sp * sp * sp);
        kappa[i] = k;
        signed[i] = if d2.dot(&curve.samples[i].normal) < 0.0 { -k } else { k };
        let c2 = cr.norm_squared();
        if c2 > 0.0 {
            tau[i] = cr.dot(&d3) / c2;
        }
    }
    let kmax = kappa.iter().cloned().filter(|k| k.is_finite()).fold(0.0, f64::max);
    for i in 0..n_all {
        reliable[i] = tau[i].is_finite() && kappa[i] > 0.05 * kmax;
    }
    Ok(GeometryEstimate { kappa, kappa_signed: signed, tau, reliable })
}

/// Gap between the endpoints of a closed-candidate curve; frames compare
/// with N and B negated for odd curves.
pub fn closure_defect(curve: &SampledCurve) -> ClosureDefect {
    let first = &curve.samples[0];
    let last = &curve.samples[curve.samples.len() - 1];
    let sign = match curve.parity {
        Parity::Even => 1.0,
        Parity::Odd => -1.0,
    };
    ClosureDefect {
        position_gap: (last.position - first.position).norm(),
        frame_gap: frame_distance(first, last, sign),
    }
}

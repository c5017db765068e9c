//! Ribbon meshes along a sampled curve, as OBJ or PLY.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

use crate::curves::{Parity, SampledCurve, V3};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum MeshFormat {
    Obj,
    Ply,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum RibbonDirection {
    Normal,
    Vertical,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<V3>,
    pub faces: Vec<[usize; 3]>,
}

/// A strip of width `width` centred on the curve, spanned by N or by the
/// z axis. Vertices come in pairs (left, right) per sample; a closed curve
/// is joined up at the seam, with the pair swapped when an odd curve's
/// normal comes back reversed.
pub fn ribbon(curve: &SampledCurve, width: f64, along: RibbonDirection) -> Result<Mesh> {
    if !(width > 0.0) || !width.is_finite() {
        return Err(Error::Input("ribbon width must be positive".into()));
    }
    let m = if curve.closed { curve.len() - 1 } else { curve.len() };
    let mut vertices = Vec::with_capacity(2 * m);
    for c in &curve.samples[..m] {
        let d = match along {
            RibbonDirection::Normal => c.normal,
            RibbonDirection::Vertical => V3::z(),
        };
        vertices.push(c.position - d * (0.5 * width));
        vertices.push(c.position + d * (0.5 * width));
    }
    let mut faces = Vec::with_capacity(2 * m);
    let mut quad = |a: usize, b: usize, c: usize, d: usize| {
        faces.push([a, b, c]);
        faces.push([b, d, c]);
    };
    for i in 0..m - 1 {
        quad(2 * i, 2 * i + 1, 2 * i + 2, 2 * i + 3);
    }
    if curve.closed {
        let l = 2 * (m - 1);
        if curve.parity == Parity::Odd && along == RibbonDirection::Normal {
            quad(l, l + 1, 1, 0);
        } else {
            quad(l, l + 1, 0, 1);
        }
    }
    Ok(Mesh { vertices, faces })
}

impl Mesh {
    pub fn to_obj(&self) -> String {
        let mut s = String::new();
        for v in &self.vertices {
            let _ = writeln!(s, "v {:.10} {:.10} {:.10}", v.x, v.y, v.z);
        }
        for f in &self.faces {
            let _ = writeln!(s, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
        }
        s
    }

    pub fn to_ply(&self) -> String {
        let mut s = String::new();
        let _ = write!(
            s,
            "ply\nformat ascii 1.0\nelement vertex {}\nproperty double x\nproperty double y\nproperty double z\n\
             element face {}\nproperty list uchar int vertex_indices\nend_header\n",
            self.vertices.len(),
            self.faces.len()
        );
        for v in &self.vertices {
            let _ = writeln!(s, "{:.10} {:.10} {:.10}", v.x, v.y, v.z);
        }
        for f in &self.faces {
            let _ = writeln!(s, "3 {} {} {}", f[0], f[1], f[2]);
        }
        s
    }

    pub fn render(&self, format: MeshFormat) -> String {
        match format {
            MeshFormat::Obj => self.to_obj(),
            MeshFormat::Ply => self.to_ply(),
        }
    }

    /// Edges with their face counts: interior edges 2, boundary edges 1.
    fn edge_counts(&self) -> std::collections::BTreeMap<(usize, usize), usize> {
        let mut e = std::collections::BTreeMap::new();
        for f in &self.faces {
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                *e.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        e
    }

    /// A closed ribbon loop: no edge on more than two faces, every rung
    /// (the edge across the strip at a sample) interior, every vertex on
    /// exactly two boundary edges, no degenerate triangle.
    pub fn is_watertight_loop(&self) -> bool {
        let edges = self.edge_counts();
        if edges.values().any(|&c| c > 2) {
            return false;
        }
        if (0..self.vertices.len() / 2).any(|i| edges.get(&(2 * i, 2 * i + 1)) != Some(&2)) {
            return false;
        }
        let mut deg = vec![0usize; self.vertices.len()];
        for (&(a, b), &c) in &edges {
            if c == 1 {
                deg[a] += 1;
                deg[b] += 1;
            }
        }
        let area_ok = self.faces.iter().all(|f| {
            let (a, b, c) = (self.vertices[f[0]], self.vertices[f[1]], self.vertices[f[2]]);
            (b - a).cross(&(c - a)).norm() > 1e-14
        });
        area_ok && deg.iter().all(|&d| d == 2)
    }
}

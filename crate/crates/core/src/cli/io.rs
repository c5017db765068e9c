//! Curve CSV files and their JSON metadata siblings.

use serde::Serialize;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::curves::{CurveSample, SampledCurve, V3};
use crate::error::{Error, Result};

pub const HEADER: [&str; 15] =
    ["s", "x", "y", "z", "Tx", "Ty", "Tz", "Nx", "Ny", "Nz", "Bx", "By", "Bz", "kappa", "tau"];

/// 17 significant digits, enough to round-trip any f64.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_curve_csv(path: &Path, curve: &SampledCurve) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(csv_err)?;
    w.write_record(HEADER).map_err(csv_err)?;
    for c in &curve.samples {
        let v = [
            c.s,
            c.position.x,
            c.position.y,
            c.position.z,
            c.tangent.x,
            c.tangent.y,
            c.tangent.z,
            c.normal.x,
            c.normal.y,
            c.normal.z,
            c.binormal.x,
            c.binormal.y,
            c.binormal.z,
            c.kappa,
            c.tau,
        ];
        w.write_record(v.iter().map(|x| num(*x))).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Input(format!("csv: {other:?}")),
    }
}

pub fn read_curve_csv(path: &Path) -> Result<SampledCurve> {
    let mut r = csv::ReaderBuilder::new().from_path(path).map_err(csv_err)?;
    let header = r.headers().map_err(csv_err)?.clone();
    if header.iter().ne(HEADER.iter().copied()) {
        return Err(Error::Input(format!("{}: unexpected header {:?}", path.display(), header)));
    }
    let mut samples = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let v: Vec<f64> = rec
            .iter()
            .map(|f| f.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Input(format!("{}: row {}: {e}", path.display(), line + 2)))?;
        if v.len() != HEADER.len() || v.iter().any(|x| !x.is_finite()) {
            return Err(Error::Input(format!("{}: row {} is malformed", path.display(), line + 2)));
        }
        samples.push(CurveSample {
            s: v[0],
            position: V3::new(v[1], v[2], v[3]),
            tangent: V3::new(v[4], v[5], v[6]),
            normal: V3::new(v[7], v[8], v[9]),
            binormal: V3::new(v[10], v[11], v[12]),
            kappa: v[13],
            tau: v[14],
        });
    }
    if samples.windows(2).any(|w| !(w[1].s > w[0].s)) {
        return Err(Error::Input(format!("{}: arclength must increase", path.display())));
    }
    SampledCurve::from_samples(samples, 1e-6)
}

pub fn metadata_path(curve_path: &Path) -> PathBuf {
    curve_path.with_extension("json")
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut f = File::create(path)?;
    serde_json::to_writer_pretty(&mut f, value).map_err(|e| Error::Input(e.to_string()))?;
    f.write_all(b"\n")?;
    Ok(())
}

pub fn read_metadata(curve_path: &Path) -> Option<serde_json::Value> {
    let text = std::fs::read_to_string(metadata_path(curve_path)).ok()?;
    serde_json::from_str(&text).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::integrate_frenet;

    #[test]
    fn round_trip_is_lossless() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("h.csv");
        let c = integrate_frenet(&|s| 0.5 + 0.1 * s.sin(), 0.3, 7.0, 300).unwrap();
        write_curve_csv(&p, &c).unwrap();
        let back = read_curve_csv(&p).unwrap();
        assert_eq!(back.samples, c.samples);
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(!text.contains('\r'));
        assert!(text.starts_with("s,x,y,z,Tx,Ty,Tz,Nx,Ny,Nz,Bx,By,Bz,kappa,tau\n"));
    }

    #[test]
    fn rejects_garbage() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.csv");
        std::fs::write(&p, "a,b\n1,2\n").unwrap();
        assert!(matches!(read_curve_csv(&p), Err(Error::Input(_))));
        std::fs::write(&p, format!("{}\n0,1,2\n", HEADER.join(","))).unwrap();
        assert!(matches!(read_curve_csv(&p), Err(Error::Input(_))));
    }
}

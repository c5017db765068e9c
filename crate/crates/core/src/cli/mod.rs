//! The `torsion-bt` command line: rods, transformations, roots, invariants
//! and ribbon export, each also runnable from a JSON job file.

pub mod io;
pub mod mesh;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::path::{Path, PathBuf};

use crate::backlund::{closed_double_bt, closed_single_bt_rod, single_bt, BetaSource, Branch, SingleBtSpec};
use crate::curves::{closure_defect, integrate_frenet};
use crate::error::{Error, Result};
use crate::invariants::{linking, report};
use crate::rod::{find_torus_rod, rod_curve, RodParams};
use crate::spectral::{beta_solve, find_floquet_roots, refine_floquet_root, SearchBox};
use crate::C64;

use io::{metadata_path, read_curve_csv, read_metadata, write_curve_csv, write_json};
use mesh::{ribbon, MeshFormat, RibbonDirection};

#[derive(Parser, Debug)]
#[command(name = "torsion-bt", version, about = "Constant-torsion rods, Backlund transformations and knot diagnostics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Closed (m, n) torus-knot rod: curve CSV plus metadata JSON
    Rod(RodJob),
    /// Helix of constant curvature and torsion, from the origin
    Helix(HelixJob),
    /// Single transformation: closed transform of a rod, or of any
    /// constant-torsion curve given with --input
    Bt(BtJob),
    /// Double transformation of a rod at a closing root
    Bt2(Bt2Job),
    /// Closing roots sigma of sin(k n K Lambda) in a box
    Roots(RootsJob),
    /// Writhe, self-linking, self-distance, linking and crossings
    Invariants(InvariantsJob),
    /// Ribbon mesh along a curve
    Export(ExportJob),
    /// Run a JSON job file
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

/// One command with its parameters, as stored in a job file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum JobConfig {
    Rod(RodJob),
    Helix(HelixJob),
    Bt(BtJob),
    Bt2(Bt2Job),
    Roots(RootsJob),
    Invariants(InvariantsJob),
    Export(ExportJob),
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RodJob {
    #[arg(long, allow_hyphen_values = true)]
    pub m: i64,
    #[arg(long)]
    pub n: i64,
    /// samples per 2K period
    #[arg(long, default_value_t = 400)]
    pub samples: usize,
    #[arg(long, default_value = "rod.csv")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HelixJob {
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub tau: f64,
    #[arg(long)]
    pub length: f64,
    #[arg(long, default_value_t = 4000)]
    pub samples: usize,
    #[arg(long, default_value = "helix.csv")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BtJob {
    #[arg(long, allow_hyphen_values = true)]
    pub m: Option<i64>,
    #[arg(long)]
    pub n: Option<i64>,
    /// the constant C
    #[arg(long = "c", allow_hyphen_values = true)]
    pub c: f64,
    #[arg(long, value_enum, default_value_t = Branch::Plus)]
    pub branch: Branch,
    #[arg(long, default_value_t = 400)]
    pub samples: usize,
    /// transform this curve instead, integrating beta from --beta0
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub beta0: f64,
    #[arg(long, default_value = "bt.csv")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bt2Job {
    #[arg(long, allow_hyphen_values = true)]
    pub m: i64,
    #[arg(long)]
    pub n: i64,
    #[arg(long)]
    pub k: usize,
    /// starting guess for the root; refined by Newton
    #[arg(long, allow_hyphen_values = true)]
    pub sigma_re: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub sigma_im: f64,
    #[arg(long, default_value_t = 1.0)]
    pub omega_abs: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub omega_arg: f64,
    #[arg(long, default_value_t = 400)]
    pub samples: usize,
    #[arg(long, default_value = "bt2.csv")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootsJob {
    /// torus type of the rod; alternatively give --p
    #[arg(long, allow_hyphen_values = true)]
    pub m: Option<i64>,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub re_min: f64,
    #[arg(long, default_value_t = 2.5, allow_hyphen_values = true)]
    pub re_max: f64,
    #[arg(long, default_value_t = 0.2, allow_hyphen_values = true)]
    pub im_min: f64,
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    pub im_max: f64,
    #[arg(long, default_value = "roots.json")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantsJob {
    pub curve: Option<PathBuf>,
    /// a curve and its partner: adds Lk and the check Lk = SL - n/2
    #[arg(long, num_args = 2, value_names = ["CURVE", "PARTNER"])]
    pub pair: Option<Vec<PathBuf>>,
    /// number of 2K periods; read from the curve's metadata when omitted
    #[arg(long)]
    pub n_periods: Option<usize>,
    /// survey crossings over 26 projection directions
    #[arg(long)]
    pub crossings: bool,
    /// keep every stride-th sample
    #[arg(long, default_value_t = 1)]
    pub stride: usize,
    #[arg(long, default_value = "invariants.json")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportJob {
    pub curve: PathBuf,
    #[arg(long, value_enum, default_value_t = MeshFormat::Obj)]
    pub format: MeshFormat,
    #[arg(long, default_value_t = 0.05)]
    pub width: f64,
    #[arg(long, value_enum, default_value_t = RibbonDirection::Normal)]
    pub along: RibbonDirection,
    #[arg(long, default_value = "ribbon.obj")]
    pub out: PathBuf,
}

impl JobConfig {
    pub fn from_json(text: &str) -> Result<JobConfig> {
        serde_json::from_str(text).map_err(|e| Error::Input(format!("job file: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("job configs serialize")
    }

    pub fn run(&self) -> Result<Vec<PathBuf>> {
        match self {
            JobConfig::Rod(j) => cmd_rod(j),
            JobConfig::Helix(j) => cmd_helix(j),
            JobConfig::Bt(j) => cmd_bt(j),
            JobConfig::Bt2(j) => cmd_bt2(j),
            JobConfig::Roots(j) => cmd_roots(j),
            JobConfig::Invariants(j) => cmd_invariants(j),
            JobConfig::Export(j) => cmd_export(j),
        }
    }
}

fn c_json(z: C64) -> serde_json::Value {
    json!([z.re, z.im])
}

fn rod_for(m: i64, n: i64, samples: usize) -> Result<(RodParams, crate::curves::SampledCurve)> {
    let params = find_torus_rod(m, n, 1e-12)?;
    let curve = rod_curve(&params, n as usize, samples)?;
    Ok((params, if m < 0 { curve.reflected() } else { curve }))
}

fn rod_metadata(m: i64, n: i64, params: &RodParams) -> serde_json::Value {
    json!({
        "m": m,
        "n": n,
        "p": params.p(),
        "sigma": c_json(params.sigma),
        "Lambda": c_json(params.lambda),
        "delta_theta_over_2pi": params.delta_theta_over_2pi(),
        "n_periods": params.n_periods,
    })
}

fn with_curve_info(mut meta: serde_json::Value, curve: &crate::curves::SampledCurve) -> serde_json::Value {
    meta["length"] = json!(curve.length);
    meta["tau"] = json!(curve.samples[0].tau);
    meta["samples"] = json!(curve.len());
    meta["closed"] = json!(curve.closed);
    meta["parity"] = json!(curve.parity);
    meta["closure_defect"] = json!(closure_defect(curve));
    meta
}

fn write_curve_and_meta(out: &Path, curve: &crate::curves::SampledCurve, meta: serde_json::Value) -> Result<Vec<PathBuf>> {
    write_curve_csv(out, curve)?;
    let mp = metadata_path(out);
    write_json(&mp, &with_curve_info(meta, curve))?;
    Ok(vec![out.to_path_buf(), mp])
}

pub fn cmd_rod(j: &RodJob) -> Result<Vec<PathBuf>> {
    let (params, curve) = rod_for(j.m, j.n, j.samples)?;
    let meta = rod_metadata(j.m, j.n, &params);
    write_curve_and_meta(&j.out, &curve, meta)
}

pub fn cmd_helix(j: &HelixJob) -> Result<Vec<PathBuf>> {
    if !j.kappa.is_finite() {
        return Err(Error::Input("curvature must be finite".into()));
    }
    let k = j.kappa;
    let curve = integrate_frenet(&|_| k, j.tau, j.length, j.samples)?;
    write_curve_and_meta(&j.out, &curve, json!({ "kappa": k }))
}

pub fn cmd_bt(j: &BtJob) -> Result<Vec<PathBuf>> {
    if let Some(input) = &j.input {
        let curve = read_curve_csv(input)?;
        let kappa = curve.kappa_interpolant();
        let beta = beta_solve(&kappa, j.c, j.beta0, &curve.arclengths(), 4)?;
        let spec = SingleBtSpec::new(j.c, curve.samples[0].tau, j.beta0, BetaSource::Ode);
        let out = single_bt(&curve, &spec, &beta)?;
        let mut meta = json!({ "input": input, "spec": spec });
        if let Some(src) = read_metadata(input) {
            if let Some(n) = src.get("n_periods") {
                meta["n_periods"] = n.clone();
            }
        }
        return write_curve_and_meta(&j.out, &out, meta);
    }
    let (Some(m), Some(n)) = (j.m, j.n) else {
        return Err(Error::Input("bt needs --m and --n, or --input".into()));
    };
    let (params, rod) = rod_for(m, n, j.samples)?;
    let out = closed_single_bt_rod(&rod, &params, j.c, j.branch)?;
    let mut meta = rod_metadata(m, n, &params);
    meta["spec"] = json!(out.spec);
    meta["branch"] = json!(j.branch);
    meta["a"] = json!(out.a);
    write_curve_and_meta(&j.out, &out.curve, meta)
}

pub fn cmd_bt2(j: &Bt2Job) -> Result<Vec<PathBuf>> {
    if !(j.omega_abs.is_finite() && j.omega_arg.is_finite()) {
        return Err(Error::Input("omega must be finite".into()));
    }
    let (params, rod) = rod_for(j.m, j.n, j.samples)?;
    let root = refine_floquet_root(params.p(), j.n as usize, j.k, C64::new(j.sigma_re, j.sigma_im))?;
    let omega = C64::from_polar(j.omega_abs, j.omega_arg);
    let out = closed_double_bt(&rod, &params, &root, omega)?;
    let mut meta = rod_metadata(j.m, j.n, &params);
    meta["root"] = json!(root);
    meta["spec"] = json!(out.spec);
    meta["covers"] = json!(out.spec.k_covers);
    meta["flagged"] = json!(out.flagged);
    meta["max_imag"] = json!(out.max_imag);
    write_curve_and_meta(&j.out, &out.curve, meta)
}

pub fn cmd_roots(j: &RootsJob) -> Result<Vec<PathBuf>> {
    let p = match (j.p, j.m) {
        (Some(p), _) => p,
        (None, Some(m)) => find_torus_rod(m, j.n as i64, 1e-12)?.p(),
        (None, None) => return Err(Error::Input("roots needs --p or --m".into())),
    };
    let bounds = SearchBox { re_min: j.re_min, re_max: j.re_max, im_min: j.im_min, im_max: j.im_max };
    let search = find_floquet_roots(p, j.n, j.k, &bounds)?;
    let value = json!({ "search": search, "records": search.records() });
    write_json(&j.out, &value)?;
    Ok(vec![j.out.clone()])
}

fn thin(curve: crate::curves::SampledCurve, stride: usize) -> Result<crate::curves::SampledCurve> {
    if stride <= 1 {
        return Ok(curve);
    }
    let m = curve.len() - 1;
    if m % stride != 0 {
        return Err(Error::Input(format!("stride {stride} does not divide {m} intervals")));
    }
    let samples = curve.samples.iter().step_by(stride).cloned().collect();
    Ok(crate::curves::SampledCurve { samples, ..curve })
}

pub fn cmd_invariants(j: &InvariantsJob) -> Result<Vec<PathBuf>> {
    let (main, partner) = match (&j.curve, &j.pair) {
        (_, Some(pair)) => (pair[0].clone(), Some(pair[1].clone())),
        (Some(c), None) => (c.clone(), None),
        (None, None) => return Err(Error::Input("invariants needs a curve or --pair".into())),
    };
    let curve = thin(read_curve_csv(&main)?, j.stride)?;
    let partner_curve = partner.as_ref().map(|p| read_curve_csv(p).and_then(|c| thin(c, j.stride))).transpose()?;
    let rep = report(&curve, None, j.crossings)?;
    let mut value = json!(rep);
    if let Some(b) = &partner_curve {
        let lk = linking(&curve, b)?;
        value["linking"] = json!(lk);
        let n = j.n_periods.or_else(|| {
            read_metadata(&main).and_then(|m| m.get("n_periods").and_then(|v| v.as_u64())).map(|v| v as usize)
        });
        if let Some(n) = n {
            let predicted = rep.self_linking - 0.5 * n as f64;
            value["linking_theorem"] = json!({
                "lk": lk,
                "sl": rep.self_linking,
                "n": n,
                "residual": (lk - predicted).abs(),
            });
        }
    }
    write_json(&j.out, &value)?;
    Ok(vec![j.out.clone()])
}

pub fn cmd_export(j: &ExportJob) -> Result<Vec<PathBuf>> {
    let curve = read_curve_csv(&j.curve)?;
    let mesh = ribbon(&curve, j.width, j.along)?;
    std::fs::write(&j.out, mesh.render(j.format))?;
    Ok(vec![j.out.clone()])
}

impl Command {
    fn into_job(self) -> Result<JobConfig> {
        Ok(match self {
            Command::Rod(j) => JobConfig::Rod(j),
            Command::Helix(j) => JobConfig::Helix(j),
            Command::Bt(j) => JobConfig::Bt(j),
            Command::Bt2(j) => JobConfig::Bt2(j),
            Command::Roots(j) => JobConfig::Roots(j),
            Command::Invariants(j) => JobConfig::Invariants(j),
            Command::Export(j) => JobConfig::Export(j),
            Command::Run { config } => JobConfig::from_json(&std::fs::read_to_string(&config)?)?,
        })
    }
}

/// Parses `args` (including the program name) and runs; returns the exit
/// code: 0 ok, 2 domain, 3 input, 4 numeric.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 3 } else { 0 };
        }
    };
    match cli.command.into_job().and_then(|job| job.run()) {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run_from_args() -> i32 {
    run(std::env::args_os())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn job_round_trip() {
        let jobs = vec![
            JobConfig::Rod(RodJob { m: 1, n: 3, samples: 200, out: "a.csv".into() }),
            JobConfig::Bt2(Bt2Job {
                m: 2,
                n: 5,
                k: 2,
                sigma_re: 0.9067,
                sigma_im: 0.9697,
                omega_abs: 1.0,
                omega_arg: 1.0471975512,
                samples: 300,
                out: "b.csv".into(),
            }),
            JobConfig::Invariants(InvariantsJob {
                curve: None,
                pair: Some(vec!["r.csv".into(), "b.csv".into()]),
                n_periods: Some(5),
                crossings: true,
                stride: 2,
                out: "i.json".into(),
            }),
        ];
        for j in jobs {
            assert_eq!(JobConfig::from_json(&j.to_json()).unwrap(), j);
        }
    }

    #[test]
    fn exit_codes() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("r.csv");
        let o = out.to_str().unwrap();
        assert_eq!(run(["torsion-bt", "rod", "--m", "1", "--n", "2", "--out", o]), 2);
        assert_eq!(run(["torsion-bt", "rod", "--m", "x"]), 3);
        let missing = dir.path().join("none.csv");
        assert_eq!(run(["torsion-bt", "invariants", missing.to_str().unwrap()]), 3);
        assert_eq!(run(["torsion-bt", "rod", "--m", "1", "--n", "3", "--samples", "100", "--out", o]), 0);
        assert!(metadata_path(&out).exists());
    }
}

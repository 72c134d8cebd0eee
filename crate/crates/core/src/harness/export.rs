//! Byte-stable CSV/JSON export of a run.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::sim::SimTrace;

use super::summary::RunSummary;

pub const CONTINUOUS_HEADER: &str = "t,x,dx,ddx,y,dy,theta,dtheta,p,q,z_stance,dz_des,Fx,Fy,Tz,mu_req";
pub const STEPS_HEADER: &str = "i,L,T,p0,q0,p_star,D1,D2,Vswing,Vavg,alpha";

/// Rounds to 9 significant digits and prints the shortest form that reads
/// back to the rounded value.
pub fn fmt_sig(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let rounded: f64 = format!("{x:.8e}").parse().expect("formatted float parses");
    if rounded == 0.0 {
        "0".into()
    } else {
        format!("{rounded}")
    }
}

fn csv_line(out: &mut String, fields: &[f64]) {
    for (k, v) in fields.iter().enumerate() {
        if k > 0 {
            out.push(',');
        }
        out.push_str(&fmt_sig(*v));
    }
    out.push('\n');
}

pub fn continuous_csv(trace: &SimTrace) -> String {
    let mut out = String::with_capacity(trace.rows.len() * 200);
    out.push_str(CONTINUOUS_HEADER);
    out.push('\n');
    for r in &trace.rows {
        csv_line(
            &mut out,
            &[r.t, r.x, r.dx, r.ddx, r.y, r.dy, r.theta, r.dtheta, r.p, r.q, r.z_stance, r.dz_des, r.fx, r.fy, r.tz, r.mu_req],
        );
    }
    out
}

/// Per-step table; `D1`, `D2` and `Vswing` are the realized values.
pub fn steps_csv(trace: &SimTrace) -> String {
    let mut out = String::new();
    out.push_str(STEPS_HEADER);
    out.push('\n');
    for s in &trace.steps {
        let _ = write!(out, "{},", s.i);
        csv_line(
            &mut out,
            &[s.l, s.t, s.p0, s.q0, s.p_star, s.realized.d1, s.realized.d2, s.realized.v_swing, s.v_avg, s.alpha],
        );
    }
    out
}

pub fn summary_json(summary: &RunSummary) -> String {
    let mut s = serde_json::to_string_pretty(summary).expect("summary serializes");
    s.push('\n');
    s
}

/// Writes `continuous.csv`, `steps.csv` and `summary.json` into `dir`,
/// creating it if needed. Returns the written paths.
pub fn export_trace(trace: &SimTrace, summary: &RunSummary, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    let io = |p: &Path, e: std::io::Error| Error::Io { path: p.display().to_string(), message: e.to_string() };
    fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let files = [
        ("continuous.csv", continuous_csv(trace)),
        ("steps.csv", steps_csv(trace)),
        ("summary.json", summary_json(summary)),
    ];
    let mut written = Vec::new();
    for (name, body) in files {
        let path = dir.join(name);
        fs::write(&path, body).map_err(|e| io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

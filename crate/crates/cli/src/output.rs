//! CSV emission. All floating-point columns carry 17 significant digits so
//! downstream analysis never re-rounds.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use oscsync::{Certificate, FeasibilityReport, SimulationTrace, ZoomStage};

use crate::report::VerifyReport;

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn stage_name(stage: ZoomStage) -> &'static str {
    match stage {
        ZoomStage::Fixed => "fixed",
        ZoomStage::ZoomingOut => "out",
        ZoomStage::ZoomingIn => "in",
    }
}

/// trace.csv: `t, r_1..r_n, v_1..v_n, mu, stage, err_inf`.
pub fn trace_csv(trace: &SimulationTrace, n: usize) -> String {
    let mut out = String::new();
    let mut header = String::from("t");
    for i in 1..=n {
        let _ = write!(header, ",r_{i}");
    }
    for i in 1..=n {
        let _ = write!(header, ",v_{i}");
    }
    header.push_str(",mu,stage,err_inf\n");
    out.push_str(&header);
    for s in &trace.samples {
        let _ = write!(out, "{}", fmt_f64(s.t));
        for i in 0..n {
            let _ = write!(out, ",{}", fmt_f64(s.r[i]));
        }
        for i in 0..n {
            let _ = write!(out, ",{}", fmt_f64(s.v[i]));
        }
        let _ = writeln!(
            out,
            ",{},{},{}",
            fmt_f64(s.mu),
            stage_name(s.stage),
            fmt_f64(s.err_inf)
        );
    }
    out
}

/// dense.csv: sampled and sub-step states merged, ordered by time.
pub fn dense_csv(trace: &SimulationTrace, n: usize) -> String {
    let mut rows: Vec<&oscsync::Sample> = trace.samples.iter().chain(trace.dense.iter()).collect();
    rows.sort_by(|a, b| a.t.partial_cmp(&b.t).unwrap());
    let mut out = String::new();
    let mut header = String::from("t");
    for i in 1..=n {
        let _ = write!(header, ",r_{i}");
    }
    for i in 1..=n {
        let _ = write!(header, ",v_{i}");
    }
    header.push_str(",mu,stage,err_inf\n");
    out.push_str(&header);
    for s in rows {
        let _ = write!(out, "{}", fmt_f64(s.t));
        for i in 0..n {
            let _ = write!(out, ",{}", fmt_f64(s.r[i]));
        }
        for i in 0..n {
            let _ = write!(out, ",{}", fmt_f64(s.v[i]));
        }
        let _ = writeln!(
            out,
            ",{},{},{}",
            fmt_f64(s.mu),
            stage_name(s.stage),
            fmt_f64(s.err_inf)
        );
    }
    out
}

/// events.csv: latch sample, dwell boundaries, saturation flags.
pub fn events_csv(trace: &SimulationTrace) -> String {
    let mut out = String::from("event,k,t\n");
    if let Some(k0) = trace.k0 {
        let _ = writeln!(
            out,
            "zoom_in_latched,{},{}",
            k0,
            fmt_f64(k0 as f64 * sample_dt(trace))
        );
    }
    for &k in &trace.dwell_boundaries {
        let _ = writeln!(
            out,
            "dwell_boundary,{},{}",
            k,
            fmt_f64(k as f64 * sample_dt(trace))
        );
    }
    for &k in &trace.saturated_samples {
        let _ = writeln!(
            out,
            "saturated,{},{}",
            k,
            fmt_f64(k as f64 * sample_dt(trace))
        );
    }
    out
}

fn sample_dt(trace: &SimulationTrace) -> f64 {
    if trace.samples.len() >= 2 {
        trace.samples[1].t - trace.samples[0].t
    } else {
        0.0
    }
}

/// Per-figure plot data: positions, velocities, and the error/zoom panel.
pub fn plot_files(trace: &SimulationTrace, n: usize) -> Vec<(&'static str, String)> {
    let mut positions = String::from("t");
    let mut velocities = String::from("t");
    for i in 1..=n {
        let _ = write!(positions, ",r_{i}");
        let _ = write!(velocities, ",v_{i}");
    }
    positions.push('\n');
    velocities.push('\n');
    let mut error = String::from("t,err_inf,mu\n");
    for s in &trace.samples {
        let _ = write!(positions, "{}", fmt_f64(s.t));
        let _ = write!(velocities, "{}", fmt_f64(s.t));
        for i in 0..n {
            let _ = write!(positions, ",{}", fmt_f64(s.r[i]));
            let _ = write!(velocities, ",{}", fmt_f64(s.v[i]));
        }
        positions.push('\n');
        velocities.push('\n');
        let _ = writeln!(
            error,
            "{},{},{}",
            fmt_f64(s.t),
            fmt_f64(s.err_inf),
            fmt_f64(s.mu)
        );
    }
    vec![
        ("positions.csv", positions),
        ("velocities.csv", velocities),
        ("error.csv", error),
    ]
}

/// modes.csv for `analyze`: one row per mode, Table-1 column order.
pub fn modes_csv(report: &FeasibilityReport) -> String {
    let mut out = String::from("re_lambda,im_lambda,phi,arccot_phi\n");
    for m in &report.per_mode {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt_f64(m.lambda.re),
            fmt_f64(m.lambda.im),
            fmt_f64(m.phi),
            fmt_f64(m.arccot_phi)
        );
    }
    out
}

/// certificate.csv for `analyze --certificate`.
pub fn certificate_csv(cert: &Certificate) -> String {
    let mut out = String::from("rho,norm_eps,M_threshold,theta,T,S1_radius,S2_radius\n");
    let _ = writeln!(
        out,
        "{},{},{},{},{},{},{}",
        fmt_f64(cert.rho),
        fmt_f64(cert.norm_eps),
        fmt_f64(cert.m_threshold),
        fmt_f64(cert.theta),
        fmt_f64(cert.t_dwell),
        fmt_f64(cert.s1_radius),
        fmt_f64(cert.s2_radius)
    );
    out
}

pub fn verify_csv(report: &VerifyReport) -> String {
    let mut out = String::from("name,expected,computed,tolerance,pass\n");
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.name,
            fmt_f64(r.expected),
            fmt_f64(r.computed),
            fmt_f64(r.tolerance),
            r.pass
        );
    }
    out
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), contents)
}

/// intersample.csv: per-substep bound factors of the inter-sample estimate.
pub fn intersample_csv(rows: &[(f64, f64, f64)]) -> String {
    let mut out = String::from("dt,norm_ehat_dt,forcing_norm_dt\n");
    for &(dt, ne, nfb) in rows {
        let _ = writeln!(out, "{},{},{}", fmt_f64(dt), fmt_f64(ne), fmt_f64(nfb));
    }
    out
}

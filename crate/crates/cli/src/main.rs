//! Command-line front end: feasibility/certificate analysis, simulation,
//! parameter sweeps, and reproduction of the published numbers.
//!
//! Exit codes: 0 on success, 1 when `verify` finds a mismatch, 2 on any
//! configuration error.

use oscsync_cli::{config, output, report};

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{parse_scenario, ScenarioConfig};
use oscsync::{
    certificate, feasible_windows, simulate, spectral_decomposition, DirectedGraph, EpsNormFrame,
    Scenario, SystemMatrices, ZoomConfig,
};

#[derive(Parser)]
#[command(
    name = "oscsync",
    about = "Certify and simulate synchronization of sampled, quantized harmonic oscillator networks"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Spectral feasibility report (and optionally the contraction certificate)
    Analyze {
        /// Graph edge-list file
        #[arg(long)]
        graph: PathBuf,
        /// Oscillator gain omega
        #[arg(long)]
        omega: f64,
        /// Sampling period to classify (also enables the certificate)
        #[arg(long)]
        tau: Option<f64>,
        /// Number of feasibility windows to list
        #[arg(long, default_value_t = 4)]
        k_max: usize,
        /// Also compute the certificate (requires --tau)
        #[arg(long)]
        certificate: bool,
        /// Quantization error bound Delta
        #[arg(long, default_value_t = 0.5)]
        delta: f64,
        /// Quantizer range M
        #[arg(long, default_value_t = 10.0)]
        range: f64,
        /// Certificate slack epsilon
        #[arg(long, default_value_t = 0.01)]
        eps_slack: f64,
        /// Norm-construction epsilon (default (1 - rho)/2)
        #[arg(long)]
        eps_norm: Option<f64>,
        /// Write modes.csv (and certificate.csv) here
        #[arg(long)]
        out: Option<PathBuf>,
        /// With --certificate: also report inter-sample bound factors at
        /// this many sub-steps per period (intersample.csv)
        #[arg(long, default_value_t = 0)]
        intersample: usize,
    },
    /// Run a scenario and write trace/event/plot CSV files
    Simulate {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Sub-steps per sampling period for dense output
        #[arg(long)]
        dense: Option<usize>,
    },
    /// Grid sweep over tau, mu, Delta with a long-run error summary
    Sweep {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Comma-separated tau values (default: the scenario's tau)
        #[arg(long)]
        tau_grid: Option<String>,
        /// Comma-separated mu values (fixed mode only)
        #[arg(long)]
        mu_grid: Option<String>,
        /// Comma-separated Delta values
        #[arg(long)]
        delta_grid: Option<String>,
    },
    /// Recompute the published table and spectral radius from built-ins
    Verify {
        /// Also write the report as CSV
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run() -> Result<ExitCode, String> {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Analyze {
            graph,
            omega,
            tau,
            k_max,
            certificate: want_cert,
            delta,
            range,
            eps_slack,
            eps_norm,
            out,
            intersample,
        } => cmd_analyze(
            &graph,
            omega,
            tau,
            k_max,
            want_cert,
            delta,
            range,
            eps_slack,
            eps_norm,
            out.as_deref(),
            intersample,
        ),
        Cmd::Simulate {
            scenario,
            out,
            dense,
        } => cmd_simulate(&scenario, &out, dense),
        Cmd::Sweep {
            scenario,
            out,
            tau_grid,
            mu_grid,
            delta_grid,
        } => cmd_sweep(&scenario, &out, tau_grid, mu_grid, delta_grid),
        Cmd::Verify { csv } => cmd_verify(csv.as_deref()),
    }
}

fn load_config(path: &Path) -> Result<ScenarioConfig, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_scenario(&text).map_err(|e| e.to_string())
}

fn load_scenario(path: &Path) -> Result<(ScenarioConfig, Scenario), String> {
    let cfg = load_config(path)?;
    let dir = path.parent();
    let sc = cfg.lower(dir).map_err(|e| e.to_string())?;
    Ok((cfg, sc))
}

#[allow(clippy::too_many_arguments)]
fn cmd_analyze(
    graph: &Path,
    omega: f64,
    tau: Option<f64>,
    k_max: usize,
    want_cert: bool,
    delta: f64,
    range: f64,
    eps_slack: f64,
    eps_norm: Option<f64>,
    out: Option<&Path>,
    intersample: usize,
) -> Result<ExitCode, String> {
    let text = std::fs::read_to_string(graph).map_err(|e| format!("{}: {e}", graph.display()))?;
    let g = DirectedGraph::from_edge_list_text(&text).map_err(|e| e.to_string())?;
    if !g.is_strongly_connected() {
        return Err("graph is not strongly connected".into());
    }
    let l = g.laplacian();
    let spectrum = spectral_decomposition(&l).map_err(|e| e.to_string())?;
    let rep = feasible_windows(spectrum.lambdas(), omega, k_max).map_err(|e| e.to_string())?;

    println!("modes (Re lambda, Im lambda, phi, arccot phi):");
    for m in &rep.per_mode {
        println!(
            "  {:>12.6} {:>12.6} {:>12.6} {:>12.6}",
            m.lambda.re, m.lambda.im, m.phi, m.arccot_phi
        );
    }
    println!("tau0 = {:.6}", rep.tau0);
    for (k, (a, b)) in rep.windows.iter().enumerate() {
        println!("window {k}: ({a:.6}, {b:.6})");
    }
    if let Some(t) = tau {
        println!(
            "tau = {t}: {}",
            if rep.is_feasible(t) {
                "feasible"
            } else {
                "infeasible"
            }
        );
    }
    if let Some(dir) = out {
        output::write_file(dir, "modes.csv", &output::modes_csv(&rep))
            .map_err(|e| e.to_string())?;
    }
    if want_cert {
        let t = tau.ok_or("--certificate requires --tau")?;
        let sys = SystemMatrices::new(omega, t, l).map_err(|e| e.to_string())?;
        let frame = EpsNormFrame::build(&sys, &spectrum, eps_norm).map_err(|e| e.to_string())?;
        let cert = certificate(&sys, &frame, &spectrum, delta, range, eps_slack)
            .map_err(|e| e.to_string())?;
        println!("certificate:");
        println!("  rho         = {:.6}", cert.rho);
        println!("  norm_eps    = {:.6}", cert.norm_eps);
        println!("  M_threshold = {:.6}", cert.m_threshold);
        println!("  theta       = {:.6}", cert.theta);
        println!(
            "  T           = {:.6} s ({} samples)",
            cert.t_dwell, cert.dwell_samples
        );
        println!("  S1_radius   = {:.6} (per unit mu)", cert.s1_radius);
        println!("  S2_radius   = {:.6} (per unit mu)", cert.s2_radius);
        if let Some(dir) = out {
            output::write_file(dir, "certificate.csv", &output::certificate_csv(&cert))
                .map_err(|e| e.to_string())?;
        }
        if intersample > 0 {
            let rows =
                oscsync::propagation::intersample_norms(&sys, &spectrum, &frame, intersample)
                    .map_err(|e| e.to_string())?;
            println!(
                "inter-sample bound factors (dt, ||E_hat(dt)||_eps, ||D U P^dagger F(dt) B||_inf):"
            );
            for &(dt, ne, nfb) in &rows {
                println!("  {dt:>8.5} {ne:>12.6} {nfb:>12.6}");
            }
            if let Some(dir) = out {
                output::write_file(dir, "intersample.csv", &output::intersample_csv(&rows))
                    .map_err(|e| e.to_string())?;
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_simulate(scenario: &Path, out: &Path, dense: Option<usize>) -> Result<ExitCode, String> {
    let (_, mut sc) = load_scenario(scenario)?;
    if let Some(d) = dense {
        sc.dense_substeps = d;
    }
    let n = sc.graph.node_count();
    let trace = simulate(&sc).map_err(|e| e.to_string())?;
    for w in &trace.warnings {
        eprintln!("warning: {w}");
    }
    output::write_file(out, "trace.csv", &output::trace_csv(&trace, n))
        .map_err(|e| e.to_string())?;
    output::write_file(out, "events.csv", &output::events_csv(&trace))
        .map_err(|e| e.to_string())?;
    if sc.dense_substeps > 1 {
        output::write_file(out, "dense.csv", &output::dense_csv(&trace, n))
            .map_err(|e| e.to_string())?;
    }
    for (name, contents) in output::plot_files(&trace, n) {
        output::write_file(out, name, &contents).map_err(|e| e.to_string())?;
    }
    let last = trace.samples.last().expect("non-empty run");
    println!(
        "samples = {}, final err_inf = {:.6e}, mu_final = {:.6e}",
        trace.samples.len(),
        last.err_inf,
        last.mu
    );
    if let Some(k0) = trace.k0 {
        println!(
            "zoom-in latched at k0 = {k0}, {} dwell boundaries",
            trace.dwell_boundaries.len()
        );
    }
    if !trace.saturated_samples.is_empty() {
        println!("saturated samples: {}", trace.saturated_samples.len());
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_grid(spectrum: &Option<String>, fallback: f64, what: &str) -> Result<Vec<f64>, String> {
    match spectrum {
        None => Ok(vec![fallback]),
        Some(s) => s
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<f64>()
                    .map_err(|e| format!("{what} grid entry {tok:?}: {e}"))
            })
            .collect(),
    }
}

fn cmd_sweep(
    scenario: &Path,
    out: &Path,
    tau_grid: Option<String>,
    mu_grid: Option<String>,
    delta_grid: Option<String>,
) -> Result<ExitCode, String> {
    let (_, base) = load_scenario(scenario)?;
    let base_mu = match base.zoom {
        ZoomConfig::Fixed { mu } => mu,
        ZoomConfig::Adjustable => 1.0,
    };
    let taus = parse_grid(&tau_grid, base.tau, "tau")?;
    let mus = parse_grid(&mu_grid, base_mu, "mu")?;
    let deltas = parse_grid(&delta_grid, base.delta, "delta")?;
    let spectrum = spectral_decomposition(&base.graph.laplacian()).map_err(|e| e.to_string())?;

    let mut csv = String::from("tau,mu,delta,feasible,rho,long_run_err,saturated,status\n");
    for &tau in &taus {
        for &mu in &mus {
            for &delta in &deltas {
                let mut sc = base.clone();
                sc.tau = tau;
                sc.delta = delta;
                sc.allow_infeasible = true;
                if matches!(sc.zoom, ZoomConfig::Fixed { .. }) {
                    sc.zoom = ZoomConfig::Fixed { mu };
                }
                let steps = (sc.horizon / tau).round().max(1.0);
                sc.horizon = steps * tau;
                let feasible = feasible_windows(spectrum.lambdas(), sc.omega, 0)
                    .map(|r| r.is_feasible(tau))
                    .unwrap_or(false);
                let rho = oscsync::spectral_radius_reduced(spectrum.lambdas(), sc.omega, tau)
                    .map(output::fmt_f64)
                    .unwrap_or_else(|_| "nan".into());
                match simulate(&sc) {
                    Ok(trace) => {
                        let tail = trace.samples.len() * 3 / 4;
                        let long_run = trace.samples[tail..]
                            .iter()
                            .map(|s| s.err_inf)
                            .fold(0.0f64, f64::max);
                        csv.push_str(&format!(
                            "{},{},{},{},{},{},{},ok\n",
                            output::fmt_f64(tau),
                            output::fmt_f64(mu),
                            output::fmt_f64(delta),
                            feasible,
                            rho,
                            output::fmt_f64(long_run),
                            !trace.saturated_samples.is_empty()
                        ));
                    }
                    Err(e) => {
                        csv.push_str(&format!(
                            "{},{},{},{},{},nan,false,error: {}\n",
                            output::fmt_f64(tau),
                            output::fmt_f64(mu),
                            output::fmt_f64(delta),
                            feasible,
                            rho,
                            e
                        ));
                    }
                }
            }
        }
    }
    output::write_file(out, "sweep.csv", &csv).map_err(|e| e.to_string())?;
    println!(
        "{} grid points -> {}",
        taus.len() * mus.len() * deltas.len(),
        out.join("sweep.csv").display()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(csv: Option<&Path>) -> Result<ExitCode, String> {
    let rep = report::verify_published_tables();
    for r in &rep.rows {
        println!(
            "{} {:<34} expected {:<12} computed {:<22} (tol {:.1e})",
            if r.pass { "PASS" } else { "FAIL" },
            r.name,
            r.expected,
            r.computed,
            r.tolerance
        );
    }
    if let Some(path) = csv {
        if let Some(dir) = path.parent() {
            if !dir.as_os_str().is_empty() {
                std::fs::create_dir_all(dir).map_err(|e| e.to_string())?;
            }
        }
        std::fs::write(path, output::verify_csv(&rep)).map_err(|e| e.to_string())?;
    }
    if rep.all_pass() {
        println!("verify: all {} checks passed", rep.rows.len());
        Ok(ExitCode::SUCCESS)
    } else {
        let failures = rep.rows.iter().filter(|r| !r.pass).count();
        println!("verify: {failures} of {} checks FAILED", rep.rows.len());
        Ok(ExitCode::from(1))
    }
}

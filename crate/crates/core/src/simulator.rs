//! Exact closed-loop propagation between sampling instants, the reference
//! orbit, and trace recording for both zoom regimes.

use nalgebra::DVector;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::graph::DirectedGraph;
use crate::propagation::{certificate, Certificate, EpsNormFrame, SystemMatrices};
use crate::quantizer::{coupling_input, UniformQuantizer, ZoomEvent, ZoomSchedule, ZoomStage};
use crate::schur::{CVector, C64};
use crate::spectrum::{spectral_decomposition, LaplacianSpectrum};
use crate::stability::feasible_windows;

/// The xi-weighted average orbit: an exact uncoupled harmonic motion that
/// the network follows in its consensus direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceOrbit {
    pub gamma0: f64,
    pub nu0: f64,
    pub omega: f64,
}

impl ReferenceOrbit {
    pub fn from_initial(
        xi: &DVector<f64>,
        r0: &DVector<f64>,
        v0: &DVector<f64>,
        omega: f64,
    ) -> Self {
        Self {
            gamma0: xi.dot(r0),
            nu0: xi.dot(v0),
            omega,
        }
    }

    /// `(gamma(t), nu(t))`.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        let (s, c) = (self.omega * t).sin_cos();
        (
            c * self.gamma0 + s * self.nu0 / self.omega,
            -self.omega * s * self.gamma0 + c * self.nu0,
        )
    }

    /// Conserved quantity `gamma^2 + nu^2 / omega^2`.
    pub fn energy(&self) -> f64 {
        self.gamma0 * self.gamma0 + self.nu0 * self.nu0 / (self.omega * self.omega)
    }

    /// Orbit amplitude bound `M_0 = sqrt(omega^2 gamma0^2 + nu0^2)`.
    pub fn amplitude(&self) -> f64 {
        (self.omega * self.omega * self.gamma0 * self.gamma0 + self.nu0 * self.nu0).sqrt()
    }

    /// Synchronization error `||[r; v] - [gamma, nu] (x) 1||_inf` at time t.
    pub fn sync_error(&self, t: f64, r: &DVector<f64>, v: &DVector<f64>) -> f64 {
        let (g, nu) = self.eval(t);
        let er = r.iter().map(|x| (x - g).abs()).fold(0.0, f64::max);
        let ev = v.iter().map(|x| (x - nu).abs()).fold(0.0, f64::max);
        er.max(ev)
    }

    /// Raw error vector `[r - gamma 1; v - nu 1]`.
    pub fn sync_error_vec(&self, t: f64, r: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        let (g, nu) = self.eval(t);
        let n = r.len();
        DVector::from_fn(2 * n, |i, _| if i < n { r[i] - g } else { v[i - n] - nu })
    }
}

/// Per-node oscillator energy `r^2 + v^2 / omega^2`.
pub fn harmonic_energy(omega: f64, r: f64, v: f64) -> f64 {
    r * r + v * v / (omega * omega)
}

/// Exact one-interval step `X(t_k + dt) = E(dt) X(t_k) + F(dt) C(t_k)` for a
/// piecewise-constant residual input held over the interval.
pub fn step_exact(
    sys: &SystemMatrices,
    x: &DVector<f64>,
    c_residual: &DVector<f64>,
    dt: f64,
) -> Result<DVector<f64>> {
    let n2 = 2 * sys.node_count();
    if x.len() != n2 || c_residual.len() != n2 {
        return Err(Error::DimensionMismatch {
            expected: n2,
            got: x.len().max(c_residual.len()),
        });
    }
    let (e, f) = sys.flow(dt)?;
    Ok(&e * x + &f * c_residual)
}

/// Zoom configuration of a scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ZoomConfig {
    Fixed { mu: f64 },
    Adjustable,
}

/// Initial condition: explicit vectors, or a seeded draw inside the capture
/// set `S1` (scaled by `scale`), with an explicit average orbit.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    Explicit {
        r: Vec<f64>,
        v: Vec<f64>,
    },
    Seeded {
        scale: f64,
        gamma0: f64,
        nu0: f64,
        zero_average: bool,
    },
}

/// A validated simulation scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub graph: DirectedGraph,
    pub omega: f64,
    pub tau: f64,
    pub delta: f64,
    pub m_range: f64,
    pub zoom: ZoomConfig,
    pub eps_slack: f64,
    pub eps_norm: Option<f64>,
    pub horizon: f64,
    pub dense_substeps: usize,
    pub seed: u64,
    pub initial: InitialState,
    pub allow_infeasible: bool,
}

/// One recorded state.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub k: usize,
    pub t: f64,
    pub r: DVector<f64>,
    pub v: DVector<f64>,
    pub mu: f64,
    pub stage: ZoomStage,
    pub err_inf: f64,
    /// `||P^dagger (X - reference)||_eps` when a frame exists.
    pub eps_norm: Option<f64>,
    pub saturated: bool,
}

/// Full record of a run.
#[derive(Debug, Clone)]
pub struct SimulationTrace {
    pub samples: Vec<Sample>,
    /// Interior sub-step states when `dense_substeps > 1`.
    pub dense: Vec<Sample>,
    pub k0: Option<usize>,
    /// Sample indices at which the zoom-in dwell advanced.
    pub dwell_boundaries: Vec<usize>,
    pub saturated_samples: Vec<usize>,
    pub certificate: Option<Certificate>,
    pub orbit: ReferenceOrbit,
    pub xi: DVector<f64>,
    pub feasible_tau: bool,
    pub warnings: Vec<String>,
}

struct Prepared {
    sys: SystemMatrices,
    spectrum: LaplacianSpectrum,
    quantizer: UniformQuantizer,
    frame: Option<EpsNormFrame>,
    certificate: Option<Certificate>,
    feasible: bool,
    steps: usize,
    warnings: Vec<String>,
}

fn prepare(sc: &Scenario) -> Result<Prepared> {
    if !sc.graph.is_strongly_connected() {
        return Err(Error::NotStronglyConnected);
    }
    let quantizer = UniformQuantizer::new(sc.delta, sc.m_range)?;
    if matches!(sc.zoom, ZoomConfig::Adjustable) && sc.m_range <= 2.0 * sc.delta {
        return Err(Error::RangeBelowTwoDelta {
            m: sc.m_range,
            delta: sc.delta,
        });
    }
    let steps_f = sc.horizon / sc.tau;
    let steps = steps_f.round();
    if !(sc.horizon > 0.0) || (steps_f - steps).abs() > 1e-9 * steps.max(1.0) || steps < 1.0 {
        return Err(Error::BadHorizon(sc.horizon, sc.tau));
    }
    let steps = steps as usize;
    let l = sc.graph.laplacian();
    let spectrum = spectral_decomposition(&l)?;
    let sys = SystemMatrices::new(sc.omega, sc.tau, l)?;
    let report = feasible_windows(spectrum.lambdas(), sc.omega, 4)?;
    let feasible = report.is_feasible(sc.tau);
    let mut warnings = Vec::new();
    if !feasible && !sc.allow_infeasible {
        return Err(Error::InfeasibleTau(sc.tau));
    }
    let (frame, cert) = if feasible {
        match EpsNormFrame::build(&sys, &spectrum, sc.eps_norm) {
            Ok(frame) => {
                match certificate(&sys, &frame, &spectrum, sc.delta, sc.m_range, sc.eps_slack) {
                    Ok(c) => (Some(frame), Some(c)),
                    Err(e) => {
                        if matches!(sc.zoom, ZoomConfig::Adjustable) {
                            return Err(e);
                        }
                        warnings.push(format!("certificate unavailable: {e}"));
                        (Some(frame), None)
                    }
                }
            }
            Err(e) => {
                if matches!(sc.zoom, ZoomConfig::Adjustable) {
                    return Err(e);
                }
                warnings.push(format!("eps-norm frame unavailable: {e}"));
                (None, None)
            }
        }
    } else {
        if matches!(sc.zoom, ZoomConfig::Adjustable) {
            return Err(Error::InfeasibleTau(sc.tau));
        }
        warnings.push(format!(
            "tau = {} is outside every feasibility window; running without a certificate",
            sc.tau
        ));
        (None, None)
    };
    Ok(Prepared {
        sys,
        spectrum,
        quantizer,
        frame,
        certificate: cert,
        feasible,
        steps,
        warnings,
    })
}

fn initial_state(sc: &Scenario, prep: &Prepared) -> Result<DVector<f64>> {
    let n = sc.graph.node_count();
    match &sc.initial {
        InitialState::Explicit { r, v } => {
            if r.len() != n || v.len() != n {
                return Err(Error::BadInitialState {
                    expected: n,
                    got: r.len().max(v.len()),
                });
            }
            let mut x = DVector::zeros(2 * n);
            for i in 0..n {
                x[i] = r[i];
                x[n + i] = v[i];
            }
            Ok(x)
        }
        InitialState::Seeded {
            scale,
            gamma0,
            nu0,
            zero_average,
        } => {
            let cert = prep.certificate.as_ref().ok_or_else(|| {
                Error::SeedNeedsCertificate("no contraction certificate for this scenario".into())
            })?;
            let frame = prep.frame.as_ref().expect("certificate implies frame");
            let mu_ref = match sc.zoom {
                ZoomConfig::Fixed { mu } => mu,
                ZoomConfig::Adjustable => 1.0,
            };
            let mut rng = ChaCha12Rng::seed_from_u64(sc.seed);
            let mut draw = DVector::zeros(2 * n);
            for i in 0..2 * n {
                draw[i] = rng.gen_range(-1.0..1.0);
            }
            let xi = prep.spectrum.xi();
            let mut r_d = draw.rows(0, n).into_owned();
            let mut v_d = draw.rows(n, n).into_owned();
            let (rm, vm) = (xi.dot(&r_d), xi.dot(&v_d));
            for i in 0..n {
                r_d[i] -= rm;
                v_d[i] -= vm;
            }
            let mut x_d = DVector::zeros(2 * n);
            for i in 0..n {
                x_d[i] = r_d[i];
                x_d[n + i] = v_d[i];
            }
            let x_hat = project_disagreement(prep, &x_d);
            let nrm = frame.vector_norm(&x_hat);
            if !(nrm > 0.0) {
                return Err(Error::SeedNeedsCertificate(
                    "seeded draw produced a zero disagreement direction".into(),
                ));
            }
            let factor = scale * cert.s1_radius * mu_ref / nrm;
            x_d *= factor;
            let (g0, n0) = if *zero_average {
                (0.0, 0.0)
            } else {
                (*gamma0, *nu0)
            };
            for i in 0..n {
                x_d[i] += g0;
                x_d[n + i] += n0;
            }
            Ok(x_d)
        }
    }
}

fn project_disagreement(prep: &Prepared, err: &DVector<f64>) -> CVector {
    let n = prep.spectrum.node_count();
    let p_dag = prep.spectrum.p_hat_dagger();
    let m = n - 1;
    let mut out = CVector::zeros(2 * m);
    for i in 0..m {
        let mut top = C64::new(0.0, 0.0);
        let mut bot = C64::new(0.0, 0.0);
        for j in 0..n {
            top += p_dag[(i, j)] * C64::new(err[j], 0.0);
            bot += p_dag[(i, j)] * C64::new(err[n + j], 0.0);
        }
        out[i] = top;
        out[m + i] = bot;
    }
    out
}

/// Run a scenario to completion.
///
/// Identical scenarios produce bit-identical traces: every operation is a
/// fixed-order floating-point computation and the seeded draw uses a
/// counter-based generator.
pub fn simulate(sc: &Scenario) -> Result<SimulationTrace> {
    let prep = prepare(sc)?;
    let n = sc.graph.node_count();
    let mut x = initial_state(sc, &prep)?;

    let xi = prep.spectrum.xi().clone();
    let r0 = x.rows(0, n).into_owned();
    let v0 = x.rows(n, n).into_owned();
    let orbit = ReferenceOrbit::from_initial(&xi, &r0, &v0, sc.omega);

    let mut warnings = prep.warnings.clone();
    if let (ZoomConfig::Fixed { mu }, Some(cert)) = (&sc.zoom, prep.certificate.as_ref()) {
        let bound = cert.xi_bar * mu * sc.m_range;
        if orbit.amplitude() > bound {
            warnings.push(format!(
                "average orbit amplitude M0 = {:.6} exceeds xi_bar*mu*M = {:.6}; \
                 the fixed-zoom non-saturation induction is not guaranteed",
                orbit.amplitude(),
                bound
            ));
        }
    }

    let mut schedule = match sc.zoom {
        ZoomConfig::Fixed { mu } => ZoomSchedule::fixed(mu)?,
        ZoomConfig::Adjustable => {
            let cert = prep.certificate.as_ref().expect("checked in prepare");
            ZoomSchedule::adjustable(sc.delta, cert.theta, cert.dwell_samples)?
        }
    };

    // partial-interval flows for dense output: coupled (E, F) and free exp(A dt)
    let mut sub_flows = Vec::new();
    let mut sub_free = Vec::new();
    if sc.dense_substeps > 1 {
        for j in 1..sc.dense_substeps {
            let dt = j as f64 * sc.tau / sc.dense_substeps as f64;
            sub_flows.push(prep.sys.flow(dt)?);
            let (free, _) = crate::propagation::flow_blocks(sc.omega, dt, n)?;
            sub_free.push(free);
        }
    }

    let mut trace = SimulationTrace {
        samples: Vec::with_capacity(prep.steps + 1),
        dense: Vec::new(),
        k0: None,
        dwell_boundaries: Vec::new(),
        saturated_samples: Vec::new(),
        certificate: prep.certificate,
        orbit,
        xi: xi.clone(),
        feasible_tau: prep.feasible,
        warnings,
    };

    for k in 0..=prep.steps {
        let t = k as f64 * sc.tau;
        let r = x.rows(0, n).into_owned();
        let v = x.rows(n, n).into_owned();
        let (mu, event) = schedule.mu_for_sample(k, &v, &prep.quantizer)?;
        match event {
            ZoomEvent::Latched { k0 } => trace.k0 = Some(k0),
            ZoomEvent::DwellAdvanced { .. } => trace.dwell_boundaries.push(k),
            ZoomEvent::None => {}
        }
        let stage = schedule.stage();
        let err_inf = orbit.sync_error(t, &r, &v);
        let eps_norm = prep.frame.as_ref().map(|f| {
            let err = orbit.sync_error_vec(t, &r, &v);
            f.vector_norm(&project_disagreement(&prep, &err))
        });
        let quantizing = !matches!(stage, ZoomStage::ZoomingOut) && mu > 0.0;
        let saturated = quantizing && prep.quantizer.saturates(mu, &v);
        if saturated {
            trace.saturated_samples.push(k);
        }
        trace.samples.push(Sample {
            k,
            t,
            r: r.clone(),
            v: v.clone(),
            mu,
            stage,
            err_inf,
            eps_norm,
            saturated,
        });
        if k == prep.steps {
            break;
        }

        if quantizing {
            let qv = prep.quantizer.quantize_vec(mu, &v)?;
            let residual = &qv - &v;
            let u_res = coupling_input(prep.sys.laplacian(), &residual);
            let mut c_vec = DVector::zeros(2 * n);
            for i in 0..n {
                c_vec[n + i] = u_res[i];
            }
            emit_dense(
                sc,
                &prep,
                &mut trace,
                k,
                &x,
                Some(&c_vec),
                &sub_flows,
                &orbit,
            );
            x = prep.sys.one_period() * &x + prep.sys.forcing() * &c_vec;
        } else {
            // zoom-out stage: control is identically zero, free harmonic flow
            emit_dense_free(sc, &mut trace, k, &x, &sub_free, &orbit, mu, stage);
            x = prep.sys.exp_a() * &x;
        }
    }
    Ok(trace)
}

#[allow(clippy::too_many_arguments)]
fn emit_dense(
    sc: &Scenario,
    prep: &Prepared,
    trace: &mut SimulationTrace,
    k: usize,
    x: &DVector<f64>,
    c_vec: Option<&DVector<f64>>,
    sub_flows: &[(nalgebra::DMatrix<f64>, nalgebra::DMatrix<f64>)],
    orbit: &ReferenceOrbit,
) {
    if sc.dense_substeps <= 1 {
        return;
    }
    let n = sc.graph.node_count();
    let last = trace.samples.last().expect("sample pushed before stepping");
    let (mu, stage) = (last.mu, last.stage);
    for (j, (e, f)) in sub_flows.iter().enumerate() {
        let dt = (j + 1) as f64 * sc.tau / sc.dense_substeps as f64;
        let t = k as f64 * sc.tau + dt;
        let xj = match c_vec {
            Some(c) => e * x + f * c,
            None => e * x,
        };
        let r = xj.rows(0, n).into_owned();
        let v = xj.rows(n, n).into_owned();
        let err_inf = orbit.sync_error(t, &r, &v);
        let eps_norm = prep.frame.as_ref().map(|fr| {
            let err = orbit.sync_error_vec(t, &r, &v);
            fr.vector_norm(&project_disagreement(prep, &err))
        });
        trace.dense.push(Sample {
            k,
            t,
            r,
            v,
            mu,
            stage,
            err_inf,
            eps_norm,
            saturated: false,
        });
    }
}

#[allow(clippy::too_many_arguments)]
fn emit_dense_free(
    sc: &Scenario,
    trace: &mut SimulationTrace,
    k: usize,
    x: &DVector<f64>,
    sub_free: &[nalgebra::DMatrix<f64>],
    orbit: &ReferenceOrbit,
    mu: f64,
    stage: ZoomStage,
) {
    if sc.dense_substeps <= 1 {
        return;
    }
    let n = sc.graph.node_count();
    for (j, e) in sub_free.iter().enumerate() {
        let dt = (j + 1) as f64 * sc.tau / sc.dense_substeps as f64;
        let t = k as f64 * sc.tau + dt;
        let xj = e * x;
        let r = xj.rows(0, n).into_owned();
        let v = xj.rows(n, n).into_owned();
        let err_inf = orbit.sync_error(t, &r, &v);
        trace.dense.push(Sample {
            k,
            t,
            r,
            v,
            mu,
            stage,
            err_inf,
            eps_norm: None,
            saturated: false,
        });
    }
}

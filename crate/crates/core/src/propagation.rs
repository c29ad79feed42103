//! Closed-form sampled flow matrices, the reduced one-period map, the
//! epsilon-scaled norm frame, and the convergence certificate built from it.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::graph::Laplacian;
use crate::schur::{
    inf_norm, inf_norm_vec, sorted_schur, triangular_eigenvectors, CMatrix, CVector, C64,
};
use crate::spectrum::LaplacianSpectrum;
use crate::stability::SIN_BOUNDARY;

/// Closed-form blocks of `exp(A dt)` and `F(dt) = integral exp(A s) ds`.
///
/// `A = [[0, I], [-w^2 I, 0]]`, so
/// `exp(A dt) = [[cos I, sin/w I], [-w sin I, cos I]]` and
/// `F(dt) = [[sin/w I, (1-cos)/w^2 I], [(cos-1) I, sin/w I]]`.
pub fn flow_blocks(omega: f64, dt: f64, n: usize) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    if !(dt > 0.0) {
        return Err(Error::NonpositiveDt(dt));
    }
    let (s, c) = (omega * dt).sin_cos();
    let mut exp_a = DMatrix::<f64>::zeros(2 * n, 2 * n);
    let mut f = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        exp_a[(i, i)] = c;
        exp_a[(i, n + i)] = s / omega;
        exp_a[(n + i, i)] = -omega * s;
        exp_a[(n + i, n + i)] = c;
        f[(i, i)] = s / omega;
        f[(i, n + i)] = (1.0 - c) / (omega * omega);
        f[(n + i, i)] = c - 1.0;
        f[(n + i, n + i)] = s / omega;
    }
    Ok((exp_a, f))
}

/// One-sampling-period matrices of the closed loop.
#[derive(Debug, Clone)]
pub struct SystemMatrices {
    omega: f64,
    tau: f64,
    laplacian: Laplacian,
    exp_a: DMatrix<f64>,
    f: DMatrix<f64>,
    b: DMatrix<f64>,
    e: DMatrix<f64>,
}

impl SystemMatrices {
    pub fn new(omega: f64, tau: f64, laplacian: Laplacian) -> Result<Self> {
        if (omega * tau).sin().abs() < SIN_BOUNDARY {
            return Err(Error::DegenerateSampling((omega * tau).sin()));
        }
        let n = laplacian.dim();
        let (exp_a, f) = flow_blocks(omega, tau, n)?;
        let mut b = DMatrix::<f64>::zeros(2 * n, 2 * n);
        let lm = laplacian.matrix();
        for i in 0..n {
            for j in 0..n {
                b[(n + i, n + j)] = -lm[(i, j)];
            }
        }
        let e = &exp_a + &f * &b;
        Ok(Self {
            omega,
            tau,
            laplacian,
            exp_a,
            f,
            b,
            e,
        })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn node_count(&self) -> usize {
        self.laplacian.dim()
    }

    pub fn laplacian(&self) -> &Laplacian {
        &self.laplacian
    }

    /// Free flow over one period, `exp(A tau)`.
    pub fn exp_a(&self) -> &DMatrix<f64> {
        &self.exp_a
    }

    /// Forcing integral over one period.
    pub fn forcing(&self) -> &DMatrix<f64> {
        &self.f
    }

    /// Coupling block `blockdiag(0, -L)`.
    pub fn coupling(&self) -> &DMatrix<f64> {
        &self.b
    }

    /// One-period closed-loop map `E = exp(A tau) + F B`.
    pub fn one_period(&self) -> &DMatrix<f64> {
        &self.e
    }

    /// Flow matrices for a partial interval `0 < dt <= tau`:
    /// `X(t_k + dt) = E(dt) X(t_k) + F(dt) C(t_k)`.
    pub fn flow(&self, dt: f64) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        let n = self.laplacian.dim();
        let (exp_a, f) = flow_blocks(self.omega, dt, n)?;
        let e = &exp_a + &f * &self.b;
        Ok((e, f))
    }

    /// Doubled reduced basis `blockdiag(p_hat, p_hat)`.
    pub fn doubled_basis(&self, spectrum: &LaplacianSpectrum) -> Result<CMatrix> {
        let n = self.laplacian.dim();
        if spectrum.node_count() != n {
            return Err(Error::BasisMismatch(spectrum.node_count(), n));
        }
        let p = spectrum.p_hat();
        let mut pd = CMatrix::zeros(2 * n, 2 * (n - 1));
        for i in 0..n {
            for j in 0..n - 1 {
                pd[(i, j)] = p[(i, j)];
                pd[(n + i, n - 1 + j)] = p[(i, j)];
            }
        }
        Ok(pd)
    }

    /// Reduced one-period map on the disagreement subspace,
    /// `E_hat = P_hat^dagger E P_hat` with the doubled basis.
    pub fn reduced_map(&self, spectrum: &LaplacianSpectrum) -> Result<CMatrix> {
        let pd = self.doubled_basis(spectrum)?;
        let ec = self.e.map(|v| C64::new(v, 0.0));
        Ok(pd.adjoint() * ec * pd)
    }
}

/// Vector and matrix norms `||D U . ||_inf` with `||E_hat||_eps` within
/// `epsilon` of the spectral radius, plus the cached certificate constants.
#[derive(Debug, Clone)]
pub struct EpsNormFrame {
    epsilon: f64,
    rho: f64,
    norm_ehat: f64,
    u: CMatrix,
    u_inv: CMatrix,
    /// Positive diagonal of `D_eps`.
    d: DVector<f64>,
    c_out: Option<f64>,
    c_in: Option<f64>,
}

impl EpsNormFrame {
    /// Norm machinery for a bare contraction matrix (no certificate
    /// constants). `epsilon` defaults to `(1 - rho)/2`.
    pub fn for_matrix(e_hat: &CMatrix, epsilon: Option<f64>) -> Result<Self> {
        Self::construct(e_hat, epsilon, None)
    }

    /// Full frame for a reduced system, caching
    /// `c_out = ||P U^-1 D^-1||_inf` and `c_in = ||D U P^dagger F B||_inf`.
    pub fn build(
        sys: &SystemMatrices,
        spectrum: &LaplacianSpectrum,
        epsilon: Option<f64>,
    ) -> Result<Self> {
        let e_hat = sys.reduced_map(spectrum)?;
        let pd = sys.doubled_basis(spectrum)?;
        let fb = (&sys.f * &sys.b).map(|v| C64::new(v, 0.0));
        let b_side = pd.adjoint() * &fb;
        let mut frame = Self::construct(&e_hat, epsilon, Some(&b_side))?;
        let m = e_hat.nrows();
        frame.c_in = Some(frame.weighted_norm(&b_side));
        let uid = DMatrix::from_fn(m, m, |i, j| frame.u_inv[(i, j)] / frame.d[j]);
        frame.c_out = Some(inf_norm(&(&pd * &uid)));
        Ok(frame)
    }

    /// Shared constructor. Route one diagonalizes `E_hat` (norm equals the
    /// spectral radius exactly, diagonal scaling chosen to equilibrate the
    /// forcing response); when the eigenbasis is unusable it falls back to
    /// the unitary Schur basis with the textbook power scaling
    /// `D = diag(1, 1/delta, 1/delta^2, ...)`.
    fn construct(e_hat: &CMatrix, epsilon: Option<f64>, equil: Option<&CMatrix>) -> Result<Self> {
        let m = e_hat.nrows();
        let (z, t) = sorted_schur(e_hat)?;
        let rho = (0..m).map(|i| t[(i, i)].norm()).fold(0.0, f64::max);
        if rho >= 1.0 {
            return Err(Error::NotContractive(rho));
        }
        let epsilon = epsilon.unwrap_or((1.0 - rho) / 2.0);
        if !(epsilon > 0.0) || rho + epsilon >= 1.0 {
            return Err(Error::EpsilonTooSmall {
                eps: epsilon,
                norm: rho + epsilon,
            });
        }

        if let Some(frame) = Self::try_diagonal_route(e_hat, &z, &t, rho, epsilon, equil) {
            return Ok(frame);
        }

        // unitary Schur basis + per-position power scaling
        let u = z.adjoint();
        let u_inv = z.clone();
        let mut s_max = 0.0f64;
        for i in 0..m {
            let row: f64 = (i + 1..m).map(|j| t[(i, j)].norm()).sum();
            s_max = s_max.max(row);
        }
        let delta = if s_max == 0.0 {
            1.0
        } else {
            (epsilon / s_max).clamp(1e-12, 1.0)
        };
        let d = DVector::from_fn(m, |i, _| delta.powi(-(i as i32)));
        let mut frame = Self {
            epsilon,
            rho,
            norm_ehat: 0.0,
            u,
            u_inv,
            d,
            c_out: None,
            c_in: None,
        };
        let norm = frame.matrix_norm(e_hat);
        if norm >= 1.0 {
            return Err(Error::EpsilonTooSmall { eps: epsilon, norm });
        }
        frame.norm_ehat = norm;
        Ok(frame)
    }

    fn try_diagonal_route(
        e_hat: &CMatrix,
        z: &CMatrix,
        t: &CMatrix,
        rho: f64,
        epsilon: f64,
        equil: Option<&CMatrix>,
    ) -> Option<Self> {
        let m = t.nrows();
        let scale = inf_norm(t).max(1.0);
        let y = triangular_eigenvectors(t);
        let v = z * y;
        let u = v.clone().lu().try_inverse()?;
        // a near-defective eigenbasis formally satisfies the norm contract but
        // poisons every downstream constant; hand those to the Schur route
        if inf_norm(&v) * inf_norm(&u) > 1e10 {
            return None;
        }
        // equilibration: scale column k of the eigenbasis by the l1 response
        // of row k of U * (P^dagger F B); leaves the diagonal norm intact
        let s = match equil {
            Some(bs) => {
                let ub = &u * bs;
                let mut s = DVector::from_fn(m, |i, _| {
                    (0..ub.ncols()).map(|j| ub[(i, j)].norm()).sum::<f64>()
                });
                let top = s.iter().cloned().fold(0.0, f64::max);
                if top <= 0.0 {
                    return None;
                }
                for x in s.iter_mut() {
                    *x = x.max(1e-12 * top);
                }
                s
            }
            None => DVector::from_element(m, 1.0),
        };
        let d = s.map(|x| 1.0 / x);
        let mut frame = Self {
            epsilon,
            rho,
            norm_ehat: 0.0,
            u,
            u_inv: v,
            d,
            c_out: None,
            c_in: None,
        };
        let norm = frame.matrix_norm(e_hat);
        // accept only if the diagonalization is numerically trustworthy:
        // the norm must land in [rho, rho + epsilon] as the contract demands
        if !norm.is_finite() || norm > rho + epsilon.min(1e-6 * scale.max(1.0)) {
            return None;
        }
        frame.norm_ehat = norm.max(rho);
        Some(frame)
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// `||E_hat||_eps`, guaranteed in `[rho, rho + epsilon]`.
    pub fn norm_ehat(&self) -> f64 {
        self.norm_ehat
    }

    pub fn u(&self) -> &CMatrix {
        &self.u
    }

    pub fn d_eps(&self) -> &DVector<f64> {
        &self.d
    }

    /// `||P U^-1 D^-1||_inf` (doubled basis); present on built frames.
    pub fn c_out(&self) -> Option<f64> {
        self.c_out
    }

    /// `||D U P^dagger F B||_inf`; present on built frames.
    pub fn c_in(&self) -> Option<f64> {
        self.c_in
    }

    /// Vector norm `||D U x||_inf`.
    pub fn vector_norm(&self, x: &CVector) -> f64 {
        let ux = &self.u * x;
        let scaled = CVector::from_fn(ux.len(), |i, _| ux[i] * C64::new(self.d[i], 0.0));
        inf_norm_vec(&scaled)
    }

    /// Row-weighted norm `||D U X||_inf` of a forcing-side matrix.
    pub fn weighted_norm(&self, x: &CMatrix) -> f64 {
        let ux = &self.u * x;
        (0..ux.nrows())
            .map(|i| self.d[i] * (0..ux.ncols()).map(|j| ux[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Matrix norm `||D U S U^-1 D^-1||_inf`.
    pub fn matrix_norm(&self, s: &CMatrix) -> f64 {
        let m = s.nrows();
        let inner = &self.u * s * &self.u_inv;
        let scaled = CMatrix::from_fn(m, m, |i, j| inner[(i, j)] * (self.d[i] / self.d[j]));
        inf_norm(&scaled)
    }
}

/// Convergence certificate of the fixed-zoom regime, reused by the
/// adjustable-zoom schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certificate {
    pub rho: f64,
    pub norm_eps: f64,
    pub c_out: f64,
    pub c_in: f64,
    pub xi_bar: f64,
    pub delta: f64,
    pub m_range: f64,
    pub eps_slack: f64,
    /// Minimal admissible quantizer range (with the slack factor), so that
    /// `theta < 1` and `s2_radius < s1_radius` hold exactly when
    /// `m_range > m_threshold`.
    pub m_threshold: f64,
    /// Contraction of the zoom factor per dwell.
    pub theta: f64,
    /// Dwell time in seconds (a positive integer multiple of tau).
    pub t_dwell: f64,
    pub dwell_samples: usize,
    /// Capture set radius per unit zoom, in the eps-norm.
    pub s1_radius: f64,
    /// Target set radius per unit zoom, in the eps-norm.
    pub s2_radius: f64,
}

/// Assemble the certificate quantities for a quantizer `(delta, m_range)`
/// and slack `eps_slack`.
pub fn certificate(
    sys: &SystemMatrices,
    frame: &EpsNormFrame,
    spectrum: &LaplacianSpectrum,
    delta: f64,
    m_range: f64,
    eps_slack: f64,
) -> Result<Certificate> {
    if !(m_range > delta) || !(delta > 0.0) {
        return Err(Error::RangeBelowDelta { m: m_range, delta });
    }
    if m_range <= 2.0 * delta {
        return Err(Error::RangeBelowTwoDelta { m: m_range, delta });
    }
    let (c_out, c_in) = match (frame.c_out(), frame.c_in()) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(Error::EigensolverFailure(
                "certificate requires a frame built from the system matrices".into(),
            ))
        }
    };
    let nrm = frame.norm_ehat();
    let xi_bar = spectrum.xi_bar();
    let denom = (1.0 - xi_bar) * (1.0 - nrm);
    let m_threshold = c_out * c_in * delta * (1.0 + eps_slack) / denom;
    if m_range <= m_threshold {
        return Err(Error::MBelowThreshold {
            m: m_range,
            threshold: m_threshold,
        });
    }
    let theta = m_threshold / m_range;
    if theta >= 1.0 {
        return Err(Error::ThetaNotContractive(theta));
    }
    let arg = c_out * c_in * delta * eps_slack / (denom * m_range);
    let dwell_samples = if arg >= 1.0 || arg <= 0.0 {
        1
    } else {
        ((arg.ln() / nrm.ln()).ceil() as usize).max(1)
    };
    Ok(Certificate {
        rho: frame.rho(),
        norm_eps: nrm,
        c_out,
        c_in,
        xi_bar,
        delta,
        m_range,
        eps_slack,
        m_threshold,
        theta,
        t_dwell: dwell_samples as f64 * sys.tau(),
        dwell_samples,
        s1_radius: (1.0 - xi_bar) * m_range / c_out,
        s2_radius: c_in * delta * (1.0 + eps_slack) / (1.0 - nrm),
    })
}

/// Inter-sample bound factors: for each sub-interval length `dt`, the
/// frame norm of the partial-interval reduced map `E_hat(dt)` and the
/// forcing constant `||D U P^dagger F(dt) B||_inf`. Both are bounded over
/// the interval and recover the per-period constants at `dt = tau`; they
/// quantify how far the state can leave the target set between samples,
/// without a single closed-form constant being asserted.
pub fn intersample_norms(
    sys: &SystemMatrices,
    spectrum: &LaplacianSpectrum,
    frame: &EpsNormFrame,
    substeps: usize,
) -> Result<Vec<(f64, f64, f64)>> {
    let pd = sys.doubled_basis(spectrum)?;
    let mut out = Vec::with_capacity(substeps);
    for j in 1..=substeps.max(1) {
        let dt = j as f64 * sys.tau() / substeps.max(1) as f64;
        let (e_dt, f_dt) = sys.flow(dt)?;
        let ec = e_dt.map(|v| C64::new(v, 0.0));
        let e_hat_dt = pd.adjoint() * ec * &pd;
        let fb = (f_dt * &sys.b).map(|v| C64::new(v, 0.0));
        let b_side = pd.adjoint() * fb;
        out.push((
            dt,
            frame.matrix_norm(&e_hat_dt),
            frame.weighted_norm(&b_side),
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::DirectedGraph;
    use crate::spectrum::spectral_decomposition;
    use crate::stability::mode_quadratic_roots;

    fn omega_ref() -> f64 {
        (std::f64::consts::PI / 2.0).sqrt()
    }

    #[test]
    fn flow_at_reference_parameters() {
        let w = omega_ref();
        let (e, _f) = flow_blocks(w, 0.1, 3).unwrap();
        let c = (w * 0.1).cos();
        for i in 0..3 {
            assert!((e[(i, i)] - c).abs() < 1e-15);
        }
    }

    #[test]
    fn flow_rejects_nonpositive_dt() {
        assert!(flow_blocks(1.0, 0.0, 2).is_err());
        assert!(flow_blocks(1.0, -0.1, 2).is_err());
    }

    #[test]
    fn consensus_direction_is_decoupled() {
        // E [c 1; 0] = [c cos 1; -c w sin 1]: L 1 = 0 kills the coupling
        let g = DirectedGraph::standin10();
        let sys = SystemMatrices::new(omega_ref(), 0.1, g.laplacian()).unwrap();
        let n = 10;
        let mut x = DVector::<f64>::zeros(2 * n);
        for i in 0..n {
            x[i] = 3.5;
        }
        let y = sys.one_period() * &x;
        let (s, c) = (sys.omega() * sys.tau()).sin_cos();
        for i in 0..n {
            assert!((y[i] - 3.5 * c).abs() < 1e-12);
            assert!((y[n + i] + 3.5 * sys.omega() * s).abs() < 1e-12);
        }
    }

    #[test]
    fn reduced_map_matches_mode_roots() {
        let g = DirectedGraph::standin10();
        let l = g.laplacian();
        let spectrum = spectral_decomposition(&l).unwrap();
        let sys = SystemMatrices::new(omega_ref(), 0.1, l).unwrap();
        let e_hat = sys.reduced_map(&spectrum).unwrap();
        let mut expect: Vec<C64> = Vec::new();
        for &lam in spectrum.lambdas() {
            let (x1, x2) = mode_quadratic_roots(lam, sys.omega(), sys.tau()).unwrap();
            expect.push(x1);
            expect.push(x2);
        }
        let got = e_hat
            .eigenvalues()
            .expect("dense eigensolve of the reduced map");
        let mut got: Vec<C64> = got.iter().cloned().collect();
        // multiset match with tolerance (sorting alone is unstable when real
        // parts of conjugate partners differ in the last ulp)
        for e in &expect {
            let (idx, dist) = got
                .iter()
                .enumerate()
                .map(|(i, g)| (i, (g - e).norm()))
                .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
                .unwrap();
            assert!(dist < 1e-8, "unmatched root {e} (closest at {dist:e})");
            got.swap_remove(idx);
        }
    }

    #[test]
    fn single_mode_reduced_map_is_the_block() {
        // n = 2, both arcs (strong connectivity): the single mode is
        // lambda_2 = a12 + a21 = 2
        let g = DirectedGraph::new(2, &[(1, 2, 1.5), (2, 1, 0.5)]).unwrap();
        let l = g.laplacian();
        let spectrum = spectral_decomposition(&l).unwrap();
        let sys = SystemMatrices::new(1.1, 0.3, l).unwrap();
        let e_hat = sys.reduced_map(&spectrum).unwrap();
        assert_eq!(e_hat.nrows(), 2);
        let (x1, x2) = mode_quadratic_roots(spectrum.lambdas()[0], 1.1, 0.3).unwrap();
        let tr = e_hat[(0, 0)] + e_hat[(1, 1)];
        let det = e_hat[(0, 0)] * e_hat[(1, 1)] - e_hat[(0, 1)] * e_hat[(1, 0)];
        assert!((tr - (x1 + x2)).norm() < 1e-12);
        assert!((det - x1 * x2).norm() < 1e-12);
    }

    #[test]
    fn jordan_block_frame_matches_textbook_scaling() {
        // [[a, 1], [0, a]] with eps: D = diag(1, 1/eps), norm = a + eps
        let a = 0.6;
        let eps = 0.05;
        let e = CMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(a, 0.0),
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(a, 0.0),
            ],
        );
        let frame = EpsNormFrame::for_matrix(&e, Some(eps)).unwrap();
        assert!((frame.norm_ehat() - (a + eps)).abs() < 1e-12);
        assert!((frame.d_eps()[1] - 1.0 / eps).abs() < 1e-9);
    }

    #[test]
    fn diagonalizable_frame_norm_equals_rho() {
        let e = CMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(0.5, 0.2),
                C64::new(0.3, 0.0),
                C64::new(0.0, 0.0),
                C64::new(-0.4, 0.1),
            ],
        );
        let frame = EpsNormFrame::for_matrix(&e, None).unwrap();
        assert!((frame.norm_ehat() - frame.rho()).abs() < 1e-10);
    }

    #[test]
    fn frame_rejects_expansive_maps() {
        let e = CMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(1.2, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.5, 0.0),
            ],
        );
        assert!(matches!(
            EpsNormFrame::for_matrix(&e, None),
            Err(Error::NotContractive(_))
        ));
    }

    #[test]
    fn certificate_identities_on_standin() {
        let g = DirectedGraph::standin10();
        let l = g.laplacian();
        let spectrum = spectral_decomposition(&l).unwrap();
        let sys = SystemMatrices::new(omega_ref(), 0.1, l).unwrap();
        let frame = EpsNormFrame::build(&sys, &spectrum, None).unwrap();
        assert!(frame.norm_ehat() >= frame.rho() - 1e-12);
        assert!(frame.norm_ehat() <= frame.rho() + frame.epsilon() + 1e-12);
        let cert = certificate(&sys, &frame, &spectrum, 0.5, 10.0, 0.01).unwrap();
        assert!(cert.theta < 1.0);
        // scaling identity S1(theta mu) = S2(mu)
        assert!((cert.theta * cert.s1_radius - cert.s2_radius).abs() < 1e-9 * cert.s2_radius);
        assert!(cert.s2_radius < cert.s1_radius);
        assert_eq!(cert.t_dwell, cert.dwell_samples as f64 * 0.1);
        // larger range: theta shrinks toward zero
        let cert_big = certificate(&sys, &frame, &spectrum, 0.5, 1e6, 0.01).unwrap();
        assert!(cert_big.theta < 1e-4);
        assert!(cert_big.dwell_samples >= cert.dwell_samples);
    }

    #[test]
    fn undirected_path_block_diagonalizes() {
        // symmetric L with real simple modes: no cross-mode coupling survives
        let g =
            DirectedGraph::new(3, &[(1, 2, 1.0), (2, 1, 1.0), (2, 3, 1.0), (3, 2, 1.0)]).unwrap();
        let l = g.laplacian();
        let spectrum = spectral_decomposition(&l).unwrap();
        let sys = SystemMatrices::new(1.2, 0.2, l).unwrap();
        let e_hat = sys.reduced_map(&spectrum).unwrap();
        let m = 2; // modes
        for i in 0..m {
            for j in 0..m {
                if i == j {
                    continue;
                }
                for &(a, b) in &[(i, j), (i, m + j), (m + i, j), (m + i, m + j)] {
                    assert!(
                        e_hat[(a, b)].norm() < 1e-12,
                        "cross-mode entry ({a},{b}) = {}",
                        e_hat[(a, b)]
                    );
                }
            }
        }
        // and the surviving blocks are real
        for i in 0..2 * m {
            for j in 0..2 * m {
                assert!(e_hat[(i, j)].im.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn table_system_frame_norm_in_bracket() {
        // graph-free assembled blocks from the published eigenvalues:
        // with eps = (1 - rho)/2 the norm lands in [rho, rho + eps]
        let omega = omega_ref();
        let lambdas = [
            C64::new(1.5594, 0.0),
            C64::new(6.3182, 0.0706),
            C64::new(6.3182, -0.0706),
            C64::new(2.9473, 0.0),
            C64::new(3.4893, 0.2867),
            C64::new(3.4893, -0.2867),
            C64::new(5.1342, 0.0),
            C64::new(4.7440, 0.0),
            C64::new(3.0, 0.0),
        ];
        let m = 2 * lambdas.len();
        let mut assembled = CMatrix::zeros(m, m);
        for (k, &lam) in lambdas.iter().enumerate() {
            let block = crate::stability::mode_block(lam, omega, 0.1);
            for a in 0..2 {
                for b in 0..2 {
                    assembled[(2 * k + a, 2 * k + b)] = block[(a, b)];
                }
            }
        }
        let frame = EpsNormFrame::for_matrix(&assembled, None).unwrap();
        assert!((frame.rho() - 0.9747).abs() < 5e-4);
        assert!(frame.norm_ehat() >= frame.rho() - 1e-12);
        assert!(frame.norm_ehat() <= frame.rho() + frame.epsilon());
        assert!(frame.norm_ehat() < 0.98735 + 1e-9);
    }

    #[test]
    fn standin_certificate_golden_values() {
        // frozen regression values, computed once by this implementation
        let g = DirectedGraph::standin10();
        let l = g.laplacian();
        let spectrum = spectral_decomposition(&l).unwrap();
        let sys = SystemMatrices::new(omega_ref(), 0.1, l).unwrap();
        let frame = EpsNormFrame::build(&sys, &spectrum, None).unwrap();
        let cert = certificate(&sys, &frame, &spectrum, 0.5, 10.0, 0.01).unwrap();
        let close = |got: f64, want: f64| (got - want).abs() <= 1e-9 * want.abs();
        assert!(
            close(cert.rho, 9.64404394247929786e-1),
            "rho = {:.17e}",
            cert.rho
        );
        assert!(
            close(cert.theta, 6.81269458339620049e-1),
            "theta = {:.17e}",
            cert.theta
        );
        assert!(
            close(cert.m_threshold, 6.81269458339620027e0),
            "m_threshold = {:.17e}",
            cert.m_threshold
        );
        assert_eq!(cert.dwell_samples, 138);
        assert!(close(cert.s1_radius, 2.08245713348244479e1));
        assert!(close(cert.s2_radius, 1.41871444334306265e1));
    }

    #[test]
    fn intersample_norms_recover_period_constants() {
        let g = DirectedGraph::standin10();
        let l = g.laplacian();
        let spectrum = spectral_decomposition(&l).unwrap();
        let sys = SystemMatrices::new(omega_ref(), 0.1, l).unwrap();
        let frame = EpsNormFrame::build(&sys, &spectrum, None).unwrap();
        let rows = intersample_norms(&sys, &spectrum, &frame, 8).unwrap();
        assert_eq!(rows.len(), 8);
        for &(dt, ne, nfb) in &rows {
            assert!(dt > 0.0 && dt <= 0.1 + 1e-15);
            assert!(ne.is_finite() && nfb.is_finite());
        }
        let (dt, ne, nfb) = rows[7];
        assert!((dt - 0.1).abs() < 1e-15);
        assert!((ne - frame.norm_ehat()).abs() < 1e-9);
        assert!((nfb - frame.c_in().unwrap()).abs() < 1e-9);
    }

    #[test]
    fn mode_roots_match_block_eigenvalues() {
        // dense 2x2 eigensolve of the assembled per-mode block as oracle
        let cases = [
            (C64::new(2.3, 0.4), 1.1, 0.17),
            (C64::new(0.9, -1.2), 0.6, 0.9),
            (C64::new(5.0, 0.0), 2.2, 0.05),
        ];
        for (lam, w, t) in cases {
            let block = crate::stability::mode_block(lam, w, t);
            let dense = block.eigenvalues().expect("2x2 eigensolve");
            let (x1, x2) = mode_quadratic_roots(lam, w, t).unwrap();
            let mut got = vec![dense[0], dense[1]];
            for want in [x1, x2] {
                let (idx, dist) = got
                    .iter()
                    .enumerate()
                    .map(|(i, g)| (i, (g - want).norm()))
                    .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
                    .unwrap();
                assert!(dist < 1e-12, "root {want} vs block eigenvalues");
                got.swap_remove(idx);
            }
        }
    }

    #[test]
    fn certificate_rejects_small_range() {
        let g = DirectedGraph::standin10();
        let l = g.laplacian();
        let spectrum = spectral_decomposition(&l).unwrap();
        let sys = SystemMatrices::new(omega_ref(), 0.1, l).unwrap();
        let frame = EpsNormFrame::build(&sys, &spectrum, None).unwrap();
        assert!(matches!(
            certificate(&sys, &frame, &spectrum, 0.5, 0.9, 0.01),
            Err(Error::RangeBelowTwoDelta { .. })
        ));
        assert!(matches!(
            certificate(&sys, &frame, &spectrum, 0.5, 2.0, 0.01),
            Err(Error::MBelowThreshold { .. })
        ));
    }
}

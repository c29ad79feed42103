//! Sampling-period feasibility bounds, per-mode characteristic quadratics,
//! and the complex-quadratic Hurwitz test that connects them.

use crate::error::{Error, Result};
use crate::schur::{CMatrix, C64};

/// Smallest |sin(omega*tau)| treated as a usable sampling configuration.
pub const SIN_BOUNDARY: f64 = 1e-12;

/// Per-mode feasibility bound `phi` and its arccotangent window width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeBound {
    pub lambda: C64,
    pub phi: f64,
    pub arccot_phi: f64,
}

/// The bound `phi` for one nonzero Laplacian eigenvalue.
///
/// `phi = [Re Im^2 + Re^3 + sqrt((Re Im^2 + Re^3)^2 + 4 w^2 Re^2 Im^2)]
///        / (2 w Re^2)`;
/// for real eigenvalues this collapses to `Re / w` exactly.
pub fn phi_bound(lambda: C64, omega: f64) -> Result<ModeBound> {
    if !(lambda.re > 0.0) {
        return Err(Error::NonpositiveRealPart(lambda));
    }
    let (re, im) = (lambda.re, lambda.im);
    let a = re * im * im + re * re * re;
    let rad = (a * a + 4.0 * omega * omega * re * re * im * im).sqrt();
    let phi = (a + rad) / (2.0 * omega * re * re);
    Ok(ModeBound {
        lambda,
        phi,
        // arccot on (0, pi); phi > 0 always lands in (0, pi/2)
        arccot_phi: (1.0 / phi).atan(),
    })
}

/// Feasible sampling periods for a spectrum at gain `omega`.
///
/// `tau0` is the smallest arccot(phi_i) over the modes (the Table-1 column);
/// the maximal feasible intervals of `cot(omega tau / 2) > phi_i` are
/// `(2k pi / omega, 2k pi / omega + 2 tau0 / omega)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    pub omega: f64,
    pub tau0: f64,
    pub phi_max: f64,
    pub windows: Vec<(f64, f64)>,
    pub per_mode: Vec<ModeBound>,
}

impl FeasibilityReport {
    /// Membership test, evaluated directly on the defining inequality.
    pub fn is_feasible(&self, tau: f64) -> bool {
        if !(tau > 0.0) {
            return false;
        }
        let h = 0.5 * self.omega * tau;
        let s = h.sin();
        if s.abs() < SIN_BOUNDARY {
            return false;
        }
        h.cos() / s > self.phi_max
    }
}

pub fn feasible_windows(lambdas: &[C64], omega: f64, k_max: usize) -> Result<FeasibilityReport> {
    if lambdas.is_empty() {
        return Err(Error::EmptySpectrum);
    }
    let per_mode: Vec<ModeBound> = lambdas
        .iter()
        .map(|&l| phi_bound(l, omega))
        .collect::<Result<_>>()?;
    let tau0 = per_mode
        .iter()
        .map(|m| m.arccot_phi)
        .fold(f64::INFINITY, f64::min);
    let phi_max = per_mode.iter().map(|m| m.phi).fold(0.0, f64::max);
    let period = 2.0 * std::f64::consts::PI / omega;
    let width = 2.0 * tau0 / omega;
    let windows = (0..=k_max)
        .map(|k| {
            let left = k as f64 * period;
            (left, left + width)
        })
        .collect();
    Ok(FeasibilityReport {
        omega,
        tau0,
        phi_max,
        windows,
        per_mode,
    })
}

/// The 2x2 one-period block of the reduced map for a single mode:
///
/// ```text
/// [ cos(wt)        sin(wt)/w + lambda (cos(wt) - 1) / w^2 ]
/// [ -w sin(wt)     cos(wt) - lambda sin(wt) / w           ]
/// ```
pub fn mode_block(lambda: C64, omega: f64, tau: f64) -> CMatrix {
    let (s, c) = (omega * tau).sin_cos();
    let r = |x: f64| C64::new(x, 0.0);
    CMatrix::from_row_slice(
        2,
        2,
        &[
            r(c),
            r(s / omega) + lambda * r((c - 1.0) / (omega * omega)),
            r(-omega * s),
            r(c) - lambda * r(s / omega),
        ],
    )
}

/// Roots of the per-mode characteristic quadratic
/// `x^2 + (sin(wt) lambda / w - 2 cos(wt)) x + (1 - sin(wt) lambda / w)`.
///
/// Uses the cancellation-safe form: the root farther from zero is computed
/// from the quadratic formula, the other from the product of roots.
pub fn mode_quadratic_roots(lambda: C64, omega: f64, tau: f64) -> Result<(C64, C64)> {
    let (s, c) = (omega * tau).sin_cos();
    if s.abs() < SIN_BOUNDARY {
        return Err(Error::DegenerateSampling(s));
    }
    let a = lambda * (s / omega);
    let b = a - C64::new(2.0 * c, 0.0);
    let q = C64::new(1.0, 0.0) - a;
    let disc = (b * b - C64::new(4.0, 0.0) * q).sqrt();
    let x1 = if (b.conj() * disc).re >= 0.0 {
        (-b - disc) / 2.0
    } else {
        (-b + disc) / 2.0
    };
    let x2 = if x1.norm() > 0.0 { q / x1 } else { -b - x1 };
    Ok((x1, x2))
}

/// Spectral radius of the reduced one-period map, from the per-mode roots.
pub fn spectral_radius_reduced(lambdas: &[C64], omega: f64, tau: f64) -> Result<f64> {
    if lambdas.is_empty() {
        return Err(Error::EmptySpectrum);
    }
    let mut rho = 0.0f64;
    for &lam in lambdas {
        let (x1, x2) = mode_quadratic_roots(lam, omega, tau)?;
        rho = rho.max(x1.norm()).max(x2.norm());
    }
    Ok(rho)
}

/// `g(s) = s^2 + (a + b i) s + (c + d i)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexQuadratic {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl ComplexQuadratic {
    /// Both roots, by the complex quadratic formula.
    pub fn roots(&self) -> (C64, C64) {
        let p = C64::new(self.a, self.b);
        let q = C64::new(self.c, self.d);
        let disc = (p * p - C64::new(4.0, 0.0) * q).sqrt();
        ((-p + disc) / 2.0, (-p - disc) / 2.0)
    }
}

/// Both roots strictly in the left half plane iff
/// `a > 0` and `a b d + a^2 c - d^2 > 0`.
pub fn complex_quadratic_is_hurwitz(q: &ComplexQuadratic) -> bool {
    q.a > 0.0 && q.a * q.b * q.d + q.a * q.a * q.c - q.d * q.d > 0.0
}

/// Unit-disk root containment for one mode via the bilinear transform
/// `x = (s + 1)/(s - 1)` and the Hurwitz test on the image quadratic
/// `s^2 + (lambda/w) cot(wt/2) s + cot^2(wt/2) - (lambda/w) cot(wt/2)`.
pub fn bilinear_stability_check(lambda: C64, omega: f64, tau: f64) -> Result<bool> {
    let s_full = (omega * tau).sin();
    if s_full.abs() < SIN_BOUNDARY {
        return Err(Error::DegenerateSampling(s_full));
    }
    let h = 0.5 * omega * tau;
    let z = h.cos() / h.sin();
    let lw = lambda / omega;
    Ok(complex_quadratic_is_hurwitz(&ComplexQuadratic {
        a: z * lw.re,
        b: z * lw.im,
        c: z * z - z * lw.re,
        d: -z * lw.im,
    }))
}

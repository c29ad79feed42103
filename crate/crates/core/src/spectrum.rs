//! Spectral objects of a strongly connected Laplacian: the left null vector,
//! the nonzero eigenvalues, and a reduced basis for the disagreement subspace.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::graph::Laplacian;
use crate::schur::{inf_norm, sorted_schur, CMatrix, C64};

/// Spectral decomposition of a Laplacian with a simple zero eigenvalue.
///
/// Invariants (verified by [`LaplacianSpectrum::residuals`] and the test
/// suite rather than assumed):
/// * `xi^T L = 0`, `xi_i > 0`, `sum xi_i = 1`;
/// * `p_hat_dagger * p_hat = I` and `xi^T p_hat = 0`;
/// * `p_hat_dagger * L * p_hat` is upper triangular with the nonzero
///   eigenvalues on its diagonal, sorted by `(Re, Im)`.
///
/// The basis is an ordered Schur basis of the `xi`-orthogonal complement:
/// triangularity and the diagonal are all the downstream formulas need, so
/// no Jordan structure is ever materialized and defective Laplacians are
/// handled like any other input.
#[derive(Debug, Clone)]
pub struct LaplacianSpectrum {
    xi: DVector<f64>,
    lambdas: Vec<C64>,
    p_hat: CMatrix,
    p_hat_dagger: CMatrix,
    t_l: CMatrix,
}

impl LaplacianSpectrum {
    pub fn xi(&self) -> &DVector<f64> {
        &self.xi
    }

    pub fn xi_bar(&self) -> f64 {
        self.xi.iter().cloned().fold(0.0, f64::max)
    }

    /// Nonzero eigenvalues, sorted by `(Re, Im)`.
    pub fn lambdas(&self) -> &[C64] {
        &self.lambdas
    }

    /// `n x (n-1)` reduced basis with orthonormal columns.
    pub fn p_hat(&self) -> &CMatrix {
        &self.p_hat
    }

    /// `(n-1) x n` left inverse of the reduced basis.
    pub fn p_hat_dagger(&self) -> &CMatrix {
        &self.p_hat_dagger
    }

    /// Upper-triangular restriction `p_hat_dagger * L * p_hat`.
    pub fn reduced_laplacian(&self) -> &CMatrix {
        &self.t_l
    }

    pub fn node_count(&self) -> usize {
        self.xi.len()
    }

    /// Worst-case residuals of the defining identities, for diagnostics:
    /// `(||xi^T L||_inf, ||P^† P - I||_inf, ||xi^T P||_inf, lower-tri residue)`.
    pub fn residuals(&self, l: &Laplacian) -> (f64, f64, f64, f64) {
        let n = self.xi.len();
        let xi_l = l.matrix().transpose() * &self.xi;
        let r1 = xi_l.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let gram = &self.p_hat_dagger * &self.p_hat;
        let r2 = inf_norm(&(&gram - CMatrix::identity(n - 1, n - 1)));
        let xi_c = CMatrix::from_fn(1, n, |_, i| C64::new(self.xi[i], 0.0));
        let r3 = inf_norm(&(&xi_c * &self.p_hat));
        let lc = l.matrix().map(|v| C64::new(v, 0.0));
        let t = &self.p_hat_dagger * &lc * &self.p_hat;
        let mut r4 = 0.0f64;
        for i in 1..n - 1 {
            for j in 0..i {
                r4 = r4.max(t[(i, j)].norm());
            }
        }
        (r1, r2, r3, r4)
    }
}

/// Left null vector of `L`, positive and normalized to unit sum.
fn left_null_vector(l: &Laplacian) -> Result<DVector<f64>> {
    let n = l.dim();
    let lt = l.matrix().transpose();
    let svd = lt.svd(true, true);
    let sv = &svd.singular_values;
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&a, &b| sv[a].partial_cmp(&sv[b]).unwrap());
    let scale = sv[order[n - 1]].max(1.0);
    if n >= 2 && sv[order[1]] <= 1e-10 * scale {
        // a second numerically-zero singular value: zero eigenvalue not simple
        return Err(Error::NotStronglyConnected);
    }
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::EigensolverFailure("SVD without V factor".into()))?;
    let mut xi = v_t.row(order[0]).transpose();
    let sum: f64 = xi.iter().sum();
    if sum < 0.0 {
        xi = -xi;
    }
    if xi.iter().any(|&x| x <= 1e-12) {
        return Err(Error::XiNotPositive(1e-12));
    }
    let sum: f64 = xi.iter().sum();
    Ok(xi / sum)
}

/// Orthonormal basis of the orthogonal complement of `xi` (Householder
/// completion, deterministic for a fixed input).
fn complement_basis(xi: &DVector<f64>) -> DMatrix<f64> {
    let n = xi.len();
    let u = xi / xi.norm();
    let mut w = u.clone();
    w[0] -= 1.0;
    let nw = w.norm();
    let h = if nw < 1e-14 {
        DMatrix::identity(n, n)
    } else {
        let wn = w / nw;
        DMatrix::identity(n, n) - 2.0 * &wn * wn.transpose()
    };
    h.columns(1, n - 1).into_owned()
}

/// Decompose a strongly connected Laplacian into its consensus objects.
///
/// The zero eigenvalue must be simple; a second (numerically) zero
/// eigenvalue or a nonpositive `xi` component reports the graph as not
/// strongly connected.
pub fn spectral_decomposition(l: &Laplacian) -> Result<LaplacianSpectrum> {
    let n = l.dim();
    if n < 2 {
        return Err(Error::TooFewNodes(n));
    }
    let xi = left_null_vector(l)?;
    let q = complement_basis(&xi);
    let a_w = q.transpose() * l.matrix() * &q;
    let a_wc = a_w.map(|v| C64::new(v, 0.0));
    let (z, t_l) = sorted_schur(&a_wc)?;
    let qc = q.map(|v| C64::new(v, 0.0));
    let p_hat = &qc * &z;
    let p_hat_dagger = p_hat.adjoint();
    let lambdas: Vec<C64> = (0..n - 1).map(|i| t_l[(i, i)]).collect();
    let scale = inf_norm(&t_l).max(1.0);
    if lambdas.iter().any(|lam| lam.re <= 1e-10 * scale) {
        return Err(Error::NotStronglyConnected);
    }
    Ok(LaplacianSpectrum {
        xi,
        lambdas,
        p_hat,
        p_hat_dagger,
        t_l,
    })
}

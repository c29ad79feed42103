//! Ordered complex Schur decompositions and triangular eigenvector solves.
//!
//! nalgebra supplies the raw Schur iteration; this module enforces a strict
//! upper-triangular factor and reorders the diagonal into the deterministic
//! `(Re, Im)` lexicographic order used everywhere else in the crate.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Max row sum of moduli (the induced infinity norm).
pub fn inf_norm(m: &CMatrix) -> f64 {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn inf_norm_vec(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Schur decomposition `A = Z T Z^H` with `T` upper triangular and its
/// diagonal sorted ascending by `(Re, Im)`.
pub fn sorted_schur(a: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    let m = a.nrows();
    if m == 0 || a.ncols() != m {
        return Err(Error::DimensionMismatch {
            expected: m.max(1),
            got: a.ncols(),
        });
    }
    if m == 1 {
        return Ok((CMatrix::identity(1, 1), a.clone()));
    }
    let scale = inf_norm(a).max(1.0);
    let schur = a
        .clone()
        .try_schur(f64::EPSILON * scale, 200 * m * m)
        .ok_or_else(|| Error::EigensolverFailure("Schur iteration did not converge".into()))?;
    let (z, mut t) = schur.unpack();
    let mut z = z;

    // the generic iteration can leave O(eps) dust below the diagonal
    let mut lower = 0.0f64;
    for i in 1..m {
        for j in 0..i {
            lower = lower.max(t[(i, j)].norm());
            t[(i, j)] = C64::new(0.0, 0.0);
        }
    }
    if lower > 1e-9 * scale {
        return Err(Error::EigensolverFailure(format!(
            "Schur factor not triangular (lower residue {lower:.3e})"
        )));
    }

    // bubble the diagonal into (Re, Im) order with unitary swaps
    let key = |z: C64| (z.re, z.im);
    loop {
        let mut swapped = false;
        for i in 0..m - 1 {
            if key(t[(i + 1, i + 1)]) < key(t[(i, i)]) {
                swap_adjacent(&mut t, &mut z, i);
                swapped = true;
            }
        }
        if !swapped {
            break;
        }
    }
    Ok((z, t))
}

/// Swap the diagonal entries at positions `i`, `i+1` of a triangular `t`
/// by a 2x2 unitary similarity, updating `z` accordingly.
fn swap_adjacent(t: &mut CMatrix, z: &mut CMatrix, i: usize) {
    let m = t.nrows();
    let a = t[(i, i)];
    let b = t[(i, i + 1)];
    let d = t[(i + 1, i + 1)];
    // (b, d - a) spans the eigenvector of [[a, b], [0, d]] for eigenvalue d
    let v0 = b;
    let v1 = d - a;
    let nv = (v0.norm_sqr() + v1.norm_sqr()).sqrt();
    if nv == 0.0 {
        return; // identical eigenvalues, already interchangeable
    }
    let c = v0 / nv;
    let s = v1 / nv;
    // G = [[c*, s*], [-s, c]] sends the eigenvector to e1
    for col in 0..m {
        let x = t[(i, col)];
        let y = t[(i + 1, col)];
        t[(i, col)] = c.conj() * x + s.conj() * y;
        t[(i + 1, col)] = -s * x + c * y;
    }
    for row in 0..m {
        let x = t[(row, i)];
        let y = t[(row, i + 1)];
        t[(row, i)] = x * c + y * s;
        t[(row, i + 1)] = -x * s.conj() + y * c.conj();
        let zx = z[(row, i)];
        let zy = z[(row, i + 1)];
        z[(row, i)] = zx * c + zy * s;
        z[(row, i + 1)] = -zx * s.conj() + zy * c.conj();
    }
    t[(i + 1, i)] = C64::new(0.0, 0.0);
}

/// Eigenvectors of an upper-triangular matrix by guarded back-substitution.
///
/// Column `k` solves `(T - T_kk I) v = 0` with `v_k = 1` and `v_j = 0` for
/// `j > k`; tiny divisors are clamped at `eps * scale` so exactly repeated
/// eigenvalues in decoupled blocks resolve to clean zeros. Columns are
/// normalized so their largest-modulus entry is one.
pub fn triangular_eigenvectors(t: &CMatrix) -> CMatrix {
    let m = t.nrows();
    let scale = inf_norm(t).max(1.0);
    let guard = f64::EPSILON * scale;
    let mut v = CMatrix::zeros(m, m);
    for k in 0..m {
        let lam = t[(k, k)];
        v[(k, k)] = C64::new(1.0, 0.0);
        for j in (0..k).rev() {
            let mut acc = C64::new(0.0, 0.0);
            for l in (j + 1)..=k {
                acc += t[(j, l)] * v[(l, k)];
            }
            let mut denom = lam - t[(j, j)];
            if denom.norm() < guard {
                denom = C64::new(guard, 0.0);
            }
            v[(j, k)] = acc / denom;
        }
        let mut best = 0usize;
        let mut best_norm = 0.0;
        for j in 0..=k {
            let nj = v[(j, k)].norm();
            if nj > best_norm {
                best_norm = nj;
                best = j;
            }
        }
        let pivot = v[(best, k)];
        for j in 0..=k {
            v[(j, k)] /= pivot;
        }
    }
    v
}

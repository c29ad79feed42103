//! Closed-form flow blocks against an independent truncated-series
//! matrix-exponential oracle (scaling and squaring, no shared code with the
//! implementation path).

use nalgebra::DMatrix;
use oscsync::propagation::flow_blocks;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// Series oracle: E(h) = sum (A h)^k / k!, F(h) = sum A^k h^{k+1} / (k+1)!,
/// then doubled via E(2t) = E(t)^2 and F(2t) = F(t) + E(t) F(t).
fn series_flow(omega: f64, dt: f64, n: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let dim = 2 * n;
    let mut a = DMatrix::<f64>::zeros(dim, dim);
    for i in 0..n {
        a[(i, n + i)] = 1.0;
        a[(n + i, i)] = -omega * omega;
    }
    let norm_a = omega.max(1.0) * omega.max(1.0).max(1.0);
    let mut squarings = 0u32;
    let mut h = dt;
    while norm_a * h > 0.5 {
        h /= 2.0;
        squarings += 1;
    }
    let mut e = DMatrix::<f64>::identity(dim, dim);
    let mut f = DMatrix::<f64>::zeros(dim, dim);
    let mut term = DMatrix::<f64>::identity(dim, dim); // (A h)^k / k!
    let mut fterm = DMatrix::<f64>::identity(dim, dim) * h; // A^k h^{k+1}/(k+1)!
    f += &fterm;
    for k in 1..=24 {
        term = (&term * &a) * (h / k as f64);
        e += &term;
        fterm = (&fterm * &a) * (h / (k + 1) as f64);
        f += &fterm;
    }
    for _ in 0..squarings {
        f = &f + &e * &f;
        e = &e * &e;
    }
    (e, f)
}

fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

#[test]
fn closed_form_matches_series_oracle() {
    let mut rng = ChaCha12Rng::seed_from_u64(42);
    for _ in 0..100 {
        let omega = rng.gen_range(0.2..5.0);
        let dt = rng.gen_range(1e-3..2.0);
        let n = rng.gen_range(1..=4);
        let (e, f) = flow_blocks(omega, dt, n).unwrap();
        let (eo, fo) = series_flow(omega, dt, n);
        assert!(
            max_abs_diff(&e, &eo) < 1e-10,
            "exp mismatch at omega={omega}, dt={dt}"
        );
        assert!(
            max_abs_diff(&f, &fo) < 1e-10,
            "forcing mismatch at omega={omega}, dt={dt}"
        );
    }
}

#[test]
fn reference_gain_block_value() {
    let omega = (std::f64::consts::PI / 2.0).sqrt();
    let (e, f) = flow_blocks(omega, 0.1, 2).unwrap();
    let (eo, fo) = series_flow(omega, 0.1, 2);
    assert!(max_abs_diff(&e, &eo) < 1e-12);
    assert!(max_abs_diff(&f, &fo) < 1e-12);
    assert!((e[(0, 0)] - (omega * 0.1).cos()).abs() < 1e-15);
}

#[test]
fn free_flow_semigroup() {
    let mut rng = ChaCha12Rng::seed_from_u64(7);
    for _ in 0..50 {
        let omega = rng.gen_range(0.2..5.0);
        let dt1 = rng.gen_range(1e-3..1.0);
        let dt2 = rng.gen_range(1e-3..1.0);
        let (e1, _) = flow_blocks(omega, dt1, 2).unwrap();
        let (e2, _) = flow_blocks(omega, dt2, 2).unwrap();
        let (e12, _) = flow_blocks(omega, dt1 + dt2, 2).unwrap();
        assert!(max_abs_diff(&e12, &(&e1 * &e2)) < 1e-10);
    }
}

#[test]
fn dt_zero_limit() {
    // E(dt) -> I and F(dt) -> 0 entrywise as dt -> 0
    let (e, f) = flow_blocks(1.7, 1e-12, 2).unwrap();
    let id = DMatrix::<f64>::identity(4, 4);
    assert!(max_abs_diff(&e, &id) < 1e-10);
    assert!(f.iter().all(|x| x.abs() < 1e-10));
}

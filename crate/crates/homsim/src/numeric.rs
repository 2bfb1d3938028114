//! Small internal numerical helpers.

use crate::error::{Error, Result};

/// Average of a smooth 2-pi-periodic function over one period, by trapezoid
/// refinement on equally spaced nodes (spectrally convergent). Node count
/// doubles until successive estimates agree to 1e-11.
pub(crate) fn phase_average<F: Fn(f64) -> f64>(f: F) -> Result<f64> {
    let mut n = 16usize;
    let mut prev = periodic_mean(&f, n);
    loop {
        n *= 2;
        let cur = periodic_mean(&f, n);
        if (cur - prev).abs() <= 1e-11 * cur.abs().max(1.0) {
            return Ok(cur);
        }
        if n >= (1 << 16) {
            return Err(Error::Accuracy(format!(
                "phase quadrature did not converge below 1e-11 by {n} nodes"
            )));
        }
        prev = cur;
    }
}

fn periodic_mean<F: Fn(f64) -> f64>(f: &F, n: usize) -> f64 {
    let step = 2.0 * std::f64::consts::PI / n as f64;
    (0..n).map(|i| f(i as f64 * step)).sum::<f64>() / n as f64
}

/// Solve the square system `a x = b` in place by Gaussian elimination with
/// partial pivoting. Returns None when the system is singular to working
/// precision. Sized for the handful of fit parameters used here.
pub(crate) fn solve_small(a: &mut [Vec<f64>], b: &mut [f64]) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[pivot_row][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

/// Inverse of a small symmetric positive-definite matrix via column solves.
pub(crate) fn invert_small(m: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = m.len();
    let mut inv = vec![vec![0.0; n]; n];
    for col in 0..n {
        let mut a: Vec<Vec<f64>> = m.to_vec();
        let mut e = vec![0.0; n];
        e[col] = 1.0;
        let x = solve_small(&mut a, &mut e)?;
        for row in 0..n {
            inv[row][col] = x[row];
        }
    }
    Some(inv)
}

//! FFT plumbing: cached plans, axis-wise transforms on row-major data, the
//! centered unitary transform used by [`crate::field::Field`], and a
//! Bluestein chirp transform for off-lattice spectral sampling.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::grid::Grid;

thread_local! {
    static PLANS: RefCell<PlanCache> = RefCell::new(PlanCache::default());
}

struct PlanCache {
    planner: FftPlanner<f64>,
    fwd: HashMap<usize, Arc<dyn Fft<f64>>>,
    inv: HashMap<usize, Arc<dyn Fft<f64>>>,
}

impl Default for PlanCache {
    fn default() -> Self {
        PlanCache { planner: FftPlanner::new(), fwd: HashMap::new(), inv: HashMap::new() }
    }
}

fn with_plan(len: usize, forward: bool, data: &mut [Complex64]) {
    PLANS.with(|c| {
        let mut c = c.borrow_mut();
        let plan = if forward {
            c.fwd.get(&len).cloned().unwrap_or_else(|| {
                let p = c.planner.plan_fft_forward(len);
                c.fwd.insert(len, p.clone());
                p
            })
        } else {
            c.inv.get(&len).cloned().unwrap_or_else(|| {
                let p = c.planner.plan_fft_inverse(len);
                c.inv.insert(len, p.clone());
                p
            })
        };
        plan.process(data);
    });
}

/// Unnormalized forward DFT of a contiguous buffer.
pub fn fft_in_place(data: &mut [Complex64]) {
    with_plan(data.len(), true, data);
}

/// Unnormalized inverse DFT of a contiguous buffer.
pub fn ifft_in_place(data: &mut [Complex64]) {
    with_plan(data.len(), false, data);
}

/// Apply the unnormalized DFT along every axis of row-major `values`.
pub fn fft_nd(values: &mut [Complex64], grid: &Grid, forward: bool) {
    match grid.dim() {
        1 => with_plan(values.len(), forward, values),
        2 => {
            let n0 = grid.axis(0).points;
            let n1 = grid.axis(1).points;
            // axis 1: contiguous rows
            for row in values.chunks_mut(n1) {
                with_plan(n1, forward, row);
            }
            // axis 0: strided columns via scratch
            let mut col = vec![Complex64::default(); n0];
            for j in 0..n1 {
                for i in 0..n0 {
                    col[i] = values[i * n1 + j];
                }
                with_plan(n0, forward, &mut col);
                for i in 0..n0 {
                    values[i * n1 + j] = col[i];
                }
            }
        }
        d => unreachable!("dimension {d}"),
    }
}

/// Centered unitary transform.
///
/// Forward maps samples on `x_m = -L/2 + m dx` to samples of the unitary
/// continuum transform `(2 pi)^{-n/2} integral e^{-i x xi} f(x) dx` on the
/// centered frequency lattice `xi_k = -pi N/L + k dxi`. It is an exact
/// isometry of the discrete L^2 inner products (`dx^n` against `dxi^n`).
/// Requires N divisible by 4 on every axis, which `Grid` guarantees.
pub fn centered_transform(values: &mut [Complex64], grid: &Grid, forward: bool) {
    // e^{-i x_m xi_k} = (-1)^m (-1)^k e^{-2 pi i mk/N} when 4 | N.
    apply_alternating_signs(values, grid);
    fft_nd(values, grid, forward);
    apply_alternating_signs(values, grid);
    let scale = if forward {
        grid.cell_volume() / (2.0 * std::f64::consts::PI).powf(grid.dim() as f64 / 2.0)
    } else {
        grid.dual_cell_volume() / (2.0 * std::f64::consts::PI).powf(grid.dim() as f64 / 2.0)
    };
    for v in values.iter_mut() {
        *v *= scale;
    }
}

fn apply_alternating_signs(values: &mut [Complex64], grid: &Grid) {
    match grid.dim() {
        1 => {
            for (m, v) in values.iter_mut().enumerate() {
                if m & 1 == 1 {
                    *v = -*v;
                }
            }
        }
        2 => {
            let n1 = grid.axis(1).points;
            for (i, v) in values.iter_mut().enumerate() {
                let m0 = i / n1;
                let m1 = i % n1;
                if (m0 + m1) & 1 == 1 {
                    *v = -*v;
                }
            }
        }
        d => unreachable!("dimension {d}"),
    }
}

/// Centered chirp transform (Bluestein):
/// `S_j = sum_m g_m exp(-i alpha (j - N/2)(m - N/2))`, j = 0..N-1.
///
/// With `alpha = 2 pi / N` this is the centered DFT; arbitrary real `alpha`
/// evaluates the same sum on an off-lattice frequency spacing, which is how
/// spectra are sampled at the scaled points needed by dispersive profiles.
/// Best used with moderate `|alpha| * N^2` so the chirp phases stay well
/// conditioned in f64.
pub fn czt_centered(input: &[Complex64], alpha: f64) -> Vec<Complex64> {
    let n = input.len();
    let c = n as f64 / 2.0;
    let m = (2 * n).next_power_of_two();

    // a_m = g_m e^{-i alpha (m-c)^2 / 2}, kernel b_k = e^{+i alpha k^2 / 2}
    let mut a = vec![Complex64::default(); m];
    for (i, &g) in input.iter().enumerate() {
        let d = i as f64 - c;
        a[i] = g * Complex64::from_polar(1.0, -0.5 * alpha * d * d);
    }
    let mut b = vec![Complex64::default(); m];
    for k in 0..n {
        let w = Complex64::from_polar(1.0, 0.5 * alpha * (k as f64) * (k as f64));
        b[k] = w;
        if k > 0 {
            b[m - k] = w;
        }
    }
    fft_in_place(&mut a);
    fft_in_place(&mut b);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= y;
    }
    ifft_in_place(&mut a);
    let inv_m = 1.0 / m as f64;
    (0..n)
        .map(|j| {
            let d = j as f64 - c;
            a[j] * Complex64::from_polar(inv_m, -0.5 * alpha * d * d)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct_centered(input: &[Complex64], alpha: f64) -> Vec<Complex64> {
        let n = input.len();
        let c = n as f64 / 2.0;
        (0..n)
            .map(|j| {
                input
                    .iter()
                    .enumerate()
                    .map(|(m, &g)| {
                        g * Complex64::from_polar(1.0, -alpha * (j as f64 - c) * (m as f64 - c))
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn czt_matches_direct_sum() {
        let n = 64;
        let mut rng = 123456789u64;
        let mut next = || {
            rng = rng.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (rng >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let input: Vec<Complex64> = (0..n).map(|_| Complex64::new(next(), next())).collect();
        for &alpha in &[2.0 * std::f64::consts::PI / n as f64, 0.0371, -0.11] {
            let got = czt_centered(&input, alpha);
            let want = direct_centered(&input, alpha);
            let err: f64 = got
                .iter()
                .zip(&want)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(err < 1e-10, "alpha={alpha} err={err}");
        }
    }
}
